"""Classification of qudit interaction sets by their 2-local structure.

The pipeline reads off the 2-local part of every interaction, its 2-local rank
and, in the rank-one case, whether the interaction is a tensor power of a
shifted rank-one projector.  Sets whose every multi-qudit component has the
form (d|psi><psi| - I)^{(x)l} for one common psi are stoquastic after a local
basis change; every other set with a multi-qudit component is universal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    DimensionError,
    LocalOperator,
    check_hermitian,
    embed,
    gell_mann_basis,
    kron_all,
    partial_trace,
    spectral_norm,
)

LA_UNIVERSAL = "LA_UNIVERSAL"
LA_STOQUASTIC_UNIVERSAL = "LA_STOQUASTIC_UNIVERSAL"
ONE_LOCAL_ONLY = "ONE_LOCAL_ONLY"

RANK_TOL = 1e-8
CLUSTER_TOL = 1e-8
ZERO_TOL = 1e-12
BORDERLINE_FACTOR = 10.0

LABEL_RANK0 = "2-local rank 0"
LABEL_RANK2 = "2-local rank at least 2"
LABEL_ASYM = "rank-one 2-local part A(x)B with B not proportional to A"
LABEL_THREE = "rank-one 2-local part with three distinct eigenvalues"
LABEL_NOT_PROJ = "rank-one 2-local part not of the form a|psi><psi| + bI"
LABEL_STOQ = "2-local part alpha (|psi><psi| - I/d)^(x)2 up to 1-local terms"
LABEL_SET_STOQ = "every multi-qudit component proportional to (d|psi><psi| - I)^(x)l for a common psi"
LABEL_SET_MIXED = "multi-qudit components not tensor powers of one common projector"
LABEL_ONE_LOCAL = "no multi-qudit component"


def _as_matrix(H, d: int | None) -> tuple[np.ndarray, int]:
    if isinstance(H, LocalOperator):
        return np.asarray(H.matrix), H.local_dim
    if hasattr(H, "operator") and isinstance(H.operator, LocalOperator):
        return np.asarray(H.operator.matrix), H.operator.local_dim
    if d is None:
        raise DimensionError("local dimension required for a bare matrix")
    return np.asarray(H, dtype=complex), int(d)


def _arity(M: np.ndarray, d: int) -> int:
    k = round(np.log(M.shape[0]) / np.log(d))
    if d**k != M.shape[0]:
        raise DimensionError(f"matrix of size {M.shape[0]} is not a register of qudits of dimension {d}")
    return k


# ------------------------------------------------------------------ 2-local part


@dataclass(frozen=True)
class TwoLocalDecomposition:
    H_prime: np.ndarray
    M: np.ndarray
    singular_values: np.ndarray
    rank_at_tol: int
    tol: float
    borderline: bool
    local_dim: int

    def reconstruct(self) -> np.ndarray:
        T = gell_mann_basis(self.local_dim).elements
        return np.einsum("ab,aij,bkl->ikjl", self.M, T, T).reshape(self.H_prime.shape)


def two_local_part(H, d: int | None = None, tol: float = RANK_TOL) -> TwoLocalDecomposition:
    """H' = H - I/d (x) tr_1 H - tr_2 H (x) I/d + tr(H) I/d^2 and its coefficient matrix."""
    M0, d = _as_matrix(H, d)
    if _arity(M0, d) != 2:
        raise DimensionError("the 2-local part is defined for two-qudit interactions")
    check_hermitian(M0)
    I = np.eye(d)
    Hp = M0 - np.kron(I / d, partial_trace(M0, 0, d, 2)) - np.kron(partial_trace(M0, 1, d, 2), I / d)
    Hp = Hp + np.trace(M0) * np.eye(d * d) / d**2
    T = gell_mann_basis(d).elements
    M = 4 * np.einsum("ikjl,aji,blk->ab", Hp.reshape(d, d, d, d), T, T).real
    s = np.linalg.svd(M, compute_uv=False)
    rank, borderline = _rank(s, tol, scale=max(1.0, spectral_norm(M0)))
    return TwoLocalDecomposition(Hp, M, s, rank, tol, borderline, d)


def _rank(s: np.ndarray, tol: float, scale: float = 1.0) -> tuple[int, bool]:
    if s.size == 0 or s[0] <= ZERO_TOL * scale:
        return 0, False
    rel = s / s[0]
    rank = int(np.sum(rel > tol))
    borderline = bool(np.any((rel > tol / BORDERLINE_FACTOR) & (rel <= tol * BORDERLINE_FACTOR)))
    return rank, borderline


def two_local_rank(H, d: int | None = None, tol: float = RANK_TOL) -> int:
    return two_local_part(H, d, tol).rank_at_tol


# ------------------------------------------------------------------ verdicts


@dataclass
class Witness:
    psi: np.ndarray
    scale: float
    unitaries: list[np.ndarray]

    def to_json(self) -> dict:
        return {
            "psi": [[float(z.real), float(z.imag)] for z in self.psi],
            "scale": float(self.scale),
            "unitaries": [[[[float(z.real), float(z.imag)] for z in row] for row in U] for U in self.unitaries],
        }


@dataclass
class ClassificationVerdict:
    cls: str
    label: str
    witness: Witness | None = None
    residuals: dict = field(default_factory=dict)
    borderline: bool = False
    rank: int | None = None

    def __post_init__(self) -> None:
        if (self.witness is not None) != (self.cls == LA_STOQUASTIC_UNIVERSAL):
            raise ValueError("a witness accompanies exactly the stoquastic verdicts")

    def to_json(self) -> dict:
        return {
            "class": self.cls,
            "label": self.label,
            "rank": self.rank,
            "borderline": self.borderline,
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def rotation_to_zero(psi: np.ndarray) -> np.ndarray:
    """Unitary W with W psi = |0>, built from a Householder reflection (identity when psi = |0>)."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    d = psi.size
    # fix the global phase so the |0> amplitude is real and non-negative
    if abs(psi[0]) > ZERO_TOL:
        psi = psi * (abs(psi[0]) / psi[0])
    e0 = np.zeros(d, dtype=complex)
    e0[0] = 1
    v = psi - e0
    if np.linalg.norm(v) <= ZERO_TOL:
        return np.eye(d, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.eye(d) - 2 * np.outer(v, v.conj())


def _clusters(evals: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, e in enumerate(evals):
        if groups and e - evals[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def projector_direction(A: np.ndarray, tol: float = CLUSTER_TOL) -> tuple[np.ndarray | None, float, int]:
    """If A = t(|psi><psi| - I/d) (with t of either sign), return (psi, t, n_clusters); else (None, 0, n)."""
    d = A.shape[0]
    A = A - np.trace(A).real / d * np.eye(d)
    evals, evecs = np.linalg.eigh(A)
    spread = max(float(evals[-1] - evals[0]), ZERO_TOL)
    groups = _clusters(evals, tol * max(1.0, spread))
    if len(groups) != 2 or sorted(len(g) for g in groups) != [1, d - 1]:
        return None, 0.0, len(groups)
    if len(groups[0]) == 1 and len(groups[1]) == 1:
        single = groups[1]  # qubits: take the upper eigenvector so that t > 0
    else:
        single = groups[0] if len(groups[0]) == 1 else groups[1]
    psi = evecs[:, single[0]]
    k = int(np.argmax(np.abs(psi)))
    psi = psi * (abs(psi[k]) / psi[k])
    t = float(evals[single[0]]) * d / (d - 1)
    return psi, t, 2


def classify_two_qudit(H, d: int | None = None, tol: float = RANK_TOL) -> ClassificationVerdict:
    dec = two_local_part(H, d, tol)
    d = dec.local_dim
    res = {"sigma_max": float(dec.singular_values[0]) if dec.singular_values.size else 0.0}
    if dec.rank_at_tol == 0:
        return ClassificationVerdict(ONE_LOCAL_ONLY, LABEL_RANK0, None, res, dec.borderline, 0)
    if dec.rank_at_tol >= 2:
        return ClassificationVerdict(LA_UNIVERSAL, LABEL_RANK2, None, res, dec.borderline, dec.rank_at_tol)
    U, s, Vt = np.linalg.svd(dec.M)
    u, v, sigma = U[:, 0], Vt[0], float(s[0])
    T = gell_mann_basis(d).elements
    A = np.sqrt(2) * np.einsum("a,aij->ij", u, T)
    B = np.sqrt(2) * np.einsum("a,aij->ij", v, T)
    diag = np.real(np.diag(A))
    lead = next((x for x in diag if abs(x) > ZERO_TOL), None)
    if lead is None:
        flat = A.ravel()
        lead = next(x.real for x in flat if abs(x) > ZERO_TOL)
    if lead < 0:
        A, B, u, v = -A, -B, -u, -v
    # H' = (sigma/2) A (x) B with A, B of unit Frobenius norm
    res["factor_residual"] = spectral_norm(dec.H_prime - sigma / 2 * np.kron(A, B))
    sym = np.outer(u, v) + np.outer(v, u)
    sym_rank, border = _rank(np.linalg.svd(sym, compute_uv=False), tol)
    res["symmetrized_rank"] = sym_rank
    borderline = dec.borderline or border
    if sym_rank >= 2:
        return ClassificationVerdict(LA_UNIVERSAL, LABEL_ASYM, None, res, borderline, 1)
    c = float(np.sign(u @ v))
    psi, t, n_clusters = projector_direction(A)
    if psi is None:
        label = LABEL_THREE if n_clusters >= 3 else LABEL_NOT_PROJ
        return ClassificationVerdict(LA_UNIVERSAL, label, None, res, borderline, 1)
    alpha = c * sigma / 2 * t * t
    P = np.outer(psi, psi.conj()) - np.eye(d) / d
    res["form_residual"] = spectral_norm(dec.H_prime - alpha * np.kron(P, P))
    res["alpha_sign"] = float(np.sign(alpha))
    witness = Witness(psi, alpha, [rotation_to_zero(psi)])
    return ClassificationVerdict(LA_STOQUASTIC_UNIVERSAL, LABEL_STOQ, witness, res, borderline, 1)


# ------------------------------------------------------------------ k-local components


def _orthonormal_basis(d: int) -> np.ndarray:
    """I/sqrt(d) followed by sqrt(2) T^a: orthonormal under the Hilbert-Schmidt product."""
    T = gell_mann_basis(d).elements
    return np.concatenate([np.eye(d, dtype=complex)[None] / np.sqrt(d), np.sqrt(2) * T])


def pauli_coefficients_tensor(H: np.ndarray, d: int, n: int) -> np.ndarray:
    """C[a_1..a_n] = tr((E_a1 (x) ... (x) E_an) H) in the orthonormal {I, T^a} product basis."""
    E = _orthonormal_basis(d)
    t = np.asarray(H, dtype=complex).reshape([d] * (2 * n))
    for k in range(n):
        # contract row index i_k and column index j_k with E[a, j_k, i_k]; the new axis goes last
        t = np.tensordot(t, E, axes=([0, n - k], [2, 1]))
    return t


def extract_subinteractions(H, d: int | None = None, tol: float = ZERO_TOL) -> dict[tuple[int, ...], np.ndarray]:
    """Decompose H into components H_S, each traceless on every site of S, with sum_S H_S = H."""
    M, d = _as_matrix(H, d)
    n = _arity(M, d)
    C = pauli_coefficients_tensor(M, d, n)
    E = _orthonormal_basis(d)
    scale = max(1.0, float(np.abs(C).max()))
    out: dict[tuple[int, ...], np.ndarray] = {}
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            idx = tuple(slice(1, None) if k in S else 0 for k in range(n))
            sub = C[idx]
            if np.abs(sub).max(initial=0.0) <= tol * scale:
                continue
            op = sub if r == 0 else np.zeros((d**r, d**r), dtype=complex)
            if r:
                for a in itertools.product(range(d * d - 1), repeat=r):
                    if abs(sub[a]) > 0:
                        op = op + sub[a] * kron_all(*(E[x + 1] for x in a))
            else:
                op = np.array([[complex(sub)]])
            out[S] = op * d ** (-(n - r) / 2)
    return out


def reassemble(components: dict, d: int, n: int) -> np.ndarray:
    H = np.zeros((d**n, d**n), dtype=complex)
    for S, op in components.items():
        H = H + (op[0, 0] * np.eye(d**n) if not S else embed(op, list(S), n, d=d))
    return H


def projection_span_rank(H, d: int | None = None, site: int | None = None, samples: int | None = None,
                         rng: np.random.Generator | None = None) -> tuple[int, int]:
    """Rank of the moment matrix x^(psi)_b = <psi|E_b|psi> over random projections of one site.

    Writing H = sum_b A_b (x) E_b on ``site``, projecting the site onto psi leaves
    sum_b x_b A_b.  Returns (rank of the moment matrix, number of nonzero A_b);
    equality means every A_b is reachable by linear combination.
    """
    M, d = _as_matrix(H, d)
    n = _arity(M, d)
    site = n - 1 if site is None else site
    rng = rng or np.random.default_rng(0)
    E = _orthonormal_basis(d)
    t = M.reshape([d] * (2 * n))
    part = np.tensordot(t, E, axes=([site, n + site], [2, 1]))  # A_b up to normalization on the last axis
    used = [b for b in range(d * d) if np.abs(part[..., b]).max() > ZERO_TOL]
    samples = samples or 4 * d * d
    X = np.zeros((samples, len(used)))
    for r in range(samples):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        v /= np.linalg.norm(v)
        X[r] = [np.vdot(v, E[b] @ v).real for b in used]
    sv = np.linalg.svd(X, compute_uv=False)
    rank = int(np.sum(sv > 1e-10 * max(sv[0], ZERO_TOL))) if sv.size else 0
    return rank, len(used)


# ------------------------------------------------------------------ sets


def tensor_power_target(psi: np.ndarray, l: int) -> np.ndarray:
    d = psi.size
    P = d * np.outer(psi, psi.conj()) - np.eye(d)
    return kron_all(*([P] * l))


def _direction_from_component(C: np.ndarray, d: int, l: int) -> np.ndarray | None:
    """Top operator-Schmidt factor on the first site, read as a shifted projector."""
    t = C.reshape([d] * (2 * l))
    perm = [0, l] + [k for k in range(1, l)] + [l + k for k in range(1, l)]
    mat = t.transpose(perm).reshape(d * d, -1)
    U, s, _ = np.linalg.svd(mat)
    X = U[:, 0].reshape(d, d)
    # the factor is Hermitian up to a phase
    k = int(np.argmax(np.abs(X)))
    X = X * (abs(X.flat[k]) / X.flat[k])
    X = (X + X.conj().T) / 2
    psi, _, _ = projector_direction(X)
    return psi


def classify_interaction_set(interactions, d: int | None = None, tol: float = RANK_TOL) -> ClassificationVerdict:
    mats = []
    dims = set()
    for item in interactions:
        M, dd = _as_matrix(item, d)
        check_hermitian(M)
        dims.add(dd)
        mats.append((M, dd))
    if len(dims) != 1:
        raise DimensionError(f"interaction set mixes local dimensions {sorted(dims)}")
    d = dims.pop()
    comps = []
    for M, _ in mats:
        for S, op in extract_subinteractions(M, d).items():
            if len(S) >= 2:
                comps.append((len(S), op))
    if not comps:
        return ClassificationVerdict(ONE_LOCAL_ONLY, LABEL_ONE_LOCAL, None, {}, False, 0)
    residuals: dict[str, float] = {}
    borderline = False
    rank = None
    two = [op for l, op in comps if l == 2]
    if two:
        v = classify_two_qudit(two[0], d, tol)
        borderline, rank = v.borderline, v.rank
        if v.cls != LA_STOQUASTIC_UNIVERSAL:
            return ClassificationVerdict(LA_UNIVERSAL, v.label, None, v.residuals, borderline, v.rank)
        psi = v.witness.psi
    else:
        l, op = comps[0]
        psi = _direction_from_component(op, d, l)
        if psi is None:
            return ClassificationVerdict(LA_UNIVERSAL, LABEL_SET_MIXED, None, {}, False, None)
    worst = 0.0
    coefs = []
    for l, op in comps:
        Tl = tensor_power_target(psi, l)
        c = np.vdot(Tl, op) / np.vdot(Tl, Tl)
        rel = spectral_norm(op - c * Tl) / max(spectral_norm(op), ZERO_TOL)
        worst = max(worst, rel)
        coefs.append(float(c.real))
    residuals["tensor_power_residual"] = worst
    if worst > tol:
        borderline = borderline or worst <= tol * BORDERLINE_FACTOR
        return ClassificationVerdict(LA_UNIVERSAL, LABEL_SET_MIXED, None, residuals, borderline, rank)
    borderline = borderline or worst > tol / BORDERLINE_FACTOR
    scale = coefs[0]
    return ClassificationVerdict(
        LA_STOQUASTIC_UNIVERSAL, LABEL_SET_STOQ, Witness(psi, scale, [rotation_to_zero(psi)]), residuals, borderline, rank
    )


# ------------------------------------------------------------------ stoquastic witness


@dataclass
class StoquasticWitness:
    unitaries: list[np.ndarray]  # per qudit, U2 U1 W0
    rotated_terms: list[np.ndarray]
    max_positive_offdiag: float
    max_imag_offdiag: float
    offending: tuple | None

    @property
    def passed(self) -> bool:
        return self.offending is None


def offdiag_violation(H: np.ndarray) -> tuple[float, float, tuple | None]:
    """(largest positive real off-diagonal part, largest imaginary off-diagonal part, worst index)."""
    H = np.asarray(H)
    off = H - np.diag(np.diag(H))
    pos = np.maximum(off.real, 0.0)
    im = np.abs(off.imag)
    worst = np.maximum(pos, im)
    idx = np.unravel_index(int(np.argmax(worst)), worst.shape) if worst.size else None
    return float(pos.max(initial=0.0)), float(im.max(initial=0.0)), idx


def one_site_rotation(M: np.ndarray) -> np.ndarray:
    """U2 U1 for one qudit whose Hamiltonian term M is already in the frame where psi = |0>.

    U1 diagonalizes M on span{|1>, ..., |d-1>} and fixes |0>; U2 multiplies |j> by a
    phase so that every coupling <0|M|j> becomes -|a_j|.
    """
    d = M.shape[0]
    U1 = np.eye(d, dtype=complex)
    if d > 1:
        _, vecs = np.linalg.eigh(M[1:, 1:])
        U1[1:, 1:] = vecs.conj().T
    R = U1 @ M @ U1.conj().T
    phases = np.ones(d, dtype=complex)
    for j in range(1, d):
        a = R[0, j]
        if abs(a) > ZERO_TOL:
            # <0|U2 R U2^dag|j> = conj(phase_j) a; choose it equal to -|a|
            phases[j] = -a / abs(a)
    U2 = np.diag(phases)
    return U2 @ U1


def stoquastic_witness(one_local_terms, psi, tol: float = 1e-10) -> StoquasticWitness:
    """Per-qudit unitaries making sum_i M^(i) plus diagonal couplings stoquastic."""
    psi = np.asarray(psi, dtype=complex)
    W0 = rotation_to_zero(psi)
    unitaries, rotated = [], []
    worst_pos = worst_im = 0.0
    offending = None
    for i, M in enumerate(one_local_terms):
        M = np.asarray(M, dtype=complex)
        Mr = W0 @ M @ W0.conj().T
        U = one_site_rotation(Mr) @ W0
        R = U @ M @ U.conj().T
        pos, im, idx = offdiag_violation(R)
        worst_pos, worst_im = max(worst_pos, pos), max(worst_im, im)
        if offending is None and max(pos, im) > tol:
            offending = (i, tuple(int(x) for x in idx), complex(R[idx]))
        unitaries.append(U)
        rotated.append(R)
    return StoquasticWitness(unitaries, rotated, worst_pos, worst_im, offending)


def stoquastify(H: np.ndarray, psi: np.ndarray, d: int, n: int, tol: float = 1e-10) -> tuple[np.ndarray, StoquasticWitness]:
    """Rotate an assembled n-qudit Hamiltonian from a stoquastic-class set into stoquastic form.

    The 1-local part on every qudit is read from the product-basis expansion of the
    rotated Hamiltonian; the multi-qudit part is diagonal there by assumption.
    """
    W0 = rotation_to_zero(psi)
    Wall = kron_all(*([W0] * n))
    Hr = Wall @ H @ Wall.conj().T
    comps = extract_subinteractions(Hr, d)
    ones = [comps.get((i,), np.zeros((d, d), dtype=complex)) for i in range(n)]
    locs = [one_site_rotation(M) for M in ones]
    U = kron_all(*locs)
    out = U @ Hr @ U.conj().T
    pos, im, idx = offdiag_violation(out)
    offending = None if max(pos, im) <= tol else (tuple(int(x) for x in idx), complex(out[idx]))
    wit = StoquasticWitness([L @ W0 for L in locs], [L @ M @ L.conj().T for L, M in zip(locs, ones)], pos, im, offending)
    return out, wit
