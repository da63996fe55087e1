"""Hermitian operator algebra on registers of qudits.

Dense matrices are plain ``numpy`` arrays; operators on registers larger than
the dense threshold are ``scipy.sparse`` CSR matrices.  Site 0 is the most
significant tensor factor, so ``embed(A, [0], 2)`` is ``A (x) I``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_LIMIT = 4096
HERMITICITY_RTOL = 1e-12
CLUSTER_RTOL = 1e-8


class DimensionError(ValueError):
    """Raised for invalid local dimensions, arities or site lists."""


class HermiticityError(ValueError):
    """Raised when an operator that must be Hermitian is not."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative eigensolver does not converge."""


def _as_dense(H) -> np.ndarray:
    if sp.issparse(H):
        return H.toarray()
    return np.asarray(H)


def hermiticity_defect(H) -> float:
    """Largest entry of |H - H^dagger|."""
    if sp.issparse(H):
        diff = (H - H.conj().T).tocoo()
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
    H = np.asarray(H)
    return float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0


def max_abs(H) -> float:
    if sp.issparse(H):
        H = H.tocoo()
        return float(np.max(np.abs(H.data))) if H.nnz else 0.0
    H = np.asarray(H)
    return float(np.max(np.abs(H))) if H.size else 0.0


def check_hermitian(H, rtol: float = HERMITICITY_RTOL) -> None:
    scale = max(max_abs(H), 1.0)
    defect = hermiticity_defect(H)
    if defect > rtol * scale:
        raise HermiticityError(f"operator is not Hermitian: max |H - H^dag| = {defect:.3e}")


@dataclass(frozen=True)
class LocalOperator:
    """A few-qudit operator with its local dimension and arity."""

    matrix: np.ndarray
    local_dim: int
    arity: int
    hermitian_flag: bool = True

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if self.local_dim < 2:
            raise DimensionError(f"local dimension must be >= 2, got {self.local_dim}")
        if self.arity < 1:
            raise DimensionError(f"arity must be >= 1, got {self.arity}")
        size = self.local_dim**self.arity
        if m.shape != (size, size):
            raise DimensionError(
                f"matrix shape {m.shape} does not match d^k = {size} for d={self.local_dim}, k={self.arity}"
            )
        if self.hermitian_flag:
            check_hermitian(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, local_dim: int, hermitian: bool = True) -> "LocalOperator":
        m = np.asarray(matrix, dtype=complex)
        k = round(np.log(m.shape[0]) / np.log(local_dim))
        return cls(m, local_dim, max(k, 1), hermitian)


@dataclass(frozen=True)
class HermitianBasis:
    """Traceless Hermitian basis of su(d) with tr(T^a T^b) = delta_ab / 2."""

    local_dim: int
    elements: np.ndarray  # shape (d^2 - 1, d, d)
    structure_constants: np.ndarray  # f[a, b, c], real and totally antisymmetric

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, a: int) -> np.ndarray:
        return self.elements[a]


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: list[list[int]]
    cluster_tol: float
    residual: float = 0.0

    def cluster_values(self) -> list[float]:
        return [float(np.mean(self.eigenvalues[g])) for g in self.groups]

    def multiplicities(self) -> list[int]:
        return [len(g) for g in self.groups]

    def projector(self, group_indices) -> np.ndarray:
        idx = [i for g in group_indices for i in self.groups[g]]
        V = self.eigenvectors[:, idx]
        return V @ V.conj().T


def gell_mann_basis(d: int) -> HermitianBasis:
    """Generalized Gell-Mann matrices in the order symmetric, antisymmetric, diagonal.

    Off-diagonal pairs (j, k) with j < k are enumerated lexicographically.
    """
    if d < 2:
        raise DimensionError(f"su(d) basis requires d >= 2, got {d}")
    pairs = list(itertools.combinations(range(d), 2))
    mats = []
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 0.5
        mats.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -0.5j
        m[k, j] = 0.5j
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(2 * l * (l + 1))).astype(complex))
    T = np.array(mats)
    comm = np.einsum("aij,bjk->abik", T, T) - np.einsum("bij,ajk->abik", T, T)
    f = -2j * np.einsum("abij,cji->abc", comm, T)
    f = f.real.copy()
    f[np.abs(f) < 1e-15] = 0.0
    T.setflags(write=False)
    f.setflags(write=False)
    return HermitianBasis(d, T, f)


def levi_civita() -> np.ndarray:
    """The rank-3 Levi-Civita symbol as an integer array."""
    eps = np.zeros((3, 3, 3), dtype=np.int64)
    for perm in itertools.permutations(range(3)):
        inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        eps[perm] = -1 if inversions % 2 else 1
    return eps


def spin_operators(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-(d-1)/2 matrices (S^x, S^y, S^z); basis index 0 carries m = +s."""
    if d < 2:
        raise DimensionError(f"spin representation requires d >= 2, got {d}")
    s = (d - 1) / 2
    m = s - np.arange(d)
    splus = np.zeros((d, d), dtype=complex)
    for i in range(1, d):
        # S^+ |m_i> = sqrt(s(s+1) - m_i(m_i+1)) |m_i + 1>, and m_{i-1} = m_i + 1
        splus[i - 1, i] = np.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    sx = (splus + splus.conj().T) / 2
    sy = (splus - splus.conj().T) / 2j
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def spin_casimir_value(d: int) -> float:
    return (d * d - 1) / 4


def _check_sites(sites, n: int, arity: int) -> list[int]:
    sites = [int(s) for s in sites]
    if len(sites) != arity:
        raise DimensionError(f"operator has arity {arity} but {len(sites)} sites were given")
    if len(set(sites)) != len(sites):
        raise DimensionError(f"site collision in {sites}")
    for s in sites:
        if not 0 <= s < n:
            raise DimensionError(f"site {s} outside register of {n} sites")
    return sites


def embed(op, sites, n: int, d: int | None = None, dense_limit: int = DENSE_LIMIT):
    """Place ``op`` on ``sites`` of an ``n``-qudit register (identity elsewhere).

    ``op`` may be a LocalOperator or a square array; ``sites[j]`` receives the
    j-th tensor factor of ``op``.
    """
    if isinstance(op, LocalOperator):
        if d is not None and d != op.local_dim:
            raise DimensionError(f"operator has local dimension {op.local_dim}, register has {d}")
        d = op.local_dim
        mat = op.matrix
        arity = op.arity
    else:
        mat = op.toarray() if sp.issparse(op) else np.asarray(op)
        if d is None:
            raise DimensionError("local dimension d is required for raw matrices")
        arity = len(list(sites))
        if mat.shape != (d**arity, d**arity):
            raise DimensionError(f"matrix shape {mat.shape} does not match {arity} qudits of dimension {d}")
    sites = _check_sites(sites, n, arity)
    dim = d**n
    if dim > dense_limit:
        return _embed_sparse(mat, sites, n, d)
    k = len(sites)
    rest = [s for s in range(n) if s not in sites]
    full = np.kron(mat, np.eye(d ** (n - k)))
    # current factor order is sites + rest; permute to 0..n-1
    order = sites + rest
    perm = np.argsort(order)
    t = full.reshape([d] * (2 * n))
    t = t.transpose(list(perm) + [n + p for p in perm])
    return t.reshape(dim, dim)


def _embed_sparse(mat: np.ndarray, sites: list[int], n: int, d: int):
    k = len(sites)
    coo = sp.coo_matrix(mat)
    rest = [s for s in range(n) if s not in sites]
    n_rest = n - k
    rest_idx = np.arange(d**n_rest)
    rest_digits = np.array(np.unravel_index(rest_idx, [d] * n_rest)) if n_rest else np.zeros((0, 1), int)
    row_digits = np.array(np.unravel_index(coo.row, [d] * k))
    col_digits = np.array(np.unravel_index(coo.col, [d] * k))
    strides = d ** (n - 1 - np.arange(n))
    site_strides = strides[sites]
    rest_offset = (rest_digits * strides[rest][:, None]).sum(axis=0) if n_rest else np.zeros(1, int)
    r_off = (row_digits * site_strides[:, None]).sum(axis=0)
    c_off = (col_digits * site_strides[:, None]).sum(axis=0)
    rows = (r_off[:, None] + rest_offset[None, :]).ravel()
    cols = (c_off[:, None] + rest_offset[None, :]).ravel()
    vals = np.repeat(coo.data, rest_offset.size)
    dim = d**n
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def kron_all(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def place_states(parts, n: int, d: int) -> np.ndarray:
    """Tensor product of states, ``parts`` = [(vector, sites), ...] covering all sites."""
    vec = np.ones(1, dtype=complex)
    order: list[int] = []
    for psi, sites in parts:
        vec = np.kron(vec, np.asarray(psi, dtype=complex))
        order.extend(int(s) for s in sites)
    if sorted(order) != list(range(n)):
        raise DimensionError(f"state parts cover sites {order}, expected 0..{n - 1}")
    t = vec.reshape([d] * n).transpose(np.argsort(order))
    return t.reshape(-1)


def _clusters(evals: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, e in enumerate(evals):
        if groups and e - evals[groups[-1][0]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def spectral(
    H,
    cluster_tol: float | None = None,
    dense_limit: int = DENSE_LIMIT,
    k: int = 6,
    which: str = "SA",
) -> SpectralDecomposition:
    """Eigen-decomposition with degeneracy clusters.

    ``cluster_tol`` defaults to 1e-8 times the spectral diameter.  Sparse inputs
    larger than ``dense_limit`` only get ``k`` extremal eigenpairs.
    """
    check_hermitian(H)
    dim = H.shape[0]
    if sp.issparse(H) and dim > dense_limit:
        kk = min(k, dim - 2)
        try:
            evals, evecs = spla.eigsh(H, k=kk, which=which, tol=1e-12)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"eigsh did not converge: {exc}") from exc
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        resid = float(np.max(np.linalg.norm(H @ evecs - evecs * evals, axis=0)))
    else:
        evals, evecs = np.linalg.eigh(_as_dense(H))
        resid = 0.0
    diameter = float(evals[-1] - evals[0]) if evals.size else 0.0
    if cluster_tol is None:
        cluster_tol = CLUSTER_RTOL * max(diameter, 1.0)
    return SpectralDecomposition(evals, evecs, _clusters(evals, cluster_tol), cluster_tol, resid)


def partial_trace(H, site: int, d: int, n: int | None = None) -> np.ndarray:
    """Trace out one site of an operator on ``n`` qudits."""
    H = _as_dense(H)
    if n is None:
        n = round(np.log(H.shape[0]) / np.log(d))
    if d**n != H.shape[0]:
        raise DimensionError(f"operator dimension {H.shape[0]} is not {d}^{n}")
    if not 0 <= site < n:
        raise DimensionError(f"site {site} outside register of {n} sites")
    t = H.reshape([d] * (2 * n))
    out = np.trace(t, axis1=site, axis2=n + site)
    return out.reshape(d ** (n - 1), d ** (n - 1))


def operator_norm(H, dense_limit: int = DENSE_LIMIT) -> float:
    """Spectral norm of a Hermitian operator."""
    if sp.issparse(H) and H.shape[0] > dense_limit:
        try:
            vals = spla.eigsh(H, k=1, which="LM", tol=1e-12, return_eigenvectors=False)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError(f"eigsh did not converge: {exc}") from exc
        return float(np.abs(vals[0]))
    H = _as_dense(H)
    if H.size == 0:
        return 0.0
    if hermiticity_defect(H) <= HERMITICITY_RTOL * max(max_abs(H), 1.0):
        return float(np.max(np.abs(np.linalg.eigvalsh(H))))
    return float(np.linalg.norm(H, 2))


def spectral_norm(M) -> float:
    """Largest singular value of an arbitrary (not necessarily Hermitian) matrix."""
    M = _as_dense(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def polar_unitary(M: np.ndarray) -> np.ndarray:
    """Unitary (or partial-isometry) polar factor W of M = W |M|."""
    U, _, Vh = np.linalg.svd(M, full_matrices=False)
    return U @ Vh


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(dim: int, rng: np.random.Generator, norm: float | None = None) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (z + z.conj().T) / 2
    if norm is not None:
        h *= norm / operator_norm(h)
    return h


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------- serialization


def operator_to_json(H, d: int, n: int, dense: bool = False) -> dict:
    """Sparse coordinate (default) or dense row-major JSON payload."""
    if dense:
        M = _as_dense(H)
        return {
            "d": int(d),
            "n": int(n),
            "matrix": [[float(z.real), float(z.imag)] for z in M.ravel()],
        }
    coo = sp.coo_matrix(H)
    coo.sum_duplicates()
    order = np.lexsort((coo.col, coo.row))
    entries = [
        [int(coo.row[i]), int(coo.col[i]), float(coo.data[i].real), float(np.imag(coo.data[i]))]
        for i in order
        if coo.data[i] != 0
    ]
    return {"d": int(d), "n": int(n), "entries": entries}


def operator_from_json(payload: dict, dense_limit: int = DENSE_LIMIT):
    """Inverse of :func:`operator_to_json`; returns (matrix, d, n)."""
    try:
        d = int(payload["d"])
        n = int(payload["n"])
    except KeyError as exc:
        raise DimensionError(f"operator JSON missing field {exc}") from exc
    dim = d**n
    if "matrix" in payload:
        flat = np.array(payload["matrix"], dtype=float)
        if flat.shape != (dim * dim, 2):
            raise DimensionError(f"dense matrix has {flat.shape[0]} entries, expected {dim * dim}")
        M = (flat[:, 0] + 1j * flat[:, 1]).reshape(dim, dim)
        return M, d, n
    entries = payload.get("entries", [])
    if entries:
        arr = np.array(entries, dtype=float)
        rows, cols = arr[:, 0].astype(int), arr[:, 1].astype(int)
        vals = arr[:, 2] + 1j * arr[:, 3]
    else:
        rows = cols = np.zeros(0, int)
        vals = np.zeros(0, complex)
    M = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    if dim <= dense_limit:
        return M.toarray(), d, n
    return M, d, n


@dataclass(frozen=True)
class ManyBodyOperator:
    """An operator on n qudits together with its register shape."""

    data: object
    local_dim: int
    n_sites: int
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.data)

    def dense(self) -> np.ndarray:
        return _as_dense(self.data)

    def to_json(self, dense: bool = False) -> dict:
        return operator_to_json(self.data, self.local_dim, self.n_sites, dense=dense)

    @classmethod
    def from_json(cls, payload: dict) -> "ManyBodyOperator":
        M, d, n = operator_from_json(payload)
        return cls(M, d, n)
