"""Block splits, effective Hamiltonians (exact and perturbative) and gadget assembly.

Operators here are dense; every gadget that goes through the series engine fits
below the dense threshold.  Ground-block quantities are expressed in the
orthonormal ground basis ``split.ground_basis`` of ``H0``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .operators import CLUSTER_RTOL, check_hermitian, spectral_norm
from .parallel import thread_count

SCALINGS: dict[int, dict[str, float]] = {
    1: {"H1": 0.0},
    2: {"H1": 0.0, "H2": 1 / 2},
    3: {"H1": 0.0, "H1p": 1 / 3, "H2": 2 / 3},
    4: {"H1": 0.0, "H2": 1 / 2, "H3": 1 / 4, "H4": 3 / 4},
}


class GroundEnergyError(ValueError):
    """The heavy Hamiltonian does not have ground energy zero."""


class RankMismatchError(RuntimeError):
    """The low-energy space of the simulator has the wrong dimension."""


class GapWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BlockSplit:
    H0: np.ndarray
    ground_basis: np.ndarray
    excited_basis: np.ndarray
    excited_energies: np.ndarray
    gap: float
    gap_ok: bool

    @property
    def ground_dim(self) -> int:
        return self.ground_basis.shape[1]

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    @property
    def P_minus(self) -> np.ndarray:
        Q = self.ground_basis
        return Q @ Q.conj().T

    @property
    def P_plus(self) -> np.ndarray:
        return np.eye(self.dim) - self.P_minus

    def pinv(self, power: int = 1) -> np.ndarray:
        """H0^{-power} restricted to the excited space (zero on the ground space)."""
        Q = self.excited_basis
        return (Q * self.excited_energies ** (-power)) @ Q.conj().T

    @property
    def H0_pinv(self) -> np.ndarray:
        return self.pinv(1)

    def block(self, M) -> np.ndarray:
        """Ground-block matrix Q^dag M Q."""
        Q = self.ground_basis
        return Q.conj().T @ np.asarray(M) @ Q


def block_split(H0, tol: float = 1e-9, cluster_rtol: float = CLUSTER_RTOL) -> BlockSplit:
    """Split the register into the zero-energy ground space of ``H0`` and its complement.

    Eigenvalues below half the gap count as ground.  A gap below one violates
    the gap-one normalization of the perturbative bounds and emits a :class:`GapWarning`.
    """
    H0 = np.asarray(H0, dtype=complex)
    check_hermitian(H0)
    evals, evecs = np.linalg.eigh(H0)
    scale = max(1.0, float(np.max(np.abs(evals))))
    if abs(evals[0]) > tol * scale:
        raise GroundEnergyError(f"ground energy of H0 is {evals[0]:.3e}, shift it to zero first")
    cluster = cluster_rtol * max(float(evals[-1] - evals[0]), 1.0)
    above = evals[evals > evals[0] + max(cluster, tol * scale)]
    gap = float(above[0]) if above.size else math.inf
    ground = evals < gap / 2
    gap_ok = gap >= 1 - tol
    if not gap_ok:
        warnings.warn(f"H0 gap {gap:.6g} < 1: perturbative bounds assume gap >= 1", GapWarning, stacklevel=2)
    return BlockSplit(H0, evecs[:, ground], evecs[:, ~ground], evals[~ground], gap, gap_ok)


def rebase_split(split: BlockSplit, basis: np.ndarray, tol: float = 1e-9) -> BlockSplit:
    """Same split with a caller-chosen orthonormal basis of the ground space.

    Used to express ground blocks in a gadget's logical basis.  The basis must
    be orthonormal and span exactly the ground space of ``split.H0``.
    """
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != split.ground_basis.shape:
        raise ValueError(f"basis has shape {basis.shape}, ground basis has {split.ground_basis.shape}")
    gram = basis.conj().T @ basis
    if spectral_norm(gram - np.eye(basis.shape[1])) > tol:
        raise ValueError("logical basis is not orthonormal")
    if spectral_norm(split.P_minus @ basis - basis) > tol * max(1.0, split.dim**0.5):
        raise ValueError("logical basis leaves the ground space of H0")
    return BlockSplit(split.H0, basis, split.excited_basis, split.excited_energies, split.gap, split.gap_ok)


# ------------------------------------------------------------------ gadgets


@dataclass
class GadgetInstance:
    """A perturbative gadget: heavy term, scaled perturbations and the target."""

    name: str
    order: int
    split: BlockSplit
    terms: dict[str, np.ndarray]
    target: np.ndarray | None = None
    local_dim: int | None = None
    n_sites: int | None = None
    site_map: dict = field(default_factory=dict)
    encoding: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.order not in SCALINGS:
            raise ValueError(f"order must be 1..4, got {self.order}")
        extra = set(self.terms) - set(SCALINGS[self.order])
        if extra:
            raise ValueError(f"terms {sorted(extra)} are not used by an order-{self.order} gadget")
        n = self.split.dim
        self.terms = {k: np.asarray(v, dtype=complex) for k, v in self.terms.items() if v is not None}
        for k, v in self.terms.items():
            if v.shape != (n, n):
                raise ValueError(f"term {k} has shape {v.shape}, expected {(n, n)}")
        if self.target is None:
            self.target = series_prediction(self.split, self.terms, self.order)

    @property
    def H0(self) -> np.ndarray:
        return self.split.H0

    def term(self, name: str) -> np.ndarray:
        return self.terms.get(name, np.zeros_like(self.split.H0))

    @property
    def Lambda(self) -> float:
        return max([spectral_norm(v) for v in self.terms.values()] or [0.0])

    def perturbation(self, delta: float) -> np.ndarray:
        return perturbation(self.terms, delta, self.order, self.split.dim)


def perturbation(terms: dict, delta: float, order: int, dim: int) -> np.ndarray:
    A = np.zeros((dim, dim), dtype=complex)
    for name, power in SCALINGS[order].items():
        if name in terms and terms[name] is not None:
            A = A + delta**power * np.asarray(terms[name])
    return A


def assemble_simulator(g: GadgetInstance, delta: float, check: bool = True, tol: float = 1e-8) -> np.ndarray:
    """Delta H0 plus the perturbations scaled as the gadget's order prescribes."""
    if check:
        report = check_gadget_conditions(g, tol)
        if not report.passed:
            raise ValueError(f"gadget {g.name} violates: {', '.join(report.failures())}")
    return delta * g.H0 + g.perturbation(delta)


def series_prediction(split: BlockSplit, terms: dict, order: int) -> np.ndarray:
    """Ground-block operator (full-space, sandwiched by the ground projector) the order-by-order series predicts."""
    P = split.P_minus
    G = split.H0_pinv
    z = np.zeros_like(split.H0)
    H1 = terms.get("H1", z)
    H2 = terms.get("H2", z)
    if order == 1:
        core = H1
    elif order == 2:
        core = H1 - H2 @ G @ H2
    elif order == 3:
        core = H1 + H2 @ G @ H2 @ G @ H2
    else:
        H4 = terms.get("H4", z)
        core = H1 + H4 @ G @ H2 @ G @ H4 - H4 @ G @ H4 @ G @ H4 @ G @ H4
    return P @ core @ P


@dataclass(frozen=True)
class Condition:
    name: str
    label: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def to_json(self) -> dict:
        return {"name": self.name, "label": self.label, "residual": self.residual, "tol": self.tol, "pass": self.passed}


@dataclass(frozen=True)
class ConditionReport:
    gadget: str
    conditions: list[Condition]
    Lambda: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]

    def residual(self, name: str) -> float:
        for c in self.conditions:
            if c.name == name:
                return c.residual
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "gadget": self.gadget,
            "pass": self.passed,
            "Lambda": self.Lambda,
            "conditions": [c.to_json() for c in self.conditions],
        }


def _offdiag(split: BlockSplit, M) -> float:
    P = split.P_minus
    return spectral_norm(P @ M @ (np.eye(split.dim) - P))


def traceless_residual(A: np.ndarray, B: np.ndarray) -> tuple[float, float]:
    """(spectral norm of the traceless part of A - B, identity offset tr(A - B)/dim)."""
    diff = np.asarray(A) - np.asarray(B)
    offset = complex(np.trace(diff)).real / diff.shape[0]
    return spectral_norm(diff - offset * np.eye(diff.shape[0])), offset


def check_gadget_conditions(g: GadgetInstance, tol: float = 1e-10) -> ConditionReport:
    """Residual norms of every precondition of the simulation at order ``g.order``."""
    s = g.split
    P = s.P_minus
    G = s.H0_pinv
    conds = [
        Condition("H0 ground energy", "heavy term normalization", spectral_norm(s.H0 @ P), tol),
        Condition("H0 gap >= 1", "heavy term normalization", max(0.0, 1.0 - s.gap), tol),
    ]
    H1, H2 = g.term("H1"), g.term("H2")
    if g.order == 2:
        conds.append(Condition("H1 block-diagonal", "second-order simulation", _offdiag(s, H1), tol))
        conds.append(Condition("(H2)-- = 0", "second-order simulation", spectral_norm(P @ H2 @ P), tol))
    elif g.order == 3:
        H1p = g.term("H1p")
        conds.append(Condition("H1 block-diagonal", "third-order simulation", _offdiag(s, H1), tol))
        conds.append(Condition("H1' block-diagonal", "third-order simulation", _offdiag(s, H1p), tol))
        conds.append(Condition("(H2)-- = 0", "third-order simulation", spectral_norm(P @ H2 @ P), tol))
        conds.append(
            Condition(
                "(H1')-- = (H2)-+ H0^-1 (H2)+-",
                "third-order simulation",
                spectral_norm(P @ H1p @ P - P @ H2 @ G @ H2 @ P),
                tol,
            )
        )
    elif g.order == 4:
        H3, H4 = g.term("H3"), g.term("H4")
        conds.append(Condition("H2 block-diagonal", "fourth-order simulation", _offdiag(s, H2), tol))
        conds.append(Condition("H3 block-diagonal", "fourth-order simulation", _offdiag(s, H3), tol))
        conds.append(Condition("(H4)-- = 0", "fourth-order simulation", spectral_norm(P @ H4 @ P), tol))
        conds.append(
            Condition(
                "(H2)-- = P H4 H0^-1 H4 P",
                "fourth-order simulation",
                spectral_norm(P @ H2 @ P - P @ H4 @ G @ H4 @ P),
                tol,
            )
        )
        conds.append(
            Condition(
                "(H3)-- = -P H4 H0^-1 H4 H0^-1 H4 P",
                "fourth-order simulation",
                spectral_norm(P @ H3 @ P + P @ H4 @ G @ H4 @ G @ H4 @ P),
                tol,
            )
        )
    pred = series_prediction(s, g.terms, g.order)
    res, _ = traceless_residual(s.block(g.target), s.block(pred))
    conds.append(Condition("target matches series prediction", f"order-{g.order} simulation target", res, tol))
    return ConditionReport(g.name, conds, g.Lambda)


# ------------------------------------------------------------------ series


@dataclass(frozen=True)
class EffectiveSeries:
    order: int
    delta: float
    terms: tuple[np.ndarray, ...]  # full-space operators supported on the ground block

    def total(self, upto: int | None = None) -> np.ndarray:
        upto = self.order if upto is None else upto
        return sum(self.terms[:upto])


def effective_series(
    split: BlockSplit,
    H1=None,
    H2=None,
    H3=None,
    H4=None,
    delta: float = 1.0,
    order: int = 4,
    H1p=None,
    max_terms: int = 4,
) -> EffectiveSeries:
    """Schrieffer-Wolff series terms 1..max_terms for H_sim = Delta H0 + A.

    A collects the perturbations scaled as in the order-``order`` simulation.
    """
    given = {"H1": H1, "H2": H2, "H3": H3, "H4": H4, "H1p": H1p}
    given = {k: v for k, v in given.items() if v is not None}
    extra = set(given) - set(SCALINGS[order])
    if extra:
        raise ValueError(f"terms {sorted(extra)} do not appear at order {order}")
    A = perturbation(given, delta, order, split.dim)
    P = split.P_minus
    G1, G2, G3 = split.pinv(1), split.pinv(2), split.pinv(3)
    out = [P @ A @ P]
    if max_terms >= 2:
        out.append(-(P @ A @ G1 @ A @ P) / delta)
    if max_terms >= 3:
        X = P @ A @ G2 @ A @ P @ A @ P
        out.append((P @ A @ G1 @ A @ G1 @ A @ P - 0.5 * (X + X.conj().T)) / delta**2)
    if max_terms >= 4:
        AP = A @ P
        inner = (
            A @ G2 @ AP @ A @ G1 @ A
            - A @ G1 @ A @ G1 @ A @ G1 @ A
            + A @ G2 @ A @ G1 @ AP @ A
            + A @ G1 @ A @ G2 @ AP @ A
            - A @ G3 @ AP @ AP @ A
        )
        out.append(P @ (inner + inner.conj().T) @ P / (2 * delta**3))
    return EffectiveSeries(order, float(delta), tuple(out))


# ------------------------------------------------------------------ exact SW


@dataclass(frozen=True)
class ExactSW:
    H_eff: np.ndarray  # ground-block matrix in split.ground_basis coordinates
    eta: float
    newton_steps: int
    riccati_residual: float
    low_eigenvalues: np.ndarray


def exact_schrieffer_wolff(
    H_sim,
    delta: float,
    split: BlockSplit,
    perturbation: np.ndarray | None = None,
    newton_tol: float = 1e-15,
    max_newton: int = 20,
) -> ExactSW:
    """Effective Hamiltonian from the direct rotation of the low-energy space onto the ground space.

    The low-energy space of ``H_sim`` (eigenvalues at most delta/2) is written
    as the graph of an operator X from the ground space into the excited space.
    X is seeded from a dense eigensolve and polished with Newton steps on the
    invariant-subspace Riccati equation.  The isometry W = [I; X](I + X^dag X)^{-1/2}
    is the direct-rotation image of the ground basis, and the effective
    Hamiltonian is W^dag H_sim W.

    When ``perturbation`` (A = H_sim - delta H0) is supplied, H_sim is represented
    in the eigenbasis of H0 as delta*diag(0, E) + A, which avoids the absolute
    error of order delta * machine epsilon that a direct eigensolve would carry.
    """
    Q = np.hstack([split.ground_basis, split.excited_basis])
    m = split.ground_dim
    if perturbation is not None:
        K = Q.conj().T @ perturbation @ Q
        K[np.arange(m, K.shape[0]), np.arange(m, K.shape[0])] += delta * split.excited_energies
    else:
        K = Q.conj().T @ np.asarray(H_sim) @ Q
    K = (K + K.conj().T) / 2
    evals, evecs = np.linalg.eigh(K)
    low = evals <= delta / 2
    if int(low.sum()) != m:
        raise RankMismatchError(f"{int(low.sum())} eigenvalues below delta/2 but the ground space has dimension {m}")
    V = evecs[:, low]
    Vm, Vp = V[:m], V[m:]
    smin = np.linalg.svd(Vm, compute_uv=False)[-1] if m else 1.0
    if smin < 1e-8:
        raise RankMismatchError("low-energy space is (nearly) orthogonal to the ground space; polar factor singular")
    X = Vp @ np.linalg.inv(Vm)
    Kmm, Kmp, Kpm, Kpp = K[:m, :m], K[:m, m:], K[m:, :m], K[m:, m:]

    def residual(X):
        return Kpm + Kpp @ X - X @ Kmm - X @ Kmp @ X

    steps = 0
    R = residual(X)
    scale = max(1.0, spectral_norm(K[:m]))
    for steps in range(1, max_newton + 1):
        dX = sla.solve_sylvester(Kpp - X @ Kmp, -(Kmm + Kmp @ X), -R)
        X = X + dX
        R = residual(X)
        if spectral_norm(dX) <= newton_tol * max(1.0, spectral_norm(X)) or spectral_norm(R) <= newton_tol * scale:
            break
    S = np.eye(m) + X.conj().T @ X
    w, U = np.linalg.eigh(S)
    S_isqrt = (U / np.sqrt(w)) @ U.conj().T
    top = Kmm + Kmp @ X + X.conj().T @ Kpm + X.conj().T @ Kpp @ X
    H_eff = S_isqrt @ top @ S_isqrt
    H_eff = (H_eff + H_eff.conj().T) / 2
    W = np.vstack([np.eye(m), X]) @ S_isqrt
    W[:m] -= np.eye(m)
    return ExactSW(H_eff, spectral_norm(W), steps, spectral_norm(R), evals[low])


def direct_rotation_reference(H_sim, delta: float, split: BlockSplit) -> tuple[np.ndarray, float]:
    """Literal construction: polar factor of P_- P + (I - P_-)(I - P); returns (H_eff block, eta)."""
    H_sim = np.asarray(H_sim)
    evals, evecs = np.linalg.eigh(H_sim)
    low = evecs[:, evals <= delta / 2]
    if low.shape[1] != split.ground_dim:
        raise RankMismatchError("rank mismatch")
    P = low @ low.conj().T
    Pm = split.P_minus
    Id = np.eye(split.dim)
    M = Pm @ P + (Id - Pm) @ (Id - P)
    Uw, _, Vh = np.linalg.svd(M)
    U = Uw @ Vh
    H_rot = U @ H_sim @ U.conj().T
    Qm = split.ground_basis
    eta = spectral_norm(U.conj().T @ Qm - Qm)
    return Qm.conj().T @ H_rot @ Qm, eta


# ------------------------------------------------------------------ interference


def _pair_terms(Hi, Hj, Gi, Gj, Gij, Pi) -> np.ndarray:
    """Ordered-pair fourth-order term; ``Pi`` is the ground projector or a thin ground basis."""
    return (
        Hi @ Gi(Hj @ Gj(Hj @ Gi(Hi @ Pi)))
        - Hi @ Gi(Hj @ Gij(Hj @ Gi(Hi @ Pi)))
        - Hi @ Gi(Hj @ Gij(Hi @ Gj(Hj @ Pi)))
    )


def _joint_eigenbasis(H0s: list[np.ndarray], tol: float = 1e-9):
    """Common eigenbasis of commuting heavy terms, or None when they do not commute."""
    for i in range(len(H0s)):
        for j in range(i + 1, len(H0s)):
            # Frobenius norm bounds the spectral norm from above
            if np.linalg.norm(H0s[i] @ H0s[j] - H0s[j] @ H0s[i]) > tol:
                return None
    weights = [1.0 + math.pi * k / 7 for k in range(len(H0s))]  # generic weights separate joint eigenvalues
    _, B = np.linalg.eigh(sum(w * h for w, h in zip(weights, H0s)))
    energies = [np.einsum("ij,ij->j", B.conj(), h @ B).real for h in H0s]
    return B, energies


def cross_gadget_interference(H0s: list[np.ndarray], H4s: list[np.ndarray], tol: float = 1e-9) -> dict:
    """Fourth-order cross-gadget terms for gadgets sharing a system register.

    All operators live on the joint register.  Returns the general expression
    (sum over ordered pairs i != j), the commutator form (sum over i < j), the
    joint ground projector with an orthonormal basis of its range, and the
    per-gadget check of H0 H4 P = H4 P.  Commuting heavy terms are handled in their joint eigenbasis, where every
    resolvent is diagonal and only the thin ground block is propagated.
    """
    dim = H0s[0].shape[0]
    k = len(H0s)
    joint = _joint_eigenbasis(H0s, tol)
    if joint is not None:
        B, energies = joint
        ground = np.all([np.abs(e) <= tol for e in energies], axis=0)
        Bg = B[:, ground]
        H4b = [B.conj().T @ h @ B for h in H4s]
        Pi = np.eye(dim)[:, ground]

        def resolvent(e):
            inv = np.where(np.abs(e) > tol, 1 / np.where(np.abs(e) > tol, e, 1), 0.0)
            return lambda X: inv[:, None] * X

        G = [resolvent(e) for e in energies]
        proj = lambda M: Bg @ (Pi.T @ M) @ Bg.conj().T  # noqa: E731
        projector_condition = [
            spectral_norm((energies[i] - 1)[:, None] * (H4b[i] @ Pi)) for i in range(k)
        ]
        general = np.zeros((dim, dim), dtype=complex)
        simplified = np.zeros((dim, dim), dtype=complex)
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                Gij = resolvent(energies[i] + energies[j])
                general += proj(_pair_terms(H4b[i], H4b[j], G[i], G[j], Gij, Pi))
                if i < j:
                    Hi, Hj = H4b[i], H4b[j]
                    cv = Hi @ (Hj @ Pi) - Hj @ (Hi @ Pi)
                    simplified += -0.5 * proj(Hi @ (Hj @ cv) - Hj @ (Hi @ cv))
        return {
            "general": general,
            "simplified": simplified,
            "P_minus": Bg @ Bg.conj().T,
            "ground_basis": Bg,
            "projector_condition": projector_condition,
        }
    Id = np.eye(dim)
    splits = [block_split(h) for h in H0s]
    P = Id
    for s in splits:
        P = P @ s.P_minus
    G = [(lambda M, g=s.H0_pinv: g @ M) for s in splits]
    general = np.zeros((dim, dim), dtype=complex)
    simplified = np.zeros((dim, dim), dtype=complex)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            pij = np.linalg.pinv(H0s[i] + H0s[j], hermitian=True, rcond=1e-12)
            general += P @ _pair_terms(H4s[i], H4s[j], G[i], G[j], lambda M, g=pij: g @ M, P)
            if i < j:
                c = H4s[i] @ H4s[j] - H4s[j] @ H4s[i]
                simplified += -0.5 * P @ c @ c @ P
    projector_condition = [spectral_norm(H0s[i] @ H4s[i] @ P - H4s[i] @ P) for i in range(k)]
    return {
        "general": general,
        "simplified": simplified,
        "P_minus": P,
        "ground_basis": np.linalg.eigh(P)[1][:, np.linalg.eigvalsh(P) > 0.5],
        "projector_condition": projector_condition,
    }


# ------------------------------------------------------------------ sweeps


@dataclass(frozen=True)
class SweepRow:
    delta: float
    eps: float | None
    eta: float | None
    identity_offset: float | None
    rank_match: bool

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "eps": self.eps,
            "eta": self.eta,
            "identity_offset": self.identity_offset,
            "rank_match": self.rank_match,
        }


@dataclass(frozen=True)
class SweepResult:
    gadget: str
    order: int
    rows: list[SweepRow]
    slope: float | None
    monotone: bool

    def to_json(self) -> dict:
        return {
            "gadget": self.gadget,
            "order": self.order,
            "rows": [r.to_json() for r in self.rows],
            "slope": self.slope,
            "monotone": self.monotone,
        }

    def table(self) -> str:
        lines = [f"{'delta':>12}  {'eps':>12}  {'eta':>12}  {'offset':>14}  rank"]
        for r in self.rows:
            if r.rank_match:
                lines.append(
                    f"{r.delta:12.4e}  {r.eps:12.4e}  {r.eta:12.4e}  {r.identity_offset:14.6e}  ok"
                )
            else:
                lines.append(f"{r.delta:12.4e}  {'-':>12}  {'-':>12}  {'-':>14}  mismatch")
        slope = "n/a" if self.slope is None else f"{self.slope:.4f}"
        lines.append(f"fitted slope d(log eps)/d(log delta) = {slope}; monotone = {self.monotone}")
        return "\n".join(lines)


def parse_delta_sweep(text: str) -> list[float]:
    """``lo:hi:n`` -> n log-spaced values."""
    try:
        lo, hi, n = text.split(":")
        return [float(x) for x in np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(n))]
    except ValueError as exc:
        raise ValueError(f"delta sweep must look like lo:hi:n, got {text!r}") from exc


DEFAULT_SWEEP = parse_delta_sweep("1e2:1e10:9")


def _sweep_point(g: GadgetInstance, delta: float, target_block: np.ndarray) -> SweepRow:
    A = g.perturbation(delta)
    try:
        res = exact_schrieffer_wolff(None, delta, g.split, perturbation=A)
    except RankMismatchError:
        return SweepRow(float(delta), None, None, None, False)
    eps, offset = traceless_residual(res.H_eff, target_block)
    return SweepRow(float(delta), eps, res.eta, offset, True)


def fit_slope(rows: list[SweepRow]) -> float | None:
    pts = [(r.delta, r.eps) for r in rows if r.rank_match and r.eps and r.eps > 0]
    if len(pts) < 2:
        return None
    x = np.log10([p[0] for p in pts])
    y = np.log10([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def convergence_sweep(g: GadgetInstance, deltas=None, threads: int | None = None) -> SweepResult:
    """Exact-SW deviation from the gadget target over an ascending list of delta values."""
    deltas = list(DEFAULT_SWEEP if deltas is None else deltas)
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta list must be strictly ascending")
    target_block = g.split.block(g.target)
    workers = thread_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda x: _sweep_point(g, x, target_block), deltas))
    else:
        rows = [_sweep_point(g, x, target_block) for x in deltas]
    eps = [r.eps for r in rows if r.rank_match]
    monotone = len(eps) == len(rows) and all(b < a for a, b in zip(eps, eps[1:]))
    return SweepResult(g.name, g.order, rows, fit_slope(rows), monotone)
