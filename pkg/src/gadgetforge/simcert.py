"""Numerical certificates for (Delta, eta, epsilon)-simulations.

Given a simulator H', a target H, an encoding isometry V and a cutoff Delta,
the certificate measures how far the low-energy space of H' is from the image
of V (eta) and how well H' restricted there reproduces V H V^dag (epsilon).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import CLUSTER_RTOL, _as_dense, check_hermitian, polar_unitary, spectral_norm


@dataclass(frozen=True)
class LowEnergySpace:
    projector: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray
    cluster_split: bool  # the cutoff fell inside a degenerate cluster, which was kept whole

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


def low_energy_space(H, delta: float, cluster_rtol: float = CLUSTER_RTOL) -> LowEnergySpace:
    """Spectral subspace of eigenvalues <= delta; a cluster straddling delta is included whole."""
    H = _as_dense(H)
    check_hermitian(H)
    evals, evecs = np.linalg.eigh(H)
    tol = cluster_rtol * max(float(evals[-1] - evals[0]) if evals.size else 0.0, 1.0)
    keep = evals <= delta
    split = False
    if keep.any() and not keep.all():
        top = float(evals[keep][-1])
        near = (evals > delta) & (evals - top <= tol)
        if near.any():
            keep |= near
            split = True
        below = (evals <= delta) & (delta - evals <= tol)
        if below.any() and ((evals > delta) & (evals - delta <= tol)).any():
            split = True
    basis = evecs[:, keep]
    return LowEnergySpace(basis @ basis.conj().T, basis, evals[keep], split)


def low_energy_projector(H, delta: float) -> np.ndarray:
    return low_energy_space(H, delta).projector


@dataclass(frozen=True)
class SimulationReport:
    delta: float
    low_space_dim: int
    eta: float | None
    eps: float | None
    rank_match: bool
    identity_offset: float | None
    cluster_split: bool = False
    modulo_identity: bool = False

    def __post_init__(self) -> None:
        if not self.rank_match and (self.eta is not None or self.eps is not None):
            raise ValueError("eta and eps are undefined without a rank match")

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "low_space_dim": self.low_space_dim,
            "eta": self.eta,
            "eps": self.eps,
            "rank_match": self.rank_match,
            "identity_offset": self.identity_offset,
            "cluster_split": self.cluster_split,
            "modulo_identity": self.modulo_identity,
        }


def closest_isometry(P_basis: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Isometry with range inside span(P_basis) closest to V: the polar factor of P V."""
    PV = P_basis @ (P_basis.conj().T @ V)
    return polar_unitary(PV)


def certify_simulation(H_sim, H_target, V, delta: float, modulo_identity: bool = False) -> SimulationReport:
    """Measure (eta, eps) of H_sim simulating H_target through the encoding V at cutoff delta.

    With ``modulo_identity`` the comparison drops the identity component on the
    low-energy space and reports its coefficient as ``identity_offset``.
    """
    H_sim = _as_dense(H_sim)
    H_target = _as_dense(H_target)
    V = np.asarray(V, dtype=complex)
    if V.shape != (H_sim.shape[0], H_target.shape[0]):
        raise ValueError(f"isometry shape {V.shape} does not map {H_target.shape[0]} into {H_sim.shape[0]}")
    if spectral_norm(V.conj().T @ V - np.eye(V.shape[1])) > 1e-10:
        raise ValueError("V is not an isometry")
    low = low_energy_space(H_sim, delta)
    if low.rank != V.shape[1]:
        return SimulationReport(float(delta), low.rank, None, None, False, None, low.cluster_split, modulo_identity)
    Vt = closest_isometry(low.basis, V)
    eta = spectral_norm(Vt - V)
    # H'_{<=Delta} = H' P restricted, compared with Vt H Vt^dag
    H_low = (low.basis * low.eigenvalues) @ low.basis.conj().T
    diff = H_low - Vt @ H_target @ Vt.conj().T
    offset = 0.0
    if modulo_identity:
        offset = float(np.trace(low.basis.conj().T @ diff @ low.basis).real) / low.rank
        diff = diff - offset * low.projector
    return SimulationReport(
        float(delta), low.rank, eta, spectral_norm(diff), True, offset if modulo_identity else None,
        low.cluster_split, modulo_identity,
    )
