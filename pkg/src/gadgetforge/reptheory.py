"""Casimir eigenvalues, Casimir operators and the special states of the SU(d) and SU(2) gadgets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .operators import DimensionError, HermitianBasis, embed, gell_mann_basis, spin_operators


@dataclass(frozen=True)
class YoungDiagram:
    rows: tuple[int, ...]
    N: int

    def __post_init__(self) -> None:
        rows = tuple(int(r) for r in self.rows)
        if any(r <= 0 for r in rows):
            raise ValueError(f"row lengths must be positive: {rows}")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError(f"row lengths must be non-increasing: {rows}")
        if len(rows) > self.N:
            raise ValueError(f"{len(rows)} rows exceed su({self.N}) limit")
        object.__setattr__(self, "rows", rows)

    @property
    def boxes(self) -> int:
        return sum(self.rows)

    @property
    def columns(self) -> tuple[int, ...]:
        if not self.rows:
            return ()
        return tuple(sum(1 for r in self.rows if r > c) for c in range(self.rows[0]))

    def to_json(self) -> dict:
        return {"rows": list(self.rows), "N": self.N}

    @classmethod
    def from_json(cls, payload: dict) -> "YoungDiagram":
        return cls(tuple(payload["rows"]), int(payload["N"]))


def casimir_eigenvalue(Y: YoungDiagram) -> Fraction:
    """Quadratic Casimir of the su(N) irrep labelled by ``Y`` (normalization tr T^aT^b = delta/2)."""
    l, N = Y.boxes, Y.N
    b2 = sum(r * r for r in Y.rows)
    a2 = sum(c * c for c in Y.columns)
    return Fraction(1, 2) * (l * (N - Fraction(l, N)) + b2 - a2)


def collective_generator(T: np.ndarray, sites, n: int, d: int):
    return sum(embed(T, [s], n, d=d) for s in sites)


def casimir_operator(sites, n: int, d: int, basis: HermitianBasis | None = None):
    """C(S) = sum_a (sum_{i in S} T_i^a)^2."""
    sites = list(sites)
    if not sites:
        raise ValueError("Casimir operator needs a non-empty site set")
    basis = basis or gell_mann_basis(d)
    C = 0
    for T in basis.elements:
        TS = collective_generator(T, sites, n, d)
        C = C + TS @ TS
    return C


def su2_casimir_operator(sites, n: int, d: int):
    """sum_a (sum_{i in S} S_i^a)^2 for spin-(d-1)/2 sites."""
    C = 0
    for S in spin_operators(d):
        SS = collective_generator(S, sites, n, d)
        C = C + SS @ SS
    return C


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def antisymmetric_state(d: int, max_dim: int = 10**7) -> np.ndarray:
    """Totally antisymmetric state of d qudits of dimension d."""
    if d < 2:
        raise DimensionError(f"invalid local dimension {d}")
    if d**d > max_dim:
        raise DimensionError(f"d^d = {d**d} exceeds the dense limit {max_dim}")
    psi = np.zeros(d**d, dtype=complex)
    for perm in itertools.permutations(range(d)):
        idx = 0
        for p in perm:
            idx = idx * d + p
        psi[idx] = _perm_sign(perm)
    return psi / math.sqrt(math.factorial(d))


def singlet_state_su2(d: int) -> np.ndarray:
    """Two-site spin singlet sum_i (-1)^i |i>|d-1-i> / sqrt(d) in the m-ordered spin basis."""
    if d < 2:
        raise DimensionError(f"invalid local dimension {d}")
    psi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        psi[i * d + (d - 1 - i)] = (-1) ** i
    return psi / math.sqrt(d)


def su2_tensor_decomposition(d: int) -> list[int]:
    """Irrep dimensions in the square of the d-dimensional su(2) irrep."""
    if d < 2:
        raise DimensionError(f"invalid local dimension {d}")
    return list(range(1, 2 * d, 2))


def su2_irrep_diagram(k: int) -> YoungDiagram:
    """Young diagram of the k-dimensional su(2) irrep: one row of k-1 boxes."""
    return YoungDiagram((k - 1,) if k > 1 else (), 2)


def adjoint_diagram(N: int) -> YoungDiagram:
    return YoungDiagram((2,) + (1,) * (N - 2), N)


def adjoint_representation(basis: HermitianBasis) -> np.ndarray:
    """Matrices (ad T^a)_{bc} = -i f_{abc}."""
    return -1j * np.asarray(basis.structure_constants)


# moment identities for the singlet -----------------------------------------------


def singlet_moments(d: int, order: int) -> np.ndarray:
    """<psi| S_E^{a1} ... S_E^{ak} |psi> for the two-site singlet, as a k-index tensor."""
    psi = singlet_state_su2(d)
    S = [np.kron(s, np.eye(d)) for s in spin_operators(d)]
    out = np.zeros((3,) * order, dtype=complex)
    for idx in itertools.product(range(3), repeat=order):
        v = psi
        for a in reversed(idx):
            v = S[a] @ v
        out[idx] = psi.conj() @ v
    return out


def expected_moments(d: int, order: int) -> np.ndarray:
    """Closed forms for the second, third and fourth singlet moments."""
    from .operators import levi_civita

    lam = (d * d - 1) / 4
    delta = np.eye(3)
    if order == 2:
        return lam / 3 * delta
    if order == 3:
        return 1j * lam / 6 * levi_civita()
    if order == 4:
        return lam / 15 * (
            (lam - 2) * np.einsum("ac,be->abce", delta, delta)
            + (lam + 0.5) * (np.einsum("ab,ce->abce", delta, delta) + np.einsum("ae,bc->abce", delta, delta))
        )
    raise ValueError(f"no closed form for order {order}")


def singlet_sector_residuals(d: int) -> tuple[float, float]:
    """Residuals of H0 S^b psi = S^b psi and H0 Q^{bc} psi = 3 Q^{bc} psi, H0 = h_EF + lambda I.

    Q^{bc} = {S^b, S^c}/2 - (lambda/3) delta_bc; it vanishes on the singlet for d = 2.
    """
    lam = (d * d - 1) / 4
    S = spin_operators(d)
    h = sum(np.kron(s, s) for s in S)
    H0 = h + lam * np.eye(d * d)
    psi = singlet_state_su2(d)
    SE = [np.kron(s, np.eye(d)) for s in S]
    r1 = max(np.linalg.norm(H0 @ s @ psi - s @ psi) for s in SE)
    r3 = 0.0
    for b in range(3):
        for c in range(3):
            Q = (SE[b] @ SE[c] + SE[c] @ SE[b]) / 2 - (lam / 3) * (b == c) * np.eye(d * d)
            v = Q @ psi
            r3 = max(r3, float(np.linalg.norm(H0 @ v - 3 * v)))
    return float(r1), r3
