"""Interaction families and weighted assembly into many-body Hamiltonians."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    DENSE_LIMIT,
    DimensionError,
    LocalOperator,
    check_hermitian,
    embed,
    gell_mann_basis,
    spin_operators,
)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class Interaction:
    name: str
    local_dim: int
    arity: int
    operator: LocalOperator
    parameters: tuple = ()
    swap_symmetric: bool | None = None

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix


def _make(name: str, matrix: np.ndarray, d: int, arity: int, params=(), symmetric: bool | None = None) -> Interaction:
    op = LocalOperator(np.asarray(matrix, dtype=complex), d, arity)
    if symmetric is not None and arity == 2:
        sw = swap_operator(d)
        ok = np.max(np.abs(sw @ op.matrix @ sw - op.matrix)) <= 1e-12 * max(1.0, np.max(np.abs(op.matrix)))
        if symmetric and not ok:
            raise DimensionError(f"{name} was declared swap-symmetric but is not")
        symmetric = ok
    return Interaction(name, d, arity, op, tuple(params), symmetric)


def swap_operator(d: int) -> np.ndarray:
    sw = np.zeros((d * d, d * d), dtype=complex)
    for i, j in itertools.product(range(d), repeat=2):
        sw[j * d + i, i * d + j] = 1.0
    return sw


def maximally_entangled(d: int) -> np.ndarray:
    phi = np.zeros(d * d, dtype=complex)
    phi[[i * d + i for i in range(d)]] = 1 / np.sqrt(d)
    return phi


def heisenberg_sud(d: int) -> Interaction:
    """Sum over the su(d) basis of T^a (x) T^a."""
    T = gell_mann_basis(d).elements
    h = sum(np.kron(t, t) for t in T)
    return _make("heisenberg_sud", h, d, 2, (), True)


def alt_heisenberg_sud(d: int) -> Interaction:
    """Sum of T^a (x) (-T^a)^*, the partially transposed counterpart of the su(d) Heisenberg term."""
    T = gell_mann_basis(d).elements
    h = sum(np.kron(t, -t.conj()) for t in T)
    return _make("alt_heisenberg_sud", h, d, 2, (), True)


def heisenberg_su2(d: int) -> Interaction:
    """Spin-(d-1)/2 Heisenberg coupling S.S."""
    S = spin_operators(d)
    h = sum(np.kron(s, s) for s in S)
    return _make("heisenberg_su2", h, d, 2, (), True)


def bbq_coefficients(theta: float) -> tuple[float, float]:
    theta = float(np.mod(theta, 2 * np.pi))
    return float(np.cos(theta)), float(np.sin(theta))


def bilinear_biquadratic(theta: float) -> Interaction:
    """cos(theta) h + sin(theta) h^2 for the spin-1 Heisenberg h."""
    theta = float(np.mod(theta, 2 * np.pi))
    alpha, beta = bbq_coefficients(theta)
    h = heisenberg_su2(3).matrix
    return _make("bilinear_biquadratic", alpha * h + beta * (h @ h), 3, 2, (theta,), True)


def aklt() -> Interaction:
    h = heisenberg_su2(3).matrix
    return _make("aklt", 3 * h + h @ h, 3, 2, (), True)


def state_projector(psi, d: int, tol: float = NORM_TOL) -> Interaction:
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise ValueError(f"state is not normalized (norm {norm:.12g})")
    k = round(np.log(psi.size) / np.log(d))
    if d**k != psi.size:
        raise DimensionError(f"state of length {psi.size} is not a register of qudits of dimension {d}")
    return _make("state_projector", np.outer(psi, psi.conj()), d, k)


def sym_projector(d: int) -> Interaction:
    if d < 2:
        raise DimensionError(f"invalid local dimension {d}")
    return _make("sym_projector", (swap_operator(d) + np.eye(d * d)) / 2, d, 2, (), True)


def explicit(name: str, matrix, d: int) -> Interaction:
    m = np.asarray(matrix, dtype=complex)
    k = round(np.log(m.shape[0]) / np.log(d))
    if d**k != m.shape[0]:
        raise DimensionError(f"matrix of size {m.shape[0]} is not a register of qudits of dimension {d}")
    check_hermitian(m)
    return _make(name, m, d, k)


FAMILIES = {
    "heisenberg_sud": lambda d, params: heisenberg_sud(d),
    "alt_heisenberg_sud": lambda d, params: alt_heisenberg_sud(d),
    "heisenberg_su2": lambda d, params: heisenberg_su2(d),
    "bilinear_biquadratic": lambda d, params: bilinear_biquadratic(params[0]),
    "aklt": lambda d, params: aklt(),
    "sym_projector": lambda d, params: sym_projector(d),
    "swap": lambda d, params: _make("swap", swap_operator(d), d, 2, (), True),
}


def from_family(family: str, d: int, params=()) -> Interaction:
    if family not in FAMILIES:
        raise KeyError(f"unknown interaction family {family!r}; known: {sorted(FAMILIES)}")
    inter = FAMILIES[family](d, list(params))
    if inter.local_dim != d:
        raise DimensionError(f"family {family} has local dimension {inter.local_dim}, not {d}")
    return inter


@dataclass
class WeightedTermList:
    n_sites: int
    local_dim: int
    terms: list[tuple[Interaction, tuple[int, ...], float]] = field(default_factory=list)

    def add(self, interaction: Interaction, sites, weight: float = 1.0) -> "WeightedTermList":
        sites = tuple(int(s) for s in sites)
        if interaction.local_dim != self.local_dim:
            raise DimensionError(
                f"interaction {interaction.name} has local dimension {interaction.local_dim}, register has {self.local_dim}"
            )
        if len(sites) != interaction.arity:
            raise DimensionError(f"{interaction.name} has arity {interaction.arity}, got sites {sites}")
        if len(set(sites)) != len(sites) or any(not 0 <= s < self.n_sites for s in sites):
            raise DimensionError(f"invalid sites {sites} for a register of {self.n_sites}")
        if not np.isfinite(weight):
            raise ValueError(f"non-finite weight {weight}")
        self.terms.append((interaction, sites, float(weight)))
        return self


def assemble(terms: WeightedTermList, dense_limit: int = DENSE_LIMIT):
    n, d = terms.n_sites, terms.local_dim
    dim = d**n
    if dim > dense_limit:
        import scipy.sparse as sp

        H = sp.csr_matrix((dim, dim), dtype=complex)
    else:
        H = np.zeros((dim, dim), dtype=complex)
    for inter, sites, w in terms.terms:
        H = H + w * embed(inter.operator, sites, n, dense_limit=dense_limit)
    return H


def load_interaction_set(payload: dict) -> tuple[int, dict[str, Interaction], list[dict]]:
    """Parse the interaction-set JSON format.

    Each interaction entry is ``{"name", "params", "matrix"?, "family"?}``; the
    family defaults to the name.  Explicit matrices are nested lists whose
    entries are reals or ``[re, im]`` pairs.
    """
    d = int(payload["d"])
    table: dict[str, Interaction] = {}
    for entry in payload.get("interactions", []):
        name = entry["name"]
        if entry.get("matrix") is not None:
            raw = np.array(entry["matrix"], dtype=float)
            m = raw[..., 0] + 1j * raw[..., 1] if raw.ndim == 3 else raw.astype(complex)
            table[name] = explicit(name, m, d)
        else:
            table[name] = from_family(entry.get("family", name), d, entry.get("params", []))
    terms = list(payload.get("terms", []))
    for t in terms:
        if t["ref"] not in table:
            raise KeyError(f"term references unknown interaction {t['ref']!r}")
    return d, table, terms


def interaction_to_json(inter: Interaction) -> dict:
    m = inter.matrix
    return {
        "name": inter.name,
        "params": list(inter.parameters),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


# ---------------------------------------------------------------- Max-d-Cut


def max_cut_terms(n: int, d: int, edges) -> WeightedTermList:
    """Quantum Max-d-Cut: weighted P_sym on every edge (the quantity to minimize)."""
    terms = WeightedTermList(n, d)
    p = sym_projector(d)
    for edge in edges:
        i, j = int(edge[0]), int(edge[1])
        w = float(edge[2]) if len(edge) > 2 else 1.0
        if w < 0:
            raise ValueError(f"negative edge weight {w} on ({i}, {j})")
        terms.add(p, (i, j), w)
    return terms


def classical_max_cut_penalty(n: int, d: int, edges) -> tuple[float, tuple[int, ...]]:
    """Minimum total weight of monochromatic edges over all d-colourings."""
    best = (np.inf, ())
    for colouring in itertools.product(range(d), repeat=n):
        pen = sum(float(e[2]) if len(e) > 2 else 1.0 for e in edges if colouring[e[0]] == colouring[e[1]])
        if pen < best[0]:
            best = (pen, colouring)
    return best


def quantum_max_cut_energy(n: int, d: int, edges, dense_limit: int = DENSE_LIMIT) -> float:
    """Brute-force ground energy of the quantum Max-d-Cut Hamiltonian."""
    H = assemble(max_cut_terms(n, d, edges), dense_limit=dense_limit)
    if hasattr(H, "toarray") and d**n <= dense_limit:
        H = H.toarray()
    if isinstance(H, np.ndarray):
        return float(np.linalg.eigvalsh(H)[0])
    import scipy.sparse.linalg as spla

    return float(spla.eigsh(H, k=1, which="SA", tol=1e-12, return_eigenvectors=False)[0])
