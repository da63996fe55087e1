import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from gadgetforge.operators import (
    DimensionError,
    HermiticityError,
    LocalOperator,
    ManyBodyOperator,
    embed,
    gell_mann_basis,
    kron_all,
    levi_civita,
    operator_from_json,
    operator_to_json,
    partial_trace,
    place_states,
    polar_unitary,
    random_hermitian,
    random_unitary,
    spectral,
    spin_operators,
)


def brute_embed(op, sites, n, d):
    """Matrix elements from digit strings: <r|op_S|c> = op[r_S, c_S] * delta(r_rest, c_rest)."""
    dim = d**n
    out = np.zeros((dim, dim), dtype=complex)
    rest = [s for s in range(n) if s not in sites]
    for r in range(dim):
        rd = np.unravel_index(r, [d] * n)
        for c in range(dim):
            cd = np.unravel_index(c, [d] * n)
            if any(rd[s] != cd[s] for s in rest):
                continue
            i = np.ravel_multi_index([rd[s] for s in sites], [d] * len(sites))
            j = np.ravel_multi_index([cd[s] for s in sites], [d] * len(sites))
            out[r, c] = op[i, j]
    return out


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_gell_mann_normalization(d):
    b = gell_mann_basis(d)
    T = b.elements
    assert len(b) == d * d - 1
    gram = np.einsum("aij,bji->ab", T, T)
    assert np.allclose(gram, np.eye(d * d - 1) / 2, atol=1e-14)
    assert np.allclose(np.einsum("aii->a", T), 0, atol=1e-14)
    assert np.allclose(T, np.conj(np.transpose(T, (0, 2, 1))))
    # ordering: symmetric pairs first, diagonal last
    assert np.allclose(T[0], T[0].T) and T[0][0, 1] == 0.5
    assert np.count_nonzero(T[-1] - np.diag(np.diag(T[-1]))) == 0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_structure_constants_reproduce_commutators(d):
    b = gell_mann_basis(d)
    T, f = b.elements, b.structure_constants
    for a, c in itertools.product(range(len(b)), repeat=2):
        comm = T[a] @ T[c] - T[c] @ T[a]
        assert np.allclose(comm, 1j * np.einsum("e,eij->ij", f[a, c], T), atol=1e-13)
    assert np.allclose(f, -np.transpose(f, (1, 0, 2)))
    assert np.allclose(f, -np.transpose(f, (0, 2, 1)))


def test_su2_structure_constants_are_levi_civita():
    assert np.allclose(gell_mann_basis(2).structure_constants, levi_civita())


@pytest.mark.parametrize("d", [2, 3, 4])
def test_completeness_relation(d):
    # sum_a T^a (x) T^a = (SWAP - I/d) / 2
    T = gell_mann_basis(d).elements
    lhs = sum(np.kron(t, t) for t in T)
    swap = np.zeros((d * d, d * d))
    for i, j in itertools.product(range(d), repeat=2):
        swap[j * d + i, i * d + j] = 1
    assert np.allclose(lhs, (swap - np.eye(d * d) / d) / 2, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_spin_operators(d):
    sx, sy, sz = spin_operators(d)
    s = (d - 1) / 2
    assert np.allclose(sx @ sy - sy @ sx, 1j * sz)
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, s * (s + 1) * np.eye(d))
    assert sz[0, 0].real == pytest.approx(s)


@given(
    d=st.integers(2, 3),
    n=st.integers(2, 4),
    k=st.integers(1, 2),
    seed=st.integers(0, 10**6),
)
def test_embed_matches_brute_force(d, n, k, seed):
    rng = np.random.default_rng(seed)
    sites = list(rng.permutation(n)[:k])
    op = random_hermitian(d**k, rng)
    dense = embed(op, sites, n, d=d)
    assert np.allclose(dense, brute_embed(op, sites, n, d))
    sparse = embed(op, sites, n, d=d, dense_limit=1)
    assert sp.issparse(sparse)
    assert np.allclose(sparse.toarray(), dense)


def test_embed_errors():
    op = np.eye(4)
    with pytest.raises(DimensionError):
        embed(op, [0, 0], 3, d=2)
    with pytest.raises(DimensionError):
        embed(op, [0, 3], 3, d=2)
    with pytest.raises(DimensionError):
        embed(np.eye(3), [0, 1], 3, d=2)


def test_local_operator_validation():
    with pytest.raises(HermiticityError):
        LocalOperator(np.array([[0, 1], [0, 0]]), 2, 1)
    with pytest.raises(DimensionError):
        LocalOperator(np.eye(3), 2, 1)
    op = LocalOperator.from_matrix(np.eye(9), 3)
    assert op.arity == 2
    assert not op.matrix.flags.writeable


def test_place_states_reorders_sites(rng):
    a, b, c = (rng.normal(size=2) for _ in range(3))
    v = place_states([(a, [2]), (np.kron(b, c), [0, 1])], 3, 2)
    assert np.allclose(v, kron_all(b, c, a))
    with pytest.raises(DimensionError):
        place_states([(a, [0])], 2, 2)


def test_partial_trace_of_product(rng):
    A, B = random_hermitian(2, rng), random_hermitian(2, rng)
    assert np.allclose(partial_trace(np.kron(A, B), 1, 2), np.trace(B) * A)
    assert np.allclose(partial_trace(np.kron(A, B), 0, 2), np.trace(A) * B)
    C = random_hermitian(3, rng)
    ABC = np.kron(np.kron(C, C), C)
    assert np.allclose(partial_trace(ABC, 1, 3), np.trace(C) * np.kron(C, C))
    with pytest.raises(DimensionError):
        partial_trace(ABC, 3, 3)


def test_spectral_clusters():
    sd = spectral(np.diag([0.0, 0.0, 1.0, 2.0, 2.0, 2.0]))
    assert sd.multiplicities() == [2, 1, 3]
    assert np.allclose(sd.projector([0]), np.diag([1, 1, 0, 0, 0, 0]))


def test_polar_unitary(rng):
    M = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    U = polar_unitary(M)
    assert np.allclose(U.conj().T @ U, np.eye(4))
    P = U.conj().T @ M
    assert np.allclose(P, P.conj().T)
    assert np.linalg.eigvalsh(P).min() > 0


def test_random_unitary_is_unitary(rng):
    U = random_unitary(5, rng)
    assert np.allclose(U @ U.conj().T, np.eye(5))


@given(
    entries=st.lists(
        st.tuples(st.integers(0, 7), st.integers(0, 7), st.integers(-64, 64), st.integers(-64, 64)),
        max_size=20,
    ),
    dense=st.booleans(),
)
def test_operator_json_round_trip_is_bit_exact(entries, dense):
    M = np.zeros((8, 8), dtype=complex)
    for r, c, re, im in entries:
        M[r, c] = re / 8 + 1j * im / 16
    payload = operator_to_json(M, 2, 3, dense=dense)
    back, d, n = operator_from_json(payload)
    assert (d, n) == (2, 3)
    assert np.array_equal(back, M)
    if not dense:
        keys = [(e[0], e[1]) for e in payload["entries"]]
        assert keys == sorted(keys)


def test_operator_json_rejects_bad_shape():
    with pytest.raises(DimensionError):
        operator_from_json({"d": 2, "n": 1, "matrix": [[1, 0]] * 3})
    with pytest.raises(DimensionError):
        operator_from_json({"n": 1, "entries": []})


def test_many_body_operator_sparse_round_trip():
    M = embed(np.diag([1.0, -1.0]), [3], 13, d=2)
    assert sp.issparse(M)
    mb = ManyBodyOperator(M, 2, 13)
    back = ManyBodyOperator.from_json(mb.to_json())
    assert back.is_sparse and back.dim == 2**13
    assert (back.data != M).nnz == 0
