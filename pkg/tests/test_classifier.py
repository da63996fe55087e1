import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gadgetforge import classifier as C
from gadgetforge.interactions import aklt, bilinear_biquadratic, heisenberg_su2, heisenberg_sud
from gadgetforge.operators import (
    DimensionError,
    embed,
    gell_mann_basis,
    kron_all,
    random_hermitian,
    random_state,
    random_unitary,
)

Z3 = np.diag([1.0, -1, -1])
S1 = np.kron(Z3, Z3)
S2 = np.kron(np.diag([1.0, -1, 0]), np.diag([1.0, -1, 0]))
ZZ = np.kron(np.diag([1.0, -1]), np.diag([1.0, -1]))


def brute_two_local_part(H, d):
    """Subtract the partial-trace 1-local pieces through explicit index loops."""
    t = H.reshape(d, d, d, d)
    tr2 = np.einsum("ikjk->ij", t)  # trace over site 2
    tr1 = np.einsum("kikj->ij", t)
    I = np.eye(d)
    return H - np.kron(tr2, I) / d - np.kron(I, tr1) / d + np.trace(H) * np.eye(d * d) / d**2


def random_rank_k(d, k, rng):
    T = gell_mann_basis(d).elements
    M = rng.normal(size=(d * d - 1, k)) @ rng.normal(size=(k, d * d - 1))
    return sum(M[a, b] * np.kron(T[a], T[b]) for a in range(d * d - 1) for b in range(d * d - 1)), M


def test_two_local_part_matches_brute_force(rng):
    for d in (2, 3):
        H = random_hermitian(d * d, rng)
        dec = C.two_local_part(H, d)
        assert np.allclose(dec.H_prime, brute_two_local_part(H, d))
        assert np.allclose(dec.reconstruct(), dec.H_prime)


def test_coefficient_matrix_recovered(rng):
    H, M = random_rank_k(3, 2, rng)
    assert np.allclose(C.two_local_part(H, 3).M, M)


def test_two_local_part_requires_two_sites():
    with pytest.raises(DimensionError):
        C.two_local_part(np.eye(8), 2)


def test_s1_is_stoquastic_with_zero_witness():
    v = C.classify_two_qudit(S1, 3)
    assert v.cls == C.LA_STOQUASTIC_UNIVERSAL
    assert np.allclose(np.abs(v.witness.psi), [1, 0, 0])
    assert v.witness.scale == pytest.approx(4.0)
    assert v.residuals["form_residual"] < 1e-12


def test_s2_is_universal():
    v = C.classify_two_qudit(S2, 3)
    assert v.cls == C.LA_UNIVERSAL and v.label == C.LABEL_THREE


@pytest.mark.parametrize("sign", [1, -1])
def test_zz_is_stoquastic(sign):
    v = C.classify_two_qudit(sign * ZZ, 2)
    assert v.cls == C.LA_STOQUASTIC_UNIVERSAL
    assert v.residuals["alpha_sign"] == sign


@pytest.mark.parametrize(
    "H,d,rank",
    [
        (heisenberg_sud(3).matrix, 3, 8),
        (heisenberg_sud(2).matrix, 2, 3),
        (heisenberg_su2(3).matrix, 3, 3),
        (aklt().matrix, 3, 8),
        (np.kron(np.diag([1.0, -1]), np.array([[0, 1], [1, 0]])) + np.kron(np.array([[0, 1], [1, 0]]), np.diag([1.0, -1])), 2, 2),
    ],
)
def test_known_ranks_are_universal(H, d, rank):
    v = C.classify_two_qudit(H, d)
    assert v.rank == rank
    assert v.cls == C.LA_UNIVERSAL


def test_asymmetric_product_is_universal():
    X = np.array([[0, 1], [1, 0]])
    v = C.classify_two_qudit(np.kron(np.diag([1.0, -1]), X), 2)
    assert v.cls == C.LA_UNIVERSAL and v.label == C.LABEL_ASYM


def test_one_local_only(rng):
    H = np.kron(random_hermitian(3, rng), np.eye(3)) + np.kron(np.eye(3), random_hermitian(3, rng))
    assert C.classify_two_qudit(H, 3).cls == C.ONE_LOCAL_ONLY


def test_borderline_flag():
    T = gell_mann_basis(2).elements
    H = np.kron(T[2], T[2]) + 5e-9 * np.kron(T[0], T[0])
    dec = C.two_local_part(H, 2)
    assert dec.rank_at_tol == 1 and dec.borderline
    assert not C.two_local_part(np.kron(T[2], T[2]), 2).borderline


@given(seed=st.integers(0, 10**6), d=st.sampled_from([2, 3]), k=st.integers(1, 3))
def test_rank_invariant_under_local_unitaries_and_one_local_terms(seed, d, k):
    rng = np.random.default_rng(seed)
    H, _ = random_rank_k(d, k, rng)
    U = np.kron(random_unitary(d, rng), random_unitary(d, rng))
    H2 = U @ H @ U.conj().T + np.kron(random_hermitian(d, rng), np.eye(d)) + np.kron(np.eye(d), random_hermitian(d, rng))
    assert C.two_local_rank(H, d) == C.two_local_rank(H2, d) == k


@given(seed=st.integers(0, 10**6), d=st.sampled_from([2, 3]))
def test_stoquastic_class_invariant_under_local_unitaries(seed, d):
    rng = np.random.default_rng(seed)
    psi = random_state(d, rng)
    P = np.outer(psi, psi.conj()) - np.eye(d) / d
    H = 0.7 * np.kron(P, P) + np.kron(random_hermitian(d, rng), np.eye(d))
    v = C.classify_two_qudit(H, d)
    assert v.cls == C.LA_STOQUASTIC_UNIVERSAL
    # for qubits the orthogonal state is an equally valid witness, so compare the operator
    w = v.witness.psi
    Pw = np.outer(w, w.conj()) - np.eye(d) / d
    assert np.allclose(v.witness.scale * np.kron(Pw, Pw), 0.7 * np.kron(P, P), atol=1e-8)


@given(seed=st.integers(0, 10**6))
def test_rotation_to_zero(seed):
    rng = np.random.default_rng(seed)
    psi = random_state(4, rng)
    W = C.rotation_to_zero(psi)
    assert np.allclose(W @ W.conj().T, np.eye(4))
    out = W @ psi
    assert abs(abs(out[0]) - 1) < 1e-12


@given(seed=st.integers(0, 10**6), d=st.sampled_from([2, 3]), n=st.integers(2, 3))
def test_subinteractions_reassemble(seed, d, n):
    rng = np.random.default_rng(seed)
    H = random_hermitian(d**n, rng)
    comps = C.extract_subinteractions(H, d)
    assert np.allclose(C.reassemble(comps, d, n), H)
    # each component is traceless on each of its sites
    for S, op in comps.items():
        for k in range(len(S)):
            from gadgetforge.operators import partial_trace

            assert np.allclose(partial_trace(op, k, d, len(S)), 0, atol=1e-10)


def test_three_qubit_projector_components():
    e0 = np.zeros(8)
    e0[0] = 1
    comps = C.extract_subinteractions(np.outer(e0, e0), 2)
    assert len(comps) == 8
    Z = np.diag([1.0, -1])
    assert np.allclose(comps[(0, 1, 2)], kron_all(Z, Z, Z) / 8)


def test_set_classification():
    P0 = np.diag([1.0, 0, 0])
    v = C.classify_interaction_set([kron_all(P0, P0, P0)], 3)
    assert v.cls == C.LA_STOQUASTIC_UNIVERSAL
    a = np.array([1.0, 1.0, 0]) / np.sqrt(2)
    Pa = np.outer(a, a)
    assert C.classify_interaction_set([S1, kron_all(Pa, Pa)], 3).cls == C.LA_UNIVERSAL
    same = [np.kron(P0, P0), kron_all(P0, P0, P0)]
    assert C.classify_interaction_set(same, 3).cls == C.LA_STOQUASTIC_UNIVERSAL
    with pytest.raises(DimensionError):
        C.classify_interaction_set([S1, ZZ])
    v = C.classify_interaction_set([np.kron(np.diag([1.0, 2, 3]), np.eye(3))], 3)
    assert v.cls == C.ONE_LOCAL_ONLY


def test_verdict_json():
    js = C.classify_two_qudit(S1, 3).to_json()
    assert js["class"] == C.LA_STOQUASTIC_UNIVERSAL
    assert js["witness"]["psi"][0] == [1.0, 0.0] or abs(js["witness"]["psi"][0][0]) == 1.0
    with pytest.raises(ValueError):
        C.ClassificationVerdict(C.LA_UNIVERSAL, "x", C.Witness(np.ones(2), 1.0, []))


@pytest.mark.parametrize("H,d", [(S1, 3), (ZZ, 2), (-ZZ, 2)])
def test_witness_makes_random_hamiltonians_stoquastic(H, d, rng):
    v = C.classify_two_qudit(H, d)
    n = 3
    for _ in range(5):
        Hs = sum(rng.normal() * embed(H, [i, j], n, d=d) for i, j in itertools.combinations(range(n), 2))
        Hs = Hs + sum(embed(random_hermitian(d, rng), [i], n, d=d) for i in range(n))
        rotated, wit = C.stoquastify(Hs, v.witness.psi, d, n)
        assert wit.passed
        assert wit.max_positive_offdiag < 1e-10 and wit.max_imag_offdiag < 1e-10
        # the rotation is a product of local unitaries
        U = kron_all(*wit.unitaries)
        assert np.allclose(U @ Hs @ U.conj().T, rotated, atol=1e-10)
        assert np.allclose(np.linalg.eigvalsh(rotated), np.linalg.eigvalsh(Hs))


def test_stoquastic_witness_on_one_local_terms(rng):
    psi = random_state(3, rng)
    wit = C.stoquastic_witness([random_hermitian(3, rng) for _ in range(4)], psi)
    assert wit.passed
    for U in wit.unitaries:
        assert np.allclose(U @ psi / np.linalg.norm(U @ psi), U @ psi)
        assert abs(abs((U @ psi)[0]) - 1) < 1e-10


def test_offdiag_violation_reports_worst_entry():
    H = np.array([[0, 0.5, 0], [0.5, 0, -1], [0, -1, 0]])
    pos, im, idx = C.offdiag_violation(H)
    assert pos == 0.5 and im == 0 and idx in ((0, 1), (1, 0))


def test_bbq_universal_for_generic_theta():
    assert C.classify_two_qudit(bilinear_biquadratic(0.7).matrix, 3).cls == C.LA_UNIVERSAL


def test_projection_span_rank():
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1.0, -1])
    rank, needed = C.projection_span_rank(np.kron(X, X) + np.kron(Z, Z), 2)
    assert rank == needed == 2
