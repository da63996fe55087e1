import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gadgetforge import gadgets as G
from gadgetforge.interactions import bbq_coefficients, heisenberg_su2
from gadgetforge.schrieffer_wolff import check_gadget_conditions


def assert_passes(rep):
    assert rep.passed, rep.table()


def test_aklt_gadget_spectrum():
    rep = G.aklt_su3_gadget()
    assert_passes(rep)
    # 20(h + h^2) - 272/3 I: h + h^2 is 2 on total spin 0 and 2, 0 on total spin 1
    ev = np.linalg.eigvalsh(rep.effective)
    expect = sorted([40 - 272 / 3] * 6 + [-272 / 3] * 3)
    assert np.allclose(ev, expect, atol=1e-9)


def test_aklt_gadget_other_weights_still_match_closed_form():
    rep = G.aklt_su3_gadget(lam1=1.0, lam2=2.0)
    assert rep.check("simulated operator").passed
    with pytest.raises(KeyError):
        rep.check("equals 20(h+h^2) - 272/3 I")


@pytest.mark.parametrize("d", [2, 3])
def test_sud_logical_qubit(d):
    rep = G.sud_logical_qubit_gadget(d, alpha=0.7, beta=-1.3)
    assert_passes(rep)
    assert rep.derived["phi1_phi2_overlap"] == pytest.approx(1 / d, abs=1e-10)
    # four distinct row values, checked on all ten unordered group pairs
    assert len([c for c in rep.checks if c.name.startswith("table row")]) == 10
    assert len({tuple(np.round(v, 12).ravel()) for v in G.table_one(d).values()}) == 4


@pytest.mark.parametrize("d,xx,zz", [(2, -1 / 16, 1 / 48), (3, -1 / 24, 1 / 192)])
def test_sud_coupling_two_local_part(d, xx, zz):
    # brute-force values of the coupling's 2-local logical part: (ZZ - (d^2-1) XX) / (8d(d^2-1))
    rep = G.sud_coupling_gadget(d)
    p = rep.derived["two_local_pauli"]
    assert p["XX"] == pytest.approx(xx, abs=1e-12)
    assert p["ZZ"] == pytest.approx(zz, abs=1e-12)
    for k in ("XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY"):
        assert abs(p[k]) < 1e-12
    assert rep.check("2-local part = (ZZ - (d^2-1) XX)/(8d(d^2-1))").passed
    assert rep.check("C(E) T^b_1 psi = d T^b_1 psi").passed


def test_sud_coupling_routes_agree():
    rep = G.sud_coupling_gadget(2, dense=True)
    assert rep.check("dense and factorized routes agree").passed


def test_sud_coupling_only_misses_the_xx_plus_zz_form():
    rep = G.sud_coupling_gadget(2)
    assert rep.failures() == ["2-local part proportional to XX + 3/(d^2-1) ZZ", "prefactor 1/(8d(d^2-1))"]


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("mu", [-2.0, 0.0, 1.0])
def test_alt_sud_reduction(d, mu):
    assert_passes(G.alt_sud_reduction_gadget(d, mu))


@given(mu=st.floats(-3, 3, allow_nan=False))
def test_alt_sud_reduction_any_mu(mu):
    assert_passes(G.alt_sud_reduction_gadget(2, mu))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_projector_chain_random_entangled(d, rng):
    for _ in range(3):
        v = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
        rep = G.projector_gadget_chain(v / np.linalg.norm(v), d, rng=rng)
        assert_passes(rep)
        assert rep.derived["verdict"] == "universal"


@pytest.mark.parametrize("d", [2, 3, 4])
def test_projector_chain_product_state_is_classical(d, rng):
    a, b = rng.normal(size=d), rng.normal(size=d)
    rep = G.projector_gadget_chain(np.kron(a, b) / np.linalg.norm(np.kron(a, b)), d)
    assert rep.derived["verdict"] == "classical"
    assert rep.derived["schmidt_rank"] == 1


@pytest.mark.parametrize("d", [2, 3])
def test_projector_chain_maximally_entangled(d):
    psi = np.eye(d).ravel() / math.sqrt(d)
    rep = G.projector_gadget_chain(psi, d)
    assert_passes(rep)
    assert rep.derived["case"] == "degenerate"


def test_projector_chain_two_qubit_closed_form():
    psi = np.array([math.sqrt(3) / 2, 0, 0, 0.5])
    rep = G.projector_gadget_chain(psi, 2)
    assert rep.derived["case"] == "non-degenerate"
    assert rep.check("two-qubit closed form").passed


def test_h_to_h2_parameters():
    # d = 2, beta = 1: mu2^4 = 135 / (4 (11 lambda^2 + 3 lambda)) = 4 at lambda = 3/4
    lam, mu1, mu2 = G.h_to_h2_parameters(2, 1.0, 1.0)
    assert lam == 0.75
    assert mu2**4 == pytest.approx(4.0)
    assert mu1 == pytest.approx(1 - 4 * 0.75 / 135 * (88 * 0.5625 + 22.5 - 27))
    with pytest.raises(ValueError):
        G.h_to_h2_parameters(2, 1.0, -0.1)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (-0.5, 2.0), (0.3, 0.0)])
def test_h_to_h2_gadget(d, alpha, beta):
    rep = G.h_to_h2_gadget(d, alpha, beta)
    assert_passes(rep)
    assert check_gadget_conditions(rep.instance).passed


def test_h_to_h2_interference_qubits():
    rep = G.h_to_h2_interference(2)
    assert_passes(rep)
    assert rep.derived["normalized_identity"] == pytest.approx(0.75**3 / 9)


@pytest.mark.slow
def test_h_to_h2_interference_qutrits():
    rep = G.h_to_h2_interference(3)
    assert_passes(rep)
    assert rep.derived["normalized_identity"] == pytest.approx(8 / 9)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_qutrit_encoding(d):
    rep = G.qutrit_encoding_check(d)
    assert_passes(rep)
    assert rep.derived["kernel_dimension"] == 3


@pytest.mark.parametrize("theta", [0.2, 0.3, 1.0, 1.5, 2.0, 3 * math.pi / 4, 3.0])
def test_bbq_mediator_in_range(theta):
    rep = G.bbq_mediator_gadget(theta)
    assert_passes(rep)
    a, b = bbq_coefficients(theta)
    assert rep.derived["heavy_sign"] == (1.0 if a > 3 * b else -1.0)


def test_bbq_mediator_htilde_closed_form():
    a, b = bbq_coefficients(3 * math.pi / 4)
    pre = 2 / (9 * (a - b))
    c_h2 = pre * b * b
    c_h = pre * (6 * a**3 - 12 * a * a * b + 8 * a * b * b - 3 * b**3) / (a - 3 * b)
    got = G.bbq_mediator_gadget(3 * math.pi / 4).derived["htilde_coefficients"]
    assert got["h2"] == pytest.approx(c_h2, abs=1e-10)
    assert got["h"] == pytest.approx(c_h, abs=1e-10)


def test_bbq_mediator_range_guard():
    with pytest.raises(ValueError):
        G.bbq_mediator_gadget(0.5)
    with pytest.raises(ValueError):
        G.bbq_mediator_gadget(math.atan(2))
    rep = G.bbq_mediator_gadget(math.atan(2), allow_excluded=True)
    assert rep.derived["at_excluded_angle"]
    assert abs(rep.derived["independence_determinant"]) < 1e-10


def test_bbq_logical_at_pi_over_3():
    a, b = math.cos(math.pi / 3), math.sin(math.pi / 3)
    K = (5 * a**3 - 8 * a * a * b + 13 * a * b * b - 2 * b**3) / (3 * b - a)
    rep = G.bbq_logical_gadget(math.pi / 3)
    assert_passes(rep)
    assert rep.derived["final_coefficient"] == pytest.approx(K, abs=1e-12)
    assert rep.derived["final_h_coefficient"] == pytest.approx(K, abs=1e-9)
    assert rep.derived["final_h2_coefficient"] == pytest.approx(K, abs=1e-9)
    assert K == pytest.approx(1.17675, abs=1e-5)


def test_bbq_logical_positive_over_range():
    lo, hi = math.atan(1 / 3), math.atan(5)
    for theta in np.linspace(lo, hi, 18)[1:-1]:
        rep = G.bbq_logical_gadget(theta)
        assert_passes(rep)
        assert rep.derived["final_coefficient"] > 0
    with pytest.raises(ValueError):
        G.bbq_logical_gadget(hi + 0.01)


def test_bbq_pair_basis_is_spin1():
    V = G.bbq_pair_basis(math.pi / 3)
    from gadgetforge.gadgets import _total_spin

    Sz, _ = _total_spin(2, 3, [0, 1])
    assert np.allclose(np.diag(V.conj().T @ Sz @ V).real, [1, 0, -1])
    listed = G.antisymmetric_pair_basis()
    assert np.allclose(np.diag(listed.conj().T @ Sz @ listed).real, [1, -1, 0])


def test_three_eigenvalue_gadget():
    assert_passes(G.three_eigenvalue_gadget())
    with pytest.raises(ValueError):
        G.three_eigenvalue_gadget((0.5, -0.7, 0.1))


def test_representative_gadgets_satisfy_conditions():
    reps = G.representative_gadgets()
    assert sorted(reps) == [1, 2, 3, 4]
    for order, g in reps.items():
        assert g.order == order
        assert check_gadget_conditions(g).passed, check_gadget_conditions(g).failures()


def test_registry_defaults():
    for name in sorted(G.REGISTRY):
        if name in ("sud-coupling", "h-to-h2-interference"):
            continue
        rep = G.run_gadget(name)
        assert rep.passed, (name, rep.failures())
    with pytest.raises(KeyError):
        G.run_gadget("nope")
    with pytest.raises(ValueError):
        G.run_gadget("aklt-su3", d=2)


def test_report_json_is_serializable():
    import json

    rep = G.alt_sud_reduction_gadget(2, 1.0)
    js = rep.to_json()
    json.dumps(js)
    assert js["pass"] and "effective" in js
    assert "effective" not in rep.to_json(matrices=False)


def test_pauli_coefficients_round_trip(rng):
    M = sum(rng.normal() * np.kron(G.PAULI[a], G.PAULI[b]) for a in "IXYZ" for b in "IXYZ")
    c = G.pauli_coefficients(M)
    back = sum(c[a + b] * np.kron(G.PAULI[a], G.PAULI[b]) for a in "IXYZ" for b in "IXYZ")
    assert np.allclose(back, M)


def test_spin1_logical_basis_rejects_non_multiplet():
    h = heisenberg_su2(3).matrix
    from gadgetforge.gadgets import _total_spin

    Sz, Sm = _total_spin(2, 3, [0, 1])
    ev, vec = np.linalg.eigh(h)
    with pytest.raises(ValueError):
        G.spin1_logical_basis(vec[:, -3:], Sz, Sm)
