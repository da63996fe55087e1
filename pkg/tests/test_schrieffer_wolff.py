import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gadgetforge.operators import random_hermitian, random_unitary, spectral_norm
from gadgetforge.schrieffer_wolff import (
    DEFAULT_SWEEP,
    GadgetInstance,
    GapWarning,
    GroundEnergyError,
    RankMismatchError,
    SweepRow,
    assemble_simulator,
    block_split,
    check_gadget_conditions,
    convergence_sweep,
    direct_rotation_reference,
    effective_series,
    exact_schrieffer_wolff,
    fit_slope,
    series_prediction,
    parse_delta_sweep,
    rebase_split,
)


def heavy_term(rng, dim=6, ground=2, energies=(1.0, 1.5, 2.0, 3.0)):
    U = random_unitary(dim, rng)
    return U @ np.diag([0.0] * ground + list(energies[: dim - ground])) @ U.conj().T


def order2_gadget(rng):
    H0 = heavy_term(rng)
    split = block_split(H0)
    P = split.P_minus
    H2 = random_hermitian(6, rng)
    H2 = H2 - P @ H2 @ P
    H1 = P @ random_hermitian(6, rng) @ P
    return GadgetInstance("toy-2", 2, split, {"H1": H1, "H2": H2})


def test_block_split_basics(rng):
    H0 = heavy_term(rng)
    s = block_split(H0)
    assert s.ground_dim == 2 and s.gap == pytest.approx(1.0)
    P, Q = s.P_minus, s.P_plus
    assert np.allclose(P + Q, np.eye(6))
    assert np.allclose(P @ Q, 0)
    assert np.allclose(H0 @ P, 0)
    assert np.allclose(s.H0_pinv @ H0, Q)


def test_block_split_requires_zero_ground_energy(rng):
    with pytest.raises(GroundEnergyError):
        block_split(heavy_term(rng) + 0.3 * np.eye(6))


def test_block_split_warns_on_small_gap(rng):
    with pytest.warns(GapWarning):
        s = block_split(heavy_term(rng, energies=(0.5, 1.0, 2.0, 3.0)))
    assert not s.gap_ok


def test_rebase_split_validates(rng):
    s = block_split(heavy_term(rng))
    R = random_unitary(2, rng)
    r = rebase_split(s, s.ground_basis @ R)
    assert np.allclose(r.P_minus, s.P_minus)
    with pytest.raises(ValueError):
        rebase_split(s, s.excited_basis[:, :2])
    with pytest.raises(ValueError):
        rebase_split(s, 2 * s.ground_basis)


@given(seed=st.integers(0, 10**6), delta=st.sampled_from([10.0, 1e2, 1e4]))
def test_exact_sw_agrees_with_direct_rotation(seed, delta):
    # two independent constructions of the same rotation
    rng = np.random.default_rng(seed)
    s = block_split(heavy_term(rng))
    A = random_hermitian(6, rng, norm=1.0)
    H = delta * s.H0 + A
    exact = exact_schrieffer_wolff(H, delta, s)
    ref, eta = direct_rotation_reference(H, delta, s)
    assert np.allclose(exact.H_eff, ref, atol=1e-9 * delta)
    assert exact.eta == pytest.approx(eta, abs=1e-9)
    # the effective block is isospectral with the low-energy part of H
    assert np.allclose(np.linalg.eigvalsh(exact.H_eff), np.linalg.eigvalsh(H)[:2], atol=1e-9 * delta)


def test_exact_sw_with_perturbation_matches_dense_route(rng):
    s = block_split(heavy_term(rng))
    A = random_hermitian(6, rng, norm=1.0)
    a = exact_schrieffer_wolff(None, 50.0, s, perturbation=A)
    b = exact_schrieffer_wolff(50.0 * s.H0 + A, 50.0, s)
    assert np.allclose(a.H_eff, b.H_eff, atol=1e-11)
    assert a.riccati_residual < 1e-12


def test_exact_sw_rank_mismatch(rng):
    s = block_split(heavy_term(rng))
    with pytest.raises(RankMismatchError):
        exact_schrieffer_wolff(0.1 * s.H0 + 10 * np.diag(np.arange(6.0)), 0.1, s)


def test_series_truncation_error_scales_with_order(rng):
    s = block_split(heavy_term(rng))
    A = random_hermitian(6, rng, norm=1.0)
    errs = {}
    for delta in (1e2, 1e3):
        exact = exact_schrieffer_wolff(None, delta, s, perturbation=A).H_eff
        ser = effective_series(s, H1=A, delta=delta, order=1)
        errs[delta] = [spectral_norm(exact - s.block(ser.total(k))) for k in (1, 2, 3, 4)]
    for k in range(4):
        ratio = errs[1e2][k] / errs[1e3][k]
        # truncating after k+1 terms leaves an error of order delta^-(k+1)
        assert 10 ** (k + 1) / 3 < ratio < 10 ** (k + 1) * 3


def test_effective_series_rejects_foreign_terms(rng):
    s = block_split(heavy_term(rng))
    with pytest.raises(ValueError):
        effective_series(s, H4=np.eye(6), order=2)


def test_second_order_gadget_conditions_and_limit(rng):
    g = order2_gadget(rng)
    rep = check_gadget_conditions(g)
    assert rep.passed, rep.failures()
    P, G = g.split.P_minus, g.split.H0_pinv
    expect = P @ (g.terms["H1"] - g.terms["H2"] @ G @ g.terms["H2"]) @ P
    assert np.allclose(series_prediction(g.split, g.terms, 2), expect)
    res = convergence_sweep(g, [1e2, 1e4, 1e6, 1e8])
    assert res.monotone
    assert res.slope == pytest.approx(-0.5, abs=0.05)


def test_conditions_detect_violation(rng):
    g = order2_gadget(rng)
    P = g.split.P_minus
    bad = GadgetInstance("bad", 2, g.split, {"H1": g.terms["H1"], "H2": g.terms["H2"] + P}, target=g.target)
    rep = check_gadget_conditions(bad)
    # G P = 0, so the prediction itself is unchanged
    assert rep.failures() == ["(H2)-- = 0"]
    with pytest.raises(ValueError):
        assemble_simulator(bad, 10.0)
    H = assemble_simulator(g, 10.0)
    assert np.allclose(H, 10 * g.H0 + np.sqrt(10) * g.terms["H2"] + g.terms["H1"])


def test_gadget_instance_validation(rng):
    s = block_split(heavy_term(rng))
    with pytest.raises(ValueError):
        GadgetInstance("x", 5, s, {})
    with pytest.raises(ValueError):
        GadgetInstance("x", 2, s, {"H4": np.eye(6)})
    with pytest.raises(ValueError):
        GadgetInstance("x", 1, s, {"H1": np.eye(3)})


def test_fourth_order_series_prediction_shape(rng):
    s = block_split(heavy_term(rng))
    P = s.P_minus
    H4 = random_hermitian(6, rng)
    H4 = H4 - P @ H4 @ P
    G = s.H0_pinv
    H2 = P @ H4 @ G @ H4 @ P
    H3 = -P @ H4 @ G @ H4 @ G @ H4 @ P
    g = GadgetInstance("toy-4", 4, s, {"H2": H2, "H3": H3, "H4": H4})
    assert check_gadget_conditions(g).passed


def test_parse_delta_sweep():
    assert DEFAULT_SWEEP == pytest.approx([10.0**k for k in range(2, 11)])
    assert parse_delta_sweep("1:100:3") == pytest.approx([1, 10, 100])
    with pytest.raises(ValueError):
        parse_delta_sweep("1:2")


def test_fit_slope_on_power_law():
    rows = [SweepRow(x, 3 * x**-0.5, 0.0, 0.0, True) for x in (1e2, 1e3, 1e4)]
    assert fit_slope(rows) == pytest.approx(-0.5)
    assert fit_slope(rows[:1]) is None


def test_sweep_records_rank_mismatch(rng):
    g = order2_gadget(rng)
    g.terms["H1"] = g.terms["H1"] + 50 * g.split.P_minus @ np.diag(np.arange(6.0)) @ g.split.P_minus
    res = convergence_sweep(g, [1.0, 1e6])
    assert not res.rows[0].rank_match and res.rows[0].eps is None
    assert res.rows[1].rank_match
    assert not res.monotone
    assert "mismatch" in res.table()
    with pytest.raises(ValueError):
        convergence_sweep(g, [10.0, 1.0])


def test_sweep_is_thread_independent(rng):
    g = order2_gadget(rng)
    a = convergence_sweep(g, [1e2, 1e3, 1e4], threads=1)
    b = convergence_sweep(g, [1e2, 1e3, 1e4], threads=3)
    assert a.to_json() == b.to_json()


def test_series_has_no_side_effect_warnings(rng):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s = block_split(heavy_term(rng))
        effective_series(s, H1=np.eye(6), delta=10.0, order=1)
