import math

import numpy as np
import pytest

from diskxray.geometry import FanBeam
from diskxray.quadrature import boundary_rule, default_orders
from diskxray.specfun import gegenbauer_norm_sq, ln_gamma
from diskxray.svdcore import (
    BoundaryMode,
    SpectrumTable,
    analyze,
    asym_envelope_check,
    funcrel_sigma_sq,
    funcrel_sigma_sq_beta,
    invert,
    psi_hat_values,
    psi_norm_sq,
    psi_regular_factor,
    range_defect,
    sigma,
    sigma_ratio,
    sigma_sq,
    sigma_sq_beta_form,
    sobolev_norm,
    synthesize,
    tame_bounds_check,
)
from diskxray.xray import Sinogram, forward
from diskxray.zernike import CoefficientField, G_hat_eval, ZernikeIndex, apply_L_gamma

GAMMA_GRID = [-0.9, -0.5, -0.1, 0.1, 1.0, 3.0]


def test_psi_regular_factor_values():
    for g in (-0.5, 0.0, 1.0):
        assert psi_regular_factor(BoundaryMode(0, 0, g), FanBeam(0.7, 0.2)) == pytest.approx(
            1.0 / (2.0 * math.pi), rel=1e-14
        )
        # L_1 vanishes at alpha = 0
        assert psi_regular_factor(BoundaryMode(1, 0, g), FanBeam(1.3, 0.0)) == pytest.approx(0.0, abs=1e-15)


def test_psi_regular_factor_phase_shift():
    n, k, g = 3, 1, 0.4
    delta = 0.63
    base = psi_regular_factor(BoundaryMode(n, k, g), FanBeam(0.2, 0.3))
    shifted = psi_regular_factor(BoundaryMode(n, k, g), FanBeam(0.2 + delta, 0.3))
    assert shifted == pytest.approx(base * np.exp(1j * (n - 2 * k) * delta), rel=1e-13)


def test_psi_norm_sq_closed_forms():
    assert psi_norm_sq(BoundaryMode(0, 0, 0.0)) == pytest.approx(0.25, rel=1e-13)
    assert psi_norm_sq(BoundaryMode(0, 0, -0.5)) == pytest.approx(1.0 / math.pi, rel=1e-13)
    for n in range(4):
        assert psi_norm_sq(BoundaryMode(n, 7, 0.8)) == pytest.approx(
            gegenbauer_norm_sq(n, 0.8) / (2 * math.pi), rel=1e-14
        )


@pytest.mark.parametrize("gamma", [-0.5, 0.3, 1.2])
def test_psi_norm_quadrature_oracle(gamma):
    rule = boundary_rule(gamma, 28, 14)
    beta, _ = rule.grids()
    s = rule.s_nodes[None, :]
    for n in range(11):
        from diskxray.svdcore import psi_values

        vals = psi_values(n, 2, gamma, beta, s)
        got = rule.pair(vals, vals)
        assert got == pytest.approx(psi_norm_sq(BoundaryMode(n, 2, gamma)), rel=1e-12)


def test_sigma_gamma_zero_closed_form():
    for n in range(101):
        for k in (0, n // 2, n):
            assert sigma_sq(n, k, 0.0) == pytest.approx(4.0 * math.pi / (n + 1.0), rel=1e-12)


def test_sigma_constant_mode_duplication_form():
    for g in (-0.5, 0.0, 0.7, 2.0):
        want = 2.0 * math.pi**1.5 * math.exp(ln_gamma(g + 1.0) - ln_gamma(g + 1.5))
        assert sigma_sq(0, 0, g) == pytest.approx(want, rel=1e-13)


def test_sigma_example_value():
    assert sigma_sq(1, 0, 1.0) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-13)


def test_sigma_is_norm_quotient():
    # the defining quotient ||G|| / ||psi|| ties together the leading
    # coefficients, both norm tables, and the closed-form sigma
    from diskxray.zernike import ZernikeIndex, g_leading_coeff, leading_coeff_p, zernike_norm_sq

    for g in (-0.9, -0.3, 0.0, 0.8, 2.5):
        for n in range(9):
            for k in range(n + 1):
                idx = ZernikeIndex(n, k, g)
                g_norm = abs(g_leading_coeff(idx) / leading_coeff_p(idx)) * math.sqrt(zernike_norm_sq(idx))
                quotient = g_norm / math.sqrt(psi_norm_sq(BoundaryMode(n, k, g)))
                assert quotient == pytest.approx(sigma(n, k, g), rel=1e-12)


def test_sigma_rejects_kernel_modes():
    with pytest.raises(ValueError):
        sigma(2, -1, 0.5)
    with pytest.raises(ValueError):
        sigma(2, 3, 0.5)


@pytest.mark.parametrize("gamma", GAMMA_GRID)
def test_sigma_two_forms_agree(gamma):
    for n in range(0, 51):
        for k in range(n + 1):
            a = sigma_sq(n, k, gamma)
            assert sigma_sq_beta_form(n, k, gamma) == pytest.approx(a, rel=1e-12)


def test_sigma_ratio():
    for n in range(1, 8):
        for k in range(n):
            assert sigma_ratio(n, k, 0.0) == pytest.approx(1.0, rel=1e-14)
    g = -0.4
    for n in range(2, 30):
        for k in range(n):
            r = sigma_ratio(n, k, g)
            direct = sigma_sq(n, k + 1, g) / sigma_sq(n, k, g)
            assert r == pytest.approx(direct, rel=1e-12)
            if k < (n - 1) / 2:
                assert r < 1.0
            elif k > (n - 1) / 2:
                assert r > 1.0
            else:
                assert r == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("gamma", GAMMA_GRID)
def test_sigma_symmetry_and_positivity(gamma):
    from diskxray.svdcore import sigma_sq_triangle

    table = sigma_sq_triangle(gamma, 300)
    for n in (0, 1, 7, 64, 300):
        row = table[n]
        assert np.all(row > 0.0)
        assert np.all(np.abs(row - row[::-1]) <= 1e-13 * row)  # element-wise relative


@pytest.mark.parametrize("gamma", GAMMA_GRID)
def test_sigma_monotonicity_pattern(gamma):
    from diskxray.svdcore import sigma_sq_triangle

    table = sigma_sq_triangle(gamma, 300)
    for n in range(2, 301, 13):
        row = table[n]
        ratios = row[1:] / row[:-1]
        for k, r in enumerate(ratios):
            if k < (n - 1) / 2:
                assert (r < 1.0) == (gamma < 0.0) or abs(r - 1.0) < 1e-13
            elif k > (n - 1) / 2:
                assert (r > 1.0) == (gamma < 0.0) or abs(r - 1.0) < 1e-13


@pytest.mark.parametrize("gamma", GAMMA_GRID)
def test_funcrel_equals_sigma_sq(gamma):
    for n in range(51):
        for k in range(n + 1):
            s2 = sigma_sq(n, k, gamma)
            assert funcrel_sigma_sq(n, k, gamma) == pytest.approx(s2, rel=1e-12)
            assert funcrel_sigma_sq_beta(n, k, gamma) == pytest.approx(s2, rel=1e-12)


def test_funcrel_constant_mode():
    assert funcrel_sigma_sq(0, 0, 0.0) == pytest.approx(4.0 * math.pi, rel=1e-13)


def test_asym_envelope_gamma_zero_is_4pi():
    rep = asym_envelope_check(0.0, 100)
    assert rep.extremizers_ok
    for band in (rep.lower_band, rep.upper_band):
        assert band[0] == pytest.approx(4.0 * math.pi, rel=1e-12)
        assert band[1] == pytest.approx(4.0 * math.pi, rel=1e-12)


@pytest.mark.parametrize("gamma", [-0.5, 1.0])
def test_asym_envelope_extremizers(gamma):
    rep = asym_envelope_check(gamma, 200)
    assert rep.extremizers_ok
    assert rep.lower_band[0] > 0.0 and rep.upper_band[0] > 0.0


def _spectral_rule(gamma, N):
    o = default_orders(N)
    return boundary_rule(gamma, o["beta_count"], o["s_order"])


def test_synthesize_delta_constant_mode():
    g = 0.0
    rule = _spectral_rule(g, 4)
    field = CoefficientField.delta(g, 4, 0, 0)
    sino = synthesize(field, rule)
    assert np.allclose(sino.values, 2.0 / math.sqrt(math.pi), rtol=1e-12)


def test_synthesize_linearity():
    g = 0.6
    rule = _spectral_rule(g, 5)
    rng = np.random.default_rng(2)
    f1 = CoefficientField.random(g, 5, rng)
    f2 = CoefficientField.random(g, 5, rng)
    combo = CoefficientField(g, 5, 2.0 * f1.coeffs - 1j * f2.coeffs)
    lhs = synthesize(combo, rule).values
    rhs = 2.0 * synthesize(f1, rule).values - 1j * synthesize(f2, rule).values
    assert np.abs(lhs - rhs).max() <= 1e-13 * max(1.0, np.abs(lhs).max())


def test_analyze_of_delta_sinogram():
    g = 0.5
    N = 6
    rule = _spectral_rule(g, N)
    field = CoefficientField.delta(g, N, 3, 1, 1.0)
    coeffs = analyze(synthesize(field, rule), N)
    for (n, k), a in coeffs.items():
        want = sigma(3, 1, g) if (n, k) == (3, 1) else 0.0
        assert abs(a - want) <= 1e-10


def test_analyze_zero_sinogram():
    g = 0.1
    rule = _spectral_rule(g, 4)
    sino = Sinogram(gamma=g, rule=rule, values=np.zeros(rule.shape))
    assert all(abs(a) == 0.0 for a in analyze(sino, 4).values())


def test_analyze_requires_resolution():
    g = 0.0
    rule = boundary_rule(g, 8, 4)
    sino = Sinogram(gamma=g, rule=rule, values=np.zeros(rule.shape))
    with pytest.raises(ValueError, match="need beta_count"):
        analyze(sino, 6)


@pytest.mark.parametrize("gamma", [-0.5, 0.0, 0.8])
def test_invert_synthesize_round_trip(gamma):
    N = 8
    rule = _spectral_rule(gamma, N)
    rng = np.random.default_rng(17)
    field = CoefficientField.random(gamma, N, rng)
    res = invert(synthesize(field, rule), N)
    assert np.abs(res.field.coeffs - field.coeffs).max() <= 1e-10
    assert res.defect <= 1e-10
    assert all(abs(v) <= 1e-10 for v in res.kernel.values())


def test_invert_synthesize_medium_degree():
    # no regularization is applied; polynomial sigma decay keeps N = 25
    # well-conditioned in double precision
    g, N = 0.5, 25
    rule = _spectral_rule(g, N)
    rng = np.random.default_rng(41)
    field = CoefficientField.random(g, N, rng)
    res = invert(synthesize(field, rule), N)
    assert np.abs(res.field.coeffs - field.coeffs).max() <= 1e-10


def test_invert_forward_of_basis():
    g = 0.4
    N = 5
    o = default_orders(N)
    rule = boundary_rule(g, o["beta_count"], o["s_order"])
    idx = ZernikeIndex(4, 2, g)
    sino = forward(lambda z: G_hat_eval(idx, z), g, rule, o["s_order"])
    res = invert(sino, N)
    want = CoefficientField.delta(g, N, 4, 2).coeffs
    assert np.abs(res.field.coeffs - want).max() <= 1e-9


def test_range_defect_of_forward_data():
    g = 0.2
    N = 6
    o = default_orders(N)
    rule = boundary_rule(g, o["beta_count"], o["s_order"])
    rng = np.random.default_rng(23)
    field = CoefficientField.random(g, N, rng)
    sino = forward(field.evaluate, g, rule, o["s_order"])
    assert range_defect(sino, N) <= 1e-10


def test_range_defect_detects_injected_kernel_mode():
    g = 0.2
    N = 5
    rule = _spectral_rule(g, N)
    beta, _ = rule.grids()
    s = rule.s_nodes[None, :]
    values = psi_hat_values(3, -1, g, beta, s)
    sino = Sinogram(gamma=g, rule=rule, values=values)
    assert range_defect(sino, N) == pytest.approx(1.0, abs=1e-10)
    assert range_defect(Sinogram(gamma=g, rule=rule, values=np.zeros(rule.shape)), N) == 0.0


def test_svd_consistency_triangle():
    g = -0.3
    N = 6
    o = default_orders(N)
    rule = boundary_rule(g, o["beta_count"], o["s_order"])
    beta, _ = rule.grids()
    s = rule.s_nodes[None, :]
    for n in range(N + 1):
        for k in range(n + 1):
            idx = ZernikeIndex(n, k, g)
            path_a = forward(lambda z: G_hat_eval(idx, z), g, rule, o["s_order"]).values
            path_b = synthesize(CoefficientField.delta(g, N, n, k), rule).values
            path_c = sigma(n, k, g) * psi_hat_values(n, k, g, beta, s)
            scale = np.abs(path_c).max()
            assert np.abs(path_a - path_b).max() <= 1e-10 * scale
            assert np.abs(path_b - path_c).max() <= 1e-10 * scale
            assert np.abs(path_a - path_c).max() <= 1e-10 * scale


def test_sobolev_norm():
    g = 0.5
    f = CoefficientField.delta(g, 4, 3, 1, 2.0)
    assert sobolev_norm(f, 0.0) == pytest.approx(math.sqrt(f.norm_sq()), rel=1e-14)
    assert sobolev_norm(CoefficientField.delta(g, 4, 3, 1), 2.0) == pytest.approx(
        (3 + 1 + g) ** 2, rel=1e-13
    )
    rng = np.random.default_rng(4)
    h = CoefficientField.random(g, 6, rng)
    for s in (0.0, 1.0, 2.5):
        assert sobolev_norm(apply_L_gamma(h), s) == pytest.approx(sobolev_norm(h, s + 2.0), rel=1e-12)
    with pytest.raises(ValueError):
        sobolev_norm(h, -1.0)


def test_tame_bounds_gamma_zero_equality():
    rep = tame_bounds_check(0.0, 40, 1.0)
    assert rep.ok
    assert rep.c_lower == pytest.approx(4.0 * math.pi, rel=1e-12)
    assert rep.c_upper == pytest.approx(4.0 * math.pi, rel=1e-12)


def test_tame_bounds_random_fields():
    rep = tame_bounds_check(1.0, 60, 2.5, trials=10, seed=3)
    assert rep.ok
    with pytest.raises(ValueError):
        tame_bounds_check(1.0, 20, 1.0)  # needs s >= 2 when gamma = 1


def test_spectrum_table_export(tmp_path):
    table = SpectrumTable.build(0.0, 2)
    path = tmp_path / "table.csv"
    table.write(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "n,k,sigma,sigma_sq"
    assert len(lines) == 1 + 6
    n, k, s, s2 = lines[1].split(",")
    assert (int(n), int(k)) == (0, 0)
    assert float(s2) == pytest.approx(4.0 * math.pi, rel=1e-15)
