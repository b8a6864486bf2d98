import math

import numpy as np
import pytest
from scipy.constants import hbar, k as k_b

from steersim import matkit
from steersim.errors import MismatchedMechanicalFrequencies, NoConvergence
from steersim.model import (
    CavityParams,
    NormalizedParams,
    PhysicalParams,
    SteadyState,
    build_diffusion,
    build_drift,
    effective_coupling,
    mean_field_residual,
    mean_fields,
    normalize,
    solve_steady_state,
    steady_state_residuals,
    temperature_for_occupation,
    thermal_occupation,
)

TWO_PI = 2 * math.pi
WM = TWO_PI * 947e3
KAPPA = TWO_PI * 215e3
GAMMA = TWO_PI * 140.0


def cavity(power=0.0, temperature=0.0, omega_l=TWO_PI * 2.82e14, **kw):
    values = dict(
        length=25e-3, kappa=KAPPA, omega_c=TWO_PI * 5.26e14, omega_l=omega_l,
        power=power, mass=145e-12, omega_m=WM, gamma=GAMMA, temperature=temperature,
    )
    values.update(kw)
    return CavityParams(**values)


def physical(p1=0.0, p2=0.0, zeta=0.05 * WM, **kw):
    return PhysicalParams(cavity(p1, **kw), cavity(p2, **kw), zeta)


# thermal occupation

def test_occupation_zero_temperature():
    assert thermal_occupation(WM, 0.0) == 0.0


def test_occupation_round_trip():
    T = temperature_for_occupation(WM, 25.0)
    # closed-form inversion of the Bose formula, computed independently
    assert T == pytest.approx(hbar * WM / (k_b * math.log(1 + 1 / 25)), rel=1e-14)
    assert T == pytest.approx(1.16e-3, rel=0.01)
    assert thermal_occupation(WM, T) == pytest.approx(25.0, rel=1e-12)


def test_occupation_rayleigh_jeans():
    n = thermal_occupation(WM, 300.0)
    rj = k_b * 300.0 / (hbar * WM)
    assert abs(n - rj) / rj < 1e-4


def test_occupation_series_branch_continuous():
    # x = hbar w / kT straddling the 1e-6 switch
    for x in (0.9e-6, 1.1e-6):
        T = hbar * WM / (k_b * x)
        exact = 1.0 / x - 0.5 + x / 12
        assert thermal_occupation(WM, T) == pytest.approx(exact, rel=1e-9)


def test_occupation_rejects_bad_input():
    with pytest.raises(ValueError):
        thermal_occupation(0.0, 1.0)
    with pytest.raises(ValueError):
        thermal_occupation(WM, -1.0)


# parameters

def test_low_quality_factor_warns():
    with pytest.warns(UserWarning, match="mechanical Q"):
        cavity(gamma=WM / 10)


def test_invalid_cavity_values():
    with pytest.raises(ValueError):
        cavity(length=0.0)
    with pytest.raises(ValueError):
        cavity(power=-1.0)


def test_normalized_params_validation():
    with pytest.raises(ValueError):
        NormalizedParams.symmetric(-1, -0.1, 0.1, 0.2, 1e-4, 0.05, 25)
    with pytest.raises(ValueError):
        NormalizedParams.symmetric(-1, 0.1, 0.1, 0.2, 1e-4, 0.05, float("nan"))


# steady state

def test_undriven_steady_state():
    p = physical()
    s = solve_steady_state(p)
    assert s.alpha == (0, 0)
    assert s.q == (0.0, 0.0)
    assert s.p == (0.0, 0.0)
    assert s.delta == (p.cavity1.bare_detuning, p.cavity2.bare_detuning)


def test_single_cavity_reduction():
    # zeta = 0 with identical cavities: |a|^2 = E^2 / (kappa^2 + Delta^2)
    p = PhysicalParams(cavity(1e-3, omega_l=TWO_PI * (5.26e14 + 947e3)),
                       cavity(1e-3, omega_l=TWO_PI * (5.26e14 + 947e3)), 0.0)
    s = solve_steady_state(p)
    E = p.cavity1.drive_amplitude
    for j in (0, 1):
        assert abs(s.alpha[j]) ** 2 == pytest.approx(E**2 / (KAPPA**2 + s.delta[j] ** 2), rel=1e-12)


def _power_for_coupling(target, **kw):
    """Drive power giving G = target (rad/s), found from the sqrt(power) scaling at fixed detuning."""
    p = physical(1.0, 1.0, **kw)
    s0 = SteadyState(alpha=(0, 0), q=(0, 0), delta=(p.cavity1.bare_detuning, p.cavity2.bare_detuning),
                     drive=(0, 0), g0=(0, 0), iterations=0, step=0.0)
    return (target / effective_coupling(p, s0, 1)) ** 2


def test_experimental_parameters_converge():
    power = _power_for_coupling(0.5 * WM)
    p = physical(power, power)
    s = solve_steady_state(p)
    for r_delta, r_q in steady_state_residuals(p, s):
        assert r_delta <= 1e-9
        assert r_q <= 1e-9
    assert max(mean_field_residual(p, s)) <= 1e-9
    assert effective_coupling(p, s, 1) / WM == pytest.approx(0.5, rel=1e-3)


def test_blue_detuned_drive_converges_with_shift():
    # realistic detuning (laser one mechanical frequency above the cavity): shift is not negligible
    kw = dict(omega_l=TWO_PI * (5.26e14 + 947e3))
    power = _power_for_coupling(0.3 * WM, **kw)
    p = physical(power, power, **kw)
    s = solve_steady_state(p)
    shift = s.delta[0] - p.cavity1.bare_detuning
    assert abs(shift) > 1e-3 * WM
    for r_delta, r_q in steady_state_residuals(p, s):
        assert r_delta <= 1e-9 and r_q <= 1e-9
    assert max(mean_field_residual(p, s)) <= 1e-9


def test_asymmetric_drives_closed_form_is_approximate():
    # unequal drives: the closed form drops the cross-drive term of the coupled mode equations
    p = physical(1e-3, 4e-3, omega_l=TWO_PI * (5.26e14 + 947e3))
    s = solve_steady_state(p)
    for r_delta, r_q in steady_state_residuals(p, s):
        assert r_delta <= 1e-9 and r_q <= 1e-9
    assert max(mean_field_residual(p, s)) > 1e-3


def test_runaway_reports_no_convergence(monkeypatch):
    monkeypatch.setattr("steersim.model.FIXED_POINT_MAX_ITER", 3)
    kw = dict(omega_l=TWO_PI * (5.26e14 + 947e3))
    power = _power_for_coupling(0.3 * WM, **kw)
    with pytest.raises(NoConvergence):
        solve_steady_state(physical(power, power, **kw))


# effective coupling

def test_coupling_zero_power():
    p = physical(0.0, 1e-3)
    s = solve_steady_state(p)
    assert effective_coupling(p, s, 1) == 0.0
    assert effective_coupling(p, s, 2) > 0.0


def test_coupling_zeta_zero_reduction():
    c = cavity(2e-3)
    p = PhysicalParams(c, c, 0.0)
    delta = -0.8 * WM
    s = SteadyState(alpha=(0, 0), q=(0, 0), delta=(delta, delta), drive=(0, 0), g0=(0, 0),
                    iterations=0, step=0.0)
    expected = 2 * c.omega_c / c.length * math.sqrt(
        c.kappa * c.power / (c.mass * c.omega_m * c.omega_l * (c.kappa**2 + delta**2))
    )
    assert effective_coupling(p, s, 1) == pytest.approx(expected, rel=1e-12)


def test_coupling_scales_as_sqrt_power():
    s = SteadyState(alpha=(0, 0), q=(0, 0), delta=(-WM, -WM), drive=(0, 0), g0=(0, 0),
                    iterations=0, step=0.0)
    g_a = effective_coupling(physical(1e-3, 1e-3), s, 1)
    g_b = effective_coupling(physical(2e-3, 1e-3), s, 1)
    assert g_b / g_a == pytest.approx(math.sqrt(2), rel=1e-12)


def test_coupling_matches_mean_field():
    kw = dict(omega_l=TWO_PI * (5.26e14 + 947e3))
    for target in (0.1, 0.3, 0.5):
        power = _power_for_coupling(target * WM, **kw)
        for p in (physical(power, power, **kw), physical(power, 0.25 * power, **kw)):
            s = solve_steady_state(p)
            for j in (1, 2):
                direct = math.sqrt(2) * p.cavity(j).single_photon_coupling * abs(s.alpha[j - 1])
                assert effective_coupling(p, s, j) == pytest.approx(direct, rel=1e-9)


def test_mean_fields_formula_symmetric_case():
    # kappa1 = kappa2 and E1 = E2: the closed form solves the coupled equations exactly
    p = physical(1e-3, 1e-3)
    d1, d2 = -0.9 * WM, -1.1 * WM
    a1, a2 = mean_fields(p, d1, d2)
    E = p.cavity1.drive_amplitude
    M = np.array([[KAPPA + 1j * d1, 1j * p.zeta], [1j * p.zeta, KAPPA + 1j * d2]])
    ref = np.linalg.solve(M, [E, E])
    np.testing.assert_allclose([a1, a2], ref, rtol=1e-12)


# drift and diffusion

def params(**kw):
    base = dict(delta=-1.0, g1=0.6, g2=0.3, kappa=215 / 947, gamma=140 / 947000, zeta=0.05, nth=25.0)
    base.update(kw)
    return NormalizedParams.symmetric(**base)


def test_drift_decoupled_blocks():
    p = params(g1=0.0, g2=0.0, zeta=0.0)
    K = build_drift(p)
    mech = np.array([[0.0, 1.0], [-1.0, -p.gamma1]])
    opt = np.array([[-p.kappa1, p.delta1], [-p.delta1, -p.kappa1]])
    expected = np.zeros((8, 8))
    for i, blk in enumerate((mech, mech, opt, opt)):
        expected[2 * i:2 * i + 2, 2 * i:2 * i + 2] = blk
    np.testing.assert_array_equal(K, expected)


def test_drift_mechanical_momentum_row():
    p = params()
    np.testing.assert_array_equal(build_drift(p)[1], [-1.0, -p.gamma1, 0, 0, p.g1, 0, 0, 0])


def test_drift_optical_rows():
    p = NormalizedParams(delta1=-1.1, delta2=-0.9, g1=0.6, g2=0.3, kappa1=0.2, kappa2=0.25,
                         gamma1=1e-4, gamma2=2e-4, zeta=0.05, nth1=1, nth2=2)
    K = build_drift(p)
    np.testing.assert_array_equal(K[4], [0, 0, 0, 0, -0.2, -1.1, 0, 0.05])
    np.testing.assert_array_equal(K[5], [0.6, 0, 0, 0, 1.1, -0.2, -0.05, 0])
    np.testing.assert_array_equal(K[6], [0, 0, 0, 0, 0, 0.05, -0.25, -0.9])
    np.testing.assert_array_equal(K[7], [0, 0, 0.3, 0, -0.05, 0, 0.9, -0.25])


def test_drift_optical_rows_from_mode_equation():
    # quadrature form of d a/dt = -(kappa + i Delta) a + i G/sqrt2 q - i zeta a_other
    p = params(delta=-0.7)
    K = build_drift(p)
    rng = np.random.default_rng(1)
    u = rng.normal(size=8)
    a1 = (u[4] + 1j * u[5]) / np.sqrt(2)
    a2 = (u[6] + 1j * u[7]) / np.sqrt(2)
    da1 = -(p.kappa1 + 1j * p.delta1) * a1 + 1j * p.g1 / np.sqrt(2) * u[0] - 1j * p.zeta * a2
    du = K @ u
    assert du[4] == pytest.approx(np.sqrt(2) * da1.real, abs=1e-14)
    assert du[5] == pytest.approx(np.sqrt(2) * da1.imag, abs=1e-14)


def test_drift_sparsity_pattern():
    # 1 + 3 + 1 + 3 mechanical, 3 + 4 + 3 + 4 optical
    p = NormalizedParams(delta1=-1.1, delta2=-0.9, g1=0.6, g2=0.3, kappa1=0.2, kappa2=0.25,
                         gamma1=1e-4, gamma2=2e-4, zeta=0.05, nth1=1, nth2=2)
    assert np.count_nonzero(build_drift(p)) == 22


def test_drift_trace():
    p = NormalizedParams(delta1=-1.1, delta2=-0.9, g1=0.6, g2=0.3, kappa1=0.2, kappa2=0.25,
                         gamma1=1e-4, gamma2=2e-4, zeta=0.05, nth1=1, nth2=2)
    assert np.trace(build_drift(p)) == pytest.approx(-(1e-4 + 2e-4 + 0.4 + 0.5), abs=1e-12)


@pytest.mark.xfail(strict=True, reason="blue-detuned point is unstable; see acceptance criterion 5")
def test_drift_fig2_point_stable():
    assert matkit.spectral_abscissa(build_drift(params())) < 0


def test_diffusion_vacuum_baths():
    p = params(nth=0.0)
    np.testing.assert_array_equal(
        np.diag(build_diffusion(p)), [0, p.gamma1, 0, p.gamma2, p.kappa1, p.kappa1, p.kappa2, p.kappa2]
    )


def test_diffusion_thermal_entry():
    p = params(nth=25.0)
    D = build_diffusion(p)
    assert D[1, 1] == pytest.approx(51 * 140 / 947000, rel=1e-15)
    assert D[0, 0] == 0.0 and D[2, 2] == 0.0
    assert np.count_nonzero(D - np.diag(np.diag(D))) == 0
    assert np.linalg.eigvalsh(D)[0] >= 0


# normalization

def test_normalize_rates():
    p = physical(1e-3, 1e-3)
    n = normalize(p, solve_steady_state(p))
    assert n.kappa1 == pytest.approx(215 / 947, rel=1e-14)
    assert n.kappa1 == pytest.approx(0.22704, abs=1e-5)
    assert n.gamma1 == pytest.approx(1.4783e-4, rel=1e-4)
    assert n.zeta == pytest.approx(0.05, rel=1e-14)
    assert n.nth1 == 0.0


def test_normalize_thermal_occupation():
    T = temperature_for_occupation(WM, 25.0)
    p = physical(1e-3, 1e-3, temperature=T)
    n = normalize(p, solve_steady_state(p))
    assert n.nth1 == pytest.approx(25.0, rel=1e-12)


def test_normalize_mismatched_frequencies():
    p = PhysicalParams(cavity(1e-3), cavity(1e-3, omega_m=1.01 * WM), 0.05 * WM)
    with pytest.raises(MismatchedMechanicalFrequencies):
        normalize(p, solve_steady_state(p))
