import math

import numpy as np
import pytest
from scipy import integrate

import oracles
from hypercity import (AvEffects, CityParameters, Mode, ParameterError, SolverError,
                       apply_av_effects, solve_longrun, solve_rent_level, spatial_profile)
from hypercity.longrun import (city_boundary, downtown_population, gradient_checks,
                               indirect_utility, solve_longrun_effective, suburban_density,
                               suburban_population, suburban_rent)


@pytest.fixture(scope="module")
def base():
    return apply_av_effects(CityParameters())


@pytest.fixture(scope="module")
def base_eq(base):
    return solve_longrun_effective(base, Mode.ue())


def test_indirect_utility_constant_and_linearity():
    constant = math.exp(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    assert indirect_utility(1.0, 1.0, 0.25) == pytest.approx(constant, rel=1e-14)
    assert round(constant, 5) == 0.56988
    assert indirect_utility(2.0, 5.0, 0.25) == pytest.approx(2 * indirect_utility(1.0, 5.0, 0.25))
    assert indirect_utility(58.333, 2742.0, 0.25) == pytest.approx(4.594, abs=0.001)
    with pytest.raises(ParameterError):
        indirect_utility(0.0, 1.0, 0.25)
    with pytest.raises(ParameterError):
        indirect_utility(1.0, -1.0, 0.25)


def test_base_equilibrium_summary(base_eq):
    assert base_eq.N_s_total == pytest.approx(224.0, abs=0.5)
    assert base_eq.N_d == pytest.approx(376.0, abs=0.5)
    assert base_eq.C_bathtub == pytest.approx(27.8, abs=0.1)
    assert base_eq.U_star == pytest.approx(4.594, abs=0.005)
    assert 0 < base_eq.r_s0 < base_eq.r_d
    assert base_eq.mode == "UE"


def test_fixed_point_residual(base, base_eq):
    c = Mode.ue().bathtub_cost(base_eq.N_s_total, base)
    assert abs(c - base_eq.C_bathtub) < 1e-8


def test_rent_level_at_reference_cost(base):
    level = solve_rent_level(27.8, base)
    assert level.N_s_total == pytest.approx(224.0, abs=0.5)
    assert level.N_d + level.N_s_total == pytest.approx(600.0, abs=1e-6)


def test_population_quadrature_matches_quartic(base, base_eq):
    y0 = base.w - base_eq.C_bathtub
    ref = oracles.quartic_population(base_eq.r_s0, y0, base.alpha_car * base.tau, base.r_A)
    assert suburban_population(base_eq.r_s0, base_eq.C_bathtub, base) == pytest.approx(ref,
                                                                                       rel=1e-10)


def test_population_matches_scipy_for_varying_land():
    p = apply_av_effects(CityParameters(A_s=lambda x: 1.0 + 0.2 * np.sin(x)))
    C, r = 27.0, 200.0
    x_f = city_boundary(r, C, p)
    ref = integrate.quad(lambda x: suburban_density(x, r, C, p), 0.0, x_f, epsabs=1e-12)[0]
    assert suburban_population(r, C, p) == pytest.approx(ref, rel=1e-8)


def test_boundary_rent_is_agricultural(base, base_eq):
    assert suburban_rent(base_eq.x_f, base_eq.r_s0, base_eq.C_bathtub, base) == pytest.approx(
        base.r_A, rel=1e-10)
    assert city_boundary(0.0, 27.8, base) == 0.0
    assert suburban_density(base_eq.x_f + 1.0, base_eq.r_s0, base_eq.C_bathtub, base) == 0.0


def test_downtown_population_grows_with_rent(base):
    assert downtown_population(200.0, 27.8, base) > downtown_population(100.0, 27.8, base)


def test_profile_monotone_and_gradients(base, base_eq):
    prof = spatial_profile(base_eq, base, grid_size=1000)
    assert np.all(np.diff(prof.rent) < 0)
    assert np.all(np.diff(prof.density) < 0)
    assert prof.rent[-1] == pytest.approx(base.r_A)
    report = gradient_checks(prof, base)
    assert report["max_rel_error_rent"] < 1e-4
    assert report["max_rel_error_density"] < 1e-4
    assert report["rent_gradient_negative"] and report["density_gradient_negative"]


@pytest.mark.parametrize("eta, xi", [(1.0, 1.0), (0.59, 1.029), (0.76, 1.19)])
def test_invariants_hold_in_every_case(eta, xi):
    p = apply_av_effects(CityParameters(), AvEffects(eta, xi))
    for mode in (Mode.ue(), Mode.perimeter(1.0)):
        eq = solve_longrun_effective(p, mode)
        assert eq.N_d + eq.N_s_total == pytest.approx(p.N, abs=1e-6)
        y0 = p.w - eq.C_bathtub
        for x in np.linspace(0.0, eq.x_f, 50, endpoint=False):
            y = y0 - p.alpha_car * p.tau * x
            r = suburban_rent(x, eq.r_s0, eq.C_bathtub, p)
            assert oracles.utility(y, r, p.mu) == pytest.approx(eq.U_star, rel=1e-8)
            lot = p.mu * y / r
            assert lot * suburban_density(x, eq.r_s0, eq.C_bathtub, p) == pytest.approx(
                p.land_supply(x), rel=1e-8)
        lot_d = p.mu * p.y_d / (eq.r_d + p.r_A)
        assert lot_d * eq.N_d == pytest.approx(p.A_d, rel=1e-8)


@pytest.mark.parametrize("eta, xi", [(1.0, 1.0), (0.59, 1.029), (0.76, 1.19), (0.8, 1.3)])
def test_control_reduces_downtown_population(eta, xi):
    city, av = CityParameters(), AvEffects(eta, xi)
    assert (solve_longrun(city, av, Mode.perimeter()).N_d
            < solve_longrun(city, av, Mode.ue()).N_d)


def test_case_one_sprawl_paradox(base_eq):
    case1 = solve_longrun(CityParameters(), AvEffects(0.59, 1.029))
    assert case1.N_s_total < base_eq.N_s_total
    assert case1.x_f > base_eq.x_f


def test_unaffordable_commute_reported(base):
    with pytest.raises(ParameterError):
        solve_rent_level(61.0, base)


def test_no_interior_equilibrium_reported():
    # income barely covers the free-flow trip: nobody chooses the suburb
    city = CityParameters(w=6.0, T_d=0.0)
    with pytest.raises(SolverError):
        solve_longrun(city)


def test_mode_validation():
    with pytest.raises(ParameterError):
        Mode("toll")
    with pytest.raises(ParameterError):
        Mode.perimeter(2.5)
    assert Mode.perimeter(1.3).label == "perimeter(1.3)"
