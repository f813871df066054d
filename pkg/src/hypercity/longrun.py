"""Long-run monocentric residential equilibrium coupled to the short-run bathtub cost.

Suburban density follows from equal utility against the x = 0 location:

    N_s(x) = (1/mu) y_s(x)^((1-mu)/mu) y_s(0)^(-1/mu) (r_s(0) + r_A) A_s(x)

which also satisfies land clearing a_s(x) N_s(x) = A_s(x) at every x.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import adaptive_simpson, bisect, damped_fixed_point, expand_upper
from .params import (AvEffects, CityParameters, EffectiveParameters, ParameterError,
                     SolverError, apply_av_effects)
from .perimeter import solve_perimeter
from .shortrun import solve_shortrun

RENT_FLOOR = 1e-9
RENT_RTOL = 1e-10
POP_XTOL = 1e-8
QUAD_TOL = 1e-9


@dataclass(frozen=True)
class Mode:
    """Short-run regime: user equilibrium or perimeter control at bias ``epsilon``."""

    kind: str = "UE"
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("UE", "perimeter"):
            raise ParameterError(f"mode must be 'UE' or 'perimeter', got {self.kind!r}")
        if self.kind == "perimeter" and not 0.0 < self.epsilon < 2.0:
            raise ParameterError(f"epsilon must lie in (0, 2), got {self.epsilon!r}")

    @classmethod
    def ue(cls) -> "Mode":
        return cls("UE")

    @classmethod
    def perimeter(cls, epsilon: float = 1.0) -> "Mode":
        return cls("perimeter", epsilon)

    @property
    def label(self) -> str:
        return "UE" if self.kind == "UE" else f"perimeter({self.epsilon:g})"

    def bathtub_cost(self, N_s: float, p: EffectiveParameters) -> float:
        if self.kind == "UE":
            return solve_shortrun(N_s, p).cost
        return solve_perimeter(N_s, p, self.epsilon).cost


class RentLevel(NamedTuple):
    r_s0: float
    N_d: float
    N_s_total: float
    x_f: float


@dataclass(frozen=True)
class LandUseEquilibrium:
    N_d: float
    N_s_total: float
    r_s0: float
    r_d: float
    x_f: float
    U_star: float
    C_bathtub: float
    mode: str
    z_d: float
    z_s0: float


@dataclass(frozen=True)
class SpatialProfile:
    x: np.ndarray
    rent: np.ndarray
    density: np.ndarray
    lot_size: np.ndarray
    net_income: np.ndarray

    columns = ("x", "rent", "density", "lot_size", "net_income")

    def rows(self):
        for i in range(len(self.x)):
            yield (self.x[i], self.rent[i], self.density[i], self.lot_size[i], self.net_income[i])


def indirect_utility(y: float, r: float, mu: float) -> float:
    """Cobb-Douglas indirect utility at net income ``y`` and land rent ``r``."""
    if not y > 0:
        raise ParameterError(f"net income must be positive, got {y!r}")
    if not r > 0:
        raise ParameterError(f"rent must be positive, got {r!r}")
    return (1.0 - mu) ** (1.0 - mu) * mu**mu * y * r ** (-mu)


def _net_income_at_cbd(C: float, p: CityParameters) -> float:
    y0 = p.w - C
    if not y0 > 0:
        raise ParameterError(f"commuting cost {C!r} leaves no income (w = {p.w})")
    return y0


def suburban_net_income(x: float, C: float, p: EffectiveParameters) -> float:
    return p.w - C - p.alpha_car * p.tau * x


def downtown_population(r_s0: float, C: float, p: EffectiveParameters) -> float:
    y0 = _net_income_at_cbd(C, p)
    mu = p.mu
    return (1.0 / mu) * p.y_d ** ((1.0 - mu) / mu) * y0 ** (-1.0 / mu) * (r_s0 + p.r_A) * p.A_d


def city_boundary(r_s0: float, C: float, p: EffectiveParameters) -> float:
    if not r_s0 >= 0:
        raise ParameterError(f"r_s0 must be nonnegative, got {r_s0!r}")
    y0 = _net_income_at_cbd(C, p)
    mu = p.mu
    return y0 / (p.alpha_car * p.tau) * (p.r_A ** (-mu) - (r_s0 + p.r_A) ** (-mu)) * p.r_A**mu


def suburban_density(x: float, r_s0: float, C: float, p: EffectiveParameters) -> float:
    """Suburban residents per unit distance at ``x`` (zero beyond the city boundary)."""
    if x < 0 or x > city_boundary(r_s0, C, p):
        return 0.0
    y0 = _net_income_at_cbd(C, p)
    y = suburban_net_income(x, C, p)
    mu = p.mu
    return ((1.0 / mu) * y ** ((1.0 - mu) / mu) * y0 ** (-1.0 / mu)
            * (r_s0 + p.r_A) * p.land_supply(x))


def suburban_rent(x: float, r_s0: float, C: float, p: EffectiveParameters) -> float:
    """Total land rent r_s(x) + r_A implied by equal utility with x = 0."""
    y0 = _net_income_at_cbd(C, p)
    y = suburban_net_income(x, C, p)
    return (r_s0 + p.r_A) * (y / y0) ** (1.0 / p.mu)


def suburban_population(r_s0: float, C: float, p: EffectiveParameters,
                        tol: float = QUAD_TOL) -> float:
    x_f = city_boundary(r_s0, C, p)
    if x_f <= 0:
        return 0.0
    y0 = _net_income_at_cbd(C, p)
    mu = p.mu
    scale = (1.0 / mu) * y0 ** (-1.0 / mu) * (r_s0 + p.r_A)
    slope = p.alpha_car * p.tau
    expo = (1.0 - mu) / mu
    integrand = lambda x: (y0 - slope * x) ** expo * p.land_supply(x)
    return scale * adaptive_simpson(integrand, 0.0, x_f, tol / max(scale, 1e-300))


def solve_rent_level(C: float, p: EffectiveParameters) -> RentLevel:
    """Find r_s(0) such that downtown plus suburban residents add up to N."""
    _net_income_at_cbd(C, p)

    def excess(r: float) -> float:
        return downtown_population(r, C, p) + suburban_population(r, C, p) - p.N

    if excess(RENT_FLOOR) >= 0:
        raise SolverError(
            f"downtown alone houses the whole population at cost {C:g}; no suburb forms"
        )
    hi = expand_upper(excess, max(1.0, p.r_A), sign=1.0)
    r_s0 = bisect(excess, RENT_FLOOR, hi, xtol=0.0, rtol=RENT_RTOL)
    N_d = downtown_population(r_s0, C, p)
    return RentLevel(r_s0=r_s0, N_d=N_d, N_s_total=p.N - N_d, x_f=city_boundary(r_s0, C, p))


def _suburban_supply(N_s: float, p: EffectiveParameters, mode: Mode) -> float:
    """Suburban total implied by the commuting cost that N_s commuters generate."""
    C = mode.bathtub_cost(N_s, p)
    if C >= p.w:
        return 0.0
    try:
        return solve_rent_level(C, p).N_s_total
    except SolverError:
        return 0.0


def solve_longrun(params: CityParameters, av: AvEffects | None = None,
                  mode: Mode | None = None) -> LandUseEquilibrium:
    mode = mode or Mode.ue()
    p = apply_av_effects(params, av)
    return solve_longrun_effective(p, mode)


def solve_longrun_effective(p: EffectiveParameters, mode: Mode) -> LandUseEquilibrium:
    h = lambda n: _suburban_supply(n, p, mode) - n
    lo, hi = POP_XTOL, p.N - POP_XTOL
    if h(lo) > 0 and h(hi) < 0:
        N_s = bisect(h, lo, hi, xtol=POP_XTOL)
    else:
        try:
            N_s = damped_fixed_point(lambda n: _suburban_supply(n, p, mode), 0.5 * p.N,
                                     damping=0.5, tol=POP_XTOL)
        except SolverError as exc:
            raise SolverError(f"no interior long-run equilibrium ({mode.label})") from exc
        if not 0.0 < N_s < p.N:
            raise SolverError(f"no interior long-run equilibrium ({mode.label})")
    C = mode.bathtub_cost(N_s, p)
    if C >= p.w:
        raise SolverError(f"commuting cost {C:g} exceeds income ({mode.label})")
    level = solve_rent_level(C, p)
    return assemble(level, C, p, mode)


def assemble(level: RentLevel, C: float, p: EffectiveParameters, mode: Mode) -> LandUseEquilibrium:
    y0 = p.w - C
    rent_d = (level.r_s0 + p.r_A) * (p.y_d / y0) ** (1.0 / p.mu)
    return LandUseEquilibrium(
        N_d=level.N_d,
        N_s_total=level.N_s_total,
        r_s0=level.r_s0,
        r_d=rent_d - p.r_A,
        x_f=level.x_f,
        U_star=indirect_utility(p.y_d, rent_d, p.mu),
        C_bathtub=C,
        mode=mode.label,
        z_d=(1.0 - p.mu) * p.y_d,
        z_s0=(1.0 - p.mu) * y0,
    )


def spatial_profile(eq: LandUseEquilibrium, p: EffectiveParameters,
                    grid_size: int = 201) -> SpatialProfile:
    x = np.linspace(0.0, eq.x_f, grid_size)
    y = p.w - eq.C_bathtub - p.alpha_car * p.tau * x
    rent = (eq.r_s0 + p.r_A) * (y / (p.w - eq.C_bathtub)) ** (1.0 / p.mu)
    density = np.array([suburban_density(xi, eq.r_s0, eq.C_bathtub, p) for xi in x])
    return SpatialProfile(x=x, rent=rent, density=density, lot_size=p.mu * y / rent, net_income=y)


def rent_gradient(profile: SpatialProfile, p: EffectiveParameters) -> np.ndarray:
    return -p.alpha_car * p.tau * profile.rent / (p.mu * profile.net_income)


def density_gradient(profile: SpatialProfile, p: EffectiveParameters) -> np.ndarray:
    """Slope of residents per unit land, N_s(x) / A_s(x)."""
    return (-p.alpha_car * p.tau * (1.0 - p.mu) * profile.rent
            / (p.mu * profile.net_income) ** 2)


def gradient_checks(profile: SpatialProfile, p: EffectiveParameters) -> dict:
    """Compare centered finite-difference slopes with the analytic gradients."""
    x = profile.x
    per_land = profile.density / np.array([p.land_supply(xi) for xi in x])
    fd_rent = np.gradient(profile.rent, x, edge_order=2)
    fd_density = np.gradient(per_land, x, edge_order=2)
    an_rent = rent_gradient(profile, p)
    an_density = density_gradient(profile, p)
    rel = lambda fd, an: float(np.max(np.abs(fd - an) / np.abs(an)))
    return {
        "max_rel_error_rent": rel(fd_rent, an_rent),
        "max_rel_error_density": rel(fd_density, an_density),
        "rent_gradient_negative": bool(np.all(an_rent < 0)),
        "density_gradient_negative": bool(np.all(an_density < 0)),
    }
