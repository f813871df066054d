"""City parameters, autonomous-vehicle effects and Greenshields bathtub primitives.

Units: hours, miles, vehicles/persons, currency. Downtown commuters walk, so
only car-related time costs are scaled by the value-of-time multiplier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Union

LandProfile = Union[float, Callable[[float], float]]


class ParameterError(ValueError):
    """Raised when an input violates a model bound."""


class SolverError(RuntimeError):
    """Raised when an equilibrium cannot be located."""


@dataclass(frozen=True)
class CityParameters:
    v_f: float = 20.0
    n_j: float = 100.0
    L: float = 5.0
    T_d: float = 1.0 / 12.0
    alpha: float = 20.0
    beta: float = 10.0
    gamma: float = 40.0
    t_star: float = 0.0
    w: float = 60.0
    r_A: float = 30.0
    mu: float = 0.25
    A_d: float = 2.0
    A_s: LandProfile = 1.0
    N: float = 600.0

    def __post_init__(self) -> None:
        positive = ("v_f", "n_j", "L", "alpha", "beta", "gamma", "w", "r_A", "A_d", "N")
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        if self.T_d < 0:
            raise ParameterError(f"T_d must be nonnegative, got {self.T_d!r}")
        if not 0.0 < self.mu < 1.0:
            raise ParameterError(f"mu must lie in (0, 1), got {self.mu!r}")
        if not self.beta < self.alpha:
            raise ParameterError(f"beta < alpha required, got beta={self.beta}, alpha={self.alpha}")
        if not callable(self.A_s) and not self.A_s > 0:
            raise ParameterError(f"A_s must be positive, got {self.A_s!r}")

    @property
    def tau(self) -> float:
        """Suburban free-flow travel time per mile."""
        return 1.0 / self.v_f

    @property
    def y_d(self) -> float:
        """Income net of the (walking) downtown commuting cost."""
        return self.w - self.alpha * self.T_d

    def land_supply(self, x: float) -> float:
        if callable(self.A_s):
            value = float(self.A_s(x))
            if not value > 0:
                raise ParameterError(f"A_s({x}) must be positive, got {value}")
            return value
        return float(self.A_s)

    @property
    def constant_land(self) -> bool:
        return not callable(self.A_s)


@dataclass(frozen=True)
class AvEffects:
    eta: float = 1.0
    xi: float = 1.0

    def __post_init__(self) -> None:
        if not self.xi >= 1.0:
            raise ParameterError(f"xi must be >= 1, got {self.xi!r}")
        if not 0.0 < self.eta <= 1.0:
            raise ParameterError(f"eta must lie in (beta/alpha, 1], got {self.eta!r}")


@dataclass(frozen=True)
class EffectiveParameters(CityParameters):
    """City parameters after autonomous-vehicle effects.

    ``alpha_car`` prices in-vehicle, queueing and suburban driving time;
    ``alpha`` (== ``alpha_walk``) keeps pricing the downtown walking trip.
    """

    alpha_car: float = field(default=math.nan)
    n_j_eff: float = field(default=math.nan)
    eta: float = 1.0
    xi: float = 1.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if math.isnan(self.alpha_car):
            object.__setattr__(self, "alpha_car", self.eta * self.alpha)
        if math.isnan(self.n_j_eff):
            object.__setattr__(self, "n_j_eff", self.xi * self.n_j)
        if not self.alpha_car > self.beta:
            raise ParameterError(
                f"car value of time must exceed beta, got alpha_car={self.alpha_car}"
            )
        if not self.n_j_eff > 0:
            raise ParameterError(f"n_j_eff must be positive, got {self.n_j_eff}")

    @property
    def alpha_walk(self) -> float:
        return self.alpha

    @property
    def free_flow_cost(self) -> float:
        """Bathtub cost of a trip through an empty downtown, alpha_car * L / v_f."""
        return self.alpha_car * self.L / self.v_f

    @property
    def capacity(self) -> float:
        """Maximum network exit rate n_j_eff * v_f / (4 L)."""
        return self.n_j_eff * self.v_f / (4.0 * self.L)

    @property
    def schedule_weight(self) -> float:
        """alpha_car * n_j_eff * (1/beta + 1/gamma), the scale of every demand identity."""
        return self.alpha_car * self.n_j_eff * (1.0 / self.beta + 1.0 / self.gamma)

    def with_overrides(self, **changes: float) -> "EffectiveParameters":
        return replace(self, **changes)


def base_fields(params: CityParameters) -> dict:
    names = [f.name for f in fields(CityParameters)]
    return {name: getattr(params, name) for name in names}


def apply_av_effects(params: CityParameters, av: AvEffects | None = None) -> EffectiveParameters:
    av = av or AvEffects()
    lower = params.beta / params.alpha
    if not av.eta > lower:
        raise ParameterError(f"eta must exceed beta/alpha = {lower:g}, got {av.eta!r}")
    if not av.xi >= 1.0:
        raise ParameterError(f"xi must be >= 1, got {av.xi!r}")
    return EffectiveParameters(
        **base_fields(params),
        alpha_car=av.eta * params.alpha,
        n_j_eff=av.xi * params.n_j,
        eta=av.eta,
        xi=av.xi,
    )


def _check_accumulation(n: float, p: EffectiveParameters) -> None:
    if not 0.0 <= n <= p.n_j_eff:
        raise ParameterError(f"accumulation {n!r} outside [0, {p.n_j_eff}]")


def speed(n: float, p: EffectiveParameters) -> float:
    """Greenshields space-mean speed."""
    _check_accumulation(n, p)
    return p.v_f * (1.0 - n / p.n_j_eff)


def nef(n: float, p: EffectiveParameters) -> float:
    """Network exit function n * v(n) / L (vehicles per hour)."""
    return n * speed(n, p) / p.L


def travel_time(n: float, p: EffectiveParameters) -> float:
    _check_accumulation(n, p)
    if n >= p.n_j_eff:
        raise ParameterError("travel time is infinite at jam accumulation")
    return p.L / speed(n, p)


def schedule_delay(t: float, p: CityParameters) -> float:
    if t <= p.t_star:
        return p.beta * (p.t_star - t)
    return p.gamma * (t - p.t_star)
