"""No-control short-run bathtub equilibrium and its rush-hour trajectory."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .numerics import bisect, expand_upper
from .params import EffectiveParameters, ParameterError

THETA_FLOOR = 1.0 + 1e-12
THETA_TOL = 1e-10


@dataclass(frozen=True)
class BathtubEquilibrium:
    theta: float
    cost: float
    t_s: float
    t_e: float
    n_peak: float
    hypercongested: bool
    N_s: float


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    n: np.ndarray
    v: np.ndarray
    G: np.ndarray
    I: np.ndarray
    cum_arrivals: np.ndarray
    cost_t: np.ndarray

    columns = ("t", "n", "v", "G", "I", "cum_arrivals", "cost_t", "inflow_negative_flag")

    @property
    def inflow_negative(self) -> np.ndarray:
        return self.I < 0

    def rows(self):
        flags = self.inflow_negative.astype(int)
        for i in range(len(self.t)):
            yield (self.t[i], self.n[i], self.v[i], self.G[i], self.I[i],
                   self.cum_arrivals[i], self.cost_t[i], flags[i])


def residual_F(theta: float, N_s: float, p: EffectiveParameters) -> float:
    """Demand minus the number of commuters served when the normalized cost is ``theta``."""
    if not theta > 1.0:
        raise ParameterError(f"theta must exceed 1, got {theta!r}")
    return N_s - p.schedule_weight * (math.log(theta) + 1.0 / theta - 1.0)


def equilibrium_from_theta(theta: float, N_s: float, p: EffectiveParameters) -> BathtubEquilibrium:
    cost = theta * p.free_flow_cost
    excess = cost - p.free_flow_cost
    n_peak = p.n_j_eff * (1.0 - 1.0 / theta)
    return BathtubEquilibrium(
        theta=theta,
        cost=cost,
        t_s=p.t_star - excess / p.beta,
        t_e=p.t_star + excess / p.gamma,
        n_peak=n_peak,
        hypercongested=theta > 2.0,
        N_s=N_s,
    )


def solve_shortrun(N_s: float, p: EffectiveParameters) -> BathtubEquilibrium:
    if not N_s >= 0:
        raise ParameterError(f"N_s must be nonnegative, got {N_s!r}")
    if N_s == 0:
        return equilibrium_from_theta(1.0, 0.0, p)
    f = lambda th: residual_F(th, N_s, p)
    hi = expand_upper(f, 4.0, sign=-1.0)
    theta = bisect(f, THETA_FLOOR, hi, xtol=THETA_TOL)
    return equilibrium_from_theta(theta, N_s, p)


def _rates(p: EffectiveParameters) -> tuple[float, float]:
    scale = p.v_f / (p.alpha_car * p.L)
    return p.beta * scale, p.gamma * scale


def accumulation_at(t: float, eq: BathtubEquilibrium, p: EffectiveParameters) -> float:
    if t < eq.t_s or t > eq.t_e or eq.t_e <= eq.t_s:
        return 0.0
    early, late = _rates(p)
    if t <= p.t_star:
        u = 1.0 + early * (t - eq.t_s)
    else:
        u = 1.0 + late * (eq.t_e - t)
    return p.n_j_eff * (1.0 - 1.0 / u)


def _accumulation_and_slope(t: np.ndarray, eq: BathtubEquilibrium, p: EffectiveParameters):
    early, late = _rates(p)
    is_early = t <= p.t_star
    u = np.where(is_early, 1.0 + early * (t - eq.t_s), 1.0 + late * (eq.t_e - t))
    n = p.n_j_eff * (1.0 - 1.0 / u)
    dn = np.where(is_early, p.n_j_eff * early / u**2, -p.n_j_eff * late / u**2)
    return n, dn


def build_trajectory(eq: BathtubEquilibrium, p: EffectiveParameters,
                     grid_size: int = 2001) -> Trajectory:
    if grid_size < 3:
        raise ParameterError("grid_size must be at least 3")
    t = np.linspace(eq.t_s, eq.t_e, grid_size)
    n, dn = _accumulation_and_slope(t, eq, p)
    n = np.clip(n, 0.0, p.n_j_eff)
    v = p.v_f * (1.0 - n / p.n_j_eff)
    G = n * v / p.L
    inflow = dn + G
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (G[1:] + G[:-1]) * np.diff(t))))
    delay = np.where(t <= p.t_star, p.beta * (p.t_star - t), p.gamma * (t - p.t_star))
    cost_t = p.alpha_car * p.L / v + delay
    return Trajectory(t=t, n=n, v=v, G=G, I=inflow, cum_arrivals=cum, cost_t=cost_t)


def comparative_statics(N_s: float, p: EffectiveParameters,
                        which: Literal["jam_accumulation", "vot"],
                        rel_step: float = 1e-6) -> float:
    """Central finite difference of the equilibrium cost w.r.t. n_j or the car VOT."""
    eq = solve_shortrun(N_s, p)
    if not eq.theta > 2.0:
        raise ParameterError("comparative statics require a hypercongested equilibrium (theta > 2)")
    if which == "jam_accumulation":
        name, x = "n_j_eff", p.n_j_eff
    elif which == "vot":
        name, x = "alpha_car", p.alpha_car
    else:
        raise ParameterError(f"unknown derivative target {which!r}")
    h = rel_step * x
    up = solve_shortrun(N_s, p.with_overrides(**{name: x + h})).cost
    down = solve_shortrun(N_s, p.with_overrides(**{name: x - h})).cost
    return (up - down) / (2.0 * h)
