"""Perimeter-control equilibrium, boundary queue and biased control targets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .params import EffectiveParameters, ParameterError
from .shortrun import BathtubEquilibrium, solve_shortrun


@dataclass(frozen=True)
class PerimeterEquilibrium:
    theta_p: float
    cost: float
    I_p: float
    t_s: float
    t_e: float
    t_s_p: Optional[float]
    t_e_p: Optional[float]
    epsilon: float
    binding: bool
    N_s: float
    n_control: Optional[float] = None


@dataclass(frozen=True)
class QueueProfile:
    t: np.ndarray
    q: np.ndarray
    T_w: np.ndarray


@dataclass(frozen=True)
class ControlledTrajectory:
    t: np.ndarray
    n: np.ndarray
    q: np.ndarray
    T_w: np.ndarray
    G: np.ndarray
    phase: tuple

    columns = ("t", "n", "q", "T_w", "G", "phase")

    def rows(self):
        for i in range(len(self.t)):
            yield (self.t[i], self.n[i], self.q[i], self.T_w[i], self.G[i], self.phase[i])


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 2.0:
        raise ParameterError(f"epsilon must lie in (0, 2), got {epsilon!r}")


def control_inflow(p: EffectiveParameters, epsilon: float = 1.0) -> float:
    """Exit rate at the controlled accumulation epsilon * n_j_eff / 2."""
    _check_epsilon(epsilon)
    return epsilon * (2.0 - epsilon) * p.capacity


def binding_threshold(epsilon: float) -> float:
    """Uncontrolled theta above which the control target is reached."""
    return 2.0 / (2.0 - epsilon)


def biased_theta(N_s: float, p: EffectiveParameters, epsilon: float = 1.0) -> float:
    """Closed-form normalized cost when control holds accumulation at epsilon * n_j_eff / 2."""
    _check_epsilon(epsilon)
    demand = N_s / p.schedule_weight
    return (demand - math.log(2.0 / (2.0 - epsilon)) + epsilon) * 4.0 / (epsilon * (2.0 - epsilon))


def controlled_travel_time(p: EffectiveParameters, epsilon: float = 1.0) -> float:
    """In-network travel time at the controlled accumulation."""
    return p.L / (p.v_f * (1.0 - epsilon / 2.0))


def _unbound(ue: BathtubEquilibrium, p: EffectiveParameters, epsilon: float) -> PerimeterEquilibrium:
    return PerimeterEquilibrium(
        theta_p=ue.theta, cost=ue.cost, I_p=control_inflow(p, epsilon),
        t_s=ue.t_s, t_e=ue.t_e, t_s_p=None, t_e_p=None,
        epsilon=epsilon, binding=False, N_s=ue.N_s,
    )


def solve_perimeter(N_s: float, p: EffectiveParameters, epsilon: float = 1.0) -> PerimeterEquilibrium:
    _check_epsilon(epsilon)
    if not N_s >= 0:
        raise ParameterError(f"N_s must be nonnegative, got {N_s!r}")
    ue = solve_shortrun(N_s, p)
    if not ue.theta > binding_threshold(epsilon):
        return _unbound(ue, p, epsilon)
    theta = biased_theta(N_s, p, epsilon)
    if not theta > binding_threshold(epsilon):
        return _unbound(ue, p, epsilon)
    cost = theta * p.free_flow_cost
    in_control = p.alpha_car * controlled_travel_time(p, epsilon)
    return PerimeterEquilibrium(
        theta_p=theta,
        cost=cost,
        I_p=control_inflow(p, epsilon),
        t_s=p.t_star - (cost - p.free_flow_cost) / p.beta,
        t_e=p.t_star + (cost - p.free_flow_cost) / p.gamma,
        t_s_p=p.t_star - (cost - in_control) / p.beta,
        t_e_p=p.t_star + (cost - in_control) / p.gamma,
        epsilon=epsilon,
        binding=True,
        N_s=N_s,
        n_control=epsilon * p.n_j_eff / 2.0,
    )


def cost_ratio(N_s: float, p: EffectiveParameters) -> float:
    return solve_perimeter(N_s, p, 1.0).cost / solve_shortrun(N_s, p).cost


def arrivals_outside_control(p: EffectiveParameters, epsilon: float = 1.0) -> float:
    """Commuters served before control starts and after it ends."""
    _check_epsilon(epsilon)
    return p.schedule_weight * (math.log(2.0 / (2.0 - epsilon)) - epsilon / 2.0)


def arrivals_during_control(eq: PerimeterEquilibrium) -> float:
    if not eq.binding:
        return 0.0
    return eq.I_p * (eq.t_e_p - eq.t_s_p)


def queue_profile(eq: PerimeterEquilibrium, p: EffectiveParameters,
                  grid_size: int = 2001) -> QueueProfile:
    if not eq.binding:
        empty = np.zeros(0)
        return QueueProfile(t=empty, q=empty, T_w=empty)
    if grid_size < 3:
        raise ParameterError("grid_size must be at least 3")
    t = np.linspace(eq.t_s_p, eq.t_e_p, grid_size)
    T_w = _waiting_time(t, eq, p)
    return QueueProfile(t=t, q=eq.I_p * T_w, T_w=T_w)


def _waiting_time(t: np.ndarray, eq: PerimeterEquilibrium, p: EffectiveParameters) -> np.ndarray:
    rising = (p.beta / p.alpha_car) * (t - eq.t_s_p)
    falling = (p.gamma / p.alpha_car) * (eq.t_e_p - t)
    wait = np.where(t <= p.t_star, rising, falling)
    inside = (t >= eq.t_s_p) & (t <= eq.t_e_p)
    return np.where(inside, np.maximum(wait, 0.0), 0.0)


def controlled_trajectory(eq: PerimeterEquilibrium, p: EffectiveParameters,
                          grid_size: int = 2001) -> ControlledTrajectory:
    """Accumulation, queue and exit flow over the rush window under control."""
    if grid_size < 3:
        raise ParameterError("grid_size must be at least 3")
    t = np.linspace(eq.t_s, eq.t_e, grid_size)
    early = p.beta * p.v_f / (p.alpha_car * p.L)
    late = p.gamma * p.v_f / (p.alpha_car * p.L)
    u = np.where(t <= p.t_star, 1.0 + early * (t - eq.t_s), 1.0 + late * (eq.t_e - t))
    n = p.n_j_eff * (1.0 - 1.0 / u)
    if eq.binding:
        inside = (t >= eq.t_s_p) & (t <= eq.t_e_p)
        n = np.where(inside, eq.epsilon * p.n_j_eff / 2.0, n)
        T_w = _waiting_time(t, eq, p)
        phase = tuple("pre" if ti < eq.t_s_p else "post" if ti > eq.t_e_p else "control"
                      for ti in t)
    else:
        T_w = np.zeros_like(t)
        phase = tuple("pre" if ti <= p.t_star else "post" for ti in t)
    n = np.clip(n, 0.0, p.n_j_eff)
    G = n * p.v_f * (1.0 - n / p.n_j_eff) / p.L
    return ControlledTrajectory(t=t, n=n, q=eq.I_p * T_w, T_w=T_w, G=G, phase=phase)
