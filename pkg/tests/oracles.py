"""Reference computations that share no code with the package.

Each oracle works from the primitive model pieces (Greenshields speed, the
exit function, the alpha-beta-gamma cost, Cobb-Douglas demand) with plain
floats and scipy, so agreement with the package is evidence rather than an
echo of the same formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

SECOND = 1.0 / 3600.0


@dataclass(frozen=True)
class Net:
    v_f: float = 20.0
    n_j: float = 100.0
    L: float = 5.0
    alpha: float = 20.0
    beta: float = 10.0
    gamma: float = 40.0
    t_star: float = 0.0

    @classmethod
    def case(cls, eta: float = 1.0, xi: float = 1.0) -> "Net":
        return cls(alpha=20.0 * eta, n_j=100.0 * xi)

    @property
    def c0(self) -> float:
        return self.alpha * self.L / self.v_f


def delay(t, net: Net):
    t = np.asarray(t, dtype=float)
    return np.where(t <= net.t_star, net.beta * (net.t_star - t), net.gamma * (t - net.t_star))


def equal_cost_accumulation(C: float, t, net: Net):
    """Accumulation making alpha L / v(n) + delay(t) equal to C (zero where C is unreachable)."""
    room = C - delay(t, net)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = net.n_j * (1.0 - net.c0 / room)
    return np.where(room > net.c0, n, 0.0)


def exit_rate(n, net: Net):
    n = np.asarray(n, dtype=float)
    return n * net.v_f * (1.0 - n / net.n_j) / net.L


def _second_grid(net: Net, C: float) -> np.ndarray:
    half_early = (C - net.c0) / net.beta
    half_late = (C - net.c0) / net.gamma
    lo = net.t_star - half_early - 60 * SECOND
    hi = net.t_star + half_late + 60 * SECOND
    k_lo, k_hi = math.floor(lo / SECOND), math.ceil(hi / SECOND)
    return np.arange(k_lo, k_hi + 1) * SECOND


def served_per_second(C: float, net: Net) -> float:
    """Commuters exiting over the rush hour when everyone pays C (1-second Riemann sum)."""
    t = _second_grid(net, C)
    return float(np.sum(exit_rate(equal_cost_accumulation(C, t, net), net)) * SECOND)


@dataclass(frozen=True)
class BruteForceUE:
    cost: float
    max_gain: float
    occupied_spread: float


def brute_force_ue(N_s: float, net: Net, step: float = 0.01) -> BruteForceUE:
    """Scan common cost levels on a fixed grid until the served mass reaches N_s.

    The equilibrium level is interpolated between the two bracketing scan
    points. At that level every second of the day is then priced: occupied
    seconds must cost the same and no empty second may be cheaper (nobody
    gains by moving their arrival time).
    """
    prev_c, prev_m = net.c0, 0.0
    c = net.c0
    while True:
        c += step
        m = served_per_second(c, net)
        if m >= N_s:
            break
        prev_c, prev_m = c, m
    C = prev_c + (N_s - prev_m) * (c - prev_c) / (m - prev_m)

    t = np.arange(-6.0 / SECOND, 3.0 / SECOND) * SECOND + net.t_star
    n = equal_cost_accumulation(C, t, net)
    cost_t = net.alpha * net.L / (net.v_f * (1.0 - n / net.n_j)) + delay(t, net)
    occupied = n > 0
    spread = float(np.ptp(cost_t[occupied])) if occupied.any() else 0.0
    gain = float(C - cost_t.min())
    return BruteForceUE(cost=C, max_gain=gain, occupied_spread=spread)


def perimeter_cost_closed_form(N_s: float, net: Net) -> float:
    """Critical-accumulation control: theta = 4 (N_s / k + 1 - ln 2), cost = theta c0."""
    k = net.alpha * net.n_j * (1.0 / net.beta + 1.0 / net.gamma)
    return 4.0 * (N_s / k + 1.0 - math.log(2.0)) * net.c0


def biased_cost_closed_form(N_s: float, net: Net, eps: float) -> float:
    k = net.alpha * net.n_j * (1.0 / net.beta + 1.0 / net.gamma)
    theta = (N_s / k - math.log(2.0 / (2.0 - eps)) + eps) * 4.0 / (eps * (2.0 - eps))
    return theta * net.c0


def biased_cost_mass_balance(N_s: float, net: Net, eps: float) -> float:
    """Solve the controlled equilibrium by quadrature of the exit flow.

    Outside the control window the equal-cost accumulation applies; inside it
    the network is held at eps * n_j / 2 and exits at that constant rate.
    """
    n_c = eps * net.n_j / 2.0
    g_c = float(exit_rate(n_c, net))
    t_ctrl = net.L / (net.v_f * (1.0 - eps / 2.0))

    def served(C: float) -> float:
        t_s = net.t_star - (C - net.c0) / net.beta
        t_e = net.t_star + (C - net.c0) / net.gamma
        t_sp = net.t_star - (C - net.alpha * t_ctrl) / net.beta
        t_ep = net.t_star + (C - net.alpha * t_ctrl) / net.gamma
        g = lambda t: float(exit_rate(equal_cost_accumulation(C, t, net), net))
        pre = integrate.quad(g, t_s, t_sp, epsabs=1e-12, epsrel=1e-12)[0]
        post = integrate.quad(g, t_ep, t_e, epsabs=1e-12, epsrel=1e-12)[0]
        return pre + post + g_c * (t_ep - t_sp)

    lo = net.alpha * t_ctrl + 1e-9
    return optimize.brentq(lambda C: served(C) - N_s, lo, 10.0 * lo + 1000.0, xtol=1e-13)


def quartic_population(r_s0: float, y0: float, slope: float, r_A: float,
                       mu: float = 0.25, A_s: float = 1.0) -> float:
    """Closed-form suburban total for mu = 1/4 and constant land: the integrand is a cubic."""
    assert mu == 0.25
    x_f = y0 / slope * (1.0 - (r_A / (r_s0 + r_A)) ** mu)
    scale = 4.0 * y0**-4 * (r_s0 + r_A) * A_s
    return scale * (y0**4 - (y0 - slope * x_f) ** 4) / (4.0 * slope)


def utility(y: float, r: float, mu: float) -> float:
    return (1.0 - mu) ** (1.0 - mu) * mu**mu * y / r**mu
