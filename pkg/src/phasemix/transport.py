"""Exact solutions of the transport equation and the initial-data family.

The equation in action-angle variables is a rigid rotation, so the
solution is known in closed form and can be evaluated by two independent
routes: pulling the initial data back along numerically integrated
characteristics, or translating the angle through the precomputed chart.
The chart route is the production path; the characteristic route is the
validation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .action_angle import OrbitChart, ChartRangeError, to_angle_energy
from .flow import FlowSpec, flow_map
from .potential import PotentialParams, hamiltonian

__all__ = [
    "InitialData",
    "make_initial_data",
    "evaluate_f_characteristic",
    "evaluate_f_actionangle",
    "actionangle_evaluator",
    "characteristic_evaluator",
]


@dataclass(frozen=True)
class InitialData:
    """Smooth data supported on the energy annulus c_s <= H <= 1/c_s.

    f0(x, v) = B(H) * (1 + alpha * sin(m * Q)) with B the standard bump
    exp(-1/(1 - s**2)) in the scaled energy s, vanishing to all orders
    at the annulus edge; nonnegative because alpha < 1.
    """

    c_s: float
    alpha: float
    m: int
    params: PotentialParams
    chart: OrbitChart

    @property
    def h_min(self) -> float:
        return self.c_s

    @property
    def h_max(self) -> float:
        return 1.0 / self.c_s

    def bump(self, h):
        """Radial bump B(H), supported on the open annulus."""
        h = np.asarray(h, dtype=float)
        scalar = h.ndim == 0
        mid = 0.5 * (self.h_min + self.h_max)
        half_width = 0.5 * (self.h_max - self.h_min)
        s = np.atleast_1d((h - mid) / half_width)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
        return float(out[0]) if scalar else out

    def value_bar(self, q, k):
        """Data in action-angle coordinates: B(K) * (1 + alpha sin(mQ))."""
        q = np.asarray(q, dtype=float)
        return self.bump(k) * (1.0 + self.alpha * np.sin(self.m * q))

    def value(self, x, v):
        """Data in phase-space coordinates; zero off the annulus."""
        return evaluate_f_actionangle(self.chart, self.params, self, 0.0, x, v)


def make_initial_data(
    c_s: float,
    alpha: float,
    m: int,
    params: PotentialParams,
    chart: OrbitChart,
) -> InitialData:
    """Validated constructor for the built-in data family."""
    if not 0 < c_s < 1:
        raise ValueError("c_s must lie in (0, 1)")
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError("m must be an integer >= 1")
    lo, hi = chart.k_min, chart.k_max
    if lo > c_s or hi < 1.0 / c_s:
        raise ValueError("chart energy range does not cover the support annulus")
    return InitialData(c_s=c_s, alpha=alpha, m=int(m), params=params, chart=chart)


def evaluate_f_characteristic(
    params: PotentialParams,
    f0: InitialData,
    t: float,
    x,
    v,
    spec: FlowSpec = FlowSpec(method="adaptive", tolerance=1e-10),
):
    """Exact solution via backward characteristics: f0(flow(-t)(x, v))."""
    x0, v0 = flow_map(params, x, v, -t, spec)
    return f0.value(x0, v0)


def evaluate_f_actionangle(
    chart: OrbitChart,
    params: PotentialParams,
    f0: InitialData,
    t: float,
    x,
    v,
):
    """Exact solution via the chart: fbar0(Q + c(K) t, K).

    Points outside the support annulus return 0 without touching the
    chart; points inside the annulus but outside the chart range are a
    configuration error and raise :class:`ChartRangeError`.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    scalar = x.ndim == 0 and v.ndim == 0
    x_b, v_b = np.broadcast_arrays(x, v)
    h = np.asarray(hamiltonian(params, x_b, v_b))
    out = np.zeros(h.shape)
    inside = (h > f0.h_min) & (h < f0.h_max)
    if np.any(inside):
        hi = h[inside]
        if np.any(hi < chart.k_min) or np.any(hi > chart.k_max):
            raise ChartRangeError(
                "support annulus point outside chart range; rebuild the chart"
            )
        chi, _ = to_angle_energy(params, x_b[inside], v_b[inside])
        q = chart.q_from_chi(chi, hi)
        out[inside] = f0.value_bar(q + chart.c_of_k(hi) * t, hi)
    return float(out) if scalar else out


def actionangle_evaluator(chart: OrbitChart, params: PotentialParams, f0: InitialData):
    """Evaluator closure (t, x, v) -> f for the moments pipeline."""

    def evaluate(t, x, v):
        return evaluate_f_actionangle(chart, params, f0, t, x, v)

    return evaluate


def characteristic_evaluator(
    params: PotentialParams,
    f0: InitialData,
    spec: FlowSpec = FlowSpec(method="adaptive", tolerance=1e-10),
):
    """Validation-path evaluator pulling back along characteristics."""

    def evaluate(t, x, v):
        return evaluate_f_characteristic(params, f0, t, x, v, spec)

    return evaluate
