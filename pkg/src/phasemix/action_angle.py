"""Angle-energy and action-angle coordinates for the quartic oscillator.

Two successive charts flatten the characteristic flow:

* ``(x, v) -> (chi, h)``: the orbital angle chi is reconstructed from the
  pair (v / sqrt(2h), sign(x) sqrt(Phi/h)) with a two-argument arctangent,
  and h is the orbit energy.  Along the flow dchi/dt = -a(chi, h) with
  the angular rate ``a = |Phi'| / sqrt(2 Phi) = (1 + 2 eps x**2) /
  sqrt(1 + eps x**2)``, which equals 1 identically in the harmonic case.
* ``(chi, h) -> (Q, K)``: chi is reparametrized per energy so that the
  flow becomes rigid rotation, dQ/dt = -c(K), with the orbital frequency
  c fixed by requiring Q to advance by 2*pi per orbit.

The per-energy reparametrization dQ/dchi = c/a is a smooth, even,
2*pi-periodic function of chi, so the chart tabulates its Fourier sine
antiderivative: Q(chi) = chi + sum_k b_k sin(k chi).  That form is odd,
spectrally accurate, exactly 2*pi-equivariant, and pins Q(pi/2) = pi/2
and Q(pi) = pi by symmetry.  Coefficients, c and c' are interpolated
cubically across the energy grid; the inverse map is solved by Newton
iteration on the monotone forward series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .potential import (
    PotentialParams,
    hamiltonian,
    invert_phi,
    invert_phi_squared,
    phi,
)

__all__ = [
    "AngleEnergy",
    "ActionAngle",
    "OrbitChart",
    "ChartError",
    "ChartRangeError",
    "to_angle_energy",
    "from_angle_energy",
    "rate_a",
    "compute_c",
    "compute_c_prime",
    "build_chart",
    "chart_range_for_support",
    "to_action_angle",
    "from_action_angle",
]

# Trailing Fourier modes below this magnitude (max over the energy grid)
# are dropped from the chart.
_MODE_FLOOR = 1e-15


class ChartError(RuntimeError):
    """Internal consistency failure while building or using a chart."""


class ChartRangeError(ValueError):
    """Energy outside the tabulated chart range."""


class AngleEnergy(NamedTuple):
    chi: float
    h: float


class ActionAngle(NamedTuple):
    q: float
    k: float


def _maybe_scalar(arr, scalar: bool):
    return float(arr) if scalar else arr


def to_angle_energy(params: PotentialParams, x, v):
    """Map phase points to (chi, h); rejects the elliptic fixed point.

    x > 0 maps into (-pi/2, pi/2) and x < 0 into the complementary arc,
    so the right turning point sits at chi = 0 and the left at chi = pi.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    scalar = x.ndim == 0 and v.ndim == 0
    h = hamiltonian(params, x, v)
    if np.any(h <= 0):
        raise ValueError("the fixed point (0, 0) has no angle coordinate")
    sin_part = v / np.sqrt(2.0 * h)
    cos_part = np.sign(x) * np.sqrt(phi(params, x) / h)
    chi = np.arctan2(sin_part, cos_part)
    return _maybe_scalar(chi, scalar), _maybe_scalar(h, scalar)


def from_angle_energy(params: PotentialParams, chi, h):
    """Inverse chart: (chi, h) -> (x, v) for h > 0."""
    chi = np.asarray(chi, dtype=float)
    h = np.asarray(h, dtype=float)
    scalar = chi.ndim == 0 and h.ndim == 0
    if np.any(h <= 0):
        raise ValueError("energy must be > 0")
    c = np.cos(chi)
    v = np.sqrt(2.0 * h) * np.sin(chi)
    x = np.sign(c) * invert_phi(params, h * c * c)
    return _maybe_scalar(x, scalar), _maybe_scalar(v, scalar)


def rate_a(params: PotentialParams, chi, h):
    """Angular speed |dchi/dt| = (1 + 2 eps x**2) / sqrt(1 + eps x**2).

    Evaluated at x = |x|(chi, h) through x**2 = Phi^{-1}(h cos^2 chi)**2,
    which keeps the removable point x = 0 exact.  Equals 1 identically
    for eps = 0 and is >= 1 everywhere.
    """
    chi = np.asarray(chi, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("energy must be > 0")
    cos2 = np.cos(chi) ** 2
    xsq = invert_phi_squared(params, h * cos2)
    eps = params.epsilon
    return (1.0 + 2.0 * eps * xsq) / np.sqrt(1.0 + eps * xsq)


def _angle_nodes(n_quad: int):
    return np.arange(n_quad) * (2.0 * np.pi / n_quad)


def compute_c(params: PotentialParams, h, n_quad: int = 256):
    """Orbital frequency c(h) = 2*pi / closed-orbit integral of 1/a.

    The integral uses the periodic trapezoid rule on equispaced angles,
    spectrally accurate for this smooth periodic integrand.
    """
    if n_quad < 16:
        raise ValueError("n_quad must be >= 16")
    h = np.asarray(h, dtype=float)
    scalar = h.ndim == 0
    chi = _angle_nodes(n_quad)
    inv_a = 1.0 / rate_a(params, chi, h[..., None])
    c = 1.0 / inv_a.mean(axis=-1)
    return _maybe_scalar(c, scalar)


def _c_prime_integrand(params: PotentialParams, chi, h):
    # d/dh of 1/a at fixed chi: (d/dx)(1/a) * dx/dh with
    # dx/dh = cos^2(chi) / Phi'(x); the 1/x factors cancel, leaving a
    # sign-definite integrand that is smooth through x = 0.
    eps = params.epsilon
    cos2 = np.cos(chi) ** 2
    xsq = invert_phi_squared(params, h * cos2)
    num = 3.0 * eps + 2.0 * eps * eps * xsq
    den = np.sqrt(1.0 + eps * xsq) * (1.0 + 2.0 * eps * xsq) ** 3
    return cos2 * num / den


def compute_c_prime(params: PotentialParams, h, n_quad: int = 256):
    """Frequency derivative c'(h) from the analytic integrand.

    c' = c**2 * <cos^2(chi) (3 eps + 2 eps**2 x**2) /
    (sqrt(1 + eps x**2) (1 + 2 eps x**2)**3)>, the periodic-trapezoid
    average over the orbit; strictly positive for eps > 0 and zero in
    the isochronous case.
    """
    if n_quad < 16:
        raise ValueError("n_quad must be >= 16")
    h = np.asarray(h, dtype=float)
    scalar = h.ndim == 0
    chi = _angle_nodes(n_quad)
    g = _c_prime_integrand(params, chi, h[..., None])
    c = compute_c(params, h, n_quad)
    cp = np.asarray(c, dtype=float) ** 2 * g.mean(axis=-1)
    return _maybe_scalar(cp, scalar)


def chart_range_for_support(c_s: float, margin: float = 0.05):
    """Default chart energy range: the support annulus plus a margin."""
    if not 0 < c_s < 1:
        raise ValueError("c_s must lie in (0, 1)")
    return c_s * (1.0 - margin), (1.0 + margin) / c_s


@dataclass(frozen=True)
class OrbitChart:
    """Precomputed per-energy tables for the action-angle chart.

    ``sine_coeffs[i, k-1]`` holds the coefficient b_k of the node-i
    reparametrization Q(chi) = chi + sum_k b_k sin(k chi).  ``chi_table``
    and ``q_table`` tabulate the monotone map on [0, pi] (extended
    everywhere by oddness and 2*pi-equivariance of the series form).
    ``delta`` is the measured lower bound of c' over the grid.
    """

    params: PotentialParams
    k_grid: np.ndarray
    c: np.ndarray
    c_prime: np.ndarray
    sine_coeffs: np.ndarray
    chi_table: np.ndarray
    q_table: np.ndarray
    delta: float
    _c_spline: CubicSpline = field(repr=False)
    _cp_spline: CubicSpline = field(repr=False)
    _b_spline: CubicSpline | None = field(repr=False)

    @property
    def k_min(self) -> float:
        return float(self.k_grid[0])

    @property
    def k_max(self) -> float:
        return float(self.k_grid[-1])

    def check_range(self, k) -> None:
        k = np.asarray(k, dtype=float)
        if np.any(k < self.k_min) or np.any(k > self.k_max):
            raise ChartRangeError(
                f"energy outside chart range [{self.k_min}, {self.k_max}]"
            )

    def c_of_k(self, k):
        """Orbital frequency at energy k (cubic interpolation)."""
        self.check_range(k)
        return self._c_spline(k)

    def c_prime_of_k(self, k):
        """Frequency derivative at energy k (cubic interpolation)."""
        self.check_range(k)
        return self._cp_spline(k)

    def q_from_chi(self, chi, k):
        """Forward reparametrization Q(chi; k), odd and 2*pi-equivariant."""
        self.check_range(k)
        chi = np.asarray(chi, dtype=float)
        k = np.asarray(k, dtype=float)
        scalar = chi.ndim == 0 and k.ndim == 0
        chi_b, k_b = np.broadcast_arrays(chi, k)
        if self._b_spline is None:
            return _maybe_scalar(chi_b.copy(), scalar)
        b = self._b_spline(k_b)
        modes = np.arange(1, b.shape[-1] + 1)
        q = chi_b + np.sum(np.sin(chi_b[..., None] * modes) * b, axis=-1)
        return _maybe_scalar(q, scalar)

    def chi_from_q(self, q, k, tol: float = 1e-13, max_iter: int = 40):
        """Inverse reparametrization, by Newton on the monotone series."""
        self.check_range(k)
        q = np.asarray(q, dtype=float)
        k = np.asarray(k, dtype=float)
        scalar = q.ndim == 0 and k.ndim == 0
        q_b, k_b = np.broadcast_arrays(q, k)
        if self._b_spline is None:
            return _maybe_scalar(q_b.copy(), scalar)
        b = self._b_spline(k_b)
        modes = np.arange(1, b.shape[-1] + 1)
        kb = modes * b
        chi = np.array(q_b, dtype=float, copy=True)
        for _ in range(max_iter):
            arg = chi[..., None] * modes
            resid = chi + np.sum(np.sin(arg) * b, axis=-1) - q_b
            slope = 1.0 + np.sum(np.cos(arg) * kb, axis=-1)
            chi = chi - resid / slope
            if np.max(np.abs(resid)) < tol:
                break
        else:
            raise ChartError("Newton inversion of the angle map did not converge")
        return _maybe_scalar(chi, scalar)

    def q_of_chi_table(self, node: int) -> PchipInterpolator:
        """Monotone piecewise-cubic interpolant of the node table."""
        return PchipInterpolator(self.chi_table, self.q_table[node])

    def chi_of_q_table(self, node: int) -> PchipInterpolator:
        """Monotone piecewise-cubic interpolant of the inverted table."""
        return PchipInterpolator(self.q_table[node], self.chi_table)


def build_chart(
    params: PotentialParams,
    k_min: float,
    k_max: float,
    n_k: int = 64,
    n_chi: int = 512,
) -> OrbitChart:
    """Tabulate c, c' and the angle reparametrization on an energy grid.

    For each grid energy the smooth periodic weight dQ/dchi = c/a is
    sampled on n_chi equispaced angles; its Fourier antiderivative gives
    Q(chi) = chi + sum b_k sin(k chi).  Monotonicity of every tabulated
    map is verified before the chart is returned.
    """
    if not 0 < k_min < k_max:
        raise ValueError("require 0 < k_min < k_max")
    if n_k < 4:
        raise ValueError("n_k must be >= 4")
    if n_chi < 8 or n_chi % 2:
        raise ValueError("n_chi must be an even integer >= 8")

    k_grid = np.linspace(k_min, k_max, n_k)
    chi_nodes = _angle_nodes(n_chi)
    inv_a = 1.0 / rate_a(params, chi_nodes, k_grid[:, None])
    mean_inv = inv_a.mean(axis=1)
    c = 1.0 / mean_inv
    c_prime = c**2 * _c_prime_integrand(params, chi_nodes, k_grid[:, None]).mean(axis=1)

    # Fourier antiderivative of w = (1/a) / <1/a>, whose mean is 1 by
    # construction.  w is even in chi, so the rfft coefficients are real.
    w = inv_a / mean_inv[:, None]
    spectrum = np.fft.rfft(w, axis=1) / n_chi
    modes = np.arange(1, n_chi // 2 + 1)
    factor = np.full(modes.shape, 2.0)
    factor[-1] = 1.0  # Nyquist mode appears once
    b = factor * spectrum[:, 1:].real / modes

    keep = np.nonzero(np.max(np.abs(b), axis=0) > _MODE_FLOOR)[0]
    b = b[:, : keep[-1] + 1] if keep.size else b[:, :0]

    n_tab = min(513, max(65, n_chi // 2 + 1))
    if n_tab % 2 == 0:
        n_tab += 1  # keep pi/2 on the table
    chi_table = np.linspace(0.0, np.pi, n_tab)
    if b.shape[1]:
        mode_idx = np.arange(1, b.shape[1] + 1)
        q_table = chi_table[None, :] + (np.sin(np.outer(chi_table, mode_idx)) @ b.T).T
    else:
        q_table = np.broadcast_to(chi_table, (n_k, n_tab)).copy()

    # Monotonicity: dQ/dchi > 0 on a fine angle grid at every node.
    fine = np.linspace(0.0, np.pi, 4 * n_tab)
    if b.shape[1]:
        mode_idx = np.arange(1, b.shape[1] + 1)
        slope = 1.0 + np.cos(fine[:, None] * mode_idx) @ (mode_idx * b).T
        if np.any(slope <= 0):
            raise ChartError("tabulated angle map is not monotone")
    if np.any(np.diff(q_table, axis=1) <= 0):
        raise ChartError("tabulated angle map is not strictly increasing")

    b_spline = CubicSpline(k_grid, b, axis=0) if b.shape[1] else None
    return OrbitChart(
        params=params,
        k_grid=k_grid,
        c=c,
        c_prime=c_prime,
        sine_coeffs=b,
        chi_table=chi_table,
        q_table=q_table,
        delta=float(c_prime.min()),
        _c_spline=CubicSpline(k_grid, c),
        _cp_spline=CubicSpline(k_grid, c_prime),
        _b_spline=b_spline,
    )


def to_action_angle(chart: OrbitChart, params: PotentialParams, x, v):
    """Full chart (x, v) -> (Q, K); energy must lie in the chart range."""
    chi, h = to_angle_energy(params, x, v)
    chart.check_range(h)
    return chart.q_from_chi(chi, h), h


def from_action_angle(chart: OrbitChart, params: PotentialParams, q, k):
    """Inverse chart (Q, K) -> (x, v)."""
    chart.check_range(k)
    chi = chart.chi_from_q(q, k)
    return from_angle_energy(params, chi, k)
