"""Velocity moments, the normalized potential, and its time derivative.

The density and current integrate the solution over the exact velocity
support |v| <= sqrt(2 (1/c_s - Phi(x))) with Gauss-Legendre quadrature.
The potential solves -phi'' = rho with phi(0) = phi'(0) = 0; its time
derivative is computed both by the reconstruction formula

    phi_t(x') = int_0^{x'} (j(y) - j(0)) dy

and by a centered time difference of phi, giving two independent routes
whose difference converges at O(dt**2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .potential import PotentialParams, invert_phi, phi as potential_phi

__all__ = ["spatial_grid", "MomentSeries", "MomentCalculator", "cumulative_from_zero"]


def spatial_grid(params: PotentialParams, c_s: float, n: int = 201) -> np.ndarray:
    """Uniform symmetric grid on [-x_max, x_max] with x_max = Phi^{-1}(1/c_s).

    The node count is forced odd so that x = 0 is a grid node.
    """
    if n < 3:
        raise ValueError("grid needs at least 3 nodes")
    if n % 2 == 0:
        n += 1
    x_max = float(invert_phi(params, 1.0 / c_s))
    return np.linspace(-x_max, x_max, n)


def cumulative_from_zero(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cumulative integral int_0^{x_i} y dx on a symmetric grid containing 0.

    Composite Simpson on each half, anchored at the central node.
    """
    n = x.size
    i0 = n // 2
    if abs(x[i0]) > 1e-12 * (abs(x[-1]) + 1.0):
        raise ValueError("grid must contain x = 0 at its central node")
    out = np.empty_like(np.asarray(y, dtype=float))
    out[i0:] = cumulative_simpson(y[i0:], x=x[i0:], initial=0.0)
    # int_0^{x'} y dx = -int_0^{-x'} y(-u) du for x' < 0
    left = cumulative_simpson(y[: i0 + 1][::-1], x=-x[: i0 + 1][::-1], initial=0.0)
    out[: i0 + 1] = -left[::-1]
    return out


@dataclass
class MomentSeries:
    """Time-indexed moment grids emitted by the evolve pipeline."""

    times: np.ndarray
    x: np.ndarray
    rho: np.ndarray
    j: np.ndarray
    phi: np.ndarray
    phi_t: np.ndarray


class MomentCalculator:
    """Moment evaluation for one solution evaluator.

    Parameters
    ----------
    evaluator : callable
        ``evaluator(t, x, v) -> f`` accepting broadcastable arrays.
    params, c_s : potential parameters and the support parameter; they
        fix the velocity support bound used by the quadrature.
    n_quad : number of Gauss-Legendre velocity nodes (>= 64).
    """

    def __init__(self, evaluator, params: PotentialParams, c_s: float, n_quad: int = 128):
        if n_quad < 64:
            raise ValueError("n_quad must be >= 64")
        self.evaluator = evaluator
        self.params = params
        self.c_s = c_s
        self.h_max = 1.0 / c_s
        self.x_max = float(invert_phi(params, self.h_max))
        self._nodes, self._weights = np.polynomial.legendre.leggauss(n_quad)

    def _v_samples(self, x):
        room = self.h_max - np.asarray(potential_phi(self.params, x))
        v_max = np.sqrt(np.clip(2.0 * room, 0.0, None))
        return v_max, v_max[..., None] * self._nodes

    def density(self, t: float, x) -> np.ndarray:
        """rho(t, x) = int f dv over the exact support interval."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        v_max, v = self._v_samples(x)
        f = self.evaluator(t, x[..., None], v)
        return v_max * (f @ self._weights)

    def current(self, t: float, x) -> np.ndarray:
        """j(t, x) = int v f dv over the exact support interval."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        v_max, v = self._v_samples(x)
        f = self.evaluator(t, x[..., None], v)
        return v_max * ((f * v) @ self._weights)

    def phi_t_reconstruct(self, t: float, grid: np.ndarray) -> np.ndarray:
        """phi_t on the grid from the current-reconstruction formula."""
        j = self.current(t, grid)
        j0 = j[grid.size // 2]
        return cumulative_from_zero(j - j0, grid)

    def phi(self, t: float, grid: np.ndarray) -> np.ndarray:
        """Potential with value and slope pinned to zero at x = 0."""
        rho = self.density(t, grid)
        slope = cumulative_from_zero(rho, grid)
        return -cumulative_from_zero(slope, grid)

    def phi_t_fd(self, t: float, dt: float, grid: np.ndarray) -> np.ndarray:
        """Centered time difference of phi; independent phi_t route."""
        if not dt > 0:
            raise ValueError("dt must be > 0")
        return (self.phi(t + dt, grid) - self.phi(t - dt, grid)) / (2.0 * dt)

    def series(self, times, grid: np.ndarray) -> MomentSeries:
        """Assemble rho, j, phi, phi_t over a time schedule."""
        times = np.asarray(times, dtype=float)
        shape = (times.size, grid.size)
        rho = np.empty(shape)
        j = np.empty(shape)
        phi_vals = np.empty(shape)
        phi_t = np.empty(shape)
        for i, t in enumerate(times):
            rho[i] = self.density(t, grid)
            j[i] = self.current(t, grid)
            phi_vals[i] = -cumulative_from_zero(cumulative_from_zero(rho[i], grid), grid)
            phi_t[i] = cumulative_from_zero(j[i] - j[i, grid.size // 2], grid)
        return MomentSeries(times=times, x=grid, rho=rho, j=j, phi=phi_vals, phi_t=phi_t)
