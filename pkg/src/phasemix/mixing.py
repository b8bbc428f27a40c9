"""Decay-rate measurement, commuting-field probes, and angle spectra.

This module turns solution evaluations into the quantitative mixing
diagnostics: the time envelope and log-log slope of sup_x |phi_t|, the
uniform-in-time norms of the commuted fields Y^l fbar with
Y = t c'(K) d_Q - d_K, and the Fourier spectrum of fbar in the angle.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .action_angle import OrbitChart
from .moments import MomentCalculator, cumulative_from_zero
from .potential import PotentialParams
from .transport import InitialData

__all__ = [
    "DecayReport",
    "VectorFieldProbe",
    "SpectrumEntry",
    "FitError",
    "FDValidationError",
    "solution_bar",
    "sup_phi_t",
    "fit_decay",
    "vector_field_norms",
    "q_fourier_spectrum",
]


class FitError(RuntimeError):
    """Fit window does not contain enough envelope points."""


class FDValidationError(RuntimeError):
    """Finite-difference probe failed its step-halving validation."""


@dataclass
class DecayReport:
    """Envelope of sup_x |phi_t| over time with an optional log-log fit.

    ``tail_slopes`` records |j(t, 0)|, the slope of the affine tail of
    phi_t outside the support; the sup itself is taken on the compact
    grid (phi_t is affine beyond x_max, so the tail sup is attained at
    the boundary whenever the tail slope vanishes).
    """

    times: np.ndarray
    sup_values: np.ndarray
    tail_slopes: np.ndarray
    envelope_times: np.ndarray | None = None
    envelope: np.ndarray | None = None
    slope: float | None = None
    window: tuple[float, float] | None = None
    residual: float | None = None


def _worker_count() -> int:
    env = os.environ.get("PHASEMIX_THREADS")
    if env:
        return max(1, int(env))
    return 1


def sup_phi_t(calc: MomentCalculator, grid: np.ndarray, times) -> DecayReport:
    """Record sup_x |phi_t| and the tail slope |j(t, 0)| per sample time.

    Honors the PHASEMIX_THREADS environment variable for parallel
    evaluation over time samples (the calculator is pure).
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be nonempty and strictly increasing")
    mid = grid.size // 2

    def one(t):
        j = calc.current(t, grid)
        pt = cumulative_from_zero(j - j[mid], grid)
        return float(np.max(np.abs(pt))), float(abs(j[mid]))

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, times))
    else:
        results = [one(t) for t in times]
    sup = np.array([r[0] for r in results])
    tail = np.array([r[1] for r in results])
    return DecayReport(times=times, sup_values=sup, tail_slopes=tail)


def fit_decay(
    report: DecayReport,
    window: tuple[float, float],
    period: float = 2.0 * np.pi,
) -> DecayReport:
    """Least-squares log-log slope of the oscillation envelope.

    The envelope takes the maximum of sup_values over successive windows
    of one orbital period, attributed to the time at which the maximum
    occurs, then replaces each point by the running maximum of all later
    points.  Fitting raw oscillating values would bias the slope, and
    window maxima alone still dip inside slow beat nulls when several
    orbital frequencies interfere; the running maximum is the tightest
    monotone majorant and isolates the decay rate.
    """
    t_lo, t_hi = window
    env_t, env_v = [], []
    edges = np.arange(t_lo, t_hi + period, period)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (report.times >= lo) & (report.times < min(hi, t_hi + 1e-12))
        if not np.any(sel):
            continue
        idx = np.argmax(report.sup_values[sel])
        env_t.append(report.times[sel][idx])
        env_v.append(report.sup_values[sel][idx])
    env_t = np.array(env_t)
    env_v = np.maximum.accumulate(np.array(env_v)[::-1])[::-1]
    ok = env_v > 0
    if ok.sum() < 8:
        raise FitError(
            f"envelope has {int(ok.sum())} positive points in window, need >= 8"
        )
    log_t = np.log(env_t[ok])
    log_v = np.log(env_v[ok])
    slope, intercept = np.polyfit(log_t, log_v, 1)
    resid = log_v - (slope * log_t + intercept)
    return replace(
        report,
        envelope_times=env_t,
        envelope=env_v,
        slope=float(slope),
        window=(float(t_lo), float(t_hi)),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def solution_bar(chart: OrbitChart, f0: InitialData, t: float, q, k):
    """Solution in action-angle coordinates: fbar0(Q + c(K) t, K)."""
    return f0.value_bar(np.asarray(q, dtype=float) + chart.c_of_k(k) * t, k)


@dataclass
class VectorFieldProbe:
    """Sup norms of f, Yf, Y^2 f plus plain-derivative contrasts."""

    t: float
    sup: dict[int, float]
    dq_sup: float
    dk_sup: float
    fd_steps: tuple[float, float]


def vector_field_norms(
    chart: OrbitChart,
    params: PotentialParams,
    f0: InitialData,
    t: float,
    dq: float = 1e-3,
    dk: float = 1e-3,
    n_q: int = 96,
    n_k: int = 81,
    validate: bool = True,
    fd_rtol: float = 0.01,
) -> VectorFieldProbe:
    """Apply Y = t c'(K) d_Q - d_K by centered differences on a sample grid.

    Y^2 nests the same stencil.  With ``validate`` the probe repeats the
    computation at half steps and requires the sup norms to agree to
    ``fd_rtol`` relative, guarding against under-resolved differences.
    """
    qs = np.linspace(0.0, 2.0 * np.pi, n_q, endpoint=False)
    ks = np.linspace(f0.h_min, f0.h_max, n_k)
    qq, kk = np.meshgrid(qs, ks, indexing="ij")

    def f(q, k):
        return solution_bar(chart, f0, t, q, k)

    def apply_y(g, hq, hk):
        def yg(q, k):
            dq_term = (g(q + hq, k) - g(q - hq, k)) / (2.0 * hq)
            dk_term = (g(q, k + hk) - g(q, k - hk)) / (2.0 * hk)
            return t * chart.c_prime_of_k(k) * dq_term - dk_term
        return yg

    def measure(hq, hk):
        y1 = apply_y(f, hq, hk)
        y2 = apply_y(y1, hq, hk)
        s0 = float(np.max(np.abs(f(qq, kk))))
        s1 = float(np.max(np.abs(y1(qq, kk))))
        s2 = float(np.max(np.abs(y2(qq, kk))))
        dq_sup = float(np.max(np.abs((f(qq + hq, kk) - f(qq - hq, kk)) / (2.0 * hq))))
        dk_sup = float(np.max(np.abs((f(qq, kk + hk) - f(qq, kk - hk)) / (2.0 * hk))))
        return s0, s1, s2, dq_sup, dk_sup

    base = measure(dq, dk)
    if validate:
        fine = measure(dq / 2.0, dk / 2.0)
        for coarse_v, fine_v in zip(base[1:3], fine[1:3]):
            scale = max(abs(fine_v), 1e-300)
            if abs(coarse_v - fine_v) / scale > fd_rtol:
                raise FDValidationError(
                    f"finite-difference probe not converged at steps ({dq}, {dk})"
                )
    return VectorFieldProbe(
        t=t,
        sup={0: base[0], 1: base[1], 2: base[2]},
        dq_sup=base[3],
        dk_sup=base[4],
        fd_steps=(dq, dk),
    )


@dataclass
class SpectrumEntry:
    """Angle-Fourier coefficients of fbar at one (t, K) pair.

    ``coefficients[k]`` is fhat_k for k = 0..k_max; ``g_coefficients``
    holds ghat_k = fhat_k / (i k) for k = 1..k_max (the k = 0 mode of g
    is absent by construction).
    """

    t: float
    k_energy: float
    coefficients: np.ndarray
    g_coefficients: np.ndarray


def q_fourier_spectrum(
    chart: OrbitChart,
    params: PotentialParams,
    f0: InitialData,
    t: float,
    k_energy: float,
    k_max: int = 8,
    n_q: int = 64,
) -> SpectrumEntry:
    """Discrete Fourier coefficients of Q -> fbar(t, Q, K) at fixed K.

    For the built-in data the exact evolution is a phase rotation:
    fhat_k(t) = fhat_k(0) * exp(i k c(K) t).
    """
    if n_q < 4 * k_max:
        raise ValueError("n_q must be >= 4 * k_max")
    qs = np.arange(n_q) * (2.0 * np.pi / n_q)
    vals = solution_bar(chart, f0, t, qs, k_energy)
    coeffs = np.fft.rfft(vals) / n_q
    coeffs = coeffs[: k_max + 1]
    modes = np.arange(1, k_max + 1)
    g = coeffs[1:] / (1j * modes)
    return SpectrumEntry(t=t, k_energy=k_energy, coefficients=coeffs, g_coefficients=g)
