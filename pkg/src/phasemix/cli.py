"""Command-line front end: ``phasemix chart|evolve|decay|validate``.

Configuration is a single JSON document; command-line ``--set key=value``
pairs override file keys.  Grids and series are emitted as CSV with a
header row and 17-significant-digit decimals, reports as JSON, so any
plotting stack can consume them.  Runs are deterministic for a fixed
config (fixed formatting, fixed seed).

Exit codes: 0 success, 1 failed invariant (validate), 2 configuration
error, 3 convergence or fit failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .action_angle import (
    build_chart,
    chart_range_for_support,
    compute_c,
    compute_c_prime,
    from_action_angle,
)
from .flow import FlowSpec, flow_map, orbit_period
from .mixing import FitError, fit_decay, q_fourier_spectrum, sup_phi_t
from .moments import MomentCalculator, spatial_grid
from .potential import PotentialParams, invert_phi, phi as potential_phi
from .transport import (
    actionangle_evaluator,
    evaluate_f_actionangle,
    evaluate_f_characteristic,
    make_initial_data,
)

__all__ = ["ExperimentConfig", "ConfigError", "ConvergenceError", "main"]

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3


class ConfigError(ValueError):
    """Malformed or out-of-range experiment configuration."""


class ConvergenceError(RuntimeError):
    """A quadrature or fit did not meet its convergence requirement."""


@dataclass
class ExperimentConfig:
    """Full experiment description; round-trips losslessly through JSON."""

    epsilon: float = 0.1
    c_s: float = 0.5
    alpha: float = 0.5
    m: int = 1
    n_k: int = 64
    n_chi: int = 512
    grid_points: int = 201
    v_quad: int = 128
    t_max: float = 200.0
    samples_per_period: float = 8.0
    fit_window: tuple[float, float] = (20.0, 200.0)
    evolve_samples: int = 41
    fd_dt: float = 1e-3
    include_control: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ConfigError("epsilon must be >= 0")
        if not 0 < self.c_s < 1:
            raise ConfigError("c_s must lie in (0, 1)")
        if not 0 <= self.alpha < 1:
            raise ConfigError("alpha must lie in [0, 1)")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.t_max <= 0 or self.samples_per_period <= 0:
            raise ConfigError("time schedule parameters must be positive")
        lo, hi = self.fit_window
        if not 0 < lo < hi <= self.t_max:
            raise ConfigError("fit_window must satisfy 0 < lo < hi <= t_max")
        self.fit_window = (float(lo), float(hi))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["fit_window"] = list(self.fit_window)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown config key: {key!r}")
        data = dict(data)
        if "fit_window" in data:
            fw = data["fit_window"]
            if not (isinstance(fw, (list, tuple)) and len(fw) == 2):
                raise ConfigError("fit_window must be a two-element list")
            data["fit_window"] = (float(fw[0]), float(fw[1]))
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: str | None, overrides: list[str] | None) -> ExperimentConfig:
    data: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        if key not in fields:
            raise ConfigError(f"unknown config key: {key!r}")
        try:
            data[key] = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--set {key}: value is not valid JSON: {raw!r}") from exc
    return ExperimentConfig.from_dict(data)


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


def _build(cfg: ExperimentConfig):
    params = PotentialParams(cfg.epsilon)
    k_min, k_max = chart_range_for_support(cfg.c_s)
    chart = build_chart(params, k_min, k_max, n_k=cfg.n_k, n_chi=cfg.n_chi)
    f0 = make_initial_data(cfg.c_s, cfg.alpha, cfg.m, params, chart)
    return params, chart, f0


def _calculator(cfg: ExperimentConfig, params, chart, f0) -> MomentCalculator:
    return MomentCalculator(
        actionangle_evaluator(chart, params, f0), params, cfg.c_s, n_quad=cfg.v_quad
    )


def _orbital_period(cfg: ExperimentConfig, chart) -> float:
    k_mid = 0.5 * (cfg.c_s + 1.0 / cfg.c_s)
    return 2.0 * np.pi / float(chart.c_of_k(k_mid))


def time_schedule(t_max: float, period: float, samples_per_period: float) -> np.ndarray:
    step = period / samples_per_period
    n = int(np.floor(t_max / step)) + 1
    return step * np.arange(n)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_chart(cfg: ExperimentConfig, out: Path) -> int:
    params, chart, _ = _build(cfg)

    # Convergence evidence: the closed-orbit quadrature must be
    # insensitive to node doubling at the configured resolution.
    probes = np.linspace(chart.k_min, chart.k_max, 5)
    n_quad = max(16, cfg.n_chi)
    c_base = np.asarray(compute_c(params, probes, n_quad=n_quad))
    c_fine = np.asarray(compute_c(params, probes, n_quad=2 * n_quad))
    max_rel = float(np.max(np.abs(c_fine - c_base) / np.abs(c_fine)))

    _write_csv(
        out / "chart.csv",
        ["K", "c", "c_prime"],
        zip(chart.k_grid, chart.c, chart.c_prime),
    )
    _write_json(
        out / "chart_summary.json",
        {
            "delta": chart.delta,
            "k_min": chart.k_min,
            "k_max": chart.k_max,
            "n_k": cfg.n_k,
            "n_chi": cfg.n_chi,
            "convergence": {
                "n_quad": n_quad,
                "n_quad_doubled": 2 * n_quad,
                "max_rel_change": max_rel,
            },
        },
    )
    if max_rel > 1e-10:
        raise ConvergenceError(
            f"frequency quadrature changed by {max_rel:.3e} under node doubling"
        )
    return EXIT_OK


def _validation_points(cfg: ExperimentConfig, chart, params, n: int = 30):
    rng = np.random.default_rng(cfg.seed)
    ks = rng.uniform(cfg.c_s, 1.0 / cfg.c_s, n)
    qs = rng.uniform(-np.pi, np.pi, n)
    return from_action_angle(chart, params, qs, ks)


def cmd_evolve(cfg: ExperimentConfig, out: Path, validate: bool) -> int:
    params, chart, f0 = _build(cfg)
    calc = _calculator(cfg, params, chart, f0)
    grid = spatial_grid(params, cfg.c_s, cfg.grid_points)
    times = np.linspace(0.0, cfg.t_max, cfg.evolve_samples)
    series = calc.series(times, grid)

    rows = []
    for i, t in enumerate(series.times):
        for k, x in enumerate(series.x):
            rows.append(
                (t, x, series.rho[i, k], series.j[i, k], series.phi[i, k], series.phi_t[i, k])
            )
    _write_csv(out / "evolve.csv", ["t", "x", "rho", "j", "phi", "phi_t"], rows)

    if validate:
        xs, vs = _validation_points(cfg, chart, params)
        worst = 0.0
        for t in (1.0, 10.0):
            aa = evaluate_f_actionangle(chart, params, f0, t, xs, vs)
            ch = evaluate_f_characteristic(params, f0, t, xs, vs)
            worst = max(worst, float(np.max(np.abs(aa - ch))))
        if worst > 1e-4:
            raise ConvergenceError(
                f"solver cross-validation failed: max |f_aa - f_char| = {worst:.3e}"
            )
    return EXIT_OK


def _self_test_report(mode: str) -> dict:
    times = np.geomspace(1.0, 1000.0, 400)
    if mode == "power-law":
        sup = times**-2.0
    elif mode == "oscillating":
        sup = times**-1.0 * (2.0 + np.sin(times))
    else:
        raise ConfigError(f"unknown self-test mode: {mode!r}")
    from .mixing import DecayReport

    report = DecayReport(times=times, sup_values=sup, tail_slopes=np.zeros_like(sup))
    fitted = fit_decay(report, (1.0, 1000.0))
    return {
        "mode": mode,
        "slope": fitted.slope,
        "residual": fitted.residual,
        "window": list(fitted.window),
    }


def _decay_payload(cfg: ExperimentConfig) -> dict:
    params, chart, f0 = _build(cfg)
    calc = _calculator(cfg, params, chart, f0)
    grid = spatial_grid(params, cfg.c_s, cfg.grid_points)
    period = _orbital_period(cfg, chart)
    times = time_schedule(cfg.t_max, period, cfg.samples_per_period)
    report = sup_phi_t(calc, grid, times)
    fitted = fit_decay(report, cfg.fit_window, period=period)

    early = report.sup_values[times <= period]
    late = report.sup_values[times >= cfg.t_max - period]
    ratio = float(late.max() / early.max()) if early.max() > 0 else 0.0
    return {
        "slope": fitted.slope,
        "window": list(fitted.window),
        "residual": fitted.residual,
        "envelope": [[t, v] for t, v in zip(fitted.envelope_times, fitted.envelope)],
        "tail_slope": [[t, v] for t, v in zip(report.times, report.tail_slopes)],
        "late_early_ratio": ratio,
        "decays": bool(ratio < 0.8),
        "oscillation_period": period,
    }


def cmd_decay(cfg: ExperimentConfig, out: Path, self_test: str | None) -> int:
    if self_test is not None:
        payload = _self_test_report(self_test)
        _write_json(out / "decay_selftest.json", payload)
        print(json.dumps(payload, sort_keys=True))
        return EXIT_OK
    payload = _decay_payload(cfg)
    if cfg.include_control:
        control_cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "epsilon": 0.0})
        control = _decay_payload(control_cfg)
        payload["control"] = {
            "late_early_ratio": control["late_early_ratio"],
            "decays": control["decays"],
        }
    _write_json(out / "decay.json", payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validation suite


def _invariant_checks(cfg: ExperimentConfig):
    """Yield (name, runner) pairs; each runner returns a result dict."""
    params = PotentialParams(cfg.epsilon)

    def result(name, tolerance, measured, passed=None):
        if passed is None:
            passed = bool(measured <= tolerance)
        return {
            "name": name,
            "tolerance": tolerance,
            "measured": float(measured),
            "passed": bool(passed),
        }

    def potential_round_trip():
        h = np.geomspace(1e-6, 1e3, 200)
        err = np.max(np.abs(potential_phi(params, invert_phi(params, h)) - h) / h)
        return result("potential_round_trip", 1e-12, err)

    def flow_reversibility():
        spec = FlowSpec(method="adaptive", tolerance=1e-10)
        x1, v1 = flow_map(params, 1.0, 0.3, 10.0, spec)
        x2, v2 = flow_map(params, x1, v1, -10.0, spec)
        err = max(abs(x2 - 1.0), abs(v2 - 0.3))
        return result("flow_reversibility", 1e-8, err)

    def frequency_period_duality():
        worst = 0.0
        for h in (0.5, 1.0, 2.0):
            c = float(compute_c(params, h, n_quad=max(16, cfg.n_chi)))
            worst = max(worst, abs(c * orbit_period(params, h) - 2 * np.pi) / (2 * np.pi))
        return result("frequency_period_duality", 1e-6, worst)

    def c_prime_vs_fd():
        worst = 0.0
        step = 1e-4
        for h in (0.5, 1.0, 2.0):
            fd = (compute_c(params, h + step) - compute_c(params, h - step)) / (2 * step)
            worst = max(worst, abs(float(compute_c_prime(params, h)) - float(fd)))
        return result("c_prime_vs_fd", 1e-6, worst)

    def chart_checks():
        _, chart, _ = _build(cfg)
        geom = np.max(np.abs(chart.q_from_chi(np.pi / 2, chart.k_grid) - np.pi / 2))
        chi = np.linspace(-3.0, 3.0, 41)
        ks = np.linspace(chart.k_min, chart.k_max, 11)[:, None]
        rt = np.max(np.abs(chart.chi_from_q(chart.q_from_chi(chi, ks), ks) - chi))
        return result("chart_geometry_roundtrip", 1e-9, max(geom, rt))

    def chart_convergence():
        _, chart, _ = _build(cfg)
        fine = build_chart(
            params, chart.k_min, chart.k_max, n_k=2 * cfg.n_k, n_chi=2 * cfg.n_chi
        )
        ks = np.linspace(chart.k_min, chart.k_max, 17)
        chi = np.linspace(0.1, 3.0, 13)[:, None]
        dq = np.max(np.abs(chart.q_from_chi(chi, ks) - fine.q_from_chi(chi, ks)))
        dc = np.max(np.abs(chart.c_of_k(ks) - fine.c_of_k(ks)))
        return result("chart_convergence", 1e-9, max(float(dq), float(dc)))

    def jacobian_mass():
        _, chart, f0 = _build(cfg)
        calc = _calculator(cfg, params, chart, f0)
        grid_nodes, grid_weights = np.polynomial.legendre.leggauss(201)
        x = calc.x_max * grid_nodes
        mass_xv = calc.x_max * float(calc.density(0.0, x) @ grid_weights)
        k_nodes, k_weights = np.polynomial.legendre.leggauss(128)
        k = 0.5 * (f0.h_min + f0.h_max) + 0.5 * (f0.h_max - f0.h_min) * k_nodes
        integrand = f0.bump(k) / chart.c_of_k(k)
        mass_qk = 2.0 * np.pi * 0.5 * (f0.h_max - f0.h_min) * float(integrand @ k_weights)
        err = abs(mass_xv - mass_qk) / abs(mass_qk)
        return result("jacobian_mass_equivalence", 1e-6, err)

    def mass_conservation():
        _, chart, f0 = _build(cfg)
        calc = _calculator(cfg, params, chart, f0)
        nodes, weights = np.polynomial.legendre.leggauss(201)
        x = calc.x_max * nodes

        def mass(t):
            return calc.x_max * float(calc.density(t, x) @ weights)

        m0 = mass(0.0)
        err = abs(mass(50.0) - m0) / abs(m0)
        return result("mass_conservation", 1e-6, err)

    def cross_solver():
        _, chart, f0 = _build(cfg)
        xs, vs = _validation_points(cfg, chart, params)
        worst = 0.0
        for t in (1.0, 10.0):
            aa = evaluate_f_actionangle(chart, params, f0, t, xs, vs)
            ch = evaluate_f_characteristic(params, f0, t, xs, vs)
            worst = max(worst, float(np.max(np.abs(aa - ch))))
        return result("cross_solver_equivalence", 1e-4, worst)

    def phi_t_routes():
        _, chart, f0 = _build(cfg)
        # 512 velocity nodes: the quadrature floor must sit below the
        # O(dt**2) difference for the convergence ratio to be visible.
        calc = MomentCalculator(
            actionangle_evaluator(chart, params, f0), params, cfg.c_s, n_quad=512
        )
        grid = spatial_grid(params, cfg.c_s, 801)
        t = 5.0
        ref = calc.phi_t_reconstruct(t, grid)
        err = [
            float(np.max(np.abs(calc.phi_t_fd(t, dt, grid) - ref)))
            for dt in (2e-3, 1e-3)
        ]
        ratio = err[0] / err[1] if err[1] > 0 else np.inf
        return result("phi_t_route_equivalence", 0.0, ratio, passed=3.0 <= ratio <= 5.0)

    def spectrum_translation():
        _, chart, f0 = _build(cfg)
        k_mid = 0.5 * (f0.h_min + f0.h_max)
        s0 = q_fourier_spectrum(chart, params, f0, 0.0, k_mid)
        s1 = q_fourier_spectrum(chart, params, f0, 10.0, k_mid)
        mod = float(np.max(np.abs(np.abs(s1.coefficients) - np.abs(s0.coefficients))))
        c = float(chart.c_of_k(k_mid))
        k_mode = f0.m
        expected = (k_mode * c * 10.0) % (2 * np.pi)
        got = float(
            np.angle(s1.coefficients[k_mode] / s0.coefficients[k_mode]) % (2 * np.pi)
        )
        phase_err = abs((got - expected + np.pi) % (2 * np.pi) - np.pi)
        return result("spectrum_translation", 1e-8, max(mod, phase_err))

    yield from [
        ("potential_round_trip", potential_round_trip),
        ("flow_reversibility", flow_reversibility),
        ("frequency_period_duality", frequency_period_duality),
        ("c_prime_vs_fd", c_prime_vs_fd),
        ("chart_geometry_roundtrip", chart_checks),
        ("chart_convergence", chart_convergence),
        ("jacobian_mass_equivalence", jacobian_mass),
        ("mass_conservation", mass_conservation),
        ("cross_solver_equivalence", cross_solver),
        ("phi_t_route_equivalence", phi_t_routes),
        ("spectrum_translation", spectrum_translation),
    ]


def cmd_validate(cfg: ExperimentConfig, out: Path, list_only: bool) -> int:
    checks = list(_invariant_checks(cfg))
    if list_only:
        for name, _ in checks:
            print(name)
        return EXIT_OK
    results = []
    for name, runner in checks:
        try:
            res = runner()
        except Exception as exc:  # a crash counts as a failed invariant
            res = {"name": name, "tolerance": None, "measured": None,
                   "passed": False, "error": str(exc)}
        results.append(res)
        status = "pass" if res["passed"] else "FAIL"
        print(f"{status}  {name}  measured={res['measured']}")
    _write_json(out / "validate.json", {"checks": results})
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_INVARIANT


# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasemix",
        description="Phase-mixing experiments for 1D transport in a quartic trap",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("chart", "evolve", "decay", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="path to a JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--set", action="append", dest="overrides", metavar="KEY=VALUE",
                       help="override a config key (JSON-encoded value)")
        if name == "evolve":
            p.add_argument("--validate", action="store_true",
                           help="cross-check the two solution routes")
        if name == "decay":
            p.add_argument("--self-test", dest="self_test",
                           choices=["power-law", "oscillating"],
                           help="fit a synthetic series with known exponent")
        if name == "validate":
            p.add_argument("--list", action="store_true", dest="list_only",
                           help="enumerate checks without running them")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "chart":
            return cmd_chart(cfg, out)
        if args.command == "evolve":
            return cmd_evolve(cfg, out, args.validate)
        if args.command == "decay":
            return cmd_decay(cfg, out, args.self_test)
        return cmd_validate(cfg, out, args.list_only)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FitError) as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
