"""Scenario runner: every computation in the library as a CLI subcommand.

Configs are JSON; named presets cover the standard scenarios so that
`gelkit gelpoint --preset a2b5-directed` works with no file.  All output is
CSV (17 significant digits, '.' decimal, header row) plus a small JSON
report where a single record is more natural.  Exit codes: 0 success,
2 configuration problem, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from .chemistry import (
    FunctionalityVector,
    MonomerDistribution,
    SystemSpec,
    WeightMatrix,
    require_valid,
)
from .degrees import unreacted_fraction
from .errors import ConfigError, CriterionUndefined, GelkitError, SpecificationError
from .gelation import CriterionKind, find_gel_time
from .kinetics import DEFAULT_RTOL, conversion, default_horizon, integrate_moments
from .molweight import size_series, weight_avg_mw
from .oracle import giant_onset, simulate

DEFAULT_SEED = 20260801


@dataclass(frozen=True)
class RunSettings:
    t_end: float | None = None
    tolerance: float = DEFAULT_RTOL
    series_order: int = 256
    samples: int = 201
    criterion: str = "general_determinant"
    mwd_time: float | None = None
    mw_samples: int = 64


@dataclass(frozen=True)
class SweepSettings:
    parameters: tuple = ()
    grids: tuple = ()

    @property
    def empty(self) -> bool:
        return not self.parameters


@dataclass(frozen=True)
class McSettings:
    n: int = 20_000
    replicas: int = 4
    seed: int = DEFAULT_SEED
    t_end: float | None = None
    samples: int = 41


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "."


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemSpec
    run: RunSettings = RunSettings()
    sweep: SweepSettings = SweepSettings()
    mc: McSettings = McSettings()
    output: OutputSettings = OutputSettings()
    preset: str | None = None
    alpha: float | None = None
    beta: float | None = None
    w: float | None = None


def _fraction(name, value, default):
    if value is None:
        return default
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{name} must lie strictly between 0 and 1, got {value!r}")
    return float(value)


def _two_type_spec(species, w_self):
    entries = tuple(
        (FunctionalityVector(tuple(counts)), float(frac)) for counts, frac in species
    )
    dist = MonomerDistribution(entries)
    weights = WeightMatrix.from_rows(((0.0, 1.0), (1.0, float(w_self))))
    return SystemSpec(distribution=dist, weights=weights)


def _grid(lo, hi, count):
    return tuple(float(x) for x in np.linspace(lo, hi, count))


def _preset_single_2_5(alpha, beta, w):
    if alpha is not None or beta is not None:
        raise ConfigError("preset single-2-5 has a single species; alpha/beta do not apply")
    wv = 1.0 if w is None else float(w)
    if wv < 0.0:
        raise ConfigError(f"w must be non-negative, got {w!r}")
    spec = _two_type_spec((((2, 5), 1.0),), wv)
    sweep = SweepSettings(parameters=("w",), grids=(_grid(0.1, 2.0, 20),))
    return ScenarioConfig(system=spec, sweep=sweep, preset="single-2-5", w=wv)


def _preset_a2b5_directed(alpha, beta, w):
    if beta is not None:
        raise ConfigError("preset a2b5-directed has two species; beta does not apply")
    if w is not None:
        raise ConfigError("preset a2b5-directed fixes w = 0; use a2-selfb5 to vary it")
    a = _fraction("alpha", alpha, 0.5)
    spec = _two_type_spec((((2, 0), a), ((0, 5), 1.0 - a)), 0.0)
    sweep = SweepSettings(parameters=("alpha",), grids=(_grid(0.01, 0.99, 99),))
    return ScenarioConfig(system=spec, sweep=sweep, preset="a2b5-directed", alpha=a)


def _preset_a2_selfb5(alpha, beta, w):
    if beta is not None:
        raise ConfigError("preset a2-selfb5 has two species; beta does not apply")
    a = _fraction("alpha", alpha, 0.5)
    wv = 1.0 if w is None else float(w)
    if wv < 0.0:
        raise ConfigError(f"w must be non-negative, got {w!r}")
    spec = _two_type_spec((((2, 0), a), ((0, 5), 1.0 - a)), wv)
    sweep = SweepSettings(parameters=("alpha",), grids=(_grid(0.01, 0.99, 99),))
    return ScenarioConfig(system=spec, sweep=sweep, preset="a2-selfb5", alpha=a, w=wv)


def _preset_three_type(alpha, beta, w):
    a = _fraction("alpha", alpha, 0.25)
    b = _fraction("beta", beta, 0.25)
    rest = 1.0 - a - b
    if rest <= 0.0:
        raise ConfigError(f"alpha + beta must stay below 1, got {a} + {b}")
    wv = 0.1 if w is None else float(w)
    if wv < 0.0:
        raise ConfigError(f"w must be non-negative, got {w!r}")
    spec = _two_type_spec((((2, 0), a), ((0, 2), b), ((0, 5), rest)), wv)
    sweep = SweepSettings(
        parameters=("alpha", "beta"),
        grids=(_grid(0.05, 0.9, 18), _grid(0.05, 0.9, 18)),
    )
    return ScenarioConfig(
        system=spec, sweep=sweep, preset="three-type-2-2-5", alpha=a, beta=b, w=wv
    )


PRESETS = {
    "single-2-5": _preset_single_2_5,
    "a2b5-directed": _preset_a2b5_directed,
    "a2-selfb5": _preset_a2_selfb5,
    "three-type-2-2-5": _preset_three_type,
}


def build_preset(name: str, alpha=None, beta=None, w=None) -> ScenarioConfig:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; available: {known}")
    return PRESETS[name](alpha, beta, w)


def _check_keys(section: dict, allowed, where: str):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(sorted(unknown))}")


def _parse_system(section) -> SystemSpec:
    if not isinstance(section, dict):
        raise ConfigError("system must be an object with species and weights")
    _check_keys(section, ("species", "weights"), "system")
    if "species" not in section or "weights" not in section:
        raise ConfigError("system needs both species and weights")
    entries = []
    for row in section["species"]:
        _check_keys(row, ("functionality", "fraction"), "system.species entry")
        counts = tuple(int(c) for c in row["functionality"])
        entries.append((FunctionalityVector(counts), float(row["fraction"])))
    dist = MonomerDistribution(tuple(entries))
    weights = WeightMatrix.from_rows(tuple(tuple(float(v) for v in r) for r in section["weights"]))
    return SystemSpec(distribution=dist, weights=weights)


def _parse_run(section) -> RunSettings:
    _check_keys(
        section,
        ("t_end", "tolerance", "series_order", "samples", "criterion", "mwd_time", "mw_samples"),
        "run",
    )
    settings = RunSettings(
        t_end=None if section.get("t_end") is None else float(section["t_end"]),
        tolerance=float(section.get("tolerance", DEFAULT_RTOL)),
        series_order=int(section.get("series_order", 256)),
        samples=int(section.get("samples", 201)),
        criterion=str(section.get("criterion", "general_determinant")),
        mwd_time=None if section.get("mwd_time") is None else float(section["mwd_time"]),
        mw_samples=int(section.get("mw_samples", 64)),
    )
    try:
        CriterionKind(settings.criterion)
    except ValueError:
        raise ConfigError(f"unknown criterion {settings.criterion!r}") from None
    if settings.tolerance <= 0.0:
        raise ConfigError("run.tolerance must be positive")
    if settings.samples < 2:
        raise ConfigError("run.samples must be at least 2")
    return settings


def _parse_sweep(section) -> SweepSettings:
    _check_keys(section, ("parameters",), "sweep")
    params = section.get("parameters", [])
    names = []
    grids = []
    for entry in params:
        _check_keys(entry, ("name", "values", "start", "stop", "count"), "sweep parameter")
        name = entry.get("name")
        if name not in ("alpha", "beta", "w"):
            raise ConfigError(f"sweep parameter must be alpha, beta, or w, got {name!r}")
        if "values" in entry:
            values = tuple(float(v) for v in entry["values"])
        else:
            missing = [k for k in ("start", "stop", "count") if k not in entry]
            if missing:
                raise ConfigError(f"sweep parameter {name} missing {', '.join(missing)}")
            values = _grid(float(entry["start"]), float(entry["stop"]), int(entry["count"]))
        if not values:
            raise ConfigError(f"sweep grid for {name} is empty")
        names.append(name)
        grids.append(values)
    if len(set(names)) != len(names):
        raise ConfigError("sweep parameters must be distinct")
    if len(names) > 2:
        raise ConfigError("at most two sweep parameters are supported")
    return SweepSettings(parameters=tuple(names), grids=tuple(grids))


def _parse_mc(section) -> McSettings:
    _check_keys(section, ("n", "replicas", "seed", "t_end", "samples"), "mc")
    settings = McSettings(
        n=int(section.get("n", 20_000)),
        replicas=int(section.get("replicas", 4)),
        seed=int(section.get("seed", DEFAULT_SEED)),
        t_end=None if section.get("t_end") is None else float(section["t_end"]),
        samples=int(section.get("samples", 41)),
    )
    if settings.replicas < 1:
        raise ConfigError("mc.replicas must be at least 1")
    if settings.samples < 2:
        raise ConfigError("mc.samples must be at least 2")
    return settings


def parse_config(data: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(
        data,
        ("preset", "alpha", "beta", "w", "system", "run", "sweep", "mc", "output"),
        "config",
    )
    preset = data.get("preset")
    if preset is not None:
        cfg = build_preset(preset, data.get("alpha"), data.get("beta"), data.get("w"))
        if "system" in data:
            raise ConfigError("give either a preset or an explicit system, not both")
    else:
        if "system" not in data:
            raise ConfigError("config needs a preset name or a system section")
        for key in ("alpha", "beta", "w"):
            if data.get(key) is not None:
                raise ConfigError(f"{key} only applies when a preset is named")
        cfg = ScenarioConfig(system=_parse_system(data["system"]))
    if "run" in data:
        cfg = replace(cfg, run=_parse_run(data["run"]))
    if "sweep" in data:
        cfg = replace(cfg, sweep=_parse_sweep(data["sweep"]))
    if "mc" in data:
        cfg = replace(cfg, mc=_parse_mc(data["mc"]))
    if "output" in data:
        _check_keys(data["output"], ("directory",), "output")
        cfg = replace(cfg, output=OutputSettings(directory=str(data["output"].get("directory", "."))))
    return cfg


def serialize_config(cfg: ScenarioConfig) -> dict:
    """Inverse of parse_config: parse(serialize(cfg)) reproduces cfg."""
    data: dict = {}
    if cfg.preset is not None:
        data["preset"] = cfg.preset
        for key in ("alpha", "beta", "w"):
            value = getattr(cfg, key)
            if value is not None:
                data[key] = value
    else:
        data["system"] = {
            "species": [
                {"functionality": list(fv.counts), "fraction": frac}
                for fv, frac in cfg.system.distribution.entries
            ],
            "weights": [list(row) for row in cfg.system.weights.rows],
        }
    data["run"] = {
        "t_end": cfg.run.t_end,
        "tolerance": cfg.run.tolerance,
        "series_order": cfg.run.series_order,
        "samples": cfg.run.samples,
        "criterion": cfg.run.criterion,
        "mwd_time": cfg.run.mwd_time,
        "mw_samples": cfg.run.mw_samples,
    }
    data["sweep"] = {
        "parameters": [
            {"name": name, "values": list(values)}
            for name, values in zip(cfg.sweep.parameters, cfg.sweep.grids)
        ]
    }
    data["mc"] = {
        "n": cfg.mc.n,
        "replicas": cfg.mc.replicas,
        "seed": cfg.mc.seed,
        "t_end": cfg.mc.t_end,
        "samples": cfg.mc.samples,
    }
    data["output"] = {"directory": cfg.output.directory}
    return data


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path: str, header, rows) -> int:
    count = 0
    with open(path, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")
            count += 1
    return count


def _worker_count() -> int:
    raw = os.environ.get("GELKIT_THREADS", "").strip()
    if raw:
        try:
            capped = int(raw)
        except ValueError:
            raise ConfigError(f"GELKIT_THREADS must be an integer, got {raw!r}") from None
        return max(1, capped)
    return max(1, min(os.cpu_count() or 1, 8))


def _run_tasks(worker, tasks):
    workers = _worker_count()
    if workers == 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(worker, tasks))


def _integrate(cfg: ScenarioConfig):
    require_valid(cfg.system)
    return integrate_moments(cfg.system, t_end=cfg.run.t_end, tolerance=cfg.run.tolerance)


def cmd_trajectory(cfg: ScenarioConfig, out_dir: str) -> int:
    traj = _integrate(cfg)
    r = cfg.system.r
    grid = np.linspace(0.0, traj.t_end, cfg.run.samples)
    rows = []
    for t in grid:
        mu = traj.mu_at(float(t))
        p = conversion(traj, float(t)).p
        rows.append((t, *mu, *p))
    header = ["t"] + [f"mu_{k + 1}" for k in range(r)] + [f"p_{k + 1}" for k in range(r)]
    n = _write_csv(os.path.join(out_dir, "trajectory.csv"), header, rows)
    print(f"trajectory.csv: {n} rows up to t = {traj.t_end:.6g} (stopped: {traj.stopped})")
    return 0


def _gel_summary(cfg: ScenarioConfig):
    traj = _integrate(cfg)
    report = find_gel_time(traj, CriterionKind(cfg.run.criterion))
    pcrit = None
    if report.gelled:
        pcrit = 1.0 - unreacted_fraction(cfg.system, report.conversions_at_gel)
    return traj, report, pcrit


def cmd_gelpoint(cfg: ScenarioConfig, out_dir: str) -> int:
    _, report, pcrit = _gel_summary(cfg)
    payload = {
        "status": report.status,
        "criterion": report.criterion.value,
        "t_gel": report.t_gel,
        "p_at_gel": list(report.conversions_at_gel.p) if report.gelled else None,
        "pCrit": pcrit,
        "bracket": list(report.bracket) if report.bracket else None,
        "width": report.width,
        "horizon": report.horizon,
    }
    with open(os.path.join(out_dir, "gelpoint.json"), "w") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    r = cfg.system.r
    header = ["t_gel"] + [f"p_{k + 1}" for k in range(r)] + ["pCrit", "status", "criterion"]
    p_vals = report.conversions_at_gel.p if report.gelled else (math.nan,) * r
    row = (
        report.t_gel if report.gelled else math.nan,
        *p_vals,
        pcrit if pcrit is not None else math.nan,
        report.status,
        report.criterion.value,
    )
    _write_csv(os.path.join(out_dir, "gelpoint.csv"), header, [row])
    print(f"gelpoint: {report.status}" + (f" at t = {report.t_gel:.9g}" if report.gelled else ""))
    return 0


def _sweep_point(task):
    name, base, names, values, tolerance, t_end, criterion = task
    params = dict(base)
    for key, value in zip(names, values):
        params[key] = value
    cfg = build_preset(name, params["alpha"], params["beta"], params["w"])
    traj = integrate_moments(cfg.system, t_end=t_end, tolerance=tolerance)
    try:
        report = find_gel_time(traj, CriterionKind(criterion))
    except CriterionUndefined:
        return values, math.nan, None, math.nan, "undefined"
    if not report.gelled:
        return values, math.nan, None, math.nan, "none within horizon"
    conv = report.conversions_at_gel
    pcrit = 1.0 - unreacted_fraction(cfg.system, conv)
    return values, report.t_gel, conv.p, pcrit, "gel"


def cmd_sweep(cfg: ScenarioConfig, out_dir: str) -> int:
    if cfg.preset is None:
        raise ConfigError("sweeps need a preset so grid parameters have meaning")
    if cfg.sweep.empty:
        raise ConfigError("sweep grid is empty")
    base = {"alpha": cfg.alpha, "beta": cfg.beta, "w": cfg.w}
    names = cfg.sweep.parameters
    tasks = []
    skipped = 0
    for combo in product(*cfg.sweep.grids):
        params = dict(base)
        for key, value in zip(names, combo):
            params[key] = value
        try:
            build_preset(cfg.preset, params["alpha"], params["beta"], params["w"])
        except (ConfigError, SpecificationError) as err:
            point = ", ".join(f"{k}={v:.6g}" for k, v in zip(names, combo))
            print(f"skipping infeasible point ({point}): {err}", file=sys.stderr)
            skipped += 1
            continue
        tasks.append(
            (cfg.preset, base, names, combo, cfg.run.tolerance, cfg.run.t_end, cfg.run.criterion)
        )
    results = _run_tasks(_sweep_point, tasks)
    r = cfg.system.r
    header = list(names) + ["t_gel"] + [f"p_{k + 1}" for k in range(r)] + ["pCrit", "status"]
    rows = []
    for values, t_gel, p_vals, pcrit, status in results:
        p_out = p_vals if p_vals is not None else (math.nan,) * r
        rows.append((*values, t_gel, *p_out, pcrit, status))
    n = _write_csv(os.path.join(out_dir, "sweep.csv"), header, rows)
    gelled = sum(1 for row in results if row[4] == "gel")
    print(f"sweep.csv: {n} points ({gelled} gel, {skipped} skipped)")
    return 0


def cmd_mwd(cfg: ScenarioConfig, out_dir: str) -> int:
    traj, report, _ = _gel_summary(cfg)
    if report.gelled:
        t_top = 0.95 * report.t_gel
    else:
        t_top = 0.95 * traj.t_end
    t_eval = cfg.run.mwd_time if cfg.run.mwd_time is not None else 0.5 * t_top / 0.95
    conv = conversion(traj, t_eval)
    dist = size_series(cfg.system, conv, s_max=cfg.run.series_order)
    _write_csv(
        os.path.join(out_dir, "sizedist.csv"),
        ["s", "w_s", "cumulative"],
        dist.rows(),
    )
    curve = []
    for t in np.linspace(0.0, t_top, cfg.run.mw_samples):
        mw = weight_avg_mw(cfg.system, conversion(traj, float(t)))
        curve.append((t, mw.mw))
    _write_csv(os.path.join(out_dir, "mw_curve.csv"), ["t", "mw"], curve)
    print(
        f"sizedist.csv: S = {dist.order} at t = {dist.t:.6g} "
        f"(tail mass {dist.tail_mass:.3g}); mw_curve.csv: {len(curve)} points"
    )
    return 0


def _mc_replica(task):
    spec, n, t_end, seed, sample_times = task
    run = simulate(spec, n, t_end, seed, sample_times=sample_times)
    onset = giant_onset(run)
    return run.sample_times, run.mu_hat, run.largest_fraction, run.susceptibility, {
        "seed": seed,
        "status": onset.status,
        "t_threshold": onset.t_threshold,
        "t_susceptibility_peak": onset.t_susceptibility_peak,
        "threshold_size": onset.threshold_size,
    }


def cmd_simulate(cfg: ScenarioConfig, out_dir: str) -> int:
    require_valid(cfg.system)
    t_end = cfg.mc.t_end
    if t_end is None:
        _, report, _ = _gel_summary(cfg)
        t_end = 2.0 * report.t_gel if report.gelled else default_horizon(cfg.system)
    sample_times = tuple(float(t) for t in np.linspace(0.0, t_end, cfg.mc.samples))
    seeds = [cfg.mc.seed + i for i in range(cfg.mc.replicas)]
    tasks = [(cfg.system, cfg.mc.n, t_end, seed, sample_times) for seed in seeds]
    results = _run_tasks(_mc_replica, tasks)

    r = cfg.system.r
    mu_cols = [f"mu_hat_{k + 1}" for k in range(r)]
    rep_rows = []
    for idx, (times, mu_hat, largest, chi, _) in enumerate(results):
        for row_t, row_mu, row_l, row_chi in zip(times, mu_hat, largest, chi):
            rep_rows.append((idx, row_t, *row_mu, row_l, row_chi))
    _write_csv(
        os.path.join(out_dir, "mc_replicas.csv"),
        ["replica", "t"] + mu_cols + ["largest_fraction", "susceptibility"],
        rep_rows,
    )

    times = results[0][0]
    summary_rows = []
    for j, t in enumerate(times):
        mu_mean = [
            sum(res[1][j][k] for res in results) / len(results) for k in range(r)
        ]
        l_mean = sum(res[2][j] for res in results) / len(results)
        chi_mean = sum(res[3][j] for res in results) / len(results)
        summary_rows.append((t, *mu_mean, l_mean, chi_mean))
    _write_csv(
        os.path.join(out_dir, "mc_summary.csv"),
        ["t"] + mu_cols + ["largest_fraction", "susceptibility"],
        summary_rows,
    )

    onsets = [res[4] for res in results]
    observed = sorted(
        o["t_threshold"] for o in onsets if o["t_threshold"] is not None
    )
    median = observed[len(observed) // 2] if observed else None
    with open(os.path.join(out_dir, "mc_onset.json"), "w") as handle:
        json.dump({"replicas": onsets, "median_t_threshold": median}, handle, indent=2)
        handle.write("\n")
    print(
        f"mc_summary.csv: {len(summary_rows)} samples x {len(results)} replicas, "
        f"N = {cfg.mc.n}, onset observed in {len(observed)}/{len(results)}"
    )
    return 0


COMMANDS = {
    "trajectory": cmd_trajectory,
    "gelpoint": cmd_gelpoint,
    "sweep": cmd_sweep,
    "mwd": cmd_mwd,
    "simulate": cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gelkit",
        description="bond kinetics, degree distributions, gel points, and size "
        "distributions for step-growth polymerizing systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON config file")
        cmd.add_argument("--preset", help=f"named scenario: {', '.join(sorted(PRESETS))}")
        cmd.add_argument("--out", help="output directory (default from config)")
        cmd.add_argument("--alpha", type=float, help="preset fraction parameter")
        cmd.add_argument("--beta", type=float, help="preset fraction parameter")
        cmd.add_argument("--w", type=float, help="self-bond weight for presets that vary it")
        cmd.add_argument("--seed", type=int, help="base seed for stochastic runs")
    return parser


def _load_config(args) -> ScenarioConfig:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("give exactly one of --config or --preset")
    if args.config:
        with open(args.config) as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as err:
                raise ConfigError(f"config is not valid JSON: {err}") from None
        cfg = parse_config(data)
        if any(v is not None for v in (args.alpha, args.beta, args.w)):
            if cfg.preset is None:
                raise ConfigError("alpha/beta/w overrides need a preset-based config")
            cfg_preset = build_preset(
                cfg.preset,
                args.alpha if args.alpha is not None else cfg.alpha,
                args.beta if args.beta is not None else cfg.beta,
                args.w if args.w is not None else cfg.w,
            )
            cfg = replace(
                cfg,
                system=cfg_preset.system,
                alpha=cfg_preset.alpha,
                beta=cfg_preset.beta,
                w=cfg_preset.w,
            )
    else:
        cfg = build_preset(args.preset, args.alpha, args.beta, args.w)
    if args.seed is not None:
        cfg = replace(cfg, mc=replace(cfg.mc, seed=args.seed))
    if args.out is not None:
        cfg = replace(cfg, output=OutputSettings(directory=args.out))
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        out_dir = cfg.output.directory
        os.makedirs(out_dir, exist_ok=True)
        return COMMANDS[args.command](cfg, out_dir)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ConfigError, SpecificationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except GelkitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
