"""Command-line surface: configure, run, persist, plot.

Every run owns one output directory containing config.json (the fully
resolved configuration, written first), one or more fixed-schema CSVs,
SVG renderings of them, and manifest.json (checksums, summary scalars,
timestamps) written last.  Exit codes: 0 success, 1 runtime failure,
2 usage error.  Flags override config-file values override defaults.

Re-running a subcommand with --config pointing at a previous run's
config.json (and a fresh --out) reproduces every CSV byte-identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import copy
import json
import sys

import numpy as np

from . import __version__
from .experiments import (
    STREAM_DISORDER,
    ModelSpec,
    _child_seed,
    estimate_growth_rate,
    run_barren_plateau,
    run_expressibility,
    run_trajectory_analysis,
    run_vqe,
    run_vqe_ensemble,
)
from .hamiltonian import build_ising, exact_spectrum, sample_syk, trace_h_squared, fit_trace_scaling
from .optim import AdamConfig, Constant, ExponentialDecay
from .output import utc_now, write_csv, write_json, write_manifest
from .plotting import emit_plot

import argparse


class UsageError(Exception):
    """Bad flags or config file contents; maps to exit code 2."""


EXPERIMENTS = (
    "bp",
    "rate",
    "vqe",
    "ensemble",
    "landscape",
    "express",
    "spectrum",
    "trh2fit",
)

_MODEL_SCHEMA = {"kind": "str", "g": "float", "seed": "int", "J": "float"}
_SCHEDULE_SCHEMA = {"kind": "str", "c": "float", "period": "int"}
_OPTIMIZER_SCHEMA = {
    "alpha": "float",
    "beta1": "float",
    "beta2": "float",
    "epsilon": "float",
    "steps": "int",
    "schedule": _SCHEDULE_SCHEMA,
}
_COMMON_SCHEMA = {"experiment": "str", "out_dir": "str", "master_seed": "int"}

_SCHEMAS = {
    "bp": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n": "int", "L": "int", "samples": "int"},
    "rate": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n": "int", "L_grid": "int_list", "samples": "int"},
    "vqe": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n": "int", "L": "int", "optimizer": _OPTIMIZER_SCHEMA, "fidelity_stride": "int"},
    "ensemble": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n": "int", "L": "int", "optimizer": _OPTIMIZER_SCHEMA, "fidelity_stride": "int", "runs": "int", "fresh_disorder": "bool"},
    "landscape": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n": "int", "L": "int", "optimizer": _OPTIMIZER_SCHEMA, "fidelity_stride": "int", "k": "int"},
    "express": {**_COMMON_SCHEMA, "n": "int", "L": "int", "optimizer": _OPTIMIZER_SCHEMA, "targets": "int", "complex_targets": "bool"},
    "spectrum": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n": "int"},
    "trh2fit": {**_COMMON_SCHEMA, "model": _MODEL_SCHEMA, "n_grid": "int_list", "samples": "int"},
}

_MODEL_DEFAULT = {"kind": "ising", "g": 2.0, "seed": 0, "J": 1.0}
_OPTIMIZER_DEFAULT = {
    "alpha": 0.05,
    "beta1": 0.9,
    "beta2": 0.999,
    "epsilon": 1e-8,
    "steps": 500,
    "schedule": {"kind": "exponential", "c": 0.3, "period": 500},
}

_DEFAULTS = {
    "bp": {"model": _MODEL_DEFAULT, "n": 4, "L": 10, "samples": 1000},
    "rate": {"model": _MODEL_DEFAULT, "n": 4, "L_grid": [16, 32, 64, 128], "samples": 200},
    "vqe": {"model": _MODEL_DEFAULT, "n": 4, "L": 10, "optimizer": _OPTIMIZER_DEFAULT, "fidelity_stride": 5},
    "ensemble": {"model": _MODEL_DEFAULT, "n": 4, "L": 10, "optimizer": _OPTIMIZER_DEFAULT, "fidelity_stride": 5, "runs": 35, "fresh_disorder": False},
    "landscape": {"model": _MODEL_DEFAULT, "n": 4, "L": 10, "optimizer": _OPTIMIZER_DEFAULT, "fidelity_stride": 5, "k": 100},
    "express": {"n": 4, "L": 10, "optimizer": _OPTIMIZER_DEFAULT, "targets": 10, "complex_targets": False},
    "spectrum": {"model": _MODEL_DEFAULT, "n": 4},
    "trh2fit": {"model": _MODEL_DEFAULT, "n_grid": [3, 4, 5, 6, 7, 8], "samples": 1},
}


@dataclass
class ExperimentConfig:
    """One fully resolved experiment; `resolved` is the config.json echo."""

    experiment: str
    resolved: dict

    @property
    def out_dir(self) -> Path:
        return Path(self.resolved["out_dir"])

    @property
    def master_seed(self) -> int:
        return self.resolved["master_seed"]

    def __getitem__(self, key: str):
        return self.resolved[key]

    def model_spec(self) -> ModelSpec:
        m = self.resolved["model"]
        return ModelSpec(kind=m["kind"], g=m["g"], seed=m["seed"], J=m["J"])

    def adam(self) -> AdamConfig:
        o = self.resolved["optimizer"]
        s = o["schedule"]
        if s["kind"] == "constant":
            schedule = Constant(o["alpha"])
        else:
            schedule = ExponentialDecay(o["alpha"], s["c"], s["period"])
        return AdamConfig(
            alpha=o["alpha"],
            beta1=o["beta1"],
            beta2=o["beta2"],
            epsilon=o["epsilon"],
            steps=o["steps"],
            schedule=schedule,
        )


# --- config resolution -------------------------------------------------------


def _check_type(path: str, value, kind: str):
    ok = {
        "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "float": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
        "str": lambda v: isinstance(v, str),
        "bool": lambda v: isinstance(v, bool),
        "int_list": lambda v: isinstance(v, list)
        and len(v) > 0
        and all(isinstance(x, int) and not isinstance(x, bool) for x in v),
    }[kind](value)
    if not ok:
        raise UsageError(f"config key {path} expects {kind}, got {value!r}")
    if kind == "float":
        return float(value)
    return value


def _merge_file(tree: dict, incoming: dict, schema: dict, prefix: str = "") -> None:
    for key, value in incoming.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise UsageError(f"unknown config key {path}")
        sub = schema[key]
        if isinstance(sub, dict):
            if not isinstance(value, dict):
                raise UsageError(f"config key {path} expects an object")
            _merge_file(tree[key], value, sub, prefix=f"{path}.")
        else:
            tree[key] = _check_type(path, value, sub)


def _set_leaf(tree: dict, path: tuple, value) -> None:
    node = tree
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value


def _parse_grid(text: str) -> list[int]:
    try:
        return [int(p) for p in str(text).split(",") if p.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


# flag dest -> (config path, converter); applied when the flag was given
_FLAG_MAP = {
    "out": (("out_dir",), str),
    "seed": (("master_seed",), int),
    "model": (("model", "kind"), str),
    "g": (("model", "g"), float),
    "syk_seed": (("model", "seed"), int),
    "J": (("model", "J"), float),
    "n": (("n",), int),
    "L": (("L",), int),
    "L_grid": (("L_grid",), _parse_grid),
    "n_grid": (("n_grid",), _parse_grid),
    "samples": (("samples",), int),
    "runs": (("runs",), int),
    "targets": (("targets",), int),
    "k": (("k",), int),
    "fidelity_stride": (("fidelity_stride",), int),
    "steps": (("optimizer", "steps"), int),
    "alpha": (("optimizer", "alpha"), float),
    "beta1": (("optimizer", "beta1"), float),
    "beta2": (("optimizer", "beta2"), float),
    "epsilon": (("optimizer", "epsilon"), float),
    "decay_c": (("optimizer", "schedule", "c"), float),
    "decay_period": (("optimizer", "schedule", "period"), int),
    "constant_lr": (("optimizer", "schedule", "kind"), lambda v: "constant"),
    "fresh_disorder": (("fresh_disorder",), bool),
    "complex_targets": (("complex_targets",), bool),
}


def _add_model_flags(p):
    p.add_argument("--model", choices=("ising", "syk"), default=None, help="Hamiltonian family")
    p.add_argument("--g", type=float, default=None, help="Ising transverse field")
    p.add_argument("--syk-seed", dest="syk_seed", type=int, default=None, help="SYK disorder seed")
    p.add_argument("--J", type=float, default=None, help="SYK coupling scale")


def _add_optimizer_flags(p):
    p.add_argument("--steps", type=int, default=None, help="Adam update count")
    p.add_argument("--alpha", type=float, default=None, help="initial learning rate")
    p.add_argument("--beta1", type=float, default=None)
    p.add_argument("--beta2", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--decay-c", dest="decay_c", type=float, default=None, help="decay base c of alpha0*c^(tau/period)")
    p.add_argument("--decay-period", dest="decay_period", type=int, default=None)
    p.add_argument("--constant-lr", dest="constant_lr", action="store_true", default=None, help="disable the decay schedule")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqelab",
        description="Layered RY/CZ circuit experiments: gradient statistics, "
        "VQE, landscape analysis, expressibility.",
    )
    parser.add_argument("--version", action="version", version=f"vqelab {__version__}")
    subs = parser.add_subparsers(dest="experiment", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file; flags override it")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed")

    p = subs.add_parser("bp", help="gradient variance statistics at random parameters")
    common(p)
    _add_model_flags(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = subs.add_parser("rate", help="gradient-norm growth rate over a depth grid")
    common(p)
    _add_model_flags(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", dest="L_grid", default=None, help="comma-separated depth grid")
    p.add_argument("--samples", type=int, default=None)

    p = subs.add_parser("vqe", help="one VQE optimization run")
    common(p)
    _add_model_flags(p)
    _add_optimizer_flags(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--fidelity-stride", dest="fidelity_stride", type=int, default=None)

    p = subs.add_parser("ensemble", help="independent VQE runs, final-error sample")
    common(p)
    _add_model_flags(p)
    _add_optimizer_flags(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--fidelity-stride", dest="fidelity_stride", type=int, default=None)
    p.add_argument("--fresh-disorder", dest="fresh_disorder", action="store_true", default=None, help="redraw SYK couplings per run")

    p = subs.add_parser("landscape", help="VQE run plus Hessian/projection analysis")
    common(p)
    _add_model_flags(p)
    _add_optimizer_flags(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--k", type=int, default=None, help="steep-subspace size (clipped to nL)")
    p.add_argument("--fidelity-stride", dest="fidelity_stride", type=int, default=None)

    p = subs.add_parser("express", help="Euclidean-distance expressibility")
    common(p)
    _add_optimizer_flags(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--targets", type=int, default=None)
    p.add_argument("--complex-targets", dest="complex_targets", action="store_true", default=None, help="Haar targets instead of the real sphere")

    p = subs.add_parser("spectrum", help="exact eigenvalues of one Hamiltonian")
    common(p)
    _add_model_flags(p)
    p.add_argument("--n", type=int, default=None)

    p = subs.add_parser("trh2fit", help="Tr(H^2) = a n^b 2^n regression over n")
    common(p)
    _add_model_flags(p)
    p.add_argument("--n", dest="n_grid", default=None, help="comma-separated n grid")
    p.add_argument("--samples", type=int, default=None, help="SYK seeds averaged per n")

    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    exp = args.experiment
    schema = _SCHEMAS[exp]
    tree = copy.deepcopy(_DEFAULTS[exp])
    tree["experiment"] = exp
    tree["out_dir"] = f"vqelab-{exp}"
    tree["master_seed"] = 0

    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as f:
                incoming = json.load(f)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(incoming, dict):
            raise UsageError("config file must hold a JSON object")
        _merge_file(tree, incoming, schema)
        if tree["experiment"] != exp:
            raise UsageError(
                f"config file is for experiment {tree['experiment']!r}, "
                f"command line says {exp!r}"
            )

    for dest, (path, conv) in _FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is not None:
            _set_leaf(tree, path, conv(value))

    _validate(exp, tree)
    return ExperimentConfig(exp, tree)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _validate(exp: str, tree: dict) -> None:
    _require(tree["master_seed"] >= 0, "master_seed must be >= 0")
    if "model" in tree:
        m = tree["model"]
        _require(m["kind"] in ("ising", "syk"), f"unknown model kind {m['kind']!r}")
        _require(m["seed"] >= 0, "model.seed must be >= 0")
    if "n" in tree:
        _require(1 <= tree["n"] <= 14, "n must lie in [1, 14]")
        if exp in ("vqe", "ensemble", "landscape", "spectrum"):
            _require(tree["n"] <= 12, f"{exp} needs exact spectra: n <= 12")
    if "L" in tree:
        _require(tree["L"] >= 1, "L must be >= 1")
    if "samples" in tree:
        minimum = 2 if exp in ("bp", "rate") else 1
        _require(tree["samples"] >= minimum, f"samples must be >= {minimum}")
    for key, minimum in (("runs", 1), ("targets", 1), ("k", 1), ("fidelity_stride", 1)):
        if key in tree:
            _require(tree[key] >= minimum, f"{key} must be >= {minimum}")
    if "L_grid" in tree:
        grid = tree["L_grid"]
        _require(all(x >= 1 for x in grid), "depth grid entries must be >= 1")
        _require(len(set(grid)) >= 3, "rate needs at least 3 distinct depths")
    if "n_grid" in tree:
        grid = tree["n_grid"]
        _require(all(2 <= x <= 14 for x in grid), "n grid entries must lie in [2, 14]")
        _require(len(set(grid)) >= 2, "trh2fit needs at least 2 distinct n")
    if "optimizer" in tree:
        o = tree["optimizer"]
        _require(o["alpha"] > 0, "alpha must be positive")
        _require(0 <= o["beta1"] < 1, "beta1 must lie in [0, 1)")
        _require(0 <= o["beta2"] < 1, "beta2 must lie in [0, 1)")
        _require(o["epsilon"] > 0, "epsilon must be positive")
        _require(o["steps"] >= 1, "steps must be >= 1")
        s = o["schedule"]
        _require(s["kind"] in ("exponential", "constant"), f"unknown schedule kind {s['kind']!r}")
        _require(0 < s["c"] <= 1, "decay c must lie in (0, 1]")
        _require(s["period"] >= 1, "decay period must be >= 1")


# --- execution ----------------------------------------------------------------


def execute(config: ExperimentConfig) -> int:
    """Run one experiment into its output directory; returns 0."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    started = utc_now()
    write_json(out / "config.json", config.resolved)
    files = ["config.json"]
    warnings: list[str] = []
    runner = {
        "bp": _run_bp,
        "rate": _run_rate,
        "vqe": _run_vqe,
        "ensemble": _run_ensemble,
        "landscape": _run_landscape,
        "express": _run_express,
        "spectrum": _run_spectrum,
        "trh2fit": _run_trh2fit,
    }[config.experiment]
    summary = runner(config, out, files, warnings)
    write_manifest(out, config.resolved, summary, files, warnings, started, __version__)
    return 0


def _plot(out: Path, files: list, warnings: list, name: str, **kwargs) -> None:
    svg, dropped = emit_plot(out / f"{name}.csv", **kwargs)
    files.append(svg.name)
    if dropped:
        warnings.append(f"{svg.name}: dropped {dropped} points not drawable on the requested axes")


def _run_bp(config, out, files, warnings) -> dict:
    n, L = config["n"], config["L"]
    stats = run_barren_plateau(config.model_spec(), n, L, config["samples"], config.master_seed)
    write_csv(out / "gradients.csv", "gradients",
              [(n, L, c, float(v)) for c, v in enumerate(stats.per_component_variance)])
    write_csv(out / "norms.csv", "norms",
              [(n, L, stats.norm_mean, stats.norm_q1, stats.norm_q3, stats.bound)])
    files += ["gradients.csv", "norms.csv"]
    if stats.violations:
        warnings.append(
            f"variance bound exceeded beyond sampling slack at components {list(stats.violations)}"
        )
    _plot(out, files, warnings, "gradients", x="component", y="variance", log_y=True)
    return {
        "variance_mean": stats.variance_mean,
        "variance_min": stats.variance_min,
        "variance_max": stats.variance_max,
        "norm_mean": stats.norm_mean,
        "bound": stats.bound,
        "violations": len(stats.violations),
    }


def _run_rate(config, out, files, warnings) -> dict:
    n = config["n"]
    model = config.model_spec()
    grid = config["L_grid"]
    stats = [run_barren_plateau(model, n, L, config["samples"], config.master_seed) for L in grid]
    write_csv(out / "gradients.csv", "gradients",
              [(n, s.L, c, float(v)) for s in stats for c, v in enumerate(s.per_component_variance)])
    write_csv(out / "norms.csv", "norms",
              [(n, s.L, s.norm_mean, s.norm_q1, s.norm_q3, s.bound) for s in stats])
    files += ["gradients.csv", "norms.csv"]
    rate = estimate_growth_rate(stats)
    _plot(out, files, warnings, "norms", x="L", y="norm_mean", log_x=True, log_y=True)
    return {"rate": rate, "depths": list(grid)}


def _trajectory_rows(record) -> list:
    fid = dict(record.fidelity_series)
    e0 = record.ground_energy
    return [
        (r.tau, r.loss, r.loss - e0, fid.get(r.tau), r.grad_norm, r.lr)
        for r in record.trajectory.steps
    ]


def _vqe_summary(record) -> dict:
    return {
        "model": record.model_tag,
        "ground_energy": record.ground_energy,
        "bandwidth": record.bandwidth,
        "final_error": record.final_error,
        "tau_best": record.trajectory.tau_best,
        "fidelity_at_best": record.fidelity_at_best,
        "error_bound_met": record.error_bound_met,
    }


def _run_vqe(config, out, files, warnings) -> dict:
    record = run_vqe(
        config.model_spec(), config["n"], config["L"], config.adam(),
        seed=config.master_seed, fidelity_stride=config["fidelity_stride"],
    )
    write_csv(out / "trajectory.csv", "trajectory", _trajectory_rows(record))
    files.append("trajectory.csv")
    _plot(out, files, warnings, "trajectory", x="tau", y="error", log_y=True)
    return _vqe_summary(record)


def _run_ensemble(config, out, files, warnings) -> dict:
    runs = config["runs"]
    ens = run_vqe_ensemble(
        config.model_spec(), config["n"], config["L"], runs, config.adam(),
        master_seed=config.master_seed,
        fresh_disorder=config["fresh_disorder"],
        fidelity_stride=config["fidelity_stride"],
    )
    failed = {rid for rid, _ in ens.failures}
    ids = [i for i in range(runs) if i not in failed]
    write_csv(out / "ensemble.csv", "ensemble",
              [(rid, rec.seed, rec.final_error, rec.trajectory.tau_best, rec.error_bound_met)
               for rid, rec in zip(ids, ens.records)])
    files.append("ensemble.csv")
    for rid, err in ens.failures:
        warnings.append(f"run {rid} failed: {err}")
    errors = np.array([rec.final_error for rec in ens.records])
    _plot(out, files, warnings, "ensemble", x="run_id", y="final_error", log_y=True)
    summary = {
        "runs": runs,
        "failures": len(ens.failures),
        "bound_met": int(sum(rec.error_bound_met for rec in ens.records)),
    }
    if len(errors):
        summary.update(
            final_error_mean=float(errors.mean()),
            final_error_min=float(errors.min()),
            final_error_max=float(errors.max()),
        )
    return summary


def _run_landscape(config, out, files, warnings) -> dict:
    record = run_vqe(
        config.model_spec(), config["n"], config["L"], config.adam(),
        seed=config.master_seed, fidelity_stride=config["fidelity_stride"],
    )
    analysis = run_trajectory_analysis(record, config["k"])
    write_csv(out / "trajectory.csv", "trajectory", _trajectory_rows(record))
    write_csv(out / "hessian.csv", "hessian",
              [(r + 1, float(v)) for r, v in enumerate(analysis.subspace.eigenvalues)])
    write_csv(out / "projection.csv", "projection", list(analysis.rows))
    files += ["trajectory.csv", "hessian.csv", "projection.csv"]
    if analysis.basin_log_inverse_volume is None:
        warnings.append("basin volume undefined: non-positive eigenvalue in the top-k")
    _plot(out, files, warnings, "projection", x="tau", y="projected_distance", log_y=True)
    _plot(out, files, warnings, "hessian", x="rank", y="eigenvalue")
    summary = _vqe_summary(record)
    summary.update(
        k=analysis.k,
        basin_log_inverse_volume=analysis.basin_log_inverse_volume,
        top_eigenvalue=float(analysis.subspace.eigenvalues[0]),
    )
    return summary


def _run_express(config, out, files, warnings) -> dict:
    result = run_expressibility(
        config["n"], config["L"], config["targets"], config.adam(),
        master_seed=config.master_seed,
        complex_targets=config["complex_targets"],
    )
    write_csv(out / "express.csv", "express",
              [(i, float(d)) for i, d in enumerate(result.per_target_min_distance)])
    files.append("express.csv")
    _plot(out, files, warnings, "express", x="target_id", y="min_distance", log_y=True)
    return {
        "epsilon_m": result.epsilon_m,
        "normalized": result.normalized,
        "targets": result.m,
        "complex_targets": result.complex_targets,
    }


def _run_spectrum(config, out, files, warnings) -> dict:
    H = config.model_spec().build(config["n"])
    sp = exact_spectrum(H)
    write_csv(out / "spectrum.csv", "spectrum",
              [(r + 1, float(v)) for r, v in enumerate(sp.eigenvalues)])
    files.append("spectrum.csv")
    _plot(out, files, warnings, "spectrum", x="rank", y="eigenvalue")
    return {
        "model": config.model_spec().tag,
        "ground_energy": sp.ground_energy,
        "bandwidth": sp.bandwidth,
        "degeneracy": sp.degeneracy,
        "trace_h2": trace_h_squared(H),
    }


def _run_trh2fit(config, out, files, warnings) -> dict:
    model = config.model_spec()
    samples = config["samples"]
    points = []
    for n in config["n_grid"]:
        if model.kind == "ising":
            points.append((n, trace_h_squared(build_ising(n, model.g))))
        else:
            traces = [
                trace_h_squared(sample_syk(n, _child_seed(config.master_seed, STREAM_DISORDER, n * 100000 + s), model.J)[1])
                for s in range(samples)
            ]
            points.append((n, float(np.mean(traces))))
    write_csv(out / "trh2.csv", "trh2", points)
    files.append("trh2.csv")
    a, b = fit_trace_scaling(points)
    _plot(out, files, warnings, "trh2", x="n", y="trace_h2", log_y=True)
    return {"a": a, "b": b, "model": model.tag if model.kind == "ising" else f"syk(mean over {samples} seeds)"}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        config = resolve_config(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(config)
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps failures to exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
