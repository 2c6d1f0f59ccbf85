"""Batch runner: load a problem configuration, execute the projection
methods, and emit per-iteration trace CSVs plus JSON summaries.

Config files are flat ``key = value`` text (comments start with ``#``)::

    dim = 4
    cap_pole = 3              # axis index, or an explicit vector: 0 0 0 1
    cap_radius = 0.6283185307179586
    mapping = rotation 0 1 0.8
    mapping = rotation 0 2 0.5
    alphas = 0.5 0.5          # or: schedule = constant-half
    x1 = random               # or explicit coordinates
    method = both             # cq | shrinking | both
    eps_step = 1e-8
    eps_residual = 1e-8
    max_iter = 500
    seed = 42
    out = runs/bench

Axis and plane indices are 0-based.  Every run writes
``<out>_<method>_trace.csv`` (columns: n, dist_x1_xn, step_len, res_1..res_r,
constraint_count, solver_sweeps; floats with 17 significant digits) and
``<out>_<method>_summary.json``; ``compare`` writes both traces plus
``<out>_compare.json``.  Outputs are byte-deterministic for a fixed config
and seed.  Exit codes: 0 when every run converged, 2 when any run hit the
iteration cap, 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field


from .errors import ConfigError, SphereProjError
from .geometry import SpherePoint, basis_point, distance, random_point_in_cap
from .iteration import Problem, StopReason, StopRule, Trace, fejer_audit, run
from .mappings import (
    Identity,
    MappingFamily,
    PlaneRotation,
    nearest_fixed_point,
    residuals,
)

_METHODS = ("cq", "shrinking", "both")
_SCHEDULES = ("constant-half",)

_SCALAR_FIELDS = {
    "dim", "cap_pole", "cap_radius", "alphas", "schedule", "x1", "method",
    "eps_step", "eps_residual", "max_iter", "seed", "out",
}


@dataclass
class RunConfig:
    """Parsed, not-yet-validated configuration."""

    dim: int = 0
    cap_pole: list[str] = field(default_factory=list)
    cap_radius: float = math.nan
    mappings: list[list[str]] = field(default_factory=list)
    alphas: list[float] | None = None
    schedule: str | None = None
    x1: list[str] = field(default_factory=lambda: ["random"])
    method: str = ""
    eps_step: float = 1e-8
    eps_residual: float = 1e-8
    max_iter: int = 10_000
    seed: int = 0
    out: str = "run"


def parse_config(path: str) -> RunConfig:
    """Parse the flat key = value grammar, rejecting unknown or duplicate keys."""
    cfg = RunConfig()
    seen: set[str] = set()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from e

    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "mapping":
            cfg.mappings.append(value.split())
            continue
        if key not in _SCALAR_FIELDS:
            raise ConfigError(f"line {ln}: unknown field {key!r}")
        if key in seen:
            raise ConfigError(f"line {ln}: duplicate field {key!r}")
        seen.add(key)
        try:
            _set_scalar(cfg, key, value)
        except (ValueError, ConfigError) as e:
            raise ConfigError(f"line {ln}: {key}: {e}") from e
    return cfg


def _set_scalar(cfg: RunConfig, key: str, value: str) -> None:
    if key == "dim":
        cfg.dim = int(value)
    elif key == "cap_pole":
        cfg.cap_pole = value.split()
    elif key == "cap_radius":
        cfg.cap_radius = float(value)
    elif key == "alphas":
        cfg.alphas = [float(tok) for tok in value.split()]
    elif key == "schedule":
        if value not in _SCHEDULES:
            raise ConfigError(f"unknown schedule {value!r}")
        cfg.schedule = value
    elif key == "x1":
        cfg.x1 = value.split()
    elif key == "method":
        if value not in _METHODS:
            raise ConfigError(f"must be one of {', '.join(_METHODS)}")
        cfg.method = value
    elif key == "eps_step":
        cfg.eps_step = float(value)
    elif key == "eps_residual":
        cfg.eps_residual = float(value)
    elif key == "max_iter":
        cfg.max_iter = int(value)
    elif key == "seed":
        cfg.seed = int(value)
    elif key == "out":
        cfg.out = value


def _parse_point(tokens: list[str], dim: int, fieldname: str) -> SpherePoint:
    if len(tokens) == 1:
        try:
            axis = int(tokens[0])
        except ValueError as e:
            raise ConfigError(f"{fieldname}: expected an axis index, got {tokens[0]!r}") from e
        if not 0 <= axis < dim:
            raise ConfigError(f"{fieldname}: axis {axis} out of range for dim {dim}")
        return basis_point(axis, dim)
    if len(tokens) != dim:
        raise ConfigError(
            f"{fieldname}: expected an axis index or {dim} coordinates, got {len(tokens)}"
        )
    try:
        return SpherePoint([float(t) for t in tokens])
    except ValueError as e:
        raise ConfigError(f"{fieldname}: {e}") from e


def _build_mapping(tokens: list[str], dim: int):
    if not tokens:
        raise ConfigError("mapping: empty specification")
    kind = tokens[0]
    if kind == "identity":
        if len(tokens) != 1:
            raise ConfigError("mapping: identity takes no arguments")
        return Identity()
    if kind == "rotation":
        if len(tokens) != 4:
            raise ConfigError("mapping: rotation needs 'rotation <i> <j> <angle>'")
        try:
            i, j = int(tokens[1]), int(tokens[2])
            angle = float(tokens[3])
        except ValueError as e:
            raise ConfigError(f"mapping: {e}") from e
        if not 0 <= i < j < dim:
            raise ConfigError(f"mapping: plane ({i},{j}) invalid for dim {dim}")
        try:
            return PlaneRotation(i, j, angle)
        except ValueError as e:
            raise ConfigError(f"mapping: {e}") from e
    raise ConfigError(f"mapping: unknown type {kind!r}")


def build_problem(cfg: RunConfig) -> tuple[Problem, StopRule]:
    """Validate the parsed config and materialize the problem and stop rule."""
    if cfg.dim < 2:
        raise ConfigError("dim: must be an integer >= 2")
    if not cfg.mappings:
        raise ConfigError("mapping: at least one mapping block is required")
    if not cfg.method:
        raise ConfigError("method: required field")
    if not 0.0 < cfg.cap_radius < math.pi / 4:
        raise ConfigError(f"cap_radius: must be in (0, {math.pi / 4}), got {cfg.cap_radius}")
    if not cfg.cap_pole:
        raise ConfigError("cap_pole: required field")
    if cfg.alphas is not None and cfg.schedule is not None:
        raise ConfigError("alphas: mutually exclusive with schedule")

    pole = _parse_point(cfg.cap_pole, cfg.dim, "cap_pole")
    maps = [_build_mapping(tokens, cfg.dim) for tokens in cfg.mappings]

    alphas = cfg.alphas
    if alphas is None:
        alphas = [0.5] * len(maps)  # the constant-half schedule
    if len(alphas) != len(maps):
        raise ConfigError(f"alphas: expected {len(maps)} weights, got {len(alphas)}")
    try:
        family = MappingFamily(maps, alphas)
    except ValueError as e:
        raise ConfigError(f"alphas: {e}") from e

    if cfg.x1 == ["random"]:
        x1 = random_point_in_cap(pole, cfg.cap_radius, cfg.seed)
    else:
        x1 = _parse_point(cfg.x1, cfg.dim, "x1")
        if distance(x1, pole) > cfg.cap_radius + 1e-12:
            raise ConfigError("x1: explicit start point lies outside the cap")

    try:
        problem = Problem(cfg.dim, pole, cfg.cap_radius, family, x1)
    except ValueError as e:
        raise ConfigError(f"problem: {e}") from e
    try:
        stop = StopRule(cfg.eps_step, cfg.eps_residual, cfg.max_iter)
    except ValueError as e:
        raise ConfigError(f"stop rule: {e}") from e
    return problem, stop


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_trace_csv(path: str, trace: Trace, r: int) -> None:
    header = ["n", "dist_x1_xn", "step_len"]
    header += [f"res_{i}" for i in range(1, r + 1)]
    header += ["constraint_count", "solver_sweeps"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for rec in trace:
            row = [str(rec.n), _fmt(rec.dist_x1_xn), _fmt(rec.step_len)]
            row += [_fmt(v) for v in rec.residuals]
            row += [str(rec.constraint_count), str(rec.solver_sweeps)]
            fh.write(",".join(row) + "\n")


def _summarize(problem: Problem, method: str, final: SpherePoint, trace: Trace,
               reason: StopReason) -> dict:
    summary = {
        "method": method,
        "stop_reason": reason.value,
        "iterations": len(trace),
        "final_point": [float(c) for c in final.coords],
        "final_residuals": [float(v) for v in residuals(problem.family, final)],
    }
    if problem.known_fixed_set is not None:
        pf = nearest_fixed_point(problem.known_fixed_set, problem.x1)
        if pf is not None and distance(pf, problem.cap_pole) <= problem.cap_radius + 1e-9:
            summary["dist_to_known_PF"] = distance(final, pf)
    return summary


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _ensure_outdir(prefix: str) -> None:
    d = os.path.dirname(prefix)
    if d:
        os.makedirs(d, exist_ok=True)


def _execute(problem: Problem, stop: StopRule, method: str, prefix: str):
    final, trace, reason = run(problem, method, stop)
    if not fejer_audit(trace):
        raise SphereProjError(f"{method}: trace failed the monotonicity audit")
    write_trace_csv(f"{prefix}_{method}_trace.csv", trace, problem.family.r)
    return final, trace, reason


def cmd_run(config_path: str, seed: int | None = None, out: str | None = None) -> int:
    cfg = parse_config(config_path)
    if seed is not None:
        cfg.seed = seed
    if out is not None:
        cfg.out = out
    problem, stop = build_problem(cfg)
    _ensure_outdir(cfg.out)

    methods = ["cq", "shrinking"] if cfg.method == "both" else [cfg.method]
    reasons = []
    for method in methods:
        final, trace, reason = _execute(problem, stop, method, cfg.out)
        summary = _summarize(problem, method, final, trace, reason)
        _write_json(f"{cfg.out}_{method}_summary.json", summary)
        print(f"[{method}] {reason.value} after {len(trace)} iterations")
        reasons.append(reason)
    return 0 if all(r is StopReason.CONVERGED for r in reasons) else 2


def cmd_compare(config_path: str, seed: int | None = None, out: str | None = None) -> int:
    cfg = parse_config(config_path)
    if seed is not None:
        cfg.seed = seed
    if out is not None:
        cfg.out = out
    if cfg.method != "both":
        raise ConfigError("method: compare requires method = both")
    problem, stop = build_problem(cfg)
    _ensure_outdir(cfg.out)

    results = {}
    for method in ("cq", "shrinking"):
        final, trace, reason = _execute(problem, stop, method, cfg.out)
        summary = _summarize(problem, method, final, trace, reason)
        summary["total_solver_sweeps"] = sum(rec.solver_sweeps for rec in trace)
        results[method] = (final, summary, reason)
        print(f"[{method}] {reason.value} after {len(trace)} iterations")

    payload = {
        "cq": results["cq"][1],
        "shrinking": results["shrinking"][1],
        "final_point_distance": distance(results["cq"][0], results["shrinking"][0]),
    }
    _write_json(f"{cfg.out}_compare.json", payload)
    ok = all(r is StopReason.CONVERGED for _, _, r in results.values())
    return 0 if ok else 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sphereproj",
        description="Run projection-method iterations on the unit sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "compare"):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a run configuration file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output path prefix")
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            return cmd_run(args.config, args.seed, args.out)
        return cmd_compare(args.config, args.seed, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except SphereProjError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
