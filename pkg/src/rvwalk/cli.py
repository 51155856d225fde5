"""Command-line front end.

Usage::

    rvwalk COMMAND --config FILE [--seed U64] [--threads N] [--out DIR] [--tolerance TOL]

``COMMAND`` is one of ``mu, mu-star, fidi, ldp, ruin, segments-ld,
segments-frechet, maxima, diag-onejump``.  The config is YAML (or the JSON
summary of an earlier run, whose ``config`` block is reused verbatim).

Config keys
-----------
model
    ``alpha``, ``atoms`` as a list of ``[[direction...], weight]`` pairs,
    ``centering`` (``mean-zero`` or ``none``), ``noise_radius``.  Weights must
    already sum to one.
set / sets
    A shape mapping, or a list of them for ``fidi``.  Shapes:
    ``halfspace`` (direction, level), ``box`` (lower, upper; use ``.inf``),
    ``ball-complement`` (radius), ``exceedance`` (levels), ``full-space``,
    ``cone-complement`` (drift, optional delta).
drift
    Drift vector ``c`` for ``mu-star`` and ``ruin``.
schedule
    ``lambda`` (``linear``, ``sqrt-nlogn`` or ``table``), ``param``,
    ``table`` (mapping n to lambda_n), ``a`` (``analytic`` or ``empirical``),
    ``pilot_size``, ``pilot_seed``.  Default: linear with c = 1.
grid
    Values swept by the command: ``n`` for ldp, fidi, segments-ld and
    diag-onejump; ``u`` for ruin; ``x`` for maxima and segments-frechet.
    ``maxima`` grid points may be scalars or vectors.
n, reps, seed, t, times, horizon_M, beta, block, threshold, cover, tolerance, quad_tolerance
    Scalars used by the commands that need them.

Outputs (with ``--out DIR``): ``COMMAND.csv``, ``COMMAND.json`` and four
two-column series ``COMMAND_{ratio,ci_lo,ci_hi,theory}.dat``.  Exit status is
0 on success, 2 when a row misses the tolerance, 1 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, RVWalkError
from .estimate import fidi_ratio, ldp_ratio, maxima_cdf, one_jump_diagnostic, ruin_ratio
from .measure import mu, mu_star
from .model import ScalingSchedule, make_model
from .sample import DEFAULT_SEED
from .segments import segment_frechet_cdf, segment_ld_ratio
from .sets import (
    BallComplement,
    Box,
    ConeComplementK,
    Exceedance,
    FullSpace,
    HalfSpace,
    default_cone_delta,
)

logger = logging.getLogger(__name__)

COMMANDS = (
    "mu",
    "mu-star",
    "fidi",
    "ldp",
    "ruin",
    "segments-ld",
    "segments-frechet",
    "maxima",
    "diag-onejump",
)
RATIO_COMMANDS = ("ldp", "fidi", "ruin", "segments-ld")
CSV_COLUMNS = (
    "experiment",
    "n_or_u",
    "estimate",
    "ci_lo",
    "ci_hi",
    "theory",
    "events",
    "reps",
    "trunc_bound",
    "seed",
)
TOP_KEYS = {
    "model", "set", "sets", "drift", "schedule", "grid", "n", "reps", "seed", "t",
    "times", "horizon_M", "beta", "block", "threshold", "cover", "tolerance", "quad_tolerance",
}


# ---------------------------------------------------------------------------
# config parsing


def _need(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"{where}: missing key '{key}'")
    return cfg[key]


def _vector(value, where: str) -> np.ndarray:
    try:
        return np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number or list of numbers, got {value!r}") from None


def parse_model(cfg: dict):
    where = "model"
    if not isinstance(cfg, dict):
        raise ConfigError("model: expected a mapping")
    atoms_cfg = _need(cfg, "atoms", where)
    atoms = []
    for k, item in enumerate(atoms_cfg):
        try:
            direction, weight = item
        except (TypeError, ValueError):
            raise ConfigError(f"model.atoms[{k}]: expected [[direction...], weight]") from None
        atoms.append((_vector(direction, f"model.atoms[{k}]"), float(weight)))
    return make_model(
        float(_need(cfg, "alpha", where)),
        atoms,
        center=cfg.get("centering", "mean-zero"),
        noise_radius=float(cfg.get("noise_radius", 0.0)),
        normalize=False,
    )


def parse_set(cfg: dict, where: str = "set", model=None):
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where}: expected a mapping with a 'shape' key")
    shape = _need(cfg, "shape", where)
    try:
        if shape == "halfspace":
            return HalfSpace(_vector(_need(cfg, "direction", where), where), float(_need(cfg, "level", where)))
        if shape == "box":
            return Box(_vector(_need(cfg, "lower", where), where), _vector(_need(cfg, "upper", where), where))
        if shape == "ball-complement":
            return BallComplement(float(_need(cfg, "radius", where)))
        if shape == "exceedance":
            return Exceedance(_vector(_need(cfg, "levels", where), where))
        if shape == "full-space":
            return FullSpace()
        if shape == "cone-complement":
            c = _vector(_need(cfg, "drift", where), where)
            delta = cfg.get("delta")
            if delta is None:
                if model is None:
                    raise ConfigError(f"{where}: cone-complement needs 'delta' or a model")
                delta = default_cone_delta(model.directions, c)
            return ConeComplementK(c, float(delta))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}: unknown shape {shape!r}")


def parse_schedule(cfg: dict | None) -> ScalingSchedule:
    if cfg is None:
        return ScalingSchedule.linear(1.0)
    if not isinstance(cfg, dict):
        raise ConfigError("schedule: expected a mapping")
    rule = cfg.get("lambda", "linear")
    table = cfg.get("table")
    if rule == "table":
        if not isinstance(table, dict):
            raise ConfigError("schedule.table: expected a mapping n -> lambda_n")
        table = {int(k): float(v) for k, v in table.items()}
    return ScalingSchedule(
        lambda_rule=rule,
        lambda_param=float(cfg.get("param", 1.0)),
        table=table,
        a_rule=cfg.get("a", "analytic"),
        pilot_size=cfg.get("pilot_size"),
        pilot_seed=int(cfg.get("pilot_seed", 0)),
    )


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)  # JSON is a subset of YAML
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" (line {mark.line + 1})" if mark else ""
        raise ConfigError(f"{path}{loc}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if "config" in data and "rows" in data:
        data = data["config"]
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return data


# ---------------------------------------------------------------------------
# commands


def _row(command, x, res, seed, theory=None):
    theory = res.theory_value if theory is None else theory
    return {
        "experiment": command,
        "n_or_u": x,
        "estimate": float(res.estimate),
        "ci_lo": float(res.ci95[0]),
        "ci_hi": float(res.ci95[1]),
        "theory": None if theory is None else float(theory),
        "events": int(res.event_count),
        "reps": int(res.replications),
        "trunc_bound": float(res.truncation_bound),
        "seed": int(seed),
    }


def _grid(cfg, name):
    grid = cfg.get("grid")
    if grid is None:
        if name in cfg:
            return [cfg[name]]
        raise ConfigError(f"missing key 'grid' (values of {name})")
    if not isinstance(grid, list) or not grid:
        raise ConfigError("grid: expected a nonempty list")
    return grid


def _measure_row(command, mv):
    return {
        "experiment": command,
        "n_or_u": None,
        "estimate": float(mv.value),
        "ci_lo": float(mv.value - mv.abs_error_bound),
        "ci_hi": float(mv.value + mv.abs_error_bound),
        "theory": float(mv.value),
        "events": None,
        "reps": None,
        "trunc_bound": float(mv.abs_error_bound),
        "seed": None,
        "method": mv.method,
    }


def execute(command: str, cfg: dict, seed: int, threads: int | None) -> list[dict]:
    """Run ``command`` on a parsed config and return its result rows."""
    model = parse_model(_need(cfg, "model", "config"))

    if command == "mu":
        return [_measure_row(command, mu(model, parse_set(_need(cfg, "set", "config"), model=model)))]
    if command == "mu-star":
        A = parse_set(_need(cfg, "set", "config"), model=model)
        tol = float(cfg.get("quad_tolerance", 1e-10))
        return [_measure_row(command, mu_star(model, A, _vector(_need(cfg, "drift", "config"), "drift"), tol))]

    reps = int(_need(cfg, "reps", "config"))
    rows = []
    if command == "ldp":
        A = parse_set(_need(cfg, "set", "config"), model=model)
        sched = parse_schedule(cfg.get("schedule"))
        for n in _grid(cfg, "n"):
            res = ldp_ratio(model, sched, A, float(cfg.get("t", 1.0)), int(n), reps, seed, threads)
            rows.append(_row(command, int(n), res, seed))
    elif command == "fidi":
        sets = [parse_set(s, f"sets[{k}]", model) for k, s in enumerate(_need(cfg, "sets", "config"))]
        times = [float(t) for t in _need(cfg, "times", "config")]
        sched = parse_schedule(cfg.get("schedule"))
        for n in _grid(cfg, "n"):
            res = fidi_ratio(model, sched, times, sets, int(n), reps, seed, threads)
            rows.append(_row(command, int(n), res, seed))
    elif command == "ruin":
        A = parse_set(_need(cfg, "set", "config"), model=model)
        c = _vector(_need(cfg, "drift", "config"), "drift")
        M = float(cfg.get("horizon_M", 20.0))
        cover = cfg.get("cover")
        for u in _grid(cfg, "u"):
            res = ruin_ratio(model, A, c, float(u), M, reps, seed, threads, cover=cover)
            rows.append(_row(command, float(u), res, seed))
    elif command == "segments-ld":
        A = parse_set(_need(cfg, "set", "config"), model=model)
        t = float(_need(cfg, "t", "config"))
        for n in _grid(cfg, "n"):
            res = segment_ld_ratio(model, A, t, int(n), reps, seed, threads)
            rows.append(_row(command, int(n), res, seed))
    elif command == "segments-frechet":
        A = parse_set(_need(cfg, "set", "config"), model=model)
        n = int(_need(cfg, "n", "config"))
        xs = [float(x) for x in _grid(cfg, "x")]
        sched = parse_schedule(cfg.get("schedule"))
        for x, res in zip(xs, segment_frechet_cdf(model, A, n, reps, xs, seed, sched, threads)):
            rows.append(_row(command, x, res, seed))
    elif command == "maxima":
        n = int(_need(cfg, "n", "config"))
        xs = _grid(cfg, "x")
        results = maxima_cdf(
            model, n, xs, reps, seed,
            beta=float(cfg.get("beta", 0.5)), block=cfg.get("block"), threads=threads,
        )
        for x, res in zip(xs, results):
            rows.append(_row(command, x, res, seed))
    elif command == "diag-onejump":
        A = parse_set(_need(cfg, "set", "config"), model=model)
        thr = float(cfg.get("threshold", 0.8))
        for n in _grid(cfg, "n"):
            d = one_jump_diagnostic(model, A, int(n), reps, seed, thr, threads)
            rows.append({
                "experiment": command,
                "n_or_u": int(n),
                "estimate": d.fraction,
                "ci_lo": d.ci95[0],
                "ci_hi": d.ci95[1],
                "theory": 1.0,
                "events": d.events,
                "reps": d.replications,
                "trunc_bound": 0.0,
                "seed": int(seed),
            })
    else:
        raise ConfigError(f"unknown command {command!r}")
    return rows


def row_passes(command: str, row: dict, tolerance: float | None) -> bool:
    """Relative check for ratio commands, absolute for distribution-type rows."""
    if tolerance is None or command in ("mu", "mu-star"):
        return True
    est, theory = row["estimate"], row["theory"]
    if theory is None or est is None or math.isnan(est):
        return False
    if command in RATIO_COMMANDS and theory != 0:
        return abs(est / theory - 1.0) <= tolerance
    return abs(est - theory) <= tolerance


# ---------------------------------------------------------------------------
# outputs


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        # plain strings survive a YAML/JSON round trip and parse back with float()
        return str(obj)
    return obj


def write_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in CSV_COLUMNS})


def emit_plot_data(rows: list[dict], out: Path, stem: str) -> list[Path]:
    """Write ``(x, ratio)``, ``(x, ci_lo)``, ``(x, ci_hi)`` and ``(x, theory)`` series."""
    if not rows:
        raise ValueError("no result rows to write")
    paths = []
    for name in ("ratio", "ci_lo", "ci_hi", "theory"):
        path = out / f"{stem}_{name}.dat"
        with open(path, "w") as fh:
            fh.write(f"# x {name}\n")
            for k, row in enumerate(rows):
                x = row["n_or_u"]
                if x is None:
                    x = k
                elif isinstance(x, (list, tuple)):
                    x = x[0]
                if name == "ratio":
                    th = row["theory"]
                    val = row["estimate"] / th if th else row["estimate"]
                else:
                    val = row[name]
                fh.write(f"{x!r} {'nan' if val is None else repr(float(val))}\n")
        paths.append(path)
    return paths


def run(
    command: str,
    cfg: dict,
    seed: int | None = None,
    threads: int | None = None,
    out: str | Path | None = None,
    tolerance: float | None = None,
    stream=None,
) -> int:
    """Run one command; returns the process exit status."""
    stream = stream or sys.stdout
    try:
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        cfg = dict(cfg)
        seed = int(seed if seed is not None else cfg.get("seed", DEFAULT_SEED))
        if tolerance is None and cfg.get("tolerance") is not None:
            tolerance = float(cfg["tolerance"])
        cfg["seed"] = seed
        if tolerance is not None:
            cfg["tolerance"] = tolerance
        print(f"# rvwalk {command} seed={seed} (0x{seed:X})", file=stream)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            rows = execute(command, cfg, seed, threads)
    except (RVWalkError, ValueError, TypeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    for row in rows:
        row["pass"] = row_passes(command, row, tolerance)
    ok = all(r["pass"] for r in rows)

    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS + ("pass",), extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row[k]) for k in CSV_COLUMNS + ("pass",)})
    if command in ("mu", "mu-star"):
        print(f"value={rows[0]['estimate']!r} method={rows[0]['method']}", file=stream)

    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        stem = command.replace("-", "_")
        write_csv(rows, out / f"{stem}.csv")
        summary = {"command": command, "config": _jsonable(cfg), "rows": _jsonable(rows), "pass": ok}
        (out / f"{stem}.json").write_text(json.dumps(summary, indent=2))
        emit_plot_data(rows, out, stem)
    return 0 if ok else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rvwalk", description="Heavy-tailed random walk limit checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML config or a JSON summary from an earlier run")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit); default 0xC0FFEE")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.add_argument("--out", help="directory for CSV, JSON and series files")
    p.add_argument("--tolerance", type=float, help="pass/fail tolerance per row")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return run(args.command, cfg, args.seed, args.threads, args.out, args.tolerance)


if __name__ == "__main__":
    sys.exit(main())
