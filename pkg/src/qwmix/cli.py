"""Command-line front end: run experiment grids, build reports, export
chains, and inspect walk spectra.

Exit codes: 0 all assertions hold, 1 at least one assertion failed,
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chains import save_csv
from .config import CODE_VERSION
from .experiments import (
    AUDIT_DESCRIPTIONS,
    chain_from_spec,
    experiment_names,
    run_experiment,
    _SCHEMAS,
)
from .walks import (
    DegenerateSpectrumError,
    coined_walk,
    phase_gap,
    quantize_ct,
    quantize_szegedy,
)

MAX_GRID_JOBS = 10_000
CACHE_MODES = ("use", "ignore", "refresh")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    grid: dict
    seed: int
    out_dir: str
    cache: str

    @staticmethod
    def from_dict(raw: dict) -> "RunConfig":
        required = {"experiment", "grid"}
        missing = required - set(raw)
        if missing:
            raise ConfigError(f"config missing keys: {sorted(missing)}")
        experiment = raw["experiment"]
        if experiment not in _SCHEMAS:
            raise ConfigError(
                f"unknown experiment {experiment!r}; known: {experiment_names()}"
            )
        grid = raw["grid"]
        if not isinstance(grid, dict) or not all(isinstance(v, list) and v for v in grid.values()):
            raise ConfigError("grid must map each parameter to a nonempty list of values")
        if set(grid) != _SCHEMAS[experiment]:
            raise ConfigError(
                f"grid keys {sorted(grid)} do not match parameters "
                f"{sorted(_SCHEMAS[experiment])} of {experiment!r}"
            )
        jobs = math.prod(len(v) for v in grid.values())
        if jobs > MAX_GRID_JOBS:
            raise ConfigError(f"grid expands to {jobs} jobs, cap is {MAX_GRID_JOBS}")
        seed = int(raw.get("seed", 0))
        if not 0 <= seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {seed}")
        cache = raw.get("cache", "use")
        if cache not in CACHE_MODES:
            raise ConfigError(f"cache must be one of {CACHE_MODES}, got {cache!r}")
        out_dir = raw.get("out", "results")
        return RunConfig(experiment, grid, seed, str(out_dir), cache)

    def jobs(self) -> list[dict]:
        keys = sorted(self.grid)
        combos = itertools.product(*(self.grid[k] for k in keys))
        return [dict(zip(keys, combo)) for combo in combos]


def cache_key(experiment: str, params: dict, seed: int) -> str:
    payload = json.dumps(
        {"experiment": experiment, "params": params, "seed": seed, "version": CODE_VERSION},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _result_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _run_one(config: RunConfig, params: dict) -> dict:
    key = cache_key(config.experiment, params, config.seed)
    path = os.path.join(config.out_dir, f"{config.experiment}-{key[:12]}.json")
    if config.cache == "use" and os.path.exists(path):
        try:
            with open(path) as fh:
                stored = json.load(fh)
            if stored.get("cache_key") == key:
                stored["cached"] = True
                return stored
        except (json.JSONDecodeError, OSError):
            pass
    result = run_experiment(config.experiment, params)
    payload = {
        "experiment": config.experiment,
        "params": params,
        "seed": config.seed,
        "cache_key": key,
        "result": result.to_dict(),
    }
    _atomic_write_text(path, _result_json(payload))
    payload["cached"] = False
    return payload


def command_run(config_path: str, jobs: int, seed, out_dir, cache) -> int:
    try:
        with open(config_path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    if seed is not None:
        raw["seed"] = seed
    if out_dir is not None:
        raw["out"] = out_dir
    if cache is not None:
        raw["cache"] = cache
    try:
        config = RunConfig.from_dict(raw)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    os.makedirs(config.out_dir, exist_ok=True)
    job_params = config.jobs()
    if jobs <= 1 or len(job_params) <= 1:
        payloads = [_run_one(config, p) for p in job_params]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_one, config, p) for p in job_params]
            payloads = [f.result() for f in futures]
    # summary ordering follows the grid expansion, not completion order
    failures = []
    for payload in payloads:
        result = payload["result"]
        failing = [a for a in result["assertions"] if not a[3]]
        status = "ok" if not failing else "FAIL"
        origin = "cached" if payload.get("cached") else "computed"
        print(f"{payload['experiment']} {payload['cache_key'][:12]} {origin} {status}")
        for label, lhs, rhs, _ in failing:
            failures.append((payload["cache_key"][:12], label, lhs, rhs))
    summary = {
        "experiment": config.experiment,
        "jobs": len(payloads),
        "failures": [list(f) for f in failures],
        "all_hold": not failures,
    }
    _atomic_write_text(
        os.path.join(config.out_dir, "summary.json"), _result_json(summary)
    )
    if failures:
        print(f"{len(failures)} assertion(s) failed:", file=sys.stderr)
        for key12, label, lhs, rhs in failures:
            print(f"  {key12} {label}: {lhs:.6g} <= {rhs:.6g} is false", file=sys.stderr)
        return 1
    return 0


def command_report(result_dir: str) -> int:
    if not os.path.isdir(result_dir):
        print(f"error: {result_dir!r} is not a directory", file=sys.stderr)
        return 2
    names = sorted(
        f for f in os.listdir(result_dir) if f.endswith(".json") and f != "summary.json"
    )
    grouped: dict[str, list[dict]] = {}
    skipped = 0
    for name in names:
        path = os.path.join(result_dir, name)
        try:
            with open(path) as fh:
                payload = json.load(fh)
            result = payload["result"]
            grouped.setdefault(payload["experiment"], []).append(payload)
            _ = result["assertions"], result["measurements"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            print(f"warning: skipping corrupt result file {name}: {exc}", file=sys.stderr)
            skipped += 1
    if not grouped:
        print(f"error: no readable result files in {result_dir!r}", file=sys.stderr)
        return 2
    lines = ["# Experiment report", ""]
    csv_rows = ["experiment,param_hash,label,value"]
    for experiment in sorted(grouped):
        lines.append(f"## {experiment}")
        lines.append("")
        lines.append(AUDIT_DESCRIPTIONS.get(experiment, ""))
        lines.append("")
        lines.append("| params | assertions | failing |")
        lines.append("|---|---|---|")
        for payload in sorted(grouped[experiment], key=lambda p: p["cache_key"]):
            result = payload["result"]
            key12 = payload["cache_key"][:12]
            n_assert = len(result["assertions"])
            n_fail = sum(1 for a in result["assertions"] if not a[3])
            param_text = json.dumps(payload["params"], sort_keys=True)
            lines.append(f"| `{param_text}` | {n_assert} | {n_fail} |")
            for label, value in result["measurements"]:
                text = "" if value is None else f"{value:.17g}"
                csv_rows.append(f"{experiment},{key12},{label},{text}")
            for label, _, _, holds in result["assertions"]:
                csv_rows.append(f"{experiment},{key12},assert:{label},{int(holds)}")
        lines.append("")
    if skipped:
        lines.append(f"Skipped {skipped} corrupt result file(s).")
        lines.append("")
    report_path = os.path.join(result_dir, "report.md")
    csv_path = os.path.join(result_dir, "combined.csv")
    _atomic_write_text(report_path, "\n".join(lines))
    _atomic_write_text(csv_path, "\n".join(csv_rows) + "\n")
    print(f"wrote {report_path} and {csv_path}")
    return 0


def command_chain_export(kind: str, params: str, out_path: str) -> int:
    spec = f"{kind}:{params}" if params else kind
    try:
        P = chain_from_spec(spec)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    save_csv(P, out_path)
    print(f"wrote {out_path} ({P.size} states)")
    return 0


def command_walk_spectrum(kind: str, params: str) -> int:
    try:
        if kind == "ct":
            walk = quantize_ct(chain_from_spec(params))
            values = np.sort(walk.eigenvalues)
            angles = None
        elif kind == "szegedy":
            walk = quantize_szegedy(chain_from_spec(params))
            angles = np.sort(np.angle(np.linalg.eigvals(walk.unitary)))
            values = None
        elif kind in ("hadamard_cycle", "grover_lattice"):
            walk = coined_walk(kind, *[int(p) for p in params.split(",")])
            angles = np.sort(np.angle(np.linalg.eigvals(walk.unitary)))
            values = None
        else:
            print(
                "error: walk kind must be ct, szegedy, hadamard_cycle, or grover_lattice",
                file=sys.stderr,
            )
            return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if values is not None:
        for v in values:
            print(f"{v:.17g}")
    else:
        for a in angles:
            print(f"{a:.17g}")
    try:
        gap = phase_gap(walk)
        print(f"phase_gap {gap:.17g}")
    except DegenerateSpectrumError:
        print("phase_gap degenerate spectrum")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwmix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment grid from a JSON config")
    run_p.add_argument("config")
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--cache", choices=CACHE_MODES, default=None)

    report_p = sub.add_parser("report", help="summarize a directory of result files")
    report_p.add_argument("dir")

    chain_p = sub.add_parser("chain", help="chain utilities")
    chain_sub = chain_p.add_subparsers(dest="chain_command", required=True)
    export_p = chain_sub.add_parser("export", help="write a chain as CSV")
    export_p.add_argument("kind")
    export_p.add_argument("params")
    export_p.add_argument("out")

    walk_p = sub.add_parser("walk", help="walk utilities")
    walk_sub = walk_p.add_subparsers(dest="walk_command", required=True)
    spectrum_p = walk_sub.add_parser("spectrum", help="print a walk spectrum")
    spectrum_p.add_argument("kind")
    spectrum_p.add_argument("params")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return command_run(args.config, args.jobs, args.seed, args.out, args.cache)
    if args.command == "report":
        return command_report(args.dir)
    if args.command == "chain":
        return command_chain_export(args.kind, args.params, args.out)
    if args.command == "walk":
        return command_walk_spectrum(args.kind, args.params)
    return 2


if __name__ == "__main__":
    sys.exit(main())
