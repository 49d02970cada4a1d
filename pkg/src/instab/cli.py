"""Command line: ``instab run <config> | --preset NAME | --suite [--out DIR] [--jobs K]``,
``instab presets``.

Exit codes: 0 when every experiment meets its expectation, 2 when some
verdict contradicts it, 1 on config or runtime errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

from .config import Expect, ExperimentConfig, SuiteConfig, load_config
from .errors import ConfigError
from .presets import list_presets, preset_config, suite_path
from .report import Verdict

OUT_ENV = "INSTAB_OUT_DIR"
DEFAULT_OUT = "instab-out"


def run_experiment(exp: ExperimentConfig, out_dir: str) -> dict:
    """Run one experiment, write its files and return its summary entry."""
    target = os.path.join(out_dir, exp.name)
    os.makedirs(target, exist_ok=True)
    entry = {"name": exp.name, "kind": exp.kind.value, "check": exp.check,
             "expect": exp.expect.value}
    try:
        outcome = exp.func(**exp.params)
    except Exception as exc:  # reported, turns the run into exit 1
        entry.update(verdict="ERROR", met=False, error=f"{type(exc).__name__}: {exc}")
        with open(os.path.join(target, "error.txt"), "w", encoding="utf-8") as fh:
            fh.write(traceback.format_exc())
        return entry
    rep = outcome.report
    with open(os.path.join(target, "data.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(outcome.data_csv)
    with open(os.path.join(target, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(rep.to_json() + "\n")
    failed = rep.verdict is Verdict.FAIL
    entry.update(rep.summary())
    entry["name"] = exp.name
    entry["met"] = failed if exp.expect is Expect.FAIL else not failed
    return entry


def run_suite(suite: SuiteConfig, out_dir: str, jobs: int = 1) -> int:
    os.makedirs(out_dir, exist_ok=True)
    exps = list(suite.experiments)
    if jobs > 1 and len(exps) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(run_experiment, exps, [out_dir] * len(exps)))
    else:
        entries = [run_experiment(e, out_dir) for e in exps]
    if any(e["verdict"] == "ERROR" for e in entries):
        code = 1
    elif all(e["met"] for e in entries):
        code = 0
    else:
        code = 2
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump({"experiments": entries, "exit_code": code}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for e in entries:
        flag = "ok" if e["met"] else "UNMET"
        print(f"{e['name']:<24} {e['verdict']:<14} expect={e['expect']:<4} {flag}")
    return code


def _out_dir(arg: Optional[str], suite: SuiteConfig) -> str:
    return arg or os.environ.get(OUT_ENV) or suite.output_dir or DEFAULT_OUT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="instab", description="Run stability and instability experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a config file or a bundled preset")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("config", nargs="?", help="path to a JSON experiment config")
    src.add_argument("--preset", help="name of a bundled preset")
    src.add_argument("--suite", action="store_true", help="run the bundled acceptance suite")
    run.add_argument("--out", help=f"output directory (else ${OUT_ENV}, the config, or {DEFAULT_OUT})")
    run.add_argument("--jobs", type=int, default=1, help="experiments run in parallel")
    sub.add_parser("presets", help="list bundled presets")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name in list_presets():
            print(name)
        return 0
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 1
    try:
        if args.preset:
            suite = preset_config(args.preset)
        else:
            suite = load_config(suite_path() if args.suite else args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run_suite(suite, _out_dir(args.out, suite), args.jobs)


if __name__ == "__main__":
    sys.exit(main())
