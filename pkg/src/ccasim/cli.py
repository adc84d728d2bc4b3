"""Command line interface: run a single cell, sweep a grid, verify expanders,
and export results to CSV."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adversary import AdversarySpec
from .engine import run_simulation
from .harness import (
    ExperimentPlan,
    export_csv,
    make_input,
    run_plan,
    summaries_from_jsonl,
    verify_expander_cmd,
)
from .model import SimConfig, as_fraction


def _load_json(path: str) -> dict:
    with Path(path).open() as fh:
        return json.load(fh)


def cmd_run(args) -> int:
    cfg_obj = _load_json(args.config)
    cfg_obj.setdefault("params", {})
    cfg_obj["params"].setdefault("profile", args.profile)
    plan = ExperimentPlan.from_json({
        "cells": [cfg_obj],
        "seeds": cfg_obj.get("seeds", [int(cfg_obj.get("seed", 0))]),
        "profile": args.profile,
    })
    records, summaries = run_plan(plan, out_path=args.out)
    for rec in records:
        print(json.dumps(rec, sort_keys=True, separators=(",", ":")))
    print(json.dumps({"summary": summaries}, sort_keys=True), file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    plan = ExperimentPlan.from_json(_load_json(args.grid))
    if args.profile:
        plan.profile = args.profile
    records, summaries = run_plan(plan, out_path=args.out)
    for s in summaries:
        print(json.dumps(s, sort_keys=True))
    return 0


def cmd_verify_expander(args) -> int:
    params = _load_json(args.params)
    verdict = verify_expander_cmd(params, args.seed)
    if verdict["pass"]:
        print(f"PASS left_degree={verdict['left_degree']} right_degree={verdict['right_degree']}")
        return 0
    print(f"FAIL witness={verdict['witness']}")
    return 1


def cmd_export(args) -> int:
    summaries, skipped = summaries_from_jsonl(args.infile)
    n_skipped = export_csv(summaries, args.csv)
    if skipped or n_skipped:
        print(f"warning: skipped {skipped + n_skipped} malformed records", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ccasim",
                                     description="Byzantine-resilient cloud-assisted "
                                                 "congested clique simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--profile", choices=["paper", "scaled"], default="scaled")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid")
    p_sweep.add_argument("--grid", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--profile", choices=["paper", "scaled"], default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify-expander", help="build and exhaustively verify")
    p_ver.add_argument("--params", required=True)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify_expander)

    p_exp = sub.add_parser("export", help="flatten JSONL results to CSV")
    p_exp.add_argument("--in", dest="infile", required=True)
    p_exp.add_argument("--csv", required=True)
    p_exp.set_defaults(func=cmd_export)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
