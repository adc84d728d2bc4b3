"""Batch experiment runner: plans, input generation, JSONL results, CSV
export, expander verification, and the under-querying lower-bound demo."""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

import numpy as np

from .adversary import AdversarySpec
from .engine import run_simulation
from .expanders import ExpanderParams, build_glse, build_lse, verify_glse, verify_lse
from .model import ConfigError, InputArray, Model, SimConfig, as_fraction
from .randomness import RandomTape


def make_input(n: int, delta, seed: int, placement: str = "random") -> InputArray:
    """Input with exactly round(n*delta) ones. 'random' scatters them from a
    seeded tape; 'tail' plants them in the last positions (the planted-set
    adversary input)."""
    delta = as_fraction(delta)
    ones = int(round(n * float(delta)))
    bits = np.zeros(n, dtype=np.int8)
    if ones > 0:
        if placement == "random":
            tape = RandomTape(seed, f"input/{n}/{delta}")
            chosen: set[int] = set()
            while len(chosen) < ones:
                chosen.add(int(tape.integers(0, n)))
            bits[sorted(chosen)] = 1
        elif placement == "tail":
            bits[n - ones:] = 1
        else:
            raise ConfigError(f"unknown placement {placement!r}")
    return InputArray(bits)


@dataclass
class Cell:
    n: int
    k: int
    beta: Fraction
    delta: Fraction
    algorithm: str
    adversary: dict
    params: dict = field(default_factory=dict)
    placement: str = "random"

    def label(self) -> dict:
        return {
            "n": self.n, "k": self.k, "beta": str(self.beta),
            "delta": str(self.delta), "algorithm": self.algorithm,
            "adversary": self.adversary.get("strategy", "none"),
        }


@dataclass
class ExperimentPlan:
    cells: list[Cell]
    seeds: list[int]
    profile: str = "scaled"

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentPlan":
        seeds = [int(s) for s in obj.get("seeds", [])]
        profile = obj.get("profile", "scaled")
        cells: list[Cell] = []
        if "cells" in obj:
            raw = obj["cells"]
        else:
            grid = obj.get("grid", {})
            keys = ["n", "k", "beta", "delta", "algorithm"]
            lists = [grid.get(key, [None]) for key in keys]
            raw = [
                {
                    "n": n, "k": k, "beta": beta, "delta": delta, "algorithm": alg,
                    "adversary": grid.get("adversary", {"mode": "static", "strategy": "silent"}),
                    "params": grid.get("params", {}),
                }
                for n, k, beta, delta, alg in product(*lists)
            ]
        for c in raw:
            cells.append(Cell(
                n=int(c["n"]), k=int(c["k"]),
                beta=as_fraction(c.get("beta", 0)),
                delta=as_fraction(c.get("delta", 0)),
                algorithm=c["algorithm"],
                adversary=dict(c.get("adversary", {"mode": "static", "strategy": "silent"})),
                params=dict(c.get("params", {})),
                placement=c.get("placement", "random"),
            ))
        return cls(cells=cells, seeds=seeds, profile=profile)

    def validate(self):
        from .algorithms import get_algorithm

        for cell in self.cells:
            info = get_algorithm(cell.algorithm)
            cfg = self._config(cell, seed=self.seeds[0] if self.seeds else 0)
            spec = AdversarySpec.from_json(cell.adversary)
            from .engine import validate_config

            validate_config(cfg, spec)

    def _config(self, cell: Cell, seed: int) -> SimConfig:
        from .algorithms import get_algorithm

        info = get_algorithm(cell.algorithm)
        params = dict(cell.params)
        params.setdefault("profile", self.profile)
        if info.problem == "explicit_disjunction" and "delta_promise" not in params:
            params["delta_promise"] = cell.delta if cell.delta > 0 else Fraction(1, cell.n)
        return SimConfig(n=cell.n, k=cell.k, beta=cell.beta, model=info.model,
                         seed=seed, algorithm=cell.algorithm, params=params)


def run_cell(plan: ExperimentPlan, cell: Cell, seed: int):
    cfg = plan._config(cell, seed)
    data = make_input(cell.n, cell.delta, seed, placement=cell.placement)
    spec = AdversarySpec.from_json(cell.adversary)
    return run_simulation(cfg, data, spec)


def run_plan(plan: ExperimentPlan, out_path=None):
    """One report per (cell, seed) in order; returns (records, summaries).
    A simulation fault aborts its cell with a diagnostic record and the other
    cells continue."""
    plan.validate()
    records = []
    summaries = []
    for ci, cell in enumerate(plan.cells):
        cell_reports = []
        error = None
        for seed in plan.seeds:
            try:
                report = run_cell(plan, cell, seed)
            except Exception as exc:  # fault isolation per cell
                error = f"{type(exc).__name__}: {exc}"
                break
            rec = {"cell": ci, "seed": seed, **report.as_dict()}
            records.append(rec)
            cell_reports.append(report)
        summaries.append(_summarize(ci, cell, cell_reports, error))
    if out_path is not None:
        path = Path(out_path)
        with path.open("w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
    return records, summaries


def _summarize(ci: int, cell: Cell, reports, error):
    base = {"cell": ci, **cell.label()}
    if error is not None:
        base.update({"error": error, "runs": len(reports)})
        return base
    if not reports:
        base.update({"runs": 0})
        return base
    qs = sorted(r.q_max for r in reports)
    base.update({
        "runs": len(reports),
        "q_max_med": statistics.median(qs),
        "q_max_p95": qs[min(len(qs) - 1, math.ceil(0.95 * len(qs)) - 1)],
        "t_mean": statistics.fmean(r.t_rounds for r in reports),
        "m_mean": statistics.fmean(r.m_total for r in reports),
        "correct_rate": statistics.fmean(1.0 if r.correct else 0.0 for r in reports),
    })
    return base


CSV_COLUMNS = ["n", "k", "beta", "delta", "algorithm", "adversary",
               "q_max_med", "q_max_p95", "t_mean", "m_mean", "correct_rate"]


def export_csv(summaries, csv_path) -> int:
    """Flatten cell summaries to CSV; malformed records are skipped with a
    warning count returned."""
    skipped = 0
    with Path(csv_path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for s in summaries:
            if "error" in s or "q_max_med" not in s:
                skipped += 1
                continue
            writer.writerow(s)
    return skipped


def summaries_from_jsonl(jsonl_path):
    """Rebuild per-cell summaries from a results file."""
    by_cell: dict[tuple, list[dict]] = {}
    skipped = 0
    with Path(jsonl_path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                cfg = rec["config"]
                key = (rec["cell"], cfg["n"], cfg["k"], cfg["beta"], cfg["algorithm"])
            except (json.JSONDecodeError, KeyError):
                skipped += 1
                continue
            by_cell.setdefault(key, []).append(rec)
    out = []
    for (ci, n, k, beta, alg), recs in sorted(by_cell.items()):
        qs = sorted(r["q_max"] for r in recs)
        out.append({
            "cell": ci, "n": n, "k": k, "beta": beta, "delta": "", "algorithm": alg,
            "adversary": "", "runs": len(recs),
            "q_max_med": statistics.median(qs),
            "q_max_p95": qs[min(len(qs) - 1, math.ceil(0.95 * len(qs)) - 1)],
            "t_mean": statistics.fmean(r["t_rounds"] for r in recs),
            "m_mean": statistics.fmean(r["m_total"] for r in recs),
            "correct_rate": statistics.fmean(1.0 if r["correct"] else 0.0 for r in recs),
        })
    return out, skipped


def verify_expander_cmd(params: dict, seed: int) -> dict:
    """Build the requested expander from the seed and run the exhaustive
    verifier; returns verdict plus witness on failure."""
    kind = params.get("kind", "lse")
    ep = ExpanderParams(
        n=int(params["n"]), k=int(params["k"]),
        beta=as_fraction(params["beta"]), delta=as_fraction(params["delta"]),
        kind=kind, s=int(params.get("s", 0)), d=int(params.get("d", 0)),
    )
    if kind == "lse":
        g = _sample_or_build(ep, seed, params)
        ok, witness = verify_lse(g, ep.beta, ep.delta, return_witness=True)
    else:
        g = _sample_or_build(ep, seed, params)
        ok, witness = verify_glse(g, ep.beta, ep.delta, ep.s, return_witness=True)
    return {"pass": bool(ok), "witness": witness,
            "left_degree": g.max_left_degree(), "right_degree": g.max_right_degree()}


def _sample_or_build(ep: ExpanderParams, seed: int, params: dict):
    from .expanders import _sample_graph

    if params.get("raw"):  # single sample, no retry loop (for failure demos)
        return _sample_graph(ep, seed, attempt=0)
    return build_lse(ep, seed) if ep.kind == "lse" else build_glse(ep, seed)


def lowerbound_demo_trial(n: int, delta, total_queries: int, seed: int) -> bool:
    """One trial of the under-querying disjunction variant against the
    planted-set input: machines collectively spend `total_queries` uniform
    queries; returns True when they FAIL to find any planted one."""
    data = make_input(n, delta, seed=0, placement="tail")
    tape = RandomTape(seed, "lb-demo")
    hits = 0
    for _ in range(total_queries):
        i = int(tape.integers(1, n + 1))
        hits += data.bit(i)
    return hits == 0
