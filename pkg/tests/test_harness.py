import csv
import json
from fractions import Fraction
from pathlib import Path

import pytest

from ccasim.cli import main as cli_main
from ccasim.harness import (
    ExperimentPlan,
    export_csv,
    lowerbound_demo_trial,
    make_input,
    run_plan,
    summaries_from_jsonl,
    verify_expander_cmd,
)


def test_make_input_exact_ones():
    data = make_input(64, Fraction(1, 4), 3)
    assert data.ones == 16
    again = make_input(64, Fraction(1, 4), 3)
    assert (data.bits == again.bits).all()
    tail = make_input(64, Fraction(1, 4), 3, placement="tail")
    assert tail.set_indices() == list(range(49, 65))


def test_empty_plan_yields_empty_jsonl(tmp_path):
    plan = ExperimentPlan(cells=[], seeds=[1, 2])
    out = tmp_path / "res.jsonl"
    records, summaries = run_plan(plan, out_path=out)
    assert records == [] and summaries == []
    assert out.read_text() == ""


def naive_plan(seeds):
    return ExperimentPlan.from_json({
        "cells": [{
            "n": 32, "k": 4, "beta": "1/4", "delta": "1/2",
            "algorithm": "det.naive_download",
            "adversary": {"mode": "static", "strategy": "silent"},
        }],
        "seeds": seeds,
    })


def test_naive_cell_summary_q_equals_n(tmp_path):
    records, summaries = run_plan(naive_plan([1, 2, 3]), tmp_path / "r.jsonl")
    assert len(records) == 3
    assert all(rec["q_max"] == 32 for rec in records)
    s = summaries[0]
    assert s["q_max_med"] == 32 and s["correct_rate"] == 1.0 and s["t_mean"] == 0


def test_jsonl_reproducible_bytes(tmp_path):
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_plan(naive_plan([5, 6]), p1)
    run_plan(naive_plan([5, 6]), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_grid_cross_product():
    plan = ExperimentPlan.from_json({
        "grid": {
            "n": [16, 32], "k": [4], "beta": ["1/4"], "delta": [0, "1/2"],
            "algorithm": ["det.naive_download"],
        },
        "seeds": [1],
    })
    assert len(plan.cells) == 4


def test_csv_round_trip(tmp_path):
    records, summaries = run_plan(naive_plan([1, 2]), tmp_path / "r.jsonl")
    csv_path = tmp_path / "out.csv"
    skipped = export_csv(summaries, csv_path)
    assert skipped == 0
    rows = list(csv.DictReader(csv_path.open()))
    assert len(rows) == 1
    assert float(rows[0]["q_max_med"]) == 32.0
    assert float(rows[0]["correct_rate"]) == 1.0


def test_zero_records_header_only_csv(tmp_path):
    csv_path = tmp_path / "empty.csv"
    export_csv([], csv_path)
    content = csv_path.read_text().strip().splitlines()
    assert len(content) == 1 and content[0].startswith("n,")


def test_summaries_from_jsonl_matches_source(tmp_path):
    out = tmp_path / "r.jsonl"
    _records, direct = run_plan(naive_plan([1, 2, 3]), out)
    rebuilt, skipped = summaries_from_jsonl(out)
    assert skipped == 0
    assert rebuilt[0]["q_max_med"] == direct[0]["q_max_med"]
    assert rebuilt[0]["correct_rate"] == direct[0]["correct_rate"]


def test_malformed_jsonl_rows_skipped(tmp_path):
    out = tmp_path / "r.jsonl"
    run_plan(naive_plan([1]), out)
    with out.open("a") as fh:
        fh.write("{not json}\n")
    _rebuilt, skipped = summaries_from_jsonl(out)
    assert skipped == 1


def test_cell_fault_isolated(tmp_path):
    plan = ExperimentPlan.from_json({
        "cells": [
            {"n": 16, "k": 4, "beta": "1/4", "delta": 0,
             "algorithm": "det.naive_download",
             "adversary": {"mode": "static", "strategy": "silent",
                            "params": {"ids": [1, 2, 3]}}},  # over budget
            {"n": 16, "k": 4, "beta": "1/4", "delta": 0,
             "algorithm": "det.naive_download",
             "adversary": {"mode": "static", "strategy": "silent"}},
        ],
        "seeds": [1],
    })
    records, summaries = run_plan(plan)
    assert "error" in summaries[0]
    assert summaries[1]["correct_rate"] == 1.0
    assert len(records) == 1


def test_verify_expander_cmd_pass_and_fail():
    good = verify_expander_cmd(
        {"kind": "lse", "n": 12, "k": 4, "beta": "1/4", "delta": "1/2"}, seed=7)
    assert good["pass"]
    for seed in range(40):
        bad = verify_expander_cmd(
            {"kind": "lse", "n": 8, "k": 4, "beta": "1/2", "delta": "1/4",
             "d": 1, "raw": True}, seed=seed)
        if not bad["pass"]:
            assert bad["witness"] is not None
            return
    pytest.fail("no failing raw sample found")


def test_verify_expander_cmd_glse_s0():
    ok = verify_expander_cmd(
        {"kind": "glse", "n": 8, "k": 4, "beta": "1/4", "delta": "1/2", "s": 0},
        seed=1)
    assert ok["pass"]


def test_lowerbound_demo_misses_often():
    n, delta = 1024, Fraction(1, 64)
    budget = 32  # < (1/2) / modified-density
    misses = sum(lowerbound_demo_trial(n, delta, budget, seed) for seed in range(200))
    assert misses >= 80  # expect ~0.6 * 200


def test_cli_end_to_end(tmp_path, capsys):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({
        "cells": [{"n": 16, "k": 4, "beta": "1/4", "delta": "1/2",
                    "algorithm": "det.naive_download",
                    "adversary": {"mode": "static", "strategy": "silent"}}],
        "seeds": [1, 2],
    }))
    out = tmp_path / "res.jsonl"
    assert cli_main(["sweep", "--grid", str(grid), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2

    csv_path = tmp_path / "res.csv"
    assert cli_main(["export", "--in", str(out), "--csv", str(csv_path)]) == 0
    assert csv_path.exists()

    params = tmp_path / "exp.json"
    params.write_text(json.dumps(
        {"kind": "lse", "n": 12, "k": 4, "beta": "1/4", "delta": "1/2"}))
    assert cli_main(["verify-expander", "--params", str(params), "--seed", "7"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_cli_run_single(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "n": 16, "k": 4, "beta": "1/4", "delta": "0",
        "algorithm": "det.naive_download",
        "adversary": {"mode": "static", "strategy": "silent"},
        "seeds": [3],
    }))
    assert cli_main(["run", "--config", str(cfg)]) == 0
