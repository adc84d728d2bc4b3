"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criterion 10's query-slope clause is asserted exactly as specified; at the
prescribed desk scale the verification-spreading cost dominates the sampling
term, so the measured slope sits far below the band (see the test's
diagnostic output).
"""

import itertools
import math
import statistics
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from ccasim.adversary import AdversarySpec, Strategy
from ccasim.algorithms.benign import (
    build_forest,
    committee_claims,
    weak_parity_resolve,
    weak_resolve_values,
)
from ccasim.committees import (
    committee_quality,
    elect_public,
    membership_load,
    sigma_majorizing,
    sigma_weak_lemma,
)
from ccasim.engine import Simulation, run_simulation
from ccasim.expanders import ExpanderParams, build_glse, build_lse, verify_glse, verify_lse, _sample_graph
from ccasim.harness import lowerbound_demo_trial, make_input
from ccasim.model import InputArray, SimConfig
from ccasim.randomness import HashFunction, RandomTape


def report(num, ok, detail=""):
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def run(alg, n, k, beta, model, data, spec, seed, params=None):
    cfg = SimConfig(n=n, k=k, beta=beta, model=model, seed=seed, algorithm=alg,
                    params=params or {})
    return run_simulation(cfg, data, spec)


STRATEGY_LIBRARY = ["silent", "bitflip", "splitvote", "infiltrator",
                    "ktarequester", "tieforcer"]


def test_c01_naive_download_exactness():
    ok = True
    details = []
    for n in (16, 256, 4096):
        data = make_input(n, Fraction(1, 2), n)
        rep = run("det.naive_download", n, 4, Fraction(1, 4), "det", data,
                  AdversarySpec(mode="static", strategy="silent"), seed=n)
        honest_q = [q for m, q in enumerate(rep.q_per_machine, start=1)
                    if m not in rep.corrupted_set]
        good = rep.correct and all(q == n for q in honest_q) \
            and rep.t_rounds == 0 and rep.m_total == 0
        ok &= good
        details.append(f"n={n}: Q={rep.q_max} T={rep.t_rounds} M={rep.m_total}")
    report(1, ok, "; ".join(details))


def test_c02_roundrobin_all_strategies():
    n, k, beta = 256, 8, Fraction(1, 4)
    bound = -(-n * (2 * int(beta * k) + 1) // k)
    bad = 0
    overload = 0
    for strat in STRATEGY_LIBRARY:
        for seed in range(50):
            rep = run("det.roundrobin_download", n, k, beta, "det",
                      make_input(n, Fraction(1, 2), seed),
                      AdversarySpec(mode="static", strategy=strat), seed=seed)
            bad += not rep.correct
            honest_q = [q for m, q in enumerate(rep.q_per_machine, start=1)
                        if m not in rep.corrupted_set]
            overload += any(q > bound for q in honest_q)
    report(2, bad == 0 and overload == 0,
           f"{len(STRATEGY_LIBRARY) * 50} runs, incorrect={bad}, "
           f"load bound {bound} violated {overload} times")


def test_c03_deterministic_coverage_sanity():
    beta = Fraction(1, 4)
    rep = run("det.roundrobin_download", 256, 8, beta, "det",
              make_input(256, Fraction(1, 2), 1),
              AdversarySpec(mode="static", strategy="silent", budget=0), seed=1)
    need = int(beta * 8) + 1
    got = rep.extras["coverage_min"]
    report(3, got >= need, f"min queriers per bit {got} >= beta*k+1 = {need}")


def test_c04_expander_verification():
    lse_grid = [
        (12, 4, Fraction(1, 4), Fraction(1, 4)), (12, 4, Fraction(1, 4), Fraction(1, 2)),
        (12, 4, Fraction(1, 2), Fraction(1, 4)), (12, 4, Fraction(1, 2), Fraction(1, 2)),
        (16, 8, Fraction(1, 4), Fraction(1, 4)), (16, 8, Fraction(1, 4), Fraction(1, 2)),
        (16, 8, Fraction(1, 2), Fraction(1, 4)), (16, 8, Fraction(1, 2), Fraction(1, 2)),
        (20, 8, Fraction(1, 4), Fraction(1, 4)), (20, 8, Fraction(1, 2), Fraction(1, 2)),
        (24, 8, Fraction(1, 4), Fraction(1, 4)), (24, 8, Fraction(1, 2), Fraction(1, 4)),
    ]
    passed = 0
    seeds = [3, 17]
    count = 0
    for (n, k, beta, delta), seed in itertools.product(lse_grid, seeds):
        if count >= 20:
            break
        count += 1
        g = build_lse(ExpanderParams(n=n, k=k, beta=beta, delta=delta, kind="lse"), seed)
        passed += verify_lse(g, beta, delta)
    glse_grid = [
        (12, 6, Fraction(1, 3), Fraction(1, 2), 1), (12, 6, Fraction(1, 3), Fraction(1, 2), 2),
        (12, 6, Fraction(1, 2), Fraction(1, 2), 1), (12, 6, Fraction(1, 2), Fraction(1, 2), 2),
        (10, 5, Fraction(2, 5), Fraction(1, 2), 1), (10, 5, Fraction(1, 5), Fraction(1, 2), 2),
        (8, 4, Fraction(1, 4), Fraction(1, 2), 1), (8, 4, Fraction(1, 2), Fraction(1, 2), 1),
        (12, 4, Fraction(1, 4), Fraction(1, 4), 2), (12, 4, Fraction(1, 2), Fraction(1, 2), 2),
    ]
    gpassed = 0
    for (n, k, beta, delta, s) in glse_grid:
        g = build_glse(ExpanderParams(n=n, k=k, beta=beta, delta=delta, kind="glse", s=s), 5)
        gpassed += verify_glse(g, beta, delta, s)
    # a deliberately under-provisioned degree must fail with a witness
    witness = None
    for seed in range(60):
        g = _sample_graph(ExpanderParams(n=8, k=4, beta=Fraction(1, 2),
                                         delta=Fraction(1, 4), kind="lse", d=1), seed, 0)
        ok, w = verify_lse(g, Fraction(1, 2), Fraction(1, 4), return_witness=True)
        if not ok:
            witness = w
            break
    report(4, passed == 20 and gpassed == 10 and witness is not None,
           f"LSE {passed}/20, GLSE {gpassed}/10, under-provisioned witness {witness}")


def test_c05_lse_disjunction_grid():
    n, k = 512, 16
    deltas = [Fraction(0), Fraction(1, 2), Fraction(1, 16)]
    spec = AdversarySpec(mode="det", strategy="flood")  # worst of 8 candidate sets
    bad = 0
    comparison_ok = True
    detail = []
    for d in deltas:
        q1max = 0
        q2max = 0
        for seed in range(100):
            data = make_input(n, d, seed)
            r1 = run("det.lse_disjunct1", n, k, Fraction(3, 4), "det", data, spec, seed)
            r2 = run("det.lse_disjunct2", n, k, Fraction(1, 4), "det", data, spec, seed)
            bad += (not r1.correct) + (not r2.correct)
            q1max = max(q1max, r1.q_max)
            q2max = max(q2max, r2.q_max)
        comparison_ok &= q2max <= q1max + k
        detail.append(f"d={d}: q1={q1max} q2={q2max}")
    report(5, bad == 0 and comparison_ok,
           f"600 det-searched runs, incorrect={bad}; " + "; ".join(detail))


def test_c06_glse_soundness():
    n, k = 512, 16
    spec = AdversarySpec(mode="static", strategy="flood")
    unsound = 0
    weak_blacklists = 0
    runs = 0
    for beta in (Fraction(1, 4), Fraction(3, 4)):
        for d_promise in (Fraction(1, 2), Fraction(1, 16)):
            for input_delta in (d_promise, Fraction(0)):
                for seed in range(5):
                    runs += 1
                    data = make_input(n, input_delta, seed)
                    rep = run("det.glse_explicit", n, k, beta, "det", data, spec,
                              seed, params={"delta_promise": d_promise})
                    s = rep.extras["s"]
                    for v in rep.outputs.values():
                        if v is not None and v != 0 and data.bit(v) != 1:
                            unsound += 1
                    for size in rep.extras["failed_verification_blacklists"]:
                        if size < s:
                            weak_blacklists += 1
    report(6, unsound == 0 and weak_blacklists == 0,
           f"{runs} runs: unsound outputs {unsound}, "
           f"failed verifications below s: {weak_blacklists}")


def test_c07_blacklist_download():
    n, k, beta = 4096, 64, Fraction(1, 4)
    gamma = 0.75
    bound = 8 * (n * math.log(n) / (gamma * k) + math.sqrt(float(beta) * n / gamma))
    bad = 0
    over = 0
    unjust = 0
    for strat in ("tieforcer", "splitvote"):
        for seed in range(100):
            rep = run("harsh.blacklist_download", n, k, beta, "harsh",
                      make_input(n, Fraction(1, 2), seed),
                      AdversarySpec(mode="adaptive", strategy=strat), seed=seed)
            bad += not rep.correct
            over += rep.q_max > bound
            corrupted = set(rep.corrupted_set)
            unjust += any(acc not in corrupted for _r, _a, acc in rep.blacklist_events)
    report(7, bad == 0 and over <= 1 and unjust == 0,
           f"200 seeds: incorrect={bad}, over Q bound ({bound:.0f}) {over}, "
           f"unjust blacklists {unjust}")


def test_c08_gossip_download_scaled():
    n, k, beta = 2048, 128, Fraction(25, 128)  # beta*k integral realization of 1/5
    spec = AdversarySpec(mode="static", strategy="infiltrator")
    clean = 0
    shrink_bad = 0
    incorrect_clean = 0
    unjust = 0
    for seed in range(50):
        rep = run("harsh.gossip_download", n, k, beta, "harsh",
                  make_input(n, Fraction(1, 2), seed), spec, seed=seed)
        corrupted = set(rep.corrupted_set)
        unjust += any(acc not in corrupted for _r, _a, acc in rep.blacklist_events)
        if not rep.extras["clean"]:
            print(f"  seed {seed}: non-clean run (reported, not failed)")
            continue
        clean += 1
        incorrect_clean += not rep.correct
        for ph in rep.extras["phases"]:
            if ph["u_mid"] > ph["alpha_bound"] + 1e-9:
                shrink_bad += 1
    report(8, clean >= 45 and incorrect_clean == 0 and shrink_bad == 0 and unjust == 0,
           f"clean {clean}/50, incorrect-on-clean {incorrect_clean}, "
           f"shrinkage violations {shrink_bad}, unjust blacklists {unjust}")


def test_c09_spread():
    n, k = 256, 32
    gamma = 0.5
    cap = math.ceil(8 * math.log(n) / gamma) * math.ceil(math.log2(k))
    all_hold = 0
    over_cap = 0
    for seed in range(200):
        rep = run("harsh.spread", n, k, Fraction(1, 2), "harsh",
                  make_input(n, Fraction(1, 8), seed),
                  AdversarySpec(mode="static", strategy="silent"),
                  seed=seed, params={"seed_holders": 1})
        all_hold += rep.correct
        over_cap += rep.q_max > cap
    report(9, all_hold >= 198 and over_cap == 0,
           f"all-honest-hold in {all_hold}/200, Q cap ({cap}) exceeded {over_cap} times")


def test_c10_randomized_disjunction():
    n, k, beta = 4096, 32, Fraction(1, 2)
    spec = AdversarySpec(mode="static", strategy="silent")
    correctness_ok = True
    detail = []
    q_by_delta = {}
    slope_deltas = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8),
                    Fraction(1, 16), Fraction(1, 32), Fraction(1, 64)]
    for d in slope_deltas + [Fraction(0)]:
        qs = []
        good = 0
        for seed in range(100):
            rep = run("harsh.randomized_disjunction", n, k, beta, "harsh",
                      make_input(n, d, seed), spec, seed=seed)
            qs.append(rep.q_max)
            good += rep.correct
        q_by_delta[d] = statistics.median(qs)
        if d in (Fraction(0), Fraction(1, 2), Fraction(1, 8), Fraction(1, 64)):
            correctness_ok &= good >= 99
            detail.append(f"d={d}: {good}/100")
    xs = np.log([float(1 / d) for d in slope_deltas])
    ys = np.log([q_by_delta[d] for d in slope_deltas])
    slope = float(np.polyfit(xs, ys, 1)[0])
    medians = {str(d): q_by_delta[d] for d in slope_deltas}
    print(f"\n  medians vs 1/density: {medians}")
    print(f"  (the spreading step's per-phase candidate queries dominate the "
          f"sampling term at n=4096, k=32, flattening the curve)")
    report(10, correctness_ok and 0.75 <= slope <= 1.25,
           f"correctness {'; '.join(detail)}; log-log slope {slope:.3f} "
           f"(required 1.0 +/- 0.25)")


class _FakeVectorLiar(Strategy):
    def __init__(self, fakes):
        super().__init__({}, None)
        self.fakes = fakes

    def resolve_claims(self, ctx):
        return self.fakes.get(ctx.mid, ctx.truth)

    def xor_claim(self, ctx):
        fake = self.fakes.get(ctx.mid)
        if fake is None:
            return ctx.truth
        seg = fake[ctx.l - 1:ctx.r]
        return int(np.bitwise_xor.reduce(np.array(seg)))


def test_c11_resolution_frugality_exhaustive():
    kk = 6
    K = list(range(1, kk + 1))
    resolver = 4
    failures = 0
    total = 0
    rounds_bound = (3 - 1) * (math.ceil(math.log2(kk)) + 2) + 2
    x_patterns = [tuple((seed >> j) & 1 for j in range(kk)) for seed in range(64)]
    for bits in x_patterns:
        cfg = SimConfig(n=kk, k=4, beta=Fraction(1, 2), model="benign", seed=1,
                        algorithm="benign.weak_resolve")
        sim = Simulation(cfg, InputArray(list(bits)))
        sim.corrupt([1, 2])
        for mm in (3,):
            sim.machines[mm].res[1:] = np.array(bits, dtype=np.int8)
        truth_parity = sum(bits) % 2
        for lies1 in range(64):
            fake1 = tuple((lies1 >> j) & 1 for j in range(kk))
            for lies2 in (0, 63, lies1 ^ 21):  # spot set per second liar
                fake2 = tuple((lies2 >> j) & 1 for j in range(kk))
                total += 1
                sim.adversary = SimpleNamespace(
                    strategy=_FakeVectorLiar({1: fake1, 2: fake2}))
                st = sim.machines[resolver]
                st.blacklist.clear()
                before = int(sim.ledger.queries[resolver])
                claims = committee_claims(sim, [1, 2, 3], K, resolver)
                values, q = weak_resolve_values(sim, resolver, [1, 2, 3], K, claims)
                if tuple(values) != bits or q > 2:
                    failures += 1
                    continue
                st.blacklist.clear()
                value, rounds, q2 = weak_parity_resolve(sim, resolver, [1, 2, 3], K)
                if value != truth_parity or q2 > 2 or rounds > rounds_bound:
                    failures += 1
    report(11, failures == 0,
           f"{total} lie patterns x inputs: failures {failures}; "
           f"parity rounds bound {rounds_bound}")


def test_c12_hash_family_exactness():
    def exhaustive(c, p):
        funcs = [HashFunction(c=c, domain=p, range_=p, prime=p, coeffs=co)
                 for co in itertools.product(range(p), repeat=c)]
        for xs in itertools.combinations(range(p), c):
            seen = {tuple(h(x) for x in xs) for h in funcs}
            if len(seen) != p**c:
                return False
        return True

    ok = exhaustive(2, 5) and exhaustive(3, 7)
    report(12, ok, "joint evaluations exactly uniform at (c=2,P=5,L=5) and (c=3,P=7,L=7)")


def test_c13_committee_quality_monte_carlo():
    n, k = 256, 32
    trials = 500
    weak_sigma = sigma_weak_lemma(n, 0.25)       # beta = 3/4
    maj_sigma = sigma_majorizing(n, 0.25)        # beta = 1/4
    weak_fail = 0
    maj_fail = 0
    load_bad = 0
    for seed in range(trials):
        committees, _, _ = elect_public(weak_sigma, n, k=k, seed=seed)
        tape = RandomTape(seed, "c13-weak")
        corrupted = set()
        while len(corrupted) < 24:
            corrupted.add(int(tape.integers(1, k + 1)))
        if any(not committee_quality(c, corrupted)["weak"] for c in committees):
            weak_fail += 1
        load = membership_load(committees)
        if max(load.values()) > weak_sigma * n / k + weak_sigma**2:
            load_bad += 1

        committees, _, _ = elect_public(maj_sigma, n, k=k, seed=seed + 10**6)
        tape = RandomTape(seed, "c13-maj")
        corrupted = set()
        while len(corrupted) < 8:
            corrupted.add(int(tape.integers(1, k + 1)))
        if any(not committee_quality(c, corrupted)["majorizing"] for c in committees):
            maj_fail += 1
        load = membership_load(committees)
        if max(load.values()) > maj_sigma * n / k + maj_sigma**2:
            load_bad += 1
    report(13, weak_fail <= 5 and maj_fail <= 5 and load_bad == 0,
           f"weak failures {weak_fail}/500, majorizing failures {maj_fail}/500, "
           f"load bound violations {load_bad}")


def test_c14_benign_download_equivalence():
    n, k = 1024, 16
    weak_algs = ("benign.linear_download", "benign.fast_linear_download",
                 "benign.parallel_download")
    bad = 0
    runs = 0
    for seed in range(50):
        data = make_input(n, Fraction(1, 3), seed)
        spec = AdversarySpec(mode="static", strategy="splitvote")
        for alg in weak_algs + ("benign.majorizing_download",):
            runs += 1
            rep = run(alg, n, k, Fraction(1, 4), "benign", data, spec, seed)
            bad += not rep.correct
        for alg in weak_algs:
            runs += 1
            rep = run(alg, n, k, Fraction(3, 4), "benign", data, spec, seed)
            bad += not rep.correct
    report(14, bad == 0, f"{runs} runs across four download algorithms, incorrect={bad}")


def test_c15_convergecast_forest_shape():
    ok = True
    details = []
    for n, k in [(64, 4), (16, 8), (256, 64), (1024, 32)]:
        f = build_forest(n, k)
        good = f.tree_count == min(math.ceil(n / k), k)
        good &= f.arity == math.ceil(n / k + 1)
        for root in f.roots:
            tree_leaves = [v for v in f.nodes[1:]
                           if v.tree == f.nodes[root].tree and v.is_leaf]
            good &= len(tree_leaves) == math.ceil(k * k / n)
            if k * k <= n:
                good &= f.nodes[root].is_leaf
        good &= all(len(v.children) >= 2 for v in f.nodes[1:] if not v.is_leaf)
        leaf_idx = sorted(i for v in f.nodes[1:] if v.is_leaf for i in v.indices)
        good &= leaf_idx == list(range(1, n + 1))
        ok &= good
        details.append(f"({n},{k}): trees={f.tree_count} arity={f.arity} h={f.height}")
    report(15, ok, "; ".join(details))


def test_c16_parity_algorithms():
    n, k, beta = 256, 8, Fraction(1, 4)
    bad = 0
    for alg in ("benign.converge_parity", "benign.majorizing_parity"):
        for seed in range(100):
            data = make_input(n, Fraction(seed % 7, 16), seed)
            rep = run(alg, n, k, beta, "benign", data,
                      AdversarySpec(mode="static", strategy="bitflip"), seed=seed)
            want = data.parity()
            if not rep.correct or any(v != want for v in rep.outputs.values()
                                      if v is not None):
                bad += 1
    report(16, bad == 0, f"200 runs against direct XOR, mismatches {bad}")


def test_c17_lowerbound_empirical_sanity():
    n, delta = 1024, Fraction(1, 64)
    budget = int(0.5 / float(max(Fraction(1, n), delta))) - 1  # < (1/2) / density
    misses = sum(lowerbound_demo_trial(n, delta, budget, seed) for seed in range(200))
    report(17, misses >= 80,
           f"under-querying variant missed the planted set in {misses}/200 trials "
           f"(budget {budget} queries)")


def test_c18_determinism_replay():
    cases = [
        ("det.lse_disjunct1", "det", Fraction(3, 4),
         AdversarySpec(mode="det", strategy="flood")),
        ("harsh.blacklist_download", "harsh", Fraction(1, 4),
         AdversarySpec(mode="adaptive", strategy="tieforcer")),
        ("harsh.gossip_download", "harsh", Fraction(1, 4),
         AdversarySpec(mode="static", strategy="infiltrator")),
        ("benign.parallel_download", "benign", Fraction(1, 4),
         AdversarySpec(mode="static", strategy="splitvote")),
        ("benign.majorizing_parity", "benign", Fraction(1, 4),
         AdversarySpec(mode="static", strategy="bitflip")),
    ]
    ok = True
    for alg, model, beta, spec in cases:
        data = make_input(256, Fraction(1, 2), 99)
        r1 = run(alg, 256, 16, beta, model, data, spec, seed=99)
        r2 = run(alg, 256, 16, beta, model, data, spec, seed=99)
        ok &= r1.to_json() == r2.to_json()
    report(18, ok, f"{len(cases)} byte-identical replays")
