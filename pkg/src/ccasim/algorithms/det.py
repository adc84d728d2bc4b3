"""Deterministic-model algorithms: two downloads and the three expander-based
disjunction algorithms. All shared structure (round-robin committees, seeded
expanders) is derived from public data, so every machine rebuilds it
identically.
"""

from __future__ import annotations

import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np

from ..engine import Simulation
from ..expanders import ExpanderParams, build_glse, build_lse
from ..model import NULL


def _strategy(sim: Simulation):
    return sim.adversary.strategy if sim.adversary is not None else None


def _zero_index(sim: Simulation, offset: int = 0) -> int | None:
    zeros = np.flatnonzero(sim.data.bits[1:] == 0) + 1
    if zeros.size == 0:
        return None
    return int(zeros[min(offset, zeros.size - 1)])


def naive_download(sim: Simulation) -> dict[int, object]:
    """Every honest machine queries the whole array; no communication at all,
    so the run finishes with zero message rounds."""
    n = sim.config.n
    outputs: dict[int, object] = {}
    if sim.adversary is not None:
        sim.adversary.on_round_start(sim)
    idx = np.arange(1, n + 1)
    for m in range(1, sim.config.k + 1):
        if m in sim.corrupted:
            outputs[m] = None
            continue
        bits = sim.query_epoch(m, idx)
        sim.machines[m].res[1:] = bits
        outputs[m] = bits.copy()
    return outputs


def roundrobin_committee(i: int, k: int, csize: int) -> list[int]:
    return [((i - 1) * csize + j) % k + 1 for j in range(csize)]


def roundrobin_download(sim: Simulation) -> dict[int, object]:
    """Each bit is served by its 2*beta*k+1 round-robin committee; members
    query it once and broadcast it, receivers take the per-bit majority."""
    cfg = sim.config
    n, k = cfg.n, cfg.k
    csize = 2 * cfg.byz_budget + 1
    committees = [None] + [roundrobin_committee(i, k, csize) for i in range(1, n + 1)]
    assignments: dict[int, list[int]] = {m: [] for m in range(1, k + 1)}
    for i in range(1, n + 1):
        for m in committees[i]:
            assignments[m].append(i)
    load = max(len(a) for a in assignments.values())

    votes0 = np.zeros((k + 1, n + 1), dtype=np.int16)
    votes1 = np.zeros((k + 1, n + 1), dtype=np.int16)
    queried_by: dict[int, set[int]] = {i: set() for i in range(1, n + 1)}
    strategy = _strategy(sim)
    queried: set[int] = set()

    for r in range(load):
        sim.begin_round()
        if r == 0:
            # all committee queries fit in the first query sub-round
            for m in range(1, k + 1):
                if m in sim.corrupted or not assignments[m]:
                    continue
                bits = sim.query_batch(m, assignments[m])
                sim.machines[m].res[assignments[m]] = bits
                queried_by_m = queried_by
                for i in assignments[m]:
                    queried_by_m[i].add(m)
                queried.add(m)
        else:
            # machines corrupted after round 0 already queried honestly
            for m in range(1, k + 1):
                if m in sim.corrupted or m in queried or not assignments[m]:
                    continue
                bits = sim.query_batch(m, assignments[m])
                sim.machines[m].res[assignments[m]] = bits
                for i in assignments[m]:
                    queried_by[i].add(m)
                queried.add(m)
        sends: dict[int, list[tuple[int, tuple]]] = {}
        for m in range(1, k + 1):
            if r >= len(assignments[m]):
                continue
            i = assignments[m][r]
            truth = sim.data.bit(i)
            if m in sim.corrupted:
                ctx = SimpleNamespace(i=i, true_bit=truth, k=k, n=n, mid=m,
                                      receivers=[d for d in range(1, k + 1) if d != m])
                rep = strategy.bit_report(ctx) if strategy else truth
                if rep is None:
                    continue
                if isinstance(rep, dict):
                    sends[m] = [(d, ("creport", i, bool(b))) for d, b in rep.items()]
                else:
                    sends[m] = [(d, ("creport", i, bool(rep))) for d in range(1, k + 1) if d != m]
            else:
                b = int(sim.machines[m].res[i])
                sends[m] = [(d, ("creport", i, bool(b))) for d in range(1, k + 1) if d != m]
        inbox = sim.message_subround(sends)
        for dst, items in inbox.items():
            if dst in sim.corrupted:
                continue
            for src, payload in items:
                tag, i, b = payload
                if src not in committees[i]:
                    continue  # non-member votes carry no weight
                if b == 1:
                    votes1[dst, i] += 1
                else:
                    votes0[dst, i] += 1
        sim.end_round()

    outputs: dict[int, object] = {}
    for m in range(1, k + 1):
        if m in sim.corrupted:
            outputs[m] = None
            continue
        st = sim.machines[m]
        res = np.where(votes1[m, 1:] > votes0[m, 1:], 1, 0).astype(np.int8)
        own = st.res[1:]
        res = np.where(own != NULL, own, res)  # members trust their own queries
        st.res[1:] = res
        outputs[m] = res.copy()

    sim.diagnostics["committee_size"] = csize
    sim.diagnostics["max_load"] = load
    sim.diagnostics["coverage_min"] = min(len(q) for q in queried_by.values()) if n else 0
    return outputs


def _ladder_graph(sim: Simulation, r: int, beta_expansion: Fraction):
    cfg = sim.config
    params = ExpanderParams(n=cfg.n, k=cfg.k, beta=beta_expansion,
                            delta=Fraction(1, 2**r), kind="lse")
    return build_lse(params, cfg.graph_seed)


def lse_disjunct1(sim: Simulation) -> dict[int, object]:
    """Phase ladder over seeded LSEs; found indices are broadcast and every
    receiver verifies candidates with one cloud query, blacklisting liars."""
    cfg = sim.config
    n, k = cfg.n, cfg.k
    phases = math.ceil(math.log2(n)) if n > 1 else 1
    strategy = _strategy(sim)

    res = {m: sim.machines[m].res for m in range(1, k + 1)}
    finished: dict[int, int] = {}
    pending: dict[int, list[tuple[int, int]]] = {m: [] for m in range(1, k + 1)}

    def broadcast_candidates(sends, senders_done):
        for m in range(1, k + 1):
            if m in finished or m in senders_done:
                continue
            if m in sim.corrupted:
                ctx = SimpleNamespace(mid=m, k=k, n=n, honest_index=None,
                                      zero_index=_zero_index(sim),
                                      receivers=[d for d in range(1, k + 1) if d != m])
                cand = strategy.candidate_index(ctx) if strategy else None
                if cand is None:
                    continue
                if isinstance(cand, dict):
                    sends[m] = [(d, ("cand", int(j))) for d, j in cand.items()]
                else:
                    sends[m] = [(d, ("cand", int(cand))) for d in range(1, k + 1) if d != m]

    def collect(inbox):
        for dst, items in inbox.items():
            if dst in sim.corrupted or dst in finished:
                continue
            for src, payload in items:
                if payload[0] == "cand":
                    pending[dst].append((src, int(payload[1])))

    for r in range(1, phases + 1):
        g = _ladder_graph(sim, r, cfg.beta)
        mine = g.machine_assignments()

        # round A: query own neighborhood, broadcast any set index found
        sim.begin_round()
        sends: dict[int, list[tuple[int, tuple]]] = {}
        done_now = set()
        for m in range(1, k + 1):
            if m in sim.corrupted or m in finished:
                continue
            todo = [i for i in mine[m] if res[m][i] == NULL]
            if todo:
                res[m][todo] = sim.query_batch(m, todo)
            hits = np.flatnonzero(res[m][1:] == 1) + 1
            if hits.size:
                j = int(hits[0])
                sends[m] = [(d, ("cand", j)) for d in range(1, k + 1) if d != m]
                finished[m] = 1
                done_now.add(m)
        broadcast_candidates(sends, done_now)
        collect(sim.message_subround(sends))
        sim.end_round()

        # round B: verify received candidates, broadcast on success
        sim.begin_round()
        sends = {}
        done_now = set()
        for m in range(1, k + 1):
            if m in sim.corrupted or m in finished:
                continue
            st = sim.machines[m]
            for src, idx in sorted(pending[m]):
                if src in st.blacklist or not (1 <= idx <= n):
                    continue
                if res[m][idx] == NULL:
                    res[m][idx] = sim.query(m, idx)
                if res[m][idx] == 0:
                    sim.blacklist(m, src)
            pending[m] = []
            hits = np.flatnonzero(res[m][1:] == 1) + 1
            if hits.size:
                j = int(hits[0])
                sends[m] = [(d, ("cand", j)) for d in range(1, k + 1) if d != m]
                finished[m] = 1
                done_now.add(m)
        broadcast_candidates(sends, done_now)
        collect(sim.message_subround(sends))
        sim.end_round()

    # final full scan for the machines that never saw a one
    sim.begin_round()
    for m in range(1, k + 1):
        if m in sim.corrupted or m in finished:
            continue
        todo = np.flatnonzero(res[m][1:] == NULL) + 1
        if todo.size:
            res[m][todo] = sim.query_batch(m, todo)
        finished[m] = 1 if np.any(res[m][1:] == 1) else 0
    sim.end_round()

    return {m: (finished.get(m) if m not in sim.corrupted else None)
            for m in range(1, k + 1)}


def lse_disjunct2(sim: Simulation) -> dict[int, object]:
    """Threshold variant: LSEs built with expansion parameter 1/2+beta; a
    machine adopts 1 once at least k/2 machines voted 1, with no verification
    queries at all."""
    cfg = sim.config
    n, k = cfg.n, cfg.k
    phases = math.ceil(math.log2(n)) if n > 1 else 1
    expansion = Fraction(1, 2) + cfg.beta
    strategy = _strategy(sim)

    y = {m: 0 for m in range(1, k + 1)}
    shadow_y = {m: 0 for m in range(1, k + 1)}  # honest-default for byzantine votes
    res = {m: sim.machines[m].res for m in range(1, k + 1)}

    for r in range(1, phases + 1):
        g = _ladder_graph(sim, r, expansion)
        mine = g.machine_assignments()
        sim.begin_round()
        for m in range(1, k + 1):
            if m in sim.corrupted:
                if shadow_y[m] == 0 and any(sim.data.bit(i) for i in mine[m]):
                    shadow_y[m] = 1
                continue
            if y[m] == 0:
                todo = [i for i in mine[m] if res[m][i] == NULL]
                if todo:
                    res[m][todo] = sim.query_batch(m, todo)
                if np.any(res[m][1:] == 1):
                    y[m] = 1
        sends: dict[int, list[tuple[int, tuple]]] = {}
        for m in range(1, k + 1):
            if m in sim.corrupted:
                ctx = SimpleNamespace(mid=m, k=k, n=n, honest_y=shadow_y[m],
                                      receivers=[d for d in range(1, k + 1) if d != m])
                vote = strategy.y_vote(ctx) if strategy else shadow_y[m]
                if vote is None:
                    continue
                sends[m] = [(d, ("yvote", bool(vote))) for d in range(1, k + 1) if d != m]
            else:
                sends[m] = [(d, ("yvote", bool(y[m]))) for d in range(1, k + 1) if d != m]
        inbox = sim.message_subround(sends)
        for m in range(1, k + 1):
            if m in sim.corrupted:
                continue
            ones = sum(1 for _src, p in inbox.get(m, []) if p[0] == "yvote" and p[1] == 1)
            ones += y[m]  # a machine counts its own vote
            if ones >= k / 2:
                y[m] = 1
        sim.end_round()

    return {m: (y[m] if m not in sim.corrupted else None) for m in range(1, k + 1)}


def glse_explicit(sim: Simulation) -> dict[int, object]:
    """Explicit disjunction: query the GLSE neighborhood, broadcast all set
    indices, then verify candidates supported by at least s senders; a failed
    verification blacklists every sender of that index."""
    cfg = sim.config
    n, k = cfg.n, cfg.k
    delta = cfg.params.get("delta_promise", Fraction(1, n))
    if not isinstance(delta, Fraction):
        delta = Fraction(delta).limit_denominator(10**6)
    delta = max(delta, Fraction(1, n))
    s = int(cfg.params.get("s", 0)) or max(
        1, round(k * math.sqrt(float(cfg.beta) * float(cfg.gamma) / n))
    )
    params = ExpanderParams(n=n, k=k, beta=cfg.beta, delta=delta, kind="glse", s=s)
    g = build_glse(params, cfg.graph_seed)
    mine = g.machine_assignments()
    strategy = _strategy(sim)

    # phase 1: queries + pipelined broadcast of all set indices found
    if sim.adversary is not None:
        sim.adversary.on_round_start(sim)
    found: dict[int, list[int]] = {}
    sim.begin_round()
    for m in range(1, k + 1):
        if m in sim.corrupted:
            continue
        bits = sim.query_batch(m, mine[m]) if mine[m] else np.zeros(0, dtype=np.int8)
        sim.machines[m].res[mine[m]] = bits
        found[m] = [i for i, b in zip(mine[m], bits) if b == 1]
    sim.end_round()

    byz = sim.byzantine_ids()
    for pos, m in enumerate(byz):
        ctx = SimpleNamespace(mid=m, k=k, n=n, s=s, byz_ids=byz, byz_rank=pos,
                              zero_index=_zero_index(sim, offset=pos // max(1, s)),
                              honest_list=[i for i in mine[m] if sim.data.bit(i) == 1])
        lst = strategy.candidate_list(ctx) if strategy else ctx.honest_list
        found[m] = [int(i) for i in (lst or [])]

    budget = max((len(mine[m]) for m in range(1, k + 1)), default=1)
    sim.charge_bulk_broadcast(
        {m: len(found.get(m, [])) for m in range(1, k + 1)},
        item_bits=cfg.field_bits(), worst_case_items=budget,
    )

    # phase 2: local sequential verification, one candidate per round
    outputs: dict[int, object] = {m: None for m in range(1, k + 1)}
    active = [m for m in range(1, k + 1) if m not in sim.corrupted]
    cand_senders: dict[int, dict[int, set[int]]] = {}
    for m in active:
        by_index: dict[int, set[int]] = {}
        for src in range(1, k + 1):
            for i in found.get(src, []):
                by_index.setdefault(i, set()).add(src)
        cand_senders[m] = by_index
    fail_blacklist_sizes: list[int] = []

    while active:
        sim.begin_round()
        still = []
        for m in active:
            st = sim.machines[m]
            res = st.res
            live = {
                i: {src for src in senders if src not in st.blacklist}
                for i, senders in cand_senders[m].items()
            }
            ready = sorted(i for i, senders in live.items() if len(senders) >= s)
            if not ready:
                outputs[m] = 0
                continue
            j = ready[0]
            if res[j] == NULL:
                res[j] = sim.query(m, j)
            if res[j] == 1:
                outputs[m] = j
                continue
            guilty = sorted(live[j])
            for src in guilty:
                if src != m:
                    sim.blacklist(m, src)
            fail_blacklist_sizes.append(len(guilty))
            del cand_senders[m][j]
            still.append(m)
        sim.end_round()
        active = still

    sim.diagnostics["s"] = s
    sim.diagnostics["failed_verification_blacklists"] = fail_blacklist_sizes
    return outputs
