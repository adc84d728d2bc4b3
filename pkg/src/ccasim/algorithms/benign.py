"""Benign-model algorithms: weak-committee resolution primitives, the
convergecast forest, four download algorithms and two parity algorithms.

Committee claim transfers that exceed the per-message cap are pipelined;
round budgets follow the worst-case schedule of each step. Resolution
queries are the only cloud traffic beyond the initial slice queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from ..committees import elect_public, sigma_majorizing, sigma_weak
from ..engine import Simulation
from ..model import NULL, SimulationFault


def _strategy(sim: Simulation):
    return sim.adversary.strategy if sim.adversary is not None else None


def _pair_bits(sim: Simulation) -> int:
    return sim.config.field_bits() + 1


# --------------------------------------------------------------------------
# Public committees


def elect_weak_committees(sim: Simulation, nu: int, sigma: int | None = None,
                          tag_base: int = 0):
    cfg = sim.config
    sigma = sigma or sigma_weak(cfg.n, float(cfg.gamma))
    sim.begin_round()
    committees, bits, tag = elect_public(sigma, nu, k=cfg.k, seed=cfg.seed,
                                         tag_base=tag_base)
    for m in sim.honest_ids():
        sim.ledger.charge_queries(m, bits)
    sim.end_round()
    return [sorted(c.members) for c in committees], tag


def elect_majorizing_committees(sim: Simulation, nu: int, tag_base: int = 0):
    cfg = sim.config
    sigma = sigma_majorizing(cfg.n, float(cfg.beta))
    sim.begin_round()
    committees, bits, tag = elect_public(sigma, nu, k=cfg.k, seed=cfg.seed,
                                         tag_base=tag_base)
    for m in sim.honest_ids():
        sim.ledger.charge_queries(m, bits)
    sim.end_round()
    return [sorted(c.members) for c in committees], tag


# --------------------------------------------------------------------------
# Weak resolution primitives


def committee_claims(sim: Simulation, members, K, resolver):
    """Claim vectors sent by committee members to one resolver. Honest members
    report their res values (which they must know); Byzantine members answer
    through their strategy, or stay silent."""
    strategy = _strategy(sim)
    truth = tuple(int(sim.data.bits[i]) for i in K)
    claims = {}
    for mm in members:
        if mm == resolver:
            continue
        if mm in sim.corrupted:
            ctx = SimpleNamespace(mid=mm, resolver=resolver, k=sim.config.k,
                                  n=sim.config.n, indices=tuple(K), truth=truth)
            ans = strategy.resolve_claims(ctx) if strategy else list(truth)
            claims[mm] = tuple(int(b) for b in ans) if ans is not None else None
        else:
            row = sim.machines[mm].res[list(K)]
            if np.any(row == NULL):
                raise SimulationFault(
                    f"honest committee member {mm} does not know all resolved bits"
                )
            claims[mm] = tuple(int(b) for b in row)
    return claims


def weak_resolve_values(sim: Simulation, resolver: int, members, K, claims):
    """Walk K in order; on disagreement among non-blacklisted claimants, one
    cloud query settles the bit and every wrong claimant is blacklisted.
    Returns (values, queries_spent)."""
    st = sim.machines[resolver]
    out = [0] * len(K)
    queries = 0

    def live_members():
        return [mm for mm in members
                if mm != resolver and mm not in st.blacklist and claims.get(mm) is not None]

    pos = 0
    while pos < len(K):
        live = live_members()
        if not live:
            # committee quality violated: fall back to direct queries
            sim.diagnostics.setdefault("resolve_quality_violations", 0)
            sim.diagnostics["resolve_quality_violations"] += 1
            rest = list(K[pos:])
            bits = sim.query_batch(resolver, rest) if sim.phase else _direct_query(sim, resolver, rest)
            queries += len(rest)
            out[pos:] = [int(b) for b in bits]
            break
        ref = claims[live[0]]
        if all(claims[mm][pos:] == ref[pos:] for mm in live[1:]):
            out[pos:] = list(ref[pos:])
            break
        t = pos
        while True:
            vals = {claims[mm][t] for mm in live}
            if len(vals) > 1:
                break
            out[t] = vals.pop()
            t += 1
        truth = sim.data.bit(K[t])
        sim.ledger.charge_queries(resolver, 1)
        queries += 1
        out[t] = truth
        for mm in live:
            if claims[mm][t] != truth:
                sim.blacklist(resolver, mm)
        pos = t + 1
    return out, queries


def _direct_query(sim, mid, indices):
    sim.ledger.charge_queries(mid, len(indices))
    return [sim.data.bit(i) for i in indices]


def charge_claim_transfer(sim: Simulation, members, resolvers, k_len: int):
    """Messages for one committee-to-resolvers claim transfer, pipelined."""
    ppm = sim.items_per_message(_pair_bits(sim))
    per_msgs = math.ceil(max(1, k_len) / ppm)
    msgs = 0
    for mm in members:
        if mm in sim.corrupted:
            continue
        msgs += per_msgs * sum(1 for r in resolvers if r != mm)
    sim.ledger.charge_messages(msgs)
    return math.ceil(max(1, k_len) / ppm)


def weak_resolve_step(sim: Simulation, committee, K, resolvers):
    """Full Weak_Resolve step: claim transfer plus every resolver's walk.
    Rounds charged: transfer pipeline + |K| sequential walk budget."""
    K = list(K)
    pipe = charge_claim_transfer(sim, committee, resolvers, len(K))
    sim.advance_rounds(pipe + len(K))
    results = {}
    for r in resolvers:
        if r in sim.corrupted:
            continue
        claims = committee_claims(sim, committee, K, r)
        values, q = weak_resolve_values(sim, r, committee, K, claims)
        sim.machines[r].res[K] = np.array(values, dtype=np.int8)
        results[r] = q
    return results


def fast_weak_resolve(sim: Simulation, resolver: int, members, K):
    """Next-smallest-index protocol with the n+1 sentinel; returns
    (values_in_K_order, rounds_used, queries)."""
    cfg = sim.config
    n = cfg.n
    strategy = _strategy(sim)
    K = sorted(K)
    st = sim.machines[resolver]
    truth_of = {j: sim.data.bit(j) for j in K}
    zeros = [j for j in K if truth_of[j] == 0]
    ones = [j for j in K if truth_of[j] == 1]
    res: dict[int, int] = {}
    rounds = 0
    queries = 0

    def honest_answer(b, ordinal):
        lst = ones if b == 1 else zeros
        return lst[ordinal - 1] if ordinal <= len(lst) else n + 1

    def flipped_answer(b, ordinal):
        return honest_answer(1 - b, ordinal)

    def member_answer(mm, b, ordinal):
        if mm in sim.corrupted:
            ctx = SimpleNamespace(mid=mm, resolver=resolver, k=cfg.k, n=n, b=b,
                                  ordinal=ordinal,
                                  honest_answer=honest_answer(b, ordinal),
                                  flipped_answer=flipped_answer(b, ordinal))
            return strategy.next_index_claim(ctx) if strategy else ctx.honest_answer
        return honest_answer(b, ordinal)

    done = False
    for ordinal in range(1, len(K) + 2):
        if done:
            break
        for b in (0, 1):
            live = [mm for mm in members if mm != resolver and mm not in st.blacklist]
            answers = {}
            for mm in live:
                a = member_answer(mm, b, ordinal)
                if a is not None:
                    answers[mm] = int(a)
            rounds += 1
            if not answers:
                sim.diagnostics.setdefault("resolve_quality_violations", 0)
                sim.diagnostics["resolve_quality_violations"] += 1
                for j in K:
                    if j not in res:
                        sim.ledger.charge_queries(resolver, 1)
                        queries += 1
                        res[j] = truth_of[j]
                done = True
                break
            received = sorted(set(answers.values()))
            for j in received:
                if j != n + 1 and j in res:
                    continue
                if j == n + 1:
                    for jj in K:
                        if jj not in res:
                            res[jj] = 1 - b
                    done = True
                    break
                if not (1 <= j <= n) or j not in truth_of:
                    # claims outside K ∪ {n+1} are protocol violations
                    for mm, a in answers.items():
                        if a == j:
                            sim.blacklist(resolver, mm)
                    continue
                if j == received[-1]:
                    res[j] = b  # largest candidate adopted unverified
                else:
                    sim.ledger.charge_queries(resolver, 1)
                    queries += 1
                    rounds += 1
                    res[j] = truth_of[j]
                if res[j] == b:
                    for mm, a in answers.items():
                        if a != j:
                            sim.blacklist(resolver, mm)
                    break
                for mm, a in answers.items():
                    if a == j:
                        sim.blacklist(resolver, mm)
            if done:
                break

    values = [res.get(j, 0) for j in K]
    return values, rounds, queries


def fast_weak_resolve_step(sim: Simulation, committee, K, resolvers):
    K = sorted(K)
    results = {}
    max_rounds = 0
    total_msgs = 0
    honest_members = [mm for mm in committee if mm not in sim.corrupted]
    for r in resolvers:
        if r in sim.corrupted:
            continue
        values, rounds, q = fast_weak_resolve(sim, r, committee, K)
        sim.machines[r].res[K] = np.array(values, dtype=np.int8)
        results[r] = q
        max_rounds = max(max_rounds, rounds)
        total_msgs += rounds * len([mm for mm in honest_members if mm != r])
    sim.ledger.charge_messages(total_msgs)
    sim.advance_rounds(max(1, max_rounds))
    return results


def weak_parity_resolve(sim: Simulation, resolver: int, members, K):
    """Binary-search parity resolution; returns (parity, rounds, queries)."""
    cfg = sim.config
    strategy = _strategy(sim)
    K = list(K)
    st = sim.machines[resolver]
    bits = [sim.data.bit(j) for j in K]
    prefix = np.concatenate([[0], np.cumsum(bits) % 2]).astype(int)

    def true_xor(l, r):  # 1-based inclusive ordinals
        return int(prefix[r] ^ prefix[l - 1])

    def member_xor(mm, l, r):
        if mm in sim.corrupted:
            ctx = SimpleNamespace(mid=mm, resolver=resolver, k=cfg.k, n=cfg.n,
                                  l=l, r=r, seg_len=r - l + 1,
                                  truth=true_xor(l, r))
            return strategy.xor_claim(ctx) if strategy else ctx.truth
        return true_xor(l, r)

    def ask(l, r, live):
        return {mm: a for mm in live if (a := member_xor(mm, l, r)) is not None}

    rounds = 1
    queries = 0
    live = [mm for mm in members if mm != resolver and mm not in st.blacklist]
    total = ask(1, len(K), live)
    live = [mm for mm in live if mm in total]
    guard = 0
    while live and len(set(total[mm] for mm in live)) > 1 and guard < len(members) + 2:
        guard += 1
        l, r = 1, len(K)
        seg = {mm: total[mm] for mm in live}
        while l != r:
            mid = (l + r) // 2
            left = ask(l, mid, live)
            rounds += 1
            deduced_right = {mm: seg[mm] ^ left.get(mm, 0) for mm in live}
            if len(set(left.get(mm) for mm in live)) <= 1:
                l = mid + 1
                seg = deduced_right
            else:
                r = mid
                seg = {mm: left.get(mm, 0) for mm in live}
        truth_bit = sim.data.bit(K[l - 1])
        sim.ledger.charge_queries(resolver, 1)
        queries += 1
        rounds += 1
        for mm in live:
            if seg[mm] != truth_bit:
                sim.blacklist(resolver, mm)
        live = [mm for mm in live if mm not in st.blacklist]
    if not live:
        sim.diagnostics.setdefault("resolve_quality_violations", 0)
        sim.diagnostics["resolve_quality_violations"] += 1
        sim.ledger.charge_queries(resolver, len(K))
        queries += len(K)
        return true_xor(1, len(K)), rounds, queries
    return total[live[0]], rounds, queries


# --------------------------------------------------------------------------
# Convergecast forest


@dataclass
class ForestNode:
    nid: int
    tree: int
    level: int  # subtree height; leaves have level 1
    parent: int | None
    children: list[int] = field(default_factory=list)
    indices: list[int] = field(default_factory=list)
    committee: list[int] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_root(self) -> bool:
        return self.parent is None


@dataclass
class Forest:
    n: int
    k: int
    arity: int
    leaves_per_tree: int
    tree_count: int
    nodes: list  # 1-based; nodes[0] is None
    roots: list[int] = field(default_factory=list)

    @property
    def height(self) -> int:
        return max(self.nodes[r].level for r in self.roots)

    def leaves(self) -> list[int]:
        return [v.nid for v in self.nodes[1:] if v.is_leaf]


def _tree_child_plan(arity: int, leaves: int):
    """Children counts for the deepest internal level of a complete arity-ary
    tree with exactly `leaves` leaves, deepest level filled left to right and
    every internal node keeping at least two children."""
    if leaves <= 1:
        return 0, []
    dstar = 1
    while arity**dstar < leaves:
        dstar += 1
    full = arity ** (dstar - 1)
    expanded = math.ceil((leaves - full) / (arity - 1)) if arity > 1 else leaves - full
    expanded = max(1, expanded)
    children_total = leaves - full + expanded
    base, extra = divmod(children_total, expanded)
    counts = [base + 1] * extra + [base] * (expanded - extra)
    return dstar, counts


def build_forest(n: int, k: int) -> Forest:
    arity = math.ceil(n / k + 1)
    leaves_per_tree = math.ceil(k * k / n)
    tree_count = min(math.ceil(n / k), k)
    nodes: list = [None]
    roots: list[int] = []

    for t in range(tree_count):
        if leaves_per_tree <= 1:
            nid = len(nodes)
            nodes.append(ForestNode(nid=nid, tree=t, level=1, parent=None))
            roots.append(nid)
            continue
        dstar, last_counts = _tree_child_plan(arity, leaves_per_tree)
        level_ids: list[list[int]] = []
        root_id = len(nodes)
        nodes.append(ForestNode(nid=root_id, tree=t, level=0, parent=None))
        roots.append(root_id)
        level_ids.append([root_id])
        for depth in range(1, dstar):  # full internal levels
            prev = level_ids[-1]
            cur = []
            for pid in prev:
                for _ in range(arity):
                    nid = len(nodes)
                    nodes.append(ForestNode(nid=nid, tree=t, level=0, parent=pid))
                    nodes[pid].children.append(nid)
                    cur.append(nid)
            level_ids.append(cur)
        deepest_parents = level_ids[-1][: len(last_counts)]
        for pid, cnt in zip(deepest_parents, last_counts):
            for _ in range(cnt):
                nid = len(nodes)
                nodes.append(ForestNode(nid=nid, tree=t, level=0, parent=pid))
                nodes[pid].children.append(nid)
        # levels as subtree heights
        def set_level(nid):
            node = nodes[nid]
            if not node.children:
                node.level = 1
                return 1
            node.level = 1 + max(set_level(c) for c in node.children)
            return node.level
        set_level(root_id)

    forest = Forest(n=n, k=k, arity=arity, leaves_per_tree=leaves_per_tree,
                    tree_count=tree_count, nodes=nodes, roots=roots)

    # contiguous index ranges: trees split [1,n], leaves split their tree block
    bounds = np.linspace(1, n + 1, tree_count + 1).astype(int)
    for t, root in enumerate(roots):
        lo, hi = int(bounds[t]), int(bounds[t + 1])
        leaf_ids = _dfs_leaves(forest, root)
        cuts = np.linspace(lo, hi, len(leaf_ids) + 1).astype(int)
        for leaf, a, b in zip(leaf_ids, cuts[:-1], cuts[1:]):
            forest.nodes[leaf].indices = list(range(int(a), int(b)))
        _fill_internal_indices(forest, root)
    return forest


def _dfs_leaves(forest: Forest, nid: int) -> list[int]:
    node = forest.nodes[nid]
    if node.is_leaf:
        return [nid]
    out = []
    for c in node.children:
        out.extend(_dfs_leaves(forest, c))
    return out


def _fill_internal_indices(forest: Forest, nid: int) -> list[int]:
    node = forest.nodes[nid]
    if node.is_leaf:
        return node.indices
    acc: list[int] = []
    for c in node.children:
        acc.extend(_fill_internal_indices(forest, c))
    node.indices = acc
    return acc


def convergecast_forest(sim: Simulation) -> Forest:
    cfg = sim.config
    forest = build_forest(cfg.n, cfg.k)
    nu = len(forest.nodes) - 1
    committees, _tag = elect_weak_committees(sim, nu)
    for nid in range(1, nu + 1):
        forest.nodes[nid].committee = committees[nid - 1]
    return forest


def convergecast(sim: Simulation) -> Forest:
    """Leaves query their partitions in parallel, then each level resolves its
    children committees; afterwards every bit is known to the honest members
    of its root."""
    forest = convergecast_forest(sim)
    sim.begin_round()
    for leaf in forest.leaves():
        node = forest.nodes[leaf]
        for m in node.committee:
            if m in sim.corrupted or not node.indices:
                continue
            bits = sim.query_batch(m, node.indices)
            sim.machines[m].res[node.indices] = bits
    sim.end_round()

    for level in range(2, forest.height + 1):
        for nid in range(1, len(forest.nodes)):
            node = forest.nodes[nid]
            if node.level != level or node.is_leaf:
                continue
            for cid in node.children:
                child = forest.nodes[cid]
                resolvers = [m for m in node.committee if m not in sim.corrupted]
                weak_resolve_step(sim, child.committee, child.indices, resolvers)
    sim.diagnostics["forest"] = {
        "arity": forest.arity, "leaves_per_tree": forest.leaves_per_tree,
        "tree_count": forest.tree_count, "height": forest.height,
        "nodes": len(forest.nodes) - 1,
    }
    sim.diagnostics["root_assignments"] = {
        r: list(forest.nodes[r].indices) for r in forest.roots
    }
    sim.diagnostics["root_committees"] = {r: list(forest.nodes[r].committee)
                                          for r in forest.roots}
    return forest


# --------------------------------------------------------------------------
# Download algorithms


def _slices(n: int, parts: int) -> list[list[int]]:
    cuts = np.linspace(1, n + 1, parts + 1).astype(int)
    return [list(range(int(a), int(b))) for a, b in zip(cuts[:-1], cuts[1:])]


def _download_outputs(sim: Simulation) -> dict[int, object]:
    out = {}
    for m in range(1, sim.config.k + 1):
        if m in sim.corrupted:
            out[m] = None
        else:
            out[m] = sim.machines[m].res[1:].copy()
    return out


def _linear_download(sim: Simulation, fast: bool) -> dict[int, object]:
    cfg = sim.config
    n, k = cfg.n, cfg.k
    committees, _ = elect_weak_committees(sim, k)
    slices = _slices(n, k)

    sim.begin_round()
    for i in range(k):
        for m in committees[i]:
            if m in sim.corrupted or not slices[i]:
                continue
            bits = sim.query_batch(m, slices[i])
            sim.machines[m].res[slices[i]] = bits
    sim.end_round()

    prefix: list[int] = []
    step = fast_weak_resolve_step if fast else weak_resolve_step
    for i in range(1, k):
        prefix = prefix + slices[i - 1]
        resolvers = [m for m in committees[i] if m not in sim.corrupted]
        if prefix and resolvers:
            step(sim, committees[i - 1], prefix, resolvers)
    everyone = [m for m in range(1, k + 1) if m not in sim.corrupted]
    step(sim, committees[k - 1], list(range(1, n + 1)), everyone)
    return _download_outputs(sim)


def linear_download(sim: Simulation) -> dict[int, object]:
    return _linear_download(sim, fast=False)


def fast_linear_download(sim: Simulation) -> dict[int, object]:
    return _linear_download(sim, fast=True)


def parallel_download(sim: Simulation) -> dict[int, object]:
    forest = convergecast(sim)
    everyone = [m for m in range(1, sim.config.k + 1) if m not in sim.corrupted]
    for r in forest.roots:
        node = forest.nodes[r]
        if node.indices:
            weak_resolve_step(sim, node.committee, node.indices, everyone)
    return _download_outputs(sim)


def majorizing_download(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    n, k = cfg.n, cfg.k
    strategy = _strategy(sim)
    committees, _ = elect_majorizing_committees(sim, k)
    slices = _slices(n, k)

    sim.begin_round()
    for i in range(k):
        for m in committees[i]:
            if m in sim.corrupted or not slices[i]:
                continue
            bits = sim.query_batch(m, slices[i])
            sim.machines[m].res[slices[i]] = bits
    sim.end_round()

    votes1 = np.zeros((k + 1, n + 1), dtype=np.int32)
    votes0 = np.zeros((k + 1, n + 1), dtype=np.int32)
    sizes = {}
    max_slice = max(len(s) for s in slices)
    for i in range(k):
        idx = np.array(slices[i], dtype=int)
        if idx.size == 0:
            continue
        truth = sim.data.bits[idx]
        for m in committees[i]:
            if m not in sim.corrupted:
                sizes[m] = sizes.get(m, 0) + len(idx)
                votes1[1:, idx] += truth
                votes0[1:, idx] += 1 - truth
                votes1[m, idx] -= truth  # no message to self
                votes0[m, idx] -= 1 - truth
            else:
                for j in idx:
                    ctx = SimpleNamespace(mid=m, i=int(j), k=k, n=n,
                                          true_bit=int(sim.data.bits[j]),
                                          receivers=[d for d in range(1, k + 1) if d != m])
                    rep = strategy.bit_report(ctx) if strategy else int(sim.data.bits[j])
                    if rep is None:
                        continue
                    if isinstance(rep, dict):
                        for d, b in rep.items():
                            (votes1 if b == 1 else votes0)[d, j] += 1
                    else:
                        (votes1 if rep == 1 else votes0)[1:, j] += 1
                        (votes1 if rep == 1 else votes0)[m, j] -= 1
    sim.charge_bulk_broadcast(sizes, item_bits=_pair_bits(sim), worst_case_items=max_slice)

    for m in range(1, k + 1):
        if m in sim.corrupted:
            continue
        st = sim.machines[m]
        learned = np.where(votes1[m, 1:] > votes0[m, 1:], 1, 0).astype(np.int8)
        own = st.res[1:]
        st.res[1:] = np.where(own != NULL, own, learned)
    return _download_outputs(sim)


# --------------------------------------------------------------------------
# Parity algorithms


def converge_parity(sim: Simulation) -> dict[int, object]:
    forest = convergecast(sim)
    cfg = sim.config
    everyone = [m for m in range(1, cfg.k + 1) if m not in sim.corrupted]
    parities = {m: 0 for m in everyone}
    for r in forest.roots:
        node = forest.nodes[r]
        if not node.indices:
            continue
        max_rounds = 0
        msgs = 0
        honest_members = [mm for mm in node.committee if mm not in sim.corrupted]
        for m in everyone:
            value, rounds, _q = weak_parity_resolve(sim, m, node.committee, node.indices)
            parities[m] ^= int(value)
            max_rounds = max(max_rounds, rounds)
            msgs += rounds * len([mm for mm in honest_members if mm != m])
        sim.ledger.charge_messages(msgs)
        sim.advance_rounds(max(1, max_rounds))
    out = {m: (parities[m] if m not in sim.corrupted else None)
           for m in range(1, cfg.k + 1)}
    return out


def majorizing_parity(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    n, k = cfg.n, cfg.k
    strategy = _strategy(sim)
    committees, _ = elect_majorizing_committees(sim, k)
    slices = _slices(n, k)

    sim.begin_round()
    for i in range(k):
        for m in committees[i]:
            if m in sim.corrupted or not slices[i]:
                continue
            bits = sim.query_batch(m, slices[i])
            sim.machines[m].res[slices[i]] = bits
    sim.end_round()

    sim.begin_round()
    sends: dict[int, list[tuple[int, tuple]]] = {}
    semi_truth = [int(sim.data.bits[np.array(s, dtype=int)].sum() % 2) if s else 0
                  for s in slices]
    for i in range(k):
        for m in committees[i]:
            if m in sim.corrupted:
                ctx = SimpleNamespace(mid=m, i=i + 1, k=k, n=n, true_bit=semi_truth[i],
                                      receivers=[d for d in range(1, k + 1) if d != m])
                rep = strategy.bit_report(ctx) if strategy else semi_truth[i]
                if rep is None:
                    continue
                if isinstance(rep, dict):
                    sends.setdefault(m, []).extend(
                        (d, ("semiparity", i + 1, bool(b))) for d, b in rep.items())
                else:
                    sends.setdefault(m, []).extend(
                        (d, ("semiparity", i + 1, bool(rep))) for d in range(1, k + 1) if d != m)
            else:
                sends.setdefault(m, []).extend(
                    (d, ("semiparity", i + 1, bool(semi_truth[i]))) for d in range(1, k + 1) if d != m)
    # a machine may sit in several committees; it may only send one message
    # per destination per round, so committee votes are pipelined by slice
    per_round: list[dict[int, list[tuple[int, tuple]]]] = []
    remaining = {src: list(msgs) for src, msgs in sends.items()}
    votes = np.zeros((k + 1, k + 1, 2), dtype=np.int32)  # receiver, slice, bit
    progress = True
    first = True
    while progress:
        if not first:
            sim.begin_round()
        first = False
        progress = False
        batch: dict[int, list[tuple[int, tuple]]] = {}
        for src, queue in remaining.items():
            used = set()
            take, keep = [], []
            for dst, payload in queue:
                if dst in used:
                    keep.append((dst, payload))
                else:
                    used.add(dst)
                    take.append((dst, payload))
            if take:
                batch[src] = take
                progress = True
            remaining[src] = keep
        if not progress:
            sim.end_round()
            break
        inbox = sim.message_subround(batch)
        for dst, items in inbox.items():
            if dst in sim.corrupted:
                continue
            for src, payload in items:
                _tag, slice_id, b = payload
                if src in committees[slice_id - 1]:
                    votes[dst, slice_id, b] += 1
        sim.end_round()

    out: dict[int, object] = {}
    for m in range(1, k + 1):
        if m in sim.corrupted:
            out[m] = None
            continue
        parity = 0
        for i in range(1, k + 1):
            own = m in committees[i - 1]
            v1 = votes[m, i, 1] + (1 if own and semi_truth[i - 1] == 1 else 0)
            v0 = votes[m, i, 0] + (1 if own and semi_truth[i - 1] == 0 else 0)
            if v1 > v0:
                parity ^= 1
        out[m] = parity
    return out


# --------------------------------------------------------------------------
# Primitive runners (exposed as algorithm ids for direct testing)


def weak_resolve_runner(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    committees, _ = elect_weak_committees(sim, 1)
    committee = committees[0]
    all_idx = list(range(1, cfg.n + 1))
    sim.begin_round()
    for m in committee:
        if m not in sim.corrupted:
            sim.machines[m].res[all_idx] = sim.query_batch(m, all_idx)
    sim.end_round()
    everyone = [m for m in range(1, cfg.k + 1) if m not in sim.corrupted]
    weak_resolve_step(sim, committee, all_idx, everyone)
    return _download_outputs(sim)


def fast_weak_resolve_runner(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    committees, _ = elect_weak_committees(sim, 1)
    committee = committees[0]
    all_idx = list(range(1, cfg.n + 1))
    sim.begin_round()
    for m in committee:
        if m not in sim.corrupted:
            sim.machines[m].res[all_idx] = sim.query_batch(m, all_idx)
    sim.end_round()
    everyone = [m for m in range(1, cfg.k + 1) if m not in sim.corrupted]
    fast_weak_resolve_step(sim, committee, all_idx, everyone)
    return _download_outputs(sim)


def weak_parity_resolve_runner(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    committees, _ = elect_weak_committees(sim, 1)
    committee = committees[0]
    all_idx = list(range(1, cfg.n + 1))
    sim.begin_round()
    for m in committee:
        if m not in sim.corrupted:
            sim.machines[m].res[all_idx] = sim.query_batch(m, all_idx)
    sim.end_round()
    out: dict[int, object] = {}
    max_rounds = 0
    for m in range(1, cfg.k + 1):
        if m in sim.corrupted:
            out[m] = None
            continue
        value, rounds, _q = weak_parity_resolve(sim, m, committee, all_idx)
        out[m] = int(value)
        max_rounds = max(max_rounds, rounds)
    sim.advance_rounds(max(1, max_rounds))
    return out


def convergecast_runner(sim: Simulation) -> dict[int, object]:
    convergecast(sim)
    return _download_outputs(sim)
