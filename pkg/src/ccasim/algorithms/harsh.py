"""Harsh-model algorithms: per-bit committee download with direct
blacklisting, the phase-based gossip download, verification spreading, and
the randomized disjunction built on it.

The per-bit committee loops and the gossip tallies are computed with vector
operations over per-receiver views; metrics (queries per machine, honest
message counts, round budgets) are charged exactly as the round schedule
prescribes.
"""

from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np

from ..engine import Simulation
from ..model import ConfigError, NULL


def _strategy(sim: Simulation):
    return sim.adversary.strategy if sim.adversary is not None else None


def _zero_index(sim: Simulation, offset: int = 0):
    zeros = np.flatnonzero(sim.data.bits[1:] == 0) + 1
    if zeros.size == 0:
        return None
    return int(zeros[min(offset, zeros.size - 1)])


# --------------------------------------------------------------------------
# Blacklist_Download


def blacklist_download(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    n, k = cfg.n, cfg.k
    gamma = float(cfg.gamma)
    beta = float(cfg.beta)
    rho = cfg.params.get("rho") or max(1.0, k * math.sqrt(gamma * beta / (8 * n)))
    p = min(1.0, (9.0 * math.log(n) + 4.0 * rho) / (gamma * k))
    strategy = _strategy(sim)

    # per-machine committee coin flips, one column per bit, from each tape
    flags = np.vstack(
        [np.zeros(n + 1, dtype=bool)]
        + [np.concatenate([[False], sim.tapes.machine_tape(m).random(n) < p])
           for m in range(1, k + 1)]
    )
    alive = np.ones((k + 1, k + 1), dtype=bool)  # alive[M, j]: j not blacklisted by M
    alive_version = 0
    res = np.full((k + 1, n + 1), NULL, dtype=np.int8)
    ties_per_machine = np.zeros(k + 1, dtype=np.int64)
    pending: list[tuple[np.ndarray, int, dict[int, np.ndarray]]] = []
    honest_mask = np.ones(k + 1, dtype=bool)
    honest_mask[0] = False
    corrupted_seen: set[int] = set()
    bits_memo: dict[tuple, np.ndarray | None] = {}
    tally_cache = {"key": None, "s0": None, "s1": None}

    def refresh_roles():
        nonlocal corrupted_seen
        if sim.corrupted != corrupted_seen:
            corrupted_seen = set(sim.corrupted)
            honest_mask[:] = True
            honest_mask[0] = False
            for m in corrupted_seen:
                honest_mask[m] = False
            tally_cache["key"] = None

    def flush_pending():
        nonlocal alive_version
        # tie resolutions decided on round i fire in round i+1's query sub-round
        for tie_receivers, i, byz_bits in pending:
            truth = sim.data.bit(i)
            for M in np.flatnonzero(tie_receivers):
                if M == 0 or M in sim.corrupted:
                    continue
                sim.ledger.charge_queries(int(M), 1)
                res[M, i] = truth
                ties_per_machine[M] += 1
                for j, bits in byz_bits.items():
                    if alive[M, j] and bits[M] == 1 - truth:
                        alive[M, j] = False
                        alive_version += 1
                        sim.blacklist(int(M), int(j))
                # honest senders are on the truth side, never blacklisted here
        pending.clear()

    def byz_round_bits(i, truth):
        """Per-receiver bit vectors of the actively claiming byzantine
        machines; cached where the strategy declares its report static."""
        out = {}
        for m in sorted(corrupted_seen):
            ctx = SimpleNamespace(i=i, mid=m, k=k, n=n, true_bit=truth,
                                  sampled=bool(flags[m, i]), receivers=None)
            if strategy is None or not strategy.member_claim(ctx):
                continue
            key = strategy.bit_report_key(ctx)
            bits = bits_memo.get((m, key)) if key is not None else None
            if bits is None:
                ctx.receivers = [d for d in range(1, k + 1) if d != m]
                rep = strategy.bit_report(ctx)
                if rep is None:
                    bits = "silent"
                else:
                    bits = np.full(k + 1, -1, dtype=np.int8)
                    if isinstance(rep, dict):
                        for d, b in rep.items():
                            bits[d] = int(b)
                    else:
                        bits[1:] = int(rep)
                        bits[m] = -1
                if key is not None:
                    bits_memo[(m, key)] = bits
            if isinstance(bits, np.ndarray):
                out[m] = bits
        return out

    for i in range(1, n + 1):
        sim.begin_round()
        flush_pending()
        refresh_roles()
        truth = sim.data.bit(i)

        members = flags[:, i] & honest_mask
        honest_members = np.flatnonzero(members)
        for m in honest_members:
            sim.ledger.charge_queries(int(m), 1)
            res[m, i] = truth

        byz_bits = byz_round_bits(i, truth)

        # per-receiver tallies over non-blacklisted claimed members; the
        # byzantine part only changes at blacklist events
        cache_key = (alive_version, truth, tuple(sorted(byz_bits)))
        if tally_cache["key"] is not None and tally_cache["key"][0] == alive_version \
                and tally_cache["key"][2] == cache_key[2]:
            lie0, lie1 = tally_cache["s0"], tally_cache["s1"]
        else:
            lie0 = np.zeros(k + 1, dtype=np.int64)  # byz claims of 0 per receiver
            lie1 = np.zeros(k + 1, dtype=np.int64)
            for j, bits in byz_bits.items():
                col = alive[:, j]
                lie0 += col & (bits == 0)
                lie1 += col & (bits == 1)
            tally_cache["key"] = cache_key
            tally_cache["s0"], tally_cache["s1"] = lie0, lie1
        n_members = int(members.sum())
        if alive[1:, 1:][:, members[1:]].all():
            base_true = n_members
        else:
            base_true = alive[:, honest_members].sum(axis=1)
        s0 = lie0 + (base_true if truth == 0 else 0)
        s1 = lie1 + (base_true if truth == 1 else 0)

        # message charges: honest members broadcast to everyone not ignoring them
        if alive_version == 0:
            msgs = n_members * (k - 1)
        else:
            msgs = int(sum(alive[1:, m].sum() - 1 for m in honest_members))
        sim.ledger.charge_messages(msgs)

        tie = (s0 > rho) & (s1 > rho) & honest_mask
        adopt = honest_mask & ~tie
        adopt_val = np.where(s1 > s0, 1, 0).astype(np.int8)
        for M in np.flatnonzero(adopt):
            if res[M, i] == NULL:
                res[M, i] = adopt_val[M]
        if tie.any():
            pending.append((tie.copy(), i, dict(byz_bits)))
        sim.end_round()

    if pending:
        sim.begin_round()
        flush_pending()
        sim.end_round()

    outputs: dict[int, object] = {}
    for m in range(1, k + 1):
        if m in sim.corrupted:
            outputs[m] = None
        else:
            sim.machines[m].res[:] = res[m]
            outputs[m] = res[m, 1:].copy()
    sim.diagnostics["rho"] = rho
    sim.diagnostics["p"] = p
    sim.diagnostics["ties_max"] = int(ties_per_machine.max())
    return outputs


# --------------------------------------------------------------------------
# Gossip_Download


def gossip_defaults(cfg) -> dict:
    """Resolve the (epsilon, Z) profile. The paper-faithful profile keeps
    epsilon=1/10, Z=445 (which at desk scale collapses the phase count to
    zero); the scaled profile picks epsilon just under the largest value
    compatible with beta and sizes Z so that rho_0 is exactly the Byzantine
    budget, keeping both the adversary and the clean-run checks meaningful."""
    beta = float(cfg.beta)
    profile = cfg.params.get("profile", "scaled")
    if "epsilon" in cfg.params and "Z" in cfg.params:
        return {"epsilon": float(cfg.params["epsilon"]), "Z": float(cfg.params["Z"]),
                "profile": "custom"}
    if profile == "paper":
        return {"epsilon": 0.1, "Z": 445.0, "profile": "paper"}
    eps_max = (1.0 - 3.0 * beta) / (1.0 - beta) if beta < 1 / 3 else 0.0
    if eps_max <= 0:
        raise ConfigError("gossip download requires beta < 1/3")
    epsilon = 0.95 * eps_max
    log2n = math.log2(cfg.n)
    rho0 = max(2.0, float(cfg.byz_budget))
    z = rho0 / ((1.0 - epsilon) * log2n)
    return {"epsilon": epsilon, "Z": z, "profile": "scaled"}


def gossip_download(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    n, k = cfg.n, cfg.k
    beta = float(cfg.beta)
    gamma = float(cfg.gamma)
    prof = gossip_defaults(cfg)
    epsilon, z_param = prof["epsilon"], prof["Z"]
    if beta >= (1.0 - epsilon) / (3.0 - epsilon):
        raise ConfigError(
            f"beta={beta} too large for epsilon={epsilon}: needs beta < (1-eps)/(3-eps)"
        )
    c = z_param / gamma
    alpha = (1.0 + epsilon) * beta / ((1.0 - epsilon) * (1.0 - 2.0 * beta)) if beta > 0 else 0.0
    log2n = math.log2(n)
    if beta > 0 and alpha > 0:
        j0 = max(0, math.ceil(math.log(k / (c * log2n), 1.0 / alpha))) if k > c * log2n else 0
    else:
        j0 = max(0, math.ceil(math.log2(max(2.0, k / max(1.0, c * log2n)))))
    w_max = (1.0 + epsilon) * c * log2n * n / k
    byz_budget_k = int(cfg.byz_budget)
    strategy = _strategy(sim)

    res = np.full((k + 1, n + 1), NULL, dtype=np.int8)
    kta = np.zeros((k + 1, n + 1), dtype=bool)
    requests = np.zeros((k + 1, n + 1), dtype=bool)
    requests[1:, 1:] = True  # I_M starts as U_M = everything
    alive = np.ones((k + 1, k + 1), dtype=bool)
    truth = sim.data.bits

    honest_mask = np.zeros(k + 1, dtype=bool)
    for m in range(1, k + 1):
        honest_mask[m] = m not in sim.corrupted
    byz = sim.byzantine_ids()

    pair_bits = cfg.field_bits() + 1
    idx_bits = cfg.field_bits()
    phases_log = []
    clean = True

    def union_unknown() -> np.ndarray:
        u = np.zeros(n + 1, dtype=bool)
        for m in range(1, k + 1):
            if honest_mask[m]:
                u |= res[m] == NULL
        u[0] = False
        return u

    def charge_list_broadcast(item_bits):
        sizes = {}
        for m in range(1, k + 1):
            if honest_mask[m]:
                sizes[m] = int((res[m, 1:] != NULL).sum()) if item_bits == pair_bits else int(
                    (res[m, 1:] == NULL).sum())
        sim.charge_bulk_broadcast(sizes, item_bits=item_bits, worst_case_items=n)

    for phase in range(j0):
        p_j = c * log2n / (alpha**phase * k) if alpha > 0 else c * log2n / k
        p_j = min(1.0, p_j)
        rho_j = (1.0 - epsilon) * z_param * log2n / (alpha**phase if alpha > 0 else 1.0)
        u_start = union_unknown()
        u_start_count = int(u_start.sum())

        # ---- Committee_Work: n sequential per-bit rounds -------------------
        if sim.adversary is not None:
            sim.adversary.on_round_start(sim)
        joins = np.zeros((k + 1, n + 1), dtype=bool)
        for m in range(1, k + 1):
            open_idx = np.flatnonzero(requests[m])
            if open_idx.size:
                draws = sim.tapes.machine_tape(m).random(open_idx.size) < p_j
                joins[m, open_idx[draws]] = True

        # honest members query their unknown joined bits and broadcast reports
        was_unknown = res == NULL
        for m in range(1, k + 1):
            todo = np.flatnonzero(joins[m] & (res[m] == NULL))
            if todo.size == 0:
                continue
            if honest_mask[m]:
                res[m, todo] = sim.bulk_query(m, todo)
            else:
                res[m, todo] = truth[todo]  # shadow state, uncharged

        # byzantine committee claims: {index: bit | {receiver: bit}}
        byz_claims: dict[int, dict] = {}
        for pos, m in enumerate(byz):
            open_idx = [int(i) for i in np.flatnonzero(requests[m])]
            honest_claims = {int(i): int(res[m, i]) for i in np.flatnonzero(joins[m])}
            ctx = SimpleNamespace(
                mid=m, k=k, n=n, phase=phase, w_max=w_max, rho=rho_j,
                open_indices=open_idx, honest_claims=honest_claims,
                receivers=[d for d in range(1, k + 1) if d != m],
                bit_of=lambda i: int(truth[i]),
            )
            byz_claims[m] = strategy.gossip_claims(ctx) if strategy else honest_claims

        # per-observer over-activity filter
        work_cap = math.floor(w_max)
        overactive_events = 0
        for m in range(1, k + 1):
            if not honest_mask[m]:
                continue
            row = joins[m]
            count = int(row[1:].sum())
            if count > work_cap:
                clean = False  # EV2: an honest machine got itself blacklisted
                for M in range(1, k + 1):
                    if M != m and honest_mask[M]:
                        sim.blacklist(M, m)
                        alive[M, m] = False
                joins[m, :] = False
                overactive_events += 1
        for m, claims in list(byz_claims.items()):
            if len(claims) > work_cap:
                for M in range(1, k + 1):
                    if honest_mask[M]:
                        sim.blacklist(M, m)
                        alive[M, m] = False
                byz_claims[m] = {}
                overactive_events += 1

        # tallies over reduced committees (honest reports carry res values)
        psi0 = np.zeros((k + 1, n + 1), dtype=np.int32)
        psi1 = np.zeros((k + 1, n + 1), dtype=np.int32)
        rep0 = np.zeros(n + 1, dtype=np.int32)
        rep1 = np.zeros(n + 1, dtype=np.int32)
        for m in range(1, k + 1):
            if not honest_mask[m]:
                continue
            row = joins[m]
            rep0 += row & (res[m] == 0)
            rep1 += row & (res[m] == 1)
        psi0[1:, :] = rep0
        psi1[1:, :] = rep1
        if not alive.all():
            for m in range(1, k + 1):
                if not honest_mask[m]:
                    continue
                dead = np.flatnonzero(~alive[m, 1:]) + 1
                for j in dead:
                    if honest_mask[j]:
                        psi0[m] -= joins[j] & (res[j] == 0)
                        psi1[m] -= joins[j] & (res[j] == 1)
        for m, claims in byz_claims.items():
            for i, val in claims.items():
                if isinstance(val, dict):
                    for M, b in val.items():
                        if honest_mask[M] and alive[M, m] and requests[M, i]:
                            (psi0 if b == 0 else psi1)[M, i] += 1
                else:
                    col = alive[1:, m] & honest_mask[1:] & requests[1:, i]
                    (psi0 if val == 0 else psi1)[1:, i][col] += 1

        # messages: honest members broadcast one report per joined committee
        msgs = 0
        for m in range(1, k + 1):
            if honest_mask[m]:
                msgs += int(joins[m, 1:].sum()) * (int(alive[1:, m].sum()) - 1)
        sim.ledger.charge_messages(msgs)
        sim.ledger.tick_rounds(n)
        sim.round_idx += n

        # comm-verification and clean-run instrumentation
        ev1 = 0
        honest_join_counts = rep0 + rep1
        for i in np.flatnonzero(u_start):
            if honest_join_counts[i] < rho_j:
                ev1 += 1
        if ev1:
            clean = False
        dv_count = np.zeros(n + 1, dtype=np.int32)  # honest machines that DV'd i this phase
        for m in range(1, k + 1):
            if not honest_mask[m]:
                continue
            cloud_verified = joins[m] & was_unknown[m]
            unknown = res[m] == NULL
            sel = requests[m] & unknown
            take0 = sel & (psi0[m] >= rho_j) & (psi1[m] < rho_j)
            take1 = sel & (psi1[m] >= rho_j) & (psi0[m] < rho_j)
            res[m, np.flatnonzero(take0)] = 0
            res[m, np.flatnonzero(take1)] = 1
            dv_count += (cloud_verified | take0 | take1).astype(np.int32)

        # ---- Gossip --------------------------------------------------------
        phi0, phi1 = _gossip_tallies(sim, res, alive, honest_mask, byz, strategy, n, k)
        charge_list_broadcast(pair_bits)
        _adopt_from_gossip(res, phi0, phi1, honest_mask, byz_budget_k, n, k)
        u_mid = union_unknown()
        u_mid_count = int(u_mid.sum())

        # ---- KTA_List ------------------------------------------------------
        phi0, phi1 = _gossip_tallies(sim, res, alive, honest_mask, byz, strategy, n, k)
        charge_list_broadcast(pair_bits)
        for m in range(1, k + 1):
            strong = (phi0[m] >= 2 * byz_budget_k + 1) | (phi1[m] >= 2 * byz_budget_k + 1)
            kta[m] |= strong
            kta[m, 0] = False
        _adopt_from_gossip(res, phi0, phi1, honest_mask, byz_budget_k, n, k)

        # ---- Collect_Requests ------------------------------------------------
        req_lists: dict[int, list[int]] = {}
        for m in range(1, k + 1):
            own_unknown = sorted(int(i) for i in np.flatnonzero(res[m] == NULL) if i > 0)
            if honest_mask[m]:
                req_lists[m] = own_unknown
            else:
                shadow_kta = sorted(int(i) for i in np.flatnonzero(kta[m]) if i > 0)
                ctx = SimpleNamespace(mid=m, k=k, n=n, phase=phase,
                                      honest_requests=own_unknown,
                                      kta_candidates=shadow_kta)
                req_lists[m] = [int(i) for i in (strategy.request_indices(ctx) if strategy else own_unknown)]
        sizes = {m: len(req_lists[m]) for m in range(1, k + 1) if honest_mask[m]}
        sim.charge_bulk_broadcast(sizes, item_bits=idx_bits, worst_case_items=n)
        requests[:, :] = False
        for m in range(1, k + 1):
            if not honest_mask[m]:
                if req_lists[m]:
                    requests[m, np.array(req_lists[m], dtype=int)] = True
                continue
            requests[m, res[m] == NULL] = True
            for src in range(1, k + 1):
                if src == m or not alive[m, src]:
                    continue
                for i in req_lists[src]:
                    if kta[m, i]:
                        sim.blacklist(m, src)
                        alive[m, src] = False
                        break
            for src in range(1, k + 1):
                if src == m or not alive[m, src]:
                    continue
                if req_lists[src]:
                    requests[m, np.array(req_lists[src], dtype=int)] = True
            requests[m, 0] = False

        phases_log.append({
            "phase": phase, "p": p_j, "rho": rho_j,
            "u_start": u_start_count, "u_mid": u_mid_count,
            "alpha_bound": alpha * u_start_count,
            "ev1": ev1, "overactive": overactive_events,
            "core": int((dv_count >= byz_budget_k + 1).sum()),
        })

    # residual scan: remaining unknown bits queried directly
    sim.begin_round()
    for m in range(1, k + 1):
        if not honest_mask[m]:
            continue
        todo = np.flatnonzero(res[m] == NULL)
        todo = todo[todo > 0]
        if todo.size:
            res[m, todo] = sim.query_batch(m, todo)
    sim.end_round()

    outputs: dict[int, object] = {}
    for m in range(1, k + 1):
        if m in sim.corrupted:
            outputs[m] = None
        else:
            sim.machines[m].res[:] = res[m]
            sim.machines[m].kta[:] = kta[m]
            outputs[m] = res[m, 1:].copy()
    sim.diagnostics.update({
        "profile": prof["profile"], "epsilon": epsilon, "Z": z_param,
        "alpha": alpha, "j0": j0, "w_max": w_max, "clean": clean,
        "phases": phases_log,
    })
    return outputs


def _gossip_tallies(sim, res, alive, honest_mask, byz, strategy, n, k):
    """phi_b(i) per receiver: senders' known lists filtered by the receiver's
    blacklist. Honest lists are their res arrays; byzantine lists come from
    the strategy hook (default: their shadow-honest knowledge)."""
    know0 = np.zeros(n + 1, dtype=np.int32)
    know1 = np.zeros(n + 1, dtype=np.int32)
    for m in range(1, k + 1):
        if honest_mask[m]:
            know0 += res[m] == 0
            know1 += res[m] == 1
    phi0 = np.tile(know0, (k + 1, 1))
    phi1 = np.tile(know1, (k + 1, 1))
    if not alive.all():
        for m in range(1, k + 1):
            if not honest_mask[m]:
                continue
            for j in np.flatnonzero(~alive[m, 1:]) + 1:
                if honest_mask[j]:
                    phi0[m] -= res[j] == 0
                    phi1[m] -= res[j] == 1
    for m in byz:
        honest_pairs = [(int(i), int(res[m, i])) for i in np.flatnonzero(res[m] != NULL) if i > 0]
        ctx = SimpleNamespace(mid=m, k=k, n=n, honest_pairs=honest_pairs)
        pairs = strategy.gossip_pairs(ctx) if strategy else honest_pairs
        if not pairs:
            continue
        vec0 = np.zeros(n + 1, dtype=np.int32)
        vec1 = np.zeros(n + 1, dtype=np.int32)
        for i, b in pairs:
            (vec0 if b == 0 else vec1)[i] += 1
        receivers = alive[1:, m] & honest_mask[1:]
        phi0[1:][receivers] += vec0
        phi1[1:][receivers] += vec1
    # a sender's own knowledge is not a gossip message to itself; exclude it
    for m in range(1, k + 1):
        if honest_mask[m]:
            phi0[m] -= res[m] == 0
            phi1[m] -= res[m] == 1
    return phi0, phi1


def _adopt_from_gossip(res, phi0, phi1, honest_mask, byz_budget, n, k):
    # Byzantine shadow rows adopt too: the honest-default behavior of a
    # corrupted machine tracks what an honest machine in its place would know
    thresh = byz_budget + 1
    for m in range(1, k + 1):
        unknown = res[m] == NULL
        take0 = unknown & (phi0[m] >= thresh) & (phi0[m] >= phi1[m])
        take1 = unknown & (phi1[m] >= thresh) & (phi1[m] > phi0[m])
        res[m, np.flatnonzero(take0)] = 0
        res[m, np.flatnonzero(take1)] = 1


# --------------------------------------------------------------------------
# Spread and Randomized_Disjunction


def spread_rounds(sim: Simulation, verified: dict[int, set[int]], phases: int,
                  sample_cap: int, active=None) -> None:
    """Run the verification-spreading rounds in place: holders broadcast one
    verified index per phase; receivers sample candidates with replacement
    from the single-index senders and cloud-verify them."""
    cfg = sim.config
    n, k = cfg.n, cfg.k
    strategy = _strategy(sim)
    act = set(active) if active is not None else set(range(1, k + 1))
    pending: dict[int, list[int]] = {}

    def do_sampling(m, st):
        pool = pending.pop(m, None)
        if not pool:
            return
        tape = sim.tapes.machine_tape(m)
        picks = {pool[tape.choice_index(len(pool))] for _ in range(sample_cap)}
        picks = sorted(picks)
        bits = sim.query_batch(m, picks)
        for i, b in zip(picks, bits):
            st.res[i] = b
            if b == 1:
                verified[m].add(int(i))

    for phase in range(phases + 1):
        sim.begin_round()
        for m in sorted(act):
            if m in sim.corrupted:
                continue
            do_sampling(m, sim.machines[m])
        if phase == phases:
            sim.end_round()
            break
        sends: dict[int, list[tuple[int, tuple]]] = {}
        for m in range(1, k + 1):
            if m not in act:
                continue
            if m in sim.corrupted:
                ctx = SimpleNamespace(mid=m, k=k, n=n,
                                      zero_index=_zero_index(sim, offset=m % 7),
                                      honest_send=sorted(verified[m])[:1] or None)
                out = strategy.spread_send(ctx) if strategy else ctx.honest_send
                if not out:
                    continue
                if len(out) == 1:
                    sends[m] = [(d, ("vidx", int(out[0]))) for d in range(1, k + 1) if d != m]
                else:
                    sends[m] = [(d, ("vmulti", int(out[0]), int(out[1])))
                                for d in range(1, k + 1) if d != m]
            elif verified[m]:
                j = min(verified[m])
                sends[m] = [(d, ("vidx", j)) for d in range(1, k + 1) if d != m]
        inbox = sim.message_subround(sends)
        for m in sorted(act):
            if m in sim.corrupted:
                continue
            pool = [int(p[1]) for _src, p in inbox.get(m, []) if p[0] == "vidx"]
            if pool:
                pending[m] = pool
        sim.end_round()


def spread(sim: Simulation) -> dict[int, object]:
    """Standalone verification-spreading run; seeds one (or more) honest
    holders with a verified set-bit index."""
    cfg = sim.config
    n, k = cfg.n, cfg.k
    holders = int(cfg.params.get("seed_holders", 1))
    phases = math.ceil(math.log2(k)) if k > 1 else 1
    sample_cap = math.ceil(8.0 * math.log(n) / float(cfg.gamma))

    if sim.adversary is not None:
        # the premise names machines honest at round 0, after any corruption
        sim.adversary.on_round_start(sim)
    set_bits = sim.data.set_indices()
    verified: dict[int, set[int]] = {m: set() for m in range(1, k + 1)}
    if set_bits:
        seeded = 0
        for m in range(1, k + 1):
            if m not in sim.corrupted and seeded < holders:
                verified[m].add(set_bits[0])
                sim.machines[m].res[set_bits[0]] = 1
                seeded += 1
    vacuous = not any(verified[m] for m in range(1, k + 1) if m not in sim.corrupted)
    if vacuous:
        sim.diagnostics["vacuous"] = True

    spread_rounds(sim, verified, phases, sample_cap)
    sim.diagnostics["sample_cap"] = sample_cap
    sim.diagnostics["phases"] = phases
    outputs = {}
    for m in range(1, k + 1):
        if m in sim.corrupted:
            outputs[m] = None
        else:
            outputs[m] = min(verified[m]) if verified[m] else 0
    return outputs


def randomized_disjunction(sim: Simulation) -> dict[int, object]:
    cfg = sim.config
    n, k = cfg.n, cfg.k
    gamma_k = float(cfg.gamma) * k
    phases = math.ceil(math.log2(n)) if n > 1 else 1
    spread_phases = math.ceil(math.log2(k)) if k > 1 else 1
    sample_cap = math.ceil(8.0 * math.log(n) / float(cfg.gamma))

    verified: dict[int, set[int]] = {m: set() for m in range(1, k + 1)}
    outputs: dict[int, object] = {m: None for m in range(1, k + 1)}
    active = {m for m in range(1, k + 1)}

    for r in range(1, phases + 1):
        delta_r = 2.0**-r
        count = math.ceil((1.0 / delta_r) * math.log(n) / gamma_k)
        sim.begin_round()
        for m in sorted(active):
            if m in sim.corrupted:
                continue
            tape = sim.tapes.machine_tape(m)
            picks = sorted({int(tape.integers(1, n + 1)) for _ in range(count)})
            bits = sim.query_batch(m, picks)
            st = sim.machines[m]
            for i, b in zip(picks, bits):
                st.res[i] = b
                if b == 1:
                    verified[m].add(i)
        sim.end_round()
        spread_rounds(sim, verified, spread_phases, sample_cap, active=active)
        for m in sorted(active):
            if m in sim.corrupted:
                continue
            if verified[m]:
                outputs[m] = 1
                active.discard(m)

    for m in range(1, k + 1):
        if m in sim.corrupted:
            outputs[m] = None
        elif outputs[m] is None:
            outputs[m] = 0
    return outputs
