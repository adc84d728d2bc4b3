"""Corruption scheduling and the library of Byzantine behavior strategies.

Strategies are consulted by the algorithms at their decision points (bit
reports, committee claims, candidate broadcasts, resolution answers...).
Every hook has an honest default, so a strategy only overrides the behaviors
it cares about; a corrupted machine follows exactly one strategy per run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Optional

from .model import ConfigError, SimulationFault
from .randomness import RandomTape


@dataclass
class AdversarySpec:
    mode: str  # 'static' | 'adaptive' | 'det'
    strategy: str = "silent"
    budget: Optional[int] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("static", "adaptive", "det"):
            raise ConfigError(f"unknown adversary mode {self.mode!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "AdversarySpec":
        return cls(
            mode=obj.get("mode", "static"),
            strategy=obj.get("strategy", "silent"),
            budget=obj.get("budget"),
            params=dict(obj.get("params", {})),
        )

    def as_dict(self) -> dict:
        return {"mode": self.mode, "strategy": self.strategy,
                "budget": self.budget, "params": dict(self.params)}

    def with_fixed_set(self, ids) -> "AdversarySpec":
        p = dict(self.params)
        p["ids"] = sorted(int(i) for i in ids)
        return AdversarySpec(mode="static", strategy=self.strategy,
                             budget=self.budget, params=p)


class AdversaryView(SimpleNamespace):
    """What the adversary may look at when deciding corruptions: the input,
    the transcript through the previous round, and the round index. Round-t
    traffic and randomness are never exposed at the start of round t."""


# --------------------------------------------------------------------------
# Strategy hooks


class Strategy:
    """Base strategy: every hook defaults to honest behavior (None means
    'defer to the honest action')."""

    name = "honest"

    def __init__(self, params: dict, tape: RandomTape):
        self.params = params
        self.tape = tape

    # committee bit reports: return an int bit (same to all), a dict
    # {receiver: bit}, or None for silence
    def bit_report(self, ctx):
        return ctx.true_bit

    # memo key for bit_report when the report is a pure function of the key;
    # None disables caching
    def bit_report_key(self, ctx):
        return ("truth", ctx.true_bit)

    # private-committee membership claim for bit ctx.i
    def member_claim(self, ctx):
        return ctx.sampled

    # deterministic-disjunction candidate broadcast: index, {receiver: index},
    # or None
    def candidate_index(self, ctx):
        return ctx.honest_index

    # explicit-disjunction phase-1 broadcast: list of indices
    def candidate_list(self, ctx):
        return ctx.honest_list

    # y-bit vote in the k/2-threshold disjunction
    def y_vote(self, ctx):
        return ctx.honest_y

    # verification-spreading send: list of indices (len != 1 disqualifies the
    # sender at receivers) or None
    def spread_send(self, ctx):
        return ctx.honest_send

    # gossip-phase committee work: claims as {index: bit or {receiver: bit}}
    def gossip_claims(self, ctx):
        return ctx.honest_claims

    # gossip list content for Gossip/KTA_List steps: list of (i, bit) or None
    def gossip_pairs(self, ctx):
        return ctx.honest_pairs

    # Collect_Requests content: list of indices to request
    def request_indices(self, ctx):
        return ctx.honest_requests

    # weak-resolve claim vector over ctx.indices for ctx.resolver, or None
    def resolve_claims(self, ctx):
        return ctx.truth

    # fast-weak-resolve next-index answer (int, n+1 sentinel allowed) or None
    def next_index_claim(self, ctx):
        return ctx.honest_answer

    # parity claim XOR(l, r) for ctx.resolver, or None
    def xor_claim(self, ctx):
        return ctx.truth


class Silent(Strategy):
    name = "silent"

    def bit_report(self, ctx):
        return None

    def bit_report_key(self, ctx):
        return ("silent",)

    def member_claim(self, ctx):
        return False

    def candidate_index(self, ctx):
        return None

    def candidate_list(self, ctx):
        return []

    def y_vote(self, ctx):
        return None

    def spread_send(self, ctx):
        return None

    def gossip_claims(self, ctx):
        return {}

    def gossip_pairs(self, ctx):
        return None

    def request_indices(self, ctx):
        return []

    def resolve_claims(self, ctx):
        return None

    def next_index_claim(self, ctx):
        return None

    def xor_claim(self, ctx):
        return None


class BitFlipLiar(Strategy):
    """Reports 1-x_i wherever a bit value is expected."""

    name = "bitflip"

    def bit_report(self, ctx):
        return 1 - ctx.true_bit

    def bit_report_key(self, ctx):
        return ("flip", ctx.true_bit)

    def member_claim(self, ctx):
        return True

    def resolve_claims(self, ctx):
        return [1 - b for b in ctx.truth]

    def xor_claim(self, ctx):
        return 1 - ctx.truth

    def next_index_claim(self, ctx):
        # answers as if the array were bitwise flipped
        return ctx.flipped_answer

    def y_vote(self, ctx):
        return 1 - ctx.honest_y

    def spread_send(self, ctx):
        fake = ctx.zero_index
        return [fake] if fake is not None else ctx.honest_send


class SplitVote(Strategy):
    """Reports 0 to the lower half of the machine ids and 1 to the rest."""

    name = "splitvote"

    def _split(self, ctx, low, high):
        half = ctx.k // 2
        return {r: (low if r <= half else high) for r in ctx.receivers}

    def bit_report(self, ctx):
        return self._split(ctx, 0, 1)

    def bit_report_key(self, ctx):
        return ("const",)

    def member_claim(self, ctx):
        return True

    def resolve_claims(self, ctx):
        if ctx.resolver <= ctx.k // 2:
            return [1 - b for b in ctx.truth]
        return list(ctx.truth)

    def xor_claim(self, ctx):
        return (1 - ctx.truth) if ctx.resolver <= ctx.k // 2 else ctx.truth

    def next_index_claim(self, ctx):
        return ctx.flipped_answer if ctx.resolver <= ctx.k // 2 else ctx.honest_answer


class Infiltrator(Strategy):
    """Claims membership in many private committees, up to (or beyond) the
    per-observer work cap. params: claims='wmax'|int, value='flip'|'split',
    overshoot=int extra claims beyond the cap."""

    name = "infiltrator"

    def gossip_claims(self, ctx):
        cap = int(ctx.w_max)
        want = self.params.get("claims", "wmax")
        count = cap if want == "wmax" else int(want)
        count += int(self.params.get("overshoot", 0))
        targets = [i for i in ctx.open_indices[:count]]
        value = self.params.get("value", "flip")
        claims = {}
        half = ctx.k // 2
        for i in targets:
            true_bit = ctx.bit_of(i)
            if value == "split":
                claims[i] = {r: (0 if r <= half else 1) for r in ctx.receivers}
            else:
                claims[i] = 1 - true_bit
        return claims

    def member_claim(self, ctx):
        return True

    def bit_report(self, ctx):
        return 1 - ctx.true_bit

    def gossip_pairs(self, ctx):
        return None  # stays quiet in the gossip steps

    def bit_report_key(self, ctx):
        return ("flip", ctx.true_bit)


class KTARequester(Strategy):
    """Requests bits that are already known-to-all (gets blacklisted)."""

    name = "ktarequester"

    def request_indices(self, ctx):
        extra = [i for i in ctx.kta_candidates[: int(self.params.get("count", 4))]]
        return sorted(set(ctx.honest_requests) | set(extra))


class TieForcer(Strategy):
    """In per-bit committee voting, pushes both tallies past the decision
    threshold on targeted indices. params: targets=list of indices or
    'prefix:<count>'."""

    name = "tieforcer"

    def _targets(self, ctx):
        t = self.params.get("targets", "prefix:8")
        if isinstance(t, str) and t.startswith("prefix:"):
            return set(range(1, int(t.split(":")[1]) + 1))
        return set(int(i) for i in t)

    def member_claim(self, ctx):
        return ctx.i in self._targets(ctx)

    def bit_report(self, ctx):
        if ctx.i in self._targets(ctx):
            return 1 - ctx.true_bit
        return None

    def bit_report_key(self, ctx):
        if ctx.i in self._targets(ctx):
            return ("flip", ctx.true_bit)
        return ("silent",)


class CandidateFlood(Strategy):
    """Broadcasts fresh zero-bit indices as disjunction candidates."""

    name = "flood"

    def candidate_index(self, ctx):
        return ctx.zero_index if ctx.zero_index is not None else ctx.honest_index

    def candidate_list(self, ctx):
        # coalition splits into groups of s so each fake index gets exactly
        # enough support to be entertained
        return [ctx.zero_index] if ctx.zero_index is not None else []

    def y_vote(self, ctx):
        return 1

    def spread_send(self, ctx):
        fake = ctx.zero_index
        return [fake] if fake is not None else None

    def resolve_claims(self, ctx):
        return [1 - b for b in ctx.truth]

    def bit_report(self, ctx):
        return 1 - ctx.true_bit

    def member_claim(self, ctx):
        return True


STRATEGIES = {
    cls.name: cls
    for cls in (Strategy, Silent, BitFlipLiar, SplitVote, Infiltrator,
                KTARequester, TieForcer, CandidateFlood)
}


def byzantine_act(strategy: Strategy, hook: str, ctx) -> object:
    """Dispatch a Byzantine decision; physically impossible results are
    clipped later by the engine."""
    return getattr(strategy, hook)(ctx)


# --------------------------------------------------------------------------
# Corruption scheduling


class Adversary:
    def __init__(self, spec: AdversarySpec, config):
        self.spec = spec
        self.config = config
        self.budget = spec.budget if spec.budget is not None else config.byz_budget
        if self.budget > config.byz_budget:
            raise ConfigError("adversary budget exceeds beta*k")
        self.strategy_cls = STRATEGIES.get(spec.strategy)
        if self.strategy_cls is None:
            raise ConfigError(f"unknown strategy {spec.strategy!r}")
        self.strategy: Optional[Strategy] = None
        self._corruption_rounds: list[tuple[int, list[int]]] = []

    def attach(self, sim):
        self.strategy = self.strategy_cls(self.spec.params, sim.tapes.tape("adversary/strategy"))
        if self.spec.mode in ("static", "det"):
            ids = self._initial_set(sim)
            sim.corrupt(ids)
            self._corruption_rounds.append((-1, sorted(ids)))

    def _initial_set(self, sim) -> list[int]:
        if "ids" in self.spec.params:
            ids = [int(i) for i in self.spec.params["ids"]]
            if len(ids) > self.budget:
                raise SimulationFault("adversary over budget (explicit id list)")
            return ids
        if self.budget == 0:
            return []
        tape = sim.tapes.tape("adversary/static")
        k = self.config.k
        picks: list[int] = []
        while len(picks) < self.budget:
            c = int(tape.integers(1, k + 1))
            if c not in picks:
                picks.append(c)
        return picks

    def on_round_start(self, sim):
        if self.spec.mode != "adaptive":
            return
        view = AdversaryView(
            round=sim.round_idx,
            input=sim.data,
            config=sim.config,
            prev_round_events=sim.prev_round_events,
            corrupted=set(sim.corrupted),
        )
        new = self.corrupt(view, sim.corrupted)
        if new:
            sim.corrupt(new)
            self._corruption_rounds.append((sim.round_idx, sorted(new)))

    def corrupt(self, view: AdversaryView, already: set[int]) -> set[int]:
        room = self.budget - len(already)
        if room <= 0:
            return set()
        trigger = self.spec.params.get("trigger", "round0")
        if trigger == "round0":
            if view.round > 0 or already:
                return set()
            k = self.config.k
            if "ids" in self.spec.params:
                return set(int(i) for i in self.spec.params["ids"][: self.budget])
            return set(range(1, min(k, self.budget) + 1))
        if trigger == "sniper":
            watch = self.spec.params.get("watch_tag", "creport")
            hits = []
            for src, _dst, payload in view.prev_round_events:
                if payload and payload[0] == watch and src not in already and src not in hits:
                    hits.append(src)
            return set(hits[:room])
        raise ConfigError(f"unknown adaptive trigger {trigger!r}")

    def corruption_log(self):
        return list(self._corruption_rounds)


def build_adversary(spec: Optional[AdversarySpec], config) -> Optional[Adversary]:
    if spec is None:
        return None
    return Adversary(spec, config)


def det_candidates(config, spec: AdversarySpec) -> list[frozenset[int]]:
    """Candidate corruption sets for the all-knowing Det adversary: a few
    structured sets plus seeded random ones, deduplicated, deterministic."""
    b = spec.budget if spec.budget is not None else config.byz_budget
    k = config.k
    want = int(spec.params.get("candidates", 8))
    if b == 0:
        return [frozenset()]
    cands: list[frozenset[int]] = []

    def add(s):
        fs = frozenset(s)
        if len(fs) == b and fs not in cands:
            cands.append(fs)

    add(range(1, b + 1))
    add(range(k - b + 1, k + 1))
    add(list(range(1, k + 1, max(1, k // b)))[:b])
    tape = RandomTape(config.seed, "adversary/det-candidates")
    guard = 0
    while len(cands) < want and guard < 200:
        guard += 1
        picks: set[int] = set()
        while len(picks) < b:
            picks.add(int(tape.integers(1, k + 1)))
        add(picks)
    return cands[:want]
