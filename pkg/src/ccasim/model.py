"""Domain types shared by the whole simulator: input array, configuration,
round phases, messages, the metrics ledger and per-machine state.

Machines are numbered 1..k and input bits 1..n; internal arrays carry a dead
slot at index 0 so the code can follow the 1-based conventions directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Optional

import numpy as np


class SimulationFault(RuntimeError):
    """A violation of the model's physical rules by supposedly honest code."""


class ConfigError(ValueError):
    """Rejected configuration (checked before any round runs)."""


class Model(Enum):
    DET = "det"
    HARSH = "harsh"
    BENIGN = "benign"


class RoundPhase(Enum):
    QUERY = "query"
    MESSAGE = "message"


NULL = -1  # res[i] value meaning "unknown"

# Message payload tags are drawn from a small fixed alphabet, so a tag costs a
# constant number of bits regardless of its spelling.
TAG_BITS = 6
MIN_FIELD_BITS = 4


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    raise ConfigError(f"cannot interpret {value!r} as a fraction")


class InputArray:
    """The cloud's n-bit array, with its density and modified density."""

    def __init__(self, bits: Iterable[int]):
        arr = np.asarray(list(bits), dtype=np.int8)
        if arr.ndim != 1 or arr.size == 0:
            raise ConfigError("input array must be a non-empty 1-D bit sequence")
        if not np.all((arr == 0) | (arr == 1)):
            raise ConfigError("input array entries must be 0 or 1")
        self.n = int(arr.size)
        self.bits = np.concatenate([[0], arr]).astype(np.int8)  # 1-based
        self.ones = int(arr.sum())

    @property
    def density(self) -> Fraction:
        return Fraction(self.ones, self.n)

    @property
    def modified_density(self) -> Fraction:
        return max(Fraction(1, self.n), self.density)

    def bit(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise SimulationFault(f"cloud index {i} out of range [1,{self.n}]")
        return int(self.bits[i])

    def or_value(self) -> int:
        return 1 if self.ones > 0 else 0

    def parity(self) -> int:
        return self.ones % 2

    def set_indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.bits[1:] == 1) + 1]


@dataclass
class SimConfig:
    """Validated parameters of a single simulation run."""

    n: int
    k: int
    beta: Fraction
    model: Model
    seed: int
    algorithm: str
    params: dict = field(default_factory=dict)
    c_msg: int = 4
    graph_seed: int = 7  # public seed shared by all machines for expander builds

    def __post_init__(self):
        self.beta = as_fraction(self.beta)
        if isinstance(self.model, str):
            self.model = Model(self.model)
        if self.n < 1 or self.k < 1:
            raise ConfigError("n and k must be positive")
        if not 0 <= self.beta < 1:
            raise ConfigError("beta must lie in [0,1)")
        bk = self.beta * self.k
        if bk.denominator != 1:
            raise ConfigError(f"beta*k = {bk} is not integral")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def gamma(self) -> Fraction:
        return 1 - self.beta

    @property
    def byz_budget(self) -> int:
        return int(self.beta * self.k)

    @property
    def message_cap_bits(self) -> int:
        width = max(
            MIN_FIELD_BITS,
            math.ceil(math.log2(self.n + 1)),
            math.ceil(math.log2(self.k + 1)),
        )
        return self.c_msg * width

    def field_bits(self) -> int:
        return max(
            MIN_FIELD_BITS,
            math.ceil(math.log2(max(self.n, self.k) + 2)),
        )

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "beta": str(self.beta),
            "model": self.model.value,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "params": _jsonable(self.params),
            "c_msg": self.c_msg,
            "graph_seed": self.graph_seed,
        }


def payload_bits(payload, field_bits: int) -> int:
    """Serialized size of a message payload under the model's accounting.

    Payloads are tuples ``(tag, *fields)``. The tag costs TAG_BITS; each int
    field costs one index-sized word, bools cost one bit, and nested
    tuples/lists cost the sum of their items.
    """
    if not isinstance(payload, tuple) or not payload or not isinstance(payload[0], str):
        raise SimulationFault(f"malformed payload {payload!r}")
    return TAG_BITS + _fields_bits(payload[1:], field_bits)


def _fields_bits(fields, field_bits: int) -> int:
    total = 0
    for f in fields:
        if isinstance(f, bool):
            total += 1
        elif isinstance(f, (int, np.integer)):
            total += field_bits
        elif isinstance(f, (tuple, list)):
            total += _fields_bits(f, field_bits)
        elif f is None:
            total += 1
        else:
            raise SimulationFault(f"unsupported payload field {f!r}")
    return total


@dataclass(frozen=True)
class Message:
    src: int
    dst: int
    payload: tuple
    round: int


class MetricsLedger:
    """Query / message / round accounting (the run's Q, M and T)."""

    def __init__(self, k: int):
        self.k = k
        self.queries = np.zeros(k + 1, dtype=np.int64)
        self.honest_messages = 0
        self.rounds = 0
        self.blacklist_events: list[tuple[int, int, int]] = []

    def charge_queries(self, mid: int, count: int = 1):
        self.queries[mid] += count

    def charge_queries_all(self, mids: Iterable[int], count: int):
        for m in mids:
            self.queries[m] += count

    def charge_messages(self, count: int):
        self.honest_messages += count

    def tick_rounds(self, count: int = 1):
        self.rounds += count

    def record_blacklist(self, round_idx: int, accuser: int, accused: int):
        self.blacklist_events.append((round_idx, accuser, accused))

    def q_max(self, honest_ids: Iterable[int]) -> int:
        ids = list(honest_ids)
        if not ids:
            return 0
        return int(max(self.queries[m] for m in ids))

    def q_per_machine(self) -> list[int]:
        return [int(q) for q in self.queries[1:]]


class MachineState:
    """One machine's local view: result array, index sets, blacklist, role."""

    def __init__(self, mid: int, n: int):
        self.id = mid
        self.n = n
        self.res = np.full(n + 1, NULL, dtype=np.int8)
        self.kta = np.zeros(n + 1, dtype=bool)
        self.requests = np.zeros(n + 1, dtype=bool)
        self.blacklist: set[int] = set()
        self.byzantine = False
        self.output: Any = None
        self.finished = False

    @property
    def known(self) -> np.ndarray:
        return self.res[1:] != NULL

    def known_set(self) -> set[int]:
        return {int(i) for i in np.flatnonzero(self.res[1:] != NULL) + 1}

    def unknown_set(self) -> set[int]:
        return {int(i) for i in np.flatnonzero(self.res[1:] == NULL) + 1}

    def learn(self, i: int, value: int):
        self.res[i] = value


@dataclass
class SimReport:
    """Outcome of one run, serializable as a canonical JSON document."""

    config: dict
    q_max: int
    q_per_machine: list[int]
    m_total: int
    t_rounds: int
    correct: bool
    corrupted_set: list[int]
    blacklist_events: list[tuple[int, int, int]]
    outputs: Optional[dict] = None
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {
            "config": self.config,
            "q_max": self.q_max,
            "q_per_machine": self.q_per_machine,
            "m_total": self.m_total,
            "t_rounds": self.t_rounds,
            "correct": self.correct,
            "corrupted_set": sorted(self.corrupted_set),
            "blacklist_events": [list(e) for e in self.blacklist_events],
            "extras": _jsonable(self.extras),
        }
        if self.outputs is not None:
            d["outputs"] = {str(k): _jsonable(v) for k, v in sorted(self.outputs.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (set, frozenset)):
        return sorted(_jsonable(v) for v in value)
    return value
