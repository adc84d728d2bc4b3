"""Seeded randomness: per-stream tapes, the global random-bit service backing
function, and c-wise independent polynomial hash families.
"""

from __future__ import annotations

import hashlib
import math
from functools import lru_cache
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import SimulationFault


def _derive(seed: int, *labels) -> int:
    text = ":".join([str(int(seed))] + [str(l) for l in labels])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


class RandomTape:
    """A named, replayable random stream backed by a PCG64 generator."""

    def __init__(self, seed: int, stream_id: str):
        self.seed = seed
        self.stream_id = stream_id
        self.counter = 0
        self._gen = np.random.Generator(np.random.PCG64(_derive(seed, stream_id)))

    def random(self, size=None):
        self.counter += 1 if size is None else int(np.prod(size))
        return self._gen.random(size)

    def integers(self, low, high, size=None):
        self.counter += 1 if size is None else int(np.prod(size))
        return self._gen.integers(low, high, size=size)

    def bits(self, nbits: int) -> int:
        """Draw nbits from the tape, packed into a single integer."""
        value = 0
        for b in self._gen.integers(0, 2, size=nbits):
            value = (value << 1) | int(b)
        self.counter += nbits
        return value

    def choice_index(self, length: int) -> int:
        self.counter += 1
        return int(self._gen.integers(0, length))


class TapeSource:
    """Hands out disjoint named tapes derived from one 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._tapes: dict[str, RandomTape] = {}

    def tape(self, stream_id: str) -> RandomTape:
        if stream_id not in self._tapes:
            self._tapes[stream_id] = RandomTape(self.seed, stream_id)
        return self._tapes[stream_id]

    def machine_tape(self, mid: int) -> RandomTape:
        return self.tape(f"machine/{mid}")


_RG_BLOCK_BITS = 256


@lru_cache(maxsize=4096)
def _rg_block(seed: int, block: int) -> int:
    text = f"{int(seed)}:rgblk:{block}"
    return int.from_bytes(hashlib.sha256(text.encode()).digest(), "big")


def global_bit(seed: int, tag: int) -> int:
    """The Benign-model cloud's random bit for a tag: a pure function of the
    run seed, so every caller observes the identical bit."""
    if tag < 0:
        raise SimulationFault("Cloud_RG tag must be a natural number")
    block, offset = divmod(tag, _RG_BLOCK_BITS)
    return (_rg_block(seed, block) >> offset) & 1


class RgStream:
    """Sequential reader over the global bit stream starting at a tag; every
    machine reading the same tags sees the same bits."""

    def __init__(self, seed: int, tag_base: int = 0):
        self.seed = seed
        self.tag = tag_base

    def take(self, nbits: int) -> int:
        value = 0
        remaining = nbits
        while remaining > 0:
            block, offset = divmod(self.tag, _RG_BLOCK_BITS)
            chunk = min(remaining, _RG_BLOCK_BITS - offset)
            word = (_rg_block(self.seed, block) >> offset) & ((1 << chunk) - 1)
            value |= word << (nbits - remaining)
            self.tag += chunk
            remaining -= chunk
        return value


def smallest_prime_at_least(m: int) -> int:
    candidate = max(2, m)
    while True:
        if _is_prime(candidate):
            return candidate
        candidate += 1


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def hash_field_prime(domain: int, range_: int) -> int:
    """Prime field size for a [domain] -> [range_] family: the smallest prime
    at least max(domain, range_, 2^ceil(log2 max))."""
    m = max(domain, range_)
    return smallest_prime_at_least(max(m, 2 ** math.ceil(math.log2(max(m, 2)))))


@dataclass(frozen=True)
class HashFunction:
    """h(x) = (sum_j a_j x^j mod P) mod L with c coefficients over F_P."""

    c: int
    domain: int
    range_: int
    prime: int
    coeffs: tuple[int, ...]

    def __call__(self, x: int) -> int:
        if not 0 <= x < self.domain:
            raise SimulationFault(f"hash input {x} outside domain [0,{self.domain})")
        acc = 0
        for a in reversed(self.coeffs):
            acc = (acc * x + a) % self.prime
        return acc % self.range_

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        acc = np.zeros(len(xs), dtype=np.int64)
        xs = np.asarray(xs, dtype=np.int64)
        for a in reversed(self.coeffs):
            acc = (acc * xs + a) % self.prime
        return acc % self.range_


def sample_hash(c: int, domain: int, range_: int, draw_bits: Callable[[int], int],
                prime: int | None = None) -> HashFunction:
    """Draw a function from the c-wise independent family using the supplied
    bit source. Coefficients come from rejection sampling on ceil(log2 P)-bit
    chunks, so two parties with the same bit stream build the same function.
    """
    if c < 1 or domain < 1 or range_ < 1:
        raise SimulationFault("hash family parameters must be positive")
    p = prime if prime is not None else hash_field_prime(domain, range_)
    width = max(1, math.ceil(math.log2(p)))
    coeffs = []
    for _ in range(c):
        while True:
            v = draw_bits(width)
            if v < p:
                coeffs.append(v)
                break
    return HashFunction(c=c, domain=domain, range_=range_, prime=p, coeffs=tuple(coeffs))


def eval_hash(h: HashFunction, x: int) -> int:
    return h(x)


def tape_bit_source(tape: RandomTape) -> Callable[[int], int]:
    return tape.bits
