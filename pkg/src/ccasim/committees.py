"""Committee election: private Bernoulli self-selection (Harsh model) and
public hash-elected committees (Benign model)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import ConfigError
from .randomness import HashFunction, RgStream, hash_field_prime, sample_hash


@dataclass
class Committee:
    index: int
    visibility: str  # 'public' | 'private'
    members: frozenset[int]
    claimed_members: Optional[frozenset[int]] = None

    def __post_init__(self):
        if self.visibility not in ("public", "private"):
            raise ConfigError("committee visibility must be 'public' or 'private'")


def private_committee_bias(n: int, rho: int, gamma: float) -> float:
    """Self-selection probability p = min(1, (9 ln n + 4 rho) / (gamma k))
    expressed per honest-machine pool of size gamma*k."""
    return (9.0 * math.log(n) + 4.0 * rho)


def elect_private(rho: int, gamma: float, k: int, n: int, machine_tapes) -> dict[int, bool]:
    """Each machine flips a biased coin from its own tape; returns the flags.
    Byzantine machines may later claim membership regardless."""
    gk = gamma * k
    if rho < 1 or rho > gk:
        raise ConfigError(f"rho must satisfy 1 <= rho <= gamma*k, got {rho} vs {gk}")
    p = min(1.0, (9.0 * math.log(n) + 4.0 * rho) / gk)
    return {m: bool(machine_tapes(m).random() < p) for m in range(1, k + 1)}, p


def elect_private_matrix(p: float, k: int, n_committees: int, machine_tapes) -> np.ndarray:
    """Vector form: flags[m-1, j] for committees j=0..n_committees-1, each row
    drawn from machine m's own tape."""
    rows = [machine_tapes(m).random(n_committees) < p for m in range(1, k + 1)]
    return np.vstack(rows)


def elect_public(sigma: int, nu: int, *, k: int, seed: int, tag_base: int = 0,
                 charge: Optional[Callable[[int], None]] = None):
    """Elect nu public committees of size <= sigma via sigma independent
    functions from a sigma-wise independent family [nu] -> [k], all sampled
    from the global random-bit service starting at tag_base.

    Returns (committees, bits_used, next_tag). `charge(bits)` lets the caller
    charge the identical rg-bit cost to each sampling machine.
    """
    if sigma < 1 or nu < 1:
        raise ConfigError("sigma and nu must be positive")
    stream = RgStream(seed, tag_base)
    prime = hash_field_prime(nu, k)
    draw_bits = stream.take
    functions = [sample_hash(sigma, nu, k, draw_bits, prime=prime) for _ in range(sigma)]
    idx = np.arange(nu, dtype=np.int64)
    rows = [h.eval_many(idx) + 1 for h in functions]  # machine ids 1..k
    members_by_committee = np.stack(rows, axis=1)  # nu x sigma
    committees = [
        Committee(index=i + 1, visibility="public",
                  members=frozenset(int(m) for m in members_by_committee[i]))
        for i in range(nu)
    ]
    bits_used = stream.tag - tag_base
    if charge is not None:
        charge(bits_used)
    return committees, bits_used, stream.tag


def sigma_weak(n: int, gamma: float) -> int:
    return math.ceil(9.0 * math.log2(n) / gamma)


def sigma_weak_lemma(n: int, gamma: float) -> int:
    """The weak-committee quality lemma's own threshold (2 log n / gamma)."""
    return math.ceil(2.0 * math.log2(n) / gamma)


def sigma_majorizing(n: int, beta: float) -> int:
    gap = 0.5 - beta
    if gap <= 0:
        raise ConfigError("majorizing committees need beta < 1/2")
    return math.ceil(2.0 * math.log2(n) / gap**2)


def membership_load(committees) -> dict[int, int]:
    load: dict[int, int] = {}
    for c in committees:
        for m in c.members:
            load[m] = load.get(m, 0) + 1
    return load


def committee_quality(committee: Committee, corrupted: set[int]) -> dict:
    honest = [m for m in committee.members if m not in corrupted]
    return {
        "size": len(committee.members),
        "honest": len(honest),
        "weak": len(honest) >= 1,
        "majorizing": len(honest) > len(committee.members) / 2,
    }
