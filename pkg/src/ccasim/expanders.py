"""Large Set Expanders and Guaranteed Large Set Expanders.

Left vertices are the n bit indices, right vertices the k machines; the
adjacency is the query-assignment pattern of the deterministic disjunction
algorithms. Constructions are seeded rejection-sampled random graphs (the
existence proofs' experiment), so every machine rebuilds the identical graph
from the shared public seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .model import ConfigError, as_fraction
from .randomness import RandomTape

VERIFY_SUBSET_LIMIT = 600_000  # max C(n, ceil(n*delta)) for exhaustive checks
LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class BipartiteGraph:
    n: int  # left vertices (bits), 1..n
    k: int  # right vertices (machines), 1..k
    adjacency: tuple[tuple[int, ...], ...]  # adjacency[i-1] = sorted machines of bit i
    left_degree_bound: int
    right_degree_bound: int

    def left_neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i - 1]

    def right_neighbors(self, mid: int) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 1) if mid in set(self.adjacency[i - 1]))

    def machine_assignments(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {m: [] for m in range(1, self.k + 1)}
        for i, nbrs in enumerate(self.adjacency, start=1):
            for m in nbrs:
                out[m].append(i)
        return out

    def max_left_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def max_right_degree(self) -> int:
        counts = [0] * (self.k + 1)
        for nbrs in self.adjacency:
            for m in nbrs:
                counts[m] += 1
        return max(counts[1:], default=0)

    def neighbor_masks(self) -> list[int]:
        """Per-left-vertex machine bitmask (bit m-1 set iff machine m adjacent)."""
        masks = []
        for nbrs in self.adjacency:
            mask = 0
            for m in nbrs:
                mask |= 1 << (m - 1)
            masks.append(mask)
        return masks

    def to_jsonable(self) -> list[list[int]]:
        return [list(a) for a in self.adjacency]


def _set_size(n: int, delta: Fraction) -> int:
    return max(1, math.ceil(n * delta))


def lse_degree_bound(n: int, k: int, beta, delta) -> int:
    """Smallest integer strictly exceeding the existence lemma's degree bound
    (logs base 2, ln natural)."""
    beta = as_fraction(beta)
    delta = as_fraction(delta)
    if not 0 <= beta < 1:
        raise ConfigError("beta must lie in [0,1)")
    if not 0 < delta <= 1:
        raise ConfigError("delta must lie in (0,1]")
    if beta == 0:
        return 1
    b = float(beta)
    inv_mod_density = min(n, 1.0 / float(delta))
    s_size = _set_size(n, delta)
    log_inv_beta = math.log2(1.0 / b)
    term1 = (1.0 + math.log2(math.e * inv_mod_density)) / log_inv_beta
    term1 += (b * k / s_size) * (math.log2(math.e / b) / log_inv_beta)
    term2 = 3.0 * k * math.log(2 * k) / n
    return math.floor(max(term1, term2)) + 1


def glse_max_s(n: int, k: int, gamma: float, delta: float) -> float:
    return min(k, n / 2 - (8.0 / gamma) * (1.0 + k * math.log(k) / (n * delta)))


def glse_degree(n: int, k: int, beta, delta, s: int) -> int:
    """Left degree d = d_th + 2s/gamma from the GLSE existence proof."""
    beta = as_fraction(beta)
    delta = as_fraction(delta)
    gamma = 1.0 - float(beta)
    if gamma <= 0:
        raise ConfigError("beta must be below 1")
    d_eff = max(float(delta), 1.0 / n)
    d_th = ((8.0 - 6.0 * gamma) / gamma**2) * (math.log(n) + k * math.log(max(k, 2)) / (n * d_eff))
    return max(1, math.ceil(d_th + 2.0 * s / gamma))


@dataclass(frozen=True)
class ExpanderParams:
    n: int
    k: int
    beta: Fraction
    delta: Fraction
    kind: str  # 'lse' | 'glse'
    s: int = 0
    d: int = 0  # 0 = derive from the lemma bound

    def __post_init__(self):
        object.__setattr__(self, "beta", as_fraction(self.beta))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.kind not in ("lse", "glse"):
            raise ConfigError("expander kind must be 'lse' or 'glse'")

    def check_glse_precondition(self):
        """The existence lemma's sufficient condition on s. Enforced only when
        the instance is too large for the exhaustive verifier, which otherwise
        backs the rejection-sampled construction directly."""
        limit = glse_max_s(self.n, self.k, float(1 - self.beta),
                           max(float(self.delta), 1.0 / self.n))
        if self.s > 0 and self.s >= max(1, limit):
            raise ConfigError(
                f"s={self.s} violates the GLSE precondition (must be < {limit:.2f})"
            )

    def degree(self) -> int:
        if self.d:
            return self.d
        if self.kind == "lse":
            return lse_degree_bound(self.n, self.k, self.beta, self.delta)
        return glse_degree(self.n, self.k, self.beta, self.delta, self.s)


def _sample_graph(params: ExpanderParams, seed: int, attempt: int) -> BipartiteGraph:
    d = params.degree()
    tape = RandomTape(seed, f"{params.kind}/{params.n}/{params.k}/{params.beta}/"
                            f"{params.delta}/{params.s}/{d}/attempt{attempt}")
    draws = tape.integers(1, params.k + 1, size=(params.n, d))
    adjacency = tuple(tuple(sorted(set(int(m) for m in row))) for row in draws)
    right_bound = math.ceil(2 * params.n * d / params.k)
    return BipartiteGraph(
        n=params.n, k=params.k, adjacency=adjacency,
        left_degree_bound=d, right_degree_bound=right_bound,
    )


def _verifiable(params: ExpanderParams) -> bool:
    s_size = _set_size(params.n, params.delta)
    if params.kind == "lse":
        return math.comb(params.n, s_size) <= VERIFY_SUBSET_LIMIT
    t_size = math.floor(params.beta * params.k)
    return math.comb(params.k, t_size) * params.n <= VERIFY_SUBSET_LIMIT


@lru_cache(maxsize=256)
def _build(params: ExpanderParams, seed: int) -> BipartiteGraph:
    check = _verifiable(params)
    for attempt in range(256):
        g = _sample_graph(params, seed, attempt)
        if g.max_right_degree() > g.right_degree_bound:
            continue
        if check:
            ok = (verify_lse(g, params.beta, params.delta) if params.kind == "lse"
                  else verify_glse(g, params.beta, params.delta, params.s))
            if not ok:
                continue
        return g
    raise ConfigError(f"could not realize {params} within 256 attempts")


def build_lse(params: ExpanderParams, public_seed: int) -> BipartiteGraph:
    if params.kind != "lse":
        raise ConfigError("build_lse needs kind='lse'")
    return _build(params, public_seed)


def build_glse(params: ExpanderParams, public_seed: int) -> BipartiteGraph:
    if params.kind != "glse":
        raise ConfigError("build_glse needs kind='glse'")
    if not _verifiable(params):
        params.check_glse_precondition()
    return _build(params, public_seed)


def verify_lse(g: BipartiteGraph, beta, delta, return_witness: bool = False):
    """Exhaustively check |Gamma(S)| > beta*k for every S of size ceil(n*delta)
    (monotone in |S|, so the smallest size suffices). Refuses huge instances."""
    beta = as_fraction(beta)
    delta = as_fraction(delta)
    s_size = _set_size(g.n, delta)
    count = math.comb(g.n, s_size)
    if count > VERIFY_SUBSET_LIMIT:
        raise ConfigError(
            f"exhaustive LSE check needs {count} subsets (> {VERIFY_SUBSET_LIMIT}); "
            "use a smaller instance"
        )
    threshold = math.floor(beta * g.k)
    masks = g.neighbor_masks()
    for combo in combinations(range(g.n), s_size):
        union = 0
        for u in combo:
            union |= masks[u]
        if union.bit_count() <= threshold:
            witness = tuple(u + 1 for u in combo)
            return (False, witness) if return_witness else False
    return (True, None) if return_witness else True


def verify_glse(g: BipartiteGraph, beta, delta, s: int, return_witness: bool = False):
    """Check: for every S (size ceil(n*delta)) and T (size floor(beta*k)) some
    u in S keeps >= s neighbors outside T. Equivalent to: for every T, fewer
    than ceil(n*delta) left vertices have |Gamma(u)\\T| < s."""
    beta = as_fraction(beta)
    delta = as_fraction(delta)
    s_size = _set_size(g.n, delta)
    t_size = math.floor(beta * g.k)
    count = math.comb(g.k, t_size) * g.n
    if count > VERIFY_SUBSET_LIMIT:
        raise ConfigError(
            f"exhaustive GLSE check needs {count} evaluations (> {VERIFY_SUBSET_LIMIT}); "
            "use a smaller instance"
        )
    masks = g.neighbor_masks()
    for t_combo in combinations(range(1, g.k + 1), t_size):
        t_mask = 0
        for m in t_combo:
            t_mask |= 1 << (m - 1)
        bad = [u + 1 for u in range(g.n) if (masks[u] & ~t_mask).bit_count() < s]
        if len(bad) >= s_size:
            witness = (tuple(bad[:s_size]), t_combo)
            return (False, witness) if return_witness else False
    return (True, None) if return_witness else True
