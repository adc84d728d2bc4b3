"""Algorithm registry: every runnable id with its model family, beta bound
and problem kind. The harness validates configurations against this table
before any round runs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..model import ConfigError, Model
from . import benign, det, harsh


@dataclass(frozen=True)
class AlgorithmInfo:
    id: str
    model: Model
    beta_max: Fraction  # exclusive upper bound
    problem: str
    runner: Callable


_ONE = Fraction(1)
_HALF = Fraction(1, 2)
_THIRD = Fraction(1, 3)

REGISTRY: dict[str, AlgorithmInfo] = {
    info.id: info
    for info in [
        AlgorithmInfo("det.naive_download", Model.DET, _ONE, "download", det.naive_download),
        AlgorithmInfo("det.roundrobin_download", Model.DET, _HALF, "download", det.roundrobin_download),
        AlgorithmInfo("det.lse_disjunct1", Model.DET, _ONE, "disjunction", det.lse_disjunct1),
        AlgorithmInfo("det.lse_disjunct2", Model.DET, _HALF, "disjunction", det.lse_disjunct2),
        AlgorithmInfo("det.glse_explicit", Model.DET, _ONE, "explicit_disjunction", det.glse_explicit),
        AlgorithmInfo("harsh.blacklist_download", Model.HARSH, _ONE, "download", harsh.blacklist_download),
        AlgorithmInfo("harsh.gossip_download", Model.HARSH, _THIRD, "download", harsh.gossip_download),
        AlgorithmInfo("harsh.spread", Model.HARSH, _ONE, "spread", harsh.spread),
        AlgorithmInfo("harsh.randomized_disjunction", Model.HARSH, _ONE, "disjunction", harsh.randomized_disjunction),
        AlgorithmInfo("benign.linear_download", Model.BENIGN, _ONE, "download", benign.linear_download),
        AlgorithmInfo("benign.fast_linear_download", Model.BENIGN, _ONE, "download", benign.fast_linear_download),
        AlgorithmInfo("benign.parallel_download", Model.BENIGN, _ONE, "download", benign.parallel_download),
        AlgorithmInfo("benign.majorizing_download", Model.BENIGN, _HALF, "download", benign.majorizing_download),
        AlgorithmInfo("benign.converge_parity", Model.BENIGN, _ONE, "parity", benign.converge_parity),
        AlgorithmInfo("benign.majorizing_parity", Model.BENIGN, _HALF, "parity", benign.majorizing_parity),
        AlgorithmInfo("benign.weak_resolve", Model.BENIGN, _ONE, "download", benign.weak_resolve_runner),
        AlgorithmInfo("benign.fast_weak_resolve", Model.BENIGN, _ONE, "download", benign.fast_weak_resolve_runner),
        AlgorithmInfo("benign.weak_parity_resolve", Model.BENIGN, _ONE, "parity", benign.weak_parity_resolve_runner),
        AlgorithmInfo("benign.convergecast", Model.BENIGN, _ONE, "convergecast", benign.convergecast_runner),
    ]
}


def get_algorithm(algorithm_id: str) -> AlgorithmInfo:
    info = REGISTRY.get(algorithm_id)
    if info is None:
        raise ConfigError(f"unknown algorithm id {algorithm_id!r}")
    return info
