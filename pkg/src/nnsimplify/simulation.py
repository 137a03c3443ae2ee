"""Randomized forward passes that narrow down removal candidates.

Every hidden node starts as a candidate; a node leaves the set as soon as
one sampled input gives it a strictly positive post-activation.  Samples
are drawn uniformly from the network's input box, in original units, from
a single seeded stream, so a longer run always extends a shorter one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network, NodeId, node_values

__all__ = ["SimulationConfig", "CandidateSet", "sample_input", "sample_inputs", "filter_candidates"]

_CHUNK = 4096


@dataclass(frozen=True)
class SimulationConfig:
    num_samples: int = 20000
    seed: int = 0

    def __post_init__(self):
        if self.num_samples < 0:
            raise ValueError("num_samples must be non-negative")


@dataclass(frozen=True)
class CandidateSet:
    members: frozenset
    samples_used: int

    def sorted(self) -> list[NodeId]:
        return sorted(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, node):
        return node in self.members


def sample_input(rng: np.random.Generator, net: Network) -> np.ndarray:
    """One point drawn uniformly from the input box."""
    return rng.uniform(net.input_lo, net.input_hi)


def sample_inputs(rng: np.random.Generator, net: Network, n: int) -> np.ndarray:
    """``n`` rows, identical to ``n`` successive :func:`sample_input` calls."""
    return rng.uniform(net.input_lo, net.input_hi, size=(n, net.input_size))


def filter_candidates(net: Network, config: SimulationConfig = SimulationConfig()) -> CandidateSet:
    rng = np.random.default_rng(config.seed)
    alive = [np.zeros(size, dtype=bool) for size in net.layer_sizes[1:-1]]
    remaining = config.num_samples
    while remaining > 0:
        n = min(_CHUNK, remaining)
        remaining -= n
        values = node_values(net, sample_inputs(rng, net, n))
        for seen, post in zip(alive, values.post):
            seen |= (post > 0.0).any(axis=0)
    members = frozenset(
        NodeId(layer, int(index))
        for layer, seen in enumerate(alive, start=1)
        for index in np.flatnonzero(~seen)
    )
    return CandidateSet(members=members, samples_used=config.num_samples)
