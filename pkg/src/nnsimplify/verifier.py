"""Deciding whether a candidate neuron can ever become positive.

A :class:`VerificationQuery` pairs a truncated network (see
:func:`nnsimplify.network.truncate`) with a threshold mode.  :func:`verify`
answers it by best-first branch and bound over input sub-boxes: regions
whose certified upper bound cannot reach the threshold are discarded, the
center and corners of every surviving region are probed for a witness, and
the remaining regions are bisected along their widest (normalized)
dimension.  Any engine mapping queries to verdicts under the same contract
can stand in for :func:`verify`.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundPropagator
from .network import Network, NodeId, evaluate_batch, truncate

__all__ = [
    "Strict",
    "Epsilon",
    "Budgets",
    "VerificationQuery",
    "Verdict",
    "DEAD",
    "ALIVE",
    "UNKNOWN",
    "make_query",
    "verify",
]

DEAD, ALIVE, UNKNOWN = "dead", "alive", "unknown"

MAX_PROBES = 64


@dataclass(frozen=True)
class Strict:
    """Alive iff the candidate's pre-activation can be strictly positive."""

    threshold = 0.0

    def satisfied(self, values):
        return values > 0.0

    def discards(self, upper):
        return upper <= 0.0

    def __str__(self):
        return "strict"


@dataclass(frozen=True)
class Epsilon:
    """Alive iff the candidate can reach ``epsilon`` or more."""

    epsilon: float = 0.01

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def threshold(self):
        return self.epsilon

    def satisfied(self, values):
        return values >= self.epsilon

    def discards(self, upper):
        return upper < self.epsilon

    def __str__(self):
        return f"epsilon({self.epsilon!r})"


@dataclass(frozen=True)
class Budgets:
    """``max_regions`` caps bound computations; ``timeout`` is wall-clock seconds (None: no limit)."""

    max_regions: int = 10**6
    timeout: float | None = 60.0


@dataclass(frozen=True)
class VerificationQuery:
    subnet: Network
    mode: Strict | Epsilon = Strict()
    budgets: Budgets = Budgets()
    node: NodeId | None = None

    def __post_init__(self):
        if self.subnet.output_size != 1:
            raise ValueError("a verification query needs a single-output subnetwork")


@dataclass(frozen=True)
class Verdict:
    kind: str
    witness: np.ndarray | None = field(default=None, compare=False)
    reason: str | None = None  # "budget" or "timeout" for unknown verdicts
    regions: int = 0
    wall_time: float = field(default=0.0, compare=False)
    node: NodeId | None = field(default=None, compare=False)

    @property
    def is_dead(self):
        return self.kind == DEAD

    @property
    def is_alive(self):
        return self.kind == ALIVE


def make_query(net: Network, v: NodeId, mode=Strict(), budgets=Budgets()) -> VerificationQuery:
    return VerificationQuery(truncate(net, v), mode, budgets, node=NodeId(*v))


_CORNER_PATTERNS = {}


def _corner_patterns(d):
    """Boolean masks selecting ``hi`` per dimension; at most ``MAX_PROBES - 1`` of them."""
    if d not in _CORNER_PATTERNS:
        if 2**d <= MAX_PROBES - 1:
            bits = np.array(list(itertools.product([False, True], repeat=d)), dtype=bool)
        else:
            rng = np.random.default_rng(d)
            bits = rng.random((MAX_PROBES - 1, d)) < 0.5
        _CORNER_PATTERNS[d] = bits.reshape(-1, d)
    return _CORNER_PATTERNS[d]


def _probe_points(net, lo, hi, bounds):
    center = lo + (hi - lo) / 2
    masks = _corner_patterns(len(lo))
    corners = np.where(masks, hi, lo)
    # the corner maximizing the symbolic upper bound
    coef = bounds.sym_upper[-1][0, :-1]
    best = np.where(coef > 0, hi, lo)
    points = np.vstack([center[None, :], best[None, :], corners])
    return points[:MAX_PROBES]


def _widest_dimension(net, lo, hi):
    return int(np.argmax((hi - lo) / net.input_range))


def verify(query: VerificationQuery) -> Verdict:
    start = time.perf_counter()
    net, mode, budgets = query.subnet, query.mode, query.budgets
    propagator = BoundPropagator(net)
    regions = 0
    counter = itertools.count()
    heap = []

    def finish(kind, witness=None, reason=None):
        return Verdict(
            kind,
            witness=witness,
            reason=reason,
            regions=regions,
            wall_time=time.perf_counter() - start,
            node=query.node,
        )

    def examine(lo, hi, parent_upper):
        """Bound, probe and enqueue one region; returns a witness if found."""
        nonlocal regions
        regions += 1
        bounds = propagator.bounds((lo, hi))
        upper = min(bounds.output_upper, parent_upper)
        if mode.discards(upper):
            return None
        points = _probe_points(net, lo, hi, bounds)
        values = evaluate_batch(net, points)[:, 0]
        hits = np.flatnonzero(mode.satisfied(values))
        if hits.size:
            return points[hits[np.argmax(values[hits])]]
        heapq.heappush(heap, (-upper, next(counter), lo, hi))
        return None

    witness = examine(np.array(net.input_lo), np.array(net.input_hi), np.inf)
    if witness is not None:
        return finish(ALIVE, witness=witness)

    while heap:
        neg_upper, _, lo, hi = heapq.heappop(heap)
        dim = _widest_dimension(net, lo, hi)
        mid = lo[dim] + (hi[dim] - lo[dim]) / 2
        if not lo[dim] < mid < hi[dim]:
            # cannot split further in floating point
            return finish(UNKNOWN, reason="budget")
        left_hi = hi.copy()
        left_hi[dim] = mid
        right_lo = lo.copy()
        right_lo[dim] = mid
        for child_lo, child_hi in ((lo, left_hi), (right_lo, hi)):
            if regions >= budgets.max_regions:
                return finish(UNKNOWN, reason="budget")
            if budgets.timeout is not None and time.perf_counter() - start > budgets.timeout:
                return finish(UNKNOWN, reason="timeout")
            witness = examine(child_lo, child_hi, -neg_upper)
            if witness is not None:
                return finish(ALIVE, witness=witness)
    return finish(DEAD)
