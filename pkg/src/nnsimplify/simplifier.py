"""Building the simplified network from proved-dead neurons.

:func:`prune` deletes dead neurons with their incoming rows and outgoing
columns.  :func:`cascade` then repeats, until nothing changes:

* a hidden neuron whose outgoing weights are all exactly 0.0 is deleted;
* a hidden neuron whose incoming weights are all exactly 0.0 outputs the
  constant ``relu(bias)``, which is added into the next layer's biases
  before the neuron is deleted.

Both rules hold vacuously next to an empty hidden layer, so an emptied
layer makes everything collapse into a constant network, stored as a
zero-hidden-layer network with zero weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Network, NodeId, evaluate_batch

__all__ = [
    "NO_OUTGOING",
    "CONSTANT_FOLDED",
    "SimplificationPlan",
    "EquivalenceResult",
    "prune",
    "cascade",
    "simplify",
    "check_equivalence",
    "epsilon_deviation_bound",
]

NO_OUTGOING = "no-outgoing-edges"
CONSTANT_FOLDED = "constant-folded"


@dataclass
class SimplificationPlan:
    """Bookkeeping for one simplification, in the original network's node ids.

    ``kept[i]`` lists the original indices still present in hidden layer
    ``i + 1`` of the current network.
    """

    verified_dead: dict = field(default_factory=dict)  # NodeId -> verdict kind
    cascade_removed: list = field(default_factory=list)  # (NodeId, reason)
    kept: list = field(default_factory=list)
    result_kind: str = "network"
    constant_output: np.ndarray | None = None

    @classmethod
    def start(cls, net: Network, dead) -> "SimplificationPlan":
        if not isinstance(dead, dict):
            dead = {NodeId(*n): "dead" for n in dead}
        kept = [
            [k for k in range(size) if NodeId(layer, k) not in dead]
            for layer, size in enumerate(net.layer_sizes[1:-1], start=1)
        ]
        return cls(verified_dead=dict(dead), kept=kept)

    @property
    def removed_count(self) -> int:
        return len(self.verified_dead) + len(self.cascade_removed)


def prune(net: Network, dead) -> Network:
    """Delete each dead hidden neuron, its incoming row and its outgoing column.

    Hidden layers may end up empty; :func:`cascade` takes it from there.
    """
    dead = {NodeId(*n) for n in dead}
    weights = list(net.weights)
    biases = list(net.biases)
    for layer, size in enumerate(net.layer_sizes[1:-1], start=1):
        keep = np.array([k for k in range(size) if NodeId(layer, k) not in dead], dtype=np.intp)
        if keep.size == size:
            continue
        weights[layer - 1] = weights[layer - 1][keep]
        biases[layer - 1] = biases[layer - 1][keep]
        weights[layer] = weights[layer][:, keep]
    return net.replace(weights=tuple(weights), biases=tuple(biases))


def _constant_network(net: Network, output_bias) -> Network:
    return net.replace(
        weights=(np.zeros((net.output_size, net.input_size)),),
        biases=(np.array(output_bias, dtype=np.float64),),
    )


def cascade(net: Network, plan: SimplificationPlan | None = None):
    """Remove neurons made irrelevant by earlier deletions; fold constants.

    Returns ``(network, plan)``.  Node ids in the plan refer to the
    network the plan was started from.
    """
    if plan is None:
        plan = SimplificationPlan.start(net, {})
    kept = [list(k) for k in plan.kept]
    weights = [np.array(w) for w in net.weights]
    biases = [np.array(b) for b in net.biases]
    removed = list(plan.cascade_removed)
    hidden = len(weights) - 1

    def drop(i, k, reason):
        # i: 0-based hidden layer, k: current position
        removed.append((NodeId(i + 1, kept[i][k]), reason))
        del kept[i][k]
        weights[i] = np.delete(weights[i], k, axis=0)
        biases[i] = np.delete(biases[i], k)
        weights[i + 1] = np.delete(weights[i + 1], k, axis=1)

    changed = True
    while changed:
        changed = False
        for i in range(hidden):
            k = 0
            while k < len(kept[i]):
                if not np.any(weights[i + 1][:, k] != 0.0):
                    drop(i, k, NO_OUTGOING)
                    changed = True
                else:
                    k += 1
        for i in range(hidden):
            k = 0
            while k < len(kept[i]):
                if not np.any(weights[i][k] != 0.0):
                    value = max(biases[i][k], 0.0)
                    if value != 0.0:
                        biases[i + 1] = biases[i + 1] + weights[i + 1][:, k] * value
                    drop(i, k, CONSTANT_FOLDED)
                    changed = True
                else:
                    k += 1

    plan.cascade_removed = removed
    plan.kept = kept
    result = net.replace(weights=tuple(weights), biases=tuple(biases))
    if any(len(k) == 0 for k in kept):
        result = _constant_network(net, biases[-1])
        plan.result_kind = "constant"
        plan.constant_output = biases[-1] * net.output_range + net.output_mean
    else:
        plan.result_kind = "network"
        plan.constant_output = None
    return result, plan


def simplify(net: Network, dead):
    """Prune ``dead`` (a set of NodeIds, or a dict NodeId -> verdict kind) and cascade."""
    plan = SimplificationPlan.start(net, dead)
    return cascade(prune(net, plan.verified_dead), plan)


@dataclass
class EquivalenceResult:
    per_output: np.ndarray
    worst_input: np.ndarray
    samples: int

    @property
    def max_deviation(self) -> float:
        return float(self.per_output.max()) if self.per_output.size else 0.0


def check_equivalence(original: Network, simplified, n=10_000, seed=0) -> EquivalenceResult:
    """Largest absolute output difference over ``n`` uniform samples of the input box.

    ``simplified`` is a :class:`Network` or a constant output vector.
    """
    rng = np.random.default_rng(seed)
    xs = rng.uniform(original.input_lo, original.input_hi, size=(n, original.input_size))
    expected = evaluate_batch(original, xs)
    if isinstance(simplified, Network):
        if simplified.input_size != original.input_size:
            raise ValueError("networks have different input sizes")
        got = evaluate_batch(simplified, xs)
    else:
        got = np.broadcast_to(np.asarray(simplified, dtype=np.float64), expected.shape)
    diff = np.abs(expected - got)
    if n == 0:
        return EquivalenceResult(np.zeros(original.output_size), np.array(original.input_lo), 0)
    worst = int(np.argmax(diff.max(axis=1)))
    return EquivalenceResult(diff.max(axis=0), xs[worst], n)


def epsilon_deviation_bound(net: Network, removed, epsilon) -> np.ndarray:
    """Per-output bound on the change caused by deleting ``epsilon``-dead neurons.

    Each deleted neuron contributes ``epsilon`` times the sum over paths to
    an output of the product of absolute weights along the path, scaled by
    the output range.
    """
    bound = np.zeros(net.output_size)
    for layer, index in removed:
        reach = np.abs(net.weights[layer][:, index])
        for w in net.weights[layer + 1 :]:
            reach = np.abs(w) @ reach
        bound += epsilon * reach
    return bound * net.output_range
