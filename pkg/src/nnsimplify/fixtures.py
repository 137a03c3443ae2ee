"""Small networks and random generators used by the tests and demos.

The hand-written networks all use input box [-1, 1] and identity
normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network, NodeId

__all__ = [
    "identity_network",
    "gated_pair_network",
    "cancelling_network",
    "zero_network",
    "random_network",
    "PlantedNetwork",
    "planted_dead_network",
    "acas_shaped_network",
    "random_query_network",
    "ACAS_LAYER_SIZES",
]

ACAS_LAYER_SIZES = [5, 50, 50, 50, 50, 50, 50, 5]

# Normalization constants and input envelope shipped with the ACAS Xu networks.
ACAS_MINS = [0.0, -3.141593, -3.141593, 100.0, 0.0]
ACAS_MAXES = [60760.0, 3.141593, 3.141593, 1200.0, 1200.0]
ACAS_MEANS = [19791.091, 0.0, 0.0, 650.0, 600.0, 7.5188840201005975]
ACAS_RANGES = [60261.0, 6.28318530718, 6.28318530718, 1100.0, 1200.0, 373.94992]


def _unit_box_network(weights, biases, lo=-1.0, hi=1.0):
    d = np.asarray(weights[0]).shape[1]
    return Network(
        weights=tuple(np.asarray(w, dtype=float) for w in weights),
        biases=tuple(np.asarray(b, dtype=float) for b in biases),
        input_lo=np.full(d, lo),
        input_hi=np.full(d, hi),
        input_mean=np.zeros(d),
        input_range=np.ones(d),
    )


def identity_network():
    """One input, one hidden neuron with weight 1, one output with weight 1."""
    return _unit_box_network([[[1.0]], [[1.0]]], [[0.0], [0.0]])


def gated_pair_network():
    """Input v1 -> hidden (v2, v3) with weights 1.3, -2 -> output with weights 0.7, 4.2.

    Exactly one of v2, v3 is active for any nonzero input.
    """
    return _unit_box_network([[[1.3], [-2.0]], [[0.7, 4.2]]], [[0.0, 0.0], [0.0]])


def cancelling_network():
    """v1 -> (v2, v3) with weights 1, 1; v4 = v2 - v3; output v5 = v4.

    v2 and v3 always agree, so v4 is dead and the output is constant 0.
    """
    return _unit_box_network(
        [[[1.0], [1.0]], [[1.0, -1.0]], [[1.0]]],
        [[0.0, 0.0], [0.0], [0.0]],
    )


def zero_network(layer_sizes, biases=None):
    weights = [np.zeros((layer_sizes[i + 1], layer_sizes[i])) for i in range(len(layer_sizes) - 1)]
    if biases is None:
        biases = [np.zeros(n) for n in layer_sizes[1:]]
    return _unit_box_network(weights, biases)


def random_network(rng, layer_sizes, bias_scale=0.3, normalize=False):
    """Gaussian weights scaled by ``1/sqrt(fan_in)``; random box around the origin."""
    weights = [
        rng.normal(size=(layer_sizes[i + 1], layer_sizes[i])) / np.sqrt(layer_sizes[i])
        for i in range(len(layer_sizes) - 1)
    ]
    biases = [rng.normal(scale=bias_scale, size=n) for n in layer_sizes[1:]]
    d = layer_sizes[0]
    lo = -rng.uniform(0.2, 2.0, size=d)
    hi = rng.uniform(0.2, 2.0, size=d)
    if normalize:
        mean = (lo + hi) / 2 + rng.normal(scale=0.1, size=d)
        span = rng.uniform(0.5, 4.0, size=d)
        out = (float(rng.normal()), float(rng.uniform(0.5, 3.0)))
    else:
        mean, span, out = np.zeros(d), np.ones(d), (0.0, 1.0)
    return Network(
        weights=tuple(weights),
        biases=tuple(biases),
        input_lo=lo,
        input_hi=hi,
        input_mean=mean,
        input_range=span,
        output_mean=out[0],
        output_range=out[1],
    )


@dataclass
class PlantedNetwork:
    net: Network
    planted: frozenset  # NodeIds dead by construction


def _interval_post(net, layer):
    """Naive interval bounds on the inputs feeding hidden ``layer`` (1-based)."""
    lo = (net.input_lo - net.input_mean) / net.input_range
    hi = (net.input_hi - net.input_mean) / net.input_range
    for w, b in zip(net.weights[: layer - 1], net.biases[: layer - 1]):
        pos, neg = np.maximum(w, 0), np.minimum(w, 0)
        lo, hi = np.maximum(pos @ lo + neg @ hi + b, 0), np.maximum(pos @ hi + neg @ lo + b, 0)
    return lo, hi


def planted_dead_network(rng, n_inputs=None, hidden_sizes=None, n_dead=None, normalize=False):
    """Random network with 1-3 hidden neurons made dead on purpose.

    A planted neuron's bias is set below minus the sum of its absolute
    incoming weights times the largest magnitude each incoming value can
    reach over the box, so its pre-activation is negative everywhere.
    Every other hidden neuron gets a bias that makes it active on 30-70%
    of 256 random inputs, so simulation sees it fire.
    """
    if n_inputs is None:
        n_inputs = int(rng.integers(2, 6))
    if hidden_sizes is None:
        hidden_sizes = [int(s) for s in rng.integers(4, 21, size=int(rng.integers(2, 5)))]
    if n_dead is None:
        n_dead = int(rng.integers(1, 4))
    sizes = [n_inputs, *hidden_sizes, int(rng.integers(1, 4))]
    net = random_network(rng, sizes, normalize=normalize)
    nodes = list(net.hidden_nodes())
    picks = rng.choice(len(nodes), size=n_dead, replace=False)
    planted = {nodes[i] for i in picks}

    biases = [np.array(b) for b in net.biases]
    xs = rng.uniform(net.input_lo, net.input_hi, size=(256, net.input_size))
    act = (xs - net.input_mean) / net.input_range
    for layer in range(1, len(sizes) - 1):
        w = net.weights[layer - 1]
        z = act @ w.T
        quantiles = rng.uniform(0.3, 0.7, size=w.shape[0])
        biases[layer - 1] = -np.array([np.quantile(z[:, k], q) for k, q in enumerate(quantiles)])
        net = net.replace(biases=tuple(biases))
        for node in sorted(n for n in planted if n.layer == layer):
            lo, hi = _interval_post(net, layer)
            reach = float(np.abs(w[node.index]) @ np.maximum(np.abs(lo), np.abs(hi)))
            biases[layer - 1][node.index] = -reach * 1.1 - rng.uniform(0.05, 0.5)
        net = net.replace(biases=tuple(biases))
        act = np.maximum(z + biases[layer - 1], 0.0)
    return PlantedNetwork(net, frozenset(NodeId(*n) for n in planted))


def acas_shaped_network(rng, dead_fraction=0.0):
    """A random network with the ACAS Xu layout, box and normalization.

    ``dead_fraction`` of the hidden neurons get strongly negative biases,
    which makes most of them dead.
    """
    sizes = ACAS_LAYER_SIZES
    weights = [
        rng.normal(size=(sizes[i + 1], sizes[i])) * np.sqrt(2.0 / sizes[i])
        for i in range(len(sizes) - 1)
    ]
    biases = [rng.normal(scale=0.05, size=n) for n in sizes[1:]]
    for b in biases[:-1]:
        mask = rng.random(b.shape) < dead_fraction
        b[mask] = -rng.uniform(20.0, 40.0, size=int(mask.sum()))
    return Network(
        weights=tuple(weights),
        biases=tuple(biases),
        input_lo=np.array(ACAS_MINS),
        input_hi=np.array(ACAS_MAXES),
        input_mean=np.array(ACAS_MEANS[:-1]),
        input_range=np.array(ACAS_RANGES[:-1]),
        output_mean=ACAS_MEANS[-1],
        output_range=ACAS_RANGES[-1],
    )


def random_query_network(rng, max_hidden=12):
    """A small random network and one hidden node, its bias lowered at random.

    Lowering the bias by U(0, 2) gives a mix of dead and alive nodes.
    Returns ``(net, node)``; the truncated query has at most ``max_hidden``
    hidden neurons.
    """
    n_inputs = int(rng.integers(1, 5))
    depth = int(rng.integers(1, 4))
    while True:
        hidden = [int(s) for s in rng.integers(1, 7, size=depth)]
        if sum(hidden[:-1]) <= max_hidden:
            break
    net = random_network(rng, [n_inputs, *hidden, 1], normalize=bool(rng.random() < 0.5))
    node = NodeId(depth, int(rng.integers(0, hidden[-1])))
    biases = [np.array(b) for b in net.biases]
    biases[depth - 1][node.index] -= rng.uniform(0.0, 2.0)
    return net.replace(biases=tuple(biases)), node
