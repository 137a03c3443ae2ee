"""Fully-connected ReLU networks: evaluation, node inspection, truncation.

Every affine layer is evaluated with a fixed accumulation order: the
weighted sum over a layer's inputs is built term by term in ascending
input index, starting from 0.0, and the bias is added last.  Deleting an
input whose contribution is exactly 0.0 therefore cannot change the sum
(apart from the sign of a zero result), which is what makes pruned
networks bit-for-bit equivalent to their originals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import DimensionMismatch, EmptyLayer
from .nnet_io import NNetDocument

__all__ = [
    "Network",
    "NodeId",
    "NodeValues",
    "from_document",
    "to_document",
    "evaluate",
    "evaluate_batch",
    "node_values",
    "truncate",
    "affine",
]


class NodeId(NamedTuple):
    """A hidden neuron: ``layer`` is 1-based over hidden layers, ``index`` 0-based."""

    layer: int
    index: int

    def __str__(self):
        return f"L{self.layer}N{self.index}"


class NodeValues(NamedTuple):
    pre: list  # one array per hidden layer
    post: list


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable layered ReLU network.

    Hidden layers apply ReLU; the final layer is affine.  Inputs are
    normalized as ``(x - input_mean) / input_range`` before the first layer
    and outputs denormalized as ``y * output_range + output_mean``.
    """

    weights: tuple
    biases: tuple
    input_lo: np.ndarray
    input_hi: np.ndarray
    input_mean: np.ndarray
    input_range: np.ndarray
    output_mean: float = 0.0
    output_range: float = 1.0

    def __post_init__(self):
        weights = tuple(_frozen(w) for w in self.weights)
        biases = tuple(_frozen(b) for b in self.biases)
        if not weights or len(weights) != len(biases):
            raise DimensionMismatch("need one bias vector per weight matrix")
        for w in weights:
            if w.ndim != 2:
                raise DimensionMismatch("weight matrices must be 2-D")
        for i, (w, b) in enumerate(zip(weights, biases)):
            if b.shape != (w.shape[0],):
                raise DimensionMismatch(f"layer {i}: bias length {b.shape} vs {w.shape[0]} rows")
            if i and w.shape[1] != weights[i - 1].shape[0]:
                raise DimensionMismatch(f"layer {i}: {w.shape[1]} columns, previous layer has {weights[i - 1].shape[0]}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)
        d = weights[0].shape[1]
        for name in ("input_lo", "input_hi", "input_mean", "input_range"):
            value = _frozen(getattr(self, name))
            if value.shape != (d,):
                raise DimensionMismatch(f"{name} has shape {value.shape}, expected ({d},)")
            object.__setattr__(self, name, value)
        if np.any(self.input_lo > self.input_hi):
            raise ValueError("input box is empty in some dimension")
        if np.any(self.input_range <= 0) or self.output_range <= 0:
            raise ValueError("normalization ranges must be positive")
        object.__setattr__(self, "output_mean", float(self.output_mean))
        object.__setattr__(self, "output_range", float(self.output_range))

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def input_size(self) -> int:
        return self.weights[0].shape[1]

    @property
    def output_size(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def num_hidden_layers(self) -> int:
        return len(self.weights) - 1

    @property
    def hidden_count(self) -> int:
        return sum(self.layer_sizes[1:-1])

    def hidden_nodes(self) -> Iterator[NodeId]:
        for layer, size in enumerate(self.layer_sizes[1:-1], start=1):
            for index in range(size):
                yield NodeId(layer, index)

    def empty_layers(self) -> list[int]:
        return [i for i, size in enumerate(self.layer_sizes[1:-1], start=1) if size == 0]

    def normalize(self, x):
        return (np.asarray(x, dtype=np.float64) - self.input_mean) / self.input_range

    def replace(self, **changes) -> "Network":
        fields = dict(
            weights=self.weights,
            biases=self.biases,
            input_lo=self.input_lo,
            input_hi=self.input_hi,
            input_mean=self.input_mean,
            input_range=self.input_range,
            output_mean=self.output_mean,
            output_range=self.output_range,
        )
        fields.update(changes)
        return Network(**fields)

    def same_as(self, other: "Network") -> bool:
        """Bitwise equality of every parameter."""
        if self.layer_sizes != other.layer_sizes:
            return False
        pairs = [
            (self.input_lo, other.input_lo),
            (self.input_hi, other.input_hi),
            (self.input_mean, other.input_mean),
            (self.input_range, other.input_range),
            (np.float64(self.output_mean), np.float64(other.output_mean)),
            (np.float64(self.output_range), np.float64(other.output_range)),
            *zip(self.weights, other.weights),
            *zip(self.biases, other.biases),
        ]
        return all(np.asarray(a).tobytes() == np.asarray(b).tobytes() for a, b in pairs)


def affine(weights, bias, inputs):
    """Batched ``inputs @ weights.T + bias`` in ascending-input accumulation order.

    ``inputs`` has shape ``(n, cols)``; the result has shape ``(n, rows)``.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    acc = np.zeros((inputs.shape[0], weights.shape[0]), dtype=np.float64)
    for k in range(weights.shape[1]):
        acc += inputs[:, k : k + 1] * weights[:, k]
    acc += bias
    return acc


def from_document(doc: NNetDocument) -> Network:
    return Network(
        weights=tuple(doc.weights),
        biases=tuple(doc.biases),
        input_lo=doc.input_mins,
        input_hi=doc.input_maxes,
        input_mean=doc.means[:-1],
        input_range=doc.ranges[:-1],
        output_mean=doc.means[-1],
        output_range=doc.ranges[-1],
    )


def to_document(net: Network, header_comments=None, flag_line="0,") -> NNetDocument:
    if net.empty_layers():
        raise EmptyLayer(f"hidden layers {net.empty_layers()} are empty; cascade before writing")
    sizes = net.layer_sizes
    return NNetDocument(
        num_layers=len(net.weights),
        input_size=sizes[0],
        output_size=sizes[-1],
        max_layer_size=max(sizes),
        layer_sizes=sizes,
        input_mins=np.array(net.input_lo),
        input_maxes=np.array(net.input_hi),
        means=np.append(net.input_mean, net.output_mean),
        ranges=np.append(net.input_range, net.output_range),
        weights=[np.array(w) for w in net.weights],
        biases=[np.array(b) for b in net.biases],
        header_comments=list(header_comments or []),
        flag_line=flag_line,
    )


def _as_batch(net, xs):
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != net.input_size:
        raise DimensionMismatch(f"expected inputs of length {net.input_size}, got shape {xs.shape}")
    return xs


def _forward(net, xs, record=None):
    act = (xs - net.input_mean) / net.input_range
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        pre = affine(w, b, act)
        if i == last:
            return pre
        act = np.maximum(pre, 0.0)
        if record is not None:
            record.append((pre, act))


def evaluate_batch(net: Network, xs) -> np.ndarray:
    """Evaluate rows of ``xs`` (original units); returns denormalized outputs."""
    xs = _as_batch(net, xs)
    return _forward(net, xs) * net.output_range + net.output_mean


def evaluate(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D input vector, got shape {x.shape}")
    return evaluate_batch(net, x[None, :])[0]


def node_values(net: Network, x) -> NodeValues:
    """Pre- and post-activation values of every hidden layer at input ``x``.

    ``x`` may be a single vector or a batch of rows; arrays in the result
    carry the same leading shape.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xs = _as_batch(net, x[None, :] if single else x)
    record = []
    _forward(net, xs, record)
    pre = [p[0] if single else p for p, _ in record]
    post = [a[0] if single else a for _, a in record]
    return NodeValues(pre, post)


def truncate(net: Network, v: NodeId) -> Network:
    """Subnetwork whose single, affine output is the pre-activation of ``v``.

    Layers before ``v`` are kept, later ones dropped, and the output
    normalization is the identity.
    """
    layer, index = v
    if not 1 <= layer <= net.num_hidden_layers or not 0 <= index < net.layer_sizes[layer]:
        raise ValueError(f"{v} is not a hidden node of this network")
    w = net.weights[layer - 1][index : index + 1]
    b = net.biases[layer - 1][index : index + 1]
    return net.replace(
        weights=net.weights[: layer - 1] + (w,),
        biases=net.biases[: layer - 1] + (b,),
        output_mean=0.0,
        output_range=1.0,
    )
