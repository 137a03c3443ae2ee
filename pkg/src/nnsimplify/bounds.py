"""Interval and symbolic bound propagation over input sub-boxes.

Bounds are computed over *normalized* inputs: a region given in original
units is mapped through ``(x - mean) / range``, which is monotone in
floating point, so every input evaluated by :mod:`nnsimplify.network`
lands inside the normalized box used here.

Symbolic bounds are affine functions of the normalized inputs, stored as
arrays of shape ``(n, d + 1)`` whose last column is the constant term.
Unstable ReLUs are relaxed by the chord ``u * (y - l) / (u - l)`` above and
by the zero function below.

Neurons of one hidden layer that have bitwise-identical incoming rows and
biases always carry identical values, so their outgoing columns are summed
before the next layer is bounded.  This lets differences such as
``relu(x) - relu(x)`` cancel exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Network

__all__ = ["NeuronBounds", "BoundPropagator", "concrete_bounds", "symbolic_bounds", "normalized_region", "SLACK"]

SLACK = 2.0**-40


@dataclass
class NeuronBounds:
    """Pre-activation bounds for every affine layer, the output layer last."""

    lower: list
    upper: list
    sym_lower: list | None = None
    sym_upper: list | None = None
    box_lo: np.ndarray | None = None
    box_hi: np.ndarray | None = None
    pads: list | None = None  # outward rounding slack per layer

    @property
    def output_upper(self) -> float:
        return float(self.upper[-1][0])

    @property
    def output_lower(self) -> float:
        return float(self.lower[-1][0])

    def concretize(self, layer, slack=True):
        """Box concretization of the symbolic bounds of ``layer``.

        With ``slack=False`` the outward rounding pad is left off, and the
        result may miss floating-point evaluations by a few ulps.
        """
        lo = _concretize_lower(self.sym_lower[layer], self.box_lo, self.box_hi)
        hi = _concretize_upper(self.sym_upper[layer], self.box_lo, self.box_hi)
        if slack:
            lo, hi = lo - self.pads[layer], hi + self.pads[layer]
        return lo, hi


def normalized_region(net: Network, region=None):
    lo, hi = (net.input_lo, net.input_hi) if region is None else region
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    return (lo - net.input_mean) / net.input_range, (hi - net.input_mean) / net.input_range


def _concretize_upper(eq, lo, hi):
    coef, const = eq[:, :-1], eq[:, -1]
    return np.maximum(coef, 0.0) @ hi + np.minimum(coef, 0.0) @ lo + const


def _concretize_lower(eq, lo, hi):
    coef, const = eq[:, :-1], eq[:, -1]
    return np.maximum(coef, 0.0) @ lo + np.minimum(coef, 0.0) @ hi + const


def _interval_affine(w, b, lo, hi, mag):
    pos, neg = np.maximum(w, 0.0), np.minimum(w, 0.0)
    pad = SLACK * (np.abs(w) @ mag + np.abs(b))
    return pos @ lo + neg @ hi + b - pad, pos @ hi + neg @ lo + b + pad


def concrete_bounds(net: Network, region=None) -> NeuronBounds:
    """Plain interval propagation; ReLU clamps both interval ends at 0."""
    lo, hi = normalized_region(net, region)
    mag = np.maximum(np.abs(lo), np.abs(hi))
    lowers, uppers = [], []
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        l, u = _interval_affine(w, b, lo, hi, mag)
        lowers.append(l)
        uppers.append(u)
        if i < last:
            mag = np.maximum(np.abs(l), np.abs(u))
            lo, hi = np.maximum(l, 0.0), np.maximum(u, 0.0)
    return NeuronBounds(lowers, uppers)


def _merge_duplicates(w, b, w_next):
    """Group identical neurons of a hidden layer; sum their outgoing columns.

    Returns ``(representatives, merged_next_weights)``.
    """
    groups = {}
    for k in range(w.shape[0]):
        groups.setdefault((w[k].tobytes(), b[k : k + 1].tobytes()), []).append(k)
    reps = [members[0] for members in groups.values()]
    if len(reps) == w.shape[0]:
        return None, w_next
    merged = np.zeros((w_next.shape[0], len(reps)), dtype=np.float64)
    for g, members in enumerate(groups.values()):
        for k in members:
            merged[:, g] += w_next[:, k]
    return np.array(reps, dtype=np.intp), merged


class BoundPropagator:
    """Symbolic bound propagation for one network, reusable across regions."""

    def __init__(self, net: Network):
        self.net = net
        layers = []
        reps = None
        weights, biases = net.weights, net.biases
        for i, (w, b) in enumerate(zip(weights, biases)):
            merged_w = w
            if i:
                # columns of w index the previous layer's neurons
                reps, merged_w = _merge_duplicates(weights[i - 1], biases[i - 1], w)
            layers.append((reps, merged_w, b))
        self._layers = layers

    def bounds(self, region=None) -> NeuronBounds:
        net = self.net
        box_lo, box_hi = normalized_region(net, region)
        d = net.input_size
        upper_eq = np.hstack([np.eye(d), np.zeros((d, 1))])
        lower_eq = upper_eq
        post_lo, post_hi = box_lo, box_hi
        mag = np.maximum(np.abs(box_lo), np.abs(box_hi))
        lowers, uppers, sym_lo, sym_hi, pads = [], [], [], [], []
        last = len(self._layers) - 1
        for i, (reps, w, b) in enumerate(self._layers):
            if reps is not None:
                upper_eq, lower_eq = upper_eq[reps], lower_eq[reps]
                post_lo, post_hi, mag = post_lo[reps], post_hi[reps], mag[reps]
            pos, neg = np.maximum(w, 0.0), np.minimum(w, 0.0)
            pre_up = pos @ upper_eq + neg @ lower_eq
            pre_lo = pos @ lower_eq + neg @ upper_eq
            pre_up[:, -1] += b
            pre_lo[:, -1] += b
            pad = SLACK * (np.abs(w) @ mag + np.abs(b))
            ilo, ihi = _interval_affine(w, b, post_lo, post_hi, mag)
            l = np.maximum(_concretize_lower(pre_lo, box_lo, box_hi) - pad, ilo)
            u = np.minimum(_concretize_upper(pre_up, box_lo, box_hi) + pad, ihi)
            lowers.append(l)
            uppers.append(u)
            sym_lo.append(pre_lo)
            sym_hi.append(pre_up)
            pads.append(pad)
            if i == last:
                break
            mag = np.abs(w) @ mag + np.abs(b)
            dead = u <= 0.0
            unstable = (l < 0.0) & ~dead
            upper_eq = pre_up.copy()
            lower_eq = pre_lo.copy()
            if unstable.any():
                lu, uu = l[unstable], u[unstable]
                slope = np.nextafter(uu / (uu - lu), np.inf)
                upper_eq[unstable] *= slope[:, None]
                upper_eq[unstable, -1] -= slope * lu
                lower_eq[unstable] = 0.0
            upper_eq[dead] = 0.0
            lower_eq[dead] = 0.0
            mag = np.where(dead, 0.0, mag)
            post_lo = np.maximum(l, 0.0)
            post_hi = np.maximum(u, 0.0)
        return NeuronBounds(lowers, uppers, sym_lo, sym_hi, box_lo, box_hi, pads)


def symbolic_bounds(net: Network, region=None) -> NeuronBounds:
    return BoundPropagator(net).bounds(region)
