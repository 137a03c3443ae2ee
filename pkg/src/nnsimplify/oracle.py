"""Exact maximization of a small truncated network by phase enumeration.

Every input fixes each hidden ReLU in an active (pre-activation >= 0) or
inactive (pre-activation <= 0) phase, and within one phase pattern the
network is affine.  :func:`exact_max` walks the tree of phase patterns
depth first, one neuron at a time, keeping only feasible prefixes, and at
each leaf maximizes the now-affine output with an exact rational LP.  All
network parameters are converted to exact rationals without
rounding, so the result is the true maximum of the network as written,
with exact normalization.

This module is a test oracle; it shares no code with the bound
propagation or branch and bound used by :mod:`nnsimplify.verifier`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from .errors import TooLarge
from .exact_lp import maximize
from .network import Network
from .verifier import ALIVE, DEAD, Epsilon, VerificationQuery

__all__ = ["ExactMax", "exact_max", "exact_interval_upper", "oracle_verdict", "MAX_HIDDEN"]

MAX_HIDDEN = 16


@dataclass
class ExactMax:
    value: Fraction
    argmax: list  # Fractions, original input units
    patterns: int  # feasible phase patterns visited

    @property
    def witness(self) -> np.ndarray:
        return np.array([float(v) for v in self.argmax])


def _fraction(q):
    return Fraction(int(q.numerator), int(q.denominator))


def _affine_value(f, z):
    coef, const = f
    return sum((a * b for a, b in zip(coef, z)), const)


def exact_max(subnet: Network, box=None, max_hidden=MAX_HIDDEN) -> ExactMax:
    """Exact maximum of the single output of ``subnet`` over ``box`` (original units)."""
    if subnet.output_size != 1:
        raise ValueError("exact_max needs a single-output network")
    hidden = subnet.hidden_count
    if hidden > max_hidden:
        raise TooLarge(f"{hidden} hidden neurons exceed the enumeration bound of {max_hidden}")

    lo, hi = (subnet.input_lo, subnet.input_hi) if box is None else box
    mean = [mpq(float(v)) for v in subnet.input_mean]
    rng = [mpq(float(v)) for v in subnet.input_range]
    zlo = [(mpq(float(v)) - m) / r for v, m, r in zip(lo, mean, rng)]
    zhi = [(mpq(float(v)) - m) / r for v, m, r in zip(hi, mean, rng)]
    d = len(zlo)

    weights = [[[mpq(float(x)) for x in row] for row in w] for w in subnet.weights]
    biases = [[mpq(float(x)) for x in b] for b in subnet.biases]
    out_scale = mpq(subnet.output_range)
    out_shift = mpq(subnet.output_mean)
    zero = mpq(0)

    def layer_pre(i, posts):
        result = []
        for row, b in zip(weights[i], biases[i]):
            coef = [zero] * d
            const = b
            for wk, (pc, pk) in zip(row, posts):
                if wk:
                    coef = [c + wk * p for c, p in zip(coef, pc)]
                    const += wk * pk
            result.append((coef, const))
        return result

    inputs = [([mpq(int(j == k)) for j in range(d)], zero) for k in range(d)]
    best = {"value": None, "z": None, "patterns": 0}
    start = [lo_ + (hi_ - lo_) / 2 for lo_, hi_ in zip(zlo, zhi)]
    last = len(weights) - 1

    def leaf(posts, G, h):
        best["patterns"] += 1
        coef, const = layer_pre(last, posts)[0]
        box_max = const + sum(c * (u if c > 0 else l) for c, l, u in zip(coef, zlo, zhi))
        if best["value"] is not None and box_max <= best["value"]:
            return
        res = maximize(coef, G, h, zlo, zhi)
        if not res.feasible:
            return
        value = res.value + const
        if best["value"] is None or value > best["value"]:
            best["value"], best["z"] = value, res.point

    def descend(i, pres, k, posts, G, h, point):
        if k == len(pres):
            if i == last - 1 or last == 0:
                leaf(posts, G, h)
            else:
                descend(i + 1, layer_pre(i + 1, posts), 0, [], G, h, point)
            return
        coef, const = pres[k]
        value = _affine_value(pres[k], point)
        active = ([-c for c in coef], const)  # -(a.z + c) <= 0
        inactive = (list(coef), -const)  # a.z + c <= 0
        order = [(True, active), (False, inactive)] if value >= 0 else [(False, inactive), (True, active)]
        for is_active, (g, hv) in order:
            G2, h2 = G + [g], h + [hv]
            here = point
            if _affine_value((g, zero), here) > hv:
                res = maximize([0] * d, G2, h2, zlo, zhi)
                if not res.feasible:
                    continue
                here = res.point
            post = pres[k] if is_active else ([zero] * d, zero)
            descend(i, pres, k + 1, posts + [post], G2, h2, here)

    if last == 0:
        leaf(inputs, [], [])
    else:
        descend(0, layer_pre(0, inputs), 0, [], [], [], start)

    z = best["z"]
    x = [_fraction(zj * r + m) for zj, r, m in zip(z, rng, mean)]
    return ExactMax(_fraction(best["value"] * out_scale + out_shift), x, best["patterns"])


def exact_interval_upper(subnet: Network) -> Fraction:
    """Upper bound on the single output by interval arithmetic in exact rationals.

    Not tight, but exact: a negative result proves the output is negative
    everywhere on the box, for networks of any size.
    """
    lo = [(mpq(float(v)) - mpq(float(m))) / mpq(float(r)) for v, m, r in zip(subnet.input_lo, subnet.input_mean, subnet.input_range)]
    hi = [(mpq(float(v)) - mpq(float(m))) / mpq(float(r)) for v, m, r in zip(subnet.input_hi, subnet.input_mean, subnet.input_range)]
    last = len(subnet.weights) - 1
    for i, (w, b) in enumerate(zip(subnet.weights, subnet.biases)):
        new_lo, new_hi = [], []
        for row, bias in zip(w, b):
            l = u = mpq(float(bias))
            for wk, a, c in zip(row, lo, hi):
                if wk > 0:
                    l += mpq(float(wk)) * a
                    u += mpq(float(wk)) * c
                elif wk < 0:
                    l += mpq(float(wk)) * c
                    u += mpq(float(wk)) * a
            new_lo.append(l)
            new_hi.append(u)
        if i == last:
            return _fraction(new_hi[0] * mpq(float(subnet.output_range)) + mpq(float(subnet.output_mean)))
        lo = [max(v, mpq(0)) for v in new_lo]
        hi = [max(v, mpq(0)) for v in new_hi]


def oracle_verdict(query: VerificationQuery, max_hidden=MAX_HIDDEN):
    """``(kind, ExactMax)`` with kind ``"dead"`` or ``"alive"``."""
    result = exact_max(query.subnet, max_hidden=max_hidden)
    if isinstance(query.mode, Epsilon):
        alive = result.value >= Fraction(query.mode.epsilon)
    else:
        alive = result.value > 0
    return (ALIVE if alive else DEAD), result
