import numpy as np
import pytest

from nnsimplify import fixtures
from nnsimplify.bounds import BoundPropagator, concrete_bounds, normalized_region, symbolic_bounds
from nnsimplify.network import NodeId, evaluate_batch, node_values, truncate


def random_region(rng, net):
    a = rng.uniform(net.input_lo, net.input_hi)
    b = rng.uniform(net.input_lo, net.input_hi)
    return np.minimum(a, b), np.maximum(a, b)


def assert_contains(net, region, xs):
    values = node_values(net, xs)
    pres = values.pre + [values_out(net, xs)]
    sym = symbolic_bounds(net, region)
    conc = concrete_bounds(net, region)
    for layer, pre in enumerate(pres):
        for b in (sym, conc):
            assert np.all(pre >= b.lower[layer]) and np.all(pre <= b.upper[layer])
        lo, hi = sym.concretize(layer)
        assert np.all(pre >= lo) and np.all(pre <= hi)


def values_out(net, xs):
    # output pre-activation in normalized output units
    return (evaluate_batch(net, xs) - net.output_mean) / net.output_range


@pytest.mark.parametrize("seed", range(20))
def test_bounds_contain_sampled_values(seed):
    rng = np.random.default_rng(seed)
    sizes = [int(rng.integers(1, 5)), *rng.integers(1, 10, size=int(rng.integers(1, 4))), int(rng.integers(1, 3))]
    net = fixtures.random_network(rng, [int(s) for s in sizes], normalize=True)
    for _ in range(5):
        region = random_region(rng, net)
        xs = rng.uniform(*region, size=(200, net.input_size))
        xs = np.vstack([xs, region[0], region[1]])
        assert_contains(net, region, xs)


def test_cancelling_symbolic_cancels(cancelling):
    sub = truncate(cancelling, NodeId(2, 0))
    assert symbolic_bounds(sub).output_upper == 0.0
    conc = concrete_bounds(sub)
    assert conc.output_lower < 0.0 < conc.output_upper


def test_stable_network_is_exact():
    # all weights and biases keep every ReLU active on the box
    net = fixtures._unit_box_network([[[0.5], [0.25]], [[1.0, -2.0]]], [[1.0, 2.0], [0.0]])
    b = symbolic_bounds(net)
    # output = 0.5x + 1 - 0.5x - 4 = -3 exactly
    assert b.output_lower == pytest.approx(-3.0, abs=1e-9)
    assert b.output_upper == pytest.approx(-3.0, abs=1e-9)
    assert b.output_lower <= -3.0 <= b.output_upper


def test_symbolic_never_looser_than_intervals(rng):
    net = fixtures.random_network(rng, [3, 10, 10, 1])
    for _ in range(20):
        region = random_region(rng, net)
        sym = symbolic_bounds(net, region)
        conc = concrete_bounds(net, region)
        for ls, us, lc, uc in zip(sym.lower, sym.upper, conc.lower, conc.upper):
            assert np.all(ls >= lc) and np.all(us <= uc)


def test_zero_network():
    net = fixtures.zero_network([2, 3, 1])
    b = symbolic_bounds(net)
    assert b.output_lower == 0.0 and b.output_upper == 0.0


def test_point_region(rng):
    net = fixtures.random_network(rng, [2, 6, 6, 1])
    x = rng.uniform(net.input_lo, net.input_hi)
    b = BoundPropagator(net).bounds((x, x))
    value = values_out(net, x[None, :])[0, 0]
    assert b.output_lower <= value <= b.output_upper
    assert b.output_upper - b.output_lower < 1e-9


def test_normalized_region_is_monotone(rng):
    net = fixtures.random_network(rng, [3, 2, 1], normalize=True)
    lo, hi = normalized_region(net)
    assert np.all(lo <= hi)
