from fractions import Fraction

import numpy as np
import pytest

from nnsimplify import fixtures
from nnsimplify.errors import TooLarge
from nnsimplify.network import NodeId, evaluate_batch, truncate
from nnsimplify.oracle import exact_interval_upper, exact_max, oracle_verdict
from nnsimplify.verifier import ALIVE, DEAD, Epsilon, Strict, make_query

from conftest import V4


def test_cancelling_v4_max_is_zero(cancelling):
    result = exact_max(truncate(cancelling, V4))
    assert result.value == 0
    assert oracle_verdict(make_query(cancelling, V4))[0] == DEAD


def test_gated_hidden_maxima(gated):
    assert exact_max(truncate(gated, NodeId(1, 0))).value == Fraction(1.3)
    assert exact_max(truncate(gated, NodeId(1, 1))).value == 2


def test_gated_output_max(gated):
    # v3 = relu(-2x) peaks at x = -1 giving 4.2 * 2
    result = exact_max(gated)
    assert result.value == Fraction(4.2) * 2
    assert result.argmax == [-1]


def test_box_argument(gated):
    assert exact_max(gated, box=(np.array([0.0]), np.array([1.0]))).value == Fraction(0.7) * Fraction(1.3)


def test_epsilon_threshold():
    net = fixtures._unit_box_network([[[0.01]], [[1.0]]], [[0.0], [0.0]])
    query = make_query(net, NodeId(1, 0), Epsilon(0.01))
    assert oracle_verdict(query)[0] == ALIVE
    assert oracle_verdict(make_query(net, NodeId(1, 0), Epsilon(0.02)))[0] == DEAD


def test_too_large(rng):
    net = fixtures.random_network(rng, [2, 9, 9, 1])
    with pytest.raises(TooLarge):
        exact_max(net)
    assert exact_max(net, max_hidden=18).patterns >= 1


def test_needs_single_output(gated):
    with pytest.raises(ValueError):
        exact_max(gated.replace(weights=(gated.weights[0], np.ones((2, 2))), biases=(gated.biases[0], np.zeros(2))))


@pytest.mark.parametrize("seed", range(15))
def test_max_dominates_samples_and_is_attained(seed):
    rng = np.random.default_rng(seed)
    sizes = [int(rng.integers(1, 4)), *[int(s) for s in rng.integers(1, 5, size=int(rng.integers(1, 3)))], 1]
    net = fixtures.random_network(rng, sizes, normalize=True)
    result = exact_max(net)
    xs = rng.uniform(net.input_lo, net.input_hi, size=(5000, net.input_size))
    sampled = evaluate_batch(net, xs)[:, 0]
    scale = 1e-9 * (1 + abs(float(result.value)))
    assert sampled.max() <= float(result.value) + scale
    at_argmax = evaluate_batch(net, result.witness[None, :])[0, 0]
    assert at_argmax == pytest.approx(float(result.value), abs=scale)
    w = result.witness
    assert np.all(w >= net.input_lo) and np.all(w <= net.input_hi)


def test_strict_mode_is_default(cancelling):
    assert make_query(cancelling, V4).mode == Strict()


def test_interval_upper_is_exact_and_sound(gated):
    assert exact_interval_upper(truncate(gated, NodeId(1, 0))) == Fraction(1.3)
    # 0.7 * 1.3 + 4.2 * 2, looser than the true maximum 8.4
    assert exact_interval_upper(gated) == Fraction(0.7) * Fraction(1.3) + Fraction(4.2) * 2


@pytest.mark.parametrize("seed", range(5))
def test_interval_upper_dominates_exact_max(seed):
    rng = np.random.default_rng(seed)
    net = fixtures.random_network(rng, [2, 4, 3, 1], normalize=True)
    assert exact_interval_upper(net) >= exact_max(net).value


@pytest.mark.parametrize("seed", range(5))
def test_planted_nodes_certified(seed):
    planted = fixtures.planted_dead_network(np.random.default_rng(seed))
    for node in planted.planted:
        assert exact_interval_upper(truncate(planted.net, node)) < 0
