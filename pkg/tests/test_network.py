import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nnsimplify import fixtures
from nnsimplify.errors import DimensionMismatch, EmptyLayer
from nnsimplify.network import (
    Network,
    NodeId,
    affine,
    evaluate,
    evaluate_batch,
    from_document,
    node_values,
    to_document,
    truncate,
)
from nnsimplify.nnet_io import parse_nnet, write_nnet


def test_gated_forward(gated):
    values = node_values(gated, [1.0])
    assert values.pre[0].tolist() == [1.3, -2.0]
    assert values.post[0].tolist() == [1.3, 0.0]
    assert evaluate(gated, [1.0])[0] == pytest.approx(0.91)


def test_gated_v3_is_cut_off(gated):
    # with a negative input v3 fires instead
    assert evaluate(gated, [-0.5])[0] == pytest.approx(4.2)


@pytest.mark.parametrize("x", [-1.0, -0.25, 0.0, 0.5, 1.0])
def test_cancelling_output_is_zero(cancelling, x):
    assert evaluate(cancelling, [x])[0] == 0.0
    assert node_values(cancelling, [x]).post[1][0] == 0.0


def test_relu_outputs_nonnegative(rng):
    net = fixtures.random_network(rng, [3, 8, 8, 2])
    xs = rng.uniform(net.input_lo, net.input_hi, size=(500, 3))
    for post in node_values(net, xs).post:
        assert post.min() >= 0.0


def test_batch_matches_single(rng):
    net = fixtures.random_network(rng, [4, 6, 5, 3], normalize=True)
    xs = rng.uniform(net.input_lo, net.input_hi, size=(50, 4))
    batch = evaluate_batch(net, xs)
    for x, row in zip(xs, batch):
        assert evaluate(net, x).tobytes() == row.tobytes()


def test_evaluation_is_deterministic(rng):
    net = fixtures.random_network(rng, [3, 10, 10, 1], normalize=True)
    xs = rng.uniform(net.input_lo, net.input_hi, size=(100, 3))
    assert evaluate_batch(net, xs).tobytes() == evaluate_batch(net, xs).tobytes()


def test_normalization_applied():
    net = fixtures.identity_network().replace(
        input_mean=np.array([2.0]), input_range=np.array([4.0]), output_mean=1.0, output_range=3.0
    )
    # x = 6 normalizes to 1, output 1 * 3 + 1
    assert evaluate(net, [6.0])[0] == 4.0


def test_affine_zero_terms_do_not_change_result(rng):
    w = rng.normal(size=(5, 7))
    b = rng.normal(size=5)
    x = rng.normal(size=(20, 7))
    w0 = w.copy()
    w0[:, [1, 4]] = 0.0
    kept = [0, 2, 3, 5, 6]
    assert affine(w0, b, x).tobytes() == affine(w[:, kept], b, x[:, kept]).tobytes()


def test_wrong_input_length(gated):
    with pytest.raises(DimensionMismatch):
        evaluate(gated, [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        evaluate_batch(gated, np.zeros((3, 2)))


def test_inconsistent_shapes_rejected():
    with pytest.raises(DimensionMismatch):
        Network(
            weights=(np.ones((2, 1)), np.ones((1, 3))),
            biases=(np.zeros(2), np.zeros(1)),
            input_lo=np.array([-1.0]),
            input_hi=np.array([1.0]),
            input_mean=np.zeros(1),
            input_range=np.ones(1),
        )


def test_arrays_are_read_only(gated):
    with pytest.raises(ValueError):
        gated.weights[0][0, 0] = 5.0


def test_document_round_trip(rng):
    net = fixtures.random_network(rng, [3, 4, 2], normalize=True)
    again = from_document(parse_nnet(write_nnet(to_document(net))))
    assert again.same_as(net)


def test_empty_layer_cannot_be_written(gated):
    net = gated.replace(weights=(np.zeros((0, 1)), np.zeros((1, 0))), biases=(np.zeros(0), np.zeros(1)))
    assert net.empty_layers() == [1]
    with pytest.raises(EmptyLayer):
        to_document(net)


def test_node_ids():
    assert str(NodeId(2, 0)) == "L2N0"
    assert list(fixtures.cancelling_network().hidden_nodes()) == [NodeId(1, 0), NodeId(1, 1), NodeId(2, 0)]


def test_truncate_cancelling(cancelling):
    sub = truncate(cancelling, NodeId(2, 0))
    assert sub.layer_sizes == [1, 2, 1]
    assert sub.output_range == 1.0 and sub.output_mean == 0.0


@pytest.mark.parametrize("bad", [NodeId(0, 0), NodeId(3, 0), NodeId(1, 2)])
def test_truncate_rejects_non_hidden(cancelling, bad):
    with pytest.raises(ValueError):
        truncate(cancelling, bad)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), normalize=st.booleans())
def test_truncation_matches_pre_activation(seed, normalize):
    rng = np.random.default_rng(seed)
    sizes = [int(rng.integers(1, 5))] + [int(s) for s in rng.integers(1, 8, size=int(rng.integers(1, 4)))] + [2]
    net = fixtures.random_network(rng, sizes, normalize=normalize)
    xs = rng.uniform(net.input_lo, net.input_hi, size=(32, sizes[0]))
    pre = node_values(net, xs).pre
    for node in net.hidden_nodes():
        out = evaluate_batch(truncate(net, node), xs)[:, 0]
        assert out.tobytes() == pre[node.layer - 1][:, node.index].tobytes()
