import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nnsimplify.errors import (
    DimensionMismatch,
    InvalidInputBox,
    MalformedHeader,
    NNetError,
    NonNumericToken,
    NonPositiveRange,
)
from nnsimplify.fixtures import ACAS_LAYER_SIZES
from nnsimplify.nnet_io import NNetDocument, parse_nnet, write_nnet


def test_identity_network(identity_text):
    doc = parse_nnet(identity_text)
    assert doc.layer_sizes == [1, 1, 1]
    assert doc.header_comments == ["// identity network"]
    assert doc.flag_line == "0,"
    assert doc.weights[0].tolist() == [[1.0]]
    assert doc.biases[1].tolist() == [0.0]


def test_identity_round_trip(identity_text):
    doc = parse_nnet(identity_text)
    assert parse_nnet(write_nnet(doc)) == doc


def test_acas_shaped_document(acas_doc):
    doc = parse_nnet(write_nnet(acas_doc))
    assert doc.layer_sizes == ACAS_LAYER_SIZES
    assert sum(doc.layer_sizes[1:-1]) == 300
    assert doc.num_layers == 7
    assert doc == acas_doc


def test_byte_exact_rewrite(acas_doc):
    text = write_nnet(acas_doc)
    assert write_nnet(parse_nnet(text)) == text


def test_missing_weight_row(identity_text):
    text = identity_text.replace("2,1,1,1,\n1,1,1,", "2,1,1,2,\n1,2,1,")
    with pytest.raises(DimensionMismatch):
        parse_nnet(text)


def test_weight_block_one_row_short():
    rng = np.random.default_rng(3)
    sizes = [2, 3, 1]
    doc = NNetDocument(
        num_layers=2,
        input_size=2,
        output_size=1,
        max_layer_size=3,
        layer_sizes=sizes,
        input_mins=np.array([-1.0, -1.0]),
        input_maxes=np.array([1.0, 1.0]),
        means=np.zeros(3),
        ranges=np.ones(3),
        weights=[rng.normal(size=(3, 2)), rng.normal(size=(1, 3))],
        biases=[rng.normal(size=3), rng.normal(size=1)],
    )
    lines = write_nnet(doc).splitlines()
    first_row = 7  # header, sizes, flag, mins, maxes, means, ranges
    del lines[first_row]
    with pytest.raises(DimensionMismatch):
        parse_nnet("\n".join(lines) + "\n")


def test_negative_weight_token():
    doc = parse_nnet(
        "1,1,1,1,\n1,1,\n0,\n-1,\n1,\n0,0,\n1,1,\n-2.0,\n0,\n"
    )
    text = write_nnet(doc)
    assert "-2.0," in text.splitlines()
    assert parse_nnet(text).weights[0][0, 0] == -2.0


def test_crlf_accepted(identity_text):
    assert parse_nnet(identity_text.replace("\n", "\r\n")) == parse_nnet(identity_text)


def test_trailing_commas_optional(identity_text):
    bare = parse_nnet(identity_text.replace(",\n", "\n"))
    assert bare.flag_line == "0"  # kept verbatim
    bare.flag_line = "0,"
    assert bare == parse_nnet(identity_text)


def test_output_uses_newlines_only(identity_text):
    assert "\r" not in write_nnet(parse_nnet(identity_text.replace("\n", "\r\n")))


def test_scientific_number_style():
    text = (
        "// NNet header comment with a date, 2016\n"
        "1,2,1,2,\n2,1,\n0,\n0.0000000,-3.1415930,\n60760.0000000,3.1415930,\n"
        "1.9791091e+04,0.0,7.5188840201005975,\n60261.0,6.28318530718,373.94992,\n"
        "-3.2e-02,1.5E+00,\n1.0e-3,\n"
    )
    doc = parse_nnet(text)
    assert doc.weights[0].tolist() == [[-0.032, 1.5]]
    assert doc.means[0] == 19791.091
    assert parse_nnet(write_nnet(doc)) == doc


CORRUPTIONS = [
    ("2,1,1,1,", "two,1,1,1,", MalformedHeader),
    ("2,1,1,1,", "2,1,1,", MalformedHeader),
    ("\n1,1,1,\n", "\n1,1,\n", DimensionMismatch),
    ("\n1,1,1,\n", "\n1,1,2,\n", DimensionMismatch),
    ("-1.0,\n1.0,", "-1.0,\nabc,", NonNumericToken),
    ("-1.0,\n1.0,", "-1.0,\n1.0.0,", NonNumericToken),
    ("-1.0,\n1.0,", "-1.0,\nnan,", NonNumericToken),
    ("-1.0,\n1.0,", "2.0,\n1.0,", InvalidInputBox),
    ("1.0,1.0,", "1.0,0.0,", NonPositiveRange),
    ("1.0,1.0,", "1.0,-4,", NonPositiveRange),
]


@pytest.mark.parametrize("old,new,error", CORRUPTIONS)
def test_corrupted_fixtures(identity_text, old, new, error):
    assert old in identity_text
    with pytest.raises(error):
        parse_nnet(identity_text.replace(old, new, 1))


def test_trailing_lines_rejected(identity_text):
    with pytest.raises(DimensionMismatch):
        parse_nnet(identity_text + "1.0,\n")


def test_truncated_file(identity_text):
    with pytest.raises(DimensionMismatch):
        parse_nnet(identity_text.rsplit("\n", 3)[0])


def test_empty_file():
    with pytest.raises(MalformedHeader):
        parse_nnet("// only a comment\n")


def test_errors_carry_line_numbers(identity_text):
    with pytest.raises(NNetError, match="line 5"):
        parse_nnet(identity_text.replace("-1.0,", "x,"))


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def documents(draw):
    sizes = draw(st.lists(st.integers(1, 6), min_size=2, max_size=5))
    d = sizes[0]
    lo = draw(arrays(np.float64, d, elements=st.floats(-1e6, 1e6)))
    span = draw(arrays(np.float64, d, elements=st.floats(0, 1e6)))
    ranges = draw(arrays(np.float64, d + 1, elements=st.floats(1e-300, 1e300)))
    return NNetDocument(
        num_layers=len(sizes) - 1,
        input_size=d,
        output_size=sizes[-1],
        max_layer_size=max(sizes),
        layer_sizes=sizes,
        input_mins=lo,
        input_maxes=lo + span,
        means=draw(arrays(np.float64, d + 1, elements=finite)),
        ranges=ranges,
        weights=[draw(arrays(np.float64, (sizes[i + 1], sizes[i]), elements=finite)) for i in range(len(sizes) - 1)],
        biases=[draw(arrays(np.float64, sizes[i + 1], elements=finite)) for i in range(len(sizes) - 1)],
        header_comments=draw(st.lists(st.text("abcxyz/_-", max_size=10).map(lambda s: "//" + s), max_size=3)),
    )


@settings(max_examples=100, deadline=None)
@given(documents())
def test_round_trip_is_bit_exact(doc):
    text = write_nnet(doc)
    again = parse_nnet(text)
    assert again == doc
    assert write_nnet(again) == text


def test_signed_zero_survives():
    doc = parse_nnet("1,1,1,1,\n1,1,\n0,\n-1,\n1,\n0,0,\n1,1,\n-0.0,\n0.0,\n")
    assert np.signbit(parse_nnet(write_nnet(doc)).weights[0][0, 0])
