"""Reading and writing networks in the NNet text format.

Layout of an NNet file::

    // any number of comment lines
    numLayers,inputSize,outputSize,maxLayerSize,
    size0,size1,...,sizeN,
    0,
    min0,...,
    max0,...,
    mean0,...,meanOut,
    range0,...,rangeOut,
    <layer 0 weight rows, one row per line>
    <layer 0 biases, one value per line>
    ...

Numbers are held as binary doubles and written with the shortest decimal
that round-trips, so ``parse_nnet(write_nnet(doc)) == doc`` bit for bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidInputBox,
    MalformedHeader,
    NonNumericToken,
    NonPositiveRange,
)

__all__ = ["NNetDocument", "parse_nnet", "write_nnet", "read_nnet_file", "write_nnet_file"]

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\Z")
_INTEGER = re.compile(r"[+-]?\d+\Z")


def _same_bits(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return a.shape == b.shape and a.tobytes() == b.tobytes()


@dataclass(eq=False)
class NNetDocument:
    """Field-for-field image of an NNet file.

    ``weights[i]`` has shape ``(layer_sizes[i + 1], layer_sizes[i])``.
    Equality is bitwise on every numeric array.
    """

    num_layers: int
    input_size: int
    output_size: int
    max_layer_size: int
    layer_sizes: list[int]
    input_mins: np.ndarray
    input_maxes: np.ndarray
    means: np.ndarray
    ranges: np.ndarray
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    header_comments: list[str] = field(default_factory=list)
    flag_line: str = "0,"

    def __eq__(self, other):
        if not isinstance(other, NNetDocument):
            return NotImplemented
        scalars = (
            self.num_layers == other.num_layers
            and self.input_size == other.input_size
            and self.output_size == other.output_size
            and self.max_layer_size == other.max_layer_size
            and list(self.layer_sizes) == list(other.layer_sizes)
            and list(self.header_comments) == list(other.header_comments)
            and self.flag_line == other.flag_line
            and len(self.weights) == len(other.weights)
            and len(self.biases) == len(other.biases)
        )
        if not scalars:
            return False
        vectors = zip(
            [self.input_mins, self.input_maxes, self.means, self.ranges, *self.weights, *self.biases],
            [other.input_mins, other.input_maxes, other.means, other.ranges, *other.weights, *other.biases],
        )
        return all(_same_bits(a, b) for a, b in vectors)

    __hash__ = None


class _Lines:
    """Cursor over the non-blank lines of a document, tracking line numbers."""

    def __init__(self, text):
        self._lines = [
            (number, line.strip())
            for number, line in enumerate(text.splitlines(), start=1)
            if line.strip()
        ]
        self._pos = 0

    def peek(self):
        if self._pos >= len(self._lines):
            return None, None
        return self._lines[self._pos]

    def next(self, what):
        if self._pos >= len(self._lines):
            raise DimensionMismatch(f"unexpected end of file while reading {what}")
        item = self._lines[self._pos]
        self._pos += 1
        return item

    def remaining(self):
        return self._lines[self._pos:]


def _tokens(line):
    tokens = [t.strip() for t in line.split(",")]
    if tokens and tokens[-1] == "":
        tokens.pop()
    return tokens


def _floats(number, line, expected, what):
    tokens = _tokens(line)
    values = []
    for token in tokens:
        if not _NUMBER.match(token):
            raise NonNumericToken(f"{what}: cannot read {token!r} as a number", number)
        values.append(float(token))
    if len(values) != expected:
        raise DimensionMismatch(
            f"{what}: expected {expected} values, found {len(values)}", number
        )
    return np.array(values, dtype=np.float64)


def _ints(number, line, what):
    tokens = _tokens(line)
    if not tokens or not all(_INTEGER.match(t) for t in tokens):
        raise MalformedHeader(f"{what}: expected comma-separated integers, got {line!r}", number)
    return [int(t) for t in tokens]


def parse_nnet(text: str) -> NNetDocument:
    """Parse the full text of an NNet file."""
    lines = _Lines(text)

    comments = []
    while True:
        number, line = lines.peek()
        if line is None or not line.startswith("//"):
            break
        comments.append(line)
        lines.next("comments")

    number, line = lines.peek()
    if line is None:
        raise MalformedHeader("missing header counts line")
    number, line = lines.next("header")
    header = _ints(number, line, "header counts")
    if len(header) < 4:
        raise MalformedHeader(f"header needs 4 counts, found {len(header)}", number)
    num_layers, input_size, output_size, max_layer_size = header[:4]
    if num_layers < 1 or input_size < 1 or output_size < 1:
        raise MalformedHeader("layer and port counts must be positive", number)

    number, line = lines.next("layer sizes")
    sizes = _ints(number, line, "layer sizes")
    if len(sizes) != num_layers + 1:
        raise DimensionMismatch(
            f"expected {num_layers + 1} layer sizes, found {len(sizes)}", number
        )
    if sizes[0] != input_size or sizes[-1] != output_size:
        raise DimensionMismatch("layer sizes disagree with declared input/output sizes", number)
    if any(s < 1 for s in sizes):
        raise DimensionMismatch("layer sizes must be positive", number)

    _, flag_line = lines.next("flag line")

    number, line = lines.next("input minimums")
    mins = _floats(number, line, input_size, "input minimums")
    number, line = lines.next("input maximums")
    maxes = _floats(number, line, input_size, "input maximums")
    if np.any(mins > maxes):
        raise InvalidInputBox("some input minimum exceeds its maximum", number)
    number, line = lines.next("means")
    means = _floats(number, line, input_size + 1, "means")
    number, line = lines.next("ranges")
    ranges = _floats(number, line, input_size + 1, "ranges")
    if np.any(ranges <= 0):
        raise NonPositiveRange("normalization ranges must be strictly positive", number)

    weights, biases = [], []
    for i in range(num_layers):
        rows, cols = sizes[i + 1], sizes[i]
        matrix = np.empty((rows, cols), dtype=np.float64)
        for r in range(rows):
            number, line = lines.next(f"layer {i} weight row {r}")
            matrix[r] = _floats(number, line, cols, f"layer {i} weight row {r}")
        bias = np.empty(rows, dtype=np.float64)
        for r in range(rows):
            number, line = lines.next(f"layer {i} bias {r}")
            bias[r] = _floats(number, line, 1, f"layer {i} bias {r}")[0]
        weights.append(matrix)
        biases.append(bias)

    leftover = lines.remaining()
    if leftover:
        raise DimensionMismatch(
            f"{len(leftover)} unexpected trailing line(s) after the last layer", leftover[0][0]
        )

    return NNetDocument(
        num_layers=num_layers,
        input_size=input_size,
        output_size=output_size,
        max_layer_size=max_layer_size,
        layer_sizes=sizes,
        input_mins=mins,
        input_maxes=maxes,
        means=means,
        ranges=ranges,
        weights=weights,
        biases=biases,
        header_comments=comments,
        flag_line=flag_line,
    )


def _fmt(value):
    return repr(float(value))


def _row(values):
    return ",".join(_fmt(v) for v in values) + ","


def write_nnet(doc: NNetDocument) -> str:
    out = list(doc.header_comments)
    out.append(f"{doc.num_layers},{doc.input_size},{doc.output_size},{doc.max_layer_size},")
    out.append(",".join(str(s) for s in doc.layer_sizes) + ",")
    out.append(doc.flag_line)
    out.append(_row(doc.input_mins))
    out.append(_row(doc.input_maxes))
    out.append(_row(doc.means))
    out.append(_row(doc.ranges))
    for matrix, bias in zip(doc.weights, doc.biases):
        out.extend(_row(row) for row in np.asarray(matrix))
        out.extend(_fmt(b) + "," for b in bias)
    return "\n".join(out) + "\n"


def read_nnet_file(path) -> NNetDocument:
    return parse_nnet(Path(path).read_text())


def write_nnet_file(path, doc: NNetDocument) -> None:
    Path(path).write_text(write_nnet(doc), newline="\n")
