"""Ternary test-set representation: parsing, flattening, block partitioning.

A test set is a T x n grid over {0,1,X} where X marks a don't-care
position.  For coding purposes the grid is read row-major into one long
symbol string which is then cut into fixed-length input blocks, padding
the tail block with X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import EmptyInput, IllegalCharacter, RaggedRows

TEST_ALPHABET = "01X"
MV_ALPHABET = "01U"

_NORMALIZE = str.maketrans("x", "X")


@dataclass(frozen=True)
class TestSet:
    """An immutable T x n pattern grid over {0,1,X}."""

    patterns: tuple[str, ...]

    def __post_init__(self):
        if not self.patterns:
            raise EmptyInput("test set has no patterns")
        width = len(self.patterns[0])
        if width < 1:
            raise EmptyInput("test set has zero-width patterns")
        for row in self.patterns:
            if len(row) != width:
                raise RaggedRows(
                    f"pattern length {len(row)} differs from {width}"
                )
            for ch in row:
                if ch not in TEST_ALPHABET:
                    raise IllegalCharacter(f"illegal symbol {ch!r} in pattern")

    @property
    def pattern_count(self) -> int:
        return len(self.patterns)

    @property
    def width(self) -> int:
        return len(self.patterns[0])


@dataclass(frozen=True)
class TernaryString:
    """The flattened test set; ``original_length`` is the pre-padding size."""

    symbols: str
    original_length: int

    def __post_init__(self):
        if len(self.symbols) != self.original_length:
            raise ValueError("symbol count and original_length disagree")


@dataclass(frozen=True)
class InputBlock:
    """One fixed-length slice of the flattened test set (1-based ``index``)."""

    symbols: str
    index: int


def parse_test_set(text: str | IO[str] | Iterable[str]) -> TestSet:
    """Parse a test-set file: one pattern per line over {0,1,X,x}.

    Lines starting with '#' and blank lines are skipped; 'x' is
    normalized to 'X'.  Raises RaggedRows, IllegalCharacter or
    EmptyInput on malformed input.
    """
    if hasattr(text, "read"):
        lines = text.read().splitlines()
    elif isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = [line.rstrip("\n") for line in text]

    rows = []
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.translate(_NORMALIZE))
    if not rows:
        raise EmptyInput("no patterns found in input")
    return TestSet(tuple(rows))


def write_test_set(ts: TestSet) -> str:
    """Render a test set back to its file form (canonical 'X', newline-terminated)."""
    return "".join(row + "\n" for row in ts.patterns)


def flatten(ts: TestSet) -> TernaryString:
    """Concatenate the patterns row-major into one symbol string."""
    symbols = "".join(ts.patterns)
    return TernaryString(symbols, len(symbols))


def partition(s: TernaryString, k: int) -> list[InputBlock]:
    """Cut the string into blocks of length ``k``, X-padding the tail block."""
    if k < 1:
        raise ValueError("block length must be >= 1")
    n_blocks = math.ceil(s.original_length / k)
    padded = s.symbols + "X" * (n_blocks * k - s.original_length)
    return [
        InputBlock(padded[i * k : (i + 1) * k], i + 1) for i in range(n_blocks)
    ]


def original_size_bits(ts: TestSet) -> int:
    """Number of bit positions in the test set (T*n, padding excluded).

    This is the denominator of the compression rate; X positions count
    as one bit each.
    """
    return ts.pattern_count * ts.width
