"""Shared test utilities: random data builders and independent oracles.

The oracles here deliberately avoid the package's mask/heap machinery:
covering is re-derived character by character and optimal prefix-code
cost is found by enumerating every full binary tree shape, so they can
catch systematic errors in the production paths.
"""

import random
from functools import lru_cache

from tercode import (
    Codebook,
    MatchingVector,
    TestSet,
    build_huffman,
    cover,
    encode_all,
    flatten,
    original_size_bits,
    partition,
)


def random_test_set(rng: random.Random, max_rows=12, max_cols=16,
                    x_density=None) -> TestSet:
    rows = rng.randrange(1, max_rows + 1)
    cols = rng.randrange(1, max_cols + 1)
    if x_density is None:
        x_density = rng.random() * 0.6
    grid = []
    for _ in range(rows):
        grid.append(
            "".join(
                "X" if rng.random() < x_density else rng.choice("01")
                for _ in range(cols)
            )
        )
    return TestSet(tuple(grid))


def random_mv_set(rng: random.Random, k: int, count: int,
                  include_all_u=True) -> list[MatchingVector]:
    mvs = [
        MatchingVector("".join(rng.choice("01U") for _ in range(k)))
        for _ in range(count)
    ]
    if include_all_u:
        mvs.append(MatchingVector("U" * k))
    return mvs


def encode_test_set(ts: TestSet, k: int, mvs, fill="zero", rng=None):
    """Full pipeline: partition, cover, Huffman, encode.  Returns the stream."""
    blocks = partition(flatten(ts), k)
    covering = cover(blocks, mvs)
    codebook = build_huffman(covering.frequencies)
    return encode_all(
        blocks,
        covering,
        codebook,
        mvs,
        fill=fill,
        rng=rng,
        original_length=original_size_bits(ts),
    )


def char_match(block_symbols: str, mv_symbols: str) -> bool:
    """Matching re-stated on characters, independent of the mask encoding."""
    return all(
        not ((b == "1" and v == "0") or (b == "0" and v == "1"))
        for b, v in zip(block_symbols, mv_symbols)
    )


def naive_cover(blocks, mvs):
    """Reference covering: per-block scan in rising-U order, no masks.

    Returns (assignment, frequencies) or the 1-based index of the first
    unmatched block as (None, index).
    """
    order = sorted(range(len(mvs)), key=lambda i: mvs[i].n_unspecified)
    assignment = []
    freqs = [0] * len(mvs)
    for block in blocks:
        for idx in order:
            if char_match(block.symbols, mvs[idx].symbols):
                assignment.append(idx)
                freqs[idx] += 1
                break
        else:
            return None, block.index
    return tuple(assignment), tuple(freqs)


@lru_cache(maxsize=None)
def depth_profiles(leaves: int) -> frozenset:
    """Sorted depth multisets of every full binary tree with ``leaves`` leaves."""
    if leaves == 1:
        return frozenset({(0,)})
    shapes = set()
    for left in range(1, leaves):
        for lp in depth_profiles(left):
            for rp in depth_profiles(leaves - left):
                shapes.add(tuple(sorted([d + 1 for d in lp] + [d + 1 for d in rp])))
    return frozenset(shapes)


def optimal_prefix_cost(nonzero_freqs) -> int:
    """Brute-force minimum of sum(F * codeword length) over all prefix codes.

    Any optimal prefix code is a full binary tree; for a fixed tree shape
    the best assignment pairs the largest frequency with the smallest
    depth (rearrangement inequality), so scanning sorted pairings over
    all shapes is exhaustive.
    """
    desc = sorted(nonzero_freqs, reverse=True)
    return min(
        sum(f * d for f, d in zip(desc, sorted(profile)))
        for profile in depth_profiles(len(desc))
    )


def codebook_cost(codebook: Codebook, freqs) -> int:
    return sum(freqs[i] * len(code) for i, code in codebook.entries.items())


def payload_bitstring(stream) -> str:
    """The payload as a '0'/'1' string, trailing pad bits stripped."""
    bits = "".join(format(byte, "08b") for byte in stream.payload)
    return bits[: stream.payload_bits]


class ScriptedRng:
    """Stands in for random.Random with pre-scripted draws, for exact
    operator tests."""

    def __init__(self, randrange=(), choice=(), random_=(), getrandbits=()):
        self._randrange = list(randrange)
        self._choice = list(choice)
        self._random = list(random_)
        self._getrandbits = list(getrandbits)

    def randrange(self, *args):
        return self._randrange.pop(0)

    def choice(self, seq):
        value = self._choice.pop(0)
        assert value in seq
        return value

    def random(self):
        return self._random.pop(0)

    def getrandbits(self, _n):
        return self._getrandbits.pop(0)
