"""Matching semantics, greedy covering, Huffman coding, encode/decode.

An input block over {0,1,X} matches a vector over {0,1,U} when no
position pairs a specified 0 with a specified 1.  Each block is encoded
as the codeword of its assigned vector followed by the block's bits at
the vector's U positions, so the per-block cost is |codeword| + N_U.

Matching is implemented on bitmask pairs (ones, zeros): a block and a
vector conflict iff the block's ones overlap the vector's zeros or vice
versa.  Covering deduplicates the block sequence first and, for block
lengths up to 64, runs the per-vector match as a vectorized numpy pass
over the unique blocks.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bits import BitReader, BitWriter
from .core import InputBlock
from .errors import (
    AllZeroFrequencies,
    DanglingBits,
    LengthMismatch,
    NoCodeword,
    NotMatching,
    UnknownCodeword,
    UnmatchedBlock,
    ZeroOriginal,
)

_MV_ONES = str.maketrans("01U", "010")
_MV_ZEROS = str.maketrans("01U", "100")
_BLOCK_ONES = str.maketrans("01X", "010")
_BLOCK_ZEROS = str.maketrans("01X", "100")

# Largest block length that fits the numpy uint64 fast path.
_NUMPY_MAX_K = 64

FILL_CHOICES = ("zero", "one", "random")


def mv_masks(symbols: str) -> tuple[int, int]:
    """(ones, zeros) bitmasks of a vector; leftmost symbol is the top bit."""
    return int(symbols.translate(_MV_ONES), 2), int(symbols.translate(_MV_ZEROS), 2)


def block_masks(symbols: str) -> tuple[int, int]:
    """(ones, zeros) bitmasks of a block; X sets neither mask."""
    return (
        int(symbols.translate(_BLOCK_ONES), 2),
        int(symbols.translate(_BLOCK_ZEROS), 2),
    )


@dataclass(frozen=True)
class MatchingVector:
    """A fixed-length pattern over {0,1,U}; U positions take explicit fill bits."""

    symbols: str
    n_unspecified: int = field(init=False, compare=False)
    u_positions: tuple[int, ...] = field(init=False, compare=False)
    ones_mask: int = field(init=False, compare=False)
    zeros_mask: int = field(init=False, compare=False)

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("matching vector must not be empty")
        for ch in self.symbols:
            if ch not in "01U":
                raise ValueError(f"illegal vector symbol {ch!r}")
        u_pos = tuple(i for i, ch in enumerate(self.symbols) if ch == "U")
        ones, zeros = mv_masks(self.symbols)
        object.__setattr__(self, "n_unspecified", len(u_pos))
        object.__setattr__(self, "u_positions", u_pos)
        object.__setattr__(self, "ones_mask", ones)
        object.__setattr__(self, "zeros_mask", zeros)

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class Covering:
    """Per-block vector assignment plus per-vector frequencies of use."""

    assignment: tuple[int, ...]
    frequencies: tuple[int, ...]

    def __post_init__(self):
        if sum(self.frequencies) != len(self.assignment):
            raise ValueError("frequencies do not sum to the block count")


@dataclass(frozen=True, eq=True)
class Codebook:
    """Prefix-free map from vector index to codeword bitstring.

    Only vectors with nonzero frequency hold entries; a lone entry may
    be the empty codeword.
    """

    entries: dict[int, str]

    def __post_init__(self):
        codes = sorted(self.entries.values())
        for a, b in zip(codes, codes[1:]):
            if b.startswith(a):
                raise ValueError(f"codebook is not prefix-free: {a!r}, {b!r}")

    def codeword(self, index: int) -> str:
        try:
            return self.entries[index]
        except KeyError:
            raise NoCodeword(f"vector {index} has no codeword") from None

    def lengths(self) -> dict[int, int]:
        return {i: len(c) for i, c in self.entries.items()}

    def kraft_sum(self) -> float:
        return sum(2.0 ** -len(c) for c in self.entries.values())

    def __contains__(self, index: int) -> bool:
        return index in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class EncodedStream:
    """A compressed block sequence plus everything needed to decode it.

    ``mv_table`` lists only the vectors that hold codewords; ``codebook``
    is indexed by table position.  ``original_length`` is the unpadded
    symbol count the decoder must trim to.
    """

    payload: bytes
    payload_bits: int
    block_count: int
    k: int
    mv_table: tuple[MatchingVector, ...]
    codebook: Codebook
    original_length: int
    pattern_width: int | None = None

    def __post_init__(self):
        if len(self.payload) != (self.payload_bits + 7) // 8:
            raise ValueError("payload byte count disagrees with payload_bits")
        if self.original_length > self.block_count * self.k:
            raise ValueError("original_length exceeds the decoded size")
        for index in self.codebook.entries:
            if not 0 <= index < len(self.mv_table):
                raise ValueError(f"codebook entry {index} outside the MV table")


def matches(v: MatchingVector, ib: InputBlock) -> bool:
    """True iff no position pairs a 0 with a 1; X and U match anything."""
    if len(v.symbols) != len(ib.symbols):
        raise LengthMismatch(
            f"vector length {len(v.symbols)} vs block length {len(ib.symbols)}"
        )
    ones, zeros = block_masks(ib.symbols)
    return (v.ones_mask & zeros) == 0 and (v.zeros_mask & ones) == 0


class BlockStats:
    """Deduplicated mask view of a block sequence, shared by many coverings.

    Building the stats once and covering many vector sets against them is
    the hot path of the evolutionary search.
    """

    __slots__ = ("k", "total", "n_unique", "ones", "zeros", "counts",
                 "first_index", "inverse", "vectorized")

    def __init__(self, blocks: Sequence[InputBlock]):
        if blocks:
            self.k = len(blocks[0].symbols)
        else:
            self.k = 0
        uid: dict[str, int] = {}
        ones: list[int] = []
        zeros: list[int] = []
        counts: list[int] = []
        first: list[int] = []
        inverse: list[int] = []
        for pos, block in enumerate(blocks):
            if len(block.symbols) != self.k:
                raise LengthMismatch("blocks differ in length")
            u = uid.get(block.symbols)
            if u is None:
                u = len(uid)
                uid[block.symbols] = u
                o, z = block_masks(block.symbols)
                ones.append(o)
                zeros.append(z)
                counts.append(0)
                first.append(block.index)
            counts[u] += 1
            inverse.append(u)
        self.total = len(blocks)
        self.n_unique = len(uid)
        self.vectorized = 0 < self.k <= _NUMPY_MAX_K
        if self.vectorized:
            self.ones = np.array(ones, dtype=np.uint64)
            self.zeros = np.array(zeros, dtype=np.uint64)
            self.counts = np.array(counts, dtype=np.int64)
            self.first_index = np.array(first, dtype=np.int64)
            self.inverse = np.array(inverse, dtype=np.int64)
        else:
            self.ones = tuple(ones)
            self.zeros = tuple(zeros)
            self.counts = tuple(counts)
            self.first_index = tuple(first)
            self.inverse = tuple(inverse)


def as_block_stats(blocks: Sequence[InputBlock] | BlockStats) -> BlockStats:
    return blocks if isinstance(blocks, BlockStats) else BlockStats(blocks)


def _match_order(n_unspecified: Sequence[int]) -> list[int]:
    """Vector indices sorted by rising U count, ties keeping input order."""
    return sorted(range(len(n_unspecified)), key=n_unspecified.__getitem__)


def match_frequencies(
    stats: BlockStats,
    ones: Sequence[int],
    zeros: Sequence[int],
    n_unspecified: Sequence[int],
) -> tuple[list[int], list[int], int, int]:
    """Assign every block to its first matching vector in rising-U order.

    Returns (frequencies, per-unique assigned vector index with -1 for
    unmatched, unmatched block count, 1-based index of the first
    unmatched block or 0).
    """
    order = _match_order(n_unspecified)
    freqs = [0] * len(ones)
    if stats.n_unique == 0:
        return freqs, [], 0, 0
    if stats.vectorized:
        unassigned = np.ones(stats.n_unique, dtype=bool)
        assign = np.full(stats.n_unique, -1, dtype=np.int64)
        for idx in order:
            hit = (
                ((stats.ones & np.uint64(zeros[idx])) == 0)
                & ((stats.zeros & np.uint64(ones[idx])) == 0)
                & unassigned
            )
            freq = int(stats.counts[hit].sum())
            if freq:
                freqs[idx] = freq
                assign[hit] = idx
                unassigned &= ~hit
                if not unassigned.any():
                    break
        if unassigned.any():
            unmatched = int(stats.counts[unassigned].sum())
            first = int(stats.first_index[unassigned].min())
        else:
            unmatched, first = 0, 0
        return freqs, assign.tolist(), unmatched, first
    assign_py = [-1] * stats.n_unique
    unmatched = 0
    first = 0
    for u in range(stats.n_unique):
        b_ones, b_zeros = stats.ones[u], stats.zeros[u]
        for idx in order:
            if (ones[idx] & b_zeros) == 0 and (zeros[idx] & b_ones) == 0:
                assign_py[u] = idx
                freqs[idx] += stats.counts[u]
                break
        else:
            unmatched += stats.counts[u]
            if first == 0 or stats.first_index[u] < first:
                first = stats.first_index[u]
    return freqs, assign_py, unmatched, first


def cover(
    blocks: Sequence[InputBlock] | BlockStats,
    mvs: Sequence[MatchingVector],
) -> Covering:
    """Greedy covering: vectors sorted by rising U count, first match wins.

    Raises UnmatchedBlock (with the 1-based block index) when some block
    matches no vector at all.
    """
    stats = as_block_stats(blocks)
    for v in mvs:
        if stats.k and len(v.symbols) != stats.k:
            raise LengthMismatch(
                f"vector length {len(v.symbols)} vs block length {stats.k}"
            )
    freqs, assign, unmatched, first = match_frequencies(
        stats,
        [v.ones_mask for v in mvs],
        [v.zeros_mask for v in mvs],
        [v.n_unspecified for v in mvs],
    )
    if unmatched:
        raise UnmatchedBlock(first)
    if stats.vectorized:
        assignment = tuple(np.asarray(assign)[stats.inverse].tolist())
    else:
        assignment = tuple(assign[u] for u in stats.inverse)
    return Covering(assignment, tuple(freqs))


def huffman_code_lengths(frequencies: Sequence[int]) -> dict[int, int]:
    """Optimal codeword length per nonzero-frequency index.

    Deterministic: the merge queue orders by (weight, earliest index
    contained in the subtree).  A single coded index gets length 0.
    """
    live = [(f, i) for i, f in enumerate(frequencies) if f > 0]
    if not live:
        raise AllZeroFrequencies("every frequency is zero")
    if len(live) == 1:
        return {live[0][1]: 0}
    heap = [(f, i, i) for f, i in live]
    children: dict[int, tuple[int, int]] = {}
    next_id = len(frequencies)
    heapq.heapify(heap)
    while len(heap) > 1:
        fa, ea, a = heapq.heappop(heap)
        fb, eb, b = heapq.heappop(heap)
        children[next_id] = (a, b)
        heapq.heappush(heap, (fa + fb, min(ea, eb), next_id))
        next_id += 1
    root = heap[0][2]
    lengths: dict[int, int] = {}
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        pair = children.get(node)
        if pair is None:
            lengths[node] = depth
        else:
            stack.append((pair[0], depth + 1))
            stack.append((pair[1], depth + 1))
    return lengths


def build_huffman(frequencies: Sequence[int]) -> Codebook:
    """Canonical Huffman codebook: codewords assigned in (length, index) order."""
    lengths = huffman_code_lengths(frequencies)
    order = sorted(lengths, key=lambda i: (lengths[i], i))
    entries: dict[int, str] = {}
    code = 0
    prev_len = lengths[order[0]]
    for index in order:
        length = lengths[index]
        code <<= length - prev_len
        entries[index] = format(code, f"0{length}b") if length else ""
        code += 1
        prev_len = length
    return Codebook(entries)


def encoding_length(v: MatchingVector, codebook: Codebook, index: int) -> int:
    """Bits needed for any block assigned to ``v``: |codeword| + N_U."""
    return len(codebook.codeword(index)) + v.n_unspecified


def _fill_bit(ch: str, fill: str, rng: random.Random | None) -> str:
    if ch != "X":
        return ch
    if fill == "zero":
        return "0"
    if fill == "one":
        return "1"
    if fill == "random":
        if rng is None:
            raise ValueError("random fill requires an rng")
        return "01"[rng.getrandbits(1)]
    raise ValueError(f"unknown fill policy {fill!r}")


def encode_block(
    ib: InputBlock,
    v: MatchingVector,
    codebook: Codebook,
    index: int,
    fill: str = "zero",
    rng: random.Random | None = None,
) -> str:
    """Codeword of ``v`` followed by the block's bits at the U positions.

    An X at a U position is resolved by the fill policy (default '0').
    """
    if not matches(v, ib):
        raise NotMatching(f"vector {v.symbols} does not match block {ib.symbols}")
    code = codebook.codeword(index)
    fills = "".join(_fill_bit(ib.symbols[p], fill, rng) for p in v.u_positions)
    return code + fills


def encode_all(
    blocks: Sequence[InputBlock],
    covering: Covering,
    codebook: Codebook,
    mvs: Sequence[MatchingVector],
    fill: str = "zero",
    rng: random.Random | None = None,
    original_length: int | None = None,
    pattern_width: int | None = None,
) -> EncodedStream:
    """Concatenate per-block encodings into a packed payload stream."""
    if len(blocks) != len(covering.assignment):
        raise ValueError(
            f"covering assigns {len(covering.assignment)} blocks, got {len(blocks)}"
        )
    k = len(mvs[0].symbols) if mvs else 0
    table_indices = sorted(codebook.entries)
    remap = {orig: pos for pos, orig in enumerate(table_indices)}
    writer = BitWriter()
    for block, v_idx in zip(blocks, covering.assignment):
        writer.write_bitstring(
            encode_block(block, mvs[v_idx], codebook, v_idx, fill=fill, rng=rng)
        )
    if original_length is None:
        original_length = len(blocks) * k
    return EncodedStream(
        payload=writer.getvalue(),
        payload_bits=writer.bit_length,
        block_count=len(blocks),
        k=k,
        mv_table=tuple(mvs[i] for i in table_indices),
        codebook=Codebook({remap[i]: c for i, c in codebook.entries.items()}),
        original_length=original_length,
        pattern_width=pattern_width,
    )


def decode(stream: EncodedStream) -> str:
    """Reconstruct the fully specified bit string of ``original_length`` bits.

    Walks the payload bit-serially: each codeword names a vector, whose U
    positions are then filled from the next N_U payload bits.
    """
    table = {
        (len(code), int(code, 2) if code else 0): pos
        for pos, code in stream.codebook.entries.items()
    }
    max_len = max((ln for ln, _ in table), default=0)
    reader = BitReader(stream.payload, stream.payload_bits)
    out: list[str] = []
    for _ in range(stream.block_count):
        length, acc = 0, 0
        while (length, acc) not in table:
            if length >= max_len:
                raise UnknownCodeword(
                    f"no codeword matches payload prefix of {length} bits"
                )
            acc = (acc << 1) | reader.read_bit()
            length += 1
        v = stream.mv_table[table[(length, acc)]]
        symbols = list(v.symbols)
        for p in v.u_positions:
            symbols[p] = "01"[reader.read_bit()]
        out.append("".join(symbols))
    if reader.bits_remaining:
        raise DanglingBits(f"{reader.bits_remaining} undecoded payload bits")
    return "".join(out)[: stream.original_length]


def compression_rate(original_bits: int, payload_bits: int) -> float:
    """Percentage saved: 100 * (original - payload) / original; may be negative."""
    if original_bits <= 0:
        raise ZeroOriginal("original size must be positive")
    return 100.0 * (original_bits - payload_bits) / original_bits


def payload_bits_for(
    frequencies: Sequence[int], n_unspecified: Sequence[int]
) -> int:
    """Total payload size for a covering: sum of F * (|codeword| + N_U)."""
    lengths = huffman_code_lengths(frequencies)
    return sum(
        frequencies[i] * (length + n_unspecified[i])
        for i, length in lengths.items()
    )


def subsumes(wider: MatchingVector, narrower: MatchingVector) -> bool:
    """True iff every block the narrower vector matches, the wider one matches too.

    Holds exactly when each specified position of ``wider`` is specified
    identically in ``narrower``.
    """
    return (
        (wider.ones_mask & ~narrower.ones_mask) == 0
        and (wider.zeros_mask & ~narrower.zeros_mask) == 0
    )


def merge_subsumed_frequencies(
    frequencies: Sequence[int],
    ones: Sequence[int],
    zeros: Sequence[int],
    n_unspecified: Sequence[int],
) -> tuple[list[int], dict[int, int]]:
    """Greedy frequency merge: drop vector j into a subsuming vector i when
    the total payload (with fresh Huffman lengths) strictly shrinks.

    Candidate pairs are scanned by rising (j, i); every accepted drop
    restarts the scan, so the result is a deterministic fixed point.
    Returns the merged frequencies and the {dropped: absorber} map.
    """
    freqs = list(frequencies)
    n = len(freqs)
    redirect: dict[int, int] = {}
    if not any(freqs):
        return freqs, redirect
    current = payload_bits_for(freqs, n_unspecified)
    improved = True
    while improved:
        improved = False
        for j in range(n):
            if freqs[j] == 0:
                continue
            for i in range(n):
                if i == j:
                    continue
                if (ones[i] & ~ones[j]) or (zeros[i] & ~zeros[j]):
                    continue
                candidate = list(freqs)
                candidate[i] += candidate[j]
                candidate[j] = 0
                cost = payload_bits_for(candidate, n_unspecified)
                if cost < current:
                    freqs = candidate
                    current = cost
                    redirect[j] = i
                    improved = True
                    break
            if improved:
                break
    resolved = {}
    for j in redirect:
        target = redirect[j]
        while target in redirect:
            target = redirect[target]
        resolved[j] = target
    return freqs, resolved


def subsume_merge(
    covering: Covering,
    mvs: Sequence[MatchingVector],
    k: int,
) -> tuple[Covering, tuple[MatchingVector, ...]]:
    """Optional post-pass over a covering: fold vectors whose blocks are all
    matched by a wider vector, whenever that lowers the payload size.
    """
    for v in mvs:
        if len(v.symbols) != k:
            raise LengthMismatch(f"vector length {len(v.symbols)} != {k}")
    freqs, redirect = merge_subsumed_frequencies(
        covering.frequencies,
        [v.ones_mask for v in mvs],
        [v.zeros_mask for v in mvs],
        [v.n_unspecified for v in mvs],
    )
    if not redirect:
        return covering, tuple(
            mvs[i] for i, f in enumerate(covering.frequencies) if f > 0
        )
    assignment = tuple(redirect.get(i, i) for i in covering.assignment)
    merged = Covering(assignment, tuple(freqs))
    effective = tuple(mvs[i] for i, f in enumerate(freqs) if f > 0)
    return merged, effective
