"""Bit-exact container format for encoded streams.

Layout (all integers big-endian):

    magic "TCC1" | version u8 | K u16 | L_eff u16 | block_count u64 |
    original_length u64 | MV table | codeword table |
    payload bit length u64 | payload bytes | CRC32 u32 | extensions...

Each MV table entry packs K symbols at 2 bits (00=0, 01=1, 10=U),
MSB-first and zero-padded to a byte boundary.  Each codeword entry is a
length byte followed by that many bits, again byte-padded.  The CRC32
covers every byte before it.  Extension records after the CRC are
length-prefixed (4-byte tag, u32 size, body) so unknown tags and older
readers that stop at the CRC both stay compatible; the only tag written
today is "WDTH" carrying the pattern width as a u64.
"""

from __future__ import annotations

import struct
import zlib

from .bits import BitReader, BitWriter
from .codec import Codebook, EncodedStream, MatchingVector
from .errors import BadMagic, ChecksumMismatch, CorruptHeader, UnsupportedVersion

MAGIC = b"TCC1"
VERSION = 1
_WIDTH_TAG = b"WDTH"

_SYMBOL_CODE = {"0": 0, "1": 1, "U": 2}
_CODE_SYMBOL = {0: "0", 1: "1", 2: "U"}


def _packed_symbols(symbols: str) -> bytes:
    w = BitWriter()
    for ch in symbols:
        w.write_uint(_SYMBOL_CODE[ch], 2)
    return w.getvalue()


def _packed_bitstring(bits: str) -> bytes:
    w = BitWriter()
    w.write_bitstring(bits)
    return w.getvalue()


def write_container(stream: EncodedStream) -> bytes:
    """Serialize a stream; ``read_container`` inverts this byte-exactly."""
    out = bytearray()
    out += struct.pack(
        ">4sBHHQQ",
        MAGIC,
        VERSION,
        stream.k,
        len(stream.mv_table),
        stream.block_count,
        stream.original_length,
    )
    for v in stream.mv_table:
        out += _packed_symbols(v.symbols)
    for pos in range(len(stream.mv_table)):
        code = stream.codebook.codeword(pos)
        if len(code) > 255:
            raise ValueError(f"codeword of {len(code)} bits exceeds the format limit")
        out.append(len(code))
        out += _packed_bitstring(code)
    out += struct.pack(">Q", stream.payload_bits)
    out += stream.payload
    out += struct.pack(">I", zlib.crc32(bytes(out)))
    if stream.pattern_width is not None:
        out += _WIDTH_TAG
        out += struct.pack(">I", 8)
        out += struct.pack(">Q", stream.pattern_width)
    return bytes(out)


class _Cursor:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptHeader(
                f"container truncated at byte {self.pos} (needed {n} more)"
            )
        piece = self.data[self.pos : self.pos + n]
        self.pos += n
        return piece

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def read_container(data: bytes) -> EncodedStream:
    """Parse container bytes back into an EncodedStream.

    Raises BadMagic, UnsupportedVersion, CorruptHeader or
    ChecksumMismatch as appropriate.
    """
    cur = _Cursor(data)
    magic = bytes(cur.take(4))
    if magic != MAGIC:
        raise BadMagic(f"expected {MAGIC!r}, found {magic!r}")
    (version,) = cur.unpack(">B")
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version}")
    k, l_eff, block_count, original_length = cur.unpack(">HHQQ")
    mv_entry_bytes = (2 * k + 7) // 8
    mv_raw = [cur.take(mv_entry_bytes) for _ in range(l_eff)]
    code_raw: list[tuple[int, bytes]] = []
    for _ in range(l_eff):
        (code_len,) = cur.unpack(">B")
        code_raw.append((code_len, cur.take((code_len + 7) // 8)))
    (payload_bits,) = cur.unpack(">Q")
    payload = bytes(cur.take((payload_bits + 7) // 8))
    crc_offset = cur.pos
    (crc_stored,) = cur.unpack(">I")
    if zlib.crc32(data[:crc_offset]) != crc_stored:
        raise ChecksumMismatch("container checksum does not match its contents")

    pattern_width = None
    while cur.pos < len(data):
        tag = bytes(cur.take(4))
        (size,) = cur.unpack(">I")
        body = cur.take(size)
        if tag == _WIDTH_TAG:
            if size != 8:
                raise CorruptHeader(f"width extension has size {size}, expected 8")
            (pattern_width,) = struct.unpack(">Q", body)

    try:
        mv_table = []
        for raw in mv_raw:
            reader = BitReader(raw)
            symbols = []
            for _ in range(k):
                code = reader.read_uint(2)
                if code not in _CODE_SYMBOL:
                    raise CorruptHeader(f"invalid 2-bit symbol {code:02b} in MV table")
                symbols.append(_CODE_SYMBOL[code])
            mv_table.append(MatchingVector("".join(symbols)))
        entries = {}
        for pos, (code_len, raw) in enumerate(code_raw):
            reader = BitReader(raw)
            entries[pos] = "".join("01"[reader.read_bit()] for _ in range(code_len))
        return EncodedStream(
            payload=payload,
            payload_bits=payload_bits,
            block_count=block_count,
            k=k,
            mv_table=tuple(mv_table),
            codebook=Codebook(entries),
            original_length=original_length,
            pattern_width=pattern_width,
        )
    except CorruptHeader:
        raise
    except (ValueError, KeyError) as exc:
        raise CorruptHeader(f"container contents invalid: {exc}") from None
