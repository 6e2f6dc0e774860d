"""Payload layout and the leading-zero-eliding token code.

A payload is a flat MSB-first bit vector: document rows (20 bits),
columns (20 bits), block count (16 bits), then x/y/w/h as 12-bit fields
per block, then every block's contents row-major in block order.

The compressor walks the vector greedily: each token consumes the run of
zeros at the cursor plus up to 6 more bits, capped at 63 bits total, so
its value never exceeds 63.  A token packs into 12 bits as
length(6) || value(6), the unit later embedded into host pixels.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .quadtree import Rect

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal install
    njit = None

MAX_TOKEN_BITS = 63
MAX_TOKEN_VALUE = 63
WORD_BITS = 12
DIM_BITS = 20
COUNT_BITS = 16
COORD_BITS = 12
HEADER_BITS = 2 * DIM_BITS + COUNT_BITS  # 56
BLOCK_BITS = 4 * COORD_BITS  # 48


class PayloadError(ValueError):
    """Malformed, truncated, or overflowing payload data."""


class Token(NamedTuple):
    length: int  # message bits consumed, 0..63
    value: int  # their decimal value, 0..63


@dataclass(eq=False)
class Payload:
    doc_rows: int
    doc_cols: int
    blocks: list  # [Rect]
    contents: np.ndarray  # concatenated block bits

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Payload):
            return NotImplemented
        return (
            self.doc_rows == other.doc_rows
            and self.doc_cols == other.doc_cols
            and list(self.blocks) == list(other.blocks)
            and np.array_equal(self.contents, other.contents)
        )


def _as_bitvec(bits) -> np.ndarray:
    a = np.asarray(bits, dtype=np.uint8).ravel()
    if a.size and a.max() > 1:
        raise PayloadError("bit vector values must be 0 or 1")
    return a


def _append_int(out: list, value: int, width: int) -> None:
    if not 0 <= value < (1 << width):
        raise PayloadError(f"value {value} does not fit in {width} bits")
    for i in range(width - 1, -1, -1):
        out.append((value >> i) & 1)


def _bits_int(bits: np.ndarray) -> int:
    v = 0
    for b in bits.tolist():
        v = (v << 1) | b
    return v


def _check_payload(p: Payload) -> None:
    if not (1 <= p.doc_rows < (1 << DIM_BITS) and 1 <= p.doc_cols < (1 << DIM_BITS)):
        raise PayloadError(f"document dims {p.doc_rows}x{p.doc_cols} out of range")
    if p.block_count >= (1 << COUNT_BITS):
        raise PayloadError(f"too many blocks: {p.block_count}")
    area = 0
    for r in p.blocks:
        if r.w < 1 or r.h < 1:
            raise PayloadError(f"degenerate block {r}")
        if max(r.x, r.y, r.w, r.h) >= (1 << COORD_BITS):
            raise PayloadError(f"block {r} overflows its 12-bit fields")
        if r.x + r.w > p.doc_cols or r.y + r.h > p.doc_rows:
            raise PayloadError(f"block {r} exceeds document bounds")
        area += r.w * r.h
    if p.contents.size != area:
        raise PayloadError(f"contents hold {p.contents.size} bits, blocks cover {area}")


def serialize_payload(p: Payload) -> np.ndarray:
    """Flatten a payload into its MSB-first bit vector."""
    _check_payload(p)
    head = []
    _append_int(head, p.doc_rows, DIM_BITS)
    _append_int(head, p.doc_cols, DIM_BITS)
    _append_int(head, p.block_count, COUNT_BITS)
    for r in p.blocks:
        _append_int(head, r.x, COORD_BITS)
        _append_int(head, r.y, COORD_BITS)
        _append_int(head, r.w, COORD_BITS)
        _append_int(head, r.h, COORD_BITS)
    return np.concatenate([np.array(head, dtype=np.uint8), _as_bitvec(p.contents)])


def parse_payload(bits) -> Payload:
    """Exact inverse of serialize_payload; rejects truncated or oversized input."""
    bits = _as_bitvec(bits)
    if bits.size < HEADER_BITS:
        raise PayloadError("bit vector shorter than the 56-bit header")
    doc_rows = _bits_int(bits[0:DIM_BITS])
    doc_cols = _bits_int(bits[DIM_BITS : 2 * DIM_BITS])
    count = _bits_int(bits[2 * DIM_BITS : HEADER_BITS])
    pos = HEADER_BITS
    if bits.size < pos + count * BLOCK_BITS:
        raise PayloadError("bit vector truncated inside block coordinates")
    blocks = []
    for _ in range(count):
        fields = [_bits_int(bits[pos + i * COORD_BITS : pos + (i + 1) * COORD_BITS]) for i in range(4)]
        blocks.append(Rect(*fields))
        pos += BLOCK_BITS
    area = sum(r.w * r.h for r in blocks)
    if bits.size != pos + area:
        raise PayloadError(f"expected {pos + area} payload bits, got {bits.size}")
    p = Payload(doc_rows, doc_cols, blocks, bits[pos:].copy())
    _check_payload(p)
    return p


def _encode_tokens_impl(bits):
    n = bits.size
    cap = n // 6 + 2
    lengths = np.empty(cap, dtype=np.uint8)
    values = np.empty(cap, dtype=np.uint8)
    count = 0
    pos = 0
    while pos < n:
        rem = n - pos
        z = 0
        # 57 zeros already force the 63-bit cap, no need to scan further
        while z < 57 and z < rem and bits[pos + z] == 0:
            z += 1
        length = z + 6
        if length > 63:
            length = 63
        if length > rem:
            length = rem
        v = 0
        for k in range(pos + z, pos + length):
            v = (v << 1) | bits[k]
        lengths[count] = length
        values[count] = v
        count += 1
        pos += length
    return lengths[:count], values[:count]


def _decode_bits_impl(lengths, values, total):
    out = np.zeros(total, dtype=np.uint8)
    pos = 0
    for i in range(lengths.size):
        length = lengths[i]
        v = values[i]
        j = pos + length - 1
        while v:
            out[j] = v & 1
            v >>= 1
            j -= 1
        pos += length
    return out


if njit is not None:
    _encode_tokens = njit(cache=True)(_encode_tokens_impl)
    _decode_bits = njit(cache=True)(_decode_bits_impl)
else:  # pragma: no cover
    _encode_tokens = _encode_tokens_impl
    _decode_bits = _decode_bits_impl


def encode_stream(bits) -> list:
    """Greedy left-to-right tokenization; token lengths always sum to |bits|."""
    arr = _as_bitvec(bits)
    lengths, values = _encode_tokens(arr)
    return [Token(int(l), int(v)) for l, v in zip(lengths, values)]


def decode_stream(tokens) -> np.ndarray:
    """Expand tokens back into the original bit vector."""
    lengths = np.empty(len(tokens), dtype=np.int64)
    values = np.empty(len(tokens), dtype=np.int64)
    for i, (length, value) in enumerate(tokens):
        if not 0 <= length <= MAX_TOKEN_BITS:
            raise PayloadError(f"token length {length} out of range")
        if not 0 <= value <= MAX_TOKEN_VALUE or value >= (1 << min(length, 6)):
            raise PayloadError(f"token value {value} impossible for length {length}")
        lengths[i] = length
        values[i] = value
    return _decode_bits(lengths, values, int(lengths.sum()))


def tokens_to_words(tokens) -> np.ndarray:
    """Pack tokens into 12-bit words: length(6 MSB-first) || value(6)."""
    words = np.empty(len(tokens), dtype=np.uint16)
    for i, (length, value) in enumerate(tokens):
        if not (0 <= length <= MAX_TOKEN_BITS and 0 <= value <= MAX_TOKEN_VALUE):
            raise PayloadError(f"token ({length}, {value}) out of range")
        words[i] = (length << 6) | value
    return words


def words_to_tokens(words) -> list:
    arr = np.asarray(words, dtype=np.int64).ravel()
    if arr.size and (arr.min() < 0 or arr.max() >= (1 << WORD_BITS)):
        raise PayloadError("words must be 12-bit values")
    return [Token(int(w) >> 6, int(w) & 63) for w in arr]


def pack_bits(bits) -> bytes:
    """Bit-file container: 64-bit big-endian bit count, then bytes MSB-first."""
    arr = _as_bitvec(bits)
    return arr.size.to_bytes(8, "big") + np.packbits(arr).tobytes()


def unpack_bits(data: bytes) -> np.ndarray:
    if len(data) < 8:
        raise PayloadError("bit file shorter than its 64-bit length prefix")
    n = int.from_bytes(data[:8], "big")
    body = data[8:]
    if len(body) != (n + 7) // 8:
        raise PayloadError(f"bit file declares {n} bits but holds {len(body)} bytes")
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    return np.unpackbits(np.frombuffer(body, dtype=np.uint8))[:n].copy()
