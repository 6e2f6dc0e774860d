"""Texture-guided LSB embedding of 12-bit words and the full document pipeline.

A host pixel is embeddable when the sample standard deviation of its 3x3
neighborhood, computed on the top 5 bits only, exceeds a threshold.  Because
the low 3 bits never feed that test, sender and receiver derive the exact
same pixel set from host and stego alike; that invariance is what makes
extraction lossless.  Each 12-bit word, XOR-masked with a keyed stream, is
spread over the 3 LSBs of four embeddable pixels in raster order.
"""

from dataclasses import dataclass

import numpy as np

from .arrays import as_gray
from .codec import (
    BLOCK_BITS,
    HEADER_BITS,
    Payload,
    PayloadError,
    _bits_int,
    decode_stream,
    encode_stream,
    parse_payload,
    serialize_payload,
    tokens_to_words,
    words_to_tokens,
)
from .halftone import complement, from_halftone, to_halftone
from .metrics import rates
from .quadtree import content_rects, decompose, merge_rects

_MASK64 = (1 << 64) - 1
_ZERO_SEED = 0x9E3779B97F4A7C15
_MIX = 0x2545F4914F6CDD1D

# a revealed document larger than this is treated as a wrong-key artifact
MAX_DOC_PIXELS = 1 << 28


class StegoError(Exception):
    pass


class CapacityExceeded(StegoError):
    def __init__(self, required_words: int, available_words: int):
        super().__init__(
            f"payload needs {required_words} words but the host offers {available_words}"
        )
        self.required_words = required_words
        self.available_words = available_words


class MalformedPayload(StegoError):
    """Extraction produced an inconsistent payload: wrong key or corruption."""


@dataclass(frozen=True)
class EmbedParams:
    sd_threshold: float = 2.5

    def __post_init__(self):
        t = float(self.sd_threshold)
        if not np.isfinite(t) or t < 0:
            raise ValueError(f"sd_threshold must be finite and >= 0, got {t}")


@dataclass
class HideStats:
    doc_rows: int
    doc_cols: int
    block_count: int
    payload_bits: int
    words: int
    capacity_words: int
    embedding_rate_bpp: float
    physical_rate_bpp: float


def keystream(key: int, n: int) -> np.ndarray:
    """Deterministic 12-bit word stream from a shared 64-bit key."""
    state = int(key) & _MASK64
    if state == 0:
        state = _ZERO_SEED
    out = np.empty(n, dtype=np.uint16)
    for i in range(n):
        state ^= (state << 13) & _MASK64
        state ^= state >> 7
        state ^= (state << 17) & _MASK64
        out[i] = ((state * _MIX) & _MASK64) >> 52
    return out


def embeddable_mask(host, params: EmbedParams) -> np.ndarray:
    """Boolean map of pixels whose neighborhood texture admits embedding.

    Depends only on the 5 MSBs of each pixel, so it is unchanged by any
    write to the 3 LSBs.  Border pixels are never embeddable.
    """
    host = as_gray(host)
    if host.shape[0] < 3 or host.shape[1] < 3:
        raise ValueError("host must be at least 3x3")
    f = (host & 0xF8).astype(np.float64)
    rows, cols = host.shape
    s1 = np.zeros((rows - 2, cols - 2))
    s2 = np.zeros((rows - 2, cols - 2))
    for dy in range(3):
        for dx in range(3):
            win = f[dy : dy + rows - 2, dx : dx + cols - 2]
            s1 += win
            s2 += win * win
    var = (s2 - s1 * s1 / 9.0) / 8.0
    sd = np.sqrt(np.maximum(var, 0.0))
    mask = np.zeros(host.shape, dtype=bool)
    mask[1:-1, 1:-1] = sd > params.sd_threshold
    return mask


def _positions(host, params) -> np.ndarray:
    return np.flatnonzero(embeddable_mask(host, params).ravel())


def capacity_words(host, params: EmbedParams) -> int:
    return _positions(host, params).size // 4


def embed(host, words, key: int, params: EmbedParams) -> np.ndarray:
    """Write keyed words into the 3 LSBs of embeddable pixels, 4 pixels per word."""
    host = as_gray(host)
    words = np.asarray(words, dtype=np.uint16).ravel()
    if words.size and words.max() >= 4096:
        raise ValueError("words must be 12-bit values")
    pos = _positions(host, params)
    if 4 * words.size > pos.size:
        raise CapacityExceeded(int(words.size), pos.size // 4)
    out = host.copy()
    if words.size == 0:
        return out
    masked = words ^ keystream(key, words.size)
    triples = np.empty(4 * words.size, dtype=np.uint8)
    triples[0::4] = (masked >> 9) & 7
    triples[1::4] = (masked >> 6) & 7
    triples[2::4] = (masked >> 3) & 7
    triples[3::4] = masked & 7
    flat = out.ravel()
    idx = pos[: triples.size]
    flat[idx] = (flat[idx] & 0xF8) | triples
    return out


def extract(stego, word_count: int, key: int, params: EmbedParams) -> np.ndarray:
    """Read back `word_count` words; exact inverse of embed under the same key."""
    stego = as_gray(stego)
    if word_count < 0:
        raise ValueError("word_count must be >= 0")
    pos = _positions(stego, params)
    if 4 * word_count > pos.size:
        raise CapacityExceeded(word_count, pos.size // 4)
    if word_count == 0:
        return np.zeros(0, dtype=np.uint16)
    triples = (stego.ravel()[pos[: 4 * word_count]] & 7).astype(np.uint16)
    words = (triples[0::4] << 9) | (triples[1::4] << 6) | (triples[2::4] << 3) | triples[3::4]
    return words ^ keystream(key, word_count)


def hide_document(
    host,
    doc,
    key: int,
    params: EmbedParams,
    min_length: int = 4,
    merge_order: str = "vh",
):
    """Run the full pipeline and return (stego image, stats)."""
    host = as_gray(host)
    doc = as_gray(doc)
    if doc.size > MAX_DOC_PIXELS:
        raise ValueError(f"document exceeds {MAX_DOC_PIXELS} pixels")
    ink = complement(to_halftone(doc))
    d = decompose(ink, min_length, threshold=1)
    blocks = merge_rects(content_rects(ink, d), merge_order)
    pieces = [ink[r.y : r.y + r.h, r.x : r.x + r.w].ravel() for r in blocks]
    contents = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.uint8)
    rows, cols = doc.shape
    payload = Payload(rows, cols, blocks, contents)
    bits = serialize_payload(payload)
    words = tokens_to_words(encode_stream(bits))
    stego = embed(host, words, key, params)
    rate, physical = rates(host.shape, doc.shape, words.size)
    stats = HideStats(
        doc_rows=rows,
        doc_cols=cols,
        block_count=len(blocks),
        payload_bits=int(bits.size),
        words=int(words.size),
        capacity_words=capacity_words(host, params),
        embedding_rate_bpp=rate,
        physical_rate_bpp=physical,
    )
    return stego, stats


def reveal_document(stego, key: int, params: EmbedParams):
    """Recover (halftone, approximate gray page) from a stego image.

    Words are consumed only as far as the header-declared bit budget
    requires; any inconsistency raises MalformedPayload, which is the
    expected signal for a wrong key.
    """
    stego = as_gray(stego)
    words = extract(stego, capacity_words(stego, params), key, params)
    # bits available per token are visible in the length field alone, so the
    # exact token count for any bit target is known before decoding; tokens
    # past the payload end are leftover host bits and must never be touched
    cum = np.cumsum((words >> 6).astype(np.int64))
    total_avail = int(cum[-1]) if cum.size else 0
    chunks = []
    state = {"consumed": 0}

    def grow_to(target, what):
        if target > total_avail:
            raise MalformedPayload(f"stego lacks the bits for {what}")
        k = int(np.searchsorted(cum, target, side="left")) + 1
        if k > state["consumed"]:
            try:
                chunks.append(decode_stream(words_to_tokens(words[state["consumed"] : k])))
            except PayloadError as exc:
                raise MalformedPayload(f"undecodable token inside {what}") from exc
            state["consumed"] = k
        buf = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
        chunks[:] = [buf]
        return buf

    buf = grow_to(HEADER_BITS, "the header")
    rows = _bits_int(buf[0:20])
    cols = _bits_int(buf[20:40])
    count = _bits_int(buf[40:56])
    if rows < 1 or cols < 1:
        raise MalformedPayload("document dimensions are zero")
    if rows * cols > MAX_DOC_PIXELS:
        raise MalformedPayload(f"implausible document size {rows}x{cols}")
    coords_end = HEADER_BITS + count * BLOCK_BITS
    buf = grow_to(coords_end, "block coordinates")
    area = 0
    prev = None
    for i in range(count):
        base = HEADER_BITS + i * BLOCK_BITS
        x, y, w, h = (
            _bits_int(buf[base + j * 12 : base + (j + 1) * 12]) for j in range(4)
        )
        if w < 1 or h < 1 or x + w > cols or y + h > rows:
            raise MalformedPayload(f"block {i} out of bounds")
        if prev is not None and (y, x) <= prev:
            raise MalformedPayload("blocks out of raster order")
        prev = (y, x)
        area += w * h
    total = coords_end + area
    buf = grow_to(total, "block contents")
    # the sender never pads, so a genuine payload ends exactly on a token edge
    if int(cum[state["consumed"] - 1]) != total:
        raise MalformedPayload("payload does not end on a token boundary")
    try:
        payload = parse_payload(buf[:total])
    except PayloadError as exc:
        raise MalformedPayload(str(exc)) from exc

    ink = np.zeros((payload.doc_rows, payload.doc_cols), dtype=np.uint8)
    cursor = 0
    for r in payload.blocks:
        n = r.w * r.h
        ink[r.y : r.y + r.h, r.x : r.x + r.w] = payload.contents[cursor : cursor + n].reshape(
            r.h, r.w
        )
        cursor += n
    halftone = complement(ink)
    return halftone, from_halftone(halftone)
