"""Losslessly hide scanned text documents inside gray-level host images.

The pipeline halftones a gray document page into bits, complements it so
background becomes zeros, isolates the inked regions with a rectangular
quadtree, merges adjacent rectangles, compresses everything into 12-bit
(length, value) tokens, and writes those tokens into the 3 LSBs of
texture-selected host pixels.  Extraction inverts every step exactly.
"""

from .arrays import as_bits, as_gray
from .codec import (
    Payload,
    PayloadError,
    Token,
    decode_stream,
    encode_stream,
    pack_bits,
    parse_payload,
    serialize_payload,
    tokens_to_words,
    unpack_bits,
    words_to_tokens,
)
from .halftone import complement, from_halftone, to_halftone
from .metrics import psnr, rates, ssim_global
from .netpbm import read_pbm, read_pgm, write_pbm, write_pgm
from .quadtree import Decomposition, Rect, content_rects, count_ones, decompose, merge_rects
from .stego import (
    CapacityExceeded,
    EmbedParams,
    HideStats,
    MalformedPayload,
    StegoError,
    capacity_words,
    embed,
    embeddable_mask,
    extract,
    hide_document,
    keystream,
    reveal_document,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityExceeded",
    "Decomposition",
    "EmbedParams",
    "HideStats",
    "MalformedPayload",
    "Payload",
    "PayloadError",
    "Rect",
    "StegoError",
    "Token",
    "as_bits",
    "as_gray",
    "capacity_words",
    "complement",
    "content_rects",
    "count_ones",
    "decode_stream",
    "decompose",
    "embed",
    "embeddable_mask",
    "encode_stream",
    "extract",
    "from_halftone",
    "hide_document",
    "keystream",
    "merge_rects",
    "pack_bits",
    "parse_payload",
    "psnr",
    "rates",
    "read_pbm",
    "read_pgm",
    "reveal_document",
    "serialize_payload",
    "ssim_global",
    "to_halftone",
    "tokens_to_words",
    "unpack_bits",
    "words_to_tokens",
    "write_pbm",
    "write_pgm",
]
