"""Rectangular quadtree decomposition and rectangle merging.

Works on arbitrary (non-square, non-power-of-two) bit images: blocks
split into four floor-half children until they are uniform or too small,
content-bearing leaves are kept, and adjacent rectangles are merged to
cut coordinate overhead.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .arrays import as_bits

# every rectangle coordinate must fit a 12-bit payload field
COORD_LIMIT = 4095


class Rect(NamedTuple):
    x: int  # left column
    y: int  # top row
    w: int
    h: int


@dataclass
class Decomposition:
    image_dims: tuple  # (rows, cols)
    leaves: list  # [Rect], depth-first order


def _integral(img: np.ndarray) -> np.ndarray:
    rows, cols = img.shape
    s = np.zeros((rows + 1, cols + 1), dtype=np.int64)
    s[1:, 1:] = img.cumsum(axis=0, dtype=np.int64).cumsum(axis=1)
    return s


def _ones(s: np.ndarray, r: Rect) -> int:
    return int(s[r.y + r.h, r.x + r.w] - s[r.y, r.x + r.w] - s[r.y + r.h, r.x] + s[r.y, r.x])


def decompose(img, min_length: int, threshold: int = 1) -> Decomposition:
    """Split a bit image into non-decomposable rectangles.

    A block splits while min(w, h) > 2*min_length and its value spread
    (max - min) is at least `threshold`; children are the four floor-half
    quadrants, so odd sizes produce unequal siblings.
    """
    img = as_bits(img)
    if min_length < 1:
        raise ValueError("min_length must be >= 1")
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    rows, cols = img.shape
    s = _integral(img)
    guard = 2 * min_length
    leaves = []
    stack = [Rect(0, 0, cols, rows)]
    while stack:
        r = stack.pop()
        ones = _ones(s, r)
        spread = 0 if ones in (0, r.w * r.h) else 1  # binary image: max - min
        if min(r.w, r.h) > guard and spread >= threshold:
            tm, tn = r.w // 2, r.h // 2
            # pushed in reverse so leaves come out in quadrant order
            stack.append(Rect(r.x + tm, r.y + tn, r.w - tm, r.h - tn))
            stack.append(Rect(r.x, r.y + tn, tm, r.h - tn))
            stack.append(Rect(r.x + tm, r.y, r.w - tm, tn))
            stack.append(Rect(r.x, r.y, tm, tn))
        else:
            leaves.append(r)
    return Decomposition(image_dims=(rows, cols), leaves=leaves)


def content_rects(img, d: Decomposition) -> list:
    """Leaves containing at least one 1-bit, in raster order."""
    img = as_bits(img)
    if (img.shape[0], img.shape[1]) != tuple(d.image_dims):
        raise ValueError("decomposition does not match image dimensions")
    s = _integral(img)
    kept = [r for r in d.leaves if _ones(s, r) > 0]
    kept.sort(key=lambda r: (r.y, r.x))
    return kept


def count_ones(img, rects) -> list:
    """Popcount of each rectangle; used by the inspect CLI."""
    s = _integral(as_bits(img))
    return [_ones(s, r) for r in rects]


def _merge_pass(rects, vertical: bool):
    order = sorted(rects, key=lambda r: (r.y, r.x))
    index = {(r.x, r.y): i for i, r in enumerate(order)}
    consumed = [False] * len(order)
    out = []
    for i, r in enumerate(order):
        if consumed[i]:
            continue
        x, y, w, h = r
        while True:
            key = (x, y + h) if vertical else (x + w, y)
            j = index.get(key)
            if j is None or consumed[j]:
                break
            s = order[j]
            if vertical:
                if s.w != w or h + s.h > COORD_LIMIT:
                    break
                h += s.h
            else:
                if s.h != h or w + s.w > COORD_LIMIT:
                    break
                w += s.w
            consumed[j] = True
        out.append(Rect(x, y, w, h))
    return out


def merge_rects(rects, order: str = "vh") -> list:
    """Merge stacked rectangles of equal width and side-by-side rectangles
    of equal height; repeated until stable, so the result is a fixpoint.

    `order` picks which pass runs first ("vh" or "hv").  Merges that would
    push a side past the 12-bit coordinate limit are skipped.
    """
    if sorted(order) != ["h", "v"]:
        raise ValueError(f"merge order must be 'vh' or 'hv', got {order!r}")
    for r in rects:
        if r.w < 1 or r.h < 1:
            raise ValueError(f"degenerate rectangle {r}")
        if max(r.x, r.y, r.w, r.h) > COORD_LIMIT:
            raise ValueError(f"rectangle {r} exceeds the {COORD_LIMIT} coordinate limit")
    out = list(rects)
    while True:
        before = len(out)
        for p in order:
            out = _merge_pass(out, vertical=(p == "v"))
        if len(out) == before:
            break
    out.sort(key=lambda r: (r.y, r.x))
    return out
