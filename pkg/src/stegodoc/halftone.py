"""Halftoning of gray document pages and its approximate inverse.

Forward direction: Floyd-Steinberg error diffusion, threshold 128,
weights 7/16, 3/16, 5/16, 1/16, plain raster scan (no serpentine).
Inverse direction: 3x3 Gaussian (sigma 0.5) low-pass, edge-replicated
borders, scaled back to 0..255.
"""

import numpy as np

from .arrays import as_bits, as_gray

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal install
    njit = None


def _diffuse_impl(work, out):
    rows, cols = work.shape
    for y in range(rows):
        for x in range(cols):
            v = work[y, x]
            b = 1 if v >= 128.0 else 0
            out[y, x] = b
            err = v - 255.0 * b
            # error falling outside the image is dropped
            if x + 1 < cols:
                work[y, x + 1] += err * 7 / 16
            if y + 1 < rows:
                if x > 0:
                    work[y + 1, x - 1] += err * 3 / 16
                work[y + 1, x] += err * 5 / 16
                if x + 1 < cols:
                    work[y + 1, x + 1] += err * 1 / 16
    return out


_diffuse = njit(cache=True)(_diffuse_impl) if njit is not None else _diffuse_impl


def to_halftone(doc) -> np.ndarray:
    """Convert a gray page to a {0,1} halftone of the same shape."""
    doc = as_gray(doc)
    work = doc.astype(np.float64)
    out = np.zeros(doc.shape, dtype=np.uint8)
    return _diffuse(work, out)


def _gaussian_kernel(sigma: float = 0.5) -> np.ndarray:
    ax = np.array([-1.0, 0.0, 1.0])
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


_KERNEL = _gaussian_kernel()


def from_halftone(ht) -> np.ndarray:
    """Reconstruct an approximate gray page from a halftone."""
    b = as_bits(ht).astype(np.float64)
    padded = np.pad(b, 1, mode="edge")
    rows, cols = b.shape
    acc = np.zeros_like(b)
    for dy in range(3):
        for dx in range(3):
            acc += _KERNEL[dy, dx] * padded[dy : dy + rows, dx : dx + cols]
    return np.clip(np.rint(255.0 * acc), 0, 255).astype(np.uint8)


def complement(b) -> np.ndarray:
    """Flip every bit; turns a mostly-white halftone into a sparse ink map."""
    return (1 - as_bits(b)).astype(np.uint8)
