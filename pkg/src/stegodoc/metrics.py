"""Image quality and capacity measurements.

PSNR uses the first image's maximum squared pixel as the signal term, not
a fixed 255^2, so it is deliberately asymmetric in its arguments.  SSIM is
the bare three-term product (correlation, luminance, contrast) over the
whole image with sample statistics; with no stabilizing constants it is
undefined for constant images and None is returned in that case.
"""

import math

import numpy as np

from .arrays import as_gray


def psnr(a, b) -> float:
    a = as_gray(a)
    b = as_gray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a.astype(np.float64) - b.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    peak = float(int(a.max())) ** 2
    if peak == 0.0:
        return -math.inf
    return 10.0 * math.log10(peak / mse)


def ssim_global(a, b):
    """Whole-image SSIM; returns None when either image has zero variance."""
    a = as_gray(a)
    b = as_gray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    x = a.astype(np.float64).ravel()
    y = b.astype(np.float64).ravel()
    n = x.size
    if n < 2:
        return None
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    dy = y - ym
    vx = float(dx @ dx) / (n - 1)
    vy = float(dy @ dy) / (n - 1)
    if vx == 0.0 or vy == 0.0:
        return None
    cov = float(dx @ dy) / (n - 1)
    sx = math.sqrt(vx)
    sy = math.sqrt(vy)
    correlation = cov / (sx * sy)
    luminance = 2.0 * xm * ym / (xm * xm + ym * ym)
    contrast = 2.0 * sx * sy / (vx + vy)
    return correlation * luminance * contrast


def rates(host_dims, doc_dims, words: int):
    """(document bits per host pixel, physically written bits per host pixel)."""
    hr, hc = host_dims
    dr, dc = doc_dims
    if hr < 1 or hc < 1 or dr < 1 or dc < 1:
        raise ValueError("dimensions must be positive")
    if words < 0:
        raise ValueError("word count must be >= 0")
    pixels = hr * hc
    return dr * dc / pixels, 12.0 * words / pixels
