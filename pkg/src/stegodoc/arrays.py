"""Array conventions shared by every module.

Gray images are non-empty 2-D uint8 arrays (intensities 0..255).
Bit images are non-empty 2-D uint8 arrays over {0, 1}; by convention
a halftone stores 1 for white, so a complemented page stores 1 for ink.
"""

import numpy as np


def as_gray(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("gray image must be a non-empty 2-D array")
    if a.dtype == np.uint8:
        return a
    if not np.issubdtype(a.dtype, np.integer):
        raise ValueError(f"gray image must hold integers, got {a.dtype}")
    if a.size and (a.min() < 0 or a.max() > 255):
        raise ValueError("gray values must lie in [0, 255]")
    return a.astype(np.uint8)


def as_bits(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("bit image must be a non-empty 2-D array")
    if not np.issubdtype(a.dtype, np.integer) and a.dtype != np.bool_:
        raise ValueError(f"bit image must hold integers, got {a.dtype}")
    a = a.astype(np.uint8)
    if a.size and a.max() > 1:
        raise ValueError("bit image values must be 0 or 1")
    return a
