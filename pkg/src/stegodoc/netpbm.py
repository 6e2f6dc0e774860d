"""Binary netpbm I/O: P5 for gray images, P4 for bit images.

P4 stores 1 for black ink while bit images store 1 for white halftone
dots, so pixels are complemented on the way in and out of PBM files.
"""

import numpy as np

from .arrays import as_bits, as_gray


def _header(buf: bytes, magic: bytes, count: int):
    """Parse `count` whitespace-separated integers after the magic, skipping
    comments; returns the values and the raster offset."""
    if not buf.startswith(magic):
        raise ValueError(f"expected {magic.decode()} file")
    i = len(magic)
    values = []
    while len(values) < count:
        while i < len(buf) and buf[i : i + 1].isspace():
            i += 1
        if i < len(buf) and buf[i : i + 1] == b"#":
            while i < len(buf) and buf[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(buf) and not buf[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ValueError("truncated netpbm header")
        try:
            values.append(int(buf[i:j]))
        except ValueError:
            raise ValueError(f"bad netpbm header token {buf[i:j]!r}") from None
        i = j
    # exactly one whitespace byte separates the header from the raster
    if i >= len(buf) or not buf[i : i + 1].isspace():
        raise ValueError("missing raster separator")
    return values, i + 1


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    (w, h, maxval), off = _header(buf, b"P5", 3)
    if w < 1 or h < 1:
        raise ValueError("PGM dimensions must be positive")
    if not 0 < maxval < 256:
        raise ValueError(f"only 8-bit PGM supported, maxval={maxval}")
    raster = buf[off : off + w * h]
    if len(raster) != w * h:
        raise ValueError("PGM raster truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def write_pgm(path, img) -> None:
    img = as_gray(img)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(img.tobytes())


def read_pbm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        buf = fh.read()
    (w, h), off = _header(buf, b"P4", 2)
    if w < 1 or h < 1:
        raise ValueError("PBM dimensions must be positive")
    stride = (w + 7) // 8
    raster = buf[off : off + stride * h]
    if len(raster) != stride * h:
        raise ValueError("PBM raster truncated")
    rows = np.frombuffer(raster, dtype=np.uint8).reshape(h, stride)
    black = np.unpackbits(rows, axis=1)[:, :w]
    return (1 - black).astype(np.uint8)


def write_pbm(path, bits) -> None:
    bits = as_bits(bits)
    h, w = bits.shape
    black = (1 - bits).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P4\n{w} {h}\n".encode())
        fh.write(np.packbits(black, axis=1).tobytes())


def load_gray(path, allow_png: bool = False) -> np.ndarray:
    """Read a gray image; PGM always works, PNG only when enabled."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        return read_pgm(path)
    if not allow_png:
        raise ValueError(f"{path}: not a P5 PGM (pass --png to read other formats)")
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)
