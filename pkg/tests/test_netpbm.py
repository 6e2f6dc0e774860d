import numpy as np
import pytest

from stegodoc import read_pbm, read_pgm, write_pbm, write_pgm
from stegodoc.netpbm import load_gray

from synthimages import textured_host


def test_pgm_roundtrip(tmp_path):
    img = textured_host(37, 61, 0)
    p = tmp_path / "a.pgm"
    write_pgm(p, img)
    assert np.array_equal(read_pgm(p), img)


def test_pgm_header_comments(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_bytes(b"P5\n# a comment\n3 2\n# another\n255\n" + bytes(range(6)))
    img = read_pgm(p)
    assert img.shape == (2, 3)
    assert img[1, 2] == 5


def test_pgm_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.pgm"
    p.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
    with pytest.raises(ValueError):
        read_pgm(p)
    p.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(ValueError):
        read_pgm(p)
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with pytest.raises(ValueError):
        read_pgm(p)


@pytest.mark.parametrize("width", [1, 7, 8, 9, 16, 17])
def test_pbm_roundtrip_odd_widths(tmp_path, width):
    rng = np.random.default_rng(width)
    bits = rng.integers(0, 2, (5, width)).astype(np.uint8)
    p = tmp_path / "b.pbm"
    write_pbm(p, bits)
    assert np.array_equal(read_pbm(p), bits)


def test_pbm_stores_ink_as_one(tmp_path):
    # bit image 1 = white dot, PBM 1 = black ink: bytes must be complemented
    bits = np.array([[1, 1, 1, 1, 0, 0, 0, 0]], dtype=np.uint8)
    p = tmp_path / "pol.pbm"
    write_pbm(p, bits)
    raw = p.read_bytes()
    assert raw.endswith(b"\x0f")


def test_load_gray_dispatch(tmp_path):
    img = textured_host(9, 9, 1)
    p = tmp_path / "x.pgm"
    write_pgm(p, img)
    assert np.array_equal(load_gray(p), img)
    q = tmp_path / "y.dat"
    q.write_bytes(b"not an image")
    with pytest.raises(ValueError):
        load_gray(q)
