import numpy as np
import pytest

from stegodoc import (
    EmbedParams,
    encode_stream,
    hide_document,
    pack_bits,
    read_pbm,
    read_pgm,
    reveal_document,
    to_halftone,
    unpack_bits,
    write_pbm,
    write_pgm,
)
from stegodoc.cli import main

from synthimages import sparse_doc, textured_host


@pytest.fixture
def workdir(tmp_path):
    host = textured_host(128, 128, 0)
    doc = sparse_doc(48, 64, 1)
    write_pgm(tmp_path / "host.pgm", host)
    write_pgm(tmp_path / "doc.pgm", doc)
    return tmp_path, host, doc


def test_help_exits_zero():
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0


def test_bad_flag_exits_one():
    with pytest.raises(SystemExit) as exc:
        main(["embed", "--no-such-flag"])
    assert exc.value.code == 1


def test_missing_subcommand_exits_one():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_halftone_roundtrip_matches_library(workdir):
    tmp, host, doc = workdir
    assert main(["halftone", "--in", str(tmp / "doc.pgm"), "--out", str(tmp / "doc.pbm")]) == 0
    assert np.array_equal(read_pbm(tmp / "doc.pbm"), to_halftone(doc))
    assert main(["halftone", "--inverse", "--in", str(tmp / "doc.pbm"), "--out", str(tmp / "re.pgm")]) == 0
    assert read_pgm(tmp / "re.pgm").shape == doc.shape


def test_inspect_csv_schema(workdir, capsys):
    tmp, host, doc = workdir
    write_pbm(tmp / "ht.pbm", to_halftone(doc))
    rc = main(["inspect", "--in", str(tmp / "ht.pbm"), "--complement", "--min-length", "4", "--what", "merged"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x,y,w,h,ones_count"
    for line in lines[1:]:
        x, y, w, h, ones = map(int, line.split(","))
        assert w >= 1 and h >= 1 and ones >= 1


def test_cli_embed_extract_equals_library(workdir, capsys):
    tmp, host, doc = workdir
    rc = main([
        "embed", "--host", str(tmp / "host.pgm"), "--doc", str(tmp / "doc.pgm"),
        "--key", "0xDEADBEEF", "--sd-threshold", "2.5", "--min-length", "4",
        "--out", str(tmp / "stego.pgm"), "--stats", "csv",
    ])
    assert rc == 0
    stats_out = capsys.readouterr().out.splitlines()
    assert stats_out[0].startswith("doc_rows,doc_cols,block_count")
    lib_stego, _ = hide_document(host, doc, 0xDEADBEEF, EmbedParams(2.5))
    assert np.array_equal(read_pgm(tmp / "stego.pgm"), lib_stego)

    rc = main([
        "extract", "--stego", str(tmp / "stego.pgm"), "--key", "0xDEADBEEF",
        "--sd-threshold", "2.5",
        "--out-halftone", str(tmp / "out.pbm"), "--out-gray", str(tmp / "out.pgm"),
    ])
    assert rc == 0
    ht, gray = reveal_document(lib_stego, 0xDEADBEEF, EmbedParams(2.5))
    # byte-identical files, not merely equal arrays
    write_pbm(tmp / "lib.pbm", ht)
    assert (tmp / "out.pbm").read_bytes() == (tmp / "lib.pbm").read_bytes()
    assert np.array_equal(read_pgm(tmp / "out.pgm"), gray)
    assert np.array_equal(read_pbm(tmp / "out.pbm"), to_halftone(doc))


def test_env_key_and_flag_precedence(workdir, monkeypatch):
    tmp, host, doc = workdir
    monkeypatch.setenv("STEGODOC_KEY", "42")
    assert main(["embed", "--host", str(tmp / "host.pgm"), "--doc", str(tmp / "doc.pgm"),
                 "--out", str(tmp / "s1.pgm")]) == 0
    lib, _ = hide_document(host, doc, 42, EmbedParams(2.5))
    assert np.array_equal(read_pgm(tmp / "s1.pgm"), lib)
    # flag wins over the environment
    assert main(["embed", "--host", str(tmp / "host.pgm"), "--doc", str(tmp / "doc.pgm"),
                 "--key", "43", "--out", str(tmp / "s2.pgm")]) == 0
    lib43, _ = hide_document(host, doc, 43, EmbedParams(2.5))
    assert np.array_equal(read_pgm(tmp / "s2.pgm"), lib43)


def test_missing_key_exits_one(workdir, monkeypatch, capsys):
    tmp, _, _ = workdir
    monkeypatch.delenv("STEGODOC_KEY", raising=False)
    rc = main(["embed", "--host", str(tmp / "host.pgm"), "--doc", str(tmp / "doc.pgm"),
               "--out", str(tmp / "s.pgm")])
    assert rc == 1


def test_capacity_exit_code(workdir, tmp_path):
    tmp, _, _ = workdir
    tiny = textured_host(16, 16, 3)
    write_pgm(tmp / "tiny.pgm", tiny)
    dense = np.zeros((64, 64), np.uint8)
    dense[::2, ::2] = 255
    write_pgm(tmp / "dense.pgm", dense)
    rc = main(["embed", "--host", str(tmp / "tiny.pgm"), "--doc", str(tmp / "dense.pgm"),
               "--key", "1", "--out", str(tmp / "s.pgm")])
    assert rc == 2


def test_wrong_key_exit_code(workdir):
    tmp, _, _ = workdir
    assert main(["embed", "--host", str(tmp / "host.pgm"), "--doc", str(tmp / "doc.pgm"),
                 "--key", "7", "--out", str(tmp / "s.pgm")]) == 0
    rc = main(["extract", "--stego", str(tmp / "s.pgm"), "--key", "8",
               "--out-halftone", str(tmp / "h.pbm")])
    assert rc == 3


def test_metrics_output(workdir, capsys):
    tmp, host, _ = workdir
    write_pgm(tmp / "h2.pgm", textured_host(128, 128, 9))
    assert main(["metrics", "--ref", str(tmp / "host.pgm"), "--test", str(tmp / "h2.pgm")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "psnr,ssim"
    p, s = lines[1].split(",")
    float(p), float(s)
    assert "." in p and len(p.split(".")[1]) == 4


def test_metrics_undefined_ssim(workdir, capsys):
    tmp, _, _ = workdir
    write_pgm(tmp / "flat.pgm", np.full((16, 16), 80, np.uint8))
    write_pgm(tmp / "flat2.pgm", np.full((16, 16), 81, np.uint8))
    assert main(["metrics", "--ref", str(tmp / "flat.pgm"), "--test", str(tmp / "flat2.pgm")]) == 0
    assert capsys.readouterr().out.strip().splitlines()[1].endswith(",undefined")


def test_codec_file_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    bits = (rng.random(777) < 0.15).astype(np.uint8)
    (tmp_path / "in.bits").write_bytes(pack_bits(bits))
    assert main(["codec", "encode", "--in", str(tmp_path / "in.bits"),
                 "--out", str(tmp_path / "enc.bits")]) == 0
    enc = unpack_bits((tmp_path / "enc.bits").read_bytes())
    toks = encode_stream(bits)
    assert enc.size == 12 * len(toks)
    assert main(["codec", "decode", "--in", str(tmp_path / "enc.bits"),
                 "--out", str(tmp_path / "dec.bits")]) == 0
    assert np.array_equal(unpack_bits((tmp_path / "dec.bits").read_bytes()), bits)


def test_codec_rejects_ragged_stream(tmp_path):
    (tmp_path / "bad.bits").write_bytes(pack_bits(np.ones(13, np.uint8)))
    rc = main(["codec", "decode", "--in", str(tmp_path / "bad.bits"),
               "--out", str(tmp_path / "x.bits")])
    assert rc == 3


def test_auto_sd_retries_until_it_fits(workdir, capsys):
    tmp, host, doc = workdir
    rc = main(["embed", "--host", str(tmp / "host.pgm"), "--doc", str(tmp / "doc.pgm"),
               "--key", "5", "--sd-threshold", "200", "--auto-sd",
               "--out", str(tmp / "s.pgm"), "--stats", "csv"])
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()
    used = float(out[-1].split(",")[6])
    assert used < 200
    # the receiver extracts fine at the threshold auto-sd settled on
    rc = main(["extract", "--stego", str(tmp / "s.pgm"), "--key", "5",
               "--sd-threshold", str(used), "--out-halftone", str(tmp / "h.pbm")])
    assert rc == 0
    assert np.array_equal(read_pbm(tmp / "h.pbm"), to_halftone(doc))


def test_png_input_behind_flag(workdir):
    pil = pytest.importorskip("PIL.Image")
    tmp, host, _ = workdir
    pil.fromarray(host).save(tmp / "host.png")
    assert main(["halftone", "--in", str(tmp / "host.png"),
                 "--out", str(tmp / "h.pbm"), "--png"]) == 0
    assert np.array_equal(read_pbm(tmp / "h.pbm"), to_halftone(host))
    assert main(["halftone", "--in", str(tmp / "host.png"),
                 "--out", str(tmp / "h2.pbm")]) == 1


def test_bench_min_length_sweep(workdir, capsys):
    tmp, _, _ = workdir
    args = ["bench", "--hosts", str(tmp / "host.pgm"), "--docs", str(tmp / "doc.pgm"),
            "--t3", "2.5", "--min-length", "4", "8", "16", "32"]
    assert main(args) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 5
    assert [line.split(",")[3] for line in lines[1:]] == ["4", "8", "16", "32"]
    assert all(",ok,true," in line for line in lines[1:])


def test_bench_empty_inputs_header_only(capsys):
    assert main(["bench"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1
    assert out[0].startswith("host,doc,sd_threshold,min_length,key,status,roundtrip_ok")


def test_bench_records_unreadable_input_as_error(workdir, capsys):
    tmp, _, _ = workdir
    assert main(["bench", "--hosts", str(tmp / "missing.pgm"),
                 "--docs", str(tmp / "doc.pgm"), "--t3", "2.5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    assert ",error,false," in lines[1]


def test_bench_rows_and_failure_recording(workdir, capsys):
    tmp, _, _ = workdir
    tiny = textured_host(16, 16, 4)
    write_pgm(tmp / "tiny.pgm", tiny)
    dense = np.zeros((64, 64), np.uint8)
    dense[::2, ::2] = 255
    write_pgm(tmp / "dense.pgm", dense)
    args = ["bench", "--hosts", str(tmp / "host.pgm"), str(tmp / "tiny.pgm"),
            "--docs", str(tmp / "dense.pgm"), "--t3", "2.5", "--min-length", "4"]
    assert main(args) == 0
    first = capsys.readouterr().out
    lines = first.strip().splitlines()
    assert len(lines) == 3
    by_host = {line.split(",")[0]: line for line in lines[1:]}
    ok_row = by_host[str(tmp / "host.pgm")]
    assert ",ok,true," in ok_row
    assert ",capacity,false," in by_host[str(tmp / "tiny.pgm")]
    # a float field is printed with 4 decimals
    psnr_field = ok_row.split(",")[12]
    assert len(psnr_field.split(".")[1]) == 4
    # the sweep is deterministic
    assert main(args) == 0
    assert capsys.readouterr().out == first
