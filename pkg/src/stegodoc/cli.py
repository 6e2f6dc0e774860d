"""stegodoc command line: halftone, inspect, embed, extract, metrics, codec, bench.

Exit codes: 0 success, 1 usage or I/O problem, 2 capacity exceeded,
3 corrupted stego or wrong key.
"""

import argparse
import math
import os
import sys

import numpy as np

from .codec import PayloadError, decode_stream, encode_stream, pack_bits, tokens_to_words, unpack_bits, words_to_tokens
from .halftone import complement, from_halftone, to_halftone
from .metrics import psnr, ssim_global
from .netpbm import load_gray, read_pbm, write_pbm, write_pgm
from .quadtree import content_rects, count_ones, decompose, merge_rects
from .stego import (
    CapacityExceeded,
    EmbedParams,
    MalformedPayload,
    hide_document,
    reveal_document,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; we reserve 2 for capacity
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if x is None:
        return "undefined"
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.4f}"


def _resolve_key(args) -> int:
    raw = args.key if args.key is not None else os.environ.get("STEGODOC_KEY")
    if raw is None:
        raise ValueError("no key given: pass --key or set STEGODOC_KEY")
    try:
        key = int(str(raw), 0)
    except ValueError:
        raise ValueError(f"bad key {raw!r}: use a decimal or 0x-prefixed value") from None
    if not 0 <= key < (1 << 64):
        raise ValueError("key must fit in 64 bits")
    return key


def _cmd_halftone(args) -> int:
    if args.inverse:
        write_pgm(args.out, from_halftone(read_pbm(args.infile)))
    else:
        write_pbm(args.out, to_halftone(load_gray(args.infile, args.png)))
    return 0


def _cmd_inspect(args) -> int:
    bits = read_pbm(args.infile)
    ink = complement(bits) if args.complement else bits
    d = decompose(ink, args.min_length, args.threshold)
    rects = d.leaves
    if args.what in ("content", "merged"):
        rects = content_rects(ink, d)
    if args.what == "merged":
        rects = merge_rects(rects, args.merge_order)
    print("x,y,w,h,ones_count")
    for r, ones in zip(rects, count_ones(ink, rects)):
        print(f"{r.x},{r.y},{r.w},{r.h},{ones}")
    return 0


def _embed_stats_csv(stats, sd_threshold) -> str:
    head = (
        "doc_rows,doc_cols,block_count,payload_bits,words,capacity_words,"
        "sd_threshold,embedding_rate_bpp,physical_rate_bpp"
    )
    row = (
        f"{stats.doc_rows},{stats.doc_cols},{stats.block_count},{stats.payload_bits},"
        f"{stats.words},{stats.capacity_words},{_fmt(sd_threshold)},"
        f"{_fmt(stats.embedding_rate_bpp)},{_fmt(stats.physical_rate_bpp)}"
    )
    return head + "\n" + row


def _cmd_embed(args) -> int:
    key = _resolve_key(args)
    host = load_gray(args.host, args.png)
    doc = load_gray(args.doc, args.png)
    thresholds = [args.sd_threshold]
    if args.auto_sd:
        t = args.sd_threshold
        while t > 0:
            t = t / 2 if t / 2 >= 0.25 else 0.0
            thresholds.append(t)
    stego = stats = used = None
    last = None
    for t in thresholds:
        try:
            stego, stats = hide_document(
                host, doc, key, EmbedParams(t), args.min_length, args.merge_order
            )
            used = t
            break
        except CapacityExceeded as exc:
            last = exc
        except PayloadError as exc:
            # a document the payload format cannot describe is a usage
            # problem, not stego corruption
            raise ValueError(str(exc)) from exc
    if stego is None:
        raise last
    if used != args.sd_threshold:
        print(f"auto-sd: embedded at sd-threshold {used} (receiver must use it)", file=sys.stderr)
    write_pgm(args.out, stego)
    if args.stats == "csv":
        print(_embed_stats_csv(stats, used))
    return 0


def _cmd_extract(args) -> int:
    key = _resolve_key(args)
    stego = load_gray(args.stego, args.png)
    halftone, gray = reveal_document(stego, key, EmbedParams(args.sd_threshold))
    if args.out_halftone:
        write_pbm(args.out_halftone, halftone)
    if args.out_gray:
        write_pgm(args.out_gray, gray)
    if args.stats == "csv":
        print("doc_rows,doc_cols")
        print(f"{halftone.shape[0]},{halftone.shape[1]}")
    return 0


def _cmd_metrics(args) -> int:
    ref = load_gray(args.ref, args.png)
    test = load_gray(args.test, args.png)
    print("psnr,ssim")
    print(f"{_fmt(psnr(ref, test))},{_fmt(ssim_global(ref, test))}")
    return 0


def _cmd_codec(args) -> int:
    with open(args.infile, "rb") as fh:
        data = fh.read()
    bits = unpack_bits(data)
    if args.mode == "encode":
        words = tokens_to_words(encode_stream(bits))
        out_bits = np.zeros(12 * words.size, dtype=np.uint8)
        for i in range(12):
            out_bits[i::12] = (words >> (11 - i)) & 1
    else:
        if bits.size % 12:
            raise PayloadError(f"encoded stream of {bits.size} bits is not a whole number of words")
        words = np.zeros(bits.size // 12, dtype=np.uint16)
        for i in range(12):
            words = (words << 1) | bits[i::12]
        out_bits = decode_stream(words_to_tokens(words))
    with open(args.out, "wb") as fh:
        fh.write(pack_bits(out_bits))
    return 0


_BENCH_HEADER = (
    "host,doc,sd_threshold,min_length,key,status,roundtrip_ok,block_count,words,"
    "payload_bits,embedding_rate_bpp,physical_rate_bpp,psnr_db,ssim,doc_psnr_db,doc_ssim"
)


def bench_rows(host_paths, doc_paths, t3_list, minlen_list, allow_png=False):
    """One CSV row per (host, doc, t3, min_length); failures never abort."""
    combos = sorted(
        (h, d, t, m) for h in host_paths for d in doc_paths for t in t3_list for m in minlen_list
    )
    rows = []
    for key, (hpath, dpath, t3, minlen) in enumerate(combos):
        base = f"{hpath},{dpath},{_fmt(t3)},{minlen},{key}"
        try:
            host = load_gray(hpath, allow_png)
            doc = load_gray(dpath, allow_png)
            stego, stats = hide_document(host, doc, key, EmbedParams(t3), minlen)
        except CapacityExceeded:
            rows.append(f"{base},capacity,false,,,,,,,,,")
            continue
        except (OSError, ValueError, PayloadError):
            rows.append(f"{base},error,false,,,,,,,,,")
            continue
        try:
            halftone, gray = reveal_document(stego, key, EmbedParams(t3))
        except MalformedPayload:
            rows.append(f"{base},corrupt,false,,,,,,,,,")
            continue
        ok = bool(np.array_equal(halftone, to_halftone(doc)))
        rows.append(
            f"{base},ok,{str(ok).lower()},{stats.block_count},{stats.words},"
            f"{stats.payload_bits},{_fmt(stats.embedding_rate_bpp)},"
            f"{_fmt(stats.physical_rate_bpp)},{_fmt(psnr(host, stego))},"
            f"{_fmt(ssim_global(host, stego))},{_fmt(psnr(doc, gray))},"
            f"{_fmt(ssim_global(doc, gray))}"
        )
    return rows


def _cmd_bench(args) -> int:
    rows = bench_rows(args.hosts, args.docs, args.t3, args.min_length, args.png)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        print(_BENCH_HEADER, file=out)
        for row in rows:
            print(row, file=out)
    finally:
        if args.out:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stegodoc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("halftone", help="convert a gray page to a halftone (or back)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--inverse", action="store_true", help="PBM halftone -> gray PGM")
    p.add_argument("--png", action="store_true", help="allow non-PGM input")
    p.set_defaults(func=_cmd_halftone)

    p = sub.add_parser("inspect", help="dump quadtree rectangles of a PBM as CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--min-length", type=int, default=4)
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--what", choices=["leaves", "content", "merged"], default="leaves")
    p.add_argument("--merge-order", choices=["vh", "hv"], default="vh")
    p.add_argument(
        "--complement",
        action="store_true",
        help="complement bits first, so ink counts as content",
    )
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("embed", help="hide a document page inside a host image")
    p.add_argument("--host", required=True)
    p.add_argument("--doc", required=True)
    p.add_argument("--key", help="64-bit key, decimal or 0x-hex (or env STEGODOC_KEY)")
    p.add_argument("--sd-threshold", type=float, default=2.5)
    p.add_argument("--min-length", type=int, default=4)
    p.add_argument("--merge-order", choices=["vh", "hv"], default="vh")
    p.add_argument("--out", required=True)
    p.add_argument("--stats", choices=["csv"])
    p.add_argument(
        "--auto-sd",
        action="store_true",
        help="extension: on capacity failure retry with halved thresholds down to 0",
    )
    p.add_argument("--png", action="store_true", help="allow non-PGM input")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("extract", help="recover the hidden document from a stego image")
    p.add_argument("--stego", required=True)
    p.add_argument("--key", help="64-bit key, decimal or 0x-hex (or env STEGODOC_KEY)")
    p.add_argument("--sd-threshold", type=float, default=2.5)
    p.add_argument("--out-halftone", help="write the recovered halftone as PBM")
    p.add_argument("--out-gray", help="write the reconstructed gray page as PGM")
    p.add_argument("--stats", choices=["csv"])
    p.add_argument("--png", action="store_true", help="allow non-PGM input")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("metrics", help="print psnr,ssim between two images")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--png", action="store_true", help="allow non-PGM input")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("codec", help="token-compress or expand a raw bit file")
    p.add_argument("mode", choices=["encode", "decode"])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_codec)

    p = sub.add_parser("bench", help="sweep hosts x docs x thresholds, emit CSV")
    p.add_argument("--hosts", nargs="*", default=[])
    p.add_argument("--docs", nargs="*", default=[])
    p.add_argument("--t3", nargs="+", type=float, default=[0.0, 2.5, 5.0])
    p.add_argument("--min-length", nargs="+", type=int, default=[4])
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--png", action="store_true", help="allow non-PGM input")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityExceeded as exc:
        print(f"stegodoc: {exc}", file=sys.stderr)
        return 2
    except (MalformedPayload, PayloadError) as exc:
        print(f"stegodoc: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"stegodoc: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
