"""Command-line front end: ``vgc <command> [options]``.

Data goes to stdout (or ``--output``); progress and diagnostics go to
stderr so piped CSV stays clean.  Option values fall back to ``VGC_*``
environment variables, then to built-in defaults.
"""
from __future__ import annotations

import argparse
import dataclasses
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import comet, gkc, partition, predictor, store
from .errors import VGCError
from .iprime import IPrimeSet, build_chain, stream_chain_counts
from .scanner import (
    DEFAULT_CHUNK,
    KNOWN_LIMITS,
    ExceptionReport,
    default_workers,
    emit_sequence,
    format_sequence,
    parse_limit,
    read_checkpoint,
    resume_scan,
    scan,
)
from .sieve import DEFAULT_MATERIALIZE_THRESHOLD, sieve

DEDUP_NOTE = "unordered-pair"


def _limit(text: str) -> int:
    try:
        return parse_limit(text)
    except VGCError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive(text: str) -> int:
    value = _limit(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _variant(text: str) -> str:
    try:
        return gkc.get_variant(text).name
    except VGCError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _data_dir(args) -> Optional[Path]:
    value = args.data_dir or os.environ.get("VGC_DATA_DIR")
    return Path(value) if value else None


def _progress(hi: int, limit: int) -> None:
    print(f"\rscanned to {hi:,} of {limit:,} ({100 * hi / limit:5.1f}%)", end="", file=sys.stderr)
    if hi >= limit:
        print(file=sys.stderr)


def load_chain(max_order: int, limit: int, data_dir: Optional[Path] = None) -> list[IPrimeSet]:
    """Chain of orders 0..max_order up to ``limit``, from stored files when possible."""
    if data_dir is not None and data_dir.is_dir():
        chain = []
        for order in range(max_order + 1):
            candidates = sorted(data_dir.glob(f"{order}_Px_up_to_*.bin"))
            best = None
            for path in candidates:
                s = store.load(path)
                if s.limit >= limit and (best is None or s.limit < best.limit):
                    best = s
            if best is None:
                break
            cut = best.elements[: np.searchsorted(best.elements, limit, side="right")]
            chain.append(IPrimeSet(order=order, limit=limit, elements=cut))
        else:
            return chain
    chain = build_chain(sieve(max(limit, 2)), max_order, max(limit, 2))
    # high orders can be empty at small limits; scans then report every 2n
    while len(chain) <= max_order:
        chain.append(IPrimeSet(order=len(chain), limit=chain[0].limit, elements=np.zeros(0)))
    return chain


def _emit(text: str, args) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def cmd_sieve(args) -> int:
    t = sieve(args.limit, materialize_threshold=args.threshold)
    info = {"limit": t.limit, "count": t.count, "largest": int(t.primes[-1])}
    if args.format == "json":
        _emit(json.dumps(info) + "\n", args)
    elif args.format == "csv":
        _emit(_csv([[info["limit"], info["count"], info["largest"]]], ["limit", "count", "largest"]), args)
    else:
        _emit(f"primes up to {t.limit}: {t.count} (largest {info['largest']})\n", args)
    return 0


def cmd_lift(args) -> int:
    save_dir = Path(args.save) if args.save else None
    if save_dir is not None:
        save_dir.mkdir(parents=True, exist_ok=True)
    if args.limit > args.threshold:
        writers = {}

        def sink(order, block):
            if save_dir is None:
                return
            if order not in writers:
                writers[order] = store.IPrimeFileWriter(
                    save_dir / store.file_name(order, args.limit), order, args.limit
                )
            writers[order].write(block)

        counts = stream_chain_counts(args.max_order, args.limit, sink)
        for w in writers.values():
            w.close()
    else:
        chain = build_chain(sieve(args.limit), args.max_order, args.limit)
        counts = [len(s) for s in chain]
        if save_dir is not None:
            for s in chain:
                store.save(s, save_dir / store.file_name(s.order, s.limit))
    rows = [[i, c] for i, c in enumerate(counts)]
    if args.format == "json":
        _emit(json.dumps({"limit": args.limit, "counts": counts}) + "\n", args)
    elif args.format == "csv":
        _emit(_csv(rows, ["order", "count"]), args)
    else:
        _emit("".join(f"{i}-primes up to {args.limit}: {c}\n" for i, c in rows), args)
    return 0


def _report_text(r: ExceptionReport) -> str:
    name = r.variant or f"(a,b)=({r.order_pair[0]},{r.order_pair[1]})"
    lines = [
        f"scan {name} up to 2n={r.scanned_to}",
        f"complete: {'yes' if r.complete else 'no'}",
        f"exception count: {len(r.exceptions)}",
        f"candidate_L: {r.candidate_L} (verified up to n={r.scanned_to // 2})",
        "exceptions: " + " ".join(map(str, r.exceptions)),
    ]
    return "\n".join(lines) + "\n"


def _render_report(r: ExceptionReport, args) -> str:
    if args.format == "json":
        return json.dumps(r.to_dict()) + "\n"
    if args.format == "csv":
        a, b = r.order_pair
        tag = r.variant or ""
        return _csv([[i, x, a, b, tag] for i, x in enumerate(r.exceptions, 1)],
                    ["index", "two_n", "order_a", "order_b", "variant"])
    return _report_text(r)


def _run_scan(args) -> ExceptionReport:
    workers = args.workers or default_workers()
    progress = None if args.quiet else _progress
    if args.variant:
        t = sieve(args.limit)
        return gkc.scan_variant(
            args.variant, args.limit, t, workers=workers, chunk_size=args.chunk_size,
            checkpoint=args.checkpoint, progress=progress,
            resume=bool(args.resume),
        )
    a, b = max(args.a, args.b), min(args.a, args.b)
    chain = load_chain(a, args.limit, _data_dir(args))
    if args.resume:
        return resume_scan(args.checkpoint, a, b, args.limit, chain, workers=workers,
                           chunk_size=args.chunk_size, progress=progress)
    return scan(a, b, args.limit, chain, workers=workers, chunk_size=args.chunk_size,
                checkpoint=args.checkpoint, progress=progress)


def cmd_scan(args) -> int:
    if args.resume and not args.checkpoint:
        raise VGCError("--resume needs --checkpoint")
    _emit(_render_report(_run_scan(args), args), args)
    return 0


def cmd_gkc(args) -> int:
    args.a = args.b = 0
    return cmd_scan(args)


def cmd_emit_seq(args) -> int:
    if args.from_checkpoint:
        report = read_checkpoint(args.from_checkpoint)
        if args.limit is not None and report.scanned_to >= args.limit:
            report = dataclasses.replace(report, complete=True)
    else:
        args.resume = False
        args.checkpoint = None
        report = _run_scan(args)
    _emit(format_sequence(emit_sequence(report), bfile=args.bfile), args)
    return 0


def cmd_partitions(args) -> int:
    a, b = max(args.a, args.b), min(args.a, args.b)
    two_n = 2 * args.n
    chain = load_chain(a, max(two_n, 2), _data_dir(args))
    m = partition.enumerate_partitions(args.n, chain[a], chain[b])
    if args.format == "json":
        _emit(json.dumps({"n": m.n, "two_n": two_n, "order_pair": list(m.order_pair),
                          "g": m.count, "dedup": DEDUP_NOTE,
                          "rows": [list(r) for r in m.rows]}) + "\n", args)
    elif args.format == "csv":
        _emit(_csv([[u, v] for u, v in m.rows], ["u", "v"]), args)
    else:
        head = f"2n={two_n} (a,b)=({a},{b}) g={m.count} [dedup: {DEDUP_NOTE}]\n"
        _emit(head + "".join(f"{u} + {v}\n" for u, v in m.rows), args)
    return 0


def cmd_comet(args) -> int:
    if args.filter == "gkrc":
        t = sieve(max(2 * args.n_to, 2))
        series = comet.gkrc_filtered_series(args.n_from, args.n_to, t, distinct=not args.with_equal)
    else:
        a, b = max(args.a, args.b), min(args.a, args.b)
        chain = load_chain(a, max(2 * args.n_to, 2), _data_dir(args))
        series = comet.g_series(a, b, args.n_from, args.n_to, chain)
    if args.average != "none":
        series = comet.average_series(series, args.average)
    if args.format == "csv":
        _emit(comet.to_csv(series), args)
    elif args.format == "json":
        _emit(json.dumps({"order_pair": list(series.order_pair), "filter": series.filter,
                          "average": args.average, "dedup": DEDUP_NOTE,
                          "points": [list(p) for p in series.points]}) + "\n", args)
    else:
        a, b = series.order_pair
        head = f"# (a,b)=({a},{b}) filter={series.filter} average={args.average} dedup={DEDUP_NOTE}\n"
        _emit(head + "".join(f"{n:>10} {v:g}\n" for n, v in series.points), args)
    return 0


def _fmt_cell(value, kind: str) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "?"
    if kind == "h":
        return str(int(value))
    if kind == "g":
        return f"{value:.2f}"
    return f"{value:.1E}"


def render_matrix(mat: np.ndarray, kind: str, fmt: str = "text") -> str:
    size = mat.shape[0]
    cells = [[_fmt_cell(mat[a, b].item(), kind) for b in range(size)] for a in range(size)]
    if fmt == "csv":
        return _csv([[a] + row for a, row in enumerate(cells)], ["a\\b"] + list(range(size)))
    if fmt == "json":
        return json.dumps({"matrix": kind, "cells": cells}) + "\n"
    width = max(len(c) for row in cells for c in row) + 2
    out = [" a\\b" + "".join(f"{b:>{width}}" for b in range(size))]
    out += [f"{a:>4}" + "".join(f"{c:>{width}}" for c in row) for a, row in enumerate(cells)]
    return "\n".join(out) + "\n"


_MATRICES = {"x1": "x1", "x2": "x2", "h": "h_mat", "fy": "fy", "g": "g_mat", "lest": "l_est"}


def cmd_predict(args) -> int:
    tables = predictor.build_tables(args.size)
    shows = list(_MATRICES) + ["inversions"] if args.show == "all" else [args.show]
    parts = []
    for name in shows:
        if name == "inversions":
            inv = predictor.ordering_inversions(predictor.f_x2)
            text = "f_x2 ordering inversions against verified L:\n" + "".join(
                f"  L{p}={KNOWN_LIMITS[p]} < L{q}={KNOWN_LIMITS[q]} but f_x2{p} > f_x2{q}\n"
                for p, q in inv
            )
            parts.append(text)
            continue
        kind = "h" if name == "h" else "g" if name == "g" else "e"
        body = render_matrix(getattr(tables, _MATRICES[name]), kind, args.format)
        parts.append((f"# {name}\n" if args.format == "text" else "") + body)
    _emit("".join(parts), args)
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vgc", description="Vertical Goldbach verification tools")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "csv", "json")):
        sp.add_argument("--format", choices=formats, default=formats[0])
        sp.add_argument("--output", "-o", help="write data here instead of stdout")
        sp.add_argument("--data-dir", help="directory with stored i-prime files (env VGC_DATA_DIR)")

    def scanning(sp):
        sp.add_argument("--limit", type=_limit, required=True, help="largest even 2n to scan, e.g. 2e7")
        sp.add_argument("--workers", type=int, default=None, help="process count (env VGC_WORKERS)")
        sp.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK, help="even numbers per work unit")
        sp.add_argument("--checkpoint", help="checkpoint file rewritten after every chunk")
        sp.add_argument("--resume", action="store_true", help="continue from --checkpoint")
        sp.add_argument("--quiet", "-q", action="store_true", help="no progress on stderr")

    sp = sub.add_parser("sieve", help="count primes up to a limit")
    sp.add_argument("--limit", type=_limit, required=True)
    sp.add_argument("--threshold", type=_limit, default=DEFAULT_MATERIALIZE_THRESHOLD)
    common(sp)
    sp.set_defaults(func=cmd_sieve)

    sp = sub.add_parser("lift", help="build i-prime sets and optionally store them")
    sp.add_argument("--limit", type=_limit, required=True)
    sp.add_argument("--max-order", type=int, default=7)
    sp.add_argument("--save", help="directory for <order>_Px_up_to_<limit>.bin files")
    sp.add_argument("--threshold", type=_limit, default=DEFAULT_MATERIALIZE_THRESHOLD,
                    help="above this limit primes are streamed instead of held")
    common(sp)
    sp.set_defaults(func=cmd_lift)

    sp = sub.add_parser("scan", help="exceptions of VGC(a,b) up to a limit")
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    scanning(sp)
    common(sp)
    sp.set_defaults(func=cmd_scan, variant=None)

    sp = sub.add_parser("gkc", help="exceptions of a GKC-family variant")
    sp.add_argument("--variant", required=True, type=_variant, help="GKC, ntGKC, GKRC or ntGKRC")
    scanning(sp)
    common(sp)
    sp.set_defaults(func=cmd_gkc)

    sp = sub.add_parser("emit-seq", help="print the exception sequence, one term per line")
    sp.add_argument("--a", type=int, default=0)
    sp.add_argument("--b", type=int, default=0)
    sp.add_argument("--variant", type=_variant, default=None)
    sp.add_argument("--limit", type=_limit)
    sp.add_argument("--bfile", action="store_true", help='"index value" lines')
    sp.add_argument("--from-checkpoint", help="emit from a finished scan's checkpoint")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK)
    sp.add_argument("--quiet", "-q", action="store_true")
    sp.add_argument("--output", "-o")
    sp.add_argument("--data-dir")
    sp.set_defaults(func=cmd_emit_seq)

    sp = sub.add_parser("partitions", help="list the vertical partitions of 2n")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--a", type=int, default=0)
    sp.add_argument("--b", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_partitions)

    sp = sub.add_parser("comet", help="g(n) series, averages and GKRC-window counts")
    sp.add_argument("--a", type=int, default=0)
    sp.add_argument("--b", type=int, default=0)
    sp.add_argument("--from", dest="n_from", type=int, default=3)
    sp.add_argument("--to", dest="n_to", type=int, required=True)
    sp.add_argument("--filter", choices=("none", "gkrc"), default="none")
    sp.add_argument("--with-equal", action="store_true",
                    help="gkrc filter: also count 2n = p + p")
    sp.add_argument("--average", choices=("none", "running", "literal"), default="none")
    common(sp, formats=("csv", "text", "json"))
    sp.set_defaults(func=cmd_comet)

    sp = sub.add_parser("predict", help="predictor matrices and step-4 estimates")
    sp.add_argument("--show", choices=list(_MATRICES) + ["inversions", "all"], default="all")
    sp.add_argument("--size", type=int, default=6)
    common(sp)
    sp.set_defaults(func=cmd_predict)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "emit-seq" and not args.from_checkpoint and args.limit is None:
        parser.error("emit-seq needs --limit or --from-checkpoint")
    try:
        return args.func(args)
    except (VGCError, OSError) as exc:
        print(f"vgc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
