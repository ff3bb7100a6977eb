"""Command line: ``r3matroids gen|classify|query|terao|stats``.

The store path defaults to ``$R3MATROIDS_STORE`` (else ``matroids.jsonl``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from .core import MultiplicityVector
from .generation import Options, iter_generate
from .represent import DEFAULT_BATTERY, parse_battery
from .store import (FLAG_NAMES, DuplicateKey, IncompleteClassification, ParseError, UnknownField,
                    basic_record, classify, default_store_path, query, read_records, seed_cache,
                    terao_pipeline, tutte_unique_within, write_records)

log = logging.getLogger("r3matroids")


def _cmd_gen(args) -> int:
    mv = None
    if args.mv:
        mv = MultiplicityVector.from_list(args.n, [int(x) for x in args.mv.split(",")])
        if not mv.is_valid():
            print(f"multiplicity vector {args.mv} does not cover all pairs of {args.n} atoms",
                  file=sys.stderr)
            return 2
    opts = Options(prune_parity=not args.no_prune_parity)
    t0 = time.time()
    leaves = iter_generate(args.n, mv, workers=args.workers, opts=opts,
                           fifo_capacity=args.fifo_capacity, int_split=args.int_split)
    count = write_records(args.out, (basic_record(M) for M in leaves))
    print(f"{count} matroids with n={args.n} written to {args.out} ({time.time() - t0:.1f}s)")
    return 0


def _cmd_classify(args) -> int:
    records = list(read_records(args.inp))
    battery = None if args.no_represent else (parse_battery(args.battery) if args.battery
                                              else DEFAULT_BATTERY)
    cache = seed_cache(records)
    done = 0
    # smaller matroids first so deletions hit the cache
    for i in sorted(range(len(records)), key=lambda i: records[i].n):
        r = records[i]
        if r.classified and not args.force and (battery is None or r.representability is not None):
            continue
        records[i] = classify(r.matroid(), battery, cache)
        done += 1
    tmp = args.inp + ".tmp"
    write_records(tmp, records)
    os.replace(tmp, args.inp)
    print(f"classified {done} of {len(records)} records in {args.inp}")
    return 0


def _cmd_query(args) -> int:
    res = query(read_records(args.inp), args.where, count=args.count)
    if args.count:
        print(res)
    else:
        for r in res:
            print(r.to_json())
    return 0


def _cmd_terao(args) -> int:
    try:
        st = terao_pipeline(read_records(args.inp), args.n)
    except IncompleteClassification as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"n={st.n}")
    print(f"  integrally splitting      {st.int_split}")
    print(f"  representable (battery)   {st.representable}")
    print(f"  not inductively free      {st.not_inductively_free}")
    print(f"  strongly balanced         {st.strongly_balanced}")
    for r in st.survivors:
        print(r.to_json())
    return 0


def _cmd_stats(args) -> int:
    records = list(read_records(args.inp))
    cols = ["n", "total", "int_split", *FLAG_NAMES[:3], "representable", "T-unique"]
    print("  ".join(f"{c:>17}" if i else f"{c:>3}" for i, c in enumerate(cols)))
    for n in sorted({r.n for r in records}):
        rs = [r for r in records if r.n == n]
        split = [r for r in rs if r.int_split]

        def flag(name):
            vals = [r.flags[name] for r in split if r.flags is not None]
            return str(sum(vals)) if len(vals) == len(split) else "-"

        reps = [r.representable for r in split]
        rep = str(sum(reps)) if None not in reps else "-"
        tu = str(tutte_unique_within(rs, n)) if split else "0"
        row = [n, len(rs), len(split), *(flag(f) for f in FLAG_NAMES[:3]), rep, tu]
        print("  ".join(f"{v:>17}" if i else f"{v:>3}" for i, v in enumerate(row)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="r3matroids", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    store = default_store_path()

    g = sub.add_parser("gen", help="generate nonisomorphic matroids into a store file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--mv", help="m2,m3,... (one census only)")
    g.add_argument("--int-split", action="store_true", help="only integrally splitting censuses")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--fifo-capacity", type=int, default=None)
    g.add_argument("--no-prune-parity", action="store_true")
    g.add_argument("--out", default=store)
    g.set_defaults(func=_cmd_gen)

    c = sub.add_parser("classify", help="compute invariants, freeness and representability")
    c.add_argument("--in", dest="inp", default=store)
    c.add_argument("--battery", help="field orders (default 2,3,4,5,7,8,9,11,13; add 16 for n >= 12)")
    c.add_argument("--no-represent", action="store_true")
    c.add_argument("--force", action="store_true", help="reclassify classified records")
    c.set_defaults(func=_cmd_classify)

    q = sub.add_parser("query", help="filter records by a predicate")
    q.add_argument("--in", dest="inp", default=store)
    q.add_argument("--where", required=True)
    q.add_argument("--count", action="store_true")
    q.set_defaults(func=_cmd_query)

    t = sub.add_parser("terao", help="stage counts of the freeness filter pipeline")
    t.add_argument("--in", dest="inp", default=store)
    t.add_argument("--n", type=int, required=True)
    t.set_defaults(func=_cmd_terao)

    s = sub.add_parser("stats", help="per-size class counts")
    s.add_argument("--in", dest="inp", default=store)
    s.set_defaults(func=_cmd_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ParseError, DuplicateKey, UnknownField, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
