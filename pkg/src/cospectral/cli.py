"""Command line entry point: ``cospectral <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import census as census_mod
from .graph import enumerate_graphs, parse_graph6, to_graph6, certificate, write_graph6_file
from .linalg import level_and_height
from .ortho import canonicalize, counting_bound, embed, enumerate_canonical_blocks, rotation_345
from .problab import (
    integrality_probability_exact,
    integrality_probability_mc,
    theorem_tail,
)
from .switching import GMPartition, find_gm_partitions, gm_matrix, gm_switch, prime_block_table

MAX_TRIALS = 10**8


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    seed: int | None = None
    jobs: int | None = None
    guards: dict = field(default_factory=dict)


def _frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _matrix_json(m) -> list[list[str]]:
    return [[_frac_str(x) for x in row] for row in m]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


def _load_matrix(spec: str):
    path = Path(spec)
    raw = json.loads(path.read_text() if path.exists() else spec)
    return tuple(tuple(Fraction(x) for x in row) for row in raw)


def render_report(report: census_mod.CensusReport) -> tuple[str, str]:
    """CSV text (header and one row) and the JSON pair dump."""
    for p in report.pairs:
        if p.level < 2:
            raise ValueError("mate pair with level < 2 cannot be rendered")
    csv = census_mod.CSV_HEADER + "\n" + report.csv_row() + "\n"
    pairs = json.dumps(
        {"n": report.n, "pairs": [p.to_json() for p in report.pairs]},
        sort_keys=True, indent=1,
    ) + "\n"
    return csv, pairs


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_census(args) -> int:
    if args.stream_pairs and not args.output:
        raise UsageError("argument --stream-pairs: requires --output")
    sink = None
    stream = None
    if args.stream_pairs:
        stream = open(Path(args.output).with_suffix(".pairs.jsonl"), "w", encoding="ascii")
        sink = lambda p: stream.write(_dump(p.to_json()) + "\n")  # noqa: E731
    try:
        if args.merge:
            shards = [json.loads(Path(p).read_text()) for p in args.merge]
            merged = census_mod.merge_shards(shards)
            report = census_mod.report_from_shard(merged, sink)
        else:
            if args.n is None:
                raise UsageError("argument --n: required unless --merge is given")
            source = args.input or None
            if args.emit_shard:
                shard = census_mod.census_shard(args.n, source, jobs=args.jobs)
                _write(_dump(shard) + "\n", args.output)
                return 0
            report = census_mod.run_census(args.n, source, jobs=args.jobs, pair_sink=sink)
    finally:
        if stream is not None:
            stream.close()
    csv, pairs = render_report(report)
    _write(csv, args.output)
    if args.output and not args.stream_pairs:
        Path(args.output).with_suffix(".pairs.json").write_text(pairs, encoding="ascii")
    return 0


def _cmd_switch(args) -> int:
    if args.primes is not None:
        lines = ["t,n,level,height"] + [",".join(map(str, r)) for r in prime_block_table(args.primes)]
        _write("\n".join(lines) + "\n", args.output)
        return 0
    if args.graph is None:
        raise UsageError("argument --graph: required unless --primes is given")
    g = parse_graph6(args.graph)
    if args.partition is None:
        if args.max_block is None:
            raise UsageError("argument --partition/--max-block: one of them is required with --graph")
        found = find_gm_partitions(g, args.max_block)
        rows = []
        for part in found:
            h = gm_switch(g, part)
            rows.append({
                "block": sorted(part.blocks[0]),
                "switched": to_graph6(h),
                "isomorphic": certificate(g) == certificate(h),
            })
        _write(_dump({"graph": to_graph6(g), "partitions": rows}) + "\n", args.output)
        return 0
    blocks = json.loads(args.partition)
    used = {v for b in blocks for v in b}
    part = GMPartition.of(blocks, set(range(g.n)) - used)
    h = gm_switch(g, part)
    q = gm_matrix(part, g.n)
    lv, ht = level_and_height(q)
    out = {
        "graph": to_graph6(g),
        "switched": to_graph6(h),
        "isomorphic": certificate(g) == certificate(h),
        "q": _matrix_json(q),
        "level": lv,
        "height": ht,
    }
    _write(_dump(out) + "\n", args.output)
    return 0


def _cmd_canon(args) -> int:
    if args.matrix is None:
        raise UsageError("argument --matrix: required")
    q = _load_matrix(args.matrix)
    cf = canonicalize(q)
    out = {
        "n": cf.n, "s": cf.s, "h": cf.h,
        "p_r": [list(r) for r in cf.p_r],
        "p_c": [list(r) for r in cf.p_c],
        "q_s": _matrix_json(cf.q_s),
    }
    _write(_dump(out) + "\n", args.output)
    return 0


def _cmd_enum_ortho(args) -> int:
    if args.s is None or args.h is None:
        raise UsageError("argument --s/--h: both required")
    blocks = enumerate_canonical_blocks(args.s, args.h)
    out = {
        "s": args.s, "h": args.h, "count": len(blocks),
        "bound": str(counting_bound(args.s, args.h)),
        "blocks": [_matrix_json(b) for b in blocks],
    }
    _write(_dump(out) + "\n", args.output)
    return 0


FIXTURES = ("identity", "r345", "gm4", "gm6")


def _fixture(name: str, n: int):
    if name == "identity":
        return embed((), n)
    if name == "r345":
        return embed(rotation_345(), n)
    if name in ("gm4", "gm6"):
        m = int(name[2:])
        return gm_matrix(GMPartition.single(range(m), n), n)
    raise UsageError(f"argument --fixture: unknown fixture {name!r}")


def _cmd_mc(args) -> int:
    if args.seed is None:
        raise UsageError("argument --seed: required for randomized subcommands")
    if args.p is None or args.trials is None:
        raise UsageError("argument --p/--trials: both required")
    if not 1 <= args.trials <= MAX_TRIALS:
        raise UsageError(f"argument --trials: must lie in 1..{MAX_TRIALS}")
    if args.matrix:
        q = _load_matrix(args.matrix)
    else:
        if args.n is None:
            raise UsageError("argument --n: required with --fixture")
        q = _fixture(args.fixture, args.n)
    est = integrality_probability_mc(q, args.p, args.trials, args.seed)
    try:
        exact = repr(float(integrality_probability_exact(q, args.p)))
    except ValueError:
        exact = ""
    lo, hi = est.wilson_interval_95
    row = [len(q), est.s, est.h, args.p, est.trials, repr(est.point_estimate), repr(lo), repr(hi), repr(est.bound), exact]
    _write("n,s,h,p,trials,estimate,lo,hi,bound,exact\n" + ",".join(map(str, row)) + "\n", args.output)
    return 0


def _cmd_tail(args) -> int:
    if args.n is None or args.h is None or args.p is None:
        raise UsageError("argument --n/--h/--p: all required")
    res = theorem_tail(args.n, args.h, args.p)
    _write(f"n,h,p,log_tail\n{res.n},{res.h},{res.p},{res.log_tail!r}\n", args.output)
    return 0


def _cmd_codec(args) -> int:
    if args.n is not None:
        if not args.output:
            raise UsageError("argument --output: required with --n")
        count = write_graph6_file(args.output, enumerate_graphs(args.n))
        sys.stderr.write(f"wrote {count} graphs\n")
        return 0
    lines = list(args.graphs)
    for path in args.input or []:
        lines += [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise UsageError("argument graphs: give graph6 strings, --input or --n")
    out = ["graph6,n,edges,certificate"]
    for s in lines:
        g = parse_graph6(s)
        out.append(f"{to_graph6(g)},{g.n},{g.num_edges()},{certificate(g).decode()}")
    _write("\n".join(out) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cospectral", description=__doc__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("census", help="maximum level/height of controllable generalized-cospectral pairs")
    c.add_argument("--n", type=int)
    c.add_argument("--input", nargs="+", help="graph6 file(s) holding all classes of order n")
    c.add_argument("--output")
    c.add_argument("--jobs", type=int)
    c.add_argument("--merge", nargs="+", metavar="SHARD")
    c.add_argument("--emit-shard", action="store_true", help="write a mergeable bucket map instead of a report")
    c.add_argument("--stream-pairs", action="store_true",
                   help="write pairs as JSON lines (OUTPUT.pairs.jsonl) while running, in bucket order")
    c.set_defaults(func=_cmd_census)

    s = sub.add_parser("switch", help="Godsil-McKay switching")
    s.add_argument("--graph")
    s.add_argument("--partition", help="JSON list of vertex lists")
    s.add_argument("--max-block", type=int, help="list every single-block partition up to this size")
    s.add_argument("--primes", type=int, help="table for blocks 2p over the first T primes")
    s.add_argument("--output")
    s.set_defaults(func=_cmd_switch)

    k = sub.add_parser("canon", help="canonical form of a rational orthogonal matrix")
    k.add_argument("--matrix", help="JSON matrix of num/den strings, or a path to one")
    k.add_argument("--output")
    k.set_defaults(func=_cmd_canon)

    e = sub.add_parser("enum-ortho", help="enumerate canonical blocks")
    e.add_argument("--s", type=int)
    e.add_argument("--h", type=int)
    e.add_argument("--output")
    e.set_defaults(func=_cmd_enum_ortho)

    m = sub.add_parser("mc", help="Monte Carlo integrality probability")
    m.add_argument("--n", type=int)
    m.add_argument("--fixture", choices=FIXTURES, default="gm4")
    m.add_argument("--matrix")
    m.add_argument("--p", type=float)
    m.add_argument("--trials", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--output")
    m.set_defaults(func=_cmd_mc)

    t = sub.add_parser("tail", help="log of the tail sum in the fixed-height argument")
    t.add_argument("--n", type=int)
    t.add_argument("--h", type=int)
    t.add_argument("--p", type=float)
    t.add_argument("--output")
    t.set_defaults(func=_cmd_tail)

    d = sub.add_parser("codec", help="graph6 decoding, certificates, enumeration dumps")
    d.add_argument("graphs", nargs="*")
    d.add_argument("--input", nargs="+")
    d.add_argument("--n", type=int, help="write all classes of order n to --output")
    d.add_argument("--output")
    d.set_defaults(func=_cmd_codec)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = RunConfig(
        args.subcommand,
        inputs=list(getattr(args, "input", None) or []) + list(getattr(args, "merge", None) or []),
        output=getattr(args, "output", None),
        seed=getattr(args, "seed", None),
        jobs=getattr(args, "jobs", None),
        guards={"max_trials": MAX_TRIALS},
    )
    logging.getLogger(__name__).debug("run config %s", config)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{ap.prog} {args.subcommand}: error: {exc}\n")
        return 2
    except (ValueError, ArithmeticError, OSError, AssertionError) as exc:
        sys.stderr.write(f"{ap.prog} {args.subcommand}: error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())
