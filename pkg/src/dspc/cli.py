"""``dspc`` command line: build, run, gen, validate and query.

Exit codes: 0 success, 1 validation mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
import time

from .errors import DspcError
from .graph import DynamicGraph, VertexOrdering, compute_degree_ordering, read_edge_list, read_ordering
from .harness import ValidationFailure, WorkloadError, audit_report, run_workload
from .index import INFINITY, SpcIndex, build
from .oracle import bibfs_query, validate_index
from .serialize import load, save
from .updates import warm_up
from .workload import format_workload, generate_workload, read_workload

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def _ordering(spec: str, g: DynamicGraph) -> VertexOrdering:
    if spec == "degree":
        return compute_degree_ordering(g)
    if spec.startswith("file:"):
        o = read_ordering(spec[5:])
        if len(o) != g.num_ids:
            raise DspcError(f"ordering file lists {len(o)} ids but the graph has {g.num_ids}")
        return o
    raise DspcError(f"--ordering must be 'degree' or 'file:<path>', got {spec!r}")


def _load_pair(args) -> tuple[DynamicGraph, SpcIndex]:
    g = read_edge_list(args.graph)
    idx = load(args.index, _ordering(args.ordering, g))
    if idx.num_ids != g.num_ids:
        raise DspcError(f"index covers {idx.num_ids} ids but the graph has {g.num_ids}")
    for v in range(g.num_ids):
        if idx.is_alive(v) != g.is_alive(v):
            raise DspcError(f"vertex {v} is live in only one of graph and index")
    return g, idx


def cmd_build(args) -> int:
    g = read_edge_list(args.graph)
    order = _ordering(args.ordering, g)
    t0 = time.perf_counter()
    idx = build(g, order)
    elapsed = time.perf_counter() - t0
    save(idx, args.index)
    print(f"n={g.vertex_count} m={g.edge_count} entries={idx.entry_count()} build_time={elapsed:.6f}s")
    return EXIT_OK


def cmd_run(args) -> int:
    g, idx = _load_pair(args)
    ops = read_workload(args.workload)
    status = EXIT_OK
    try:
        report = run_workload(g, idx, ops, validate_every=args.validate_every,
                              validate_pairs=args.validate_pairs, seed=args.seed)
    except ValidationFailure as exc:
        for line in exc.report.lines():
            print(line, file=sys.stderr)
        print(f"dspc: {exc}", file=sys.stderr)
        report, status = exc.run_report, EXIT_MISMATCH
    text = report.text()
    if args.report == "-":
        sys.stdout.write(text)
    else:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.audit:
        problems = audit_report(text)
        for p in problems:
            print(f"audit: {p}", file=sys.stderr)
        if problems and status == EXIT_OK:
            status = EXIT_MISMATCH
    return status


def cmd_gen(args) -> int:
    g = read_edge_list(args.graph)
    ops = generate_workload(g, args.inserts, args.deletes, args.queries, seed=args.seed, shuffle=args.shuffle)
    text = format_workload(ops)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    g, idx = _load_pair(args)
    mode = args.mode
    if mode != "all" and not mode.startswith("sampled:"):
        raise DspcError(f"--mode must be 'all' or 'sampled:<k>', got {mode!r}")
    report = validate_index(g, idx, mode=mode, seed=args.seed)
    sys.stdout.write(report.text())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_query(args) -> int:
    if args.graph is None and args.index is None:
        raise DspcError("query needs --graph, --index or both")
    g = read_edge_list(args.graph) if args.graph is not None else None
    s, t = args.s, args.t
    if args.engine == "bibfs":
        if g is None:
            raise DspcError("the bibfs engine needs --graph")
        t0 = time.perf_counter()
        res = bibfs_query(g, s, t)
    else:
        if args.index is not None:
            idx = load(args.index, _ordering(args.ordering, g) if g is not None else None)
        else:
            idx = build(g, _ordering(args.ordering, g))
        warm_up()
        t0 = time.perf_counter()
        res = idx.query(s, t)
    us = (time.perf_counter() - t0) * 1e6
    d = "INF" if res.dist == INFINITY else res.dist
    print(f"dist={d} count={res.count} time={us:.1f}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dspc", description="Dynamic shortest-path-counting index tools.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index from an edge list")
    b.add_argument("--graph", required=True)
    b.add_argument("--index", required=True, help="output index file")
    b.add_argument("--ordering", default="degree", help="degree | file:<path>")
    b.set_defaults(func=cmd_build)

    r = sub.add_parser("run", help="apply a workload to a graph and its index")
    r.add_argument("--graph", required=True)
    r.add_argument("--index", required=True)
    r.add_argument("--workload", required=True)
    r.add_argument("--report", default="-", help="report path, '-' for stdout")
    r.add_argument("--ordering", default="degree", help="ordering the index was built with")
    r.add_argument("--validate-every", type=int, default=None, metavar="N")
    r.add_argument("--validate-pairs", type=int, default=200, metavar="K",
                   help="random pairs per validation (default 200)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--audit", action="store_true", help="recompute the summary from the op records")
    r.set_defaults(func=cmd_run)

    gn = sub.add_parser("gen", help="generate a seeded random workload")
    gn.add_argument("--graph", required=True)
    gn.add_argument("--inserts", type=int, default=0)
    gn.add_argument("--deletes", type=int, default=0)
    gn.add_argument("--queries", type=int, default=0)
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--shuffle", action="store_true")
    gn.add_argument("--out", "--workload", dest="out", default=None, help="output path, stdout by default")
    gn.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="compare an index with BFS ground truth")
    v.add_argument("--graph", required=True)
    v.add_argument("--index", required=True)
    v.add_argument("--ordering", default="degree")
    v.add_argument("--mode", default="all", help="all | sampled:<k>")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_validate)

    q = sub.add_parser("query", help="answer one (distance, count) query")
    q.add_argument("s", type=int)
    q.add_argument("t", type=int)
    q.add_argument("--graph")
    q.add_argument("--index")
    q.add_argument("--ordering", default="degree")
    q.add_argument("--engine", choices=("label", "bibfs"), default="label")
    q.set_defaults(func=cmd_query)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except WorkloadError as exc:
        print(f"dspc: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DspcError, OSError, ValueError) as exc:
        print(f"dspc: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
