"""Update/query workloads: the text format, a parser and a seeded generator.

One op per line::

    I u v     insert edge
    D u v     delete edge
    Q u v     query (distance, count)
    AV        add a vertex
    DV v      delete a vertex

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import enum
import os
import random
from dataclasses import dataclass

from .errors import GraphError, ParseError
from .graph import DynamicGraph


class OpKind(enum.Enum):
    INSERT_EDGE = "I"
    DELETE_EDGE = "D"
    QUERY = "Q"
    ADD_VERTEX = "AV"
    DELETE_VERTEX = "DV"

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {
    OpKind.INSERT_EDGE: 2,
    OpKind.DELETE_EDGE: 2,
    OpKind.QUERY: 2,
    OpKind.ADD_VERTEX: 0,
    OpKind.DELETE_VERTEX: 1,
}


@dataclass(frozen=True)
class WorkloadOp:
    kind: OpKind
    args: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.args) != self.kind.arity:
            raise ValueError(f"{self.kind.value} takes {self.kind.arity} argument(s), got {len(self.args)}")

    def __str__(self) -> str:
        return " ".join([self.kind.value, *map(str, self.args)])


def parse_workload_lines(lines, path: str | None = None) -> list[WorkloadOp]:
    ops = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            kind = OpKind(parts[0])
        except ValueError:
            raise ParseError(f"unknown op {parts[0]!r}", lineno, path) from None
        try:
            args = tuple(int(x) for x in parts[1:])
        except ValueError:
            raise ParseError(f"non-integer argument in {line!r}", lineno, path) from None
        if any(a < 0 for a in args):
            raise ParseError(f"negative vertex id in {line!r}", lineno, path)
        if len(args) != kind.arity:
            raise ParseError(f"{kind.value} takes {kind.arity} argument(s), got {len(args)}", lineno, path)
        ops.append(WorkloadOp(kind, args))
    return ops


def read_workload(path: str | os.PathLike) -> list[WorkloadOp]:
    with open(path, encoding="utf-8") as fh:
        return parse_workload_lines(fh, str(path))


def format_workload(ops) -> str:
    return "".join(f"{op}\n" for op in ops)


def write_workload(ops, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_workload(ops))


def _sample_non_edges(g: DynamicGraph, k: int, rng: random.Random) -> list[tuple[int, int]]:
    verts = g.vertices()
    nv = len(verts)
    available = nv * (nv - 1) // 2 - g.edge_count
    if k > available:
        if available == 0:
            raise GraphError("no non-edges available for insertion")
        raise GraphError(f"requested {k} insertions but only {available} non-edges exist")
    if k == 0:
        return []
    if 2 * k > available:
        # dense: enumerate every candidate
        pool = [(verts[i], verts[j]) for i in range(nv) for j in range(i + 1, nv)
                if not g.has_edge(verts[i], verts[j])]
        return rng.sample(pool, k)
    chosen: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    while len(chosen) < k:
        u, v = rng.choice(verts), rng.choice(verts)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen or g.has_edge(u, v):
            continue
        seen.add(key)
        chosen.append(key)
    return chosen


def generate_workload(g: DynamicGraph, inserts: int = 0, deletes: int = 0, queries: int = 0,
                      seed: int = 0, shuffle: bool = False) -> list[WorkloadOp]:
    """Seeded random workload against ``g``.

    Insertions are distinct non-edges of ``g``; deletions are distinct edges
    of ``g``, so the two blocks never collide and any interleaving is legal.
    Queries are uniform pairs of live vertices. Without ``shuffle`` the
    order is all insertions, then deletions, then queries.
    """
    if min(inserts, deletes, queries) < 0:
        raise ValueError("op counts must be non-negative")
    rng = random.Random(seed)
    ins = _sample_non_edges(g, inserts, rng)
    edges = list(g.edges())
    if deletes > len(edges):
        raise GraphError(f"requested {deletes} deletions but the graph has {len(edges)} edges")
    dels = rng.sample(edges, deletes)
    verts = g.vertices()
    if queries and not verts:
        raise GraphError("no live vertices to query")
    qs = [(rng.choice(verts), rng.choice(verts)) for _ in range(queries)]
    ops = ([WorkloadOp(OpKind.INSERT_EDGE, e) for e in ins]
           + [WorkloadOp(OpKind.DELETE_EDGE, e) for e in dels]
           + [WorkloadOp(OpKind.QUERY, q) for q in qs])
    if shuffle:
        rng.shuffle(ops)
    return ops
