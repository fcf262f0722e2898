"""Ground truth by graph traversal: counting BFS, bidirectional BFS and
rank-restricted counting. Nothing here reads the label index except
:func:`validate_index`, which compares the two.

Counts are Python integers, so they never wrap.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .graph import DynamicGraph, VertexOrdering
from .index import INFINITY, QueryResult, SpcIndex


@dataclass
class SsspcResult:
    source: int
    dist: dict[int, int]
    count: dict[int, int]

    def at(self, v: int) -> QueryResult:
        if v not in self.dist:
            return QueryResult(INFINITY, 0)
        return QueryResult(self.dist[v], self.count[v])


def _adjacency(g: DynamicGraph) -> dict[int, list[int]]:
    return {v: g.neighbors(v).tolist() for v in g.vertices()}


def _bfs_counts(adj: dict[int, list[int]], s: int, allowed=None) -> tuple[dict[int, int], dict[int, int]]:
    dist = {s: 0}
    count = {s: 1}
    q = deque([s])
    while q:
        v = q.popleft()
        dv, cv = dist[v], count[v]
        for w in adj[v]:
            if allowed is not None and not allowed(w):
                continue
            dw = dist.get(w)
            if dw is None:
                dist[w] = dv + 1
                count[w] = cv
                q.append(w)
            elif dw == dv + 1:
                count[w] += cv
    return dist, count


def bfs_spc(g: DynamicGraph, s: int) -> SsspcResult:
    """Distances and shortest-path counts from ``s`` to every reachable vertex."""
    g.require_alive(s)
    dist, count = _bfs_counts(_adjacency(g), s)
    return SsspcResult(s, dist, count)


def all_pairs(g: DynamicGraph) -> dict[int, SsspcResult]:
    adj = _adjacency(g)
    out = {}
    for s in adj:
        d, c = _bfs_counts(adj, s)
        out[s] = SsspcResult(s, d, c)
    return out


def bibfs_query(g: DynamicGraph, s: int, t: int, adj: dict[int, list[int]] | None = None) -> QueryResult:
    """Bidirectional BFS that always grows the side with the smaller frontier.

    Searches alternate by whole levels. Once a level expansion reaches the
    other side's settled vertices, the best distance is fixed and every path
    is counted exactly once at its vertex at distance ``r_s`` from ``s``,
    where ``r_s`` is the source side's final radius.
    """
    g.require_alive(s)
    g.require_alive(t)
    if s == t:
        return QueryResult(0, 1)
    cache = adj if adj is not None else {}

    def get(v: int) -> list[int]:
        out = cache.get(v)
        if out is None:
            out = cache[v] = g.neighbors(v).tolist()
        return out

    dist = ({s: 0}, {t: 0})
    count = ({s: 1}, {t: 1})
    frontier = ([s], [t])
    radius = [0, 0]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        mine, other = dist[side], dist[1 - side]
        cnt = count[side]
        nxt: list[int] = []
        met = False
        for v in frontier[side]:
            cv = cnt[v]
            for w in get(v):
                dw = mine.get(w)
                if dw is None:
                    mine[w] = radius[side] + 1
                    cnt[w] = cv
                    nxt.append(w)
                    if w in other:
                        met = True
                elif dw == radius[side] + 1:
                    cnt[w] += cv
        radius[side] += 1
        frontier[side][:] = nxt
        if met:
            # meeting vertices all sit at radius[side] on this side and
            # radius[other] on the far side, so best = sum of the two radii
            total = 0
            for w in nxt:
                if w in other:
                    total += cnt[w] * count[1 - side][w]
            return QueryResult(radius[0] + radius[1], total)
    return QueryResult(INFINITY, 0)


def spc_hat(g: DynamicGraph, ordering: VertexOrdering, h: int, v: int) -> tuple[float | int, int]:
    """``(sd(h,v), #shortest h-v paths avoiding vertices ranked above h)``."""
    g.require_alive(h)
    g.require_alive(v)
    adj = _adjacency(g)
    gd, _ = _bfs_counts(adj, h)
    if v not in gd:
        return INFINITY, 0
    rh = ordering.rank(h)
    rd, rc = _bfs_counts(adj, h, allowed=lambda w: ordering.rank(w) >= rh)
    if rd.get(v) == gd[v]:
        return gd[v], rc[v]
    return gd[v], 0


def hat_labels(g: DynamicGraph, ordering: VertexOrdering) -> dict[int, set[tuple[int, int, int]]]:
    """Every ``(h, sd(h,v), spc_hat(h,v))`` with a positive count, per owner ``v``."""
    adj = _adjacency(g)
    out: dict[int, set[tuple[int, int, int]]] = {v: set() for v in adj}
    for h in adj:
        gd, _ = _bfs_counts(adj, h)
        rh = ordering.rank(h)
        rd, rc = _bfs_counts(adj, h, allowed=lambda w: ordering.rank(w) >= rh)
        for v, d in rd.items():
            if gd[v] == d:
                out[v].add((h, d, rc[v]))
    return out


@dataclass
class ValidationReport:
    checked: int = 0
    mismatches: list[tuple[int, int, QueryResult, QueryResult]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def lines(self) -> list[str]:
        out = [
            f"MISMATCH {s} {t} index={_fmt(i)} oracle={_fmt(o)}"
            for s, t, i, o in self.mismatches
        ]
        out.append(f"checked={self.checked} mismatches={len(self.mismatches)}")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _fmt(r: QueryResult) -> str:
    d = "INF" if r.dist == INFINITY else str(r.dist)
    return f"({d},{r.count})"


def validate_index(g: DynamicGraph, idx: SpcIndex, mode: str | int = "all",
                   seed: int = 0) -> ValidationReport:
    """Compare index answers against counting BFS.

    ``mode`` is ``"all"`` for every ordered pair of live vertices, or an
    integer ``k`` / ``"sampled:k"`` for ``k`` random pairs.
    """
    verts = g.vertices()
    report = ValidationReport()
    if not verts:
        return report
    if isinstance(mode, str) and mode.startswith("sampled"):
        mode = int(mode.split(":", 1)[1])
    if mode == "all":
        sources = verts
        pairs = [(s, t) for s in verts for t in verts]
    else:
        rng = random.Random(seed)
        pairs = [(rng.choice(verts), rng.choice(verts)) for _ in range(int(mode))]
        sources = sorted({s for s, _ in pairs})
    adj = _adjacency(g)
    truth = {s: _bfs_counts(adj, s) for s in sources}
    answerable = [(s, t) for s, t in pairs if idx.is_alive(s) and idx.is_alive(t)]
    got = dict(zip(answerable, idx.query_many(answerable))) if answerable else {}
    for s, t in pairs:
        r = got.get((s, t), QueryResult(INFINITY, 0))
        d, c = truth[s]
        expect = QueryResult(d[t], c[t]) if t in d else QueryResult(INFINITY, 0)
        report.checked += 1
        if r != expect:
            report.mismatches.append((s, t, r, expect))
    return report
