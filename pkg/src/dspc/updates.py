"""Index maintenance under edge and vertex insertions/deletions.

Insertions resume pruned BFSs from the hubs of the two endpoints across the
new edge. Deletions first find the affected hubs and receivers on the old
graph, drop the edge, then re-run pruned BFSs from the affected hubs only,
touching labels of the opposite side's vertices and cleaning up labels whose
hub lost every shortest path to them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import kernels as K
from .errors import GraphError
from .graph import DynamicGraph
from .index import SpcIndex


@dataclass
class UpdateStats:
    renew_c: int = 0
    renew_d: int = 0
    inserted: int = 0
    removed: int = 0
    visited_vertices: int = 0
    sr_a_size: int = 0
    sr_b_size: int = 0
    r_a_size: int = 0
    r_b_size: int = 0
    fast_path: bool = False
    elapsed: float = 0.0

    def absorb(self, counters: np.ndarray) -> None:
        self.renew_c += int(counters[K.RENEW_C])
        self.renew_d += int(counters[K.RENEW_D])
        self.inserted += int(counters[K.INSERTED])
        self.removed += int(counters[K.REMOVED])
        self.visited_vertices += int(counters[K.VISITED])

    def __iadd__(self, other: UpdateStats) -> UpdateStats:
        for f in fields(self):
            if f.name == "fast_path":
                self.fast_path = self.fast_path or other.fast_path
            else:
                setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    @property
    def changed(self) -> int:
        return self.renew_c + self.renew_d + self.inserted + self.removed


@dataclass
class AffectedSets:
    """Affected hubs (``sr_*``) and receiver-only vertices (``r_*``) per endpoint side."""

    sr_a: set[int] = field(default_factory=set)
    sr_b: set[int] = field(default_factory=set)
    r_a: set[int] = field(default_factory=set)
    r_b: set[int] = field(default_factory=set)


def _check_pair(g: DynamicGraph, idx: SpcIndex, a: int, b: int) -> None:
    if a == b:
        raise GraphError(f"self-loop ({a},{b})")
    for v in (a, b):
        g.require_alive(v)
    if g.num_ids != idx.num_ids:
        raise GraphError(f"graph has {g.num_ids} ids but index has {idx.num_ids}")


def _kernel_args(g: DynamicGraph, idx: SpcIndex):
    pool, start, deg = g.kernel_view()
    hub, dist, cnt, size = idx.kernel_view()
    return pool, start, deg, idx.ordering.rank_of, hub, dist, cnt, size, idx._refs


# -- insertion -----------------------------------------------------------

def inc_update(g: DynamicGraph, idx: SpcIndex, h: int, va: int, vb: int,
               stats: UpdateStats | None = None) -> UpdateStats:
    """One repair pass for hub ``h`` entering the new edge at ``va`` towards ``vb``."""
    stats = stats if stats is not None else UpdateStats()
    pool, start, deg, rank_of, hub, dist, cnt, size, refs = _kernel_args(g, idx)
    sc = idx._scratch
    counters = np.zeros(K.N_STATS, dtype=np.int64)
    K.inc_update(h, va, vb, pool, start, deg, rank_of, hub, dist, cnt, size, refs,
                 sc.D, sc.C, sc.Td, sc.Tc, sc.queue, idx._err, counters)
    idx.check_overflow()
    stats.absorb(counters)
    return stats


def affected_hubs(idx: SpcIndex, a: int, b: int) -> list[int]:
    """Hubs of ``L(a) | L(b)`` from the highest rank down."""
    hub, _, _, size = idx.kernel_view()
    aff, _, _ = K.affected_hubs(hub, size, a, b)
    return [int(idx.ordering.vertex(int(r))) for r in aff]


def inc_spc(g: DynamicGraph, idx: SpcIndex, a: int, b: int) -> UpdateStats:
    """Insert edge ``(a, b)`` into ``g`` and repair ``idx``."""
    _check_pair(g, idx, a, b)
    if g.has_edge(a, b):
        raise GraphError(f"edge exists ({a},{b})")
    t0 = time.perf_counter()
    g.add_edge(a, b)
    pool, start, deg, rank_of, hub, dist, cnt, size, refs = _kernel_args(g, idx)
    sc = idx._scratch
    counters = np.zeros(K.N_STATS, dtype=np.int64)
    K.inc_spc(a, b, pool, start, deg, rank_of, idx.ordering.vertex_at, hub, dist, cnt, size, refs,
              sc.D, sc.C, sc.Td, sc.Tc, sc.queue, idx._err, counters)
    idx.check_overflow()
    stats = UpdateStats()
    stats.absorb(counters)
    stats.elapsed = time.perf_counter() - t0
    return stats


# -- deletion ------------------------------------------------------------

def _srr_arrays(g: DynamicGraph, idx: SpcIndex, a: int, b: int):
    pool, start, deg, rank_of, hub, dist, cnt, size, refs = _kernel_args(g, idx)
    sc = idx._scratch
    common_ranks = K.common_hub_mark(hub, size, a, b, sc.common)
    try:
        sr_a, r_a = K.srr_side(a, b, pool, start, deg, rank_of, hub, dist, cnt, size,
                               sc.common, sc.D, sc.C, sc.Td, sc.Tc, sc.queue, idx._err)
        sr_b, r_b = K.srr_side(b, a, pool, start, deg, rank_of, hub, dist, cnt, size,
                               sc.common, sc.D, sc.C, sc.Td, sc.Tc, sc.queue, idx._err)
    finally:
        sc.common[common_ranks] = False
    idx.check_overflow()
    return sr_a, r_a, sr_b, r_b, common_ranks


def srr_search(g: DynamicGraph, idx: SpcIndex, a: int, b: int) -> AffectedSets:
    """Affected sets of deleting ``(a, b)``; the edge must still be in ``g``."""
    _check_pair(g, idx, a, b)
    if not g.has_edge(a, b):
        raise GraphError(f"no such edge ({a},{b})")
    sr_a, r_a, sr_b, r_b, _ = _srr_arrays(g, idx, a, b)
    return AffectedSets(set(sr_a.tolist()), set(sr_b.tolist()), set(r_a.tolist()), set(r_b.tolist()))


def dec_update(g: DynamicGraph, idx: SpcIndex, h: int, opp_sr, opp_r, sweep: bool = True,
               stats: UpdateStats | None = None) -> UpdateStats:
    """Repair hub-``h`` labels at ``opp_sr | opp_r`` on the post-deletion graph.

    With ``sweep`` set, hub-``h`` labels at opposite vertices the repair BFS
    did not confirm are removed afterwards.
    """
    stats = stats if stats is not None else UpdateStats()
    pool, start, deg, rank_of, hub, dist, cnt, size, refs = _kernel_args(g, idx)
    sc = idx._scratch
    opp = np.array(sorted(set(opp_sr) | set(opp_r)), dtype=np.int32)
    sc.mark_a[opp] = True
    counters = np.zeros(K.N_STATS, dtype=np.int64)
    try:
        K.dec_update(h, sc.mark_a, opp, bool(sweep), pool, start, deg, rank_of, hub, dist, cnt, size,
                     refs, sc.D, sc.C, sc.U, sc.Td, sc.Tc, sc.queue, idx._err, counters)
    finally:
        sc.mark_a[opp] = False
    idx.check_overflow()
    stats.absorb(counters)
    return stats


def delete_isolating_edge_fast_path(g: DynamicGraph, idx: SpcIndex, a: int, b: int) -> bool:
    """Delete ``(a, b)`` without any BFS when it cuts off a lower-ranked leaf.

    Returns ``False`` (leaving everything untouched) when not applicable.
    """
    if not g.has_edge(a, b):
        return False
    da, db = g.degree(a), g.degree(b)
    order = idx.ordering
    if da == 1 and db == 1:
        leaf, other = (a, b) if order.higher(b, a) else (b, a)
    elif db == 1:
        leaf, other = b, a
    elif da == 1:
        leaf, other = a, b
    else:
        return False
    if not order.higher(other, leaf):
        return False
    # the leaf's self-label must be the only label using it as a hub;
    # leftovers from earlier insertions elsewhere veto the shortcut
    if idx.hub_refs(leaf) != 1:
        return False
    g.remove_edge(a, b)
    idx.reset_labels(leaf)
    return True


def dec_spc(g: DynamicGraph, idx: SpcIndex, a: int, b: int, *,
            sets: AffectedSets | None = None, allow_fast_path: bool = True,
            sweep_all: bool = True) -> UpdateStats:
    """Delete edge ``(a, b)`` from ``g`` and repair ``idx``.

    When ``sets`` is given it is filled with the affected sets of the general path.

    Insertions leave behind labels whose distance has become too long. They
    are harmless until a deletion lengthens the true distance back to theirs,
    and then the hub need not be common to both endpoints. ``sweep_all``
    therefore runs the clean-up for every affected hub; setting it to
    ``False`` restricts it to common hubs, which is only safe on an index
    free of such leftovers (a fresh build, say).
    """
    _check_pair(g, idx, a, b)
    if not g.has_edge(a, b):
        raise GraphError(f"no such edge ({a},{b})")
    t0 = time.perf_counter()
    stats = UpdateStats()
    if allow_fast_path and delete_isolating_edge_fast_path(g, idx, a, b):
        stats.fast_path = True
        stats.elapsed = time.perf_counter() - t0
        return stats
    sr_a, r_a, sr_b, r_b, common_ranks = _srr_arrays(g, idx, a, b)
    if sets is not None:
        sets.sr_a, sets.sr_b = set(sr_a.tolist()), set(sr_b.tolist())
        sets.r_a, sets.r_b = set(r_a.tolist()), set(r_b.tolist())
    g.remove_edge(a, b)
    pool, start, deg, rank_of, hub, dist, cnt, size, refs = _kernel_args(g, idx)
    sc = idx._scratch
    sc.common[common_ranks] = True
    counters = np.zeros(K.N_STATS, dtype=np.int64)
    try:
        K.dec_spc(sr_a, r_a, sr_b, r_b, sc.common, sweep_all, pool, start, deg, rank_of, hub, dist,
                  cnt, size, refs, sc.D, sc.C, sc.U, sc.Td, sc.Tc, sc.queue, sc.mark_a, sc.mark_b,
                  idx._err, counters)
    finally:
        sc.common[common_ranks] = False
    idx.check_overflow()
    stats.absorb(counters)
    stats.sr_a_size, stats.sr_b_size = len(sr_a), len(sr_b)
    stats.r_a_size, stats.r_b_size = len(r_a), len(r_b)
    stats.elapsed = time.perf_counter() - t0
    return stats


# -- vertices ------------------------------------------------------------

def insert_vertex(g: DynamicGraph, idx: SpcIndex) -> int:
    """New isolated vertex at the lowest rank, carrying only its self-label."""
    v = g.add_vertex()
    idx.add_vertex(v)
    return v


def delete_vertex(g: DynamicGraph, idx: SpcIndex, v: int) -> UpdateStats:
    """Delete every edge of ``v`` one at a time, then tombstone it."""
    g.require_alive(v)
    t0 = time.perf_counter()
    total = UpdateStats()
    for _, w in g.incident_edges(v):
        total += dec_spc(g, idx, v, w)
    g.remove_vertex(v)
    idx.drop_vertex(v)
    total.elapsed = time.perf_counter() - t0
    return total


class DynamicSpc:
    """A graph and its index kept in step; the convenient entry point."""

    def __init__(self, g: DynamicGraph, idx: SpcIndex):
        if g.num_ids != idx.num_ids:
            raise GraphError(f"graph has {g.num_ids} ids but index has {idx.num_ids}")
        self.graph = g
        self.index = idx

    @classmethod
    def build(cls, g: DynamicGraph, ordering=None) -> DynamicSpc:
        from .graph import compute_degree_ordering
        from .index import build

        ordering = compute_degree_ordering(g) if ordering is None else ordering
        return cls(g, build(g, ordering))

    def query(self, s: int, t: int):
        return self.index.query(s, t)

    def insert_edge(self, a: int, b: int) -> UpdateStats:
        return inc_spc(self.graph, self.index, a, b)

    def delete_edge(self, a: int, b: int) -> UpdateStats:
        return dec_spc(self.graph, self.index, a, b)

    def insert_vertex(self) -> int:
        return insert_vertex(self.graph, self.index)

    def delete_vertex(self, v: int) -> UpdateStats:
        return delete_vertex(self.graph, self.index, v)


def warm_up() -> None:
    """Run every compiled kernel once on a tiny graph so later timings exclude JIT loading."""
    from .graph import VertexOrdering
    from .index import build

    g = DynamicGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    idx = build(g, VertexOrdering([1, 2, 0, 3]))
    idx.query(0, 3)
    idx.query_many([(0, 3)])
    inc_spc(g, idx, 0, 3)
    dec_spc(g, idx, 0, 1)
    dec_spc(g, idx, 2, 3)
