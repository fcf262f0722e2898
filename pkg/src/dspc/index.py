"""Shortest-path-counting hub labels: storage, queries and construction."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels as K
from .errors import CountOverflowError, GraphError, LabelError
from .graph import DynamicGraph, VertexOrdering

INFINITY = float("inf")


class LabelEntry(NamedTuple):
    """``(hub, dist, count)``: ``count`` shortest hub-owner paths on which ``hub`` ranks highest."""

    hub: int
    dist: int
    count: int


class QueryResult(NamedTuple):
    dist: float | int
    count: int

    @property
    def connected(self) -> bool:
        return self.dist != INFINITY


def _result(d: int, c: int) -> QueryResult:
    if d >= K.INF:
        return QueryResult(INFINITY, 0)
    return QueryResult(int(d), int(c))


@dataclass
class _Scratch:
    D: np.ndarray
    C: np.ndarray
    U: np.ndarray
    Td: np.ndarray
    Tc: np.ndarray
    queue: np.ndarray
    mark_a: np.ndarray
    mark_b: np.ndarray
    common: np.ndarray

    @classmethod
    def sized(cls, n: int) -> _Scratch:
        n = max(n, 1)
        return cls(
            D=np.full(n, K.INF, dtype=np.int32),
            C=np.zeros(n, dtype=np.uint64),
            U=np.zeros(n, dtype=np.bool_),
            Td=np.full(n, K.ROW_INF, dtype=np.int32),
            Tc=np.zeros(n, dtype=np.uint64),
            queue=np.empty(n, dtype=np.int32),
            mark_a=np.zeros(n, dtype=np.bool_),
            mark_b=np.zeros(n, dtype=np.bool_),
            common=np.zeros(n, dtype=np.bool_),
        )


class SpcIndex:
    """Per-vertex label sets sorted from the highest-ranked hub down.

    Hubs are kept as ranks internally; every public method speaks vertex ids.
    A vertex id with an empty label set is dead (tombstoned or never live).
    """

    def __init__(self, ordering: VertexOrdering, live: np.ndarray | None = None, _empty: bool = False):
        n = len(ordering)
        self.ordering = ordering
        self._size = np.zeros(max(n, 1), dtype=np.int32)
        self._refs = np.zeros(max(n, 1), dtype=np.int64)
        self._hub, self._dist, self._cnt = K.new_store(n, 4)
        self._err = np.zeros(1, dtype=np.int64)
        self._scratch = _Scratch.sized(n)
        if not _empty:
            live = np.ones(n, dtype=np.bool_) if live is None else live
            for v in np.flatnonzero(live[:n]):
                K.append_label(self._hub, self._dist, self._cnt, self._size, self._refs, int(v),
                               np.int32(ordering.rank(int(v))), np.int32(0), K.ONE)

    # -- shape -----------------------------------------------------------

    @property
    def num_ids(self) -> int:
        return len(self.ordering)

    def is_alive(self, v: int) -> bool:
        return 0 <= v < self.num_ids and self._size[v] > 0

    def require_alive(self, v: int) -> None:
        if not self.is_alive(v):
            raise GraphError(f"unknown vertex {v}")

    def entry_count(self) -> int:
        return int(self._size[: self.num_ids].sum())

    def label_size(self, v: int) -> int:
        return int(self._size[v])

    def kernel_view(self):
        return self._hub, self._dist, self._cnt, self._size

    def hub_refs(self, h: int) -> int:
        """Number of labels, self-label included, whose hub is ``h``."""
        return int(self._refs[self.ordering.rank(h)])

    def check_overflow(self) -> None:
        if self._err[0]:
            self._err[0] = 0
            raise CountOverflowError("shortest-path count exceeds 64 bits")

    # -- label access ----------------------------------------------------

    def labels(self, v: int) -> list[LabelEntry]:
        self.require_alive(v)
        k = int(self._size[v])
        hubs = self.ordering.vertex_at[np.asarray(self._hub[v][:k])]
        return [LabelEntry(int(h), int(d), int(c))
                for h, d, c in zip(hubs, self._dist[v][:k], self._cnt[v][:k])]

    def hubs(self, v: int) -> list[int]:
        return [e.hub for e in self.labels(v)]

    def get_label(self, v: int, h: int) -> LabelEntry | None:
        self.require_alive(v)
        pos = K.find_label(self._hub, self._size, v, np.int32(self.ordering.rank(h)))
        if pos < 0:
            return None
        return LabelEntry(h, int(self._dist[v][pos]), int(self._cnt[v][pos]))

    def upsert_label(self, v: int, entry: LabelEntry) -> LabelEntry | None:
        """Insert or replace the ``entry.hub`` label of ``v``; returns the displaced entry."""
        self.require_alive(v)
        h, d, c = (int(x) for x in entry)
        if self.ordering.higher(v, h):
            raise LabelError(f"hub {h} ranks below owner {v}")
        if c < 1:
            raise LabelError("label counts must be positive")
        hr = np.int32(self.ordering.rank(h))
        pos = K.find_label(self._hub, self._size, v, hr)
        if pos >= 0:
            prior = LabelEntry(h, int(self._dist[v][pos]), int(self._cnt[v][pos]))
            self._dist[v][pos] = d
            self._cnt[v][pos] = c
            return prior
        K.insert_label(self._hub, self._dist, self._cnt, self._size, self._refs, v, hr, np.int32(d), np.uint64(c))
        return None

    def remove_label(self, v: int, h: int) -> bool:
        self.require_alive(v)
        if h == v:
            raise LabelError(f"cannot remove the self-label of {v}")
        pos = K.find_label(self._hub, self._size, v, np.int32(self.ordering.rank(h)))
        if pos < 0:
            return False
        K.remove_at(self._hub, self._dist, self._cnt, self._size, self._refs, v, pos)
        return True

    def reset_labels(self, v: int) -> None:
        """Shrink ``L(v)`` to its self-label."""
        self.require_alive(v)
        r = self.ordering.rank(v)
        self._release(v)
        self._refs[r] += 1
        self._hub[v][0] = r
        self._dist[v][0] = 0
        self._cnt[v][0] = 1
        self._size[v] = 1

    def drop_vertex(self, v: int) -> None:
        self.require_alive(v)
        self._release(v)
        self._size[v] = 0

    def _release(self, v: int) -> None:
        k = int(self._size[v])
        np.subtract.at(self._refs, np.asarray(self._hub[v][:k]), 1)

    def add_vertex(self, v: int) -> None:
        """Register the next id ``v`` at the lowest rank with its self-label."""
        r = self.ordering.append(v)
        n = self.num_ids
        if len(self._size) < n:
            size = np.zeros(2 * n, dtype=np.int32)
            size[: len(self._size)] = self._size
            self._size = size
            refs = np.zeros(2 * n, dtype=np.int64)
            refs[: len(self._refs)] = self._refs
            self._refs = refs
            self._scratch = _Scratch.sized(2 * n)
        self._hub.append(np.empty(4, dtype=np.int32))
        self._dist.append(np.empty(4, dtype=np.int32))
        self._cnt.append(np.empty(4, dtype=np.uint64))
        K.append_label(self._hub, self._dist, self._cnt, self._size, self._refs, v, np.int32(r), np.int32(0), K.ONE)

    # -- queries ---------------------------------------------------------

    def query(self, s: int, t: int) -> QueryResult:
        """Exact ``(sd(s,t), spc(s,t))``; ``(inf, 0)`` when disconnected."""
        self.require_alive(s)
        self.require_alive(t)
        d, c = K.query_pair(self._hub, self._dist, self._cnt, self._size, s, t, K.NO_LIMIT, self._err)
        self.check_overflow()
        return _result(d, c)

    def pre_query(self, h: int, v: int) -> QueryResult:
        """Like :meth:`query` but only hubs ranked strictly above ``h`` count."""
        self.require_alive(h)
        self.require_alive(v)
        limit = np.int64(self.ordering.rank(h))
        d, c = K.query_pair(self._hub, self._dist, self._cnt, self._size, h, v, limit, self._err)
        self.check_overflow()
        return _result(d, c)

    def query_many(self, pairs) -> list[QueryResult]:
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        for s, t in pairs:
            if not (self.is_alive(int(s)) and self.is_alive(int(t))):
                raise GraphError(f"unknown vertex in pair ({s},{t})")
        d, c = K.query_batch(self._hub, self._dist, self._cnt, self._size,
                             pairs[:, 0].copy(), pairs[:, 1].copy(), self._err)
        self.check_overflow()
        return [_result(x, y) for x, y in zip(d.tolist(), c.tolist())]

    # -- integrity -------------------------------------------------------

    def check_invariants(self) -> None:
        """Rank constraint, self-label, hub uniqueness, sortedness, positive counts."""
        for v in range(self.num_ids):
            k = int(self._size[v])
            if k == 0:
                continue
            r = self.ordering.rank(v)
            hubs = np.asarray(self._hub[v][:k])
            if np.any(np.diff(hubs) <= 0):
                raise AssertionError(f"L({v}) not strictly sorted by hub rank")
            if hubs[-1] != r or self._dist[v][k - 1] != 0 or self._cnt[v][k - 1] != 1:
                raise AssertionError(f"L({v}) lacks its self-label")
            if np.any(hubs > r):
                raise AssertionError(f"L({v}) has a hub ranked below its owner")
            if np.any(np.asarray(self._cnt[v][:k]) == 0):
                raise AssertionError(f"L({v}) stores a zero count")
            if np.any(np.asarray(self._dist[v][: k - 1]) <= 0):
                raise AssertionError(f"L({v}) stores a non-positive foreign distance")
        refs = np.zeros_like(self._refs)
        for v in range(self.num_ids):
            np.add.at(refs, np.asarray(self._hub[v][: int(self._size[v])]), 1)
        if not np.array_equal(refs, self._refs):
            raise AssertionError("hub reference counts out of step with the labels")

    def as_dict(self) -> dict[int, list[LabelEntry]]:
        return {v: self.labels(v) for v in range(self.num_ids) if self.is_alive(v)}

    def copy(self) -> SpcIndex:
        other = SpcIndex(self.ordering.copy(), _empty=True)
        for v in range(self.num_ids):
            k = int(self._size[v])
            if k:
                other._hub[v] = np.asarray(self._hub[v][:k]).copy()
                other._dist[v] = np.asarray(self._dist[v][:k]).copy()
                other._cnt[v] = np.asarray(self._cnt[v][:k]).copy()
                other._size[v] = k
        other._refs = self._refs.copy()
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpcIndex):
            return NotImplemented
        return self.ordering == other.ordering and self.as_dict() == other.as_dict()

    def __repr__(self) -> str:
        return f"SpcIndex(n={self.num_ids}, entries={self.entry_count()})"


def build(g: DynamicGraph, ordering: VertexOrdering) -> SpcIndex:
    """Construct the index from scratch with pruned counting BFSs in rank order."""
    n = g.num_ids
    if len(ordering) != n:
        raise GraphError(f"ordering covers {len(ordering)} ids, graph has {n}")
    idx = SpcIndex(ordering.copy(), _empty=True)
    pool, start, deg = g.kernel_view()
    K.build_index(pool, start, deg, g._alive, idx.ordering.rank_of, idx.ordering.vertex_at, n,
                  idx._hub, idx._dist, idx._cnt, idx._size, idx._refs, idx._err)
    idx.check_overflow()
    return idx


def timed_build(g: DynamicGraph, ordering: VertexOrdering) -> tuple[SpcIndex, float]:
    t0 = time.perf_counter()
    idx = build(g, ordering)
    return idx, time.perf_counter() - t0
