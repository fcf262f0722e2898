"""Mutable undirected simple graph and vertex orderings.

Adjacency lives in one flat ``int32`` pool so the numba kernels in
:mod:`dspc.kernels` can walk neighbours without touching Python objects.
Each vertex owns a slice ``pool[start[v] : start[v] + deg[v]]`` with some
slack; a full slice is moved to the end of the pool with doubled capacity.
"""

from __future__ import annotations

import os
from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, GraphError, ParseError

MAX_VERTICES = 1 << 25  # hub field width of a packed label


class DynamicGraph:
    """Undirected, unweighted graph with tombstoned vertex deletion.

    Vertex ids are dense in ``[0, num_ids)``; a deleted id stays dead for the
    lifetime of the object so that label hubs keep pointing at stable ids.
    """

    max_vertices = MAX_VERTICES

    def __init__(self, n: int = 0):
        cap = max(16, n)
        self._start = np.zeros(cap, dtype=np.int64)
        self._deg = np.zeros(cap, dtype=np.int32)
        self._slot = np.zeros(cap, dtype=np.int32)
        self._alive = np.zeros(cap, dtype=np.bool_)
        self._pool = np.zeros(max(64, 4 * n), dtype=np.int32)
        self._used = 0
        self._n = 0
        self._m = 0
        self._live = 0
        for _ in range(n):
            self.add_vertex()

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> DynamicGraph:
        edges = [(int(u), int(v)) for u, v in edges]
        g = cls(0)
        if n == 0:
            if edges:
                raise GraphError("edges given for an empty vertex set")
            return g
        deg = np.zeros(max(n, 1), dtype=np.int64)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"unknown vertex in edge ({u},{v})")
            deg[u] += 1
            deg[v] += 1
        slots = np.maximum(deg[:n] + deg[:n] // 2, 4).astype(np.int64)
        g._reserve_ids(n)
        g._pool = np.zeros(max(64, int(slots.sum())), dtype=np.int32)
        g._start[:n] = np.concatenate(([0], np.cumsum(slots)[:-1]))
        g._slot[:n] = slots
        g._alive[:n] = True
        g._used = int(slots.sum())
        g._n = n
        g._live = n
        for u, v in edges:
            g.add_edge(u, v)
        return g

    # -- size / liveness -------------------------------------------------

    @property
    def num_ids(self) -> int:
        """Number of ids ever allocated (live plus tombstoned)."""
        return self._n

    @property
    def vertex_count(self) -> int:
        return self._live

    @property
    def edge_count(self) -> int:
        return self._m

    def is_alive(self, v: int) -> bool:
        return 0 <= v < self._n and bool(self._alive[v])

    def require_alive(self, v: int) -> None:
        if not self.is_alive(v):
            raise GraphError(f"unknown vertex {v}")

    def vertices(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(self._alive[: self._n])]

    # -- neighbourhoods --------------------------------------------------

    def degree(self, v: int) -> int:
        self.require_alive(v)
        return int(self._deg[v])

    def neighbors(self, v: int) -> np.ndarray:
        self.require_alive(v)
        s = self._start[v]
        return self._pool[s : s + self._deg[v]].copy()

    def has_edge(self, u: int, v: int) -> bool:
        if not (self.is_alive(u) and self.is_alive(v)):
            return False
        if self._deg[u] > self._deg[v]:
            u, v = v, u
        s = self._start[u]
        return bool(np.any(self._pool[s : s + self._deg[u]] == v))

    def incident_edges(self, v: int) -> list[tuple[int, int]]:
        return [(v, int(w)) for w in self.neighbors(v)]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Every edge once, as ``(u, v)`` with ``u < v``, in ascending order."""
        for u in self.vertices():
            for w in sorted(int(x) for x in self.neighbors(u)):
                if u < w:
                    yield (u, w)

    def adjacency_sets(self) -> dict[int, frozenset[int]]:
        return {v: frozenset(int(w) for w in self.neighbors(v)) for v in self.vertices()}

    # -- mutation --------------------------------------------------------

    def _reserve_ids(self, n: int) -> None:
        cap = len(self._start)
        if n <= cap:
            return
        new_cap = max(n, 2 * cap)
        for name in ("_start", "_deg", "_slot", "_alive"):
            old = getattr(self, name)
            arr = np.zeros(new_cap, dtype=old.dtype)
            arr[:cap] = old
            setattr(self, name, arr)

    def _alloc(self, size: int) -> int:
        if self._used + size > len(self._pool):
            live_slots = int(self._slot[: self._n][self._alive[: self._n]].sum())
            if self._used > 2 * live_slots + 1024:
                self._compact()
            if self._used + size > len(self._pool):
                pool = np.zeros(max(2 * len(self._pool), self._used + size), dtype=np.int32)
                pool[: self._used] = self._pool[: self._used]
                self._pool = pool
        off = self._used
        self._used += size
        return off

    def _compact(self) -> None:
        pool = np.zeros(len(self._pool), dtype=np.int32)
        off = 0
        for v in range(self._n):
            if not self._alive[v]:
                self._slot[v] = 0
                self._deg[v] = 0
                continue
            s, k, slot = self._start[v], self._deg[v], self._slot[v]
            pool[off : off + k] = self._pool[s : s + k]
            self._start[v] = off
            off += slot
        self._pool = pool
        self._used = off

    def add_vertex(self) -> int:
        v = self._n
        if v >= self.max_vertices:
            raise CapacityError(f"id overflow: vertex id {v} does not fit 25 bits")
        self._reserve_ids(v + 1)
        self._start[v] = self._alloc(4)
        self._slot[v] = 4
        self._deg[v] = 0
        self._alive[v] = True
        self._n += 1
        self._live += 1
        return v

    def _push(self, u: int, v: int) -> None:
        k = int(self._deg[u])
        if k == self._slot[u]:
            new_slot = max(4, 2 * k)
            off = self._alloc(new_slot)
            s = self._start[u]
            self._pool[off : off + k] = self._pool[s : s + k]
            self._start[u] = off
            self._slot[u] = new_slot
        self._pool[self._start[u] + k] = v
        self._deg[u] = k + 1

    def _drop(self, u: int, v: int) -> None:
        s, k = self._start[u], int(self._deg[u])
        view = self._pool[s : s + k]
        i = int(np.flatnonzero(view == v)[0])
        view[i] = view[k - 1]
        self._deg[u] = k - 1

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise GraphError(f"self-loop ({u},{v})")
        self.require_alive(u)
        self.require_alive(v)
        if self.has_edge(u, v):
            raise GraphError(f"edge exists ({u},{v})")
        self._push(u, v)
        self._push(v, u)
        self._m += 1

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise GraphError(f"no such edge ({u},{v})")
        self._drop(u, v)
        self._drop(v, u)
        self._m -= 1

    def remove_vertex(self, v: int) -> None:
        """Drop all edges of ``v`` and tombstone it."""
        for _, w in self.incident_edges(v):
            self.remove_edge(v, w)
        self._alive[v] = False
        self._live -= 1

    def copy(self) -> DynamicGraph:
        g = DynamicGraph.__new__(DynamicGraph)
        for name in ("_start", "_deg", "_slot", "_alive", "_pool"):
            setattr(g, name, getattr(self, name).copy())
        g._used, g._n, g._m, g._live = self._used, self._n, self._m, self._live
        return g

    def kernel_view(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(pool, start, deg)`` arrays consumed by the compiled kernels."""
        return self._pool, self._start, self._deg

    def check_invariants(self) -> None:
        """Full scan: symmetry, simplicity, liveness and the edge-count identity."""
        total = 0
        for v in range(self._n):
            if not self._alive[v]:
                if self._deg[v]:
                    raise AssertionError(f"dead vertex {v} has neighbours")
                continue
            nb = self.neighbors(v)
            total += len(nb)
            if len(set(nb.tolist())) != len(nb):
                raise AssertionError(f"parallel edge at {v}")
            for w in nb:
                w = int(w)
                if w == v:
                    raise AssertionError(f"self-loop at {v}")
                if not self.is_alive(w) or v not in self.neighbors(w):
                    raise AssertionError(f"asymmetric edge ({v},{w})")
        if total != 2 * self._m:
            raise AssertionError(f"edge_count {self._m} != {total}/2")
        if int(self._alive[: self._n].sum()) != self._live:
            raise AssertionError("vertex_count drift")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DynamicGraph):
            return NotImplemented
        return self._n == other._n and self.adjacency_sets() == other.adjacency_sets()

    def __repr__(self) -> str:
        return f"DynamicGraph(n={self._live}, m={self._m})"


class VertexOrdering:
    """Total order over vertex ids; rank 0 is the highest-ranked vertex."""

    def __init__(self, vertex_at: Sequence[int]):
        vertex_at = np.asarray(vertex_at, dtype=np.int64)
        n = len(vertex_at)
        if n and not np.array_equal(np.sort(vertex_at), np.arange(n)):
            raise GraphError("ordering is not a permutation of 0..n-1")
        self._vertex_at = vertex_at.astype(np.int32)
        self._rank_of = np.empty(n, dtype=np.int32)
        self._rank_of[self._vertex_at] = np.arange(n, dtype=np.int32)

    def __len__(self) -> int:
        return len(self._vertex_at)

    def rank(self, v: int) -> int:
        return int(self._rank_of[v])

    def vertex(self, r: int) -> int:
        return int(self._vertex_at[r])

    def higher(self, u: int, v: int) -> bool:
        """True iff ``u`` outranks ``v``."""
        return self._rank_of[u] < self._rank_of[v]

    @property
    def rank_of(self) -> np.ndarray:
        return self._rank_of

    @property
    def vertex_at(self) -> np.ndarray:
        return self._vertex_at

    def append(self, v: int) -> int:
        """Give the next new id ``v`` the lowest rank; returns that rank."""
        if v != len(self._vertex_at):
            raise GraphError(f"appended id {v} is not the next id {len(self._vertex_at)}")
        r = len(self._vertex_at)
        self._vertex_at = np.append(self._vertex_at, np.int32(v))
        self._rank_of = np.append(self._rank_of, np.int32(r))
        return r

    def copy(self) -> VertexOrdering:
        return VertexOrdering(self._vertex_at.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexOrdering):
            return NotImplemented
        return np.array_equal(self._vertex_at, other._vertex_at)

    def __repr__(self) -> str:
        head = ", ".join(str(int(v)) for v in self._vertex_at[:8])
        return f"VertexOrdering([{head}{', ...' if len(self) > 8 else ''}])"


def compute_degree_ordering(g: DynamicGraph) -> VertexOrdering:
    """Descending degree, ties by ascending id; tombstoned ids go last."""
    n = g.num_ids
    _, _, deg = g.kernel_view()
    deg = deg[:n].astype(np.int64)
    alive = g._alive[:n]
    key_dead = (~alive).astype(np.int64)
    order = np.lexsort((np.arange(n), -deg, key_dead))
    return VertexOrdering(order)


def read_edge_list(path: str | os.PathLike) -> DynamicGraph:
    """Parse a whitespace-separated ``u v`` edge list; ``#`` starts a comment line."""
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    n = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'u v', got {line!r}", lineno, str(path))
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer vertex id in {line!r}", lineno, str(path)) from None
            if u < 0 or v < 0:
                raise ParseError(f"negative vertex id in {line!r}", lineno, str(path))
            if u == v:
                raise ParseError(f"self-loop ({u},{v})", lineno, str(path))
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParseError(f"duplicate edge ({u},{v})", lineno, str(path))
            seen.add(key)
            edges.append((u, v))
            n = max(n, u + 1, v + 1)
    if n > MAX_VERTICES:
        raise CapacityError(f"id overflow: {n} vertices do not fit 25 bits")
    return DynamicGraph.from_edges(n, edges)


def write_edge_list(g: DynamicGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_ordering(path: str | os.PathLike) -> VertexOrdering:
    """Ordering file: vertex ids from highest to lowest rank, whitespace separated."""
    ids: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0]
            for tok in line.split():
                try:
                    ids.append(int(tok))
                except ValueError:
                    raise ParseError(f"bad vertex id {tok!r}", lineno, str(path)) from None
    try:
        return VertexOrdering(ids)
    except GraphError as exc:
        raise ParseError(str(exc), None, str(path)) from None
