"""Bit-packed binary index files.

Each label entry is one little-endian 64-bit word::

    bits 63..39  hub id     (25 bits)
    bits 38..29  distance   (10 bits)
    bits 28..0   count      (29 bits)

A file is the magic ``b"DSPC"``, a version byte, ``n`` as a u64, then for
every vertex id in order a u32 entry count followed by that many words,
highest-ranked hub first. Tombstoned ids are written with zero entries.

The ordering is not stored. :func:`load` either takes it from the caller
or rebuilds a compatible one from the hub order inside the labels.
"""

from __future__ import annotations

import heapq
import io
import os
import struct

import numpy as np

from .errors import IndexFormatError, PackOverflowError
from .graph import VertexOrdering
from .index import LabelEntry, SpcIndex

MAGIC = b"DSPC"
VERSION = 1
HUB_BITS, DIST_BITS, COUNT_BITS = 25, 10, 29
HUB_SHIFT = DIST_BITS + COUNT_BITS
DIST_SHIFT = COUNT_BITS
_HEADER = struct.Struct("<4sBQ")
_U32 = struct.Struct("<I")


def max_count_bits() -> int:
    """Serialization count bound taken from ``DSPC_MAX_COUNT_BITS`` (default 29)."""
    raw = os.environ.get("DSPC_MAX_COUNT_BITS", str(COUNT_BITS))
    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(f"DSPC_MAX_COUNT_BITS must be an integer, got {raw!r}") from None
    if not 1 <= bits <= COUNT_BITS:
        raise ValueError(f"DSPC_MAX_COUNT_BITS must lie in [1, {COUNT_BITS}], got {bits}")
    return bits


def pack_entry(e: LabelEntry | tuple[int, int, int], count_bits: int | None = None) -> int:
    hub, dist, count = (int(x) for x in e)
    count_bits = max_count_bits() if count_bits is None else count_bits
    for name, value, bits in (("hub", hub, HUB_BITS), ("dist", dist, DIST_BITS), ("count", count, count_bits)):
        if not 0 <= value < (1 << bits):
            raise PackOverflowError(name, value, bits)
    return (hub << HUB_SHIFT) | (dist << DIST_SHIFT) | count


def unpack_entry(word: int) -> LabelEntry:
    word = int(word)
    if not 0 <= word < (1 << 64):
        raise ValueError(f"not a 64-bit word: {word}")
    return LabelEntry(word >> HUB_SHIFT, (word >> DIST_SHIFT) & ((1 << DIST_BITS) - 1),
                      word & ((1 << COUNT_BITS) - 1))


def _pack_vertex(hubs: np.ndarray, dists: np.ndarray, counts: np.ndarray, v: int, count_bits: int) -> np.ndarray:
    for name, arr, bits in (("hub", hubs, HUB_BITS), ("dist", dists, DIST_BITS), ("count", counts, count_bits)):
        bad = np.flatnonzero(arr >= (1 << bits))
        if bad.size:
            k = int(bad[0])
            err = PackOverflowError(name, int(arr[k]), bits)
            err.args = (f"{err.args[0]} in label ({int(hubs[k])},{int(dists[k])},{int(counts[k])}) of vertex {v}",)
            raise err
    return ((hubs.astype(np.uint64) << np.uint64(HUB_SHIFT))
            | (dists.astype(np.uint64) << np.uint64(DIST_SHIFT))
            | counts.astype(np.uint64))


def dumps(idx: SpcIndex) -> bytes:
    count_bits = max_count_bits()
    hub, dist, cnt, size = idx.kernel_view()
    vertex_at = idx.ordering.vertex_at
    n = idx.num_ids
    out = io.BytesIO()
    out.write(_HEADER.pack(MAGIC, VERSION, n))
    for v in range(n):
        k = int(size[v])
        out.write(_U32.pack(k))
        if k:
            hubs = vertex_at[np.asarray(hub[v][:k])]
            words = _pack_vertex(hubs, np.asarray(dist[v][:k]), np.asarray(cnt[v][:k]), v, count_bits)
            out.write(words.astype("<u8").tobytes())
    return out.getvalue()


def save(idx: SpcIndex, sink) -> None:
    """Write ``idx`` to a path or a binary file object."""
    data = dumps(idx)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as f:
            f.write(data)


def _parse(data: bytes) -> list[np.ndarray]:
    if len(data) < _HEADER.size:
        if not MAGIC.startswith(data[:4]):
            raise IndexFormatError("bad magic")
        raise IndexFormatError("unexpected end of index file in header")
    magic, version, n = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise IndexFormatError("bad magic")
    if version != VERSION:
        raise IndexFormatError(f"unsupported format version {version}")
    if n > (1 << HUB_BITS):
        raise IndexFormatError(f"vertex count {n} exceeds the hub field")
    pos = _HEADER.size
    words: list[np.ndarray] = []
    for v in range(n):
        if pos + 4 > len(data):
            raise IndexFormatError(f"unexpected end of index file at vertex {v}")
        (k,) = _U32.unpack_from(data, pos)
        pos += 4
        end = pos + 8 * k
        if end > len(data):
            raise IndexFormatError(f"unexpected end of index file in labels of vertex {v}")
        words.append(np.frombuffer(data, dtype="<u8", count=k, offset=pos).astype(np.uint64))
        pos = end
    if pos != len(data):
        raise IndexFormatError(f"{len(data) - pos} trailing bytes after the last vertex")
    return words


def infer_ordering(hub_lists: list[np.ndarray]) -> VertexOrdering:
    """A total order consistent with the hub order of every label set.

    Consecutive hubs of each label set give precedence edges; the result is
    the topological order that breaks ties by ascending id. Ids without
    labels go last.
    """
    n = len(hub_lists)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = np.zeros(n, dtype=np.int64)
    live = []
    for v, hubs in enumerate(hub_lists):
        if hubs.size == 0:
            continue
        live.append(v)
        for x, y in zip(hubs[:-1].tolist(), hubs[1:].tolist()):
            succ[x].append(y)
            indeg[y] += 1
    heap = [v for v in live if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        x = heapq.heappop(heap)
        order.append(x)
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, y)
    if len(order) != len(live):
        raise IndexFormatError("label hub orders are cyclic; no consistent ordering exists")
    order += [v for v in range(n) if hub_lists[v].size == 0]
    return VertexOrdering(order)


def loads(data: bytes, ordering: VertexOrdering | None = None) -> SpcIndex:
    words = _parse(data)
    n = len(words)
    hub_ids = [(w >> np.uint64(HUB_SHIFT)).astype(np.int64) for w in words]
    live = np.array([w.size > 0 for w in words], dtype=np.bool_)
    for v, hubs in enumerate(hub_ids):
        if hubs.size == 0:
            continue
        if int(hubs.max()) >= n:
            raise IndexFormatError(f"label of vertex {v} names hub {int(hubs.max())} >= n={n}")
        if not live[hubs].all():
            h = int(hubs[~live[hubs]][0])
            raise IndexFormatError(f"label of vertex {v} names dead hub {h}")
    if ordering is None:
        ordering = infer_ordering(hub_ids)
    elif len(ordering) != n:
        raise IndexFormatError(f"ordering covers {len(ordering)} ids, file has {n}")
    idx = SpcIndex(ordering.copy(), _empty=True)
    rank_of = idx.ordering.rank_of
    dmask = np.uint64((1 << DIST_BITS) - 1)
    cmask = np.uint64((1 << COUNT_BITS) - 1)
    for v, w in enumerate(words):
        if w.size == 0:
            continue
        idx._hub[v] = rank_of[hub_ids[v]].astype(np.int32)
        idx._dist[v] = ((w >> np.uint64(DIST_SHIFT)) & dmask).astype(np.int32)
        idx._cnt[v] = (w & cmask).astype(np.uint64)
        idx._size[v] = w.size
        np.add.at(idx._refs, idx._hub[v], 1)
    try:
        idx.check_invariants()
    except AssertionError as exc:
        raise IndexFormatError(f"invariant violated: {exc}") from None
    return idx


def load(source, ordering: VertexOrdering | None = None) -> SpcIndex:
    """Read an index from a path or binary file object and re-validate it."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as f:
            data = f.read()
    return loads(data, ordering)


def file_size(idx: SpcIndex) -> int:
    """Bytes :func:`save` would write, without packing anything."""
    return _HEADER.size + 4 * idx.num_ids + 8 * idx.entry_count()


__all__ = ["pack_entry", "unpack_entry", "save", "load", "dumps", "loads", "infer_ordering",
           "file_size", "max_count_bits"]
