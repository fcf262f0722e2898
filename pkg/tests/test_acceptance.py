"""End-to-end acceptance checks, one test per criterion.

Each test is tagged with ``criterion(n, title)``; the terminal summary
prints one PASS/FAIL line per criterion with the measured numbers.
"""

from __future__ import annotations

import random
import time

import numpy as np
import pytest

from conftest import (
    TABLE2,
    as_tuples,
    barabasi_albert,
    degree_built,
    fig2_graph,
    fig2_ordering,
    note,
    random_graph,
    random_op,
    random_tree,
)
from dspc.errors import PackOverflowError
from dspc.graph import compute_degree_ordering
from dspc.index import build
from dspc.oracle import bibfs_query, hat_labels, validate_index
from dspc.serialize import dumps, loads, pack_entry, unpack_entry
from dspc.updates import AffectedSets, dec_spc, inc_spc, warm_up


@pytest.fixture(scope="module", autouse=True)
def _jit_ready():
    warm_up()


@pytest.mark.criterion(1, "golden build reproduces the 50-entry index")
def test_c1_golden_build():
    g, order = fig2_graph(), fig2_ordering()
    t0 = time.perf_counter()
    idx = build(g, order)
    elapsed = time.perf_counter() - t0
    note(1, f"entries={idx.entry_count()} build={elapsed * 1e3:.2f}ms")
    assert as_tuples(idx) == TABLE2
    assert elapsed < 1.0


@pytest.mark.criterion(2, "golden query (v4,v6) = (3,2)")
def test_c2_golden_query(fig2):
    _, idx = fig2
    assert idx.query(4, 6) == (3, 2)


@pytest.mark.criterion(3, "golden incremental update (v3,v9)")
def test_c3_golden_incremental(fig2):
    g, idx = fig2
    inc_spc(g, idx, 3, 9)
    got = as_tuples(idx)
    assert {(0, 2, 1), (1, 3, 3), (2, 2, 1)} <= set(got[9])
    assert idx.get_label(4, 0) == (0, 3, 4)
    assert idx.get_label(10, 0) == (0, 3, 2)
    assert (2, 3, 1) in got[10]
    rep = validate_index(g, idx)
    note(3, f"checked={rep.checked} mismatches={len(rep.mismatches)}")
    assert rep.ok


@pytest.mark.criterion(4, "golden decremental update (v1,v2)")
def test_c4_golden_decremental(fig2):
    g, idx = fig2
    sets = AffectedSets()
    dec_spc(g, idx, 1, 2, sets=sets)
    assert sets.sr_a == {1, 6, 10} and sets.sr_b == {2}
    assert sets.r_b == {3, 7} and sets.r_a == set()
    after = as_tuples(idx)
    changes = set()
    for v in TABLE2:
        changes |= {(v, "-", e) for e in set(TABLE2[v]) - set(after[v])}
        changes |= {(v, "+", e) for e in set(after[v]) - set(TABLE2[v])}
    # four label changes: two renewals (each a -/+ pair), one insertion, one removal
    assert changes == {
        (2, "-", (1, 1, 1)), (2, "+", (1, 2, 1)),
        (7, "-", (1, 3, 2)), (7, "+", (1, 3, 1)),
        (3, "-", (1, 2, 1)),
        (10, "+", (2, 4, 1)),
    }
    rep = validate_index(g, idx)
    note(4, f"checked={rep.checked} mismatches={len(rep.mismatches)}")
    assert rep.ok


@pytest.mark.criterion(5, "randomized mixed-op streams stay exact")
def test_c5_random_streams():
    t0 = time.perf_counter()
    graphs = ops = checks = 0
    for seed in range(200):
        rng = random.Random(1000 + seed)
        n = rng.randint(2, 60)
        g = random_graph(rng, n, rng.uniform(1, 8))
        idx = degree_built(g)
        graphs += 1
        applied = 0
        while applied < 30:
            op = random_op(rng, g, idx)
            if op is None:
                continue
            applied += 1
            rep = validate_index(g, idx)
            checks += rep.checked
            assert rep.ok, (seed, applied, op, rep.lines()[:3])
        ops += applied
    elapsed = time.perf_counter() - t0
    note(5, f"graphs={graphs} ops={ops} pair_checks={checks} time={elapsed:.0f}s")
    assert elapsed < 300


@pytest.mark.criterion(6, "fresh build equals the rank-restricted characterization")
def test_c6_characterization():
    rng = random.Random(6)
    for _ in range(60):
        g = random_graph(rng, rng.randint(1, 30), rng.uniform(0.5, 6))
        order = compute_degree_ordering(g)
        idx = build(g, order)
        built = {v: {tuple(e) for e in labels} for v, labels in idx.as_dict().items()}
        assert built == hat_labels(g, order)
    note(6, "graphs=60")


@pytest.mark.criterion(7, "fast path equals the general path on leaf deletions")
def test_c7_fast_path_equivalence():
    rng = random.Random(7)
    graphs = [fig2_graph()] + [random_tree(rng, rng.randint(2, 40)) for _ in range(60)]
    cases = fast = 0
    for i, g in enumerate(graphs):
        idx = build(g, fig2_ordering()) if i == 0 else degree_built(g)
        for a, b in list(g.edges()):
            if g.degree(a) != 1 and g.degree(b) != 1:
                continue
            g1, i1 = g.copy(), idx.copy()
            g2, i2 = g.copy(), idx.copy()
            fast += dec_spc(g1, i1, a, b).fast_path
            dec_spc(g2, i2, a, b, allow_fast_path=False)
            pairs = [(s, t) for s in g1.vertices() for t in g1.vertices()]
            assert i1.query_many(pairs) == i2.query_many(pairs), (i, a, b)
            cases += 1
    note(7, f"graphs={len(graphs)} leaf_edges={cases} fast_path_taken={fast}")
    assert fast > 0


@pytest.mark.criterion(8, "serialization round trips and overflow errors")
def test_c8_serialization(fig2):
    _, idx = fig2
    data = dumps(idx)
    assert dumps(loads(data, fig2_ordering())) == data
    rng = random.Random(8)
    g = random_graph(rng, 80, 4)
    big = degree_built(g)
    for _ in range(20):
        random_op(rng, g, big)
    data = dumps(big)
    assert dumps(loads(data, big.ordering)) == data
    nprng = np.random.default_rng(8)
    hubs = nprng.integers(0, 2**25, 10**5)
    dists = nprng.integers(0, 2**10, 10**5)
    counts = nprng.integers(0, 2**29, 10**5)
    for e in zip(hubs.tolist(), dists.tolist(), counts.tolist()):
        assert unpack_entry(pack_entry(e)) == e
    for bad, field in (((2**25, 0, 1), "hub"), ((0, 2**10, 1), "dist"), ((0, 0, 2**29), "count")):
        with pytest.raises(PackOverflowError, match=f"pack overflow: {field}"):
            pack_entry(bad)
    note(8, "triples=100000")


@pytest.mark.criterion(9, "updates beat a full rebuild on a 5e4-vertex graph")
def test_c9_indicative_performance():
    t_start = time.perf_counter()
    g = barabasi_albert(50_000, 4, seed=7)
    t0 = time.perf_counter()
    idx = build(g, compute_degree_ordering(g))
    t_build = time.perf_counter() - t0
    rng = random.Random(9)
    verts = g.vertices()
    inc = []
    while len(inc) < 100:
        a, b = rng.sample(verts, 2)
        if g.has_edge(a, b):
            continue
        inc.append(inc_spc(g, idx, a, b).elapsed)
    edges = list(g.edges())
    dec = [dec_spc(g, idx, *edges.pop(rng.randrange(len(edges)))).elapsed for _ in range(20)]
    sampled = validate_index(g, idx, mode=200, seed=9)
    total = time.perf_counter() - t_start
    inc_mean, dec_mean = float(np.mean(inc)), float(np.mean(dec))
    note(9, f"n={g.vertex_count} m={g.edge_count} build={t_build:.1f}s "
            f"inc_mean={inc_mean * 1e3:.1f}ms ({t_build / inc_mean:.0f}x) "
            f"dec_mean={dec_mean:.2f}s ({t_build / dec_mean:.1f}x) total={total:.0f}s")
    assert sampled.ok
    assert inc_mean * 10 <= t_build
    assert dec_mean * 2 <= t_build
    assert total < 600


@pytest.mark.criterion(10, "label and bidirectional-BFS engines agree")
def test_c10_engine_agreement():
    rng = random.Random(10)
    pairs_checked = 0
    for n, deg in ((200, 2), (500, 3), (1000, 4), (2000, 1.5), (3000, 6)):
        g = random_graph(rng, n, deg) if n <= 1000 else barabasi_albert(n, int(deg) or 1, rng.randrange(1 << 30))
        idx = degree_built(g)
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(2000)]
        got = idx.query_many(pairs)
        for (s, t), r in zip(pairs, got):
            assert r == bibfs_query(g, s, t), (n, s, t)
        pairs_checked += len(pairs)
    note(10, f"pairs={pairs_checked} graphs=5")
    assert pairs_checked >= 10**4
