from __future__ import annotations

import random
from pathlib import Path

import pytest

from dspc.graph import DynamicGraph, VertexOrdering, compute_degree_ordering, read_edge_list
from dspc.index import build

DATA = Path(__file__).parent / "data"
FIG2_EDGES = DATA / "fig2.edges"
FIG2_ORDER = DATA / "fig2.order"

# the 50-entry index of the 12-vertex worked example, ordering v0 <= ... <= v11
TABLE2 = {
    0: [(0, 0, 1)],
    1: [(0, 1, 1), (1, 0, 1)],
    2: [(0, 1, 1), (1, 1, 1), (2, 0, 1)],
    3: [(0, 1, 1), (1, 2, 1), (2, 1, 1), (3, 0, 1)],
    4: [(0, 3, 3), (1, 2, 1), (2, 2, 1), (3, 2, 1), (4, 0, 1)],
    5: [(0, 2, 2), (1, 1, 1), (2, 1, 1), (4, 1, 1), (5, 0, 1)],
    6: [(0, 2, 1), (1, 1, 1), (4, 3, 1), (6, 0, 1)],
    7: [(0, 2, 1), (1, 3, 2), (2, 2, 1), (3, 1, 1), (4, 1, 1), (7, 0, 1)],
    8: [(0, 1, 1), (2, 2, 1), (3, 1, 1), (8, 0, 1)],
    9: [(0, 4, 4), (1, 3, 2), (2, 3, 1), (3, 3, 1), (4, 1, 1), (6, 2, 1), (9, 0, 1)],
    10: [(0, 3, 1), (1, 2, 1), (3, 4, 1), (4, 2, 1), (6, 1, 1), (9, 1, 1), (10, 0, 1)],
    11: [(0, 1, 1), (11, 0, 1)],
}


def fig2_graph() -> DynamicGraph:
    return read_edge_list(FIG2_EDGES)


def fig2_ordering() -> VertexOrdering:
    return VertexOrdering(range(12))


@pytest.fixture
def fig2():
    """(graph, index) of the worked example under its stated ordering."""
    g = fig2_graph()
    return g, build(g, fig2_ordering())


def as_tuples(idx) -> dict[int, list[tuple[int, int, int]]]:
    return {v: [tuple(e) for e in labels] for v, labels in idx.as_dict().items()}


def random_graph(rng: random.Random, n: int, avg_deg: float) -> DynamicGraph:
    """Erdos-Renyi G(n, p) with expected average degree ``avg_deg``."""
    p = min(1.0, avg_deg / max(n - 1, 1))
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return DynamicGraph.from_edges(n, edges)


def random_tree(rng: random.Random, n: int) -> DynamicGraph:
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    perm = list(range(n))
    rng.shuffle(perm)
    return DynamicGraph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])


def barabasi_albert(n: int, m: int, seed: int) -> DynamicGraph:
    """Preferential attachment: each new vertex links to ``m`` distinct earlier ones."""
    rng = random.Random(seed)
    edges: set[tuple[int, int]] = set()
    repeated: list[int] = []
    for v in range(m, n):
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(rng.choice(repeated) if repeated else rng.randrange(m))
        for u in chosen:
            edges.add((u, v))
            repeated += [u, v]
    return DynamicGraph.from_edges(n, sorted(edges))


def degree_built(g: DynamicGraph):
    return build(g, compute_degree_ordering(g))


def random_op(rng: random.Random, g: DynamicGraph, idx):
    """Apply one random mixed update to ``g``/``idx``; returns the op tuple or ``None``."""
    from dspc.updates import dec_spc, delete_vertex, inc_spc, insert_vertex

    live = g.vertices()
    r = rng.random()
    if r < 0.4 and len(live) >= 2:
        a, b = rng.sample(live, 2)
        if g.has_edge(a, b):
            return None
        inc_spc(g, idx, a, b)
        return ("I", a, b)
    if r < 0.8 and g.edge_count:
        a, b = rng.choice(list(g.edges()))
        dec_spc(g, idx, a, b)
        return ("D", a, b)
    if r < 0.9:
        return ("AV", insert_vertex(g, idx))
    if live:
        v = rng.choice(live)
        delete_vertex(g, idx, v)
        return ("DV", v)
    return None


# -- acceptance reporting ----------------------------------------------------
# tests marked ``criterion(n, title)`` get one PASS/FAIL line in the terminal
# summary; ``note(n, text)`` attaches measured numbers to that line

_CRITERIA: dict[int, dict[str, str]] = {}


def note(n: int, text: str) -> None:
    _CRITERIA.setdefault(n, {}).setdefault("notes", "")
    _CRITERIA[n]["notes"] += (" " if _CRITERIA[n]["notes"] else "") + text


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    entry = _CRITERIA.setdefault(n, {})
    entry["title"] = title
    if rep.failed or entry.get("status") != "FAIL":
        entry["status"] = "FAIL" if rep.failed else ("SKIP" if rep.skipped else "PASS")


def pytest_terminal_summary(terminalreporter):
    rows = {n: e for n, e in _CRITERIA.items() if "status" in e}
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(rows):
        e = rows[n]
        extra = f" [{e['notes']}]" if e.get("notes") else ""
        terminalreporter.write_line(f"criterion {n:>2} {e['status']}: {e['title']}{extra}")
