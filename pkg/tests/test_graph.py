from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG2_EDGES, fig2_graph
from dspc.errors import CapacityError, GraphError, ParseError
from dspc.graph import (
    MAX_VERTICES,
    DynamicGraph,
    VertexOrdering,
    compute_degree_ordering,
    read_edge_list,
    read_ordering,
    write_edge_list,
)


def test_fixture_shape():
    g = fig2_graph()
    assert (g.vertex_count, g.edge_count) == (12, 17)
    g.check_invariants()


def test_add_vertex_on_empty_graph():
    g = DynamicGraph()
    assert g.add_vertex() == 0
    assert compute_degree_ordering(g).rank(0) == 0


def test_add_vertex_appends_lowest_rank():
    g = fig2_graph()
    order = VertexOrdering(range(12))
    v = g.add_vertex()
    assert v == 12
    assert order.append(v) == 12
    assert order.rank(12) == 12
    assert g.degree(12) == 0


def test_add_vertex_id_overflow():
    assert MAX_VERTICES == DynamicGraph.max_vertices == 1 << 25
    g = DynamicGraph()
    g.max_vertices = 3  # same check as the 25-bit bound, without 2^25 allocations
    for _ in range(3):
        g.add_vertex()
    with pytest.raises(CapacityError, match="id overflow"):
        g.add_vertex()


def test_add_edge_updates_degree():
    g = fig2_graph()
    g.add_edge(3, 9)
    assert g.degree(9) == 3
    assert g.edge_count == 18
    g.check_invariants()


@pytest.mark.parametrize("edge,msg", [((0, 1), "edge exists"), ((5, 5), "self-loop"), ((0, 40), "unknown vertex")])
def test_add_edge_errors(edge, msg):
    g = fig2_graph()
    with pytest.raises(GraphError, match=msg):
        g.add_edge(*edge)


def test_remove_edge():
    g = fig2_graph()
    g.remove_edge(1, 2)
    assert (g.degree(1), g.degree(2)) == (3, 3)
    with pytest.raises(GraphError, match="no such edge"):
        g.remove_edge(0, 4)


def test_remove_then_readd_restores_graph():
    g = fig2_graph()
    h = g.copy()
    g.remove_edge(1, 2)
    g.add_edge(2, 1)
    assert g == h
    assert g.adjacency_sets() == h.adjacency_sets()


def test_incident_edges():
    g = fig2_graph()
    assert g.incident_edges(11) == [(11, 0)]
    assert sorted(g.incident_edges(4)) == [(4, 5), (4, 7), (4, 9)]
    v = g.add_vertex()
    assert g.incident_edges(v) == []
    g.remove_vertex(4)
    with pytest.raises(GraphError):
        g.incident_edges(4)


def test_remove_vertex_tombstones_id():
    g = fig2_graph()
    g.remove_vertex(0)
    assert not g.is_alive(0)
    assert g.edge_count == 12
    assert g.add_vertex() == 12  # ids are never reused
    g.check_invariants()


def test_degree_ordering_rules():
    star = DynamicGraph.from_edges(5, [(3, 0), (3, 1), (3, 2), (3, 4)])
    assert compute_degree_ordering(star).vertex(0) == 3
    assert list(compute_degree_ordering(DynamicGraph(2)).vertex_at) == [0, 1]
    assert compute_degree_ordering(fig2_graph()).vertex(0) == 0


def test_degree_ordering_is_permutation():
    order = compute_degree_ordering(fig2_graph())
    assert sorted(order.vertex_at.tolist()) == list(range(12))
    for r in range(12):
        assert order.rank(order.vertex(r)) == r


def test_degree_ordering_non_increasing():
    g = fig2_graph()
    degs = [g.degree(v) for v in compute_degree_ordering(g).vertex_at]
    assert degs == sorted(degs, reverse=True)


def test_edge_list_roundtrip(tmp_path):
    g = fig2_graph()
    p = tmp_path / "g.txt"
    write_edge_list(g, p)
    assert read_edge_list(p) == g


@pytest.mark.parametrize("body,line,msg", [
    ("0 1\n1 0\n", 2, "duplicate"),
    ("# c\n0 1\n\n2 2\n", 4, "self-loop"),
    ("0 1\nx y\n", 2, "non-integer"),
    ("0 1 2\n", 1, "expected"),
])
def test_edge_list_errors_carry_line(tmp_path, body, line, msg):
    p = tmp_path / "bad.txt"
    p.write_text(body)
    with pytest.raises(ParseError, match=msg) as err:
        read_edge_list(p)
    assert err.value.line == line


def test_empty_edge_list(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("# nothing\n")
    g = read_edge_list(p)
    assert g.vertex_count == 0 and g.edge_count == 0


def test_read_ordering(tmp_path):
    p = tmp_path / "o.txt"
    p.write_text("# top first\n2 0\n1\n")
    o = read_ordering(p)
    assert list(o.vertex_at) == [2, 0, 1]
    p.write_text("0 0 1\n")
    with pytest.raises(ParseError):
        read_ordering(p)


def test_fixture_file_has_17_edges():
    assert sum(1 for line in FIG2_EDGES.read_text().splitlines() if line and not line.startswith("#")) == 17


ops = st.lists(st.tuples(st.sampled_from("ard"), st.integers(0, 11), st.integers(0, 11)), max_size=60)


@settings(max_examples=150, deadline=None)
@given(ops)
def test_invariants_hold_under_random_mutation(seq):
    g = DynamicGraph(6)
    for kind, u, v in seq:
        try:
            if kind == "a":
                g.add_edge(u, v)
            elif kind == "r":
                g.remove_edge(u, v)
            elif g.is_alive(u) and u % 4 == 0:
                g.remove_vertex(u)
            else:
                g.add_vertex()
        except GraphError:
            pass
        g.check_invariants()
    assert g.edge_count == sum(g.degree(v) for v in g.vertices()) // 2


@settings(max_examples=100, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 9), st.integers(0, 9)).filter(lambda e: e[0] != e[1]), max_size=25),
       st.tuples(st.integers(0, 9), st.integers(0, 9)).filter(lambda e: e[0] != e[1]))
def test_add_remove_inverse(edges, extra):
    es = {(min(u, v), max(u, v)) for u, v in edges}
    g = DynamicGraph.from_edges(10, sorted(es))
    if g.has_edge(*extra):
        return
    h = g.copy()
    g.add_edge(*extra)
    g.remove_edge(*extra)
    assert g.adjacency_sets() == h.adjacency_sets()
