"""Neighborhood and distance primitives, and GridGraph structural invariants."""

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridcodes.errors import NotFoundError, SchemaError
from gridcodes.graphs import (
    Bus, GridGraph, Line, SimpleGraph, Transformer,
    closed_neighbors, khop, neighbors,
)


def path_graph():
    g = SimpleGraph(nodes=[1, 2, 3])
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    return g


class TestNeighbors:
    def test_pair_node_sees_its_two_hubs(self, ten_node):
        assert neighbors(ten_node, 5) == {1, 2}

    def test_isolated_node_has_no_neighbors(self):
        g = SimpleGraph(nodes=[7])
        assert neighbors(g, 7) == frozenset()

    def test_path_middle(self):
        assert neighbors(path_graph(), 2) == {1, 3}

    def test_unknown_node(self, ten_node):
        with pytest.raises(NotFoundError):
            neighbors(ten_node, 99)


class TestClosedNeighbors:
    def test_always_contains_self(self, ten_node):
        for v in ten_node.node_ids:
            assert v in closed_neighbors(ten_node, v)

    def test_isolated(self):
        g = SimpleGraph(nodes=[3])
        assert closed_neighbors(g, 3) == {3}

    def test_path_middle(self):
        assert closed_neighbors(path_graph(), 2) == {1, 2, 3}

    def test_unknown_node(self):
        with pytest.raises(NotFoundError):
            closed_neighbors(path_graph(), 42)

    def test_size_is_degree_plus_one(self, ten_node):
        for v in ten_node.node_ids:
            assert len(closed_neighbors(ten_node, v)) == len(neighbors(ten_node, v)) + 1


class TestKhop:
    def test_zero_hops_is_empty(self, ten_node):
        for v in ten_node.node_ids:
            assert khop(ten_node, v, 0) == frozenset()

    def test_path_two_hops(self):
        assert khop(path_graph(), 1, 2) == {2, 3}

    def test_excludes_source(self, ten_node):
        assert 5 not in khop(ten_node, 5, 3)

    def test_unknown_source(self):
        with pytest.raises(NotFoundError):
            khop(path_graph(), 9, 1)

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            khop(path_graph(), 1, -1)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    possible = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(possible), max_size=30, unique=True)) if possible else []
    g = SimpleGraph(nodes=range(n), edges=edges)
    return g


@settings(max_examples=80, deadline=None)
@given(g=small_graphs(), data=st.data())
def test_khop_matches_shortest_path_oracle(g, data):
    source = data.draw(st.sampled_from(g.node_ids))
    k = data.draw(st.integers(min_value=0, max_value=4))
    lengths = nx.single_source_shortest_path_length(_to_nx(g), source, cutoff=k)
    assert khop(g, source, k) == {v for v, d in lengths.items() if 1 <= d <= k}


@settings(max_examples=60, deadline=None)
@given(g=small_graphs(), data=st.data())
def test_khop_monotone_in_k(g, data):
    source = data.draw(st.sampled_from(g.node_ids))
    k = data.draw(st.integers(min_value=0, max_value=3))
    assert khop(g, source, k) <= khop(g, source, k + 1)


@settings(max_examples=60, deadline=None)
@given(g=small_graphs())
def test_neighbor_symmetry(g):
    for v in g.node_ids:
        for u in neighbors(g, v):
            assert v in neighbors(g, u)


def _to_nx(g: SimpleGraph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(g.node_ids)
    out.add_edges_from(g.edges)
    return out


def tiny_grid(parallel=False):
    buses = [Bus(id=i, name=f"Bus {i}") for i in (1, 2, 3)]
    lines = [Line(id=1, from_bus=2, to_bus=3)]
    if parallel:
        lines.append(Line(id=2, from_bus=2, to_bus=3))
    transformers = [Transformer(id=0, name="T1", from_bus=1, to_bus=2)]
    return GridGraph(buses, lines, transformers, name="tiny")


class TestGridGraph:
    def test_transformer_node_has_degree_two(self):
        g = tiny_grid()
        t_node = g.transformer_node_id(0)
        assert g.neighbors(t_node) == {1, 2}

    def test_transformer_counts_as_hop(self):
        g = tiny_grid()
        t_node = g.transformer_node_id(0)
        # bus 1 reaches bus 2 only through the transformer node
        assert khop(g, 1, 1) == {t_node}
        assert khop(g, 1, 2) == {t_node, 2}

    def test_parallel_branches_single_adjacency_edge(self):
        g = tiny_grid(parallel=True)
        assert g.neighbors(2) == {3, g.transformer_node_id(0)}
        assert len(g.branches) == 3

    def test_bus_graph_treats_transformer_as_edge(self):
        g = tiny_grid()
        assert g.bus_neighbors(1) == {2}
        assert g.bus_nodes_within(1, 1) == {1, 2}
        assert g.bus_nodes_within(1, 2) == {1, 2, 3}

    def test_node_ids_are_buses_then_transformers(self):
        g = tiny_grid()
        assert g.node_ids == (1, 2, 3, 4)

    def test_duplicate_bus_ids_rejected(self):
        with pytest.raises(SchemaError):
            GridGraph([Bus(id=1), Bus(id=1)], [], [])

    def test_dangling_branch_rejected(self):
        with pytest.raises(SchemaError):
            GridGraph([Bus(id=1)], [Line(id=0, from_bus=1, to_bus=9)], [])

    def test_self_loop_rejected(self):
        with pytest.raises(SchemaError):
            GridGraph([Bus(id=1)], [Line(id=0, from_bus=1, to_bus=1)], [])

    def test_branch_ids_must_be_contiguous(self):
        with pytest.raises(SchemaError):
            GridGraph([Bus(id=1), Bus(id=2)], [Line(id=5, from_bus=1, to_bus=2)], [])
