"""Shared fixtures: reference graphs, random-instance generators, expected values."""

from __future__ import annotations

import random

import pytest

from gridcodes import fixtures as bundled
from gridcodes.graphs import MonitorInstance, SimpleGraph


def ten_node_graph() -> SimpleGraph:
    """Ten-node identifying-code example: nodes 5..10 each join a distinct
    pair of the hub nodes 1..4, which are pairwise non-adjacent."""
    g = SimpleGraph(nodes=range(1, 11))
    pair_of = {5: (1, 2), 6: (1, 3), 7: (1, 4), 8: (2, 3), 9: (2, 4), 10: (3, 4)}
    for node, (a, b) in pair_of.items():
        g.add_edge(node, a)
        g.add_edge(node, b)
    return g


# closed neighborhood of every node intersected with the code {1, 2, 3, 4}
TEN_NODE_EXPECTED_TRACES = {
    1: {1}, 2: {2}, 3: {3}, 4: {4},
    5: {1, 2}, 6: {1, 3}, 7: {1, 4}, 8: {2, 3}, 9: {2, 4}, 10: {3, 4},
}


def random_monitor(seed: int, max_targets: int = 6, max_candidates: int = 12,
                   density_range: tuple[float, float] = (0.2, 0.8)) -> MonitorInstance:
    """Seeded random bipartite instance with ids laid out like grid instances."""
    rng = random.Random(seed)
    n_targets = rng.randint(1, max_targets)
    n_candidates = rng.randint(1, max_candidates)
    density = rng.uniform(*density_range)
    targets = tuple(range(1, n_targets + 1))
    candidates = tuple(range(n_targets + 1, n_targets + n_candidates + 1))
    adjacency = {
        t: frozenset(c for c in candidates if rng.random() < density)
        for t in targets
    }
    return MonitorInstance(targets=targets, candidates=candidates,
                           adjacency=adjacency, k=1, metric="synthetic")


@pytest.fixture(scope="session")
def ieee14():
    return bundled.load("ieee14")


@pytest.fixture(scope="session")
def ten_node():
    return ten_node_graph()
