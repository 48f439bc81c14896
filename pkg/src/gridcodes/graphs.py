"""Core graph types and neighborhood/distance primitives.

Three structures live here:

* ``SimpleGraph`` -- a plain undirected graph used for identifying-code
  instances on arbitrary topologies.
* ``GridGraph`` -- the construction graph of a power network: bus nodes plus
  one node per transformer, joined to its two terminal buses; plain
  transmission lines become bus-bus edges.
* ``MonitorInstance`` -- the bipartite target/candidate graph a solver
  consumes: which candidate sensor site observes which transformer.

All three are immutable after construction and safe to share across threads
for read-only queries.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import NotFoundError, SchemaError

NodeId = int


class SimpleGraph:
    """Undirected graph over integer node ids; no self-loops, no parallel edges."""

    def __init__(self, nodes: Iterable[NodeId] = (), edges: Iterable[tuple[NodeId, NodeId]] = ()):
        self._adj: dict[NodeId, set[NodeId]] = {}
        for n in nodes:
            self._adj.setdefault(int(n), set())
        for u, v in edges:
            self.add_edge(u, v)

    def add_node(self, v: NodeId) -> None:
        self._adj.setdefault(int(v), set())

    def add_edge(self, u: NodeId, v: NodeId) -> None:
        u, v = int(u), int(v)
        if u == v:
            raise SchemaError(f"self-loop on node {u} is not allowed")
        self._adj.setdefault(u, set()).add(v)
        self._adj.setdefault(v, set()).add(u)

    @property
    def node_ids(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self._adj))

    @property
    def edges(self) -> tuple[tuple[NodeId, NodeId], ...]:
        """Each undirected edge once, as (min, max), sorted."""
        out = {(min(u, v), max(u, v)) for u, nbrs in self._adj.items() for v in nbrs}
        return tuple(sorted(out))

    def has_node(self, v: NodeId) -> bool:
        return int(v) in self._adj

    def neighbors(self, v: NodeId) -> frozenset[NodeId]:
        try:
            return frozenset(self._adj[int(v)])
        except KeyError:
            raise NotFoundError(f"unknown node id {v!r}") from None

    def __len__(self) -> int:
        return len(self._adj)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimpleGraph) and self._adj == other._adj

    def __repr__(self) -> str:
        return f"SimpleGraph(|V|={len(self._adj)}, |E|={len(self.edges)})"


@dataclass(frozen=True)
class Bus:
    id: int
    name: str = ""
    base_kv: float = 0.0


@dataclass(frozen=True)
class Line:
    """A plain branch: becomes a single bus-bus edge."""

    id: int            # global branch id, shared numbering with transformers
    from_bus: int
    to_bus: int


@dataclass(frozen=True)
class Transformer:
    """A branch classified as a transformer: becomes its own graph node."""

    id: int            # global branch id
    name: str
    from_bus: int
    to_bus: int

    @property
    def terminals(self) -> tuple[int, int]:
        return (self.from_bus, self.to_bus)


class GridGraph:
    """Construction graph of a grid: bus nodes plus one node per transformer.

    Node ids: buses keep their source numbering; transformer nodes are
    assigned ``max_bus_id + 1 + position`` in transformer order.  Parallel
    branches between the same bus pair stay distinct branch records (each
    contributes its own sensor sites) but collapse to a single adjacency edge
    for distance purposes.
    """

    def __init__(self, buses: Iterable[Bus], lines: Iterable[Line],
                 transformers: Iterable[Transformer], name: str = ""):
        self.name = name
        self.buses: tuple[Bus, ...] = tuple(buses)
        self.lines: tuple[Line, ...] = tuple(lines)
        self.transformers: tuple[Transformer, ...] = tuple(transformers)
        self._validate()

        self._max_bus_id = max((b.id for b in self.buses), default=0)
        # node adjacency: buses + transformer nodes (transformers count as hops)
        adj: dict[int, set[int]] = {b.id: set() for b in self.buses}
        for t_pos, t in enumerate(self.transformers):
            t_node = self.transformer_node_id(t_pos)
            adj[t_node] = {t.from_bus, t.to_bus}
            adj[t.from_bus].add(t_node)
            adj[t.to_bus].add(t_node)
        for ln in self.lines:
            adj[ln.from_bus].add(ln.to_bus)
            adj[ln.to_bus].add(ln.from_bus)
        self._adj: dict[int, tuple[int, ...]] = {v: tuple(sorted(ns)) for v, ns in adj.items()}

        # bus-only adjacency: every branch (line or transformer) is a bus-bus edge
        badj: dict[int, set[int]] = {b.id: set() for b in self.buses}
        for br in self.branches:
            badj[br.from_bus].add(br.to_bus)
            badj[br.to_bus].add(br.from_bus)
        self._bus_adj: dict[int, tuple[int, ...]] = {v: tuple(sorted(ns)) for v, ns in badj.items()}

    def _validate(self) -> None:
        bus_ids = [b.id for b in self.buses]
        if len(set(bus_ids)) != len(bus_ids):
            dup = sorted({i for i in bus_ids if bus_ids.count(i) > 1})
            raise SchemaError(f"duplicate bus ids: {dup}")
        known = set(bus_ids)
        branch_ids = []
        for br in list(self.lines) + list(self.transformers):
            branch_ids.append(br.id)
            if br.from_bus == br.to_bus:
                raise SchemaError(f"branch {br.id} is a self-loop on bus {br.from_bus}")
            for b in (br.from_bus, br.to_bus):
                if b not in known:
                    raise SchemaError(f"branch {br.id} references undeclared bus {b}")
        if sorted(branch_ids) != list(range(len(branch_ids))):
            raise SchemaError("branch ids must be exactly 0..B-1 with no duplicates")
        tnames = [t.name for t in self.transformers]
        if len(set(tnames)) != len(tnames):
            raise SchemaError("duplicate transformer names")

    # -- structure ---------------------------------------------------------

    @property
    def branches(self) -> tuple[Line | Transformer, ...]:
        """All branches in global id order (site enumeration order)."""
        out: list[Line | Transformer] = sorted(
            list(self.lines) + list(self.transformers), key=lambda br: br.id)
        return tuple(out)

    def transformer_node_id(self, position: int) -> int:
        """Graph node id of the transformer at `position` in transformer order."""
        return self._max_bus_id + 1 + position

    @property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.buses) + tuple(
            self.transformer_node_id(i) for i in range(len(self.transformers)))

    def has_node(self, v: int) -> bool:
        return int(v) in self._adj

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return frozenset(self._adj[int(v)])
        except KeyError:
            raise NotFoundError(f"unknown node id {v!r}") from None

    def bus_neighbors(self, bus: int) -> frozenset[int]:
        """Neighbors in the bus-only graph, where transformers are ordinary edges."""
        try:
            return frozenset(self._bus_adj[int(bus)])
        except KeyError:
            raise NotFoundError(f"unknown bus id {bus!r}") from None

    def bus_nodes_within(self, bus: int, k: int) -> frozenset[int]:
        """Buses at bus-graph distance <= k from `bus` (inclusive of `bus`)."""
        if not isinstance(k, int) or k < 0:
            raise ValueError(f"k must be a non-negative integer, got {k!r}")
        self.bus_neighbors(bus)  # raises NotFoundError for unknown bus
        return frozenset(_bfs_within(self._bus_adj, bus, k)) | {bus}

    def __eq__(self, other) -> bool:
        return (isinstance(other, GridGraph)
                and self.buses == other.buses
                and self.lines == other.lines
                and self.transformers == other.transformers
                and self.name == other.name)

    def __repr__(self) -> str:
        return (f"GridGraph({self.name!r}, buses={len(self.buses)}, "
                f"lines={len(self.lines)}, transformers={len(self.transformers)})")


# -- neighborhood operations ------------------------------------------------

def neighbors(g: SimpleGraph | GridGraph, v: NodeId) -> frozenset[NodeId]:
    """Open neighborhood: nodes adjacent to v, excluding v itself."""
    return g.neighbors(v)


def closed_neighbors(g: SimpleGraph | GridGraph, v: NodeId) -> frozenset[NodeId]:
    """Closed neighborhood: v together with its adjacent nodes."""
    return g.neighbors(v) | {int(v)}


def khop(g: SimpleGraph | GridGraph, source: NodeId, k: int) -> frozenset[NodeId]:
    """Nodes at shortest-path distance 1..k from `source` (source excluded).

    Distance is hop count on the unweighted graph; in a GridGraph,
    transformer nodes count as hops when traversed.
    """
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be a non-negative integer, got {k!r}")
    g.neighbors(source)  # raises NotFoundError for unknown source
    adj = {v: g.neighbors(v) for v in _reachable(g, source, k)}
    return frozenset(_bfs_within(adj, int(source), k))


def _reachable(g, source: NodeId, k: int) -> set[NodeId]:
    seen = {int(source)}
    frontier = [int(source)]
    for _ in range(k):
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen


def _bfs_within(adj: Mapping[int, Iterable[int]], source: int, k: int) -> set[int]:
    """Nodes within distance 1..k of source in an adjacency mapping."""
    seen = {source}
    out: set[int] = set()
    queue: deque[tuple[int, int]] = deque([(source, 0)])
    while queue:
        v, d = queue.popleft()
        if d == k:
            continue
        for u in adj.get(v, ()):
            if u not in seen:
                seen.add(u)
                out.add(u)
                queue.append((u, d + 1))
    return out


# -- bipartite monitoring instance -------------------------------------------

@dataclass(frozen=True)
class MonitorInstance:
    """Bipartite observation graph: targets vs. candidate sensor sites.

    ``adjacency[t]`` is the set of candidate ids that observe target ``t``.
    Candidates never observed by anything are retained (with empty reverse
    adjacency) so that ids stay stable across different reach radii.
    """

    targets: tuple[int, ...]
    candidates: tuple[int, ...]
    adjacency: Mapping[int, frozenset[int]]
    k: int
    metric: str = "bus-distance"
    target_names: Mapping[int, str] = field(default_factory=dict)
    candidate_info: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        cand = set(self.candidates)
        for t in self.targets:
            if t not in self.adjacency:
                raise SchemaError(f"target {t} missing from adjacency")
            stray = self.adjacency[t] - cand
            if stray:
                raise SchemaError(f"target {t} observed by undeclared candidates {sorted(stray)}")

    def observers(self, target: int) -> frozenset[int]:
        try:
            return self.adjacency[target]
        except KeyError:
            raise NotFoundError(f"unknown target id {target!r}") from None

    def target_name(self, target: int) -> str:
        return self.target_names.get(target, str(target))

    @property
    def viable_candidates(self) -> tuple[int, ...]:
        """Candidates observing at least one target, in candidate order."""
        seen: set[int] = set()
        for t in self.targets:
            seen |= self.adjacency[t]
        return tuple(c for c in self.candidates if c in seen)

    @property
    def edge_count(self) -> int:
        return sum(len(self.adjacency[t]) for t in self.targets)
