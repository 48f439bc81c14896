"""Candidate-site enumeration and bipartite monitoring-instance construction.

Every in-service branch offers two candidate sensor locations, one at each
end next to the host bus.  A site observes a transformer when the
transformer's disturbance can reach the site's host bus within the configured
hop radius ``k``; two distance conventions are supported (see
:class:`ReachRule`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ConfigError, ParseError, SchemaError
from .graphs import GridGraph, MonitorInstance, SimpleGraph, closed_neighbors

BUS_DISTANCE = "bus-distance"
NODE_DISTANCE = "node-distance"

MONITOR_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SensorSite:
    """One candidate monitoring location: a branch end next to its host bus."""

    id: int        # candidate id in the bipartite instance (after the targets)
    branch: int    # global branch id in the grid
    host_bus: int


@dataclass(frozen=True)
class ReachRule:
    """Hop radius and distance convention for building the bipartite graph.

    * ``bus-distance`` (default): a site observes a transformer when its host
      bus lies within ``k - 1`` hops of one of the transformer's terminal
      buses, measured on the bus graph where every branch is one hop.  The
      transformer's own terminal sites are thus at reach 1.
    * ``node-distance``: shortest-path distance from the transformer node to
      the host bus in the construction graph (traversed transformers count as
      hops) must be at most ``k``.

    Both conventions agree at ``k = 1``: exactly the sites hosted at the
    transformer's terminal buses observe it.
    """

    k: int = 2
    metric: str = BUS_DISTANCE
    allow_any_k: bool = False

    def __post_init__(self):
        if self.metric not in (BUS_DISTANCE, NODE_DISTANCE):
            raise ConfigError(f"unknown reach metric {self.metric!r}")
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigError(f"reach k must be a positive integer, got {self.k!r}")
        if self.k not in (1, 2) and not self.allow_any_k:
            raise ConfigError(
                f"reach k={self.k} is outside the supported range {{1, 2}}; "
                "pass allow_any_k=True to experiment beyond it")


def enumerate_sites(g: GridGraph) -> tuple[SensorSite, ...]:
    """Two sites per in-service branch, numbered after the targets.

    Candidate ids run from ``m + 1`` (m = transformer count) upward, two per
    branch in global branch order: from-end first, then to-end.
    """
    first = len(g.transformers) + 1
    sites: list[SensorSite] = []
    for br in g.branches:
        sites.append(SensorSite(id=first + 2 * br.id, branch=br.id, host_bus=br.from_bus))
        sites.append(SensorSite(id=first + 2 * br.id + 1, branch=br.id, host_bus=br.to_bus))
    return tuple(sites)


def build_monitor(g: GridGraph, sites: tuple[SensorSite, ...] | None = None,
                  rule: ReachRule | None = None) -> MonitorInstance:
    """Build the bipartite instance: transformers vs. candidate sites.

    Targets get ids 1..m in transformer order.  Candidates with no
    observations are kept (flagged non-viable downstream) so ids stay stable
    across k.
    """
    rule = rule or ReachRule()
    if sites is None:
        sites = enumerate_sites(g)

    by_host: dict[int, list[int]] = {}
    for s in sites:
        by_host.setdefault(s.host_bus, []).append(s.id)

    adjacency: dict[int, frozenset[int]] = {}
    target_names: dict[int, str] = {}
    for pos, t in enumerate(g.transformers):
        target_id = pos + 1
        target_names[target_id] = t.name
        if rule.metric == BUS_DISTANCE:
            reach = (g.bus_nodes_within(t.from_bus, rule.k - 1)
                     | g.bus_nodes_within(t.to_bus, rule.k - 1))
        else:
            node = g.transformer_node_id(pos)
            reach = {v for v in _grid_khop(g, node, rule.k)}
        observed = []
        for bus in reach:
            observed.extend(by_host.get(bus, ()))
        adjacency[target_id] = frozenset(observed)

    return MonitorInstance(
        targets=tuple(range(1, len(g.transformers) + 1)),
        candidates=tuple(s.id for s in sites),
        adjacency=adjacency,
        k=rule.k,
        metric=rule.metric,
        target_names=target_names,
        candidate_info={s.id: (s.branch, s.host_bus) for s in sites},
    )


def _grid_khop(g: GridGraph, node: int, k: int) -> frozenset[int]:
    from .graphs import khop
    return khop(g, node, k)


def site_hops(g: GridGraph, rule: ReachRule | None = None,
              max_hop: int | None = None) -> dict[tuple[int, int], int]:
    """Hop count from each transformer to each site within observation reach.

    Keyed by (target id, candidate id); hops are normalized so that
    "observes at reach k" is exactly "hop <= k" under either metric: with
    bus-distance, a terminal-bus site is at hop 1 and each further bus adds
    one; with node-distance, the hop count is the construction-graph
    distance itself.  Pairs beyond ``max_hop`` (default: the rule's k) are
    omitted.
    """
    rule = rule or ReachRule()
    limit = max_hop if max_hop is not None else rule.k
    sites = enumerate_sites(g)
    by_host: dict[int, list[int]] = {}
    for s in sites:
        by_host.setdefault(s.host_bus, []).append(s.id)
    out: dict[tuple[int, int], int] = {}
    for pos, t in enumerate(g.transformers):
        target_id = pos + 1
        if rule.metric == BUS_DISTANCE:
            dist = _bus_distances(g, {t.from_bus, t.to_bus}, limit - 1)
            offset = 1
        else:
            dist = _node_distances(g, {g.transformer_node_id(pos)}, limit)
            offset = 0
        for bus, d in dist.items():
            for sid in by_host.get(bus, ()):
                hop = d + offset
                if hop <= limit:
                    out[(target_id, sid)] = min(hop, out.get((target_id, sid), hop))
    return out


def _bus_distances(g: GridGraph, sources: set[int], limit: int) -> dict[int, int]:
    dist = {b: 0 for b in sources}
    frontier = list(sources)
    d = 0
    while frontier and d < limit:
        d += 1
        nxt = []
        for v in frontier:
            for u in g.bus_neighbors(v):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def _node_distances(g: GridGraph, sources: set[int], limit: int) -> dict[int, int]:
    dist = {v: 0 for v in sources}
    frontier = list(sources)
    d = 0
    while frontier and d < limit:
        d += 1
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def build_ics_instance(g: SimpleGraph) -> MonitorInstance:
    """Identifying-code instance of a plain graph: every node is both a
    target and a candidate, observed through its closed neighborhood."""
    nodes = g.node_ids
    return MonitorInstance(
        targets=nodes,
        candidates=nodes,
        adjacency={v: closed_neighbors(g, v) for v in nodes},
        k=1,
        metric="closed-neighborhood",
        target_names={v: f"v{v}" for v in nodes},
    )


# -- fixture serialization -----------------------------------------------------

def write_monitor(m: MonitorInstance) -> str:
    """Canonical JSON form of a bipartite instance (byte-stable)."""
    doc = {
        "schema_version": MONITOR_SCHEMA_VERSION,
        "k": m.k,
        "metric": m.metric,
        "targets": [{"id": t, "name": m.target_name(t)} for t in m.targets],
        "candidates": [
            {"id": c, **dict(zip(("branch", "host"), m.candidate_info.get(c, ())))}
            for c in m.candidates
        ],
        "adjacency": {str(t): sorted(m.adjacency[t]) for t in m.targets},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_monitor(text: str) -> MonitorInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    required = {"schema_version", "k", "metric", "targets", "candidates", "adjacency"}
    if not isinstance(doc, dict) or doc.keys() != required:
        raise ParseError(f"monitor document must have exactly the sections {sorted(required)}")
    if doc["schema_version"] != MONITOR_SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc['schema_version']!r}")
    try:
        targets = tuple(int(t["id"]) for t in doc["targets"])
        target_names = {int(t["id"]): str(t["name"]) for t in doc["targets"]}
        candidates = tuple(int(c["id"]) for c in doc["candidates"])
        candidate_info = {int(c["id"]): (int(c["branch"]), int(c["host"]))
                          for c in doc["candidates"] if "branch" in c}
        adjacency = {int(t): frozenset(int(c) for c in obs)
                     for t, obs in doc["adjacency"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed monitor document: {exc}") from None
    try:
        return MonitorInstance(
            targets=targets, candidates=candidates, adjacency=adjacency,
            k=int(doc["k"]), metric=str(doc["metric"]),
            target_names=target_names, candidate_info=candidate_info)
    except SchemaError:
        raise
