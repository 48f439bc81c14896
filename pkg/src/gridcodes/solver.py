"""Set-cover reduction and solvers for discriminating-code instances.

A MonitorInstance becomes a set-cover problem whose universe has one
*coverage* element per target (some observing site must be selected) and one
*discrimination* element per unordered target pair (some site in the
symmetric difference of their observer sets must be selected).  A candidate
subset covers that universe exactly when every target ends up with a
non-empty, pairwise-distinct observer trace.

Three solving routes are provided:

* :func:`solve_exact` -- depth-first branch-and-bound, preceded by
  dominance reduction and decomposition into independent column components;
  deterministic, returns the lexicographically smallest optimum.
* :func:`solve_greedy` -- classic max-coverage greedy, an upper bound.
* :func:`solve_bruteforce` -- subset enumeration in increasing cardinality,
  the oracle for tests, guarded by a candidate cap.

Solver state is confined to a single call; concurrent calls on distinct
instances are safe.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .errors import InfeasibleError, NotFoundError, TooLargeError
from .graphs import MonitorInstance


@dataclass(frozen=True)
class Element:
    """One universe element: cover a target, or discriminate a target pair."""

    kind: str                  # "cover" | "disc"
    targets: tuple[int, ...]   # (j,) or (j, k) with j < k in target order

    def row_name(self) -> str:
        if self.kind == "cover":
            return f"cover_t{self.targets[0]}"
        return f"disc_t{self.targets[0]}_t{self.targets[1]}"


@dataclass(frozen=True)
class SetCoverInstance:
    universe: tuple[Element, ...]
    candidates: tuple[int, ...]
    columns: dict[int, frozenset[int]]   # candidate id -> covered element indices

    def supports(self) -> list[tuple[int, ...]]:
        """Per element, the sorted candidate ids covering it."""
        sup: list[list[int]] = [[] for _ in self.universe]
        for c in self.candidates:
            for idx in self.columns[c]:
                sup[idx].append(c)
        return [tuple(sorted(s)) for s in sup]


@dataclass(frozen=True)
class SolveStats:
    method: str
    nodes: int = 0
    wall_time_s: float = 0.0


@dataclass(frozen=True)
class Solution:
    selected: tuple[int, ...]
    size: int
    optimal: bool
    stats: SolveStats

    def __post_init__(self):
        assert self.size == len(self.selected)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    unobservable: tuple[int, ...] = ()
    twins: tuple[tuple[int, int], ...] = ()

    def __str__(self) -> str:
        if self.feasible:
            return "feasible"
        parts = []
        if self.unobservable:
            parts.append("unobservable targets: " + ", ".join(map(str, self.unobservable)))
        if self.twins:
            parts.append("indistinguishable target pairs: "
                         + ", ".join(f"({a}, {b})" for a, b in self.twins))
        return "infeasible; " + "; ".join(parts)


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    traces: dict[int, frozenset[int]]
    empty_targets: tuple[int, ...] = ()
    colliding_pairs: tuple[tuple[int, int], ...] = ()

    def __str__(self) -> str:
        if self.passed:
            return "valid code: all traces non-empty and distinct"
        parts = []
        if self.empty_targets:
            parts.append("targets with empty trace: " + ", ".join(map(str, self.empty_targets)))
        if self.colliding_pairs:
            parts.append("targets with identical traces: "
                         + ", ".join(f"({a}, {b})" for a, b in self.colliding_pairs))
        return "not a code; " + "; ".join(parts)


# -- reduction ----------------------------------------------------------------

def to_set_cover(m: MonitorInstance) -> SetCoverInstance:
    """Reduce a monitoring instance to set cover.

    A candidate subset covers the returned universe if and only if it passes
    :func:`verify` on the original instance.
    """
    targets = m.targets
    elements: list[Element] = [Element("cover", (j,)) for j in targets]
    for a, b in itertools.combinations(range(len(targets)), 2):
        elements.append(Element("disc", (targets[a], targets[b])))

    columns: dict[int, set[int]] = {c: set() for c in m.candidates}
    for idx, el in enumerate(elements):
        if el.kind == "cover":
            sup = m.adjacency[el.targets[0]]
        else:
            j, k = el.targets
            sup = m.adjacency[j] ^ m.adjacency[k]
        for c in sup:
            columns[c].add(idx)
    return SetCoverInstance(
        universe=tuple(elements),
        candidates=m.candidates,
        columns={c: frozenset(s) for c, s in columns.items()},
    )


def check_feasible(sc: SetCoverInstance) -> FeasibilityReport:
    """Report every universe element with empty support.

    An uncoverable coverage element names an unobservable target; an
    uncoverable discrimination element names a twin pair.
    """
    covered: set[int] = set()
    for c in sc.candidates:
        covered |= sc.columns[c]
    unobservable = []
    twins = []
    for idx, el in enumerate(sc.universe):
        if idx in covered:
            continue
        if el.kind == "cover":
            unobservable.append(el.targets[0])
        else:
            twins.append(el.targets)
    return FeasibilityReport(
        feasible=not unobservable and not twins,
        unobservable=tuple(unobservable),
        twins=tuple(twins),
    )


# -- verification ---------------------------------------------------------------

def verify(m: MonitorInstance, selected) -> VerifyReport:
    """Check that `selected` gives every target a non-empty, unique trace."""
    sel = frozenset(int(c) for c in selected)
    unknown = sel - set(m.candidates)
    if unknown:
        raise NotFoundError(f"unknown candidate id(s): {sorted(unknown)}")
    traces = {t: m.adjacency[t] & sel for t in m.targets}
    empty = tuple(t for t in m.targets if not traces[t])
    seen: dict[frozenset[int], int] = {}
    colliding: list[tuple[int, int]] = []
    for t in m.targets:
        tr = traces[t]
        if tr in seen:
            colliding.append((seen[tr], t))
        else:
            seen[tr] = t
    return VerifyReport(
        passed=not empty and not colliding,
        traces=traces,
        empty_targets=empty,
        colliding_pairs=tuple(colliding),
    )


# -- greedy ---------------------------------------------------------------------

def solve_greedy(sc: SetCoverInstance) -> Solution:
    """Max-coverage greedy; feasible by construction, not necessarily optimal."""
    start = time.perf_counter()
    report = check_feasible(sc)
    if not report.feasible:
        raise InfeasibleError(report)
    uncovered = set(range(len(sc.universe)))
    chosen: list[int] = []
    steps = 0
    while uncovered:
        best_c, best_gain = None, 0
        for c in sc.candidates:
            gain = len(sc.columns[c] & uncovered)
            if gain > best_gain:
                best_c, best_gain = c, gain
        chosen.append(best_c)
        uncovered -= sc.columns[best_c]
        steps += 1
    return Solution(
        selected=tuple(sorted(chosen)), size=len(chosen), optimal=False,
        stats=SolveStats(method="greedy", nodes=steps,
                         wall_time_s=time.perf_counter() - start))


# -- brute force ------------------------------------------------------------------

def solve_bruteforce(sc: SetCoverInstance, cap: int = 20) -> Solution:
    """Enumerate subsets in increasing cardinality; first cover wins.

    Only candidates with non-empty columns participate; raises
    :class:`TooLargeError` when more than `cap` of them exist.
    """
    start = time.perf_counter()
    report = check_feasible(sc)
    if not report.feasible:
        raise InfeasibleError(report)
    viable = [c for c in sc.candidates if sc.columns[c]]
    if len(viable) > cap:
        raise TooLargeError(
            f"{len(viable)} viable candidates exceed the brute-force cap of {cap}")
    full = (1 << len(sc.universe)) - 1
    masks = {c: _mask(sc.columns[c]) for c in viable}
    nodes = 0
    for r in range(len(viable) + 1):
        for combo in itertools.combinations(viable, r):
            nodes += 1
            acc = 0
            for c in combo:
                acc |= masks[c]
            if acc == full:
                return Solution(
                    selected=tuple(combo), size=r, optimal=True,
                    stats=SolveStats(method="bruteforce", nodes=nodes,
                                     wall_time_s=time.perf_counter() - start))
    raise InfeasibleError(report)  # unreachable after check_feasible


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# -- exact branch-and-bound --------------------------------------------------------

def solve_exact(sc: SetCoverInstance) -> Solution:
    """Minimum-cardinality cover via branch-and-bound.

    Pipeline: feasibility check, dominance reduction, decomposition into
    independent candidate components, then per component a depth-first search
    (greedy-initialized upper bound, disjoint-support lower bound) for the
    optimal size followed by a lexicographic reconstruction.  The union of
    per-component lexicographically smallest optima is the overall
    lexicographically smallest optimum.
    """
    start = time.perf_counter()
    report = check_feasible(sc)
    if not report.feasible:
        raise InfeasibleError(report)

    selected: list[int] = []
    nodes = 0
    for ids, cov in _components(sc):
        comp = _ComponentSearch(ids, cov)
        best_size = comp.optimal_size()
        sel = comp.lexmin(best_size)
        selected.extend(sel)
        nodes += comp.nodes
    return Solution(
        selected=tuple(sorted(selected)), size=len(selected), optimal=True,
        stats=SolveStats(method="exact", nodes=nodes,
                         wall_time_s=time.perf_counter() - start))


def enumerate_optima(sc: SetCoverInstance, cap: int = 100) -> list[tuple[int, ...]]:
    """All minimum covers (sorted id tuples, lexicographic order), capped.

    The count across components multiplies, so the cap bounds both the
    per-component enumeration and the combined output.
    """
    report = check_feasible(sc)
    if not report.feasible:
        raise InfeasibleError(report)
    per_component: list[list[tuple[int, ...]]] = []
    for ids, cov in _components(sc, prune_columns=False):
        comp = _ComponentSearch(ids, cov)
        per_component.append(comp.all_optima(comp.optimal_size(), cap))
    combined: list[tuple[int, ...]] = [()]
    for options in per_component:
        combined = [tuple(sorted(base + opt)) for base in combined for opt in options]
        combined = sorted(combined)[:cap]
    return combined


def _components(sc: SetCoverInstance, prune_columns: bool = True):
    """Split the instance into independent (candidate ids, coverage masks) groups.

    Discrimination elements whose support is a superset of a coverage
    element's support are dropped first (they are implied), which is what
    lets far-apart target clusters separate.  Duplicate elements are dropped
    as well; neither reduction changes the feasible covers.  With
    ``prune_columns`` (the default), columns dominated by a smaller-id column
    are also removed -- safe for the optimal size and the lexicographically
    smallest optimum, but not for enumerating every optimum.
    """
    supports = sc.supports()
    n_targets = sum(1 for el in sc.universe if el.kind == "cover")
    cover_support = {sc.universe[i].targets[0]: frozenset(supports[i])
                     for i in range(n_targets)}

    kept: list[int] = []
    seen_supports: set[frozenset[int]] = set()
    for idx, el in enumerate(sc.universe):
        sup = frozenset(supports[idx])
        if el.kind == "disc":
            j, k = el.targets
            if cover_support[j] <= sup or cover_support[k] <= sup:
                continue
        if sup in seen_supports:
            continue
        seen_supports.add(sup)
        kept.append(idx)

    # union-find over candidate ids, linked through surviving elements
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx in kept:
        sup = supports[idx]
        for c in sup:
            parent.setdefault(c, c)
        root = find(sup[0])
        for c in sup[1:]:
            parent[find(c)] = root

    groups: dict[int, list[int]] = {}
    for idx in kept:
        groups.setdefault(find(supports[idx][0]), []).append(idx)

    out = []
    for root in sorted(groups, key=lambda r: min(supports[i][0] for i in groups[r])):
        elem_indices = groups[root]
        cand_ids = sorted({c for i in elem_indices for c in supports[i]})
        local_elem = {e: pos for pos, e in enumerate(elem_indices)}
        cov = []
        for c in cand_ids:
            mask = 0
            for e in sc.columns[c]:
                if e in local_elem:
                    mask |= 1 << local_elem[e]
            cov.append(mask)
        if prune_columns:
            # identical-coverage columns collapse to the smallest id first;
            # that is what keeps the quadratic passes below tractable
            cand_ids, cov = _dedupe_columns(cand_ids, cov)
            elem_keep = _drop_dominated_elements(cand_ids, cov, len(elem_indices))
            if len(elem_keep) < len(elem_indices):
                cov = [_compress_mask(mask, elem_keep) for mask in cov]
                pairs = [(c, m) for c, m in zip(cand_ids, cov) if m]
                cand_ids = [c for c, _ in pairs]
                cov = [m for _, m in pairs]
            cand_ids, cov = _drop_dominated_columns(cand_ids, cov)
        out.append((cand_ids, cov))
    return out


_QUADRATIC_CAP = 3000


def _dedupe_columns(ids: list[int], cov: list[int]):
    seen: dict[int, int] = {}
    for cid, mask in zip(ids, cov):
        seen.setdefault(mask, cid)
    kept = sorted(seen.values())
    by_id = dict(zip(ids, cov))
    return kept, [by_id[c] for c in kept]


def _drop_dominated_elements(ids: list[int], cov: list[int], n_elems: int) -> list[int]:
    """Indices of elements with inclusion-minimal supports.

    Covering an element forces covering every element whose support is a
    superset, so dominated elements are redundant.  Quadratic in the
    universe; skipped for outsized components.
    """
    if n_elems > _QUADRATIC_CAP:
        return list(range(n_elems))
    sup = [0] * n_elems
    for ci, mask in enumerate(cov):
        mm = mask
        while mm:
            low = mm & -mm
            sup[low.bit_length() - 1] |= 1 << ci
            mm ^= low
    order = sorted(range(n_elems), key=lambda i: sup[i].bit_count())
    kept: list[int] = []
    kept_masks: list[int] = []
    for i in order:
        mask = sup[i]
        if any(km & mask == km for km in kept_masks):
            continue
        kept.append(i)
        kept_masks.append(mask)
    return sorted(kept)


def _compress_mask(mask: int, kept_positions: list[int]) -> int:
    out = 0
    for new, old in enumerate(kept_positions):
        if (mask >> old) & 1:
            out |= 1 << new
    return out


def _drop_dominated_columns(ids: list[int], cov: list[int]):
    """Drop any column whose coverage is a subset of a smaller-id column's.

    Quadratic; skipped for outsized components (deduplication normally keeps
    them far below the cap).
    """
    if len(ids) > _QUADRATIC_CAP:
        return ids, cov
    kept_ids: list[int] = []
    kept_cov: list[int] = []
    for cid, mask in zip(ids, cov):
        if any(mask | km == km for km in kept_cov):
            continue
        kept_ids.append(cid)
        kept_cov.append(mask)
    return kept_ids, kept_cov


class _ComponentSearch:
    """Branch-and-bound over one independent component."""

    def __init__(self, ids: list[int], cov: list[int]):
        self.ids = ids
        self.cov = cov
        self.n = len(ids)
        self.full = 0
        for m in cov:
            self.full |= m
        self.u = self.full.bit_length()
        # per element: bitmask of covering columns (by local column index)
        scol = [0] * self.u
        for ci, mask in enumerate(cov):
            mm = mask
            while mm:
                low = mm & -mm
                scol[low.bit_length() - 1] |= 1 << ci
                mm ^= low
        self.scol = scol
        self.elem_order = sorted(range(self.u), key=lambda e: (scol[e].bit_count(), e))
        self.suffix = [0] * (self.n + 1)
        for i in range(self.n - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] | cov[i]
        self.ge_mask = [0] * (self.n + 1)
        for i in range(self.n - 1, -1, -1):
            self.ge_mask[i] = self.ge_mask[i + 1] | (1 << i)
        self.nodes = 0

    def _lower_bound(self, uncovered: int, allowed_cols: int) -> int:
        """Count uncovered elements with pairwise-disjoint allowed supports;
        each needs its own column, so the count bounds any cover from below."""
        taken = 0
        count = 0
        for e in self.elem_order:
            if not (uncovered >> e) & 1:
                continue
            sup = self.scol[e] & allowed_cols
            if sup & taken == 0:
                count += 1
                taken |= sup
        return count

    def _greedy_size(self) -> int:
        uncovered = self.full
        size = 0
        while uncovered:
            best_gain, best_i = 0, -1
            for i, mask in enumerate(self.cov):
                gain = (mask & uncovered).bit_count()
                if gain > best_gain:
                    best_gain, best_i = gain, i
            uncovered &= ~self.cov[best_i]
            size += 1
        return size

    def optimal_size(self) -> int:
        self.best = self._greedy_size()
        all_cols = (1 << self.n) - 1
        self._dfs(self.full, 0, all_cols)
        return self.best

    def _dfs(self, uncovered: int, depth: int, allowed: int) -> None:
        self.nodes += 1
        if uncovered == 0:
            if depth < self.best:
                self.best = depth
            return
        if depth + self._lower_bound(uncovered, allowed) >= self.best:
            return
        # fail-first: branch on the uncovered element with fewest columns left
        pick, pick_avail, pick_count = -1, 0, None
        mm = uncovered
        while mm:
            low = mm & -mm
            e = low.bit_length() - 1
            mm ^= low
            avail = self.scol[e] & allowed
            c = avail.bit_count()
            if c == 0:
                return
            if pick_count is None or c < pick_count:
                pick, pick_avail, pick_count = e, avail, c
                if c == 1:
                    break
        cols = []
        aa = pick_avail
        while aa:
            low = aa & -aa
            cols.append(low.bit_length() - 1)
            aa ^= low
        cols.sort(key=lambda ci: (-(self.cov[ci] & uncovered).bit_count(), ci))
        # branch i commits to cols[i]; later branches may not reuse earlier ones
        remaining = allowed
        for ci in cols:
            self._dfs(uncovered & ~self.cov[ci], depth + 1, remaining)
            remaining &= ~(1 << ci)
        return

    def lexmin(self, budget: int) -> list[int]:
        sel = self._lexdfs(self.full, 0, budget)
        assert sel is not None, "optimal size certified but reconstruction failed"
        return [self.ids[i] for i in sel]

    def _lexdfs(self, uncovered: int, start: int, budget: int):
        self.nodes += 1
        if uncovered == 0:
            return []
        if budget == 0 or uncovered & ~self.suffix[start]:
            return None
        if self._lower_bound(uncovered, self.ge_mask[start]) > budget:
            return None
        for i in range(start, self.n):
            if self.cov[i] & uncovered:
                rest = self._lexdfs(uncovered & ~self.cov[i], i + 1, budget - 1)
                if rest is not None:
                    return [i] + rest
        return None

    def all_optima(self, size: int, cap: int) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []

        def walk(uncovered: int, start: int, budget: int, acc: list[int]):
            if len(out) >= cap:
                return
            if uncovered == 0:
                out.append(tuple(self.ids[i] for i in acc))
                return
            if budget == 0 or uncovered & ~self.suffix[start]:
                return
            if self._lower_bound(uncovered, self.ge_mask[start]) > budget:
                return
            for i in range(start, self.n):
                if self.cov[i] & uncovered:
                    acc.append(i)
                    walk(uncovered & ~self.cov[i], i + 1, budget - 1, acc)
                    acc.pop()

        walk(self.full, 0, size, [])
        return out


# -- LP export -------------------------------------------------------------------

def export_lp(sc: SetCoverInstance, name: str = "mce") -> str:
    """Render the instance as a CPLEX LP file with binary variables.

    One objective term and one Binary declaration per candidate (including
    never-observing ones, which simply appear in no constraint row), one
    ``>= 1`` row per universe element, in universe order.  The output is
    byte-stable.  An element with empty support renders as ``0 x<first> >= 1``
    to keep the file well-formed while preserving infeasibility.
    """
    supports = sc.supports()
    lines = [f"\\ {name}: minimum sensor selection", "Minimize"]
    lines.extend(_wrap_terms("obj", [f"x{c}" for c in sc.candidates]))
    lines.append("Subject To")
    for idx, el in enumerate(sc.universe):
        terms = [f"x{c}" for c in supports[idx]]
        if not terms:
            terms = [f"0 x{sc.candidates[0]}"] if sc.candidates else ["0"]
        lines.extend(_wrap_terms(el.row_name(), terms, suffix=" >= 1"))
    lines.append("Binary")
    for c in sc.candidates:
        lines.append(f" x{c}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _wrap_terms(label: str, terms: list[str], suffix: str = "", per_line: int = 10) -> list[str]:
    rows = []
    for i in range(0, len(terms), per_line):
        chunk = " + ".join(terms[i:i + per_line])
        head = f" {label}: " if i == 0 else "   + "
        rows.append(head + chunk)
    if not terms:
        rows.append(f" {label}: 0")
    rows[-1] += suffix
    return rows
