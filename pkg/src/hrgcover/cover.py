"""Vertex cover algorithms: greedy baselines, the adapted greedy, and exact search."""

from __future__ import annotations

import enum
import heapq
import math
import sys
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from hrgcover.geometry import iterated_log
from hrgcover.graph import (
    AliveMask,
    DegreeQueue,
    Graph,
    bfs_prefix,
    connected_components,
    induced_adjacency,
)

SMALL_COMPONENT_CAP = 64
_TICK_MASK = (1 << 14) - 1  # deadline checked every 2^14 search nodes


@dataclass
class CoverResult:
    """A vertex cover split into its greedily taken and exactly solved parts."""

    cover: list[int]
    greedy_count: int
    exact_region_cover_count: int = 0
    exact_region_vertex_count: int = 0
    solved_component_sizes: Counter = field(default_factory=Counter)
    elapsed: float = 0.0
    component_limit: int | None = None

    @property
    def size(self) -> int:
        return len(self.cover)


class ExactStatus(enum.Enum):
    OPTIMAL = "optimal"
    LOWER_BOUND_ONLY = "lower_bound_only"


@dataclass
class ExactResult:
    status: ExactStatus
    cover: list[int] | None
    lower_bound: int
    upper_bound: int
    elapsed: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is ExactStatus.OPTIMAL


def component_limit_for(n: int, tau: float) -> int:
    """max(1, floor(tau * ln ln n)); needs n > e so that ln ln n is defined."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if n <= math.e:
        raise ValueError(f"ln ln n undefined for n={n}")
    return max(1, math.floor(tau * iterated_log(n, 2)))


def protocol_component_limit(n: int, tau: float = 10) -> int:
    """Experimental cap ``tau * ceil(ln ln n)`` (``10 ceil(ln ln n)`` for tau = 10)."""
    if n <= math.e:
        raise ValueError(f"ln ln n undefined for n={n}")
    return max(1, int(tau * math.ceil(iterated_log(n, 2))))


# -- greedy family -----------------------------------------------------------


def standard_greedy(g: Graph) -> CoverResult:
    """Repeatedly take a maximum residual degree vertex (smallest id on ties)."""
    start = time.perf_counter()
    queue = DegreeQueue(g)
    cover = []
    while queue.max_degree() > 0:
        v = queue.pop_max()
        cover.append(v)
        queue.remove(v)
    return CoverResult(cover, greedy_count=len(cover), elapsed=time.perf_counter() - start)


class _ComponentSolver:
    """Probes the neighbors of a removed vertex and solves what got separated."""

    def __init__(self, g: Graph, mask: AliveMask, limit: int) -> None:
        self.g = g
        self.mask = mask
        self.limit = limit
        self.cover: list[int] = []
        self.vertex_count = 0
        self.sizes: Counter = Counter()

    def probe(self, v: int) -> None:
        adj, alive, limit = self.g.adjacency, self.mask.alive, self.limit
        large: set[int] = set()  # neighbors already known to sit in an oversized component
        for u in adj[v]:
            if not alive[u] or u in large:
                continue
            comp, complete = bfs_prefix(adj, alive, u, limit)
            if complete:
                self.absorb(comp)
            else:
                large.update(comp)

    def sweep(self) -> None:
        """Solve components that are already small before anything is removed.

        Together with :meth:`probe` after every removal this is equivalent to
        rescanning the whole remainder after each step: a component can only
        become small by losing a vertex, and then it contains a neighbor of
        that vertex.
        """
        for comp in connected_components(self.g, self.mask):
            if len(comp) <= self.limit:
                self.absorb(comp)

    def absorb(self, comp: list[int]) -> None:
        if len(comp) == 1:
            sub = ()
        elif len(comp) == 2:
            sub = (min(comp),)
        else:
            sub = exact_cover_small(self.g, comp, cap=max(SMALL_COMPONENT_CAP, self.limit))
        self.cover.extend(sub)
        self.vertex_count += len(comp)
        self.sizes[len(comp)] += 1
        for x in comp:
            self.mask.kill(x)


def adapted_greedy_degree(g: Graph, component_limit: int) -> CoverResult:
    """Standard greedy order, solving separated components of bounded size exactly."""
    if component_limit < 1:
        raise ValueError("component_limit must be at least 1")
    start = time.perf_counter()
    queue = DegreeQueue(g)
    solver = _ComponentSolver(g, queue.mask, component_limit)
    solver.sweep()
    greedy = []
    while queue.max_degree() > 0:
        v = queue.pop_max()
        greedy.append(v)
        queue.remove(v)
        solver.probe(v)
    return _result(greedy, solver, start)


def adapted_greedy_radius(g: Graph, tau: float = 1.0, component_limit: int | None = None) -> CoverResult:
    """Take vertices by increasing radius, solving separated small components exactly.

    The cap defaults to ``max(1, floor(tau ln ln n))``. Vertices with no alive
    neighbor when reached are dropped without entering the cover.
    """
    if not g.has_coordinates:
        raise ValueError("radius-ordered greedy needs vertex coordinates")
    if component_limit is None:
        component_limit = component_limit_for(g.vertex_count, tau)
    if component_limit < 1:
        raise ValueError("component_limit must be at least 1")
    start = time.perf_counter()
    n = g.vertex_count
    mask = AliveMask(n)
    alive = mask.alive
    adj = g.adjacency
    solver = _ComponentSolver(g, mask, component_limit)
    solver.sweep()
    greedy = []
    for v in np.lexsort((np.arange(n), g.radii)).tolist():
        if not alive[v]:
            continue
        if not any(alive[u] for u in adj[v]):
            solver.absorb([v])
            continue
        greedy.append(v)
        mask.kill(v)
        solver.probe(v)
    return _result(greedy, solver, start)


def _result(greedy: list[int], solver: _ComponentSolver, start: float) -> CoverResult:
    return CoverResult(
        cover=greedy + solver.cover,
        greedy_count=len(greedy),
        exact_region_cover_count=len(solver.cover),
        exact_region_vertex_count=solver.vertex_count,
        solved_component_sizes=solver.sizes,
        elapsed=time.perf_counter() - start,
        component_limit=solver.limit,
    )


# -- exact search ------------------------------------------------------------


class _Timeout(Exception):
    pass


class _Search:
    def __init__(self, deadline: float | None) -> None:
        self.deadline = deadline
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.deadline is not None and not self.nodes & _TICK_MASK and time.monotonic() > self.deadline:
            raise _Timeout


def _delete(adj: dict[int, set[int]], v: int) -> list[int]:
    nbrs = adj.pop(v)
    for u in nbrs:
        adj[u].discard(v)
    return list(nbrs)


def _copy(adj: dict[int, set[int]]) -> dict[int, set[int]]:
    return {v: set(nb) for v, nb in adj.items()}


def reduce_graph(adj: dict[int, set[int]], forced: list[int]) -> None:
    """Apply the degree-0, degree-1 and dominance rules to a fixpoint, in place.

    A vertex ``u`` dominates its neighbor ``x`` when ``N[x]`` is a subset of
    ``N[u]``; some minimum cover then contains ``u``. Vertices are examined in
    id order as potential dominated vertices; the smallest-id dominator is
    taken (``x`` itself when it is a twin of some dominator and has the
    smaller id). Degree one is the special case ``N[x] = {x, u}``.
    """
    heap = sorted(adj)
    queued = set(heap)
    while heap:
        x = heapq.heappop(heap)
        queued.discard(x)
        nx = adj.get(x)
        if nx is None:
            continue
        if not nx:
            del adj[x]
            continue
        k = len(nx)
        pick = None
        for u in nx:
            nu = adj[u]
            if len(nu) < k:
                continue
            if k == 1 or all(y == u or y in nu for y in nx):
                cand = x if len(nu) == k and x < u else u
                if pick is None or cand < pick:
                    pick = cand
        if pick is None:
            continue
        forced.append(pick)
        for y in _delete(adj, pick):
            if y not in queued:
                queued.add(y)
                heapq.heappush(heap, y)


def matching_bound(adj: dict[int, set[int]]) -> int:
    """Size of the greedy maximal matching taken in id order."""
    matched = set()
    size = 0
    for u in sorted(adj):
        if u in matched:
            continue
        free = [v for v in adj[u] if v not in matched]
        if free:
            matched.add(u)
            matched.add(min(free))
            size += 1
    return size


def matching_lower_bound(g: Graph, mask: AliveMask | None = None) -> int:
    """Greedy maximal matching over alive edges; any cover needs at least this many vertices."""
    alive = range(g.vertex_count) if mask is None else mask.vertices()
    return matching_bound(induced_adjacency(g, alive))


def _components(adj: dict[int, set[int]]) -> list[dict[int, set[int]]]:
    seen = set()
    out = []
    for s in sorted(adj):
        if s in seen:
            continue
        seen.add(s)
        stack = [s]
        comp = {}
        while stack:
            v = stack.pop()
            comp[v] = adj[v]
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        out.append(comp)
    return out


def _solve(adj: dict[int, set[int]], upper: int, search: _Search) -> list[int] | None:
    """Minimum cover of ``adj`` if one smaller than ``upper`` exists, else ``None``.

    ``adj`` is consumed (mutated).
    """
    search.tick()
    forced: list[int] = []
    reduce_graph(adj, forced)
    budget = upper - len(forced)
    if budget <= 0:
        return None
    if not adj:
        return forced
    comps = _components(adj)
    if len(comps) > 1:
        comps.sort(key=lambda c: (len(c), min(c)))
        lbs = [matching_bound(c) for c in comps]
        rest = sum(lbs)
        if rest >= budget:
            return None
        out = forced
        for comp, lb in zip(comps, lbs):
            rest -= lb
            sub = _solve(comp, budget - (len(out) - len(forced)) - rest, search)
            if sub is None:
                return None
            out = out + sub
        return out
    if matching_bound(adj) >= budget:
        return None
    v = max(adj, key=lambda x: (len(adj[x]), -x))
    nv = sorted(adj[v])
    best = None
    take = _copy(adj)
    _delete(take, v)
    sub = _solve(take, budget - 1, search)
    if sub is not None:
        best = [v] + sub
        budget = len(best)
    if len(nv) < budget:
        skip = adj  # last use of adj; consume it
        _delete(skip, v)
        for u in nv:
            _delete(skip, u)
        sub = _solve(skip, budget - len(nv), search)
        if sub is not None:
            best = nv + sub
    return None if best is None else forced + best


def _with_recursion_room(depth: int):
    need = depth * 4 + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def exact_cover_small(g: Graph, component: list[int], cap: int = SMALL_COMPONENT_CAP) -> list[int]:
    """Minimum vertex cover of the subgraph induced by ``component``.

    Reductions plus branch-and-bound; deterministic for a given input.
    """
    if len(component) > cap:
        raise ValueError(f"component of size {len(component)} exceeds cap {cap}")
    adj = induced_adjacency(g, component)
    _with_recursion_room(len(adj))
    result = _solve(adj, len(adj) + 1, _Search(None))
    assert result is not None
    return sorted(result)


def exact_cover(g: Graph, time_limit: float | None = 60.0, upper_hint: list[int] | None = None) -> ExactResult:
    """Minimum vertex cover by global reductions and branch-and-bound.

    Returns ``LOWER_BOUND_ONLY`` (with the reduction + matching bound and the
    best known cover size) if the search does not finish within ``time_limit``
    seconds. ``upper_hint`` seeds the incumbent; standard greedy is used
    otherwise.
    """
    start = time.perf_counter()
    deadline = None if time_limit is None else time.monotonic() + time_limit
    incumbent = upper_hint if upper_hint is not None else standard_greedy(g).cover
    adj = induced_adjacency(g, range(g.vertex_count))
    forced: list[int] = []
    reduce_graph(adj, forced)
    lower = len(forced) + matching_bound(adj)
    _with_recursion_room(len(adj))
    search = _Search(deadline)
    try:
        sub = _solve(adj, len(incumbent) - len(forced) + 1, search)
    except _Timeout:
        return ExactResult(
            ExactStatus.LOWER_BOUND_ONLY, None, lower, len(incumbent), time.perf_counter() - start
        )
    assert sub is not None
    cover = sorted(forced + sub)
    return ExactResult(ExactStatus.OPTIMAL, cover, len(cover), len(cover), time.perf_counter() - start)


def approximation_ratio(cover_size: int, opt: ExactResult) -> tuple[float, bool]:
    """``(ratio, is_bound)``: exact against an optimum, an upper bound otherwise."""
    if cover_size < opt.lower_bound:
        raise ValueError(
            f"cover of size {cover_size} is below the lower bound {opt.lower_bound}; solver inconsistency"
        )
    if opt.optimal:
        if opt.upper_bound == 0:
            return (1.0 if cover_size == 0 else math.inf), False
        return cover_size / opt.upper_bound, False
    if opt.lower_bound == 0:
        return (1.0 if cover_size == 0 else math.inf), True
    return cover_size / opt.lower_bound, True
