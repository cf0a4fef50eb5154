"""Immutable simple graphs, residual-graph masks and edge-list I/O."""

from __future__ import annotations

import heapq
from collections import deque
from collections.abc import Iterable, Iterator
from functools import cached_property
from typing import BinaryIO, TextIO

import numpy as np

from hrgcover.geometry import PolarPoint


class EdgeListError(ValueError):
    """Malformed line in an edge-list file."""

    def __init__(self, lineno: int, line: str) -> None:
        super().__init__(f"line {lineno}: expected two integer vertex ids, got {line.strip()!r}")
        self.lineno = lineno


class Graph:
    """Undirected simple graph in compressed sparse row form.

    Vertex ids are dense ``0..vertex_count-1``. Neighbor lists are sorted.
    Generated graphs carry per-vertex ``radii`` and ``angles``; graphs loaded
    from real-world edge lists do not.
    """

    __slots__ = ("indptr", "indices", "radii", "angles", "__dict__")

    def __init__(
        self,
        indptr: np.ndarray,
        indices: np.ndarray,
        radii: np.ndarray | None = None,
        angles: np.ndarray | None = None,
    ) -> None:
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        if (radii is None) != (angles is None):
            raise ValueError("radii and angles must be given together")
        if radii is not None:
            radii = np.asarray(radii, dtype=float)
            angles = np.asarray(angles, dtype=float)
            if len(radii) != self.vertex_count or len(angles) != self.vertex_count:
                raise ValueError("coordinate arrays must have one entry per vertex")
        self.radii = radii
        self.angles = angles
        for arr in (self.indptr, self.indices, self.radii, self.angles):
            if arr is not None:
                arr.flags.writeable = False

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        radii: np.ndarray | None = None,
        angles: np.ndarray | None = None,
    ) -> Graph:
        """Build a graph on ``n`` vertices; self-loops and duplicates are dropped."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint outside 0..{n - 1}")
        u, v = arr[:, 0], arr[:, 1]
        keep = u != v
        u, v = u[keep], v[keep]
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if len(src):
            first = np.ones(len(src), dtype=bool)
            first[1:] = (src[1:] != src[:-1]) | (dst[1:] != dst[:-1])
            src, dst = src[first], dst[first]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(indptr, dst, radii, angles)

    @property
    def vertex_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def has_coordinates(self) -> bool:
        return self.radii is not None

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists, for the pure-Python solvers."""
        flat = self.indices.tolist()
        bounds = self.indptr.tolist()
        return [flat[bounds[v] : bounds[v + 1]] for v in range(self.vertex_count)]

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.flags.writeable = False
        return d

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def point(self, v: int) -> PolarPoint:
        if self.radii is None:
            raise ValueError("graph has no coordinates")
        return PolarPoint(float(self.radii[v]), float(self.angles[v]))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Each edge once as ``(u, v)`` with ``u < v``, in lexicographic order."""
        adj = self.adjacency
        for u in range(self.vertex_count):
            for v in adj[u]:
                if u < v:
                    yield u, v

    def edge_array(self) -> np.ndarray:
        src = np.repeat(np.arange(self.vertex_count), self.degrees)
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask]], axis=1)

    def __repr__(self) -> str:
        coords = ", with coordinates" if self.has_coordinates else ""
        return f"Graph(n={self.vertex_count}, m={self.edge_count}{coords})"


class AliveMask:
    """Which vertices remain in the residual graph."""

    __slots__ = ("alive", "alive_count")

    def __init__(self, n: int, alive: bool = True) -> None:
        self.alive = bytearray(b"\x01" * n) if alive else bytearray(n)
        self.alive_count = n if alive else 0

    @classmethod
    def of(cls, n: int, vertices: Iterable[int]) -> AliveMask:
        mask = cls(n, alive=False)
        for v in vertices:
            mask.revive(v)
        return mask

    def __contains__(self, v: int) -> bool:
        return bool(self.alive[v])

    def __len__(self) -> int:
        return self.alive_count

    def kill(self, v: int) -> None:
        if self.alive[v]:
            self.alive[v] = 0
            self.alive_count -= 1

    def revive(self, v: int) -> None:
        if not self.alive[v]:
            self.alive[v] = 1
            self.alive_count += 1

    def vertices(self) -> list[int]:
        return [v for v, a in enumerate(self.alive) if a]


class DegreeQueue:
    """Bucket queue over residual degrees with lazy invalidation.

    Each bucket is a min-heap of vertex ids, so :meth:`pop_max` returns the
    alive vertex of maximum residual degree with the smallest id. Stale heap
    entries (dead vertices, or degrees that have since dropped) are discarded
    on extraction. Degrees only decrease, so the top pointer only moves down.
    """

    def __init__(self, g: Graph, mask: AliveMask | None = None) -> None:
        adj = self.adj = g.adjacency
        n = g.vertex_count
        self.mask = mask if mask is not None else AliveMask(n)
        alive = self.mask.alive
        if mask is None:
            self.degree = g.degrees.tolist()
        else:
            self.degree = [sum(alive[u] for u in adj[v]) if alive[v] else 0 for v in range(n)]
        top = max(self.degree, default=0)
        self.buckets: list[list[int]] = [[] for _ in range(top + 1)]
        for v in range(n):
            if alive[v]:
                self.buckets[self.degree[v]].append(v)  # ascending ids form valid heaps
        self.top = top

    def remove(self, v: int) -> None:
        """Kill ``v`` and lower the residual degree of its alive neighbors."""
        alive = self.mask.alive
        self.mask.kill(v)
        for u in self.adj[v]:
            if alive[u]:
                self.decrement(u)

    def decrement(self, v: int) -> None:
        d = self.degree[v] - 1
        self.degree[v] = d
        heapq.heappush(self.buckets[d], v)

    def max_degree(self) -> int:
        """Current maximum residual degree (0 if nothing but isolated vertices remain)."""
        self._settle()
        return self.top if self.top >= 0 else 0

    def pop_max(self) -> int | None:
        """Remove and return the max-degree alive vertex, or ``None`` when empty."""
        self._settle()
        if self.top < 0:
            return None
        return heapq.heappop(self.buckets[self.top])

    def _settle(self) -> None:
        buckets, degree, alive = self.buckets, self.degree, self.mask.alive
        top = self.top
        while top >= 0:
            bucket = buckets[top]
            while bucket:
                v = bucket[0]
                if alive[v] and degree[v] == top:
                    self.top = top
                    return
                heapq.heappop(bucket)
            top -= 1
        self.top = top


def bounded_component(g: Graph, mask: AliveMask, start: int, limit: int) -> list[int] | None:
    """Alive connected component of ``start`` if it has at most ``limit`` vertices.

    Breadth-first search that gives up (returning ``None``) as soon as the
    ``limit + 1``-st vertex is discovered. Cost is proportional to the
    adjacency scanned, never to ``n``.
    """
    alive = mask.alive
    if not alive[start]:
        raise ValueError(f"start vertex {start} is not alive")
    if limit < 1:
        raise ValueError("limit must be positive")
    order, complete = bfs_prefix(g.adjacency, alive, start, limit)
    return order if complete else None


def bfs_prefix(adj: list[list[int]], alive: bytearray, start: int, limit: int) -> tuple[list[int], bool]:
    """BFS over alive vertices that stops once ``limit`` vertices are exceeded.

    Returns the vertices discovered (at most ``limit``, in BFS order) and
    whether the whole component was explored. Every returned vertex lies in
    the component of ``start`` either way.
    """
    seen = {start}
    order = [start]
    head = 0
    while head < len(order):
        for u in adj[order[head]]:
            if alive[u] and u not in seen:
                if len(order) == limit:
                    return order, False
                seen.add(u)
                order.append(u)
        head += 1
    return order, True


def connected_components(g: Graph, mask: AliveMask | None = None) -> list[list[int]]:
    """Components of the alive subgraph, each sorted, ordered by smallest id."""
    n = g.vertex_count
    alive = mask.alive if mask is not None else bytearray(b"\x01" * n)
    adj = g.adjacency
    seen = bytearray(n)
    out = []
    for s in range(n):
        if not alive[s] or seen[s]:
            continue
        seen[s] = 1
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if alive[u] and not seen[u]:
                    seen[u] = 1
                    comp.append(u)
                    queue.append(u)
        comp.sort()
        out.append(comp)
    return out


def is_vertex_cover(g: Graph, cover: Iterable[int]) -> bool:
    inside = np.zeros(g.vertex_count, dtype=bool)
    idx = np.fromiter(cover, dtype=np.int64)
    inside[idx] = True
    src = np.repeat(np.arange(g.vertex_count), g.degrees)
    return bool(np.all(inside[src] | inside[g.indices]))


def induced_adjacency(g: Graph, vertices: Iterable[int]) -> dict[int, set[int]]:
    vs = set(vertices)
    adj = g.adjacency
    return {v: {u for u in adj[v] if u in vs} for v in vs}


# -- edge-list I/O ---------------------------------------------------------


def _lines(source: BinaryIO | TextIO | Iterable[str | bytes] | bytes | str) -> Iterable[str | bytes]:
    if isinstance(source, (bytes, str)):
        return source.splitlines()
    return source


def load_edge_list(
    source: BinaryIO | TextIO | Iterable[str | bytes] | bytes | str,
    vertex_count: int | None = None,
) -> tuple[Graph, list[int]]:
    """Parse a SNAP/KONECT style edge list.

    Lines starting with ``#`` or ``%`` are comments; other lines must start with
    two integer ids (extra columns such as weights or timestamps are ignored).
    Ids are remapped to dense 0-based ids in first-seen order and the returned
    ``id_map`` lists the original id of each dense id.

    When ``vertex_count`` is given, ids are taken literally (they must already
    be dense in ``0..vertex_count-1``) and ``id_map`` is the identity. This is
    how graphs written by :func:`write_edge_list` round-trip together with a
    coordinate sidecar, isolated vertices included.
    """
    ids: dict[int, int] = {}
    us: list[int] = []
    vs: list[int] = []
    for lineno, line in enumerate(_lines(source), start=1):
        if isinstance(line, bytes):
            line = line.decode()
        stripped = line.strip()
        if not stripped or stripped[0] in "#%":
            continue
        parts = stripped.split()
        try:
            a, b = int(parts[0]), int(parts[1])
        except (IndexError, ValueError):
            raise EdgeListError(lineno, line) from None
        if vertex_count is None:
            a = ids.setdefault(a, len(ids))
            b = ids.setdefault(b, len(ids))
        us.append(a)
        vs.append(b)
    if vertex_count is None:
        n = len(ids)
        id_map = list(ids)
    else:
        n = vertex_count
        id_map = list(range(n))
    edges = np.stack([np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)], axis=1)
    return Graph.from_edges(n, edges), id_map


def write_edge_list(g: Graph, sink: TextIO, header: dict[str, object] | None = None) -> None:
    sink.write(f"# vertices {g.vertex_count}\n# edges {g.edge_count}\n")
    for key, value in (header or {}).items():
        sink.write(f"# {key}={value}\n")
    edges = g.edge_array()
    if len(edges):
        np.savetxt(sink, edges, fmt="%d")


def write_coordinates(g: Graph, sink: TextIO, metadata: dict[str, object] | None = None) -> None:
    """Write ``id radius angle`` lines preceded by ``# key=value`` metadata."""
    if not g.has_coordinates:
        raise ValueError("graph has no coordinates")
    for key, value in (metadata or {}).items():
        sink.write(f"# {key}={value}\n")
    for v, (r, phi) in enumerate(zip(g.radii.tolist(), g.angles.tolist())):
        sink.write(f"{v} {r!r} {phi!r}\n")


def read_coordinates(source: TextIO | Iterable[str]) -> tuple[np.ndarray, np.ndarray, dict[str, str]]:
    """Parse a coordinate sidecar into ``(radii, angles, metadata)`` indexed by id."""
    meta: dict[str, str] = {}
    rows: dict[int, tuple[float, float]] = {}
    for lineno, line in enumerate(source, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped[0] in "#%":
            body = stripped[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        parts = stripped.split()
        try:
            rows[int(parts[0])] = (float(parts[1]), float(parts[2]))
        except (IndexError, ValueError):
            raise ValueError(f"coordinate line {lineno}: expected 'id radius angle', got {stripped!r}") from None
    n = len(rows)
    if set(rows) != set(range(n)):
        raise ValueError("coordinate ids must be dense 0..n-1")
    radii = np.array([rows[v][0] for v in range(n)])
    angles = np.array([rows[v][1] for v in range(n)])
    return radii, angles, meta


def with_coordinates(g: Graph, radii: np.ndarray, angles: np.ndarray, id_map: list[int] | None = None) -> Graph:
    """Attach coordinates (indexed by original id, reordered through ``id_map``)."""
    if id_map is not None:
        idx = np.asarray(id_map, dtype=np.int64)
        radii, angles = np.asarray(radii)[idx], np.asarray(angles)[idx]
    return Graph(g.indptr, g.indices, radii, angles)
