"""Graph representation, connectivity predicates, graphic metric and Euler tours."""

from __future__ import annotations

from collections import Counter, deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

import networkx as nx
import numpy as np


class GraphError(ValueError):
    """Raised for structurally invalid graphs or violated preconditions."""


class InstanceFormatError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``edges`` is kept sorted with ``u < v`` in every pair; the position of a
    pair in that tuple is its edge id.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    _index: dict[tuple[int, int], int] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"vertex id out of range in edge ({u}, {v})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(key)
        ordered = tuple(sorted(seen))
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in ordered:
            adj[u].append(v)
            adj[v].append(u)
        return cls(
            n=n,
            edges=ordered,
            adjacency=tuple(tuple(sorted(a)) for a in adj),
            _index={e: i for i, e in enumerate(ordered)},
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._index

    def edge_id(self, u: int, v: int) -> int:
        return self._index[(min(u, v), max(u, v))]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Subgraph induced on ``vertices``, relabelled ``0..k-1``.

        Returns the subgraph and the list mapping new ids back to old ones.
        """
        old = sorted(set(vertices))
        new_of = {v: i for i, v in enumerate(old)}
        sub = [(new_of[u], new_of[v]) for u, v in self.edges if u in new_of and v in new_of]
        return Graph.from_edges(len(old), sub), old


@dataclass(frozen=True)
class EdgeInstance:
    """An edge of a working subgraph.

    ``via is None`` marks an original unit edge of the input graph. Otherwise
    the edge is a weight-2 shortcut standing for the path ``u, via, v``.
    """

    u: int
    v: int
    via: int | None = None

    def __post_init__(self):
        if self.u >= self.v:
            raise GraphError(f"edge endpoints must satisfy u < v, got ({self.u}, {self.v})")

    @classmethod
    def original(cls, a: int, b: int) -> EdgeInstance:
        return cls(min(a, b), max(a, b))

    @classmethod
    def shortcut(cls, a: int, b: int, via: int) -> EdgeInstance:
        return cls(min(a, b), max(a, b), via)

    @property
    def is_shortcut(self) -> bool:
        return self.via is not None

    @property
    def weight(self) -> int:
        return 1 if self.via is None else 2

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.u, self.v, -1 if self.via is None else self.via)

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u

    def hops(self, start: int) -> list[int]:
        """Vertices visited in ``g`` when traversing this edge from ``start``."""
        end = self.other(start)
        if self.via is None:
            return [start, end]
        return [start, self.via, end]

    def __lt__(self, other: EdgeInstance) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        if self.via is None:
            return f"({self.u},{self.v})"
        return f"({self.u},{self.v})~{self.via}"


class EdgeMultiset(Mapping):
    """Immutable mapping ``EdgeInstance -> multiplicity`` with multiplicity in {1, 2}."""

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[EdgeInstance, int] | Iterable[EdgeInstance] = ()):
        if isinstance(counts, Mapping):
            items = {e: int(c) for e, c in counts.items() if c}
        else:
            items = dict(Counter(counts))
        for e, c in items.items():
            if not 1 <= c <= 2:
                raise GraphError(f"multiplicity {c} of {e} outside {{1, 2}}")
        self._counts = items

    def __getitem__(self, e: EdgeInstance) -> int:
        return self._counts[e]

    def __iter__(self) -> Iterator[EdgeInstance]:
        return iter(sorted(self._counts))

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other) -> bool:
        if isinstance(other, EdgeMultiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._counts.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{e}x{c}" if c > 1 else str(e) for e, c in self.items())
        return f"EdgeMultiset({body})"

    @property
    def size(self) -> int:
        """Total multiplicity."""
        return sum(self._counts.values())

    @property
    def cost(self) -> int:
        return sum(e.weight * c for e, c in self._counts.items())

    def doubled(self) -> list[EdgeInstance]:
        return [e for e in self if self._counts[e] == 2]

    def plus(self, extra: Iterable[EdgeInstance]) -> EdgeMultiset:
        counts = dict(self._counts)
        for e in extra:
            counts[e] = counts.get(e, 0) + 1
        return EdgeMultiset(counts)

    def minus(self, e: EdgeInstance, times: int = 1) -> EdgeMultiset:
        counts = dict(self._counts)
        counts[e] -= times
        return EdgeMultiset(counts)

    def degrees(self, n: int) -> list[int]:
        deg = [0] * n
        for e, c in self._counts.items():
            deg[e.u] += c
            deg[e.v] += c
        return deg


# ---------------------------------------------------------------- parsing


def parse_graph(text: str) -> Graph:
    """Parse the ``p <n> <m>`` edge-list format."""
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 3 or parts[0] != "p":
                raise InstanceFormatError(lineno, "expected header 'p <n> <m>'")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise InstanceFormatError(lineno, "header counts must be integers") from None
            if n < 0 or m < 0:
                raise InstanceFormatError(lineno, "header counts must be non-negative")
            continue
        if len(parts) != 2:
            raise InstanceFormatError(lineno, f"expected '<u> <v>', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InstanceFormatError(lineno, f"non-integer vertex id in {line!r}") from None
        if u == v:
            raise InstanceFormatError(lineno, f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceFormatError(lineno, f"vertex id out of range 0..{n - 1}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InstanceFormatError(lineno, f"duplicate edge {key} (first at line {seen[key]})")
        seen[key] = lineno
        edges.append(key)
    if n is None:
        raise InstanceFormatError(1, "missing header")
    if len(edges) != m:
        raise InstanceFormatError(lineno if text else 1, f"header announces {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def serialize_graph(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"p {g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------- connectivity


def _pairs(sub) -> Iterator[tuple[int, int]]:
    for e in sub:
        if isinstance(e, EdgeInstance):
            yield e.u, e.v
        else:
            yield e[0], e[1]


def _support_adjacency(sub, n: int) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in _pairs(sub):
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _biconnected(adj: Mapping[int, Iterable[int]] | list, vertices: list[int]) -> bool:
    """Connected with no articulation vertex, on exactly ``vertices`` (>= 3 of them)."""
    if len(vertices) < 3:
        return False
    root = vertices[0]
    disc = {root: 0}
    low = {root: 0}
    root_children = 0
    stack = [(root, -1, iter(adj[root]))]
    t = 1
    while stack:
        v, parent, it = stack[-1]
        advanced = False
        for w in it:
            if w == parent:
                continue
            if w in disc:
                low[v] = min(low[v], disc[w])
                continue
            disc[w] = low[w] = t
            t += 1
            stack.append((w, v, iter(adj[w])))
            advanced = True
            break
        if advanced:
            continue
        stack.pop()
        if parent == -1:
            continue
        low[parent] = min(low[parent], low[v])
        if parent == root:
            root_children += 1
        elif low[v] >= disc[parent]:
            return False
    return root_children == 1 and len(disc) == len(vertices)


def is_two_vertex_connected(sub, n: int) -> bool:
    """True iff the support of ``sub`` spans all ``n`` vertices and is 2-vertex-connected.

    Shortcut edges count as ordinary edges; multiplicities are ignored.
    """
    adj = _support_adjacency(sub, n)
    return _biconnected(adj, list(range(n)))


def is_biconnected_on(sub, vertices: Iterable[int]) -> bool:
    """2-vertex-connectivity of ``sub`` restricted to the given vertex set."""
    vs = sorted(set(vertices))
    keep = set(vs)
    adj: dict[int, set[int]] = {v: set() for v in vs}
    for u, v in _pairs(sub):
        if u in keep and v in keep:
            adj[u].add(v)
            adj[v].add(u)
    return _biconnected(adj, vs)


def is_connected_on(sub, vertices: Iterable[int]) -> bool:
    vs = sorted(set(vertices))
    if not vs:
        return True
    keep = set(vs)
    adj: dict[int, set[int]] = {v: set() for v in vs}
    for u, v in _pairs(sub):
        if u in keep and v in keep:
            adj[u].add(v)
            adj[v].add(u)
    seen = {vs[0]}
    todo = [vs[0]]
    while todo:
        x = todo.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(vs)


def is_connected(g: Graph) -> bool:
    return is_connected_on(g.edges, range(g.n))


def biconnected_blocks(g: Graph) -> list[tuple[int, ...]]:
    """Vertex sets of the blocks of ``g``, sorted."""
    if not is_connected(g):
        raise GraphError("graph is disconnected")
    if g.n == 1:
        return [(0,)]
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges)
    return sorted(tuple(sorted(b)) for b in nx.biconnected_components(nxg))


def graphic_metric(g: Graph) -> np.ndarray:
    """All-pairs hop distances by BFS from every vertex."""
    dist = np.full((g.n, g.n), -1, dtype=np.int64)
    for s in range(g.n):
        row = dist[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if row[y] < 0:
                    row[y] = row[x] + 1
                    queue.append(y)
    if (dist < 0).any():
        raise GraphError("graph is disconnected")
    return dist


# ----------------------------------------------------------------- Euler


def is_eulerian(sub: EdgeMultiset, n: int) -> bool:
    """Connected support spanning all ``n`` vertices with every degree even."""
    deg = sub.degrees(n)
    if any(d % 2 for d in deg):
        return False
    if n == 1:
        return True
    if any(d == 0 for d in deg):
        return False
    return is_connected_on(sub, range(n))


def euler_circuit(sub: EdgeMultiset, start: int | None = None) -> list[tuple[int, int, EdgeInstance]]:
    """Closed walk using each edge instance as often as its multiplicity.

    Steps are ``(from, to, edge)``. The walk starts at the smallest vertex
    unless ``start`` is given.
    """
    if not sub:
        return []
    n = max(e.v for e in sub) + 1
    deg = sub.degrees(n)
    used = [v for v in range(n) if deg[v]]
    if any(d % 2 for d in deg) or not is_connected_on(sub, used):
        raise GraphError("edge multiset is not Eulerian")
    mg = nx.MultiGraph()
    for e, c in sub.items():
        for copy in range(c):
            mg.add_edge(e.u, e.v, key=(e, copy))
    source = used[0] if start is None else start
    return [(a, b, key[0]) for a, b, key in nx.eulerian_circuit(mg, source=source, keys=True)]


def expand_to_walk(tour: EdgeMultiset, g: Graph, start: int | None = None) -> list[int]:
    """Closed vertex walk in ``g`` realizing the tour; shortcuts expand to their 2-paths.

    The returned list starts and ends at the same vertex, so its hop length is
    ``len(walk) - 1``.
    """
    circuit = euler_circuit(tour, start)
    if not circuit:
        return [0] if g.n == 1 else []
    walk = [circuit[0][0]]
    for a, _b, e in circuit:
        hops = e.hops(a)
        for x, y in zip(hops, hops[1:]):
            if not g.has_edge(x, y):
                raise GraphError(f"edge {e} expands through ({x}, {y}), which is not in the graph")
        walk.extend(hops[1:])
    return walk


def is_valid_closed_walk(walk: list[int], g: Graph) -> bool:
    """Closed, uses only edges of ``g`` and visits every vertex."""
    if g.n == 1:
        return walk in ([0], [0, 0], [])
    if len(walk) < 2 or walk[0] != walk[-1]:
        return False
    if any(not g.has_edge(a, b) for a, b in zip(walk, walk[1:])):
        return False
    return set(walk) == set(range(g.n))
