"""Simple graphs with string vertex ids and the shortest-path primitives
built on vertex weights.

Distance convention used throughout the package: the distance between two
vertices is the sum of the weights of *all* vertices on the path, both
endpoints included, and ``dist(u, u) = w(u)`` (a single vertex counts as a
path).  Vertex weights are moved onto edges via the edge shift
``cost((x, y)) = w(x)``, which makes the cost of a path ``P`` ending in ``v``
equal to ``w(P) - w(v)`` and the cost of a cycle equal to its vertex-weight
sum.
"""

from __future__ import annotations

import heapq
import math

from .errors import ContractViolation, InputError

INF = math.inf

# Absolute tolerance for feasibility and equality checks on weights.
TOL = 1e-9

DIRECTED = "directed"
UNDIRECTED = "undirected"


class NegativeCycle:
    """Verdict value: the graph contains a cycle of negative vertex weight."""

    __slots__ = ()

    def __repr__(self):
        return "NegativeCycle"


#: Singleton returned by solvers instead of a summary / distance matrix.
NEGATIVE_CYCLE = NegativeCycle()


def is_negative_cycle(value) -> bool:
    return isinstance(value, NegativeCycle)


def canonical_edge(kind: str, u: str, v: str) -> tuple[str, str]:
    """Directed edges are (tail, head); undirected edges store sorted endpoints."""
    if kind == UNDIRECTED and v < u:
        return (v, u)
    return (u, v)


class Graph:
    """Immutable simple graph (no loops, no parallel edges).

    ``vertices`` keeps insertion order; ``edges`` is a frozenset of
    canonical pairs.  Adjacency is prebuilt, all queries are O(1)/O(deg).
    Instances are never mutated after construction, so they can be shared
    freely between threads.
    """

    __slots__ = ("kind", "vertices", "edges", "_out", "_in", "_vset")

    def __init__(self, kind, vertices, edges):
        if kind not in (DIRECTED, UNDIRECTED):
            raise InputError(f"unknown graph kind {kind!r}")
        vertices = tuple(vertices)
        vset = frozenset(vertices)
        if len(vset) != len(vertices):
            raise InputError("duplicate vertex id in graph")
        out = {v: set() for v in vertices}
        inn = {v: set() for v in vertices} if kind == DIRECTED else out
        canon = set()
        for u, v in edges:
            if u == v:
                raise InputError(f"loop at vertex {u!r} not allowed")
            if u not in vset or v not in vset:
                raise InputError(f"edge ({u!r}, {v!r}) references undeclared vertex")
            e = canonical_edge(kind, u, v)
            canon.add(e)
            out[e[0]].add(e[1])
            inn[e[1]].add(e[0])
        self.kind = kind
        self.vertices = vertices
        self.edges = frozenset(canon)
        self._out = out
        self._in = inn
        self._vset = vset

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __contains__(self, v) -> bool:
        return v in self._vset

    def has_edge(self, u, v) -> bool:
        return canonical_edge(self.kind, u, v) in self.edges

    def out_neighbors(self, v):
        return self._out[v]

    def in_neighbors(self, v):
        return self._in[v]

    def neighbors(self, v):
        if self.kind == DIRECTED:
            return self._out[v] | self._in[v]
        return self._out[v]

    def induced(self, names) -> "Graph":
        """Subgraph induced on ``names`` (must be declared vertices)."""
        keep = frozenset(names)
        vs = [v for v in self.vertices if v in keep]
        es = [e for e in self.edges if e[0] in keep and e[1] in keep]
        return Graph(self.kind, vs, es)

    def __repr__(self):
        return f"Graph({self.kind}, n={self.n}, m={self.m})"


def reverse(g: Graph) -> Graph:
    """Flip every edge direction; vertex set unchanged."""
    if g.kind != DIRECTED:
        raise InputError("reverse is defined for directed graphs")
    return Graph(DIRECTED, g.vertices, [(v, u) for (u, v) in g.edges])


def check_total_weights(g: Graph, w: dict) -> None:
    missing = [v for v in g.vertices if v not in w]
    if missing:
        raise InputError(
            "weight map is missing vertices: " + ", ".join(sorted(missing)[:5])
        )


def edge_shift(g: Graph, w: dict) -> dict:
    """Edge costs that move each vertex weight onto its outgoing edges:
    ``cost((x, y)) = w(x)``."""
    if g.kind != DIRECTED:
        raise InputError("edge_shift requires a directed graph")
    check_total_weights(g, w)
    return {(u, v): w[u] for (u, v) in g.edges}


def check_potential(g: Graph, costs: dict, pi: dict, tol: float = TOL) -> bool:
    """True iff every reduced cost ``c(e) + pi(tail) - pi(head)`` is >= -tol."""
    if g.kind != DIRECTED:
        raise InputError("potentials are defined on directed graphs")
    for v in g.vertices:
        if v not in pi:
            raise InputError(f"potential is missing vertex {v!r}")
    for (u, v) in g.edges:
        if costs[(u, v)] + pi[u] - pi[v] < -tol:
            return False
    return True


def dijkstra_reduced(g: Graph, costs: dict, pi: dict, sources) -> dict:
    """Multi-source Dijkstra under reduced costs ``c(e) + pi(tail) - pi(head)``.

    ``sources`` is an iterable of ``(vertex, initial_label)`` pairs; initial
    labels may be negative (they play the role of first-hop reduced costs from
    a virtual source).  Every relaxed edge must have non-negative reduced
    cost, otherwise the supplied potential was not feasible and a
    ContractViolation is raised.  Returns a label for every vertex
    (``inf`` when unreachable); labels live in reduced-cost space, callers
    convert back by adding ``pi(target)``.
    """
    if g.kind != DIRECTED:
        raise InputError("dijkstra_reduced requires a directed graph")
    dist = {v: INF for v in g.vertices}
    heap = []
    for v, lab in sources:
        if v not in dist:
            raise InputError(f"source {v!r} is not a vertex of the graph")
        if lab < dist[v]:
            dist[v] = lab
            heapq.heappush(heap, (lab, v))
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v] + TOL:
            continue
        for u in g._out[v]:
            rc = costs[(v, u)] + pi[v] - pi[u]
            if rc < -TOL:
                raise ContractViolation(
                    f"negative reduced cost {rc} on edge ({v!r}, {u!r}); "
                    "potential is not feasible"
                )
            nd = d + max(rc, 0.0)
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def floyd_vertex_weighted(g: Graph, w: dict):
    """All-pairs distances under the vertex-weight convention, or the
    NEGATIVE_CYCLE verdict.

    dist(u, u) = w(u); dist(u, v) sums the weights of all path vertices
    including both endpoints.  Relaxation through a middle vertex k therefore
    subtracts w(k) once to undo the double count.
    """
    if g.kind != DIRECTED:
        raise InputError("floyd_vertex_weighted requires a directed graph")
    check_total_weights(g, w)
    vs = list(g.vertices)
    d = {u: {v: INF for v in vs} for u in vs}
    for u in vs:
        d[u][u] = w[u]
    for (u, v) in g.edges:
        c = w[u] + w[v]
        if c < d[u][v]:
            d[u][v] = c
    for k in vs:
        row_k = d[k]
        wk = w[k]
        for i in vs:
            dik = d[i][k]
            if dik == INF or i == k:
                continue
            row_i = d[i]
            base = dik - wk
            for j in vs:
                alt = base + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    # A closed walk i -> j -> i of negative total weight (each endpoint
    # counted once) witnesses a negative cycle; conversely any negative
    # cycle produces such a pair.
    for i in vs:
        row_i = d[i]
        for j in vs:
            if i != j and row_i[j] < INF and d[j][i] < INF:
                if row_i[j] + d[j][i] - w[i] - w[j] < -TOL:
                    return NEGATIVE_CYCLE
    return {(i, j): d[i][j] for i in vs for j in vs}


def parse_weights(text: str) -> dict:
    """Parse a TSV weight file: ``name<TAB>weight`` per line, ``#`` comments."""
    weights = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"weights line {lineno}: expected name<TAB>weight")
        name, value = parts
        try:
            weights[name.strip()] = float(value)
        except ValueError:
            raise InputError(f"weights line {lineno}: bad number {value!r}") from None
    return weights
