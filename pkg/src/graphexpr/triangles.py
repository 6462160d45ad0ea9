"""Triangle counting on undirected expressions.

The fold summary is the triple (n, m, t): vertex count, edge count, triangle
count.  Adding a vertex x creates one new triangle per child edge whose
endpoints are both neighbors of x.  Substitution combines summaries
arithmetically: every pattern edge {i, j} contributes n_i * n_j edges and
m_i * n_j + n_i * m_j triangles, and every pattern triangle {i, j, k}
contributes n_i * n_j * n_k triangles.  For tree-depth patterns the triangle
sum is accumulated while walking the pattern expression instead of
enumerating the pattern's triangles up front.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import framework
from .errors import InputError
from .expr import Expression, evaluate, normalize, validate_or_raise
from .framework import FoldStats, HandlerSet, fold_td_expression
from .graphs import UNDIRECTED


@dataclass(frozen=True)
class TriFold:
    n: int
    m: int
    t: int


def combine_inc(f: TriFold, name, neighbors, view) -> TriFold:
    """Summary after adding one vertex adjacent to ``neighbors``.

    Every new triangle uses the new vertex plus exactly one child edge with
    both endpoints adjacent to it.
    """
    closed = view.edge_count_within(neighbors)
    return TriFold(f.n + 1, f.m + len(neighbors), f.t + closed)


def combine_subst(pattern, children) -> TriFold:
    """Summary of substituting ``children`` into an explicit pattern."""
    by_name = dict(children)
    h = pattern.to_graph()
    n = sum(f.n for f in by_name.values())
    m = sum(f.m for f in by_name.values())
    t = sum(f.t for f in by_name.values())
    for (u, v) in h.edges:
        fu, fv = by_name[u], by_name[v]
        m += fu.n * fv.n
        t += fu.m * fv.n + fu.n * fv.m
    index = {name: i for i, name in enumerate(h.vertices)}
    for (u, v) in h.edges:
        if index[u] > index[v]:
            u, v = v, u
        common = h.neighbors(u) & h.neighbors(v)
        for c in common:
            if index[c] > index[v]:  # count each pattern triangle once
                t += by_name[u].n * by_name[v].n * by_name[c].n
    return TriFold(n, m, t)


def combine_subst_td(pattern_expr, children) -> TriFold:
    """Same result as combine_subst on the evaluated pattern, but the
    pattern's triangles are found while replaying its tree-depth expression:
    each added pattern vertex x contributes n_u * n_v * n_x for every
    sub-pattern edge {u, v} inside its neighborhood."""
    by_name = dict(children)
    sizes = {name: f.n for name, f in by_name.items()}
    h = evaluate(Expression(UNDIRECTED, pattern_expr))

    edges: list = []
    tri_total = 0

    def on_inc(child_edges, x, in_names, out_names, view):
        nonlocal tri_total
        nbrs = in_names | out_names
        for (u, v) in child_edges:
            if u in nbrs and v in nbrs:
                tri_total += sizes[u] * sizes[v] * sizes[x]
        child_edges.extend((x, u) for u in nbrs)
        return child_edges

    def on_union(vals):
        out = []
        for es in vals:
            out.extend(es)
        return out

    edges = fold_td_expression(
        pattern_expr, h, empty=list, vertex=lambda name: [], union=on_union, inc=on_inc
    )

    n = sum(f.n for f in by_name.values())
    m = sum(f.m for f in by_name.values())
    t = sum(f.t for f in by_name.values()) + tri_total
    for (u, v) in edges:
        fu, fv = by_name[u], by_name[v]
        m += fu.n * fv.n
        t += fu.m * fv.n + fu.n * fv.m
    return TriFold(n, m, t)


def handlers() -> HandlerSet:
    return HandlerSet(
        base_empty=lambda: TriFold(0, 0, 0),
        base_vertex=lambda name: TriFold(1, 0, 0),
        on_inc=lambda f, name, inn, out, view: combine_inc(f, name, inn | out, view),
        on_subst=lambda pattern, children: combine_subst(pattern, children),
        on_subst_td=lambda pexpr, children: combine_subst_td(pexpr, children),
    )


def triangle_summary(e: Expression, *, verify=None) -> tuple[TriFold, FoldStats]:
    """Run the triangle-counting fold; returns the summary and fold stats."""
    if e.mode != UNDIRECTED:
        raise InputError("triangle counting requires an undirected expression")
    validate_or_raise(e)
    ne = normalize(e)
    graph = evaluate(ne)
    checker = None
    if verify:
        from .oracle import oracle_triangles

        def checker(path, node, value, sub):
            if sub.n <= 200 and value.t != oracle_triangles(sub):
                from .errors import VerificationError

                raise VerificationError(
                    f"{path}: triangle summary {value.t} disagrees with "
                    f"brute force on the materialized subgraph"
                )

    value, stats = framework.fold(ne, handlers(), graph=graph, verify=checker)
    return value, stats


def count_triangles(e: Expression) -> int:
    """Number of triangles in the evaluated graph."""
    return triangle_summary(e)[0].t
