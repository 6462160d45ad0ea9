"""Generic bottom-up fold over normalized expression trees.

A problem is solved on an expression by supplying one handler per operation;
the fold threads per-subtree summary values upward exactly as the expression
is structured.  Handlers see only summaries and the node payload, with one
exception: inc handlers receive a read-only view of the child subgraph,
because adding a vertex inherently needs to look at the edges it closes
(the view is induced from the fully evaluated graph, which equals the child
subexpression's value since vertex names are globally unique and later
operations never add edges inside an existing subtree).

The fold also collects accounting statistics (pattern-order sums, inc
nesting) that the theory bounds; ``assert_stats`` re-checks those bounds on
every run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import InputError
from .expr import (
    Empty,
    Expression,
    Inc,
    Join,
    Params,
    Subst,
    SubstTd,
    Union,
    Vertex,
    collect_vertex_names,
    evaluate,
    inc_nesting,
    pattern_vertex_order,
    subexpressions,
)
from .graphs import DIRECTED, Graph


class SubgraphView:
    """Read-only induced-subgraph view over the evaluated graph."""

    __slots__ = ("graph", "vertices")

    def __init__(self, graph: Graph, vertices: frozenset):
        self.graph = graph
        self.vertices = vertices

    def out_neighbors(self, v):
        return [u for u in self.graph.out_neighbors(v) if u in self.vertices]

    def in_neighbors(self, v):
        return [u for u in self.graph.in_neighbors(v) if u in self.vertices]

    def edge_count_within(self, names) -> int:
        """Number of (undirected) edges with both endpoints in ``names``."""
        total = 0
        for u in names:
            for v in self.graph.neighbors(u):
                if v in names:
                    total += 1
        return total // 2

    def edges(self):
        kind = self.graph.kind
        for u in self.vertices:
            for v in self.graph.out_neighbors(u):
                if v in self.vertices and (kind == DIRECTED or u <= v):
                    yield (u, v)

    def materialize(self) -> Graph:
        return self.graph.induced(self.vertices)


@dataclass
class HandlerSet:
    """Per-operation handlers producing summaries of type F.

    on_subst / on_subst_td receive the children as ``(pattern vertex name,
    summary)`` pairs in pattern vertex order.
    """

    base_empty: Callable
    base_vertex: Callable
    on_inc: Callable      # (child F, name, in_names, out_names, view) -> F
    on_subst: Callable    # (Pattern, [(name, F), ...]) -> F
    on_subst_td: Callable  # (pattern_expr, [(name, F), ...]) -> F


@dataclass
class FoldStats:
    """Accounting collected during a fold."""

    counts: dict = field(default_factory=dict)
    sum_pattern_order: int = 0
    max_inc_nesting: int = 0
    leaf_count: int = 0
    max_subst_order: int = 0
    max_subtd_depth: int = 0

    def bump(self, kind):
        self.counts[kind] = self.counts.get(kind, 0) + 1


def fold(e: Expression, handlers: HandlerSet, *, graph: Graph = None, verify=None):
    """Fold a normalized, validated expression bottom-up.

    Returns ``(summary, FoldStats)``.  ``graph`` may supply the evaluated
    graph if the caller already has it.  ``verify``, when given, is called as
    ``verify(path, node, summary, subgraph)`` after every handler with the
    materialized subgraph of that node (debug mode; quadratic).
    """
    if graph is None:
        graph = evaluate(e)
    stats = FoldStats()
    frames = [[e.root, "root", None, 0, []]]
    result = None
    while frames:
        frame = frames[-1]
        node, path, kids, i, vals = frame
        if kids is None:
            kids = frame[2] = subexpressions(node)
        if i < len(kids):
            frame[3] += 1
            child = kids[i]
            frames.append([child, f"{path}/{_step(node, i)}", None, 0, []])
            continue

        # vals holds (summary, inc_depth) pairs for the children
        depth = max((d for _, d in vals), default=0)
        try:
            if isinstance(node, Empty):
                stats.bump("empty")
                stats.leaf_count += 1
                value = handlers.base_empty()
            elif isinstance(node, Vertex):
                stats.bump("vertex")
                stats.leaf_count += 1
                value = handlers.base_vertex(node.name)
            elif isinstance(node, Inc):
                stats.bump("inc")
                depth += 1
                stats.max_inc_nesting = max(stats.max_inc_nesting, depth)
                view = SubgraphView(graph, frozenset(collect_vertex_names(node.child)))
                value = handlers.on_inc(
                    vals[0][0], node.name, node.in_names, node.out_names, view
                )
            elif isinstance(node, Subst):
                stats.bump("subst")
                order = len(node.pattern.names)
                stats.sum_pattern_order += order
                stats.max_subst_order = max(stats.max_subst_order, order)
                children = _aligned(node, node.pattern.names, vals)
                value = handlers.on_subst(node.pattern, children)
            elif isinstance(node, SubstTd):
                stats.bump("subst_td")
                p_order = pattern_vertex_order(node.pattern_expr)
                stats.sum_pattern_order += len(p_order)
                stats.max_subtd_depth = max(
                    stats.max_subtd_depth, inc_nesting(node.pattern_expr)
                )
                children = _aligned(node, p_order, vals)
                value = handlers.on_subst_td(node.pattern_expr, children)
            elif isinstance(node, (Union, Join)):
                raise InputError(
                    "fold requires a normalized expression (no union/join); "
                    "call normalize() first"
                )
            else:
                raise InputError(f"unknown node type {type(node).__name__}")
        except Exception as exc:
            if not getattr(exc, "_fold_path", None):
                exc._fold_path = path
                exc.args = (f"{exc.args[0] if exc.args else exc!r} [at {path}]",) + exc.args[1:]
            raise

        if verify is not None:
            sub = graph.induced(collect_vertex_names(node))
            verify(path, node, value, sub)

        frames.pop()
        if frames:
            frames[-1][4].append((value, depth))
        else:
            result = value
    return result, stats


def _step(node, i):
    if isinstance(node, Inc):
        return "child"
    if isinstance(node, (Subst, SubstTd)):
        return f"bind[{node.bindings[i][0]}]"
    return str(i)


def _aligned(node, order, vals):
    by_name = {bn: v for (bn, _), (v, _) in zip(node.bindings, vals)}
    return [(pname, by_name[pname]) for pname in order]


def assert_stats(stats: FoldStats, n: int, p: Params) -> list:
    """Check the fold accounting against the theoretical bounds.  Returns a
    list of violation messages (empty = ok).

    Normalization may introduce two-vertex patterns, so the pattern-order cap
    is max(h, 2) whenever any substitution node exists.
    """
    violations = []
    if stats.sum_pattern_order > 2 * n:
        violations.append(
            f"sum of pattern orders {stats.sum_pattern_order} exceeds 2n = {2 * n}"
        )
    if stats.max_inc_nesting > p.k:
        violations.append(
            f"inc nesting {stats.max_inc_nesting} exceeds declared k = {p.k}"
        )
    if stats.max_subst_order > max(p.h, 2):
        violations.append(
            f"pattern order {stats.max_subst_order} exceeds declared h = {p.h}"
        )
    if stats.max_subtd_depth > p.l:
        violations.append(
            f"pattern tree-depth {stats.max_subtd_depth} exceeds declared l = {p.l}"
        )
    return violations


# ---------------------------------------------------------------------------
# Folds over tree-depth pattern expressions.
#
# Subst-td handlers re-run the framework on the pattern itself (the pattern
# is a tree-depth expression over the pattern vertices).  Union survives
# here and is handled by a merge function, since disjoint parts interact
# with none of the supported problems.


def fold_td_expression(pattern_expr, pattern_graph: Graph, *, empty, vertex, union, inc):
    """Iterative post-order fold over a pure tree-depth expression.

    ``inc`` is called as ``inc(child_value, name, in_names, out_names, view)``
    with a view of the child sub-pattern induced from ``pattern_graph``.
    Values carry their sub-pattern vertex sets internally.
    """
    frames = [[pattern_expr, None, 0, []]]
    result = None
    while frames:
        frame = frames[-1]
        node, kids, i, vals = frame
        if kids is None:
            kids = frame[1] = subexpressions(node)
        if i < len(kids):
            frame[2] += 1
            frames.append([kids[i], None, 0, []])
            continue
        if isinstance(node, Empty):
            pair = (empty(), set())
        elif isinstance(node, Vertex):
            pair = (vertex(node.name), {node.name})
        elif isinstance(node, Union):
            names = set()
            for _, s in vals:
                names |= s
            pair = (union([v for v, _ in vals]), names)
        elif isinstance(node, Inc):
            child_value, names = vals[0]
            view = SubgraphView(pattern_graph, frozenset(names))
            value = inc(child_value, node.name, node.in_names, node.out_names, view)
            names.add(node.name)
            pair = (value, names)
        else:
            raise InputError(
                f"{type(node).__name__} node inside a tree-depth pattern expression"
            )
        frames.pop()
        if frames:
            frames[-1][3].append(pair)
        else:
            result = pair
    return result[0]
