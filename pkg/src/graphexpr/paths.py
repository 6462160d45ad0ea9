"""Vertex-weighted shortest paths on directed expressions: negative cycle
detection and all-pairs distances.

Every handler keeps two things alive while folding the expression:

* a *shortest-path feasible potential* -- the distances from a virtual
  source wired to every vertex with zero-cost edges, taken under the
  edge-shifted costs ``cost((x, y)) = w(x)``.  Feasibility (all reduced edge
  costs non-negative) is what lets the incremental steps run Dijkstra
  instead of Bellman-Ford;
* ``msp``, the minimum total weight over all paths including single
  vertices, which is exactly the vertex weight that a substituted module
  contributes to paths passing through it.

Substitution reduces to the pattern graph reweighted with the children's
msp values: that small graph has a negative cycle iff the substituted graph
does, and its distance matrix provides both the new msp and the pieces of
the distance composition.  For the all-pairs problem, substitution nodes
keep distances at pattern granularity (ModuleSummary) and are expanded to
full pairwise distances (FullSummary) only when a vertex-addition node or
the root needs them; the expansion walks the substitution spine top-down
with the classic "cheapest detour that leaves this module" values.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from . import framework
from .errors import ContractViolation, InputError, VerificationError
from .expr import Expression, evaluate, normalize, validate_or_raise
from .framework import HandlerSet, fold_td_expression
from .graphs import (
    DIRECTED,
    INF,
    NEGATIVE_CYCLE,
    TOL,
    Graph,
    check_potential,
    check_total_weights,
    edge_shift,
    floyd_vertex_weighted,
    is_negative_cycle,
)

# ---------------------------------------------------------------------------
# Summary types


@dataclass
class NcdSummary:
    """Negative-cycle-detection summary: feasible potential + msp."""

    potential: dict
    msp: float


@dataclass
class FullSummary:
    """All pairwise distances are known (vertex-addition nodes, leaves)."""

    potential: dict
    msp: float
    min_out: dict
    min_in: dict
    dist: dict  # (u, v) -> distance, total on V x V


@dataclass
class ModuleSummary:
    """Distances known at pattern granularity (substitution nodes).

    ``pattern_dist`` is the distance matrix of the reweighted pattern;
    ``children`` keeps the child summaries so the node can later be expanded
    to a FullSummary.
    """

    potential: dict
    msp: float
    min_out: dict
    min_in: dict
    pattern_names: tuple
    pattern_dist: dict
    omega: dict
    children: tuple


def vertices_of(summary):
    return summary.min_out.keys() if not isinstance(summary, NcdSummary) else summary.potential.keys()


# ---------------------------------------------------------------------------
# Primitives


def shortest_path_potential(g: Graph, w: dict) -> dict:
    """Distances from a virtual source connected to every vertex by a
    zero-cost edge, under edge-shifted costs.  The result is a feasible
    potential; raises ContractViolation when the graph has a negative cycle
    (the caller was supposed to rule that out)."""
    if g.kind != DIRECTED:
        raise InputError("potentials are defined on directed graphs")
    check_total_weights(g, w)
    pi = {v: 0.0 for v in g.vertices}
    edges = [(u, v, w[u]) for (u, v) in g.edges]
    for _ in range(g.n):
        changed = False
        for u, v, c in edges:
            alt = pi[u] + c
            if alt < pi[v] - TOL:
                pi[v] = alt
                changed = True
        if not changed:
            return pi
    for u, v, c in edges:
        if pi[u] + c < pi[v] - TOL:
            raise ContractViolation("graph has a negative cycle; no potential exists")
    return pi


def reweighted_pattern(pattern_graph: Graph, child_msps: dict):
    """The substitution pattern with each vertex weighted by the msp of the
    graph bound to it."""
    return pattern_graph, dict(child_msps)


def _dijkstra_labels(vertices, adjacency, reduced_cost, sources):
    """Dijkstra with (possibly negative) initial labels and non-negative
    reduced edge costs.  Returns a label per vertex, inf when unreachable."""
    dist = {v: INF for v in vertices}
    heap = []
    for v, lab in sources.items():
        if lab < dist[v]:
            dist[v] = lab
            heapq.heappush(heap, (lab, v))
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v] + TOL:
            continue
        for u in adjacency[v]:
            rc = reduced_cost(v, u)
            if rc < -TOL:
                raise ContractViolation(
                    f"negative reduced cost on edge ({v!r}, {u!r}): potential not feasible"
                )
            nd = d + max(rc, 0.0)
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def _inc_core(pi, msp_child, x, in_names, out_names, w, view):
    """Shared machinery for adding vertex ``x`` to a child graph whose
    shortest-path feasible potential ``pi`` is known.

    Returns NEGATIVE_CYCLE or ``(new_potential, msp, dist_from_x, dist_to_x)``
    where the distance maps are in vertex-weight space and include the
    ``x -> x`` single-vertex entry.
    """
    verts = view.vertices
    wx = w[x]
    adj_out = {v: view.out_neighbors(v) for v in verts}

    # labels from x under reduced edge-shifted costs; the only potentially
    # negative costs are the first hops, folded into the initial labels
    fwd = _dijkstra_labels(
        verts,
        adj_out,
        lambda a, b: w[a] + pi[a] - pi[b],
        {u: wx - pi[u] for u in out_names},
    )

    # a new negative cycle must run x -> ... -> u -> x for an in-neighbor u
    for u in in_names:
        if fwd[u] < INF and fwd[u] + pi[u] + w[u] < -TOL:
            return NEGATIVE_CYCLE

    adj_in = {v: view.in_neighbors(v) for v in verts}
    bwd = _dijkstra_labels(
        verts,
        adj_in,
        lambda a, b: w[b] + pi[b] - pi[a],
        {u: w[u] + pi[u] for u in in_names},
    )

    # cheapest arrival value at x for the virtual super-source: either enter
    # at x directly (0) or enter the child graph and walk to an in-neighbor
    entry = min((pi[u] + w[u] for u in in_names), default=0.0)
    entry = min(0.0, entry)

    new_pi = {v: pi[v] + min(0.0, entry + fwd[v]) for v in verts}
    new_pi[x] = entry

    dist_from_x = {v: fwd[v] + pi[v] + w[v] for v in verts}
    dist_from_x[x] = wx
    dist_to_x = {v: bwd[v] - pi[v] + wx for v in verts}
    dist_to_x[x] = wx

    # minimum path through x = best arrival + best departure, x counted once
    msp_x = min(dist_to_x.values()) + min(dist_from_x.values()) - wx
    return new_pi, min(msp_child, msp_x), dist_from_x, dist_to_x


# ---------------------------------------------------------------------------
# Negative cycle detection handlers


def ncd_inc(f, x, in_names, out_names, w, view):
    if is_negative_cycle(f):
        return f
    core = _inc_core(f.potential, f.msp, x, in_names, out_names, w, view)
    if is_negative_cycle(core):
        return core
    new_pi, msp, _, _ = core
    return NcdSummary(new_pi, msp)


def _pattern_distances(pattern_graph, children):
    """Floyd on the reweighted pattern.  Returns NEGATIVE_CYCLE or
    ``(omega, D, row_min, col_min, pi_h, msp)``."""
    omega = {name: s.msp for name, s in children}
    hg, wts = reweighted_pattern(pattern_graph, omega)
    res = floyd_vertex_weighted(hg, wts)
    if is_negative_cycle(res):
        return NEGATIVE_CYCLE
    names = hg.vertices
    row_min = {p: min(res[(p, q)] for q in names) for p in names}
    col_min = {p: min(res[(q, p)] for q in names) for p in names}
    pi_h = {p: col_min[p] - omega[p] for p in names}
    return omega, res, row_min, col_min, pi_h, min(res.values())


def ncd_subst(pattern, children):
    for _, s in children:
        if is_negative_cycle(s):
            return s
    parts = _pattern_distances(pattern.to_graph(), children)
    if is_negative_cycle(parts):
        return parts
    _, _, _, _, pi_h, msp = parts
    potential = {}
    for name, s in children:
        shift = pi_h[name]
        for v, val in s.potential.items():
            potential[v] = val + shift
    return NcdSummary(potential, msp)


def ncd_subst_td(pattern_expr, children):
    """Same contract as ncd_subst, but the pattern summary is computed by
    replaying the pattern's tree-depth expression with the inc handler over
    the reweighted pattern."""
    for _, s in children:
        if is_negative_cycle(s):
            return s
    omega = {name: s.msp for name, s in children}
    hg = evaluate(Expression(DIRECTED, pattern_expr))
    inner = fold_td_expression(
        pattern_expr,
        hg,
        empty=lambda: NcdSummary({}, INF),
        vertex=lambda name: NcdSummary({name: 0.0}, omega[name]),
        union=_merge_ncd,
        inc=lambda f, x, inn, out, view: ncd_inc(f, x, inn, out, omega, view),
    )
    if is_negative_cycle(inner):
        return inner
    potential = {}
    for name, s in children:
        shift = inner.potential[name]
        for v, val in s.potential.items():
            potential[v] = val + shift
    return NcdSummary(potential, inner.msp)


def _merge_ncd(vals):
    for v in vals:
        if is_negative_cycle(v):
            return v
    potential = {}
    msp = INF
    for v in vals:
        potential.update(v.potential)
        msp = min(msp, v.msp)
    return NcdSummary(potential, msp)


# ---------------------------------------------------------------------------
# All-pairs handlers


def _full_singleton(name, weight):
    return FullSummary(
        {name: 0.0}, weight, {name: weight}, {name: weight}, {(name, name): weight}
    )


def _merge_full(vals):
    for v in vals:
        if is_negative_cycle(v):
            return v
    potential, min_out, min_in, dist = {}, {}, {}, {}
    msp = INF
    for v in vals:
        potential.update(v.potential)
        min_out.update(v.min_out)
        min_in.update(v.min_in)
        dist.update(v.dist)
        msp = min(msp, v.msp)
    for i, a in enumerate(vals):
        for j, b in enumerate(vals):
            if i != j:
                for u in a.min_out:
                    for v in b.min_out:
                        dist[(u, v)] = INF
    return FullSummary(potential, msp, min_out, min_in, dist)


def ensure_full(summary):
    """Expand a ModuleSummary to full pairwise distances; FullSummary and
    NEGATIVE_CYCLE pass through."""
    if isinstance(summary, ModuleSummary):
        return to_full_summary(summary)
    return summary


def to_full_summary(s: ModuleSummary) -> FullSummary:
    """Expand pattern-level distances to all pairwise distances in O(n^2).

    Walks the substitution spine top-down.  ``c`` is the cheapest weight of a
    walk that leaves the current node's vertex set and comes back (excluding
    the endpoints' modules), infinite at the root.  A pair in different
    modules of a spine node either stays inside that node (child exit +
    pattern distance + child entry) or uses the detour ``c``; a pair inside a
    non-substitution spine leaf is finished from its full matrix.
    """
    dist = {}
    stack = [(s, INF)]
    while stack:
        node, c = stack.pop()
        if not isinstance(node, ModuleSummary):
            for (u, v), val in node.dist.items():
                alt = node.min_out[u] + c + node.min_in[v]
                dist[(u, v)] = alt if alt < val else val
            continue
        D = node.pattern_dist
        om = node.omega
        names = node.pattern_names
        row_min = {p: min(D[(p, q)] for q in names) for p in names}
        col_min = {p: min(D[(q, p)] for q in names) for p in names}
        for p_i, s_i in node.children:
            for p_j, s_j in node.children:
                if p_i == p_j:
                    continue
                base = D[(p_i, p_j)] - om[p_i] - om[p_j]
                for u, du in s_i.min_out.items():
                    out_u = node.min_out[u] + c
                    for v, dv in s_j.min_in.items():
                        inside = du + base + dv
                        outside = out_u + node.min_in[v]
                        dist[(u, v)] = inside if inside < outside else outside
        for p, child in node.children:
            # cheapest way out of module p and back: a pattern cycle through
            # p, or leaving the whole node (detour c), module p not counted
            cyc = (
                min(
                    (D[(p, q)] + D[(q, p)] - om[p] - om[q] for q in names if q != p),
                    default=INF,
                )
                - om[p]
            )
            escape = row_min[p] - om[p] + c + col_min[p] - om[p]
            stack.append((child, min(cyc, escape)))
    return FullSummary(s.potential, s.msp, s.min_out, s.min_in, dist)


def apsp_inc(f, x, in_names, out_names, w, view):
    f = ensure_full(f)
    if is_negative_cycle(f):
        return f
    core = _inc_core(f.potential, f.msp, x, in_names, out_names, w, view)
    if is_negative_cycle(core):
        return core
    new_pi, msp, dfx, dtx = core
    wx = w[x]
    # a path either avoids x or passes through it; the -w(x) undoes the
    # double count of x shared by the two halves
    dist = {}
    for (u, v), val in f.dist.items():
        alt = dtx[u] + dfx[v] - wx
        dist[(u, v)] = alt if alt < val else val
    for v in f.min_out:
        dist[(x, v)] = dfx[v]
        dist[(v, x)] = dtx[v]
    dist[(x, x)] = wx
    min_out = {}
    min_in = {}
    for (u, v), val in dist.items():
        if val < min_out.get(u, INF):
            min_out[u] = val
        if val < min_in.get(v, INF):
            min_in[v] = val
    return FullSummary(new_pi, msp, min_out, min_in, dist)


def _assemble_module(children, names, omega, D, row_min, col_min, pi_h, msp):
    potential, min_out, min_in = {}, {}, {}
    for name, s in children:
        shift_pi = pi_h[name]
        shift_out = row_min[name] - omega[name]
        shift_in = col_min[name] - omega[name]
        for v, val in s.potential.items():
            potential[v] = val + shift_pi
        for v, val in s.min_out.items():
            min_out[v] = val + shift_out
        for v, val in s.min_in.items():
            min_in[v] = val + shift_in
    return ModuleSummary(
        potential, msp, min_out, min_in, tuple(names), D, omega, tuple(children)
    )


def apsp_subst(pattern, children):
    for _, s in children:
        if is_negative_cycle(s):
            return s
    hg = pattern.to_graph()
    parts = _pattern_distances(hg, children)
    if is_negative_cycle(parts):
        return parts
    omega, D, row_min, col_min, pi_h, msp = parts
    return _assemble_module(
        children, hg.vertices, omega, D, row_min, col_min, pi_h, msp
    )


def apsp_subst_td(pattern_expr, children):
    """Same contract as apsp_subst; the pattern's all-pairs distances come
    from replaying its tree-depth expression with the inc handler."""
    for _, s in children:
        if is_negative_cycle(s):
            return s
    omega = {name: s.msp for name, s in children}
    hg = evaluate(Expression(DIRECTED, pattern_expr))
    inner = fold_td_expression(
        pattern_expr,
        hg,
        empty=lambda: FullSummary({}, INF, {}, {}, {}),
        vertex=lambda name: _full_singleton(name, omega[name]),
        union=_merge_full,
        inc=lambda f, x, inn, out, view: apsp_inc(f, x, inn, out, omega, view),
    )
    if is_negative_cycle(inner):
        return inner
    return _assemble_module(
        children,
        hg.vertices,
        omega,
        inner.dist,
        inner.min_out,
        inner.min_in,
        inner.potential,
        inner.msp,
    )


# ---------------------------------------------------------------------------
# Solvers


def _gate(e: Expression, w: dict, problem: str):
    if e.mode != DIRECTED:
        raise InputError(f"{problem} requires a directed expression")
    validate_or_raise(e)
    ne = normalize(e)
    g = evaluate(ne)
    check_total_weights(g, w)
    return ne, g


def ncd_handlers(w: dict) -> HandlerSet:
    return HandlerSet(
        base_empty=lambda: NcdSummary({}, INF),
        base_vertex=lambda name: NcdSummary({name: 0.0}, w[name]),
        on_inc=lambda f, x, inn, out, view: ncd_inc(f, x, inn, out, w, view),
        on_subst=lambda pattern, children: ncd_subst(pattern, children),
        on_subst_td=lambda pe, children: ncd_subst_td(pe, children),
    )


def apsp_handlers(w: dict) -> HandlerSet:
    return HandlerSet(
        base_empty=lambda: FullSummary({}, INF, {}, {}, {}),
        base_vertex=lambda name: _full_singleton(name, w[name]),
        on_inc=lambda f, x, inn, out, view: apsp_inc(f, x, inn, out, w, view),
        on_subst=lambda pattern, children: apsp_subst(pattern, children),
        on_subst_td=lambda pe, children: apsp_subst_td(pe, children),
    )


def ncd_outcome(e: Expression, w: dict, *, verify=False):
    """Fold the expression with the NCD handlers.  Returns
    ``(NcdSummary | NEGATIVE_CYCLE, FoldStats)``."""
    ne, g = _gate(e, w, "negative cycle detection")
    checker = make_paths_verifier(w) if verify else None
    return framework.fold(ne, ncd_handlers(w), graph=g, verify=checker)


def detect_negative_cycle(e: Expression, w: dict, *, verify=False) -> bool:
    """True iff the evaluated graph contains a cycle of negative total
    vertex weight."""
    value, _ = ncd_outcome(e, w, verify=verify)
    return is_negative_cycle(value)


def apsp_outcome(e: Expression, w: dict, *, verify=False):
    """Fold with the all-pairs handlers and expand the root to a
    FullSummary.  Returns ``(FullSummary | NEGATIVE_CYCLE, FoldStats)``."""
    ne, g = _gate(e, w, "all-pairs shortest paths")
    checker = make_paths_verifier(w) if verify else None
    value, stats = framework.fold(ne, apsp_handlers(w), graph=g, verify=checker)
    value = ensure_full(value)
    if checker is not None and not is_negative_cycle(value):
        checker("root(final)", None, value, g)
    return value, stats


def all_pairs(e: Expression, w: dict, *, verify=False):
    """Full vertex-weighted distance matrix of the evaluated graph, or
    NEGATIVE_CYCLE."""
    value, _ = apsp_outcome(e, w, verify=verify)
    if is_negative_cycle(value):
        return value
    return value.dist


# ---------------------------------------------------------------------------
# Debug-mode verification

_VERIFY_FLOYD_LIMIT = 64


def make_paths_verifier(w: dict, tol: float = 1e-6):
    """Checker for ``--verify`` runs: every emitted potential must be
    feasible on the node's materialized subgraph, and on small subgraphs the
    summary values are compared against an independent Floyd run."""

    def close(a, b):
        if a == INF or b == INF:
            return a == b
        return abs(a - b) <= tol

    def check(path, node, value, sub: Graph):
        wr = {v: w[v] for v in sub.vertices}
        if is_negative_cycle(value):
            if sub.n <= _VERIFY_FLOYD_LIMIT:
                if not is_negative_cycle(floyd_vertex_weighted(sub, wr)):
                    raise VerificationError(
                        f"{path}: handler reported a negative cycle, subgraph has none"
                    )
            return
        costs = edge_shift(sub, wr)
        if not check_potential(sub, costs, value.potential):
            raise VerificationError(
                f"{path}: emitted potential is not feasible on the node subgraph"
            )
        if sub.n > _VERIFY_FLOYD_LIMIT:
            return
        ref = floyd_vertex_weighted(sub, wr)
        if is_negative_cycle(ref):
            raise VerificationError(
                f"{path}: subgraph has a negative cycle but the handler returned a summary"
            )
        msp_ref = min(ref.values(), default=INF)
        if not close(value.msp, msp_ref):
            raise VerificationError(
                f"{path}: msp {value.msp} differs from reference {msp_ref}"
            )
        if isinstance(value, (FullSummary, ModuleSummary)):
            for u in value.min_out:
                ref_out = min(ref[(u, v)] for v in sub.vertices)
                ref_in = min(ref[(v, u)] for v in sub.vertices)
                if not close(value.min_out[u], ref_out) or not close(
                    value.min_in[u], ref_in
                ):
                    raise VerificationError(
                        f"{path}: per-vertex min distances disagree with reference at {u!r}"
                    )
        if isinstance(value, FullSummary):
            for pair, val in value.dist.items():
                if not close(val, ref[pair]):
                    raise VerificationError(
                        f"{path}: distance {pair} = {val} differs from reference {ref[pair]}"
                    )

    return check
