"""Algebraic graph expressions: AST, text format, parser, validator,
evaluator, parameter extraction and normalization.

An expression file looks like::

    (undirected (join (vertex a) (union (vertex b) (vertex c))))

Operations: ``(empty)``, ``(vertex NAME)``, ``(union e e+)``, ``(join e e+)``,
``(inc NAME (edges...) e)`` which adds one new vertex with edges into the
child graph, ``(subst (graph (names) (edges)) (bindings))`` which substitutes
one graph per pattern vertex, and ``(subst-td td-expr (bindings))`` whose
pattern is itself given as a tree-depth expression (empty/vertex/union/inc
only).

The extracted parameter triple (k, h, l) is: k = nesting depth of inc nodes
on root-to-leaf paths, h = largest explicit substitution pattern, l = largest
inc nesting depth among subst-td pattern expressions.

All tree walks are iterative; expression trees may be deep (e.g. the binary
substitution chains produced by ``normalize``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import InputError
from .graphs import DIRECTED, UNDIRECTED, Graph, canonical_edge


class ParseError(InputError):
    pass


class ValidationError(InputError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Empty:
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Vertex:
    name: str
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Union:
    children: tuple
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Join:
    children: tuple
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Inc:
    """Add vertex ``name``; ``in_names``/``out_names`` are the child vertices
    with an edge into resp. out of the new vertex (same thing in undirected
    mode)."""

    name: str
    in_names: frozenset
    out_names: frozenset
    child: object
    pos: tuple = field(default=None, compare=False, repr=False)

    @property
    def neighbor_names(self):
        return self.in_names | self.out_names


@dataclass(frozen=True)
class Pattern:
    """Explicit substitution pattern: a small graph plus a vertex order."""

    kind: str
    names: tuple
    edges: frozenset
    pos: tuple = field(default=None, compare=False, repr=False)

    def to_graph(self) -> Graph:
        return Graph(self.kind, self.names, self.edges)


@dataclass(frozen=True)
class Subst:
    pattern: Pattern
    bindings: tuple  # ((pattern vertex name, sub-expression), ...)
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SubstTd:
    pattern_expr: object  # tree-depth expression over the pattern vertices
    bindings: tuple
    pos: tuple = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Expression:
    mode: str
    root: object


class Params(NamedTuple):
    k: int
    h: int
    l: int


TD_NODE_TYPES = (Empty, Vertex, Union, Inc)


def subexpressions(node) -> tuple:
    """Child expression nodes; subst-td pattern expressions are payload,
    not children."""
    if isinstance(node, (Union, Join)):
        return node.children
    if isinstance(node, Inc):
        return (node.child,)
    if isinstance(node, (Subst, SubstTd)):
        return tuple(sub for _, sub in node.bindings)
    return ()


def fold_expression(root, combine):
    """Iterative post-order fold: ``combine(node, child_values) -> value``."""
    frames = [[root, subexpressions(root), 0, []]]
    while True:
        frame = frames[-1]
        node, kids, i, vals = frame
        if i < len(kids):
            frame[2] += 1
            child = kids[i]
            frames.append([child, subexpressions(child), 0, []])
        else:
            value = combine(node, vals)
            frames.pop()
            if not frames:
                return value
            frames[-1][3].append(value)


def walk(root):
    """Iterative pre-order over all nodes, including subst-td pattern
    expressions."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(subexpressions(node))
        if isinstance(node, SubstTd):
            stack.append(node.pattern_expr)


def collect_vertex_names(node) -> set:
    """Vertex names of the evaluated subtree (vertex leaves and inc names;
    pattern vertices never survive substitution)."""
    names = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Vertex):
            names.add(n.name)
        elif isinstance(n, Inc):
            names.add(n.name)
            stack.append(n.child)
        else:
            stack.extend(subexpressions(n))
    return names


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(r"[()]|[A-Za-z0-9_.\-]+")
_NAME_RE = re.compile(r"[A-Za-z0-9_.\-]+\Z")


def _tokenize(text):
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        col = 0
        while col < len(line):
            ch = line[col]
            if ch.isspace():
                col += 1
                continue
            m = _TOKEN_RE.match(line, col)
            if not m:
                raise ParseError(f"line {lineno} col {col + 1}: unexpected character {ch!r}")
            tokens.append((m.group(), lineno, col + 1))
            col = m.end()
    return tokens


class _Cursor:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of input")
        return self.tokens[self.i]

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        tok, line, col = self.next()
        if tok != value:
            raise ParseError(f"line {line} col {col}: expected {value!r}, found {tok!r}")
        return (line, col)

    def name(self, what="name"):
        tok, line, col = self.next()
        if not _NAME_RE.match(tok):
            raise ParseError(f"line {line} col {col}: expected {what}, found {tok!r}")
        return tok

    def done(self):
        return self.i >= len(self.tokens)


def parse(text: str) -> Expression:
    """Parse an expression file into an Expression, or raise ParseError with
    line/column information."""
    cur = _Cursor(_tokenize(text))
    if cur.done():
        raise ParseError("empty input: expected (MODE expr); the empty graph is written (empty)")
    cur.expect("(")
    tok, line, col = cur.next()
    if tok == "directed":
        mode = DIRECTED
    elif tok == "undirected":
        mode = UNDIRECTED
    else:
        raise ParseError(f"line {line} col {col}: expected 'directed' or 'undirected', found {tok!r}")
    root = _parse_expr(cur, mode)
    cur.expect(")")
    if not cur.done():
        tok, line, col = cur.peek()
        raise ParseError(f"line {line} col {col}: trailing input after expression")
    return Expression(mode, root)


def _parse_expr(cur, mode):
    pos = cur.expect("(")
    op, line, col = cur.next()
    if op == "empty":
        cur.expect(")")
        return Empty(pos=pos)
    if op == "vertex":
        name = cur.name()
        cur.expect(")")
        return Vertex(name, pos=pos)
    if op in ("union", "join"):
        children = []
        while cur.peek()[0] != ")":
            children.append(_parse_expr(cur, mode))
        cur.expect(")")
        if len(children) < 2:
            raise ParseError(f"line {line} col {col}: {op} needs at least two arguments")
        cls = Union if op == "union" else Join
        return cls(tuple(children), pos=pos)
    if op == "inc":
        name = cur.name("vertex name")
        cur.expect("(")
        in_names, out_names = set(), set()
        while cur.peek()[0] != ")":
            eline, ecol = cur.expect("(")
            a = cur.name()
            b = cur.name()
            cur.expect(")")
            if a == name and b == name:
                raise ParseError(f"line {eline} col {ecol}: loop edge on {name!r}")
            if a == name:
                out_names.add(b)
            elif b == name:
                in_names.add(a)
            else:
                raise ParseError(
                    f"line {eline} col {ecol}: inc edge must have {name!r} as one endpoint"
                )
        cur.expect(")")
        child = _parse_expr(cur, mode)
        cur.expect(")")
        return Inc(name, frozenset(in_names), frozenset(out_names), child, pos=pos)
    if op == "subst":
        pattern = _parse_pattern(cur, mode)
        bindings = _parse_bindings(cur, mode)
        cur.expect(")")
        return Subst(pattern, bindings, pos=pos)
    if op == "subst-td":
        pattern_expr = _parse_expr(cur, mode)
        bindings = _parse_bindings(cur, mode)
        cur.expect(")")
        return SubstTd(pattern_expr, bindings, pos=pos)
    raise ParseError(f"line {line} col {col}: unknown operator {op!r}")


def _parse_pattern(cur, mode):
    pos = cur.expect("(")
    tok, line, col = cur.next()
    if tok != "graph":
        raise ParseError(f"line {line} col {col}: expected pattern '(graph ...)'")
    cur.expect("(")
    names = []
    while cur.peek()[0] != ")":
        names.append(cur.name("pattern vertex"))
    cur.expect(")")
    if len(names) < 2:
        raise ParseError(f"line {line} col {col}: pattern needs at least two vertices")
    if len(set(names)) != len(names):
        raise ParseError(f"line {line} col {col}: duplicate pattern vertex name")
    nameset = set(names)
    edges = set()
    cur.expect("(")
    while cur.peek()[0] != ")":
        eline, ecol = cur.expect("(")
        a = cur.name()
        b = cur.name()
        cur.expect(")")
        if a == b:
            raise ParseError(f"line {eline} col {ecol}: loop edge in pattern")
        if a not in nameset or b not in nameset:
            raise ParseError(f"line {eline} col {ecol}: pattern edge uses undeclared vertex")
        edges.add(canonical_edge(mode, a, b))
    cur.expect(")")
    cur.expect(")")
    return Pattern(mode, tuple(names), frozenset(edges), pos=pos)


def _parse_bindings(cur, mode):
    cur.expect("(")
    bindings = []
    while cur.peek()[0] != ")":
        bline, bcol = cur.expect("(")
        name = cur.name("pattern vertex")
        sub = _parse_expr(cur, mode)
        cur.expect(")")
        bindings.append((name, sub))
    cur.expect(")")
    if not bindings:
        raise ParseError("substitution needs at least one binding")
    return tuple(bindings)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    path: str
    message: str
    pos: tuple = None

    def __str__(self):
        where = f" (line {self.pos[0]} col {self.pos[1]})" if self.pos else ""
        return f"{self.path}: {self.message}{where}"


def _child_label(node, index):
    if isinstance(node, (Union, Join)):
        return f"/{index}"
    if isinstance(node, Inc):
        return "/child"
    return f"/bind[{node.bindings[index][0]}]"


def _merge_name_sets(parts, on_duplicate):
    parts = sorted(parts, key=len, reverse=True)
    base = parts[0] if parts else set()
    for s in parts[1:]:
        for nm in s:
            if nm in base:
                on_duplicate(nm)
            else:
                base.add(nm)
    return base


def validate(e: Expression) -> list:
    """Structural checks on a parsed expression.  Returns a list of
    Violations (empty when the expression is well formed)."""
    violations = []
    _validate_node(e.root, "root", violations, td_only=False)
    return violations


def validate_or_raise(e: Expression) -> None:
    violations = validate(e)
    if violations:
        raise ValidationError("\n".join(str(v) for v in violations))


def _validate_node(root, root_path, violations, td_only):
    """Post-order walk computing evaluated vertex-name sets; appends
    violations.  Returns the name set of ``root``."""

    def bad(path, node, message):
        violations.append(Violation(path, message, getattr(node, "pos", None)))

    frames = [[root, root_path, subexpressions(root), 0, []]]
    result = None
    while frames:
        frame = frames[-1]
        node, path, kids, i, vals = frame
        if i < len(kids):
            frame[3] += 1
            child = kids[i]
            frames.append(
                [child, path + _child_label(node, i), subexpressions(child), 0, []]
            )
            continue

        if td_only and not isinstance(node, TD_NODE_TYPES):
            bad(path, node, "pattern is not a tree-depth expression (join/subst not allowed)")

        if isinstance(node, Empty):
            names = set()
        elif isinstance(node, Vertex):
            names = {node.name}
        elif isinstance(node, (Union, Join)):
            if len(node.children) < 2:
                bad(path, node, "union/join needs at least two children")
            names = _merge_name_sets(
                vals, lambda nm: bad(path, node, f"duplicate vertex name {nm!r}")
            )
        elif isinstance(node, Inc):
            names = vals[0]
            for target in sorted(node.neighbor_names):
                if target not in names:
                    bad(path, node, f"unknown inc target {target!r}")
            if node.name in names:
                bad(path, node, f"duplicate vertex name {node.name!r}")
            names.add(node.name)
        elif isinstance(node, Subst):
            _check_pattern(node.pattern, path, bad)
            _check_bindings(node, node.pattern.names, vals, path, bad)
            names = _merge_name_sets(
                vals, lambda nm: bad(path, node, f"duplicate vertex name {nm!r}")
            )
        elif isinstance(node, SubstTd):
            pattern_names = _validate_td_pattern(node, path, violations, bad)
            _check_bindings(node, pattern_names, vals, path, bad)
            names = _merge_name_sets(
                vals, lambda nm: bad(path, node, f"duplicate vertex name {nm!r}")
            )
        else:
            bad(path, node, f"unknown node type {type(node).__name__}")
            names = set()

        frames.pop()
        if frames:
            frames[-1][4].append(names)
        else:
            result = names
    return result


def _check_pattern(pattern, path, bad):
    names = set(pattern.names)
    if len(pattern.names) < 2:
        bad(path, pattern, "pattern needs at least two vertices")
    if len(names) != len(pattern.names):
        bad(path, pattern, "duplicate pattern vertex name")
    for (a, b) in pattern.edges:
        if a == b:
            bad(path, pattern, f"loop edge on pattern vertex {a!r}")
        if a not in names or b not in names:
            bad(path, pattern, f"pattern edge ({a!r}, {b!r}) uses undeclared vertex")


def _check_bindings(node, pattern_names, vals, path, bad):
    seen = set()
    pattern_set = set(pattern_names)
    for (bname, _), child_names in zip(node.bindings, vals):
        if bname in seen:
            bad(path, node, f"pattern vertex {bname!r} bound twice")
        seen.add(bname)
        if bname not in pattern_set:
            bad(path, node, f"binding for unknown pattern vertex {bname!r}")
        if not child_names:
            bad(path, node, f"binding {bname!r} is the empty graph")
    for pname in pattern_names:
        if pname not in seen:
            bad(path, node, f"pattern vertex {pname!r} has no binding")


def _validate_td_pattern(node, path, violations, bad):
    """Validate the subst-td pattern expression in its own name scope and
    return its vertex names (in evaluation order)."""
    ppath = path + "/pattern"
    _validate_node(node.pattern_expr, ppath, violations, td_only=True)
    order = pattern_vertex_order(node.pattern_expr)
    if len(order) < 2:
        bad(path, node, "subst-td pattern has fewer than two vertices")
    return order


def pattern_vertex_order(pattern_expr) -> tuple:
    """Vertex order of an evaluated tree-depth pattern expression."""

    def combine(node, vals):
        if isinstance(node, Vertex):
            return [node.name]
        if isinstance(node, Inc):
            vals[0].append(node.name)
            return vals[0]
        out = []
        for v in vals:
            out.extend(v)
        return out

    return tuple(fold_expression(pattern_expr, combine))


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(e: Expression) -> Graph:
    """Build the concrete graph denoted by a validated expression."""
    verts, edges = _evaluate_node(e.root, e.mode)
    return Graph(e.mode, verts, edges)


def _evaluate_node(root, mode):
    def combine(node, vals):
        if isinstance(node, Empty):
            return ([], set())
        if isinstance(node, Vertex):
            return ([node.name], set())
        if isinstance(node, (Union, Join)):
            cross = isinstance(node, Join)
            return _merge_parts(vals, mode, cross_all=cross)
        if isinstance(node, Inc):
            verts, edges = vals[0]
            x = node.name
            if mode == DIRECTED:
                edges.update((x, u) for u in node.out_names)
                edges.update((u, x) for u in node.in_names)
            else:
                edges.update(canonical_edge(mode, x, u) for u in node.neighbor_names)
            verts.append(x)
            return (verts, edges)
        if isinstance(node, Subst):
            by_name = {bn: v for (bn, _), v in zip(node.bindings, vals)}
            return _substitute(node.pattern.names, node.pattern.edges, by_name, mode)
        if isinstance(node, SubstTd):
            pverts, pedges = _evaluate_node(node.pattern_expr, mode)
            by_name = {bn: v for (bn, _), v in zip(node.bindings, vals)}
            return _substitute(pverts, pedges, by_name, mode)
        raise InputError(f"cannot evaluate node of type {type(node).__name__}")

    return fold_expression(root, combine)


def _merge_parts(parts, mode, cross_all):
    """Disjoint union of (vertices, edges) parts; with ``cross_all`` also adds
    every edge between distinct parts (both directions when directed)."""
    if not parts:
        return ([], set())
    verts = parts[0][0]
    edges = max((p[1] for p in parts), key=len)
    for _, es in parts:
        if es is not edges:
            edges.update(es)
    if cross_all:
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                _add_cross_edges(edges, parts[i][0], parts[j][0], mode)
    for vs, _ in parts[1:]:
        verts.extend(vs)
    return (verts, edges)


def _add_cross_edges(edges, left, right, mode):
    if mode == DIRECTED:
        for a in left:
            for b in right:
                edges.add((a, b))
                edges.add((b, a))
    else:
        for a in left:
            for b in right:
                edges.add(canonical_edge(mode, a, b))


def _substitute(pattern_order, pattern_edges, parts_by_name, mode):
    """Replace each pattern vertex by its bound part; a pattern edge becomes
    the full set of edges between the two parts, direction preserved."""
    verts = []
    for pname in pattern_order:
        verts.extend(parts_by_name[pname][0])
    edges = max((p[1] for p in parts_by_name.values()), key=len, default=set())
    for p in parts_by_name.values():
        if p[1] is not edges:
            edges.update(p[1])
    for (pu, pv) in pattern_edges:
        left = parts_by_name[pu][0]
        right = parts_by_name[pv][0]
        if mode == DIRECTED:
            for a in left:
                for b in right:
                    edges.add((a, b))
        else:
            for a in left:
                for b in right:
                    edges.add(canonical_edge(mode, a, b))
    return (verts, edges)


# ---------------------------------------------------------------------------
# Parameters


def inc_nesting(node) -> int:
    """Maximum number of inc nodes on a root-to-leaf path."""

    def combine(n, vals):
        depth = max(vals, default=0)
        return depth + 1 if isinstance(n, Inc) else depth

    return fold_expression(node, combine)


def params(e: Expression) -> Params:
    """Extract the parameter triple (k, h, l) of an expression."""

    def combine(node, vals):
        k = max((v[0] for v in vals), default=0)
        h = max((v[1] for v in vals), default=0)
        l = max((v[2] for v in vals), default=0)
        if isinstance(node, Inc):
            k += 1
        elif isinstance(node, Subst):
            h = max(h, len(node.pattern.names))
        elif isinstance(node, SubstTd):
            l = max(l, inc_nesting(node.pattern_expr))
        return (k, h, l)

    return Params(*fold_expression(e.root, combine))


def member(e: Expression, k: int, h: int, l: int) -> bool:
    """True iff the expression witnesses membership in the class with inc
    nesting <= k, pattern order <= h and pattern tree-depth <= l."""
    p = params(e)
    return p.k <= k and p.h <= h and p.l <= l


# ---------------------------------------------------------------------------
# Normalization

_PAT_I2 = {
    DIRECTED: Pattern(DIRECTED, ("a", "b"), frozenset()),
    UNDIRECTED: Pattern(UNDIRECTED, ("a", "b"), frozenset()),
}
_PAT_K2 = {
    DIRECTED: Pattern(DIRECTED, ("a", "b"), frozenset({("a", "b"), ("b", "a")})),
    UNDIRECTED: Pattern(UNDIRECTED, ("a", "b"), frozenset({("a", "b")})),
}


def normalize(e: Expression) -> Expression:
    """Rewrite union/join nodes into chains of binary substitutions
    (pattern: two isolated resp. two adjacent vertices), dropping empty
    children on the way.  The evaluated graph is unchanged: same vertex
    names, same edges.  Subst-td pattern expressions are left alone."""

    def combine(node, vals):
        if isinstance(node, (Empty, Vertex)):
            return node
        if isinstance(node, Inc):
            return Inc(node.name, node.in_names, node.out_names, vals[0])
        if isinstance(node, Subst):
            bindings = tuple((bn, v) for (bn, _), v in zip(node.bindings, vals))
            return Subst(node.pattern, bindings)
        if isinstance(node, SubstTd):
            bindings = tuple((bn, v) for (bn, _), v in zip(node.bindings, vals))
            return SubstTd(node.pattern_expr, bindings)
        # union / join
        survivors = [v for v in vals if not isinstance(v, Empty)]
        if not survivors:
            return Empty()
        if len(survivors) == 1:
            return survivors[0]
        pat = (_PAT_K2 if isinstance(node, Join) else _PAT_I2)[e.mode]
        acc = survivors[0]
        for child in survivors[1:]:
            acc = Subst(pat, (("a", acc), ("b", child)))
        return acc

    return Expression(e.mode, fold_expression(e.root, combine))


def is_normalized(e: Expression) -> bool:
    return not any(isinstance(n, (Union, Join)) for n in _main_tree_nodes(e.root))


def _main_tree_nodes(root):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(subexpressions(node))
