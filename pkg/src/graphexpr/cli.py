"""Command-line interface.

Commands: ``eval``, ``params``, ``solve {tc|ncd|apsp}``, ``check``,
``gen {random|fixture}``, ``bench``.  Reports are line oriented
(``key=value`` per line, stable order); matrices and bench results are TSV.

Exit codes: 0 ok, 1 check mismatch, 2 input error, 3 internal invariant
breach (``--verify`` or fold accounting).
"""

from __future__ import annotations

import argparse
import sys
import time

from . import oracle, paths, triangles
from .errors import ContractViolation, InputError, VerificationError
from .expr import (
    Empty,
    Expression,
    Inc,
    Join,
    Subst,
    SubstTd,
    Union,
    Vertex,
    collect_vertex_names,
    evaluate,
    params,
    parse,
    validate_or_raise,
)
from .framework import assert_stats
from .graphs import DIRECTED, INF, UNDIRECTED, is_negative_cycle, parse_weights
from .oracle import GenSpec, gen_fixture, gen_random, gen_weights

# ---------------------------------------------------------------------------
# Canonical expression printer


def format_expression(e: Expression) -> str:
    return f"({e.mode} {format_node(e.root)})"


def format_node(node) -> str:
    if isinstance(node, Empty):
        return "(empty)"
    if isinstance(node, Vertex):
        return f"(vertex {node.name})"
    if isinstance(node, (Union, Join)):
        op = "union" if isinstance(node, Union) else "join"
        inner = " ".join(format_node(c) for c in node.children)
        return f"({op} {inner})"
    if isinstance(node, Inc):
        edges = [f"({node.name} {u})" for u in sorted(node.out_names)]
        edges += [f"({u} {node.name})" for u in sorted(node.in_names)]
        return f"(inc {node.name} ({' '.join(edges)}) {format_node(node.child)})"
    if isinstance(node, Subst):
        pat = node.pattern
        names = " ".join(pat.names)
        edges = " ".join(f"({a} {b})" for a, b in sorted(pat.edges))
        binds = " ".join(f"({bn} {format_node(sub)})" for bn, sub in node.bindings)
        return f"(subst (graph ({names}) ({edges})) ({binds}))"
    if isinstance(node, SubstTd):
        binds = " ".join(f"({bn} {format_node(sub)})" for bn, sub in node.bindings)
        return f"(subst-td {format_node(node.pattern_expr)} ({binds}))"
    raise InputError(f"cannot print node of type {type(node).__name__}")


# ---------------------------------------------------------------------------
# Helpers


def fmt(value) -> str:
    """Stable numeric formatting; infinity prints as the literal ``inf``."""
    if value == INF:
        return "inf"
    if value == -INF:
        return "-inf"
    if isinstance(value, float) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return format(value, ".10g")


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _write_out(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_expression(path) -> Expression:
    e = parse(_read(path))
    validate_or_raise(e)
    return e


def _load_weights(args, e: Expression) -> dict:
    if getattr(args, "weights", None):
        return parse_weights(_read(args.weights))
    seed = getattr(args, "seed", 0) or 0
    return gen_weights(collect_vertex_names(e.root), -5.0, 5.0, seed)


def _params_lines(p):
    return [f"k={p.k}", f"h={p.h}", f"l={p.l}"]


def _stats_lines(stats):
    counts = stats.counts
    return [
        f"sum-pattern-order={stats.sum_pattern_order}",
        f"max-inc-nesting={stats.max_inc_nesting}",
        f"leaf-count={stats.leaf_count}",
        f"nodes-inc={counts.get('inc', 0)}",
        f"nodes-subst={counts.get('subst', 0)}",
        f"nodes-subst-td={counts.get('subst_td', 0)}",
    ]


def _emit(lines):
    for line in lines:
        print(line)


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(args):
    e = _load_expression(args.file)
    g = evaluate(e)
    lines = [f"n={g.n}", f"m={g.m}"]
    lines += sorted(g.vertices)
    lines += [f"{a}\t{b}" for a, b in sorted(g.edges)]
    _write_out("\n".join(lines) + "\n", args.output)
    return 0


def cmd_params(args):
    e = _load_expression(args.file)
    _emit(_params_lines(params(e)))
    return 0


def cmd_solve(args):
    e = _load_expression(args.file)
    p = params(e)
    n = len(collect_vertex_names(e.root))
    report = [f"command=solve {args.problem}", f"file={args.file}", f"mode={e.mode}"]
    report += _params_lines(p)

    start = time.perf_counter()
    if args.problem == "tc":
        tri, stats = triangles.triangle_summary(e, verify=args.verify)
        result_lines = [f"triangles={tri.t} n={tri.n} m={tri.m}"]
        matrix = None
    else:
        if not args.weights:
            raise InputError(f"solve {args.problem} requires a weights file")
        w = parse_weights(_read(args.weights))
        if args.problem == "ncd":
            value, stats = paths.ncd_outcome(e, w, verify=args.verify)
            if is_negative_cycle(value):
                result_lines = ["negative-cycle=true"]
            else:
                result_lines = ["negative-cycle=false", f"msp={fmt(value.msp)}"]
            matrix = None
        else:
            value, stats = paths.apsp_outcome(e, w, verify=args.verify)
            if is_negative_cycle(value):
                result_lines = ["negative-cycle=true"]
                matrix = None
            else:
                result_lines = ["negative-cycle=false", f"msp={fmt(value.msp)}"]
                matrix = "\n".join(
                    f"{u}\t{v}\t{fmt(d)}" for (u, v), d in sorted(value.dist.items())
                )
    wall = time.perf_counter() - start

    violations = assert_stats(stats, n, p)
    report += result_lines
    report += _stats_lines(stats)
    report.append(f"stats-ok={'true' if not violations else 'false'}")
    report.append(f"wall-time-s={wall:.6f}")
    _emit(report)
    if matrix is not None:
        _write_out(matrix + "\n", args.output)
    for v in violations:
        print(f"stats violation: {v}", file=sys.stderr)
    return 3 if violations else 0


def cmd_check(args):
    e = _load_expression(args.file)
    g = evaluate(e)
    if g.n > 500:
        raise InputError(f"check is limited to 500 vertices (got {g.n})")
    report = [f"command=check {args.problem}", f"file={args.file}"]
    dev = 0.0
    if args.problem == "tc":
        got = triangles.count_triangles(e)
        want = oracle.oracle_triangles(g)
        dev = abs(got - want)
        ok = got == want
    else:
        w = _load_weights(args, e)
        if not getattr(args, "weights", None):
            report.append(f"seed={getattr(args, 'seed', 0) or 0}")
        if args.problem == "ncd":
            got = paths.detect_negative_cycle(e, w)
            want = oracle.oracle_ncd(g, w)
            dev = float(got != want)
            ok = got == want
        else:
            got = paths.all_pairs(e, w)
            want = oracle.oracle_apsp(g, w)
            if is_negative_cycle(got) or is_negative_cycle(want):
                ok = is_negative_cycle(got) and is_negative_cycle(want)
                dev = 0.0 if ok else INF
            else:
                dev = 0.0
                ok = True
                for pair in want:
                    a, b = got[pair], want[pair]
                    if a == INF or b == INF:
                        if a != b:
                            ok = False
                            dev = INF
                            break
                        continue
                    dev = max(dev, abs(a - b))
                ok = ok and dev <= 1e-6
    report.append(f"check={'pass' if ok else 'fail'} dev={fmt(dev)}")
    _emit(report)
    return 0 if ok else 1


def cmd_gen(args):
    if args.what == "random":
        mode = DIRECTED if args.mode == "D" else UNDIRECTED
        spec = GenSpec(
            mode=mode, k=args.k, h=args.h, l=args.l, budget=args.budget, seed=args.seed
        )
        e = gen_random(spec)
        header = (
            f"# random expression: mode={mode} k={args.k} h={args.h} l={args.l} "
            f"budget={args.budget} seed={args.seed}\n"
        )
    else:
        e = gen_fixture(args.name, args.p, args.clique)
        header = _fixture_header(args)
    text = header + format_expression(e) + "\n"
    _write_out(text, args.output)
    if args.output:
        report = [f"command=gen {args.what}", f"path={args.output}"]
        if args.what == "random":
            report.append(f"seed={args.seed}")
        _emit(report + _params_lines(params(e)))
    return 0


_FIXTURE_NOTES = {
    "lemma7.1": (
        "p non-adjacent vertex pairs, fully joined across pairs, plus an apex\n"
        "# adjacent to the first vertex of every pair. The join part is a cograph\n"
        "# (union of pairs under a join), the apex is one vertex addition:\n"
        "# params (1, 0, 0)."
    ),
    "substar": (
        "star with p rays, each ray subdivided once, as a pure tree-depth\n"
        "# expression: leaf under middle under center gives inc nesting 3:\n"
        "# params (3, 0, 0). Its tree-depth is exactly 3 for p >= 2."
    ),
    "lemma7.2": (
        "cliques substituted into every vertex of a subdivided star given as a\n"
        "# tree-depth pattern expression of nesting 3: params (0, 0, 3)."
    ),
    "cliquependant": (
        "clique on p vertices with one pendant per clique vertex, written as a\n"
        "# single substitution pattern of order 2p: params (0, 2p, 0)."
    ),
}


def _fixture_header(args):
    note = _FIXTURE_NOTES[args.name]
    extra = f" clique={args.clique}" if args.name == "lemma7.2" else ""
    return f"# fixture {args.name} p={args.p}{extra}: {note}\n"


def cmd_bench(args):
    sizes = sorted(int(s) for s in args.sizes.split(","))
    mode = DIRECTED if args.mode == "D" else UNDIRECTED
    if args.problem == "tc" and mode == DIRECTED:
        raise InputError("bench tc requires --mode U")
    if args.problem in ("ncd", "apsp") and mode == UNDIRECTED:
        raise InputError(f"bench {args.problem} requires --mode D")
    header = [
        "n", "m", "k", "h", "l", "wall_time_s",
        "sum_pattern_order", "max_inc_nesting", "leaf_count",
        "nodes_inc", "nodes_subst", "nodes_subst_td", "rep",
    ]
    rows = ["\t".join(header)]
    for idx, budget in enumerate(sizes):
        spec = GenSpec(
            mode=mode, k=args.k, h=args.h, l=args.l, budget=budget,
            seed=args.seed + idx,
        )
        e = gen_random(spec)
        g = evaluate(e)
        w = None
        if args.problem != "tc":
            w = gen_weights(g.vertices, spec.weight_lo, spec.weight_hi, args.seed + idx)
        for rep in range(args.reps):
            start = time.perf_counter()
            if args.problem == "tc":
                _, stats = triangles.triangle_summary(e)
            elif args.problem == "ncd":
                _, stats = paths.ncd_outcome(e, w)
            else:
                _, stats = paths.apsp_outcome(e, w)
            wall = time.perf_counter() - start
            counts = stats.counts
            rows.append(
                "\t".join(
                    str(x)
                    for x in (
                        g.n, g.m, args.k, args.h, args.l, f"{wall:.6f}",
                        stats.sum_pattern_order, stats.max_inc_nesting,
                        stats.leaf_count, counts.get("inc", 0),
                        counts.get("subst", 0), counts.get("subst_td", 0), rep,
                    )
                )
            )
    _write_out("\n".join(rows) + "\n", args.output)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="graphexpr",
        description="Evaluate algebraic graph expressions and solve triangle "
        "counting, negative cycle detection and vertex-weighted all-pairs "
        "shortest paths on them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate an expression to a vertex/edge list")
    p_eval.add_argument("file")
    p_eval.add_argument("-o", "--output", default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_params = sub.add_parser("params", help="print the parameter triple (k, h, l)")
    p_params.add_argument("file")
    p_params.set_defaults(func=cmd_params)

    p_solve = sub.add_parser("solve", help="run a solver on an expression")
    p_solve.add_argument("problem", choices=("tc", "ncd", "apsp"))
    p_solve.add_argument("file")
    p_solve.add_argument("weights", nargs="?", default=None)
    p_solve.add_argument("-o", "--output", default=None, help="matrix output file (apsp)")
    p_solve.add_argument("--verify", action="store_true",
                         help="materialize subgraphs at every fold node and check invariants")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="compare a solver against the brute-force oracle")
    p_check.add_argument("problem", choices=("tc", "ncd", "apsp"))
    p_check.add_argument("file")
    p_check.add_argument("weights", nargs="?", default=None)
    p_check.add_argument("--seed", type=int, default=0,
                         help="seed for generated weights when no weights file is given")
    p_check.set_defaults(func=cmd_check)

    p_gen = sub.add_parser("gen", help="generate expressions")
    gen_sub = p_gen.add_subparsers(dest="what", required=True)
    p_rand = gen_sub.add_parser("random", add_help=False,
                                help="seeded random expression with exact parameters")
    p_rand.add_argument("--help", action="help")
    p_rand.add_argument("--mode", choices=("D", "U"), required=True)
    p_rand.add_argument("-k", type=int, default=0)
    p_rand.add_argument("-h", type=int, default=0)
    p_rand.add_argument("-l", type=int, default=0)
    p_rand.add_argument("--budget", type=int, required=True)
    p_rand.add_argument("--seed", type=int, default=0)
    p_rand.add_argument("-o", "--output", default=None)
    p_rand.set_defaults(func=cmd_gen)
    p_fix = gen_sub.add_parser("fixture", help="named separation-family fixture")
    p_fix.add_argument("name", choices=oracle.FIXTURE_NAMES)
    p_fix.add_argument("-p", type=int, required=True)
    p_fix.add_argument("--clique", type=int, default=1,
                       help="clique size minus one for lemma7.2 modules")
    p_fix.add_argument("-o", "--output", default=None)
    p_fix.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", add_help=False,
                             help="timing table over a seeded corpus")
    p_bench.add_argument("--help", action="help")
    p_bench.add_argument("problem", choices=("tc", "ncd", "apsp"))
    p_bench.add_argument("--mode", choices=("D", "U"), required=True)
    p_bench.add_argument("-k", type=int, default=0)
    p_bench.add_argument("-h", type=int, default=0)
    p_bench.add_argument("-l", type=int, default=0)
    p_bench.add_argument("--sizes", required=True, help="comma-separated vertex budgets")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--reps", type=int, default=1)
    p_bench.add_argument("-o", "--output", default=None)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ContractViolation, VerificationError) as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
