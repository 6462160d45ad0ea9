"""Command-line surface: outputs, determinism, exit codes."""

import pytest

from graphexpr import cli

K4 = "(undirected (join (vertex a) (vertex b) (vertex c) (vertex d)))\n"
NEG_CYCLE = "(directed (inc x ((a x) (x a)) (vertex a)))\n"
EDGE = "(directed (subst (graph (p q) ((p q))) ((p (vertex a)) (q (vertex b)))))\n"


@pytest.fixture
def k4_file(tmp_path):
    f = tmp_path / "k4.expr"
    f.write_text(K4)
    return str(f)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def kv(out):
    pairs = {}
    for line in out.splitlines():
        for chunk in line.split(" "):
            if "=" in chunk:
                key, _, val = chunk.partition("=")
                pairs[key] = val
    return pairs


# ---------------------------------------------------------------------------
# eval / params


def test_eval_k2(capsys, tmp_path):
    f = tmp_path / "k2.expr"
    f.write_text("(undirected (join (vertex b) (vertex a)))\n")
    code, out, _ = run(capsys, "eval", str(f))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n=2" and lines[1] == "m=1"
    assert lines[2:] == ["a", "b", "a\tb"]


def test_eval_empty_graph(capsys, tmp_path):
    f = tmp_path / "e.expr"
    f.write_text("(directed (empty))\n")
    code, out, _ = run(capsys, "eval", str(f))
    assert code == 0
    assert out.splitlines() == ["n=0", "m=0"]


def test_eval_fixture_matches_hand_count(capsys, tmp_path):
    from graphexpr import gen_fixture
    from graphexpr.cli import format_expression

    f = tmp_path / "l71.expr"
    f.write_text(format_expression(gen_fixture("lemma7.1", 2)) + "\n")
    code, out, _ = run(capsys, "eval", str(f))
    assert code == 0
    assert kv(out)["n"] == "5" and kv(out)["m"] == "6"


def test_eval_parse_failure_exit_2(capsys, tmp_path):
    f = tmp_path / "bad.expr"
    f.write_text("(undirected (vertex a)")
    code, _, err = run(capsys, "eval", str(f))
    assert code == 2
    assert "error" in err


def test_eval_validation_failure_exit_2(capsys, tmp_path):
    f = tmp_path / "dup.expr"
    f.write_text("(undirected (union (vertex a) (vertex a)))")
    code, _, err = run(capsys, "eval", str(f))
    assert code == 2
    assert "duplicate" in err


def test_params_output(capsys, tmp_path):
    from graphexpr import gen_fixture
    from graphexpr.cli import format_expression

    f = tmp_path / "s.expr"
    f.write_text(format_expression(gen_fixture("substar", 3)) + "\n")
    code, out, _ = run(capsys, "params", str(f))
    assert code == 0
    assert out.splitlines() == ["k=3", "h=0", "l=0"]


# ---------------------------------------------------------------------------
# solve


def test_solve_tc_k4(capsys, k4_file):
    code, out, _ = run(capsys, "solve", "tc", k4_file)
    assert code == 0
    assert "triangles=4 n=4 m=6" in out
    pairs = kv(out)
    assert pairs["stats-ok"] == "true"
    assert "wall-time-s" in pairs


def test_solve_tc_rejects_directed(capsys, tmp_path):
    f = tmp_path / "d.expr"
    f.write_text("(directed (vertex a))")
    code, _, err = run(capsys, "solve", "tc", str(f))
    assert code == 2
    assert "undirected" in err


def test_solve_ncd(capsys, tmp_path):
    f = tmp_path / "c.expr"
    f.write_text(NEG_CYCLE)
    w = tmp_path / "w.tsv"
    w.write_text("a\t-3\nx\t2\n")
    code, out, _ = run(capsys, "solve", "ncd", str(f), str(w))
    assert code == 0
    assert "negative-cycle=true" in out

    w.write_text("a\t3\nx\t2\n")
    code, out, _ = run(capsys, "solve", "ncd", str(f), str(w))
    assert code == 0
    assert "negative-cycle=false" in out
    assert kv(out)["msp"] == "2"


def test_solve_ncd_requires_weights(capsys, tmp_path):
    f = tmp_path / "c.expr"
    f.write_text(NEG_CYCLE)
    code, _, err = run(capsys, "solve", "ncd", str(f))
    assert code == 2
    assert "weights" in err


def test_solve_ncd_missing_weight_entry(capsys, tmp_path):
    f = tmp_path / "c.expr"
    f.write_text(NEG_CYCLE)
    w = tmp_path / "w.tsv"
    w.write_text("a\t1\n")
    code, _, err = run(capsys, "solve", "ncd", str(f), str(w))
    assert code == 2
    assert "missing" in err


def test_solve_apsp_matrix_with_inf(capsys, tmp_path):
    f = tmp_path / "u.expr"
    f.write_text("(directed (union (vertex a) (vertex b)))\n")
    w = tmp_path / "w.tsv"
    w.write_text("a\t1\nb\t2\n")
    out_file = tmp_path / "m.tsv"
    code, out, _ = run(capsys, "solve", "apsp", str(f), str(w), "-o", str(out_file))
    assert code == 0
    rows = out_file.read_text().splitlines()
    assert "a\tb\tinf" in rows
    assert "a\ta\t1" in rows


def test_solve_apsp_stdout_matrix(capsys, tmp_path):
    f = tmp_path / "e.expr"
    f.write_text(EDGE)
    w = tmp_path / "w.tsv"
    w.write_text("a\t1\nb\t5\n")
    code, out, _ = run(capsys, "solve", "apsp", str(f), str(w))
    assert code == 0
    assert "a\tb\t6" in out.splitlines()


def test_solve_verify_flag_passes_on_good_build(capsys, tmp_path):
    f = tmp_path / "e.expr"
    f.write_text(EDGE)
    w = tmp_path / "w.tsv"
    w.write_text("a\t-1\nb\t5\n")
    code, out, _ = run(capsys, "solve", "apsp", str(f), str(w), "--verify")
    assert code == 0


def test_solve_verify_catches_corrupted_handler(capsys, tmp_path, monkeypatch):
    # mutate the inc handler: wrong triangle increment must trip --verify
    from graphexpr import triangles as tri
    from graphexpr.triangles import TriFold

    def corrupt(f, name, neighbors, view):
        return TriFold(f.n + 1, f.m + len(neighbors), f.t + 5)

    monkeypatch.setattr(tri, "combine_inc", corrupt)
    f = tmp_path / "t.expr"
    f.write_text("(undirected (inc x ((x a) (x b)) (join (vertex a) (vertex b))))\n")
    code, _, err = run(capsys, "solve", "tc", str(f), "--verify")
    assert code == 3
    assert "invariant" in err


# ---------------------------------------------------------------------------
# check


def test_check_tc_pass(capsys, k4_file):
    code, out, _ = run(capsys, "check", "tc", k4_file)
    assert code == 0
    assert "check=pass dev=0" in out


def test_check_ncd_with_generated_weights(capsys, tmp_path):
    f = tmp_path / "c.expr"
    f.write_text(NEG_CYCLE)
    code, out, _ = run(capsys, "check", "ncd", str(f), "--seed", "5")
    assert code == 0
    assert "check=pass" in out
    assert "seed=5" in out


def test_check_apsp_with_inf_entries(capsys, tmp_path):
    f = tmp_path / "u.expr"
    f.write_text("(directed (union (vertex a) (vertex b)))\n")
    w = tmp_path / "w.tsv"
    w.write_text("a\t1\nb\t2\n")
    code, out, _ = run(capsys, "check", "apsp", str(f), str(w))
    assert code == 0
    assert "check=pass dev=0" in out


def test_check_detects_mutated_solver(capsys, k4_file, monkeypatch):
    from graphexpr import triangles as tri

    monkeypatch.setattr(tri, "count_triangles", lambda e: 999)
    code, out, _ = run(capsys, "check", "tc", k4_file)
    assert code == 1
    assert "check=fail" in out


# ---------------------------------------------------------------------------
# gen


def test_gen_random_roundtrip(capsys, tmp_path):
    out_file = tmp_path / "r.expr"
    code, out, _ = run(
        capsys, "gen", "random", "--mode", "U", "-k", "1", "-h", "3",
        "--budget", "12", "--seed", "9", "-o", str(out_file),
    )
    assert code == 0
    assert kv(out)["k"] == "1" and kv(out)["h"] == "3"
    from graphexpr import params, parse, validate

    e = parse(out_file.read_text())
    assert validate(e) == []
    assert tuple(params(e)) == (1, 3, 0)


def test_gen_random_deterministic_bytes(capsys, tmp_path):
    a, b = tmp_path / "a.expr", tmp_path / "b.expr"
    args = ["gen", "random", "--mode", "D", "-k", "2", "--budget", "9", "--seed", "3"]
    run(capsys, *args, "-o", str(a))
    run(capsys, *args, "-o", str(b))
    assert a.read_text() == b.read_text()


def test_gen_fixture_file_has_derivation_comment(capsys, tmp_path):
    out_file = tmp_path / "f.expr"
    code, _, _ = run(capsys, "gen", "fixture", "lemma7.1", "-p", "4", "-o", str(out_file))
    assert code == 0
    text = out_file.read_text()
    assert text.startswith("# fixture lemma7.1")
    from graphexpr import params, parse

    assert tuple(params(parse(text))) == (1, 0, 0)


def test_gen_fixture_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "fixture", "substar", "-p", "2")
    assert code == 0
    assert "(inc c" in out


# ---------------------------------------------------------------------------
# bench


def test_bench_tc_monotone_rows(capsys, tmp_path):
    out_file = tmp_path / "bench.tsv"
    code, _, _ = run(
        capsys, "bench", "tc", "--mode", "U", "-k", "1", "-h", "3",
        "--sizes", "20,40,10", "--seed", "1", "-o", str(out_file),
    )
    assert code == 0
    rows = [r.split("\t") for r in out_file.read_text().splitlines()]
    assert rows[0][0] == "n"
    ns = [int(r[0]) for r in rows[1:]]
    assert ns == sorted(ns) == [10, 20, 40]
    # accounting bound on every row
    for r in rows[1:]:
        assert int(r[6]) <= 2 * int(r[0])


def test_bench_deterministic_nontime_columns(capsys, tmp_path):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    args = [
        "bench", "ncd", "--mode", "D", "-k", "1", "--sizes", "8,12",
        "--seed", "2", "--reps", "2",
    ]
    run(capsys, *args, "-o", str(a))
    run(capsys, *args, "-o", str(b))

    def strip_time(path):
        rows = [r.split("\t") for r in path.read_text().splitlines()]
        return [[c for i, c in enumerate(r) if i != 5] for r in rows]

    assert strip_time(a) == strip_time(b)


def test_bench_mode_gate(capsys):
    code, _, err = run(capsys, "bench", "tc", "--mode", "D", "--sizes", "5")
    assert code == 2
    assert "mode" in err
