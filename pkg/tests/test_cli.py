import json
import os
import subprocess
import sys

import pytest

from coalgmin.cli import run

from conftest import DATA


def data(name):
    return os.path.join(DATA, name)


def test_minimize_markov_chain_with_stats(capsys):
    assert run(["minimize", data("all_equivalent.coalg"), "--stats"]) == 0
    out, err = capsys.readouterr()
    assert out == "block 0: q p r\n"
    stats = json.loads(err)
    assert (stats["n"], stats["m"], stats["finalBlocks"]) == (3, 5, 1)
    assert stats["tParse"] >= 0 and stats["tInit"] >= 0 and stats["tRefine"] >= 0


def test_minimize_dfa(capsys):
    assert run(["minimize", data("two_classes.coalg")]) == 0
    assert capsys.readouterr().out == "block 0: q p\nblock 1: r\n"


def test_partition_file(tmp_path):
    out = tmp_path / "part.txt"
    assert run(["minimize", data("two_classes.coalg"), "--partition", str(out)]) == 0
    assert out.read_text() == "q: 0\np: 0\nr: 1\n"


def test_quotient_is_minimal(tmp_path, capsys):
    out = tmp_path / "q.coalg"
    assert run(["minimize", data("composite.coalg"), "--coalgebra", str(out)]) == 0
    assert run(["minimize", str(out)]) == 0
    assert capsys.readouterr().out == "block 0: a\nblock 1: c\n"


@pytest.mark.parametrize("flag", ["--no-singleton-opt", "--force-generic-monoid", "--debug-audits"])
def test_flags_do_not_change_result(flag, capsys):
    assert run(["minimize", data("composite.coalg"), flag]) == 0
    assert capsys.readouterr().out == "block 0: a b\nblock 1: c d\n"


def test_wta_input(capsys):
    assert run(["minimize", data("small.wta")]) == 0
    assert capsys.readouterr().out == "block 0: q0\nblock 1: q1 q2\nblock 2: q3\n"
    assert run(["minimize", data("small.wta"), "--ignore-outputs"]) == 0


def test_check(capsys):
    assert run(["check", data("composite.coalg")]) == 0
    assert "agree" in capsys.readouterr().out


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.coalg"
    bad.write_text("DX\nq: {q: 0.5}\n")
    assert run(["minimize", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "bad.coalg" in err and "line 2" in err


def test_usage_errors(capsys):
    assert run(["frobnicate"]) == 1
    assert run(["minimize"]) == 1
    assert run(["wta", "random", "--states", "2", "--monoid", "Q"]) == 1
    assert run(["minimize", "/nonexistent/file"]) == 1


def test_wta_generation(tmp_path, capsys):
    out = tmp_path / "r.wta"
    assert run(["wta", "random", "--states", "5", "--symbols", "2", "--rank", "2",
                "--per-state", "3", "--seed", "4", "-o", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("wta (N,max) f0/2 f1/2\n")
    assert sum(1 for line in text.splitlines() if "->" in line) == 15
    assert run(["check", str(out)]) == 0
    assert run(["wta", "dense", "--states", "3", "--symbols", "1", "--rank", "1", "--zero-prob", "0"]) == 0
    assert capsys.readouterr().out.count("->") == 9


def test_selftest(capsys):
    assert run(["selftest", "--trials", "50", "--instances", "3"]) == 0
    assert "MISMATCH" not in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "coalgmin", "minimize", data("two_classes.coalg")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "block 0: q p\nblock 1: r\n"
