import subprocess
import sys

import pytest

from certplan.cli import main, selftest
from certplan.task_model import EXAMPLE_TASK


@pytest.fixture
def files(tmp_path):
    task = tmp_path / "example.strips"
    task.write_text(EXAMPLE_TASK)
    return tmp_path, str(task)


@pytest.mark.parametrize("extra", [["--heuristic", "hmax"], ["--heuristic", "blind"],
                                   ["--heuristic", "pdb", "--pattern", "q"],
                                   ["--heuristic", "pdb", "--pattern", "p,q", "--pdb-cert", "efficient"]])
def test_plan_then_verify(files, extra, capsys):
    d, task = files
    plan, cert = str(d / "out.plan"), str(d / "out.cert")
    assert main(["plan", task, "-o", plan, "-c", cert] + extra) == 0
    assert "cost 3" in capsys.readouterr().out
    assert open(plan).read() == "a1\na2\n"
    assert main(["verify", task, plan, cert]) == 0
    assert "accepted" in capsys.readouterr().out


def test_tampered_certificate_exit_1(files, capsys):
    d, task = files
    plan, cert = str(d / "out.plan"), str(d / "out.cert")
    main(["plan", task, "-o", plan, "-c", cert])
    text = open(cert).read().replace("bound 3", "bound 4", 1)
    (d / "bad.cert").write_text(text)
    (d / "long.plan").write_text("a1\na2\na1\n")
    assert main(["verify", task, str(d / "long.plan"), str(d / "bad.cert")]) == 1
    text = open(cert).read()
    i = text.index("  rup ")
    (d / "bad2.cert").write_text(text[:i] + "  rup 1 xge_3 >= 1\n" + text[i:])
    assert main(["verify", task, plan, str(d / "bad2.cert")]) == 1


def test_input_errors_exit_2(files, capsys):
    d, task = files
    assert main(["oracle", str(d / "missing.strips")]) == 2
    (d / "bad.strips").write_text("vars p\ngoal r\n")
    assert main(["oracle", str(d / "bad.strips")]) == 2
    assert main(["plan", task, "--pattern", "q"]) == 2
    assert main(["plan", task, "--heuristic", "pdb", "--pattern", "zz"]) == 2
    (d / "junk.cert").write_text("hello\n")
    (d / "p.plan").write_text("a1\na2\n")
    assert main(["verify", task, str(d / "p.plan"), str(d / "junk.cert")]) == 2
    assert main(["encode", task, "--bound", "-1"]) == 2
    assert main(["bogus"]) == 2
    assert "error" in capsys.readouterr().err


def test_oracle_and_encode(files, capsys):
    d, task = files
    assert main(["oracle", task]) == 0
    assert capsys.readouterr().out.strip() == "3"
    assert main(["encode", task, "--bound", "3"]) == 0
    out = capsys.readouterr().out
    assert "xrI" in out and "xa_a1 =>" in out


def test_unsolvable_plan(tmp_path, capsys):
    t = tmp_path / "u.strips"
    t.write_text("vars p q\ngoal q\naction a cost 1\n add p\nend\n")
    assert main(["plan", str(t)]) == 1
    assert "unsolvable" in capsys.readouterr().out
    assert main(["oracle", str(t)]) == 0


def test_selftest_small():
    lines = []
    assert selftest(3, 5, lines.append) == 0
    assert lines[-1].startswith("selftest: 5 tasks, 0 failures")
    assert main(["selftest", "--seed", "1", "--count", "3"]) == 0


def test_console_entry_point(files):
    d, task = files
    r = subprocess.run([sys.executable, "-m", "certplan.cli", "oracle", task], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "3"
