import subprocess
import sys

import pytest

from feasible_edf.cli import main


@pytest.fixture
def files(tmp_path):
    ts = tmp_path / "ts.txt"
    ts.write_text("M=2\n0 1 4\n1 2 5\n2 1 2\n3 3 10\n4 1 3\n5 1 6\n")
    return tmp_path, ts


def test_gen(tmp_path, capsys):
    assert main(["gen", "--m", "2", "--seed", "1", "--count", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("M=2") == 2
    assert main(["gen", "--m", "4", "--count", "3", "--out-dir", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("set_*.txt"))) == 3


@pytest.mark.parametrize("test,expect", [("feasible-edf", "schedulable=true")])
def test_check(files, capsys, test, expect):
    _, ts = files
    assert main(["check", "--file", str(ts), "--test", test]) == 0
    assert expect in capsys.readouterr().out


def test_check_uniprocessor(tmp_path, capsys):
    f = tmp_path / "u.txt"
    f.write_text("M=1\n0 1 2\n1 1 3\n")
    assert main(["check", "--file", str(f), "--test", "rm"]) == 0
    assert "schedulable=false" in capsys.readouterr().out
    assert main(["check", "--file", str(f), "--test", "edf"]) == 0
    assert "schedulable=true U=5/6 bound=1" in capsys.readouterr().out


def test_assign_jobmap_simulate(files, capsys):
    tmp, ts = files
    dist = tmp / "d.txt"
    assert main(["assign", "--file", str(ts), "--heuristic", "lef", "--out", str(dist)]) == 0
    assert "migrating" in capsys.readouterr().out
    mig = next(line.split()[0] for line in dist.read_text().splitlines()
               if line.endswith("migrating"))
    assert main(["jobmap", "--file", str(dist), "--task", mig, "--count", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith(f"task={mig} ") and len(out) == 6
    trace, csv = tmp / "trace.txt", tmp / "s.csv"
    assert main(["simulate", "--taskset", str(ts), "--distribution", str(dist),
                 "--horizon", "60", "--trace-out", str(trace), "--csv", str(csv),
                 "--slice", "1,2"]) == 0
    out = capsys.readouterr().out
    assert "migrating_max_tardiness=0" in out
    assert trace.read_text() and csv.read_text().startswith("task,max_tardiness,misses\n")


def test_efdf_step(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("0 5 2 1\n1 3 2\n2 10 1 0\n")
    assert main(["efdf-step", "--state", str(f), "--speeds", "2,1,1"]) == 0
    assert capsys.readouterr().out.splitlines() == ["node 0 -> task 2", "node 1 -> task 0",
                                                    "node 2 -> task 1"]


def test_experiment_csv_is_reproducible(tmp_path, capsys):
    outs = []
    for name in ("a.csv", "b.csv"):
        p = tmp_path / name
        assert main(["experiment", "heuristics", "--m", "4", "--count", "4", "--horizon",
                     "300", "--seed", "5", "--jobs", "1", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert main(["experiment", "nonlight", "--m", "2", "--umax", "0.8", "--count", "20"]) == 0
    assert "M=2,u_max=0.80,luf,20,1.000000" in capsys.readouterr().out
    assert main(["experiment", "convergence", "--m", "2", "--count", "2",
                 "--horizon", "200"]) == 0
    assert "converged,lef" in capsys.readouterr().out


def test_errors(tmp_path, capsys):
    assert main(["check", "--file", str(tmp_path / "missing.txt")]) == 1
    bad = tmp_path / "heavy.txt"
    bad.write_text("M=2\n0 3 5\n")
    assert main(["assign", "--file", str(bad)]) == 1
    with pytest.raises(SystemExit):
        main(["simulate", "--horizon", "x"])


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "feasible_edf", "--help"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("gen", "check", "assign", "jobmap", "simulate", "efdf-step", "experiment"):
        assert cmd in r.stdout
