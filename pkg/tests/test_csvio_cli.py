import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from walsh_lab import cli, csvio
from walsh_lab.counterexample import build_atom
from walsh_lab.dyadic import DyadicPoint, StepFn1, StepFn2
from walsh_lab.hardy import Atom, AtomicDecomposition, assemble
from walsh_lab.verify import Check
from walsh_lab.walsh import Spectrum2

GOLDEN = Path(__file__).parent / "golden"


def test_emit_empty_is_header_only(tmp_path):
    out = tmp_path / "e.csv"
    csvio.emit_csv([], ("a", "b"), out)
    assert out.read_text() == "a,b\n"


def test_emit_golden_row(tmp_path):
    out = tmp_path / "g.csv"
    csvio.emit_csv([(0, 2, 0.1, "exact", True)], ("k", "alpha_k", "x", "regime", "ok"), out)
    assert out.read_bytes() == (GOLDEN / "one_row.csv").read_bytes()


def test_emit_arity_checked(tmp_path):
    with pytest.raises(ValueError):
        csvio.emit_csv([(1, 2)], ("a",), tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()


def test_grid_round_trip_bitwise(tmp_path, rng):
    for obj in (StepFn1(3, rng.normal(size=8)), StepFn2(2, 3, rng.normal(size=(4, 8))), Spectrum2(1, 1, rng.normal(size=(2, 2)))):
        path = tmp_path / "g.csv"
        csvio.write_grid(obj, path)
        back = csvio.read_grid(path)
        assert type(back) is type(obj)
        data = back.coeffs if isinstance(back, Spectrum2) else back.values
        assert np.array_equal(data, obj.coeffs if isinstance(obj, Spectrum2) else obj.values)


def test_bad_header_rejected():
    with pytest.raises(ValueError):
        csvio.parse_grid("1\n2\n")


def test_manifest_round_trip(tmp_path):
    a = build_atom(0.5, 1.0, 2)
    v = np.zeros((16, 16))
    v[8:12, 0:4], v[12:16, 0:4] = 1.0, -1.0
    b = Atom(StepFn2(4, 4, v), 2, (DyadicPoint((1, 0)), DyadicPoint((0, 0))), 0.5)
    d = AtomicDecomposition(((0.5, a), (2.0, b)))
    path = tmp_path / "m.csv"
    csvio.write_manifest(d, path)
    back = csvio.read_manifest(path)
    assert csvio.is_manifest(path)
    f0, bound0 = assemble(d)
    f1, bound1 = assemble(back)
    assert bound0 == bound1 and np.array_equal(f0.finest.values, f1.finest.values)
    assert back.entries[1][1].cube_corner[0].coords == (1, 0)


def test_cli_kernel(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.run(["kernel", "--n", "4", "--bits", "2", "--out", "d4.csv"]) == 0
    assert (tmp_path / "d4.csv").read_bytes() == (GOLDEN / "d4.csv").read_bytes()
    assert np.array_equal(csvio.read_grid("d4.csv").values, [4, 0, 0, 0])


def test_cli_verify_kernels(capsys):
    assert cli.run(["verify", "--suite", "kernels", "--bits", "10"]) == 0
    assert "dirichlet identities: 1024/1024 exact" in capsys.readouterr().out


def test_cli_verify_failure_exit(monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_suite", lambda name, bits: [Check("x", True, ""), Check("y", False, "broken")])
    assert cli.run(["verify", "--suite", "kernels"]) == 1
    assert "1/2 checks passed" in capsys.readouterr().out


def test_cli_counterexample_report(tmp_path):
    out = tmp_path / "report.csv"
    argv = ["counterexample", "--p", "0.5", "--alpha", "1", "--phi", "log4", "--levels", "2", "--out", str(out)]
    assert cli.run(argv) == 0
    first = out.read_bytes()
    assert cli.run(argv) == 0
    assert out.read_bytes() == first
    lines = first.decode().splitlines()
    assert lines[0] == ",".join(cli.COUNTEREXAMPLE_COLUMNS)
    T = [float(line.split(",")[5]) for line in lines[1:]]
    assert len(T) == 3 and T[0] < T[1] < T[2]


def test_cli_transform_and_partial_sum(tmp_path, rng):
    f = StepFn2(3, 3, rng.normal(size=(8, 8)))
    src = tmp_path / "f.csv"
    csvio.write_grid(f, src)
    assert cli.run(["transform", "--in", str(src), "--out", str(tmp_path / "s.csv")]) == 0
    assert cli.run(["transform", "--inverse", "--in", str(tmp_path / "s.csv"), "--out", str(tmp_path / "b.csv")]) == 0
    assert np.allclose(csvio.read_grid(tmp_path / "b.csv").values, f.values, atol=1e-12)
    assert cli.run(["partial-sum", "--in", str(src), "--n", "8", "--m", "8", "--out", str(tmp_path / "p.csv")]) == 0
    assert np.allclose(csvio.read_grid(tmp_path / "p.csv").values, f.values, atol=1e-12)


def test_cli_summability(tmp_path):
    d = AtomicDecomposition(((1.0, build_atom(0.5, 1.0, 2)),))
    man = tmp_path / "m.csv"
    csvio.write_manifest(d, man)
    out = tmp_path / "s.csv"
    assert cli.run(["summability", "--in", str(man), "--p", "0.5", "--alpha", "1", "--n", "16", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(cli.SUMMABILITY_COLUMNS)
    assert [line.split(",")[3] for line in lines[1:]] == ["2", "4", "8", "16"]


@pytest.mark.parametrize(
    "argv",
    [
        ["kernel", "--n", "9", "--bits", "2"],
        ["counterexample", "--p", "1.5"],
        ["counterexample", "--levels", "3"],
        ["summability", "--in", "missing.csv", "--p", "0.5", "--n", "4"],
        ["summability", "--in", "missing.csv", "--p", "2", "--n", "4"],
        ["partial-sum", "--in", "missing.csv", "--n", "1", "--m", "1"],
    ],
)
def test_cli_usage_errors_leave_nothing(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert cli.run([*argv, "--out", "x.csv"]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("walsh-lab: error:")
    assert list(tmp_path.iterdir()) == []


def test_cli_unknown_flag_exits_2(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "walsh_lab.cli", "kernel", "--bogus", "1"], capture_output=True, text=True, cwd=tmp_path
    )
    assert proc.returncode == 2 and list(tmp_path.iterdir()) == []
