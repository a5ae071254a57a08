import json
import subprocess
import sys

import numpy as np
import pytest

from _util import EXAMPLE_A, EXAMPLE_B
from siep import coo
from siep.cli import main
from siep.linalg import eigenvalues


@pytest.fixture
def inputs(tmp_path):
    (tmp_path / "path3.json").write_text(json.dumps({"n": 3, "edges": [[0, 1], [1, 2]]}))
    (tmp_path / "spec.txt").write_text("0\n1\n2\n")
    coo.write(tmp_path / "A.coo", EXAMPLE_A)
    coo.write(tmp_path / "B.coo", EXAMPLE_B)
    coo.write(tmp_path / "one.coo", [[5.0]])
    return tmp_path


class TestSolve:
    def test_path(self, inputs, capsys):
        out = inputs / "out"
        assert main(["solve", str(inputs / "path3.json"), str(inputs / "spec.txt"), "--out", str(out)]) == 0
        a = coo.read(out / "matrix.coo")
        assert np.allclose(eigenvalues(a), [0, 1, 2], atol=1e-8)
        doc = json.loads((out / "solution.json").read_text())
        assert doc["run"]["seed"] == 0
        assert main(["verify", str(out)]) == 0

    def test_count_mismatch(self, inputs, capsys):
        (inputs / "two.txt").write_text("0 1\n")
        assert main(["solve", str(inputs / "path3.json"), str(inputs / "two.txt"), "--out", str(inputs / "o")]) == 2

    def test_parse_errors(self, inputs, capsys):
        (inputs / "bad.txt").write_text("0 one 2\n")
        (inputs / "bad.json").write_text("{")
        assert main(["solve", str(inputs / "path3.json"), str(inputs / "bad.txt"), "--out", str(inputs / "o")]) == 2
        assert main(["solve", str(inputs / "bad.json"), str(inputs / "spec.txt"), "--out", str(inputs / "o")]) == 2

    def test_duplicate_eigenvalues(self, inputs, capsys):
        (inputs / "dup.txt").write_text("0\n1\n1\n")
        assert main(["solve", str(inputs / "path3.json"), str(inputs / "dup.txt"), "--out", str(inputs / "o")]) == 3
        assert "DuplicateEigenvalues" in capsys.readouterr().err

    def test_solver_error_names_step(self, inputs, capsys):
        args = ["solve", str(inputs / "path3.json"), str(inputs / "spec.txt"), "--out", str(inputs / "o")]
        assert main(args + ["--epsilon", "1e-12"]) == 3
        assert "step 1" in capsys.readouterr().err

    def test_seed_recorded_and_output_deterministic(self, inputs, capsys, monkeypatch):
        monkeypatch.setenv("SIEP_SEED", "17")
        base = ["solve", str(inputs / "path3.json"), str(inputs / "spec.txt")]
        assert main(base + ["--out", str(inputs / "o1")]) == 0
        assert main(base + ["--out", str(inputs / "o2")]) == 0
        assert json.loads((inputs / "o1/solution.json").read_text())["run"]["seed"] == 17
        for name in ("matrix.coo", "levels/order_002.coo"):
            assert (inputs / "o1" / name).read_bytes() == (inputs / "o2" / name).read_bytes()


class TestWspCheck:
    def test_example_examples(self, inputs, capsys):
        assert main(["wsp-check", str(inputs / "A.coo")]) == 0
        assert main(["wsp-check", str(inputs / "B.coo")]) == 1
        out = capsys.readouterr().out
        assert "kernel dimension: 1" in out
        witness = coo.loads(out.split("witness (COO-SYM):\n")[1])
        assert np.allclose(witness * np.sqrt(6), [[0, 1, 1], [1, 0, -1], [1, -1, 0]])

    def test_exact(self, inputs, capsys):
        assert main(["wsp-check", "--exact", str(inputs / "A.coo")]) == 0
        assert main(["wsp-check", "--exact", str(inputs / "B.coo")]) == 1
        assert "(exact)" in capsys.readouterr().out

    def test_one_by_one(self, inputs, capsys):
        assert main(["wsp-check", str(inputs / "one.coo")]) == 0

    def test_bad_file(self, inputs, capsys):
        (inputs / "bad.coo").write_text("2\n0 1 x\n")
        assert main(["wsp-check", str(inputs / "bad.coo")]) == 2
        assert main(["wsp-check", str(inputs / "missing.coo")]) == 2

    def test_exact_order_limit(self, inputs, capsys):
        coo.write(inputs / "big.coo", np.diag(np.arange(9.0)))
        assert main(["wsp-check", "--exact", str(inputs / "big.coo")]) == 2


class TestTower:
    def test_star_harmonic(self, tmp_path, capsys):
        out = tmp_path / "t"
        assert main(["tower", "--graph", "star", "--seq", "harmonic", "--levels", "12", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "budget checks: 11/11 pass" in text
        assert len(list((out / "levels").iterdir())) == 12
        assert main(["verify", str(out)]) == 0

    def test_empty_graph_deltas_zero(self, tmp_path, capsys):
        out = tmp_path / "t"
        assert main(["tower", "--graph", "empty", "--seq", "harmonic", "--levels", "6", "--out", str(out)]) == 0
        assert json.loads((out / "tower.json").read_text())["deltas"] == [0.0] * 5

    def test_levels_zero_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["tower", "--levels", "0"])
        assert exc.value.code == 2

    def test_sequence_flags(self, tmp_path, capsys):
        (tmp_path / "seq.txt").write_text("0.5 0.25\n1.0\n2.0\n")
        assert main(["tower", "--seq", "file", "--seq-file", str(tmp_path / "seq.txt"), "--levels", "3"]) == 0
        assert main(["tower", "--seq", "clusters", "--limits", "0", "1", "--levels", "4"]) == 0
        assert main(["tower", "--seq", "dyadic", "--a", "-1", "--b", "1", "--levels", "4"]) == 0
        assert main(["tower", "--seq", "clusters", "--levels", "4"]) == 2
        assert main(["tower", "--seq", "file", "--seq-file", str(tmp_path / "seq.txt"), "--levels", "4"]) == 3

    def test_ladj_file(self, tmp_path, capsys):
        (tmp_path / "g.ladj").write_text("ladj v1\n\n0\n1\n0 2\n")
        assert main(["tower", "--graph-file", str(tmp_path / "g.ladj"), "--levels", "4", "--out", str(tmp_path / "t")]) == 0
        assert main(["verify", str(tmp_path / "t")]) == 0
        assert main(["tower", "--graph-file", str(tmp_path / "g.ladj"), "--levels", "5"]) == 3

    def test_seed_determinism(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("SIEP_SEED", "99")
        main(["tower", "--graph", "random", "--levels", "7", "--out", str(tmp_path / "a")])
        monkeypatch.delenv("SIEP_SEED")
        main(["tower", "--graph", "random", "--seed", "99", "--levels", "7", "--out", str(tmp_path / "b")])
        main(["tower", "--graph", "random", "--seed", "98", "--levels", "7", "--out", str(tmp_path / "c")])
        a, b, c = ((tmp_path / d / "tower.json").read_bytes() for d in "abc")
        assert a == b != c
        assert json.loads(a)["graph"]["seed"] == 99


class TestVerify:
    def test_corruption(self, inputs, capsys):
        out = inputs / "out"
        main(["solve", str(inputs / "path3.json"), str(inputs / "spec.txt"), "--out", str(out)])
        a = coo.read(out / "matrix.coo").copy()
        a[0, 2] = a[2, 0] = 1e-9
        coo.write(out / "matrix.coo", a)
        capsys.readouterr()
        assert main(["verify", str(out)]) == 1
        assert "FAIL  matrix.coo equals last level" in capsys.readouterr().out

    def test_missing(self, tmp_path, capsys):
        assert main(["verify", str(tmp_path)]) == 2


def test_families(capsys):
    assert main(["families"]) == 0
    out = capsys.readouterr().out
    assert "star" in out and "harmonic" in out


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "siep.cli", "families"], capture_output=True, text=True)
    assert out.returncode == 0
