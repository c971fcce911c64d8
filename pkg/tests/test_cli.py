import json
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import FIG2_LEFT, FIG2_LEFT_LENGTHS, FIG2_RIGHT, FIG2_RIGHT_LENGTHS
from linf_cophenetic.cli import main
from linf_cophenetic.flow import smooth
from linf_cophenetic.newick import dumps, serialize
from linf_cophenetic.random_trees import random_phylo_tree


@pytest.fixture
def files(tmp_path):
    def make(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return make


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestValidate:
    def test_ok(self, capsys, files):
        path = files("two.nwk", FIG2_LEFT + "\n" + FIG2_RIGHT + "\n")
        assert run(capsys, "validate", path) == (0, "2 trees, leaf counts: 4, 4\n", "")

    def test_duplicate_label(self, capsys, files):
        code, _, err = run(capsys, "validate", files("d.nwk", "(A:1,A:1);"))
        assert code == 2
        assert "DuplicateLabel" in err and "'A'" in err

    def test_syntax(self, capsys, files):
        code, _, err = run(capsys, "validate", files("s.nwk", "(A:1,"))
        assert code == 1
        assert "SyntaxError" in err and "position 5" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "validate", str(tmp_path / "nope.nwk"))[0] == 4

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["dist"])
        assert info.value.code == 4


class TestDist:
    def test_fig2(self, capsys, files):
        a, b = files("a.nwk", FIG2_LEFT), files("b.nwk", FIG2_RIGHT)
        assert run(capsys, "dist", a, b)[:2] == (0, "2\n")
        a, b = files("al.nwk", FIG2_LEFT_LENGTHS), files("bl.nwk", FIG2_RIGHT_LENGTHS)
        assert run(capsys, "dist", a, b)[:2] == (0, "2\n")
        assert run(capsys, "dist", a, b, "--p", "1")[:2] == (0, "9\n")

    def test_same_file(self, capsys, files):
        a = files("a.nwk", FIG2_LEFT)
        assert run(capsys, "dist", a, a)[:2] == (0, "0\n")

    def test_oracle(self, capsys, files):
        for seed, n in ((0, 5), (1, 8)):
            a = files(f"a{seed}.nwk", serialize(random_phylo_tree(n, 2 * seed)))
            b = files(f"b{seed}.nwk", serialize(random_phylo_tree(n, 2 * seed + 1)))
            code, out, _ = run(capsys, "dist", a, b, "--oracle", "--digits", "17")
            assert code == 0
            rows = dict(line.split("\t") for line in out.splitlines())
            assert abs(float(rows["closed_form"]) - float(rows["interleaving"])) <= 1e-6
            assert float(rows["difference"]) <= 1e-9

    def test_oracle_requires_inf(self, capsys, files):
        a = files("a.nwk", FIG2_LEFT)
        assert run(capsys, "dist", a, a, "--oracle", "--p", "2")[0] == 4

    def test_label_mismatch(self, capsys, files):
        a = files("a.nwk", FIG2_LEFT)
        b = files("b.nwk", "(A:1,B:1,C:1,D:1);")
        assert run(capsys, "dist", a, b)[0] == 2

    def test_index_selection(self, capsys, files):
        both = files("both.nwk", FIG2_LEFT + FIG2_RIGHT)
        assert run(capsys, "dist", both, both, "--index-b", "1")[1] == "2\n"
        assert run(capsys, "dist", both, both, "--index-b", "5")[0] == 4


class TestMatrix:
    def test_single(self, capsys, files):
        p = files("one.nwk", FIG2_LEFT)
        code, out, _ = run(capsys, "matrix", p)
        assert code == 0
        assert out.splitlines()[1].split(",")[1:] == ["0"]

    def test_shifted_copy(self, capsys, files):
        t = random_phylo_tree(6, 3)
        p = files("pair.nwk", dumps([t, smooth(t, 5)]))
        code, out, _ = run(capsys, "matrix", p, "--format", "json")
        assert json.loads(out)["values"] == [[0, 5], [5, 0]]

    def test_agrees_with_dist(self, capsys, files, tmp_path):
        trees = [random_phylo_tree(8, s) for s in range(10)]
        p = files("ten.nwk", dumps(trees))
        out_path = str(tmp_path / "m.csv")
        assert run(capsys, "matrix", p, "--out", out_path, "--digits", "17")[0] == 0
        with open(out_path) as fh:
            lines = fh.read().splitlines()
        assert lines[0].split(",")[1] == f"{p}:0"
        M = np.array([[float(x) for x in line.split(",")[1:]] for line in lines[1:]])
        for i in range(10):
            for j in range(10):
                code, out, _ = run(
                    capsys, "dist", p, p, "--index-a", str(i), "--index-b", str(j), "--digits", "17"
                )
                assert float(out) == M[i, j]

    def test_mismatch_reports_tree(self, capsys, files):
        p = files("bad.nwk", FIG2_LEFT + "(A:1,B:1);")
        code, _, err = run(capsys, "matrix", p)
        assert code == 2 and "tree 1" in err


class TestOthers:
    def test_vector(self, capsys, files):
        p = files("a.nwk", FIG2_LEFT)
        code, out, _ = run(capsys, "vector", p)
        assert json.loads(out)["rows"] == [[1, 6, 7, 7], [4, 7, 7], [2, 5], [3]]
        code, out, _ = run(capsys, "vector", p, "--format", "csv")
        assert out.splitlines()[2] == "1,2,6"

    def test_hom(self, capsys, files, tmp_path):
        t = random_phylo_tree(6, 0)
        a = files("a.nwk", serialize(t))
        s = str(tmp_path / "s.nwk")
        assert run(capsys, "smooth", a, "--epsilon", "1", "--out", s)[0] == 0
        assert run(capsys, "hom", a, s)[1] == "A→B\n"
        assert run(capsys, "hom", s, a)[1] == "B→A\n"
        assert run(capsys, "hom", a, a)[1] == "both (equal)\n"
        l, r = files("l.nwk", FIG2_LEFT), files("r.nwk", FIG2_RIGHT)
        assert run(capsys, "hom", l, r)[1] == "incomparable\n"

    def test_smooth_output(self, capsys, files):
        p = files("a.nwk", FIG2_LEFT)
        code, out, _ = run(capsys, "smooth", p, "--epsilon", "1")
        assert out.startswith("((1[&height=0],2[&height=3])[&height=5]")

    def test_interleave(self, capsys, files):
        a, b = files("a.nwk", FIG2_LEFT), files("b.nwk", FIG2_RIGHT)
        code, out, _ = run(capsys, "interleave", a, b)
        cert = json.loads(out)
        assert code == 0
        assert abs(cert["epsilon"] - 2) <= 1e-9
        assert cert["forward"]["min_slack"] >= 0 and cert["backward"]["min_slack"] >= 0

    def test_deterministic_and_read_only(self, capsys, files):
        p = files("ten.nwk", dumps([random_phylo_tree(7, s) for s in range(4)]))
        before = open(p, "rb").read()
        first = run(capsys, "matrix", p)[1]
        second = run(capsys, "matrix", p, "--jobs", "3")[1]
        assert first == second
        assert open(p, "rb").read() == before


def test_module_entry_point(files):
    a, b = files("a.nwk", FIG2_LEFT), files("b.nwk", FIG2_RIGHT)
    proc = subprocess.run(
        [sys.executable, "-m", "linf_cophenetic", "dist", a, b],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "2\n"
