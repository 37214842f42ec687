import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from expansionlab.algebra import ModMatrix
from expansionlab.cli import main
from expansionlab.groups import enumerate_group, sanov
from expansionlab.growth import save_subset, subset
from expansionlab.spectral import dense_operator


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_gap_degenerate_and_small(capsys):
    code, out, _ = run(capsys, "gap", "--q", "2")
    assert code == 0 and rows_of(out)[0]["status"] == "degenerate"
    code, out, _ = run(capsys, "gap", "--q", "3")
    (row,) = rows_of(out)
    assert row["group_order"] == "24" and row["c_exact"] != ""
    dense = np.sort(np.linalg.eigvalsh(dense_operator(enumerate_group(sanov(), 3))))
    assert float(row["lambda2"]) == pytest.approx(dense[-2], abs=1e-8)
    assert float(row["cheeger_lower"]) <= Fraction(row["c_exact"]) <= float(row["cheeger_upper"])


def test_gap_range_and_determinism(capsys):
    args = ("gap", "--q-range", "3:31:2")
    code, first, _ = run(capsys, *args)
    rows = rows_of(first)
    assert code == 0 and [int(r["q"]) for r in rows] == list(range(3, 32, 2))
    assert all(0 < float(r["lambda2"]) < 1 for r in rows)
    code, second, _ = run(capsys, *args)
    assert first == second


def test_gap_json(capsys):
    code, out, _ = run(capsys, "gap", "--q", "5", "--format", "json")
    assert code == 0 and json.loads(out)[0]["group_order"] == 120


def test_walk(capsys):
    code, out, _ = run(capsys, "walk", "--q", "11", "--l-max", "6")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 6
    assert all(r["exact"] == "True" for r in rows)
    norms = [float(r["l2_norm"]) for r in rows]
    assert all(a >= b for a, b in zip(norms, norms[1:]))


def test_growth_subgroup_file(capsys, tmp_path):
    t = enumerate_group(sanov(), 5)
    U = subset(t, [t.index_of(ModMatrix([[1, 2 * k], [0, 1]], 5)) for k in range(5)])
    save_subset(U, tmp_path / "u.json")
    code, out, _ = run(capsys, "growth", "--q", "5", "--subset", str(tmp_path / "u.json"),
                       "--l-max", "4")
    rows = rows_of(out)
    assert code == 0 and float(rows[0]["tripling_exponent"]) == 0
    assert all(r["bound_holds"] == "True" and r["precision"] for r in rows)


def test_growth_random(capsys):
    code, out, _ = run(capsys, "growth", "--q", "7", "--size", "20", "--seed", "3")
    assert code == 0 and float(rows_of(out)[0]["tripling_exponent"]) > 0


def test_fourier(capsys):
    code, out, _ = run(capsys, "fourier", "--q", "11", "--l-list", "0,2", "--C", "2")
    rows = rows_of(out)
    assert code == 0 and float(rows[0]["max_coeff"]) == pytest.approx(1)
    assert rows[0]["precision"] == "1e-12"
    assert [r["C"] for r in rows[2:]] == ["1", "2"]


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "g.json"
    bad.write_text(json.dumps({"d": 2, "generators": []}))
    assert run(capsys, "gap", "--q", "5", "--gens", str(bad))[0] == 2
    assert run(capsys, "gap")[0] == 2
    assert run(capsys, "gap", "--q", "5", "--q-range", "3:5")[0] == 2
    assert run(capsys, "gap", "--q-range", "3:x")[0] == 2
    assert run(capsys, "growth", "--q", "5")[0] == 2
    assert run(capsys, "fourier", "--q", "5", "--l-list", "a")[0] == 2


def test_cap(capsys):
    code, out, _ = run(capsys, "gap", "--q", "31", "--cap", "1000")
    assert code == 0 and rows_of(out)[0]["status"] == "skipped"
    assert run(capsys, "walk", "--q", "31", "--cap", "1000")[0] == 3


def test_verify_subset_and_corrupt(capsys):
    code, out, err = run(capsys, "verify", "--suites", "2,5")
    report = json.loads(out)
    assert code == 0 and report["passed"] and [s["number"] for s in report["suites"]] == [2, 5]
    assert err.count("[PASS]") == 2
    code, out, err = run(capsys, "verify", "--suites", "1", "--corrupt-formula")
    assert code == 1 and "[FAIL]" in err and not json.loads(out)["passed"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "expansionlab", "gap", "--q", "3"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout.startswith("q,")
