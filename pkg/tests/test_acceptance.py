"""Acceptance criteria 1-14, one test each.

Every test runs the matching suite from :mod:`expansionlab.verify`, prints a
``[PASS]``/``[FAIL]`` line (also echoed in the terminal summary) and then
asserts on the suite's recorded data.
"""
from fractions import Fraction

import pytest

from expansionlab.verify import run_all, run_suite

SECTION_GOLDEN = {3: "5/24", 5: "217/3600", 7: "2929/112896", 11: "3173/435600", 13: "109/22932"}


@pytest.fixture
def suite(acceptance_log):
    def go(number, **kw):
        res = run_suite(number, **kw)
        line = res.line() + f"  ({res.seconds:.1f}s)"
        print(line)
        acceptance_log.append(line)
        return res
    return go


def test_01_bracket_count_formula(suite):
    r = suite(1)
    assert r.passed and r.seconds < 300
    assert len(r.data) == 2 * (2 + 3)      # (p, m) pairs times k = 0..m
    for key, v in r.data.items():
        assert v["mismatches"] == 0 and v["count_values"] == [v["formula"]]
        p, m, k = (int(part.split("=")[1]) for part in key.split(","))
        # every class is exhausted in full; k = m is the zero class alone
        assert v["representatives"] == (1 if k == m else p ** (3 * (m - k)) - p ** (3 * (m - k - 1)))
        assert k == m or v["representatives"] >= 3
    assert r.data["p=3,m=1,k=0"]["formula"] == 24 and r.data["p=3,m=1,k=1"]["formula"] == 105


def test_01_negative_control():
    (r,) = run_all([1], corrupt_formula=True)
    assert not r.passed and sum(v["mismatches"] for v in r.data.values()) > 0


def test_02_partition_identity(suite):
    r = suite(2)
    assert r.passed
    assert {k: v["sum"] for k, v in r.data.items()} == {
        "p=3,m=1": 3**6, "p=3,m=2": 3**12, "p=5,m=1": 5**6, "p=5,m=2": 5**12}


def test_03_psi_identities(suite):
    r = suite(3)
    assert r.passed and r.seconds < 60
    assert r.data["(5,25)"]["classes"] == 125
    assert r.data["bracket (3,3,3)"]["violations"] == 0


def test_04_trace_identity(suite):
    r = suite(4)
    assert r.passed and len(r.data) == 15


def test_05_kesten(suite):
    r = suite(5)
    assert r.passed
    l3 = r.data["l0=3"]
    assert Fraction(l3["return_mass"]) == Fraction(232, 4096) == Fraction(l3["oracle"])
    for v in r.data.values():
        assert v["injective"] and Fraction(v["return_mass"]) <= Fraction(v["bound"])


def test_06_spectrum_inclusion(suite):
    r = suite(6)
    assert r.passed and all(v["max_gap"] < 1e-8 for v in r.data.values())


def test_07_cheeger(suite):
    r = suite(7)
    assert r.passed
    checked = [v for v in r.data.values() if "inside" in v]
    assert len(checked) >= 6 and all(v["size"] <= 24 for v in checked)


def test_08_gowers(suite):
    r = suite(8)
    assert r.passed
    assert r.data["p=11"]["subset_size"] == 772 and r.data["p=13"]["subset_size"] == 1202
    assert all(v["covered"] == v["trials"] == 20 for v in r.data.values())


def test_09_span_certificates(suite):
    r = suite(9)
    assert r.passed
    for v in r.data.values():
        assert v["valid"] == v["pairs"] == 10 and v["max_length"] <= v["bound"]
        assert v["lambda"] is not None and len(v["inverse_square_witness"]) >= 3
    assert r.data["d=2,p=11"]["inverse_square_triple"] == [1, 1, 4]


def test_10_section(suite):
    r = suite(10)
    assert r.passed
    assert {int(k[2:]): v["fraction"] for k, v in r.data.items()} == SECTION_GOLDEN


def test_11_dinai(suite):
    r = suite(11)
    assert r.passed
    assert r.data["classes_reached"] == r.data["classes_needed"] == 27
    assert r.data["pairs_checked"] == 50


def test_12_generation(suite):
    r = suite(12)
    assert r.passed
    assert not any(r.data[f"sanov mod {q}"] for q in (2, 4, 8))
    assert all(r.data[f"elementary mod {q}"] for q in range(2, 17))


def test_13_fourier(suite):
    r = suite(13)
    assert r.passed and r.data["total_mass"] == "1"
    maxes = [row["max_coeff"] for row in r.data["decay"]]
    assert maxes[0] > maxes[1] > maxes[2]


def test_14_gap_sweep(suite):
    r = suite(14)
    assert r.passed
    rows = r.data["rows"]
    assert [row["q"] for row in rows] == list(range(3, 32, 2))
    assert all(row["lambda2"] < 1 for row in rows)
