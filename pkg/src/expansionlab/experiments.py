"""Row-producing drivers shared by the command line, the verification suites
and the demo scripts.  Every function returns a list of flat dicts."""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from .errors import DomainEmpty, TooLarge
from .fourier import convolution_power_norms, decay_profile, pushforward
from .groups import GeneratorSet, enumerate_group
from .growth import (iteration_bound_check, iterated_product, random_subset,
                     tripling_exponent)
from .lie import LieVec
from .spectral import cheeger_bounds, expansion_exact, lambda2
from .walks import walk_sequence

__all__ = ["gap_rows", "walk_rows", "growth_rows", "fourier_rows", "render", "parse_range",
           "random_symmetric_subset", "default_v0"]

EXACT_CHEEGER_CAP = 24
FFT_PRECISION = 1e-12


def parse_range(text: str) -> list[int]:
    """'A:B[:step]' -> [A, A+step, ..., <= B] (inclusive)."""
    parts = [int(x) for x in text.split(":")]
    if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] < 1):
        raise ValueError(f"bad range {text!r}, expected A:B[:step]")
    step = parts[2] if len(parts) == 3 else 1
    return list(range(parts[0], parts[1] + 1, step))


def gap_rows(S: GeneratorSet, qs, tol: float = 1e-10, seed: int = 0,
             cap: int = 5_000_000) -> list[dict]:
    """One row per q: group order, lambda2, Cheeger sandwich, exact expansion when small."""
    rows = []
    for q in sorted(qs):
        row = {"q": q, "group_order": "", "degree": len(S), "lambda2": "", "cheeger_lower": "",
               "cheeger_upper": "", "c_exact": "", "bipartite": "", "status": "ok", "tol": tol}
        try:
            table = enumerate_group(S, q, cap=cap)
        except TooLarge:
            row["status"] = "skipped"
            rows.append(row)
            continue
        row["group_order"] = table.size
        try:
            rep = lambda2(table, tol=tol, seed=seed)
        except DomainEmpty:
            row["status"] = "degenerate"
            rows.append(row)
            continue
        lo, hi = cheeger_bounds(rep)
        row.update(lambda2=rep.lambda2, cheeger_lower=lo, cheeger_upper=hi, bipartite=rep.bipartite)
        if table.size <= EXACT_CHEEGER_CAP:
            row["c_exact"] = str(expansion_exact(table, cap=EXACT_CHEEGER_CAP))
        rows.append(row)
    return rows


def walk_rows(S: GeneratorSet, q: int, l_max: int, cap: int = 5_000_000) -> list[dict]:
    """||chi_S^(l)||_2 on Gamma/Gamma_q for l = 1..l_max, exact where possible."""
    table = enumerate_group(S, q, cap=cap)
    rows = []
    for l, mu in enumerate(walk_sequence(table, l_max)):
        if l == 0:
            continue
        sq = mu.l2_squared()
        rows.append({"l": l, "l2_norm": math.sqrt(sq), "l2_squared": str(sq),
                     "support_size": len(mu.support()), "exact": mu.exact,
                     "uniform_norm": 1 / math.sqrt(table.size),
                     "precision": "exact" if mu.exact else "float64"})
    return rows


def growth_rows(A, l_max: int = 5) -> list[dict]:
    """|A|, |A^3|, tripling exponent and the iteration bound for l = 3..l_max."""
    rows = []
    n, n3 = len(A), len(iterated_product(A, 3))
    for l in range(3, l_max + 1):
        row = {"size": n, "triple_size": n3, "tripling_exponent": tripling_exponent(A) if n > 1 else "",
               "l": l, "product_size": "", "iteration_bound": "", "bound_holds": "",
               "precision": "float64 from exact set sizes"}
        if A.contains_identity() and A.is_symmetric():
            lhs, rhs, ok = iteration_bound_check(A, l)
            row.update(product_size=lhs, iteration_bound=float(rhs), bound_holds=ok)
        else:
            row["product_size"] = len(iterated_product(A, l))
        rows.append(row)
    return rows


def random_symmetric_subset(table, size: int, seed: int):
    """Seeded random set containing 1, closed under inversion, about ``size`` elements."""
    rng = np.random.default_rng(seed)
    A = random_subset(table, size, rng)
    mask = A.members | A.inverse().members
    mask[0] = True
    return type(A)(table, mask)


def fourier_rows(S: GeneratorSet, q: int, l_list, v0: LieVec | None = None,
                 C_max: int = 0) -> list[dict]:
    """Decay profile of the conjugation orbit of v0; with C_max > 0 also the
    norms of the additive convolution powers at the largest l."""
    if v0 is None:
        v0 = default_v0(S.d, q)
    rows = decay_profile(S, q, v0, l_list)
    for r in rows:
        r["precision"] = FFT_PRECISION
    if C_max:
        dist = pushforward(S, q, max(l_list), v0)
        for r in convolution_power_norms(dist, C_max):
            rows.append({"l": max(l_list), "max_coeff": "", "l2_norm": r["l2_norm"],
                         "support_size": "", "C": r["C"], "support_lower_bound": r["support_lower_bound"],
                         "precision": FFT_PRECISION})
    return rows


def default_v0(d: int, q: int) -> LieVec:
    """E_12 - E_21."""
    m = [[0] * d for _ in range(d)]
    m[0][1], m[1][0] = 1, -1
    return LieVec(m, q)


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


def render(rows: list[dict], fmt: str = "csv") -> str:
    """CSV (union of keys, first-seen order) or JSON."""
    if fmt == "json":
        return json.dumps([{k: _cell(v) for k, v in r.items()} for r in rows], indent=1) + "\n"
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()
