"""Product sets in a finite group table and the growth inequalities."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import group_order
from .errors import BadSet, ModulusMismatch, TooLarge
from .groups import GroupTable

__all__ = [
    "SubsetHandle", "subset", "random_subset", "product_set", "iterated_product",
    "tripling_exponent", "iteration_bound_check", "GowersResult",
    "gowers_cover_check", "gowers_threshold_size", "save_subset", "load_subset",
    "is_subgroup",
]


@dataclass(frozen=True)
class SubsetHandle:
    table: GroupTable
    members: np.ndarray      # bool mask over element indices

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    def __len__(self):
        return int(self.members.sum())

    def __eq__(self, other):
        return self.table is other.table and bool(np.array_equal(self.members, other.members))

    def __hash__(self):
        return hash(self.indices.tobytes())

    def contains_identity(self) -> bool:
        return bool(self.members[0])

    def inverse(self) -> "SubsetHandle":
        mask = np.zeros_like(self.members)
        mask[self.table.inverse_index[self.indices]] = True
        return SubsetHandle(self.table, mask)

    def is_symmetric(self) -> bool:
        return self == self.inverse()


def subset(table: GroupTable, indices) -> SubsetHandle:
    mask = np.zeros(table.size, dtype=bool)
    mask[np.asarray(list(indices), dtype=np.int64)] = True
    return SubsetHandle(table, mask)


def random_subset(table: GroupTable, size: int, rng: np.random.Generator) -> SubsetHandle:
    return subset(table, rng.choice(table.size, size=size, replace=False))


def _mul_block(table: GroupTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        mt = table.multiplication_table
    except TooLarge:
        mt = None
    if mt is not None:
        return mt[np.ix_(a, b)]
    return table.mul(a[:, None], b[None, :])


def product_set(A: SubsetHandle, B: SubsetHandle) -> SubsetHandle:
    """A.B = {ab : a in A, b in B}."""
    if A.table is not B.table:
        raise ModulusMismatch("subsets of different tables")
    t = A.table
    a, b = A.indices, B.indices
    mask = np.zeros(t.size, dtype=bool)
    chunk = max(1, 4_000_000 // max(1, len(b)))
    for start in range(0, len(a), chunk):
        mask[_mul_block(t, a[start:start + chunk], b).ravel()] = True
    return SubsetHandle(t, mask)


def iterated_product(A: SubsetHandle, k: int) -> SubsetHandle:
    """The k-fold product set A.A...A."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = A
    for _ in range(k - 1):
        out = product_set(out, A)
    return out


def is_subgroup(A: SubsetHandle) -> bool:
    return A.contains_identity() and A.is_symmetric() and product_set(A, A) == A


def tripling_exponent(A: SubsetHandle) -> float:
    """log|A.A.A| / log|A| - 1."""
    n = len(A)
    if n < 2:
        raise BadSet("tripling exponent needs |A| >= 2")
    return math.log(len(iterated_product(A, 3))) / math.log(n) - 1


def iteration_bound_check(A: SubsetHandle, l: int):
    """|prod_l A| against (|A.A.A|/|A|)^(l-2) |A| for symmetric A containing 1."""
    if not (A.contains_identity() and A.is_symmetric()):
        raise BadSet("A must be symmetric and contain the identity")
    if l < 3:
        raise BadSet("l must be >= 3")
    lhs = len(iterated_product(A, l))
    rhs = Fraction(len(iterated_product(A, 3)), len(A)) ** (l - 2) * len(A)
    return lhs, rhs, lhs <= rhs


@dataclass(frozen=True)
class GowersResult:
    covers: bool
    threshold_met: bool
    sizes: tuple[int, int, int]
    group_size: int
    k: float


def gowers_threshold_size(group_size: int, k: float) -> float:
    """Common size above which three equal-size subsets meet |B1||B2||B3| > |G|^3/k."""
    return group_size / k ** (1 / 3)


def gowers_cover_check(B1: SubsetHandle, B2: SubsetHandle, B3: SubsetHandle, p: int,
                       k: float | None = None) -> GowersResult:
    """Quasirandom covering: if |B1||B2||B3| > |G|^3 / k then B1.B2.B3 = G.

    ``k`` is the minimal dimension of a nontrivial representation of the
    group; the default (p - 1)/2 is exact for SL_2(F_p) and a lower bound
    for SL_d(F_p), d >= 3.
    """
    t = B1.table
    if t.q != p or t.size != group_order(t.d, p):
        raise BadSet(f"table is not all of SL_{t.d}(F_{p})")
    k = (p - 1) / 2 if k is None else k
    n = t.size
    sizes = (len(B1), len(B2), len(B3))
    threshold_met = sizes[0] * sizes[1] * sizes[2] > n**3 / k
    covers = bool(product_set(product_set(B1, B2), B3).members.all())
    return GowersResult(covers, threshold_met, sizes, n, k)


def save_subset(A: SubsetHandle, path) -> None:
    Path(path).write_text(json.dumps([int(i) for i in A.indices]))


def load_subset(table: GroupTable, path) -> SubsetHandle:
    return subset(table, json.loads(Path(path).read_text()))
