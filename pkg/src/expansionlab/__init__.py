"""Verification laboratory for expansion in SL_d(Z/qZ): Cayley graphs of
congruence quotients, their spectra, random-walk flattening, product-set
growth, and brute-force checks of the supporting counting and covering identities."""
from .algebra import IntMatrix, ModMatrix, Modulus, group_order
from .errors import ExpansionLabError
from .groups import GeneratorSet, GroupTable, elementary, enumerate_group, sanov
from .lie import LieVec, psi
from .spectral import lambda2
from .walks import Measure, walk_distribution

__all__ = [
    "IntMatrix", "ModMatrix", "Modulus", "group_order", "ExpansionLabError",
    "GeneratorSet", "GroupTable", "elementary", "enumerate_group", "sanov",
    "LieVec", "psi", "lambda2", "Measure", "walk_distribution",
]
__version__ = "0.1.0"
