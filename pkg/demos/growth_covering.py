"""Product sets in SL_2(F_p): tripling and quasirandom covering.

Random symmetric sets grow under tripling while subgroups do not.  Past the
size threshold |B|^3 > |G|^3 / k, k = (p-1)/2, any three sets multiply to
the whole group.
"""
import numpy as np

from expansionlab.algebra import ModMatrix
from expansionlab.experiments import random_symmetric_subset
from expansionlab.groups import elementary, enumerate_group
from expansionlab.growth import gowers_cover_check, random_subset, subset, tripling_exponent

p = 11
G = enumerate_group(elementary(2), p)
print(f"|SL_2(F_{p})| = {G.size}")
for size in (10, 40, 160):
    A = random_symmetric_subset(G, size, seed=size)
    print(f"  random symmetric |A|={len(A):4d}: tripling exponent {tripling_exponent(A):.3f}")
U = subset(G, [G.index_of(ModMatrix([[1, k], [0, 1]], p)) for k in range(p)])
print(f"  unipotent subgroup |U|={len(U)}: tripling exponent {tripling_exponent(U):.3f}")

rng = np.random.default_rng(1)
for size in (300, 600, 772):
    r = gowers_cover_check(*(random_subset(G, size, rng) for _ in range(3)), p)
    print(f"  three random sets of size {size}: above threshold={r.threshold_met}, "
          f"cover G={r.covers}")
