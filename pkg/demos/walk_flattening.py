"""Flattening of the random walk on SL_2(Z/q).

The l2 norm of chi_S^(l) drops from 1 towards the uniform value |G|^(-1/2).
We print exact rational norms where they fit, then compare the free-group
return probability with the word measure for q large enough that short
words cannot collide.
"""
import math

from expansionlab.groups import enumerate_group, sanov, word_entry_bound
from expansionlab.walks import flattening_profile, kesten_check

q = 11
table = enumerate_group(sanov(), q)
print(f"Sanov pair mod {q}: |G| = {table.size}, uniform norm {1 / math.sqrt(table.size):.5f}")
for r in flattening_profile(table, 10):
    print(f"  l={r['l']:2d}  ||chi^(2l)||_2 = {r['norm_2l']:.6f}  exact={r['exact']}")

print("\nreturn probability after 2*l0 steps vs the 4-regular tree")
for l0 in range(1, 6):
    q = 2 * word_entry_bound(sanov(), 2 * l0) + 1
    r = kesten_check(sanov(), q, l0)
    print(f"  l0={l0}  q={q:>6}  return={str(r.return_mass):>14}  tree={str(r.oracle):>14}"
          f"  bound (3/4)^l0={float(r.bound):.4f}")
