"""Fourier decay of conjugation orbits in sl_2(Z/p).

nu_l is the law of g v0 g^-1 where g is the l-step Sanov walk.  As l grows
the largest nontrivial Fourier coefficient of nu_l shrinks, and additive
convolution powers of nu_l spread out over the torus.
"""
from expansionlab.experiments import default_v0
from expansionlab.fourier import convolution_power_norms, decay_profile, parseval_check, pushforward
from expansionlab.groups import sanov

p = 101
v0 = default_v0(2, p)
print(f"v0 = E12 - E21 mod {p}, torus size {p ** 3}")
for r in decay_profile(sanov(), p, v0, [0, 2, 4, 6, 8, 10]):
    print(f"  l={r['l']:2d}  max|nu^(b)| = {r['max_coeff']:.4f}  support = {r['support_size']:7d}")

nu = pushforward(sanov(), p, 10, v0)
lhs, rhs, ok = parseval_check(nu)
print(f"\nParseval at l=10: {lhs:.3e} vs {rhs:.3e} ({'ok' if ok else 'MISMATCH'})")
print("additive convolution powers of nu_10:")
for r in convolution_power_norms(nu, 4):
    print(f"  C={r['C']}  ||nu^[C]||_2 = {r['l2_norm']:.3e}  support >= {r['support_lower_bound']:.0f}")
