"""Static Turing threshold of a synchronous continuum network.

With a Mexican-hat kernel the first mode to cross is k_c = 1/sqrt(sigma).
We trace the critical gain against alpha and check that the leading
exponent at k_c changes sign across the threshold.
"""
import numpy as np

from lighthouse.turing import TuringContext, critical_curve, exponents_at, static_turing

base = TuringContext.linear(1.0, -1.0, 0.5)
p = static_turing(base)
print(f"k_c = {p.k_c:.6f}  gamma_c = {p.value:.4f}")

for f in (0.9, 1.0, 1.1):
    ctx = base.with_param("gamma", f * p.value)
    print(f"gamma = {f:.1f} gamma_c: max Re lambda(k_c) = {exponents_at(p.k_c, ctx).real.max():+.3e}")

print("alpha     gamma_c")
for row in critical_curve(np.geomspace(0.1, 2.0, 6), base):
    print(f"{row[0]:7.4f}  {row[1]:10.4f}")
