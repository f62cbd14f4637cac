"""Spectrum of synchrony in a globally coupled linear network.

Every eigenmode of the connectivity gets its own characteristic function;
roots are found by level-set intersection and polished with Newton.
"""
import math

import numpy as np

from lighthouse.network import build_global
from lighthouse.synchrony import LinearContext, network_spectrum

net = build_global(30, 1.0)
ctx = LinearContext(gamma=math.pi, Gamma=1.0, Theta=-1.0, alpha=5.0)
print(f"period T = {ctx.T:.6f}")

sp = network_spectrum(net, ctx, region=(-12.0, 2.0, -4 * math.pi, 4 * math.pi), resolution=(200, 160))
# the N - 1 non-Gamma modes share one eigenvalue, so their roots coincide
z = np.unique(np.round(sp.nontrivial(), 8))
z = z[z.real.argsort()[::-1]]
print("distinct nontrivial exponents:")
for lam in z[:6]:
    print(f"  {lam.real:+.6f} {lam.imag:+.6f}i")
print("verdict:", sp.verdict())
