"""Emergent period of synchrony against synaptic rate.

A smooth firing nonlinearity drives a globally coupled network. For each
coupling strength Gamma the period T solves the one-cycle phase balance;
at Gamma = 0 the answer is independent of alpha.
"""
import numpy as np

from lighthouse.kernels import SmoothExp, SynapseKernel
from lighthouse.synchrony import solve_period

S = SmoothExp(1.0, -1.0)
alphas = np.geomspace(0.05, 20.0, 9)

print("alpha     " + "  ".join(f"Gamma={g:>4}" for g in (-1.0, 0.0, 1.0)))
for a in alphas:
    Ts = [solve_period(S, g, SynapseKernel(a)) for g in (-1.0, 0.0, 1.0)]
    print(f"{a:8.4f}  " + "  ".join(f"{T:10.5f}" for T in Ts))

# inhibition slows the network down, excitation speeds it up
print("2 pi e =", 2 * np.pi * np.e)
