"""Stationary bumps in rate and spiking Heaviside networks.

The rate model has a narrow and a wide bump; the spiking model has a lower
and upper branch whose widths converge to the rate widths for slow synapses.
"""
import warnings

from lighthouse.bumps import rate_bump_width, spike_bump_solve, spike_bump_spectrum
from lighthouse.errors import TruncationWarning
from lighthouse.field import SpatialKernel
from lighthouse.kernels import SynapseKernel

w = SpatialKernel(1.0, 2.0, 0.0)
h = 0.01

for b in rate_bump_width(h, w):
    print(f"rate {b.branch:6s} Delta = {b.Delta:.7f}")

for alpha in (1e-3, 0.5):
    for b in spike_bump_solve(5.0, h, w, SynapseKernel(alpha)):
        print(f"spike alpha={alpha:<5} {b.branch:5s} Delta = {b.Delta:.7f}  t* = {b.t_star:.4f}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore", TruncationWarning)
    for b in spike_bump_solve(5.0, h, w, SynapseKernel(0.5)):
        sp = spike_bump_spectrum(b, w)
        m = max(sp["+"].max_real(), sp["-"].max_real())
        print(f"{b.branch:5s} bump: max Re lambda = {m:+.5f}")
