"""Localised bumps: rate-model bumps and their spiking counterparts.

A spiking bump fires at ``T^m(x) = 2 pi m + rho |x|`` inside ``|x| < Delta/2``
with a Heaviside firing rate, so active neurons rotate at unit speed.  The
drive at the edge is

    psi(Delta/2, t) = (1/2 pi) [G(0) + 2 Re sum_{n>0} eta_hat(n) G(rho n) e^{i n t}],

with the edge transform ``G(k) = int_{-Delta/2}^{Delta/2} w(|Delta/2 - y|) e^{-i k |y|} dy``.
The width solves ``min_t psi(Delta/2, t) = h``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateEdges, NoSolution, NumericalFailure, PoleError, TruncationWarning
from .field import SpatialKernel
from .kernels import SynapseKernel
from .rootfind import find_zeros
from .synchrony import TWO_PI, SpectrumResult

__all__ = [
    "RateBump", "SpikeBump", "rate_bump_width", "rate_bump_spectrum", "edge_transform_G",
    "edge_drive", "t_star", "spike_bump_solve", "spike_bump_E", "spike_bump_spectrum",
    "bump_branches",
]


@dataclass(frozen=True)
class RateBump:
    Delta: float
    h: float
    branch: str          # "narrow" (w(Delta) > 0) or "wide"
    w0: float
    wDelta: float


@dataclass(frozen=True)
class SpikeBump:
    Delta: float
    rho: float
    t_star: float
    M: int
    branch: str          # "lower" or "upper" in Delta
    h: float
    alpha: float


# --- rate bumps ------------------------------------------------------------------------

def _w_value(w: SpatialKernel, x) -> float:
    return float(w.value(x))


def rate_bump_width(h: float, w: SpatialKernel, Delta_max: float = 50.0, n_scan: int = 4000) -> list:
    """Widths with ``2 pi h = int_0^Delta w``; empty when ``h`` is out of range."""
    if not _w_value(w, 0.0) > 0:
        raise DegenerateEdges("w(0) must be positive")
    F = lambda D: float(w.integral(0.0, D)) - TWO_PI * h
    grid = np.linspace(1e-9, Delta_max, n_scan)
    vals = np.array([F(D) for D in grid])
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        D = brentq(F, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
        wD = _w_value(w, D)
        out.append(RateBump(D, h, "narrow" if wD > 0 else "wide", _w_value(w, 0.0), wD))
    return out


def rate_bump_spectrum(bump: RateBump, alpha: float) -> dict:
    """Roots of ``(1 + lambda/alpha)^2 = (w(0) +- w(Delta)) / (w(0) - w(Delta))``."""
    d = bump.w0 - bump.wDelta
    if d == 0:
        raise DegenerateEdges("w(0) = w(Delta)")
    out = {}
    for sign, key in ((1, "+"), (-1, "-")):
        r = np.sqrt(complex((bump.w0 + sign * bump.wDelta) / d))
        out[key] = np.array([alpha * (r - 1), alpha * (-r - 1)], dtype=complex)
    return out


# --- spiking bumps ---------------------------------------------------------------------

def edge_transform_G(k, Delta: float, w: SpatialKernel):
    """``G(k)`` summed in closed form over the exponential components of ``w``."""
    k = np.asarray(k, dtype=complex)
    ik = 1j * k
    ph = np.exp(-ik * Delta / 2)
    out = np.zeros_like(k)
    for c, s in w.components:
        if np.any(np.abs(ik + 1 / s) == 0) or np.any(np.abs(ik - 1 / s) == 0):
            raise PoleError(f"k = +-i/{s}")
        e1 = math.exp(-Delta / (2 * s))
        e2 = math.exp(-Delta / s)
        out = out + c / (2 * s) * ((e1 - e2 * ph) / (ik + 1 / s) - (ph - e1) / (ik - 1 / s))
    return complex(out) if out.ndim == 0 else out


def _edge_coeffs(Delta, rho, w, kernel, M):
    n = np.arange(1, M + 1)
    return n, kernel.fourier(n.astype(float)) * edge_transform_G(rho * n, Delta, w)


def edge_drive(t, Delta: float, rho: float, w: SpatialKernel, kernel: SynapseKernel, M: int = 50, deriv: int = 0):
    """``d^j/dt^j psi(Delta/2, t)`` from the truncated harmonic sum."""
    n, c = _edge_coeffs(Delta, rho, w, kernel, M)
    t = np.asarray(t, dtype=float)
    e = np.exp(1j * np.multiply.outer(t, n)) * (1j * n) ** deriv
    out = 2 * (e @ c).real / TWO_PI
    if deriv == 0:
        out = out + float(w.integral(0.0, Delta)) / TWO_PI
    return out


def t_star(Delta: float, rho: float, w: SpatialKernel, kernel: SynapseKernel, M: int = 50,
           n_scan: int = 1024) -> float:
    """Global minimiser of ``psi(Delta/2, t)`` on ``[0, 2 pi)``."""
    ts = np.arange(n_scan) * TWO_PI / n_scan
    vals = edge_drive(ts, Delta, rho, w, kernel, M)
    if np.ptp(vals) < 1e-14:
        return 0.0
    i = int(np.argmin(vals))
    t = ts[i]
    for _ in range(50):
        d1 = float(edge_drive(t, Delta, rho, w, kernel, M, 1))
        d2 = float(edge_drive(t, Delta, rho, w, kernel, M, 2))
        if d2 <= 0:
            break
        step = d1 / d2
        t -= step
        if abs(step) < 1e-15:
            break
    # other near-degenerate minima
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    minima = np.nonzero((vals <= left) & (vals <= right))[0]
    if sum(vals[j] - vals[i] < 1e-10 for j in minima) > 1:
        warnings.warn(f"several minima of the edge drive: t = {ts[minima]}", RuntimeWarning, stacklevel=2)
    return float(np.mod(t, TWO_PI))


def _width_residual(Delta, rho, h, w, kernel, M):
    ts = t_star(Delta, rho, w, kernel, M)
    return float(edge_drive(ts, Delta, rho, w, kernel, M)) - h


def spike_bump_solve(rho: float, h: float, w: SpatialKernel, kernel: SynapseKernel, M: int = 50,
                     Delta_max: float = 30.0, n_scan: int = 600) -> list:
    """All widths with ``min_t psi(Delta/2, t) = h`` on ``(0, Delta_max]``."""
    F = lambda D: _width_residual(D, rho, h, w, kernel, M)
    grid = np.linspace(Delta_max / n_scan / 20, Delta_max, n_scan)
    vals = np.array([F(D) for D in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(F, grid[i], grid[i + 1], xtol=1e-13, rtol=4 * np.finfo(float).eps))
    if not roots:
        raise NoSolution(f"no bump at rho={rho}, alpha={kernel.alpha}")
    out = []
    for j, D in enumerate(roots):
        tag = "lower" if j == 0 and len(roots) > 1 else ("upper" if j == len(roots) - 1 and len(roots) > 1 else "single")
        out.append(SpikeBump(D, rho, t_star(D, rho, w, kernel, M), M, tag, h, kernel.alpha))
    return out


def bump_branches(values, vary: str, h: float, w: SpatialKernel, rho: float = 5.0, alpha: float = 0.5,
                  M: int = 50, **kw) -> list:
    """Rows ``(value, Delta, branch)`` along ``rho`` or ``alpha``."""
    rows = []
    for v in values:
        r, a = (v, alpha) if vary == "rho" else (rho, v)
        try:
            bumps = spike_bump_solve(r, h, w, SynapseKernel(a), M, **kw)
        except NoSolution:
            continue
        rows.extend((float(v), b.Delta, b.branch) for b in bumps)
    return rows


def _comb_closed(lam, s, alpha):
    """``sum_p eta_hat(p - i lambda) e^{i p s}`` resummed over the spike lattice."""
    s0 = s % TWO_PI
    lam = np.asarray(lam, dtype=complex)
    x = np.exp(-TWO_PI * (alpha + lam))
    return TWO_PI * alpha**2 * np.exp(-(alpha + lam) * s0) * (s0 / (1 - x) + TWO_PI * x / (1 - x) ** 2)


def _comb_series(lam, s, alpha, M):
    lam = np.asarray(lam, dtype=complex)
    p = np.arange(-M, M + 1)
    z = p - 1j * lam[..., None]
    eta = 1.0 / (1 + 1j * z / alpha) ** 2
    return (eta * np.exp(1j * p * s)).sum(axis=-1)


def spike_bump_E(lam, bump: SpikeBump, w: SpatialKernel, sign: int, method: str = "series"):
    """``E_+-(lambda) = 1 - R_+- sum_p eta_hat(p - i lambda) e^{i p s} / (2 pi P(s))``.

    ``s = t* - rho Delta / 2`` and ``R_+- = (w(0) +- w(Delta)) / |w(0) - w(Delta)|``.
    ``method="series"`` truncates the comb at ``|p| <= M`` (with ``P`` truncated
    alike, so ``E_-(0) = 0`` holds at any ``M``); ``"closed"`` sums it exactly.
    """
    w0, wD = _w_value(w, 0.0), _w_value(w, bump.Delta)
    if w0 == wD:
        raise DegenerateEdges("w(0) = w(Delta)")
    R = (w0 + sign * wD) / abs(w0 - wD)
    s = bump.t_star - bump.rho * bump.Delta / 2
    a = bump.alpha
    if method == "series":
        comb = _comb_series(lam, s, a, bump.M)
        P2pi = float(_comb_series(0.0, s, a, bump.M).real)
    elif method == "closed":
        comb = _comb_closed(lam, s, a)
        P2pi = float(_comb_closed(0.0, s, a).real)
    else:
        raise ValueError(f"unknown method {method!r}")
    return 1.0 - R * comb / P2pi


def spike_bump_spectrum(bump: SpikeBump, w: SpatialKernel, kernel: Optional[SynapseKernel] = None,
                        region=(-3.0, 1.0, -6.0, 6.0), resolution=(300, 300), method: str = "series",
                        tol: float = 1e-10) -> dict:
    """``{"+": SpectrumResult, "-": SpectrumResult}`` of a Heaviside bump."""
    w0, wD = _w_value(w, 0.0), _w_value(w, bump.Delta)
    if not w0 > wD:
        raise DegenerateEdges("needs w(0) > w(Delta)")
    alpha = bump.alpha if kernel is None else kernel.alpha
    if kernel is not None and kernel.alpha != bump.alpha:
        bump = SpikeBump(bump.Delta, bump.rho, bump.t_star, bump.M, bump.branch, bump.h, alpha)
    kern = SynapseKernel(alpha)
    psi_t = float(edge_drive(bump.t_star, bump.Delta, bump.rho, w, kern, bump.M, 1))
    if abs(psi_t) > 1e-8:
        raise NumericalFailure(f"psi_t(Delta/2, t*) = {psi_t:.2e}; t* is not a stationary point")
    if method == "series":
        p_last = abs(1.0 / (1 + 1j * bump.M / alpha) ** 2)
        if p_last > 1e-3:
            warnings.warn(f"comb truncated at |p| = {bump.M} with last term {p_last:.1e}", TruncationWarning,
                          stacklevel=2)
    out = {}
    for sign, key in ((1, "+"), (-1, "-")):
        f = lambda z, sg=sign: spike_bump_E(z, bump, w, sg, method)
        seeds = [0.0] if sign < 0 else []
        roots, res = find_zeros(f, region, resolution, tol=tol, extra_seeds=seeds)
        kinds = ["translation" if (sign < 0 and abs(z) < 1e-8) else "mode" for z in roots]
        out[key] = SpectrumResult(roots, res, tuple(region), np.zeros(roots.size, dtype=int), kinds)
    return out
