"""Periodic travelling waves of the continuum model and their linear stability.

Firing times ``T^m(x) = m T + rho x`` give a drive that depends only on the
wave frame ``xi = t - rho x``:

    psi(xi; T, rho) = int w(|y|) P(xi - rho y - |y|/v) dy.

Splitting ``y > 0`` and ``y < 0`` and writing ``a1 = 1/v + rho``,
``a2 = 1/v - rho``, each exponential component of ``w`` contributes an
exponentially weighted running average of ``P`` (causal for ``a > 0``,
anti-causal for ``a < 0``) that is evaluated here in closed form.  The
truncated Fourier series with coefficients
``psi_n = eta_hat(w_n) [w_plus(w_n a1) + w_plus(w_n a2)] / T`` is the
alternative route.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, DistributionalDerivative, NoRoot, TruncationWarning
from .field import SpatialKernel
from .kernels import Heaviside, Linear, Nonlinearity, SynapseKernel
from .rootfind import find_zeros
from .synchrony import TWO_PI, script_g

__all__ = [
    "WaveContext", "drive_closed", "drive_closed_derivative", "wave_drive",
    "wave_coefficients", "graded_panels", "dispersion_solve", "dispersion_curve", "f_n", "f_n_direct",
    "wave_eigenvalue_a", "wave_E", "wave_E_reduced", "wave_spectrum", "gauss_panels",
]


def gauss_panels(a: float, b: float, panels: int = 16, order: int = 16):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded_panels(T: float, alpha: float, order: int = 16):
    """Gauss-Legendre rule on ``[0, T]`` refined over the synaptic rise ``t < 10/alpha``."""
    cut = min(T, 10.0 / alpha)
    edges = np.linspace(0.0, cut, int(np.ceil(4 * alpha * cut)) + 2)
    if T > cut:
        edges = np.concatenate([edges, np.linspace(cut, T, int(np.ceil(T / cut)) * 4 + 1)[1:]])
    x, w = np.polynomial.legendre.leggauss(order)
    h = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    return (mid[:, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


# --- closed-form drive -----------------------------------------------------------------

def _p_coeffs(alpha: float, T: float):
    """``P(phi) = exp(-alpha phi) (A1 phi + A0)`` on ``0 <= phi < T``."""
    q = math.exp(-alpha * T)
    one_m = -math.expm1(-alpha * T)
    return alpha**2 / one_m, alpha**2 * T * q / one_m**2


def _seg(alpha, A1, A0, beta, c, sgn, t0, t1):
    """``int_{t0}^{t1} exp(-beta tau) Pseg(c + sgn tau) dtau`` with ``Pseg`` the base segment."""
    kap = np.float64(beta + sgn * alpha)
    B0 = A1 * c + A0
    B1 = A1 * sgn

    def F(tau):
        ex = np.exp(-alpha * c - kap * tau)
        return -ex * ((B0 + B1 * tau) / kap + B1 / kap**2)

    small = np.abs(kap) * np.maximum(np.abs(t1), np.abs(t0)) < 1e-6
    with np.errstate(all="ignore"):
        out = F(t1) - F(t0)
    if np.any(small):
        # expand exp(-kap tau) to second order
        ea = np.exp(-alpha * c)
        def poly(tau):
            return (B0 * tau + (B1 - kap * B0) * tau**2 / 2
                    + (kap * kap * B0 / 2 - kap * B1) * tau**3 / 3 + kap * kap * B1 * tau**4 / 8)
        out = np.where(small, ea * (poly(t1) - poly(t0)), out)
    return out


def _exp_average(xi, T, alpha, beta, causal: bool):
    """``int_0^inf exp(-beta tau) P(xi -+ tau) dtau`` for the alpha-function lattice ``P``."""
    A1, A0 = _p_coeffs(alpha, T)
    phi = np.mod(np.asarray(xi, dtype=float), T)
    if causal:
        a = _seg(alpha, A1, A0, beta, phi, -1.0, 0.0, phi)
        b = _seg(alpha, A1, A0, beta, phi + T, -1.0, phi, T)
    else:
        a = _seg(alpha, A1, A0, beta, phi, 1.0, 0.0, T - phi)
        b = _seg(alpha, A1, A0, beta, phi - T, 1.0, T - phi, T)
    return (a + b) / (-math.expm1(-beta * T))


def _P(xi, T, alpha):
    A1, A0 = _p_coeffs(alpha, T)
    phi = np.mod(np.asarray(xi, dtype=float), T)
    return np.exp(-alpha * phi) * (A1 * phi + A0)


def _slopes(rho: float, v: float):
    inv_v = 0.0 if math.isinf(v) else 1.0 / v
    return inv_v + rho, inv_v - rho


def drive_closed(xi, T: float, rho: float, kernel: SynapseKernel, w: SpatialKernel, v: float):
    """Exact ``psi(xi; T, rho)`` for exponential-sum kernels."""
    alpha = kernel.alpha
    xi = np.asarray(xi, dtype=float)
    out = np.zeros_like(xi)
    P = None
    for a in _slopes(rho, v):
        for c, s in w.components:
            if a == 0.0:
                if P is None:
                    P = _P(xi, T, alpha)
                out = out + c * P / 2
            else:
                beta = 1.0 / (s * abs(a))
                out = out + c * beta / 2 * _exp_average(xi, T, alpha, beta, a > 0)
    return out


def drive_closed_derivative(xi, T: float, rho: float, kernel: SynapseKernel, w: SpatialKernel, v: float):
    """``d psi / d xi`` (right derivative where ``psi`` has a kink)."""
    alpha = kernel.alpha
    xi = np.asarray(xi, dtype=float)
    A1, A0 = _p_coeffs(alpha, T)
    phi = np.mod(xi, T)
    P = np.exp(-alpha * phi) * (A1 * phi + A0)
    dP = np.exp(-alpha * phi) * (A1 - alpha * (A1 * phi + A0))
    out = np.zeros_like(xi)
    for a in _slopes(rho, v):
        for c, s in w.components:
            if a == 0.0:
                out = out + c * dP / 2
            else:
                beta = 1.0 / (s * abs(a))
                J = _exp_average(xi, T, alpha, beta, a > 0)
                d = (P - beta * J) if a > 0 else (-P + beta * J)
                out = out + c * beta / 2 * d
    return out


def wave_coefficients(T: float, rho: float, kernel: SynapseKernel, w: SpatialKernel, v: float, M: int):
    """``(omega_n, psi_n)`` for ``n = -M..M``."""
    n = np.arange(-M, M + 1)
    om = TWO_PI * n / T
    a1, a2 = _slopes(rho, v)
    psi_n = kernel.fourier(om) * (w.half_fourier(om * a1) + w.half_fourier(om * a2)) / T
    return om, psi_n


def wave_drive(xi, T: float, rho: float, kernel: SynapseKernel, w: SpatialKernel, v: float = math.inf,
               M: Optional[int] = None, method: str = "exact", tol: float = 1e-8):
    """Wave-frame drive; ``method`` is ``"exact"`` (closed form) or ``"series"``."""
    if method == "exact":
        out = drive_closed(xi, T, rho, kernel, w, v)
    elif method == "series":
        M = M or 4096
        om, c = wave_coefficients(T, rho, kernel, w, v, M)
        if abs(c[-1]) > tol:
            warnings.warn(f"last drive harmonic is {abs(c[-1]):.2e}", TruncationWarning, stacklevel=2)
        x = np.asarray(xi, dtype=float)
        out = (np.exp(1j * np.multiply.outer(x, om)) @ c).real
    else:
        raise ConfigError(f"unknown method {method!r}")
    return float(out) if np.ndim(xi) == 0 else out


# --- dispersion ------------------------------------------------------------------------

def _cycle(S, T, rho, kernel, w, v, order=16):
    t, wt = graded_panels(T, kernel.alpha, order)
    return float(np.dot(wt, S.value(drive_closed(t, T, rho, kernel, w, v))))


def dispersion_solve(rho: float, S: Nonlinearity, kernel: SynapseKernel, w: SpatialKernel,
                     v: float = math.inf, T_min: Optional[float] = None, T_max: float = 200.0,
                     n_scan: int = 240, tol: float = 1e-12) -> list:
    """All periods ``T`` with ``int_0^T S(psi(s; T, rho)) ds = 2 pi`` found on a scan."""
    F = lambda T: TWO_PI - _cycle(S, T, rho, kernel, w, v)
    if T_min is None:
        T_min = TWO_PI / S.sup * (1 + 1e-9) if math.isfinite(S.sup) else 1e-2
    grid = np.geomspace(T_min, T_max, n_scan)
    vals = np.array([F(T) for T in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(F, grid[i], grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    roots.extend(float(g) for g, f in zip(grid, vals) if f == 0.0)
    if not roots:
        raise NoRoot(f"no dispersion root for rho={rho} in [{T_min:g}, {T_max:g}]")
    return sorted(roots)


def dispersion_curve(rhos, S, kernel, w, v=math.inf, **kw):
    """Rows ``(rho, T, branch)``; branch index counts roots from the smallest period."""
    rows = []
    for rho in rhos:
        try:
            Ts = dispersion_solve(rho, S, kernel, w, v, **kw)
        except NoRoot:
            continue
        rows.extend((rho, T, b) for b, T in enumerate(Ts))
    return rows


# --- stability -------------------------------------------------------------------------

@dataclass
class WaveContext:
    """A travelling wave together with the quadrature data used by its spectrum."""

    S: Nonlinearity
    kernel: SynapseKernel
    w: SpatialKernel
    v: float
    T: float
    rho: float = 0.0
    M: int = 256
    order: int = 16
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def solve(cls, S, kernel, w, v=math.inf, rho=0.0, branch=0, **kw) -> "WaveContext":
        T = dispersion_solve(rho, S, kernel, w, v)[branch]
        return cls(S, kernel, w, v, T, rho, **kw)

    def psi(self, t):
        return drive_closed(t, self.T, self.rho, self.kernel, self.w, self.v)

    def psi_dot(self, t):
        return drive_closed_derivative(t, self.T, self.rho, self.kernel, self.w, self.v)

    @property
    def theta_dot_T(self) -> float:
        return float(self.S.value(self.psi(self.T)))

    def theta_profile(self, xi):
        """``theta(xi) = int_0^xi S(psi)`` on ``[0, T]``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty_like(xi)
        for i, x in enumerate(xi):
            t, wt = gauss_panels(0.0, x, 8, 16) if x > 0 else (np.zeros(0), np.zeros(0))
            out[i] = np.dot(wt, self.S.value(self.psi(t)))
        return out

    def quadrature(self):
        if "q" not in self._cache:
            if isinstance(self.S, Heaviside):
                raise DistributionalDerivative("wave stability needs a differentiable S")
            t, wt = graded_panels(self.T, self.kernel.alpha, self.order)
            psi = self.psi(t)
            g = wt * self.S.second(psi) * self.psi_dot(t)
            n = np.arange(-self.M, self.M + 1)
            om = TWO_PI * n / self.T
            E = np.exp(1j * np.outer(t, om))      # (J, N)
            self._cache["q"] = (t, g, om, E, float(self.S.prime(self.psi(self.T))), wt, psi)
        return self._cache["q"]


def f_n(n, lam, ctx: WaveContext):
    """``f_n(lambda) = S'(psi(T)) (e^lambda - 1) - int_0^T S''(psi) psi_dot e^{i z_n t} dt``.

    ``z_n = omega_n - i lambda / T``; ``n`` may be an array, ``lam`` a scalar.
    """
    lam = complex(lam)
    if isinstance(ctx.S, Linear):
        return np.full(np.shape(n), ctx.S.gamma * np.expm1(lam), dtype=complex)
    t, g, om, E, sp_T, _, _ = ctx.quadrature()
    n = np.asarray(n)
    z = TWO_PI * n / ctx.T - 1j * lam / ctx.T
    integral = np.exp(1j * np.multiply.outer(z, t)) @ g
    return sp_T * np.expm1(lam) - integral


def f_n_direct(n, lam, ctx: WaveContext, panels=256, order=16):
    """``f_n(lambda) = i z_n int_0^T S'(psi) e^{i z_n t} dt`` (no integration by parts)."""
    t, wt = gauss_panels(0.0, ctx.T, panels, order)
    sp = wt * ctx.S.prime(ctx.psi(t))
    z = TWO_PI * np.asarray(n) / ctx.T - 1j * complex(lam) / ctx.T
    return 1j * z * (np.exp(1j * np.multiply.outer(z, t)) @ sp)


def _bracket(z, k, rho, om, ctx: WaveContext):
    inv_v = 0.0 if math.isinf(ctx.v) else 1.0 / ctx.v
    base = z * inv_v
    return ctx.w.half_fourier(base - k + rho * om) + ctx.w.half_fourier(base + k - rho * om)


def wave_eigenvalue_a(lam, k: float, ctx: WaveContext, rho: Optional[float] = None):
    """``a(lambda, k; rho)`` for an array of ``lam``.

    For a linear ``S`` and ``v = inf, rho = 0`` the harmonic sum is the closed
    form ``gamma (e^lambda - 1) w_hat(k) G(lambda)``.  Otherwise the series is
    truncated at ``|n| <= M`` after removing its large-``n`` limit, which is
    summed exactly.
    """
    rho = ctx.rho if rho is None else rho
    lam = np.asarray(lam, dtype=complex)
    T = ctx.T
    if isinstance(ctx.S, Linear) and math.isinf(ctx.v) and rho == 0:
        wk = complex(ctx.w.fourier(k))
        return ctx.S.gamma * np.expm1(lam) * wk * script_g(lam, T, 0.0, ctx.kernel)
    n = np.arange(-ctx.M, ctx.M + 1)
    om = TWO_PI * n / T
    z = om[None, :] - 1j * lam.reshape(-1, 1) / T            # (L, N)
    eta = ctx.kernel.fourier(z)
    B = _bracket(z, k, rho, om[None, :], ctx)
    if isinstance(ctx.S, Linear):
        f = ctx.S.gamma * np.expm1(lam.reshape(-1, 1)) * np.ones_like(z)
        f_inf = ctx.S.gamma * np.expm1(lam.reshape(-1))
    else:
        t, g, _, E, sp_T, _, _ = ctx.quadrature()
        G = g[None, :] * np.exp(np.outer(lam.reshape(-1), t) / T)   # (L, J)
        f = sp_T * np.expm1(lam.reshape(-1, 1)) - G @ E
        f_inf = sp_T * np.expm1(lam.reshape(-1))
    # the bracket tends to a constant when a slope vanishes; that part is summed exactly
    a1, a2 = _slopes(rho, ctx.v)
    inv_v = 0.0 if math.isinf(ctx.v) else 1.0 / ctx.v
    shift = -1j * lam.reshape(-1) * inv_v / T
    W_inf = np.zeros(lam.size, dtype=complex)
    if a1 == 0.0:
        W_inf = W_inf + ctx.w.half_fourier(-k + shift)
    if a2 == 0.0:
        W_inf = W_inf + ctx.w.half_fourier(k + shift)
    lead = f_inf * W_inf
    tail = lead * script_g(lam.reshape(-1), T, 0.0, ctx.kernel)
    body = ((f * B - lead[:, None]) * eta).sum(axis=1) / T
    out = body + tail
    return out.reshape(lam.shape) if lam.ndim else complex(out[0])


def wave_E(lam, k: float, ctx: WaveContext, rho: Optional[float] = None):
    """``E(lambda, k; rho) = (e^lambda - 1) thetadot(T) - [a(lambda, k; rho) - a(0, 0; rho)]``."""
    a00 = wave_eigenvalue_a(0.0, 0.0, ctx, rho)
    return np.expm1(np.asarray(lam, dtype=complex)) * ctx.theta_dot_T - (wave_eigenvalue_a(lam, k, ctx, rho) - a00)


def wave_E_reduced(lam, k: float, ctx: WaveContext, rho: Optional[float] = None):
    """For linear ``S``: ``E / (e^lambda - 1)``, free of the lattice roots ``2 pi i Z``."""
    if not isinstance(ctx.S, Linear):
        raise ConfigError("the reduced function exists for linear S only")
    lam = np.asarray(lam, dtype=complex)
    rho = ctx.rho if rho is None else rho
    if math.isinf(ctx.v) and rho == 0:
        return ctx.theta_dot_T - ctx.S.gamma * complex(ctx.w.fourier(k)) * script_g(lam, ctx.T, 0.0, ctx.kernel)
    lin = WaveContext(Linear(1.0, 0.0), ctx.kernel, ctx.w, ctx.v, ctx.T, ctx.rho, ctx.M)
    # a for gamma = 1 divided by (e^lambda - 1), evaluated away from the lattice
    n = np.arange(-ctx.M, ctx.M + 1)
    om = TWO_PI * n / ctx.T
    z = om[None, :] - 1j * lam.reshape(-1, 1) / ctx.T
    s = (ctx.kernel.fourier(z) * _bracket(z, k, rho, om[None, :], lin)).sum(axis=1) / ctx.T
    out = ctx.theta_dot_T - ctx.S.gamma * s
    return out.reshape(lam.shape) if lam.ndim else complex(out[0])


def wave_spectrum(ks, ctx: WaveContext, rho: Optional[float] = None, region=(-3.0, 1.0, -math.pi, math.pi),
                  resolution=(80, 80), tol: float = 1e-8):
    """Eigenvalues ``lambda(k)`` on a grid of ``k``.

    Returns ``(rows, verdict)`` with rows ``(k, lambda, residual)`` and the
    verdict taken from the largest real part, excluding the translation
    zero at ``k = 0`` (and, for linear ``S``, the lattice ``2 pi i Z``).
    """
    rows = []
    linear = isinstance(ctx.S, Linear)
    for k in ks:
        fn = (lambda z, k=k: wave_E_reduced(z, k, ctx, rho)) if linear else (lambda z, k=k: wave_E(z, k, ctx, rho))
        roots, res = find_zeros(fn, region, resolution, tol=tol)
        for z, r in zip(roots, res):
            rows.append((float(k), complex(z), float(r)))
    nontriv = [z.real for k, z, r in rows if not (k == 0 and abs(z) < 1e-6)]
    m = max(nontriv) if nontriv else -math.inf
    verdict = "unstable" if m > 1e-6 else ("stable" if m < -1e-6 else "marginal")
    return rows, verdict
