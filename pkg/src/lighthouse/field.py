"""Continuum connectivity kernels, the rate-field reduction and the brain-wave PDE.

Kernels are sums of normalised exponentials.  In one dimension
``E(x; sigma) = exp(-|x|/sigma) / (2 sigma)`` and the wizard hat is

    w(x) = A [E(x; 1) - (1 - Gamma/A) E(x; sigma)],

whose integral is ``Gamma``.  In two dimensions the radial analogue uses
``E(r; sigma) = exp(-r/sigma) / (2 pi sigma**2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BranchError, ConfigError, PoleError
from .kernels import Linear, Nonlinearity
from .rootfind import newton_complex

TWO_PI = 2.0 * math.pi

__all__ = [
    "SpatialKernel", "wizard_hat", "w_eval", "w_fourier", "w_half_fourier", "w2d_fourier",
    "RateFieldState", "rate_steady_state", "rate_spectrum", "rate_field_simulate",
    "brainwave_solve_1d", "delayed_convolution", "ring_weights", "exp_cell_integral",
]


@dataclass(frozen=True)
class SpatialKernel:
    """Wizard-hat kernel ``A [E(.;1) - (1 - Gamma/A) E(.;sigma)]`` in 1 or 2 dimensions."""

    A: float = 1.0
    sigma: float = 2.0
    Gamma: float = 0.0
    dimension: int = 1

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigError("sigma must be positive")
        if self.dimension not in (1, 2):
            raise ConfigError("dimension must be 1 or 2")

    @property
    def components(self):
        """``[(weight, scale), ...]`` with ``w = sum weight * E(.; scale)``."""
        return [(self.A, 1.0), (-(self.A - self.Gamma), self.sigma)]

    def value(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        for c, s in self.components:
            if self.dimension == 1:
                out = out + c * np.exp(-x / s) / (2 * s)
            else:
                out = out + c * np.exp(-x / s) / (TWO_PI * s * s)
        return out

    def fourier(self, k):
        """``w_hat(k)``; for 2D kernels the radial (Hankel) transform at ``a = 0``."""
        if self.dimension == 2:
            return w2d_fourier(k, 0.0, self)
        k = np.asarray(k, dtype=complex)
        out = np.zeros_like(k)
        for c, s in self.components:
            den = 1.0 + (s * k) ** 2
            if np.any(np.abs(den) < 1e-14):
                raise PoleError("w_hat evaluated at a pole k = +-i/sigma")
            out = out + c / den
        return out

    def half_fourier(self, k):
        """``w_hat_plus(k) = int_0^inf w(y) exp(-i k y) dy``."""
        k = np.asarray(k, dtype=complex)
        out = np.zeros_like(k)
        for c, s in self.components:
            den = 1.0 + 1j * s * k
            if np.any(np.abs(den) < 1e-14):
                raise PoleError("w_hat_plus evaluated at its pole k = i/sigma")
            out = out + c / (2.0 * den)
        return out

    def integral(self, a, b):
        """``int_a^b w(x) dx`` in closed form (1D)."""
        return sum(c * exp_cell_integral(a, b, s) for c, s in self.components)

    def w_prime_hat(self, k):
        """``d w_hat / dk`` for real ``k`` (1D)."""
        k = np.asarray(k, dtype=float)
        return sum(-2 * c * s * s * k / (1 + (s * k) ** 2) ** 2 for c, s in self.components)

    def k_max(self) -> float:
        """Wavenumber maximising ``w_hat`` on ``k >= 0``."""
        ks = np.linspace(0, 20, 20001)
        wk = np.real(self.fourier(ks))
        i = int(np.argmax(wk))
        if i == 0 or i == ks.size - 1:
            return float(ks[i])
        return brentq(lambda k: float(self.w_prime_hat(k)), ks[i - 1], ks[i + 1], xtol=1e-15)


def wizard_hat(A: float = 1.0, sigma: float = 2.0, Gamma: float = 0.0, dimension: int = 1) -> SpatialKernel:
    return SpatialKernel(A, sigma, Gamma, dimension)


def exp_cell_integral(a, b, s):
    """``int_a^b exp(-|x|/s)/(2 s) dx`` for arrays ``a <= b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    F = lambda x: 0.5 * np.sign(x) * (-np.expm1(-np.abs(x) / s))
    return F(b) - F(a)


def w_eval(x, kernel: SpatialKernel):
    v = kernel.value(x)
    return float(v) if np.ndim(x) == 0 else v


def _cplx(v, k):
    return complex(v) if np.ndim(k) == 0 else v


def w_fourier(k, kernel: SpatialKernel):
    return _cplx(kernel.fourier(k), k)


def w_half_fourier(k, kernel: SpatialKernel):
    return _cplx(kernel.half_fourier(k), k)


def _e2d(k, a, sigma):
    z = 1.0 / sigma + 1j * np.asarray(a, dtype=complex)
    q = z * z + np.asarray(k, dtype=complex) ** 2
    if np.any((np.abs(q.imag) <= 1e-300) & (q.real <= 0)):
        raise BranchError("(1/sigma + i a)^2 + k^2 on the branch cut of the 3/2 power")
    return z / (sigma * sigma * q ** 1.5)


def w2d_fourier(k, a, kernel_or_sigma):
    """``E_hat(k, a; sigma) = sigma^-2 (1/sigma + i a) / ((1/sigma + i a)^2 + k^2)^(3/2)``.

    This is the 2D transform of ``E(r; sigma) exp(-i a r)``; passing a
    :class:`SpatialKernel` sums its components.
    """
    if isinstance(kernel_or_sigma, SpatialKernel):
        out = sum(c * _e2d(k, a, s) for c, s in kernel_or_sigma.components)
    else:
        out = _e2d(k, a, float(kernel_or_sigma))
    return _cplx(out, k if np.ndim(k) else a)


# --- discretisation on a periodic mesh -------------------------------------------------

def ring_weights(kernel: SpatialKernel, n: int, dx: float) -> np.ndarray:
    """Cell-integrated weights ``c[o]`` for circular offsets ``o = 0..n-1``.

    Offsets are measured on the ring (nearest image); the centre weight is
    corrected so that the weights sum exactly to ``w_hat(0) = Gamma``.
    """
    o = np.arange(n)
    d = np.where(o <= n // 2, o, o - n) * dx
    c = kernel.integral(d - dx / 2, d + dx / 2)
    c[0] += kernel.Gamma - c.sum()
    return c


def circular_convolve(c_hat: np.ndarray, f: np.ndarray) -> np.ndarray:
    """``(c * f)_i = sum_o c_o f_{i-o}`` given ``c_hat = rfft(c)``."""
    return np.fft.irfft(c_hat * np.fft.rfft(f), n=f.shape[-1])


# --- rate field -------------------------------------------------------------------------

@dataclass
class RateFieldState:
    """Mesh values of ``psi`` and ``psi_t`` on the periodic domain ``[-L, L)``."""

    psi: np.ndarray
    psi_t: np.ndarray
    L: float

    @property
    def n(self) -> int:
        return self.psi.size

    @property
    def dx(self) -> float:
        return 2 * self.L / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)


def rate_steady_state(S: Nonlinearity, kernel: SpatialKernel, n_grid: int = 20001) -> list:
    """Homogeneous steady states ``psi = S(psi) w_hat(0)/(2 pi)``."""
    g0 = kernel.Gamma / TWO_PI
    if isinstance(S, Linear):
        if g0 == 0:
            return [0.0]
        den = 1.0 - S.gamma * g0
        if den == 0:
            return []
        return [-S.theta * g0 / den]
    f = lambda p: p - float(S.value(p)) * g0
    hi = max(abs(g0) * S.sup, 1.0)
    grid = np.linspace(-hi if g0 < 0 else 0.0, hi if g0 >= 0 else 0.0, n_grid)
    vals = grid - np.asarray(S.value(grid)) * g0
    roots = [float(p) for p, v in zip(grid, vals) if v == 0.0]
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14))
    return sorted(set(roots))


def rate_spectrum(k, psi_bar: float, S: Nonlinearity, kernel: SpatialKernel, tau: float,
                  alpha: float) -> np.ndarray:
    """Roots of ``(1 + lambda/alpha)^2 = S'(psi) w_hat(k) exp(-lambda tau) / (2 pi)``.

    Returns an array of shape ``k.shape + (2,)``.
    """
    sp = float(S.prime(psi_bar))
    c = sp * np.asarray(kernel.fourier(k), dtype=complex) / TWO_PI
    r = np.sqrt(c)
    lam = np.stack([alpha * (r - 1.0), alpha * (-r - 1.0)], axis=-1)
    if tau == 0:
        return lam
    flat = lam.reshape(-1, 2)
    cf = np.broadcast_to(c, lam.shape[:-1]).reshape(-1)
    for i in range(flat.shape[0]):
        for j in range(2):
            z = flat[i, j]
            for d in np.linspace(0, tau, 41)[1:]:
                f = lambda l, d=d, ci=cf[i]: (1 + l / alpha) ** 2 - ci * np.exp(-l * d)
                z, _ = newton_complex(f, z, tol=1e-13)
            flat[i, j] = z
    return flat.reshape(lam.shape)


def rate_field_simulate(state: RateFieldState, S: Nonlinearity, kernel: SpatialKernel, alpha: float,
                        dt: float, t_end: float, tau: float = 0.0, record_every: int = 0):
    """Integrate ``Q psi = (2 pi)^-1 w * S(psi(t - tau))`` with ``Q = (1 + alpha^-1 d/dt)^2``.

    Written as ``psi_tt = alpha^2 (F - psi) - 2 alpha psi_t`` and stepped with
    classical RK4; the delayed term is frozen over a step and read from a
    history buffer (constant initial history).  Returns ``(times, psi_rows,
    final_state)``.
    """
    if dt <= 0 or t_end <= 0:
        raise ConfigError("dt and t_end must be positive")
    if alpha * dt > 0.5:
        warnings.warn("alpha*dt > 0.5: RK4 step is poorly resolved", RuntimeWarning, stacklevel=2)
    n = state.n
    c_hat = np.fft.rfft(ring_weights(kernel, n, state.dx))
    lag = int(round(tau / dt))
    hist = [state.psi.copy()] * (lag + 1)
    psi, pt = state.psi.astype(float).copy(), state.psi_t.astype(float).copy()
    n_steps = int(round(t_end / dt))
    times, rows = [0.0], [psi.copy()]
    a2 = alpha * alpha

    def rhs(p, q, F):
        return q, a2 * (F - p) - 2 * alpha * q

    for step in range(n_steps):
        delayed = hist[0] if lag else psi
        F = circular_convolve(c_hat, np.asarray(S.value(delayed))) / TWO_PI
        k1 = rhs(psi, pt, F)
        k2 = rhs(psi + 0.5 * dt * k1[0], pt + 0.5 * dt * k1[1], F)
        k3 = rhs(psi + 0.5 * dt * k2[0], pt + 0.5 * dt * k2[1], F)
        k4 = rhs(psi + dt * k3[0], pt + dt * k3[1], F)
        psi = psi + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        pt = pt + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if lag:
            hist.pop(0)
            hist.append(psi.copy())
        if record_every and (step + 1) % record_every == 0:
            times.append((step + 1) * dt)
            rows.append(psi.copy())
    if not record_every:
        times.append(n_steps * dt)
        rows.append(psi.copy())
    return np.array(times), np.array(rows), RateFieldState(psi, pt, state.L)


# --- brain-wave equation ---------------------------------------------------------------

def brainwave_solve_1d(source: Callable, sigma: float, v: float, L: float, n: int, dt: float,
                       t_end: float, source_t: Optional[Callable] = None, record_times=()):
    """Solve ``[(1/sigma + v^-1 d_t)^2 - d_xx] psi = sigma^-1 (1/sigma + v^-1 d_t) s``.

    Periodic domain ``[-L, L)`` with ``n`` points, zero initial data, and
    ``source(x, t)`` vanishing for ``t <= 0``.  The damping term is treated
    with a centred difference, which gives the explicit update

        (1 + c dt) psi+ = 2 psi - (1 - c dt) psi- + dt^2 v^2 [psi_xx - psi/sigma^2 + RHS],

    with ``c = v/sigma``; stable for ``v dt sqrt(4/dx^2 + 1/sigma^2) <= 2``.  Returns
    ``(x, times, rows)`` at the requested ``record_times``.
    """
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError("the brain-wave equation needs a finite positive speed")
    dx = 2 * L / n
    # leapfrog bound for the Klein-Gordon operator: v dt sqrt(4/dx^2 + 1/sigma^2) <= 2
    if v * dt * math.sqrt(4 / dx**2 + 1 / sigma**2) > 2.0:
        raise ConfigError(f"CFL violated: v dt/dx = {v * dt / dx:.3g} exceeds the leapfrog bound")
    x = -L + dx * np.arange(n)
    c = v / sigma
    if source_t is None:
        h = 1e-6
        source_t = lambda xx, t: (source(xx, t + h) - source(xx, t - h)) / (2 * h)
    prev = np.zeros(n)
    cur = np.zeros(n)
    n_steps = int(round(t_end / dt))
    rec = {int(round(t / dt)): t for t in record_times}
    out_t, out = [], []
    if 0 in rec:
        out_t.append(0.0)
        out.append(cur.copy())
    v2 = v * v
    for m in range(n_steps):
        t = m * dt
        lap = (np.roll(cur, -1) - 2 * cur + np.roll(cur, 1)) / dx**2
        rhs = source(x, t) / sigma**2 + source_t(x, t) / (sigma * v)
        nxt = (2 * cur - (1 - c * dt) * prev + dt * dt * v2 * (lap - cur / sigma**2 + rhs)) / (1 + c * dt)
        prev, cur = cur, nxt
        if (m + 1) in rec:
            out_t.append(rec[m + 1])
            out.append(cur.copy())
    return x, np.array(out_t), np.array(out)


def delayed_convolution(source: Callable, sigma: float, v: float, x, t, L: Optional[float] = None,
                        n_quad: int = 20001):
    """``int E(x - y; sigma) s(y, t - |x - y|/v) dy`` by composite quadrature.

    With ``L`` given the source is periodic on ``[-L, L)`` and the integral
    runs over the whole line (periodic images).  Quadrature uses Simpson's
    rule on each side of the kink at ``y = x``.
    """
    from scipy.integrate import simpson

    x = np.atleast_1d(np.asarray(x, dtype=float))
    reach = 40.0 * sigma
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        tot = 0.0
        for sgn in (-1.0, 1.0):
            u = np.linspace(0.0, reach, n_quad)
            y = xi + sgn * u
            yy = y if L is None else np.mod(y + L, 2 * L) - L
            f = np.exp(-u / sigma) / (2 * sigma) * source(yy, t - u / v)
            tot += simpson(f, x=u)
        out[i] = tot
    return out
