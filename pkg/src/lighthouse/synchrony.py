"""Synchronous firing on graphs with a row-sum constraint.

With firing times ``T_i^m = m T`` every node sees the drive ``Gamma P(t)``,
``P(t) = sum_m eta(t - tau - m T)``.  The period solves
``2 pi = int_0^T S(Gamma P(s)) ds`` and, for a linear ``S``, the firing-time
perturbations of mode ``mu`` have spectrum given by the zeros of

    E_mu(lambda) = thetadot(T) - gamma * w_mu * G(lambda),

with ``G(lambda) = (1/T) sum_n eta_hat(w_n - i lambda/T) exp(-i (w_n - i lambda/T) tau)``.
The spectrum is per firing cycle: ``exp(lambda)`` is the Floquet multiplier.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ConfigError, Infeasible, NoRoot, NoSolution, TruncationWarning
from .kernels import Linear, Nonlinearity, SynapseKernel
from .network import GraphNetwork, eigen
from .rootfind import find_zeros, newton_complex

TWO_PI = 2.0 * math.pi

__all__ = [
    "PeriodicDrive", "SpectrumResult", "drive_eval", "solve_period", "period_linear",
    "theta_dot", "script_g", "char_function", "find_spectrum", "network_spectrum",
    "dynamic_instability", "static_instability", "slow_spectrum", "slow_thresholds",
    "delay_hopf_frequency", "LinearContext", "default_harmonics", "mode_spectra",
    "dynamic_residual",
]


def default_harmonics(alpha: float, T: float) -> int:
    return max(200, int(math.ceil(20.0 * alpha * T)))


@dataclass(frozen=True)
class PeriodicDrive:
    """The T-periodic lattice sum ``P(t) = sum_m eta(t - tau - m T)``."""

    T: float
    tau: float
    kernel: SynapseKernel
    n_harmonics: Optional[int] = None

    def __post_init__(self):
        if not self.T > 0:
            raise ConfigError("period must be positive")
        if self.tau < 0:
            raise ConfigError("delay must be non-negative")

    @property
    def M(self) -> int:
        return self.n_harmonics or default_harmonics(self.kernel.alpha, self.T)

    def _phase(self, t):
        return np.mod(np.asarray(t, dtype=float) - self.tau, self.T)

    def value(self, t):
        """Closed-form lattice sum (geometric series over past spikes)."""
        a, T = self.kernel.alpha, self.T
        s = self._phase(t)
        one_m = -math.expm1(-a * T)
        q = math.exp(-a * T)
        return a * a * np.exp(-a * s) * (s / one_m + T * q / one_m**2)

    def derivative(self, t):
        """Right derivative of P."""
        a, T = self.kernel.alpha, self.T
        s = self._phase(t)
        one_m = -math.expm1(-a * T)
        q = math.exp(-a * T)
        return a * a * np.exp(-a * s) * ((1.0 - a * s) / one_m - a * T * q / one_m**2)

    def coefficients(self, M: Optional[int] = None):
        """``(n, P_n)`` for ``n = -M..M``; ``P_n = eta_hat(w_n) exp(-i w_n tau) / T``."""
        M = M or self.M
        n = np.arange(-M, M + 1)
        w = TWO_PI * n / self.T
        return n, self.kernel.fourier(w) * np.exp(-1j * w * self.tau) / self.T

    def fourier(self, t, M: Optional[int] = None, tol: float = 1e-8):
        """Truncated Fourier series of P; warns when the last harmonic exceeds ``tol``."""
        n, c = self.coefficients(M)
        if abs(c[-1]) > tol:
            warnings.warn(f"last harmonic of P is {abs(c[-1]):.2e}", TruncationWarning, stacklevel=2)
        t = np.asarray(t, dtype=float)
        w = TWO_PI * n / self.T
        z = np.exp(1j * np.multiply.outer(t, w)) @ c
        if np.max(np.abs(z.imag), initial=0.0) > 1e-10:
            raise ArithmeticError("Fourier series of a real drive has an imaginary residue")
        return z.real


def drive_eval(P: PeriodicDrive, t, method: str = "exact"):
    """Evaluate the periodic drive; ``method`` is ``"exact"`` or ``"fourier"``."""
    if method == "exact":
        v = P.value(t)
    elif method == "fourier":
        v = P.fourier(t)
    else:
        raise ConfigError(f"unknown method {method!r}")
    return float(v) if np.ndim(t) == 0 else v


def _cycle_integral(S: Nonlinearity, Gamma: float, P: PeriodicDrive) -> float:
    """``int_0^T S(Gamma P(s)) ds``; the kink of P at ``tau mod T`` is a breakpoint."""
    T = P.T
    if Gamma == 0.0:
        return float(S.value(0.0)) * T
    if isinstance(S, Linear):
        # int_0^T P = eta_hat(0) = 1 for every T
        return S.gamma * Gamma - S.theta * T
    f = lambda s: float(S.value(Gamma * P.value(s)))
    kink = float(np.mod(P.tau, T))
    pts = [p for p in (kink,) if 0 < p < T]
    val, _ = quad(f, 0.0, T, points=pts or None, limit=400, epsabs=1e-13, epsrel=1e-13)
    return val


def solve_period(S: Nonlinearity, Gamma: float, kernel: SynapseKernel, tau: float = 0.0,
                 T_max: float = 1e4, T_min: Optional[float] = None, tol: float = 1e-12) -> float:
    """Emergent period of synchrony: root of ``F(T) = 2 pi - int_0^T S(Gamma P(s)) ds``."""
    F = lambda T: TWO_PI - _cycle_integral(S, Gamma, PeriodicDrive(T, tau, kernel))
    if T_min is None:
        T_min = TWO_PI / S.sup if math.isfinite(S.sup) else 1e-3
    grid = np.geomspace(T_min, T_max, 400)
    prev_T, prev_F = grid[0], F(grid[0])
    if prev_F == 0.0:
        return float(prev_T)
    for T in grid[1:]:
        fT = F(T)
        if np.sign(fT) != np.sign(prev_F):
            return brentq(F, prev_T, T, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
        prev_T, prev_F = T, fT
    raise NoRoot(f"no sign change of F(T) in [{T_min:g}, {T_max:g}]")


def period_linear(gamma: float, Gamma: float, Theta: float) -> float:
    """``T = (gamma Gamma - 2 pi) / Theta``."""
    if Theta == 0:
        raise Infeasible("Theta = 0: period diverges")
    T = (gamma * Gamma - TWO_PI) / Theta
    if not T > 0:
        raise Infeasible("need (gamma Gamma - 2 pi) and Theta of the same sign")
    return T


def theta_dot(S: Nonlinearity, Gamma: float, P: PeriodicDrive) -> float:
    """Phase velocity at firing, ``S(Gamma P(T))``."""
    return float(S.value(Gamma * P.value(P.T)))


def script_g(lam, T: float, tau: float, kernel: SynapseKernel, M: Optional[int] = None,
             method: str = "closed"):
    """``G(lambda) = (1/T) sum_n eta_hat(w_n - i lambda/T) exp(-i (w_n - i lambda/T) tau)``.

    ``method="series"`` sums ``n = -M..M`` directly; ``method="closed"`` uses the
    Poisson-resummed lattice form ``sum_m eta(m T - tau) exp(-lambda m)``, which is
    exact for the alpha function and analytic away from the poles
    ``lambda = -alpha T + 2 pi i n``.
    """
    lam = np.asarray(lam, dtype=complex)
    a = kernel.alpha
    if method == "series":
        M = M or default_harmonics(a, T)
        n = np.arange(-M, M + 1)
        om = TWO_PI * n / T
        arg = om - 1j * lam[..., None] / T
        terms = kernel.fourier(arg) * np.exp(-1j * arg * tau)
        last = np.max(np.abs(terms[..., [0, -1]]))
        if last / T > 1e-10:
            warnings.warn(f"tail harmonic {last / T:.2e} exceeds 1e-10", TruncationWarning, stacklevel=2)
        out = terms.sum(axis=-1) / T
    elif method == "closed":
        m0 = math.floor(tau / T) + 1
        s0 = m0 * T - tau
        mu = a * T + lam
        one_m = -np.expm1(-mu)
        x = np.exp(-mu)
        out = a * a * np.exp(-a * s0 - lam * m0) * (s0 / one_m + T * x / one_m**2)
    else:
        raise ConfigError(f"unknown method {method!r}")
    return complex(out) if out.ndim == 0 else out


def char_function(lam, w_mu: complex, theta_dot_T: float, gamma: float, T: float,
                  tau: float, kernel: SynapseKernel, method: str = "closed"):
    """``E_mu(lambda) = thetadot(T) - gamma * w_mu * G(lambda)``."""
    return theta_dot_T - gamma * w_mu * script_g(lam, T, tau, kernel, method=method)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    region: tuple
    modes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    kinds: list = field(default_factory=list)   # "translation", "lattice" or "mode"

    def nontrivial(self) -> np.ndarray:
        return np.array([z for z, k in zip(self.eigenvalues, self.kinds) if k == "mode"], dtype=complex)

    def max_real(self) -> float:
        z = self.nontrivial()
        return float(z.real.max()) if z.size else -math.inf

    def verdict(self, margin: float = 0.0) -> str:
        m = self.max_real()
        if m > margin:
            return "unstable"
        if m < -margin:
            return "stable"
        return "marginal"

    def rows(self):
        for mu, z, r in zip(self.modes, self.eigenvalues, self.residuals):
            yield int(mu), z.real, z.imag, r


DEFAULT_REGION = (-5.0, 2.0, -4 * math.pi, 4 * math.pi)


def find_spectrum(char_fn, region=DEFAULT_REGION, resolution=(400, 400), mode: int = 0,
                  tol: float = 1e-10) -> SpectrumResult:
    """Zeros of a characteristic function by level-set intersection plus Newton."""
    roots, res = find_zeros(char_fn, region, resolution, tol=tol)
    return SpectrumResult(roots, res, tuple(region), np.full(roots.size, mode, dtype=int),
                          ["mode"] * roots.size)


def _lattice_points(region):
    re_min, re_max, im_min, im_max = region
    if not re_min <= 0.0 <= re_max:
        return []
    ks = range(math.ceil(im_min / TWO_PI), math.floor(im_max / TWO_PI) + 1)
    return [complex(0.0, TWO_PI * k) for k in ks]


@dataclass(frozen=True)
class LinearContext:
    """Parameters of the linear Lighthouse network used by the stability tools."""

    gamma: float
    Gamma: float
    Theta: float
    alpha: float
    tau: float = 0.0

    def replace(self, **kw) -> "LinearContext":
        d = dict(self.__dict__)
        d.update(kw)
        return LinearContext(**d)

    @property
    def kernel(self) -> SynapseKernel:
        return SynapseKernel(self.alpha)

    @property
    def T(self) -> float:
        return period_linear(self.gamma, self.Gamma, self.Theta)

    @property
    def theta_dot_T(self) -> float:
        P = PeriodicDrive(self.T, self.tau, self.kernel)
        return self.gamma * self.Gamma * float(P.value(P.T)) - self.Theta

    def E(self, lam, w_mu):
        return char_function(lam, w_mu, self.theta_dot_T, self.gamma, self.T, self.tau, self.kernel)


def network_spectrum(net: GraphNetwork, ctx: LinearContext, region=DEFAULT_REGION,
                     resolution=(400, 400)) -> SpectrumResult:
    """Spectrum of synchrony for every eigenmode of ``net``.

    The factor ``exp(lambda) - 1`` of the full characteristic equation is reported
    separately: its zero ``lambda = 0`` on the Gamma mode is the translation zero,
    every other lattice point ``2 pi i k`` is tagged ``"lattice"``.
    """
    if net.row_sum is None:
        raise ConfigError("synchrony analysis needs a row-sum network")
    vals = eigen(net).eigenvalues
    i_gamma = int(np.argmin(np.abs(vals - net.row_sum)))
    eig, res, modes, kinds = [], [], [], []
    for mu, w_mu in enumerate(vals):
        sp = find_spectrum(lambda z, w=w_mu: ctx.E(z, w), region, resolution, mode=mu)
        eig.extend(sp.eigenvalues)
        res.extend(sp.residuals)
        modes.extend([mu] * sp.eigenvalues.size)
        kinds.extend(sp.kinds)
        for z in _lattice_points(region):
            eig.append(z)
            res.append(0.0)
            modes.append(mu)
            kinds.append("translation" if (mu == i_gamma and z == 0) else "lattice")
    return SpectrumResult(np.array(eig, dtype=complex), np.array(res), tuple(region),
                          np.array(modes, dtype=int), kinds)


def mode_spectra(ctx: LinearContext, w_modes: Sequence[complex], region=DEFAULT_REGION,
                 resolution=(200, 200)) -> SpectrumResult:
    """Nontrivial spectrum (zeros of ``E_mu``) for an explicit list of eigenvalues."""
    eig, res, modes = [], [], []
    for mu, w_mu in enumerate(w_modes):
        sp = find_spectrum(lambda z, w=w_mu: ctx.E(z, w), region, resolution, mode=mu)
        eig.extend(sp.eigenvalues)
        res.extend(sp.residuals)
        modes.extend([mu] * sp.eigenvalues.size)
    return SpectrumResult(np.array(eig, dtype=complex), np.array(res), tuple(region),
                          np.array(modes, dtype=int), ["mode"] * len(eig))


def _newton2(F, x0, tol=1e-12, maxiter=80):
    x = np.array(x0, dtype=float)
    fx = F(x)
    for _ in range(maxiter):
        if np.max(np.abs(fx)) < tol:
            return x, fx
        J = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * max(1.0, abs(x[j]))
            e = np.zeros(2)
            e[j] = h
            J[:, j] = (F(x + e) - F(x - e)) / (2 * h)
        try:
            dx = np.linalg.solve(J, fx)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        for _ in range(30):
            xn = x - lam * dx
            try:
                fn = F(xn)
            except (Infeasible, ConfigError):
                fn = np.array([np.inf, np.inf])
            if np.all(np.isfinite(fn)) and np.max(np.abs(fn)) < np.max(np.abs(fx)):
                break
            lam *= 0.5
        else:
            break
        x, fx = xn, fn
    return x, fx


PARAMS = ("gamma", "Theta", "Gamma", "alpha", "tau")


def dynamic_instability(w_mu: complex, param: str, ctx: LinearContext, param_range=None,
                        n_seeds=(24, 24), tol=1e-10):
    """Solutions ``(omega_c, a_c)`` of ``E_mu(i omega) = 0`` with ``0 < omega_c < 2 pi``.

    Real and imaginary parts:
        thetadot(T) = gamma (w_R G_R - w_I G_I),   0 = gamma (w_R G_I + w_I G_R).
    """
    if param not in PARAMS:
        raise ConfigError(f"parameter must be one of {PARAMS}")
    a0 = getattr(ctx, param)
    if param_range is None:
        param_range = (a0 / 10, a0 * 10) if a0 > 0 else (-10.0, 10.0)

    def F(x):
        om, a = x
        c = ctx.replace(**{param: a})
        if param in ("alpha",) and a <= 0 or param == "tau" and a < 0:
            raise Infeasible("parameter out of domain")
        e = c.E(1j * om, w_mu)
        return np.array([e.real, e.imag])

    sols = []
    oms = np.linspace(0.05, TWO_PI - 0.05, n_seeds[0])
    lo, hi = param_range
    if lo > 0 and hi / lo > 20:
        avals = np.geomspace(lo, hi, n_seeds[1])
    else:
        avals = np.linspace(lo, hi, n_seeds[1])
    for om in oms:
        for a in avals:
            try:
                x, fx = _newton2(F, (om, a))
            except (Infeasible, ConfigError):
                continue
            if not np.all(np.isfinite(fx)) or np.max(np.abs(fx)) > tol:
                continue
            om_c = float(np.mod(x[0], TWO_PI))
            if om_c < 1e-6 or om_c > TWO_PI - 1e-6:
                continue
            if any(abs(om_c - s[0]) < 1e-6 and abs(x[1] - s[1]) < 1e-6 for s in sols):
                continue
            sols.append((om_c, float(x[1])))
    if not sols:
        raise NoSolution(f"no dynamic instability found for {param}")
    return sorted(sols)


def dynamic_residual(omega: float, w_mu: complex, ctx: LinearContext):
    """Residuals of the real/imaginary balance equations at ``lambda = i omega``."""
    g = script_g(1j * omega, ctx.T, ctx.tau, ctx.kernel)
    wr, wi = complex(w_mu).real, complex(w_mu).imag
    r1 = ctx.theta_dot_T - ctx.gamma * (wr * g.real - wi * g.imag)
    r2 = ctx.gamma * (wr * g.imag + wi * g.real)
    return r1, r2


def static_instability(w_mu: float, param: str, ctx: LinearContext, bracket) -> float:
    """Parameter value at which a real eigenvalue crosses zero: ``E_mu(0) = 0``."""
    f = lambda a: ctx.replace(**{param: a}).E(0.0, w_mu).real
    lo, hi = bracket
    if np.sign(f(lo)) == np.sign(f(hi)):
        raise NoSolution("no sign change of E_mu(0) in bracket")
    return brentq(f, lo, hi, xtol=1e-13)


def slow_spectrum(w_mu: complex, gamma: float, alpha: float, T: float, tau: float = 0.0):
    """Roots of ``(1 + lambda/(alpha T))**2 = (gamma w_mu / 2 pi) exp(-lambda tau / T)``.

    For ``tau = 0`` these are ``alpha T (+-sqrt(gamma w_mu / 2 pi) - 1)``; for
    ``tau > 0`` the two branches are continued in the delay by Newton steps.
    """
    c = gamma * complex(w_mu) / TWO_PI
    r = np.sqrt(c + 0j)
    seeds = [alpha * T * (r - 1.0), alpha * T * (-r - 1.0)]
    if tau == 0:
        return np.array(seeds, dtype=complex)
    out = []
    for z in seeds:
        for d in np.linspace(0, tau, 41)[1:]:
            f = lambda lam, d=d: (1 + lam / (alpha * T))**2 - c * np.exp(-lam * d / T)
            z, _ = newton_complex(f, z, tol=1e-13)
        out.append(z)
    return np.array(out, dtype=complex)


def delay_hopf_frequency(alpha: float, T: float, tau: float) -> float:
    """Smallest ``omega > 0`` with ``2 atan(omega/(alpha T)) + omega tau / T = pi``.

    Equivalent to ``tan(omega tau/T) = 2 (omega/alpha T) / ((omega/alpha T)**2 - 1)``
    on the branch ``0 < omega tau / T < pi/2`` relevant for negative eigenvalues.
    """
    if tau <= 0:
        raise Infeasible("delay-induced frequency needs tau > 0")
    f = lambda om: 2 * math.atan(om / (alpha * T)) + om * tau / T - math.pi
    return brentq(f, 0.0, math.pi * T / tau, xtol=1e-14)


def slow_thresholds(w_eigs, alpha: float, T: float, tau: float = 0.0) -> dict:
    """Closed-form instability thresholds of the slow-synapse reduction."""
    w = np.asarray(w_eigs, dtype=complex).real
    out = {"static_gamma_c": TWO_PI / w.max() if w.max() > 0 else math.inf}
    if tau > 0 and w.min() < 0:
        om = delay_hopf_frequency(alpha, T, tau)
        out["hopf_omega"] = om
        out["hopf_gamma_c"] = -TWO_PI * (1 + (om / (alpha * T))**2) / w.min()
        out["approx_condition_rhs"] = (math.pi * T / (2 * tau))**2
        out["approx_period"] = 4 * tau
    return out
