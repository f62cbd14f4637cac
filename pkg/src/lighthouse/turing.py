"""Pattern-forming instabilities of the synchronous state of a continuum network.

The synchronous state fires everywhere at ``t = m T`` with drive

    psi(t) = 2 int_0^inf w(y) P(t - y/v) dy,

and perturbations ``exp(i k x + lambda m)`` have eigenvalues given by the
``rho = 0`` case of the travelling-wave characteristic function.  For a
linear ``S`` the lattice ``lambda in 2 pi i Z`` solves it for every ``k``;
those roots are factored out and the reduced function

    E~(lambda, k) = thetadot(T) - gamma (1/T) sum_n eta_hat(z_n) B_n(lambda, k)

is used for thresholds.  With ``v = inf`` it is ``thetadot - gamma w_hat(k) G(lambda)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, Infeasible, NoRoot, NoSolution, NotCritical
from .field import SpatialKernel, w2d_fourier
from .kernels import Linear, Nonlinearity, SynapseKernel
from .rootfind import find_zeros, newton_complex
from .synchrony import TWO_PI, PeriodicDrive, period_linear, script_g
from .waves import WaveContext, graded_panels, wave_E, wave_E_reduced, wave_eigenvalue_a

__all__ = [
    "TuringContext", "BifurcationPoint", "synchronous_field_drive", "synchronous_field_period",
    "spectrum_E", "static_function", "linear_exponents", "exponents_at", "static_turing",
    "find_bifurcation", "critical_curve", "slow_limit_spectrum", "slow_limit_conditions",
    "spectrum_2d", "period_2d", "dominant_mode", "growth_ratio",
]


# --- synchronous state (real-space route) -----------------------------------------------

def synchronous_field_drive(t, T: float, kernel: SynapseKernel, w: SpatialKernel, v: float = math.inf,
                            order: int = 40):
    """``psi(t) = 2 int_0^inf w(y) P(t - y/v) dy`` by quadrature in real space.

    In the delay variable ``u = y/v`` the integrand is smooth between the
    arrival times ``u = phi + m T`` (``phi = t mod T``); each piece gets its
    own Gauss-Legendre rule.
    """
    P = PeriodicDrive(T, 0.0, kernel)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if math.isinf(v):
        return w.Gamma * P.value(t)
    x, wt = np.polynomial.legendre.leggauss(order)
    s01 = (x + 1) / 2
    reach = 40.0 * max(s for _, s in w.components) / v
    h = 2.0 * min(s for _, s in w.components) / v

    def piece(lo, hi, Pfun):
        # int_lo^hi w(v u) Pfun(u - lo) du per row, on panels of length <= h
        hi = np.minimum(hi, np.maximum(lo, reach))
        n = max(1, int(np.ceil(np.max(hi - lo) / h)))
        total = np.zeros_like(lo)
        for j in range(n):
            a_ = lo + (hi - lo) * j / n
            L = (hi - lo) / n
            u = a_[:, None] + L[:, None] * s01[None, :]
            total += L / 2 * ((w.value(v * u) * Pfun(u - lo[:, None])) @ wt)
        return total

    phi = np.mod(t, T)
    # first piece: u in [0, phi] sees P(phi - u); later pieces start at phi + m T and see P(T - s)
    out = piece(np.zeros_like(phi), phi, lambda s: P.value(phi[:, None] - s))
    m = 0
    while (phi + m * T).min() <= reach:
        start = phi + m * T
        out = out + piece(start, start + T, lambda s: P.value(T - s))
        m += 1
    return 2.0 * v * out


def synchronous_field_period(S: Nonlinearity, kernel: SynapseKernel, w: SpatialKernel, v: float = math.inf,
                             T_min: Optional[float] = None, T_max: float = 500.0, n_scan: int = 120) -> float:
    """Smallest ``T`` with ``int_0^T S(psi(t)) dt = 2 pi``; ``psi`` from real-space quadrature."""
    if isinstance(S, Linear):
        # int_0^T psi = w_hat(0) int P = Gamma
        return period_linear(S.gamma, w.Gamma, S.theta)

    def F(T):
        t, wt = graded_panels(T, kernel.alpha, 16)
        return TWO_PI - float(np.dot(wt, S.value(synchronous_field_drive(t, T, kernel, w, v))))

    if T_min is None:
        T_min = TWO_PI / S.sup * (1 + 1e-9) if math.isfinite(S.sup) else 1e-2
    grid = np.geomspace(T_min, T_max, n_scan)
    prev = F(grid[0])
    for a, b in zip(grid[:-1], grid[1:]):
        cur = F(b)
        if np.sign(prev) != np.sign(cur):
            return brentq(F, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps)
        prev = cur
    raise NoRoot("no synchronous period found")


# --- context ---------------------------------------------------------------------------

@dataclass
class TuringContext:
    """Synchronous state of a 1D continuum network and its stability data."""

    S: Nonlinearity
    w: SpatialKernel
    kernel: SynapseKernel
    v: float = math.inf
    T: Optional[float] = None
    M: int = 1024
    _wave: Optional[WaveContext] = field(default=None, repr=False)

    def __post_init__(self):
        if self.T is None:
            self.T = synchronous_field_period(self.S, self.kernel, self.w, self.v)

    @classmethod
    def linear(cls, gamma: float, Theta: float, alpha: float, A: float = 1.0, sigma: float = 2.0,
               Gamma: float = 0.0, v: float = math.inf, **kw) -> "TuringContext":
        return cls(Linear(gamma, Theta), SpatialKernel(A, sigma, Gamma), SynapseKernel(alpha), v, **kw)

    def with_param(self, name: str, value: float) -> "TuringContext":
        """Copy with one parameter changed; the period is re-solved."""
        S, w, kernel, v = self.S, self.w, self.kernel, self.v
        if name == "gamma":
            S = Linear(value, S.theta)
        elif name == "Theta":
            S = Linear(S.gamma, value)
        elif name in ("r", "h"):
            S = replace(S, **{name: value})
        elif name == "alpha":
            kernel = SynapseKernel(value)
        elif name in ("A", "sigma", "Gamma"):
            w = replace(w, **{name: value})
        elif name == "v":
            v = value
        else:
            raise ConfigError(f"unknown parameter {name!r}")
        return TuringContext(S, w, kernel, v, None, self.M)

    def param(self, name: str) -> float:
        for obj in (self.S, self.w, self.kernel):
            if name == "Theta" and isinstance(obj, Linear):
                return obj.theta
            if hasattr(obj, name):
                return getattr(obj, name)
        if name == "v":
            return self.v
        raise ConfigError(f"unknown parameter {name!r}")

    @property
    def wave(self) -> WaveContext:
        if self._wave is None:
            self._wave = WaveContext(self.S, self.kernel, self.w, self.v, self.T, 0.0, self.M)
        return self._wave

    @property
    def theta_dot_T(self) -> float:
        return self.wave.theta_dot_T

    def psi(self, t):
        return self.wave.psi(t)


def spectrum_E(lam, k: float, ctx: TuringContext, reduced: bool = False):
    """``E(lambda, k)``; ``reduced`` divides out ``e^lambda - 1`` (linear ``S`` only)."""
    if reduced:
        return wave_E_reduced(lam, k, ctx.wave, 0.0)
    return wave_E(lam, k, ctx.wave, 0.0)


def static_function(k, ctx: TuringContext) -> float:
    """Real function whose zero in ``k`` marks a real eigenvalue crossing ``lambda = 0``."""
    if isinstance(ctx.S, Linear):
        return float(np.real(spectrum_E(0.0, k, ctx, reduced=True)))
    return float(-np.real(wave_eigenvalue_a(0.0, k, ctx.wave, 0.0) - wave_eigenvalue_a(0.0, 0.0, ctx.wave, 0.0)))


def linear_exponents(beta, theta_dot: float, alpha: float, T: float) -> np.ndarray:
    """Exponents solving ``thetadot = beta G(lambda)`` for ``tau = 0``, ``Im`` in ``(-pi, pi]``.

    With ``x = exp(-(alpha T + lambda))`` the equation is the quadratic
    ``thetadot (1 - x)^2 = beta alpha^2 T x``; the multipliers are
    ``exp(-alpha T) / x``.
    """
    beta = np.asarray(beta, dtype=complex)
    b = 2 * theta_dot + beta * alpha**2 * T
    disc = np.sqrt(b * b - 4 * theta_dot**2 + 0j)
    # take the larger root directly; the roots multiply to one
    x1 = np.where(np.abs(b + disc) >= np.abs(b - disc), b + disc, b - disc) / (2 * theta_dot)
    x = np.stack([x1, 1.0 / x1], axis=-1)
    return -alpha * T - np.log(x)


def exponents_at(k: float, ctx: TuringContext, region=(-4.0, 1.0, -math.pi, math.pi), resolution=(60, 60),
                 tol: float = 1e-9) -> np.ndarray:
    """Eigenvalues at wavenumber ``k`` (lattice and translation roots excluded)."""
    if isinstance(ctx.S, Linear) and math.isinf(ctx.v):
        return linear_exponents(ctx.S.gamma * ctx.w.fourier(k), ctx.theta_dot_T, ctx.kernel.alpha, ctx.T)
    if isinstance(ctx.S, Linear):
        f = lambda z: spectrum_E(z, k, ctx, reduced=True)
    else:
        f = lambda z: spectrum_E(z, k, ctx)
    roots, _ = find_zeros(f, region, resolution, tol=tol)
    if not isinstance(ctx.S, Linear) and k == 0:
        roots = roots[np.abs(roots) > 1e-6]
    return roots


# --- bifurcations ----------------------------------------------------------------------

@dataclass(frozen=True)
class BifurcationPoint:
    kind: str
    param: str
    value: float
    k_c: float
    omega_c: float
    T: float

    def row(self):
        return (self.kind, self.param, self.value, self.k_c, self.omega_c, self.T)


def static_turing(ctx: TuringContext) -> BifurcationPoint:
    """``gamma_c = -Theta / (w_hat(k_c) P(T))`` with ``k_c = 1/sqrt(sigma)``.

    Needs linear ``S`` with ``Theta < 0``, a balanced kernel and instantaneous
    propagation; ``w_hat`` then peaks at ``k_c`` for any amplitude ``A > 0``.
    """
    S, w = ctx.S, ctx.w
    if not isinstance(S, Linear) or w.Gamma != 0 or not math.isinf(ctx.v) or w.dimension != 1:
        raise Infeasible("closed form needs linear S, Gamma = 0, v = inf in 1D")
    if S.theta >= 0:
        raise Infeasible("no oscillation for Theta >= 0")
    k_c = 1.0 / math.sqrt(w.sigma)
    wk = float(np.real(w.fourier(k_c)))
    if wk <= 0:
        raise Infeasible("w_hat(k_c) <= 0")
    T = -TWO_PI / S.theta
    P_T = float(PeriodicDrive(T, 0.0, ctx.kernel).value(T))
    return BifurcationPoint("static", "gamma", -S.theta / (wk * P_T), k_c, 0.0, T)


def _newton_n(F, x0, tol=1e-11, maxiter=60):
    x = np.array(x0, dtype=float)
    fx = F(x)
    n = x.size
    for _ in range(maxiter):
        if np.max(np.abs(fx)) < tol:
            break
        J = np.empty((n, n))
        for j in range(n):
            h = 1e-6 * max(1.0, abs(x[j]))
            e = np.zeros(n)
            e[j] = h
            J[:, j] = (F(x + e) - F(x - e)) / (2 * h)
        try:
            dx = np.linalg.solve(J, fx)
        except np.linalg.LinAlgError:
            break
        step = 1.0
        for _ in range(25):
            try:
                fn = F(x - step * dx)
            except (Infeasible, ConfigError, NoRoot, ValueError):
                fn = np.full(n, np.inf)
            if np.all(np.isfinite(fn)) and np.max(np.abs(fn)) < np.max(np.abs(fx)):
                break
            step /= 2
        else:
            break
        x, fx = x - step * dx, fn
    return x, fx


def _E_fn(ctx):
    if isinstance(ctx.S, Linear):
        return lambda lam, k: complex(spectrum_E(lam, k, ctx, reduced=True))
    return lambda lam, k: complex(spectrum_E(lam, k, ctx))


def find_bifurcation(kind: str, param: str, ctx: TuringContext, seed=None, check: bool = True,
                     tol: float = 1e-9) -> BifurcationPoint:
    """Critical point of kind ``"static"``, ``"hopf"`` or ``"turing_hopf"``.

    ``seed`` is ``(k, a)``, ``(omega, a)`` or ``(omega, k, a)`` respectively.
    The result is checked against the rest of the spectrum (``NotCritical``
    when another mode is already unstable).
    """
    a0 = ctx.param(param)
    if kind == "static":
        seed = seed or (ctx.w.k_max() if ctx.w.Gamma == 0 else 0.5, a0)

        def F(x):
            k, a = x
            c = ctx.with_param(param, a)
            h = 1e-5
            return np.array([static_function(k, c),
                             (static_function(k + h, c) - static_function(k - h, c)) / (2 * h)])
    elif kind == "hopf":
        seed = seed or (math.pi, a0)

        def F(x):
            om, a = x
            e = _E_fn(ctx.with_param(param, a))(1j * om, 0.0)
            return np.array([e.real, e.imag])
    elif kind == "turing_hopf":
        if seed is None:
            raise ConfigError("turing_hopf needs a seed (omega, k, a)")

        def F(x):
            om, k, a = x
            E = _E_fn(ctx.with_param(param, a))
            e = E(1j * om, k)
            h = 1e-5
            dk = (E(1j * om, k + h) - E(1j * om, k - h)) / (2 * h)
            dl = (E(1j * om + h, k) - E(1j * om - h, k)) / (2 * h)
            return np.array([e.real, e.imag, (dk * np.conj(dl)).real])
    else:
        raise ConfigError(f"unknown bifurcation kind {kind!r}")
    x, fx = _newton_n(F, seed)
    if not np.all(np.isfinite(fx)) or np.max(np.abs(fx)) > tol:
        raise NoSolution(f"{kind} bifurcation did not converge (residual {np.max(np.abs(fx)):.2e})")
    if kind == "static":
        k_c, om_c, a_c = abs(x[0]), 0.0, x[1]
    elif kind == "hopf":
        k_c, om_c, a_c = 0.0, abs(x[0]), x[1]
    else:
        k_c, om_c, a_c = abs(x[1]), abs(x[0]), x[2]
    crit = ctx.with_param(param, a_c)
    if check:
        _check_critical(crit, k_c, om_c)
    return BifurcationPoint(kind, param, float(a_c), float(k_c), float(om_c), float(crit.T))


def _check_critical(ctx: TuringContext, k_c: float, om_c: float, n_k: int = 48, margin: float = 1e-6):
    kmax = max(5.0 * max(k_c, ctx.w.k_max() if ctx.w.Gamma == 0 else 1.0), 1.0)
    ks = np.linspace(0.0, kmax, n_k if not (isinstance(ctx.S, Linear) and math.isinf(ctx.v)) else 512)
    for k in ks:
        lam = exponents_at(k, ctx)
        lam = lam[np.abs(lam) > 1e-7] if k == 0 else lam
        if lam.size and lam.real.max() > margin and abs(k - k_c) > 0.1 * max(k_c, 0.1):
            raise NotCritical(f"mode k={k:.3g} already unstable (Re lambda = {lam.real.max():.3g})")


def critical_curve(alphas, ctx: TuringContext) -> list:
    """Rows ``(alpha, gamma_c)`` of the static threshold."""
    rows = []
    for a in alphas:
        rows.append((float(a), static_turing(ctx.with_param("alpha", a)).value))
    return rows


# --- slow-synapse limit ----------------------------------------------------------------

def _slow_bracket(lam, k, ctx, T):
    inv_v = 0.0 if math.isinf(ctx.v) else 1.0 / ctx.v
    z = -1j * np.asarray(lam, dtype=complex) * inv_v / T
    return ctx.w.half_fourier(z - k) + ctx.w.half_fourier(z + k)


def _slow_period(ctx: TuringContext) -> float:
    """``2 pi / T = S(Gamma / T)``."""
    if isinstance(ctx.S, Linear):
        return period_linear(ctx.S.gamma, ctx.w.Gamma, ctx.S.theta)
    f = lambda T: T * float(ctx.S.value(ctx.w.Gamma / T)) - TWO_PI
    grid = np.geomspace(1e-2, 1e4, 400)
    vals = [f(T) for T in grid]
    for i in range(len(grid) - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]):
            return brentq(f, grid[i], grid[i + 1], xtol=1e-13)
    raise NoRoot("no slow-limit period")


def slow_limit_spectrum(k: float, ctx: TuringContext) -> np.ndarray:
    """Both roots of ``(1 + lambda/(alpha T))^2 = (S'/2 pi) B(lambda, k)`` (exponents per cycle)."""
    T = _slow_period(ctx)
    aT = ctx.kernel.alpha * T
    c = float(ctx.S.prime(ctx.w.Gamma / T)) / TWO_PI
    r = np.sqrt(c * complex(ctx.w.fourier(k)) + 0j)
    seeds = [aT * (r - 1), aT * (-r - 1)]
    if math.isinf(ctx.v):
        return np.array(seeds, dtype=complex)
    out = []
    for z in seeds:
        for s in np.linspace(0.0, 1.0, 21)[1:]:
            cs = replace(ctx, v=ctx.v / s, T=ctx.T)
            f = lambda lam, cs=cs: (1 + lam / aT) ** 2 - c * complex(_slow_bracket(lam, k, cs, T))
            z, _ = newton_complex(f, z, tol=1e-13)
        out.append(z)
    return np.array(out, dtype=complex)


def slow_limit_conditions(ctx: TuringContext, param_name: str = "gamma") -> dict:
    """Instability thresholds of the slow-synapse reduction.

    ``static``: ``S' w_hat(k)/(2 pi) = 1`` at the maximiser of the bracket at
    ``lambda = 0``.  ``hopf``: ``1/eta_hat(omega/T) = (S'/2 pi) B(i omega, 0)``
    with ``B`` real.  For linear ``S`` the critical ``gamma`` is reported.
    """
    T = _slow_period(ctx)
    ks = np.linspace(0.0, 10.0, 20001)
    B0 = np.real(_slow_bracket(0.0, ks, ctx, T))
    i = int(np.argmax(B0))
    k_c = ks[i]
    if 0 < i < ks.size - 1:
        g = lambda k: float(np.real(_slow_bracket(0.0, k + 1e-6, ctx, T) - _slow_bracket(0.0, k - 1e-6, ctx, T)))
        k_c = brentq(g, ks[i - 1], ks[i + 1], xtol=1e-14)
    Bmax = float(np.real(_slow_bracket(0.0, k_c, ctx, T)))
    sp = float(ctx.S.prime(ctx.w.Gamma / T))
    out = {"T": T, "k_c": k_c, "static_value": sp * Bmax / TWO_PI,
           "static_gamma_c": TWO_PI / Bmax if Bmax > 0 else math.inf}
    if not math.isinf(ctx.v):
        aT = ctx.kernel.alpha * T

        def F(x):
            om, g = x
            e = (1 + 1j * om / aT) ** 2 - g / TWO_PI * complex(_slow_bracket(1j * om, 0.0, ctx, T))
            return np.array([e.real, e.imag])

        best = None
        for om0 in np.linspace(0.2, 20.0, 25):
            for g0 in (-50.0, -10.0, 10.0, 50.0):
                x, fx = _newton_n(F, (om0, g0), tol=1e-12)
                if np.max(np.abs(fx)) < 1e-10 and x[0] > 1e-6 and (best is None or abs(x[1]) < abs(best[1])):
                    best = x
        if best is not None:
            out["hopf_omega"], out["hopf_gamma_c"] = float(best[0]), float(best[1])
    return out


# --- two dimensions --------------------------------------------------------------------

def period_2d(S: Linear, w: SpatialKernel) -> float:
    """Synchronous period for a linear ``S``: the drive integrates to ``w_hat(0) = Gamma``."""
    return period_linear(S.gamma, w.Gamma, S.theta)


def spectrum_2d(lam, k: float, S: Linear, w: SpatialKernel, kernel: SynapseKernel, v: float = math.inf,
                M: int = 1024):
    """Reduced characteristic function of the synchronous state in the plane.

    ``thetadot - gamma (1/T) sum_n eta_hat(z_n) E2(k, z_n / v)`` with the
    radial transform ``E2`` of ``w(r) exp(-i a r)``.
    """
    if not isinstance(S, Linear):
        raise ConfigError("the planar spectrum is implemented for linear S")
    if w.dimension != 2:
        w = replace(w, dimension=2)
    T = period_2d(S, w)
    lam = np.asarray(lam, dtype=complex)
    theta_dot = S.gamma * w.Gamma * float(PeriodicDrive(T, 0.0, kernel).value(T)) - S.theta
    if math.isinf(v):
        return theta_dot - S.gamma * complex(w2d_fourier(k, 0.0, w)) * script_g(lam, T, 0.0, kernel)
    n = np.arange(-M, M + 1)
    z = TWO_PI * n[None, :] / T - 1j * lam.reshape(-1, 1) / T
    s = (kernel.fourier(z) * w2d_fourier(k, z / v, w)).sum(axis=1) / T
    out = theta_dot - S.gamma * s
    return out.reshape(lam.shape) if lam.ndim else complex(out[0])


# --- diagnostics for simulations -------------------------------------------------------

def dominant_mode(values, L: float):
    """``(k, amplitude)`` of the largest nonzero spatial Fourier mode on ``[-L, L)``."""
    f = np.asarray(values, dtype=float)
    f = f - f.mean()
    c = np.fft.rfft(f)
    j = int(np.argmax(np.abs(c[1:]))) + 1
    return math.pi * j / L, 2 * abs(c[j]) / f.size


def growth_ratio(theta_start, theta_end) -> float:
    """RMS of the spatial deviation at the end over the start."""
    a = np.asarray(theta_start, dtype=float)
    b = np.asarray(theta_end, dtype=float)
    return float(np.std(b) / np.std(a))
