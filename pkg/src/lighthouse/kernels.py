"""Synaptic response kernel and firing nonlinearities.

The synapse is the alpha function ``eta(t) = alpha**2 t exp(-alpha t) H(t)``,
the Green's function of ``Q = (1 + alpha^-1 d/dt)**2``.  Three firing
nonlinearities are supported:

* :class:`SmoothExp` -- ``exp(-r/(x-h)**2) H(x-h)``, a C-infinity switch,
* :class:`Linear` -- the affine mid-range approximation ``gamma x - Theta``,
* :class:`Heaviside` -- the ``r -> 0`` limit ``H(x-h)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, DistributionalDerivative, PoleError

__all__ = [
    "SynapseKernel", "SmoothExp", "Linear", "Heaviside", "Nonlinearity",
    "eta_eval", "eta_fourier", "s_eval", "s_prime", "s_second", "linearize",
]


@dataclass(frozen=True)
class SynapseKernel:
    """Alpha-function synapse with rate ``alpha`` (inverse time)."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ConfigError(f"alpha must be positive and finite, got {self.alpha!r}")

    def eta(self, t):
        t = np.asarray(t, dtype=float)
        a = self.alpha
        tp = np.where(t > 0, t, 0.0)
        return a * a * tp * np.exp(-a * tp)

    def eta_prime(self, t):
        """Right derivative of eta; ``alpha**2`` at ``t = 0``."""
        t = np.asarray(t, dtype=float)
        a = self.alpha
        tp = np.where(t >= 0, t, 0.0)
        return np.where(t >= 0, a * a * (1.0 - a * tp) * np.exp(-a * tp), 0.0)

    def fourier(self, omega):
        """``eta_hat(omega) = (1 + i omega/alpha)**-2``, for complex omega."""
        z = 1.0 + 1j * np.asarray(omega, dtype=complex) / self.alpha
        if np.any(np.abs(z) < 1e-14):
            raise PoleError("eta_hat evaluated at its pole omega = i*alpha")
        return 1.0 / (z * z)


def eta_eval(t, kernel: SynapseKernel):
    return kernel.eta(t)


def eta_fourier(omega, kernel: SynapseKernel):
    return kernel.fourier(omega)


@dataclass(frozen=True)
class SmoothExp:
    r: float
    h: float

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError(f"SmoothExp needs r > 0, got {self.r!r}")

    sup = 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.h
        pos = d > 0
        dd = np.where(pos, d, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(pos, np.exp(-self.r / (dd * dd)), 0.0)

    def prime(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.h
        pos = d > 0
        dd = np.where(pos, d, 1.0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.exp(-self.r / (dd * dd)) * 2.0 * self.r / dd**3
        return np.where(pos & np.isfinite(val), val, 0.0)

    def second(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.h
        pos = d > 0
        dd = np.where(pos, d, 1.0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            g = 2.0 * self.r / dd**3
            val = np.exp(-self.r / (dd * dd)) * (g * g - 6.0 * self.r / dd**4)
        return np.where(pos & np.isfinite(val), val, 0.0)


@dataclass(frozen=True)
class Linear:
    """``S(x) = gamma * x - theta`` (``theta`` is the offset Theta)."""

    gamma: float
    theta: float

    sup = math.inf

    def value(self, x):
        return self.gamma * np.asarray(x, dtype=float) - self.theta

    def prime(self, x):
        return np.full(np.shape(x), float(self.gamma))

    def second(self, x):
        return np.zeros(np.shape(x))


@dataclass(frozen=True)
class Heaviside:
    h: float

    sup = 1.0

    def value(self, x):
        # strict inequality: S(h) = 0
        return (np.asarray(x, dtype=float) > self.h).astype(float)

    def prime(self, x):
        raise DistributionalDerivative("S' of a Heaviside is a delta; handle it analytically")

    def second(self, x):
        raise DistributionalDerivative("S'' of a Heaviside is distributional")


Nonlinearity = Union[SmoothExp, Linear, Heaviside]


def _scalar(v, x):
    return float(v) if np.ndim(x) == 0 else v


def s_eval(x, S: Nonlinearity):
    return _scalar(S.value(x), x)


def s_prime(x, S: Nonlinearity):
    return _scalar(S.prime(x), x)


def s_second(x, S: Nonlinearity):
    return _scalar(S.second(x), x)


def half_activation(S: SmoothExp) -> float:
    """Solve ``S(x) = 1/2`` by bracketed root finding."""
    f = lambda x: float(S.value(x)) - 0.5
    lo = S.h + 1e-3 * math.sqrt(S.r)
    hi = S.h + 1.0
    while f(hi) < 0:
        hi = S.h + 2.0 * (hi - S.h)
    return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def linearize(S: SmoothExp) -> Linear:
    """Tangent line of ``S`` at its half-activation point ``S(x_half) = 1/2``."""
    x_half = half_activation(S)
    gamma = float(S.prime(x_half))
    return Linear(gamma=gamma, theta=gamma * x_half - 0.5)
