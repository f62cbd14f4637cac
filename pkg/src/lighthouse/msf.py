"""Master stability function of synchrony for zero-delay row-sum networks.

Per node the state is ``x = (theta, s, u)`` with ``dx/dt = A x + b`` between
firing events and the jump ``u -> u + alpha`` at firing.  A perturbation in
the direction of a coupling eigenvalue ``beta = gamma * w_mu`` is propagated
over one period by ``M(beta) = K(T) exp[(A + beta DF) T]``, where ``K`` is the
saltation matrix correcting for the shift of the firing time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateCrossing
from .synchrony import LinearContext

__all__ = [
    "MsfContext", "MsfGrid", "saltation", "monodromy", "msf_value", "msf_grid",
    "multipliers", "expm_taylor",
]


@dataclass(frozen=True)
class MsfContext:
    T: float
    alpha: float
    theta_dot_T: float

    @classmethod
    def from_linear(cls, ctx: LinearContext) -> "MsfContext":
        if ctx.tau != 0:
            raise ValueError("the MSF is defined for zero delay only")
        return cls(ctx.T, ctx.alpha, ctx.theta_dot_T)

    @classmethod
    def from_params(cls, gamma: float, Gamma: float, Theta: float, alpha: float) -> "MsfContext":
        return cls.from_linear(LinearContext(gamma, Gamma, Theta, alpha))

    @property
    def A(self) -> np.ndarray:
        a = self.alpha
        return np.array([[0.0, 0.0, 0.0], [0.0, -a, a], [0.0, 0.0, -a]])

    @property
    def DF(self) -> np.ndarray:
        d = np.zeros((3, 3))
        d[0, 1] = 1.0
        return d


@dataclass
class MsfGrid:
    re: np.ndarray
    im: np.ndarray
    values: np.ndarray          # shape (len(re), len(im))
    contours: list              # polylines of complex beta on MSF = 0

    def rows(self):
        for i, x in enumerate(self.re):
            for j, y in enumerate(self.im):
                yield x, y, self.values[i, j]


def saltation(ctx: MsfContext) -> np.ndarray:
    """``K(T)``: identity with ``K[1,0] = alpha^2/thetadot``, ``K[2,0] = -alpha^2/thetadot``.

    The firing surface is ``theta = 2 pi`` with normal ``(1, 0, 0)``; the vector
    field jumps as
    ``(sdot, udot) -> (sdot + alpha^2, udot - alpha^2)``,
    ``K = I + (f^+ - f^-) e_0^T / thetadot``.
    """
    if abs(ctx.theta_dot_T) < 1e-12:
        raise DegenerateCrossing("grazing firing: thetadot(T) ~ 0")
    a2 = ctx.alpha**2
    jump = np.array([0.0, a2, -a2])
    return np.eye(3) + np.outer(jump, [1.0, 0.0, 0.0]) / ctx.theta_dot_T


def _flow(beta, ctx: MsfContext) -> np.ndarray:
    beta = np.asarray(beta, dtype=complex)
    B = np.broadcast_to(ctx.A.astype(complex), beta.shape + (3, 3)).copy()
    B[..., 0, 1] += beta
    return expm(B * ctx.T)


def monodromy(beta, ctx: MsfContext) -> np.ndarray:
    """``M(beta) = K(T) expm[(A + beta DF) T]``; ``beta`` may be an array."""
    return saltation(ctx) @ _flow(beta, ctx)


def expm_taylor(B: np.ndarray, terms: int = 200) -> np.ndarray:
    """Dense Taylor series of the exponential with scaling and squaring."""
    B = np.asarray(B, dtype=complex)
    nrm = np.linalg.norm(B, 1)
    sq = max(0, int(math.ceil(math.log2(nrm))) + 1) if nrm > 0.5 else 0
    X = B / 2**sq
    out = np.eye(B.shape[0], dtype=complex)
    term = out.copy()
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(sq):
        out = out @ out
    return out


def multipliers(beta, ctx: MsfContext, include_neutral: bool = False) -> np.ndarray:
    """Floquet multipliers of ``M(beta)``.

    ``M - I`` is singular for every ``beta``: the unit multiplier is the shift
    of the firing phase along the orbit.  Unless ``include_neutral`` it is
    removed by deflating the characteristic polynomial
    ``(z - 1)(z^2 - (tr M - 1) z + det M)``, with ``det M = exp(-2 alpha T)``.
    """
    M = monodromy(beta, ctx)
    if include_neutral:
        return np.linalg.eigvals(M)
    tr = np.trace(M, axis1=-2, axis2=-1)
    det = math.exp(-2.0 * ctx.alpha * ctx.T)
    p = tr - 1.0
    disc = np.sqrt(p * p - 4.0 * det + 0j)
    return np.stack([(p + disc) / 2, (p - disc) / 2], axis=-1)


def msf_value(beta, ctx: MsfContext, include_neutral: bool = False):
    """``(1/T) ln |m(beta)|`` with ``m`` the multiplier of largest modulus."""
    z = multipliers(beta, ctx, include_neutral)
    with np.errstate(divide="ignore"):
        v = np.log(np.max(np.abs(z), axis=-1)) / ctx.T
    return float(v) if np.ndim(beta) == 0 else v


def msf_grid(region, resolution, ctx: MsfContext, include_neutral: bool = False) -> MsfGrid:
    """MSF sampled on a rectangle of complex ``beta`` with its zero contours."""
    from skimage.measure import find_contours

    re_min, re_max, im_min, im_max = region
    nr, ni = resolution
    re = np.linspace(re_min, re_max, nr)
    im = np.linspace(im_min, im_max, ni)
    beta = re[:, None] + 1j * im[None, :]
    vals = msf_value(beta, ctx, include_neutral)
    contours = []
    for c in find_contours(vals, 0.0):
        contours.append(np.interp(c[:, 0], np.arange(nr), re)
                        + 1j * np.interp(c[:, 1], np.arange(ni), im))
    return MsfGrid(re, im, vals, contours)


def static_threshold(ctx: MsfContext, lo: float, hi: float) -> Optional[float]:
    """Real ``beta`` at which a multiplier passes through 1 (bisection on MSF)."""
    from scipy.optimize import brentq

    f = lambda b: msf_value(b, ctx)
    if np.sign(f(lo)) == np.sign(f(hi)):
        return None
    return brentq(f, lo, hi, xtol=1e-13)
