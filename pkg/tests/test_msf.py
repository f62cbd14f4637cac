import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from lighthouse.errors import DegenerateCrossing
from lighthouse.msf import (MsfContext, expm_taylor, monodromy, msf_grid, msf_value, multipliers,
                            saltation, static_threshold)
from lighthouse.network import eigen, from_weights
from lighthouse.synchrony import LinearContext, mode_spectra

TWO_PI = 2 * math.pi


def test_saltation():
    ctx = MsfContext.from_params(1.0, 0.0, -1.0, 0.3)
    assert ctx.theta_dot_T == pytest.approx(1.0)
    K = saltation(ctx)
    assert K[1, 0] == pytest.approx(0.09) and K[2, 0] == pytest.approx(-0.09)
    assert abs(np.linalg.det(K) - 1) < 1e-15
    assert np.allclose(saltation(MsfContext(TWO_PI, 1e-9, 1.0)), np.eye(3), atol=1e-17)
    with pytest.raises(DegenerateCrossing):
        saltation(MsfContext(TWO_PI, 1.0, 0.0))


def test_monodromy_unit_multiplier():
    ctx = MsfContext.from_params(1.0, 0.0, -1.0, 0.5)
    ev = np.linalg.eigvals(monodromy(0.0, ctx))
    assert np.min(np.abs(ev - 1)) < 1e-12
    assert msf_value(0.0, ctx, include_neutral=True) == pytest.approx(0.0, abs=1e-12)
    fast = MsfContext.from_params(1.0, 0.0, -1.0, 20.0)
    ev = np.sort(np.abs(np.linalg.eigvals(monodromy(0.0, fast))))
    assert np.allclose(ev, [0, 0, 1], atol=1e-10)


def test_expm_against_taylor():
    ctx = MsfContext(1.0, 1.0, 1.0)
    B = (ctx.A + (1 + 1j) * ctx.DF) * ctx.T
    assert np.max(np.abs(expm(B) - expm_taylor(B))) < 1e-10
    h = 1e-5
    d = (expm(B * (1 + h)) - expm(B * (1 - h))) / (2 * h)
    assert np.max(np.abs(d - B @ expm(B))) < 1e-6


@given(st.floats(-40, 10), st.floats(-30, 30), st.floats(0.05, 3.0))
def test_deflated_multipliers_match_eigenvalues(br, bi, a):
    ctx = MsfContext.from_params(1.0, 0.0, -1.0, a)
    beta = complex(br, bi)
    full = np.linalg.eigvals(monodromy(beta, ctx))
    for z in multipliers(beta, ctx):
        assert np.min(np.abs(full - z)) < 1e-7 * max(1.0, np.abs(full).max())
    assert abs(msf_value(beta, ctx) - msf_value(np.conj(beta), ctx)) < 1e-9


def test_fig5_and_fig4_points():
    ctx = MsfContext.from_params(1.0, 0.0, -1.0, 0.1)
    assert msf_value(-1.0, ctx) < 0
    assert msf_value(20j, ctx) > 0


def test_grid_contour_symmetric_and_static_threshold():
    ctx = MsfContext.from_params(1.0, 0.0, -1.0, 0.1)
    g = msf_grid((-40, 10, -30, 30), (101, 121), ctx)
    pts = np.concatenate(g.contours)
    for z in pts[::25]:
        assert np.min(np.abs(pts - np.conj(z))) < 0.6
    b = static_threshold(ctx, 0.5, 10.0)
    assert b is not None
    m = multipliers(b, ctx)
    assert np.min(np.abs(m - 1)) < 1e-9
    # slow-synapse estimate of the static threshold is beta = 2 pi
    assert abs(b - TWO_PI) < 1.0


def test_multiplier_closed_form():
    # M(beta) reduces to y = exp(-alpha T) / z with thetadot (1-y)^2 = beta alpha^2 T y
    ctx = MsfContext.from_params(1.0, 0.0, -1.0, 0.7)
    beta = 2.5
    a, T = ctx.alpha, ctx.T
    c = beta * a * a * T / ctx.theta_dot_T
    ys = np.roots([1.0, -(2 + c), 1.0])
    zs = np.sort(np.abs(math.exp(-a * T) / ys))
    assert np.allclose(np.sort(np.abs(multipliers(beta, ctx))), zs, rtol=1e-9)


@given(st.integers(3, 8), st.integers(0, 10**6), st.floats(0.2, 2.0))
def test_msf_and_spectrum_agree(N, seed, alpha):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(N, N))
    w -= w.mean(axis=1, keepdims=True)
    net = from_weights(w)
    lin = LinearContext(1.0, 0.0, -1.0, alpha)
    ctx = MsfContext.from_linear(lin)
    ev = eigen(net).eigenvalues
    others = ev[np.abs(ev) > 1e-9]
    m = max(msf_value(lin.gamma * z, ctx) for z in others) * ctx.T
    lam = mode_spectra(lin, others, region=(-40, 6, -3.6, 3.6), resolution=(200, 60)).max_real()
    if abs(m) > 0.02 and abs(lam) > 0.02 and math.isfinite(lam):
        assert (m > 0) == (lam > 0)
        assert abs(m - lam) < 1e-6
