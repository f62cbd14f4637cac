import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import j0

from lighthouse.errors import ConfigError, PoleError
from lighthouse.field import (RateFieldState, SpatialKernel, brainwave_solve_1d, delayed_convolution,
                              ring_weights, rate_field_simulate, rate_spectrum, rate_steady_state,
                              w2d_fourier, w_eval, w_fourier, w_half_fourier)
from lighthouse.kernels import Heaviside, Linear, SmoothExp

TWO_PI = 2 * math.pi
kernels = st.builds(SpatialKernel, st.floats(0.2, 3), st.floats(1.2, 4), st.floats(-2, 2))


@given(kernels)
def test_kernel_integral_is_gamma(w):
    val = 2 * quad(lambda x: w_eval(x, w), 0, np.inf, epsabs=1e-13)[0]
    assert abs(val - w.Gamma) < 1e-10
    assert abs(w_fourier(0.0, w) - w.Gamma) < 1e-14


@given(kernels, st.floats(-5, 5))
def test_half_transforms_split_the_full_one(w, k):
    assert abs(w_half_fourier(k, w) + w_half_fourier(-k, w) - w_fourier(k, w)) < 1e-13


def test_transform_duality(rng):
    w = SpatialKernel(1.0, 2.0, 0.3)
    for k in rng.uniform(0, 4, 10):
        num = 2 * quad(lambda x: w_eval(x, w), 0, np.inf, weight="cos", wvar=k, epsabs=1e-13)[0]
        assert abs(num - w_fourier(k, w).real) < 1e-8


def test_wizard_hat_peak():
    w = SpatialKernel(1.0, 2.0, 0.0)
    assert abs(w.k_max() - 1 / math.sqrt(2)) < 1e-12
    assert abs(float(w.w_prime_hat(1 / math.sqrt(2)))) < 1e-15
    with pytest.raises(PoleError):
        w.fourier(1j)


def test_w2d_transform():
    assert abs(w2d_fourier(0.0, 0.0, 2.0) - 1.0) < 1e-14
    E = lambda r, s=2.0: math.exp(-r / s) / (TWO_PI * s * s)
    vals = []
    for k in (0.3, 1.0, 2.0):
        hankel = TWO_PI * quad(lambda r: E(r) * j0(k * r) * r, 0, np.inf, limit=400, epsabs=1e-13)[0]
        v = w2d_fourier(k, 0.0, 2.0)
        assert abs(v.imag) < 1e-15 and abs(hankel - v.real) < 1e-8
        vals.append(v.real)
    assert np.all(np.diff(vals) < 0)
    assert abs(w2d_fourier(0.7, 0.4, 2.0) - np.conj(w2d_fourier(0.7, -0.4, 2.0))) < 1e-14


def test_ring_weights_sum():
    w = SpatialKernel(1.0, 2.0, 0.7)
    c = ring_weights(w, 512, 0.05)
    assert abs(c.sum() - 0.7) < 1e-14


def test_steady_states():
    assert 0.0 in rate_steady_state(SmoothExp(1.0, -1.0), SpatialKernel(1.0, 2.0, 0.0)) or \
        rate_steady_state(SmoothExp(1.0, 1.0), SpatialKernel(1.0, 2.0, 0.0)) == [0.0]
    assert rate_steady_state(Heaviside(0.5), SpatialKernel(1.0, 2.0, 2.0)) == [0.0]
    S, w = Linear(0.5, -1.0), SpatialKernel(1.0, 2.0, 3.0)
    (p,) = rate_steady_state(S, w)
    g0 = 3.0 / TWO_PI
    assert abs(p - (1.0 * g0) / (1 - 0.5 * g0)) < 1e-14


def test_rate_spectrum():
    S, w = Linear(TWO_PI * 1.5, 1.0), SpatialKernel(1.0, 2.0, 0.0)
    lam = rate_spectrum(np.array([1 / math.sqrt(2)]), 0.0, S, w, 0.0, 1.0)[0]
    c = 1.5 * float(w.fourier(1 / math.sqrt(2)).real)
    assert np.allclose(sorted(lam.real), sorted([math.sqrt(c) - 1, -math.sqrt(c) - 1]))
    kz, k0 = math.sqrt(0.5), 1.0
    # balanced wizard hat: w_hat(0) = 0 gives the double root -alpha
    lam0 = rate_spectrum(np.array([0.0]), 0.0, S, w, 0.0, 1.0)[0]
    assert np.allclose(lam0, [-1.0, -1.0])
    # continuity in k and delayed branches reduce to the undelayed ones at tau -> 0
    ks = np.linspace(0, 10, 400)
    lk = rate_spectrum(ks, 0.0, S, w, 0.0, 1.0)
    assert np.max(np.abs(np.diff(np.sort_complex(lk), axis=0))) < 0.1
    ld = rate_spectrum(np.array([kz, k0]), 0.0, S, w, 1e-9, 1.0)
    assert np.allclose(ld, rate_spectrum(np.array([kz, k0]), 0.0, S, w, 0.0, 1.0), atol=1e-7)


def test_rate_field_growth_rate():
    S = Linear(TWO_PI * 4.0, 0.0)
    w = SpatialKernel(1.0, 2.0, 0.0)
    L = 8 * math.pi * math.sqrt(2)
    n = 256
    st0 = RateFieldState(np.zeros(n), np.zeros(n), L)
    k = TWO_PI * 4 / (2 * L)       # fourth harmonic
    eps = 1e-8
    st0 = RateFieldState(eps * np.cos(k * st0.x), np.zeros(n), L)
    alpha = 1.0
    lam = rate_spectrum(np.array([k]), 0.0, S, w, 0.0, alpha)[0]
    lmax = lam.real.max()
    t, rows, _ = rate_field_simulate(st0, S, w, alpha, 0.01, 12.0, record_every=100)
    amp = np.abs(np.fft.rfft(rows, axis=1)[:, 4])
    rate = np.polyfit(t[-6:], np.log(amp[-6:]), 1)[0]
    assert abs(rate - lmax) < 0.05 * abs(lmax)
    # homogeneous fixed point stays put
    _, rows, _ = rate_field_simulate(RateFieldState(np.zeros(n), np.zeros(n), L), S, w, alpha, 0.01, 2.0)
    assert np.max(np.abs(rows[-1])) < 1e-8


def _pulse():
    g = lambda x: np.exp(-x ** 2 / (2 * 0.2 ** 2)) / (0.2 * math.sqrt(TWO_PI))
    h = lambda t: np.where(t > 0, t ** 3 * np.exp(-t), 0.0)
    hp = lambda t: np.where(t > 0, (3 * t ** 2 - t ** 3) * np.exp(-t), 0.0)
    return (lambda x, t: g(x) * h(t)), (lambda x, t: g(x) * hp(t))


def test_brainwave_matches_delayed_convolution():
    src, src_t = _pulse()
    x, _, rows = brainwave_solve_1d(src, 2.0, 1.0, 20.0, 2000, 0.01, 10.0, source_t=src_t, record_times=[10.0])
    idx = [int(np.argmin(np.abs(x - v))) for v in (-6, -1, 0, 2.5, 8)]
    ref = delayed_convolution(src, 2.0, 1.0, x[idx], 10.0, L=20.0)
    assert np.max(np.abs(rows[0][idx] - ref) / np.abs(ref)) < 1e-3


def test_brainwave_static_limit_and_zero():
    src = lambda x, t: np.exp(-x ** 2 / 0.5) * (1 - math.exp(-max(t, 0.0)))
    x, _, rows = brainwave_solve_1d(src, 1.0, 4.0, 12.0, 600, 0.005, 40.0, record_times=[40.0])
    ref = delayed_convolution(lambda y, t: np.exp(-y ** 2 / 0.5) + 0 * t, 1.0, 1e12, x[::60], 40.0, L=12.0)
    assert np.max(np.abs(rows[0][::60] - ref)) < 1e-3 * np.max(np.abs(ref))
    _, _, z = brainwave_solve_1d(lambda x, t: 0 * x, 1.0, 1.0, 5.0, 100, 0.01, 1.0, record_times=[1.0])
    assert np.all(z == 0)
    with pytest.raises(ConfigError):
        brainwave_solve_1d(src, 1.0, 10.0, 5.0, 100, 0.1, 1.0)
