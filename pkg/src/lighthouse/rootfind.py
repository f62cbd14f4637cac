"""Zeros of analytic functions on a rectangle of the complex plane.

The scan follows the level-set picture: a cell whose corners see sign
changes in both ``Re f`` and ``Im f`` is crossed by both zero contours and
is polished with complex Newton iterations.  Poles also produce such cells;
they are rejected because Newton cannot drive ``|f|`` to the tolerance.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

Region = Sequence[float]  # (re_min, re_max, im_min, im_max)


def newton_complex(f, z0, tol=1e-10, maxiter=60, h=1e-7):
    """Newton with a central-difference derivative; returns (z, |f(z)|)."""
    z = complex(z0)
    fz = complex(f(z))
    for _ in range(maxiter):
        if abs(fz) < tol:
            break
        step = h * max(1.0, abs(z))
        d = (complex(f(z + step)) - complex(f(z - step))) / (2 * step)
        if d == 0 or not np.isfinite(d):
            break
        dz = fz / d
        # damped step keeps iterates away from neighbouring poles
        lam = 1.0
        for _ in range(30):
            zn = z - lam * dz
            fn = complex(f(zn))
            if np.isfinite(fn) and abs(fn) < abs(fz):
                break
            lam *= 0.5
        else:
            break
        z, fz = zn, fn
    return z, abs(fz)


def level_set_cells(values: np.ndarray) -> np.ndarray:
    """Indices (i, j) of grid cells crossed by both zero contours."""
    re = np.sign(values.real)
    im = np.sign(values.imag)

    def changes(s):
        c = np.stack([s[:-1, :-1], s[1:, :-1], s[:-1, 1:], s[1:, 1:]])
        return (c.max(axis=0) > 0) & (c.min(axis=0) < 0)

    both = changes(re) & changes(im)
    finite = np.isfinite(values)
    fin = finite[:-1, :-1] & finite[1:, :-1] & finite[:-1, 1:] & finite[1:, 1:]
    return np.argwhere(both & fin)


def find_zeros(f: Callable, region: Region, resolution=(400, 400), tol=1e-10,
               dedup=1e-6, vectorized=True, extra_seeds=()):
    """All zeros of ``f`` found in ``region``.

    Returns ``(roots, residuals)`` sorted by descending real part.
    """
    re_min, re_max, im_min, im_max = region
    nr, ni = resolution
    xr = np.linspace(re_min, re_max, nr)
    yi = np.linspace(im_min, im_max, ni)
    Z = xr[:, None] + 1j * yi[None, :]
    with np.errstate(all="ignore"):
        if vectorized:
            F = np.asarray(f(Z), dtype=complex)
        else:
            F = np.vectorize(lambda z: complex(f(z)))(Z)
    seeds = []
    for i, j in level_set_cells(F):
        block = F[i:i + 2, j:j + 2]
        k = np.unravel_index(np.argmin(np.abs(block)), block.shape)
        seeds.append(Z[i + k[0], j + k[1]])
    seeds.extend(complex(s) for s in extra_seeds)
    fs = lambda z: complex(f(np.asarray(z)))
    hr = (re_max - re_min) / max(nr - 1, 1)
    hi = (im_max - im_min) / max(ni - 1, 1)
    roots, res = [], []
    for s in seeds:
        with np.errstate(all="ignore"):
            z, r = newton_complex(fs, s, tol=tol)
        if not (r < tol and np.isfinite(z)):
            continue
        if not (re_min - hr <= z.real <= re_max + hr and im_min - hi <= z.imag <= im_max + hi):
            continue
        if any(abs(z - q) < dedup for q in roots):
            continue
        roots.append(z)
        res.append(r)
    roots = np.array(roots, dtype=complex)
    res = np.array(res, dtype=float)
    order = np.argsort(-roots.real, kind="stable")
    return roots[order], res[order]
