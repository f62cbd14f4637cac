"""Weight matrices on graphs and their spectra."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, NonDiagonalisable

__all__ = [
    "GraphNetwork", "EigenDecomposition", "build_global", "build_circulant",
    "build_laplacian", "from_weights", "eigen", "detect_row_sum",
]

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class GraphNetwork:
    weights: np.ndarray
    delay: float = 0.0
    row_sum: Optional[float] = None
    # per-pair delays tau_ij; None means the common delay everywhere
    delays: Optional[np.ndarray] = None
    generator: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ConfigError("weights must be a square matrix")
        if not np.all(np.isfinite(w)):
            raise ConfigError("weights must be finite")
        if self.delay < 0:
            raise ConfigError("delay must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.delays is not None:
            d = np.array(self.delays, dtype=float)
            if d.shape != w.shape or np.any(d < 0):
                raise ConfigError("delays must be a non-negative matrix shaped like weights")
            d.setflags(write=False)
            object.__setattr__(self, "delays", d)
        if self.row_sum is not None:
            dev = np.max(np.abs(w.sum(axis=1) - self.row_sum))
            if dev > ROW_SUM_TOL * max(1.0, np.abs(w).sum(axis=1).max()):
                raise ConfigError(f"row sums deviate from Gamma by {dev:.3g}")

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]

    def delay_matrix(self) -> np.ndarray:
        if self.delays is not None:
            return self.delays
        return np.full(self.weights.shape, float(self.delay))


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray   # columns


def detect_row_sum(w, tol: float = ROW_SUM_TOL) -> Optional[float]:
    """Common row sum of ``w`` if every row agrees to ``tol``, else None."""
    rs = np.asarray(w, dtype=float).sum(axis=1)
    gamma = float(np.mean(rs))
    scale = max(1.0, float(np.abs(w).sum(axis=1).max()))
    return gamma if np.max(np.abs(rs - gamma)) <= tol * scale else None


def from_weights(w, delay: float = 0.0, delays=None) -> GraphNetwork:
    return GraphNetwork(np.asarray(w, dtype=float), delay=delay,
                        row_sum=detect_row_sum(w), delays=delays)


def build_global(N: int, Gamma: float, delay: float = 0.0) -> GraphNetwork:
    """``w_ij = (Gamma + 1) delta_ij - 1/N``."""
    if N < 2:
        raise ConfigError("global coupling needs N >= 2")
    w = (Gamma + 1.0) * np.eye(N) - 1.0 / N
    return GraphNetwork(w, delay=delay, row_sum=float(Gamma))


def build_circulant(c, delay: float = 0.0) -> GraphNetwork:
    """Circulant matrix whose rows are cyclic shifts of the generator ``c``."""
    c = np.asarray(c, dtype=float).ravel()
    N = c.size
    if N < 2:
        raise ConfigError("circulant generator needs length >= 2")
    idx = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    w = c[idx]
    return GraphNetwork(w, delay=delay, row_sum=float(c.sum()), generator=c)


def build_laplacian(a, delay: float = 0.0) -> GraphNetwork:
    """``w_ij = -a_ij + delta_ij sum_k a_ik``; rows always sum to zero."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError("adjacency must be square")
    if np.any(a < 0):
        raise ConfigError("adjacency must be non-negative")
    w = -a + np.diag(a.sum(axis=1))
    return GraphNetwork(w, delay=delay, row_sum=0.0)


def circulant_eigenvalues(c) -> np.ndarray:
    """``chi_l = sum_j c_j exp(2 pi i l j / N)``."""
    c = np.asarray(c, dtype=float)
    N = c.size
    return N * np.fft.ifft(c)


def eigen(net: GraphNetwork, cond_max: float = 1e12) -> EigenDecomposition:
    """Full spectrum sorted by real part (descending)."""
    w = net.weights
    N = net.n_nodes
    if net.generator is not None:
        vals = circulant_eigenvalues(net.generator)
        l = np.arange(N)
        vecs = np.exp(2j * np.pi * np.outer(np.arange(N), l) / N) / np.sqrt(N)
    elif np.allclose(w, w.T, rtol=0, atol=1e-14):
        vals, vecs = np.linalg.eigh(w)
        vals = vals.astype(complex)
        vecs = vecs.astype(complex)
    else:
        vals, vecs = np.linalg.eig(w)
        if np.linalg.cond(vecs) > cond_max:
            raise NonDiagonalisable("eigenvector matrix is ill-conditioned")
    order = np.lexsort((-vals.imag, -vals.real))
    return EigenDecomposition(vals[order], vecs[:, order])


def non_gamma_modes(net: GraphNetwork, tol: float = 1e-9) -> np.ndarray:
    """Eigenvalues excluding one copy of the row-sum eigenvalue Gamma."""
    vals = eigen(net).eigenvalues
    if net.row_sum is None:
        return vals
    i = int(np.argmin(np.abs(vals - net.row_sum)))
    if abs(vals[i] - net.row_sum) > tol * max(1.0, abs(net.row_sum)):
        return vals
    return np.delete(vals, i)
