"""Direct simulation of Lighthouse networks on graphs and on a periodic 1D mesh.

Each node carries ``(theta, s, u)``.  Between events the synapse is linear,
``ds/dt = -alpha s + alpha u``, ``du/dt = -alpha u``, and is advanced exactly;
the phase follows ``dtheta/dt = S(psi)`` with explicit Euler.  A spike is
emitted when the phase lift crosses a multiple of 2 pi (no reset), its time
found by linear interpolation inside the step.  The spike raises the node's
own ``u`` by ``alpha``; the sub-step residual is folded in exactly so that the
trace equals ``sum_m eta(t - T^m)``.

Delays are quantised to the step: each node's ``s`` history is kept in a ring
buffer and the drive reads ``psi_i(t) = sum_j w_ij s_j(t - lag_ij dt)``.
"""
from __future__ import annotations

import csv
import math
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DelayBufferError
from .field import SpatialKernel, ring_weights
from .kernels import Nonlinearity, SynapseKernel
from .network import GraphNetwork

TWO_PI = 2.0 * math.pi

__all__ = [
    "SimConfig", "SpikeRaster", "FieldDomain", "SimResult", "simulate_graph", "simulate_field",
    "run_wandering_protocol", "synchronous_history", "write_raster_csv", "write_snapshot_csv",
    "bump_initial_data", "wave_initial_data",
]


@dataclass
class SimConfig:
    """Run settings.

    ``theta0`` defaults to zeros.  ``last_fire`` gives each node's most recent
    firing time (``<= 0``; NaN for a silent node) and ``hist_period`` the
    period of its past spike train, from which the initial ``(s, u)`` and the
    delay history are built.  When ``hist_period`` is None the past is quiet.
    """

    dt: float
    t_end: float
    theta0: Optional[np.ndarray] = None
    last_fire: Optional[np.ndarray] = None
    hist_period: Optional[float] = None
    s0: Optional[np.ndarray] = None
    u0: Optional[np.ndarray] = None
    perturb: float = 0.0
    seed: int = 0
    snapshot_times: Sequence[float] = ()
    alpha_schedule: Optional[Sequence[tuple]] = None   # [(t_switch, alpha), ...]

    def validate(self, n: int):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError("dt must be positive and finite")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError("t_end must be positive and finite")
        for name in ("theta0", "s0", "u0"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float)
                if v.shape != (n,) or not np.all(np.isfinite(v)):
                    raise ConfigError(f"{name} must be a finite vector of length {n}")
        if self.perturb < 0:
            raise ConfigError("perturbation amplitude must be non-negative")


@dataclass
class SpikeRaster:
    """Firing times per node (or mesh point), each strictly increasing."""

    times: list
    positions: Optional[np.ndarray] = None

    @property
    def n_nodes(self) -> int:
        return len(self.times)

    def counts(self, t0: float = -math.inf, t1: float = math.inf) -> np.ndarray:
        return np.array([np.count_nonzero((t >= t0) & (t < t1)) for t in self.times])

    def isi(self, i: int) -> np.ndarray:
        return np.diff(self.times[i])

    def last_spike(self) -> np.ndarray:
        return np.array([t[-1] if t.size else -math.inf for t in self.times])

    def active(self, t0: float, t1: float) -> np.ndarray:
        return self.counts(t0, t1) > 0

    def check_gaps(self, min_gap: float) -> bool:
        return all(np.all(np.diff(t) >= min_gap) for t in self.times)

    def rows(self):
        label = self.positions if self.positions is not None else np.arange(self.n_nodes)
        for i, ts in enumerate(self.times):
            for t in ts:
                yield label[i], t


@dataclass(frozen=True)
class FieldDomain:
    """Periodic interval ``[-L, L)`` with ``n_mesh`` points."""

    L: float
    n_mesh: int

    def __post_init__(self):
        if not (self.L > 0 and self.n_mesh >= 4):
            raise ConfigError("need L > 0 and n_mesh >= 4")

    @property
    def dx(self) -> float:
        return 2 * self.L / self.n_mesh

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n_mesh)


@dataclass
class SimResult:
    raster: SpikeRaster
    theta: np.ndarray
    s: np.ndarray
    u: np.ndarray
    snapshots: list = field(default_factory=list)   # (t, theta, s, u)
    lag_error: float = 0.0                          # max |tau - lag dt|


def synchronous_history(t, last_fire, T, alpha):
    """``(s, u)`` at times ``t`` of nodes that fired at ``last_fire + m T``, ``m <= 0``.

    ``t`` broadcasts against ``last_fire``; silent nodes (NaN) give zero.
    """
    t = np.asarray(t, dtype=float)
    lf = np.asarray(last_fire, dtype=float)
    silent = np.isnan(lf)
    lf = np.where(silent, 0.0, lf)
    ph = np.mod(t - lf, T)
    q = math.exp(-alpha * T)
    one_m = -math.expm1(-alpha * T)
    s = alpha**2 * np.exp(-alpha * ph) * (ph / one_m + T * q / one_m**2)
    u = alpha * np.exp(-alpha * ph) / one_m
    s = np.where(silent, 0.0, s)
    u = np.where(silent, 0.0, u)
    return s, u


class _Core:
    """Shared stepping loop; ``drive(step, history)`` returns ``psi`` at the step start."""

    def __init__(self, n, kernel: SynapseKernel, S: Nonlinearity, cfg: SimConfig, max_lag: int):
        cfg.validate(n)
        self.n, self.S, self.cfg = n, S, cfg
        self.alpha = kernel.alpha
        rng = np.random.default_rng(cfg.seed)
        th = np.zeros(n) if cfg.theta0 is None else np.asarray(cfg.theta0, dtype=float).copy()
        if cfg.perturb > 0:
            th = th + rng.uniform(0.0, cfg.perturb, size=n)
        self.theta = th
        dt = cfg.dt
        self.L = max_lag
        self.H = np.zeros((max_lag + 1, n))
        if cfg.hist_period is not None:
            lf = np.zeros(n) if cfg.last_fire is None else np.asarray(cfg.last_fire, dtype=float)
            past = -dt * np.arange(max_lag, -1, -1)          # oldest first, ends at t = 0
            s_hist, u0 = synchronous_history(past[:, None], lf[None, :], cfg.hist_period, self.alpha)
            self.H[:] = s_hist
            self.s = s_hist[-1].copy()
            self.u = u0[-1].copy()
        else:
            self.s = np.zeros(n)
            self.u = np.zeros(n)
        if cfg.s0 is not None:
            self.s = np.asarray(cfg.s0, dtype=float).copy()
            self.H[-1] = self.s
        if cfg.u0 is not None:
            self.u = np.asarray(cfg.u0, dtype=float).copy()
        # ring index of time 0 is max_lag
        self.head = max_lag
        self.times = [[] for _ in range(n)]

    def delayed(self, lag: int) -> np.ndarray:
        return self.H[(self.head - lag) % (self.L + 1)]

    def run(self, drive, snapshot_times=()):
        cfg, S = self.cfg, self.S
        dt = cfg.dt
        n_steps = int(round(cfg.t_end / dt))
        snaps, want = [], sorted(int(round(t / dt)) for t in snapshot_times)
        schedule = sorted(cfg.alpha_schedule or [])
        theta, s, u = self.theta, self.s, self.u
        alpha = self.alpha
        ea = math.exp(-alpha * dt)
        if want and want[0] == 0:
            snaps.append((0.0, theta.copy(), s.copy(), u.copy()))
            want.pop(0)
        for step in range(n_steps):
            t = step * dt
            while schedule and t >= schedule[0][0]:
                alpha = float(schedule.pop(0)[1])
                ea = math.exp(-alpha * dt)
            psi = drive(self)
            th_new = theta + dt * np.asarray(S.value(psi))
            k_old = np.floor(theta / TWO_PI)
            k_new = np.floor(th_new / TWO_PI)
            # synapse: exact flow of the linear (s, u) system over dt
            s = ea * (s + alpha * dt * u)
            u = ea * u
            fired = np.nonzero(k_new > k_old)[0]
            for i in fired:
                thr = TWO_PI * (k_old[i] + 1)
                frac = (thr - theta[i]) / (th_new[i] - theta[i])
                t_sp = t + frac * dt
                self.times[i].append(t_sp)
                d = (1.0 - frac) * dt
                e = math.exp(-alpha * d)
                u[i] += alpha * e
                s[i] += alpha * alpha * d * e
            theta = th_new
            self.head = (self.head + 1) % (self.L + 1)
            self.H[self.head] = s
            if want and step + 1 == want[0]:
                snaps.append(((step + 1) * dt, theta.copy(), s.copy(), u.copy()))
                want.pop(0)
        self.theta, self.s, self.u = theta, s, u
        return snaps


def _quantise(delays: np.ndarray, dt: float):
    lags = np.rint(delays / dt).astype(int)
    err = float(np.max(np.abs(lags * dt - delays), initial=0.0))
    return lags, err


def simulate_graph(net: GraphNetwork, kernel: SynapseKernel, S: Nonlinearity, cfg: SimConfig) -> SimResult:
    """Simulate the Lighthouse model on a graph."""
    n = net.n_nodes
    cfg.validate(n)
    W = net.weights
    if net.delays is None:
        lag, err = _quantise(np.array([net.delay]), cfg.dt)
        lag = int(lag[0])
        core = _Core(n, kernel, S, cfg, lag)
        drive = lambda c: W @ c.delayed(lag)
    else:
        lags, err = _quantise(net.delays, cfg.dt)
        groups = [(int(l), np.where(lags == l, W, 0.0)) for l in np.unique(lags)]
        core = _Core(n, kernel, S, cfg, int(lags.max()))
        drive = lambda c: sum(Wl @ c.delayed(l) for l, Wl in groups)
    snaps = core.run(drive, cfg.snapshot_times)
    raster = SpikeRaster([np.array(t) for t in core.times])
    return SimResult(raster, core.theta, core.s, core.u, snaps, err)


def simulate_field(domain: FieldDomain, kernel: SynapseKernel, S: Nonlinearity, w: SpatialKernel,
                   v: float, cfg: SimConfig, weight_cut: float = 1e-13) -> SimResult:
    """Simulate the continuum model on a periodic mesh.

    The drive is the circular convolution of cell-integrated kernel weights
    with the delayed ``s`` field.  For ``v = inf`` one FFT convolution per
    step is used; otherwise offsets are grouped by their quantised delay
    ``round(|d|/(v dt))`` and each group reads one ring-buffer slot.
    """
    n, dx = domain.n_mesh, domain.dx
    c = ring_weights(w, n, dx)
    if math.isinf(v):
        c_hat = np.fft.rfft(c)
        core = _Core(n, kernel, S, cfg, 0)
        drive = lambda cr: np.fft.irfft(c_hat * np.fft.rfft(cr.delayed(0)), n=n)
        err = 0.0
    else:
        if not v > 0:
            raise ConfigError("axonal speed must be positive")
        o = np.arange(n)
        dist = np.abs(np.where(o <= n // 2, o, o - n)) * dx
        keep = np.abs(c) > weight_cut * np.abs(c).max()
        lags, err = _quantise(dist / v, cfg.dt)
        max_lag = int(lags[keep].max())
        if cfg.t_end < max_lag * cfg.dt and cfg.hist_period is None:
            raise DelayBufferError("t_end shorter than the maximum delay warm-up")
        groups = []
        for l in np.unique(lags[keep]):
            cl = np.where(keep & (lags == l), c, 0.0)
            groups.append((int(l), np.fft.rfft(cl)))
        core = _Core(n, kernel, S, cfg, max_lag)

        def drive(cr):
            acc = np.zeros(n // 2 + 1, dtype=complex)
            for l, ch in groups:
                acc += ch * np.fft.rfft(cr.delayed(l))
            return np.fft.irfft(acc, n=n)
    snaps = core.run(drive, cfg.snapshot_times)
    raster = SpikeRaster([np.array(t) for t in core.times], positions=domain.x)
    return SimResult(raster, core.theta, core.s, core.u, snaps, err)


def bump_initial_data(domain: FieldDomain, Delta: float, rho: float, T: float = TWO_PI):
    """Phases and firing history of a bump ``T^m(x) = T m + rho |x|`` on ``|x| < Delta/2``.

    Inside the bump the phase is ``-2 pi rho |x| / T`` (unit rotation rate for
    ``T = 2 pi``); outside it is zero with no past spikes.
    """
    x = domain.x
    inside = np.abs(x) < Delta / 2
    theta = np.where(inside, -TWO_PI * rho * np.abs(x) / T, 0.0)
    # most recent firing time <= 0 of the lattice rho|x| + m T
    lf = np.where(inside, rho * np.abs(x) - T * np.ceil(rho * np.abs(x) / T - 1e-12), np.nan)
    lf = np.where(inside & (lf > 0), lf - T, lf)
    return theta, lf


def wave_initial_data(domain: FieldDomain, T: float, rho: float, theta_profile=None):
    """Phases and firing history for the wave ``T^m(x) = m T + rho x``.

    ``theta_profile(xi)`` is the wave-frame phase with ``theta(0) = 0``; the
    default is uniform rotation ``2 pi xi / T``.
    """
    x = domain.x
    xi = -rho * x
    prof = theta_profile or (lambda z: TWO_PI * z / T)
    k = np.floor(xi / T)
    theta = TWO_PI * k + np.asarray(prof(xi - k * T))
    lf = rho * x + T * np.floor(-rho * x / T + 1e-12)
    lf = np.where(lf > 0, lf - T, lf)
    return theta, lf


def run_wandering_protocol(domain: FieldDomain, S: Nonlinearity, w: SpatialKernel, Delta: float,
                           rho: float, t_end: float, dt: float = 0.01, alpha_before: float = 0.5,
                           alpha_after: Optional[float] = 1.0, v: float = math.inf, seed: int = 0) -> SimResult:
    """Bump-initialised run whose synaptic rate switches after a fifth of the horizon."""
    theta, lf = bump_initial_data(domain, Delta, rho)
    sched = None if alpha_after is None else [(t_end / 5.0, alpha_after)]
    cfg = SimConfig(dt=dt, t_end=t_end, theta0=theta, last_fire=lf, hist_period=TWO_PI,
                    seed=seed, alpha_schedule=sched)
    return simulate_field(domain, SynapseKernel(alpha_before), S, w, v, cfg)


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


@contextmanager
def _atomic(path: str):
    """Open ``path`` for writing through a sibling temp file renamed on success."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_raster_csv(raster: SpikeRaster, path: str, label: str = "node"):
    with _atomic(path) as fh:
        wr = csv.writer(fh)
        wr.writerow([label, "firing_time [time]"])
        for a, t in raster.rows():
            wr.writerow([f"{a:.17g}" if isinstance(a, (float, np.floating)) else a, f"{t:.17g}"])


def write_snapshot_csv(snapshots, x, path: str):
    with _atomic(path) as fh:
        wr = csv.writer(fh)
        wr.writerow(["t [time]", "position [length]", "theta [rad]", "s", "u"])
        for t, th, s, u in snapshots:
            for xi, a, b, c in zip(x, th, s, u):
                wr.writerow([f"{v:.17g}" for v in (t, xi, a, b, c)])
