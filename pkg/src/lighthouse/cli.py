"""Command-line front end.

    lighthouse COMMAND [--figure figN] [--config run.yaml] [--out DIR] [--seed N] [--threads N]

A figure preset supplies a full parameter tree; a config file (YAML or JSON)
is merged over it.  Every command writes CSV files with a header row carrying
units, plus ``manifest.json`` echoing the resolved configuration.  Exit code 2
signals a configuration error and 3 a numerical failure; the error is also
printed to stderr as JSON.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
import tempfile
from importlib import resources

import numpy as np
import yaml

from . import __version__
from .errors import ConfigError, LighthouseError, NumericalFailure
from .kernels import Heaviside, Linear, SmoothExp, SynapseKernel

COMMANDS = ("sim-graph", "sim-field", "period", "spectrum", "msf", "dispersion", "turing",
            "bump", "bump-spectrum", "rate-bump", "wander")

# --- presets ---------------------------------------------------------------------------

PI = math.pi

PRESETS = {
    "fig2": {
        "model": {"S": {"type": "smoothexp", "r": 1.0, "h": -1.0}, "tau": 0.0},
        "analysis": {"alphas": {"geom": [0.05, 20.0, 80]}, "Gammas": [-2.0, 0.0, 2.0]},
        "network": {"type": "global", "N": 10, "Gamma": 0.0},
        "sim": {"dt": 1e-3, "t_end": 200.0, "perturb": 0.0},
    },
    "fig3": {
        "model": {"S": {"type": "linear", "gamma": PI, "Theta": -1.0}, "alpha": 5.0, "tau": 0.0},
        "network": {"type": "global", "N": 30, "Gamma": 1.0},
        "sim": {"dt": 1e-3, "t_end": 500.0, "perturb": 1e-3},
        "analysis": {"region": [-5.0, 2.0, -4 * PI, 4 * PI], "resolution": [400, 400]},
    },
    "fig4": {
        "model": {"S": {"type": "linear", "gamma": 1.0, "Theta": -1.0}, "alpha": 0.1, "tau": 0.0},
        "network": {"type": "antisymmetric", "N": 21, "epsilon": 1.5},
        "sim": {"dt": 1e-3, "t_end": 400.0, "perturb": 1e-3},
        "analysis": {"region": [-5.0, 2.0, -4 * PI, 4 * PI], "resolution": [400, 400]},
    },
    "fig5": {
        "model": {"S": {"type": "linear", "gamma": 1.0, "Theta": -1.0}, "alpha": 0.1, "tau": 0.0},
        "network": {"Gamma": 0.0},
        "analysis": {"region": [-40.0, 10.0, -30.0, 30.0], "resolution": [251, 301]},
    },
    "fig6": {
        "model": {"S": {"type": "heaviside", "h": 0.01}, "alpha": 0.5},
        "field": {"A": 1.0, "sigma": 2.0, "Gamma": 0.0},
        "analysis": {"M": 50, "rho": 5.0, "rhos": {"lin": [0.5, 10.0, 20]},
                     "alphas": {"lin": [0.05, 2.5, 25]}, "vary": "rho",
                     "region": [-3.0, 1.0, -6.0, 6.0], "resolution": [300, 300]},
    },
    "fig7": {
        "model": {"S": {"type": "smoothexp", "r": 2.0, "h": -1.0}, "alpha": 1.0, "tau": 0.0},
        "field": {"A": 1.0, "sigma": 2.0, "Gamma": 10.0},
        "analysis": {"rhos": {"lin": [-1.0, 1.0, 41]}, "vs": [0.5, 1.0, 2.0, 5.0]},
    },
    "fig8": {
        "model": {"S": {"type": "linear", "gamma": 25.0, "Theta": -1.0}},
        "field": {"A": 1.0, "sigma": 2.0, "Gamma": 0.0, "v": "inf"},
        "analysis": {"alphas": {"geom": [0.01, 4.0, 60]}},
    },
    "fig9": {
        "model": {"S": {"type": "linear", "gamma": 25.0, "Theta": -1.0}, "alpha": 4.0},
        "field": {"A": 1.0, "sigma": 2.0, "Gamma": 0.0, "v": "inf", "n_mesh": 1024, "wavelengths": 6},
        "sim": {"dt": 0.01, "t_end": 400.0, "perturb": 1e-3, "init": "sync"},
    },
    "fig10": {
        "model": {"S": {"type": "heaviside", "h": 0.01}, "alpha": 0.5},
        "field": {"A": 1.0, "sigma": 2.0, "Gamma": 0.0, "v": "inf", "L_over_sigma": 8.0, "n_mesh": 1024},
        "analysis": {"M": 50, "rho": 5.0},
        "sim": {"dt": 0.01, "t_end": 500.0, "alpha_after": 1.0, "r_smooth": 1e-5},
    },
}


def caption_manifest() -> dict:
    """Parameter blocks transcribed from the figure captions."""
    return json.loads(resources.files("lighthouse").joinpath("data/figure_captions.json").read_text())


def flatten_preset(name: str) -> dict:
    """All scalar parameters of a preset under their short names."""
    p = PRESETS[name]
    out = {}
    for sec in ("model", "network", "field", "analysis", "sim"):
        for k, v in p.get(sec, {}).items():
            if k == "S":
                for kk, vv in v.items():
                    if kk != "type":
                        out[kk] = vv
            elif not isinstance(v, (dict, list)):
                out[k] = v
    if name == "fig10":
        out["alpha_before"] = p["model"]["alpha"]
        out["r_smooth"] = p["sim"]["r_smooth"]
    return out


# --- config handling -------------------------------------------------------------------

def _merge(a: dict, b: dict) -> dict:
    out = copy.deepcopy(a)
    for k, v in b.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"config: cannot read {path}: {e}") from e
    try:
        data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"config: parse error: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a mapping")
    return data


def _num(cfg, path, default=None, positive=False, nonneg=False, required=True):
    node = cfg
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            if default is not None or not required:
                return default
            raise ConfigError(f"{path}: missing")
        node = node[key]
    if isinstance(node, str) and node.lower() in ("inf", "infinity"):
        node = math.inf
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(f"{path}: must be a number")
    x = float(node)
    if math.isnan(x):
        raise ConfigError(f"{path}: must not be NaN")
    if positive and not x > 0:
        raise ConfigError(f"{path}: must be positive")
    if nonneg and x < 0:
        raise ConfigError(f"{path}: must be non-negative")
    return x


def _grid(cfg, path):
    node = cfg
    for key in path.split("."):
        if not isinstance(node, dict) or key not in node:
            raise ConfigError(f"{path}: missing")
        node = node[key]
    if isinstance(node, list):
        return np.array([float(v) for v in node])
    if isinstance(node, dict) and len(node) == 1:
        kind, spec = next(iter(node.items()))
        if kind in ("lin", "geom") and isinstance(spec, list) and len(spec) == 3:
            a, b, n = float(spec[0]), float(spec[1]), int(spec[2])
            if n < 1:
                raise ConfigError(f"{path}: need at least one point")
            if kind == "geom":
                if not (a > 0 and b > 0):
                    raise ConfigError(f"{path}: geometric grid needs positive ends")
                return np.geomspace(a, b, n)
            return np.linspace(a, b, n)
    raise ConfigError(f"{path}: expected a list or {{lin|geom: [start, stop, n]}}")


def build_S(cfg):
    node = cfg.get("model", {}).get("S")
    if not isinstance(node, dict) or "type" not in node:
        raise ConfigError("model.S: needs a 'type' of smoothexp, linear or heaviside")
    t = node["type"]
    if t == "smoothexp":
        return SmoothExp(_num(cfg, "model.S.r", positive=True), _num(cfg, "model.S.h"))
    if t == "linear":
        return Linear(_num(cfg, "model.S.gamma"), _num(cfg, "model.S.Theta"))
    if t == "heaviside":
        return Heaviside(_num(cfg, "model.S.h"))
    raise ConfigError(f"model.S.type: unknown nonlinearity {t!r}")


def build_kernel(cfg, key="model.alpha"):
    return SynapseKernel(_num(cfg, key, positive=True))


def build_w(cfg):
    from .field import SpatialKernel
    return SpatialKernel(_num(cfg, "field.A", 1.0), _num(cfg, "field.sigma", 2.0, positive=True),
                         _num(cfg, "field.Gamma", 0.0))


def build_network(cfg):
    from .network import build_circulant, build_global, from_weights
    net = cfg.get("network", {})
    tau = _num(cfg, "model.tau", 0.0, nonneg=True)
    t = net.get("type")
    if t == "global":
        N = int(_num(cfg, "network.N", positive=True))
        return build_global(N, _num(cfg, "network.Gamma", 0.0), tau)
    if t == "antisymmetric":
        N = int(_num(cfg, "network.N", positive=True))
        eps = _num(cfg, "network.epsilon")
        c = np.zeros(N)
        c[1:] = eps * np.where(np.arange(1, N) % 2 == 1, -1.0, 1.0)
        return build_circulant(c, tau)
    if t == "circulant":
        return build_circulant(np.asarray(net.get("c"), dtype=float), tau)
    if t == "matrix":
        return from_weights(np.asarray(net.get("weights"), dtype=float), tau)
    raise ConfigError(f"network.type: unknown network {t!r}")


# --- output ----------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        return format(complex(v).real, ".17g") + ("+" if complex(v).imag >= 0 else "-") + \
            format(abs(complex(v).imag), ".17g") + "j"
    return str(v)


def atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) for v in r])
    atomic_write(path, buf.getvalue())


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# --- commands --------------------------------------------------------------------------

def cmd_period(cfg, out):
    from .synchrony import solve_period
    S = build_S(cfg)
    tau = _num(cfg, "model.tau", 0.0, nonneg=True)
    alphas = _grid(cfg, "analysis.alphas")
    Gammas = _grid(cfg, "analysis.Gammas")
    rows = []
    for G in Gammas:
        for a in alphas:
            T = solve_period(S, G, SynapseKernel(a), tau)
            rows.append((a, G, T, 2 * math.pi / T))
    write_csv(os.path.join(out, "period.csv"), ["alpha [1/time]", "Gamma [1]", "T [time]", "Omega [rad/time]"], rows)
    return ["period.csv"]


def _linear_ctx(cfg, Gamma):
    from .synchrony import LinearContext
    S = build_S(cfg)
    if not isinstance(S, Linear):
        raise ConfigError("model.S.type: this command needs a linear nonlinearity")
    return LinearContext(S.gamma, Gamma, S.theta, _num(cfg, "model.alpha", positive=True),
                         _num(cfg, "model.tau", 0.0, nonneg=True))


def cmd_spectrum(cfg, out):
    from .synchrony import network_spectrum
    net = build_network(cfg)
    if net.row_sum is None:
        raise ConfigError("network: rows must share a common sum")
    ctx = _linear_ctx(cfg, net.row_sum)
    region = tuple(cfg.get("analysis", {}).get("region", (-5.0, 2.0, -4 * PI, 4 * PI)))
    res = tuple(int(v) for v in cfg.get("analysis", {}).get("resolution", (400, 400)))
    sp = network_spectrum(net, ctx, region, res)
    rows = [(int(m), z.real, z.imag, r, k) for m, z, r, k in zip(sp.modes, sp.eigenvalues, sp.residuals, sp.kinds)]
    write_csv(os.path.join(out, "spectrum.csv"),
              ["mode [index]", "re_lambda [1/cycle]", "im_lambda [rad/cycle]", "residual [1]", "kind"], rows)
    write_csv(os.path.join(out, "verdict.csv"), ["max_re_lambda [1/cycle]", "verdict"],
              [(sp.max_real(), sp.verdict(1e-9))])
    return ["spectrum.csv", "verdict.csv"]


def cmd_msf(cfg, out):
    from .msf import MsfContext, msf_grid
    ctx = MsfContext.from_linear(_linear_ctx(cfg, _num(cfg, "network.Gamma", 0.0)))
    a = cfg.get("analysis", {})
    region = tuple(float(v) for v in a.get("region", (-40.0, 10.0, -30.0, 30.0)))
    res = tuple(int(v) for v in a.get("resolution", (251, 301)))
    g = msf_grid(region, res, ctx)
    write_csv(os.path.join(out, "msf_grid.csv"), ["re_beta [1]", "im_beta [1]", "msf [1/time]"], g.rows())
    crow = [(i, z.real, z.imag) for i, c in enumerate(g.contours) for z in c]
    write_csv(os.path.join(out, "msf_contour.csv"), ["contour [index]", "re_beta [1]", "im_beta [1]"], crow)
    return ["msf_grid.csv", "msf_contour.csv"]


def _sim_cfg(cfg, n, **extra):
    from .simulator import SimConfig
    s = cfg.get("sim", {})
    return SimConfig(dt=_num(cfg, "sim.dt", positive=True), t_end=_num(cfg, "sim.t_end", positive=True),
                     perturb=_num(cfg, "sim.perturb", 0.0, nonneg=True), seed=int(cfg.get("seed", 0)),
                     snapshot_times=tuple(float(t) for t in s.get("snapshot_times", ())), **extra)


def cmd_sim_graph(cfg, out):
    from .simulator import simulate_graph, write_raster_csv
    from .synchrony import solve_period
    net = build_network(cfg)
    S, kernel = build_S(cfg), build_kernel(cfg)
    tau = _num(cfg, "model.tau", 0.0, nonneg=True)
    n = net.n_nodes
    hist = {}
    if net.row_sum is not None:
        hist = dict(last_fire=np.zeros(n), hist_period=solve_period(S, net.row_sum, kernel, tau))
    sc = _sim_cfg(cfg, n, **hist)
    r = simulate_graph(net, kernel, S, sc)
    write_raster_csv(r.raster, os.path.join(out, "raster.csv"))
    return ["raster.csv"]


def _domain(cfg, L):
    from .simulator import FieldDomain
    return FieldDomain(L, int(_num(cfg, "field.n_mesh", 1024, positive=True)))


def cmd_sim_field(cfg, out):
    from .simulator import simulate_field, write_raster_csv, write_snapshot_csv
    from .turing import synchronous_field_period
    S, kernel, w = build_S(cfg), build_kernel(cfg), build_w(cfg)
    v = _num(cfg, "field.v", math.inf, positive=True)
    f = cfg.get("field", {})
    if "L" in f:
        L = _num(cfg, "field.L", positive=True)
    elif "wavelengths" in f:
        L = _num(cfg, "field.wavelengths", positive=True) * math.pi * math.sqrt(w.sigma)
    else:
        L = _num(cfg, "field.L_over_sigma", 8.0, positive=True) * w.sigma
    dom = _domain(cfg, L)
    init = cfg.get("sim", {}).get("init", "sync")
    if init == "sync":
        T = synchronous_field_period(S, kernel, w, v)
        extra = dict(last_fire=np.zeros(dom.n_mesh), hist_period=T)
    elif init == "wave":
        from .simulator import wave_initial_data
        from .waves import WaveContext
        rho = _num(cfg, "analysis.rho")
        wc = WaveContext.solve(S, kernel, w, v, rho)
        th, lf = wave_initial_data(dom, wc.T, rho, lambda z: wc.theta_profile(np.atleast_1d(z)))
        extra = dict(theta0=th, last_fire=lf, hist_period=wc.T)
    else:
        raise ConfigError(f"sim.init: unknown initial condition {init!r}")
    r = simulate_field(dom, kernel, S, w, v, _sim_cfg(cfg, dom.n_mesh, **extra))
    write_raster_csv(r.raster, os.path.join(out, "raster.csv"), label="x")
    files = ["raster.csv"]
    if r.snapshots:
        write_snapshot_csv(r.snapshots, dom.x, os.path.join(out, "snapshots.csv"))
        files.append("snapshots.csv")
    return files


def cmd_dispersion(cfg, out):
    from .waves import dispersion_curve
    S, kernel, w = build_S(cfg), build_kernel(cfg), build_w(cfg)
    rhos = _grid(cfg, "analysis.rhos")
    vs = _grid(cfg, "analysis.vs") if "vs" in cfg.get("analysis", {}) else [_num(cfg, "field.v", math.inf)]
    rows = []
    for v in vs:
        rows.extend((v, rho, T, b) for rho, T, b in dispersion_curve(rhos, S, kernel, w, v))
    write_csv(os.path.join(out, "dispersion.csv"), ["v [space/time]", "rho [time/space]", "T [time]", "branch [index]"], rows)
    return ["dispersion.csv"]


def cmd_turing(cfg, out):
    from .turing import TuringContext, static_turing
    S, w = build_S(cfg), build_w(cfg)
    rows = []
    for a in _grid(cfg, "analysis.alphas"):
        bp = static_turing(TuringContext(S, w, SynapseKernel(a), _num(cfg, "field.v", math.inf)))
        rows.append((a, bp.value, bp.k_c, bp.T))
    write_csv(os.path.join(out, "turing.csv"), ["alpha [1/time]", "gamma_c [1]", "k_c [1/space]", "T [time]"], rows)
    return ["turing.csv"]


def _bump_stable(b, w, cfg):
    from .bumps import spike_bump_spectrum
    a = cfg.get("analysis", {})
    region = tuple(float(v) for v in a.get("region", (-3.0, 1.0, -6.0, 6.0)))
    sp = spike_bump_spectrum(b, w, region=region, resolution=(120, 160))
    m = max(sp["+"].max_real(), sp["-"].max_real())
    return int(m < 0)


def cmd_bump(cfg, out):
    from .bumps import spike_bump_solve
    from .errors import NoSolution
    S, w = build_S(cfg), build_w(cfg)
    if not isinstance(S, Heaviside):
        raise ConfigError("model.S.type: bumps need a heaviside nonlinearity")
    a = cfg.get("analysis", {})
    M = int(_num(cfg, "analysis.M", 50, positive=True))
    vary = a.get("vary", "rho")
    if vary not in ("rho", "alpha"):
        raise ConfigError("analysis.vary: must be rho or alpha")
    values = _grid(cfg, "analysis.rhos" if vary == "rho" else "analysis.alphas")
    rows = []
    for val in values:
        rho = val if vary == "rho" else _num(cfg, "analysis.rho")
        alpha = val if vary == "alpha" else _num(cfg, "model.alpha", positive=True)
        try:
            bumps = spike_bump_solve(rho, S.h, w, SynapseKernel(alpha), M)
        except NoSolution:
            continue
        for b in bumps:
            rows.append((val, b.Delta, b.branch, _bump_stable(b, w, cfg)))
    write_csv(os.path.join(out, "bump_branches.csv"),
              [f"{vary} [{'time/space' if vary == 'rho' else '1/time'}]", "Delta [space]", "branch", "stable [bool]"], rows)
    return ["bump_branches.csv"]


def cmd_bump_spectrum(cfg, out):
    from .bumps import spike_bump_solve, spike_bump_spectrum
    S, w = build_S(cfg), build_w(cfg)
    if not isinstance(S, Heaviside):
        raise ConfigError("model.S.type: bumps need a heaviside nonlinearity")
    a = cfg.get("analysis", {})
    M = int(_num(cfg, "analysis.M", 50, positive=True))
    region = tuple(float(v) for v in a.get("region", (-3.0, 1.0, -6.0, 6.0)))
    res = tuple(int(v) for v in a.get("resolution", (300, 300)))
    rows = []
    for b in spike_bump_solve(_num(cfg, "analysis.rho"), S.h, w, build_kernel(cfg), M):
        sp = spike_bump_spectrum(b, w, region=region, resolution=res)
        for sign in "+-":
            r = sp[sign]
            rows.extend((b.branch, b.Delta, sign, z.real, z.imag, e, k)
                        for z, e, k in zip(r.eigenvalues, r.residuals, r.kinds))
    write_csv(os.path.join(out, "bump_spectrum.csv"),
              ["branch", "Delta [space]", "sign", "re_lambda [1/time]", "im_lambda [rad/time]", "residual [1]", "kind"], rows)
    return ["bump_spectrum.csv"]


def cmd_rate_bump(cfg, out):
    from .bumps import rate_bump_spectrum, rate_bump_width
    S, w = build_S(cfg), build_w(cfg)
    h = S.h if isinstance(S, (Heaviside, SmoothExp)) else _num(cfg, "model.S.h")
    alpha = _num(cfg, "model.alpha", positive=True)
    rows = []
    for b in rate_bump_width(h, w):
        for sign, lams in rate_bump_spectrum(b, alpha).items():
            rows.extend((b.Delta, b.branch, sign, z.real, z.imag) for z in lams)
    write_csv(os.path.join(out, "rate_bump.csv"),
              ["Delta [space]", "branch", "sign", "re_lambda [1/time]", "im_lambda [rad/time]"], rows)
    return ["rate_bump.csv"]


def cmd_wander(cfg, out):
    from .bumps import spike_bump_solve
    from .simulator import run_wandering_protocol, write_raster_csv
    S, w = build_S(cfg), build_w(cfg)
    if isinstance(S, Heaviside):
        h = S.h
    else:
        h = _num(cfg, "model.S.h")
    alpha = _num(cfg, "model.alpha", positive=True)
    rho = _num(cfg, "analysis.rho")
    M = int(_num(cfg, "analysis.M", 50, positive=True))
    b = spike_bump_solve(rho, h, w, SynapseKernel(alpha), M)[-1]
    dom = _domain(cfg, _num(cfg, "field.L_over_sigma", 8.0, positive=True) * w.sigma)
    if cfg.get("sim", {}).get("smooth"):
        S = SmoothExp(_num(cfg, "sim.r_smooth", positive=True), h)
    r = run_wandering_protocol(dom, S, w, b.Delta, rho, _num(cfg, "sim.t_end", positive=True),
                               _num(cfg, "sim.dt", positive=True), alpha, _num(cfg, "sim.alpha_after", positive=True),
                               _num(cfg, "field.v", math.inf, positive=True), int(cfg.get("seed", 0)))
    write_raster_csv(r.raster, os.path.join(out, "raster.csv"), label="x")
    return ["raster.csv"]


HANDLERS = {
    "period": cmd_period, "spectrum": cmd_spectrum, "msf": cmd_msf, "sim-graph": cmd_sim_graph,
    "sim-field": cmd_sim_field, "dispersion": cmd_dispersion, "turing": cmd_turing, "bump": cmd_bump,
    "bump-spectrum": cmd_bump_spectrum, "rate-bump": cmd_rate_bump, "wander": cmd_wander,
}


def resolve(command: str, figure=None, config=None, seed=None) -> dict:
    cfg = {}
    if figure is not None:
        if figure not in PRESETS:
            raise ConfigError(f"--figure: unknown preset {figure!r}")
        cfg = copy.deepcopy(PRESETS[figure])
    if config is not None:
        cfg = _merge(cfg, load_config(config))
    if seed is not None:
        cfg["seed"] = int(seed)
    cfg.setdefault("seed", 0)
    return cfg


def run(command: str, figure=None, config=None, out=".", seed=None, threads=None) -> int:
    """Execute one command; returns the process exit code."""
    try:
        if command not in HANDLERS:
            raise ConfigError(f"command: unknown {command!r}")
        cfg = resolve(command, figure, config, seed)
        os.makedirs(out, exist_ok=True)
        files = HANDLERS[command](cfg, out)
        manifest = {"command": command, "figure": figure, "version": __version__, "threads": threads,
                    "config": _jsonable(cfg), "outputs": files}
        atomic_write(os.path.join(out, "manifest.json"), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return 0
    except (ConfigError, ValueError, TypeError, KeyError) as e:
        _report(e, 2)
        return 2
    except (NumericalFailure, LighthouseError, ArithmeticError) as e:
        _report(e, 3)
        return 3


def _report(e, code):
    msg = str(e)
    fieldname = msg.split(":", 1)[0] if ":" in msg else None
    sys.stderr.write(json.dumps({"error": type(e).__name__, "exit_code": code, "field": fieldname,
                                 "message": msg}) + "\n")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="lighthouse", description="Lighthouse network analyses and simulations")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--figure", choices=sorted(PRESETS))
    p.add_argument("--out", default=".", metavar="DIR")
    p.add_argument("--threads", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=None, metavar="N")
    args = p.parse_args(argv)
    return run(args.command, args.figure, args.config, args.out, args.seed, args.threads)


if __name__ == "__main__":
    sys.exit(main())
