"""Experiment configs and the pipelines behind the command-line driver.

Each ``run_*`` function takes a validated :class:`ExperimentConfig` and
returns ``(artifacts, passed)`` where ``artifacts`` maps output file names
to their text. Nothing here touches the file system, which keeps the
pipelines usable from notebooks and tests.
"""
import copy
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import check_two_sided, fit_scaling, law_for
from .errors import ParameterDomainError
from .gfd import TimeGridFunction, caputo, distributed_order
from .montecarlo import (RngStream, histogram_csv, mc_subordinate, sample_inverse,
                         step_halving_check)
from .subordinators import KernelClass, Weight, density_grid, spec_from_dict
from .waves import (Side, WaveProfile, cesaro_wave, front_trace,
                    make_step_waves, subordinate, tauberian_wave)

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "header_line",
           "run_density", "run_subordinate", "run_front", "run_verify",
           "run_mc_check", "run_gfd_check", "PIPELINES"]

DEFAULTS = {
    "spec": {"variant": "stable", "alpha": 0.5},
    "profile": {"kind": "logistic", "params": {}},
    "v": 1.0,
    "eps": 0.05,
    "beta": 0.5,
    "t_grid": {"t_min": 1e2, "t_max": 1e6, "points": 9},
    "x_grid": {"x_min": -5.0, "x_max": 10.0, "points": 61},
    "tau_grid": {"tau_max": 5.0, "points": 101},
    "evaluator": "cesaro",
    "slack": 0.05,
    "burn_in": None,
    "fit_tolerance": 0.05,
    "seed": 0,
    "mc": {"points": 10, "x_range": [-2.0, 4.0], "t_range": [0.5, 5.0],
           "samples": 100000, "step": None, "k_sigma": 3.0, "bins": 50},
    "gfd": {"alpha": 0.5, "t": 1.0, "h": 1e-3, "rel_tol": 1e-3, "min_order": 1.0},
    "outputs": {},
}

_KINDS = ("logistic", "step-lower", "step-upper")
_EVALUATORS = ("subordinate", "cesaro", "tauberian")


class ConfigError(ValueError):
    """Schema violation in an experiment config (CLI exit code 2)."""


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in out:
            raise ConfigError(f"unknown config key {k!r}")
        if isinstance(out[k], dict) and isinstance(v, dict) and k not in ("spec", "outputs", "t_grid"):
            out[k] = _merge(out[k], v) if k != "profile" else {**out[k], **v}
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class ExperimentConfig:
    """Validated experiment description; ``data`` is the canonical JSON form."""

    data: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    def __post_init__(self):
        d = self.data
        try:
            self.spec = spec_from_dict(d["spec"])
        except (ParameterDomainError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad spec: {exc}") from None
        prof = d["profile"]
        if prof.get("kind") not in _KINDS:
            raise ConfigError(f"profile kind must be one of {_KINDS}")
        if not isinstance(prof.get("params", {}), dict):
            raise ConfigError("profile params must be an object")
        for key in ("v", "eps", "beta", "slack"):
            if not isinstance(d[key], (int, float)) or isinstance(d[key], bool):
                raise ConfigError(f"{key} must be a number")
        if not d["v"] > 0:
            raise ConfigError("v must be positive")
        if not 0.0 < d["eps"] < 0.5:
            raise ConfigError("eps must lie in (0, 1/2)")
        if not 0.0 < d["beta"] < 1.0:
            raise ConfigError("beta must lie in (0, 1)")
        if d["evaluator"] not in _EVALUATORS:
            raise ConfigError(f"evaluator must be one of {_EVALUATORS}")
        g = d["t_grid"]
        if "values" in g:
            t = np.asarray(g["values"], dtype=float)
            if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
                raise ConfigError("t_grid values must be increasing and >= 0")
        elif not (0 < g["t_min"] < g["t_max"] and int(g["points"]) >= 2):
            raise ConfigError("t_grid needs 0 < t_min < t_max and points >= 2")
        if not isinstance(d["seed"], int) or not 0 <= d["seed"] < 2 ** 64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        if int(d["mc"]["samples"]) < 100:
            raise ConfigError("mc.samples must be >= 100")

    # -- derived pieces --------------------------------------------------

    @property
    def t_values(self):
        g = self.data["t_grid"]
        if "values" in g:
            return np.asarray(g["values"], dtype=float)
        # log-spaced by default: every law is a power or log law
        return np.logspace(math.log10(g["t_min"]), math.log10(g["t_max"]), int(g["points"]))

    @property
    def x_values(self):
        g = self.data["x_grid"]
        return np.linspace(g["x_min"], g["x_max"], int(g["points"]))

    @property
    def tau_values(self):
        g = self.data["tau_grid"]
        return np.linspace(0.0, g["tau_max"], int(g["points"]))

    def profile(self):
        d = self.data
        p = dict(d["profile"].get("params", {}))
        kind = d["profile"]["kind"]
        try:
            if kind == "logistic":
                return WaveProfile.logistic(d["v"], p.get("width", 1.0), p.get("center", 0.0))
            if kind == "step-lower":
                return WaveProfile.lower_step(d["eps"], p.get("x_minus", 0.0), d["v"])
            return WaveProfile.upper_step(d["eps"], p.get("x_plus", 0.0), d["v"])
        except ParameterDomainError as exc:
            raise ConfigError(f"bad profile: {exc}") from None

    def check_beta_band(self, lower=True, upper=True):
        eps, beta = self.data["eps"], self.data["beta"]
        if upper and not beta > eps:
            raise ConfigError(f"beta={beta} must exceed eps={eps} for the upper wave")
        if lower and not beta < 1.0 - eps:
            raise ConfigError(f"beta={beta} must stay below 1-eps={1 - eps} for the lower wave")

    def canonical(self):
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"), allow_nan=False)

    @property
    def digest(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def load_config(text=None, overrides=None):
    """Defaults, then the JSON ``text``, then ``overrides`` (same schema)."""
    data = copy.deepcopy(DEFAULTS)
    if text is not None:
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        data = _merge(data, user)
    if overrides:
        data = _merge(data, overrides)
    try:
        return ExperimentConfig(data)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed config: {exc!r}") from None


def header_line(cfg):
    return f"subwave {__version__} config={cfg.digest}"


def _csv(columns, rows, cfg):
    lines = [f"# {header_line(cfg)}", ",".join(columns)]
    lines += [",".join(c if isinstance(c, str) else repr(float(c)) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


def _json(cfg, payload):
    body = {"provenance": {"header": header_line(cfg), "version": __version__,
                           "config_sha256": cfg.digest, "config": cfg.data}}
    body.update(payload)
    return json.dumps(body, indent=2, sort_keys=True, default=float) + "\n"


def _pool_map(fn, items, threads):
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _wave_fn(profile, spec, evaluator):
    if evaluator == "subordinate":
        return lambda x, t: subordinate(profile, spec, x, t)
    if evaluator == "cesaro":
        return lambda x, t: cesaro_wave(profile, spec, x, t)
    return lambda x, t: tauberian_wave(profile, spec, x, t)


# -- pipelines --------------------------------------------------------------

def run_density(cfg, threads=1):
    """Tabulate ``G_t(tau)`` on the config grids (``density.csv``)."""
    tau = cfg.tau_values
    rows_by_t = _pool_map(lambda t: density_grid(cfg.spec, [t], tau).values[0],
                          cfg.t_values, threads)
    rows = [(t, s, g) for t, G in zip(cfg.t_values, rows_by_t) for s, g in zip(tau, G)]
    return {"density.csv": _csv(["t", "tau", "G"], rows, cfg)}, True


def run_subordinate(cfg, threads=1):
    """Tabulate ``psi^E(x, t)`` (``wave.csv``)."""
    profile = cfg.profile()
    x = cfg.x_values
    vals = _pool_map(lambda t: np.atleast_1d(subordinate(profile, cfg.spec, x, t)),
                     cfg.t_values, threads)
    rows = [(t, xi, w) for t, W in zip(cfg.t_values, vals) for xi, w in zip(x, W)]
    return {"wave.csv": _csv(["t", "x", "psiE"], rows, cfg)}, True


def _traces(cfg, threads):
    """Front traces for the configured profile; logistic also gets both step waves."""
    profile = cfg.profile()
    beta, ev = cfg.data["beta"], cfg.data["evaluator"]
    t = cfg.t_values
    jobs = []
    if profile.kind.value == "smooth":
        lower, upper, bracket = make_step_waves(profile, cfg.data["eps"])
        jobs = [("lower", lower, Side.LOWER_WAVE), ("upper", upper, Side.UPPER_WAVE),
                ("exact", profile, Side.EXACT)]
    else:
        bracket = None
        side = Side.LOWER_WAVE if profile.kind.value == "lower_step" else Side.UPPER_WAVE
        cfg.check_beta_band(lower=side == Side.LOWER_WAVE, upper=side == Side.UPPER_WAVE)
        jobs = [(side.value, profile, side)]
    traces = _pool_map(
        lambda j: front_trace(_wave_fn(j[1], cfg.spec, ev), beta, t, side=j[2]),
        jobs, threads)
    return {j[0]: tr for j, tr in zip(jobs, traces)}, bracket


def run_front(cfg, threads=1):
    """Front traces (``front.csv``); passes iff every point was located."""
    if cfg.profile().kind.value == "smooth":
        cfg.check_beta_band()
    traces, _ = _traces(cfg, threads)
    rows = []
    for name, tr in traces.items():
        rows += [(t, x, tr.beta, name) for t, x in zip(tr.t_values, tr.x_values)]
    ok = all(bool(np.all(tr.valid)) for tr in traces.values())
    return {"front.csv": _csv(["t", "x_beta", "beta", "side"], rows, cfg)}, ok


def run_verify(cfg, threads=1):
    """Fit the step-wave fronts and check the smooth front against both laws.

    Emits ``report.json`` holding the :class:`BoundReport` of the smooth
    trace plus the scaling fits, and ``front.csv`` with the traces used.
    """
    spec = cfg.spec
    if spec.class_tag not in (KernelClass.C1, KernelClass.C2, KernelClass.C3):
        raise ConfigError(f"{type(spec).__name__} has no front law (class {spec.class_tag.value})")
    if cfg.profile().kind.value != "smooth":
        raise ConfigError("verify needs a logistic profile")
    cfg.check_beta_band()
    d = cfg.data
    traces, br = _traces(cfg, threads)
    lower = law_for(spec, "lower", d["v"], d["eps"], d["beta"], br.x_minus)
    upper = law_for(spec, "upper", d["v"], d["eps"], d["beta"], br.x_plus)
    bound = check_two_sided(traces["exact"], lower, upper, d["slack"], d["burn_in"])
    fits = []
    if spec.class_tag == KernelClass.C1:
        alpha = spec.class_params["alpha"]
        for name, off in (("lower", br.x_minus), ("upper", br.x_plus)):
            fits.append(fit_scaling(traces[name], "C1", x_offset=off, expected=alpha,
                                    tolerance=d["fit_tolerance"]))
    passed = bound.passed and all(f.passed for f in fits)
    payload = {"bound": bound.to_dict(), "fits": [f.to_dict() for f in fits],
               "laws": [lower.to_dict(), upper.to_dict()], "pass": bool(passed)}
    rows = []
    for name, tr in traces.items():
        rows += [(t, x, tr.beta, name) for t, x in zip(tr.t_values, tr.x_values)]
    return {"report.json": _json(cfg, payload),
            "front.csv": _csv(["t", "x_beta", "beta", "side"], rows, cfg)}, passed


def run_mc_check(cfg, threads=1):
    """Monte Carlo against quadrature at random ``(x, t)`` points (``mc.json``).

    Points come from stream 0 of the seed; point ``i`` is simulated on
    stream ``i + 1``, so results do not depend on ``threads``.
    """
    m = cfg.data["mc"]
    seed = cfg.data["seed"]
    profile = cfg.profile()
    g = RngStream(seed, 0).generator
    n_pts = int(m["points"])
    xs = g.uniform(*m["x_range"], n_pts)
    ts = g.uniform(*m["t_range"], n_pts)
    n = int(m["samples"])

    def one(i):
        est = mc_subordinate(profile, cfg.spec, xs[i], ts[i], n, RngStream(seed, i + 1),
                             step=m["step"])
        ref = subordinate(profile, cfg.spec, xs[i], ts[i])
        return est, ref

    results = _pool_map(one, range(n_pts), threads)
    rows = []
    for x, t, (est, ref) in zip(xs, ts, results):
        rows.append({"x": float(x), "t": float(t), "mc": est.mean, "std_error": est.std_error,
                     "n": est.n, "step": est.step, "quadrature": float(ref),
                     "z": (est.mean - ref) / est.std_error if est.std_error > 0 else 0.0,
                     "pass": est.agrees_with(ref, m["k_sigma"])})
    gate = step_halving_check(profile, cfg.spec, xs[0], ts[0], n, RngStream(seed, 0, (2,)),
                              step=m["step"])
    gate_row = {"x": float(xs[0]), "t": float(ts[0]), "step": gate.coarse.step,
                "mean_step": gate.coarse.mean, "mean_half_step": gate.fine.mean,
                "change": gate.change, "std_error": gate.coarse.std_error,
                "pass": gate.passed}
    passed = all(r["pass"] for r in rows) and gate.passed
    E = sample_inverse(cfg.spec, float(ts[0]), m["step"], RngStream(seed, 0, (1,)), n)
    hist = histogram_csv(E, int(m["bins"]), [header_line(cfg)])
    return {"mc.json": _json(cfg, {"points": rows, "step_gate": gate_row,
                                        "k_sigma": m["k_sigma"], "pass": passed}),
            "mc_hist.csv": hist}, passed


def run_gfd_check(cfg, threads=1):
    """Caputo and distributed-order operator checks (``gfd.json``).

    * Caputo of ``u = t`` against ``t**(1-a)/Gamma(2-a)`` at ``h`` and ``h/2``.
    * Caputo of ``u = t**2`` against ``2 t**(2-a)/Gamma(3-a)``; observed order.
    * Distributed order (``mu = 1``) of ``u = t**2`` against the weight
      integral of the Caputo closed forms.
    """
    from scipy import integrate, special

    p = cfg.data["gfd"]
    a, t_end, h = p["alpha"], p["t"], p["h"]
    checks = []

    def run(u, exact, op, name, floor=1e-12):
        errs = []
        for hh in (h, h / 2):
            n = int(round(t_end / hh))
            val = op(TimeGridFunction.sample(u, t_end, n), n)
            errs.append(abs(val - exact) / abs(exact))
        if errs[1] <= floor:
            order = None  # exact up to roundoff
        else:
            order = math.log2(max(errs[0], floor) / errs[1])
        ok = errs[0] <= p["rel_tol"] and (order is None or order >= p["min_order"])
        checks.append({"name": name, "rel_err": errs, "order": order, "pass": bool(ok)})

    run(lambda s: s, t_end ** (1 - a) / special.gamma(2 - a),
        lambda u, n: caputo(a, u, n), "caputo u=t")
    run(lambda s: s ** 2, 2 * t_end ** (2 - a) / special.gamma(3 - a),
        lambda u, n: caputo(a, u, n), "caputo u=t^2")
    exact, _ = integrate.quad(lambda r: 2 * t_end ** (2 - r) * special.rgamma(3 - r), 0, 1,
                              epsabs=1e-14)
    w = Weight.const(1.0)
    run(lambda s: s ** 2, exact, lambda u, n: distributed_order(w, u, n),
        "distributed mu=1 u=t^2")
    passed = all(c["pass"] for c in checks)
    return {"gfd.json": _json(cfg, {"checks": checks, "pass": passed})}, passed


PIPELINES = {
    "density": run_density,
    "subordinate": run_subordinate,
    "front": run_front,
    "verify": run_verify,
    "mc-check": run_mc_check,
    "gfd-check": run_gfd_check,
}
