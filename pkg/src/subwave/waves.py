"""Traveling-wave profiles, subordination by ``G_t`` and front extraction.

A profile ``psi`` moving with speed ``v`` is subordinated by the inverse
subordinator,

    psi^E(x, t) = int_0^inf psi(x - v tau) G_t(tau) dtau,

and its Cesaro mean ``M_t = (1/t) int_0^t psi^E(x, s) ds`` is the same
integral against the Cesaro density ``(1/t) int_0^t G_s ds``. Both densities
come from :func:`subwave.subordinators.inverse_family`; step profiles reduce
to a single survival-type inversion at ``theta = (x - x_edge)/v``.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize, special

from . import laplace
from .errors import (BracketNotFound, LevelNotAttained, NumericalFailure,
                     ParameterDomainError)
from .subordinators import inverse_family, laplace_exponent, tail_cutoff

__all__ = [
    "ProfileKind",
    "WaveProfile",
    "Bracket",
    "Side",
    "FrontTrace",
    "FrontSearch",
    "make_step_waves",
    "subordinate",
    "cesaro_wave",
    "tauberian_wave",
    "cesaro_mean",
    "front_position",
    "front_trace",
]

# psi(x - v tau) is treated as constant beyond this many widths from its centre
_FINE_HALF_WIDTHS = 40.0


class ProfileKind(str, Enum):
    SMOOTH = "smooth"
    LOWER_STEP = "lower_step"
    UPPER_STEP = "upper_step"
    CONSTANT = "constant"


@dataclass(frozen=True)
class WaveProfile:
    """Nonincreasing profile ``psi`` with ``psi(-inf) = 1``, ``psi(+inf) = 0``.

    ``width`` is the length scale over which a smooth profile changes (used
    to place quadrature panels) and ``center`` is where it does so. Step
    profiles carry ``eps`` and their jump location ``edge``.
    """

    psi: Callable[[np.ndarray], np.ndarray]
    v: float = 1.0
    kind: ProfileKind = ProfileKind.SMOOTH
    eps: Optional[float] = None
    edge: Optional[float] = None
    width: float = 1.0
    center: float = 0.0
    level: Optional[float] = None
    name: str = "custom"

    def __post_init__(self):
        if not self.v > 0:
            raise ParameterDomainError(f"wave speed must be positive, got {self.v}")
        if not self.width > 0:
            raise ParameterDomainError("width must be positive")

    @classmethod
    def logistic(cls, v=1.0, width=1.0, center=0.0):
        """``psi(x) = 1 / (1 + exp((x - center)/width))``."""
        return cls(lambda x: special.expit(-(np.asarray(x, dtype=float) - center) / width),
                   v=v, width=width, center=center, name="logistic")

    @classmethod
    def lower_step(cls, eps, x_minus, v=1.0):
        """``(1 - eps) 1{x <= x_minus}``."""
        _check_eps(eps)

        def psi(x):
            return np.where(np.asarray(x, dtype=float) <= x_minus, 1.0 - eps, 0.0)

        return cls(psi, v=v, kind=ProfileKind.LOWER_STEP, eps=eps, edge=x_minus,
                   center=x_minus, name="step-lower")

    @classmethod
    def upper_step(cls, eps, x_plus, v=1.0):
        """``1{x <= x_plus} + eps 1{x > x_plus}``."""
        _check_eps(eps)

        def psi(x):
            return np.where(np.asarray(x, dtype=float) <= x_plus, 1.0, eps)

        return cls(psi, v=v, kind=ProfileKind.UPPER_STEP, eps=eps, edge=x_plus,
                   center=x_plus, name="step-upper")

    @classmethod
    def constant(cls, c=1.0, v=1.0):
        if not 0.0 <= c <= 1.0:
            raise ParameterDomainError("constant profile must lie in [0, 1]")
        return cls(lambda x: np.full(np.shape(x), float(c)), v=v,
                   kind=ProfileKind.CONSTANT, level=float(c), name="constant")

    def __call__(self, x):
        return self.psi(x)

    def check(self, x_large=1e3, n=2001, tol=1e-8):
        """Sampled check of the monotonicity and limit invariants."""
        if self.kind == ProfileKind.CONSTANT:
            return True
        x = np.linspace(-x_large, x_large, n) + self.center
        y = np.asarray(self.psi(x), dtype=float)
        ok = np.all(y >= -tol) and np.all(y <= 1.0 + tol) and np.all(np.diff(y) <= tol)
        if self.kind == ProfileKind.SMOOTH:
            ok = ok and abs(y[0] - 1.0) < 1e-6 and abs(y[-1]) < 1e-6
        return bool(ok)


def _check_eps(eps):
    if not 0.0 < eps < 0.5:
        raise ParameterDomainError(f"eps must lie in (0, 1/2), got {eps}")


@dataclass(frozen=True)
class Bracket:
    eps: float
    x_minus: float
    x_plus: float

    def __post_init__(self):
        if self.x_minus > self.x_plus:
            raise ParameterDomainError("x_minus must not exceed x_plus")


def _crossing(profile, level, start=1.0, limit=1e8):
    f = lambda x: float(profile.psi(x)) - level
    half = start
    while half <= limit:
        lo, hi = profile.center - half, profile.center + half
        if f(lo) > 0 > f(hi):
            return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        half *= 2.0
    raise BracketNotFound(f"profile never crosses {level} within +-{limit}")


def make_step_waves(profile, eps):
    """Lower and upper step waves sandwiching ``profile``, plus their bracket.

    ``x_plus`` solves ``psi = eps`` and ``x_minus`` solves ``psi = 1 - eps``.
    """
    _check_eps(eps)
    x_plus = _crossing(profile, eps)
    x_minus = _crossing(profile, 1.0 - eps)
    bracket = Bracket(eps, x_minus, x_plus)
    lower = WaveProfile.lower_step(eps, x_minus, profile.v)
    upper = WaveProfile.upper_step(eps, x_plus, profile.v)
    return lower, upper, bracket


# -- tau quadrature ---------------------------------------------------------

def _panels(edges, order=16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    keep = half > 0
    half, mid = half[keep], mid[keep]
    return ((mid[:, None] + half[:, None] * x).ravel(),
            (half[:, None] * w).ravel())


def _tau_edges(tau_max, fine=None, fine_step=None, n_uniform=128, n_geo=24):
    """Panel edges on ``[0, tau_max]``: geometric near 0, uniform elsewhere,
    and a refined window ``fine = (a, b)`` if given."""
    geo = tau_max * 2.0 ** -np.arange(n_geo, 6, -1)
    uniform = np.linspace(0.0, tau_max, n_uniform + 1)
    edges = [0.0, *geo, *uniform[1:]]
    if fine is not None:
        a, b = max(0.0, fine[0]), min(tau_max, fine[1])
        if b > a:
            n = max(1, int(math.ceil((b - a) / fine_step)))
            edges = [e for e in edges if e < a or e > b] + list(np.linspace(a, b, n + 1))
    return np.unique(edges)


def _family(mean):
    if mean == "pointwise":
        return (1, 0), (0, 1)
    if mean == "cesaro":
        return (1, 1), (0, 2)
    raise ValueError(f"unknown mean {mean!r}")


def _mixture(profile, spec, x, t, mean, cfg):
    """``int psi(x - v tau) D_t(tau) dtau`` by panel quadrature, for one x."""
    (a, b), (a_s, b_s) = _family(mean)
    scale = t if mean == "cesaro" else 1.0
    tau_max = tail_cutoff(spec, t)
    v = profile.v
    if profile.kind in (ProfileKind.LOWER_STEP, ProfileKind.UPPER_STEP):
        theta = (x - profile.edge) / v
        edges = _tau_edges(tau_max)
        if 0.0 < theta < tau_max:
            edges = np.unique(np.append(edges, theta))
    else:
        c = (x - profile.center) / v
        h = _FINE_HALF_WIDTHS * profile.width / v
        edges = _tau_edges(tau_max, fine=(c - h, c + h), fine_step=0.5 * profile.width / v)
    nodes, weights = _panels(edges)
    dens, _ = inverse_family(spec, t, nodes, a, b, cfg)
    body = float(weights @ (profile.psi(x - v * nodes) * dens)) / scale
    tail, _ = inverse_family(spec, t, np.array([tau_max]), a_s, b_s, cfg)
    body += float(profile.psi(x - v * tau_max)) * float(tail[0]) / scale
    return body


def _step_value(profile, spec, x, t, mean, cfg):
    """Closed survival combination for step profiles, vectorized over x."""
    _, (a_s, b_s) = _family(mean)
    scale = t if mean == "cesaro" else 1.0
    x = np.asarray(x, dtype=float)
    theta = (x - profile.edge) / profile.v
    pos = theta > 0
    surv = np.ones_like(theta)
    if np.any(pos):
        vals, _ = inverse_family(spec, t, theta[pos], a_s, b_s, cfg)
        surv[pos] = vals / scale
    eps = profile.eps
    if profile.kind == ProfileKind.LOWER_STEP:
        return (1.0 - eps) * surv
    return eps + (1.0 - eps) * surv


def _evaluate(profile, spec, x, t, mean, method, cfg):
    if t < 0:
        raise ParameterDomainError(f"t must be >= 0, got {t}")
    x_arr = np.asarray(x, dtype=float)
    if profile.kind == ProfileKind.CONSTANT:
        out = np.full(x_arr.shape, profile.level)
    elif t == 0:
        # E(0) = 0, and the Cesaro integrand extends continuously to psi(x)
        out = np.asarray(profile.psi(x_arr), dtype=float)
    elif profile.kind != ProfileKind.SMOOTH and method in ("auto", "laplace"):
        out = _step_value(profile, spec, x_arr, t, mean, cfg)
    elif method in ("auto", "quadrature"):
        out = np.vectorize(lambda xi: _mixture(profile, spec, xi, t, mean, cfg),
                           otypes=[float])(x_arr)
    else:
        raise ValueError(f"method {method!r} needs a step profile")
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def subordinate(profile, spec, x, t, method="auto", cfg=laplace.DEFAULT_CONFIG):
    """Subordinated wave ``psi^E(x, t)``; vectorized over ``x``.

    Step profiles use the survival function of ``E(t)`` (``method="laplace"``,
    the default for them) or panel quadrature of the density
    (``method="quadrature"``); smooth profiles always use quadrature.

    Examples
    --------
    >>> from subwave.subordinators import Stable
    >>> w = WaveProfile.lower_step(0.1, 0.0)
    >>> round(subordinate(w, Stable(0.5), 1.0, 1.0), 6)
    0.43155
    """
    return _evaluate(profile, spec, x, t, "pointwise", method, cfg)


def cesaro_wave(profile, spec, x, t, method="auto", cfg=laplace.DEFAULT_CONFIG):
    """Cesaro mean ``(1/t) int_0^t psi^E(x, s) ds`` computed in the Laplace domain.

    The time integral becomes a factor ``1/lam`` in the transform, so this
    costs one inversion per quadrature node, the same as :func:`subordinate`.
    """
    return _evaluate(profile, spec, x, t, "cesaro", method, cfg)


def tauberian_wave(profile, spec, x, t):
    """Leading-order Tauberian value of the Cesaro mean of ``psi^E``.

    Applying ``F(1/t)/t`` to the t-transform of ``psi^E`` amounts to
    subordinating ``psi`` by an exponential law of rate ``Phi(1/t)``.
    """
    if not t > 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    rate = laplace_exponent(spec, 1.0 / t)
    x_arr = np.asarray(x, dtype=float)

    if profile.kind == ProfileKind.CONSTANT:
        out = np.full(x_arr.shape, profile.level)
    elif profile.kind != ProfileKind.SMOOTH:
        theta = np.maximum((x_arr - profile.edge) / profile.v, 0.0)
        surv = np.exp(-rate * theta)
        eps = profile.eps
        out = (1.0 - eps) * surv if profile.kind == ProfileKind.LOWER_STEP \
            else eps + (1.0 - eps) * surv
    else:
        def one(xi):
            c = max((xi - profile.center) / profile.v, 0.0)
            g = lambda u: float(profile.psi(xi - profile.v * u / rate)) * math.exp(-u)
            # u = rate * tau
            u_c = c * rate
            head, _ = integrate.quad(g, 0.0, u_c, epsabs=1e-13, limit=200) if u_c > 0 else (0.0, 0.0)
            tail, _ = integrate.quad(g, u_c, np.inf, epsabs=1e-13, limit=200)
            return head + tail

        out = np.vectorize(one, otypes=[float])(x_arr)
    return float(out) if np.ndim(out) == 0 else out


def cesaro_mean(g, t, quad_tol=1e-10):
    """``(1/t) int_0^t g(s) ds`` by adaptive quadrature.

    An integrable singularity of ``g`` at 0 is allowed; ``g`` is never
    evaluated at ``s = 0`` itself.
    """
    if not t > 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    val, err = integrate.quad(lambda s: float(g(s)), 0.0, t, epsabs=quad_tol * t,
                              epsrel=0.0, limit=500)
    if not math.isfinite(val) or err > quad_tol * t:
        raise NumericalFailure("Cesaro quadrature missed its tolerance", estimate=err / t)
    return val / t


# -- fronts -----------------------------------------------------------------

class Side(str, Enum):
    EXACT = "exact"
    LOWER_WAVE = "lower"
    UPPER_WAVE = "upper"


def front_position(wave, beta, t, x_lo, x_hi, xtol=5e-10):
    """Solve ``wave(x, t) = beta`` for ``x`` in ``[x_lo, x_hi]``.

    ``wave`` must be nonincreasing in ``x``. Brent's method stops once the
    bracket is below ``xtol * max(1, |x|)``.

    Raises
    ------
    LevelNotAttained
        ``beta`` is not between ``wave(x_hi, t)`` and ``wave(x_lo, t)``.
    """
    f_lo = float(wave(x_lo, t)) - beta
    f_hi = float(wave(x_hi, t)) - beta
    if f_lo == 0.0:
        return float(x_lo)
    if f_hi == 0.0:
        return float(x_hi)
    if not (f_lo > 0.0 > f_hi):
        raise LevelNotAttained(
            f"level {beta} not bracketed on [{x_lo}, {x_hi}] at t={t}")
    return float(optimize.brentq(lambda x: float(wave(x, t)) - beta, x_lo, x_hi,
                                 xtol=xtol, rtol=xtol))


@dataclass(frozen=True)
class FrontSearch:
    """Initial search window and how far it may be widened."""

    x_lo: float = -10.0
    x_hi: float = 10.0
    grow: float = 2.0
    max_grow: int = 60


@dataclass
class FrontTrace:
    beta: float
    t_values: np.ndarray
    x_values: np.ndarray
    side: Side = Side.EXACT

    def __post_init__(self):
        self.t_values = np.asarray(self.t_values, dtype=float)
        self.x_values = np.asarray(self.x_values, dtype=float)
        if self.t_values.shape != self.x_values.shape:
            raise ParameterDomainError("t and x lengths differ")
        if not 0.0 < self.beta < 1.0:
            raise ParameterDomainError("beta must lie in (0, 1)")

    def __len__(self):
        return self.t_values.size

    @property
    def valid(self):
        return np.isfinite(self.x_values)

    def to_csv(self, header_lines=()):
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x_beta", "beta", "side"])
        for t, x in zip(self.t_values, self.x_values):
            w.writerow([repr(float(t)), repr(float(x)), repr(self.beta), Side(self.side).value])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(line for line in text.splitlines()
                                   if not line.startswith("#")))
        if not rows:
            raise ParameterDomainError("empty front trace")
        return cls(float(rows[0]["beta"]),
                   [float(r["t"]) for r in rows],
                   [float(r["x_beta"]) for r in rows],
                   Side(rows[0]["side"]))


def _widen(wave, beta, t, lo, hi, search):
    for _ in range(search.max_grow):
        f_lo = float(wave(lo, t)) - beta
        f_hi = float(wave(hi, t)) - beta
        if f_lo >= 0.0 >= f_hi:
            return lo, hi
        width = hi - lo
        if f_lo < 0.0:
            lo -= search.grow * width
        if f_hi > 0.0:
            hi += search.grow * width
    raise LevelNotAttained(f"could not bracket level {beta} at t={t}")


def front_trace(wave, beta, t_grid, search=FrontSearch(), side=Side.EXACT):
    """Front positions over ``t_grid``, warm-starting each bracket.

    Points where the level cannot be bracketed or the wave evaluation fails
    are stored as NaN rather than aborting the trace.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise ParameterDomainError("t grid must be increasing")
    xs = np.full(t_grid.shape, np.nan)
    prev = None
    for n, t in enumerate(t_grid):
        if prev is None:
            lo, hi = search.x_lo, search.x_hi
        else:
            pad = max(1.0, 0.25 * abs(prev))
            lo, hi = prev - pad, prev + pad
        try:
            lo, hi = _widen(wave, beta, t, lo, hi, search)
            xs[n] = front_position(wave, beta, t, lo, hi)
            prev = xs[n]
        except (LevelNotAttained, NumericalFailure):
            continue
    return FrontTrace(beta, t_grid, xs, side)
