"""Subordinator and kernel models, and the inverse-subordinator density.

A driftless subordinator ``S`` has Laplace exponent
``Phi(lam) = lam * K(lam)``, where ``K`` is the Laplace transform of the
Levy tail ``k(t) = sigma((t, inf))``. The first-passage process
``E(t) = inf{s : S(s) >= t}`` has density ``G_t(tau)`` whose t-Laplace
transform is ``K(lam) exp(-tau lam K(lam))``; every time-domain quantity
below is obtained by inverting a member of the family

    K(lam)**a * lam**-b * exp(-tau * lam * K(lam))

at fixed ``t`` for a vector of ``tau`` values (see :func:`inverse_family`).
"""
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from . import laplace
from .errors import NumericalFailure, ParameterDomainError, UnsupportedRepresentation

__all__ = [
    "KernelClass",
    "Weight",
    "SubordinatorSpec",
    "Stable",
    "GammaSubordinator",
    "DistributedOrder",
    "LaplaceSymbolOnly",
    "DensityGrid",
    "ClassReport",
    "laplace_exponent",
    "kernel_k",
    "kernel_laplace",
    "density_G",
    "survival_E",
    "density_grid",
    "total_mass",
    "verify_class",
    "inverse_family",
    "tail_cutoff",
    "spec_from_dict",
    "spec_to_dict",
]

# Gauss rule size for weight integrals at complex lambda
_WEIGHT_NODES = 96


class KernelClass(str, Enum):
    C1 = "C1"  # K ~ lam**(alpha-1)
    C2 = "C2"  # K ~ mu0 / (lam log(1/lam))
    C3 = "C3"  # K ~ C / (lam log(1/lam)**(1+s))
    UNCLASSIFIED = "Unclassified"


@lru_cache(maxsize=32)
def _jacobi_rule(n, s):
    """Nodes/weights for ``int_0^1 tau**s f(tau) dtau``."""
    x, w = special.roots_jacobi(n, 0.0, s)
    return (x + 1.0) / 2.0, w / 2.0 ** (s + 1.0)


@dataclass(frozen=True)
class Weight:
    """Order weight ``mu`` on ``[0, 1]`` of a distributed-order kernel.

    ``kind`` is ``"const"`` (``mu = mu0``), ``"power"`` (``mu = tau**s``)
    or ``"custom"`` (arbitrary continuous ``func``).
    """

    kind: str
    mu0: float = 0.0
    s: float = 0.0
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "const":
            if self.mu0 < 0:
                raise ParameterDomainError("constant weight must be nonnegative")
        elif self.kind == "power":
            if self.s <= 0:
                raise ParameterDomainError("power weight needs s > 0")
            object.__setattr__(self, "mu0", 0.0)
        elif self.kind == "custom":
            if self.func is None:
                raise ParameterDomainError("custom weight needs a function")
            mu0 = float(self.func(0.0))
            if mu0 < 0:
                raise ParameterDomainError("weight must be nonnegative")
            object.__setattr__(self, "mu0", mu0)
        else:
            raise ParameterDomainError(f"unknown weight kind {self.kind!r}")

    @classmethod
    def const(cls, mu0=1.0):
        return cls("const", mu0=float(mu0))

    @classmethod
    def power(cls, s):
        return cls("power", s=float(s))

    @classmethod
    def custom(cls, func):
        return cls("custom", func=func)

    def mu(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.kind == "const":
            return np.full_like(tau, self.mu0)
        if self.kind == "power":
            return tau ** self.s
        return np.vectorize(self.func, otypes=[float])(tau)

    def rule(self, n=_WEIGHT_NODES):
        """``(nodes, weights)`` with ``int_0^1 mu f ~= sum(weights * f(nodes))``."""
        if self.kind == "power":
            return _jacobi_rule(n, self.s)
        x, w = _jacobi_rule(n, 0.0)
        return x, w * self.mu(x)

    def to_dict(self):
        if self.kind == "const":
            return {"kind": "const", "mu0": self.mu0}
        if self.kind == "power":
            return {"kind": "power", "s": self.s}
        raise UnsupportedRepresentation("custom weights are not serializable")


@dataclass(frozen=True)
class SubordinatorSpec:
    """Base class of the subordinator models.

    Subclasses implement ``_K`` (vectorized, complex-safe) and, when a Levy
    measure is known, ``_k`` and ``levy_density``.
    """

    @property
    def class_tag(self):
        return KernelClass.UNCLASSIFIED

    @property
    def class_params(self):
        return {}

    def _K(self, lam):
        raise NotImplementedError

    def _k(self, t):
        raise UnsupportedRepresentation(
            f"{type(self).__name__} has no Levy-measure representation")

    def levy_density(self, tau):
        raise UnsupportedRepresentation(
            f"{type(self).__name__} has no Levy-measure representation")

    def K(self, lam):
        """Vectorized ``K(lam)``; accepts complex input."""
        return self._K(np.asarray(lam))

    def phi(self, lam):
        """Vectorized Laplace exponent ``lam * K(lam)`` (``0`` at ``0``)."""
        lam = np.asarray(lam)
        out = np.zeros(lam.shape, dtype=np.result_type(lam, float))
        nz = lam != 0
        out[nz] = lam[nz] * self._K(lam[nz])
        return out


@dataclass(frozen=True)
class Stable(SubordinatorSpec):
    """``alpha``-stable subordinator: ``Phi(lam) = lam**alpha``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterDomainError(f"stable index must lie in (0, 1), got {self.alpha}")

    @property
    def class_tag(self):
        return KernelClass.C1

    @property
    def class_params(self):
        return {"alpha": self.alpha}

    def _K(self, lam):
        return lam ** (self.alpha - 1.0)

    def _k(self, t):
        return t ** -self.alpha / math.gamma(1.0 - self.alpha)

    def levy_density(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.alpha / math.gamma(1.0 - self.alpha) * tau ** (-1.0 - self.alpha)


@dataclass(frozen=True)
class GammaSubordinator(SubordinatorSpec):
    """Gamma process: ``Phi(lam) = a log(1 + lam/b)``, Levy density ``a e^{-b t}/t``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ParameterDomainError("Gamma subordinator needs a, b > 0")

    def _K(self, lam):
        x = lam / self.b
        small = np.abs(x) < 1e-8
        safe = np.where(small, 1.0, x)
        # log1p(x)/x -> 1 - x/2 near 0
        ratio = np.where(small, 1.0 - x / 2.0, np.log1p(safe) / safe)
        return self.a / self.b * ratio

    def _k(self, t):
        return self.a * special.exp1(self.b * t)

    def levy_density(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.a * np.exp(-self.b * tau) / tau


def _dist_const_K(lam, mu0):
    """``mu0 (lam - 1) / (lam log lam)``, stable near ``lam = 1``."""
    u = lam - 1.0
    near = np.abs(u) < 1e-4
    safe_lam = np.where(near, 2.0, lam)
    regular = (safe_lam - 1.0) / (safe_lam * np.log(safe_lam))
    # (lam-1)/log(lam) = 1 + u/2 - u^2/12 + u^3/24
    series = (1.0 + u / 2.0 - u * u / 12.0 + u ** 3 / 24.0) / lam
    return mu0 * np.where(near, series, regular)


@dataclass(frozen=True)
class DistributedOrder(SubordinatorSpec):
    """Distributed-order kernel ``k(t) = int_0^1 t**-tau / Gamma(1-tau) mu(tau) dtau``.

    ``K(lam) = int_0^1 lam**(tau-1) mu(tau) dtau``: closed form for a constant
    weight, Gauss--Jacobi quadrature otherwise (exact weight ``tau**s``).
    """

    weight: Weight

    def __post_init__(self):
        if self.weight.kind == "const" and self.weight.mu0 <= 0:
            raise ParameterDomainError("distributed order needs a nonzero weight")

    @property
    def class_tag(self):
        if self.weight.kind == "power":
            return KernelClass.C3
        if self.weight.mu0 > 0:
            return KernelClass.C2
        return KernelClass.UNCLASSIFIED

    @property
    def class_params(self):
        if self.weight.kind == "power":
            return {"C": math.gamma(self.weight.s + 1.0), "s": self.weight.s}
        if self.weight.mu0 > 0:
            return {"mu0": self.weight.mu0}
        return {}

    def _K(self, lam):
        if self.weight.kind == "const":
            return _dist_const_K(lam, self.weight.mu0)
        nodes, w = self.weight.rule()
        lam = np.asarray(lam)
        log_lam = np.log(lam.astype(complex) if np.iscomplexobj(lam) else lam)
        vals = np.exp(np.multiply.outer(log_lam, nodes - 1.0)) @ w
        return vals

    def _k(self, t):
        from .gfd import distributed_kernel

        return distributed_kernel(self.weight, t)

    def levy_density(self, tau):
        """``-k'(t) = int_0^1 tau t**(-tau-1) / Gamma(1-tau) mu(tau) dtau``."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.empty_like(tau)
        for i, t in enumerate(tau):
            out[i] = integrate.quad(
                lambda r: r * t ** (-r - 1.0) * special.rgamma(1.0 - r) * float(self.weight.mu(r)),
                0.0, 1.0, epsabs=1e-13, limit=200)[0]
        return out if out.size > 1 else float(out[0])


@dataclass(frozen=True)
class LaplaceSymbolOnly(SubordinatorSpec):
    """Model known only through ``K``; must accept complex arrays.

    Complete monotonicity of the implied kernel is not checked, so densities
    computed from such a model are reported, not certified.
    """

    symbol: Callable = field(compare=False)
    tag: KernelClass = KernelClass.UNCLASSIFIED
    params: dict = field(default_factory=dict, compare=False)

    @property
    def class_tag(self):
        return self.tag

    @property
    def class_params(self):
        return dict(self.params)

    def _K(self, lam):
        return np.asarray(self.symbol(lam))


# --------------------------------------------------------------------------
# operations


def laplace_exponent(spec, lam):
    """``Phi(lam) = lam K(lam)``, with ``Phi(0) = 0``."""
    if lam < 0:
        raise ParameterDomainError(f"lambda must be >= 0, got {lam}")
    if lam == 0:
        return 0.0
    return float(np.real(lam * spec.K(float(lam))))


def kernel_k(spec, t):
    """Levy tail ``k(t) = sigma((t, inf))``."""
    if not t > 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    return float(spec._k(float(t)))


def kernel_laplace(spec, lam):
    """``K(lam)`` for real ``lam > 0``.

    Distributed-order weights are integrated adaptively (absolute tolerance
    1e-12) here, independently of the fixed Gauss rule used along complex
    inversion contours.
    """
    if not lam > 0:
        raise ParameterDomainError(f"lambda must be positive, got {lam}")
    lam = float(lam)
    if isinstance(spec, DistributedOrder) and spec.weight.kind != "const":
        w = spec.weight
        val, err = integrate.quad(lambda r: lam ** (r - 1.0) * float(w.mu(r)),
                                  0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
        if err > 1e-10 * max(1.0, abs(val)):
            raise NumericalFailure("distributed-order K quadrature failed", estimate=err)
        return val
    return float(np.real(spec.K(lam)))


def tail_cutoff(spec, t, level=1e-10):
    """``tau_max`` with ``exp(-tau_max Phi(1/t)) = level``."""
    return -math.log(level) / laplace_exponent(spec, 1.0 / t)


def inverse_family(spec, t, tau, a=1, b=0, cfg=laplace.DEFAULT_CONFIG):
    """Invert ``K**a lam**-b exp(-tau lam K)`` at ``t`` for every ``tau``.

    Returns ``(values, error_estimate)`` shaped like ``tau``. ``(a, b)``:
    ``(1, 0)`` density, ``(0, 1)`` survival, ``(1, 1)`` and ``(0, 2)`` the
    time-integrated density and survival (divide by ``t`` for Cesaro means).
    """
    tau = np.asarray(tau, dtype=float)
    flat = tau.reshape(-1)

    def make(cols):
        def F(lam):
            K = spec.K(lam)
            phi = lam * K
            pref = (K ** a) * lam ** (-b)
            return pref[:, None] * np.exp(-np.multiply.outer(phi, cols))
        return F

    what = f"inverse family (a={a}, b={b}) for {spec!r}"
    value, est = laplace.invert_family(make(flat), t, cfg, what,
                                       restrict=lambda mask: make(flat[mask]))
    return value.reshape(tau.shape), est.reshape(tau.shape)


def _stable_half_density(t, tau):
    return np.exp(-tau ** 2 / (4.0 * t)) / np.sqrt(math.pi * t)


def density_G(spec, t, tau, cfg=laplace.DEFAULT_CONFIG):
    """Density ``G_t(tau)`` of ``E(t)``; vectorized over ``tau``.

    ``Stable(1/2)`` uses the closed form ``exp(-tau^2/4t)/sqrt(pi t)``; all
    other models invert ``K exp(-tau lam K)`` numerically.

    Raises
    ------
    NumericalFailure
        The inverter's error estimate exceeded its target; the exception
        carries the estimate.
    """
    if t == 0:
        raise ParameterDomainError("G_0 is a point mass at 0 and has no density")
    if not t > 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ParameterDomainError("tau must be >= 0")
    if isinstance(spec, Stable) and spec.alpha == 0.5:
        out = _stable_half_density(t, tau_arr)
    else:
        out, _ = inverse_family(spec, t, tau_arr, 1, 0, cfg)
    return float(out) if out.ndim == 0 else out


def _survival_quadrature(spec, t, theta, cfg):
    tau_max = tail_cutoff(spec, t)
    if theta >= tau_max:
        return 0.0

    def g(x):
        return float(inverse_family(spec, t, x, 1, 0, cfg)[0])

    val, _ = integrate.quad(g, theta, tau_max, epsabs=1e-12, epsrel=1e-11, limit=400)
    return val


def survival_E(spec, t, theta, method="laplace", cfg=laplace.DEFAULT_CONFIG):
    """``P(E(t) > theta) = int_theta^inf G_t``; vectorized over ``theta``.

    ``method="laplace"`` inverts ``lam**-1 exp(-theta lam K)`` directly;
    ``method="quadrature"`` integrates the density up to the tail cutoff
    :func:`tail_cutoff`. At ``t = 0`` the law of ``E`` is a point mass at 0.
    """
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < 0):
        raise ParameterDomainError("theta must be >= 0")
    if t < 0:
        raise ParameterDomainError(f"t must be >= 0, got {t}")
    if t == 0:
        out = (theta_arr == 0).astype(float)
    elif method == "laplace":
        out, _ = inverse_family(spec, t, theta_arr, 0, 1, cfg)
    elif method == "quadrature":
        out = np.vectorize(lambda th: _survival_quadrature(spec, t, th, cfg))(theta_arr)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class DensityGrid:
    t_values: np.ndarray
    tau_values: np.ndarray
    values: np.ndarray  # shape (len(t_values), len(tau_values))
    est_abs_error: float

    def masses(self):
        """Trapezoid mass over the tau grid, one entry per time."""
        return np.array([
            np.trapezoid(row, self.tau_values) for row in self.values
        ])


def density_grid(spec, t_values, tau_values, cfg=laplace.DEFAULT_CONFIG):
    t_values = np.sort(np.asarray(t_values, dtype=float))
    tau_values = np.sort(np.asarray(tau_values, dtype=float))
    rows, err = [], 0.0
    for t in t_values:
        if isinstance(spec, Stable) and spec.alpha == 0.5:
            rows.append(_stable_half_density(t, tau_values))
            continue
        vals, est = inverse_family(spec, t, tau_values, 1, 0, cfg)
        rows.append(vals)
        err = max(err, float(np.max(est)))
    return DensityGrid(t_values, tau_values, np.array(rows), err)


def _gauss_panels(lo, hi, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def total_mass(spec, t, panels=128, order=16, cfg=laplace.DEFAULT_CONFIG):
    """``int_0^inf G_t(tau) dtau`` by composite Gauss--Legendre on ``[0, tau_max]``.

    The mass beyond :func:`tail_cutoff` is added from :func:`survival_E`.
    Returns ``(mass, error_estimate)``; the estimate compares against a
    rule with half as many panels and adds the inverter's own estimate.
    """
    tau_max = tail_cutoff(spec, t)
    x, w = _gauss_panels(0.0, tau_max, panels, order)
    x2, w2 = _gauss_panels(0.0, tau_max, panels // 2, order)
    g, est = inverse_family(spec, t, np.concatenate([x, x2]), 1, 0, cfg)
    fine = float(w @ g[:x.size])
    coarse = float(w2 @ g[x.size:])
    tail = float(survival_E(spec, t, tau_max, cfg=cfg))
    err = abs(fine - coarse) + float(np.abs(w) @ est[:x.size])
    return fine + tail, err


@dataclass
class ClassReport:
    tag: KernelClass
    lam: np.ndarray
    ratios: np.ndarray
    tolerance: float
    passed: bool


def class_asymptote(tag, params, lam):
    lam = np.asarray(lam, dtype=float)
    if tag == KernelClass.C1:
        return lam ** (params["alpha"] - 1.0)
    y = np.log(1.0 / lam)
    if tag == KernelClass.C2:
        return params["mu0"] / (lam * y)
    if tag == KernelClass.C3:
        return params["C"] / (lam * y ** (1.0 + params["s"]))
    raise ParameterDomainError(f"no asymptote for class {tag}")


def verify_class(spec, lam_grid, tag=None, params=None, tolerance=0.05):
    """Compare ``K(lam)`` with a class asymptote along a decreasing grid.

    Passes when the last ratio is within ``tolerance`` of 1 and the distance
    to 1 does not grow along the grid.
    """
    tag = KernelClass(tag) if tag is not None else spec.class_tag
    params = spec.class_params if params is None else params
    lam = np.asarray(lam_grid, dtype=float)
    K = np.array([kernel_laplace(spec, x) for x in lam])
    try:
        ratios = K / class_asymptote(tag, params, lam)
    except (KeyError, ParameterDomainError):
        return ClassReport(tag, lam, np.full_like(lam, np.nan), tolerance, False)
    dist = np.abs(ratios - 1.0)
    passed = bool(dist[-1] <= tolerance and np.all(np.diff(dist) <= 1e-12))
    return ClassReport(tag, lam, ratios, tolerance, passed)


# --------------------------------------------------------------------------
# JSON form


def spec_to_dict(spec):
    if isinstance(spec, Stable):
        return {"variant": "stable", "alpha": spec.alpha}
    if isinstance(spec, GammaSubordinator):
        return {"variant": "gamma", "a": spec.a, "b": spec.b}
    if isinstance(spec, DistributedOrder):
        return {"variant": "distributed", "weight": spec.weight.to_dict()}
    raise UnsupportedRepresentation(f"{type(spec).__name__} is not serializable")


def spec_from_dict(d):
    """Build a spec from its JSON object form."""
    if isinstance(d, str):
        d = json.loads(d)
    try:
        variant = d["variant"]
        if variant == "stable":
            return Stable(float(d["alpha"]))
        if variant == "gamma":
            return GammaSubordinator(float(d["a"]), float(d["b"]))
        if variant == "distributed":
            w = d["weight"]
            if w["kind"] == "const":
                return DistributedOrder(Weight.const(w["mu0"]))
            if w["kind"] == "power":
                return DistributedOrder(Weight.power(w["s"]))
            raise ParameterDomainError(f"unknown weight kind {w['kind']!r}")
    except KeyError as exc:
        raise ParameterDomainError(f"missing key {exc} in spec") from None
    raise ParameterDomainError(f"unknown variant {d.get('variant')!r}")
