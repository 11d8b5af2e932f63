"""Closed-form special functions used as independent oracles.

* :func:`mittag_leffler` -- one-parameter Mittag-Leffler function on the
  negative real axis,
* :func:`wright` -- the M-Wright function ``W_{-a,1-a}(-z)``, which is the
  density of the inverse ``a``-stable subordinator at unit time,
* :func:`exp_integral_e1` -- the exponential integral ``E_1``.

The alternating power series of the first two lose all precision once their
largest term grows, so each function switches to a nonnegative integral
representation (and, for Mittag-Leffler, to the algebraic asymptotic
expansion far out on the axis).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import NumericalFailure, ParameterDomainError

__all__ = ["SeriesAccuracy", "mittag_leffler", "wright", "exp_integral_e1"]

# largest tolerated series term; above it cancellation costs > ~1e-13
_SERIES_TERM_LIMIT = 10.0
ML_ASYMPTOTIC_SWITCH = 50.0


@dataclass(frozen=True)
class SeriesAccuracy:
    abs_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ParameterDomainError("abs_tol must be positive")
        if self.max_terms < 1:
            raise ParameterDomainError("max_terms must be >= 1")


_DEFAULT = SeriesAccuracy()


def _series(log_abs_term, sign_term, acc, log_envelope=None):
    """Sum ``sum_n sign_n * exp(log_abs_n)`` if it is numerically safe.

    ``log_envelope(n)`` bounds the log term size from above; it drives the
    stopping rule so that accidentally tiny terms do not end the sum early.
    Returns ``None`` when the largest term exceeds the cancellation limit or
    the tail does not drop below ``abs_tol`` within ``max_terms``.
    """
    if log_envelope is None:
        log_envelope = log_abs_term
    terms = []
    peak = -math.inf
    limit = math.log(_SERIES_TERM_LIMIT)
    for n in range(acc.max_terms):
        env = log_envelope(n)
        peak = max(peak, env)
        if peak > limit:
            return None
        la = log_abs_term(n)
        if la > -math.inf:
            terms.append(sign_term(n) * math.exp(la))
        if env < peak and math.exp(env) < acc.abs_tol * 1e-4:
            return math.fsum(terms)
    return None


def _ml_series(alpha, x, acc):
    y = -x
    lx = math.log(y)
    return _series(lambda n: n * lx - math.lgamma(n * alpha + 1.0),
                   lambda n: -1.0 if n % 2 else 1.0, acc)


def _ml_asymptotic(alpha, x, acc):
    """``E_a(x) ~ -sum_k x^-k / Gamma(1 - k a)`` for ``x -> -inf``.

    Returns ``(value, error_estimate)``; the estimate is the first omitted
    term, or ``inf`` if the terms never get small enough.
    """
    terms = []
    prev = math.inf
    for k in range(1, 400):
        term = -(x ** -k) * special.rgamma(1.0 - k * alpha)
        a = abs(term)
        if a == 0.0:
            continue
        if a > prev:
            return math.fsum(terms), prev
        if a < acc.abs_tol * 1e-3:
            return math.fsum(terms), a
        terms.append(term)
        prev = a
    return math.fsum(terms), math.inf


def _ml_integral(alpha, x):
    """Completely-monotone representation ``int e^{-r y^{1/a}} K_a(r) dr``.

    Substituting ``u = w**(1/a)`` for ``u = r y**(1/a)`` removes the
    ``u**(a-1)`` singularity at the origin.
    """
    y = -x
    sa, ca = math.sin(alpha * math.pi), math.cos(alpha * math.pi)
    pref = sa / (math.pi * alpha * y)

    def integrand(w):
        q = w / y
        return math.exp(-w ** (1.0 / alpha)) * pref / (q * q + 2.0 * q * ca + 1.0)

    head, e1 = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    tail, e2 = integrate.quad(integrand, 1.0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return head + tail, e1 + e2


def mittag_leffler(alpha, x, accuracy=_DEFAULT):
    """Mittag-Leffler function ``E_alpha(x)`` for ``0 < alpha <= 1``, ``x <= 0``.

    Parameters
    ----------
    alpha : float
        Order in ``(0, 1]``.
    x : float
        Nonpositive argument.
    accuracy : SeriesAccuracy, optional
        Absolute tolerance and series term budget.

    Returns
    -------
    float
        Value in ``(0, 1]``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ParameterDomainError(f"alpha must lie in (0, 1], got {alpha}")
    if x > 0:
        raise ParameterDomainError(f"x must be <= 0, got {x}")
    x = float(x)
    if x == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(x)
    if -x > ML_ASYMPTOTIC_SWITCH:
        value, err = _ml_asymptotic(alpha, x, accuracy)
        if err <= accuracy.abs_tol:
            return value
    else:
        value = _ml_series(alpha, x, accuracy)
        if value is not None:
            return value
    value, err = _ml_integral(alpha, x)
    if err > accuracy.abs_tol:
        raise NumericalFailure(
            f"Mittag-Leffler E_{alpha}({x}) missed abs_tol", estimate=err)
    return value


def _wright_series(alpha, z, acc):
    lz = math.log(z)

    # reflection: 1/Gamma(1-x) = Gamma(x) sin(pi x) / pi, x = alpha*(n+1)
    def log_abs(n):
        x = alpha * (n + 1)
        s = abs(math.sin(math.pi * x))
        if s == 0.0:
            return -math.inf
        return (n * lz - math.lgamma(n + 1.0) + math.lgamma(x)
                + math.log(s) - math.log(math.pi))

    def sign(n):
        s = math.sin(math.pi * alpha * (n + 1))
        return math.copysign(1.0, s) * (-1.0 if n % 2 else 1.0)

    def log_env(n):
        x = alpha * (n + 1)
        return n * lz - math.lgamma(n + 1.0) + math.lgamma(x) - math.log(math.pi)

    return _series(log_abs, sign, acc, log_env)


def _wright_integral(alpha, z):
    c = 1.0 / (1.0 - alpha)
    zc = z ** c

    def shape(phi):
        return ((math.sin(alpha * phi) / math.sin(phi)) ** c
                * math.sin((1.0 - alpha) * phi) / math.sin(alpha * phi))

    def integrand(phi):
        a = shape(phi)
        return a * math.exp(-zc * a)

    # phi -> pi blows shape up; the exponential kills it
    val, err = integrate.quad(integrand, 1e-300, math.pi, epsabs=1e-15,
                              epsrel=1e-13, limit=400)
    pref = z ** (alpha * c) / (math.pi * (1.0 - alpha))
    return pref * val, pref * err


def wright(alpha, z, accuracy=_DEFAULT):
    """M-Wright function ``W_{-alpha, 1-alpha}(-z)`` for ``z >= 0``.

    ``t**-alpha * wright(alpha, tau * t**-alpha)`` is the density of the
    inverse ``alpha``-stable subordinator at time ``t``.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterDomainError(f"alpha must lie in (0, 1), got {alpha}")
    if z < 0:
        raise ParameterDomainError(f"z must be >= 0, got {z}")
    z = float(z)
    if z == 0.0:
        return float(special.rgamma(1.0 - alpha))
    value = _wright_series(alpha, z, accuracy)
    if value is not None:
        return max(value, 0.0)
    value, err = _wright_integral(alpha, z)
    if err > accuracy.abs_tol:
        raise NumericalFailure(f"Wright M_{alpha}({z}) missed abs_tol", estimate=err)
    return value


def exp_integral_e1(x):
    """Exponential integral ``E_1(x) = int_x^inf e^-u / u du`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ParameterDomainError("E_1 requires x > 0")
    out = special.exp1(x)
    return float(out) if out.ndim == 0 else out
