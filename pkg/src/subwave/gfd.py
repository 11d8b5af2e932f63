"""General fractional derivatives on uniform time grids.

For ``u`` absolutely continuous,

    (D^(k) u)(t) = d/dt int_0^t k(t - s) u(s) ds - k(t) u(0)
                 = int_0^t k(t - s) u'(s) ds.

With ``u`` replaced by its piecewise-linear interpolant the right-hand side
is a finite sum of slopes times cell integrals of ``k``:

    sum_j  slope_j * [K1(t_i - t_j) - K1(t_i - t_{j+1})],  K1(s) = int_0^s k.

The scheme is exact for piecewise-linear ``u`` whenever ``K1`` is exact,
which it is for the Caputo kernel.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import NumericalFailure, ParameterDomainError

__all__ = [
    "TimeGridFunction",
    "apply_gfd",
    "caputo",
    "caputo_primitive",
    "distributed_kernel",
    "distributed_primitive",
    "distributed_order",
]


@dataclass(frozen=True)
class TimeGridFunction:
    """Samples ``u(t_n)`` on ``t_n = n h``, ``n = 0..N``."""

    h: float
    u_values: np.ndarray

    def __post_init__(self):
        if not self.h > 0:
            raise ParameterDomainError(f"step must be positive, got {self.h}")
        u = np.asarray(self.u_values, dtype=float)
        if u.ndim != 1 or u.size < 2:
            raise ParameterDomainError("need at least two samples")
        object.__setattr__(self, "u_values", u)

    @classmethod
    def sample(cls, u, t_max, n):
        """Tabulate the callable ``u`` on ``n`` cells covering ``[0, t_max]``."""
        t = np.linspace(0.0, t_max, n + 1)
        return cls(t_max / n, np.asarray(u(t), dtype=float))

    @property
    def t_values(self):
        return self.h * np.arange(self.u_values.size)

    def __add__(self, other):
        self._same_grid(other)
        return TimeGridFunction(self.h, self.u_values + other.u_values)

    def __rmul__(self, c):
        return TimeGridFunction(self.h, c * self.u_values)

    def _same_grid(self, other):
        if other.h != self.h or other.u_values.size != self.u_values.size:
            raise ParameterDomainError("grid functions live on different grids")


def _quad_primitive(k):
    """Cell integrals of ``k`` by QUADPACK; the singular cell is ``[0, h]``."""

    def cells(lo, hi):
        out = np.empty(lo.size)
        for n, (a, b) in enumerate(zip(lo, hi)):
            val, err = integrate.quad(k, a, b, epsabs=1e-13, epsrel=1e-11, limit=200)
            if not math.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
                raise NumericalFailure(f"kernel integral over [{a}, {b}] failed",
                                       estimate=err)
            out[n] = val
        return out

    return cells


def _from_primitive(K1):
    def cells(lo, hi):
        return K1(hi) - K1(lo)

    return cells


def apply_gfd(k, u, i, k_primitive=None):
    """Approximate ``(D^(k) u)(t_i)`` on the grid of ``u``.

    Parameters
    ----------
    k : callable
        Kernel, locally integrable at 0. Only used when ``k_primitive`` is
        absent, in which case each cell integral is done by quadrature.
    u : TimeGridFunction
    i : int
        Grid index, ``1 <= i <= N``.
    k_primitive : callable, optional
        Vectorized ``K1(s) = int_0^s k``; takes priority over ``k``.

    Returns
    -------
    float
    """
    n_max = u.u_values.size - 1
    if not 1 <= i <= n_max:
        raise ParameterDomainError(f"index must lie in [1, {n_max}], got {i}")
    slopes = np.diff(u.u_values[: i + 1]) / u.h
    if not np.any(slopes):
        return 0.0
    # cell j covers lags [t_i - t_{j+1}, t_i - t_j]
    lag_hi = u.h * (i - np.arange(i))
    lag_lo = lag_hi - u.h
    cells = _from_primitive(k_primitive) if k_primitive is not None else _quad_primitive(k)
    return float(math.fsum(slopes * cells(lag_lo, lag_hi)))


def caputo_primitive(alpha):
    """``K1(s) = s**(1-alpha) / Gamma(2-alpha)`` for the Caputo kernel."""
    g = special.gamma(2.0 - alpha)
    return lambda s: np.asarray(s, dtype=float) ** (1.0 - alpha) / g


def caputo(alpha, u, i):
    """Caputo derivative of order ``alpha`` at ``t_i``."""
    if not 0.0 < alpha < 1.0:
        raise ParameterDomainError(f"alpha must lie in (0, 1), got {alpha}")
    g = special.gamma(1.0 - alpha)
    return apply_gfd(lambda t: t ** -alpha / g, u, i, caputo_primitive(alpha))


def _weight_integral(weight, f, what):
    if weight.kind == "const" and weight.mu0 == 0.0:
        return 0.0
    val, err = integrate.quad(lambda r: f(r) * float(weight.mu(r)), 0.0, 1.0,
                              epsabs=1e-12, epsrel=1e-12, limit=200)
    if err > 1e-10 * max(1.0, abs(val)):
        raise NumericalFailure(f"{what} quadrature missed tolerance", estimate=err)
    return val


def distributed_kernel(weight, t):
    """``k(t) = int_0^1 t**-r / Gamma(1-r) mu(r) dr``; vectorized over ``t``.

    ``1/Gamma(1-r)`` vanishes at ``r = 1``, so the integrand is bounded.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ParameterDomainError("distributed kernel needs t > 0")
    out = np.array([
        _weight_integral(weight, lambda r, s=s: s ** -r * special.rgamma(1.0 - r),
                         "distributed kernel")
        for s in t_arr.reshape(-1)
    ]).reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def distributed_primitive(weight):
    """``K1(s) = int_0^1 s**(1-r) / Gamma(2-r) mu(r) dr`` (vectorized)."""

    def K1(s):
        s_arr = np.asarray(s, dtype=float)
        out = np.array([
            0.0 if x == 0.0 else _weight_integral(
                weight, lambda r, x=x: x ** (1.0 - r) * special.rgamma(2.0 - r),
                "distributed primitive")
            for x in s_arr.reshape(-1)
        ])
        return out.reshape(s_arr.shape)

    return K1


def distributed_order(weight, u, i):
    """Distributed-order derivative with weight ``mu`` at ``t_i``."""
    return apply_gfd(lambda t: distributed_kernel(weight, t), u, i,
                     distributed_primitive(weight))
