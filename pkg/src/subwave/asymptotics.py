"""Long-time Cesaro asymptotes of the step waves and the front laws they imply.

With ``theta = (x - x_offset)/v`` the Cesaro means of the lower and upper
step waves behave like

    W^-(x, t) = (1 - eps) exp(-theta g(t))
    W^+(x, t) = (1 - eps) exp(-theta g(t)) + eps

where ``g(t) = Phi(1/t)`` to leading order: ``t**-alpha`` (class C1),
``mu0 / log t`` (C2) and ``C log(t)**-(1+s)`` (C3). Solving ``W = beta``
gives fronts ``x = C_side * shape(t) + x_offset`` with shape ``t**alpha``,
``log t`` or ``log(t)**(1+s)``.
"""
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import FitDegenerate, ParameterDomainError
from .subordinators import KernelClass

__all__ = [
    "LawSide",
    "AsymptoticLaw",
    "FitReport",
    "BoundReport",
    "cesaro_asymptote",
    "front_law",
    "law_for",
    "fit_scaling",
    "check_two_sided",
    "DEFAULT_BURN_IN",
    "CORRECTIONS",
]

DEFAULT_BURN_IN = {KernelClass.C1: 1e2, KernelClass.C2: 1e4, KernelClass.C3: 1e4}

# law conventions, recorded in every BoundReport
CORRECTIONS = (
    "upper C1 constant is log((1-eps)/(beta-eps))",
    "upper laws are offset by x_eps^+, lower laws by x_eps^-",
    "C2 constants carry the 1/mu(0) factor on both sides",
)


class LawSide(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class AsymptoticLaw:
    """Leading-order Cesaro asymptote for one class and one side."""

    class_tag: KernelClass
    side: LawSide
    v: float
    eps: float
    beta: float
    x_offset: float = 0.0
    alpha: Optional[float] = None
    mu0: Optional[float] = None
    C: Optional[float] = None
    s: Optional[float] = None

    def __post_init__(self):
        tag = KernelClass(self.class_tag)
        object.__setattr__(self, "class_tag", tag)
        object.__setattr__(self, "side", LawSide(self.side))
        if not self.v > 0:
            raise ParameterDomainError("v must be positive")
        if not 0.0 < self.eps < 0.5:
            raise ParameterDomainError("eps must lie in (0, 1/2)")
        if tag == KernelClass.C1:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ParameterDomainError("C1 law needs alpha in (0, 1)")
        elif tag == KernelClass.C2:
            if self.mu0 is None or not self.mu0 > 0:
                raise ParameterDomainError("C2 law needs mu0 > 0")
        elif tag == KernelClass.C3:
            if self.C is None or not self.C > 0 or self.s is None or not self.s > 0:
                raise ParameterDomainError("C3 law needs C > 0 and s > 0")
        else:
            raise ParameterDomainError("laws exist only for classes C1, C2, C3")
        lo, hi = self.beta_band
        if not lo < self.beta < hi:
            raise ParameterDomainError(
                f"beta={self.beta} outside ({lo}, {hi}) for the {self.side.value} side")

    @property
    def beta_band(self):
        if self.side == LawSide.LOWER:
            return 0.0, 1.0 - self.eps
        return self.eps, 1.0

    def _check_t(self, t):
        t = np.asarray(t, dtype=float)
        if self.class_tag == KernelClass.C1:
            if np.any(t <= 0):
                raise ParameterDomainError("C1 law needs t > 0")
        elif np.any(t <= 1):
            raise ParameterDomainError("log laws need t > 1")
        return t

    def g(self, t):
        """Leading-order ``Phi(1/t)``."""
        t = self._check_t(t)
        if self.class_tag == KernelClass.C1:
            return t ** -self.alpha
        if self.class_tag == KernelClass.C2:
            return self.mu0 / np.log(t)
        return self.C * np.log(t) ** -(1.0 + self.s)

    def shape(self, t):
        t = self._check_t(t)
        if self.class_tag == KernelClass.C1:
            return t ** self.alpha
        if self.class_tag == KernelClass.C2:
            return np.log(t)
        return np.log(t) ** (1.0 + self.s)

    @property
    def log_ratio(self):
        if self.side == LawSide.LOWER:
            return math.log((1.0 - self.eps) / self.beta)
        return math.log((1.0 - self.eps) / (self.beta - self.eps))

    @property
    def C_side(self):
        """The constant in front of the shape: ``C_-`` or ``C_+``."""
        c = self.v * self.log_ratio
        if self.class_tag == KernelClass.C2:
            return c / self.mu0
        if self.class_tag == KernelClass.C3:
            return c / self.C
        return c

    def to_dict(self):
        d = asdict(self)
        d["class_tag"] = self.class_tag.value
        d["side"] = self.side.value
        return d


def law_for(spec, side, v, eps, beta, x_offset=0.0):
    """Build the law matching ``spec.class_tag`` and ``spec.class_params``."""
    tag = spec.class_tag
    p = dict(spec.class_params)
    if tag == KernelClass.C1:
        return AsymptoticLaw(tag, side, v, eps, beta, x_offset, alpha=p["alpha"])
    if tag == KernelClass.C2:
        return AsymptoticLaw(tag, side, v, eps, beta, x_offset, mu0=p["mu0"])
    if tag == KernelClass.C3:
        return AsymptoticLaw(tag, side, v, eps, beta, x_offset, C=p["C"], s=p["s"])
    raise ParameterDomainError(f"{spec!r} has no asymptotic class")


def cesaro_asymptote(law, x, t):
    """``W^-`` or ``W^+`` at ``(x, t)``; requires ``x >= x_offset``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < law.x_offset):
        raise ParameterDomainError("the asymptote is stated for x >= x_offset")
    theta = (x - law.x_offset) / law.v
    out = (1.0 - law.eps) * np.exp(-theta * law.g(t))
    if law.side == LawSide.UPPER:
        out = out + law.eps
    return float(out) if np.ndim(out) == 0 else out


def front_law(law, t):
    """Level-``beta`` front of the asymptote: ``C_side * shape(t) + x_offset``."""
    out = law.C_side * law.shape(t) + law.x_offset
    return float(out) if np.ndim(out) == 0 else out


# -- fitting ----------------------------------------------------------------

@dataclass
class FitReport:
    class_tag: str
    side: str
    fitted: float
    residual: float
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    intercept: float = 0.0

    @property
    def passed(self):
        if self.expected is None or self.tolerance is None:
            return None
        return bool(abs(self.fitted - self.expected) <= self.tolerance)

    def to_dict(self):
        return {"class": self.class_tag, "side": self.side, "fitted": self.fitted,
                "expected": self.expected, "residual": self.residual,
                "pass": self.passed}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _regress(u, y):
    A = np.vstack([u, np.ones_like(u)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ coef
    spread = np.sqrt(np.mean((y - y.mean()) ** 2))
    return coef[0], coef[1], float(np.sqrt(np.mean(res ** 2)) / spread)


def fit_scaling(trace, class_tag, params=None, x_offset=0.0, expected=None,
                tolerance=None):
    """Least-squares fit of a front trace to its class shape.

    C1 fits the slope of ``log(x - x_offset)`` against ``log t`` (the
    exponent); C2 the slope of ``x`` against ``log t``; C3 the slope of ``x``
    against ``log(t)**(1+s)`` (coefficients). ``residual`` is the RMS misfit
    divided by the RMS spread of the fitted quantity.
    """
    params = params or {}
    tag = KernelClass(class_tag)
    ok = trace.valid
    t = trace.t_values[ok]
    x = trace.x_values[ok]
    if t.size < 4:
        raise ParameterDomainError("need at least 4 valid trace points")
    if np.log10(t.max() / t.min()) < 2.0 - 1e-9:
        raise ParameterDomainError("trace must span at least two decades in t")
    if np.ptp(x) <= 1e-12 * max(1.0, np.max(np.abs(x))):
        raise FitDegenerate("front does not move")
    if tag == KernelClass.C1:
        shifted = x - x_offset
        if np.any(shifted <= 0):
            raise FitDegenerate("x - x_offset must stay positive for a power fit")
        slope, icpt, res = _regress(np.log(t), np.log(shifted))
    elif tag == KernelClass.C2:
        slope, icpt, res = _regress(np.log(t), x)
    elif tag == KernelClass.C3:
        slope, icpt, res = _regress(np.log(t) ** (1.0 + params["s"]), x)
    else:
        raise ParameterDomainError("fit needs class C1, C2 or C3")
    side = getattr(trace.side, "value", str(trace.side))
    return FitReport(tag.value, side, float(slope), res, expected, tolerance, float(icpt))


# -- two-sided check --------------------------------------------------------

@dataclass
class BoundReport:
    class_tag: str
    slack: float
    burn_in: float
    t_values: list
    x_values: list
    lower: list
    upper: list
    ok: list
    shape: list
    C_minus: float
    C_plus: float
    notes: tuple = field(default=CORRECTIONS)

    @property
    def checked(self):
        return [t >= self.burn_in for t in self.t_values]

    @property
    def passed(self):
        flags = [o for o, c in zip(self.ok, self.checked) if c]
        return bool(flags) and all(flags)

    @property
    def fitted(self):
        """Mean effective constant ``x / shape(t)`` over the checked points."""
        r = [x / sh for x, sh, c in zip(self.x_values, self.shape, self.checked)
             if c and math.isfinite(x)]
        return float(np.mean(r)) if r else float("nan")

    @property
    def residual(self):
        """Largest relative excursion outside the slack band (0 if none)."""
        worst = 0.0
        for x, lo, hi, c in zip(self.x_values, self.lower, self.upper, self.checked):
            if not c:
                continue
            if not math.isfinite(x):
                return float("inf")
            lo_b, hi_b = lo * (1 - self.slack), hi * (1 + self.slack)
            if x < lo_b:
                worst = max(worst, (lo_b - x) / abs(lo_b))
            elif x > hi_b:
                worst = max(worst, (x - hi_b) / abs(hi_b))
        return worst

    def to_dict(self):
        return {
            "class": self.class_tag, "side": "two-sided", "fitted": self.fitted,
            "expected": [self.C_minus, self.C_plus], "residual": self.residual,
            "pass": self.passed, "slack": self.slack, "burn_in": self.burn_in,
            "t": self.t_values, "x": self.x_values, "lower": self.lower,
            "upper": self.upper, "ok": self.ok, "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=float)


def check_two_sided(trace, lower, upper, slack, burn_in=None):
    """Pointwise ``lower(t)(1-slack) <= x(t) <= upper(t)(1+slack)``.

    Only points with ``t >= burn_in`` count towards the overall verdict;
    a missing front (NaN) there counts as a failure.
    """
    if lower.side != LawSide.LOWER or upper.side != LawSide.UPPER:
        raise ParameterDomainError("pass a lower and an upper law")
    if (lower.class_tag, lower.v, lower.eps) != (upper.class_tag, upper.v, upper.eps):
        raise ParameterDomainError("laws must share class, v and eps")
    if burn_in is None:
        burn_in = DEFAULT_BURN_IN[lower.class_tag]
    t = trace.t_values
    lo = np.asarray(front_law(lower, t), dtype=float).reshape(t.shape)
    hi = np.asarray(front_law(upper, t), dtype=float).reshape(t.shape)
    x = trace.x_values
    with np.errstate(invalid="ignore"):
        ok = (x >= lo * (1.0 - slack)) & (x <= hi * (1.0 + slack))
    return BoundReport(lower.class_tag.value, float(slack), float(burn_in),
                       t.tolist(), x.tolist(), lo.tolist(), hi.tolist(),
                       [bool(o) for o in ok],
                       np.asarray(lower.shape(t), dtype=float).reshape(t.shape).tolist(),
                       lower.C_side, upper.C_side)
