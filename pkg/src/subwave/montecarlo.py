"""Monte Carlo oracle: subordinator paths and first passage.

Only models with a samplable increment law are supported: the one-sided
stable subordinator (Chambers--Mallows--Stuck) and the Gamma process.
Distributed-order kernels are checked through their Laplace transforms.
"""
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, ParameterDomainError, UnsupportedRepresentation
from .subordinators import GammaSubordinator, Stable, laplace_exponent

__all__ = [
    "RngStream",
    "McEstimate",
    "sample_stable_increment",
    "sample_gamma_increment",
    "sample_inverse",
    "default_step",
    "mc_subordinate",
    "StepGate",
    "step_halving_check",
    "histogram_csv",
    "STEP_CAP",
]

STEP_CAP = 10_000_000
STEPS_PER_SCALE = 32
_BLOCK = 64
_CHUNK = 25_000


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream named by ``(seed, stream_id)``.

    ``path`` addresses substreams; every distinct ``(seed, stream_id, path)``
    is an independent PCG64 stream spawned from one ``SeedSequence``.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()
    _gen: np.random.Generator = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterDomainError("seed must be a 64-bit unsigned integer")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
        object.__setattr__(self, "_gen", np.random.Generator(np.random.PCG64(ss)))

    @property
    def generator(self):
        return self._gen

    def substream(self, k):
        return RngStream(self.seed, self.stream_id, (*self.path, int(k)))


def _as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error.

    ``m2`` is the centred sum of squares, kept so estimates can be merged
    exactly (Chan et al. pairwise update).
    """

    mean: float
    std_error: float
    n: int
    m2: float = 0.0
    step: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterDomainError("n must be >= 1")
        if self.std_error < 0:
            raise ParameterDomainError("std_error must be >= 0")

    @classmethod
    def from_samples(cls, values, step=0.0):
        values = np.asarray(values, dtype=float)
        n = values.size
        mean = math.fsum(values) / n
        m2 = math.fsum((values - mean) ** 2)
        se = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
        return cls(mean, se, n, m2, step)

    def combine(self, other):
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        se = math.sqrt(m2 / (n - 1) / n) if n > 1 else 0.0
        return McEstimate(mean, se, n, m2, max(self.step, other.step))

    def agrees_with(self, value, k=3.0):
        return abs(self.mean - value) <= k * self.std_error


def sample_stable_increment(alpha, delta, rng, size=None):
    """Increment of the ``alpha``-stable subordinator over time ``delta``.

    Chambers--Mallows--Stuck with skewness 1, scaled so that
    ``E exp(-lam X) = exp(-delta lam**alpha)``.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterDomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not delta > 0:
        raise ParameterDomainError("delta must be positive")
    g = _as_generator(rng)
    V = g.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    W = g.standard_exponential(size)
    b = alpha * (V + 0.5 * math.pi)
    X = (np.sin(b) / np.cos(V) ** (1.0 / alpha)
         * (np.cos(V - b) / W) ** ((1.0 - alpha) / alpha))
    X = X * delta ** (1.0 / alpha)
    return float(X) if size is None else X


def sample_gamma_increment(a, b, delta, rng, size=None):
    """Gamma-process increment: shape ``a*delta``, rate ``b``."""
    if not (a > 0 and b > 0 and delta > 0):
        raise ParameterDomainError("a, b and delta must be positive")
    X = _as_generator(rng).gamma(a * delta, 1.0 / b, size)
    return float(X) if size is None else X


def _increments(spec, step):
    if isinstance(spec, Stable):
        return lambda g, size: sample_stable_increment(spec.alpha, step, g, size)
    if isinstance(spec, GammaSubordinator):
        return lambda g, size: sample_gamma_increment(spec.a, spec.b, step, g, size)
    raise UnsupportedRepresentation(f"no path sampler for {type(spec).__name__}")


def default_step(spec, t):
    """``1/Phi(1/t)`` (the typical size of ``E(t)``) over ``STEPS_PER_SCALE``."""
    return 1.0 / laplace_exponent(spec, 1.0 / t) / STEPS_PER_SCALE


def sample_inverse(spec, t, step=None, rng=None, size=None, cap=STEP_CAP):
    """First-passage samples of ``E(t) = inf{s : S(s) >= t}``.

    Paths advance in blocks of increments of length ``step``; inside the
    step where ``S`` first reaches ``t`` the passage time is placed at a
    uniform fraction of the step, so each sample is off by less than
    ``step``.

    Raises
    ------
    CapExceeded
        Some path did not reach ``t`` within ``cap`` steps.
    """
    if t < 0:
        raise ParameterDomainError("t must be >= 0")
    if rng is None:
        raise ParameterDomainError("an rng is required")
    n = 1 if size is None else int(size)
    if t == 0:
        out = np.zeros(n)
        return 0.0 if size is None else out
    if step is None:
        step = default_step(spec, t)
    if not step > 0:
        raise ParameterDomainError("step must be positive")
    draw = _increments(spec, step)
    g = _as_generator(rng)
    out = np.empty(n)
    active = np.arange(n)
    level = np.zeros(n)
    k = 0
    while active.size:
        if k >= cap:
            raise CapExceeded(f"{active.size} paths below t={t} after {k} steps")
        path = level[:, None] + np.cumsum(draw(g, (active.size, _BLOCK)), axis=1)
        hit = path >= t
        crossed = hit.any(axis=1)
        j = hit.argmax(axis=1)[crossed]
        out[active[crossed]] = (k + j + g.uniform(size=j.size)) * step
        level = path[~crossed, -1]
        active = active[~crossed]
        k += _BLOCK
    return float(out[0]) if size is None else out


def mc_subordinate(profile, spec, x, t, n, rng, step=None, threads=1):
    """Monte Carlo estimate of ``E psi(x - v E(t))``.

    The ``n`` samples are split into fixed chunks, each drawn from its own
    substream of ``rng`` and merged in chunk order, so the result does not
    depend on ``threads``.
    """
    if n < 100:
        raise ParameterDomainError("need n >= 100")
    if not isinstance(rng, RngStream):
        raise TypeError("mc_subordinate needs an RngStream")
    if step is None and t > 0:
        step = default_step(spec, t)
    sizes = [min(_CHUNK, n - i) for i in range(0, n, _CHUNK)]

    def chunk(k):
        E = sample_inverse(spec, t, step, rng.substream(k), sizes[k])
        vals = np.asarray(profile.psi(x - profile.v * E), dtype=float)
        return McEstimate.from_samples(vals, step or 0.0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, range(len(sizes))))
    else:
        parts = [chunk(k) for k in range(len(sizes))]
    est = parts[0]
    for p in parts[1:]:
        est = est.combine(p)
    return est


@dataclass(frozen=True)
class StepGate:
    """Outcome of :func:`step_halving_check`."""

    coarse: McEstimate
    fine: McEstimate

    @property
    def change(self):
        return abs(self.coarse.mean - self.fine.mean)

    @property
    def passed(self):
        return self.change < min(self.coarse.std_error, self.fine.std_error) or self.change == 0.0


def _coupled_passage(spec, t, step, g, n):
    """First passages at ``step`` and ``step/2`` along the same paths.

    Increments are drawn at ``step/2``; summing them in pairs gives a path
    at ``step``, so the two estimates differ only by discretization.
    """
    draw = _increments(spec, 0.5 * step)
    fine = np.full(n, np.nan)
    coarse = np.empty(n)
    active = np.arange(n)
    level = np.zeros(n)
    k = 0
    while active.size:
        if k >= STEP_CAP:
            raise CapExceeded(f"{active.size} paths below t={t} after {k} steps")
        path = level[:, None] + np.cumsum(draw(g, (active.size, 2 * _BLOCK)), axis=1)
        hit_f = path >= t
        hit_c = hit_f[:, 1::2]
        crossed = hit_c.any(axis=1)
        jf = hit_f.argmax(axis=1)[crossed]
        jc = hit_c.argmax(axis=1)[crossed]
        done = active[crossed]
        fine[done] = (2 * k + jf + g.uniform(size=jf.size)) * 0.5 * step
        coarse[done] = (k + jc + g.uniform(size=jc.size)) * step
        level = path[~crossed, -1]
        active = active[~crossed]
        k += _BLOCK
    return coarse, fine


def step_halving_check(profile, spec, x, t, n, rng, step=None):
    """Step-insensitivity gate: does halving ``step`` move the estimate?

    Both resolutions are simulated on common random numbers, so their
    difference measures discretization bias rather than sampling noise.
    Two independent runs would differ by about ``sqrt(2)`` standard errors
    even without any bias.
    """
    if step is None:
        step = default_step(spec, t)
    E_c, E_f = _coupled_passage(spec, t, step, _as_generator(rng), int(n))
    psi = lambda E: np.asarray(profile.psi(x - profile.v * E), dtype=float)
    return StepGate(McEstimate.from_samples(psi(E_c), step),
                    McEstimate.from_samples(psi(E_f), 0.5 * step))


def histogram_csv(samples, bins, header_lines=()):
    """Histogram dump with columns ``bin_lo,bin_hi,count``."""
    counts, edges = np.histogram(np.asarray(samples, dtype=float), bins=bins)
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_lo", "bin_hi", "count"])
    for lo, hi, c in zip(edges[:-1], edges[1:], counts):
        w.writerow([repr(float(lo)), repr(float(hi)), int(c)])
    return buf.getvalue()
