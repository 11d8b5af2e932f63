import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from subwave.errors import CapExceeded, ParameterDomainError, UnsupportedRepresentation
from subwave.montecarlo import (McEstimate, RngStream, default_step, histogram_csv,
                                mc_subordinate, sample_gamma_increment, sample_inverse,
                                sample_stable_increment, step_halving_check)
from subwave.specfun import mittag_leffler
from subwave.subordinators import DistributedOrder, GammaSubordinator, Stable, Weight
from subwave.waves import WaveProfile, subordinate

N = 100_000


def agree(samples, ref, k=3.0):
    est = McEstimate.from_samples(samples)
    assert abs(est.mean - ref) <= k * est.std_error, (est.mean, ref, est.std_error)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_stable_increment_laplace(alpha):
    X = sample_stable_increment(alpha, 1.0, RngStream(1, 0), N)
    agree(np.exp(-X), math.exp(-1.0))
    X2 = sample_stable_increment(alpha, 2.0, RngStream(1, 1), N)
    agree(np.exp(-0.5 * X2), math.exp(-2.0 * 0.5 ** alpha))


def test_gamma_increment_moments():
    X = sample_gamma_increment(2.0, 1.0, 1.0, RngStream(2), N)
    agree(X, 2.0)
    agree(np.exp(-X), 0.25)


def test_inverse_mittag_leffler_law():
    E = sample_inverse(Stable(0.5), 1.0, rng=RngStream(3), size=N)
    agree(np.exp(-E), mittag_leffler(0.5, -1.0))
    assert mittag_leffler(0.5, -1.0) == pytest.approx(0.4276, abs=1e-4)


def test_inverse_histogram_matches_closed_form():
    E = sample_inverse(Stable(0.5), 1.0, rng=RngStream(4), size=N)
    edges = np.linspace(0, 6, 25)
    counts, _ = np.histogram(E, edges)
    p = np.diff(special.erf(edges / 2))  # P(E(1) in bin) for G_1 = exp(-tau^2/4)/sqrt(pi)
    counts = np.append(counts, np.sum(E > 6))
    p = np.append(p, special.erfc(3.0))
    keep = p * N > 5
    expected = p[keep] * N
    expected *= counts[keep].sum() / expected.sum()
    assert stats.chisquare(counts[keep], expected).pvalue > 0.01


def test_inverse_scaling_ks():
    c = 8.0
    a = sample_inverse(Stable(0.5), c, rng=RngStream(5, 0), size=10_000)
    b = c ** 0.5 * sample_inverse(Stable(0.5), 1.0, rng=RngStream(5, 1), size=10_000)
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_inverse_edge_cases():
    assert np.all(sample_inverse(Stable(0.5), 0.0, rng=RngStream(0), size=5) == 0.0)
    small = sample_inverse(Stable(0.5), 1e-8, rng=RngStream(0), size=1000)
    assert small.max() < 1e-3
    with pytest.raises(UnsupportedRepresentation):
        sample_inverse(DistributedOrder(Weight.const(1.0)), 1.0, rng=RngStream(0), size=10)
    with pytest.raises(CapExceeded):
        sample_inverse(Stable(0.5), 1.0, step=1e-9, rng=RngStream(0), size=10, cap=128)
    with pytest.raises(ParameterDomainError):
        sample_inverse(Stable(0.5), -1.0, rng=RngStream(0))


def test_reproducible_and_thread_independent():
    lg = WaveProfile.logistic()
    a = mc_subordinate(lg, Stable(0.5), 0.5, 2.0, 60_000, RngStream(9, 4))
    b = mc_subordinate(lg, Stable(0.5), 0.5, 2.0, 60_000, RngStream(9, 4), threads=3)
    assert a == b
    c = mc_subordinate(lg, Stable(0.5), 0.5, 2.0, 60_000, RngStream(9, 5))
    assert c.mean != a.mean


def test_constant_profile_has_zero_error():
    est = mc_subordinate(WaveProfile.constant(1.0), Stable(0.5), 0.0, 1.0, 1000, RngStream(0))
    assert est.mean == 1.0 and est.std_error == 0.0


def test_closed_form_step_value():
    lw = WaveProfile.lower_step(0.1, 0.0)
    est = mc_subordinate(lw, Stable(0.5), 1.0, 1.0, N, RngStream(12))
    assert est.agrees_with(0.9 * special.erfc(0.5))


def test_gamma_logistic_against_quadrature():
    lg = WaveProfile.logistic()
    est = mc_subordinate(lg, GammaSubordinator(1, 1), 0.0, 5.0, N, RngStream(13))
    assert est.agrees_with(subordinate(lg, GammaSubordinator(1, 1), 0.0, 5.0))


@pytest.mark.parametrize("spec, x, t", [(Stable(0.5), 0.5, 2.0), (GammaSubordinator(1, 1), 0.0, 5.0)],
                         ids=["stable", "gamma"])
def test_step_halving_gate(spec, x, t):
    # common random numbers: the change measures bias, not sampling noise
    lg = WaveProfile.logistic()
    gate = step_halving_check(lg, spec, x, t, N, RngStream(21))
    assert gate.coarse.step == default_step(spec, t)
    assert gate.change < gate.coarse.std_error
    assert gate.fine.agrees_with(subordinate(lg, spec, x, t))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40),
       st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40))
def test_combine_equals_pooled(xs, ys):
    pooled = McEstimate.from_samples(xs + ys)
    merged = McEstimate.from_samples(xs).combine(McEstimate.from_samples(ys))
    assert merged.n == pooled.n
    assert merged.mean == pytest.approx(pooled.mean, rel=1e-9, abs=1e-9)
    assert merged.std_error == pytest.approx(pooled.std_error, rel=1e-7, abs=1e-9)


def test_rng_streams():
    a = RngStream(7, 1).generator.random(4)
    b = RngStream(7, 1).generator.random(4)
    c = RngStream(7, 2).generator.random(4)
    d = RngStream(7, 1).substream(0).generator.random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)
    with pytest.raises(ParameterDomainError):
        RngStream(-1)


def test_histogram_csv():
    text = histogram_csv([0.1, 0.2, 0.9], 2, ["subwave x"])
    lines = text.splitlines()
    assert lines[0] == "# subwave x" and lines[1] == "bin_lo,bin_hi,count"
    assert [int(l.split(",")[2]) for l in lines[2:]] == [2, 1]
