"""Acceptance criteria 1-12, one PASS/FAIL line each.

Run under pytest (``pytest tests/test_acceptance.py -v``) or directly with
``python tests/test_acceptance.py`` for just the summary lines.
"""
import math
import sys
import time

import numpy as np
import pytest
from scipy import integrate, special

from subwave.asymptotics import (AsymptoticLaw, check_two_sided, cesaro_asymptote,
                                 fit_scaling, front_law, law_for)
from subwave.gfd import TimeGridFunction, caputo
from subwave.montecarlo import RngStream, mc_subordinate
from subwave.specfun import mittag_leffler
from subwave.subordinators import (DistributedOrder, GammaSubordinator, Stable, Weight,
                                   density_G, inverse_family, kernel_laplace, tail_cutoff,
                                   total_mass)
from subwave.waves import (Side, WaveProfile, cesaro_wave, front_trace, make_step_waves,
                           subordinate, tauberian_wave)

ALL_SPECS = [Stable(0.3), Stable(0.5), Stable(0.7), GammaSubordinator(1.0, 1.0),
             GammaSubordinator(0.5, 2.0), DistributedOrder(Weight.const(1.0)),
             DistributedOrder(Weight.power(1.0))]
WAVE_SPECS = [Stable(0.5), Stable(0.8), GammaSubordinator(1.0, 1.0),
              DistributedOrder(Weight.const(1.0)), DistributedOrder(Weight.power(1.0))]

_X16, _W16 = np.polynomial.legendre.leggauss(16)


def panels(hi, n=64):
    e = np.linspace(0.0, hi, n + 1)
    a, b = e[:-1, None], e[1:, None]
    return (0.5 * (b - a) * (_X16 + 1) + a).ravel(), (0.5 * (b - a) * _W16).ravel()


def tau_transform(spec, t, p, generic=False):
    """int_0^inf exp(-p tau) G_t(tau) dtau on Gauss panels."""
    tau, w = panels(tail_cutoff(spec, t, 1e-14))
    G = inverse_family(spec, t, tau)[0] if generic else density_G(spec, t, tau)
    return float(np.sum(w * np.exp(-p * tau) * G))


# -- criteria ---------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    tau = np.linspace(0.0, 10.0, 1001)
    worst = worst_generic = tail = 0.0
    for t in (0.5, 1.0, 2.0):
        ref = np.exp(-tau ** 2 / (4 * t)) / np.sqrt(math.pi * t)
        worst = max(worst, np.max(np.abs(density_G(Stable(0.5), t, tau) / ref - 1)))
        rel = np.abs(inverse_family(Stable(0.5), t, tau)[0] / ref - 1)
        big = ref > 1e-10
        worst_generic = max(worst_generic, rel[big].max())
        tail = max(tail, rel[~big].max(initial=0.0))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and worst_generic <= 1e-6 and dt < 10
    return ok, (f"density_G max rel {worst:.1e}; generic inverter {worst_generic:.1e} "
                f"(G > 1e-10), {tail:.1e} below; {dt:.2f} s")


def criterion_2():
    worst = 0.0
    for alpha in (0.3, 0.5, 0.7):
        for lam in (0.1, 1.0):
            for t in (1.0, 10.0):
                val = tau_transform(Stable(alpha), t, lam)
                worst = max(worst, abs(val - mittag_leffler(alpha, -lam * t ** alpha)))
    return worst <= 1e-6, f"max |transform - E_a(-lam t^a)| = {worst:.1e}"


def criterion_3():
    worst = 0.0
    for spec in (Stable(0.5), GammaSubordinator(1.0, 1.0)):
        for lam in (0.5, 1.0, 2.0):
            for p in (0.5, 1.0, 2.0):
                # t = u^2 smooths the t^alpha start; exp(-lam t) is negligible past lam t = 40
                f = lambda u: 2 * u * math.exp(-lam * u * u) * tau_transform(spec, u * u, p, True)
                val, _ = integrate.quad(f, 0.0, math.sqrt(40.0 / lam), epsabs=1e-12,
                                        epsrel=1e-9, limit=200)
                K = kernel_laplace(spec, lam)
                worst = max(worst, abs(val / (K / (lam * K + p)) - 1))
    return worst <= 1e-5, f"max rel error {worst:.1e} over 18 (spec, lam, p)"


def criterion_4():
    worst = 0.0
    for spec in ALL_SPECS:
        for t in (0.5, 1.0, 5.0):
            mass, _ = total_mass(spec, t)
            worst = max(worst, abs(mass - 1))
    return worst <= 1e-6, f"max |mass - 1| = {worst:.1e} over {len(ALL_SPECS)} specs x 3 t"


def criterion_5():
    t0 = time.perf_counter()
    lg = WaveProfile.logistic()
    g = RngStream(5, 0).generator
    zs = []
    for k, spec in enumerate((Stable(0.5), GammaSubordinator(1.0, 1.0))):
        xs, ts = g.uniform(-2, 4, 10), g.uniform(0.5, 5, 10)
        for i, (x, t) in enumerate(zip(xs, ts)):
            est = mc_subordinate(lg, spec, x, t, 100_000, RngStream(5, 1 + k, (i,)))
            ref = subordinate(lg, spec, x, t)
            zs.append(abs(est.mean - ref) / est.std_error)
    dt = time.perf_counter() - t0
    ok = max(zs) <= 3.0 and dt < 60
    return ok, f"max |z| = {max(zs):.2f} over 20 points; {dt:.1f} s"


def _c1_setup():
    spec = Stable(0.5)
    lg = WaveProfile.logistic()
    lw, up, br = make_step_waves(lg, 0.05)
    return spec, lg, lw, up, br


def criterion_6():
    spec, lg, lw, up, br = _c1_setup()
    t = np.geomspace(1e2, 1e6, 9)
    fits = []
    for prof, side, off in ((lw, Side.LOWER_WAVE, br.x_minus), (up, Side.UPPER_WAVE, br.x_plus)):
        tr = front_trace(lambda x, s: cesaro_wave(prof, spec, x, s), 0.5, t, side=side)
        fits.append(fit_scaling(tr, "C1", x_offset=off, expected=0.5, tolerance=0.05))
    smooth = front_trace(lambda x, s: cesaro_wave(lg, spec, x, s), 0.5, t)
    bound = check_two_sided(smooth, law_for(spec, "lower", 1.0, 0.05, 0.5, br.x_minus),
                            law_for(spec, "upper", 1.0, 0.05, 0.5, br.x_plus), 0.05,
                            burn_in=1e4)
    ok = all(f.passed for f in fits) and bound.passed
    return ok, (f"exponents {fits[0].fitted:.4f}/{fits[1].fitted:.4f}; smooth x/t^a = "
                f"{bound.fitted:.4f} vs [{bound.C_minus:.4f}, {bound.C_plus:.4f}] "
                f"(5% slack), shortfall {bound.residual:.3f}")


def criterion_7():
    spec, _, lw, _, _ = _c1_setup()
    t = np.array([1e5, 1e6])
    tr = front_trace(lambda x, s: cesaro_wave(lw, spec, x, s), 0.5, t, side=Side.LOWER_WAVE)
    r = tr.x_values / t ** 0.5
    drift = abs(r[1] / r[0] - 1)
    return drift < 0.05, f"x/t^a = {r[0]:.4f} -> {r[1]:.4f}, drift {drift:.2%}"


def _log_law_check(spec):
    lg = WaveProfile.logistic()
    lower = law_for(spec, "lower", 1.0, 0.05, 0.5)
    upper = law_for(spec, "upper", 1.0, 0.05, 0.5)
    t = np.array([1e6, 1e8, 1e10])
    tr = front_trace(lambda x, s: tauberian_wave(lg, spec, x, s), 0.5, t)
    shape = lower.shape(t)
    inside = bool(np.all((front_law(lower, t) <= tr.x_values) & (tr.x_values <= front_law(upper, t))))
    ratio = tr.x_values / shape
    drift = ratio.max() / ratio.min() - 1
    # direct time-domain Cesaro fronts at desk scale
    td = np.array([1e2, 1e3, 1e4])
    direct = front_trace(lambda x, s: cesaro_wave(lg, spec, x, s), 0.5, td)
    dbound = check_two_sided(direct, lower, upper, 0.25, burn_in=0.0)
    ok = inside and drift <= 0.10 and dbound.passed
    rd = direct.x_values / lower.shape(td)
    return ok, (f"Tauberian x/shape = {', '.join(f'{v:.4f}' for v in ratio)} in "
                f"[{lower.C_side:.4f}, {upper.C_side:.4f}], drift {drift:.1%}; direct "
                f"{', '.join(f'{v:.3f}' for v in rd)} (25% slack)")


def criterion_8():
    return _log_law_check(DistributedOrder(Weight.const(1.0)))


def criterion_9():
    return _log_law_check(DistributedOrder(Weight.power(1.0)))


def criterion_10():
    exact = 2 * math.sqrt(1.0 / math.pi)
    errs = []
    for h in (1e-3, 5e-4):
        n = int(round(1.0 / h))
        errs.append(abs(caputo(0.5, TimeGridFunction.sample(lambda s: s, 1.0, n), n) / exact - 1))
    # the scheme is exact for u = t, so the halving test is measured on u = t^2 as well
    floor = 1e-12
    linear_ok = errs[0] <= 1e-3 and (errs[1] <= floor or math.log2(errs[0] / errs[1]) >= 1)
    sq = []
    for h in (1e-3, 5e-4):
        n = int(round(1.0 / h))
        val = caputo(0.5, TimeGridFunction.sample(lambda s: s ** 2, 1.0, n), n)
        sq.append(abs(val / (2 / special.gamma(2.5)) - 1))
    order = math.log2(sq[0] / sq[1])
    ok = linear_ok and order >= 1
    return ok, (f"u=t rel err {errs[0]:.1e}, {errs[1]:.1e} (exact to roundoff); "
                f"u=t^2 order {order:.2f}")


def criterion_11():
    rng = np.random.default_rng(11)
    worst = 0.0
    for tag in ("C1", "C2", "C3"):
        for side in ("lower", "upper"):
            for _ in range(5):
                eps = rng.uniform(0.01, 0.45)
                beta = rng.uniform(eps, 1 - eps)
                p = {"C1": {"alpha": rng.uniform(0.05, 0.95)},
                     "C2": {"mu0": rng.uniform(0.1, 5.0)},
                     "C3": {"C": rng.uniform(0.1, 5.0), "s": rng.uniform(0.1, 3.0)}}[tag]
                law = AsymptoticLaw(tag, side, rng.uniform(0.1, 5.0), eps, beta,
                                    rng.uniform(-3.0, 3.0), **p)
                t = math.exp(rng.uniform(math.log(2.0), math.log(1e12)))
                worst = max(worst, abs(cesaro_asymptote(law, front_law(law, t), t) - beta))
    return worst <= 1e-12, f"max |g(x(t)) - beta| = {worst:.1e} over 30 draws"


def criterion_12():
    t0 = time.perf_counter()
    rng = np.random.default_rng(12)
    lg = WaveProfile.logistic()
    lw, up, _ = make_step_waves(lg, 0.1)
    worst = 0.0
    for spec in WAVE_SPECS:
        xs = rng.uniform(-10.0, 20.0, 1000)
        ts = np.exp(rng.uniform(math.log(0.1), math.log(100.0), 1000))
        for x, t in zip(xs, ts):
            w = subordinate(lg, spec, x, t)
            lo, hi = subordinate(lw, spec, x, t), subordinate(up, spec, x, t)
            worst = max(worst, lo - w, w - hi, -w, w - 1)
    dt = time.perf_counter() - t0
    return worst <= 1e-8, (f"worst violation {max(worst, 0.0):.1e} over "
                           f"{len(WAVE_SPECS)} x 1000 points; {dt:.0f} s")


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


def _line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
