"""Monte Carlo check of the subordinated wave.

Subordinator paths are built from Chambers-Mallows-Stuck (stable) or
Gamma increments; E(t) is the first step at which the path crosses t.
"""
# %%
import numpy as np

from subwave.montecarlo import RngStream, mc_subordinate, sample_inverse, step_halving_check
from subwave.specfun import mittag_leffler
from subwave.subordinators import GammaSubordinator, Stable
from subwave.waves import WaveProfile, subordinate

E = sample_inverse(Stable(0.5), 1.0, rng=RngStream(1), size=50_000)
print("E[exp(-E(1))]:", np.exp(-E).mean(), "exact", mittag_leffler(0.5, -1.0))

# %%
lg = WaveProfile.logistic()
for spec in (Stable(0.5), GammaSubordinator(1, 1)):
    est = mc_subordinate(lg, spec, 0.5, 2.0, 100_000, RngStream(2))
    print(spec, est.mean, "+-", est.std_error, "quadrature", subordinate(lg, spec, 0.5, 2.0))

# %%
# halving the step on common random numbers isolates the discretization bias
gate = step_halving_check(lg, Stable(0.5), 0.5, 2.0, 100_000, RngStream(3))
print("change", gate.change, "std error", gate.coarse.std_error, "pass", gate.passed)
