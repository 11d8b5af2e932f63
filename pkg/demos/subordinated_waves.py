"""Subordinating a logistic traveling wave.

psi(x - v t) is replaced by its average over the random clock E(t).
The step waves built from psi's eps-crossings bracket it from below and
above, and stay ordered after subordination.
"""
# %%
import numpy as np

from subwave.subordinators import DistributedOrder, GammaSubordinator, Stable, Weight
from subwave.waves import WaveProfile, cesaro_wave, make_step_waves, subordinate

lg = WaveProfile.logistic()
lower, upper, bracket = make_step_waves(lg, 0.1)
print("eps-crossings:", bracket.x_minus, bracket.x_plus)

x = np.linspace(-4, 8, 7)
for spec in (Stable(0.5), GammaSubordinator(1, 1), DistributedOrder(Weight.const(1.0))):
    print(type(spec).__name__)
    for name, p in (("lower", lower), ("smooth", lg), ("upper", upper)):
        print("  %-6s" % name, np.round(subordinate(p, spec, x, 5.0), 4))

# %%
# the Cesaro mean (time average up to t) is smoother and also ordered
spec = Stable(0.5)
print(np.round(cesaro_wave(lg, spec, x, 5.0), 4))
print(np.round(subordinate(lg, spec, x, 5.0), 4))
