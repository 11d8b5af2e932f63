"""Density of the inverse stable subordinator.

For alpha = 1/2 the density of E(t) is a half-Gaussian, which makes a
good yardstick for the numerical inverter. For other alpha we compare
against the M-Wright function, and the Laplace transform in tau against
the Mittag-Leffler function.
"""
# %%
import math

import numpy as np

from subwave.specfun import mittag_leffler, wright
from subwave.subordinators import Stable, density_G, inverse_family, tail_cutoff

tau = np.linspace(0, 6, 7)
closed = np.exp(-tau ** 2 / 4) / math.sqrt(math.pi)
numeric, est = inverse_family(Stable(0.5), 1.0, tau)
print("tau   closed form      inverted        est. error")
for row in zip(tau, closed, numeric, est):
    print("%-5g %.10f  %.10f  %.1e" % row)

# %%
# alpha = 0.7: G_t(tau) = t^-a M_a(tau t^-a)
a, t = 0.7, 2.0
for x in (0.0, 0.5, 1.5):
    print(x, density_G(Stable(a), t, x), t ** -a * wright(a, x * t ** -a))

# %%
# E[exp(-lam E(t))] = E_a(-lam t^a)
x16, w16 = np.polynomial.legendre.leggauss(64)
hi = tail_cutoff(Stable(a), t, 1e-14)
nodes, weights = 0.5 * hi * (x16 + 1), 0.5 * hi * w16
for lam in (0.1, 1.0):
    val = np.sum(weights * np.exp(-lam * nodes) * density_G(Stable(a), t, nodes))
    print(lam, val, mittag_leffler(a, -lam * t ** a))
