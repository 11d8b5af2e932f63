"""Caputo and distributed-order derivatives on a uniform grid.

u is taken piecewise linear, so the scheme is exact for u = t and first
order (in practice 1.5) for smoother-than-linear data.
"""
# %%
import math

from scipy import special

from subwave.gfd import TimeGridFunction, caputo, distributed_order
from subwave.subordinators import Weight

for h in (1e-2, 5e-3, 2.5e-3):
    n = int(round(1 / h))
    u = TimeGridFunction.sample(lambda s: s ** 2, 1.0, n)
    err = abs(caputo(0.5, u, n) - 2 / special.gamma(2.5))
    print("h=%g  error %.2e" % (h, err))

u = TimeGridFunction.sample(lambda s: s, 1.0, 1000)
print(caputo(0.5, u, 1000), 2 / math.sqrt(math.pi))

# %%
u = TimeGridFunction.sample(lambda s: s ** 2, 1.0, 1000)
print("distributed order, mu = 1:", distributed_order(Weight.const(1.0), u, 1000))
