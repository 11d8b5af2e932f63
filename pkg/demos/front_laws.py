"""Level-beta fronts against the long-time laws.

Class C1 (stable): fronts grow like t^alpha. Class C2/C3 (distributed
order): like log t and (log t)^(1+s). The Tauberian evaluation is cheap
at huge t; the direct Cesaro mean is exact but only feasible at desk scale.
"""
# %%
import numpy as np

from subwave.asymptotics import fit_scaling, front_law, law_for
from subwave.subordinators import DistributedOrder, Stable, Weight
from subwave.waves import (Side, WaveProfile, cesaro_wave, front_trace, make_step_waves,
                           tauberian_wave)

eps, beta = 0.05, 0.5
lg = WaveProfile.logistic()
lw, up, br = make_step_waves(lg, eps)
spec = Stable(0.5)
t = np.geomspace(1e2, 1e6, 5)

tr = front_trace(lambda x, s: cesaro_wave(lw, spec, x, s), beta, t, side=Side.LOWER_WAVE)
fit = fit_scaling(tr, "C1", x_offset=br.x_minus, expected=0.5)
print("lower step wave exponent:", fit.fitted)

lo = law_for(spec, "lower", 1.0, eps, beta, br.x_minus)
hi = law_for(spec, "upper", 1.0, eps, beta, br.x_plus)
exact = front_trace(lambda x, s: cesaro_wave(lg, spec, x, s), beta, t)
taub = front_trace(lambda x, s: tauberian_wave(lg, spec, x, s), beta, t)
print("t        exact/sqrt(t)  tauberian/sqrt(t)  laws")
for ti, xe, xt, a, b in zip(t, exact.x_values, taub.x_values, front_law(lo, t), front_law(hi, t)):
    r = np.sqrt(ti)
    print("%-8.0e %.4f         %.4f             [%.4f, %.4f]" % (ti, xe / r, xt / r, a / r, b / r))
# The exact front sits below the lower law: the Tauberian asymptote is
# only uniform while x is small against t^alpha.

# %%
# log-law classes at very large t
for spec in (DistributedOrder(Weight.const(1.0)), DistributedOrder(Weight.power(1.0))):
    lo = law_for(spec, "lower", 1.0, eps, beta)
    hi = law_for(spec, "upper", 1.0, eps, beta)
    T = np.array([1e6, 1e8, 1e10])
    tr = front_trace(lambda x, s: tauberian_wave(lg, spec, x, s), beta, T)
    print(spec.class_tag.value, tr.x_values / lo.shape(T), lo.C_side, hi.C_side)
