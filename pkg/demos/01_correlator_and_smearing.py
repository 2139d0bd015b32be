# # Thermal widths and Gaussian smearing
#
# The trial oscillator at inverse temperature beta has a two-point function
# a^2(dtau). Everything downstream is built from it, so we start by checking
# the closed form against a brute-force frequency sum.

import math

import numpy as np
from scipy.integrate import trapezoid

from ecp import correlator, smearing
from ecp.correlator import Correlator

# ## Closed form vs frequency sum

c = Correlator(beta=2.0, omega=1.0)
for frac in (0.0, 0.1, 0.25, 0.5):
    t = frac * c.period
    exact = correlator.pair_correlation(c, t)
    summed = correlator.pair_correlation_sum(c, t, 100_000)
    print(f"dtau={t:5.2f}  closed={exact:+.10f}  sum={summed:+.10f}")

# The zero mode is removed, so a^2(dtau) averages to zero over one period.

ts = np.linspace(0, c.period, 2001)
print("period mean:", trapezoid(correlator.pair_correlation(c, ts), ts) / c.period)

# ## Widths across temperature
#
# At high temperature the fluctuation width shrinks like beta/12, at low
# temperature it saturates at hbar/(2 M Omega).

for beta in (0.01, 0.1, 1.0, 10.0, 100.0):
    cc = Correlator(beta, 1.0)
    print(f"beta={beta:7.2f}  a2={correlator.equal_time_width(cc):.6f}  l4={correlator.l4(cc):.6f}")

# l4 approaches 1/4 only slowly: its leading correction is -1/(beta Omega).

print("l4 * 4 at beta=1e3:", 4 * correlator.l4(Correlator(1e3, 1.0)))

# ## Smearing
#
# Smearing a function means averaging it over a Gaussian with the width above.
# For the Coulomb potential the isotropic smear is erf(r0/sqrt(2 a2))/r0.

from ecp import coulomb

for r0 in (0.1, 1.0, 5.0):
    print(r0, coulomb.coulomb_smeared(r0, 0.5, 0.5), math.erf(r0) / r0)

# Pair expectations at two times are Gaussian in four dimensions, and
# Wick's theorem gives their moments in closed form.

k = smearing.GaussianKernel1D(0.0, 1.0, 0.5)
print("<dx1^2 dx2^2> =", smearing.smear_pair_1d(lambda x: x * x, lambda x: x * x, k), "(expect 1.5)")
