# # Effective classical potential of the Coulomb problem
#
# W_N(r0) is the classical potential whose Boltzmann factor reproduces the
# quantum partition function to order N. We optimize the trial frequency at
# every r0 and compare orders and temperatures.

import numpy as np

from ecp import coulomb
from ecp.correlator import ThermalState

grid = np.linspace(0.5, 5.0, 6)

# ## High temperature: both orders collapse onto -1/r0

for order in (1, 2):
    crv = coulomb.curve(order, 1e-2, grid)
    print(f"W{order} * r0 at beta=0.01:", np.round(crv.values * grid, 6))

# ## Moderate temperature: the second order lies below the first

w1 = coulomb.curve(1, 10.0, grid)
w2 = coulomb.curve(2, 10.0, grid)
print(" r0      W1         W2      Omega(W2)  mode")
for p1, p2 in zip(w1.points, w2.points):
    print(f"{p1.r0:4.1f}  {p1.value:+.6f}  {p2.value:+.6f}  {p2.frequencies.omega_T:8.4f}  {p2.optimization_mode.value}")

# ## Zero temperature at the origin
#
# At r0=0 and T=0 the optimized W reproduces the variational ground-state
# energies, with Omega = 16/(9 pi).

for order in (1, 2):
    pt = coulomb.optimize_frequencies(order, 0.0, ThermalState.zero())
    print(f"order {order}: Omega={pt.frequencies.omega_T:.7f}  W={pt.value:.7f}")

# ## Anisotropic trial frequencies
#
# Away from the origin the longitudinal and transverse frequencies may differ.
# At r0=0 symmetry forces them to agree.

for r0 in (0.0, 1.5):
    pt = coulomb.optimize_frequencies(1, r0, 10.0, mode="aniso")
    f = pt.frequencies
    print(f"r0={r0}: Omega_T={f.omega_T:.6f} Omega_L={f.omega_L:.6f} W={pt.value:.6f}")
