# # Ground-state energy from the variational series
#
# The zero-temperature energies E_N(Omega) are optimized in Omega; the
# resulting gamma_N = -E_N should approach the exact 1/2.

import math
from fractions import Fraction

from ecp import groundstate as gs

# ## Ingredients
#
# Oscillator matrix elements of the Coulomb potential, summed in second-order
# perturbation theory, reproduce a closed-form coefficient.

print("RS second order:", gs.rs_second_order_coefficient(), "exact:", gs.RS_SECOND_ORDER_EXACT)

# The third order needs the constant c, a double sum over matrix elements.

c = gs.constant_c()
print("c =", c, " drift on doubling:", abs(gs.constant_c(4000) - c))

# Re-expanding the Rayleigh-Schroedinger series around the trial frequency
# produces rational coefficients.

for N in (1, 2, 3):
    a, b = gs.reexpanded_coefficients(N)
    print(f"N={N}: {a}, {b}")
print("5/16 ->", gs.resummation_coefficient(Fraction(1, 2), 3))

# ## Optimal frequencies and energies

print(" N   Omega_N     gamma_N    |gamma_N - 1/2|")
for N in (1, 2, 3):
    r = gs.optimize_ground_state(N)
    print(f" {N}  {r.omega_star:.7f}  {r.gamma:.7f}  {abs(r.gamma - 0.5):.5f}")

# At third order the stationarity condition is a cubic in sqrt(Omega); its
# largest root is the physical one.

print("cubic roots:", [round(x, 4) for x in gs.cubic_roots(c)])
print("gamma_1 = 4/(3 pi) =", 4 / (3 * math.pi))
