"""Acceptance criteria 1-17, one test each.

Every test records a ``CRITERION n: PASS|FAIL`` line (see conftest). Two of
them are expected to fail when evaluated literally; they are left failing on
purpose rather than loosened.
"""

import math

import numpy as np
from scipy import integrate

from ecp import coulomb, correlator, groundstate, numerics, smearing
from ecp.coulomb import TrialFrequencies
from ecp.correlator import Correlator
from ecp.numerics import Tolerance
from ecp.smearing import AnisotropicKernel3D, GaussianKernel1D

GAMMA1 = 4 / (3 * math.pi)
GAMMA2 = (5 + 4 * math.log(2)) / math.pi - 2
OMEGA12 = 16 / (9 * math.pi)
RS2 = -(4 / math.pi) * (1 + math.log(2) - math.pi / 2)


def test_criterion_01_gamma1(criterion):
    g = groundstate.optimize_ground_state(1).gamma
    criterion(1, abs(g - GAMMA1) < 1e-6, f"gamma_1={g:.10f} target {GAMMA1:.10f}")


def test_criterion_02_gamma2(criterion):
    g = groundstate.optimize_ground_state(2).gamma
    criterion(2, abs(g - GAMMA2) < 1e-6, f"gamma_2={g:.10f} target (5+4ln2)/pi-2={GAMMA2:.10f}")


def test_criterion_03_optimal_frequency(criterion):
    om = [groundstate.optimize_ground_state(N).omega_star for N in (1, 2)]
    err = max(abs(o - OMEGA12) for o in om)
    criterion(3, err < 1e-6, f"Omega_1={om[0]:.9f} Omega_2={om[1]:.9f} target {OMEGA12:.9f}")


def test_criterion_04_constant_c(criterion):
    c = groundstate.constant_c(2000)
    drift = abs(groundstate.constant_c(4000) - c)
    criterion(4, 0.0313 <= c <= 0.0323 and drift < 1e-5, f"c={c:.7f} drift={drift:.2e}")


def test_criterion_05_third_order(criterion):
    c = groundstate.constant_c()
    cp = max(groundstate.cubic_roots(c))
    g3 = groundstate.optimize_ground_state(3, c_value=c).gamma
    ok = abs(cp - 0.7254) <= 1e-3 and abs(g3 - 0.490) <= 1e-3
    criterion(5, ok, f"c'={cp:.6f} gamma_3={g3:.7f}")


def test_criterion_06_rs_second_order(criterion):
    v = groundstate.rs_second_order_coefficient()
    criterion(6, abs(v - RS2) < 1e-4, f"sum={v:.9f} closed form={RS2:.9f}")


def test_criterion_07_ground_matrix_element(criterion):
    q = groundstate.QuantumNumbers(0)
    err = max(abs(groundstate.rs_matrix_element(q, q, om) + 2 * math.sqrt(om / math.pi)) for om in (0.5, 1.0, 2.0))
    criterion(7, err < 1e-10, f"max error {err:.1e}")


def test_criterion_08_correlator(criterion):
    worst = 0.0
    for beta in (0.5, 2.0, 10.0):
        for om in (0.5, 1.0, 2.0):
            c = Correlator(beta, om)
            for frac in (0.1, 0.25, 0.5):
                t = frac * c.period
                d = correlator.pair_correlation(c, t) - correlator.pair_correlation_sum(c, t, 100_000)
                worst = max(worst, abs(d))
    c = Correlator(2.0, 1.3)
    zero = numerics.integrate_finite(lambda t: correlator.pair_correlation(c, t), 0.0, c.period, Tolerance(1e-13, 1e-12))
    criterion(8, worst < 1e-4 and abs(zero) < 1e-8, f"Matsubara max dev {worst:.1e}, period integral {zero:.1e}")


def test_criterion_09_l4(criterion):
    worst = 0.0
    for beta, om in ((1.0, 1.0), (0.3, 2.0), (5.0, 0.7), (20.0, 1.0)):
        c = Correlator(beta, om)
        # double time integral over the period, reduced by translation invariance
        ref = om * integrate.quad(lambda t: correlator.pair_correlation(c, t) ** 2, 0, c.period, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        worst = max(worst, abs(correlator.l4(c) - ref))
    # zero-temperature value hbar^2/(4 M^2 Omega^2) at beta = 1e3
    zt = max(abs(correlator.l4(Correlator(1e3, om)) - 1 / (4 * om * om)) for om in (0.5, 1.0, 2.0))
    ok = worst < 1e-8 and zt < 1e-4
    criterion(9, ok, f"oracle max dev {worst:.1e}; beta=1e3 zero-T deviation {zt:.2e} (needs < 1e-4)")


def test_criterion_10_smearing(criterion):
    rng = np.random.default_rng(2024)
    exx1 = 0.0
    for _ in range(6):
        x0, a2 = rng.uniform(-1, 1), rng.uniform(0.2, 2)
        c = rng.uniform(-0.9, 0.9) * a2
        kk = rng.uniform(0.3, 3)
        F = lambda x: math.cos(kk * x) + 0.2 * x
        ker = GaussianKernel1D(x0, a2, c)
        q = c * c / (a2 * a2)
        lhs = smearing.smear_pair_1d(F, lambda x: (x - x0) ** 2, ker)
        rhs = a2 * (1 - q) * smearing.smear_single_1d(F, ker) + q * smearing.smear_single_1d(lambda x: F(x) * (x - x0) ** 2, ker)
        exx1 = max(exx1, abs(lhs - rhs))

    rule = 0.0
    for _ in range(3):
        r0, aT, aL = rng.uniform(0, 2), rng.uniform(0.3, 2), rng.uniform(0.3, 2)
        cT, cL = rng.uniform(-0.9, 0.9) * aT, rng.uniform(-0.9, 0.9) * aL
        kap = rng.uniform(0.1, 2)
        h = lambda z: 1 / (1 + (z - 0.3) ** 2)
        fx = lambda x: math.exp(-kap * x * x)
        F3 = lambda rho, z: math.exp(-kap * rho * rho) * h(z)
        k3 = AnisotropicKernel3D(r0, aT, aL, cT, cL)
        gx, gz = GaussianKernel1D(0.0, aT, cT), GaussianKernel1D(r0, aL, cL)
        sx, sz = smearing.smear_single_1d(fx, gx), smearing.smear_single_1d(h, gz)
        base = smearing.smear_single_3d(F3, k3)
        wT, wL = (cT / aT) ** 2, (cL / aL) ** 2
        lhs_T = 2 * smearing.smear_pair_1d(fx, lambda x: x * x, gx) * sx * sz
        rhs_T = 2 * aT * (1 - wT) * base + wT * smearing.smear_single_3d(lambda rho, z: F3(rho, z) * rho * rho, k3)
        lhs_L = sx * sx * smearing.smear_pair_1d(h, lambda z: (z - r0) ** 2, gz)
        rhs_L = aL * (1 - wL) * base + wL * smearing.smear_single_3d(lambda rho, z: F3(rho, z) * (z - r0) ** 2, k3)
        rule = max(rule, abs(lhs_T - rhs_T), abs(lhs_L - rhs_L))

    # squared-fluctuation products from 1D pair quadrature
    aT, aL, cT, cL = 0.8, 1.4, 0.3, -0.5
    sq = lambda a, c: smearing.smear_pair_1d(lambda x: x * x, lambda x: x * x, GaussianKernel1D(0.0, a, c))
    exx2 = abs(sq(1.0, 0.5) - 1.5)
    k = AnisotropicKernel3D(0.0, aT, aL, cT, cL)
    prod = max(
        abs(smearing.fluct_square_products("TT", k) - (2 * sq(aT, cT) + 2 * aT * aT)),
        abs(smearing.fluct_square_products("LL", k) - sq(aL, cL)),
        abs(smearing.fluct_square_products("TL", k) - 2 * aT * aL),
    )
    ok = exx1 < 1e-8 and rule < 1e-6 and exx2 < 1e-7 and prod < 1e-7
    criterion(10, ok, f"pair rule {exx1:.1e}, 3D rules {rule:.1e}, squared pair {exx2:.1e}, 3D products {prod:.1e}")


def test_criterion_11_erf(criterion):
    err = max(
        abs(coulomb.coulomb_smeared(r0, a2, a2) - math.erf(r0 / math.sqrt(2 * a2)) / r0)
        for r0 in (0.1, 1.0, 5.0)
        for a2 in (0.5, 1.0, 2.0)
    )
    criterion(11, err < 1e-8, f"max error {err:.1e}")


def test_criterion_12_pair_landmark(criterion):
    a2 = 0.5  # hbar/(2 M Omega) at Omega = 1
    k = AnisotropicKernel3D.isotropic(0.0, a2, a2 * math.exp(-math.log(2)))
    full = coulomb.coulomb_pair(k)
    conn = coulomb.connected_coulomb_pair(k)
    ok = abs(full - 4 / 3) < 1e-6 and abs(conn - 0.0600938) < 1e-6
    criterion(12, ok, f"pair={full:.9f} connected={conn:.9f}")


def test_criterion_13_ccc(criterion):
    beta, om = 8.0, 1.0
    f = lambda t1, t2: groundstate.zero_t_connected_coulomb_pair(om, abs(t1 - t2))
    lower, _ = integrate.dblquad(lambda t2, t1: f(t1, t2), 0, beta, 0, lambda t1: t1, epsabs=1e-9)
    ref = 2 * lower
    val = groundstate.ccc_double_time_integral(beta, om)
    rel = abs(val / ref - 1)
    criterion(13, rel < 1e-3, f"closed form {val:.8f} vs 2D quadrature {ref:.8f}, rel {rel:.1e}")


def test_criterion_14_zero_t_consistency(criterion):
    worst = 0.0
    for om in (0.5, 1.0, 2.0):
        f = TrialFrequencies.isotropic(om)
        for order in (1, 2):
            w = coulomb.w_order(order)(0.0, f, 1e3)
            worst = max(worst, abs(w - groundstate.energy_variational(order, om)))
    criterion(14, worst < 1e-3, f"max |W_N(beta=1e3) - E_N| = {worst:.2e} (needs < 1e-3)")


def test_criterion_15_order_ranking_and_high_t(criterion):
    grid = np.linspace(0.5, 5.0, 10)
    below = {}
    for beta in (10.0, 100.0):
        w1 = coulomb.curve(1, beta, grid).values
        w2 = coulomb.curve(2, beta, grid).values
        below[beta] = float(np.max(w2 - w1))
    hot = 0.0
    for order in (1, 2):
        v = coulomb.curve(order, 1e-2, grid).values
        hot = max(hot, float(np.max(np.abs(v * grid + 1))))
    ok = all(d <= 0 for d in below.values()) and hot < 5e-3
    criterion(15, ok, f"max(W2-W1) beta=10: {below[10.0]:.2e}, beta=100: {below[100.0]:.2e}; hot rel dev {hot:.1e}")


def test_criterion_16_aniso_collapse(criterion):
    worst = 0.0
    for order, beta in ((1, 10.0), (2, 10.0)):
        pt = coulomb.optimize_frequencies(order, 0.0, beta, mode="aniso")
        worst = max(worst, abs(pt.frequencies.omega_T - pt.frequencies.omega_L))
    criterion(16, worst < 1e-6, f"max |Omega_T - Omega_L| = {worst:.1e}")


def test_criterion_17_gamma_sequence(criterion):
    err = [abs(groundstate.optimize_ground_state(N).gamma - 0.5) for N in (1, 2, 3)]
    ok = err[0] > err[1] > err[2]
    criterion(17, ok, "|gamma_N - 1/2| = " + ", ".join(f"{e:.5f}" for e in err))
