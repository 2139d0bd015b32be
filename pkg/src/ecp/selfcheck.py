"""Registry of numerical invariants, run by ``ecp selfcheck``.

Each check returns a measured residual that is compared with its tolerance.
``run(tol_override=...)`` replaces every tolerance, which makes it easy to see
the suite fail on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import coulomb, correlator, groundstate, numerics, smearing
from .correlator import Correlator, ThermalState
from .numerics import Bracket, Tolerance

__all__ = ["Check", "CheckResult", "CHECKS", "run", "format_report"]


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    residual: Callable[[], float]


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.tol


def _matsubara():
    worst = 0.0
    for beta in (0.5, 2.0, 10.0):
        for om in (0.5, 1.0, 2.0):
            c = Correlator(beta, om)
            for frac in (0.1, 0.25, 0.5):
                t = frac * c.period
                worst = max(worst, abs(correlator.pair_correlation(c, t) - correlator.pair_correlation_sum(c, t, 100_000)))
    return worst


def _zero_integral():
    c = Correlator(2.0, 1.3)
    val = numerics.integrate_finite(lambda t: correlator.pair_correlation(c, t), 0.0, c.period, Tolerance(1e-13, 1e-12))
    return abs(val)


def _l4_oracle():
    worst = 0.0
    for beta, om in ((1.0, 1.0), (0.3, 2.0), (5.0, 0.7), (20.0, 1.0)):
        c = Correlator(beta, om)
        ref = om * numerics.integrate_finite(
            lambda t: correlator.pair_correlation(c, t) ** 2, 0.0, c.period, Tolerance(1e-14, 1e-12)
        )
        worst = max(worst, abs(correlator.l4(c) - ref))
    return worst


def _erf():
    worst = 0.0
    for r0 in (0.1, 1.0, 5.0):
        for a2 in (0.5, 1.0, 2.0):
            worst = max(worst, abs(coulomb.coulomb_smeared(r0, a2, a2) - math.erf(r0 / math.sqrt(2 * a2)) / r0))
    return worst


def _aniso_smear():
    k = smearing.AnisotropicKernel3D(0.7, 1.0, 2.0)
    ref = smearing.smear_single_3d(lambda rho, z: 1.0 / math.hypot(rho, z), k)
    return abs(coulomb.coulomb_smeared(0.7, 1.0, 2.0) - ref)


def _pair_landmark():
    k = smearing.AnisotropicKernel3D.isotropic(0.0, 0.5, 0.25)
    return abs(coulomb.coulomb_pair(k) - 4.0 / 3.0)


def _connected_landmark():
    k = smearing.AnisotropicKernel3D.isotropic(0.0, 0.5, 0.25)
    return abs(coulomb.connected_coulomb_pair(k) - (4.0 / 3.0 - 4.0 / math.pi))


def _ccc():
    beta, om = 8.0, 1.0
    f = lambda t: groundstate.zero_t_connected_coulomb_pair(om, t)
    # int int f(|t1 - t2|) over the square = 2 int_0^beta (beta - t) f(t) dt
    ref = 2.0 * numerics.integrate_finite(lambda t: (beta - t) * f(t), 0.0, beta, Tolerance(1e-12, 1e-10))
    return abs(groundstate.ccc_double_time_integral(beta, om) / ref - 1.0)


def _w_zero_t(order):
    def residual():
        worst = 0.0
        for om in (0.5, 1.0, 2.0):
            w = coulomb.w_order(order)(0.0, coulomb.TrialFrequencies.isotropic(om), ThermalState.zero())
            worst = max(worst, abs(w - groundstate.energy_variational(order, om)))
        return worst

    return residual


def _w_high_t():
    f = coulomb.TrialFrequencies.isotropic(1.0)
    return max(abs(coulomb.w_order(n)(1.0, f, 1e-3) + 1.0) for n in (1, 2))


def _v000():
    q = groundstate.QuantumNumbers(0)
    return max(
        abs(groundstate.rs_matrix_element(q, q, om) + 2.0 * math.sqrt(om / math.pi)) for om in (0.5, 1.0, 2.0)
    )


def _v_symmetric():
    Q = groundstate.QuantumNumbers
    return max(
        abs(groundstate.rs_matrix_element(Q(n), Q(m), 1.0) - groundstate.rs_matrix_element(Q(m), Q(n), 1.0))
        for n, m in ((1, 2), (3, 7), (10, 4))
    )


def _rs2():
    return abs(groundstate.rs_second_order_coefficient() - groundstate.RS_SECOND_ORDER_EXACT)


def _c_drift():
    return abs(groundstate.constant_c(4000) - groundstate.constant_c(2000))


def _gamma(N, exact):
    return lambda: abs(groundstate.optimize_ground_state(N).gamma - exact)


def _resum():
    return float(
        abs(groundstate.resummation_coefficient(Fraction(1, 2), 3) - Fraction(5, 16))
        + abs(groundstate.resummation_coefficient(Fraction(1, 4), 2) - Fraction(21, 32))
    )


def _wick():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4))
    cov = a @ a.T
    direct = cov[0, 1] * cov[2, 3] + cov[0, 2] * cov[1, 3] + cov[0, 3] * cov[1, 2]
    return abs(smearing.wick_pairings(4, cov) - direct)


def _exx1():
    # <x^2> under a Gaussian of mean x0, width a2
    k = smearing.GaussianKernel1D(0.4, 0.7)
    return abs(smearing.smear_single_1d(lambda x: x * x, k) - (0.4**2 + 0.7))


def _iso_symmetry():
    pt = coulomb.optimize_frequencies(1, 0.0, ThermalState.zero(), mode="aniso")
    return abs(pt.frequencies.omega_T - pt.frequencies.omega_L)


def _determinism():
    g = lambda x: x * x - 2.0
    a = numerics.find_root(g, Bracket(1.0, 2.0))
    b = numerics.find_root(g, Bracket(1.0, 2.0))
    return abs(a - b) + abs(a - math.sqrt(2.0))


CHECKS: tuple[Check, ...] = (
    Check("correlator matches Matsubara sum", 1e-4, _matsubara),
    Check("correlator integrates to zero over a period", 1e-8, _zero_integral),
    Check("l4 closed form matches time integral", 1e-8, _l4_oracle),
    Check("isotropic smeared Coulomb equals erf(r0/sqrt(2a2))/r0", 1e-8, _erf),
    Check("anisotropic smeared Coulomb matches 3D quadrature", 1e-6, _aniso_smear),
    Check("zero-T pair landmark 4/3", 1e-6, _pair_landmark),
    Check("zero-T connected landmark 4/3 - 4/pi", 1e-6, _connected_landmark),
    Check("double-time closed form matches quadrature (relative)", 1e-3, _ccc),
    Check("W1 at T=0 equals E1", 1e-9, _w_zero_t(1)),
    Check("W2 at T=0 equals E2", 1e-8, _w_zero_t(2)),
    Check("W1, W2 reduce to -1/r0 at high temperature", 1e-3, _w_high_t),
    Check("ground-state matrix element -2 sqrt(omega/pi)", 1e-10, _v000),
    Check("matrix elements are symmetric", 1e-12, _v_symmetric),
    Check("second-order RS coefficient", 1e-6, _rs2),
    Check("constant c stable under doubling n_max", 1e-5, _c_drift),
    Check("gamma_1 = 4/(3 pi)", 1e-6, _gamma(1, 4.0 / (3.0 * math.pi))),
    Check("gamma_2 = (5 + 4 log 2)/pi - 2", 1e-6, _gamma(2, (5.0 + 4.0 * math.log(2.0)) / math.pi - 2.0)),
    Check("gamma_3 near 0.490", 1e-3, _gamma(3, 0.490)),
    Check("re-expansion coefficients 5/16 and 21/32", 0.0, _resum),
    Check("Wick pairings of a 4x4 covariance", 1e-12, _wick),
    Check("Gaussian second moment", 1e-8, _exx1),
    Check("anisotropic optimum isotropic at r0 = 0", 1e-6, _iso_symmetry),
    Check("root finding deterministic and accurate", 1e-10, _determinism),
)


def run(tol_override: float | None = None, checks=CHECKS) -> list[CheckResult]:
    results = []
    for chk in checks:
        try:
            res = float(chk.residual())
        except Exception:  # a crashing check is a failing check
            res = math.inf
        tol = chk.tol if tol_override is None else tol_override
        results.append(CheckResult(chk.name, res, tol))
    return results


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name}: residual={r.residual:.3e} tol={r.tol:.1e}")
    n_ok = sum(r.passed for r in results)
    lines.append(f"{n_ok}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
