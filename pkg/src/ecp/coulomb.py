"""Smeared Coulomb expectations and the first/second-order effective classical potential.

All expectation values use the proper-time representation of ``1/r``, which
turns each Gaussian smearing into elementary integrals: one over ``lambda`` in
``[0, 1]`` for single-time quantities and a double ``sigma`` integral over the
positive quadrant for the two-time product. Both are done with fixed node sets
so that ``W`` is a smooth function of the trial frequencies; the finite
differences driving the frequency optimization depend on that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .correlator import _bernoulli_numbers
from .correlator import ATOMIC_UNITS, CorrelatorSet, ModelParams, ThermalState, correlator_set
from .numerics import (
    Bracket,
    NumericsError,
    Tolerance,
    find_root,
    finite_difference,
    minimize_2d,
)
from .smearing import AnisotropicKernel3D

__all__ = [
    "TrialFrequencies",
    "OptimizationMode",
    "SCAN_RANGE",
    "EcpPoint",
    "PotentialCurve",
    "OptimizationError",
    "coulomb_smeared",
    "coulomb_times_fluct_square",
    "coulomb_pair",
    "coulomb_inverse_square",
    "connected_coulomb_pair",
    "connected_pair_time_integral",
    "w1",
    "w2",
    "w_order",
    "zero_temperature_limit",
    "optimize_frequencies",
    "curve",
]


@dataclass(frozen=True)
class TrialFrequencies:
    omega_T: float
    omega_L: float

    def __post_init__(self):
        if not (self.omega_T > 0 and self.omega_L > 0):
            raise ValueError("trial frequencies must be positive")

    @classmethod
    def isotropic(cls, omega: float) -> TrialFrequencies:
        return cls(omega, omega)

    @property
    def is_isotropic(self) -> bool:
        return self.omega_T == self.omega_L


# ---------------------------------------------------------------------------
# fixed quadrature rules

_GL_LAMBDA = np.polynomial.legendre.leggauss(96)
_GL_TAU = np.polynomial.legendre.leggauss(64)
_GL_TAU_FLAT = np.polynomial.legendre.leggauss(24)

# exp-sinh rule on [0, inf): sigma = s0 * exp(pi/2 * sinh t)
_DE_STEP = 0.1
_DE_T = np.arange(-4.0, 4.6 + 0.5 * _DE_STEP, _DE_STEP)
_DE_X = np.exp(0.5 * math.pi * np.sinh(_DE_T))
_DE_W = _DE_STEP * 0.5 * math.pi * np.cosh(_DE_T) * _DE_X

# tail e^{-kappa lambda^2} is negligible beyond kappa lambda^2 = 81
_LAMBDA_CUT = 81.0
# connected correlations have decayed by e^{-40} beyond this many decay lengths
_TAU_DECAY = 40.0
_BERNOULLI = _bernoulli_numbers(26)

# equal-time fallback threshold on (a^4 - a^4_12) / a^4
_DEGENERATE = 1e-10


def _lambda_rule(kappa: float):
    top = 1.0 if kappa <= _LAMBDA_CUT else math.sqrt(_LAMBDA_CUT / kappa)
    x, w = _GL_LAMBDA
    return 0.5 * top * (x + 1.0), 0.5 * top * w


def _de_rule(s0: float):
    return s0 * _DE_X, s0 * _DE_W


def _lambda_parts(r0: float, a2_T: float, a2_L: float):
    kappa = r0 * r0 / (2.0 * a2_L)
    lam, w = _lambda_rule(kappa)
    lam2 = lam * lam
    den = (a2_T - a2_L) * lam2 + a2_L
    gauss = np.exp(-kappa * lam2)
    return lam2, w * gauss, den, math.sqrt(2.0 * a2_L / math.pi)


def coulomb_smeared(r0: float, a2_T: float, a2_L: float) -> float:
    """``<1/|x|>`` for the anisotropic Gaussian centred ``r0`` on the longitudinal axis."""
    if not (a2_T > 0 and a2_L > 0):
        raise ValueError("widths must be positive")
    lam2, wg, den, pref = _lambda_parts(r0, a2_T, a2_L)
    return pref * float(np.sum(wg / den))


def coulomb_times_fluct_square(channel: str, k: AnisotropicKernel3D) -> float:
    """``<1/|x(t1)| [dx(t2)]^2_{T or L}>`` at cross widths ``k.a2_T12``, ``k.a2_L12``."""
    lam2, wg, den, pref = _lambda_parts(k.r0, k.a2_T, k.a2_L)
    if channel == "T":
        c4 = k.a2_T12**2
        vals = 2.0 * k.a2_T / den - 2.0 * c4 * lam2 / den**2
    elif channel == "L":
        c4 = k.a2_L12**2
        a2 = k.a2_L
        vals = (a2**3 + c4 * (k.r0**2 * lam2 * lam2 - a2 * lam2)) / (a2 * a2 * den)
    else:
        raise ValueError(f"channel must be 'T' or 'L', got {channel!r}")
    return pref * float(np.sum(wg * vals))


def _pair_integrand(s1, s2, r0, aT, aL, dT, dL):
    """Integrand of the two-time ``<1/r 1/r>`` in proper times ``s1, s2``.

    ``dT = aT - aT12`` and ``dL = aL - aL12`` are the width deficits; the
    determinants are assembled from them to avoid cancellation near equal times.
    """
    bT = aT - dT
    bL = aL - dL
    detT = dT * (aT + bT) + 2.0 * aT * (s1 + s2) + 4.0 * s1 * s2
    detL = dL * (aL + bL) + 2.0 * aL * (s1 + s2) + 4.0 * s1 * s2
    expo = r0 * r0 * (dL + s1 + s2) / detL
    return np.exp(-expo) / (detT * np.sqrt(detL))


def _independent_integrand(s1, s2, r0, aT, aL):
    # cross widths zero: the product of two one-time expectations
    pT = (aT + 2.0 * s1) * (aT + 2.0 * s2)
    pL = (aL + 2.0 * s1) * (aL + 2.0 * s2)
    expo = r0 * r0 * (aL + s1 + s2) / pL
    return np.exp(-expo) / (pT * np.sqrt(pL))


def coulomb_inverse_square(r0: float, a2_T: float, a2_L: float) -> float:
    """``<1/|x|^2>`` at a single time: the coincident-time limit of the pair expectation."""
    t, w = _de_rule(1.0 / a2_L)
    vals = np.exp(-t * r0 * r0 / (1.0 + 2.0 * t * a2_L)) / ((1.0 + 2.0 * t * a2_T) * np.sqrt(1.0 + 2.0 * t * a2_L))
    return float(np.sum(w * vals))


def _is_degenerate(k: AnisotropicKernel3D) -> bool:
    qT = 1.0 - (k.a2_T12 / k.a2_T) ** 2
    qL = 1.0 - (k.a2_L12 / k.a2_L) ** 2
    return qT < _DEGENERATE or qL < _DEGENERATE


def _sigma_grid(a2_L: float):
    s, w = _de_rule(a2_L)
    return s[:, None], s[None, :], w[:, None] * w[None, :]


def coulomb_pair(k: AnisotropicKernel3D) -> float:
    """``<1/|x(t1)| 1/|x(t2)|>`` from the double proper-time integral."""
    if _is_degenerate(k):
        return coulomb_inverse_square(k.r0, k.a2_T, k.a2_L)
    s1, s2, ww = _sigma_grid(k.a2_L)
    f = _pair_integrand(s1, s2, k.r0, k.a2_T, k.a2_L, k.a2_T - k.a2_T12, k.a2_L - k.a2_L12)
    return 2.0 / math.pi * float(np.sum(ww * f))


def connected_coulomb_pair(k: AnisotropicKernel3D) -> float:
    """Second cumulant of ``1/|x|`` between two times.

    The factorized product is subtracted under the integral sign, on the same
    nodes, which keeps the small connected part accurate.
    """
    if _is_degenerate(k):
        return coulomb_inverse_square(k.r0, k.a2_T, k.a2_L) - coulomb_smeared(k.r0, k.a2_T, k.a2_L) ** 2
    s1, s2, ww = _sigma_grid(k.a2_L)
    f = _pair_integrand(s1, s2, k.r0, k.a2_T, k.a2_L, k.a2_T - k.a2_T12, k.a2_L - k.a2_L12)
    f0 = _independent_integrand(s1, s2, k.r0, k.a2_T, k.a2_L)
    return 2.0 / math.pi * float(np.sum(ww * (f - f0)))


def _tau_nodes(cs: CorrelatorSet):
    """Nodes and weights on the half period ``[0, hbar beta / 2]`` (or ``[0, inf)`` at T=0).

    ``dtau = tau_c u^2`` on the first panel absorbs the ``sqrt(dtau)`` behaviour
    of the connected correlator at coincident times.
    """
    rate = min(cs.omega_L, 2.0 * cs.omega_T)
    tau_c = _TAU_DECAY / rate
    half = 0.5 * cs.period
    first = min(tau_c, half)
    x, w = _GL_TAU
    u = 0.5 * (x + 1.0)
    nodes = [first * u * u]
    weights = [0.5 * w * 2.0 * first * u]
    if math.isfinite(half) and half > first:
        x2, w2 = _GL_TAU_FLAT
        nodes.append(first + 0.5 * (half - first) * (x2 + 1.0))
        weights.append(0.5 * (half - first) * w2)
    return np.concatenate(nodes), np.concatenate(weights)


def connected_pair_time_integral(r0: float, cs: CorrelatorSet) -> float:
    """``int_0^{hbar beta/2} d(dtau)`` of the connected ``<1/r 1/r>`` (upper limit ``inf`` at T=0).

    Half of the ``dtau`` integral over a full period, which by time-translation
    invariance equals ``(1 / hbar beta)`` times the double time integral.
    """
    tau, wt = _tau_nodes(cs)
    dT = np.asarray(cs.deficit_T(tau))
    dL = np.asarray(cs.deficit_L(tau))
    s1, s2, ww = _sigma_grid(cs.a2_L)
    f0 = _independent_integrand(s1, s2, r0, cs.a2_T, cs.a2_L)
    ref = float(np.sum(ww * f0))
    # (n_tau, n_sigma, n_sigma) in one shot
    f = _pair_integrand(
        s1[None], s2[None], r0, cs.a2_T, cs.a2_L, dT[:, None, None], dL[:, None, None]
    )
    pair = np.einsum("ij,kij->k", ww, f)
    conn = 2.0 / math.pi * (pair - ref)
    return float(np.dot(wt, conn))


# ---------------------------------------------------------------------------
# effective classical potentials


def _free_energy(omega: float, thermal: ThermalState, params: ModelParams) -> float:
    """``(1/beta) log[sinh(x/2)/(x/2)]`` per fluctuation direction."""
    if thermal.is_zero_temperature:
        return 0.5 * params.hbar * omega
    beta = thermal.beta
    x = params.hbar * beta * omega
    if x < 1.0:
        # log(sinh(y)/y) = sum_n 4^n B_2n y^2n / (2n (2n)!), y = x/2
        b = _BERNOULLI
        y2 = 0.25 * x * x
        total = 0.0
        for n in range(len(b) // 2 - 1, 0, -1):
            total += 4.0**n * b[2 * n] * y2**n / (2 * n * math.factorial(2 * n))
        return total / beta
    # log(sinh(x/2)/(x/2)) = x/2 + log(1 - e^{-x}) - log(x)
    return (0.5 * x + math.log(-math.expm1(-x)) - math.log(x)) / beta


def _w1_from(r0: float, cs: CorrelatorSet) -> float:
    p = cs.params
    return (
        2.0 * _free_energy(cs.omega_T, cs.thermal, p)
        + _free_energy(cs.omega_L, cs.thermal, p)
        - 0.5 * p.mass * (2.0 * cs.omega_T**2 * cs.a2_T + cs.omega_L**2 * cs.a2_L)
        - p.e2 * coulomb_smeared(r0, cs.a2_T, cs.a2_L)
    )


def w1(r0: float, f: TrialFrequencies, beta, params: ModelParams = ATOMIC_UNITS) -> float:
    """First-order effective classical potential at fixed trial frequencies.

    ``beta`` is a positive float or a :class:`ThermalState` (``ThermalState.zero()``
    gives the exact zero-temperature limit).
    """
    return _w1_from(r0, correlator_set(f.omega_T, f.omega_L, beta, params))


def w2(r0: float, f: TrialFrequencies, beta, params: ModelParams = ATOMIC_UNITS) -> float:
    """Second-order effective classical potential at fixed trial frequencies."""
    cs = correlator_set(f.omega_T, f.omega_L, beta, params)
    p = cs.params
    aT, aL = cs.a2_T, cs.a2_L
    lam2, wg, den, pref = _lambda_parts(r0, aT, aL)
    mixed = (
        2.0 * cs.omega_T * cs.l4_T * lam2 / den**2
        - cs.omega_L * cs.l4_L * (r0 * r0 * lam2 * lam2 - aL * lam2) / (aL * aL * den)
    )
    cross = p.e2 * p.mass / (2.0 * p.hbar) * pref * float(np.sum(wg * mixed))
    harmonic = -(p.mass**2) * (2.0 * cs.omega_T**3 * cs.l4_T + cs.omega_L**3 * cs.l4_L) / (4.0 * p.hbar)
    coulomb = -(p.e2**2) / p.hbar * connected_pair_time_integral(r0, cs)
    return _w1_from(r0, cs) + cross + harmonic + coulomb


def w_order(order: int):
    if order == 1:
        return w1
    if order == 2:
        return w2
    raise ValueError(f"order must be 1 or 2, got {order}")


def zero_temperature_limit(fn, beta0: float = 1e3) -> float:
    """Extrapolate ``fn(beta)`` to ``beta -> inf`` from ``beta0, 2 beta0, 4 beta0``.

    The finite-beta corrections of ``W`` are ``(A log(beta) + B) / beta`` (the
    logarithm comes from the excluded zero mode); both are eliminated exactly.
    """
    betas = (beta0, 2.0 * beta0, 4.0 * beta0)
    vals = [fn(b) for b in betas]
    m = np.array([[1.0, math.log(b) / b, 1.0 / b] for b in betas])
    return float(np.linalg.solve(m, np.array(vals))[0])


# ---------------------------------------------------------------------------
# frequency optimization


class OptimizationMode(str, Enum):
    """How the trial frequencies of a point were fixed.

    ``Extremum``: a zero of ``dW/dOmega``. ``TurningPoint``: no extremum in
    range, a zero of ``d2W/dOmega2`` (least Omega-dependence). ``Boundary``:
    neither exists above the derivative noise floor; ``W`` is flat or monotone
    and the scan minimum is reported.
    """

    EXTREMUM = "Extremum"
    TURNING_POINT = "TurningPoint"
    BOUNDARY = "Boundary"


class OptimizationError(NumericsError):
    def __init__(self, message: str, omegas=(), derivatives=()):
        super().__init__(message)
        self.omegas = list(omegas)
        self.derivatives = list(derivatives)


@dataclass(frozen=True)
class EcpPoint:
    r0: float
    frequencies: TrialFrequencies | None
    value: float
    order: int
    optimization_mode: OptimizationMode | None
    alternatives: tuple[tuple[float, float], ...] = ()
    error: str | None = None

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.error is None and not math.isfinite(self.value):
            raise ValueError("value must be finite")

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class PotentialCurve:
    beta: object
    mode: str
    order: int
    points: tuple[EcpPoint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        r = [p.r0 for p in self.points]
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("r0 must be strictly increasing")

    @property
    def r0(self) -> np.ndarray:
        return np.array([p.r0 for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])


SCAN_POINTS = 40
SCAN_RANGE = (1e-2, 1e2)
_FD_REL = 1e-4
# derivative values below this multiple of the roundoff level are treated as zero
_NOISE_FACTOR = 64.0


def _scan(fn, lo: float, hi: float):
    omegas = np.geomspace(lo, hi, SCAN_POINTS)
    vals, d1, d2, noise = [], [], [], []
    for om in omegas:
        h = _FD_REL * om
        wm, w0, wp = fn(om - h), fn(om), fn(om + h)
        vals.append(w0)
        d1.append((wp - wm) / (2 * h))
        d2.append((wp - 2 * w0 + wm) / (h * h))
        noise.append(_NOISE_FACTOR * np.finfo(float).eps * max(abs(w0), 1.0) / h)
    return omegas, np.array(vals), np.array(d1), np.array(d2), np.array(noise)


def _brackets(omegas, g, floor):
    out = []
    for i in range(len(omegas) - 1):
        if abs(g[i]) > floor[i] and abs(g[i + 1]) > floor[i + 1] and g[i] * g[i + 1] < 0:
            out.append(Bracket(float(omegas[i]), float(omegas[i + 1])))
    return out


def _optimize_iso(fn, unit: float, tol: Tolerance):
    lo, hi = SCAN_RANGE[0] * unit, SCAN_RANGE[1] * unit
    for attempt in range(2):
        omegas, vals, d1, d2, noise = _scan(fn, lo, hi)
        d1f = lambda om: finite_difference(fn, om, 1)
        roots = []
        for br in _brackets(omegas, d1, noise):
            om = find_root(d1f, br, tol)
            roots.append((om, fn(om)))
        if roots:
            roots.sort(key=lambda p: p[1])
            return roots[0], OptimizationMode.EXTREMUM, tuple(roots[1:])
        d2f = lambda om: finite_difference(fn, om, 2)
        floor2 = noise * 1e4 / omegas
        turns = []
        for br in _brackets(omegas, d2, floor2):
            om = find_root(d2f, br, tol)
            turns.append((om, fn(om), abs(d1f(om))))
        if turns:
            # least Omega-dependence among the turning points
            turns.sort(key=lambda p: p[2])
            return turns[0][:2], OptimizationMode.TURNING_POINT, tuple(t[:2] for t in turns[1:])
        if attempt == 0:
            lo, hi = lo / 10.0, hi * 10.0
    if not np.all(np.isfinite(vals)):
        raise OptimizationError("no stationary point and non-finite W in scan", omegas, d1)
    i = int(np.argmin(vals))
    return (float(omegas[i]), float(vals[i])), OptimizationMode.BOUNDARY, ()


def optimize_frequencies(
    order: int,
    r0: float,
    beta,
    mode: str = "iso",
    params: ModelParams = ATOMIC_UNITS,
    tol: Tolerance = Tolerance(1e-12, 1e-10),
) -> EcpPoint:
    """Fix the trial frequencies at ``r0`` and return the optimized ``W``.

    ``mode="iso"`` scans a single frequency; ``mode="aniso"`` starts from the
    isotropic optimum and minimizes the squared gradient over
    ``(omega_T, omega_L)``.
    """
    w = w_order(order)
    iso = lambda om: w(r0, TrialFrequencies(om, om), beta, params)
    (om, val), how, alts = _optimize_iso(iso, params.frequency_unit, tol)
    if mode == "iso":
        return EcpPoint(r0, TrialFrequencies(om, om), val, order, how, alts)
    if mode != "aniso":
        raise ValueError(f"mode must be 'iso' or 'aniso', got {mode!r}")
    if how is OptimizationMode.BOUNDARY:
        # no isotropic stationary point to refine
        return EcpPoint(r0, TrialFrequencies(om, om), val, order, how, alts)

    def wf(x, y):
        return w(r0, TrialFrequencies(x, y), beta, params)

    def grad2(x, y):
        gx = finite_difference(lambda t: wf(t, y), x, 1)
        gy = finite_difference(lambda t: wf(x, t), y, 1)
        return gx * gx + gy * gy

    if how is OptimizationMode.EXTREMUM:
        (xT, xL), _ = minimize_2d(grad2, (om, om), Tolerance(1e-10, 1e-10), max_iter=600, step=0.02)
    else:
        # turning points have no 2D analogue; keep the isotropic choice
        xT, xL = om, om
    return EcpPoint(r0, TrialFrequencies(xT, xL), wf(xT, xL), order, how, alts)


def _curve_point(args):
    order, r0, beta, mode, params = args
    try:
        return optimize_frequencies(order, r0, beta, mode, params)
    except (NumericsError, ValueError, FloatingPointError) as exc:
        return EcpPoint(r0, None, math.nan, order, None, error=f"{type(exc).__name__}: {exc}")


def curve(
    order: int,
    beta,
    r0_grid: Sequence[float],
    mode: str = "iso",
    params: ModelParams = ATOMIC_UNITS,
    workers: int = 1,
) -> PotentialCurve:
    """Optimized ``W`` on a grid of ``r0``; failures are recorded per point.

    Points are independent, so ``workers > 1`` evaluates them in a process pool;
    results are emitted in grid order either way.
    """
    grid = [float(r) for r in r0_grid]
    if not grid:
        raise ValueError("r0 grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("r0 grid must be strictly increasing")
    jobs = [(order, r, beta, mode, params) for r in grid]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            points = list(pool.map(_curve_point, jobs))
    else:
        points = [_curve_point(j) for j in jobs]
    return PotentialCurve(beta, mode, order, tuple(points))
