"""Zero-temperature limits, Rayleigh-Schrödinger machinery and ground-state extraction.

The auxiliary oscillator of frequency ``omega`` is perturbed by the Coulomb
potential. Its Rayleigh-Schrödinger series is re-expanded in a trial frequency
``Omega`` and optimized order by order, giving ``E_N = -gamma_N M e^4 / hbar^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .correlator import ATOMIC_UNITS, ModelParams, alpha_of_beta
from .numerics import (
    Bracket,
    NumericsError,
    SeriesConvergenceError,
    SeriesTruncation,
    Tolerance,
    find_root,
    minimize_scalar,
)

__all__ = [
    "QuantumNumbers",
    "GroundStateResult",
    "RsExpansion",
    "RS_EXPANSION",
    "RS_SECOND_ORDER_EXACT",
    "GAMMA_EXACT",
    "MAX_QUANTUM_NUMBER",
    "energy_variational",
    "zero_t_connected_coulomb_pair",
    "ccc_double_time_integral",
    "hyp3f2_terminating",
    "rs_matrix_element",
    "rs_second_order_coefficient",
    "double_factorial_ratio",
    "constant_c",
    "cubic_roots",
    "resummation_coefficient",
    "reexpanded_coefficients",
    "optimize_ground_state",
]

GAMMA_EXACT = 0.5
RS_SECOND_ORDER_EXACT = -4.0 / math.pi * (1.0 + math.log(2.0) - 0.5 * math.pi)
MAX_QUANTUM_NUMBER = 500
DEFAULT_NMAX = 2000


@dataclass(frozen=True)
class QuantumNumbers:
    n: int
    l: int = 0
    m: int = 0

    def __post_init__(self):
        if self.n < 0 or self.l < 0:
            raise ValueError("n and l must be non-negative")
        if abs(self.m) > self.l:
            raise ValueError("|m| must not exceed l")


@dataclass(frozen=True)
class GroundStateResult:
    order: int
    omega_star: float
    gamma: float
    energy: float

    def __post_init__(self):
        if self.order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")


@dataclass(frozen=True)
class RsExpansion:
    """Coefficients of the auxiliary-oscillator energy.

    ``E = a hbar w - b sqrt(M w / hbar) e^2 + d M e^4 / hbar^2 - c sqrt(M^3 / hbar^7 w) e^6``.
    """

    hbar_omega: Fraction
    sqrt_omega: float
    constant: float
    inv_sqrt_omega: float | None = None

    def __post_init__(self):
        if self.hbar_omega != Fraction(3, 2):
            raise ValueError("zero-point coefficient of a 3D oscillator is 3/2")


RS_EXPANSION = RsExpansion(Fraction(3, 2), 2.0 / math.sqrt(math.pi), RS_SECOND_ORDER_EXACT)


def resummation_coefficient(power_half, K: int) -> Fraction:
    """Partial sum ``sum_{k<=K} binom(p, k) (-1)^k`` of ``(1 - 1)^p``.

    >>> resummation_coefficient(Fraction(1, 2), 3)
    Fraction(5, 16)
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    p = Fraction(power_half)
    total, term = Fraction(0), Fraction(1)
    for k in range(K + 1):
        total += term
        term = term * (p - k) / (k + 1) * -1
    return total


def reexpanded_coefficients(N: int) -> tuple[Fraction, Fraction]:
    """Rational prefactors of ``hbar Omega`` and ``-(1/sqrt(pi)) sqrt(M Omega/hbar) e^2`` at order N.

    ``omega -> Omega (1 - 1)^{1/2}`` re-expanded to ``N - 1`` extra orders in the
    first term, ``N - 2`` for the ``sqrt(omega)`` term (it starts one order later).
    """
    if N not in (1, 2, 3):
        raise ValueError("N must be 1, 2 or 3")
    a = RS_EXPANSION.hbar_omega * resummation_coefficient(Fraction(1, 2), N)
    b = 2 * resummation_coefficient(Fraction(1, 4), N - 1)
    return a, b


def energy_variational(N: int, omega: float, params: ModelParams = ATOMIC_UNITS, c_value: float | None = None) -> float:
    """Re-expanded ground-state energy of order ``N`` at trial frequency ``omega``."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    p = params
    a, b = reexpanded_coefficients(N)
    e = float(a) * p.hbar * omega - float(b) / math.sqrt(math.pi) * math.sqrt(p.mass * omega / p.hbar) * p.e2
    if N >= 2:
        e += RS_SECOND_ORDER_EXACT * p.mass * p.e2**2 / p.hbar**2
    if N == 3:
        c = constant_c() if c_value is None else c_value
        e -= c * math.sqrt(p.mass**3 / (p.hbar**7 * omega)) * p.e2**3
    return e


# ---------------------------------------------------------------------------
# zero-temperature connected correlation


def zero_t_connected_coulomb_pair(omega: float, dtau_abs, params: ModelParams = ATOMIC_UNITS):
    """Connected ``<1/r 1/r>`` at ``r0 = 0`` for the ground-state correlator.

    With ``a2 = hbar/2M omega`` and ``b = a2 exp(-omega dtau)``:
    ``1/b - (2/(pi b)) arctan sqrt(a2^2/b^2 - 1) - 2/(pi a2)``. The first two terms
    are ``(2/(pi b)) arcsin(b/a2)``, which is the form used here.
    """
    t = np.asarray(dtau_abs, dtype=float)
    if np.any(t < 0):
        raise ValueError("dtau_abs must be non-negative")
    a2 = params.hbar / (2.0 * params.mass * omega)
    s = np.exp(-omega * t)
    # arcsin(s)/s -> 1 as s -> 0
    ratio = np.where(s > 1e-8, np.arcsin(s) / np.where(s > 0, s, 1.0), 1.0 + s * s / 6.0)
    out = 2.0 / (math.pi * a2) * (ratio - 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _log_integral(alpha: float) -> float:
    """``int_alpha^1 log(u)/(1+u) du``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda u: math.log(u) / (1.0 + u), alpha, 1.0, limit=200)
    return val


def ccc_double_time_integral(beta: float, omega: float, params: ModelParams = ATOMIC_UNITS) -> float:
    """Double imaginary-time integral over ``[0, hbar beta]^2`` of the zero-T connected pair.

    Valid for large ``hbar beta omega`` (>= 5). The large exponentials are
    combined analytically: ``e^x - (2/pi) e^x arcsin sqrt(1 - e^{-2x}) = (2/pi) e^x arcsin(e^{-x})``.
    """
    x = params.hbar * beta * omega
    if x < 5.0:
        raise ValueError("closed form needs hbar*beta*omega >= 5")
    alpha = alpha_of_beta(beta, omega, params)
    la = math.log(alpha)
    head = 2.0 / math.pi * math.exp(x) * math.asin(math.exp(-x))
    bracket = 0.5 * la - la * la / 8.0 - 0.5 * _log_integral(alpha)
    return 4.0 * params.mass / (params.hbar * omega) * (head - 1.0 - x - x * x / math.pi - 2.0 / math.pi * bracket)


# ---------------------------------------------------------------------------
# oscillator matrix elements


def hyp3f2_terminating(n_prime: int, l: int, n: int) -> float:
    """``3F2(-n', l+1, 1/2; l+3/2, 1/2-n; 1)``, summed exactly in rationals.

    All parameters are integers or half-integers, so each Pochhammer ratio is a
    rational number. Summing in floating point cancels catastrophically once
    ``n'`` exceeds a few dozen.
    """
    if n_prime < 0 or l < 0 or n < 0:
        raise ValueError("n', l, n must be non-negative")
    a1, a2, a3 = Fraction(-n_prime), Fraction(l + 1), Fraction(1, 2)
    b1, b2 = Fraction(2 * l + 3, 2), Fraction(1, 2) - n
    total, term = Fraction(0), Fraction(1)
    for k in range(n_prime + 1):
        total += term
        # running product of the Pochhammer ratios
        term = term * (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1))
    return float(total)


def rs_matrix_element(
    qn: QuantumNumbers, qn_prime: QuantumNumbers, omega: float, params: ModelParams = ATOMIC_UNITS
) -> float:
    """Coulomb matrix element ``<n l m| -e^2/r |n' l' m'>`` in oscillator states of frequency ``omega``."""
    if qn.l != qn_prime.l or qn.m != qn_prime.m:
        return 0.0
    if max(qn.n, qn_prime.n) > MAX_QUANTUM_NUMBER:
        raise ValueError(f"radial quantum numbers above {MAX_QUANTUM_NUMBER} are not supported")
    # the element is symmetric; terminate the series on the smaller index
    if qn_prime.n > qn.n:
        qn, qn_prime = qn_prime, qn
    n, n2, l = qn.n, qn_prime.n, qn.l
    lg = math.lgamma
    log_pref = (
        lg(l + 1)
        + lg(n + 0.5)
        - lg(l + 1.5)
        + 0.5 * (lg(n2 + l + 1.5) - lg(n + 1) - lg(n2 + 1) - lg(n + l + 1.5))
    )
    scale = params.e2 * math.sqrt(params.mass * omega / (math.pi * params.hbar))
    return -scale * math.exp(log_pref) * hyp3f2_terminating(n2, l, n)


def double_factorial_ratio(n_max: int) -> np.ndarray:
    """``w_n = (2n-1)!!/(2n)!!`` for ``n = 0..n_max`` by running products."""
    n = np.arange(1, n_max + 1)
    return np.concatenate(([1.0], np.cumprod((2 * n - 1) / (2.0 * n))))


def _check_truncation(trunc: SeriesTruncation | int | None) -> int:
    if trunc is None:
        return DEFAULT_NMAX
    n_max = trunc if isinstance(trunc, int) else trunc.max_terms
    if n_max < 16:
        raise ValueError("n_max must be at least 16")
    return n_max


def rs_second_order_coefficient(trunc: SeriesTruncation | int | None = None, omega: float = 1.0) -> float:
    """Second-order RS energy in units of ``M e^4 / hbar^2``.

    ``sum_{n>=1} |V_{000;n00}|^2 / (E_000 - E_n00)``, only ``l = m = 0`` states
    couple to the ground state. With ``w_n`` as in :func:`double_factorial_ratio`,
    ``|V_{000;n00}|^2 = (M omega/pi hbar) e^4 * 2 w_n/(n + 1/2)``.
    """
    n_max = _check_truncation(trunc)
    p = ATOMIC_UNITS
    w = double_factorial_ratio(n_max)
    n = np.arange(1, n_max + 1)
    v2 = p.mass * omega / (math.pi * p.hbar) * p.e2**2 * 2.0 * w[1:] / (n + 0.5)
    terms = v2 / (-2.0 * n * p.hbar * omega)
    # terms ~ n^{-5/2}; integral comparison from N + 1/2
    N = n_max
    tail = terms[-1] * N**2.5 * (N + 0.5) ** -1.5 / 1.5
    return float(math.fsum(terms[::-1]) + tail) / (p.mass * p.e2**2 / p.hbar**2)


def _s2_rows(w: np.ndarray):
    """Yield ``S[n, 1:]`` for ``n = 1..N`` with ``S[n, n'] = sum_j w_{n-j} w_{n'-j}``.

    ``S[n, n'] = S[n-1, n'-1] + w_n w_n'`` with ``S[0, n'] = w_n'``.
    """
    prev = w.copy()  # row n = 0
    for k in range(1, len(w)):
        row = np.empty_like(w)
        row[0] = w[k]
        row[1:] = prev[:-1] + w[k] * w[1:]
        yield k, row[1:]
        prev = row


def constant_c(trunc: SeriesTruncation | int | None = None) -> float:
    """Third-order RS constant ``c``, so that ``E^(3) = -c sqrt(M^3 / hbar^7 omega) e^6``.

    Single sum minus double sum over intermediate ``l = 0`` states. The hypergeometric
    kernel is replaced by the equivalent positive sum
    ``w_n w_n' 3F2(...) = S[n, n'] / (2 (n' + 1/2))``. Both sums get integral-comparison
    tails (terms fall off like ``n^{-7/2}`` and ``n^{-5/2}``).
    """
    N = _check_truncation(trunc)
    w = double_factorial_ratio(N)
    n = np.arange(1, N + 1, dtype=float)
    single = w[1:] / (n * n * (n + 0.5))
    s1 = math.fsum(single[::-1]) + single[-1] * N**3.5 * (N + 0.5) ** -2.5 / 2.5
    inv = 1.0 / (2.0 * n * (n + 0.5))
    rows = []
    last = None
    for k, srow in _s2_rows(w):
        t = 2.0 * srow * inv * inv[k - 1]
        rows.append(math.fsum(t))
        last = t
    s2 = math.fsum(rows)
    # region max(n, n') > N by symmetry, scaling the edge row as n^{-5/2}
    s2 += 2.0 * math.fsum(last) * N**2.5 * (N + 0.5) ** -1.5 / 1.5
    value = float((s2 - s1) / math.pi**1.5)
    if not math.isfinite(value):
        raise SeriesConvergenceError(value, N)
    return value


# ---------------------------------------------------------------------------
# optimization


def _cubic(cp: float, c: float) -> float:
    return float(15.0 * cp**3 - 21.0 / math.sqrt(math.pi) * cp**2 + 16.0 * c)


def cubic_roots(c: float, lo: float = -2.0, hi: float = 2.0, samples: int = 400) -> list[float]:
    """Real roots of ``15 c'^3 - (21/sqrt(pi)) c'^2 + 16 c`` in ``[lo, hi]``."""
    xs = np.linspace(lo, hi, samples + 1)
    vals = [_cubic(x, c) for x in xs]
    roots = []
    for x0, x1, v0, v1 in zip(xs, xs[1:], vals, vals[1:]):
        if v0 == 0.0:
            roots.append(float(x0))
        elif v0 * v1 < 0:
            roots.append(find_root(lambda t: _cubic(t, c), Bracket(float(x0), float(x1)), Tolerance(1e-15, 1e-14)))
    return roots


def optimize_ground_state(N: int, params: ModelParams = ATOMIC_UNITS, c_value: float | None = None) -> GroundStateResult:
    """Optimal trial frequency and ``gamma_N`` for order ``N``."""
    unit_w = params.frequency_unit
    unit_e = params.energy_unit
    if N in (1, 2):
        om, e = minimize_scalar(
            lambda o: energy_variational(N, o, params),
            Bracket(0.05 * unit_w, 5.0 * unit_w),
            Tolerance(1e-14, 1e-12),
        )
        return GroundStateResult(N, om, -e / unit_e, e)
    if N != 3:
        raise ValueError("N must be 1, 2 or 3")
    c = constant_c() if c_value is None else c_value
    roots = cubic_roots(c)
    positive = [r for r in roots if 0 < r < 2]
    if len(roots) != 3 or len(positive) != 2:
        xs = np.linspace(-2, 2, 9)
        raise NumericsError(f"cubic has roots {roots}; values on grid {[_cubic(x, c) for x in xs]}")
    cp = float(max(positive))
    om = cp * cp * unit_w
    e = energy_variational(3, om, params, c)
    return GroundStateResult(3, om, -e / unit_e, e)
