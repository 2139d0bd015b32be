"""Two-point functions of the local harmonic trial oscillator.

The fluctuation correlator with the zero Matsubara mode removed, its equal-time
width, the fourth-power width ``l4`` entering the second-order potential, and
the zero-temperature forms used for ground-state checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli, comb

__all__ = [
    "ModelParams",
    "ThermalState",
    "Correlator",
    "CorrelatorSet",
    "ATOMIC_UNITS",
    "as_thermal",
    "matsubara_frequency",
    "pair_correlation",
    "pair_correlation_sum",
    "equal_time_width",
    "l4",
    "width_deficit",
    "zero_t_pair_correlation",
    "alpha_of_beta",
    "correlator_set",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants; defaults are atomic units."""

    hbar: float = 1.0
    mass: float = 1.0
    e2: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0 and self.e2 > 0):
            raise ValueError("hbar, mass and e2 must be strictly positive")

    @property
    def frequency_unit(self) -> float:
        """Natural frequency ``M e^4 / hbar^3``."""
        return self.mass * self.e2**2 / self.hbar**3

    @property
    def energy_unit(self) -> float:
        """Natural energy ``M e^4 / hbar^2`` (Hartree)."""
        return self.mass * self.e2**2 / self.hbar**2


ATOMIC_UNITS = ModelParams()


@dataclass(frozen=True)
class ThermalState:
    beta: float | None = None
    is_zero_temperature: bool = False

    def __post_init__(self):
        if not self.is_zero_temperature and not (self.beta is not None and self.beta > 0):
            raise ValueError("finite temperature requires beta > 0")

    @classmethod
    def zero(cls) -> ThermalState:
        return cls(None, True)

    def __str__(self):
        return "T=0" if self.is_zero_temperature else f"beta={self.beta!r}"


def as_thermal(beta) -> ThermalState:
    """Accept a positive float or a :class:`ThermalState`."""
    if isinstance(beta, ThermalState):
        return beta
    return ThermalState(float(beta))


@dataclass(frozen=True)
class Correlator:
    beta: float
    omega: float
    params: ModelParams = ATOMIC_UNITS

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @property
    def period(self) -> float:
        return self.params.hbar * self.beta

    @property
    def x(self) -> float:
        """Dimensionless ``hbar * beta * omega``."""
        return self.params.hbar * self.beta * self.omega


def matsubara_frequency(m: int, beta: float, params: ModelParams = ATOMIC_UNITS) -> float:
    if m < 1:
        raise ValueError("Matsubara index must be >= 1: the zero mode is excluded")
    return 2.0 * math.pi * m / (params.hbar * beta)


# Below this hbar*beta*omega the closed forms lose digits to cancellation and the
# Bernoulli-polynomial expansions take over (radius of convergence 2*pi).
_SERIES_SWITCH = 1.0
_SERIES_ORDER = 12


@lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(n: int) -> np.ndarray:
    """Coefficients of B_n(s), highest power first (for np.polyval)."""
    b = bernoulli(n)
    return np.array([comb(n, j, exact=True) * b[j] for j in range(n + 1)], dtype=float)


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> np.ndarray:
    return np.asarray(bernoulli(n), dtype=float)


def _shape_series(x: float, s):
    # 2 * sum_{k>=1} B_{2k}(s) x^{2k-1} / (2k)!
    total = np.zeros_like(np.asarray(s, dtype=float))
    for k in range(1, _SERIES_ORDER + 1):
        total = total + np.polyval(_bernoulli_poly_coeffs(2 * k), s) * x ** (2 * k - 1) / math.factorial(2 * k)
    return 2.0 * total


def _shape(x: float, s):
    """``cosh(x (s - 1/2)) / sinh(x/2) - 2/x`` for ``s`` in [0, 1]."""
    if x < _SERIES_SWITCH:
        return _shape_series(x, s)
    s = np.asarray(s, dtype=float)
    em = math.exp(-x)
    return (np.exp(x * (s - 1.0)) + np.exp(-x * s)) / (1.0 - em) - 2.0 / x


def pair_correlation(c: Correlator, dtau):
    """Fluctuation correlator ``<dx(tau) dx(tau')>`` at separation ``dtau``.

    ``dtau`` must already be folded into ``[0, hbar*beta]``; arrays are accepted.
    """
    t = np.asarray(dtau, dtype=float)
    period = c.period
    if np.any(t < 0) or np.any(t > period * (1 + 1e-14)):
        raise ValueError(f"dtau must lie in [0, hbar*beta] = [0, {period}]")
    s = np.clip(t / period, 0.0, 1.0)
    scale = c.params.hbar / (2.0 * c.params.mass * c.omega)
    out = scale * _shape(c.x, s)
    return float(out) if np.ndim(out) == 0 else out


def pair_correlation_sum(c: Correlator, dtau: float, m_max: int) -> float:
    """Truncated Matsubara sum for the correlator, plus an integral tail estimate.

    Serves as the independent check on :func:`pair_correlation`.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    m = np.arange(1, m_max + 1, dtype=float)
    w = 2.0 * math.pi * m / c.period
    om2 = c.omega**2
    terms = np.cos(w * dtau) / (w * w + om2)
    partial = math.fsum(terms[::-1])
    tail = 0.0
    if math.cos(2.0 * math.pi * dtau / c.period) > 1.0 - 1e-12:
        # non-oscillating case: sum_{m > M} ~ int_{M+1/2}^inf dm / (w(m)^2 + Omega^2)
        k = 2.0 * math.pi / c.period
        tail = (0.5 * math.pi - math.atan(k * (m_max + 0.5) / c.omega)) / (k * c.omega)
    return 2.0 / (c.params.mass * c.beta) * (partial + tail)


def width_deficit(c: Correlator, dtau):
    """``a^2 - a^2_{dtau}``, evaluated without cancellation for small ``dtau``.

    Uses ``cosh(x/2) - cosh(w t - x/2) = 2 sinh(w t/2) sinh((x - w t)/2)``.
    """
    t = np.asarray(dtau, dtype=float)
    if np.any(t < 0) or np.any(t > c.period * (1 + 1e-14)):
        raise ValueError(f"dtau must lie in [0, hbar*beta] = [0, {c.period}]")
    x = c.x
    y = np.clip(c.omega * t, 0.0, x)
    scale = c.params.hbar / (2.0 * c.params.mass * c.omega)
    if x < _SERIES_SWITCH:
        s = y / x
        acc = np.zeros_like(s)
        for k in range(1, _SERIES_ORDER + 1):
            # (B_2k(s) - B_2k(0)) / s, constant term dropped
            acc = acc + np.polyval(_bernoulli_poly_coeffs(2 * k)[:-1], s) * x ** (2 * k - 1) / math.factorial(2 * k)
        out = -2.0 * scale * s * acc
    else:
        # 2 sinh(y/2) sinh((x-y)/2) / sinh(x/2), scaled by exp(-x/2) top and bottom
        out = scale * (-np.expm1(-y)) * (1.0 - np.exp(-(x - y))) / (1.0 - math.exp(-x))
    return float(out) if np.ndim(out) == 0 else out


def equal_time_width(c: Correlator) -> float:
    """Equal-time width ``a^2 = (hbar/2M omega)[coth(x/2) - 2/x]``."""
    return pair_correlation(c, 0.0)


def l4(c: Correlator) -> float:
    """Fourth-power width ``(omega/hbar beta) * double integral of a^2_{t1 t2}^2``."""
    x = c.x
    p = c.params
    unit = (p.hbar / (p.mass * c.omega)) ** 2
    if x < _SERIES_SWITCH:
        b = _bernoulli_numbers(2 * _SERIES_ORDER + 2)
        total = 0.0
        for n in range(_SERIES_ORDER + 1, 1, -1):
            total += (n - 1) * b[2 * n] * x ** (2 * n - 1) / math.factorial(2 * n)
        return -unit * total
    em = math.exp(-x)
    num = 4.0 * em + x * x * em - 2.0 * (1.0 + em * em) + 0.5 * x * (1.0 - em * em)
    den = 2.0 * x * (1.0 - em) ** 2
    return unit * num / den


def zero_t_pair_correlation(omega: float, dtau_abs, params: ModelParams = ATOMIC_UNITS):
    t = np.asarray(dtau_abs, dtype=float)
    if np.any(t < 0):
        raise ValueError("dtau_abs must be non-negative")
    out = params.hbar / (2.0 * params.mass * omega) * np.exp(-omega * t)
    return float(out) if np.ndim(out) == 0 else out


def alpha_of_beta(beta: float, omega: float, params: ModelParams = ATOMIC_UNITS) -> float:
    """``(1 - sqrt(1 - q)) / (1 + sqrt(1 - q))`` with ``q = exp(-2 hbar beta omega)``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    q = math.exp(-2.0 * params.hbar * beta * omega)
    r = math.sqrt(1.0 - q)
    return q / (1.0 + r) ** 2


@dataclass(frozen=True)
class CorrelatorSet:
    """Widths of the transverse and longitudinal channels at fixed trial frequencies."""

    omega_T: float
    omega_L: float
    thermal: ThermalState
    params: ModelParams
    a2_T: float
    a2_L: float
    l4_T: float
    l4_L: float

    @property
    def period(self) -> float:
        if self.thermal.is_zero_temperature:
            return math.inf
        return self.params.hbar * self.thermal.beta

    def _at(self, omega: float, dtau):
        if self.thermal.is_zero_temperature:
            return zero_t_pair_correlation(omega, dtau, self.params)
        return pair_correlation(Correlator(self.thermal.beta, omega, self.params), dtau)

    def a2_T_at(self, dtau):
        return self._at(self.omega_T, dtau)

    def a2_L_at(self, dtau):
        return self._at(self.omega_L, dtau)

    def _deficit(self, omega: float, dtau):
        if self.thermal.is_zero_temperature:
            t = np.asarray(dtau, dtype=float)
            out = -self.params.hbar / (2.0 * self.params.mass * omega) * np.expm1(-omega * t)
            return float(out) if np.ndim(out) == 0 else out
        return width_deficit(Correlator(self.thermal.beta, omega, self.params), dtau)

    def deficit_T(self, dtau):
        """``a_T^2 - a_T^2(dtau)`` without cancellation."""
        return self._deficit(self.omega_T, dtau)

    def deficit_L(self, dtau):
        return self._deficit(self.omega_L, dtau)


def correlator_set(omega_T: float, omega_L: float, beta, params: ModelParams = ATOMIC_UNITS) -> CorrelatorSet:
    th = as_thermal(beta)
    if th.is_zero_temperature:
        w = lambda om: params.hbar / (2.0 * params.mass * om)
        q = lambda om: (params.hbar / (2.0 * params.mass * om)) ** 2
        return CorrelatorSet(omega_T, omega_L, th, params, w(omega_T), w(omega_L), q(omega_T), q(omega_L))
    cT = Correlator(th.beta, omega_T, params)
    cL = Correlator(th.beta, omega_L, params)
    return CorrelatorSet(
        omega_T, omega_L, th, params, equal_time_width(cT), equal_time_width(cL), l4(cT), l4(cL)
    )
