"""Gaussian smearing of local functions of the fluctuating path.

Expectation values in the harmonic trial ensemble are Gaussian convolutions.
The one- and two-time kernels in one dimension, the axially symmetric 3D kernel
with distinct transverse and longitudinal widths, and the Wick-contraction
identities live here. The quadrature routes are slow but independent, which is
why the closed forms elsewhere are tested against them.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .numerics import INNER_TOL, Tolerance, integrate_2d, integrate_finite

__all__ = [
    "GaussianKernel1D",
    "AnisotropicKernel3D",
    "smear_single_1d",
    "smear_pair_1d",
    "wick_moment",
    "wick_pairings",
    "exp_product_expectation",
    "smear_single_3d",
    "fluct_square_products",
    "NSIGMA",
]

# Gaussian weight beyond 10 standard deviations is below 1e-22.
NSIGMA = 10.0
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class GaussianKernel1D:
    x0: float
    a2: float
    a2_12: float = 0.0

    def __post_init__(self):
        if not self.a2 > 0:
            raise ValueError("a2 must be positive")
        if abs(self.a2_12) > self.a2:
            raise ValueError("|a2_12| must not exceed a2")


@dataclass(frozen=True)
class AnisotropicKernel3D:
    """3D kernel centred at ``r0`` on the longitudinal axis.

    The cross widths ``a2_T12``, ``a2_L12`` couple two different times and
    only matter for pair expectations.
    """

    r0: float
    a2_T: float
    a2_L: float
    a2_T12: float = 0.0
    a2_L12: float = 0.0

    def __post_init__(self):
        if not (self.a2_T > 0 and self.a2_L > 0):
            raise ValueError("widths must be positive")
        if abs(self.a2_T12) > self.a2_T or abs(self.a2_L12) > self.a2_L:
            raise ValueError("cross widths must not exceed the equal-time widths")

    @classmethod
    def isotropic(cls, r0: float, a2: float, a2_12: float = 0.0) -> AnisotropicKernel3D:
        return cls(r0, a2, a2, a2_12, a2_12)


def _gauss(z, a2):
    return np.exp(-0.5 * z * z / a2) / math.sqrt(2.0 * math.pi * a2)


def smear_single_1d(F: Callable[[float], float], k: GaussianKernel1D, tol: Tolerance = INNER_TOL) -> float:
    a = math.sqrt(k.a2)
    return integrate_finite(
        lambda x: F(x) * _gauss(x - k.x0, k.a2),
        k.x0 - NSIGMA * a,
        k.x0 + NSIGMA * a,
        tol,
        points=[k.x0],
    )


def smear_pair_1d(
    F1: Callable[[float], float],
    F2: Callable[[float], float],
    k: GaussianKernel1D,
    tol: Tolerance = INNER_TOL,
) -> float:
    """Two-time expectation with covariance ``[[a2, a2_12], [a2_12, a2]]``.

    Integrated in conditional coordinates: ``x2 | x1`` is Gaussian with mean
    ``x0 + rho (x1 - x0)`` and variance ``a2 (1 - rho^2)``, ``rho = a2_12/a2``.
    """
    a2, c = k.a2, k.a2_12
    det = a2 * a2 - c * c
    if det < _DEGENERATE * a2 * a2:
        return smear_single_1d(lambda x: F1(x) * F2(x), k, tol)
    rho = c / a2
    a = math.sqrt(a2)
    cond = math.sqrt(det / a2)

    def integrand(x1, z):
        d1 = x1 - k.x0
        x2 = k.x0 + rho * d1 + cond * z
        return F1(x1) * F2(x2) * _gauss(d1, a2) * _gauss(z, 1.0)

    return integrate_2d(
        integrand,
        (k.x0 - NSIGMA * a, k.x0 + NSIGMA * a),
        (-NSIGMA, NSIGMA),
        tol,
        x_points=[k.x0],
        y_points=[0.0],
    )


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def wick_moment(n: int, a: float) -> float:
    """``<dx^n>`` for a centred Gaussian of standard deviation ``a``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n % 2:
        return 0.0
    return _double_factorial(n - 1) * a**n


def _pairings(idx: tuple[int, ...]):
    if not idx:
        yield ()
        return
    first, rest = idx[0], idx[1:]
    for j, partner in enumerate(rest):
        remaining = rest[:j] + rest[j + 1 :]
        for tail in _pairings(remaining):
            yield ((first, partner),) + tail


def wick_pairings(n: int, cov) -> float:
    """Sum over all ``(n-1)!!`` pair contractions of an ``n x n`` covariance."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (n, n):
        raise ValueError(f"cov must be {n}x{n}")
    if n > 10:
        raise ValueError("wick_pairings enumerates at most n = 10 (945 pairings)")
    if n % 2:
        return 0.0
    return math.fsum(math.prod(cov[i, j] for i, j in p) for p in _pairings(tuple(range(n))))


def exp_product_expectation(u: Sequence[float], cov) -> float:
    """``< prod_k exp(i u_k dx_k) > = exp(-u.C.u / 2)``."""
    u = np.asarray(u, dtype=float)
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    return math.exp(-0.5 * float(u @ cov @ u))


def smear_single_3d(
    F: Callable[[float, float], float],
    k: AnisotropicKernel3D,
    tol: Tolerance = INNER_TOL,
) -> float:
    """One-time 3D expectation of an axially symmetric ``F(rho, z)``.

    ``rho`` is the transverse distance from the axis, ``z`` the longitudinal
    coordinate (the kernel is centred at ``z = r0``).
    """
    aT, aL = math.sqrt(k.a2_T), math.sqrt(k.a2_L)

    def integrand(z, rho):
        w_rho = rho * math.exp(-0.5 * rho * rho / k.a2_T) / k.a2_T
        return F(rho, z) * w_rho * _gauss(z - k.r0, k.a2_L)

    zs = [k.r0]
    if abs(k.r0) < NSIGMA * aL:
        zs.append(0.0)
    return integrate_2d(
        integrand,
        (k.r0 - NSIGMA * aL, k.r0 + NSIGMA * aL),
        (0.0, NSIGMA * aT),
        tol,
        x_points=zs,
    )


def fluct_square_products(channel_pair: str, k: AnisotropicKernel3D) -> float:
    """Two-time products of squared transverse/longitudinal fluctuations."""
    if channel_pair == "TT":
        return 4.0 * k.a2_T**2 + 4.0 * k.a2_T12**2
    if channel_pair in ("TL", "LT"):
        return 2.0 * k.a2_T * k.a2_L
    if channel_pair == "LL":
        return k.a2_L**2 + 2.0 * k.a2_L12**2
    raise ValueError(f"unknown channel pair {channel_pair!r}")
