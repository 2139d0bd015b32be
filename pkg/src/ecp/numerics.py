"""Numerical kernel: quadrature, root finding, extremization, series, differences.

Everything here is pure and reentrant. Adaptive quadrature and bracketed root
refinement delegate to QUADPACK / Brent through :mod:`scipy`; the golden-section
search, series summation and finite differences are local.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "Tolerance",
    "Bracket",
    "SeriesTruncation",
    "NumericsError",
    "QuadratureError",
    "DivergenceError",
    "NoSignChangeError",
    "BracketEdgeError",
    "IterationLimitError",
    "SeriesConvergenceError",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_2d",
    "find_root",
    "minimize_scalar",
    "minimize_2d",
    "sum_series",
    "finite_difference",
    "INNER_TOL",
    "OUTER_TOL",
]


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def inflated(self, factor: float = 10.0) -> Tolerance:
        return Tolerance(self.abs_tol * factor, self.rel_tol * factor, self.max_subdivisions)

    def bound(self, value: float) -> float:
        """Acceptable absolute error for an estimate of size ``value``."""
        return max(self.abs_tol, self.rel_tol * abs(value))


INNER_TOL = Tolerance(1e-10, 1e-8)
OUTER_TOL = Tolerance(1e-8, 1e-6)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class SeriesTruncation:
    max_terms: int = 10**6
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


class NumericsError(RuntimeError):
    pass


class QuadratureError(NumericsError):
    """Adaptive quadrature did not reach the requested tolerance.

    ``estimate`` and ``error`` hold the best value and its error bound.
    """

    def __init__(self, message: str, estimate: float = math.nan, error: float = math.inf):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class DivergenceError(QuadratureError):
    pass


class NoSignChangeError(NumericsError):
    """``g(lo)`` and ``g(hi)`` share a sign; callers may fall back to another condition."""

    def __init__(self, bracket: Bracket, g_lo: float, g_hi: float):
        super().__init__(f"no sign change on [{bracket.lo}, {bracket.hi}]: g={g_lo!r}, {g_hi!r}")
        self.bracket = bracket
        self.values = (g_lo, g_hi)


class BracketEdgeError(NumericsError):
    def __init__(self, x: float, bracket: Bracket):
        super().__init__(f"minimizer {x!r} sits on the edge of [{bracket.lo}, {bracket.hi}]")
        self.x = x
        self.bracket = bracket


class IterationLimitError(NumericsError):
    def __init__(self, message: str, best):
        super().__init__(f"{message}; best point {best!r}")
        self.best = best


class SeriesConvergenceError(NumericsError):
    def __init__(self, partial: float, terms: int):
        super().__init__(f"series not converged after {terms} terms (partial sum {partial!r})")
        self.partial = partial
        self.terms = terms


def _quad(f, a, b, tol: Tolerance, points=None):
    kwargs = dict(epsabs=tol.abs_tol, epsrel=tol.rel_tol, limit=tol.max_subdivisions, full_output=1)
    if points is not None:
        inner = sorted(p for p in points if a < p < b)
        if inner:
            kwargs["points"] = inner
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, **kwargs)
    value, err = out[0], out[1]
    ier = 0 if len(out) == 3 else out[3]
    return value, err, ier


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: Tolerance = INNER_TOL,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    ``points`` lists interior kinks or near-singularities to split at.
    """
    if a > b:
        raise ValueError("integrate_finite requires a <= b")
    if a == b:
        return 0.0
    value, err, ier = _quad(f, a, b, tol, points)
    if not math.isfinite(value):
        raise QuadratureError("non-finite quadrature result", value, err)
    if ier != 0 and err > tol.bound(value):
        raise QuadratureError(f"no convergence on [{a}, {b}] (ier={ier})", value, err)
    return value


def integrate_semi_infinite(
    f: Callable[[float], float],
    tol: Tolerance = INNER_TOL,
    scale: float = 1.0,
    lower: float = 0.0,
) -> float:
    """Integral of ``f`` over ``[lower, inf)``.

    The half line is compactified with ``u = s / (s + scale)``, ``s = x - lower``,
    so the integrand's natural scale should be passed as ``scale``.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")

    def mapped(u):
        if u >= 1.0:
            return 0.0
        one_minus = 1.0 - u
        return f(lower + scale * u / one_minus) * scale / (one_minus * one_minus)

    value, err, ier = _quad(mapped, 0.0, 1.0, tol)
    if not math.isfinite(value):
        raise DivergenceError("integrand not integrable on the half line", value, err)
    # refinement test: the contribution near u -> 1 must shrink with the cut
    cuts = [1.0 - 10.0**-k for k in (2, 4, 6)]
    tails = [_quad(mapped, c, 1.0, tol)[0] for c in cuts]
    if abs(tails[2]) > 0.5 * abs(tails[0]) and abs(tails[2]) > tol.bound(value):
        raise DivergenceError("estimate grows with the mapped cut-off", value, abs(tails[2]))
    if ier != 0 and err > tol.bound(value):
        if ier == 5:
            raise DivergenceError("QUADPACK reports a divergent integral", value, err)
        raise QuadratureError(f"no convergence on [{lower}, inf) (ier={ier})", value, err)
    return value


def _axis_integral(g, lo, hi, tol, points=None, scale=1.0):
    if math.isinf(hi):
        return integrate_semi_infinite(g, tol, scale=scale, lower=lo)
    return integrate_finite(g, lo, hi, tol, points)


def integrate_2d(
    f: Callable[[float, float], float],
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    tol: Tolerance = INNER_TOL,
    scales: tuple[float, float] = (1.0, 1.0),
    x_points: Sequence[float] | None = None,
    y_points: Sequence[float] | None = None,
) -> float:
    """Iterated adaptive integral of ``f(x, y)``; outer axis is ``x``.

    Either upper limit may be ``inf``. The outer tolerance is ten times the
    inner one.
    """

    def slice_integral(x):
        try:
            return _axis_integral(lambda y: f(x, y), y_range[0], y_range[1], tol, y_points, scales[1])
        except QuadratureError as exc:
            raise QuadratureError(f"inner integral failed at x={x!r}: {exc}", exc.estimate, exc.error) from exc

    return _axis_integral(slice_integral, x_range[0], x_range[1], tol.inflated(10.0), x_points, scales[0])


def find_root(g: Callable[[float], float], bracket: Bracket, tol: Tolerance = INNER_TOL) -> float:
    """Brent root of ``g`` inside ``bracket``.

    Raises :class:`NoSignChangeError` when ``g`` does not change sign, which the
    frequency optimizer takes as the cue to try the second-derivative condition.
    """
    g_lo, g_hi = g(bracket.lo), g(bracket.hi)
    if g_lo == 0.0:
        return bracket.lo
    if g_hi == 0.0:
        return bracket.hi
    if g_lo * g_hi > 0 or not (math.isfinite(g_lo) and math.isfinite(g_hi)):
        raise NoSignChangeError(bracket, g_lo, g_hi)
    xtol = max(tol.abs_tol, 1e-300)
    rtol = max(tol.rel_tol, 4.0 * np.finfo(float).eps)
    return optimize.brentq(g, bracket.lo, bracket.hi, xtol=xtol, rtol=rtol, maxiter=500)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_scalar(
    h: Callable[[float], float], bracket: Bracket, tol: Tolerance = INNER_TOL
) -> tuple[float, float]:
    """Golden-section search for the minimum of a unimodal ``h`` on ``bracket``.

    Returns ``(x_min, h(x_min))``. Ties go to the lower abscissa.
    """
    a, b = bracket.lo, bracket.hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(10_000):
        if b - a <= max(tol.abs_tol, tol.rel_tol * abs(c)):
            break
        if hc <= hd:
            b, d, hd = d, c, hc
            c = b - _INV_PHI * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + _INV_PHI * (b - a)
            hd = h(d)
    x, hx = (c, hc) if hc <= hd else (d, hd)
    edge = 2.0 * max(tol.abs_tol, tol.rel_tol * abs(x), b - a)
    if x - bracket.lo <= edge or bracket.hi - x <= edge:
        raise BracketEdgeError(x, bracket)
    return x, hx


def minimize_2d(
    h: Callable[[float, float], float],
    start: tuple[float, float],
    tol: Tolerance = INNER_TOL,
    max_iter: int = 4000,
    step: float = 0.05,
) -> tuple[tuple[float, float], float]:
    """Nelder-Mead minimization of ``h`` over the positive quadrant.

    The initial simplex is mirror-symmetric about the diagonal through ``start``.
    """
    x0, y0 = start
    if not (x0 > 0 and y0 > 0):
        raise ValueError("start must lie in the open positive quadrant")

    def wrapped(p):
        if p[0] <= 0 or p[1] <= 0:
            return math.inf
        return h(p[0], p[1])

    simplex = np.array([[x0, y0], [x0 * (1 + step), y0], [x0, y0 * (1 + step)]])
    res = optimize.minimize(
        wrapped,
        np.array([x0, y0]),
        method="Nelder-Mead",
        options=dict(
            initial_simplex=simplex,
            xatol=tol.abs_tol,
            fatol=tol.abs_tol**2,
            maxiter=max_iter,
            maxfev=2 * max_iter,
        ),
    )
    best = (float(res.x[0]), float(res.x[1]))
    if not res.success:
        raise IterationLimitError("minimize_2d hit its iteration cap", best)
    return best, float(res.fun)


def sum_series(
    term: Callable[[int], float],
    trunc: SeriesTruncation = SeriesTruncation(),
    start: int = 1,
    tail: Callable[[int], float] | None = None,
    block: int = 16,
) -> float:
    """Sum ``term(n)`` for ``n >= start`` in blocks of ``block`` terms.

    Stops once a whole block is below ``trunc.tail_tol`` in magnitude. If given,
    ``tail(n_last)`` estimates the remainder beyond the last summed index and is
    added to the partial sum.
    """
    total = 0.0
    comp = 0.0
    n = start
    while n - start < trunc.max_terms:
        stop = min(n + block, start + trunc.max_terms)
        chunk = math.fsum(term(k) for k in range(n, stop))
        # Kahan step keeps long sums bit-stable and accurate
        y = chunk - comp
        t = total + y
        comp = (t - total) - y
        total = t
        n = stop
        if abs(chunk) < trunc.tail_tol:
            return total + (tail(n - 1) if tail is not None else 0.0)
    raise SeriesConvergenceError(total, n - start)


def finite_difference(h: Callable[[float], float], x: float, order: int = 1, step: float | None = None) -> float:
    """Central difference of order 1 or 2; default step ``1e-4 * |x|`` (``1e-6`` at 0)."""
    if step is None:
        step = 1e-4 * abs(x) if x != 0 else 1e-6
    if order == 1:
        return (h(x + step) - h(x - step)) / (2.0 * step)
    if order == 2:
        return (h(x + step) - 2.0 * h(x) + h(x - step)) / (step * step)
    raise ValueError(f"order must be 1 or 2, got {order}")
