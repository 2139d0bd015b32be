import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecp.numerics import (
    Bracket,
    BracketEdgeError,
    DivergenceError,
    IterationLimitError,
    NoSignChangeError,
    SeriesConvergenceError,
    SeriesTruncation,
    Tolerance,
    find_root,
    finite_difference,
    integrate_2d,
    integrate_finite,
    integrate_semi_infinite,
    minimize_2d,
    minimize_scalar,
    sum_series,
)


@pytest.mark.parametrize(
    "f, ref",
    [
        (lambda x: x * x, 1 / 3),
        (lambda x: 1.0, 1.0),
        (lambda x: math.exp(-x * x / 2), math.sqrt(math.pi / 2) * math.erf(1 / math.sqrt(2))),
    ],
)
def test_integrate_finite_examples(f, ref):
    assert integrate_finite(f, 0.0, 1.0) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize(
    "f",
    [lambda s: math.exp(-s), lambda s: (1 + s) ** -2, lambda s: (1 + 2 * s) ** -1.5],
)
def test_integrate_semi_infinite_examples(f):
    assert integrate_semi_infinite(f) == pytest.approx(1.0, abs=1e-8)


def test_semi_infinite_divergence_detected():
    with pytest.raises(DivergenceError):
        integrate_semi_infinite(lambda s: 1.0 / (1.0 + s))


@pytest.mark.parametrize(
    "f, xr, yr, ref",
    [
        (lambda x, y: 1.0, (0, 1), (0, 1), 1.0),
        (lambda x, y: math.exp(-x - y), (0, math.inf), (0, math.inf), 1.0),
        (lambda x, y: x * y, (0, 1), (0, 1), 0.25),
    ],
)
def test_integrate_2d_examples(f, xr, yr, ref):
    assert integrate_2d(f, xr, yr) == pytest.approx(ref, abs=1e-7)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3), st.floats(0.05, 0.95)
)
def test_quadrature_linearity_and_additivity(alpha, beta, k, frac):
    f = lambda x: math.sin(k * x)
    g = lambda x: math.exp(-k * x)
    tol = Tolerance(1e-12, 1e-10)
    lhs = integrate_finite(lambda x: alpha * f(x) + beta * g(x), 0.0, 2.0, tol)
    rhs = alpha * integrate_finite(f, 0.0, 2.0, tol) + beta * integrate_finite(g, 0.0, 2.0, tol)
    assert lhs == pytest.approx(rhs, abs=1e-9)
    c = 2.0 * frac
    split = integrate_finite(g, 0.0, c, tol) + integrate_finite(g, c, 2.0, tol)
    assert split == pytest.approx(integrate_finite(g, 0.0, 2.0, tol), abs=2e-10)


def test_find_root_examples():
    assert find_root(lambda x: x * x - 2, Bracket(1, 2)) == pytest.approx(math.sqrt(2), abs=1e-9)
    assert find_root(lambda x: x, Bracket(-1, 1)) == pytest.approx(0.0, abs=1e-9)
    cubic = lambda c: 15 * c**3 - 21 / math.sqrt(math.pi) * c**2 + 16 * 0.0318
    assert find_root(cubic, Bracket(0.5, 1.0)) == pytest.approx(0.7254, abs=1e-3)


def test_find_root_no_sign_change():
    with pytest.raises(NoSignChangeError):
        find_root(lambda x: x * x + 1, Bracket(-1, 1))


def test_find_root_and_minimizer_deterministic():
    g = lambda x: math.cos(x) - x
    assert find_root(g, Bracket(0, 1)) == find_root(g, Bracket(0, 1))
    h = lambda x: (x - 0.3) ** 2
    assert minimize_scalar(h, Bracket(0, 1)) == minimize_scalar(h, Bracket(0, 1))


def test_minimize_scalar_examples():
    x, _ = minimize_scalar(lambda x: (x - 3) ** 2, Bracket(0, 10))
    assert x == pytest.approx(3.0, abs=1e-6)
    x, _ = minimize_scalar(lambda o: 0.75 * o - 2 / math.sqrt(math.pi) * math.sqrt(o), Bracket(0.1, 2))
    assert x == pytest.approx(16 / (9 * math.pi), abs=1e-6)
    x, _ = minimize_scalar(math.cosh, Bracket(-1, 1))
    assert x == pytest.approx(0.0, abs=1e-6)


def test_minimize_scalar_edge():
    with pytest.raises(BracketEdgeError):
        minimize_scalar(lambda x: x, Bracket(0, 1))


def test_minimize_2d_examples():
    (x, y), _ = minimize_2d(lambda x, y: (x - 1) ** 2 + (y - 2) ** 2, (3, 3))
    assert (x, y) == pytest.approx((1, 2), abs=1e-6)
    (x, y), _ = minimize_2d(lambda x, y: (x - y) ** 2 + (x + y - 2) ** 2, (5, 1))
    assert (x, y) == pytest.approx((1, 1), abs=1e-6)


def test_minimize_2d_symmetric_start_stays_on_diagonal():
    h = lambda x, y: (x - 2) ** 2 + (y - 2) ** 2 + 0.5 * (x - y) ** 2
    (x, y), _ = minimize_2d(h, (2.0, 2.0))
    assert abs(x - y) < 1e-6


def test_minimize_2d_iteration_cap():
    with pytest.raises(IterationLimitError) as exc:
        minimize_2d(lambda x, y: (x - 1) ** 2 + (y - 5) ** 2, (3, 3), max_iter=3)
    assert len(exc.value.best) == 2


def test_sum_series_examples():
    tail = lambda n: 1.0 / (n + 0.5)
    assert sum_series(lambda m: 1.0 / m**2, SeriesTruncation(tail_tol=1e-8), tail=tail) == pytest.approx(math.pi**2 / 6, abs=1e-6)
    assert sum_series(lambda m: 2.0**-m) == pytest.approx(1.0, abs=1e-12)


def test_sum_series_double_factorial_weights():
    n = np.arange(1, 10**6 + 1)
    w = np.cumprod((2 * n - 1) / (2.0 * n))
    ref = math.fsum(w / (n**2 * (n + 0.5)))
    w_at = lambda k: math.exp(math.lgamma(k + 0.5) - math.lgamma(k + 1)) / math.sqrt(math.pi)
    val = sum_series(lambda k: w_at(k) / (k * k * (k + 0.5)))
    assert val == pytest.approx(ref, abs=1e-8)
    assert val == pytest.approx(0.38924925, abs=1e-7)


def test_sum_series_cap():
    with pytest.raises(SeriesConvergenceError):
        sum_series(lambda m: 1.0 / m, SeriesTruncation(max_terms=1000))


@pytest.mark.parametrize(
    "h, x, order, ref",
    [(lambda x: x * x, 1.0, 1, 2.0), (lambda x: x * x, 1.0, 2, 2.0), (math.sin, 0.0, 1, 1.0)],
)
def test_finite_difference_examples(h, x, order, ref):
    assert finite_difference(h, x, order) == pytest.approx(ref, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.floats(0.5, 3))
def test_finite_difference_cubic_polynomials(coef, x):
    p = np.polynomial.Polynomial(coef)
    d = p.deriv()(x)
    assert finite_difference(p, x, 1) == pytest.approx(d, rel=1e-6, abs=1e-6)
