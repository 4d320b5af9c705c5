import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from specfun import (
    DomainError,
    PiPowerMismatchError,
    PiRational,
    Polynomial,
    bernoulli_number,
    bernoulli_poly,
    harmonic_number,
    polylog,
    polylog_on_circle,
    zeta_even_exact,
    zeta_value,
)


BERNOULLI = [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0, Fraction(1, 42), 0, Fraction(-1, 30)]


@pytest.mark.parametrize("n,expected", list(enumerate(BERNOULLI)))
def test_bernoulli_numbers(n, expected):
    assert bernoulli_number(n) == expected


def test_bernoulli_poly_low_orders():
    assert bernoulli_poly(1) == Polynomial((Fraction(-1, 2), 1))
    assert bernoulli_poly(2) == Polynomial((Fraction(1, 6), -1, 1))
    assert str(bernoulli_poly(2)) == "x^2 - x + 1/6"


@pytest.mark.parametrize("n", range(1, 11))
def test_bernoulli_poly_appell_and_mean(n):
    assert bernoulli_poly(n).derivative() == bernoulli_poly(n - 1).scale(n)
    assert bernoulli_poly(n).integral01() == 0


def test_bernoulli_poly_reflection():
    for n in range(1, 8):
        b = bernoulli_poly(n)
        x = Fraction(2, 7)
        assert b(1 - x) == (-1) ** n * b(x)


def test_bernoulli_poly_rejects_negative():
    with pytest.raises(ValueError):
        bernoulli_poly(-1)


def test_polynomial_float_and_exact_evaluation():
    p = Polynomial((1, 2, 3))
    assert p(Fraction(1, 2)) == Fraction(11, 4)
    assert p(0.5) == pytest.approx(2.75)
    assert Polynomial((0, 0)).degree == -1


def test_harmonic_numbers():
    assert harmonic_number(0) == 0
    assert harmonic_number(4) == Fraction(25, 12)
    assert harmonic_number(3, 2) == Fraction(49, 36)
    with pytest.raises(ValueError):
        harmonic_number(3, 0)


def test_pi_rational_arithmetic():
    a = PiRational(Fraction(1, 2), -2)
    b = PiRational(Fraction(1, 3), -2)
    assert a + b == PiRational(Fraction(5, 6), -2)
    assert a * b == PiRational(Fraction(1, 6), -4)
    assert 3 * a == PiRational(Fraction(3, 2), -2)
    assert PiRational(0, 5) == PiRational(0)
    assert (a - a).is_zero
    assert PiRational(0, 3) + a == a
    with pytest.raises(PiPowerMismatchError):
        a + PiRational(1, -4)
    assert float(PiRational(1, 2)) == pytest.approx(math.pi**2, rel=1e-15)


@pytest.mark.parametrize(
    "n,coeff",
    [(2, Fraction(1, 6)), (4, Fraction(1, 90)), (6, Fraction(1, 945)), (8, Fraction(1, 9450))],
)
def test_zeta_even_exact(n, coeff):
    assert zeta_even_exact(n) == PiRational(coeff, n)


def test_zeta_values():
    assert zeta_value(3) == pytest.approx(1.2020569031595942, rel=1e-14)
    assert zeta_value(6) == pytest.approx(math.pi**6 / 945, rel=1e-14)
    with pytest.raises(DomainError):
        zeta_value(1)


def test_polylog_closed_forms():
    assert polylog(0, 0.5).real == pytest.approx(1.0)
    assert polylog(1, 0.5).real == pytest.approx(math.log(2), rel=1e-15)
    assert polylog(2, 1).real == pytest.approx(math.pi**2 / 6, rel=1e-13)
    assert polylog(2, -1).real == pytest.approx(-(math.pi**2) / 12, rel=1e-13)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
@pytest.mark.parametrize("x", [0.3 + 0.4j, -0.9j, 0.999 * cmath.exp(0.7j), cmath.exp(2.1j)])
def test_polylog_matches_mpmath(n, x):
    want = complex(mpmath.polylog(n, x))
    assert np.allclose(polylog(n, x), want, rtol=1e-13, atol=0)


def test_polylog_domain_errors():
    with pytest.raises(DomainError):
        polylog(2, 1.5)
    with pytest.raises(DomainError):
        polylog(1, 1)
    with pytest.raises(DomainError):
        polylog(0, 1)
    with pytest.raises(DomainError):
        polylog(-1, 0.2)


def test_polylog_on_circle():
    assert polylog_on_circle(2, 0.0).real == pytest.approx(math.pi**2 / 6)
    assert polylog_on_circle(2, 1.0).real == pytest.approx(math.pi**2 / 6)
    want = complex(mpmath.polylog(2, 1j))
    assert np.allclose(polylog_on_circle(2, 0.25), want, rtol=1e-13, atol=0)
    with pytest.raises(DomainError):
        polylog_on_circle(1, 0.0)
    with pytest.raises(DomainError):
        polylog_on_circle(2, 1.5)


@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("y", [k / 10 for k in range(1, 10)])
def test_polylog_bernoulli_on_circle(n, y):
    lhs = polylog_on_circle(n, y) + (-1) ** n * polylog_on_circle(n, 1 - y)
    rhs = -((2j * math.pi) ** n) * float(bernoulli_poly(n)(y)) / math.factorial(n)
    assert abs(lhs - rhs) < 1e-11


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("x", [0.5, 0.3 + 0.4j, -0.6j, 0.8 * cmath.exp(2.5j)])
def test_polylog_derivative_lowers_order(n, x):
    h = 1e-5
    slope = (polylog(n, x + h) - polylog(n, x - h)) / (2 * h)
    assert abs(x * slope - polylog(n - 1, x)) < 1e-8 * max(1.0, abs(polylog(n - 1, x)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("y", [0.1, 0.3, 0.75])
def test_polylog_on_circle_matches_defining_series(n, y):
    N = 10**6
    k = np.arange(1, N + 1, dtype=np.float64)
    brute = complex(np.sum(np.exp(2j * math.pi * y * k) / k**n))
    # Dirichlet bound on the dropped tail
    tail = 2 / (N**n * abs(1 - cmath.exp(2j * math.pi * y)))
    assert abs(polylog_on_circle(n, y) - brute) < tail + 1e-11
