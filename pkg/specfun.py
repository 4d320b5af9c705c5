"""Special functions: polylogarithms on the closed unit disk, Bernoulli
polynomials and numbers, generalized harmonic numbers, integer zeta values.

Exact quantities are ``fractions.Fraction``; numerical ones are Python
``complex``/``float`` backed by mpmath at ``config.WORK_DPS`` where double
precision is not enough.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

import mpmath

import config  # type: ignore


log = logging.getLogger(__name__)

Number = Union[int, float, complex, Fraction]


class DomainError(ValueError):
    """Argument outside the closed unit disk, or at the pole of Li_0/Li_1."""


class PiPowerMismatchError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Exact scalars


@dataclass(frozen=True)
class PiRational:
    """coeff * pi**pi_power with exact rational coeff. Zero is always (0, 0)."""

    coeff: Fraction
    pi_power: int = 0

    def __post_init__(self):
        coeff = Fraction(self.coeff)
        object.__setattr__(self, "coeff", coeff)
        if coeff == 0:
            object.__setattr__(self, "pi_power", 0)

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def __add__(self, other: "PiRational") -> "PiRational":
        if not isinstance(other, PiRational):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.pi_power != other.pi_power:
            raise PiPowerMismatchError(
                f"cannot add pi^{self.pi_power} and pi^{other.pi_power} terms"
            )
        return PiRational(self.coeff + other.coeff, self.pi_power)

    def __neg__(self) -> "PiRational":
        return PiRational(-self.coeff, self.pi_power)

    def __sub__(self, other: "PiRational") -> "PiRational":
        return self + (-other)

    def __mul__(self, other) -> "PiRational":
        if isinstance(other, PiRational):
            return PiRational(self.coeff * other.coeff, self.pi_power + other.pi_power)
        if isinstance(other, (int, Fraction)):
            return PiRational(self.coeff * other, self.pi_power)
        return NotImplemented

    __rmul__ = __mul__

    def evaluate(self) -> mpmath.mpf:
        """Value at the current mpmath precision."""
        c = mpmath.mpf(self.coeff.numerator) / self.coeff.denominator
        return c * mpmath.pi ** self.pi_power

    def __float__(self) -> float:
        with mpmath.workdps(config.WORK_DPS):
            return float(self.evaluate())

    def __str__(self) -> str:
        if self.pi_power == 0:
            return str(self.coeff)
        return f"{self.coeff}*pi^{self.pi_power}"


# ---------------------------------------------------------------------------
# Polynomials over Q


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial, ``coefficients[k]`` multiplies x**k."""

    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1  # zero polynomial -> -1

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + (c if isinstance(acc, Fraction) else float(c))
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coefficients) if k > 0))

    def antiderivative(self) -> "Polynomial":
        """Primitive vanishing at 0."""
        return Polynomial((Fraction(0),) + tuple(c / (k + 1) for k, c in enumerate(self.coefficients)))

    def integral01(self) -> Fraction:
        return sum((c / (k + 1) for k, c in enumerate(self.coefficients)), Fraction(0))

    def scale(self, factor) -> "Polynomial":
        return Polynomial(tuple(c * factor for c in self.coefficients))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for k in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if k and c == 1:
                parts.append(mono)
            elif k and c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ")


@lru_cache(maxsize=None)
def bernoulli_poly(n: int) -> Polynomial:
    """B_n(x) from B_n' = n B_{n-1} and int_0^1 B_n = 0 for n >= 1."""
    if n < 0:
        raise ValueError(f"Bernoulli index must be >= 0, got {n}")
    if n == 0:
        return Polynomial((Fraction(1),))
    prim = bernoulli_poly(n - 1).antiderivative().scale(n)
    shift = -prim.integral01()
    return prim + Polynomial((shift,))


def bernoulli_number(n: int) -> Fraction:
    """B_n = B_n(0), with B_1 = -1/2."""
    return bernoulli_poly(n)(Fraction(0))


def harmonic_number(n: int, r: int = 1) -> Fraction:
    """H_{n,r} = sum_{j<=n} 1/j^r, exact."""
    if n < 0 or r < 1:
        raise ValueError(f"harmonic_number needs n >= 0, r >= 1 (got n={n}, r={r})")
    return sum((Fraction(1, j**r) for j in range(1, n + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# Zeta values


def zeta_even_exact(n: int) -> PiRational:
    """zeta(2m) = (-1)^{m+1} B_{2m} (2 pi)^{2m} / (2 (2m)!)."""
    if n < 2 or n % 2:
        raise ValueError(f"zeta_even_exact needs an even n >= 2, got {n}")
    m = n // 2
    coeff = (-1) ** (m + 1) * bernoulli_number(n) * 2**n / (2 * math.factorial(n))
    return PiRational(coeff, n)


def zeta_value(n: int) -> float:
    if n < 2:
        raise DomainError(f"zeta({n}) diverges or is outside the supported range")
    if n % 2 == 0:
        return float(zeta_even_exact(n))
    with mpmath.workdps(config.WORK_DPS):
        return float(mpmath.zeta(n))


# ---------------------------------------------------------------------------
# Polylogarithms


def _check_disk(n: int, x: complex) -> complex:
    if n < 0:
        raise DomainError(f"polylog order must be >= 0, got {n}")
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise DomainError(f"non-finite polylog argument {x}")
    if abs(x) > 1 + config.UNIT_DISK_SLACK:
        raise DomainError(f"|x| = {abs(x)} > 1, outside the closed unit disk")
    if n <= 1 and x == 1:
        raise DomainError(f"Li_{n} has a pole/branch point at x = 1")
    return x


def polylog(n: int, x: Number) -> complex:
    """Li_n(x) on the closed unit disk.

    n = 0, 1 use the closed forms x/(1-x) and -log(1-x) (principal branch);
    n >= 2 uses mpmath, which switches to the log-expansion near the circle.
    """
    x = _check_disk(n, x)
    if n == 0:
        return x / (1 - x)
    if n == 1:
        return -cmath.log(1 - x)
    with mpmath.workdps(config.WORK_DPS):
        value = mpmath.polylog(n, mpmath.mpc(x.real, x.imag))
        return complex(value)


def polylog_on_circle(n: int, y: float) -> complex:
    """Li_n(e^{2 pi i y}) for y in [0, 1]; y in {0, 1} only for n >= 2."""
    if not 0 <= y <= 1:
        raise DomainError(f"circle parameter y = {y} outside [0, 1]")
    if n <= 1 and y in (0, 1):
        raise DomainError(f"Li_{n} is singular at y = {y}")
    if n >= 2 and y in (0, 1):
        return complex(zeta_value(n))
    if n <= 1:
        return polylog(n, cmath.exp(2j * math.pi * y))
    with mpmath.workdps(config.WORK_DPS):
        z = mpmath.expjpi(2 * mpmath.mpf(y))
        return complex(mpmath.polylog(n, z))
