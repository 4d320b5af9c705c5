"""Euler sums sum_n H_{n-offset,a} / n^b: truncated partial sums with
Euler-Maclaurin tails, the closed forms they reduce to, and the final
constant -(zeta(6) + zeta(2,4)) / pi^6 of the weight computation.
"""

import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Tuple

import mpmath
import numpy as np

import config  # type: ignore
from specfun import zeta_value


log = logging.getLogger(__name__)

EPS = sys.float_info.epsilon


class InvalidParameterError(ValueError):
    pass


class UnsupportedParametersError(ValueError):
    pass


@dataclass(frozen=True)
class SumResult:
    value: float  # tail already included
    truncation: int
    tail_bound: float


def _check(a: int, b: int, offset: int, N: int):
    if b < 2:
        raise InvalidParameterError(f"sum diverges for b = {b} < 2")
    if a < 1:
        raise InvalidParameterError(f"harmonic order a must be >= 1, got {a}")
    if offset not in (0, 1):
        raise InvalidParameterError(f"offset must be 0 or 1, got {offset}")
    if N < 1:
        raise InvalidParameterError(f"truncation must be positive, got {N}")


def harmonic_prefix(a: int, N: int) -> np.ndarray:
    """Array H with H[n] = H_{n,a} for 0 <= n <= N (float64).

    Prefix sums run inside fixed SUM_CHUNK blocks; block offsets are carried
    with math.fsum so the rounding error never grows with N.
    """
    inv = np.arange(1, N + 1, dtype=np.float64) ** (-a)
    out = np.empty(N + 1, dtype=np.float64)
    out[0] = 0.0
    totals = []
    for start in range(0, N, config.SUM_CHUNK):
        block = inv[start:start + config.SUM_CHUNK]
        offset = math.fsum(totals)
        out[start + 1:start + 1 + block.size] = offset + np.cumsum(block)
        totals.append(math.fsum(block))
    return out


def euler_partial(a: int, b: int, offset: int, N: int) -> float:
    """sum_{n=1}^{N} H_{n-offset,a} / n^b, no tail."""
    _check(a, b, offset, N)
    H = harmonic_prefix(a, N)
    n = np.arange(1, N + 1, dtype=np.float64)
    terms = H[(np.arange(1, N + 1) - offset)] / n**b
    return math.fsum(terms)


def euler_partial_exact(a: int, b: int, offset: int, N: int) -> Fraction:
    """Same partial sum as euler_partial, in exact rationals (small N only)."""
    _check(a, b, offset, N)
    total = Fraction(0)
    H = Fraction(0)
    prev = Fraction(0)  # H_{n-1,a}
    for n in range(1, N + 1):
        prev, H = H, H + Fraction(1, n**a)
        total += (prev if offset else H) / n**b
    return total


def cube_pair_fractions(j: int, k: int) -> Tuple[Fraction, ...]:
    """Partial fractions of 1/(j^3 (j+k)^3) in j, as six exact terms:
    1/(k^3 j^3), -3/(k^4 j^2), 6/(k^5 j), -1/(k^3 (j+k)^3), -3/(k^4 (j+k)^2),
    -6/(k^5 (j+k)).

    Over a box symmetric in j and k the fourth term sums to minus the
    left-hand side, so twice the left-hand side is the sum of the other five.
    """
    if j < 1 or k < 1:
        raise InvalidParameterError(f"j and k must be positive, got ({j}, {k})")
    s = j + k
    return (
        Fraction(1, k**3 * j**3),
        Fraction(-3, k**4 * j**2),
        Fraction(6, k**5 * j),
        Fraction(-1, k**3 * s**3),
        Fraction(-3, k**4 * s**2),
        Fraction(-6, k**5 * s),
    )


def _harmonic_real(x, a: int):
    """H_{x,a} continued to real x >= 0 (digamma for a = 1, Hurwitz zeta otherwise)."""
    if a == 1:
        return mpmath.harmonic(x)
    return mpmath.zeta(a) - mpmath.zeta(a, x + 1)


def euler_tail(a: int, b: int, offset: int, N: int) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """sum_{n > N} H_{n-offset,a} / n^b and a bound on its error, at WORK_DPS.

    The value is the Euler-Maclaurin estimate. Past N the summand f is
    positive, decreasing and convex, so the exact tail lies between the
    trapezoid bound int_{N+1}^inf f + f(N+1)/2 and the midpoint bound
    int_{N+1/2}^inf f; the error is the distance to the farther end.
    """
    _check(a, b, offset, N)
    with mpmath.workdps(config.WORK_DPS):
        f = lambda x: _harmonic_real(x - offset, a) / x**b  # noqa: E731
        tail = mpmath.sumem(f, [N + 1, mpmath.inf])
        lower = mpmath.quad(f, [N + 1, mpmath.inf]) + f(N + 1) / 2
        upper = mpmath.quad(f, [N + mpmath.mpf(1) / 2, mpmath.inf])
        return +tail, max(abs(tail - lower), abs(upper - tail))


def euler_sum(a: int, b: int, offset: int, N: int) -> SumResult:
    """sum_{n>=1} H_{n-offset,a} / n^b: exact-order partial sum to N plus tail."""
    _check(a, b, offset, N)
    partial = euler_partial(a, b, offset, N)
    tail, err = euler_tail(a, b, offset, N)
    rounding = (config.SUM_CHUNK + 4) * EPS * abs(partial)
    bound = float(err) + rounding + EPS * float(abs(tail))
    log.debug(f"euler_sum({a},{b},{offset}) N={N}: partial={partial!r} tail={float(tail)!r}")
    return SumResult(value=partial + float(tail), truncation=N, tail_bound=bound)


def jjpn_sum(n: int, variant: str = "plus", N: int = 10**6) -> SumResult:
    """sum_j n/(j(n+j)) (plus) or sum_{j != n} n/(j(n-j)) (minus), truncated at N.

    Both tails telescope: H_{N+n} - H_N for plus, -(H_N - H_{N-n}) for minus.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if variant not in ("plus", "minus"):
        raise InvalidParameterError(f"variant must be plus or minus, got {variant!r}")
    if variant == "minus" and N <= n:
        raise InvalidParameterError(f"minus variant needs N > n (N={N}, n={n})")
    j = np.arange(1, N + 1, dtype=np.float64)
    if variant == "plus":
        terms = n / (j * (n + j))
        tail = math.fsum(1.0 / (N + i) for i in range(1, n + 1))
    else:
        j = j[j != n]
        terms = n / (j * (n - j))
        tail = -math.fsum(1.0 / (N - n + i) for i in range(1, n + 1))
    partial = math.fsum(terms)
    bound = 4 * EPS * (math.fsum(np.abs(terms)) + abs(tail) + abs(partial))
    return SumResult(value=partial + tail, truncation=N, tail_bound=bound)


# ---------------------------------------------------------------------------
# Closed forms


def _zz(m: int, n: int) -> float:
    return zeta_value(m) * zeta_value(n)


def _h1_closed(m: int) -> float:
    """sum_n H_n / n^m = ((m+2) zeta(m+1) - sum_{k=1}^{m-2} zeta(m-k) zeta(k+1)) / 2."""
    corr = math.fsum(_zz(m - k, k + 1) for k in range(1, m - 1))
    return ((m + 2) * zeta_value(m + 1) - corr) / 2


_SPECIAL: Dict[Tuple[int, int, int], Callable[[], float]] = {
    (4, 2, 0): lambda: 25 / 3 * zeta_value(6) - 3 * _zz(2, 4) - zeta_value(3) ** 2,
    (4, 2, 1): lambda: 22 / 3 * zeta_value(6) - 3 * _zz(2, 4) - zeta_value(3) ** 2,
}


def euler_sum_closed(a: int, b: int, offset: int) -> float:
    key = (a, b, offset)
    if key in _SPECIAL:
        return _SPECIAL[key]()
    if a == b and a >= 2 and offset in (0, 1):
        sign = 1 if offset == 0 else -1
        return (zeta_value(a) ** 2 + sign * zeta_value(2 * a)) / 2
    if a == 1 and b >= 2 and offset in (0, 1):
        return _h1_closed(b) - (zeta_value(b + 1) if offset else 0.0)
    raise UnsupportedParametersError(f"no closed form for (a, b, offset) = {key}")


def final_constant() -> float:
    """-(zeta(6) + zeta(2,4)) / pi^6 = zeta(3)^2/pi^6 - 37/11340."""
    return -(zeta_value(6) + euler_sum_closed(4, 2, 1)) / math.pi**6
