"""Semi-analytic weight of the main graph.

Stages, in the order the computation runs them:

1. b-integration: the closed form f(alpha, beta) left after integrating b
   (``f_closed_form``) and its reduced form beta - H(beta - alpha).
2. F(U): Laurent coefficients of Li_4(U)/pi^4 + c.c. (``F_laurent``).
3. G(U, V): exact series from ``series.build_G``; its V^0 slice is G0(U).
4. Pairing: the U^0 V^0 coefficient of F(U) G0(U) (``pair_zero_mode``),
   plus Euler-sum tails for the part the truncation cut off.
5. Certification: ``rational_fit`` over [1, zeta(3)^2/pi^6].

Every "up to rationals" step keeps one concrete representative: dropped
prefactors are 1 and discarded polynomial terms are 0.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

import mpmath
import numpy as np

import config  # type: ignore
import series
from eulersums import euler_tail
from specfun import PiRational, bernoulli_poly


log = logging.getLogger(__name__)

PI_RATIONAL_POWER = -6


class DegenerateInputError(ValueError):
    pass


class NoFitError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FitResult:
    coefficients: Tuple[Fraction, ...]
    residual: float
    max_denominator: int


@dataclass(frozen=True)
class SemianalyticBreakdown:
    truncation: int
    pairing: PiRational  # exact triangle sum j + k <= N, times pi^-6
    tails: mpmath.mpf  # Euler-sum tails beyond N, already divided by pi^6
    boundary_sum: Fraction  # sum_{k<=N} (H_N - H_{N-k}) / k^5
    value: mpmath.mpf


def heaviside(x: float) -> int:
    """H(x) = 1 for x > 0, else 0 (H(0) = 0)."""
    return 1 if x > 0 else 0


def _check_angles(alpha: float, beta: float):
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0 < v < 1:
            raise DegenerateInputError(f"{name} = {v} outside (0, 1)")
    if alpha == beta:
        raise DegenerateInputError(f"alpha = beta = {alpha}")


# ---------------------------------------------------------------------------
# b-integration


def f_closed_form(alpha: float, beta: float) -> float:
    """(1 - beta)/2 for beta > alpha, -beta/2 for beta < alpha."""
    _check_angles(alpha, beta)
    return (1 - beta) / 2 if beta > alpha else -beta / 2


def b_lemma_reduced(alpha: float, beta: float) -> float:
    """beta - H(beta - alpha); f_closed_form is -1/2 times this."""
    _check_angles(alpha, beta)
    reduced = beta - heaviside(beta - alpha)
    f = f_closed_form(alpha, beta)
    if abs(f + reduced / 2) > 4 * np.finfo(float).eps:
        raise ArithmeticError(f"f({alpha}, {beta}) = {f} is not -1/2 * {reduced}")
    return reduced


# ---------------------------------------------------------------------------
# Laurent pieces


def F_laurent(M: int) -> Dict[int, PiRational]:
    """U^{+-m} -> 1/(m^4 pi^4), 1 <= m <= M."""
    if M < 1:
        raise ValueError(f"F_laurent needs M >= 1, got {M}")
    out = {}
    for m in range(1, M + 1):
        c = PiRational(Fraction(1, m**4), -4)
        out[m] = c
        out[-m] = c
    return out


def g0_slice(coefficients: Mapping[Tuple[int, int], PiRational]) -> Dict[int, PiRational]:
    """U-power -> coefficient of the V^0 terms of a (U, V) Laurent map."""
    return {a: c for (a, b), c in coefficients.items() if b == 0}


def _as_pi_rational(v) -> PiRational:
    return v if isinstance(v, PiRational) else PiRational(Fraction(v))


def pair_zero_mode(F: Mapping[int, object], G0: Mapping[int, object]) -> PiRational:
    """sum_m F(m) G0(-m): the U^0 coefficient of F(U) G0(U)."""
    total = PiRational(Fraction(0))
    for m, c in sorted(F.items()):
        other = G0.get(-m)
        if other is not None:
            total = total + _as_pi_rational(c) * _as_pi_rational(other)
    return total


# ---------------------------------------------------------------------------
# Headline value


def _boundary_sum(N: int) -> Fraction:
    """sum_{k=1}^{N} (H_N - H_{N-k}) / k^5, exact."""
    H = [Fraction(0)]
    for j in range(1, N + 1):
        H.append(H[-1] + Fraction(1, j))
    return sum(((H[N] - H[N - k]) / k**5 for k in range(1, N + 1)), Fraction(0))


def semianalytic_breakdown(N: int) -> SemianalyticBreakdown:
    """Pairing of F with the V^0 slice of G at truncation N, plus tails.

    The truncated pairing is the triangle sum over j + k <= N of
    1/(j(j+k)^5) - 1/(j k^4 (j+k)) - 1/(j^4 (j+k)^2), all over pi^6. Its
    three pieces are partial Euler sums (1,5,1), (1,5,0), (4,2,1); the second
    one is cut along the triangle, which leaves the exact boundary sum.
    """
    if N < 10:
        raise ValueError(f"semianalytic_weight needs N >= 10, got {N}")
    log.info(f"semianalytic: building G at N={N}")
    G = series.build_G(N, v_free=True)
    G0 = g0_slice(series.set_cutoff_one(G))
    pairing = pair_zero_mode(F_laurent(N), G0)
    if not pairing.is_zero and pairing.pi_power != PI_RATIONAL_POWER:
        raise ArithmeticError(f"pairing carries pi^{pairing.pi_power}, expected pi^{PI_RATIONAL_POWER}")
    boundary = _boundary_sum(N)
    log.info(f"semianalytic: pairing={float(pairing)!r}; computing tails")
    with mpmath.workdps(config.WORK_DPS):
        t151, _ = euler_tail(1, 5, 1, N)
        t150, _ = euler_tail(1, 5, 0, N)
        t421, _ = euler_tail(4, 2, 1, N)
        exact = mpmath.mpf(boundary.numerator) / boundary.denominator
        tails = (t151 - t150 - t421) / mpmath.pi**6
        value = pairing.evaluate() + tails - exact / mpmath.pi**6
    log.info(f"semianalytic: N={N} value={mpmath.nstr(value, 15)}")
    return SemianalyticBreakdown(N, pairing, tails, boundary, value)


def semianalytic_weight(N: int) -> mpmath.mpf:
    return semianalytic_breakdown(N).value


def headline_basis() -> Tuple[mpmath.mpf, mpmath.mpf]:
    """[1, zeta(3)^2 / pi^6] at WORK_DPS."""
    with mpmath.workdps(config.WORK_DPS):
        return mpmath.mpf(1), mpmath.zeta(3) ** 2 / mpmath.pi**6


# ---------------------------------------------------------------------------
# Discarded summands


def lemma_UV_check(m: int, n: int, alpha: float, beta: float, N: int = 10**5) -> Tuple[float, float]:
    """(lhs, rhs) of the polylog/Bernoulli lemma at V = e^{2 pi i beta}, U = e^{2 pi i alpha}.

    lhs = Re[(-1)^n / (2 pi i)^s (Li_s(z) + (-1)^s conj Li_s(z))] with
    z = conj(V) U and s = m + n + 1, Li_s truncated at N plus the leading
    tail term; rhs = -(-1)^n / s! B_s(alpha - beta + H(beta - alpha)).
    """
    if m < 0 or n < 0 or m + n < 1:
        raise ValueError(f"lemma needs m, n >= 0 and m + n >= 1 (m={m}, n={n})")
    _check_angles(alpha, beta)
    s = m + n + 1
    x = (alpha - beta) % 1.0
    j = np.arange(1, N + 1, dtype=np.float64)
    phase = 2 * np.pi * ((j * x) % 1.0)
    weights = j ** (-float(s))
    re = math.fsum(np.cos(phase) * weights)
    im = math.fsum(np.sin(phase) * weights)
    z = complex(math.cos(2 * math.pi * x), math.sin(2 * math.pi * x))
    tail = z ** (N + 1) / ((1 - z) * (N + 1) ** s)
    li = complex(re, im) + tail
    combo = li + (-1) ** s * li.conjugate()
    lhs = ((-1) ** n * combo / (2j * math.pi) ** s).real
    shifted = alpha - beta + heaviside(beta - alpha)
    rhs = -((-1) ** n) * float(bernoulli_poly(s)(shifted)) / math.factorial(s)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Integer relations


def _pslq_ladder(values: Sequence, tol: float, scale) -> List[mpmath.mpf]:
    """PSLQ tolerances from the input precision up to ``tol`` relative to
    the input magnitude, one decade per rung."""
    if any(isinstance(v, float) for v in values):
        strict = mpmath.mpf(config.FIT_FLOAT_TOL)
    else:
        strict = mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
    loose = max(strict, mpmath.mpf(tol) / scale)
    rungs = []
    t = strict
    while t < loose:
        rungs.append(t)
        t *= 10
    rungs.append(loose)
    return rungs


def _relation(vec: List[mpmath.mpf], pslq_tol: mpmath.mpf, max_den: int, norm: mpmath.mpf):
    """(coefficients, residual, score) of the PSLQ relation at one tolerance.

    score = |r|^(len(vec) - 1) * |r . vec| / |vec| is about the number of
    integer vectors no longer than r that fit as well by chance; smaller
    means more significant.
    """
    try:
        rel = mpmath.pslq(vec, tol=pslq_tol, maxcoeff=config.FIT_MAX_COEFF, maxsteps=config.FIT_MAX_STEPS)
    except ValueError as e:
        raise NoFitError(f"PSLQ rejected input: {e}") from e
    if rel is None or rel[0] == 0:
        raise NoFitError(f"no integer relation for {mpmath.nstr(vec[0], 12)} over the basis")
    coeffs = tuple(Fraction(-k, rel[0]) for k in rel[1:])
    worst = max(c.denominator for c in coeffs)
    if worst > max_den:
        raise NoFitError(f"relation {rel} needs denominator {worst} > {max_den}")
    approx = mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * b for c, b in zip(coeffs, vec[1:]))
    slack = abs(mpmath.fdot(rel, vec)) / norm
    size = mpmath.sqrt(mpmath.fsum(k * k for k in rel))
    log.debug(f"rational_fit: relation {rel} at PSLQ tol {mpmath.nstr(pslq_tol, 3)}")
    return coeffs, float(abs(vec[0] - approx)), size ** (len(vec) - 1) * max(slack, mpmath.eps)


def rational_fit(
    value,
    basis: Sequence,
    max_den: int = config.FIT_MAX_DEN,
    tol: float = config.FIT_TOL,
) -> FitResult:
    """Rationals c_i with value = sum c_i * basis_i, via PSLQ on [value] + basis.

    PSLQ runs at the input's own precision first and is relaxed one decade
    at a time up to ``tol`` scaled by the input norm, so noisy values still
    fit. Of the relations that pass, the most significant one wins. Raises
    NoFitError when no relation with denominators <= max_den and residual
    <= tol exists.
    """
    if not basis:
        raise ValueError("basis must be nonempty")
    if not 1 <= max_den <= 10**6:
        raise ValueError(f"max_den must be in [1, 10^6], got {max_den}")
    with mpmath.workdps(config.WORK_DPS):
        vec = [mpmath.mpf(value)] + [mpmath.mpf(b) for b in basis]
        norm = mpmath.sqrt(mpmath.fsum(v**2 for v in vec)) or mpmath.mpf(1)
        best, failure = None, None
        for pslq_tol in _pslq_ladder([value, *basis], tol, norm):
            try:
                coeffs, residual, score = _relation(vec, pslq_tol, max_den, norm)
            except NoFitError as e:
                failure = e
                continue
            if residual > tol:
                failure = NoFitError(f"best relation leaves residual {residual:.3e} > {tol:.1e}")
            elif best is None or score < best[2]:
                best = (coeffs, residual, score)
        if best is None:
            raise failure
        coeffs, residual, score = best
    if residual > tol / 100:
        log.warning(f"rational_fit: residual {residual:.3e} is close to tol {tol:.1e}")
    log.debug(f"rational_fit: coefficients {[str(c) for c in coeffs]}, score {mpmath.nstr(score, 3)}")
    return FitResult(coefficients=coeffs, residual=residual, max_denominator=max_den)
