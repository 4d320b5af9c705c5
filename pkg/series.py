"""Exact truncated Fourier-Laurent series in w = r e^{2 pi i phi}, U and V.

A term c * r^p * e^{2 pi i s phi} * U^a * V^b is stored as
``terms[(p, s, a, b)] = c`` with ``c`` a PiRational. Imaginary units are not
part of the coefficient ring: a series carries one ``i_power`` flag (0 or 1)
meaning every coefficient is multiplied by i^{i_power}. Im/Re extraction
moves between the two; products add flags and resolve i^2 = -1.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import config  # type: ignore
from specfun import PiRational


log = logging.getLogger(__name__)

Key = Tuple[int, int, int, int]  # (p, s, a, b)
CutKey = Tuple[int, int, int]  # (lambda power, a, b)

ONE = PiRational(Fraction(1))
HALF = PiRational(Fraction(1, 2))


class TruncationMismatchError(ValueError):
    pass


class DivergenceError(ArithmeticError):
    pass


class NonRealCoefficientError(ArithmeticError):
    pass


class Twist(Enum):
    NONE = "none"
    U_BAR = "U-bar"
    V_BAR = "V-bar"


@dataclass(frozen=True)
class FourierSeries:
    truncation: int
    terms: Dict[Key, PiRational] = field(default_factory=dict)
    i_power: int = 0

    @property
    def max_r_power(self) -> int:
        return 3 * self.truncation


@dataclass(frozen=True)
class CutoffSeries:
    terms: Dict[CutKey, PiRational] = field(default_factory=dict)
    i_power: int = 0


def _clean(terms: Dict) -> Dict:
    return {k: v for k, v in terms.items() if not v.is_zero}


def _accumulate(acc: Dict, key, value: PiRational):
    prev = acc.get(key)
    acc[key] = value if prev is None else prev + value


def constant(N: int, c: PiRational = ONE) -> FourierSeries:
    return FourierSeries(N, _clean({(0, 0, 0, 0): c}))


def polylog_series(n: int, twist: Twist, conjugated: bool, N: int) -> FourierSeries:
    """sum_{j=1}^{N} r^j e^{2 pi i j phi} X^{-j} / j^n, X per twist; conjugated
    flips the phi frequency and the U/V powers."""
    if N < 1:
        raise ValueError(f"truncation must be >= 1, got {N}")
    sign = -1 if conjugated else 1
    terms = {}
    for j in range(1, N + 1):
        a = -j if twist is Twist.U_BAR else 0
        b = -j if twist is Twist.V_BAR else 0
        terms[(j, sign * j, sign * a, sign * b)] = PiRational(Fraction(1, j**n))
    return FourierSeries(N, terms)


# ---------------------------------------------------------------------------
# Ring operations


def _same_truncation(f: FourierSeries, g: FourierSeries) -> int:
    if f.truncation != g.truncation:
        raise TruncationMismatchError(f"truncations differ: {f.truncation} vs {g.truncation}")
    return f.truncation


def _merged_i_power(f, g) -> int:
    if not f.terms:
        return g.i_power
    if not g.terms:
        return f.i_power
    if f.i_power != g.i_power:
        raise NonRealCoefficientError("cannot add a real and an imaginary series")
    return f.i_power


def series_add(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    N = _same_truncation(f, g)
    i_power = _merged_i_power(f, g)
    acc = dict(f.terms)
    for k, v in g.terms.items():
        _accumulate(acc, k, v)
    return FourierSeries(N, _clean(acc), i_power)


def series_scale(f: FourierSeries, c) -> FourierSeries:
    c = c if isinstance(c, PiRational) else PiRational(Fraction(c))
    return FourierSeries(f.truncation, _clean({k: v * c for k, v in f.terms.items()}), f.i_power)


def series_sub(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    return series_add(f, series_scale(g, -1))


def _product_i_power(f, g) -> Tuple[int, int]:
    """(i_power, sign) of the product flags."""
    total = f.i_power + g.i_power
    return (total - 2, -1) if total >= 2 else (total, 1)


def series_mul(f: FourierSeries, g: FourierSeries) -> FourierSeries:
    """Exact product, truncated at total r-power 3N."""
    N = _same_truncation(f, g)
    i_power, sign = _product_i_power(f, g)
    limit = f.max_r_power
    acc: Dict[Key, PiRational] = {}
    for (p1, s1, a1, b1), c1 in f.terms.items():
        for (p2, s2, a2, b2), c2 in g.terms.items():
            p = p1 + p2
            if p > limit:
                continue
            _accumulate(acc, (p, s1 + s2, a1 + a2, b1 + b2), c1 * c2)
    out = FourierSeries(N, _clean(acc), i_power)
    return series_scale(out, sign) if sign < 0 else out


def series_conj(f: FourierSeries) -> FourierSeries:
    terms = {(p, -s, -a, -b): c for (p, s, a, b), c in f.terms.items()}
    out = FourierSeries(f.truncation, terms, f.i_power)
    return series_scale(out, -1) if f.i_power else out


def take_re(f: FourierSeries) -> FourierSeries:
    """(f + conj f) / 2."""
    return series_scale(series_add(f, series_conj(f)), HALF)


def take_im(f: FourierSeries) -> FourierSeries:
    """(f - conj f) / 2i. A real series becomes an i-flagged one and back."""
    diff = series_sub(f, series_conj(f))
    if f.i_power == 0:
        # 1/(2i) = -i/2
        return FourierSeries(f.truncation, _clean({k: v * Fraction(-1, 2) for k, v in diff.terms.items()}), 1)
    return FourierSeries(f.truncation, _clean({k: v * Fraction(1, 2) for k, v in diff.terms.items()}), 0)


# ---------------------------------------------------------------------------
# Integrations


def integrate_phi(f: FourierSeries) -> FourierSeries:
    return FourierSeries(f.truncation, {k: v for k, v in f.terms.items() if k[1] == 0}, f.i_power)


def integrate_phi_product(factors: Sequence[FourierSeries]) -> FourierSeries:
    """integrate_phi of the product of ``factors`` without building the full
    product: the last factor is only matched against opposite frequencies."""
    if not factors:
        raise ValueError("integrate_phi_product needs at least one factor")
    head = factors[0]
    for g in factors[1:-1]:
        head = series_mul(head, g)
    if len(factors) == 1:
        return integrate_phi(head)
    last = factors[-1]
    N = _same_truncation(head, last)
    i_power, sign = _product_i_power(head, last)
    by_freq: Dict[int, List[Tuple[Key, PiRational]]] = defaultdict(list)
    for k, c in last.terms.items():
        by_freq[k[1]].append((k, c))
    limit = head.max_r_power
    acc: Dict[Key, PiRational] = {}
    for (p1, s1, a1, b1), c1 in head.terms.items():
        for (p2, _, a2, b2), c2 in by_freq.get(-s1, ()):
            p = p1 + p2
            if p > limit:
                continue
            _accumulate(acc, (p, 0, a1 + a2, b1 + b2), c1 * c2)
    out = FourierSeries(N, _clean(acc), i_power)
    return series_scale(out, sign) if sign < 0 else out


def integrate_radial(f: FourierSeries) -> CutoffSeries:
    """int_0^lambda dr/r: r^p -> lambda^p / p."""
    acc: Dict[CutKey, PiRational] = {}
    for (p, s, a, b), c in f.terms.items():
        if s != 0:
            raise ValueError("integrate_radial needs a phi-free series; integrate over phi first")
        if p == 0:
            raise DivergenceError(f"r^0 term at U^{a} V^{b}: log-divergent radial integral")
        _accumulate(acc, (p, a, b), c * Fraction(1, p))
    return CutoffSeries(_clean(acc), f.i_power)


def set_cutoff_one(f: CutoffSeries) -> Dict[Tuple[int, int], PiRational]:
    """lambda -> 1: sum all lambda powers per (a, b)."""
    if f.i_power and f.terms:
        raise NonRealCoefficientError("series is purely imaginary; expected a real combination")
    acc: Dict[Tuple[int, int], PiRational] = {}
    for (_, a, b), c in f.terms.items():
        _accumulate(acc, (a, b), c)
    return _clean(acc)


def cutoff_add(f: CutoffSeries, g: CutoffSeries) -> CutoffSeries:
    i_power = _merged_i_power(f, g)
    acc = dict(f.terms)
    for k, v in g.terms.items():
        _accumulate(acc, k, v)
    return CutoffSeries(_clean(acc), i_power)


# ---------------------------------------------------------------------------
# The integrands of the main computation


def build_G(N: int, v_free: bool = False) -> CutoffSeries:
    """G(U, V) = c * int dr/(pi r) int dphi K * D * A with

        K = -(1/pi) Im(Li_1(w Vbar) - Li_1(w))
        D = Im(Li_0(w Vbar) - Li_0(w))
        A = 2 Re Li_0(w Ubar)

    and c = G_NORMALIZATION. The beta summand of kappa(w, V) and the constant 1
    of d_alpha kappa(w, U) are left out. ``v_free`` drops the V-dependent
    parts of K and D; after the phi-integral this is exactly the V^0 slice.
    """
    if N < 2:
        raise ValueError(f"build_G needs N >= 2, got {N}")
    li1 = polylog_series(1, Twist.NONE, False, N)
    li0 = polylog_series(0, Twist.NONE, False, N)
    if v_free:
        k_inner = series_scale(li1, -1)
        d_inner = series_scale(li0, -1)
    else:
        k_inner = series_sub(polylog_series(1, Twist.V_BAR, False, N), li1)
        d_inner = series_sub(polylog_series(0, Twist.V_BAR, False, N), li0)
    K = series_scale(take_im(k_inner), PiRational(Fraction(-1), -1))
    D = take_im(d_inner)
    A = series_scale(take_re(polylog_series(0, Twist.U_BAR, False, N)), 2)
    phi_free = integrate_phi_product([K, D, A])
    radial = integrate_radial(phi_free)
    norm = PiRational(Fraction(config.G_NORMALIZATION), -1)
    out = CutoffSeries({k: v * norm for k, v in radial.terms.items()}, radial.i_power)
    log.debug(f"build_G(N={N}, v_free={v_free}): {len(out.terms)} cutoff terms")
    return out


def build_lemma_uv(m: int, n: int, N: int) -> Dict[Tuple[int, int], PiRational]:
    """Laurent coefficients of int dr/r int dphi
    (Li_m(w Vbar) - (-1)^m c.c.) (Li_n(w Ubar) + (-1)^n c.c.) at lambda = 1.

    Only (Vbar U)^j and its conjugate survive:
    (-1)^n / (2 j^{m+n+1}) at U^j V^-j and -(-1)^m / (2 j^{m+n+1}) at U^-j V^j.
    """
    lm = polylog_series(m, Twist.V_BAR, False, N)
    ln = polylog_series(n, Twist.U_BAR, False, N)
    first = series_sub(lm, series_scale(series_conj(lm), (-1) ** m))
    second = series_add(ln, series_scale(series_conj(ln), (-1) ** n))
    return set_cutoff_one(integrate_radial(integrate_phi_product([first, second])))
