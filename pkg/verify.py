"""Verification suites run by ``cli verify``.

Each suite returns a list of Check rows. A row with an expectation passes
when |value - expected| <= tolerance; rows without one are informational.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import mpmath
import numpy as np

import config  # type: ignore
import eulersums
import graphs
import pipeline
import series
from geometry import mc_weight
from specfun import (
    PiRational,
    bernoulli_poly,
    polylog_on_circle,
    zeta_even_exact,
)


log = logging.getLogger(__name__)

CIRCLE_GRID = [k / 10 for k in range(1, 10)]
LEMMA_PAIRS = [(1, 0), (0, 1), (1, 1), (2, 1)]
LEMMA_GRID = [(0.7, 0.2), (0.25, 0.75), (0.1, 0.4), (0.9, 0.35), (0.55, 0.15)]
BSUB_POINTS = [(0.2, 0.6), (0.6, 0.2)]
GAMMA1_POINTS = [0.25, 0.5, 0.75]
PARTIAL_FRACTION_BOX = 50
WHEEL_2_WEIGHT = 0.0  # see graphs.build_wheel_graph
DEFAULT_SAMPLES = 10**6


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: Optional[float] = None
    tolerance: Optional[float] = None

    @property
    def passed(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return abs(self.value - self.expected) <= self.tolerance

    def as_dict(self) -> Dict:
        return {
            "name": self.name,
            "value": self.value,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _count(name: str, failures: int) -> Check:
    return Check(name, float(failures), 0.0, 0.0)


# ---------------------------------------------------------------------------
# identities


def circle_identity_residual(n: int, y: float) -> float:
    """|Li_n(e^{2 pi i y}) + (-1)^n Li_n(e^{-2 pi i y}) + (2 pi i)^n B_n(y)/n!|."""
    lhs = polylog_on_circle(n, y) + (-1) ** n * polylog_on_circle(n, 1 - y)
    rhs = -((2j * math.pi) ** n) * float(bernoulli_poly(n)(y)) / math.factorial(n)
    return abs(lhs - rhs)


def suite_identities(samples: int = DEFAULT_SAMPLES, seed: int = config.SEED) -> List[Check]:
    checks = []
    worst = max(circle_identity_residual(n, y) for n in range(0, 7) for y in CIRCLE_GRID)
    checks.append(Check("polylog_bernoulli_circle_max_residual", worst, 0.0, 1e-11))

    bad = 0
    for n in range(1, 13):
        if bernoulli_poly(n).derivative() != bernoulli_poly(n - 1).scale(n):
            bad += 1
        if bernoulli_poly(n).integral01() != 0:
            bad += 1
    checks.append(_count("bernoulli_derivative_and_mean_failures", bad))

    with mpmath.workdps(config.WORK_DPS):
        worst_zeta = max(
            float(abs(zeta_even_exact(n).evaluate() / mpmath.zeta(n) - 1)) for n in range(2, 14, 2)
        )
    checks.append(Check("zeta_even_exact_max_rel_error", worst_zeta, 0.0, config.ZETA_REL_TOL))
    return checks


# ---------------------------------------------------------------------------
# sums


def suite_sums(samples: int = DEFAULT_SAMPLES, seed: int = config.SEED) -> List[Check]:
    checks = []
    worst, worst_bound = 0.0, 0.0
    for n in range(1, 21):
        h = float(sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0)))
        for variant, expected in (("plus", h), ("minus", h - 2 / n)):
            res = eulersums.jjpn_sum(n, variant, N=10**6)
            worst = max(worst, abs(res.value - expected))
            worst_bound = max(worst_bound, res.tail_bound)
    checks.append(Check("jjpn_max_error", worst, 0.0, 1e-9))
    checks.append(Check("jjpn_max_tail_bound", worst_bound, 0.0, 1e-9))

    cases = [(4, 2, 0), (4, 2, 1)]
    cases += [(r, r, off) for r in (2, 3, 4) for off in (0, 1)]
    cases += [(1, m, off) for m in range(2, 6) for off in (0, 1)]
    for a, b, off in cases:
        res = eulersums.euler_sum(a, b, off, N=10**4)
        closed = eulersums.euler_sum_closed(a, b, off)
        checks.append(Check(f"euler_sum_{a}_{b}_{off}", res.value, closed, 1e-9))

    exact = eulersums.euler_partial_exact(4, 2, 1, 200)
    checks.append(Check("euler_partial_exact_4_2_1_N200", eulersums.euler_partial(4, 2, 1, 200), float(exact), 1e-13))

    pointwise = 0
    twice, rest = Fraction(0), Fraction(0)
    for j in range(1, PARTIAL_FRACTION_BOX + 1):
        for k in range(1, PARTIAL_FRACTION_BOX + 1):
            terms = eulersums.cube_pair_fractions(j, k)
            lhs = Fraction(1, j**3 * (j + k) ** 3)
            pointwise += sum(terms) != lhs
            twice += 2 * lhs
            rest += sum(terms[:3]) + sum(terms[4:])
    checks.append(_count("cube_pair_fractions_failures", pointwise + (twice != rest)))
    return checks


# ---------------------------------------------------------------------------
# series


def g0_oracle(N: int) -> Dict[int, PiRational]:
    """V^0 coefficients of build_G(N) at lambda = 1 from the double sum over
    j, k >= 1, j + k <= N, of (1/2 pi^2) (U^{j+k}/(j(j+k)) - Ubar^k/(j(j+k))
    - U^j/(j+k)^2) + c.c."""
    acc: Dict[int, Fraction] = {}

    def add(power: int, value: Fraction):
        acc[power] = acc.get(power, Fraction(0)) + value

    for j in range(1, N):
        for k in range(1, N - j + 1):
            jk = Fraction(1, j * (j + k))
            sq = Fraction(1, (j + k) ** 2)
            add(j + k, jk)
            add(-k, -jk)
            add(j, -sq)
            add(-(j + k), jk)
            add(k, -jk)
            add(-j, -sq)
    return {p: PiRational(c / 2, -2) for p, c in acc.items() if c != 0}


def lemma_series_failures(m: int, n: int, N: int) -> int:
    got = series.build_lemma_uv(m, n, N)
    s = m + n + 1
    want = {}
    for j in range(1, N + 1):
        want[(j, -j)] = PiRational(Fraction((-1) ** n, 2 * j**s))
        want[(-j, j)] = PiRational(Fraction(-((-1) ** m), 2 * j**s))
    return sum(1 for k in set(got) | set(want) if got.get(k) != want.get(k))


def suite_series(samples: int = DEFAULT_SAMPLES, seed: int = config.SEED, N: int = 40) -> List[Check]:
    full = series.set_cutoff_one(series.build_G(N))
    g0 = pipeline.g0_slice(full)
    oracle = g0_oracle(N)
    mismatches = sum(1 for p in set(g0) | set(oracle) if g0.get(p) != oracle.get(p))
    checks = [_count(f"build_G_{N}_v0_oracle_mismatches", mismatches)]

    free = series.set_cutoff_one(series.build_G(N, v_free=True))
    sliced = {(a, 0): c for a, c in g0.items()}
    checks.append(_count(f"build_G_{N}_v_free_mismatches", sum(1 for k in set(free) | set(sliced) if free.get(k) != sliced.get(k))))
    checks.append(_count("build_G_pi_power_failures", sum(1 for c in full.values() if c.pi_power != -2)))

    bad = sum(lemma_series_failures(m, n, 20) for m, n in LEMMA_PAIRS)
    checks.append(_count("build_lemma_uv_failures", bad))
    return checks


# ---------------------------------------------------------------------------
# lemmas


def suite_lemmas(samples: int = DEFAULT_SAMPLES, seed: int = config.SEED) -> List[Check]:
    checks = []
    worst = 0.0
    for m, n in LEMMA_PAIRS:
        for alpha, beta in LEMMA_GRID:
            lhs, rhs = pipeline.lemma_UV_check(m, n, alpha, beta, N=10**5)
            worst = max(worst, abs(lhs - rhs))
    checks.append(Check("lemma_uv_max_residual", worst, 0.0, 1e-8))

    b_bad = 0
    for alpha, beta in BSUB_POINTS:
        reduced = pipeline.b_lemma_reduced(alpha, beta)
        if reduced != beta - pipeline.heaviside(beta - alpha):
            b_bad += 1
    checks.append(_count("b_lemma_reduced_failures", b_bad))

    bsub = graphs.build_b_subgraph()
    for alpha, beta in BSUB_POINTS:
        est = mc_weight(bsub, samples, seed=seed, fixed={"U": alpha, "V": beta}, fiber=True)
        checks.append(
            Check(f"bsub_fiber_mc_{alpha}_{beta}", est.value, pipeline.f_closed_form(alpha, beta), 3 * est.stderr)
        )
    return checks


# ---------------------------------------------------------------------------
# calibration


def bernoulli_graph_reference(n: int, x: float) -> float:
    """B_n(x)/n!, the weight of the n-vertex Bernoulli graph at P = x."""
    return float(bernoulli_poly(n)(x)) / math.factorial(n)


def suite_calibration(samples: int = DEFAULT_SAMPLES, seed: int = config.SEED) -> List[Check]:
    checks = []
    g1 = graphs.build_bernoulli_graph(1)
    g2 = graphs.build_bernoulli_graph(2)
    for x in GAMMA1_POINTS:
        est = mc_weight(g1, samples, seed=seed, fixed={"P": x})
        checks.append(Check(f"gamma1_x{x}", est.value, bernoulli_graph_reference(1, x), 3 * est.stderr))

    est2 = mc_weight(g2, samples, seed=seed, fixed={"P": 0.5})
    checks.append(Check("gamma2_x0.5", est2.value, bernoulli_graph_reference(2, 0.5), 3 * est2.stderr))

    # two-point Gauss-Legendre is exact for the quadratic Gamma_2
    nodes, weights = np.polynomial.legendre.leggauss(2)
    at_nodes = [mc_weight(g2, samples, seed=seed, fixed={"P": float((1 + t) / 2)}) for t in nodes]
    mean = sum(w / 2 * e.value for w, e in zip(weights, at_nodes))
    mean_err = math.sqrt(sum((w / 2 * e.stderr) ** 2 for w, e in zip(weights, at_nodes)))
    checks.append(Check("gamma2_integral", float(mean), 0.0, 3 * mean_err))

    h = 0.1
    hi = mc_weight(g2, samples, seed=seed, fixed={"P": 0.25 + h})
    lo = mc_weight(g2, samples, seed=seed, fixed={"P": 0.25 - h})
    slope = (hi.value - lo.value) / (2 * h)
    slope_err = math.hypot(hi.stderr, lo.stderr) / (2 * h)
    checks.append(Check("gamma2_slope_x0.25", slope, bernoulli_graph_reference(1, 0.25), 3 * slope_err))

    poisson = mc_weight(graphs.build_poisson_graph(), min(samples, 10**4), seed=seed, ordered=True)
    checks.append(Check("poisson_ordered", poisson.value, config.ORIENTATION * 0.5, 1e-9))

    wheel = mc_weight(graphs.build_wheel_graph(2), samples, seed=seed)
    checks.append(Check("wheel_2", wheel.value, WHEEL_2_WEIGHT, 3 * wheel.stderr))
    checks.append(Check("wheel_2_stderr", wheel.stderr))
    return checks


# ---------------------------------------------------------------------------
# headline


def suite_headline(samples: int = DEFAULT_SAMPLES, seed: int = config.SEED, N: int = 200) -> List[Check]:
    value = pipeline.semianalytic_weight(N)
    target = eulersums.final_constant()
    checks = [Check(f"semianalytic_weight_N{N}", float(value), target, 1e-6)]
    fit = pipeline.rational_fit(value, list(pipeline.headline_basis()))
    rational, zeta_part = fit.coefficients
    checks.append(Check("fit_rational_part", float(rational), float(Fraction(-37, 11340)), 0.0))
    checks.append(Check("fit_zeta3_squared_coefficient", float(zeta_part), 1.0, 0.0))
    checks.append(Check("fit_residual", fit.residual, 0.0, 1e-8))
    return checks


SUITES: Dict[str, Callable[..., List[Check]]] = {
    "identities": suite_identities,
    "sums": suite_sums,
    "series": suite_series,
    "lemmas": suite_lemmas,
    "calibration": suite_calibration,
    "headline": suite_headline,
}


def run_suite(name: str, samples: int = DEFAULT_SAMPLES, seed: int = config.SEED) -> List[Check]:
    names = list(SUITES) if name == "all" else [name]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES)} or all")
    checks = []
    for n in names:
        log.info(f"suite {n}: start")
        rows = SUITES[n](samples=samples, seed=seed)
        failed = sum(1 for c in rows if c.passed is False)
        log.info(f"suite {n}: {len(rows)} checks, {failed} failed")
        checks.extend(rows)
    return checks
