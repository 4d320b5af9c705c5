from fractions import Fraction

import pytest

from specfun import PiRational
from verify import (
    Check,
    bernoulli_graph_reference,
    circle_identity_residual,
    g0_oracle,
    lemma_series_failures,
    run_suite,
)


def test_check_pass_semantics():
    assert Check("x", 1.0).passed is None
    assert Check("x", 1.0, 1.05, 0.1).passed is True
    assert Check("x", 1.0, 1.5, 0.1).passed is False
    assert Check("x", 2.0, 2.0, 0.0).as_dict() == {"name": "x", "value": 2.0, "expected": 2.0, "tolerance": 0.0, "pass": True}


def test_g0_oracle_smallest_truncation():
    # j = k = 1 only
    assert g0_oracle(2) == {
        2: PiRational(Fraction(1, 4), -2),
        -2: PiRational(Fraction(1, 4), -2),
        1: PiRational(Fraction(-3, 8), -2),
        -1: PiRational(Fraction(-3, 8), -2),
    }


def test_bernoulli_graph_reference():
    assert bernoulli_graph_reference(2, 0.5) == pytest.approx(-1 / 24)
    assert bernoulli_graph_reference(1, 0.25) == pytest.approx(-0.25)
    assert bernoulli_graph_reference(2, 0.0) == pytest.approx(1 / 12)


@pytest.mark.parametrize("n,y", [(0, 0.4), (1, 0.3), (2, 0.1), (3, 0.77), (6, 0.5)])
def test_circle_identity(n, y):
    assert circle_identity_residual(n, y) < 1e-11


def test_lemma_series_has_no_failures():
    assert lemma_series_failures(1, 1, 10) == 0


def test_suites():
    checks = run_suite("identities")
    assert checks and all(c.passed for c in checks)
    with pytest.raises(ValueError):
        run_suite("nope")


def test_sums_suite_checks_partial_fractions():
    rows = {c.name: c for c in run_suite("sums")}
    assert rows["cube_pair_fractions_failures"].value == 0.0
    assert all(c.passed for c in rows.values() if c.passed is not None)


@pytest.mark.slow
def test_calibration_suite_passes():
    checks = run_suite("calibration")
    names = {c.name for c in checks}
    assert {"gamma2_x0.5", "gamma2_integral", "gamma2_slope_x0.25", "wheel_2"} <= names
    assert all(c.passed is not False for c in checks)
