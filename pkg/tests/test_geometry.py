import numpy as np
import pytest

import config
from geometry import (
    CoincidenceError,
    Configuration,
    DimensionMismatchError,
    angle_partials,
    domain_volume,
    hyperbolic_angle,
    make_rng,
    mc_weight,
    mobius_to_origin,
    proposal_plan,
    sample_batch,
    sample_configuration,
    weight_form_value,
)
from graphs import (
    KGraph,
    build_b_subgraph,
    build_bernoulli_graph,
    build_main_graph,
    build_poisson_graph,
    build_wheel_graph,
)
from pipeline import f_closed_form
from specfun import DomainError, polylog


U0 = 0.2 + 0.1j
V0 = -0.3 + 0.4j
H = 1e-6


def turn_gap(a: float, b: float) -> float:
    """Distance between two angles measured in turns."""
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


def random_disk(rng, n: int, radius: float) -> np.ndarray:
    return radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def test_mobius_sends_u_to_origin():
    assert mobius_to_origin(U0, U0) == 0
    assert abs(mobius_to_origin(U0, np.exp(0.3j))) == pytest.approx(1.0)


def test_angle_at_origin():
    assert hyperbolic_angle(0, 0.25, boundary=True) == pytest.approx(0.25)
    assert hyperbolic_angle(0, 0.5j) == pytest.approx(0.25)
    assert hyperbolic_angle(0, -0.5) == pytest.approx(0.5)


def test_angle_is_conformally_invariant():
    # moving u to 0 by the disk automorphism preserves the hyperbolic angle
    for v in (V0, 0.5 - 0.5j, -0.1j):
        moved = mobius_to_origin(U0, v)
        anchor = mobius_to_origin(U0, 1)
        at_origin = (np.angle(moved) - np.angle(anchor)) / (2 * np.pi) % 1.0
        assert hyperbolic_angle(U0, v) == pytest.approx(at_origin)


def test_angle_errors():
    with pytest.raises(CoincidenceError):
        hyperbolic_angle(0.1, 0.1)
    with pytest.raises(DomainError):
        hyperbolic_angle(1.2, 0.1)
    with pytest.raises(DomainError):
        hyperbolic_angle(0.1, 1.3, boundary=True)


def test_interior_partials_match_finite_differences():
    got = angle_partials(U0, V0)
    fd = [
        (hyperbolic_angle(U0 + H, V0) - hyperbolic_angle(U0 - H, V0)) / (2 * H),
        (hyperbolic_angle(U0 + 1j * H, V0) - hyperbolic_angle(U0 - 1j * H, V0)) / (2 * H),
        (hyperbolic_angle(U0, V0 + H) - hyperbolic_angle(U0, V0 - H)) / (2 * H),
        (hyperbolic_angle(U0, V0 + 1j * H) - hyperbolic_angle(U0, V0 - 1j * H)) / (2 * H),
    ]
    assert np.allclose(got, fd, atol=1e-6)


def test_boundary_partials_match_finite_differences():
    beta = 0.3
    got = angle_partials(U0, beta, boundary=True)
    fd = [
        (hyperbolic_angle(U0 + H, beta, True) - hyperbolic_angle(U0 - H, beta, True)) / (2 * H),
        (hyperbolic_angle(U0 + 1j * H, beta, True) - hyperbolic_angle(U0 - 1j * H, beta, True)) / (2 * H),
        (hyperbolic_angle(U0, beta + H, True) - hyperbolic_angle(U0, beta - H, True)) / (2 * H),
    ]
    assert np.allclose(got, fd, atol=1e-6)

W_GRID = [r * np.exp(2j * np.pi * k / 4 + 0.3j) for r in (0.05, 0.3, 0.55, 0.8, 0.95) for k in range(4)]


@pytest.mark.parametrize("w", W_GRID)
def test_angle_matches_log_closed_form(w):
    # kappa(w, alpha) = alpha - Im(Li_1(w conj(U)) - Li_1(w)) / pi with U = e^{2 pi i alpha}
    for alpha in [(k + 0.5) / 20 for k in range(20)]:
        U = np.exp(2j * np.pi * alpha)
        closed = alpha - (polylog(1, w * np.conj(U)) - polylog(1, w)).imag / np.pi
        assert turn_gap(hyperbolic_angle(w, alpha, boundary=True), closed) < 1e-12


def central_difference(f, h: float) -> float:
    return ((f(h) - f(-h) + 0.5) % 1.0 - 0.5) / (2 * h)


def test_interior_partials_at_random_points():
    rng = np.random.default_rng(20)
    checked = 0
    while checked < 100:
        u, v = random_disk(rng, 2, 0.8)
        if abs(u - v) < 0.2:
            continue
        got = angle_partials(u, v)
        fd = [
            central_difference(lambda t: hyperbolic_angle(u + t, v), 1e-5),
            central_difference(lambda t: hyperbolic_angle(u + 1j * t, v), 1e-5),
            central_difference(lambda t: hyperbolic_angle(u, v + t), 1e-5),
            central_difference(lambda t: hyperbolic_angle(u, v + 1j * t), 1e-5),
        ]
        assert np.allclose(got, fd, rtol=0, atol=1e-6)
        checked += 1


def test_boundary_partials_at_random_points():
    rng = np.random.default_rng(21)
    for u, beta in zip(random_disk(rng, 100, 0.8), rng.uniform(0.01, 0.99, 100)):
        got = angle_partials(u, beta, boundary=True)
        fd = [
            central_difference(lambda t: hyperbolic_angle(u + t, beta, True), 1e-5),
            central_difference(lambda t: hyperbolic_angle(u + 1j * t, beta, True), 1e-5),
            central_difference(lambda t: hyperbolic_angle(u, beta + t, True), 1e-5),
        ]
        assert np.allclose(got, fd, rtol=0, atol=1e-6)


def test_weight_form_value_poisson():
    c = Configuration(interior={"z": 0j}, boundary={"X": 0.1, "Y": 0.6})
    assert weight_form_value(build_poisson_graph(), c) == pytest.approx(config.ORIENTATION)


@pytest.mark.parametrize("i,j", [(0, 1), (0, 3), (1, 2)])
def test_swapping_two_edges_flips_the_sign(i, j):
    g = build_bernoulli_graph(2)
    edges = list(g.edges)
    edges[i], edges[j] = edges[j], edges[i]
    swapped = KGraph(g.type_i, g.type_ii, tuple(edges), g.pinned)
    c = Configuration(interior={"z": 0j, "a1": 0.3 - 0.2j, "a2": -0.1 + 0.5j}, boundary={"P": 0.35})
    value = weight_form_value(g, c, fixed=["P"])
    assert value != 0
    assert weight_form_value(swapped, c, fixed=["P"]) == pytest.approx(-value, rel=1e-12)


def test_weight_form_value_errors():
    g = build_bernoulli_graph(1)
    with pytest.raises(CoincidenceError):
        weight_form_value(g, Configuration({"z": 0j, "a1": 0j}, {"P": 0.2}), fixed=["P"])
    with pytest.raises(ValueError):
        weight_form_value(g, Configuration({"z": 0.1j, "a1": 0.5}, {"P": 0.2}), fixed=["P"])
    with pytest.raises(DimensionMismatchError):
        weight_form_value(g, Configuration({"z": 0j, "a1": 0.5}, {"P": 0.2}))


def test_sampling_is_deterministic():
    g = build_main_graph()
    a = sample_configuration(g, seed=7)
    b = sample_configuration(g, seed=7)
    assert a == b
    assert a.interior["z"] == 0
    assert all(abs(p) < 1 for p in a.interior.values())
    assert all(0 <= t < 1 for t in a.boundary.values())


def test_ordered_sampling_sorts_free_angles():
    interior, boundary = sample_batch(build_poisson_graph(), make_rng(3), 1000, ordered=True)
    assert np.all(boundary["X"] <= boundary["Y"])


def test_uniform_sampler_second_moment():
    interior, _ = sample_batch(build_bernoulli_graph(1), make_rng(5), 10**5, fixed={"P": 0.3})
    r2 = np.abs(interior["a1"]) ** 2
    stderr = r2.std(ddof=1) / np.sqrt(r2.size)
    assert abs(r2.mean() - 0.5) < 3 * stderr


def test_proposal_plan_draws_targets_first():
    assert proposal_plan(build_bernoulli_graph(2)) == [("a2", ("P", "z")), ("a1", ("a2", "P"))]
    assert proposal_plan(build_poisson_graph()) == []
    assert [v for v, _ in proposal_plan(build_wheel_graph(3))] == ["c3", "c2"]
    # a cycle between free vertices falls back to graph order
    loop = KGraph(("z", "a", "b"), ("P",), (("a", "b"), ("b", "a"), ("a", "P"), ("b", "P")), "z")
    assert proposal_plan(loop) == [("a", ("P",)), ("b", ("a", "P"))]


def test_domain_volume():
    assert domain_volume(build_main_graph(), ordered=False) == pytest.approx(np.pi**6)
    assert domain_volume(build_poisson_graph(), ordered=True) == pytest.approx(0.5)
    assert domain_volume(build_bernoulli_graph(2), ordered=False, fixed=["P"]) == pytest.approx(np.pi**2)


def test_poisson_weight_is_exact():
    est = mc_weight(build_poisson_graph(), 5000, seed=1, ordered=True)
    assert est.value == config.ORIENTATION * 0.5
    assert est.stderr == 0.0
    assert mc_weight(build_poisson_graph(), 5000, seed=1).value == config.ORIENTATION


def test_empty_graph_has_weight_one():
    g = KGraph(("z",), ("P",), (), "z")
    assert mc_weight(g, 100, seed=0, fixed={"P": 0.3}).value == 1.0


def test_mc_determinism_across_threads():
    g = build_bernoulli_graph(2)
    a = mc_weight(g, 20000, seed=11, fixed={"P": 0.4}, threads=1)
    b = mc_weight(g, 20000, seed=11, fixed={"P": 0.4}, threads=4)
    assert a == b
    c = mc_weight(g, 20000, seed=12, fixed={"P": 0.4})
    assert c.value != a.value


def test_mc_errors():
    with pytest.raises(DimensionMismatchError):
        mc_weight(build_bernoulli_graph(1), 10)
    with pytest.raises(CoincidenceError):
        mc_weight(build_b_subgraph(), 10, fixed={"U": 0.3, "V": 0.3}, fiber=True)
    with pytest.raises(ValueError):
        mc_weight(build_bernoulli_graph(1), 10, fixed={"z": 0.3})
    with pytest.raises(ValueError):
        mc_weight(build_bernoulli_graph(1), 0, fixed={"P": 0.3})
    with pytest.raises(ValueError):
        mc_weight(build_bernoulli_graph(1), 10, fixed={"P": 0.3}, uniform_share=0.0)
    with pytest.raises(ValueError):
        mc_weight(build_bernoulli_graph(1), 10, fixed={"P": 0.3}, uniform_share=1.5)


def test_mc_agrees_across_seeds():
    g = build_bernoulli_graph(1)
    a = mc_weight(g, 200000, seed=3, fixed={"P": 0.3})
    b = mc_weight(g, 200000, seed=4, fixed={"P": 0.3})
    assert abs(a.value - b.value) < 3 * np.hypot(a.stderr, b.stderr)


def test_importance_proposal_agrees_with_uniform():
    g = build_bernoulli_graph(1)
    plain = mc_weight(g, 200000, seed=6, fixed={"P": 0.7}, uniform_share=1.0)
    mixed = mc_weight(g, 200000, seed=6, fixed={"P": 0.7})
    assert abs(plain.value - mixed.value) < 4 * np.hypot(plain.stderr, mixed.stderr)
    assert abs(mixed.value - 0.2) < 4 * mixed.stderr


@pytest.mark.slow
@pytest.mark.parametrize("x", [0.25, 0.5, 0.75])
def test_gamma1_calibration(x):
    est = mc_weight(build_bernoulli_graph(1), 10**6, seed=0, fixed={"P": x})
    assert est.stderr < 5e-3
    assert abs(est.value - (x - 0.5)) < 4 * est.stderr


@pytest.mark.slow
@pytest.mark.parametrize("alpha,beta", [(0.2, 0.6), (0.6, 0.2)])
def test_b_subgraph_fiber_matches_closed_form(alpha, beta):
    est = mc_weight(build_b_subgraph(), 10**6, seed=0, fixed={"U": alpha, "V": beta}, fiber=True)
    assert est.stderr < 5e-3
    assert abs(est.value - f_closed_form(alpha, beta)) < 4 * est.stderr


@pytest.mark.slow
def test_gamma2_at_midpoint():
    est = mc_weight(build_bernoulli_graph(2), 10**6, seed=0, fixed={"P": 0.5})
    assert est.stderr < 5e-3
    assert abs(est.value + 1 / 24) < 4 * est.stderr


@pytest.mark.slow
def test_gamma2_averages_to_zero_and_integrates_gamma1():
    g = build_bernoulli_graph(2)
    nodes, weights = np.polynomial.legendre.leggauss(2)
    ests = [mc_weight(g, 10**6, seed=1, fixed={"P": (1 + t) / 2}) for t in nodes]
    mean = sum(w / 2 * e.value for w, e in zip(weights, ests))
    err = np.sqrt(sum((w / 2 * e.stderr) ** 2 for w, e in zip(weights, ests)))
    assert abs(mean) < 4 * err
    lo, hi = (mc_weight(g, 10**6, seed=2, fixed={"P": x}) for x in (0.15, 0.35))
    slope = (hi.value - lo.value) / 0.2
    assert abs(slope - (0.25 - 0.5)) < 4 * np.hypot(hi.stderr, lo.stderr) / 0.2


@pytest.mark.slow
def test_two_wheel_weight_vanishes():
    est = mc_weight(build_wheel_graph(2), 10**6, seed=0)
    assert abs(est.value) < 4 * est.stderr
