import json
import math
from fractions import Fraction

import pytest

from graphs import (
    GraphFormatError,
    KGraph,
    build_b_subgraph,
    build_bernoulli_graph,
    build_main_graph,
    build_poisson_graph,
    build_wheel_graph,
    cyclic_rotate,
    gamma_prime_family,
    is_lie_graph,
    known_weight,
    parse,
    render,
    to_networkx,
    validate,
)
from specfun import bernoulli_poly


def test_main_graph_shape():
    g = build_main_graph()
    assert len(g.type_i) == 7
    assert g.type_ii == ("U", "V")
    assert len(g.edges) == 14
    assert validate(g) == []
    assert all(len(g.out_edges(v)) == 2 for v in g.type_i)
    assert g.in_degree("z") == 1
    assert is_lie_graph(g)


def test_bernoulli_graph_is_not_lie():
    g = build_bernoulli_graph(2)
    assert validate(g) == []
    assert g.edges == (("a1", "a2"), ("a1", "P"), ("a2", "P"), ("a2", "z"))
    assert not is_lie_graph(g)


def test_builders_validate():
    for g in (build_b_subgraph(), build_wheel_graph(3), build_poisson_graph(), build_bernoulli_graph(4)):
        assert validate(g) == []
    with pytest.raises(ValueError):
        build_bernoulli_graph(0)
    with pytest.raises(ValueError):
        build_wheel_graph(1)


def test_validate_reports_every_problem():
    g = KGraph(("z", "1bad"), ("P",), (("P", "z"), ("z", "z"), ("z", "Q")), "P")
    problems = validate(g)
    assert "invalid label '1bad'" in problems
    assert "pinned not type I: 'P'" in problems
    assert "edge from type II: (P,z)" in problems
    assert "self loop at 'z'" in problems
    assert "unknown vertex in edge (z,Q)" in problems


def test_in_degree_rule_covers_pinned_vertex():
    g = KGraph(("z", "a", "b"), ("X", "Y"), (("a", "z"), ("a", "X"), ("b", "a"), ("b", "Y"), ("z", "X"), ("z", "Y")), "z")
    assert is_lie_graph(g)
    crowded = KGraph(g.type_i, g.type_ii, (("a", "z"), ("a", "X"), ("b", "z"), ("b", "Y"), ("z", "X"), ("z", "Y")), "z")
    assert not is_lie_graph(crowded)
    assert not is_lie_graph(KGraph(g.type_i, g.type_ii, g.edges[:-1], "z"))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_known_weight_bernoulli(n):
    desc = known_weight(build_bernoulli_graph(n))
    assert desc.kind == "bernoulli"
    assert desc.polynomial == bernoulli_poly(n).scale(Fraction(1, math.factorial(n)))


def test_known_weight_two_wheel_up_to_relabelling():
    desc = known_weight(build_wheel_graph(2))
    assert desc.kind == "lie_two_edges"
    assert desc.value is None
    relabelled = KGraph(("p", "q"), ("L", "R"), (("q", "p"), ("q", "R"), ("p", "q"), ("p", "L")), "p")
    assert known_weight(relabelled) == desc
    assert known_weight(build_wheel_graph(3)) is None


def test_known_weight_two_boundary_edges_and_unknown():
    assert known_weight(build_poisson_graph()).kind == "lie_two_edges"
    assert known_weight(build_main_graph()) is None


def test_cyclic_rotate():
    g = build_main_graph()
    r = cyclic_rotate(g)
    assert ("z", "U") in r.edges and ("z", "V") not in r.edges
    assert cyclic_rotate(r) == g
    single = build_bernoulli_graph(2)
    assert cyclic_rotate(single) is single


def test_gamma_prime_family_signs():
    fam = gamma_prime_family(build_poisson_graph())
    assert [m.sign for m in fam] == [-1, 1]
    assert fam[1].graph.edges == (("z", "X"), ("z", "X"))
    main = gamma_prime_family(build_main_graph())
    assert len(main) == 2**9
    with pytest.raises(ValueError):
        gamma_prime_family(build_main_graph(), one="z")


def test_to_networkx_attributes():
    G = to_networkx(build_b_subgraph())
    assert G.nodes["w"] == {"kind": "I", "pinned": True}
    assert G.nodes["U"]["kind"] == "II"
    assert G.number_of_edges() == 4


def test_render_parse():
    g = build_main_graph()
    doc = json.loads(render(g))
    assert sorted(doc) == ["edges", "pinned", "typeI", "typeII"]
    assert parse(render(g)) == g


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"typeI": ["z"], "typeII": [], "edges": [], "pinned": "z", "extra": 1}',
        '{"typeI": ["z"], "typeII": [], "edges": []}',
        '{"typeI": ["z z"], "typeII": [], "edges": [], "pinned": "z"}',
        '{"typeI": ["z"], "typeII": [], "edges": [["z"]], "pinned": "z"}',
    ],
)
def test_parse_rejects(text):
    with pytest.raises(GraphFormatError):
        parse(text)


def test_main_graph_a_chain_is_the_four_vertex_bernoulli_graph():
    g = build_main_graph()
    chain = [(s, "P" if t == "U" else t) for s, t in g.edges if s.startswith("a")]
    assert tuple(chain) == build_bernoulli_graph(4).edges
