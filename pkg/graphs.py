"""Kontsevich graphs: the two-vertex-type model, builders for every graph
the weight computation names, cyclic rotation, the edge-retargeting family,
a known-weight table and the JSON graph format.

Edge order is data: it fixes the row order of the weight form and hence
its sign.
"""

import itertools
import json
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from specfun import Polynomial, bernoulli_poly


log = logging.getLogger(__name__)

LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
GRAPH_FIELDS = ("typeI", "typeII", "edges", "pinned")

Edge = Tuple[str, str]


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class KGraph:
    type_i: Tuple[str, ...]
    type_ii: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    pinned: str

    def __post_init__(self):
        object.__setattr__(self, "type_i", tuple(self.type_i))
        object.__setattr__(self, "type_ii", tuple(self.type_ii))
        object.__setattr__(self, "edges", tuple((str(s), str(t)) for s, t in self.edges))

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.type_i + self.type_ii

    def out_edges(self, v: str) -> List[Edge]:
        return [e for e in self.edges if e[0] == v]

    def in_degree(self, v: str) -> int:
        return sum(1 for _, t in self.edges if t == v)


@dataclass(frozen=True)
class SignedGraph:
    sign: int
    graph: KGraph

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class WeightDescriptor:
    kind: str  # bernoulli | lie_two_edges
    text: str
    value: Optional[Fraction] = None
    polynomial: Optional[Polynomial] = None  # x-dependence of Bernoulli graphs


def validate(g: KGraph) -> List[str]:
    """Every violated structural invariant; empty list means ok."""
    problems = []
    seen = set()
    for label in g.labels:
        if not LABEL_RE.match(label):
            problems.append(f"invalid label {label!r}")
        if label in seen:
            problems.append(f"duplicate label {label!r}")
        seen.add(label)
    if g.pinned not in g.type_i:
        problems.append(f"pinned not type I: {g.pinned!r}")
    type_ii = set(g.type_ii)
    for s, t in g.edges:
        if s not in seen or t not in seen:
            problems.append(f"unknown vertex in edge ({s},{t})")
            continue
        if s in type_ii:
            problems.append(f"edge from type II: ({s},{t})")
        if s == t:
            problems.append(f"self loop at {s!r}")
    return problems


def is_lie_graph(g: KGraph) -> bool:
    """Two type II vertices; every type I vertex has two out-edges and at most
    one in-edge."""
    if len(g.type_ii) != 2:
        return False
    for v in g.type_i:
        if len(g.out_edges(v)) != 2:
            return False
        if g.in_degree(v) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Builders


def build_main_graph() -> KGraph:
    """The 7+2 vertex Lie graph of the main computation.

    Edges are listed by source (z, w, b, a1..a4). The adjacency is a
    reconstruction: the b/w core comes from the b-integration, the a-chain
    is the four-vertex Bernoulli graph with U as its boundary vertex, so
    integrating out a1..a4 leaves a function of U alone.
    """
    edges = [
        ("z", "V"), ("z", "w"),
        ("w", "V"), ("w", "b"),
        ("b", "U"), ("b", "V"),
    ]
    edges += [(s, "U" if t == "P" else t) for s, t in build_bernoulli_graph(4).edges]
    return KGraph(
        type_i=("z", "w", "b", "a1", "a2", "a3", "a4"),
        type_ii=("U", "V"),
        edges=tuple(edges),
        pinned="z",
    )


def build_bernoulli_graph(n: int) -> KGraph:
    """Chain a_1 -> a_2 -> ... -> a_n -> z, every a_i also pointing at P.

    Edge order: a_i lists its chain edge before its P edge, except a_n,
    which lists (a_n, P) first. With config.ORIENTATION this orientation
    gives the weight B_n(x)/n! at P = x for every n.
    """
    if n < 1:
        raise ValueError(f"Bernoulli graph needs n >= 1, got {n}")
    edges = []
    for i in range(1, n):
        edges += [(f"a{i}", f"a{i + 1}"), (f"a{i}", "P")]
    edges += [(f"a{n}", "P"), (f"a{n}", "z")]
    return KGraph(
        type_i=("z",) + tuple(f"a{i}" for i in range(1, n + 1)),
        type_ii=("P",),
        edges=tuple(edges),
        pinned="z",
    )


def build_b_subgraph() -> KGraph:
    return KGraph(
        type_i=("w", "b"),
        type_ii=("U", "V"),
        edges=(("w", "V"), ("w", "b"), ("b", "U"), ("b", "V")),
        pinned="w",
    )


def build_wheel_graph(k: int) -> KGraph:
    """Directed k-cycle c1 -> c2 -> ... -> c1; c1 points at X, the rest at Y.

    For k = 2 the boundary angles integrate out to 1 each and what remains
    is the integral of dkappa(0, c) ^ dkappa(c, 0) over the disk, which is 0.
    """
    if k < 2:
        raise ValueError(f"wheel needs k >= 2, got {k}")
    edges = []
    for i in range(1, k + 1):
        nxt = f"c{i % k + 1}"
        spoke = "X" if i == 1 else "Y"
        edges += [(f"c{i}", nxt), (f"c{i}", spoke)]
    return KGraph(
        type_i=tuple(f"c{i}" for i in range(1, k + 1)),
        type_ii=("X", "Y"),
        edges=tuple(edges),
        pinned="c1",
    )


def build_poisson_graph() -> KGraph:
    """One interior vertex at the origin pointing at both boundary vertices."""
    return KGraph(type_i=("z",), type_ii=("X", "Y"), edges=(("z", "X"), ("z", "Y")), pinned="z")


# ---------------------------------------------------------------------------
# Cyclic invariance


def cyclic_rotate(g: KGraph) -> KGraph:
    """Relabel type II targets along the cycle t_1 -> t_2 -> ... -> t_n -> t_1."""
    n = len(g.type_ii)
    if n < 2:
        return g
    shift = {g.type_ii[i]: g.type_ii[(i + 1) % n] for i in range(n)}
    edges = tuple((s, shift.get(t, t)) for s, t in g.edges)
    return KGraph(g.type_i, g.type_ii, edges, g.pinned)


def gamma_prime_family(g: KGraph, one: Optional[str] = None) -> List[SignedGraph]:
    """All graphs obtained by retargeting any subset of the edges not already
    ending at ``one`` (default: the first type II vertex) to ``one``.

    Sign of each member is (-1)^(number of its edges ending at ``one``).
    Members are not deduplicated.
    """
    one = g.type_ii[0] if one is None else one
    if one not in g.type_ii:
        raise ValueError(f"{one!r} is not a type II vertex")
    movable = [i for i, (_, t) in enumerate(g.edges) if t != one]
    family = []
    for size in range(len(movable) + 1):
        for chosen in itertools.combinations(movable, size):
            picked = set(chosen)
            edges = tuple((s, one) if i in picked else (s, t) for i, (s, t) in enumerate(g.edges))
            n_one = sum(1 for _, t in edges if t == one)
            family.append(SignedGraph((-1) ** n_one, KGraph(g.type_i, g.type_ii, edges, g.pinned)))
    log.debug(f"gamma_prime_family: {len(movable)} movable edges -> {len(family)} members")
    return family


# ---------------------------------------------------------------------------
# Known weights


def to_networkx(g: KGraph) -> nx.MultiDiGraph:
    G = nx.MultiDiGraph()
    for v in g.type_i:
        G.add_node(v, kind="I", pinned=(v == g.pinned))
    for v in g.type_ii:
        G.add_node(v, kind="II", pinned=False)
    G.add_edges_from(g.edges)
    return G


_NODE_MATCH = isomorphism.categorical_node_match(["kind", "pinned"], [None, False])


def _same_shape(g: KGraph, h: KGraph) -> bool:
    if len(g.edges) != len(h.edges) or len(g.type_i) != len(h.type_i) or len(g.type_ii) != len(h.type_ii):
        return False
    return nx.is_isomorphic(to_networkx(g), to_networkx(h), node_match=_NODE_MATCH)


def known_weight(g: KGraph) -> Optional[WeightDescriptor]:
    """Closed-form weight if g matches a Bernoulli chain or a Lie graph with
    exactly two edges into the boundary; otherwise None."""
    if len(g.type_ii) == 1 and len(g.type_i) >= 2:
        n = len(g.type_i) - 1
        if _same_shape(g, build_bernoulli_graph(n)):
            fact = math.factorial(n)
            return WeightDescriptor(
                kind="bernoulli",
                text=f"B_{n}(x)/{fact}",
                polynomial=bernoulli_poly(n).scale(Fraction(1, fact)),
            )
    if is_lie_graph(g) and sum(1 for _, t in g.edges if t in g.type_ii) == 2:
        return WeightDescriptor(kind="lie_two_edges", text="B_p*B_q/2")
    return None


# ---------------------------------------------------------------------------
# JSON format


def render(g: KGraph) -> str:
    doc = {
        "typeI": list(g.type_i),
        "typeII": list(g.type_ii),
        "edges": [list(e) for e in g.edges],
        "pinned": g.pinned,
    }
    return json.dumps(doc, ensure_ascii=False)


def _labels(doc: Dict, field: str) -> Sequence[str]:
    value = doc[field]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise GraphFormatError(f"{field!r} must be an array of strings")
    for v in value:
        if not LABEL_RE.match(v):
            raise GraphFormatError(f"invalid label {v!r}")
    return value


def parse(text: str) -> KGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise GraphFormatError("graph must be a JSON object")
    unknown = sorted(set(doc) - set(GRAPH_FIELDS))
    if unknown:
        raise GraphFormatError(f"unknown fields: {', '.join(unknown)}")
    missing = [f for f in GRAPH_FIELDS if f not in doc]
    if missing:
        raise GraphFormatError(f"missing fields: {', '.join(missing)}")
    type_i = _labels(doc, "typeI")
    type_ii = _labels(doc, "typeII")
    edges = doc["edges"]
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(v, str) for v in e) for e in edges
    ):
        raise GraphFormatError("'edges' must be an array of 2-element string arrays")
    pinned = doc["pinned"]
    if not isinstance(pinned, str) or not LABEL_RE.match(pinned):
        raise GraphFormatError(f"invalid pinned label {pinned!r}")
    return KGraph(tuple(type_i), tuple(type_ii), tuple((s, t) for s, t in edges), pinned)


def load(path: str) -> KGraph:
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read())
