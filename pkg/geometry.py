"""Poincare-disk propagator and Monte Carlo weights.

The normalized hyperbolic angle kappa(u, v) measures, at u, the angle from
the geodesic towards the boundary point 1 to the geodesic towards v, in
units of full turns. Boundary points are given by their normalized angle
beta, i.e. e^{2 pi i beta}.

Weight-form columns are the Cartesian pairs (x, y) of every non-pinned
type I vertex in graph order, then the angle of every type II vertex in
graph order (fixed angles are skipped unless ``fiber`` is set). Rows follow
the graph's edge order. The overall sign is ``config.ORIENTATION``.
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from tqdm import tqdm

import config  # type: ignore
from graphs import KGraph
from specfun import DomainError


log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


class CoincidenceError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Configuration:
    interior: Dict[str, complex]
    boundary: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class WeightEstimate:
    value: float
    stderr: float
    samples: int
    seed: int


# ---------------------------------------------------------------------------
# Scalar propagator


def mobius_to_origin(u: complex, t: complex) -> complex:
    """m_u(t) = (t - u) / (1 - conj(u) t); disk automorphism sending u to 0."""
    return (t - u) / (1 - u.conjugate() * t)


def _frac(x: float) -> float:
    r = x % 1.0
    return 0.0 if r >= 1.0 else r


def _check_pair(u: complex, v, boundary: bool) -> complex:
    u = complex(u)
    if abs(u) >= 1:
        raise DomainError(f"|u| = {abs(u)} is not inside the unit disk")
    if boundary:
        beta = float(v)
        if not 0 <= beta < 1:
            raise DomainError(f"boundary angle {beta} outside [0, 1)")
        point = cmath.exp(2j * math.pi * beta)
    else:
        point = complex(v)
        if abs(point) >= 1:
            raise DomainError(f"|v| = {abs(point)} is not inside the unit disk")
    if abs(point - u) < config.COINCIDENCE_EPS:
        raise CoincidenceError(f"points {u} and {point} coincide")
    return point


def hyperbolic_angle(u: complex, v, boundary: bool = False) -> float:
    """kappa(u, v) in [0, 1); ``v`` is an angle in [0, 1) when ``boundary``."""
    point = _check_pair(u, v, boundary)
    u = complex(u)
    if boundary:
        beta = float(v)
        turn = (cmath.phase(1 - u * point.conjugate()) - cmath.phase(1 - u)) / math.pi
        return _frac(beta + turn)
    raw = cmath.phase(point - u) - cmath.phase(1 - u.conjugate() * point) - 2 * cmath.phase(1 - u)
    return _frac(raw / TWO_PI)


def _partials_interior(u: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, ...]:
    d = v - u
    q = 1 - np.conj(u) * v
    w1 = 1 - u
    ux = (np.imag(-1 / d) - np.imag(-v / q) - 2 * np.imag(-1 / w1)) / TWO_PI
    uy = (np.imag(-1j / d) - np.imag(1j * v / q) - 2 * np.imag(-1j / w1)) / TWO_PI
    vx = (np.imag(1 / d) - np.imag(-np.conj(u) / q)) / TWO_PI
    vy = (np.imag(1j / d) - np.imag(-1j * np.conj(u) / q)) / TWO_PI
    return ux, uy, vx, vy


def _partials_boundary(u: np.ndarray, beta: np.ndarray) -> Tuple[np.ndarray, ...]:
    vb = np.exp(-2j * np.pi * beta)
    q = 1 - u * vb
    w1 = 1 - u
    ux = (np.imag(-vb / q) - np.imag(-1 / w1)) / np.pi
    uy = (np.imag(-1j * vb / q) - np.imag(-1j / w1)) / np.pi
    db = 1 + 2 * np.real(u * vb / q)
    return ux, uy, db


def angle_partials(u: complex, v, boundary: bool = False) -> Tuple[float, ...]:
    """Gradient of kappa(u, v): (d/du_x, d/du_y, d/dv_x, d/dv_y), or
    (d/du_x, d/du_y, d/dbeta) for a boundary target."""
    _check_pair(u, v, boundary)
    uu = np.array([complex(u)])
    if boundary:
        parts = _partials_boundary(uu, np.array([float(v)]))
    else:
        parts = _partials_interior(uu, np.array([complex(v)]))
    return tuple(float(p[0]) for p in parts)


# ---------------------------------------------------------------------------
# Weight form


def weight_columns(g: KGraph, fixed: Iterable[str] = (), fiber: bool = False) -> List[Tuple[str, str]]:
    fixed = set(fixed)
    cols = []
    for v in g.type_i:
        if v != g.pinned:
            cols += [(v, "x"), (v, "y")]
    for t in g.type_ii:
        if fiber or t not in fixed:
            cols.append((t, "angle"))
    return cols


def _check_dimension(g: KGraph, cols: List[Tuple[str, str]]):
    if len(g.edges) != len(cols):
        raise DimensionMismatchError(
            f"{len(g.edges)} edges but {len(cols)} free coordinates"
        )


def _densities(
    g: KGraph,
    cols: List[Tuple[str, str]],
    interior: Mapping[str, np.ndarray],
    boundary: Mapping[str, np.ndarray],
    n: int,
) -> np.ndarray:
    """ORIENTATION * det(Jacobian) for n configurations at once."""
    E = len(g.edges)
    if E == 0:
        # zero-dimensional form; the orientation sign only applies to E > 0
        return np.ones(n)
    index = {c: i for i, c in enumerate(cols)}
    type_ii = set(g.type_ii)
    J = np.zeros((n, E, E))
    for row, (s, t) in enumerate(g.edges):
        u = interior[s]
        if t in type_ii:
            ux, uy, db = _partials_boundary(u, boundary[t])
            targets = [((t, "angle"), db)]
        else:
            ux, uy, vx, vy = _partials_interior(u, interior[t])
            targets = [((t, "x"), vx), ((t, "y"), vy)]
        for key, val in [((s, "x"), ux), ((s, "y"), uy)] + targets:
            col = index.get(key)
            if col is not None:
                J[:, row, col] = val
    return config.ORIENTATION * np.linalg.det(J)


def weight_form_value(g: KGraph, c: Configuration, fixed: Iterable[str] = (), fiber: bool = False) -> float:
    """Scalar weight density at one configuration."""
    cols = weight_columns(g, fixed, fiber)
    _check_dimension(g, cols)
    if c.interior.get(g.pinned, 0) != 0:
        raise ValueError(f"pinned vertex {g.pinned!r} must sit at 0")
    interior = {v: np.array([complex(c.interior.get(v, 0))]) for v in g.type_i}
    interior[g.pinned] = np.zeros(1, dtype=complex)
    boundary = {t: np.array([float(c.boundary[t])]) for t in g.type_ii}
    points = [(v, interior[v][0]) for v in g.type_i] + [
        (t, cmath.exp(2j * math.pi * boundary[t][0])) for t in g.type_ii
    ]
    for v, p in points[: len(g.type_i)]:
        if abs(p) >= 1:
            raise DomainError(f"vertex {v!r} at {p} is not inside the unit disk")
    for (a, p), (b, q) in _pairs(points):
        if abs(p - q) < config.COINCIDENCE_EPS:
            raise CoincidenceError(f"vertices {a!r} and {b!r} coincide")
    return float(_densities(g, cols, interior, boundary, 1)[0])


def _pairs(items):
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            yield items[i], items[j]


# ---------------------------------------------------------------------------
# Sampling
#
# mc_weight draws each free disk point from a mixture: with probability
# MC_UNIFORM_SHARE uniformly on the disk, otherwise radially uniform around
# one of its already placed neighbours (pinned vertex, boundary points,
# earlier disk points). The radial part has density ~ 1/r at the centre,
# which cancels the 1/r growth of the propagator near its endpoints. Each
# sample carries the likelihood ratio against uniform sampling.


def make_rng(seed: int, batch: Optional[int] = None) -> np.random.Generator:
    """Philox stream for (seed, batch); the batch index is the spawn key."""
    key = () if batch is None else (batch,)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def proposal_plan(g: KGraph) -> List[Tuple[str, Tuple[str, ...]]]:
    """(vertex, centres) for every non-pinned type I vertex in draw order.

    A vertex is drawn after its type I targets whenever the edges allow it
    (cycles fall back to graph order); its centres are the neighbours, in
    either edge direction, that are placed by then.
    """
    type_ii = set(g.type_ii)
    placed = {g.pinned}
    pending = [v for v in g.type_i if v != g.pinned]
    plan = []
    while pending:
        ready = [v for v in pending if all(t in placed or t in type_ii for _, t in g.out_edges(v))]
        v = (ready or pending)[0]
        pending.remove(v)
        centres: List[str] = []
        for s, t in g.edges:
            other = t if s == v else s if t == v else None
            if other is None or other == v or other in centres:
                continue
            if other in placed or other in type_ii:
                centres.append(other)
        plan.append((v, tuple(centres)))
        placed.add(v)
    return plan


def _uniform_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    r = np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def _reach(centre: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Distance from ``centre`` to the unit circle along ``direction``."""
    b = np.real(np.conj(centre) * direction)
    return -b + np.sqrt(np.maximum(b * b + 1 - np.abs(centre) ** 2, 0.0))


def _radial_draw(rng: np.random.Generator, centre: np.ndarray, on_boundary: np.ndarray, n: int) -> np.ndarray:
    # boundary centres only see the inward half circle of directions
    t = rng.random(n)
    s = rng.random(n)
    direction = np.where(on_boundary, -centre * np.exp(1j * np.pi * (t - 0.5)), np.exp(2j * np.pi * t))
    return centre + s * _reach(centre, direction) * direction


def _radial_pdf(points: np.ndarray, centre: np.ndarray, on_boundary) -> np.ndarray:
    d = points - centre
    r = np.abs(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        pdf = np.where(on_boundary, 1 / np.pi, 1 / TWO_PI) / (r * _reach(centre, d / r))
    return np.where(r > 0, pdf, np.inf)


def _draw_vertex(rng, centres: np.ndarray, on_boundary: np.ndarray, n: int, share: float):
    uniform = _uniform_disk(rng, n)
    if share >= 1.0 or len(centres) == 0:
        return uniform, np.ones(n)
    k = len(centres)
    pick = rng.integers(k, size=n)
    radial = _radial_draw(rng, centres[pick, np.arange(n)], on_boundary[pick], n)
    points = np.where(rng.random(n) < share, uniform, radial)
    q = sum(_radial_pdf(points, centres[i], on_boundary[i]) for i in range(k)) / k
    return points, 1.0 / (share + (1.0 - share) * np.pi * q)


def _draw(g, rng, n, ordered, fixed, share):
    free = [t for t in g.type_ii if t not in fixed]
    angles = rng.random((n, len(free)))
    if ordered and len(free) > 1:
        angles = np.sort(angles, axis=1)
    boundary = {t: angles[:, i] for i, t in enumerate(free)}
    for t, beta in fixed.items():
        boundary[t] = np.full(n, float(beta))

    spots = {t: np.exp(2j * np.pi * boundary[t]) for t in g.type_ii}
    interior = {g.pinned: np.zeros(n, dtype=complex)}
    ratio = np.ones(n)
    for v, centres in proposal_plan(g):
        anchors = np.array([interior[c] if c in interior else spots[c] for c in centres]).reshape(len(centres), n)
        on_boundary = np.array([c not in interior for c in centres], dtype=bool)
        interior[v], r = _draw_vertex(rng, anchors, on_boundary, n, share)
        ratio *= r
    return {v: interior[v] for v in g.type_i}, boundary, ratio


def _degenerate(g, interior, boundary, n) -> np.ndarray:
    points = [interior[v] for v in g.type_i] + [np.exp(2j * np.pi * boundary[t]) for t in g.type_ii]
    bad = np.zeros(n, dtype=bool)
    for v in g.type_i:
        bad |= np.abs(interior[v]) >= 1
    for p, q in _pairs(points):
        bad |= np.abs(p - q) < config.COINCIDENCE_EPS
    return bad


def _sample(g, rng, n, ordered, fixed, share):
    interior, boundary, ratio = _draw(g, rng, n, ordered, fixed, share)
    bad = _degenerate(g, interior, boundary, n)
    while bad.any():
        idx = np.flatnonzero(bad)
        new_i, new_b, new_r = _draw(g, rng, idx.size, ordered, fixed, share)
        for k in interior:
            interior[k][idx] = new_i[k]
        for k in boundary:
            boundary[k][idx] = new_b[k]
        ratio[idx] = new_r
        bad = _degenerate(g, interior, boundary, n)
    return interior, boundary, ratio


def sample_batch(
    g: KGraph,
    rng: np.random.Generator,
    n: int,
    ordered: bool = False,
    fixed: Optional[Mapping[str, float]] = None,
) -> Tuple[Dict[str, np.ndarray], Dict[str, np.ndarray]]:
    """n configurations: uniform disk points, uniform boundary angles (sorted
    when ``ordered``), coincident rows redrawn from the same stream."""
    interior, boundary, _ = _sample(g, rng, n, ordered, dict(fixed or {}), 1.0)
    return interior, boundary


def sample_configuration(
    g: KGraph, seed: int, ordered: bool = False, fixed: Optional[Mapping[str, float]] = None
) -> Configuration:
    interior, boundary = sample_batch(g, make_rng(seed), 1, ordered, fixed)
    return Configuration(
        interior={v: complex(z[0]) for v, z in interior.items()},
        boundary={t: float(b[0]) for t, b in boundary.items()},
    )


# ---------------------------------------------------------------------------
# Monte Carlo


def domain_volume(g: KGraph, ordered: bool, fixed: Iterable[str] = ()) -> float:
    fixed = set(fixed)
    n_interior = sum(1 for v in g.type_i if v != g.pinned)
    n_free = sum(1 for t in g.type_ii if t not in fixed)
    vol = math.pi**n_interior
    if ordered:
        vol /= math.factorial(n_free)
    return vol


def _batch_sizes(samples: int, batches: int) -> List[int]:
    base, extra = divmod(samples, batches)
    return [base + (1 if b < extra else 0) for b in range(batches)]


def mc_weight(
    g: KGraph,
    samples: int,
    seed: int = config.SEED,
    ordered: bool = False,
    fixed: Optional[Mapping[str, float]] = None,
    fiber: bool = False,
    batches: int = config.MC_BATCHES,
    threads: int = config.THREADS,
    progress: bool = False,
    uniform_share: float = config.MC_UNIFORM_SHARE,
) -> WeightEstimate:
    """(domain volume) x mean of density times likelihood ratio over
    ``samples`` configurations.

    Batch b draws from make_rng(seed, b); the estimate does not depend on
    thread scheduling. stderr is the standard error over batch means.
    ``uniform_share=1.0`` turns the importance proposal off.
    """
    fixed = dict(fixed or {})
    unknown = set(fixed) - set(g.type_ii)
    if unknown:
        raise ValueError(f"fixed angles for non-boundary vertices: {sorted(unknown)}")
    anchors = [cmath.exp(2j * math.pi * float(b)) for b in fixed.values()]
    if any(abs(p - q) < config.COINCIDENCE_EPS for p, q in _pairs(anchors)):
        raise CoincidenceError(f"fixed boundary angles coincide: {fixed}")
    cols = weight_columns(g, fixed, fiber)
    _check_dimension(g, cols)
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    if not 0 < uniform_share <= 1:
        raise ValueError(f"uniform_share must lie in (0, 1], got {uniform_share}")
    batches = max(1, min(batches, samples))
    sizes = _batch_sizes(samples, batches)
    volume = domain_volume(g, ordered, fixed)
    log.info(
        f"mc_weight: {len(g.edges)} edges, samples={samples}, seed={seed}, "
        f"batches={batches}, ordered={ordered}, fixed={fixed}, fiber={fiber}, uniform_share={uniform_share}"
    )

    def run(b: int) -> float:
        rng = make_rng(seed, b)
        parts = []
        for start in range(0, sizes[b], config.MC_CHUNK):
            n = min(config.MC_CHUNK, sizes[b] - start)
            interior, boundary, ratio = _sample(g, rng, n, ordered, fixed, uniform_share)
            parts.append(float(np.sum(_densities(g, cols, interior, boundary, n) * ratio)))
        return math.fsum(parts)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = pool.map(run, range(batches))
        sums = list(tqdm(results, total=batches, desc="mc batches", disable=not progress))

    means = np.array([s / n for s, n in zip(sums, sizes)])
    value = volume * math.fsum(sums) / samples
    stderr = volume * float(np.std(means, ddof=1)) / math.sqrt(batches) if batches > 1 else 0.0
    log.debug(f"mc_weight: value={value!r} stderr={stderr!r}")
    return WeightEstimate(value=value, stderr=stderr, samples=samples, seed=seed)
