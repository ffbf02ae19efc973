"""Critical exponent, Poincare series and conformal densities on cylinders.

The conformal density of dimension delta is realized through Perron data of
the weighted non-backtracking matrix ``M(s)[e, f] = exp(-s * len(f))`` for
admissible ``e -> f``. With ``h`` the right Perron vector at ``s = delta`` the
mass seen from the tail of a lifted edge ``e`` of the ends beyond it is
``phi(e) = exp(-delta * len(e)) * h(e)``; every other cylinder mass follows
from the Radon-Nikodym rule ``d mu_q / d mu_p = exp(-delta * b(q, p))``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BallTooLarge, DepthTooShallow, SubcriticalS
from .graph_core import (
    Cone,
    EndCylinder,
    MetricGraph,
    TreePoint,
    Word,
    cone_of,
    cylinders_at_depth,
    enumerate_words,
    shadow,
    tree_distance,
)
from .graph_core.ends import _lcp

BALL_STATE_CAP = 5_000_000


# --------------------------------------------------------------- spectral side
def nonbacktracking_matrix(g: MetricGraph) -> np.ndarray:
    n = g.n_directed
    A = np.zeros((n, n))
    for e in range(n):
        for f in g.successors[e]:
            A[e, f] = 1.0
    return A


def transfer_matrix(g: MetricGraph, s: float) -> np.ndarray:
    lengths = np.array([float(g.length(d)) for d in range(g.n_directed)])
    return nonbacktracking_matrix(g) * np.exp(-s * lengths)[None, :]


def spectral_radius(g: MetricGraph, s: float) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(transfer_matrix(g, s)))))


def perron_vector(M: np.ndarray, tol: float = 1e-14, max_iter: int = 200_000) -> np.ndarray:
    """Right Perron vector by power iteration on (M + I)/2 from the all-ones vector.

    The lazy matrix has the same Perron vector and is aperiodic even when the
    non-backtracking shift is periodic (bipartite graphs). Normalized to sum 1.
    """
    B = 0.5 * (M + np.eye(len(M)))
    v = np.ones(len(M)) / len(M)
    for _ in range(max_iter):
        w = B @ v
        w /= w.sum()
        if np.max(np.abs(w - v)) <= tol * np.max(np.abs(w)):
            return w
        v = w
    # slow spectral gap: fall back to a dense eigensolver
    vals, vecs = np.linalg.eig(M)
    k = int(np.argmax(vals.real))
    w = np.abs(vecs[:, k].real)
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class GibbsWeights:
    graph: MetricGraph
    delta: float
    matrix: np.ndarray
    right: np.ndarray
    left: np.ndarray
    phi: np.ndarray
    residual: float

    def vertex_mass(self, v: int) -> float:
        """Total mass of the boundary seen from a lift of quotient vertex ``v``."""
        return float(sum(self.phi[d] for d in self.graph.out_edges[v]))


def critical_exponent(g: MetricGraph, tol: float = 1e-12) -> GibbsWeights:
    """delta = the unique s with spectral radius of M(s) equal to 1.

    Bisection on the decreasing map s -> rho(M(s)) over [1e-6, 64/min length],
    then Newton steps using the Perron derivative.
    """
    lo, hi = 1e-6, 64.0 / float(min(g.lengths))
    if not (spectral_radius(g, lo) > 1.0 > spectral_radius(g, hi)):
        raise ValueError("critical exponent bracket does not straddle 1")
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if spectral_radius(g, mid) > 1.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    lengths = np.array([float(g.length(d)) for d in range(g.n_directed)])
    for _ in range(30):
        M = transfer_matrix(g, s)
        rho = spectral_radius(g, s)
        if abs(rho - 1.0) <= tol * 0.1:
            break
        h = perron_vector(M)
        u = perron_vector(M.T)
        drho = -(u @ (M * lengths[None, :]) @ h) / (u @ h)
        step = (rho - 1.0) / drho
        s -= step
        if abs(step) < 1e-16:
            break
    M = transfer_matrix(g, s)
    residual = abs(spectral_radius(g, s) - 1.0)
    h = perron_vector(M)
    u = perron_vector(M.T)
    phi = np.exp(-s * lengths) * h
    scale = sum(phi[d] for d in g.out_edges[0])
    h, phi = h / scale, phi / scale
    u = u / (u @ h)
    return GibbsWeights(g, s, M, h, u, phi, residual)


# ------------------------------------------------------------ Poincare series
def _length_counts(
    g: MetricGraph,
    starts: dict[tuple[int, Fraction], int],
    target: int,
    radius: Fraction,
    cap: int = BALL_STATE_CAP,
) -> dict[Fraction, int]:
    """Count non-backtracking continuations ending at ``target`` by total length.

    ``starts`` maps ``(last edge, length so far)`` to multiplicity. Equivalent
    to breadth-first growth of reduced words, aggregated by state.
    """
    totals: dict[Fraction, int] = defaultdict(int)
    frontier = {k: c for k, c in starts.items() if k[1] <= radius}
    visited = 0
    while frontier:
        visited += len(frontier)
        if visited > cap:
            raise BallTooLarge(f"more than {cap} growth states below radius {radius}")
        nxt: dict[tuple[int, Fraction], int] = defaultdict(int)
        for (d, length), c in frontier.items():
            if g.head(d) == target:
                totals[length] += c
            for f in g.successors[d]:
                l2 = length + g.length(f)
                if l2 <= radius:
                    nxt[(f, l2)] += c
        frontier = nxt
    return totals


def _vertex_of(g: MetricGraph, p: TreePoint) -> int:
    if p.edge is not None:
        raise ValueError("orbit sums are implemented for vertex points only")
    return g.head(p.path[-1]) if p.path else 0


def orbit_distances(g: MetricGraph, p: TreePoint, q: TreePoint, radius) -> dict[Fraction, int]:
    """Multiplicity of each value of d(p, gamma q) <= radius over gamma in the group.

    The orbit of q is the set of lifts of q's quotient vertex, reached from p
    by the non-backtracking paths from p's quotient vertex.
    """
    radius = Fraction(radius)
    vp, vq = _vertex_of(g, p), _vertex_of(g, q)
    counts = _length_counts(g, {(d, g.length(d)): 1 for d in g.out_edges[vp]}, vq, radius)
    if vp == vq:
        counts[Fraction(0)] += 1
    return dict(counts)


def poincare_partial(g: MetricGraph, s: float, p: TreePoint, q: TreePoint, radius) -> float:
    """Sum of exp(-s d(p, gamma q)) over gamma with d(p, gamma q) <= radius."""
    if s < 0 or radius < 0:
        raise ValueError("need s >= 0 and radius >= 0")
    counts = orbit_distances(g, p, q, radius)
    return math.fsum(c * math.exp(-s * float(length)) for length, c in counts.items())


def ball_size(g: MetricGraph, t) -> int:
    """|V_t| = #{gamma : d(o, gamma o) <= t} at the base vertex."""
    o = TreePoint()
    return sum(orbit_distances(g, o, o, t).values())


def growth_rate(g: MetricGraph, t) -> float:
    """(1/t) log |V_t|; converges to delta from above with an O(1/t) bias."""
    return math.log(ball_size(g, t)) / float(t)


def growth_slope(g: MetricGraph, t) -> float:
    """Secant slope of t -> log |V_t| over [t/2, t]; cancels the O(1/t) bias of growth_rate."""
    t = Fraction(t)
    half = t / 2
    return (math.log(ball_size(g, t)) - math.log(ball_size(g, half))) / float(t - half)


# ------------------------------------------------------------ cylinder measures
@dataclass(frozen=True)
class CylinderMeasure:
    basepoint: TreePoint
    masses: dict[EndCylinder, float] = field(hash=False)
    provenance: tuple

    def at_depth(self, depth: int) -> dict[EndCylinder, float]:
        return {c: m for c, m in self.masses.items() if c.depth == depth}


def patterson_measure_approx(
    g: MetricGraph,
    p: TreePoint,
    s: float,
    radius,
    depth: int = 1,
    delta: float | None = None,
) -> CylinderMeasure:
    """Truncated Patterson measure sum exp(-s d(p, gamma p)) delta_{gamma p}, binned by direction.

    Each atom gamma p goes to the cylinders spelled by the first edges of
    [p, gamma p); atoms nearer than a cylinder's depth only feed shallower
    cylinders, and the atom at p itself is dropped. Normalized to a
    probability measure on depth-1 cylinders.
    """
    if delta is None:
        delta = critical_exponent(g).delta
    if s <= delta:
        raise SubcriticalS(f"s = {s} is not above delta = {delta}")
    radius = Fraction(radius)
    vp = _vertex_of(g, p)
    raw: dict[EndCylinder, float] = {}
    for k in range(1, depth + 1):
        for cyl in cylinders_at_depth(g, p.path, k):
            start = {(cyl.path[-1], g.path_length(cyl.path)): 1}
            counts = _length_counts(g, start, vp, radius)
            raw[cyl] = math.fsum(c * math.exp(-s * float(L)) for L, c in counts.items())
    total = math.fsum(m for c, m in raw.items() if c.depth == 1)
    if total == 0:
        raise ValueError("radius too small: the truncated ball has no atoms besides p")
    masses = {c: m / total for c, m in raw.items()}
    return CylinderMeasure(p, masses, ("patterson", s, radius))


def _strictly_beyond_head(cone: Cone, p: TreePoint) -> bool:
    def beyond(v):
        if cone.towards_root:
            return v[: len(cone.tail)] != cone.tail and v != cone.head
        h = cone.head
        return len(v) > len(h) and v[: len(h)] == h

    if p.edge is None:
        return beyond(p.path)
    a, b = p.path, p.path + (p.edge,)
    if {a, b} == {cone.tail, cone.head}:
        return False
    return beyond(a) or beyond(b)


def boundary_mass(w: GibbsWeights, p: TreePoint) -> float:
    """mu_p of the whole boundary."""
    g = w.graph
    if p.edge is None:
        return w.vertex_mass(g.head(p.path[-1]) if p.path else 0)
    t = float(p.offset)
    length = float(g.length(p.edge))
    return math.exp(w.delta * t) * w.phi[p.edge] + math.exp(w.delta * (length - t)) * w.phi[p.edge ^ 1]


def cone_mass(w: GibbsWeights, p: TreePoint, cone: Cone) -> float:
    g = w.graph
    if _strictly_beyond_head(cone, p):
        return boundary_mass(w, p) - cone_mass(w, p, cone.reverse())
    dist = tree_distance(g, p, TreePoint(cone.head))
    return math.exp(-w.delta * float(dist - g.length(cone.edge))) * w.phi[cone.edge]


def gibbs_cylinder_measure(w: GibbsWeights, p: TreePoint, c: EndCylinder) -> float:
    """mu_p(c) for the conformal density realized by the Perron data."""
    if not c.path:
        return boundary_mass(w, p)
    return cone_mass(w, p, cone_of(w.graph, c))


def gibbs_measure_table(w: GibbsWeights, p: TreePoint, depth: int) -> CylinderMeasure:
    masses = {}
    for k in range(1, depth + 1):
        for cyl in cylinders_at_depth(w.graph, p.path, k):
            masses[cyl] = gibbs_cylinder_measure(w, p, cyl)
    return CylinderMeasure(p, masses, ("gibbs",))


def _integer_lengths(g: MetricGraph) -> tuple[np.ndarray, int]:
    scale = math.lcm(*(x.denominator for x in g.lengths))
    ints = np.array([int(g.length(d) * scale) for d in range(g.n_directed)], dtype=np.int64)
    return ints, scale


def _all_paths(g: MetricGraph, v: int, depth: int) -> np.ndarray:
    paths = np.array([[d] for d in g.out_edges[v]], dtype=np.int64)
    succ = [np.array(g.successors[d], dtype=np.int64) for d in range(g.n_directed)]
    counts = np.array([len(s) for s in succ], dtype=np.int64)
    for _ in range(depth - 1):
        last = paths[:, -1]
        nxt = np.concatenate([succ[d] for d in last])
        paths = np.column_stack([np.repeat(paths, counts[last], axis=0), nxt])
    return paths


def conformality_residual(w: GibbsWeights, p: TreePoint, q: TreePoint, depth: int) -> float:
    """max over depth-``depth`` cylinders c at p of |log(mu_q(c)/mu_p(c)) + delta b_xi(q, p)|.

    Busemann values are exact integers after scaling the edge lengths by the
    common denominator; masses are evaluated cylinder by cylinder.
    """
    g = w.graph
    if p.edge is not None or q.edge is not None:
        raise ValueError("conformality is checked between vertices")
    walk = tuple(d ^ 1 for d in reversed(p.path[_lcp(p.path, q.path) :])) + q.path[
        _lcp(p.path, q.path) :
    ]
    if len(walk) > depth:
        raise DepthTooShallow(f"q is {len(walk)} edges from p; need depth >= that")
    if not walk:
        return 0.0
    ints, scale = _integer_lengths(g)
    vp = g.head(p.path[-1]) if p.path else 0
    C = _all_paths(g, vp, depth)
    W = np.array(walk, dtype=np.int64)
    m = len(walk)
    agree = np.cumprod(C[:, :m] == W[None, :], axis=1)
    j = agree.sum(axis=1)
    clen = ints[C]
    csuffix = np.cumsum(clen[:, ::-1], axis=1)[:, ::-1]
    wsuffix = np.concatenate([np.cumsum(ints[W][::-1])[::-1], [0]])
    c_tail = np.where(j < depth, csuffix[np.arange(len(C)), np.minimum(j, depth - 1)], 0)
    dist_q = wsuffix[j] + c_tail
    dist_p = clen.sum(axis=1)
    last = C[:, -1]
    b_exact = dist_q - dist_p  # b_xi(q, p) * scale, constant on each cylinder
    # masses through the cone formula, both seen from outside the cone
    mu_p = np.exp(-w.delta * (dist_p - ints[last]) / scale) * w.phi[last]
    mu_q = np.exp(-w.delta * (dist_q - ints[last]) / scale) * w.phi[last]
    res = np.abs(np.log(mu_q) - np.log(mu_p) + w.delta * b_exact / scale)
    return float(res.max())


@dataclass(frozen=True)
class ShadowReport:
    checked: int
    violations: int
    max_ratio: float
    worst: str
    radius: Fraction

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.max_ratio <= 1.0


def shadow_lemma_check(w: GibbsWeights, p: TreePoint, r, word_radius: int) -> ShadowReport:
    """Check mu_p(O_r(p, gamma p)) <= C_r exp(-delta d(p, gamma p)), C_r = mu_p(boundary) e^{delta r}."""
    g = w.graph
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    total = boundary_mass(w, p)
    worst, worst_ratio, violations, checked = "", -math.inf, 0, 0
    for gamma in enumerate_words(g.rank, word_radius):
        y = TreePoint(gamma.act(g, p.path))
        mass = math.fsum(gibbs_cylinder_measure(w, p, c) for c in shadow(g, p, y, r))
        # one exponential of the exact exponent, so the equality case r = d gives bound == total
        bound = total * math.exp(w.delta * float(r - tree_distance(g, p, y)))
        ratio = mass / bound
        checked += 1
        if ratio > 1.0:
            violations += 1
        if ratio > worst_ratio:
            worst, worst_ratio = str(gamma), ratio
    return ShadowReport(checked, violations, worst_ratio, worst, r)
