"""Bowen-Margulis flow on the quotient graph as a suspension over the edge shift.

A unit-speed geodesic in the quotient is a bi-infinite non-backtracking edge
sequence plus a position along the current edge. The invariant measure is the
Markov measure of the kernel ``P(e -> f) = M(delta)[e, f] h(f) / h(e)`` with the
edge length as roof. Its finite-dimensional marginals agree with the pair
masses ``exp(-delta beta) mu(C-) mu(C+)`` of boundary rectangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .crossratio import ApproximateNonArithmetic, Arithmetic, arithmeticity
from .errors import OverlappingCylinders
from .graph_core import (
    EndCylinder,
    MetricGraph,
    TreePoint,
    Word,
    beta,
    concat,
    cone_of,
)
from .patterson import GibbsWeights, _strictly_beyond_head, critical_exponent, gibbs_cylinder_measure

# observable: vectorized function of (directed edge ids, phases) -> values
Observable = Callable[[np.ndarray, np.ndarray], np.ndarray]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True, eq=False)
class EdgeShift:
    """Non-backtracking directed-edge shift with edge length as roof."""

    graph: MetricGraph
    admissible: np.ndarray
    roof: np.ndarray

    @classmethod
    def of(cls, g: MetricGraph) -> "EdgeShift":
        A = np.zeros((g.n_directed, g.n_directed), dtype=bool)
        for e in range(g.n_directed):
            A[e, list(g.successors[e])] = True
        roof = np.array([float(g.length(d)) for d in range(g.n_directed)])
        return cls(g, A, roof)

    def is_irreducible(self) -> bool:
        n = len(self.admissible)
        reach = np.eye(n, dtype=bool) | self.admissible
        for _ in range(n.bit_length()):
            reach = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        return bool(reach.all())

    def is_primitive(self) -> bool:
        """Some power of the admissibility matrix is positive; fails for bipartite graphs (period 2)."""
        n = len(self.admissible)
        B = self.admissible.astype(np.int64)
        P = np.eye(n, dtype=np.int64)
        # Wielandt bound on the primitivity exponent
        for _ in range((n - 1) ** 2 + 1):
            P = np.minimum(P @ B, 1)
        return bool(P.all())


@dataclass(frozen=True, eq=False)
class BMQuotientMeasure:
    weights: GibbsWeights
    shift: EdgeShift
    pi: np.ndarray
    kernel: np.ndarray

    @classmethod
    def of(cls, g: MetricGraph, weights: GibbsWeights | None = None) -> "BMQuotientMeasure":
        w = critical_exponent(g) if weights is None else weights
        shift = EdgeShift.of(g)
        pi = w.left * w.right
        pi = pi / pi.sum()
        kernel = w.matrix * w.right[None, :] / w.right[:, None]
        kernel = kernel / kernel.sum(axis=1, keepdims=True)
        return cls(w, shift, pi, kernel)

    @property
    def graph(self) -> MetricGraph:
        return self.weights.graph

    @property
    def occupancy(self) -> np.ndarray:
        """Fraction of flow time spent on each directed edge."""
        x = self.pi * self.shift.roof
        return x / x.sum()

    def total_mass(self) -> float:
        """Unnormalized m_Gamma mass: sum over directed edges of len * mu(behind) * mu(ahead)."""
        w = self.weights
        L = self.shift.roof
        back = np.exp(w.delta * L) * w.phi[np.arange(len(L)) ^ 1]
        return float(np.sum(L * back * w.phi))

    def total_mass_from_cylinders(self) -> float:
        """Same total from pair masses of one fundamental rectangle per directed edge."""
        g = self.graph
        total = 0.0
        for e in range(g.n_directed):
            x = g.tree_paths[g.tail(e)]
            y = concat(x, (e,))
            ahead = EndCylinder(x, (e,))
            behind = EndCylinder(y, (e ^ 1,))
            total += float(g.length(e)) * bm_pair_mass(self, behind, ahead, TreePoint(x))
        return total

    def space_average(self, f: Observable) -> float:
        """Integral of f against the normalized flow measure, by Gauss-Legendre per edge."""
        return float(np.sum(self.pi * _edge_integrals(self.shift.roof, f)) / np.sum(self.pi * self.shift.roof))


def _edge_integrals(roof: np.ndarray, f: Observable, start=None, stop=None) -> np.ndarray:
    """Per-edge integral of f over [start, stop] (defaults: the whole edge)."""
    n = len(roof)
    a = np.zeros(n) if start is None else np.asarray(start, dtype=float)
    b = roof if stop is None else np.asarray(stop, dtype=float)
    return _segment_integrals(np.arange(n), a, b, f)


def _segment_integrals(edges: np.ndarray, a: np.ndarray, b: np.ndarray, f: Observable) -> np.ndarray:
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    s = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
    e = np.broadcast_to(edges[:, None], s.shape)
    vals = np.asarray(f(e, s), dtype=float).reshape(s.shape)
    return half * (vals @ _GAUSS_WEIGHTS)


# ------------------------------------------------------------ pair measure
def bm_pair_mass(m: BMQuotientMeasure, c_minus: EndCylinder, c_plus: EndCylinder, p: TreePoint) -> float:
    """mu(C- x C+) = exp(-delta beta_p) mu_p(C-) mu_p(C+) for a rectangle where beta_p is constant."""
    g = m.graph
    if not c_minus.path or not c_plus.path:
        raise OverlappingCylinders("full-boundary factor: beta is not constant")
    a, b = cone_of(g, c_minus), cone_of(g, c_plus)
    if not a.disjoint(b):
        raise OverlappingCylinders("cylinders share ends; refine them first")
    if _strictly_beyond_head(a, p) or _strictly_beyond_head(b, p):
        raise OverlappingCylinders("basepoint lies beyond a cylinder; beta varies over the rectangle")
    bp = beta(g, p, a.representative(g), b.representative(g))
    w = m.weights
    return math.exp(-w.delta * float(bp)) * gibbs_cylinder_measure(w, p, c_minus) * gibbs_cylinder_measure(w, p, c_plus)


def translate_cylinder(g: MetricGraph, gamma: Word, c: EndCylinder) -> EndCylinder:
    """Image of a cylinder under a deck transformation."""
    return EndCylinder(concat(gamma.loop(g), c.base), c.path)


# -------------------------------------------------------------------- flow
@dataclass
class FlowState:
    edge: int
    phase: float
    history: list = field(default_factory=list)


def _cumulative(kernel: np.ndarray) -> np.ndarray:
    cum = np.cumsum(kernel, axis=1)
    cum[:, -1] = 1.0
    return cum


def _next_edge(cum: np.ndarray, edges: np.ndarray, u: np.ndarray) -> np.ndarray:
    return (u[:, None] >= cum[edges]).sum(axis=1)


def flow_step(m: BMQuotientMeasure, s: FlowState, dt: float, rng: np.random.Generator) -> FlowState:
    """Advance by time dt, sampling successors from the stationary kernel."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    cum = _cumulative(m.kernel)
    roof = m.shift.roof
    edge, phase, rem = s.edge, s.phase, float(dt)
    history = list(s.history)
    while rem > 0 and rem >= roof[edge] - phase:
        rem -= roof[edge] - phase
        history.append(edge)
        edge = int(_next_edge(cum, np.array([edge]), np.array([rng.random()]))[0])
        phase = 0.0
    return FlowState(edge, phase + rem, history)


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trajectory ``index``, derived by counter-based splitting."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


class Ensemble:
    """N stationary flow trajectories advanced in lockstep.

    Trajectory i consumes only uniforms from its own stream, so every
    trajectory (and every aggregate) is independent of batching and order.
    """

    def __init__(self, m: BMQuotientMeasure, n: int, t_max: float, seed: int):
        if n < 1:
            raise ValueError("need at least one trajectory")
        self.m = m
        roof = m.shift.roof
        k = 4 + math.ceil(t_max / roof.min())
        self.uniforms = np.stack([trajectory_rng(seed, i).random(k) for i in range(n)])
        self.cum = _cumulative(m.kernel)
        occ = np.cumsum(m.occupancy)
        occ[-1] = 1.0
        self.edge = (self.uniforms[:, 0][:, None] >= occ[None, :]).sum(axis=1)
        # absolute time at which each trajectory entered its current edge
        self.entry = -self.uniforms[:, 1] * roof[self.edge]
        self.cursor = np.full(n, 2)
        self.time = 0.0

    @property
    def phase(self) -> np.ndarray:
        return self.time - self.entry

    def advance_to(self, t: float) -> None:
        """Move every trajectory to time t; the result does not depend on earlier stops."""
        if t < self.time:
            raise ValueError("ensemble cannot run backwards")
        roof = self.m.shift.roof
        while True:
            exit_time = self.entry + roof[self.edge]
            cross = exit_time <= t
            if not cross.any():
                break
            idx = np.nonzero(cross)[0]
            if np.any(self.cursor[idx] >= self.uniforms.shape[1]):
                raise AssertionError("uniform budget exhausted")
            u = self.uniforms[idx, self.cursor[idx]]
            self.entry[idx] = exit_time[idx]
            self.edge[idx] = _next_edge(self.cum, self.edge[idx], u)
            self.cursor[idx] += 1
        self.time = float(t)


@dataclass(frozen=True)
class CorrelationEstimate:
    T: float
    value: float
    stderr: float


def correlation_curve(
    m: BMQuotientMeasure, f: Observable, g: Observable, times, n: int, seed: int
) -> list[CorrelationEstimate]:
    """C(T) = <f (g o flow_T)> - <f><g> over n independent stationary trajectories."""
    times = [float(t) for t in times]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be nondecreasing")
    ens = Ensemble(m, n, max(times, default=0.0), seed)
    f0 = np.asarray(f(ens.edge, ens.phase), dtype=float)
    out = []
    for t in times:
        ens.advance_to(t)
        gt = np.asarray(g(ens.edge, ens.phase), dtype=float)
        prod = (f0 - f0.mean()) * (gt - gt.mean())
        value = float(np.mean(f0 * gt) - f0.mean() * gt.mean())
        err = float(prod.std() / math.sqrt(n))
        out.append(CorrelationEstimate(t, value, err))
    return out


def correlation(m: BMQuotientMeasure, f: Observable, g: Observable, T: float, N: int, seed: int) -> CorrelationEstimate:
    return correlation_curve(m, f, g, [T], N, seed)[0]


def circle_observable(c: float) -> Observable:
    """cos(2 pi phase / c): a flow eigenfunction when every edge length is a multiple of c."""
    return lambda e, s: np.cos(2.0 * math.pi * np.asarray(s) / c)


def edge_indicator(edges) -> Observable:
    chosen = np.array(sorted(edges))
    return lambda e, s: np.isin(e, chosen).astype(float)


# ---------------------------------------------------------------- ergodicity
@dataclass(frozen=True)
class BirkhoffResult:
    time_average: float
    space_average: float
    stderr: float


def birkhoff_average(m: BMQuotientMeasure, f: Observable, T: float, seed: int, batches: int = 50) -> BirkhoffResult:
    """Time average of f along one stationary trajectory of length T, with batch-means error."""
    rng = trajectory_rng(seed, 0)
    roof = m.shift.roof
    cum = _cumulative(m.kernel)
    occ = np.cumsum(m.occupancy)
    occ[-1] = 1.0
    u = rng.random(2)
    edge = int((u[0] >= occ).sum())
    phase = float(u[1] * roof[edge])
    k = 4 + math.ceil(T / roof.min())
    draws = rng.random(k)
    edges, starts, stops = [], [], []
    t, j = 0.0, 0
    while t < T:
        seg = min(roof[edge] - phase, T - t)
        edges.append(edge)
        starts.append(phase)
        stops.append(phase + seg)
        t += seg
        edge = int((draws[j] >= cum[edge]).sum())
        j += 1
        phase = 0.0
    edges_a = np.array(edges)
    a, b = np.array(starts), np.array(stops)
    integrals = _segment_integrals(edges_a, a, b, f)
    durations = b - a
    avg = float(integrals.sum() / durations.sum())
    groups = np.array_split(np.arange(len(edges_a)), batches)
    means = np.array([integrals[gi].sum() / durations[gi].sum() for gi in groups if len(gi)])
    stderr = float(means.std(ddof=1) / math.sqrt(len(means))) if len(means) > 1 else math.inf
    return BirkhoffResult(avg, m.space_average(f), stderr)


def birkhoff_vs_space_average(m: BMQuotientMeasure, f: Observable, T: float, seed: int) -> tuple[float, float]:
    r = birkhoff_average(m, f, T, seed)
    return r.time_average, r.space_average


# ------------------------------------------------------------------- mixing
NOT_MIXING = "NOT_MIXING"
MIXING_LIKELY = "MIXING_LIKELY"


@dataclass(frozen=True)
class MixingBudget:
    samples: int = 10_000
    t_min: float = 50.0
    t_max: float = 100.0
    n_times: int = 11
    seed: int = 0
    c_min: float = 1e-4
    decay_threshold: float = 0.05


@dataclass(frozen=True)
class MixingVerdict:
    label: str
    c: Fraction | float | None
    evidence: dict

    @property
    def c_text(self) -> str:
        if self.c is None:
            return "NA"
        if isinstance(self.c, Fraction):
            return str(self.c)
        return repr(float(self.c))


def mixing_verdict(g: MetricGraph, budget: MixingBudget | None = None) -> MixingVerdict:
    """Arithmetic length spectrum means not mixing; otherwise mixing, checked by correlation decay.

    Exact rational lengths always share a lattice, so exact mode needs no
    simulation. Inexact lengths get the lattice fit and, as evidence, the
    relative decay of the circle-observable correlation over [t_min, t_max].
    """
    budget = MixingBudget() if budget is None else budget
    if not g.inexact:
        fit = arithmeticity(list(g.lengths))
        return MixingVerdict(NOT_MIXING, fit.c, {"mode": "exact"})
    fit = arithmeticity([float(x) for x in g.lengths], exact=False, c_min=budget.c_min)
    period = float(fit.c) if isinstance(fit, Arithmetic) else float(min(g.lengths))
    m = BMQuotientMeasure.of(g)
    obs = circle_observable(period)
    times = [0.0] + list(np.linspace(budget.t_min, budget.t_max, budget.n_times))
    curve = correlation_curve(m, obs, obs, times, budget.samples, budget.seed)
    c0 = abs(curve[0].value)
    decay = max(abs(c.value) for c in curve[1:]) / c0 if c0 > 0 else math.nan
    evidence = {"mode": "inexact", "fit": fit, "decay": decay, "curve": curve}
    if isinstance(fit, ApproximateNonArithmetic):
        evidence["consistent"] = decay <= budget.decay_threshold
        return MixingVerdict(MIXING_LIKELY, None, evidence)
    evidence["consistent"] = decay > budget.decay_threshold
    return MixingVerdict(NOT_MIXING, fit.c, evidence)
