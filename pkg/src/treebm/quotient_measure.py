"""Quotient measures through fundamental domains, on finite discrete actions.

Everything is exact: weights are ``Fraction``s and every check is an equality.
Group elements and points are referred to by index; element 0 is the identity.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidFundDomain, NonInvariantH, NotCommuting, NotMeasurePreserving

Perm = tuple[int, ...]


@dataclass(frozen=True)
class DiscreteMeasureAction:
    """A finite (or finitely truncated) group acting on finitely many weighted points.

    ``mul[g][h]`` is the index of ``g h`` or None when the product falls outside
    the truncation; ``act[g][z]`` is the image of point ``z`` under ``g``.
    """

    points: tuple
    elements: tuple
    mul: tuple[tuple[int | None, ...], ...]
    act: tuple[tuple[int, ...], ...]
    nu: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        n = len(self.points)
        if len(self.nu) != n or any(w < 0 for w in self.nu):
            raise ValueError("nu must be a nonnegative weight per point")
        if any(sorted(row) != list(range(n)) for row in self.act):
            raise ValueError("every element must act by a permutation of the points")
        if self.act[0] != tuple(range(n)):
            raise ValueError("element 0 must act as the identity")
        for g, h in itertools.product(range(len(self.elements)), repeat=2):
            gh = self.mul[g][h]
            if gh is None:
                continue
            if any(self.act[gh][z] != self.act[g][self.act[h][z]] for z in range(n)):
                raise ValueError(f"action is not a homomorphism at ({self.elements[g]}, {self.elements[h]})")
        for row in self.act:
            if any(self.nu[row[z]] != self.nu[z] for z in range(n)):
                raise ValueError("nu is not invariant")

    @property
    def n_points(self) -> int:
        return len(self.points)

    def orbit(self, z: int) -> frozenset[int]:
        return frozenset(row[z] for row in self.act)

    @property
    def orbits(self) -> list[frozenset[int]]:
        seen: set[int] = set()
        out = []
        for z in range(self.n_points):
            if z not in seen:
                o = self.orbit(z)
                seen |= o
                out.append(o)
        return out

    def saturate(self, A: Iterable[int]) -> frozenset[int]:
        """GA."""
        return frozenset(row[z] for z in A for row in self.act)

    def measure(self, A: Iterable[int]) -> Fraction:
        return sum((self.nu[z] for z in set(A)), Fraction(0))

    def invariant_subsets(self) -> list[frozenset[int]]:
        """All G-invariant subsets: unions of orbits."""
        orbits = self.orbits
        out = []
        for mask in range(1 << len(orbits)):
            out.append(frozenset().union(*(o for i, o in enumerate(orbits) if mask >> i & 1)))
        return out

    def corrupted(self) -> "DiscreteMeasureAction":
        """Copy with one weight bumped, skipping the invariance check (test hook)."""
        nu = list(self.nu)
        nu[0] += 1
        obj = object.__new__(DiscreteMeasureAction)
        for k, v in zip(
            ("points", "elements", "mul", "act", "nu", "name"),
            (self.points, self.elements, self.mul, self.act, tuple(nu), self.name + "-corrupt"),
        ):
            object.__setattr__(obj, k, v)
        return obj


@dataclass(frozen=True)
class FundDomain:
    points: frozenset[int]

    def validate(self, a: DiscreteMeasureAction) -> None:
        if not self.points <= set(range(a.n_points)):
            raise InvalidFundDomain("domain contains unknown points")
        outside = set(range(a.n_points)) - a.saturate(self.points)
        if a.measure(outside) != 0:
            raise InvalidFundDomain("orbits of positive measure miss the domain")


def multiplicity(a: DiscreteMeasureAction, A: Iterable[int], z: int) -> int:
    """f_A(z): the number of group elements moving z into A."""
    A = set(A)
    return sum(1 for row in a.act if row[z] in A)


def returning_elements(a: DiscreteMeasureAction, F: FundDomain, z: int) -> frozenset[int]:
    return frozenset(g for g, row in enumerate(a.act) if row[z] in F.points)


def partition_ZBF(a: DiscreteMeasureAction, F: FundDomain) -> dict[frozenset[int], frozenset[int]]:
    """Blocks Z_B of F: points z of F whose set of elements g with gz in F is exactly B."""
    F.validate(a)
    blocks: dict[frozenset[int], set[int]] = {}
    for z in sorted(F.points):
        blocks.setdefault(returning_elements(a, F, z), set()).add(z)
    return {B: frozenset(zs) for B, zs in blocks.items()}


def nu_F(a: DiscreteMeasureAction, F: FundDomain) -> dict[int, Fraction]:
    """The domain measure: nu restricted to each block Z_B, divided by |B|."""
    out = {}
    for B, zs in partition_ZBF(a, F).items():
        for z in zs:
            out[z] = a.nu[z] / len(B)
    return out


def pushforward_sum(a: DiscreteMeasureAction, weights: dict[int, Fraction]) -> tuple[Fraction, ...]:
    """sum over g of g_* weights, as a weight per point."""
    out = [Fraction(0)] * a.n_points
    for row in a.act:
        for z, w in weights.items():
            out[row[z]] += w
    return tuple(out)


def reconstruction_holds(a: DiscreteMeasureAction, F: FundDomain) -> bool:
    return pushforward_sum(a, nu_F(a, F)) == a.nu


def _mass(weights: dict[int, Fraction], A: Iterable[int]) -> Fraction:
    return sum((weights.get(z, Fraction(0)) for z in set(A)), Fraction(0))


def verify_transfer(
    a: DiscreteMeasureAction, F: FundDomain, A: Iterable[int], h: Sequence[Fraction]
) -> tuple[Fraction, Fraction]:
    """(integral of h over A against nu, integral of h * f_A against the domain measure)."""
    A = set(A)
    for row in a.act:
        if any(h[row[z]] != h[z] for z in range(a.n_points)):
            raise NonInvariantH("h is not constant on orbits")
    lhs = sum((h[z] * a.nu[z] for z in A), Fraction(0))
    rhs = sum((h[z] * multiplicity(a, A, z) * w for z, w in nu_F(a, F).items()), Fraction(0))
    return lhs, rhs


@dataclass
class CommutingReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_commuting(a: DiscreteMeasureAction, F: FundDomain, phi: Sequence[int]) -> CommutingReport:
    """Check phi_*(nu_F)(A) = nu_F(A) on every G-invariant A for a commuting, nu-preserving phi."""
    n = a.n_points
    for row in a.act:
        if any(phi[row[z]] != row[phi[z]] for z in range(n)):
            raise NotCommuting("phi does not commute with the action")
    image = [Fraction(0)] * n
    for z in range(n):
        image[phi[z]] += a.nu[z]
    if tuple(image) != a.nu:
        raise NotMeasurePreserving("phi does not preserve nu")
    weights = nu_F(a, F)
    report = CommutingReport()
    for A in a.invariant_subsets():
        pre = [z for z in range(n) if phi[z] in A]
        report.checked += 1
        if _mass(weights, pre) != _mass(weights, A):
            report.failures.append(sorted(A))
    return report


def independence_failures(a: DiscreteMeasureAction, E: FundDomain, F: FundDomain) -> list[list[int]]:
    """G-invariant sets on which the two domain measures disagree."""
    wE, wF = nu_F(a, E), nu_F(a, F)
    return [sorted(A) for A in a.invariant_subsets() if _mass(wE, A) != _mass(wF, A)]


def null_set_failures(a: DiscreteMeasureAction, F: FundDomain, max_points: int = 12) -> list[list[int]]:
    """Subsets A violating: nu_F(GA & F) = 0 iff nu(A) = 0 iff nu(GA) = 0."""
    if a.n_points > max_points:
        raise ValueError("too many points for exhaustive subset enumeration")
    wF = nu_F(a, F)
    bad = []
    for mask in range(1 << a.n_points):
        A = [z for z in range(a.n_points) if mask >> z & 1]
        GA = a.saturate(A)
        flags = {_mass(wF, GA & F.points) == 0, a.measure(A) == 0, a.measure(GA) == 0}
        if len(flags) > 1:
            bad.append(A)
    return bad


# ----------------------------------------------------------------- fixtures
def _compose(p: Perm, q: Perm) -> Perm:
    """p after q."""
    return tuple(p[i] for i in q)


def _closure(gens: Iterable[Perm], degree: int) -> list[Perm]:
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident}
    frontier = [ident]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = _compose(s, x)
                if y not in seen:
                    seen.add(y)
                    elems.append(y)
                    nxt.append(y)
        frontier = nxt
    return elems


def action_on_cosets(
    group: list[Perm], subgroups: list[list[Perm]], weights: list[Fraction], name: str = ""
) -> DiscreteMeasureAction:
    """Disjoint union of coset spaces G/H_i, with weight weights[i] on every point of G/H_i."""
    index = {x: i for i, x in enumerate(group)}
    mul = tuple(tuple(index[_compose(x, y)] for y in group) for x in group)
    points, nu, cosets = [], [], []
    for k, (H, w) in enumerate(zip(subgroups, weights)):
        seen = set()
        for x in group:
            coset = frozenset(_compose(x, h) for h in H)
            if coset not in seen:
                seen.add(coset)
                cosets.append((k, coset))
                points.append((k, len(seen) - 1))
                nu.append(Fraction(w))
    where = {c: i for i, c in enumerate(cosets)}
    act = []
    for g in group:
        row = []
        for k, coset in cosets:
            row.append(where[(k, frozenset(_compose(g, y) for y in coset))])
        act.append(tuple(row))
    return DiscreteMeasureAction(tuple(points), tuple(range(len(group))), mul, tuple(act), tuple(nu), name)


def z2_negation() -> DiscreteMeasureAction:
    """Z/2 acting on {-1, 0, 1} by negation, counting measure."""
    points = (-1, 0, 1)
    act = ((0, 1, 2), (2, 1, 0))
    mul = ((0, 1), (1, 0))
    return DiscreteMeasureAction(points, ("e", "g"), mul, act, (Fraction(1),) * 3, "Z/2 negation")


def free_z3() -> DiscreteMeasureAction:
    """Z/3 rotating three points, counting measure."""
    act = tuple(tuple((z + k) % 3 for z in range(3)) for k in range(3))
    mul = tuple(tuple((j + k) % 3 for k in range(3)) for j in range(3))
    return DiscreteMeasureAction((0, 1, 2), (0, 1, 2), mul, act, (Fraction(1),) * 3, "free Z/3")


def _small_groups() -> list[tuple[str, list[Perm]]]:
    cyc = lambda n: tuple((i + 1) % n for i in range(n))
    return [
        ("Z/2", _closure([cyc(2)], 2)),
        ("Z/3", _closure([cyc(3)], 3)),
        ("Z/4", _closure([cyc(4)], 4)),
        ("Z/2xZ/2", _closure([(1, 0, 2, 3), (0, 1, 3, 2)], 4)),
        ("S3", _closure([(1, 0, 2), (1, 2, 0)], 3)),
        ("D4", _closure([(1, 2, 3, 0), (3, 2, 1, 0)], 4)),
        ("Z/6", _closure([cyc(6)], 6)),
    ]


def random_action(rng: random.Random, max_points: int = 12) -> DiscreteMeasureAction:
    """Random union of coset spaces of a small group, with random orbit weights (zero allowed)."""
    name, group = rng.choice(_small_groups())
    subgroups, weights, total = [], [], 0
    for _ in range(rng.randint(1, 4)):
        gens = rng.sample(group, rng.randint(0, 2))
        H = _closure(gens, len(group[0]))
        size = len(group) // len(H)
        if total + size > max_points:
            continue
        total += size
        subgroups.append(H)
        weights.append(Fraction(rng.randint(0, 6), rng.randint(1, 4)))
    if not subgroups:
        subgroups, weights = [group], [Fraction(1)]
    return action_on_cosets(group, subgroups, weights, f"{name} on {total or 1} points")


def random_fund_domain(a: DiscreteMeasureAction, rng: random.Random) -> FundDomain:
    """Random nonempty subset of each orbit of positive mass; null orbits may be skipped."""
    chosen: set[int] = set()
    for o in a.orbits:
        members = sorted(o)
        if a.measure(o) == 0 and rng.random() < 0.5:
            continue
        chosen |= set(rng.sample(members, rng.randint(1, len(members))))
    return FundDomain(frozenset(chosen))


def builtin_fixtures(seed: int = 0, n_random: int = 50) -> list[DiscreteMeasureAction]:
    rng = random.Random(seed)
    return [z2_negation(), free_z3()] + [random_action(rng) for _ in range(n_random)]


# ------------------------------------------------------------------- suites
@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    counterexample: str | None = None

    def record(self, ok: bool, detail) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.counterexample is None:
                self.counterexample = str(detail)


def _commuting_maps(a: DiscreteMeasureAction) -> list[Perm]:
    """Identity plus the actions of central elements, all of which commute and preserve nu."""
    maps = [tuple(range(a.n_points))]
    for g, row in enumerate(a.act):
        if all(a.mul[g][h] == a.mul[h][g] for h in range(len(a.elements))):
            maps.append(row)
    return maps


def run_quotient_suites(fixtures: list[DiscreteMeasureAction], seed: int = 0) -> list[SuiteResult]:
    rng = random.Random(seed)
    names = ("reconstruction", "transfer", "independence", "commuting", "null-sets")
    res = {k: SuiteResult(k) for k in names}
    for a in fixtures:
        try:
            domains = [FundDomain(frozenset(range(a.n_points)))] + [random_fund_domain(a, rng) for _ in range(3)]
            for F in domains:
                res["reconstruction"].record(reconstruction_holds(a, F), (a.name, sorted(F.points)))
            F = domains[1]
            for _ in range(2):
                A = [z for z in range(a.n_points) if rng.random() < 0.5]
                per_orbit = {o: Fraction(rng.randint(0, 5), rng.randint(1, 3)) for o in a.orbits}
                h = [next(v for o, v in per_orbit.items() if z in o) for z in range(a.n_points)]
                lhs, rhs = verify_transfer(a, F, A, h)
                res["transfer"].record(lhs == rhs, (a.name, A, lhs, rhs))
            for E in domains[2:]:
                bad = independence_failures(a, E, F)
                res["independence"].record(not bad, (a.name, bad[:1]))
            for phi in _commuting_maps(a):
                rep = verify_commuting(a, F, phi)
                res["commuting"].record(rep.passed, (a.name, phi, rep.failures[:1]))
            bad = null_set_failures(a, F)
            res["null-sets"].record(not bad, (a.name, bad[:1]))
        except (ValueError, InvalidFundDomain) as exc:
            res["reconstruction"].record(False, (a.name, repr(exc)))
    return [res[k] for k in names]
