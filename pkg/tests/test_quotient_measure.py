from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from treebm.errors import InvalidFundDomain, NonInvariantH, NotCommuting, NotMeasurePreserving
from treebm.quotient_measure import (
    DiscreteMeasureAction,
    FundDomain,
    builtin_fixtures,
    free_z3,
    independence_failures,
    multiplicity,
    null_set_failures,
    nu_F,
    partition_ZBF,
    pushforward_sum,
    random_action,
    random_fund_domain,
    reconstruction_holds,
    run_quotient_suites,
    verify_commuting,
    verify_transfer,
    z2_negation,
)

MINUS, ZERO, PLUS = 0, 1, 2  # indices of -1, 0, 1 in the Z/2 example
E, G = 0, 1


def dom(*zs) -> FundDomain:
    return FundDomain(frozenset(zs))


seeds = st.integers(0, 2**32 - 1)


def random_case(seed):
    rng = random.Random(seed)
    a = random_action(rng)
    return rng, a, random_fund_domain(a, rng)


# ------------------------------------------------------------------ oracles
def direct_domain_measure(a, F) -> dict[int, Fraction]:
    """nu_F(z) = nu(z) / #{g : gz in F}, straight from the definition."""
    return {z: a.nu[z] / sum(1 for row in a.act if row[z] in F.points) for z in F.points}


def direct_reconstruction(a, F) -> list[Fraction]:
    w = direct_domain_measure(a, F)
    return [sum((w[y] for y in F.points for row in a.act if row[y] == z), Fraction(0)) for z in range(a.n_points)]


# ---------------------------------------------------------------- examples
def test_multiplicity_examples():
    a = z2_negation()
    assert all(multiplicity(a, [], z) == 0 for z in range(3))
    assert multiplicity(a, [ZERO, PLUS], ZERO) == 2
    assert multiplicity(a, [ZERO, PLUS], PLUS) == 1


def test_partition_examples():
    assert partition_ZBF(free_z3(), dom(0)) == {frozenset({E}): frozenset({0})}
    a = z2_negation()
    assert partition_ZBF(a, dom(ZERO, PLUS)) == {frozenset({E, G}): frozenset({ZERO}), frozenset({E}): frozenset({PLUS})}
    assert partition_ZBF(a, dom(MINUS, ZERO, PLUS)) == {frozenset({E, G}): frozenset({MINUS, ZERO, PLUS})}


def test_domain_measure_examples():
    a = z2_negation()
    F = dom(ZERO, PLUS)
    assert nu_F(a, F) == {ZERO: Fraction(1, 2), PLUS: Fraction(1)}
    assert pushforward_sum(a, nu_F(a, F)) == a.nu
    z3 = free_z3()
    assert nu_F(z3, dom(1)) == {1: Fraction(1)}
    other = dom(MINUS, ZERO)
    assert sum(nu_F(a, F).values()) == sum(nu_F(a, other).values()) == Fraction(3, 2)


def test_transfer_examples():
    a = z2_negation()
    F = dom(ZERO, PLUS)
    one = [Fraction(1)] * 3
    assert verify_transfer(a, F, [MINUS, ZERO, PLUS], one) == (3, 3)
    assert verify_transfer(a, F, [PLUS], one) == (1, 1)
    with pytest.raises(NonInvariantH):
        verify_transfer(a, F, [PLUS], [Fraction(1), Fraction(2), Fraction(3)])


def test_commuting_examples():
    a = z2_negation()
    F = dom(ZERO, PLUS)
    assert verify_commuting(a, F, (0, 1, 2)).passed
    rep = verify_commuting(a, F, (2, 1, 0))
    assert rep.passed and rep.checked == 4
    assert verify_commuting(free_z3(), dom(0), (1, 2, 0)).passed


def test_commuting_errors():
    a = z2_negation()
    F = dom(ZERO, PLUS)
    with pytest.raises(NotCommuting):
        verify_commuting(a, F, (1, 0, 2))
    weighted = DiscreteMeasureAction(
        (0, 1, 2), (0,), ((0,),), ((0, 1, 2),), (Fraction(1), Fraction(2), Fraction(2)), "trivial"
    )
    with pytest.raises(NotMeasurePreserving):
        verify_commuting(weighted, dom(0, 1, 2), (1, 0, 2))


def test_invalid_domains():
    a = z2_negation()
    with pytest.raises(InvalidFundDomain):
        nu_F(a, dom(PLUS))
    with pytest.raises(InvalidFundDomain):
        partition_ZBF(a, dom(ZERO, PLUS, 7))


def test_null_orbits_may_be_skipped():
    a = DiscreteMeasureAction(
        (0, 1, 2, 3), ("e", "g"), ((0, 1), (1, 0)), ((0, 1, 2, 3), (1, 0, 3, 2)),
        (Fraction(1), Fraction(1), Fraction(0), Fraction(0)), "null orbit",
    )
    F = dom(0)
    assert reconstruction_holds(a, F)
    assert not null_set_failures(a, F)


def test_action_table_is_validated():
    with pytest.raises(ValueError):
        DiscreteMeasureAction((0, 1), ("e", "g"), ((0, 1), (1, 0)), ((0, 1), (0, 0)), (Fraction(1),) * 2)
    with pytest.raises(ValueError):
        DiscreteMeasureAction((0, 1), ("e", "g"), ((0, 1), (1, 1)), ((0, 1), (1, 0)), (Fraction(1),) * 2)
    with pytest.raises(ValueError):
        DiscreteMeasureAction((0, 1), ("e", "g"), ((0, 1), (1, 0)), ((0, 1), (1, 0)), (Fraction(1), Fraction(2)))
    # products outside a truncation are skipped rather than checked
    DiscreteMeasureAction((0, 1), ("e", "g"), ((0, 1), (1, None)), ((0, 1), (1, 0)), (Fraction(1),) * 2)


# ---------------------------------------------------------------- properties
@given(seeds)
def test_domain_measure_matches_definition(seed):
    _, a, F = random_case(seed)
    assert nu_F(a, F) == direct_domain_measure(a, F)
    assert list(pushforward_sum(a, nu_F(a, F))) == direct_reconstruction(a, F) == list(a.nu)


@given(seeds)
def test_blocks_partition_the_domain(seed):
    _, a, F = random_case(seed)
    blocks = partition_ZBF(a, F)
    union = [z for zs in blocks.values() for z in zs]
    assert sorted(union) == sorted(F.points)
    assert all(E in B for B in blocks)


@given(seeds)
def test_transfer_identity(seed):
    rng, a, F = random_case(seed)
    A = [z for z in range(a.n_points) if rng.random() < 0.5]
    per_orbit = [Fraction(rng.randint(0, 5), rng.randint(1, 3)) for _ in a.orbits]
    h = [next(v for o, v in zip(a.orbits, per_orbit) if z in o) for z in range(a.n_points)]
    lhs, rhs = verify_transfer(a, F, A, h)
    assert lhs == rhs == sum((h[z] * a.nu[z] for z in A), Fraction(0))


@given(seeds)
def test_domain_choice_is_irrelevant_on_invariant_sets(seed):
    rng, a, F = random_case(seed)
    E_ = random_fund_domain(a, rng)
    assert independence_failures(a, E_, F) == []


@given(seeds)
def test_null_sets_correspond(seed):
    _, a, F = random_case(seed)
    assert null_set_failures(a, F) == []


@given(seeds)
def test_multiplicity_is_orbit_invariant_for_invariant_sets(seed):
    rng, a, _ = random_case(seed)
    A = a.saturate([z for z in range(a.n_points) if rng.random() < 0.3])
    for row in a.act:
        assert all(multiplicity(a, A, row[z]) == multiplicity(a, A, z) for z in range(a.n_points))


def test_builtin_suites_pass():
    results = run_quotient_suites(builtin_fixtures(0), seed=0)
    assert [r.name for r in results] == ["reconstruction", "transfer", "independence", "commuting", "null-sets"]
    assert all(r.failed == 0 and r.passed > 0 for r in results)


def test_corrupted_fixture_is_caught():
    bad = z2_negation().corrupted()
    results = run_quotient_suites([bad], seed=0)
    assert any(r.failed for r in results)
