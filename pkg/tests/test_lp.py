"""Tests for the exact feasibility and optimization solver."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import basic_feasible_points, oracle_feasible, oracle_maximum
from prevision import (
    Assessment,
    ConditionalEvent,
    InfeasibleSystem,
    LinearSystem,
    build_sigma,
    build_sigma_star,
    build_world_space,
    indicator,
    maximize_component_sum,
    maximize_linear,
    solve_feasibility,
)


def conditional(space, consequent, antecedent):
    return ConditionalEvent(space.event(consequent), space.event(antecedent))


def example_pair_system(x=F(3, 10), y=F(4, 5)):
    space = build_world_space(["A", "H", "K"])
    family = (
        indicator(conditional(space, "A", "H"), "A|H"),
        indicator(conditional(space, "A", "K"), "A|K"),
    )
    return build_sigma(Assessment(family, (x, y)))


def never_true_system(mu):
    # the consequent cannot happen inside the antecedent
    space = build_world_space(["E", "H"], ["!(E & H)"])
    family = (indicator(conditional(space, "E", "H"), "E|H"),)
    return build_sigma(Assessment(family, (mu,)))


def full_columns(system):
    rows = [list(r) for r in system.equalities]
    rhs = [F(v) for v in system.rhs]
    if system.normalization:
        rows.append([F(1)] * system.n_unknowns)
        rhs.append(F(1))
    cols = [tuple(row[j] for row in rows) for j in range(system.n_unknowns)]
    return cols, tuple(rhs)


def assert_valid_certificate(system, cert):
    if cert.feasible:
        assert cert.solution is not None and cert.dual is None
        assert system.check_solution(cert.solution)
    else:
        assert cert.solution is None and cert.dual is not None
        cols, rhs = full_columns(system)
        assert len(cert.dual) == len(rhs)
        assert cert.margin > 0
        for col in cols:
            assert sum(u * a for u, a in zip(cert.dual, col)) <= 0
        assert sum(u * b for u, b in zip(cert.dual, rhs)) == cert.margin


def test_overlapping_pair_is_feasible():
    system = example_pair_system()
    cert = solve_feasibility(system)
    assert cert.feasible
    assert_valid_certificate(system, cert)


def test_never_true_consequent_infeasible_with_certificate():
    system = never_true_system(F(1, 2))
    cert = solve_feasibility(system)
    assert not cert.feasible
    assert_valid_certificate(system, cert)
    # the certificate prices every constituent point below the assessment
    points = [row for row in zip(*system.equalities)] or [()]
    y = [-u for u in cert.dual[:-1]]
    for point in points:
        gain = sum((q - mu) * s for q, mu, s in zip(point, system.rhs, y))
        assert gain >= cert.margin


def test_never_true_consequent_zero_is_fine():
    cert = solve_feasibility(never_true_system(F(0)))
    assert cert.feasible


def test_constant_one_quantity():
    space = build_world_space(["H"])
    family = (indicator(conditional(space, "H", "H"), "H|H"),)
    good = build_sigma(Assessment(family, (F(1),)))
    assert solve_feasibility(good).feasible
    bad = build_sigma(Assessment(family, (F(1, 2),)))
    cert = solve_feasibility(bad)
    assert not cert.feasible
    assert_valid_certificate(bad, cert)


def test_component_sums_on_the_pair():
    system = example_pair_system()
    # labels: ++, +0, --, -0, 0+, 0-
    in_first = [0, 1, 2, 3]
    in_second = [0, 2, 4, 5]
    for index_set in (in_first, in_second):
        result = maximize_component_sum(system, index_set)
        assert result.value == 1
        assert system.check_solution(result.solution)
        assert oracle_maximum(
            system, [1 if j in index_set else 0 for j in range(6)]
        ) == 1
    assert maximize_component_sum(system, []).value == 0


def test_pinned_reduced_system_optima():
    x, y, z = F(7, 20), F(9, 20), F(1, 5)
    system = build_sigma_star((x, y, z))
    expected = {0: z, 1: y - z, 2: x - z, 3: 1 - x - y + z}
    for j, value in expected.items():
        result = maximize_component_sum(system, [j])
        assert result.value == value
        objective = [1 if i == j else 0 for i in range(4)]
        assert oracle_maximum(system, objective) == value


def test_maximize_on_infeasible_system_raises():
    with pytest.raises(InfeasibleSystem):
        maximize_component_sum(never_true_system(F(1, 2)), [0])


def test_unbounded_direction_is_reported():
    free = LinearSystem(((F(0),),), (F(0),), ("x",), normalization=False)
    result = maximize_linear(free, (F(1),))
    assert not result.bounded and result.value is None
    capped = LinearSystem(((F(1), F(1)),), (F(1),), ("x", "y"), normalization=False)
    result = maximize_linear(capped, (F(1), F(0)))
    assert result.bounded and result.value == 1


def test_redundant_rows_are_tolerated():
    system = LinearSystem(
        ((F(1), F(1)), (F(1), F(1)), (F(2), F(2))),
        (F(1), F(1), F(2)),
        ("x", "y"),
    )
    cert = solve_feasibility(system)
    assert cert.feasible
    result = maximize_component_sum(system, [0])
    assert result.value == 1


def test_row_permutation_invariance():
    base = example_pair_system()
    rng = random.Random(7)
    rows = list(zip(base.equalities, base.rhs))
    for _ in range(5):
        rng.shuffle(rows)
        shuffled = LinearSystem(
            tuple(r for r, _ in rows), tuple(b for _, b in rows), base.unknown_labels
        )
        assert solve_feasibility(shuffled).feasible
    bad = never_true_system(F(2, 3))
    cert = solve_feasibility(bad)
    assert not cert.feasible


small_fractions = st.fractions(min_value=-2, max_value=2, max_denominator=4)
unit_fractions = st.fractions(min_value=0, max_value=1, max_denominator=6)


@st.composite
def random_systems(draw):
    m = draw(st.integers(min_value=1, max_value=5))
    k = draw(st.integers(min_value=1, max_value=3))
    rows = tuple(
        tuple(draw(small_fractions) for _ in range(m)) for _ in range(k)
    )
    rhs = tuple(draw(small_fractions) for _ in range(k))
    labels = tuple(f"x{j}" for j in range(m))
    return LinearSystem(rows, rhs, labels)


@settings(max_examples=120, deadline=None)
@given(random_systems())
def test_feasibility_matches_bruteforce(system):
    cert = solve_feasibility(system)
    assert cert.feasible == oracle_feasible(system)
    assert_valid_certificate(system, cert)


@settings(max_examples=120, deadline=None)
@given(random_systems(), st.sets(st.integers(min_value=0, max_value=4)))
def test_maxima_match_bruteforce(system, index_set):
    index_set = {j for j in index_set if j < system.n_unknowns}
    objective = [1 if j in index_set else 0 for j in range(system.n_unknowns)]
    reference = oracle_maximum(system, objective)
    if reference is None:
        with pytest.raises(InfeasibleSystem):
            maximize_component_sum(system, index_set)
    else:
        result = maximize_component_sum(system, index_set)
        assert result.value == reference
        assert system.check_solution(result.solution)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(unit_fractions, min_size=2, max_size=2),
    unit_fractions,
)
def test_reduced_system_feasibility_matches_bruteforce(xs, overall):
    system = build_sigma_star(tuple(xs) + (overall,))
    cert = solve_feasibility(system)
    assert cert.feasible == oracle_feasible(system)
    assert_valid_certificate(system, cert)
