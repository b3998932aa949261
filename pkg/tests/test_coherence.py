"""The coherence engine: recursion, betting certificates, extensions."""

from fractions import Fraction

import pytest

from prevision import (
    Assessment,
    CompoundPrevisionMap,
    ConditionalEvent,
    Family7Assessment,
    IncoherentBase,
    build_world_space,
    check_coherence,
    check_family7,
    demorgan_previsions,
    dutch_book_gains,
    extension_interval,
    find_dutch_book,
    frechet_bounds_conjunction,
    frechet_bounds_disjunction,
    indicator,
    make_conjunction,
    make_disjunction,
    value_table,
)
from prevision.coherence import _refine_endpoint, _simplest_between

F = Fraction


def pair_setup(consequents=("A", "B"), constraints=()):
    space = build_world_space(["A", "B", "H", "K"], constraints)
    first = ConditionalEvent(space.event(consequents[0]), space.event("H"))
    second = ConditionalEvent(space.event(consequents[1]), space.event("K"))
    return space, first, second


def pair_conjunction_assessment(first, second, x, y, z):
    conj = make_conjunction([first, second], {(1,): x, (2,): y, (1, 2): z})
    family = (indicator(first, "X1"), indicator(second, "X2"), conj)
    return Assessment(family, (x, y, z))


def family7_assessment(values, shared_antecedent=False):
    """The three conditionals, three pairwise conjunctions, and the triple."""
    x1, x2, x3, x12, x13, x23, x123 = [F(v) for v in values]
    if shared_antecedent:
        space = build_world_space(["E1", "E2", "E3", "H"])
        events = [
            ConditionalEvent(space.event(f"E{i}"), space.event("H"))
            for i in (1, 2, 3)
        ]
    else:
        space = build_world_space(["E1", "E2", "E3", "H1", "H2", "H3"])
        events = [
            ConditionalEvent(space.event(f"E{i}"), space.event(f"H{i}"))
            for i in (1, 2, 3)
        ]
    singles = {(1,): x1, (2,): x2, (3,): x3}
    pair_values = {(1, 2): x12, (1, 3): x13, (2, 3): x23}
    compounds = []
    for (i, j), xij in pair_values.items():
        previsions = {}
        if not shared_antecedent:
            previsions = {(1,): singles[(i,)], (2,): singles[(j,)]}
        previsions[(1, 2)] = xij
        compounds.append(
            make_conjunction([events[i - 1], events[j - 1]], previsions, f"C{i}{j}")
        )
    triple_previsions = {(1, 2, 3): x123}
    if not shared_antecedent:
        triple_previsions.update(singles)
        triple_previsions.update(pair_values)
    triple = make_conjunction(events, triple_previsions, "C123")
    family = tuple(
        indicator(ce, f"X{i}") for i, ce in enumerate(events, 1)
    ) + tuple(compounds) + (triple,)
    return Assessment(family, (x1, x2, x3, x12, x13, x23, x123)), triple


class TestCheckCoherence:
    def test_independent_pair_any_values_coherent(self):
        space, first, second = pair_setup()
        family = (indicator(first, "X"), indicator(second, "Y"))
        for x in (F(0), F(1, 3), F(1)):
            for y in (F(0), F(2, 3), F(1)):
                verdict = check_coherence(Assessment(family, (x, y)))
                assert verdict.coherent
                assert verdict.dutch_book is None

    def test_single_level_trace_when_no_zero_mass(self):
        space, first, second = pair_setup()
        family = (indicator(first, "X"), indicator(second, "Y"))
        verdict = check_coherence(Assessment(family, (F(1, 2), F(1, 2))))
        assert len(verdict.trace) == 1
        assert verdict.trace[0].i0 == frozenset()
        assert verdict.trace[0].feasible

    def test_conditional_forced_to_one(self):
        space = build_world_space(["E", "H"], ["!(H & !E)"])
        ce = ConditionalEvent(space.event("E"), space.event("H"))
        q = indicator(ce)
        assert check_coherence(Assessment((q,), (F(1),))).coherent
        verdict = check_coherence(Assessment((q,), (F(1, 2),)))
        assert not verdict.coherent
        book = verdict.dutch_book
        assert book is not None and book.margin > 0
        gains = dutch_book_gains(Assessment((q,), (F(1, 2),)), book)
        assert gains and all(g > 0 for _, g in gains)

    def test_conditional_forced_to_zero(self):
        space = build_world_space(["E", "H"], ["!(E & H)"])
        ce = ConditionalEvent(space.event("E"), space.event("H"))
        q = indicator(ce)
        assert check_coherence(Assessment((q,), (F(0),))).coherent
        assert not check_coherence(Assessment((q,), (F(1, 100),))).coherent

    def test_prevision_outside_value_hull(self):
        space, first, _ = pair_setup()
        q = indicator(first, "X")
        verdict = check_coherence(Assessment((q,), (F(2),)))
        assert not verdict.coherent
        assert verdict.dutch_book.stakes == (F(-1),)
        assert verdict.dutch_book.margin == F(1)

    def test_zero_probability_antecedent_recursion(self):
        space = build_world_space(["E", "H"])
        h = indicator(
            ConditionalEvent(space.event("H"), space.everything), "H"
        )
        e_given_h = indicator(
            ConditionalEvent(space.event("E"), space.event("H")), "E|H"
        )
        for x in (F(0), F(1, 3), F(1)):
            verdict = check_coherence(Assessment((h, e_given_h), (F(0), x)))
            assert verdict.coherent
            assert len(verdict.trace) == 2
            assert verdict.trace[0].i0 == frozenset({2})
            assert verdict.trace[1].member_indices == (2,)

    def test_family7_counterexample_incoherent_with_book(self):
        assessment, _ = family7_assessment(
            ("1/2", "3/5", "7/10", "1/10", "1/5", "3/10", 0)
        )
        verdict = check_coherence(assessment)
        assert not verdict.coherent
        book = verdict.dutch_book
        assert book is not None and book.margin > 0
        gains = dutch_book_gains(assessment, book)
        assert gains and all(g >= book.margin for _, g in gains)
        assert find_dutch_book(assessment) == book

    def test_family7_all_product_coherent(self):
        assessment, _ = family7_assessment(
            ("1/2", "1/2", "1/2", "1/4", "1/4", "1/4", "1/8")
        )
        assert check_coherence(assessment).coherent

    def test_family7_convex_mixture_coherent(self):
        a = ("1/2", "1/2", "1/2", "1/4", "1/4", "1/4", "1/8")
        b = ("1/2", "1/2", "1/2", "1/2", "1/2", "1/2", "1/2")
        for weight in (F(1, 4), F(1, 2), F(3, 4)):
            mixed = tuple(
                weight * F(u) + (1 - weight) * F(v) for u, v in zip(a, b)
            )
            assessment, _ = family7_assessment(mixed)
            assert check_coherence(assessment).coherent

    def test_conjunction_coherent_exactly_on_envelope(self):
        xs = (F(1, 2), F(3, 5), F(7, 10))
        lo, hi = frechet_bounds_conjunction(xs)
        space = build_world_space(["E1", "E2", "E3", "H1", "H2", "H3"])
        events = [
            ConditionalEvent(space.event(f"E{i}"), space.event(f"H{i}"))
            for i in (1, 2, 3)
        ]
        family = tuple(indicator(ce, f"X{i}") for i, ce in enumerate(events, 1))

        def assess(z):
            conj = make_conjunction(
                events,
                {
                    (1,): xs[0], (2,): xs[1], (3,): xs[2],
                    (1, 2): xs[0] * xs[1], (1, 3): xs[0] * xs[2],
                    (2, 3): xs[1] * xs[2], (1, 2, 3): z,
                },
            )
            return Assessment(family + (conj,), xs + (z,))

        assert check_coherence(assess(lo)).coherent
        assert check_coherence(assess(hi)).coherent
        assert check_coherence(assess((lo + hi) / 2)).coherent
        assert not check_coherence(assess(hi + F(1, 100))).coherent

    def test_shared_antecedent_family7_matches_characterization(self):
        cases = [
            Family7Assessment.all_min("2/5", "1/2", "3/5").values(),
            Family7Assessment.all_product("2/5", "1/2", "3/5").values(),
            Family7Assessment.all_lukasiewicz("2/5", "1/2", "3/5").values(),
            ("1/2", "3/5", "7/10", "1/10", "1/5", "3/10", 0),
        ]
        for values in cases:
            assessment, _ = family7_assessment(values, shared_antecedent=True)
            expected = check_family7(Family7Assessment(*values)).coherent
            assert check_coherence(assessment).coherent == expected


class TestValueTable:
    def test_forced_constant_one(self):
        space = build_world_space(["E", "H"], ["!(H & !E)"])
        q = indicator(ConditionalEvent(space.event("E"), space.event("H")))
        rows = value_table(q)
        assert all(v == 1 for _, v in rows)

    def test_forced_constant_zero(self):
        space = build_world_space(["E", "H"], ["!(E & H)"])
        q = indicator(ConditionalEvent(space.event("E"), space.event("H")))
        rows = value_table(q)
        assert all(v == 0 for _, v in rows)

    def test_three_member_conjunction_case_table(self):
        space = build_world_space(["E1", "E2", "E3", "H1", "H2", "H3"])
        events = [
            ConditionalEvent(space.event(f"E{i}"), space.event(f"H{i}"))
            for i in (1, 2, 3)
        ]
        previsions = {
            (1,): F(11, 100), (2,): F(12, 100), (3,): F(13, 100),
            (1, 2): F(21, 100), (1, 3): F(22, 100), (2, 3): F(23, 100),
            (1, 2, 3): F(31, 100),
        }
        conj = make_conjunction(events, previsions)
        rows = value_table(conj)
        values = [v for _, v in rows]
        assert len(rows) == 9
        assert values.count(F(1)) == 1 and values.count(F(0)) == 1
        for subset, x in previsions.items():
            assert values.count(x) == 1
        assert rows[-1][0].all_void and rows[-1][1] == F(31, 100)

    def test_free_void_value_reported_as_none(self):
        space, first, _ = pair_setup()
        rows = value_table(indicator(first))
        assert rows[-1][0].all_void and rows[-1][1] is None


class TestExtensionInterval:
    def test_pair_conjunction_envelope(self):
        space, first, second = pair_setup()
        family = (indicator(first, "X"), indicator(second, "Y"))
        base = Assessment(family, (F(7, 20), F(9, 20)))
        target = make_conjunction([first, second], {(1,): F(7, 20), (2,): F(9, 20)})
        closed = extension_interval(base, target)
        generic = extension_interval(base, target, use_closed_form=False)
        assert (closed.lower, closed.upper) == (F(0), F(7, 20))
        assert closed.exact
        assert (generic.lower, generic.upper, generic.exact) == (
            closed.lower, closed.upper, True
        )

    def test_pair_disjunction_envelope(self):
        space, first, second = pair_setup()
        family = (indicator(first, "X"), indicator(second, "Y"))
        base = Assessment(family, (F(7, 20), F(9, 20)))
        target = make_disjunction(
            [first, second],
            demorgan_previsions(
                CompoundPrevisionMap({(1,): F(7, 20), (2,): F(9, 20)})
            ),
        )
        lo, hi = frechet_bounds_disjunction((F(7, 20), F(9, 20)))
        closed = extension_interval(base, target)
        generic = extension_interval(base, target, use_closed_form=False)
        assert (closed.lower, closed.upper) == (lo, hi) == (F(9, 20), F(4, 5))
        assert closed.exact
        assert (generic.lower, generic.upper, generic.exact) == (lo, hi, True)

    def test_same_consequent_overlapping(self):
        space = build_world_space(["A", "H", "K"])
        first = ConditionalEvent(space.event("A"), space.event("H"))
        second = ConditionalEvent(space.event("A"), space.event("K"))
        base = Assessment(
            (indicator(first, "X"), indicator(second, "Y")),
            (F(7, 20), F(9, 20)),
        )
        target = make_conjunction([first, second], {(1,): F(7, 20), (2,): F(9, 20)})
        closed = extension_interval(base, target)
        generic = extension_interval(base, target, use_closed_form=False)
        assert (closed.lower, closed.upper) == (F(63, 400), F(7, 20))
        assert closed.exact
        assert (generic.lower, generic.upper, generic.exact) == (
            F(63, 400), F(7, 20), True
        )

    def test_disjoint_antecedents_pin_product(self):
        space = build_world_space(["A", "H", "K"], ["!(H & K)"])
        first = ConditionalEvent(space.event("A"), space.event("H"))
        second = ConditionalEvent(space.event("A"), space.event("K"))
        base = Assessment(
            (indicator(first, "X"), indicator(second, "Y")),
            (F(7, 20), F(9, 20)),
        )
        target = make_conjunction([first, second], {(1,): F(7, 20), (2,): F(9, 20)})
        closed = extension_interval(base, target)
        generic = extension_interval(base, target, use_closed_form=False)
        assert (closed.lower, closed.upper) == (F(63, 400), F(63, 400))
        assert closed.exact
        assert (generic.lower, generic.upper, generic.exact) == (
            F(63, 400), F(63, 400), True
        )

    def test_target_already_in_family(self):
        space, first, second = pair_setup()
        family = (indicator(first, "X"), indicator(second, "Y"))
        base = Assessment(family, (F(7, 20), F(9, 20)))
        result = extension_interval(base, indicator(first, "again"))
        assert (result.lower, result.upper, result.exact) == (
            F(7, 20), F(7, 20), True
        )

    def test_family7_triple_interval(self):
        values = ("1/2", "1/2", "1/2", "3/8", "3/8", "3/8", 0)
        assessment, triple = family7_assessment(values)
        base = assessment.restrict(range(6))
        closed = extension_interval(base, triple)
        generic = extension_interval(base, triple, use_closed_form=False)
        assert (closed.lower, closed.upper) == (F(1, 4), F(3, 8))
        assert closed.exact
        assert (generic.lower, generic.upper, generic.exact) == (
            F(1, 4), F(3, 8), True
        )

    def test_adversarial_internal_previsions_skip_closed_form(self):
        space = build_world_space(["E1", "E2", "E3", "H1", "H2", "H3"])
        events = [
            ConditionalEvent(space.event(f"E{i}"), space.event(f"H{i}"))
            for i in (1, 2, 3)
        ]
        family = tuple(indicator(ce, f"X{i}") for i, ce in enumerate(events, 1))
        base = Assessment(family, (F(1), F(1), F(1)))
        target = make_conjunction(
            events,
            {
                (1,): F(1), (2,): F(1), (3,): F(1),
                (1, 2): F(0), (1, 3): F(0), (2, 3): F(0),
            },
        )
        result = extension_interval(base, target)
        assert (result.lower, result.upper, result.exact) == (F(0), F(1), True)

    def test_incoherent_base_raises(self):
        space = build_world_space(["E", "H"], ["!(E & H)"])
        q = indicator(ConditionalEvent(space.event("E"), space.event("H")))
        base = Assessment((q,), (F(1, 2),))
        with pytest.raises(IncoherentBase):
            extension_interval(base, indicator(
                ConditionalEvent(space.event("E"), space.everything)
            ))


class TestRefinementHelpers:
    def test_simplest_between_prefers_small_denominators(self):
        assert _simplest_between(F(0), F(1)) == F(1, 2)
        assert _simplest_between(F(1, 3), F(2, 3)) == F(1, 2)
        assert _simplest_between(F(138, 1000), F(141, 1000)) == F(5, 36)
        assert _simplest_between(F(2), F(7, 2)) == F(3)
        assert _simplest_between(F(-1, 2), F(1, 3)) == F(0)

    def test_simplest_between_is_minimal_and_inside(self):
        pairs = [
            (F(1, 7), F(1, 6)),
            (F(3, 10), F(1, 3)),
            (F(99, 100), F(100, 100)),
            (F(355, 113) - F(1, 10**8), F(355, 113)),
        ]
        for lo, hi in pairs:
            mid = _simplest_between(lo, hi)
            assert lo < mid < hi
            for d in range(1, mid.denominator):
                low_num = lo * d
                high_num = hi * d
                n = low_num.numerator // low_num.denominator + 1
                assert not (low_num < n < high_num), (lo, hi, F(n, d))

    def test_refine_endpoint_converges_and_snaps(self):
        threshold = F(1, 3)
        result = _refine_endpoint(F(0), F(1), lambda mu: mu >= threshold)
        assert result >= threshold
        assert result - threshold <= F(1, 10**9)

    def test_refine_endpoint_upper_side(self):
        threshold = F(63, 400)
        result = _refine_endpoint(F(1), F(0), lambda mu: mu <= threshold)
        assert result <= threshold
        assert threshold - result <= F(1, 10**9)
