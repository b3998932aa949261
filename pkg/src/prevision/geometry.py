"""Conditional quantities, compound conditionals, points, and linear systems.

A conditional quantity X|K carries one exact rational value per world of K;
outside K it is void and, once assessed, stands in for its own prevision.
Conjunctions and disjunctions of conditional events are conditional quantities
over the union of the antecedents, with previously assessed previsions filling
the partially-void cases.  From an assessed family this module builds the
vectors Q_h attached to the constituents and the feasibility systems whose
solvability coherence checking rests on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import MissingPrevision, NotApplicable, OutOfRange
from .events import ConditionalEvent, Event, WorldSpace, constituents_in_all_antecedents

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value) -> Fraction:
    """Exact conversion; floats are rejected so no binary rounding sneaks in."""
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a Fraction, int, or string")
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class ConditionalQuantity:
    """X|K: an exact value on every world of K, void elsewhere.

    `void_value` is the quantity's own prevision when one is built in (the
    compound constructions put the top-level prevision there); None means the
    void value is supplied later through an assessment.
    """

    conditioning: Event
    values: dict
    label: str = "X|K"
    void_value: Optional[Fraction] = None

    def __post_init__(self):
        vals = {w: to_fraction(v) for w, v in self.values.items()}
        if set(vals) != set(self.conditioning.members):
            raise ValueError("values must cover exactly the conditioning worlds")
        object.__setattr__(self, "values", vals)
        if self.void_value is not None:
            object.__setattr__(self, "void_value", to_fraction(self.void_value))

    @property
    def space(self) -> WorldSpace:
        return self.conditioning.space

    def hull(self) -> tuple[Fraction, Fraction]:
        vs = self.values.values()
        return min(vs), max(vs)

    def is_indicator(self) -> bool:
        return set(self.values.values()) <= {ZERO, ONE}


def indicator(ce: ConditionalEvent, label: str = "E|H") -> ConditionalQuantity:
    """The 0/1 quantity of a conditional event on its antecedent."""
    values = {
        w: ONE if w in ce.consequent else ZERO for w in ce.antecedent.members
    }
    return ConditionalQuantity(ce.antecedent, values, label)


def as_conditional_event(q: ConditionalQuantity) -> Optional[ConditionalEvent]:
    """Recover E|H from an indicator quantity; None if values are not 0/1."""
    if not q.is_indicator():
        return None
    ones = frozenset(w for w, v in q.values.items() if v == ONE)
    return ConditionalEvent(Event(q.space, ones), q.conditioning)


class CompoundPrevisionMap:
    """x_S per non-empty member subset S, each value in [0, 1].

    Keys are 1-based member indices.  Entries are previsions of the
    sub-compounds over S, evaluated beforehand; singletons are the plain
    conditional previsions.
    """

    def __init__(self, entries):
        store = {}
        for key, value in dict(entries).items():
            subset = frozenset(key) if not isinstance(key, int) else frozenset([key])
            if not subset or not all(isinstance(i, int) and i >= 1 for i in subset):
                raise ValueError(f"bad member subset {key!r}")
            v = to_fraction(value)
            if not ZERO <= v <= ONE:
                raise OutOfRange(f"prevision {v} for subset {sorted(subset)} not in [0,1]")
            store[subset] = v
        self._entries = store

    def get(self, subset) -> Optional[Fraction]:
        return self._entries.get(frozenset(subset))

    def require(self, subset) -> Fraction:
        value = self.get(subset)
        if value is None:
            raise MissingPrevision(subset)
        return value

    def items(self):
        return self._entries.items()

    def __len__(self):
        return len(self._entries)


def demorgan_previsions(m: CompoundPrevisionMap) -> CompoundPrevisionMap:
    """Complement every entry: disjunction previsions become the previsions of
    the negated family's conjunctions, and vice versa."""
    return CompoundPrevisionMap({tuple(sorted(s)): ONE - v for s, v in m.items()})


def _compound_statuses(family, world):
    void, false = [], False
    for i, ce in enumerate(family, start=1):
        if world not in ce.antecedent:
            void.append(i)
        elif world not in ce.consequent:
            false = True
    return void, false


def make_conjunction(
    family: Sequence[ConditionalEvent],
    previsions,
    label: Optional[str] = None,
) -> ConditionalQuantity:
    """The conjunction of the family as a quantity on the union of antecedents.

    Value 1 where every member holds, 0 where any member fails, and the
    supplied x_S where exactly the members in S are void.  The full-set entry,
    when present, becomes the built-in void value.
    """
    family = list(family)
    if not family:
        raise ValueError("family must be non-empty")
    if not isinstance(previsions, CompoundPrevisionMap):
        previsions = CompoundPrevisionMap(previsions)
    union = family[0].antecedent
    for ce in family[1:]:
        union = union | ce.antecedent
    values = {}
    for w in union.members:
        void, false = _compound_statuses(family, w)
        if false:
            values[w] = ZERO
        elif not void:
            values[w] = ONE
        else:
            values[w] = previsions.require(void)
    return ConditionalQuantity(
        union,
        values,
        label or f"and({len(family)})",
        void_value=previsions.get(range(1, len(family) + 1)),
    )


def make_disjunction(
    family: Sequence[ConditionalEvent],
    negation_previsions,
    label: Optional[str] = None,
) -> ConditionalQuantity:
    """The disjunction, as one minus the conjunction of the negated family.

    `negation_previsions` holds x_S for the conjunctions of negated members;
    convert a map of direct disjunction previsions with demorgan_previsions.
    """
    negated = [ConditionalEvent(~ce.consequent, ce.antecedent) for ce in family]
    inner = make_conjunction(negated, negation_previsions)
    values = {w: ONE - v for w, v in inner.values.items()}
    void = None if inner.void_value is None else ONE - inner.void_value
    return ConditionalQuantity(
        inner.conditioning,
        values,
        label or f"or({len(family)})",
        void_value=void,
    )


@dataclass(frozen=True)
class Assessment:
    """A family of conditional quantities with assigned previsions."""

    family: tuple[ConditionalQuantity, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        family = tuple(self.family)
        values = tuple(to_fraction(v) for v in self.values)
        if not family:
            raise ValueError("assessment family must be non-empty")
        if len(family) != len(values):
            raise ValueError("one prevision per family member required")
        space = family[0].space
        for q in family:
            if q.space is not space:
                raise ValueError("family members live in different world spaces")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "values", values)

    @property
    def space(self) -> WorldSpace:
        return self.family[0].space

    def __len__(self):
        return len(self.family)

    def restrict(self, indices) -> "Assessment":
        indices = list(indices)
        return Assessment(
            tuple(self.family[i] for i in indices),
            tuple(self.values[i] for i in indices),
        )

    def extend(self, quantity: ConditionalQuantity, value) -> "Assessment":
        return Assessment(self.family + (quantity,), self.values + (to_fraction(value),))


@dataclass(frozen=True)
class QuantityConstituent:
    """A block of worlds with one common value-or-void profile."""

    worlds: frozenset[int]
    profile: tuple  # per member: a Fraction, or None when void

    @property
    def all_void(self) -> bool:
        return all(v is None for v in self.profile)

    def label(self) -> str:
        def mark(v):
            if v is None:
                return "0"
            if v == ONE:
                return "+"
            if v == ZERO:
                return "-"
            return f"({v})"

        return "".join(mark(v) for v in self.profile)


def _profile_sort_key(profile):
    # active values descending, void last; mirrors TRUE < FALSE < VOID
    return tuple((1, ZERO) if v is None else (0, -v) for v in profile)


def quantity_constituents(family):
    """Partition the space by joint profile.

    Returns (inside, c0): the blocks meeting some conditioning event, ordered
    lexicographically by profile, and the all-void block or None.
    """
    family = list(family)
    space = family[0].space
    blocks: dict[tuple, set[int]] = {}
    for w in range(len(space)):
        profile = tuple(q.values.get(w) for q in family)
        blocks.setdefault(profile, set()).add(w)
    ordered = sorted(blocks, key=_profile_sort_key)
    inside = [
        QuantityConstituent(frozenset(blocks[p]), p)
        for p in ordered
        if not all(v is None for v in p)
    ]
    c0_profile = (None,) * len(family)
    c0 = None
    if c0_profile in blocks:
        c0 = QuantityConstituent(frozenset(blocks[c0_profile]), c0_profile)
    return inside, c0


@dataclass(frozen=True)
class PointSet:
    """The vectors Q_h of an assessed family, one per constituent."""

    points: tuple[tuple[Fraction, ...], ...]
    prevision_point: Optional[tuple[Fraction, ...]]
    constituents: tuple[QuantityConstituent, ...]
    c0: Optional[QuantityConstituent]


def build_points(assessment: Assessment) -> PointSet:
    """Q_h takes the quantity's value where active and the assessed prevision
    where void; the all-void block gets the assessment vector itself."""
    inside, c0 = quantity_constituents(assessment.family)
    points = tuple(
        tuple(
            assessment.values[i] if v is None else v
            for i, v in enumerate(c.profile)
        )
        for c in inside
    )
    prevision_point = tuple(assessment.values) if c0 is not None else None
    return PointSet(points, prevision_point, tuple(inside), c0)


@dataclass(frozen=True)
class LinearSystem:
    """Equalities over non-negative unknowns that sum to one."""

    equalities: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    unknown_labels: tuple[str, ...]
    normalization: bool = True
    non_negativity: bool = True

    @property
    def n_unknowns(self) -> int:
        return len(self.unknown_labels)

    def check_solution(self, vec) -> bool:
        vec = [to_fraction(v) for v in vec]
        if len(vec) != self.n_unknowns:
            return False
        if self.non_negativity and any(v < 0 for v in vec):
            return False
        if self.normalization and sum(vec) != 1:
            return False
        for row, b in zip(self.equalities, self.rhs):
            if sum(c * v for c, v in zip(row, vec)) != b:
                return False
        return True


def build_sigma(assessment: Assessment) -> LinearSystem:
    """The solvability system of the assessment: one equality per quantity,
    unknowns indexed by the constituents inside the union of antecedents."""
    ps = build_points(assessment)
    n = len(assessment)
    equalities = tuple(
        tuple(q[i] for q in ps.points) for i in range(n)
    )
    return LinearSystem(
        equalities,
        tuple(assessment.values),
        tuple(c.label() for c in ps.constituents),
    )


def conjunction_signatures(n: int) -> list[frozenset]:
    """All member subsets S of {1..n}, in the canonical unknown order.

    The order puts the last member's bar in the most significant position and
    members 1..n-1 after it, unbarred before barred; it matches the worked
    solution tuples that the closed-form constructors reproduce.
    """
    def position(s):
        pos = 0 if n in s else 1 << (n - 1)
        for j in range(1, n):
            if j not in s:
                pos += 1 << (n - 1 - j)
        return pos

    return sorted((frozenset(s) for s in _subsets(n)), key=position)


def _subsets(n):
    for mask in range(1 << n):
        yield [j for j in range(1, n + 1) if mask >> (j - 1) & 1]


def signature_label(s, n: int) -> str:
    """Compact subset label: barred members carry a trailing tilde."""
    return "".join(f"{j}" if j in s else f"{j}~" for j in range(1, n + 1))


def build_sigma_star(assessment: Union[Assessment, Sequence]) -> LinearSystem:
    """The reduced system over the 2^n blocks where every antecedent holds.

    Accepts either an assessed family (n conditional-event indicators plus
    their n-ary conjunction, shape checked) or a bare value sequence
    (x_1, ..., x_n, x_overall).  Unknowns follow conjunction_signatures.
    """
    if isinstance(assessment, Assessment):
        xs, x_all = _sigma_star_values_from_assessment(assessment)
    else:
        values = [to_fraction(v) for v in assessment]
        if len(values) < 2:
            raise NotApplicable("need at least one member prevision plus the overall one")
        xs, x_all = values[:-1], values[-1]
    n = len(xs)
    sigs = conjunction_signatures(n)
    full = frozenset(range(1, n + 1))
    equalities = [
        tuple(ONE if j in s else ZERO for s in sigs) for j in range(1, n + 1)
    ]
    equalities.append(tuple(ONE if s == full else ZERO for s in sigs))
    return LinearSystem(
        tuple(equalities),
        tuple(xs) + (x_all,),
        tuple(signature_label(s, n) for s in sigs),
    )


def _sigma_star_values_from_assessment(assessment: Assessment):
    family = assessment.family
    if len(family) < 2:
        raise NotApplicable("family must contain members plus their conjunction")
    members, compound = family[:-1], family[-1]
    events = []
    for q in members:
        ce = as_conditional_event(q)
        if ce is None:
            raise NotApplicable(f"{q.label} is not a conditional-event indicator")
        events.append(ce)
    union = events[0].antecedent
    for ce in events[1:]:
        union = union | ce.antecedent
    if compound.conditioning.members != union.members:
        raise NotApplicable("compound must be conditioned on the union of antecedents")
    if not _matches_conjunction_pattern(events, compound):
        raise NotApplicable("last member does not look like the family's conjunction")
    if len(constituents_in_all_antecedents(events)) != 1 << len(events):
        raise NotApplicable("events are not logically independent inside the joint antecedent")
    return list(assessment.values[:-1]), assessment.values[-1]


def _matches_conjunction_pattern(events, compound) -> bool:
    for w in compound.conditioning.members:
        void, false = _compound_statuses(events, w)
        value = compound.values[w]
        if false:
            if value != ZERO:
                return False
        elif not void:
            if value != ONE:
                return False
        elif not ZERO <= value <= ONE:
            return False
    return True


def _matches_disjunction_pattern(events, compound) -> bool:
    for w in compound.conditioning.members:
        true_seen = False
        all_false = True
        for ce in events:
            if w in ce.antecedent:
                if w in ce.consequent:
                    true_seen = True
                    all_false = False
            else:
                all_false = False
        value = compound.values[w]
        if true_seen:
            if value != ONE:
                return False
        elif all_false:
            if value != ZERO:
                return False
        elif not ZERO <= value <= ONE:
            return False
    return True
