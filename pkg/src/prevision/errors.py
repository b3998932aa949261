"""Exception types shared across the package."""


class PrevisionError(Exception):
    """Base class for all library errors."""


class EmptySpace(PrevisionError):
    """No truth assignment survives the declared constraints."""


class UnknownAtom(PrevisionError):
    """A formula references an atom that was never declared."""

    def __init__(self, name):
        super().__init__(f"unknown atom: {name!r}")
        self.name = name


class FormulaError(PrevisionError):
    """A formula could not be parsed."""


class MissingPrevision(PrevisionError):
    """A compound needs a prevision value that was not supplied."""

    def __init__(self, subset):
        self.subset = frozenset(subset)
        pretty = ",".join(str(i) for i in sorted(self.subset))
        super().__init__(f"missing prevision for member subset {{{pretty}}}")


class OutOfRange(PrevisionError):
    """A value that must lie in [0, 1] does not."""


class NotApplicable(PrevisionError):
    """The family does not have the shape this construction requires."""


class InfeasibleSystem(PrevisionError):
    """An optimization was requested over an infeasible system."""


class IncoherentBase(PrevisionError):
    """An extension was requested over an incoherent base assessment."""


class TargetOutOfBounds(PrevisionError):
    """The requested value lies outside the attainable envelope."""
