"""Exact coherence checking for conditional prevision assessments.

The package decides whether probability/prevision assessments on conditional
events and their conjunctions or disjunctions are coherent, computes the
interval of coherent extensions, and provides the Frank t-norm/t-conorm family
together with the closed-form boundary solutions that make the
Frechet-Hoeffding envelope sharp.
"""

from .errors import (
    EmptySpace,
    FormulaError,
    IncoherentBase,
    InfeasibleSystem,
    MissingPrevision,
    NotApplicable,
    OutOfRange,
    PrevisionError,
    TargetOutOfBounds,
    UnknownAtom,
)
from .events import (
    ConditionalEvent,
    Constituent,
    Event,
    Outcome,
    WorldSpace,
    build_world_space,
    constituents_in_all_antecedents,
    enumerate_constituents,
)
from .geometry import (
    Assessment,
    CompoundPrevisionMap,
    ConditionalQuantity,
    LinearSystem,
    PointSet,
    QuantityConstituent,
    as_conditional_event,
    build_points,
    build_sigma,
    build_sigma_star,
    conjunction_signatures,
    demorgan_previsions,
    indicator,
    make_conjunction,
    make_disjunction,
    quantity_constituents,
    signature_label,
    to_fraction,
)
from .coherence import (
    CoherenceVerdict,
    DutchBook,
    ExtensionInterval,
    LevelRecord,
    check_coherence,
    dutch_book_gains,
    extension_interval,
    find_dutch_book,
    value_table,
)
from .closed_form import (
    Family7Assessment,
    Family7Verdict,
    LambdaVector,
    SufficiencyVerdict,
    check_family7,
    extension_interval_family7,
    family7_bounds,
    lambda_solution_TL,
    lambda_solution_TM,
    lukasiewicz_sufficient,
    special_case_same_consequent,
)
from .frank import (
    FrankKind,
    FrankParameter,
    frechet_bounds_conjunction,
    frechet_bounds_disjunction,
    solve_lambda,
    sum_rule_disjunction,
    tconorm,
    tnorm,
)
from .lp import (
    FeasibilityCertificate,
    OptimizationResult,
    maximize_component_sum,
    maximize_linear,
    solve_feasibility,
)

__all__ = [
    "EmptySpace",
    "FormulaError",
    "IncoherentBase",
    "InfeasibleSystem",
    "MissingPrevision",
    "NotApplicable",
    "OutOfRange",
    "PrevisionError",
    "TargetOutOfBounds",
    "UnknownAtom",
    "ConditionalEvent",
    "Constituent",
    "Event",
    "Outcome",
    "WorldSpace",
    "build_world_space",
    "constituents_in_all_antecedents",
    "enumerate_constituents",
    "Assessment",
    "CompoundPrevisionMap",
    "ConditionalQuantity",
    "LinearSystem",
    "PointSet",
    "QuantityConstituent",
    "as_conditional_event",
    "build_points",
    "build_sigma",
    "build_sigma_star",
    "conjunction_signatures",
    "demorgan_previsions",
    "indicator",
    "make_conjunction",
    "make_disjunction",
    "quantity_constituents",
    "signature_label",
    "to_fraction",
    "FeasibilityCertificate",
    "OptimizationResult",
    "maximize_component_sum",
    "maximize_linear",
    "solve_feasibility",
    "CoherenceVerdict",
    "DutchBook",
    "ExtensionInterval",
    "LevelRecord",
    "check_coherence",
    "dutch_book_gains",
    "extension_interval",
    "find_dutch_book",
    "value_table",
    "Family7Assessment",
    "Family7Verdict",
    "LambdaVector",
    "SufficiencyVerdict",
    "check_family7",
    "extension_interval_family7",
    "family7_bounds",
    "lambda_solution_TL",
    "lambda_solution_TM",
    "lukasiewicz_sufficient",
    "special_case_same_consequent",
    "FrankKind",
    "FrankParameter",
    "frechet_bounds_conjunction",
    "frechet_bounds_disjunction",
    "solve_lambda",
    "sum_rule_disjunction",
    "tconorm",
    "tnorm",
]
