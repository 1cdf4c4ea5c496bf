"""labelmax: weighted partial MaxSAT with sound preprocessing.

The pipeline: monotone (blocked) clause elimination on the weighted
formula, resolution-style preprocessing on its labelled form, then a
core-guided search, with model reconstruction mapping the answer back to
the original formula.
"""

from .model import (
    LCNF,
    Assignment,
    ClauseT,
    LabelledClause,
    MaxSatSolution,
    TOP,
    WCNF,
    WeightOverflowError,
    clause,
    cost_of_labels,
    induced_subformula,
    is_tautology,
    lclause,
    lcnf_from_wcnf,
)
from .bce import bce_fixpoint, bce_reconstruct
from .lcnf_prep import PrepConfig, bve_reconstruct, preprocess_lcnf
from .reduction import lcnf_to_wcnf, lift_reduction_solution
from .solver import (
    SolveReport,
    solve_fu_malik_lcnf,
    solve_lcnf,
    solve_wmsu1_lcnf,
)
from .cli import PipelineError, PipelineResult, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "LCNF",
    "Assignment",
    "ClauseT",
    "LabelledClause",
    "MaxSatSolution",
    "PipelineError",
    "PipelineResult",
    "PrepConfig",
    "SolveReport",
    "TOP",
    "WCNF",
    "WeightOverflowError",
    "bce_fixpoint",
    "bce_reconstruct",
    "bve_reconstruct",
    "clause",
    "cost_of_labels",
    "induced_subformula",
    "is_tautology",
    "lclause",
    "lcnf_from_wcnf",
    "lcnf_to_wcnf",
    "lift_reduction_solution",
    "preprocess_lcnf",
    "run_pipeline",
    "solve_fu_malik_lcnf",
    "solve_lcnf",
    "solve_wmsu1_lcnf",
    "__version__",
]
