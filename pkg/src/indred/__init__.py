"""Two-stage sufficient dimension reduction for induced and censored responses.

The package estimates the central subspace of a thresholded (induced)
response by projecting a second-stage kernel onto the subspace recovered
from the full response, with censored-data variants of both stages. The
top-level namespace re-exports the working API; see the module docstrings
for the conventions each layer pins down.
"""

__version__ = "0.1.0"

from .errors import (
    CensoringSupportViolated,
    DimensionError,
    EmptyData,
    GroupTooSmall,
    IndredError,
    InvalidMatrix,
    ModelMisconfigured,
    NotPositiveDefinite,
    ParseError,
    ThresholdTooEarly,
    ThresholdTooLate,
    TooFewRows,
)
from .estimator import (
    FitResult,
    SdrMethod,
    fit_direct,
    fit_two_stage,
    fit_two_stage_merc,
    merc_select,
    merc_select_induced,
)
from .harness import (
    CellResult,
    CellSpec,
    IntroSummary,
    SimReport,
    preset_table1_model4,
    preset_table1_model5,
    run_cell,
    run_intro_scenario,
    run_table,
    true_span,
)
from .kernels import (
    DataSet,
    Standardizer,
    fit_standardizer,
    save_kernel_binary,
    sir_kernel,
    slice_response,
    standardize,
)
from .linalg import (
    EigenPairs,
    Subspace,
    SymMatrix,
    frobenius_span_distance,
    inv_sqrt,
    leading_subspace,
    pseudo_inverse,
    sym_eigen,
)
from .simgen import (
    ModelSpec,
    gen_dataset,
    make_rng,
    response_quantile,
)
from .survival import (
    CensoredMoments,
    SurvivalCurve,
    censored_save_kernel,
    censored_save_moments,
    censored_sir_binary_kernel,
    censored_sir_kernel,
    double_slice,
    kaplan_meier,
)

__all__ = [
    "__version__",
    # errors
    "IndredError",
    "InvalidMatrix",
    "DimensionError",
    "NotPositiveDefinite",
    "GroupTooSmall",
    "EmptyData",
    "ThresholdTooEarly",
    "ThresholdTooLate",
    "CensoringSupportViolated",
    "ModelMisconfigured",
    "ParseError",
    "TooFewRows",
    # linear algebra
    "SymMatrix",
    "EigenPairs",
    "Subspace",
    "sym_eigen",
    "leading_subspace",
    "inv_sqrt",
    "pseudo_inverse",
    "frobenius_span_distance",
    # kernels
    "DataSet",
    "Standardizer",
    "fit_standardizer",
    "standardize",
    "slice_response",
    "sir_kernel",
    "save_kernel_binary",
    # survival
    "SurvivalCurve",
    "CensoredMoments",
    "kaplan_meier",
    "double_slice",
    "censored_sir_kernel",
    "censored_save_moments",
    "censored_save_kernel",
    "censored_sir_binary_kernel",
    # estimator
    "SdrMethod",
    "FitResult",
    "fit_direct",
    "fit_two_stage",
    "fit_two_stage_merc",
    "merc_select",
    "merc_select_induced",
    # simulation
    "ModelSpec",
    "make_rng",
    "gen_dataset",
    "response_quantile",
    # harness
    "CellSpec",
    "CellResult",
    "SimReport",
    "IntroSummary",
    "true_span",
    "run_cell",
    "run_table",
    "run_intro_scenario",
    "preset_table1_model4",
    "preset_table1_model5",
]
