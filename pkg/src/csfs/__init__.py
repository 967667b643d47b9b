"""Cost-sensitive feature selection for F-measures on imbalanced data.

F-measure maximization is reduced to a sweep of cost-sensitive joint
l2,1-norm regressions; each is solved by iterative reweighting and features
are ranked by the row norms of the selected projection matrix.
"""

from .costs import (
    CostVector,
    Variant,
    build_cost_matrix,
    cost_fn_binary,
    cost_fn_multiclass,
    cost_fn_multilabel,
    cost_vector,
    discretize,
)
from .data import (
    ClassPriors,
    CsvSchema,
    Dataset,
    FeatureBox,
    InformativeSpec,
    Splits,
    Task,
    append_bias,
    class_priors,
    gen_synthetic_binary,
    load_csv,
    read_manifest,
    save_csv,
    split,
    write_manifest,
)
from .errors import (
    CostDomainError,
    CSFSError,
    DataError,
    LabelDomainError,
    NumericalError,
    ParseError,
    SweepError,
    UndefinedMeasureError,
)
from .evaluation import EvalReport, baseline_equal_cost, compare_report, csfs_eval, downstream_eval
from .fmeasure import (
    ConfusionCounts,
    ErrorProfile,
    confusion,
    error_profile,
    f_beta_binary,
    macro_f,
    mc_micro_f,
    ml_micro_f,
    total_cost,
)
from .solver import (
    FitResult,
    SolverConfig,
    fit,
    objective,
    smoothed_objective,
    solve_column,
    update_D,
    update_G,
)
from .sweep import SweepResult, predict, rank_features, run_sweep, select_top_k

__version__ = "0.1.0"
