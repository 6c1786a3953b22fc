"""Two-party process-matrix toolkit: operators, instruments, outcome
statistics, and entropy maximization over causally separable families."""

__version__ = "0.1.0"

from .instruments import (
    Instrument,
    choi_identity,
    gyni_strategy,
    kraus_to_choi,
    validate_instrument,
)
from .operators import (
    A_IN,
    A_OUT,
    B_IN,
    B_OUT,
    CANONICAL_LABELS,
    HermitianOperator,
    Subsystem,
    from_pauli_map,
    min_eigenvalue,
    partial_trace,
    pauli_coeff,
    pauli_term,
    tensor,
    to_pauli_map,
    trace_replace,
)
from .process import (
    FeixParams,
    InfeasibleParamsError,
    ProcessMatrix,
    SepParams,
    feix_process,
    maximally_mixed,
    nonsignalling_part,
    ocb_process,
    separable_from_params,
    validate_process,
)
from .optimizer import (
    OptimizerConfig,
    OptimizerResult,
    coordinate_ascent,
    feasible_interval,
    feix_maximize,
    line_maximize,
    multistart,
    random_feasible_init,
)
from .stats import (
    CondProbTable,
    EntropyReport,
    InputDist,
    cond_probs,
    entropies,
    game_success,
    joint_dist,
)
from .validation import CheckResult, ValidityReport
