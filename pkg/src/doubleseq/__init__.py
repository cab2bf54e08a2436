"""Finite-window checks for double sequences and the functions acting on them."""
from .sequences import (
    DIVERGENT,
    UNDETERMINED,
    VERIFIED,
    VIOLATED,
    ConvergenceReport,
    Counterexample,
    DivergenceParams,
    DomainBox,
    DomainError,
    FactorableGridSequence,
    IndexPair,
    ScalarDoubleSequence,
    WindowError,
    builtin,
    check_bounded,
    check_cauchy,
    check_definitely_divergent,
    check_pringsheim,
    estimate_pringsheim_limit,
    evaluate,
    grid_gallery,
    scalar_gallery,
)
from .oscillation import (
    OscillationCertificate,
    OscillationParams,
    check_slowly_oscillating,
    find_witness,
    oscillation_gap,
    oscillation_modulus,
)
from .subsequences import (
    SelectorError,
    SubsequenceSelector,
    build_double_subsequence,
    spiral_index,
    spiral_position,
)
from .functions import (
    Function2,
    FunctionFamily,
    UniformContinuityVerdict,
    UniformConvergenceVerdict,
    apply,
    check_uniform_convergence,
    check_uniform_convergence_double,
    function,
    interleave_with_limit,
    test_uniform_continuity,
)
from .campaigns import (
    CampaignReport,
    run_theorem31_campaign,
    run_theorem32_campaign,
    run_theorem33_falsification,
    run_theorem34_campaign,
    run_theorem35_campaign,
)

__version__ = "0.1.0"
