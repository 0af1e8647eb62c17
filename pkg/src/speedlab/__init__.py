"""speedlab: simulation and verification laboratory for multi-type
exclusion dynamics and the joint law of particle speeds.

The package has three layers.  The model layer (:mod:`speedlab.core`,
:mod:`speedlab.engine`, :mod:`speedlab.multiline`) builds configurations of
ordered labels on a lattice window, runs them under graphical-construction
drivers with coupling-ready noise, and samples the projected stationary law
through a tandem-queue collapse.  The formula layer
(:mod:`speedlab.formulas`) evaluates the exact limiting densities and
probabilities those runs should reproduce.  The verification layer
(:mod:`speedlab.lab`, :mod:`speedlab.harness`) turns the comparison into
seeded, statistically-tested claims and machine-readable reports.
"""

from .core import (
    ClassProjection,
    Configuration,
    MarkStream,
    NoiseField,
    RngStream,
    TrajectoryTracker,
    apply_antisort,
    apply_pi,
    apply_sort,
    apply_transpose,
    canonical_config,
    project,
)
from .engine import (
    Certificate,
    CertificateError,
    EndpointBatch,
    OperatorMatrix,
    PairLedgerBatch,
    SimResult,
    coupled_simulate,
    exact_word_distribution,
    inversion_pushforward,
    permutation_index,
    permutation_order,
    restrict_noise,
    run_endpoint_batch,
    run_pair_ledger_batch,
    run_small_window_batch,
    simulate,
)
from .formulas import (
    ASEPValues,
    LazyWalkSpec,
    ThreePointDensity,
    TwoPointDensity,
    asep_values,
    convoy_gap_pmf,
    convoy_gap_tail,
    dist2,
    dist2_diagonal_asymptotic,
    empty_queue_prob,
    equal_speeds_prob,
    joint2_density,
    joint3_density,
    ordered_density,
    rightmost_intermediate_density,
    rightmost_prob,
    vandermonde,
    walk_max_zero_prob,
)
from .harness import (
    ClaimData,
    ClaimResult,
    ClaimSpec,
    REPORT_SCHEMA,
    TestReport,
    default_pad,
    full_suite,
    quick_suite,
    run_claims,
)
from .lab import (
    AdjacencyReport,
    ConvoyPartition,
    EmpiricalMeasure,
    PairAdjacency,
    RegressionResult,
    SpeedEstimate,
    StationarityReport,
    adjacency_experiment,
    count_swaps,
    default_convoy_delta,
    detect_convoys,
    estimate_speeds,
    stationarity_experiment,
    unswapped_prob,
)
from .multiline import (
    MultiLineState,
    collapse,
    default_burn_in,
    empty_queue_prob_estimate,
    sample_queue_states,
    sample_stationary,
    sample_stationary_batch,
)

__version__ = "0.1.0"

__all__ = [
    "ASEPValues",
    "AdjacencyReport",
    "Certificate",
    "CertificateError",
    "ClaimData",
    "ClaimResult",
    "ClaimSpec",
    "ClassProjection",
    "Configuration",
    "ConvoyPartition",
    "EmpiricalMeasure",
    "EndpointBatch",
    "LazyWalkSpec",
    "MarkStream",
    "MultiLineState",
    "NoiseField",
    "OperatorMatrix",
    "PairAdjacency",
    "PairLedgerBatch",
    "REPORT_SCHEMA",
    "RegressionResult",
    "RngStream",
    "SimResult",
    "SpeedEstimate",
    "StationarityReport",
    "TestReport",
    "ThreePointDensity",
    "TrajectoryTracker",
    "TwoPointDensity",
    "adjacency_experiment",
    "apply_antisort",
    "apply_pi",
    "apply_sort",
    "apply_transpose",
    "asep_values",
    "canonical_config",
    "collapse",
    "convoy_gap_pmf",
    "convoy_gap_tail",
    "count_swaps",
    "coupled_simulate",
    "default_burn_in",
    "default_convoy_delta",
    "default_pad",
    "detect_convoys",
    "dist2",
    "dist2_diagonal_asymptotic",
    "empty_queue_prob",
    "empty_queue_prob_estimate",
    "equal_speeds_prob",
    "estimate_speeds",
    "exact_word_distribution",
    "full_suite",
    "inversion_pushforward",
    "joint2_density",
    "joint3_density",
    "ordered_density",
    "permutation_index",
    "permutation_order",
    "project",
    "quick_suite",
    "restrict_noise",
    "rightmost_intermediate_density",
    "rightmost_prob",
    "run_claims",
    "run_endpoint_batch",
    "run_pair_ledger_batch",
    "run_small_window_batch",
    "sample_queue_states",
    "sample_stationary",
    "sample_stationary_batch",
    "simulate",
    "stationarity_experiment",
    "unswapped_prob",
    "vandermonde",
    "walk_max_zero_prob",
    "__version__",
]
