"""Finite symmetry-based experiment models and their quantum structure.

Build a model of mutually exclusive experiments over a group-equipped
state space, validate its assumptions, construct the common Hilbert space
with its representation, state vectors, and observables, compute
transition probabilities and effects, simulate measurement chains, and
compare quantum against local-realistic Bell correlations.
"""

from .born import (
    Effect,
    EffectDecomposition,
    GleasonFit,
    TransitionMatrix,
    effect_probability,
    gleason_fit,
    mixture_check,
    transition_matrix,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    ActionMismatch,
    BadPrior,
    BasisMismatch,
    DegenerateFallback,
    EmptyRestriction,
    EpiquantError,
    GroupError,
    ModelError,
    NoOrbitSelected,
    NotAnEffect,
    NotASubgroup,
    NotInGeneratedSubgroup,
    ParseError,
    RankDeficient,
    TrivialSubgroupWarning,
    UnfaithfulAction,
    UnresolvedReference,
    WellDefinednessViolation,
    ZeroProbabilityOutcome,
)
from .groups import FiniteGroup, GroupAction, orbits, word_decompose
from .hilbert import (
    AmplitudeVector,
    GCSResult,
    HilbertRep,
    ObservableOperator,
    Representation,
    StateVector,
    build_regular_rep,
    build_W,
    enumerate_gcs,
    fix_phase,
    indicator_basis,
    observable,
    state_vector,
)
from .measure import (
    DensityMatrix,
    OperatorMeasure,
    SimulationTrace,
    StatisticalModel,
    conditional_expectation,
    density_from_prior,
    posterior_state,
    predictive_distribution,
    pure_state,
    run_stream,
    simulate_sequence,
)
from .modelfile import (
    BUNDLED_MODELS,
    load_model,
    model_from_data,
    model_hash,
    model_to_data,
    save_model,
)
from .models import (
    Experiment,
    ExperimentCatalog,
    ExperimentModel,
    ValidationReport,
    derive_induced_subgroup,
    discover_value_bijection,
    validate_assumptions,
)
from .qubit import (
    QubitState,
    SingletPair,
    as_direction,
    bloch_coverage,
    bloch_vector,
    chsh,
    classical_sign_correlation_exact,
    classical_sign_model,
    epr_correlation,
    planar_direction,
    qubit_transition,
)
from .reduction import (
    CartesianTotal,
    ReducedExperiment,
    WideParameter,
    admissible_values,
    natural_function_check,
    orbit_reduce,
    realized_tuples,
    reduce_model_data,
)
from .reports import Report, canonical_dumps

__version__ = "0.1.0"
