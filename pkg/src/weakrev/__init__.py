"""Information gain and reversibility of quantum measurements."""

from .errors import (
    BoundViolationError,
    CompletenessError,
    DegenerateOperatorError,
    DimensionError,
    DomainError,
    InformationWasExtractedError,
    NonReversibleError,
    StateError,
    ZeroProbabilityError,
)
from .infogain import (
    GuessStrategy,
    MonteCarloEstimate,
    estimation_fidelity_mc,
    estimation_fidelity_twirl,
    information_gain,
    optimal_guess,
    swap_operator,
    twirl_exact,
    twirl_mc,
)
from .measurement import (
    MeasurementOperator,
    MeasurementSet,
    example_von_neumann,
    example_weak_eta,
    new_measurement_set,
    outcome_probability,
    outcome_probability_mixed,
    post_measurement_state,
    random_measurement_set,
    sample_outcome,
    saturating_measurement_set,
)
from .qlin import RandomSource, SVDTriple, haar_unitary, random_density_matrix, random_pure_state, svd
from .reversal import (
    apply_erasure,
    disturbance,
    erasing_operator,
    reversal_probability,
    reversibility,
    reversing_operator,
    simulate_measure_and_reverse,
)
from .tradeoff import TradeoffReport, ensemble_scan, is_saturating, qubit_identity_residual, tradeoff_report

__version__ = "0.1.0"
