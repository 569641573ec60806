"""Desk-scale toolkit for quantum spin-chain sources.

Dense operator algebra, Kraus channels and their Heisenberg duals,
finite-alphabet classical processes with an exact ergodicity
classifier, consistent source families with dense and transfer
correlation backends, finite-horizon ergodic-mean and mixing tests,
conditional expectation onto a product basis, and a deterministic
config-driven experiment runner.
"""

from ._version import __version__
from .errors import (
    AlignmentError,
    AlphabetError,
    BackendError,
    CapExceededError,
    ConfigError,
    ShapeMismatchError,
)
from .operators import (
    DensityOperator,
    DensityReport,
    Operator,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    as_operator,
    dense_cap,
    density_operator,
    embed_observable,
    haar_unitary,
    identity_operator,
    random_density,
    random_observable,
    tensor_product,
    trace_pairing,
    validate_density,
    word_projector,
)
from .channels import (
    KrausChannel,
    KrausReport,
    amplitude_damping_channel,
    apply_channel,
    apply_dual,
    block_channel,
    depolarizing_channel,
    dual_channel,
    embedding_channel,
    identity_channel,
    kraus_channel,
    make_standard_channel,
    phase_damping_channel,
    random_unitary_channel,
    unitary_channel,
    validate_alphabet,
    validate_kraus,
)
from .classical import (
    ClassicalConsistencyReport,
    ClassicalProcess,
    ClassificationReport,
    IIDProcess,
    MarkovProcess,
    MeasureTable,
    MixtureProcess,
    block_mean,
    check_classical_consistency,
    check_measure_consistency,
    classical_correlation,
    classical_correlation_sweep,
    classify_process,
    marginal_table,
    measure_table,
    stationary_distribution,
    word_probability,
)
from .sources import (
    AlphabetSpec,
    ChannelTransformedSource,
    ClassicallyCorrelatedSource,
    IIDSource,
    QuantumSource,
    SourceCheckReport,
    channel_transform_source,
    check_consistency,
    check_n_consistency,
    check_n_stationarity,
    check_stationarity,
    computational_alphabet,
    construct_classically_correlated,
    expectation_table,
    source_block_mean,
    source_correlation,
)
from .pinching import (
    PinchedSource,
    PinchingBasis,
    PinchingPropertyReport,
    computational_basis,
    conditional_expectation,
    diagonal_observable,
    measure_to_state,
    source_measure_table,
    state_to_measure,
    verify_expectation_properties,
)
from .ergodicity import (
    DecayFit,
    ErgodicityReport,
    PairReport,
    SourceSweepReport,
    correlation_sequence,
    ergodic_mean_test,
    fit_decay,
    projector_pairs,
    random_pairs,
    strong_mixing_test,
    sweep_report,
    weak_mixing_test,
)
from .runner import (
    ExperimentConfig,
    RunReport,
    build_source,
    emit_report,
    run_config_file,
    run_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
