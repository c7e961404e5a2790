"""Tomography-free Bell-nonlocality and entanglement witnesses for two qubits."""

__version__ = "0.1.0"

from .errors import (
    DegenerateCalibration,
    InsufficientData,
    InvalidArgument,
    NotAState,
    OptimizerDiagnostic,
    ParseError,
    TomofreeError,
)
from .mle import LikelihoodProblem, MLResult, ml_reconstruct, shift_diagnostic, werner_spectrum_model
from .states import (
    BlochDecomposition,
    RandomStateMeasure,
    StateFamily,
    bloch_compose,
    bloch_decompose,
    make_family,
    partial_trace,
    partial_transpose,
    pauli,
    random_state,
    tensor_and_permute,
)
from .swap import (
    AlicePovm,
    CoincidenceTable,
    MeasuredR,
    MeasurementSetting,
    collective_R_exact,
    estimate_R,
    joint_outcome_distribution,
    simulate_counts,
    singlet_projector,
)
from .witnesses import (
    WitnessReport,
    bell_B,
    bell_M,
    chsh_max,
    concurrence,
    entropic_E,
    fef_F,
    fef_oracle,
    negativity,
    r_matrix,
    report,
)
