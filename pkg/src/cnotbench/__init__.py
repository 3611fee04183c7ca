"""CNOT direction-asymmetry benchmarking toolkit.

Builds the repeated Bell-identity circuits, simulates them under a
direction-resolved noise model, scores the two CNOT orientations against
each other, corrects measurement errors, and rewrites circuits around the
better-performing CNOT direction.
"""

from .circuits import (
    Circuit,
    Gate,
    GateKind,
    build_identity_op,
    build_n_stage,
    build_readout_calibration_circuits,
    circuit_unitary,
    reverse_cnot,
    unitaries_equal_up_to_phase,
)
from .experiment import (
    AsymmetryReport,
    ExperimentConfig,
    OrientationResult,
    StageResult,
    asymmetry,
    classify,
    derive_seed,
    ground_fraction,
    relative_change,
    run_asymmetry_experiment,
    run_orientation,
)
from .mitigation import (
    AssignmentMatrix,
    ComparisonRecord,
    MitigationError,
    build_assignment_matrix,
    compare_mitigated,
    mitigate,
    mitigate_probabilities,
    mitigate_report,
    run_calibration,
)
from .noise import (
    DirectedEdgeParams,
    NoiseModel,
    QubitParams,
    SchemaError,
    ideal_model,
    load_noise_model,
    synth_asymmetric_model,
)
from .simulator import (
    Counts,
    DensityState,
    KrausChannel,
    apply_channel,
    apply_gate,
    coherent_overrotation_channel,
    depolarizing_channel,
    exact_distribution,
    measured_distribution,
    sample_counts,
    simulate,
    thermal_relaxation_channel,
)
from .transpiler import (
    CnotDecision,
    CouplingMap,
    TranspileReport,
    cancel_adjacent_hadamards,
    enforce_direction,
    estimate_success,
    orient_for_error,
)

__version__ = "0.1.0"
