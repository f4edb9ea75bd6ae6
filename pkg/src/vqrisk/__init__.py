"""Variational quantum classifier for credit-sales risk decisions.

The package bundles an exact statevector simulator for small registers, a
two-step amplitude encoding for tabular credit data, trainable pattern-state
circuits with an SPSA optimizer, SWAP-test and distribution-distance
classification with per-cluster acceptance ranges, and entanglement
diagnostics based on partial-trace purity.
"""

__version__ = "0.1.0"

from .ansatz import AnsatzSpec, ParameterVector, build_circuit, can_entangle, param_count, pattern_state
from .classify import (
    DISTANCE_MODES,
    UNRECOGNIZED,
    ClassificationOutcome,
    ClassificationReport,
    ModelFormatError,
    TrainedModel,
    classify_samples,
    distance,
    evaluate,
    filter_unrecognized,
    load_model,
    mvqe_classify,
    per_qubit_swap_test,
    save_model,
    swap_test_p0,
)
from .encoding import (
    CsvFormatError,
    Dataset,
    EncodedSample,
    RawObservation,
    amplitude_encode,
    encode_dataset,
    export_encoded,
    generate_synthetic,
    load_csv,
    minmax_normalize,
    pad_features,
    risk_label,
    save_csv,
)
from .entanglement import (
    PartitionReport,
    analyze_dataset,
    bipartition_entangled,
    detect_by_partition_division,
)
from .qsim import (
    Circuit,
    DensityMatrix,
    GateOp,
    PauliTerm,
    ProbDist,
    StateVector,
    apply_gate,
    hamiltonian_expectation,
    inner_product,
    new_basis_state,
    partial_trace,
    pauli_expectation,
    probabilities,
    purity,
    run_circuit,
    sample_counts,
    tensor,
)
from .training import (
    ClusterTarget,
    OptimizationError,
    OptimizerConfig,
    TrainedCluster,
    cluster_samples,
    cost_f,
    spsa_minimize,
    train_cluster,
    tune_thresholds,
)

__all__ = [
    "__version__",
    "AnsatzSpec", "ParameterVector", "build_circuit", "can_entangle", "param_count",
    "pattern_state",
    "DISTANCE_MODES", "UNRECOGNIZED", "ClassificationOutcome", "ClassificationReport",
    "ModelFormatError", "TrainedModel", "classify_samples", "distance", "evaluate",
    "filter_unrecognized", "load_model", "mvqe_classify", "per_qubit_swap_test",
    "save_model", "swap_test_p0",
    "CsvFormatError", "Dataset", "EncodedSample", "RawObservation", "amplitude_encode",
    "encode_dataset", "export_encoded", "generate_synthetic", "load_csv",
    "minmax_normalize", "pad_features", "risk_label", "save_csv",
    "PartitionReport", "analyze_dataset", "bipartition_entangled",
    "detect_by_partition_division",
    "Circuit", "DensityMatrix", "GateOp", "PauliTerm", "ProbDist", "StateVector",
    "apply_gate", "hamiltonian_expectation", "inner_product", "new_basis_state",
    "partial_trace", "pauli_expectation", "probabilities", "purity", "run_circuit",
    "sample_counts", "tensor",
    "ClusterTarget", "OptimizationError", "OptimizerConfig", "TrainedCluster",
    "cluster_samples", "cost_f", "spsa_minimize", "train_cluster", "tune_thresholds",
]
