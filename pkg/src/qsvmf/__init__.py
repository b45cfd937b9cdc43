"""Feature selection with a simulated quantum-kernel SVM inside NSGA-II."""

from .data import (
    Dataset,
    FEATURE_NAMES,
    FoldPlan,
    MinMaxAngleScaler,
    WdbcParseError,
    bundled_wdbc_path,
    column_variances,
    load_wdbc,
    pairwise_covariance_score,
    stratified_kfold,
)
from .encoding import (
    Chromosome,
    CircuitSpec,
    GateCounts,
    chromosome_length,
    decode,
    gate_counts,
    qubit_pairs,
    random_chromosome,
    sub_seed_for,
)
from .qsim import (
    apply_cnot,
    apply_entangler,
    apply_h,
    apply_rotation,
    fidelity_gram,
    kernel_entry,
    kernel_matrix,
    prepare_feature_state,
    prepare_feature_states,
    zero_state,
)
from .svm import (
    ClassicalKernel,
    KernelSVC,
    SvmModel,
    accuracy,
    classical_kernel,
    decision_values,
    gamma_scale,
    predict,
    smo_train,
)
from .moga import (
    EvolveResult,
    GaConfig,
    Individual,
    crowding_distance,
    dominates,
    evolve,
    fast_nondominated_sort,
    tournament_select,
)
from .baselines import (
    FeatureScores,
    GaussianNaiveBayes,
    KNearestNeighbors,
    LogisticRegressionGD,
    chi2_scores,
    f_regression_scores,
    select_k_best,
)
from .pipeline import (
    CLASSIFIER_NAMES,
    FEATURE_SET_NAMES,
    ComparisonTable,
    FitnessContext,
    QsvmfSelector,
    SelectionReport,
    aggregate_features,
    circuit_from_dict,
    compare_report,
    default_circuit,
    derive_seed,
    evaluate_fitness,
    make_evaluator,
    pareto_minimal_features,
    remap_circuit,
    run_qsvmf,
)

__version__ = "0.1.0"

__all__ = [
    "CLASSIFIER_NAMES", "Chromosome", "CircuitSpec", "ClassicalKernel",
    "ComparisonTable", "Dataset", "EvolveResult", "FEATURE_NAMES",
    "FEATURE_SET_NAMES", "FeatureScores", "FitnessContext", "FoldPlan",
    "GaConfig", "GateCounts", "GaussianNaiveBayes", "Individual",
    "KNearestNeighbors", "KernelSVC", "LogisticRegressionGD",
    "MinMaxAngleScaler", "QsvmfSelector", "SelectionReport", "SvmModel",
    "WdbcParseError", "accuracy", "aggregate_features", "apply_cnot",
    "apply_entangler", "apply_h", "apply_rotation", "bundled_wdbc_path",
    "chi2_scores", "chromosome_length", "circuit_from_dict",
    "classical_kernel", "column_variances", "compare_report",
    "crowding_distance", "decision_values", "decode", "default_circuit",
    "derive_seed", "dominates", "evaluate_fitness", "evolve",
    "f_regression_scores", "fast_nondominated_sort", "fidelity_gram",
    "gamma_scale", "gate_counts", "kernel_entry", "kernel_matrix",
    "load_wdbc", "make_evaluator", "pairwise_covariance_score",
    "pareto_minimal_features", "predict", "prepare_feature_state",
    "prepare_feature_states", "qubit_pairs", "random_chromosome",
    "remap_circuit", "run_qsvmf", "select_k_best", "smo_train",
    "stratified_kfold", "sub_seed_for", "tournament_select", "zero_state",
]
