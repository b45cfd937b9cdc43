"""QSVMF orchestration: per-fold GA runs, aggregation, retraining, comparisons.

The run protocol: evolve one GA per fold (restarts merged and re-sorted),
take each fold's best front-0 individual, aggregate the selected features by
frequency across folds into a final set of m features (m = rounded mean of
the per-fold best set sizes), then rebuild the best fold's circuit on the
aggregated set and score it by stratified 5-fold cross validation.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .baselines import (
    GaussianNaiveBayes,
    KNearestNeighbors,
    LogisticRegressionGD,
    chi2_scores,
    f_regression_scores,
    select_k_best,
    zscore_apply,
    zscore_fit,
)
from .data import Dataset, FoldPlan, MinMaxAngleScaler, pairwise_covariance_score, stratified_kfold
from .encoding import Chromosome, CircuitSpec, decode, gate_counts, qubit_pairs, sub_seed_for
from .moga import GaConfig, Individual, evolve, fast_nondominated_sort
from .qsim import fidelity_gram, prepare_feature_states
from .svm import ClassicalKernel, accuracy, classical_kernel, gamma_scale, predict, smo_train

CLASSIFIER_NAMES = (
    "qsvm",
    "svm_linear",
    "svm_poly",
    "svm_rbf",
    "svm_sigmoid",
    "logistic_regression",
    "naive_bayes",
    "k_neighbors",
)

FEATURE_SET_NAMES = ("qsvmf", "chi2", "f_regression")


@dataclass
class FitnessContext:
    """Everything one fold's evaluator needs, fixed for the whole GA run."""

    train_scaled: np.ndarray
    val_scaled: np.ndarray
    y_train: np.ndarray
    y_val: np.ndarray
    train_raw: np.ndarray
    n_qubits: int
    svm_c: float
    seed: int


def evaluate_fitness(chromosome: Chromosome, ctx: FitnessContext) -> np.ndarray:
    """Objective vector (1 - val accuracy, local gates, CNOTs, n features,
    covariance score) for one chromosome on one fold."""
    spec = decode(chromosome, sub_seed_for(ctx.seed, chromosome.bits))
    S_train = prepare_feature_states(spec, ctx.train_scaled)
    S_val = prepare_feature_states(spec, ctx.val_scaled)
    model = smo_train(fidelity_gram(S_train, S_train), ctx.y_train, C=ctx.svm_c)
    acc = accuracy(predict(model, fidelity_gram(S_val, S_train)), ctx.y_val)
    gates = gate_counts(spec)
    cov = pairwise_covariance_score(ctx.train_raw, spec.selected_features)
    return np.array([
        1.0 - acc,
        float(gates.local),
        float(gates.cnot),
        float(len(spec.selected_features)),
        cov,
    ])


def make_evaluator(ctx: FitnessContext):
    """Memoized fitness closure; identical bits always get the cached vector."""
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def evaluator(chromosome: Chromosome) -> np.ndarray:
        key = chromosome.bits
        hit = cache.get(key)
        if hit is None:
            hit = evaluate_fitness(chromosome, ctx)
            cache[key] = hit
        return hit

    return evaluator


def derive_seed(seed: int, fold: int, restart: int) -> int:
    """Stable per-(fold, restart) GA seed from the run seed."""
    return int(np.random.SeedSequence([seed, fold, restart]).generate_state(1)[0])


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def aggregate_features(best_sets: Sequence[Sequence[int]]) -> tuple[list[int], int]:
    """Frequency-ranked union of the per-fold best sets, truncated to m.

    m is the round-half-up mean of the set sizes; ranking is count descending
    with ties toward the lower feature index.
    """
    if not best_sets:
        raise ValueError("need at least one feature set")
    m = _round_half_up(sum(len(s) for s in best_sets) / len(best_sets))
    counts = Counter()
    for s in best_sets:
        counts.update(s)
    ranked = sorted(counts, key=lambda f: (-counts[f], f))
    return ranked[:m], m


def pareto_minimal_features(front: Sequence[Individual], seed: int) -> list[dict]:
    """Front members at the smallest selected-feature count, with accuracies."""
    if not front:
        return []
    smallest = min(int(ind.objectives[3]) for ind in front)
    out = []
    for ind in front:
        if int(ind.objectives[3]) != smallest:
            continue
        spec = decode(ind.chromosome, sub_seed_for(seed, ind.chromosome.bits))
        out.append({
            "features": [int(f) for f in spec.selected_features],
            "accuracy": float(1.0 - ind.objectives[0]),
            "n_features": smallest,
        })
    return out


@dataclass
class SelectionReport:
    """Full artifact of one run; plain types only, so JSON round-trips."""

    seed: int
    n_qubits: int
    k_folds: int
    svm_c: float
    scale_lo: float
    scale_hi: float
    ga: dict
    folds: list
    histories: list
    aggregated_features: list
    m: int
    overall_best_fold: int
    circuit: dict
    final_cv_accuracy: float
    final_cv_fold_accuracies: list
    best_raw_accuracy: float
    mean_local_gates: float
    mean_cnot_gates: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SelectionReport":
        return cls(**json.loads(text))


def _circuit_as_dict(spec: CircuitSpec) -> dict:
    return {
        "selected_features": [int(f) for f in spec.selected_features],
        "qubit_feature": [int(f) for f in spec.qubit_feature],
        "rotation_flags": [int(f) for f in spec.rotation_flags],
        "axis": spec.axis,
        "entangler_pairs": [[int(j), int(k)] for j, k in spec.entangler_pairs],
        "repetitions": int(spec.repetitions),
    }


def circuit_from_dict(d: dict) -> CircuitSpec:
    return CircuitSpec(
        selected_features=tuple(d["selected_features"]),
        qubit_feature=tuple(d["qubit_feature"]),
        rotation_flags=tuple(d["rotation_flags"]),
        axis=d["axis"],
        entangler_pairs=tuple((j, k) for j, k in d["entangler_pairs"]),
        repetitions=d["repetitions"],
    )


def _cv_quantum_accuracy(
    dataset: Dataset,
    spec: CircuitSpec,
    plan: FoldPlan,
    svm_c: float,
    scale_lo: float,
    scale_hi: float,
) -> list[float]:
    accs = []
    for fold in range(plan.k):
        tr = plan.train_indices(fold)
        va = plan.validation_indices(fold)
        scaler = MinMaxAngleScaler(scale_lo, scale_hi).fit(dataset.features[tr])
        S_tr = prepare_feature_states(spec, scaler.transform(dataset.features[tr]))
        S_va = prepare_feature_states(spec, scaler.transform(dataset.features[va]))
        model = smo_train(fidelity_gram(S_tr, S_tr), dataset.labels[tr], C=svm_c)
        accs.append(
            accuracy(predict(model, fidelity_gram(S_va, S_tr)), dataset.labels[va])
        )
    return accs


def run_qsvmf(
    dataset: Dataset,
    ga_config: GaConfig,
    n_qubits: int = 4,
    k_folds: int = 5,
    svm_c: float = 1.0,
    scale_lo: float = 0.0,
    scale_hi: float = math.pi,
) -> SelectionReport:
    if not 2 <= n_qubits <= 12:
        raise ValueError("n_qubits must be in [2, 12]")
    ga_config.validate()
    seed = ga_config.seed
    plan = stratified_kfold(dataset.labels, k_folds, seed)

    fold_entries = []
    histories = []
    best_specs = []
    for fold in range(k_folds):
        tr = plan.train_indices(fold)
        va = plan.validation_indices(fold)
        scaler = MinMaxAngleScaler(scale_lo, scale_hi).fit(dataset.features[tr])
        ctx = FitnessContext(
            train_scaled=scaler.transform(dataset.features[tr]),
            val_scaled=scaler.transform(dataset.features[va]),
            y_train=dataset.labels[tr],
            y_val=dataset.labels[va],
            train_raw=dataset.features[tr],
            n_qubits=n_qubits,
            svm_c=svm_c,
            seed=seed,
        )
        evaluator = make_evaluator(ctx)
        pool: list[Individual] = []
        for restart in range(ga_config.restarts):
            cfg = replace(ga_config, seed=derive_seed(seed, fold, restart))
            result = evolve(cfg, dataset.n_features, n_qubits, evaluator)
            pool.extend(result.population)
            histories.append({
                "fold": fold,
                "restart": restart,
                "rows": [[float(v) for v in row] for row in result.history],
            })
        fronts = fast_nondominated_sort([ind.objectives for ind in pool])
        front0 = [pool[i] for i in fronts[0]]
        best_pos = min(
            range(len(front0)),
            key=lambda t: (front0[t].objectives[0], front0[t].objectives[3], t),
        )
        best = front0[best_pos]
        best_spec = decode(best.chromosome, sub_seed_for(seed, best.chromosome.bits))
        best_specs.append(best_spec)
        best_gates = gate_counts(best_spec)
        fold_entries.append({
            "fold": fold,
            "best": {
                "bits": best.chromosome.to_string(),
                "objectives": [float(v) for v in best.objectives],
                "selected_features": [int(f) for f in best_spec.selected_features],
                "accuracy": float(1.0 - best.objectives[0]),
                "gates": {"local": best_gates.local, "cnot": best_gates.cnot},
            },
            "front0": [
                {
                    "bits": ind.chromosome.to_string(),
                    "objectives": [float(v) for v in ind.objectives],
                }
                for ind in front0
            ],
            "minimal": pareto_minimal_features(front0, seed),
        })

    aggregated, m = aggregate_features([s.selected_features for s in best_specs])
    best_fold = min(
        range(k_folds),
        key=lambda f: (
            fold_entries[f]["best"]["objectives"][0],
            fold_entries[f]["best"]["objectives"][3],
            f,
        ),
    )
    base = best_specs[best_fold]
    final_spec = CircuitSpec(
        selected_features=tuple(sorted(aggregated)),
        qubit_feature=tuple(aggregated[i % m] for i in range(n_qubits)),
        rotation_flags=base.rotation_flags,
        axis=base.axis,
        entangler_pairs=base.entangler_pairs,
        repetitions=base.repetitions,
    )
    cv_plan = stratified_kfold(dataset.labels, 5, seed)
    cv_accs = _cv_quantum_accuracy(dataset, final_spec, cv_plan, svm_c, scale_lo, scale_hi)

    return SelectionReport(
        seed=seed,
        n_qubits=n_qubits,
        k_folds=k_folds,
        svm_c=svm_c,
        scale_lo=scale_lo,
        scale_hi=scale_hi,
        ga={
            "population_size": ga_config.population_size,
            "generations": ga_config.generations,
            "crossover_prob": ga_config.crossover_prob,
            "mutation_prob": ga_config.mutation_prob,
            "tournament_size": ga_config.tournament_size,
            "restarts": ga_config.restarts,
            "early_stop_accuracy": ga_config.early_stop_accuracy,
        },
        folds=fold_entries,
        histories=histories,
        aggregated_features=[int(f) for f in aggregated],
        m=m,
        overall_best_fold=best_fold,
        circuit=_circuit_as_dict(final_spec),
        final_cv_accuracy=float(np.mean(cv_accs)),
        final_cv_fold_accuracies=[float(a) for a in cv_accs],
        best_raw_accuracy=max(e["best"]["accuracy"] for e in fold_entries),
        mean_local_gates=float(np.mean([e["best"]["gates"]["local"] for e in fold_entries])),
        mean_cnot_gates=float(np.mean([e["best"]["gates"]["cnot"] for e in fold_entries])),
    )


def default_circuit(features: Sequence[int], n_qubits: int) -> CircuitSpec:
    """Dense reference map for a fixed feature list: Z rotations on every
    qubit, all entangler pairs, one repetition. Features cycle onto qubits;
    surplus features beyond the qubit count are dropped from the map."""
    feats = [int(f) for f in features]
    if not feats:
        raise ValueError("need at least one feature")
    return CircuitSpec(
        selected_features=tuple(sorted(set(feats))),
        qubit_feature=tuple(feats[i % len(feats)] for i in range(n_qubits)),
        rotation_flags=tuple([1] * n_qubits),
        axis="Z",
        entangler_pairs=qubit_pairs(n_qubits),
        repetitions=1,
    )


def remap_circuit(spec: CircuitSpec, features: Sequence[int]) -> CircuitSpec:
    """Keep a circuit's structure bits but read a different feature list."""
    feats = [int(f) for f in features]
    if not feats:
        raise ValueError("need at least one feature")
    return CircuitSpec(
        selected_features=tuple(sorted(set(feats))),
        qubit_feature=tuple(feats[i % len(feats)] for i in range(spec.n_qubits)),
        rotation_flags=spec.rotation_flags,
        axis=spec.axis,
        entangler_pairs=spec.entangler_pairs,
        repetitions=spec.repetitions,
    )


@dataclass
class ComparisonTable:
    """Classifier x feature-set CV accuracies plus the sets themselves."""

    feature_sets: dict
    accuracies: dict
    k_folds: int
    seed: int

    def to_csv(self) -> str:
        names = list(self.feature_sets)
        lines = ["classifier," + ",".join(names)]
        for clf in self.accuracies:
            cells = ",".join(f"{self.accuracies[clf][s]:.6f}" for s in names)
            lines.append(f"{clf},{cells}")
        return "\n".join(lines) + "\n"


def _fold_accuracy_quantum(dataset, spec, tr, va, svm_c, scale_lo, scale_hi):
    scaler = MinMaxAngleScaler(scale_lo, scale_hi).fit(dataset.features[tr])
    S_tr = prepare_feature_states(spec, scaler.transform(dataset.features[tr]))
    S_va = prepare_feature_states(spec, scaler.transform(dataset.features[va]))
    model = smo_train(fidelity_gram(S_tr, S_tr), dataset.labels[tr], C=svm_c)
    return accuracy(predict(model, fidelity_gram(S_va, S_tr)), dataset.labels[va])


def _fold_accuracy_classical_svm(kind, X, y, tr, va, svm_c):
    Xtr, Xva = X[tr], X[va]
    spec = ClassicalKernel(kind=kind, gamma=gamma_scale(Xtr))
    model = smo_train(classical_kernel(spec, Xtr), y[tr], C=svm_c)
    return accuracy(predict(model, classical_kernel(spec, Xva, Xtr)), y[va])


def compare_report(
    dataset: Dataset,
    features: Sequence[int],
    seed: int = 0,
    n_qubits: int = 4,
    circuit: CircuitSpec | None = None,
    svm_c: float = 1.0,
    k_folds: int = 5,
    scale_lo: float = 0.0,
    scale_hi: float = math.pi,
) -> ComparisonTable:
    """Grid of CV accuracies: every classifier on every candidate feature set.

    The sets are the given features plus the chi-squared and F-statistic
    top-k picks at the same k. The QSVM row reuses the provided circuit
    structure remapped onto each set, or a dense reference map.
    """
    feats = [int(f) for f in features]
    if not feats:
        raise ValueError("need at least one feature")
    k = len(feats)
    X, y = dataset.features, dataset.labels
    sets = {
        "qsvmf": feats,
        "chi2": select_k_best(chi2_scores(X, y), k),
        "f_regression": select_k_best(f_regression_scores(X, y), k),
    }
    plan = stratified_kfold(y, k_folds, seed)
    accs: dict[str, dict[str, float]] = {c: {} for c in CLASSIFIER_NAMES}
    for set_name, cols in sets.items():
        spec = (
            remap_circuit(circuit, cols)
            if circuit is not None
            else default_circuit(cols, n_qubits)
        )
        Xs = X[:, cols]
        per_clf: dict[str, list[float]] = {c: [] for c in CLASSIFIER_NAMES}
        for fold in range(k_folds):
            tr = plan.train_indices(fold)
            va = plan.validation_indices(fold)
            per_clf["qsvm"].append(
                _fold_accuracy_quantum(dataset, spec, tr, va, svm_c, scale_lo, scale_hi)
            )
            for kind in ("linear", "poly", "rbf", "sigmoid"):
                per_clf[f"svm_{kind}"].append(
                    _fold_accuracy_classical_svm(kind, Xs, y, tr, va, svm_c)
                )
            mean, std = zscore_fit(Xs[tr])
            Ztr, Zva = zscore_apply(Xs[tr], mean, std), zscore_apply(Xs[va], mean, std)
            lr = LogisticRegressionGD().fit(Ztr, y[tr])
            per_clf["logistic_regression"].append(accuracy(lr.predict(Zva), y[va]))
            nb = GaussianNaiveBayes().fit(Xs[tr], y[tr])
            per_clf["naive_bayes"].append(accuracy(nb.predict(Xs[va]), y[va]))
            knn = KNearestNeighbors().fit(Ztr, y[tr])
            per_clf["k_neighbors"].append(accuracy(knn.predict(Zva), y[va]))
        for clf in CLASSIFIER_NAMES:
            accs[clf][set_name] = float(np.mean(per_clf[clf]))
    return ComparisonTable(
        feature_sets={n: list(map(int, c)) for n, c in sets.items()},
        accuracies=accs,
        k_folds=k_folds,
        seed=seed,
    )


class QsvmfSelector(BaseEstimator):
    """sklearn-style facade over the full selection run.

    fit expects +1/-1 labels; transform keeps the aggregated columns in
    their original order.
    """

    def __init__(
        self,
        n_qubits: int = 4,
        population_size: int = 40,
        generations: int = 30,
        crossover_prob: float = 0.2,
        mutation_prob: float = 0.2,
        k_folds: int = 5,
        seed: int = 0,
        restarts: int = 1,
        svm_c: float = 1.0,
        scale_lo: float = 0.0,
        scale_hi: float = math.pi,
        early_stop_accuracy: float | None = None,
    ):
        self.n_qubits = n_qubits
        self.population_size = population_size
        self.generations = generations
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.k_folds = k_folds
        self.seed = seed
        self.restarts = restarts
        self.svm_c = svm_c
        self.scale_lo = scale_lo
        self.scale_hi = scale_hi
        self.early_stop_accuracy = early_stop_accuracy

    def fit(self, X: np.ndarray, y: np.ndarray) -> "QsvmfSelector":
        X = np.asarray(X, dtype=np.float64)
        dataset = Dataset(
            features=X,
            labels=np.asarray(y),
            feature_names=tuple(f"f{i}" for i in range(X.shape[1])),
        )
        config = GaConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            seed=self.seed,
            restarts=self.restarts,
            early_stop_accuracy=self.early_stop_accuracy,
        )
        self.report_ = run_qsvmf(
            dataset,
            config,
            n_qubits=self.n_qubits,
            k_folds=self.k_folds,
            svm_c=self.svm_c,
            scale_lo=self.scale_lo,
            scale_hi=self.scale_hi,
        )
        self.n_features_in_ = X.shape[1]
        self.selected_features_ = sorted(self.report_.aggregated_features)
        support = np.zeros(X.shape[1], dtype=bool)
        support[self.selected_features_] = True
        self.support_ = support
        return self

    def get_support(self) -> np.ndarray:
        self._check_fitted()
        return self.support_.copy()

    def transform(self, X: np.ndarray) -> np.ndarray:
        self._check_fitted()
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError("column count does not match the fitted data")
        return X[:, self.selected_features_]

    def fit_transform(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.fit(X, y).transform(X)

    def _check_fitted(self) -> None:
        if not hasattr(self, "support_"):
            raise ValueError("QsvmfSelector is not fitted")
