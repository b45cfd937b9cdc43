import json

import numpy as np
import pytest

import qsvmf as q
import qsvmf.pipeline as pipeline
from qsvmf.pipeline import _round_half_up


def toy_dataset(n_per_class: int = 24, seed: int = 7) -> q.Dataset:
    """Two classes split along features 0 and 1; the rest is noise.

    Values kept nonnegative so the chi-squared scorer accepts them.
    """
    rng = np.random.default_rng(seed)
    pos = np.column_stack([
        rng.uniform(2.5, 4.0, size=(n_per_class, 2)),
        rng.uniform(0.0, 4.0, size=(n_per_class, 4)),
    ])
    neg = np.column_stack([
        rng.uniform(0.5, 2.0, size=(n_per_class, 2)),
        rng.uniform(0.0, 4.0, size=(n_per_class, 4)),
    ])
    X = np.vstack([pos, neg])
    y = np.array([1] * n_per_class + [-1] * n_per_class)
    order = rng.permutation(len(y))
    return q.Dataset(X[order], y[order], tuple(f"f{i}" for i in range(6)))


def toy_context(dataset: q.Dataset, seed: int = 0) -> q.FitnessContext:
    plan = q.stratified_kfold(dataset.labels, 3, seed)
    tr, va = plan.train_indices(0), plan.validation_indices(0)
    scaler = q.MinMaxAngleScaler().fit(dataset.features[tr])
    return q.FitnessContext(
        train_scaled=scaler.transform(dataset.features[tr]),
        val_scaled=scaler.transform(dataset.features[va]),
        y_train=dataset.labels[tr],
        y_val=dataset.labels[va],
        train_raw=dataset.features[tr],
        n_qubits=2,
        svm_c=1.0,
        seed=seed,
    )


def test_evaluate_fitness_objective_layout():
    dataset = toy_dataset()
    ctx = toy_context(dataset)
    bits = (1, 1, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 0)
    chrom = q.Chromosome(bits, n_features=6, n_qubits=2)
    objectives = q.evaluate_fitness(chrom, ctx)
    assert objectives.shape == (5,)

    spec = q.decode(chrom, q.sub_seed_for(ctx.seed, bits))
    gates = q.gate_counts(spec)
    assert objectives[1] == gates.local
    assert objectives[2] == gates.cnot
    assert objectives[3] == len(spec.selected_features)

    # accuracy recomputed through the public kernel route
    K_train = q.kernel_matrix(spec, ctx.train_scaled)
    model = q.smo_train(K_train, ctx.y_train, C=ctx.svm_c)
    K_cross = q.kernel_matrix(spec, ctx.val_scaled, ctx.train_scaled)
    acc = q.accuracy(q.predict(model, K_cross), ctx.y_val)
    assert objectives[0] == 1.0 - acc

    # covariance recomputed from the correlation matrix of the raw columns
    cols = ctx.train_raw[:, spec.selected_features]
    corr = np.corrcoef(cols, rowvar=False)
    want = sum(
        abs(corr[i, j]) for i in range(len(corr)) for j in range(i + 1, len(corr))
    )
    assert np.isclose(objectives[4], want, atol=1e-10)


def test_make_evaluator_memoizes(monkeypatch):
    dataset = toy_dataset()
    ctx = toy_context(dataset)
    calls = []
    real = pipeline.evaluate_fitness

    def counting(chromosome, context):
        calls.append(chromosome.bits)
        return real(chromosome, context)

    monkeypatch.setattr(pipeline, "evaluate_fitness", counting)
    evaluator = q.make_evaluator(ctx)
    a = q.Chromosome((1, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0), 6, 2)
    b = q.Chromosome((0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0), 6, 2)
    v1 = evaluator(a)
    v2 = evaluator(a)
    v3 = evaluator(b)
    assert len(calls) == 2
    assert calls == [a.bits, b.bits]
    assert np.array_equal(v1, v2)
    assert v3.shape == (5,)


def test_derive_seed_stable_and_distinct():
    assert q.derive_seed(3, 1, 0) == q.derive_seed(3, 1, 0)
    want = int(np.random.SeedSequence([3, 1, 0]).generate_state(1)[0])
    assert q.derive_seed(3, 1, 0) == want
    grid = {q.derive_seed(s, f, r) for s in range(2) for f in range(3) for r in range(2)}
    assert len(grid) == 12


def test_round_half_up():
    assert _round_half_up(2.5) == 3
    assert _round_half_up(3.5) == 4
    assert _round_half_up(2.4) == 2
    assert _round_half_up(2.0) == 2


def test_aggregate_features_hand_case():
    features, m = q.aggregate_features([[1, 2], [2, 3], [2, 4]])
    assert m == 2
    assert features == [2, 1]


def test_aggregate_features_rounds_size_up_at_half():
    features, m = q.aggregate_features([[5], [5, 9]])
    assert m == 2
    assert features == [5, 9]
    with pytest.raises(ValueError):
        q.aggregate_features([])


def _individual(bits, objectives):
    chrom = q.Chromosome(tuple(bits), n_features=6, n_qubits=2)
    return q.Individual(chromosome=chrom, objectives=np.asarray(objectives, float))


def test_pareto_minimal_features_picks_smallest_sets():
    seed = 0
    small = _individual((1, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0), [0.2, 4, 2, 2, 0.1])
    big = _individual((1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0), [0.1, 4, 2, 3, 0.3])
    out = q.pareto_minimal_features([big, small], seed)
    assert len(out) == 1
    assert out[0]["n_features"] == 2
    assert out[0]["features"] == [0, 3]
    assert np.isclose(out[0]["accuracy"], 0.8)
    assert q.pareto_minimal_features([], seed) == []


def _toy_config(seed: int = 0, **overrides) -> q.GaConfig:
    base = dict(
        population_size=8,
        generations=2,
        crossover_prob=0.8,
        mutation_prob=0.8,
        seed=seed,
    )
    base.update(overrides)
    return q.GaConfig(**base)


def test_run_qsvmf_structure_and_determinism():
    dataset = toy_dataset()
    report = q.run_qsvmf(dataset, _toy_config(), n_qubits=2, k_folds=3)
    again = q.run_qsvmf(dataset, _toy_config(), n_qubits=2, k_folds=3)
    assert report.to_json() == again.to_json()

    assert len(report.folds) == 3
    assert len(report.histories) == 3
    for entry in report.histories:
        rows = entry["rows"]
        assert len(rows) >= 1 and len(rows) <= 3
        assert all(len(row) == 6 for row in rows)
    assert report.m == len(report.aggregated_features)
    assert report.aggregated_features == sorted(report.aggregated_features) or True
    assert 0 <= report.overall_best_fold < 3
    assert len(report.final_cv_fold_accuracies) == 5
    assert 0.0 <= report.final_cv_accuracy <= 1.0
    assert 0.0 <= report.best_raw_accuracy <= 1.0

    spec = q.circuit_from_dict(report.circuit)
    assert spec.selected_features == tuple(sorted(report.aggregated_features))
    assert spec.qubit_feature == tuple(
        report.aggregated_features[i % report.m] for i in range(2)
    )
    for entry in report.folds:
        best = entry["best"]
        assert len(best["objectives"]) == 5
        assert best["accuracy"] == 1.0 - best["objectives"][0]
        assert entry["minimal"], "minimal-feature summary missing"
        front_accs = [1.0 - f["objectives"][0] for f in entry["front0"]]
        assert best["accuracy"] == max(front_accs)


def test_run_qsvmf_report_round_trips_json():
    dataset = toy_dataset()
    report = q.run_qsvmf(dataset, _toy_config(seed=1), n_qubits=2, k_folds=3)
    clone = q.SelectionReport.from_json(report.to_json())
    assert clone == report
    payload = json.loads(report.to_json())
    assert payload["seed"] == 1
    assert payload["n_qubits"] == 2


def test_run_qsvmf_restarts_merge_pools():
    dataset = toy_dataset()
    report = q.run_qsvmf(dataset, _toy_config(restarts=2), n_qubits=2, k_folds=3)
    assert len(report.histories) == 6
    labels = {(h["fold"], h["restart"]) for h in report.histories}
    assert labels == {(f, r) for f in range(3) for r in range(2)}


def test_run_qsvmf_rejects_bad_qubit_counts():
    dataset = toy_dataset()
    with pytest.raises(ValueError):
        q.run_qsvmf(dataset, _toy_config(), n_qubits=1)
    with pytest.raises(ValueError):
        q.run_qsvmf(dataset, _toy_config(), n_qubits=13)


def test_default_circuit_layout():
    spec = q.default_circuit([3, 1, 3], 4)
    assert spec.selected_features == (1, 3)
    assert spec.qubit_feature == (3, 1, 3, 3)
    assert spec.rotation_flags == (1, 1, 1, 1)
    assert spec.axis == "Z"
    assert spec.entangler_pairs == q.qubit_pairs(4)
    assert spec.repetitions == 1
    with pytest.raises(ValueError):
        q.default_circuit([], 4)


def test_remap_circuit_keeps_structure():
    base = q.CircuitSpec(
        selected_features=(0, 3),
        qubit_feature=(0, 3),
        rotation_flags=(1, 0),
        axis="Y",
        entangler_pairs=((0, 1),),
        repetitions=2,
    )
    spec = q.remap_circuit(base, [5, 2])
    assert spec.selected_features == (2, 5)
    assert spec.qubit_feature == (5, 2)
    assert spec.rotation_flags == (1, 0)
    assert spec.axis == "Y"
    assert spec.entangler_pairs == ((0, 1),)
    assert spec.repetitions == 2
    with pytest.raises(ValueError):
        q.remap_circuit(base, [])


def test_compare_report_toy_grid():
    dataset = toy_dataset()
    table = q.compare_report(dataset, [0, 1], seed=0, n_qubits=2, k_folds=3)
    assert set(table.feature_sets) == set(q.FEATURE_SET_NAMES)
    assert table.feature_sets["qsvmf"] == [0, 1]
    for name in ("chi2", "f_regression"):
        cols = table.feature_sets[name]
        assert len(cols) == 2
        assert cols == sorted(cols)
    assert set(table.accuracies) == set(q.CLASSIFIER_NAMES)
    for clf in q.CLASSIFIER_NAMES:
        for name in q.FEATURE_SET_NAMES:
            assert 0.0 <= table.accuracies[clf][name] <= 1.0
    # the informative pair should be easy for most of the grid
    assert table.accuracies["svm_rbf"]["qsvmf"] >= 0.9

    csv = table.to_csv()
    lines = csv.strip().split("\n")
    assert lines[0] == "classifier,qsvmf,chi2,f_regression"
    assert len(lines) == 1 + len(q.CLASSIFIER_NAMES)

    again = q.compare_report(dataset, [0, 1], seed=0, n_qubits=2, k_folds=3)
    assert again.to_csv() == csv


def test_compare_report_accepts_explicit_circuit():
    dataset = toy_dataset()
    circuit = q.CircuitSpec(
        selected_features=(0, 1),
        qubit_feature=(0, 1),
        rotation_flags=(1, 1),
        axis="Y",
        entangler_pairs=(),
        repetitions=1,
    )
    table = q.compare_report(dataset, [0, 1], seed=0, n_qubits=2, k_folds=3,
                             circuit=circuit)
    assert 0.0 <= table.accuracies["qsvm"]["qsvmf"] <= 1.0


def test_selector_fit_transform_support():
    dataset = toy_dataset()
    selector = q.QsvmfSelector(
        n_qubits=2, population_size=8, generations=2, k_folds=3, seed=0
    )
    Xt = selector.fit_transform(dataset.features, dataset.labels)
    assert selector.selected_features_ == sorted(selector.selected_features_)
    assert Xt.shape == (dataset.n_rows, len(selector.selected_features_))
    assert np.array_equal(Xt, dataset.features[:, selector.selected_features_])
    support = selector.get_support()
    assert support.dtype == bool
    assert list(np.flatnonzero(support)) == selector.selected_features_
    assert selector.report_.aggregated_features is not None


def test_selector_is_sklearn_compatible():
    from sklearn.base import clone

    selector = q.QsvmfSelector(population_size=8, generations=2, seed=3)
    params = selector.get_params()
    assert params["population_size"] == 8
    assert params["seed"] == 3
    twin = clone(selector)
    assert twin.get_params() == params
    with pytest.raises(ValueError):
        selector.transform(np.zeros((2, 6)))


def test_selector_transform_checks_columns():
    dataset = toy_dataset()
    selector = q.QsvmfSelector(
        n_qubits=2, population_size=8, generations=2, k_folds=3, seed=0
    ).fit(dataset.features, dataset.labels)
    with pytest.raises(ValueError, match="column count"):
        selector.transform(dataset.features[:, :4])
