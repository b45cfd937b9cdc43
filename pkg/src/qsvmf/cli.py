"""Command line front end: select / baseline / compare / kernel.

Options may come from flags or from a key=value config file; flags win.
Every output file starts with (or embeds) the originating seed and a hash of
the resolved configuration, and reruns with the same inputs are
byte-identical. Files are written only after all computation succeeds, via
temp-and-rename, so a failed run leaves no partial artifacts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .baselines import chi2_scores, f_regression_scores, select_k_best
from .data import MinMaxAngleScaler, load_wdbc
from .encoding import Chromosome, decode, sub_seed_for
from .moga import GaConfig
from .pipeline import (
    SelectionReport,
    circuit_from_dict,
    compare_report,
    run_qsvmf,
)
from .qsim import kernel_matrix
from .svm import (
    ClassicalKernel,
    accuracy,
    classical_kernel,
    gamma_scale,
    predict,
    smo_train,
)
from .baselines import (
    GaussianNaiveBayes,
    KNearestNeighbors,
    LogisticRegressionGD,
    zscore_apply,
    zscore_fit,
)
from .data import stratified_kfold

_SHARED_DEFAULTS = {
    "data": None,
    "qubits": 4,
    "pop": 100,
    "gens": 100,
    "pc": 0.2,
    "pm": 0.2,
    "folds": 5,
    "seed": 0,
    "restarts": 1,
    "svm_c": 1.0,
    "scale_lo": 0.0,
    "scale_hi": math.pi,
    "out": ".",
}

_INT_KEYS = {"qubits", "pop", "gens", "folds", "seed", "restarts", "k"}
_FLOAT_KEYS = {"pc", "pm", "svm_c", "scale_lo", "scale_hi"}


class CliError(ValueError):
    pass


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value file; explicit flags override it")
    parser.add_argument("--data", help="WDBC-format CSV (default: bundled copy)")
    parser.add_argument("--qubits", type=int)
    parser.add_argument("--pop", type=int, help="GA population size")
    parser.add_argument("--gens", type=int, help="GA generations")
    parser.add_argument("--pc", type=float, help="crossover probability")
    parser.add_argument("--pm", type=float, help="mutation probability")
    parser.add_argument("--folds", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--svm-c", type=float, dest="svm_c")
    parser.add_argument("--scale-lo", type=float, dest="scale_lo")
    parser.add_argument("--scale-hi", type=float, dest="scale_hi")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsvmf",
        description="Quantum-kernel SVM feature selection and its classical baselines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="run the full GA selection pipeline")
    _add_shared(p)

    p = sub.add_parser("baseline", help="top-k scoring plus the classical suite")
    _add_shared(p)
    p.add_argument("--method", choices=("chi2", "f_regression"))
    p.add_argument("--k", type=int)

    p = sub.add_parser("compare", help="classifier x feature-set accuracy grid")
    _add_shared(p)
    p.add_argument("--features", help="comma-separated feature indices")
    p.add_argument("--report", help="report.json from a select run")

    p = sub.add_parser("kernel", help="dump a kernel matrix for one chromosome")
    _add_shared(p)
    p.add_argument("--chromosome", help="bit string")
    p.add_argument("--rows-a", dest="rows_a", help="row slice a:b or comma list")
    p.add_argument("--rows-b", dest="rows_b", help="optional second row set")

    return parser


def _read_config_file(path: str) -> dict:
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _coerce(key: str, value):
    if isinstance(value, str):
        try:
            if key in _INT_KEYS:
                return int(value)
            if key in _FLOAT_KEYS:
                return float(value)
        except ValueError as exc:
            raise CliError(f"config key {key}: {exc}") from exc
    return value


def resolve_options(args: argparse.Namespace, extra_defaults: dict | None = None) -> dict:
    """Merge defaults, config file, and explicit flags, in rising priority."""
    defaults = dict(_SHARED_DEFAULTS)
    if extra_defaults:
        defaults.update(extra_defaults)
    resolved = dict(defaults)
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config)
        unknown = set(file_values) - set(defaults)
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for key, value in file_values.items():
            resolved[key] = _coerce(key, value)
    for key in defaults:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
    _validate(resolved)
    return resolved


def _validate(opts: dict) -> None:
    checks = [
        (2 <= opts["qubits"] <= 12, "qubits must be in [2, 12]"),
        (opts["pop"] >= 4 and opts["pop"] % 2 == 0, "pop must be an even number >= 4"),
        (opts["gens"] >= 1, "gens must be positive"),
        (0.0 <= opts["pc"] <= 1.0, "pc must be in [0, 1]"),
        (0.0 <= opts["pm"] <= 1.0, "pm must be in [0, 1]"),
        (opts["folds"] >= 2, "folds must be at least 2"),
        (opts["restarts"] >= 1, "restarts must be at least 1"),
        (opts["svm_c"] > 0, "svm-c must be positive"),
        (opts["scale_lo"] < opts["scale_hi"], "scale range must satisfy lo < hi"),
    ]
    for ok, message in checks:
        if not ok:
            raise CliError(message)


def config_hash(opts: dict) -> str:
    """Hash of the result-affecting options; the output directory is not one."""
    canon = "\n".join(f"{k}={opts[k]!r}" for k in sorted(opts) if k != "out")
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _write_all(files: dict[Path, str]) -> None:
    for path, content in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(content)
        os.replace(tmp, path)


def _provenance(opts: dict) -> str:
    return f"# seed={opts['seed']} config={config_hash(opts)}\n"


def _ga_config(opts: dict) -> GaConfig:
    return GaConfig(
        population_size=opts["pop"],
        generations=opts["gens"],
        crossover_prob=opts["pc"],
        mutation_prob=opts["pm"],
        seed=opts["seed"],
        restarts=opts["restarts"],
    )


def _load(opts: dict):
    return load_wdbc(opts["data"])


def cmd_select(args: argparse.Namespace) -> int:
    opts = resolve_options(args)
    dataset = _load(opts)
    report = run_qsvmf(
        dataset,
        _ga_config(opts),
        n_qubits=opts["qubits"],
        k_folds=opts["folds"],
        svm_c=opts["svm_c"],
        scale_lo=opts["scale_lo"],
        scale_hi=opts["scale_hi"],
    )
    out = Path(opts["out"])
    payload = json.loads(report.to_json())
    payload["config_hash"] = config_hash(opts)
    report_text = json.dumps(payload, sort_keys=True, indent=2) + "\n"

    history_lines = [
        _provenance(opts).rstrip("\n"),
        "fold,restart,generation,best_accuracy,min_local_gates,"
        "min_cnot_gates,min_feature_count,min_covariance",
    ]
    for h in report.histories:
        for row in h["rows"]:
            gen = int(row[0])
            cells = ",".join(f"{v:.6f}" for v in row[1:])
            history_lines.append(f"{h['fold']},{h['restart']},{gen},{cells}")

    pareto_lines = [
        _provenance(opts).rstrip("\n"),
        "fold,member,bits,one_minus_accuracy,local_gates,cnot_gates,"
        "n_features,covariance",
    ]
    for entry in report.folds:
        for pos, member in enumerate(entry["front0"]):
            cells = ",".join(f"{v:.6f}" for v in member["objectives"])
            pareto_lines.append(f"{entry['fold']},{pos},{member['bits']},{cells}")

    _write_all({
        out / "report.json": report_text,
        out / "history.csv": "\n".join(history_lines) + "\n",
        out / "pareto.csv": "\n".join(pareto_lines) + "\n",
    })
    print(f"aggregated features: {report.aggregated_features} (m={report.m})")
    print(f"final 5-fold accuracy: {report.final_cv_accuracy:.4f}")
    print(f"best single-fold validation accuracy: {report.best_raw_accuracy:.4f}")
    print(f"wrote report.json, history.csv, pareto.csv to {out}")
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    opts = resolve_options(args, {"method": "chi2", "k": 4})
    if opts["method"] not in ("chi2", "f_regression"):
        raise CliError("method must be chi2 or f_regression")
    dataset = _load(opts)
    if not 1 <= opts["k"] <= dataset.n_features:
        raise CliError(f"k must be in [1, {dataset.n_features}]")
    scorer = chi2_scores if opts["method"] == "chi2" else f_regression_scores
    cols = select_k_best(scorer(dataset.features, dataset.labels), opts["k"])
    accs = _classical_suite(dataset, cols, opts)
    lines = [
        _provenance(opts).rstrip("\n"),
        f"# method={opts['method']} k={opts['k']} features={'|'.join(map(str, cols))}",
        "classifier,accuracy",
    ]
    lines += [f"{name},{acc:.6f}" for name, acc in accs.items()]
    _write_all({Path(opts["out"]) / "baseline.csv": "\n".join(lines) + "\n"})
    print(f"{opts['method']} top-{opts['k']}: {cols}")
    for name, acc in accs.items():
        print(f"  {name:>20s}  {acc:.4f}")
    return 0


def _classical_suite(dataset, cols, opts) -> dict[str, float]:
    X = dataset.features[:, cols]
    y = dataset.labels
    plan = stratified_kfold(y, opts["folds"], opts["seed"])
    names = ("svm_linear", "svm_poly", "svm_rbf", "svm_sigmoid",
             "logistic_regression", "naive_bayes", "k_neighbors")
    per: dict[str, list[float]] = {n: [] for n in names}
    for fold in range(plan.k):
        tr, va = plan.train_indices(fold), plan.validation_indices(fold)
        for kind in ("linear", "poly", "rbf", "sigmoid"):
            spec = ClassicalKernel(kind=kind, gamma=gamma_scale(X[tr]))
            model = smo_train(classical_kernel(spec, X[tr]), y[tr], C=opts["svm_c"])
            per[f"svm_{kind}"].append(
                accuracy(predict(model, classical_kernel(spec, X[va], X[tr])), y[va])
            )
        mean, std = zscore_fit(X[tr])
        Ztr, Zva = zscore_apply(X[tr], mean, std), zscore_apply(X[va], mean, std)
        lr = LogisticRegressionGD().fit(Ztr, y[tr])
        per["logistic_regression"].append(accuracy(lr.predict(Zva), y[va]))
        nb = GaussianNaiveBayes().fit(X[tr], y[tr])
        per["naive_bayes"].append(accuracy(nb.predict(X[va]), y[va]))
        knn = KNearestNeighbors().fit(Ztr, y[tr])
        per["k_neighbors"].append(accuracy(knn.predict(Zva), y[va]))
    return {n: float(np.mean(per[n])) for n in names}


def _read_report(path: str) -> SelectionReport:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read report {path}: {exc}") from exc
    payload.pop("config_hash", None)
    try:
        return SelectionReport(**payload)
    except TypeError as exc:
        raise CliError(f"{path} is not a selection report: {exc}") from exc


def cmd_compare(args: argparse.Namespace) -> int:
    opts = resolve_options(args)
    if bool(args.features) == bool(args.report):
        raise CliError("give exactly one of --features or --report")
    dataset = _load(opts)
    circuit = None
    if args.report:
        report = _read_report(args.report)
        feats = list(report.aggregated_features)
        circuit = circuit_from_dict(report.circuit)
    else:
        try:
            feats = [int(t) for t in args.features.split(",") if t.strip()]
        except ValueError as exc:
            raise CliError(f"bad --features: {exc}") from exc
    if not feats:
        raise CliError("feature list is empty")
    if any(not 0 <= f < dataset.n_features for f in feats):
        raise CliError(f"feature indices must be in [0, {dataset.n_features})")
    table = compare_report(
        dataset,
        feats,
        seed=opts["seed"],
        n_qubits=opts["qubits"],
        circuit=circuit,
        svm_c=opts["svm_c"],
        k_folds=opts["folds"],
        scale_lo=opts["scale_lo"],
        scale_hi=opts["scale_hi"],
    )
    content = _provenance(opts) + table.to_csv()
    _write_all({Path(opts["out"]) / "compare.csv": content})
    print(f"feature sets: {table.feature_sets}")
    print(table.to_csv(), end="")
    return 0


def _parse_rows(text: str, n_rows: int) -> list[int]:
    text = text.strip()
    if ":" in text:
        lo_s, _, hi_s = text.partition(":")
        try:
            lo, hi = int(lo_s), int(hi_s)
        except ValueError as exc:
            raise CliError(f"bad row slice {text!r}") from exc
        if not 0 <= lo < hi <= n_rows:
            raise CliError(f"row slice {text!r} out of range for {n_rows} rows")
        return list(range(lo, hi))
    try:
        rows = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise CliError(f"bad row list {text!r}") from exc
    if not rows:
        raise CliError("row list is empty")
    if any(not 0 <= r < n_rows for r in rows):
        raise CliError(f"row indices must be in [0, {n_rows})")
    return rows


def cmd_kernel(args: argparse.Namespace) -> int:
    opts = resolve_options(args)
    if not args.chromosome:
        raise CliError("--chromosome is required")
    if not args.rows_a:
        raise CliError("--rows-a is required")
    dataset = _load(opts)
    try:
        chrom = Chromosome.from_string(args.chromosome, dataset.n_features, opts["qubits"])
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    spec = decode(chrom, sub_seed_for(opts["seed"], chrom.bits))
    rows_a = _parse_rows(args.rows_a, dataset.n_rows)
    rows_b = _parse_rows(args.rows_b, dataset.n_rows) if args.rows_b else None
    # angles scaled with statistics from the full table; a diagnostic dump
    # has no train/validation split to respect
    scaler = MinMaxAngleScaler(opts["scale_lo"], opts["scale_hi"]).fit(dataset.features)
    scaled = scaler.transform(dataset.features)
    X_a = scaled[rows_a]
    K = kernel_matrix(spec, X_a, scaled[rows_b] if rows_b is not None else None)
    lines = [_provenance(opts).rstrip("\n")]
    lines += [",".join(f"{v:.12g}" for v in row) for row in K]
    _write_all({Path(opts["out"]) / "kernel.csv": "\n".join(lines) + "\n"})
    print(f"kernel {K.shape[0]}x{K.shape[1]} for features {spec.selected_features}")
    if rows_b is None:
        sym = float(np.abs(K - K.T).max())
        diag = float(np.abs(np.diag(K) - 1.0).max())
        min_eig = float(np.linalg.eigvalsh((K + K.T) / 2).min())
        print(f"symmetry deviation {sym:.3e}, unit-diagonal deviation {diag:.3e}, "
              f"smallest eigenvalue {min_eig:.3e}")
    return 0


_COMMANDS = {
    "select": cmd_select,
    "baseline": cmd_baseline,
    "compare": cmd_compare,
    "kernel": cmd_kernel,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
