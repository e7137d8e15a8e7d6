"""Metrics and experiment runners: stratified cross-validation,
cross-dataset testing and the feature-selection sweep.

The positive class is always "generated" (label 1). Feature selection,
when requested, happens inside each training fold: a boosted-tree model
is fitted on the fold's training rows only and its gain ranking picks the
columns. A deliberately leaky variant (rank once on the full data) exists
behind an explicit flag for comparison runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ml
from .errors import InputError
from .features import FeatureMatrix
from .ml import Dataset, ModelSpec, TrainedModel

FEATURE_TAGS = ("sf", "lf", "hbh", "all")
_FAMILY_PREFIX = {"sf": "sf", "lf": "lf_", "hbh": "hbh_"}


# ---------------------------------------------------------------------------
# metrics


def confusion_counts(predicted: np.ndarray, truth: np.ndarray) -> dict[str, int]:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.size == 0:
        raise InputError("predictions and labels must be equal-length and non-empty")
    return {
        "tp": int(np.sum((predicted == 1) & (truth == 1))),
        "fp": int(np.sum((predicted == 1) & (truth == 0))),
        "fn": int(np.sum((predicted == 0) & (truth == 1))),
        "tn": int(np.sum((predicted == 0) & (truth == 0))),
    }


def f1_score(predicted: np.ndarray, truth: np.ndarray) -> float:
    """2TP / (2TP + FP + FN); 0 when the denominator is 0."""
    c = confusion_counts(predicted, truth)
    denom = 2 * c["tp"] + c["fp"] + c["fn"]
    return 2 * c["tp"] / denom if denom else 0.0


def roc_points(scores: np.ndarray, truth: np.ndarray) -> list[tuple[float, float]]:
    """ROC curve from a threshold sweep over distinct scores; tied scores
    step simultaneously. Points run from (0,0) to (1,1)."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.shape != truth.shape:
        raise InputError("scores and labels must be equal length")
    n_pos = int(np.sum(truth == 1))
    n_neg = int(np.sum(truth == 0))
    if n_pos == 0 or n_neg == 0:
        raise InputError("ROC requires both classes in the truth labels")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_truth = truth[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        tp += int(np.sum(sorted_truth[i:j] == 1))
        fp += int(np.sum(sorted_truth[i:j] == 0))
        points.append((fp / n_neg, tp / n_pos))
        i = j
    return points


def roc_auc(scores: np.ndarray, truth: np.ndarray) -> float:
    """Trapezoidal area under the ROC curve (ties counted as half)."""
    points = roc_points(scores, truth)
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


# ---------------------------------------------------------------------------
# folds and feature tags


def stratified_folds(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Per-row fold index; same dealing rule as the corpus splitter (sort,
    per-class seeded shuffle, round-robin)."""
    labels = np.asarray(labels)
    if k < 2:
        raise InputError(f"k must be >= 2, got {k}")
    fold = np.full(labels.shape[0], -1, dtype=np.int64)
    for class_index, label in enumerate((0, 1)):
        rows = np.nonzero(labels == label)[0]
        if rows.size < k:
            raise InputError(
                f"class {label} has {rows.size} rows, fewer than k={k}")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
            entropy=seed & (2**64 - 1), spawn_key=(class_index,))))
        order = rng.permutation(rows.size)
        for position, index in enumerate(order):
            fold[rows[index]] = position % k
    return fold


def dataset_from_matrix(matrix: FeatureMatrix) -> Dataset:
    return Dataset(matrix.values, matrix.labels, matrix.feature_ids)


def resolve_tag(tag: str, feature_ids: tuple[str, ...]) -> tuple[list[str] | None, int | None]:
    """(explicit column list, top-k count); exactly one is non-None."""
    if tag in ("all", ""):
        return list(feature_ids), None
    if tag in _FAMILY_PREFIX:
        prefix = _FAMILY_PREFIX[tag]
        cols = [fid for fid in feature_ids if fid.startswith(prefix)]
        if not cols:
            raise InputError(f"no features match family tag {tag!r}")
        return cols, None
    if tag.startswith("topk:"):
        try:
            k = int(tag.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad top-k tag: {tag!r}") from None
        if not 1 <= k <= len(feature_ids):
            raise InputError(f"top-k {k} outside [1, {len(feature_ids)}]")
        return None, k
    raise InputError(f"unknown feature tag: {tag!r}")


def fit_fold(data: Dataset, train_rows: np.ndarray, spec: ModelSpec,
             seed: int, feature_ids: list[str] | None = None) -> TrainedModel:
    """Train on a row subset; the single code path every experiment uses,
    so the no-leakage guarantee is checkable in one place."""
    train_data = data.rows(train_rows)
    if feature_ids is not None:
        train_data = train_data.subset(feature_ids)
    return ml.train(spec, train_data, seed)


def rank_features(data: Dataset, seed: int) -> ml.ImportanceRanking:
    """Gain ranking from a boosted-tree model fitted on ``data``."""
    booster = ml.train(ModelSpec(ml.GBT), data, seed)
    return ml.feature_importance(booster)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class EvalReport:
    experiment: str
    classifier: str
    feature_tag: str
    selection_k: int | None
    folds: int
    seed: int
    fold_f1: tuple[float, ...]
    fold_auc: tuple[float, ...]
    confusions: tuple[dict, ...]
    provenance: dict = field(default_factory=dict)
    roc: tuple[tuple[float, float], ...] = ()

    @property
    def mean_f1(self) -> float:
        return float(np.mean(self.fold_f1))

    @property
    def mean_auc(self) -> float:
        return float(np.mean(self.fold_auc))

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "classifier": self.classifier,
            "feature_tag": self.feature_tag,
            "selection_k": self.selection_k,
            "folds": self.folds,
            "seed": self.seed,
            "positive_class": "generated",
            "fold_f1": list(self.fold_f1),
            "mean_f1": self.mean_f1,
            "fold_auc": list(self.fold_auc),
            "mean_auc": self.mean_auc,
            "confusions": list(self.confusions),
            "provenance": self.provenance,
        }

    def to_text(self) -> str:
        lines = [
            f"experiment : {self.experiment}",
            f"classifier : {self.classifier}",
            f"features   : {self.feature_tag}"
            + (f" (k={self.selection_k})" if self.selection_k else ""),
            f"positive   : generated",
            f"{'fold':>4}  {'F1':>8}  {'AUC':>8}",
        ]
        for i, (f1, auc) in enumerate(zip(self.fold_f1, self.fold_auc)):
            lines.append(f"{i:>4}  {f1:>8.4f}  {auc:>8.4f}")
        lines.append(f"{'mean':>4}  {self.mean_f1:>8.4f}  {self.mean_auc:>8.4f}")
        return "\n".join(lines) + "\n"

    def write_roc_csv(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write("fpr,tpr\n")
            for x, y in self.roc:
                fh.write(f"{x:.9g},{y:.9g}\n")


# ---------------------------------------------------------------------------
# experiment runners


def cross_validate(
    data: Dataset,
    spec: ModelSpec,
    feature_tag: str = "all",
    k: int = 5,
    seed: int = 0,
    fold_rankings: dict[int, ml.ImportanceRanking] | None = None,
    leaky_selection: bool = False,
    provenance: dict | None = None,
) -> EvalReport:
    """Stratified k-fold CV. Scaling and top-k selection are fitted inside
    each training fold; ``fold_rankings`` lets sweeps reuse per-fold
    boosted-tree rankings across classifiers."""
    columns, top_k = resolve_tag(feature_tag, data.feature_ids)
    fold_of = stratified_folds(data.y, k, seed)
    leaky_ranking = None
    if top_k is not None and leaky_selection:
        leaky_ranking = rank_features(data, seed)

    fold_f1, fold_auc, confusions = [], [], []
    oof_scores = np.zeros(data.n_rows)
    for fold in range(k):
        test_rows = np.nonzero(fold_of == fold)[0]
        train_rows = np.nonzero(fold_of != fold)[0]
        if top_k is not None:
            if leaky_ranking is not None:
                ranking = leaky_ranking
            elif fold_rankings is not None and fold in fold_rankings:
                ranking = fold_rankings[fold]
            else:
                ranking = rank_features(data.rows(train_rows), seed)
            if top_k > len(ranking):
                raise InputError(
                    f"fold {fold}: ranking has {len(ranking)} features, "
                    f"cannot select top {top_k}")
            cols = ranking.top(top_k)
        else:
            cols = columns
        try:
            model = fit_fold(data, train_rows, spec, seed, cols)
        except InputError as exc:
            raise InputError(f"fold {fold}: {exc}") from exc
        test_data = data.rows(test_rows).subset(cols)
        scores = ml.predict_scores(model, test_data)
        predicted = (scores > ml.score_threshold(spec.kind)).astype(np.int64)
        truth = data.y[test_rows]
        fold_f1.append(f1_score(predicted, truth))
        fold_auc.append(roc_auc(scores, truth))
        confusions.append(confusion_counts(predicted, truth))
        oof_scores[test_rows] = scores

    return EvalReport(
        experiment=f"cv-{spec.kind}-{feature_tag}-k{k}-seed{seed}",
        classifier=spec.kind,
        feature_tag=feature_tag,
        selection_k=top_k,
        folds=k,
        seed=seed,
        fold_f1=tuple(fold_f1),
        fold_auc=tuple(fold_auc),
        confusions=tuple(confusions),
        provenance=dict(provenance or {}),
        roc=tuple(roc_points(oof_scores, data.y)),
    )


def cross_dataset_eval(
    train_matrix: FeatureMatrix,
    test_matrices: list[FeatureMatrix],
    spec: ModelSpec,
    feature_tag: str = "all",
    seed: int = 0,
    provenance: dict | None = None,
) -> list[EvalReport]:
    """Train once on the full train matrix, evaluate on each test matrix.
    Scaler and any top-k selection come from the train matrix only."""
    for tm in test_matrices:
        if tm.registry_version != train_matrix.registry_version:
            raise InputError(
                f"registry version mismatch: train {train_matrix.registry_version!r}"
                f" vs test {tm.registry_version!r}")
        if len(tm.doc_ids) == 0:
            raise InputError("empty test corpus")
    data = dataset_from_matrix(train_matrix)
    columns, top_k = resolve_tag(feature_tag, data.feature_ids)
    if top_k is not None:
        ranking = rank_features(data, seed)
        if top_k > len(ranking):
            raise InputError(f"ranking has {len(ranking)} features, "
                             f"cannot select top {top_k}")
        columns = ranking.top(top_k)
    model = ml.train(spec, data.subset(columns), seed)

    reports = []
    for tm in test_matrices:
        test_data = dataset_from_matrix(tm).subset(columns)
        scores = ml.predict_scores(model, test_data)
        predicted = (scores > ml.score_threshold(spec.kind)).astype(np.int64)
        truth = test_data.y
        reports.append(EvalReport(
            experiment=f"xds-{spec.kind}-{feature_tag}-seed{seed}",
            classifier=spec.kind,
            feature_tag=feature_tag,
            selection_k=top_k,
            folds=1,
            seed=seed,
            fold_f1=(f1_score(predicted, truth),),
            fold_auc=(roc_auc(scores, truth),),
            confusions=(confusion_counts(predicted, truth),),
            provenance={**(provenance or {}),
                        "train_provider": train_matrix.provider_id,
                        "test_provider": tm.provider_id},
            roc=tuple(roc_points(scores, truth)),
        ))
    return reports


@dataclass(frozen=True)
class SweepTable:
    """Grid of cross-validated reports: classifiers x feature columns."""

    columns: tuple[str, ...]
    reports: dict[tuple[str, str], EvalReport]   # (classifier, column) -> report
    classifiers: tuple[str, ...]

    def mean_f1(self, classifier: str, column: str) -> float:
        return self.reports[(classifier, column)].mean_f1

    def to_text(self) -> str:
        width = max(12, *(len(c) + 2 for c in self.columns))
        head = "classifier".ljust(12) + "".join(c.rjust(width) for c in self.columns)
        lines = [head]
        for kind in self.classifiers:
            row = kind.ljust(12)
            for column in self.columns:
                row += f"{self.mean_f1(kind, column):.4f}".rjust(width)
            lines.append(row)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["classifier," + ",".join(self.columns)]
        for kind in self.classifiers:
            cells = [f"{self.mean_f1(kind, c):.6f}" for c in self.columns]
            lines.append(f"{kind}," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "classifiers": list(self.classifiers),
            "reports": {f"{kind}|{column}": report.to_dict()
                        for (kind, column), report in sorted(self.reports.items())},
        }


def selection_sweep(
    data: Dataset,
    specs: list[ModelSpec],
    ks: list[int],
    seed: int = 0,
    k_folds: int = 5,
    family_tags: tuple[str, ...] = ("sf", "lf", "all"),
    leaky_selection: bool = False,
    provenance: dict | None = None,
) -> SweepTable:
    """Cross-validated grid over classifiers x (family ablations + top-k
    selections). Per-fold rankings are computed once and shared."""
    for k in ks:
        if not 1 <= k <= len(data.feature_ids):
            raise InputError(f"top-k {k} outside [1, {len(data.feature_ids)}]")
    fold_of = stratified_folds(data.y, k_folds, seed)
    fold_rankings: dict[int, ml.ImportanceRanking] = {}
    if ks and not leaky_selection:
        for fold in range(k_folds):
            train_rows = np.nonzero(fold_of != fold)[0]
            fold_rankings[fold] = rank_features(data.rows(train_rows), seed)

    columns = list(family_tags) + [f"topk:{k}" for k in ks]
    reports = {}
    for spec in specs:
        for column in columns:
            reports[(spec.kind, column)] = cross_validate(
                data, spec, feature_tag=column, k=k_folds, seed=seed,
                fold_rankings=fold_rankings or None,
                leaky_selection=leaky_selection,
                provenance=provenance)
    return SweepTable(
        columns=tuple(columns),
        reports=reports,
        classifiers=tuple(spec.kind for spec in specs))


def write_report_json(report: EvalReport | SweepTable, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
