"""Five classical classifiers with a uniform train/predict surface.

Scores are class-"generated" affinities: probabilities for LDA, logistic
regression and boosted trees, vote fractions for extra trees, and raw
signed margins for the linear SVC (AUC is rank-based, so margins need no
calibration). Label thresholds: 0.5 for probabilities and votes, 0 for
margins.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from .base import (EXTRA_TREES, GBT, LDA, LOGREG, MODEL_KINDS, SCALED_KINDS,
                   SVC, Dataset, ModelSpec, ScalerStats, TrainedModel,
                   align_columns, load_model, log_loss, save_model, sigmoid,
                   standardize_apply, standardize_fit)
from .linear import train_lda, train_logreg, train_svc
from .trees import (ImportanceRanking, gain_importance, predict_trees,
                    train_extra_trees, train_gbt)

__all__ = [
    "Dataset", "ModelSpec", "TrainedModel", "ScalerStats", "ImportanceRanking",
    "MODEL_KINDS", "SCALED_KINDS", "LDA", "LOGREG", "SVC", "GBT", "EXTRA_TREES",
    "standardize_fit", "standardize_apply", "train", "predict_scores",
    "predict_labels", "score_threshold", "feature_importance", "select_top_k",
    "save_model", "load_model", "log_loss", "sigmoid",
]


def train(spec: ModelSpec, data: Dataset, seed: int) -> TrainedModel:
    """Fit one classifier; every stochastic choice is keyed by ``seed``."""
    data.require_trainable()
    hp = spec.hyperparameters
    if spec.kind in SCALED_KINDS:
        scaler = standardize_fit(data)
        X = standardize_apply(scaler, data.X)
    else:
        scaler = None
        X = data.X
    y = data.y
    if spec.kind == LDA:
        params, meta = train_lda(X, y, hp)
    elif spec.kind == LOGREG:
        params, meta = train_logreg(X, y, hp)
    elif spec.kind == SVC:
        params, meta = train_svc(X, y, hp, seed)
    elif spec.kind == GBT:
        params, meta = train_gbt(X, y, hp, data.feature_ids)
    else:
        params, meta = train_extra_trees(X, y, hp, seed, data.feature_ids)
    meta["seed"] = int(seed)
    meta["standardized"] = scaler is not None
    return TrainedModel(
        kind=spec.kind, feature_ids=data.feature_ids, scaler=scaler,
        hyperparameters=hp, params=params, metadata=meta)


def predict_scores(model: TrainedModel, data: Dataset) -> np.ndarray:
    """Per-row score, higher means more likely generated."""
    X = align_columns(model, data)
    if model.scaler is not None:
        X = standardize_apply(model.scaler, X)
    if model.kind in (LDA, LOGREG):
        return sigmoid(X @ model.params["weights"] + model.params["intercept"])
    if model.kind == SVC:
        return X @ model.params["weights"] + model.params["intercept"]
    if model.kind == GBT:
        raw = predict_trees(model.params["trees"], X, model.feature_ids,
                            left_closed=False)
        return sigmoid(raw)
    votes = predict_trees(model.params["trees"], X, model.feature_ids,
                          left_closed=True)
    return votes / len(model.params["trees"])


def score_threshold(kind: str) -> float:
    """Decision threshold on the score scale of ``kind``."""
    return 0.0 if kind == SVC else 0.5


def predict_labels(model: TrainedModel, data: Dataset) -> np.ndarray:
    scores = predict_scores(model, data)
    return (scores > score_threshold(model.kind)).astype(np.int64)


def feature_importance(model: TrainedModel) -> ImportanceRanking:
    """Gain-based ranking from a boosted-tree model."""
    if model.kind != GBT:
        raise InputError(f"importance requires a gbt model, got {model.kind!r}")
    return gain_importance(model.params["trees"])


def select_top_k(ranking: ImportanceRanking, k: int, data: Dataset) -> Dataset:
    """Dataset restricted to the k best-ranked features, in ranking order."""
    if k <= 0:
        raise InputError(f"k must be positive, got {k}")
    if k > len(ranking):
        raise InputError(
            f"k={k} exceeds the {len(ranking)} ranked features")
    return data.subset(ranking.top(k))
