"""Shared ML plumbing: datasets, feature scaling, the trained-model
container and its versioned JSON persistence.

Feature alignment is name-based everywhere: a model carries the
feature_ids it was trained on and prediction reorders incoming columns to
match, so column-projected datasets (top-k selections) stay safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InputError

MODEL_FORMAT_VERSION = "1"

LDA = "lda"
LOGREG = "logreg"
SVC = "linear_svc"
GBT = "gbt"
EXTRA_TREES = "extra_trees"
MODEL_KINDS = (LDA, LOGREG, SVC, GBT, EXTRA_TREES)

# kinds whose training standardizes features (trees consume raw values)
SCALED_KINDS = (LDA, LOGREG, SVC)

_DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    LDA: {"shrinkage": 1e-4},
    LOGREG: {"l2": 1.0, "max_iter": 500, "tol": 1e-6},
    SVC: {"l2": 1.0, "epochs": 200},
    GBT: {"rounds": 100, "learning_rate": 0.3, "max_depth": 6,
          "reg_lambda": 1.0, "min_child_weight": 1.0},
    EXTRA_TREES: {"n_trees": 100, "min_samples_split": 2},
}


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_ids: tuple[str, ...]

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_ids", tuple(self.feature_ids))
        if X.ndim != 2:
            raise InputError(f"dataset matrix must be 2-D, got shape {X.shape}")
        if len(self.feature_ids) != X.shape[1]:
            raise InputError(
                f"{len(self.feature_ids)} feature ids for {X.shape[1]} columns")
        if y.shape != (X.shape[0],):
            raise InputError("labels must align with matrix rows")
        if not np.all(np.isfinite(X)):
            raise InputError("dataset contains non-finite cells")
        if not np.all((y == 0) | (y == 1)):
            raise InputError("labels must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    def require_trainable(self) -> None:
        if self.n_rows < 2 or len(np.unique(self.y)) < 2:
            raise InputError("training requires >= 2 rows with both classes")

    def subset(self, feature_ids: list[str]) -> "Dataset":
        index = {fid: i for i, fid in enumerate(self.feature_ids)}
        missing = [fid for fid in feature_ids if fid not in index]
        if missing:
            raise InputError(f"features not in dataset: {missing}")
        cols = [index[fid] for fid in feature_ids]
        return Dataset(self.X[:, cols], self.y, tuple(feature_ids))

    def rows(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.X[indices], self.y[indices], self.feature_ids)


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InputError(f"unknown model kind: {self.kind!r}")
        merged = dict(_DEFAULT_HYPERPARAMETERS[self.kind])
        unknown = set(self.hyperparameters) - set(merged)
        if unknown:
            raise InputError(f"unknown hyperparameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.hyperparameters)
        for name, value in merged.items():
            if not (isinstance(value, (int, float)) and value > 0):
                raise InputError(f"{self.kind}.{name} must be positive, got {value!r}")
        object.__setattr__(self, "hyperparameters", merged)


@dataclass(frozen=True)
class ScalerStats:
    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray    # bool mask of zero-variance columns

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(),
                "constant": self.constant.astype(int).tolist()}

    @staticmethod
    def from_dict(d: dict) -> "ScalerStats":
        return ScalerStats(
            mean=np.asarray(d["mean"], dtype=np.float64),
            std=np.asarray(d["std"], dtype=np.float64),
            constant=np.asarray(d["constant"], dtype=bool))


def standardize_fit(data: Dataset) -> ScalerStats:
    """Column-wise mean/std (population) from training rows only."""
    if data.n_rows == 0:
        raise InputError("cannot fit a scaler on an empty dataset")
    mean = data.X.mean(axis=0)
    std = data.X.std(axis=0)
    return ScalerStats(mean=mean, std=std, constant=std == 0.0)


def standardize_apply(stats: ScalerStats, X: np.ndarray) -> np.ndarray:
    """Z-score using train statistics; constant train columns map to 0."""
    safe = np.where(stats.constant, 1.0, stats.std)
    out = (np.asarray(X, dtype=np.float64) - stats.mean) / safe
    out[:, stats.constant] = 0.0
    return out


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    feature_ids: tuple[str, ...]
    scaler: ScalerStats | None
    hyperparameters: dict
    params: dict                 # kind-specific learned parameters
    metadata: dict               # seed, rounds run, final training loss, ...

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": self.kind,
            "feature_ids": list(self.feature_ids),
            "scaler": self.scaler.to_dict() if self.scaler is not None else None,
            "hyperparameters": self.hyperparameters,
            "params": _params_to_json(self.params),
            "metadata": self.metadata,
        }


def _params_to_json(params: dict) -> dict:
    out = {}
    for key, value in params.items():
        if isinstance(value, np.ndarray):
            out[key] = value.tolist()
        else:
            out[key] = value
    return out


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(model.to_dict(), sort_keys=True, indent=None,
                   separators=(",", ":")) + "\n",
        encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    path = Path(path)
    if not path.exists():
        raise InputError(f"model file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(
            f"corrupted model file {path}: {exc.msg} at byte {exc.pos}") from None
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise InputError(
            f"model format version {version!r} unsupported "
            f"(expected {MODEL_FORMAT_VERSION!r})")
    kind = payload["kind"]
    if kind not in MODEL_KINDS:
        raise InputError(f"model file has unknown kind {kind!r}")
    params = _params_from_json(kind, payload["params"])
    scaler = (ScalerStats.from_dict(payload["scaler"])
              if payload.get("scaler") is not None else None)
    return TrainedModel(
        kind=kind,
        feature_ids=tuple(payload["feature_ids"]),
        scaler=scaler,
        hyperparameters=payload["hyperparameters"],
        params=params,
        metadata=payload.get("metadata", {}),
    )


def _params_from_json(kind: str, params: dict) -> dict:
    out = dict(params)
    for key in ("weights", "mean_0", "mean_1"):
        if key in out:
            out[key] = np.asarray(out[key], dtype=np.float64)
    return out


def align_columns(model: TrainedModel, data: Dataset) -> np.ndarray:
    """Reorder dataset columns to the model's feature order; the feature
    name sets must match exactly."""
    if tuple(data.feature_ids) == model.feature_ids:
        return data.X
    index = {fid: i for i, fid in enumerate(data.feature_ids)}
    missing = [fid for fid in model.feature_ids if fid not in index]
    extra = set(index) - set(model.feature_ids)
    if missing or extra:
        raise InputError(
            f"feature mismatch: missing {missing[:5]}, unexpected {sorted(extra)[:5]}")
    cols = [index[fid] for fid in model.feature_ids]
    return data.X[:, cols]


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=np.float64)))


def log_loss(y: np.ndarray, raw_scores: np.ndarray) -> float:
    """Mean logistic loss of raw (pre-sigmoid) scores against 0/1 labels."""
    z = np.asarray(raw_scores, dtype=np.float64)
    signed = np.where(y == 1, z, -z)
    return float(np.mean(np.logaddexp(0.0, -signed)))
