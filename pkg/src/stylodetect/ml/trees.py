"""Tree ensembles: second-order gradient-boosted trees and extremely
randomized trees.

Boosted trees use exact greedy splits on the logistic objective: split
gain is GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda), the leaf
weight is -G/(H+lambda) (learning rate folded in), children must carry at
least min_child_weight hessian mass, and a node splits only on strictly
positive gain. Ties break toward the lowest feature index, then the
lowest threshold. Extra trees draw one uniform threshold per candidate
feature (sqrt(d) candidates per node, scanning past constants), score
candidates by Gini gain and grow to purity.

Trees serialize as parallel per-node arrays carrying the feature id (None
for leaves), threshold, child indices, leaf value and split gain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .base import log_loss, sigmoid


def _new_tree() -> dict:
    return {"feature": [], "threshold": [], "left": [], "right": [],
            "value": [], "gain": []}


def _add_node(tree: dict) -> int:
    idx = len(tree["feature"])
    tree["feature"].append(None)
    tree["threshold"].append(0.0)
    tree["left"].append(-1)
    tree["right"].append(-1)
    tree["value"].append(0.0)
    tree["gain"].append(0.0)
    return idx


# ---------------------------------------------------------------------------
# gradient boosting


def _best_split(Xs, gs, hs, lam, min_child_weight):
    """Best (feature, threshold, gain) over all exact splits, or None."""
    m, d = Xs.shape
    if m < 2:
        return None
    order = np.argsort(Xs, axis=0, kind="stable")
    xs = np.take_along_axis(Xs, order, axis=0)
    gl = np.cumsum(gs[order], axis=0)[:-1]
    hl = np.cumsum(hs[order], axis=0)[:-1]
    g_total = float(gs.sum())
    h_total = float(hs.sum())
    gr = g_total - gl
    hr = h_total - hl
    parent = g_total * g_total / (h_total + lam)
    gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent
    valid = (xs[1:] > xs[:-1]) & (hl >= min_child_weight) & (hr >= min_child_weight)
    gain = np.where(valid, gain, -np.inf)
    pos = np.argmax(gain, axis=0)                    # first max per feature
    per_feature = gain[pos, np.arange(d)]
    feature = int(np.argmax(per_feature))            # first max across features
    best_gain = float(per_feature[feature])
    if not np.isfinite(best_gain) or best_gain <= 0.0:
        return None
    i = int(pos[feature])
    lo = float(xs[i, feature])
    hi = float(xs[i + 1, feature])
    threshold = (lo + hi) / 2.0
    if not (lo < threshold):                         # adjacent-float guard
        threshold = hi
    return feature, threshold, best_gain


def _build_gbt_tree(X, g, h, max_depth, lam, min_child_weight, learning_rate):
    tree = _new_tree()
    contribution = np.zeros(X.shape[0])

    def build(rows: np.ndarray, depth: int) -> int:
        idx = _add_node(tree)
        g_sum = float(g[rows].sum())
        h_sum = float(h[rows].sum())
        split = None
        if depth < max_depth and rows.size >= 2:
            split = _best_split(X[rows], g[rows], h[rows], lam, min_child_weight)
        if split is None:
            value = -g_sum / (h_sum + lam) * learning_rate
            tree["value"][idx] = value
            contribution[rows] = value
            return idx
        feature, threshold, gain = split
        mask = X[rows, feature] < threshold
        tree["feature"][idx] = feature
        tree["threshold"][idx] = threshold
        tree["gain"][idx] = gain
        tree["left"][idx] = build(rows[mask], depth + 1)
        tree["right"][idx] = build(rows[~mask], depth + 1)
        return idx

    build(np.arange(X.shape[0]), 0)
    return tree, contribution


def train_gbt(X: np.ndarray, y: np.ndarray, hp: dict,
              feature_ids: tuple[str, ...]) -> tuple[dict, dict]:
    rounds = int(hp["rounds"])
    learning_rate = float(hp["learning_rate"])
    max_depth = int(hp["max_depth"])
    lam = float(hp["reg_lambda"])
    min_child_weight = float(hp["min_child_weight"])
    raw = np.zeros(X.shape[0])
    trees = []
    losses = [log_loss(y, raw)]
    for round_index in range(rounds):
        p = sigmoid(raw)
        g = p - y
        h = p * (1.0 - p)
        tree, contribution = _build_gbt_tree(
            X, g, h, max_depth, lam, min_child_weight, learning_rate)
        raw += contribution
        loss = log_loss(y, raw)
        if not np.isfinite(loss):
            raise InputError(f"non-finite boosting loss at round {round_index}")
        losses.append(loss)
        trees.append(_externalize(tree, feature_ids))
    params = {"trees": trees}
    meta = {"rounds_run": rounds, "final_loss": losses[-1],
            "loss_path": losses}
    return params, meta


def _externalize(tree: dict, feature_ids: tuple[str, ...]) -> dict:
    return {
        "feature": [feature_ids[f] if f is not None else None
                    for f in tree["feature"]],
        "threshold": [float(t) for t in tree["threshold"]],
        "left": tree["left"],
        "right": tree["right"],
        "value": [float(v) for v in tree["value"]],
        "gain": [float(v) for v in tree["gain"]],
    }


# ---------------------------------------------------------------------------
# extra trees


def _gini(pos: float, total: float) -> float:
    if total == 0:
        return 0.0
    q = pos / total
    return 2.0 * q * (1.0 - q)


def _build_extra_tree(X, y, rng, n_candidates, min_samples_split):
    n, d = X.shape
    tree = _new_tree()
    contribution = np.zeros(n)

    def build(rows: np.ndarray) -> int:
        idx = _add_node(tree)
        ysub = y[rows]
        m = rows.size
        pos = int(ysub.sum())
        if pos == 0 or pos == m or m < min_samples_split:
            value = pos / m
            tree["value"][idx] = value
            contribution[rows] = value
            return idx
        # scan a fresh permutation until n_candidates non-constant features
        candidates: list[tuple[int, float]] = []
        for feature in rng.permutation(d):
            col = X[rows, feature]
            lo = float(col.min())
            hi = float(col.max())
            if lo < hi:
                candidates.append((int(feature), rng.uniform(lo, hi)))
                if len(candidates) == n_candidates:
                    break
        if not candidates:                 # node rows identical feature-wise
            value = pos / m
            tree["value"][idx] = value
            contribution[rows] = value
            return idx
        cols = X[np.ix_(rows, [f for f, _ in candidates])]
        thresholds = np.array([t for _, t in candidates])
        left_mask = cols <= thresholds
        left_n = left_mask.sum(axis=0)
        left_pos = (left_mask & (ysub == 1)[:, None]).sum(axis=0)
        parent = _gini(pos, m)
        gains = np.array([
            parent - (ln * _gini(lp, ln) + (m - ln) * _gini(pos - lp, m - ln)) / m
            for ln, lp in zip(left_n, left_pos)
        ])
        best = int(np.argmax(gains))
        feature, threshold = candidates[best]
        mask = left_mask[:, best]
        tree["feature"][idx] = feature
        tree["threshold"][idx] = threshold
        tree["left"][idx] = build(rows[mask])
        tree["right"][idx] = build(rows[~mask])
        return idx

    build(np.arange(n))
    return tree, contribution


def train_extra_trees(X: np.ndarray, y: np.ndarray, hp: dict, seed: int,
                      feature_ids: tuple[str, ...]) -> tuple[dict, dict]:
    n_trees = int(hp["n_trees"])
    min_samples_split = int(hp["min_samples_split"])
    d = X.shape[1]
    n_candidates = max(1, int(np.sqrt(d)))
    trees = []
    votes = np.zeros(X.shape[0])
    for tree_index in range(n_trees):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
            entropy=seed & (2**64 - 1), spawn_key=(4, tree_index))))
        tree, contribution = _build_extra_tree(
            X, y, rng, n_candidates, min_samples_split)
        votes += contribution
        trees.append(_externalize(tree, feature_ids))
    votes /= n_trees
    params = {"trees": trees}
    meta = {"trees_grown": n_trees,
            "final_loss": float(np.mean((votes - y) ** 2))}
    return params, meta


# ---------------------------------------------------------------------------
# prediction and importance


def predict_trees(trees: list[dict], X: np.ndarray,
                  feature_ids: tuple[str, ...], left_closed: bool) -> np.ndarray:
    """Sum of per-tree leaf values for each row. ``left_closed`` selects the
    split predicate: x <= t (extra trees) vs x < t (boosted trees)."""
    index = {fid: i for i, fid in enumerate(feature_ids)}
    n = X.shape[0]
    total = np.zeros(n)
    row_ids = np.arange(n)
    for tree in trees:
        feature = np.array([index[f] if f is not None else -1
                            for f in tree["feature"]], dtype=np.int64)
        threshold = np.asarray(tree["threshold"], dtype=np.float64)
        left = np.asarray(tree["left"], dtype=np.int64)
        right = np.asarray(tree["right"], dtype=np.int64)
        value = np.asarray(tree["value"], dtype=np.float64)
        node = np.zeros(n, dtype=np.int64)
        active = feature[node] >= 0
        while np.any(active):
            rows = row_ids[active]
            nd = node[rows]
            x = X[rows, feature[nd]]
            goes_left = x <= threshold[nd] if left_closed else x < threshold[nd]
            node[rows] = np.where(goes_left, left[nd], right[nd])
            active = feature[node] >= 0
        total += value[node]
    return total


@dataclass(frozen=True)
class ImportanceRanking:
    """(feature_id, total split gain) pairs, best first; ties break on the
    feature id."""
    pairs: tuple[tuple[str, float], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def top(self, k: int) -> list[str]:
        return [fid for fid, _ in self.pairs[:k]]


def gain_importance(trees: list[dict]) -> ImportanceRanking:
    totals: dict[str, float] = {}
    for tree in trees:
        for fid, gain in zip(tree["feature"], tree["gain"]):
            if fid is not None:
                totals[fid] = totals.get(fid, 0.0) + gain
    if not totals:
        raise InputError("model has no splits; importance ranking is empty")
    pairs = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return ImportanceRanking(pairs=tuple(pairs))
