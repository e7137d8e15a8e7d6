"""The three linear classifiers, implemented directly.

All three train on standardized features (the scaler lives on the
TrainedModel). LDA is closed form; logistic regression runs gradient
descent with a backtracking (Armijo) line search; the linear SVC runs
epoch-ordered primal subgradient descent on the hinge objective with the
1/(lambda*t) step schedule and seeded per-epoch shuffling.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from .base import log_loss, sigmoid


def train_lda(X: np.ndarray, y: np.ndarray, hp: dict) -> tuple[dict, dict]:
    """Class means + pooled covariance shrunk toward scaled identity."""
    gamma = float(hp["shrinkage"])
    n, d = X.shape
    X0, X1 = X[y == 0], X[y == 1]
    mu0 = X0.mean(axis=0)
    mu1 = X1.mean(axis=0)
    centered = np.vstack([X0 - mu0, X1 - mu1])
    pooled = centered.T @ centered / max(n - 2, 1)
    scale = np.trace(pooled) / d
    if scale == 0.0:
        scale = 1.0          # degenerate: identical rows per class
    shrunk = (1.0 - gamma) * pooled + gamma * scale * np.eye(d)
    try:
        weights = np.linalg.solve(shrunk, mu1 - mu0)
    except np.linalg.LinAlgError:
        weights = np.linalg.lstsq(shrunk, mu1 - mu0, rcond=None)[0]
    prior = np.log(X1.shape[0] / X0.shape[0])
    intercept = float(-0.5 * (mu0 + mu1) @ weights + prior)
    raw = X @ weights + intercept
    params = {"weights": weights, "intercept": intercept}
    meta = {"final_loss": log_loss(y, raw)}
    return params, meta


def _logreg_objective(X, signed_y, w, b, l2):
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, -signed_y * z)))
    return loss + 0.5 * l2 * float(w @ w)


def train_logreg(X: np.ndarray, y: np.ndarray, hp: dict) -> tuple[dict, dict]:
    """L2-regularized logistic loss (mean loss + l2/2 * |w|^2, intercept
    unpenalized) minimized by gradient descent with backtracking."""
    l2 = float(hp["l2"])
    max_iter = int(hp["max_iter"])
    tol = float(hp["tol"])
    n, d = X.shape
    signed_y = np.where(y == 1, 1.0, -1.0)
    w = np.zeros(d)
    b = 0.0
    step = 1.0
    objective = _logreg_objective(X, signed_y, w, b, l2)
    losses = [objective]
    grad_norm = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p = sigmoid(X @ w + b)
        residual = p - y
        gw = X.T @ residual / n + l2 * w
        gb = float(residual.mean())
        grad_norm = float(np.sqrt(gw @ gw + gb * gb))
        if grad_norm < tol:
            iterations -= 1
            break
        sq = grad_norm ** 2
        step = min(step * 2.0, 1e6)
        while step > 1e-20:
            candidate = _logreg_objective(X, signed_y, w - step * gw,
                                          b - step * gb, l2)
            if candidate <= objective - 1e-4 * step * sq:
                break
            step *= 0.5
        w = w - step * gw
        b = b - step * gb
        objective = _logreg_objective(X, signed_y, w, b, l2)
        losses.append(objective)
    params = {"weights": w, "intercept": b}
    meta = {
        "iterations": iterations,
        "gradient_norm": grad_norm,
        "final_loss": objective,
        "loss_path": [float(v) for v in losses],
    }
    return params, meta


def train_svc(X: np.ndarray, y: np.ndarray, hp: dict, seed: int) -> tuple[dict, dict]:
    """Primal hinge + L2 subgradient descent (Pegasos-style schedule)."""
    l2 = float(hp["l2"])
    epochs = int(hp["epochs"])
    n, d = X.shape
    signed_y = np.where(y == 1, 1.0, -1.0)
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed & (2**64 - 1), spawn_key=(3,))))
    w = np.zeros(d)
    b = 0.0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (l2 * t)
            margin = signed_y[i] * (X[i] @ w + b)
            w *= 1.0 - eta * l2
            if margin < 1.0:
                w += eta * signed_y[i] * X[i]
                b += eta * signed_y[i]
    margins = signed_y * (X @ w + b)
    hinge = float(np.mean(np.maximum(0.0, 1.0 - margins)))
    objective = 0.5 * l2 * float(w @ w) + hinge
    if not np.isfinite(objective):
        raise InputError(f"svc training diverged after {t} updates")
    params = {"weights": w, "intercept": b}
    meta = {"updates": t, "final_loss": objective}
    return params, meta
