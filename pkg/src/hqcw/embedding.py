"""Skip-gram node embeddings with negative sampling, trained from walk corpora.

Walks are treated as sentences: every (center, context) pair within the
window is a positive example scored against negatives drawn from the
unigram^0.75 token distribution. Plain sequential SGD with a linearly
decaying learning rate; with a fixed seed the result is a pure function of
(corpus, params).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import NonFiniteLoss, ParseError

__all__ = [
    "build_pairs",
    "sgns_loss_and_grad",
    "SkipGramEmbedding",
    "save_embeddings",
    "load_embeddings",
    "save_training_log",
]

_FINAL_LR_FRACTION = 1e-4


def build_pairs(corpus: list[list[int]], window: int) -> np.ndarray:
    """All (center, context) pairs with |position offset| <= window.

    Pairs are truncated at walk boundaries; a walk of length T contributes
    up to T*(T-1) ordered pairs. Returns an (n_pairs, 2) int array.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if not corpus:
        raise ValueError("corpus is empty")
    pairs = []
    for walk in corpus:
        length = len(walk)
        for i in range(length):
            lo = max(0, i - window)
            hi = min(length, i + window + 1)
            for j in range(lo, hi):
                if j != i:
                    pairs.append((walk[i], walk[j]))
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def _stacked_loss_and_grad(center, out_rows):
    """Core of the objective for one example.

    ``out_rows`` stacks the context vector (row 0) over the negative vectors.
    Returns (loss, score gradients g, grad_center); the gradient for
    out_rows[i] is g[i] * center.
    """
    # non-finite parameters surface as a non-finite loss, handled by the caller
    with np.errstate(invalid="ignore", over="ignore"):
        scores = out_rows @ center
        flipped = scores.copy()
        flipped[0] = -flipped[0]
        loss = float(np.logaddexp(0.0, flipped).sum())
        g = expit(scores)
        g[0] -= 1.0
        grad_center = out_rows.T @ g
    return loss, g, grad_center


def sgns_loss_and_grad(center, context, negatives):
    """Loss and analytic gradients for one (center, context, negatives) example.

    loss = -log sigma(u.c) - sum_n log sigma(-u.n), with u the center vector,
    c the context vector and n the rows of ``negatives``. Returns
    (loss, grad_center, grad_context, grad_negatives).
    """
    center = np.asarray(center, dtype=float)
    context = np.asarray(context, dtype=float)
    negatives = np.asarray(negatives, dtype=float).reshape(-1, center.shape[0])
    out_rows = np.vstack([context[None, :], negatives])
    loss, g, grad_center = _stacked_loss_and_grad(center, out_rows)
    grad_out = np.outer(g, center)
    return loss, grad_center, grad_out[0], grad_out[1:]


class SkipGramEmbedding(BaseEstimator):
    """Skip-gram with negative sampling over node-id corpora.

    After ``fit`` the input vectors are available as ``embedding_`` (one row
    per node id 0..max_id; context vectors are not emitted) and the per-epoch
    mean losses as ``history_``.
    """

    def __init__(
        self,
        dimension: int = 32,
        window: int = 5,
        negatives_per_pair: int = 5,
        epochs: int = 5,
        learning_rate: float = 0.025,
        seed: int = 0,
        deterministic_mode: bool = True,
    ):
        self.dimension = dimension
        self.window = window
        self.negatives_per_pair = negatives_per_pair
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.deterministic_mode = deterministic_mode

    def fit(self, corpus: list[list[int]], y=None):
        self._check_params()
        d = self.dimension
        pairs = build_pairs(corpus, self.window)
        n_nodes = int(max(max(walk) for walk in corpus if walk)) + 1
        counts = np.zeros(n_nodes)
        for walk in corpus:
            counts += np.bincount(walk, minlength=n_nodes)

        noise = counts**0.75
        noise_cdf = np.cumsum(noise / noise.sum())
        rng = np.random.default_rng(self.seed)
        bound = 0.5 / d
        vec_in = rng.uniform(-bound, bound, size=(n_nodes, d))
        vec_out = rng.uniform(-bound, bound, size=(n_nodes, d))

        n_pairs = len(pairs)
        n_neg = self.negatives_per_pair
        total_updates = self.epochs * n_pairs
        lr0 = self.learning_rate
        lr_slope = (1.0 - _FINAL_LR_FRACTION) / total_updates
        update = 0
        history = []
        rows = np.empty(n_neg + 1, dtype=np.intp)
        # overflow in a diverging run is reported via NonFiniteLoss, not warnings
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(self.epochs):
                order = rng.permutation(n_pairs)
                negatives = np.searchsorted(
                    noise_cdf, rng.random((n_pairs, n_neg)), side="right"
                )
                epoch_loss = 0.0
                for pos in range(n_pairs):
                    center, context = pairs[order[pos]]
                    rows[0] = context
                    rows[1:] = negatives[pos]
                    lr = lr0 * (1.0 - lr_slope * update)
                    update += 1
                    center_vec = vec_in[center]
                    loss, g, grad_center = _stacked_loss_and_grad(
                        center_vec, vec_out[rows]
                    )
                    if not math.isfinite(loss):
                        raise NonFiniteLoss(f"loss diverged at update {update}")
                    epoch_loss += loss
                    # all gradients are taken at the pre-update parameters
                    grad_out = np.outer(lr * g, center_vec)
                    for m in range(n_neg + 1):
                        vec_out[rows[m]] -= grad_out[m]
                    vec_in[center] -= lr * grad_center
                history.append(epoch_loss / n_pairs)

        self.embedding_ = vec_in
        self.history_ = history
        self.n_nodes_ = n_nodes
        return self

    def transform(self, nodes=None) -> np.ndarray:
        """Embedding rows for the given node ids (all nodes when None)."""
        if not hasattr(self, "embedding_"):
            raise NotFittedError("call fit before transform")
        if nodes is None:
            return self.embedding_
        return self.embedding_[np.asarray(nodes, dtype=int)]

    def fit_transform(self, corpus, y=None) -> np.ndarray:
        return self.fit(corpus).transform()

    def _check_params(self):
        if self.dimension < 1 or self.window < 1:
            raise ValueError("dimension and window must be >= 1")
        if self.negatives_per_pair < 1 or self.epochs < 1:
            raise ValueError("negatives_per_pair and epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


# --- CSV persistence: header 'node,e0,...,e{d-1}', 17 significant digits ------


def save_embeddings(embedding: np.ndarray, path, header_lines=()) -> None:
    embedding = np.asarray(embedding, dtype=float)
    d = embedding.shape[1]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("node," + ",".join(f"e{i}" for i in range(d)) + "\n")
        for node, row in enumerate(embedding):
            fh.write(f"{node}," + ",".join(f"{x:.17g}" for x in row) + "\n")


def load_embeddings(path) -> np.ndarray:
    rows: dict[int, list[float]] = {}
    d = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if d is None:
                if parts[0] != "node":
                    raise ParseError(path, lineno, "missing 'node,e0,...' header row")
                d = len(parts) - 1
                continue
            if len(parts) != d + 1:
                raise ParseError(
                    path, lineno, f"expected {d + 1} columns, got {len(parts)}"
                )
            try:
                rows[int(parts[0])] = [float(x) for x in parts[1:]]
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
    if d is None or not rows:
        raise ParseError(path, 0, "no embedding rows found")
    if sorted(rows) != list(range(len(rows))):
        raise ParseError(path, 0, "node ids must cover 0..N-1 exactly once")
    return np.array([rows[i] for i in range(len(rows))])


def save_training_log(history: list[float], path, header_lines=()) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("epoch,mean_loss\n")
        for epoch, loss in enumerate(history):
            fh.write(f"{epoch},{loss:.17g}\n")
