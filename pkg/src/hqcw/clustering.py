"""K-means clustering with restarts and exact adjusted Rand index scoring."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import DegenerateInput, LengthMismatch
from .seeding import ROLE_CLUSTER, rng_for

__all__ = [
    "ClusteringResult",
    "kmeans_best_of",
    "KMeansBestOf",
    "adjusted_rand_index",
]

_CONVERGENCE_TOL = 1e-8
_MAX_ITER = 300


@dataclass
class ClusteringResult:
    labels: np.ndarray
    inertia: float
    restart_index: int
    centers: np.ndarray


def _squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _init_centers(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-weighted seeding: each next center drawn proportional to D^2."""
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        cdf = np.cumsum(d2)
        pick = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        centers[i] = points[min(pick, n - 1)]
        d2 = np.minimum(d2, ((points - centers[i]) ** 2).sum(axis=1))
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray):
    """Lloyd iteration until centroid movement < 1e-8 or 300 iterations.

    Returns (labels, centers, inertia, per-iteration inertia history).
    """
    centers = centers.copy()
    history = []
    for _ in range(_MAX_ITER):
        d2 = _squared_distances(points, centers)
        labels = d2.argmin(axis=1)
        assigned = d2[np.arange(len(points)), labels]
        history.append(float(assigned.sum()))
        new_centers = centers.copy()
        assigned = assigned.copy()
        for c in range(len(centers)):
            members = labels == c
            if members.any():
                new_centers[c] = points[members].mean(axis=0)
            else:
                # re-seed an emptied cluster at the worst-fit point
                worst = int(assigned.argmax())
                new_centers[c] = points[worst]
                assigned[worst] = 0.0
        movement = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if movement < _CONVERGENCE_TOL:
            break
    d2 = _squared_distances(points, centers)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(len(points)), labels].sum())
    return labels, centers, inertia, history


def kmeans_best_of(
    points: np.ndarray, n_clusters: int, restarts: int = 50, seed: int = 0
) -> ClusteringResult:
    """Best of ``restarts`` independently seeded k-means runs (lowest inertia)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    if n_clusters < 1 or restarts < 1:
        raise ValueError("n_clusters and restarts must be >= 1")
    if len(points) < n_clusters:
        raise ValueError(f"need at least {n_clusters} points, got {len(points)}")
    if len(np.unique(points, axis=0)) < n_clusters:
        raise DegenerateInput(f"fewer than {n_clusters} distinct points")
    best = None
    for restart in range(restarts):
        rng = rng_for(seed, ROLE_CLUSTER, restart)
        labels, centers, inertia, _ = _lloyd(points, _init_centers(points, n_clusters, rng))
        if best is None or inertia < best.inertia:
            best = ClusteringResult(labels, inertia, restart, centers)
    return best


class KMeansBestOf(BaseEstimator):
    """Estimator facade over :func:`kmeans_best_of`."""

    def __init__(self, n_clusters: int = 4, restarts: int = 50, seed: int = 0):
        self.n_clusters = n_clusters
        self.restarts = restarts
        self.seed = seed

    def fit(self, X, y=None):
        result = kmeans_best_of(X, self.n_clusters, self.restarts, self.seed)
        self.labels_ = result.labels
        self.inertia_ = result.inertia
        self.restart_index_ = result.restart_index
        self.cluster_centers_ = result.centers
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise NotFittedError("call fit before predict")
        return _squared_distances(np.asarray(X, dtype=float), self.cluster_centers_).argmin(axis=1)


def adjusted_rand_index(labels_a, labels_b) -> float:
    """Chance-corrected partition agreement, computed exactly.

    1.0 for identical partitions, about 0 for independent random labelings,
    bounded below by -0.5. Evaluated in rational arithmetic from the
    contingency table, then rounded once to float.
    """
    labels_a = np.asarray(labels_a).ravel()
    labels_b = np.asarray(labels_b).ravel()
    if labels_a.shape != labels_b.shape:
        raise LengthMismatch(f"label lengths differ: {labels_a.shape} vs {labels_b.shape}")
    n = labels_a.size
    if n < 2:
        raise ValueError("need at least two samples")

    def comb2(x: int) -> int:
        return x * (x - 1) // 2

    contingency = Counter(zip(labels_a.tolist(), labels_b.tolist()))
    sum_cells = sum(comb2(c) for c in contingency.values())
    sum_a = sum(comb2(c) for c in Counter(labels_a.tolist()).values())
    sum_b = sum(comb2(c) for c in Counter(labels_b.tolist()).values())
    expected = Fraction(sum_a * sum_b, comb2(n))
    denominator = Fraction(sum_a + sum_b, 2) - expected
    if denominator == 0:
        # both partitions trivial (all-singletons or single cluster): identical
        return 1.0
    return float((sum_cells - expected) / denominator)
