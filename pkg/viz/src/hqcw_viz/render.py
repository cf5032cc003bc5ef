"""Render 2D t-SNE scatter panels from embedding CSVs and ground-truth labels.

Inputs are plain files: embedding CSVs with a ``node,e0,...`` header and an
edge-list file whose ``#label`` lines carry the community of every node.
One panel per embedding file; panels of 3+ files are laid out on two rows
(four files give a 2x2 figure, eight files a 2x4 grid). Rendering is
deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from sklearn.manifold import TSNE


def load_embedding_csv(path) -> np.ndarray:
    """Embedding matrix from a 'node,e0,...' CSV; '#' lines are comments."""
    rows = {}
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if width is None:
                if parts[0] != "node":
                    raise ValueError(f"{path}:{lineno}: missing 'node,e0,...' header")
                width = len(parts)
                continue
            if len(parts) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} columns")
            rows[int(parts[0])] = [float(x) for x in parts[1:]]
    if not rows or sorted(rows) != list(range(len(rows))):
        raise ValueError(f"{path}: node ids must cover 0..N-1")
    return np.array([rows[i] for i in range(len(rows))])


def load_labels(path) -> np.ndarray:
    """Community labels from the '#label<TAB>node<TAB>community' lines of an edge list."""
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.startswith("#label"):
                continue
            parts = raw.strip().split("\t")
            try:
                labels[int(parts[1])] = int(parts[2])
            except (IndexError, ValueError):
                raise ValueError(f"{path}:{lineno}: bad label line") from None
    if not labels or sorted(labels) != list(range(len(labels))):
        raise ValueError(f"{path}: label lines must cover 0..N-1")
    return np.array([labels[i] for i in range(len(labels))])


@dataclass
class FigureSpec:
    """One figure: a list of (embedding CSV, panel title) plus shared settings."""

    panels: list[tuple[str, str]]
    labels_path: str
    output_path: str
    perplexity: float = 30.0
    iterations: int = 1000
    seed: int = 0
    point_size: float = 18.0
    _labels: np.ndarray = field(init=False, repr=False, default=None)

    def validate(self) -> np.ndarray:
        if not self.panels:
            raise ValueError("at least one embedding panel is required")
        for path, _ in self.panels:
            if not Path(path).exists():
                raise FileNotFoundError(path)
        labels = load_labels(self.labels_path)
        if not self.perplexity < len(labels):
            raise ValueError(
                f"perplexity {self.perplexity} must be below the point count {len(labels)}"
            )
        self._labels = labels
        return labels


def project_2d(embedding: np.ndarray, perplexity: float, iterations: int, seed: int):
    tsne = TSNE(
        n_components=2,
        perplexity=perplexity,
        max_iter=iterations,
        random_state=seed,
        init="pca",
    )
    return tsne.fit_transform(embedding)


def _grid(n_panels: int) -> tuple[int, int]:
    rows = 1 if n_panels <= 2 else 2
    return rows, math.ceil(n_panels / rows)


def build_figure(spec: FigureSpec):
    """Figure with one t-SNE scatter panel per embedding file."""
    labels = spec.validate()
    communities = np.unique(labels)
    cmap = plt.get_cmap("tab10")
    rows, cols = _grid(len(spec.panels))
    fig, axes = plt.subplots(rows, cols, figsize=(4.2 * cols, 3.8 * rows), squeeze=False)
    flat = axes.ravel()
    for ax in flat[len(spec.panels):]:
        ax.axis("off")
    for ax, (path, title) in zip(flat, spec.panels):
        embedding = load_embedding_csv(path)
        if len(embedding) != len(labels):
            raise ValueError(f"{path}: {len(embedding)} rows but {len(labels)} labels")
        points = project_2d(embedding, spec.perplexity, spec.iterations, spec.seed)
        for community in communities:
            mask = labels == community
            ax.scatter(
                points[mask, 0],
                points[mask, 1],
                s=spec.point_size,
                color=cmap(int(community) % 10),
                label=f"community {community}",
            )
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
    flat[0].legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig


def render_panels(spec: FigureSpec) -> str:
    """Write the figure as a lossless PNG; returns the output path."""
    fig = build_figure(spec)
    fig.savefig(spec.output_path, dpi=150)
    plt.close(fig)
    return str(spec.output_path)
