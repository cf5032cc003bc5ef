"""Scatter-panel figures of t-SNE-projected node embeddings, colored by community."""

__version__ = "0.1.0"

from .render import FigureSpec, build_figure, load_embedding_csv, load_labels, render_panels

__all__ = [
    "__version__",
    "FigureSpec",
    "build_figure",
    "render_panels",
    "load_embedding_csv",
    "load_labels",
]
