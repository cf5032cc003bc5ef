"""Undirected weighted graphs, clustered Erdős–Rényi generation, edge-list I/O.

Graphs are dense and small by design (the walk dynamics need the full
adjacency anyway); nodes are numbered 0..N-1 and, for generated graphs,
ordered cluster by cluster so the ground-truth labels are contiguous blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConnectivityFailure, ParseError
from .seeding import ROLE_GRAPH, rng_for

__all__ = [
    "Graph",
    "ClusteredErSpec",
    "generate_clustered_er",
    "sample_clustered_er",
    "check_labels",
    "save_edge_list",
    "load_edge_list",
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "star_graph",
    "two_triangle_graph",
]


class Graph:
    """Connected, weighted, undirected simple graph over nodes 0..N-1.

    Wraps a dense symmetric weight matrix with zero diagonal. Degrees are
    unweighted (number of incident edges). Instances are treated as
    immutable after construction.
    """

    def __init__(self, weights: np.ndarray, validate: bool = True):
        weights = np.asarray(weights, dtype=float)
        if validate:
            _validate_weights(weights)
        self.weights = weights
        self.n_nodes = weights.shape[0]
        mask = weights > 0
        self.degrees = mask.sum(axis=1).astype(int)
        self.n_edges = int(mask.sum()) // 2
        # per-node sorted neighbor ids and weights, the walkers' hot data
        self._neighbor_ids = [np.flatnonzero(mask[v]) for v in range(self.n_nodes)]
        self._neighbor_weights = [weights[v, ids] for v, ids in enumerate(self._neighbor_ids)]

    @classmethod
    def from_edges(cls, n_nodes: int, edges, validate: bool = True) -> "Graph":
        """Build from an iterable of (u, v) or (u, v, weight) tuples."""
        w = np.zeros((n_nodes, n_nodes))
        for edge in edges:
            u, v = edge[0], edge[1]
            weight = edge[2] if len(edge) > 2 else 1.0
            w[u, v] = w[v, u] = weight
        return cls(w, validate=validate)

    def neighbors(self, v: int) -> list[tuple[int, float]]:
        """Neighbors of v as (node, weight) pairs in ascending node order."""
        ids = self._neighbor_ids[v]
        wts = self._neighbor_weights[v]
        return [(int(u), float(w)) for u, w in zip(ids, wts)]

    def neighbor_arrays(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        return self._neighbor_ids[v], self._neighbor_weights[v]

    def has_edge(self, u: int, v: int) -> bool:
        return self.weights[u, v] > 0

    def __repr__(self):
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def _validate_weights(weights: np.ndarray) -> None:
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise ValueError(f"weight matrix must be square, got shape {weights.shape}")
    n = weights.shape[0]
    if n < 2:
        raise ValueError("graph needs at least 2 nodes")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise ValueError("edge weights must be finite and non-negative")
    if not np.array_equal(weights, weights.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diagonal(weights) != 0):
        raise ValueError("self-loops are not allowed")
    if not _is_connected(weights > 0):
        raise ValueError("graph must be connected")


def _is_connected(mask: np.ndarray) -> bool:
    n = mask.shape[0]
    reached = np.zeros(n, dtype=bool)
    reached[0] = True
    frontier = reached.copy()
    while frontier.any():
        frontier = mask[frontier].any(axis=0) & ~reached
        reached |= frontier
    return bool(reached.all())


@dataclass(frozen=True)
class ClusteredErSpec:
    """Parameters of the clustered Erdős–Rényi generator."""

    cluster_sizes: tuple[int, ...]
    p_intra: float
    p_inter: float
    seed: int = 0
    max_attempts: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "cluster_sizes", tuple(int(s) for s in self.cluster_sizes))
        if not self.cluster_sizes or any(s < 1 for s in self.cluster_sizes):
            raise ValueError("cluster_sizes must be positive integers")
        if not (0.0 <= self.p_intra <= 1.0 and 0.0 <= self.p_inter <= 1.0):
            raise ValueError("edge probabilities must lie in [0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")

    @property
    def n_nodes(self) -> int:
        return sum(self.cluster_sizes)


def cluster_labels(spec: ClusteredErSpec) -> np.ndarray:
    return np.repeat(np.arange(len(spec.cluster_sizes)), spec.cluster_sizes)


def sample_clustered_er(spec: ClusteredErSpec, rng: np.random.Generator) -> np.ndarray:
    """One unconditioned adjacency sample (may be disconnected).

    Each intra-cluster pair gets an edge with probability p_intra, each
    inter-cluster pair with probability p_inter, independently; weights 1.
    """
    labels = cluster_labels(spec)
    same = labels[:, None] == labels[None, :]
    p = np.where(same, spec.p_intra, spec.p_inter)
    upper = np.triu(rng.random((spec.n_nodes, spec.n_nodes)) < p, k=1)
    return (upper | upper.T).astype(float)


def generate_clustered_er(spec: ClusteredErSpec) -> tuple[Graph, np.ndarray]:
    """Sample a connected clustered graph with its ground-truth labels.

    Whole graphs are rejection-resampled with fresh sub-seeded streams until
    a connected one appears, preserving the per-pair edge probabilities.
    """
    for attempt in range(spec.max_attempts):
        rng = rng_for(spec.seed, ROLE_GRAPH, attempt)
        weights = sample_clustered_er(spec, rng)
        if _is_connected(weights > 0):
            return Graph(weights, validate=False), cluster_labels(spec)
    raise ConnectivityFailure(
        f"no connected sample in {spec.max_attempts} attempts "
        f"(p_intra={spec.p_intra}, p_inter={spec.p_inter})"
    )


def check_labels(labels: np.ndarray, n_nodes: int) -> np.ndarray:
    """Validate a community labelling: length N, labels 0..C-1 all non-empty."""
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (n_nodes,):
        raise ValueError(f"expected {n_nodes} labels, got shape {labels.shape}")
    if labels.min(initial=0) < 0:
        raise ValueError("labels must be non-negative")
    present = np.unique(labels)
    if labels.size and not np.array_equal(present, np.arange(present[-1] + 1)):
        raise ValueError("every community in [0, C) must have at least one member")
    return labels


# --- edge-list persistence ---------------------------------------------------
#
# UTF-8 text: optional '# ...' comment lines, a '#nodes N' header, one line
# per edge 'u<TAB>v<TAB>w' with u < v, then one '#label<TAB>node<TAB>community'
# line per node. Weights carry 17 significant digits so floats round-trip.


def save_edge_list(graph: Graph, labels: np.ndarray, path, header_lines=()) -> None:
    labels = check_labels(labels, graph.n_nodes)
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"#nodes {graph.n_nodes}\n")
        for u in range(graph.n_nodes):
            for v, w in graph.neighbors(u):
                if u < v:
                    fh.write(f"{u}\t{v}\t{w:.17g}\n")
        for v in range(graph.n_nodes):
            fh.write(f"#label\t{v}\t{int(labels[v])}\n")


def load_edge_list(path) -> tuple[Graph, np.ndarray]:
    n_nodes = None
    edges = []
    labels: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#nodes"):
                try:
                    n_nodes = int(line.split()[1])
                except (IndexError, ValueError):
                    raise ParseError(path, lineno, f"bad node-count header {line!r}") from None
            elif line.startswith("#label"):
                parts = line.split("\t")
                try:
                    labels[int(parts[1])] = int(parts[2])
                except (IndexError, ValueError):
                    raise ParseError(path, lineno, f"bad label line {line!r}") from None
            elif line.startswith("#"):
                continue
            else:
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ParseError(path, lineno, f"expected 'u<TAB>v<TAB>w', got {line!r}")
                try:
                    edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
                except ValueError as exc:
                    raise ParseError(path, lineno, str(exc)) from None
    if n_nodes is None:
        raise ParseError(path, 0, "missing '#nodes' header")
    if sorted(labels) != list(range(n_nodes)):
        raise ParseError(path, 0, "label lines do not cover every node exactly once")
    graph = Graph.from_edges(n_nodes, edges)
    label_arr = np.array([labels[v] for v in range(n_nodes)], dtype=int)
    return graph, check_labels(label_arr, n_nodes)


# --- small named graphs used throughout tests and presets --------------------


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(n_leaves: int) -> Graph:
    return Graph.from_edges(n_leaves + 1, [(0, i) for i in range(1, n_leaves + 1)])


def two_triangle_graph() -> Graph:
    """Six nodes: triangles {0,1,2} and {3,4,5} joined by the edge (2,3)."""
    return Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
