"""Classical random walks: first-order uniform and second-order (p,q)-biased.

Both walkers emit corpora of node sequences (walk_length steps, so
walk_length+1 tokens including the start node). Every walk draws from its
own random stream keyed by (seed, role, start node, walk index), so corpora
are reproducible and independent of generation order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import ParseError
from .graph import Graph
from .seeding import ROLE_FIRST_ORDER, ROLE_SECOND_ORDER, rng_for

__all__ = [
    "first_order_distribution",
    "second_order_bias",
    "second_order_distribution",
    "FirstOrderWalker",
    "SecondOrderWalker",
    "save_corpus",
    "load_corpus",
]


def first_order_distribution(graph: Graph, v: int) -> dict[int, float]:
    """Uniform transition law over the neighbors of v: P(u) = 1/deg(v).

    Edge weights are deliberately ignored; only the second-order walk is
    weight-sensitive.
    """
    ids, _ = graph.neighbor_arrays(v)
    p = 1.0 / len(ids)
    return {int(u): p for u in ids}


def second_order_bias(d_rx: int, p: float, q: float) -> float:
    """Bias factor as a function of the previous-node/candidate hop distance.

    d_rx = 0 (return to the previous node) -> 1/p,
    d_rx = 1 (candidate adjacent to it)    -> 1,
    d_rx = 2 (explore outward)             -> 1/q.
    """
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    if d_rx == 0:
        return 1.0 / p
    if d_rx == 1:
        return 1.0
    if d_rx == 2:
        return 1.0 / q
    raise ValueError(f"hop distance must be 0, 1 or 2, got {d_rx}")


def _second_order_scores(graph: Graph, prev: int, cur: int, p: float, q: float):
    """Unnormalized scores bias(d_prev,x) * w(cur,x) over the neighbors of cur."""
    ids, weights = graph.neighbor_arrays(cur)
    adj_prev = graph.weights[prev, ids] > 0
    bias = np.where(ids == prev, 1.0 / p, np.where(adj_prev, 1.0, 1.0 / q))
    return ids, bias * weights


def second_order_distribution(
    graph: Graph, prev: int, cur: int, p: float, q: float
) -> dict[int, float]:
    """Transition law from cur given the walk arrived there from prev.

    Each neighbor x of cur is scored bias(d_prev,x) * w(cur,x) and the
    scores are normalized.
    """
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    ids, scores = _second_order_scores(graph, prev, cur, p, q)
    scores = scores / scores.sum()
    return {int(x): float(s) for x, s in zip(ids, scores)}


def _sample(cumulative: np.ndarray, r: float) -> int:
    # first index whose cumulative probability exceeds r
    return int(np.searchsorted(cumulative, r, side="right"))


class _WalkerBase(BaseEstimator):
    """Shared corpus plumbing; subclasses provide _step and _role."""

    def generate_corpus(self, graph: Graph, n_threads: int = 1) -> list[list[int]]:
        """walks_per_node walks from every node, in node-major order."""
        self._check_params()
        tasks = [
            (start, idx)
            for start in range(graph.n_nodes)
            for idx in range(self.walks_per_node)
        ]
        if n_threads > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                return list(pool.map(lambda t: self.walk(graph, *t), tasks))
        return [self.walk(graph, start, idx) for start, idx in tasks]

    def walk(self, graph: Graph, start: int, walk_index: int = 0) -> list[int]:
        """One walk of walk_length steps starting (and recorded) at start."""
        self._check_params()
        if not 0 <= start < graph.n_nodes:
            raise ValueError(f"start node {start} out of range")
        rng = rng_for(self.seed, self._role, start, walk_index)
        draws = rng.random(self.walk_length)
        nodes = [start]
        for step in range(self.walk_length):
            nodes.append(self._step(graph, nodes, draws[step]))
        return nodes

    def _check_params(self):
        if self.walk_length < 1:
            raise ValueError("walk_length must be >= 1")
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")


class FirstOrderWalker(_WalkerBase):
    """Memoryless walker: next node uniform over the current neighborhood."""

    _role = ROLE_FIRST_ORDER

    def __init__(self, walk_length: int = 10, walks_per_node: int = 3, seed: int = 0):
        self.walk_length = walk_length
        self.walks_per_node = walks_per_node
        self.seed = seed

    def _step(self, graph, nodes, r):
        ids, _ = graph.neighbor_arrays(nodes[-1])
        # uniform over k neighbors: floor(r*k) equals the cumulative rule
        return int(ids[int(r * len(ids))])


class SecondOrderWalker(_WalkerBase):
    """Walker biased by the previously visited node via (p, q).

    p > 1 discourages immediate backtracking, q < 1 encourages moving to
    nodes not adjacent to the previous one. The first step, having no
    previous node, falls back to the uniform first-order rule.
    """

    _role = ROLE_SECOND_ORDER

    def __init__(
        self,
        p: float = 1.0,
        q: float = 1.0,
        walk_length: int = 10,
        walks_per_node: int = 3,
        seed: int = 0,
    ):
        self.p = p
        self.q = q
        self.walk_length = walk_length
        self.walks_per_node = walks_per_node
        self.seed = seed

    def _check_params(self):
        super()._check_params()
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be positive")

    def _step(self, graph, nodes, r):
        cur = nodes[-1]
        if len(nodes) == 1:
            ids, _ = graph.neighbor_arrays(cur)
            return int(ids[int(r * len(ids))])
        ids, scores = _second_order_scores(graph, nodes[-2], cur, self.p, self.q)
        cum = np.cumsum(scores)
        cum /= cum[-1]
        return int(ids[_sample(cum, r)])


# --- corpus persistence: one walk per line, space-separated node ids ----------


def save_corpus(corpus: list[list[int]], path, header_lines=()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for walk in corpus:
            fh.write(" ".join(str(int(v)) for v in walk) + "\n")


def load_corpus(path) -> list[list[int]]:
    corpus = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                corpus.append([int(tok) for tok in line.split()])
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
    return corpus
