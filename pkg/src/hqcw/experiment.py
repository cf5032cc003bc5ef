"""Experiment harness: repeated walk -> embed -> cluster -> score sweeps.

A sweep is a grid of (walker configuration) x (embedding dimension) cells.
Each repetition regenerates the walks (and optionally the graph) with
derived sub-seeds, trains embeddings, clusters them and scores the adjusted
Rand index against the generator's ground-truth labels. Within a repetition
all walkers see the same graph, so per-repetition scores are paired.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .clustering import adjusted_rand_index, kmeans_best_of
from .embedding import SkipGramEmbedding
from .graph import ClusteredErSpec, generate_clustered_er
from .quantum import QuantumJumpWalker
from .seeding import ROLE_EXPERIMENT, derive_seed
from .walks import FirstOrderWalker, SecondOrderWalker

__all__ = [
    "ExperimentConfig",
    "ExperimentCell",
    "run_experiment",
    "write_report_csv",
    "write_runs_csv",
    "EXPERIMENT_CONFIG_SCHEMA",
]

_PROBABILITY = {"type": "number", "minimum": 0.0, "maximum": 1.0}

EXPERIMENT_CONFIG_SCHEMA = {
    "type": "object",
    "required": ["graph", "walkers", "dimensions"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "graph": {
            "type": "object",
            "required": ["cluster_sizes", "p_intra", "p_inter"],
            "additionalProperties": False,
            "properties": {
                "cluster_sizes": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 1,
                },
                "p_intra": _PROBABILITY,
                "p_inter": _PROBABILITY,
                "max_attempts": {"type": "integer", "minimum": 1},
            },
        },
        "walkers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["mode"],
                "additionalProperties": False,
                "properties": {
                    "mode": {"enum": ["first", "second", "hqcw"]},
                    "alpha": {"type": "number"},
                    "p": {"type": "number", "exclusiveMinimum": 0},
                    "q": {"type": "number", "exclusiveMinimum": 0},
                    "dt": {"type": ["number", "null"], "exclusiveMinimum": 0},
                    "t_max": {"type": ["number", "null"], "exclusiveMinimum": 0},
                },
            },
        },
        "dimensions": {
            "type": "array",
            "items": {"type": "integer", "minimum": 1},
            "minItems": 1,
        },
        "walk_length": {"type": "integer", "minimum": 1},
        "walks_per_node": {"type": "integer", "minimum": 1},
        "window": {"type": "integer", "minimum": 1},
        "negatives_per_pair": {"type": "integer", "minimum": 1},
        "epochs": {"type": "integer", "minimum": 1},
        "learning_rate": {"type": "number", "exclusiveMinimum": 0},
        "n_clusters": {"type": "integer", "minimum": 1},
        "restarts": {"type": "integer", "minimum": 1},
        "repetitions": {"type": "integer", "minimum": 1},
        "resample_graph": {"type": "boolean"},
    },
}


@dataclass
class ExperimentConfig:
    graph: ClusteredErSpec
    walkers: list[dict]
    dimensions: list[int]
    walk_length: int = 10
    walks_per_node: int = 3
    window: int = 5
    negatives_per_pair: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    n_clusters: int = 4
    restarts: int = 50
    repetitions: int = 10
    resample_graph: bool = False
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        jsonschema.validate(raw, EXPERIMENT_CONFIG_SCHEMA)
        raw = dict(raw)
        graph_raw = dict(raw.pop("graph"))
        spec = ClusteredErSpec(
            cluster_sizes=tuple(graph_raw["cluster_sizes"]),
            p_intra=graph_raw["p_intra"],
            p_inter=graph_raw["p_inter"],
            seed=0,  # graph seeds are derived from the master seed
            max_attempts=graph_raw.get("max_attempts", 1000),
        )
        return cls(graph=spec, **raw)

    def to_dict(self) -> dict:
        return {
            "graph": {
                "cluster_sizes": list(self.graph.cluster_sizes),
                "p_intra": self.graph.p_intra,
                "p_inter": self.graph.p_inter,
                "max_attempts": self.graph.max_attempts,
            },
            "walkers": [dict(w) for w in self.walkers],
            "dimensions": list(self.dimensions),
            "walk_length": self.walk_length,
            "walks_per_node": self.walks_per_node,
            "window": self.window,
            "negatives_per_pair": self.negatives_per_pair,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "n_clusters": self.n_clusters,
            "restarts": self.restarts,
            "repetitions": self.repetitions,
            "resample_graph": self.resample_graph,
            "seed": self.seed,
        }


@dataclass
class ExperimentCell:
    """Aggregated scores for one (walker, dimension) grid cell."""

    walker: str
    param_name: str
    param_value: str
    dimension: int
    repetitions: int
    ari_values: list[float] = field(default_factory=list)

    @property
    def ari_mean(self) -> float:
        return float(np.mean(self.ari_values))

    @property
    def ari_stderr(self) -> float:
        if len(self.ari_values) < 2:
            return 0.0
        return float(np.std(self.ari_values, ddof=1) / math.sqrt(len(self.ari_values)))


def _build_walker(cfg: dict, config: ExperimentConfig, seed: int):
    mode = cfg["mode"]
    if mode == "first":
        walker = FirstOrderWalker(
            walk_length=config.walk_length,
            walks_per_node=config.walks_per_node,
            seed=seed,
        )
        return walker, "-", "-"
    if mode == "second":
        p, q = cfg.get("p", 1.0), cfg.get("q", 1.0)
        walker = SecondOrderWalker(
            p=p,
            q=q,
            walk_length=config.walk_length,
            walks_per_node=config.walks_per_node,
            seed=seed,
        )
        return walker, "p/q", f"{p:g}/{q:g}"
    if mode == "hqcw":
        alpha = cfg.get("alpha", 0.8)
        walker = QuantumJumpWalker(
            alpha=alpha,
            walk_length=config.walk_length,
            walks_per_node=config.walks_per_node,
            dt=cfg.get("dt"),
            t_max=cfg.get("t_max"),
            seed=seed,
        )
        return walker, "alpha", f"{alpha:g}"
    raise ValueError(f"unknown walker mode {mode!r}")


# sub-seed roles within an experiment
_GRAPH, _CORPUS, _EMBED, _CLUSTER = 0, 1, 2, 3


def run_experiment(config: ExperimentConfig, n_threads: int = 1) -> list[ExperimentCell]:
    """Run the full sweep; cells ordered walker-major, dimension-minor."""
    if config.repetitions == 1:
        warnings.warn("repetitions=1: standard errors are reported as 0")

    def graph_for(rep: int):
        attempt_seed = derive_seed(config.seed, ROLE_EXPERIMENT, _GRAPH, rep)
        spec = ClusteredErSpec(
            cluster_sizes=config.graph.cluster_sizes,
            p_intra=config.graph.p_intra,
            p_inter=config.graph.p_inter,
            seed=attempt_seed,
            max_attempts=config.graph.max_attempts,
        )
        return generate_clustered_er(spec)

    shared = None if config.resample_graph else graph_for(0)
    cells = []
    for wi, wcfg in enumerate(config.walkers):
        per_dim = {d: [] for d in config.dimensions}
        label = wcfg["mode"]
        param_name = param_value = "-"
        for rep in range(config.repetitions):
            graph, truth = graph_for(rep) if config.resample_graph else shared
            corpus_seed = derive_seed(config.seed, ROLE_EXPERIMENT, _CORPUS, wi, rep)
            walker, param_name, param_value = _build_walker(wcfg, config, corpus_seed)
            corpus = walker.generate_corpus(graph, n_threads=n_threads)
            for d in config.dimensions:
                embedder = SkipGramEmbedding(
                    dimension=d,
                    window=config.window,
                    negatives_per_pair=config.negatives_per_pair,
                    epochs=config.epochs,
                    learning_rate=config.learning_rate,
                    seed=derive_seed(config.seed, ROLE_EXPERIMENT, _EMBED, wi, rep, d),
                )
                embedding = embedder.fit(corpus).embedding_
                result = kmeans_best_of(
                    embedding,
                    config.n_clusters,
                    restarts=config.restarts,
                    seed=derive_seed(config.seed, ROLE_EXPERIMENT, _CLUSTER, wi, rep, d),
                )
                per_dim[d].append(adjusted_rand_index(result.labels, truth))
        for d in config.dimensions:
            cells.append(
                ExperimentCell(
                    walker=label,
                    param_name=param_name,
                    param_value=param_value,
                    dimension=d,
                    repetitions=config.repetitions,
                    ari_values=per_dim[d],
                )
            )
    return cells


def write_report_csv(cells: list[ExperimentCell], path, header_lines=()) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("walker,param_name,param_value,d,repetitions,ari_mean,ari_stderr\n")
        for cell in cells:
            fh.write(
                f"{cell.walker},{cell.param_name},{cell.param_value},{cell.dimension},"
                f"{cell.repetitions},{cell.ari_mean:.6f},{cell.ari_stderr:.6f}\n"
            )


def write_runs_csv(cells: list[ExperimentCell], path, header_lines=()) -> None:
    """Per-repetition scores backing the aggregated report."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("walker,param_name,param_value,d,repetition,ari\n")
        for cell in cells:
            for rep, ari in enumerate(cell.ari_values):
                fh.write(
                    f"{cell.walker},{cell.param_name},{cell.param_value},"
                    f"{cell.dimension},{rep},{ari:.6f}\n"
                )
