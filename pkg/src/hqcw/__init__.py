"""Hybrid quantum-classical walks for graph representation learning.

Pipeline: sample a clustered random graph, generate walk corpora with
classical (first/second-order) or quantum-jump walkers, train skip-gram
node embeddings, cluster them with k-means and score community recovery
with the adjusted Rand index. A dense density-matrix integrator validates
the stochastic trajectory engine on small graphs.
"""

__version__ = "0.1.0"

from .clustering import KMeansBestOf, adjusted_rand_index, kmeans_best_of
from .embedding import SkipGramEmbedding, build_pairs, sgns_loss_and_grad
from .experiment import ExperimentConfig, run_experiment
from .graph import ClusteredErSpec, Graph, generate_clustered_er, load_edge_list, save_edge_list
from .lindblad import integrate as integrate_lindblad
from .lindblad import lindblad_rhs, trajectory_occupations, unitary_evolve
from .quantum import QuantumJumpWalker, default_timestep, hamiltonian
from .walks import (
    FirstOrderWalker,
    SecondOrderWalker,
    first_order_distribution,
    second_order_bias,
    second_order_distribution,
)

__all__ = [
    "__version__",
    "Graph",
    "ClusteredErSpec",
    "generate_clustered_er",
    "save_edge_list",
    "load_edge_list",
    "FirstOrderWalker",
    "SecondOrderWalker",
    "first_order_distribution",
    "second_order_bias",
    "second_order_distribution",
    "QuantumJumpWalker",
    "hamiltonian",
    "default_timestep",
    "lindblad_rhs",
    "integrate_lindblad",
    "unitary_evolve",
    "trajectory_occupations",
    "SkipGramEmbedding",
    "build_pairs",
    "sgns_loss_and_grad",
    "KMeansBestOf",
    "kmeans_best_of",
    "adjusted_rand_index",
    "ExperimentConfig",
    "run_experiment",
]
