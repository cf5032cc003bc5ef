"""Command-line pipeline: generate -> walk -> embed -> cluster -> evaluate.

Every subcommand reads an optional JSON config (explicit flags win), derives
all randomness from one master seed, echoes the fully resolved config to
<out>/effective_config.json and stamps each output file with a provenance
line ``# config-hash=<hex> seed=<n> version=<semver>``. Re-running a
subcommand from its echoed config reproduces the outputs byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import jsonschema

from . import __version__
from .clustering import adjusted_rand_index, kmeans_best_of
from .embedding import SkipGramEmbedding, load_embeddings, save_embeddings, save_training_log
from .exceptions import HqcwError
from .experiment import ExperimentConfig, run_experiment, write_report_csv, write_runs_csv
from .graph import (
    ClusteredErSpec,
    generate_clustered_er,
    load_edge_list,
    save_edge_list,
    two_triangle_graph,
)
from .lindblad import compare_trajectories, write_comparison_csv
from .quantum import QuantumJumpWalker, save_trajectory_dump
from .walks import FirstOrderWalker, SecondOrderWalker, load_corpus, save_corpus

_BUILTIN_GRAPHS = {"two-triangle": two_triangle_graph}


def _config_hash(effective: dict) -> str:
    blob = json.dumps(effective, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _provenance(effective: dict, seed: int) -> str:
    return f"config-hash={_config_hash(effective)} seed={seed} version={__version__}"


def _resolve(args_value, config: dict, key: str, default):
    if args_value is not None:
        return args_value
    if key in config and config[key] is not None:
        return config[key]
    return default


def _resolve_seed(args, config: dict) -> int:
    env = os.environ.get("HQCW_SEED")
    fallback = int(env) if env else 0
    return int(_resolve(args.seed, config, "seed", fallback))


def _load_config(args, command: str) -> dict:
    if not args.config:
        return {}
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    if config.get("command", command) != command:
        raise ValueError(
            f"config is for command {config['command']!r}, not {command!r}"
        )
    config.pop("command", None)
    return config


def _prepare_out(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(out: Path, command: str, effective: dict) -> None:
    with open(out / "effective_config.json", "w", encoding="utf-8") as fh:
        json.dump({"command": command, **effective}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(tok) for tok in str(value).replace(",", " ").split()]


def _float_list(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(tok) for tok in str(value).replace(",", " ").split()]


# --- subcommands --------------------------------------------------------------


def _cmd_generate_graph(args) -> int:
    config = _load_config(args, "generate-graph")
    seed = _resolve_seed(args, config)
    effective = {
        "cluster_sizes": _int_list(_resolve(args.sizes, config, "cluster_sizes", "15 15 15 55")),
        "p_intra": float(_resolve(args.p_intra, config, "p_intra", 0.25)),
        "p_inter": float(_resolve(args.p_inter, config, "p_inter", 0.0015)),
        "max_attempts": int(_resolve(args.max_attempts, config, "max_attempts", 1000)),
        "seed": seed,
    }
    spec = ClusteredErSpec(
        cluster_sizes=tuple(effective["cluster_sizes"]),
        p_intra=effective["p_intra"],
        p_inter=effective["p_inter"],
        seed=seed,
        max_attempts=effective["max_attempts"],
    )
    graph, labels = generate_clustered_er(spec)
    out = _prepare_out(args)
    _echo_config(out, "generate-graph", effective)
    save_edge_list(graph, labels, out / "graph.edgelist", [_provenance(effective, seed)])
    print(f"wrote {out / 'graph.edgelist'} ({graph.n_nodes} nodes, {graph.n_edges} edges)")
    return 0


def _make_walker(effective: dict):
    mode = effective["mode"]
    common = dict(
        walk_length=effective["walk_length"],
        walks_per_node=effective["walks_per_node"],
        seed=effective["seed"],
    )
    if mode == "first":
        return FirstOrderWalker(**common)
    if mode == "second":
        return SecondOrderWalker(p=effective["p"], q=effective["q"], **common)
    if mode == "hqcw":
        return QuantumJumpWalker(
            alpha=effective["alpha"], dt=effective["dt"], t_max=effective["t_max"], **common
        )
    raise ValueError(f"unknown walk mode {mode!r}")


def _cmd_walk(args) -> int:
    config = _load_config(args, "walk")
    seed = _resolve_seed(args, config)
    effective = {
        "graph": str(_resolve(args.graph, config, "graph", None)),
        "mode": _resolve(args.mode, config, "mode", "first"),
        "walk_length": int(_resolve(args.walk_length, config, "walk_length", 10)),
        "walks_per_node": int(_resolve(args.walks_per_node, config, "walks_per_node", 3)),
        "p": float(_resolve(args.p, config, "p", 1.0)),
        "q": float(_resolve(args.q, config, "q", 1.0)),
        "alpha": float(_resolve(args.alpha, config, "alpha", 0.8)),
        "dt": _resolve(args.dt, config, "dt", None),
        "t_max": _resolve(args.t_max, config, "t_max", None),
        "dump_trajectories": bool(
            _resolve(args.dump_trajectories or None, config, "dump_trajectories", False)
        ),
        "seed": seed,
    }
    if effective["graph"] in (None, "None"):
        raise ValueError("a graph file is required (--graph)")
    graph, _ = load_edge_list(effective["graph"])
    walker = _make_walker(effective)
    out = _prepare_out(args)
    _echo_config(out, "walk", effective)
    provenance = [_provenance(effective, seed)]
    if effective["mode"] == "hqcw" and effective["dump_trajectories"]:
        engine = walker.engine(graph)
        trajectories = [
            walker.trajectory(graph, start, walk_index=idx, _engine=engine)
            for start in range(graph.n_nodes)
            for idx in range(walker.walks_per_node)
        ]
        corpus = [traj.nodes for traj in trajectories]
        save_trajectory_dump(trajectories, out / "trajectories.tsv", provenance)
    else:
        corpus = walker.generate_corpus(graph, n_threads=args.threads)
    save_corpus(corpus, out / "corpus.txt", provenance)
    print(f"wrote {out / 'corpus.txt'} ({len(corpus)} walks)")
    return 0


def _cmd_embed(args) -> int:
    config = _load_config(args, "embed")
    seed = _resolve_seed(args, config)
    effective = {
        "corpus": str(_resolve(args.corpus, config, "corpus", None)),
        "dimension": int(_resolve(args.dimension, config, "dimension", 32)),
        "window": int(_resolve(args.window, config, "window", 5)),
        "negatives_per_pair": int(_resolve(args.negatives, config, "negatives_per_pair", 5)),
        "epochs": int(_resolve(args.epochs, config, "epochs", 5)),
        "learning_rate": float(_resolve(args.learning_rate, config, "learning_rate", 0.025)),
        "seed": seed,
    }
    if effective["corpus"] in (None, "None"):
        raise ValueError("a corpus file is required (--corpus)")
    corpus = load_corpus(effective["corpus"])
    embedder = SkipGramEmbedding(
        dimension=effective["dimension"],
        window=effective["window"],
        negatives_per_pair=effective["negatives_per_pair"],
        epochs=effective["epochs"],
        learning_rate=effective["learning_rate"],
        seed=seed,
    )
    embedder.fit(corpus)
    out = _prepare_out(args)
    _echo_config(out, "embed", effective)
    provenance = [_provenance(effective, seed)]
    save_embeddings(embedder.embedding_, out / "embeddings.csv", provenance)
    save_training_log(embedder.history_, out / "training_log.csv", provenance)
    print(f"wrote {out / 'embeddings.csv'} ({embedder.n_nodes_} x {effective['dimension']})")
    return 0


def _cmd_cluster_eval(args) -> int:
    config = _load_config(args, "cluster-eval")
    seed = _resolve_seed(args, config)
    effective = {
        "embeddings": str(_resolve(args.embeddings, config, "embeddings", None)),
        "graph": str(_resolve(args.graph, config, "graph", None)),
        "k": int(_resolve(args.k, config, "k", 4)),
        "restarts": int(_resolve(args.restarts, config, "restarts", 50)),
        "seed": seed,
    }
    if effective["embeddings"] in (None, "None") or effective["graph"] in (None, "None"):
        raise ValueError("both --embeddings and --graph files are required")
    embedding = load_embeddings(effective["embeddings"])
    _, truth = load_edge_list(effective["graph"])
    result = kmeans_best_of(embedding, effective["k"], effective["restarts"], seed)
    ari = adjusted_rand_index(result.labels, truth)
    out = _prepare_out(args)
    _echo_config(out, "cluster-eval", effective)
    provenance = _provenance(effective, seed)
    with open(out / "cluster_report.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {provenance}\n")
        fh.write("k,restarts,restart_index,inertia,ari\n")
        fh.write(
            f"{effective['k']},{effective['restarts']},{result.restart_index},"
            f"{result.inertia:.17g},{ari:.17g}\n"
        )
    with open(out / "cluster_labels.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {provenance}\n")
        fh.write("node,label\n")
        for node, label in enumerate(result.labels):
            fh.write(f"{node},{int(label)}\n")
    print(f"ARI = {ari:.6f} (inertia {result.inertia:.6g})")
    return 0


def _cmd_experiment(args) -> int:
    config = _load_config(args, "experiment")
    if not config:
        raise ValueError("experiment requires --config with a sweep definition")
    if args.seed is not None:
        config["seed"] = args.seed
    elif "seed" not in config:
        config["seed"] = _resolve_seed(args, config)
    if args.repetitions is not None:
        config["repetitions"] = args.repetitions
    experiment = ExperimentConfig.from_dict(config)
    effective = experiment.to_dict()
    out = _prepare_out(args)
    _echo_config(out, "experiment", effective)
    cells = run_experiment(experiment, n_threads=args.threads)
    provenance = [_provenance(effective, experiment.seed)]
    write_report_csv(cells, out / "report.csv", provenance)
    write_runs_csv(cells, out / "runs.csv", provenance)
    print(f"wrote {out / 'report.csv'} ({len(cells)} rows)")
    return 0


def _cmd_oracle(args) -> int:
    config = _load_config(args, "oracle")
    seed = _resolve_seed(args, config)
    graph_ref = _resolve(args.graph, config, "graph", None)
    builtin = _resolve(args.builtin, config, "builtin", None)
    effective = {
        "graph": None if graph_ref is None else str(graph_ref),
        "builtin": builtin,
        "alphas": _float_list(_resolve(args.alpha, config, "alphas", "0.3 0.8")),
        "t_grid": _float_list(_resolve(args.t_grid, config, "t_grid", "1 2 5")),
        "ensemble": int(_resolve(args.ensemble, config, "ensemble", 10000)),
        "start": int(_resolve(args.start, config, "start", 0)),
        "dt": _resolve(args.dt, config, "dt", None),
        "seed": seed,
    }
    if builtin is not None:
        if builtin not in _BUILTIN_GRAPHS:
            raise ValueError(f"unknown builtin graph {builtin!r}")
        graph = _BUILTIN_GRAPHS[builtin]()
    elif effective["graph"] not in (None, "None"):
        graph, _ = load_edge_list(effective["graph"])
    else:
        raise ValueError("a graph is required (--graph file or --builtin name)")
    out = _prepare_out(args)
    _echo_config(out, "oracle", effective)
    for alpha in effective["alphas"]:
        rows = compare_trajectories(
            graph,
            alpha,
            effective["t_grid"],
            effective["ensemble"],
            seed=seed,
            start=effective["start"],
            dt=effective["dt"],
            n_threads=args.threads,
        )
        path = out / f"oracle_alpha{alpha:g}.csv"
        write_comparison_csv(rows, path, [_provenance(effective, seed)])
        worst = max(abs(row.z_score) for row in rows)
        print(f"wrote {path} (worst |z| = {worst:.2f})")
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hqcw",
        description="Hybrid quantum-classical walk pipeline for node embeddings "
        "and community detection",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config; explicit flags override it")
        p.add_argument("--seed", type=int, help="master seed (env HQCW_SEED as fallback)")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")

    p = sub.add_parser("generate-graph", help="sample a clustered random graph")
    common(p)
    p.add_argument("--sizes", help="cluster sizes, e.g. '15,15,15,55'")
    p.add_argument("--p-intra", type=float, dest="p_intra")
    p.add_argument("--p-inter", type=float, dest="p_inter")
    p.add_argument("--max-attempts", type=int, dest="max_attempts")
    p.set_defaults(func=_cmd_generate_graph)

    p = sub.add_parser("walk", help="generate a walk corpus from a graph file")
    common(p)
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--mode", choices=["first", "second", "hqcw"])
    p.add_argument("--walk-length", type=int, dest="walk_length")
    p.add_argument("--walks-per-node", type=int, dest="walks_per_node")
    p.add_argument("--p", type=float, help="second-order return parameter")
    p.add_argument("--q", type=float, help="second-order in-out parameter")
    p.add_argument("--alpha", type=float, help="classicality parameter (hqcw)")
    p.add_argument("--dt", type=float, help="time step (hqcw; default auto)")
    p.add_argument("--t-max", type=float, dest="t_max", help="safety time cap (hqcw)")
    p.add_argument(
        "--dump-trajectories",
        action="store_true",
        dest="dump_trajectories",
        help="also write per-jump times (hqcw)",
    )
    p.set_defaults(func=_cmd_walk)

    p = sub.add_parser("embed", help="train skip-gram embeddings from a corpus")
    common(p)
    p.add_argument("--corpus", help="corpus file (one walk per line)")
    p.add_argument("--dimension", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("cluster-eval", help="k-means + ARI against ground truth")
    common(p)
    p.add_argument("--embeddings", help="embedding CSV")
    p.add_argument("--graph", help="edge-list file providing ground-truth labels")
    p.add_argument("--k", type=int)
    p.add_argument("--restarts", type=int)
    p.set_defaults(func=_cmd_cluster_eval)

    p = sub.add_parser("experiment", help="run a full sweep from a JSON config")
    common(p)
    p.add_argument("--repetitions", type=int, help="override the config's repetitions")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("oracle", help="trajectory ensemble vs density-matrix check")
    common(p)
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--builtin", choices=sorted(_BUILTIN_GRAPHS), help="built-in graph")
    p.add_argument("--alpha", help="alpha values, e.g. '0.3,0.8'")
    p.add_argument("--t-grid", dest="t_grid", help="comparison times, e.g. '1,2,5'")
    p.add_argument("--ensemble", type=int, help="number of trajectories")
    p.add_argument("--start", type=int, help="start node (default 0)")
    p.add_argument("--dt", type=float, help="time step (default auto)")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        HqcwError,
        ValueError,
        OSError,
        json.JSONDecodeError,
        jsonschema.ValidationError,
    ) as exc:
        message = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
