"""Stochastic single-trajectory simulation of the hybrid quantum-classical walk.

A trajectory is a pure state on the node basis that alternates between short
non-unitary evolution steps and probabilistic collapses ("jumps") onto
adjacent nodes. The per-step jump probability through the edge (l -> k) is

    p_kl = alpha * r_kl * dt * |<l|psi>|^2,

with r_kl the squared edge weight, and the no-jump step applies

    psi <- {1 - i(1-alpha) H dt - (alpha dt / 2) D} psi,   D = diag(sum_k r_kl)

followed by renormalization. Averaged over many trajectories, the collapsed
occupations reproduce the density-matrix dynamics integrated in
``hqcw.lindblad``; the recorded collapse sequences double as walk corpora.
The classicality parameter alpha interpolates between a coherent quantum
walk (alpha -> 0, no jumps) and a first-order classical walk (alpha = 1).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import InvalidAlpha, TimestepTooLarge, TrajectoryTimeout
from .graph import Graph
from .seeding import ROLE_QUANTUM, rng_for

__all__ = [
    "Channel",
    "Trajectory",
    "QuantumJumpWalker",
    "hamiltonian",
    "jump_rates",
    "jump_channels",
    "total_jump_probability",
    "sample_channel",
    "no_jump_evolve",
    "default_timestep",
    "check_state",
    "save_trajectory_dump",
]

_NORM_TOL = 1e-9
_MAX_STEP_PROBABILITY = 0.5
_DRAW_BLOCK = 4096


def check_state(psi: np.ndarray, n_nodes: int | None = None) -> np.ndarray:
    """Validate a complex amplitude vector: unit norm within 1e-9."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or (n_nodes is not None and psi.shape[0] != n_nodes):
        raise ValueError(f"state must be a vector of {n_nodes} amplitudes")
    norm2 = float(np.real(psi @ psi.conj()))
    if abs(norm2 - 1.0) > _NORM_TOL:
        raise ValueError(f"state norm^2 = {norm2} deviates from 1 beyond {_NORM_TOL}")
    return psi


def basis_state(n_nodes: int, node: int) -> np.ndarray:
    psi = np.zeros(n_nodes, dtype=complex)
    psi[node] = 1.0
    return psi


def hamiltonian(graph: Graph) -> np.ndarray:
    """Hopping Hamiltonian: the (weighted) adjacency matrix itself."""
    return graph.weights.copy()


def jump_rates(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Rate matrix r_kl (squared edge weights) and decay diagonal d_l = sum_k r_kl.

    On unweighted graphs r equals the adjacency matrix and d the degree
    vector. Squared weights keep the trajectory ensemble consistent with
    the density-matrix dissipator built from the same edge operators.
    """
    rates = graph.weights * graph.weights
    return rates, rates.sum(axis=0)


def default_timestep(graph: Graph, alpha: float) -> float:
    """Default dt: per-step jump probability at most 0.1 from a localized state.

    For alpha = 0 no jumps occur and the bound is vacuous; 1e-3 keeps the
    first-order coherent step accurate over the time spans used in practice.
    """
    if alpha == 0:
        return 1e-3
    _, decay = jump_rates(graph)
    return float(min(0.01, 0.1 / (alpha * decay.max())))


class Channel(NamedTuple):
    """One jump channel: collapse onto ``target`` fed by amplitude at ``source``."""

    target: int
    source: int
    probability: float


def jump_channels(psi: np.ndarray, graph: Graph, alpha: float, dt: float) -> list[Channel]:
    """All jump channels with positive probability for one time step.

    Ordered source-major / target-minor, i.e. by the flattened pair index
    used when sampling against the cumulative distribution.
    """
    psi = check_state(psi, graph.n_nodes)
    rates, _ = jump_rates(graph)
    occ = np.real(psi * psi.conj())
    # probs[l, k] = alpha * dt * r_lk * |psi_l|^2
    probs = alpha * dt * rates * occ[:, None]
    sources, targets = np.nonzero(probs)
    channels = [
        Channel(int(k), int(l), float(probs[l, k])) for l, k in zip(sources, targets)
    ]
    if alpha > 0 and dt > 0:
        assert channels, "normalized state on a connected graph always has channels"
    return channels


def total_jump_probability(channels: list[Channel]) -> float:
    """Sum of channel probabilities; must stay below 0.5 for a valid step."""
    total = float(sum(c.probability for c in channels))
    if total >= _MAX_STEP_PROBABILITY:
        raise TimestepTooLarge(
            f"total per-step jump probability {total:.3g} >= {_MAX_STEP_PROBABILITY}; "
            "reduce dt"
        )
    return total


def sample_channel(r: float, channels: list[Channel]) -> int:
    """Index of the first channel whose cumulative probability exceeds r.

    Half-open convention: with cumulative sums P_1..P_m, channel i is chosen
    when P_i <= r < P_{i+1}. The caller guarantees r < total probability.
    """
    cumulative = np.cumsum([c.probability for c in channels])
    idx = int(np.searchsorted(cumulative, r, side="right"))
    return min(idx, len(channels) - 1)


def no_jump_evolve(psi: np.ndarray, graph: Graph, alpha: float, dt: float) -> np.ndarray:
    """One first-order no-jump step, renormalized to unit norm."""
    psi = check_state(psi, graph.n_nodes)
    _, decay = jump_rates(graph)
    out = psi - 1j * (1.0 - alpha) * dt * (graph.weights @ psi) - (0.5 * alpha * dt) * decay * psi
    return out / np.linalg.norm(out)


@dataclass
class Trajectory:
    """Record of one simulated trajectory.

    ``nodes`` starts with the start node followed by one entry per collapse;
    ``jump_times`` are the corresponding collapse times (strictly increasing).
    ``occupations`` holds |psi|^2 snapshots taken at ``snapshot_times``.
    """

    nodes: list[int]
    jump_times: list[float]
    final_time: float
    timed_out: bool = False
    snapshot_times: np.ndarray | None = None
    occupations: np.ndarray | None = field(default=None, repr=False)


class _Engine:
    """Per-(graph, alpha, dt) operator cache running individual trajectories."""

    def __init__(self, graph: Graph, alpha: float, dt: float | None):
        self.graph = graph
        self.alpha = alpha
        self.dt = default_timestep(graph, alpha) if dt is None else float(dt)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        self.n = graph.n_nodes
        self.rates, decay = jump_rates(graph)
        self.rates_t = np.ascontiguousarray(self.rates.T)
        # per-step probability coefficients and the no-jump step operator
        self.jump_coeff = alpha * self.dt * decay
        self.step_op = (
            np.eye(self.n, dtype=complex)
            - 1j * (1.0 - alpha) * self.dt * graph.weights
            - (0.5 * alpha * self.dt) * np.diag(decay)
        )

    def run(
        self,
        start: int,
        rng: np.random.Generator,
        walk_length: int | None,
        t_max: float,
        snapshot_times: np.ndarray | None = None,
    ) -> Trajectory:
        n, dt, alpha = self.n, self.dt, self.alpha
        grid = None
        occupations = None
        if snapshot_times is not None:
            grid = np.asarray(snapshot_times, dtype=float)
            if grid.ndim != 1 or len(grid) == 0 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
                raise ValueError("snapshot_times must be strictly increasing and >= 0")
            if grid[-1] > t_max + 1e-9:
                raise ValueError("t_max must cover the last snapshot time")
            occupations = np.empty((len(grid), n))
        gi = 0

        psi = basis_state(n, start)
        occ = np.zeros(n)
        occ[start] = 1.0
        nodes = [int(start)]
        jump_times: list[float] = []
        count = 0
        step = 0
        t = 0.0
        timed_out = False
        draws = rng.random(_DRAW_BLOCK)
        drawn = 0

        while True:
            if grid is not None and gi < len(grid) and t >= grid[gi] - 1e-9:
                occupations[gi] = occ
                gi += 1
            if walk_length is not None and count >= walk_length:
                break
            if grid is not None and gi == len(grid) and walk_length is None:
                break
            if t >= t_max - 1e-12:
                if walk_length is not None:
                    timed_out = True
                    warnings.warn(
                        TrajectoryTimeout(
                            f"t_max={t_max} reached after {count}/{walk_length} jumps; "
                            "trajectory truncated"
                        )
                    )
                break

            if drawn == _DRAW_BLOCK:
                draws = rng.random(_DRAW_BLOCK)
                drawn = 0
            r = draws[drawn]
            drawn += 1

            total_p = self.jump_coeff @ occ
            if total_p >= _MAX_STEP_PROBABILITY:
                raise TimestepTooLarge(
                    f"total per-step jump probability {total_p:.3g} >= "
                    f"{_MAX_STEP_PROBABILITY}; reduce dt"
                )
            if r < total_p:
                # collapse: sample the channel (source-major order) with the same r
                flat = (alpha * dt) * (self.rates_t * occ[:, None]).ravel()
                nonzero = np.flatnonzero(flat)
                cumulative = np.cumsum(flat[nonzero])
                idx = min(
                    int(np.searchsorted(cumulative, r, side="right")), len(nonzero) - 1
                )
                target = int(nonzero[idx] % n)
                psi = basis_state(n, target)
                occ = np.zeros(n)
                occ[target] = 1.0
                nodes.append(target)
                count += 1
                jump_times.append(t + dt)
            else:
                psi = self.step_op @ psi
                occ = np.real(psi * psi.conj())
                s = occ.sum()
                psi /= np.sqrt(s)
                occ /= s
            step += 1
            t = step * dt

        return Trajectory(
            nodes=nodes,
            jump_times=jump_times,
            final_time=t,
            timed_out=timed_out,
            snapshot_times=grid,
            occupations=occupations,
        )


class QuantumJumpWalker(BaseEstimator):
    """Trajectory generator for corpora of collapsed-node sequences.

    alpha in (0, 1] controls classicality; walk_length is the number of
    collapses to record per trajectory. dt and t_max default to
    ``default_timestep`` and ``10 * walk_length / alpha``. alpha = 0 is
    only allowed for time-limited runs (``walk_length=None``), where the
    dynamics stays coherent and no corpus can be produced.
    """

    def __init__(
        self,
        alpha: float = 0.8,
        walk_length: int | None = 10,
        walks_per_node: int = 3,
        dt: float | None = None,
        t_max: float | None = None,
        seed: int = 0,
    ):
        self.alpha = alpha
        self.walk_length = walk_length
        self.walks_per_node = walks_per_node
        self.dt = dt
        self.t_max = t_max
        self.seed = seed

    def _check_alpha(self, allow_zero: bool):
        low_ok = self.alpha > 0 or (allow_zero and self.alpha == 0)
        if not (low_ok and self.alpha <= 1):
            raise InvalidAlpha(
                f"alpha={self.alpha} outside (0, 1]"
                + (" (0 allowed only for time-limited runs)" if allow_zero else "")
            )

    def _resolve_t_max(self, snapshot_times) -> float:
        if self.t_max is not None:
            return float(self.t_max)
        if self.walk_length is not None and self.alpha > 0:
            return 10.0 * self.walk_length / self.alpha
        if snapshot_times is not None:
            return float(np.max(snapshot_times))
        raise ValueError("t_max is required when walk_length and snapshot_times are unset")

    def engine(self, graph: Graph) -> _Engine:
        return _Engine(graph, self.alpha, self.dt)

    def trajectory(
        self,
        graph: Graph,
        start: int,
        walk_index: int = 0,
        snapshot_times=None,
        _engine: _Engine | None = None,
    ) -> Trajectory:
        """Run one trajectory from ``start``; stream keyed by (seed, start, index)."""
        self._check_alpha(allow_zero=self.walk_length is None)
        if self.walk_length is not None and self.walk_length < 1:
            raise ValueError("walk_length must be >= 1 or None")
        if not 0 <= start < graph.n_nodes:
            raise ValueError(f"start node {start} out of range")
        engine = _engine if _engine is not None else self.engine(graph)
        rng = rng_for(self.seed, ROLE_QUANTUM, start, walk_index)
        return engine.run(
            start, rng, self.walk_length, self._resolve_t_max(snapshot_times), snapshot_times
        )

    def generate_corpus(self, graph: Graph, n_threads: int = 1) -> list[list[int]]:
        """walks_per_node collapse sequences from every node, node-major order."""
        self._check_alpha(allow_zero=False)
        if self.walk_length is None or self.walk_length < 1:
            raise ValueError("corpus generation needs walk_length >= 1")
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        engine = self.engine(graph)
        tasks = [
            (start, idx)
            for start in range(graph.n_nodes)
            for idx in range(self.walks_per_node)
        ]

        def one(task):
            start, idx = task
            return self.trajectory(graph, start, walk_index=idx, _engine=engine).nodes

        if n_threads > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                return list(pool.map(one, tasks))
        return [one(task) for task in tasks]


def save_trajectory_dump(trajectories: list[Trajectory], path, header_lines=()) -> None:
    """One line per jump: trajectory_id<TAB>time<TAB>node."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for tid, traj in enumerate(trajectories):
            for time, node in zip(traj.jump_times, traj.nodes[1:]):
                fh.write(f"{tid}\t{time:.17g}\t{node}\n")
