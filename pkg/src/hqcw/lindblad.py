"""Dense density-matrix reference dynamics for validating the trajectory engine.

Integrates the master equation

    drho/dt = -i (1-alpha) [H, rho]
              + alpha * sum_kl ( L_kl rho L_kl^dag - 1/2 {L_kl^dag L_kl, rho} )

with H the adjacency matrix and L_kl = w_kl |k><l| one operator per directed
edge. The dissipator reduces to a gain term diag(r @ diag(rho)) and a decay
term built from the same squared-weight rates r used by ``hqcw.quantum``,
so trajectory ensembles and this integrator solve the same equation.

Everything here is desk-scale validation tooling: dense matrices, fixed-step
classical 4th-order integration, N <= 32 by contract.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation
from .graph import Graph
from .quantum import QuantumJumpWalker, Trajectory, jump_rates

__all__ = [
    "check_density_matrix",
    "lindblad_rhs",
    "integrate",
    "default_integrator_timestep",
    "unitary_evolve",
    "ensemble_occupations",
    "trajectory_occupations",
    "OracleComparison",
    "compare_trajectories",
    "write_comparison_csv",
]

_MAX_ORACLE_NODES = 32
_TRACE_TOL = 1e-6
_HERMITICITY_TOL = 1e-9


def check_density_matrix(rho: np.ndarray, n_nodes: int | None = None) -> np.ndarray:
    """Validate Hermiticity, unit trace and diagonal bounds."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if n_nodes is not None and rho.shape[0] != n_nodes:
        raise ValueError(f"expected a {n_nodes}x{n_nodes} density matrix")
    if np.max(np.abs(rho - rho.conj().T)) > _HERMITICITY_TOL:
        raise ValueError("density matrix must be Hermitian within 1e-9")
    if abs(np.trace(rho).real - 1.0) > _HERMITICITY_TOL or abs(np.trace(rho).imag) > _HERMITICITY_TOL:
        raise ValueError("density matrix must have unit trace within 1e-9")
    diag = np.real(np.diag(rho))
    if diag.min() < -_HERMITICITY_TOL or diag.max() > 1 + _HERMITICITY_TOL:
        raise ValueError("diagonal occupations must lie in [0, 1]")
    return rho


def lindblad_rhs(rho: np.ndarray, graph: Graph, alpha: float) -> np.ndarray:
    """Right-hand side of the master equation; traceless and Hermiticity-preserving."""
    rho = np.asarray(rho, dtype=complex)
    h = graph.weights
    rates, decay = jump_rates(graph)
    commutator = h @ rho - rho @ h
    gain = np.diag(rates @ np.diagonal(rho))
    loss = 0.5 * (decay[:, None] + decay[None, :]) * rho
    return -1j * (1.0 - alpha) * commutator + alpha * (gain - loss)


def default_integrator_timestep(graph: Graph) -> float:
    _, decay = jump_rates(graph)
    return 1e-3 / max(1.0, float(decay.max()))


def integrate(
    rho0: np.ndarray, graph: Graph, alpha: float, t_final: float, dt: float | None = None
) -> np.ndarray:
    """Fixed-step classical 4th-order integration of the master equation.

    The state is re-symmetrized every step; trace drift beyond 1e-6 raises
    InvariantViolation. dt must not exceed 1e-3 of the characteristic time
    set by the largest decay rate.
    """
    if graph.n_nodes > _MAX_ORACLE_NODES:
        raise ValueError(f"dense reference integrator is limited to N <= {_MAX_ORACLE_NODES}")
    max_dt = default_integrator_timestep(graph)
    if dt is None:
        dt = max_dt
    elif dt <= 0 or dt > max_dt * (1 + 1e-12):
        raise ValueError(f"dt={dt} must lie in (0, {max_dt:.3g}]")
    rho = check_density_matrix(rho0, graph.n_nodes).copy()
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    n_steps = max(1, math.ceil(t_final / dt)) if t_final > 0 else 0
    if n_steps:
        dt = t_final / n_steps
    for _ in range(n_steps):
        k1 = lindblad_rhs(rho, graph, alpha)
        k2 = lindblad_rhs(rho + 0.5 * dt * k1, graph, alpha)
        k3 = lindblad_rhs(rho + 0.5 * dt * k2, graph, alpha)
        k4 = lindblad_rhs(rho + dt * k3, graph, alpha)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - 1.0)
        if drift > _TRACE_TOL:
            raise InvariantViolation(f"trace drift {drift:.3g} exceeds {_TRACE_TOL}")
    return rho


def unitary_evolve(graph: Graph, psi0: np.ndarray, t: float) -> np.ndarray:
    """Exact coherent evolution exp(-iHt) psi0 via eigendecomposition of H."""
    if t < 0:
        raise ValueError("t must be >= 0")
    psi0 = np.asarray(psi0, dtype=complex)
    eigenvalues, eigenvectors = np.linalg.eigh(graph.weights)
    phases = np.exp(-1j * eigenvalues * t)
    return eigenvectors @ (phases * (eigenvectors.conj().T @ psi0))


def ensemble_occupations(
    trajectories: list[Trajectory], t_grid
) -> tuple[np.ndarray, np.ndarray]:
    """Per-node occupation mean and standard error across trajectories.

    Every trajectory must carry occupation snapshots on exactly t_grid.
    Returns arrays of shape (len(t_grid), n_nodes).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if not trajectories:
        raise ValueError("need at least one trajectory")
    stack = []
    for traj in trajectories:
        if traj.occupations is None or traj.snapshot_times is None:
            raise ValueError("trajectory lacks occupation snapshots")
        if traj.snapshot_times.shape != t_grid.shape or not np.allclose(
            traj.snapshot_times, t_grid
        ):
            raise ValueError("trajectory snapshots do not match the requested t_grid")
        stack.append(traj.occupations)
    occ = np.stack(stack)
    mean = occ.mean(axis=0)
    m = occ.shape[0]
    stderr = occ.std(axis=0, ddof=1) / math.sqrt(m) if m > 1 else np.zeros_like(mean)
    return mean, stderr


def trajectory_occupations(
    graph: Graph,
    alpha: float,
    t_grid,
    n_trajectories: int,
    seed: int = 0,
    start: int = 0,
    dt: float | None = None,
    n_threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate an ensemble from a localized start and average its occupations."""
    t_grid = np.asarray(t_grid, dtype=float)
    walker = QuantumJumpWalker(
        alpha=alpha, walk_length=None, dt=dt, t_max=float(t_grid[-1]), seed=seed
    )
    engine = walker.engine(graph)

    def one(index: int) -> Trajectory:
        return walker.trajectory(
            graph, start, walk_index=index, snapshot_times=t_grid, _engine=engine
        )

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            trajectories = list(pool.map(one, range(n_trajectories)))
    else:
        trajectories = [one(i) for i in range(n_trajectories)]
    return ensemble_occupations(trajectories, t_grid)


@dataclass
class OracleComparison:
    """One (time, node) row of the trajectory vs master-equation comparison."""

    t: float
    node: int
    traj_mean: float
    traj_stderr: float
    lindblad_diag: float
    z_score: float


def compare_trajectories(
    graph: Graph,
    alpha: float,
    t_grid,
    n_trajectories: int,
    seed: int = 0,
    start: int = 0,
    dt: float | None = None,
    n_threads: int = 1,
) -> list[OracleComparison]:
    """Ensemble occupations against the integrated density-matrix diagonal."""
    t_grid = np.asarray(t_grid, dtype=float)
    mean, stderr = trajectory_occupations(
        graph, alpha, t_grid, n_trajectories, seed=seed, start=start, dt=dt,
        n_threads=n_threads,
    )
    rho = np.zeros((graph.n_nodes, graph.n_nodes), dtype=complex)
    rho[start, start] = 1.0
    rows = []
    t_prev = 0.0
    for gi, t in enumerate(t_grid):
        rho = integrate(rho, graph, alpha, t - t_prev)
        t_prev = t
        diag = np.real(np.diag(rho))
        for node in range(graph.n_nodes):
            diff = mean[gi, node] - diag[node]
            se = stderr[gi, node]
            if se > 0:
                z = diff / se
            else:
                z = 0.0 if diff == 0 else math.inf
            rows.append(
                OracleComparison(
                    t=float(t),
                    node=node,
                    traj_mean=float(mean[gi, node]),
                    traj_stderr=float(se),
                    lindblad_diag=float(diag[node]),
                    z_score=float(z),
                )
            )
    return rows


def write_comparison_csv(rows: list[OracleComparison], path, header_lines=()) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("t,node,traj_mean,traj_stderr,lindblad_diag,z_score\n")
        for row in rows:
            fh.write(
                f"{row.t:.17g},{row.node},{row.traj_mean:.17g},{row.traj_stderr:.17g},"
                f"{row.lindblad_diag:.17g},{row.z_score:.17g}\n"
            )
