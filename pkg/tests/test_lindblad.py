import math

import numpy as np
import pytest

import hqcw.lindblad as lindblad
from hqcw.exceptions import InvariantViolation
from hqcw.graph import (
    ClusteredErSpec,
    complete_graph,
    generate_clustered_er,
    path_graph,
    star_graph,
    two_triangle_graph,
)
from hqcw.lindblad import (
    check_density_matrix,
    ensemble_occupations,
    integrate,
    lindblad_rhs,
    trajectory_occupations,
    unitary_evolve,
)
from hqcw.quantum import QuantumJumpWalker, basis_state


def localized_rho(n, node):
    rho = np.zeros((n, n), dtype=complex)
    rho[node, node] = 1.0
    return rho


class TestRhs:
    def test_maximally_mixed_state_is_stationary(self):
        graphs = [
            complete_graph(3),
            path_graph(4),
            star_graph(4),
            two_triangle_graph(),
            generate_clustered_er(ClusteredErSpec((4, 4), 0.9, 0.3, seed=1))[0],
        ]
        for g in graphs:
            rho = np.eye(g.n_nodes, dtype=complex) / g.n_nodes
            for alpha in (0.0, 0.4, 1.0):
                assert np.max(np.abs(lindblad_rhs(rho, g, alpha))) < 1e-12

    def test_two_state_rate_equation(self):
        rhs = lindblad_rhs(localized_rho(2, 0), complete_graph(2), 1.0)
        assert rhs[0, 0].real == pytest.approx(-1.0)
        assert rhs[1, 1].real == pytest.approx(1.0)

    def test_alpha_zero_is_pure_commutator(self):
        g = two_triangle_graph()
        rng = np.random.default_rng(0)
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        h = g.weights
        expected = -1j * (h @ rho - rho @ h)
        assert np.max(np.abs(lindblad_rhs(rho, g, 0.0) - expected)) < 1e-12

    def test_traceless_and_hermitian(self):
        g = two_triangle_graph()
        rho = localized_rho(6, 0)
        out = lindblad_rhs(rho, g, 0.7)
        assert abs(np.trace(out)) < 1e-14
        assert np.max(np.abs(out - out.conj().T)) < 1e-14


class TestIntegrate:
    def test_k2_closed_form(self):
        # dp0/dt = 1 - 2 p0  =>  p0(t) = 1/2 + exp(-2t)/2
        rho = integrate(localized_rho(2, 0), complete_graph(2), 1.0, 1.0)
        assert abs(rho[0, 0].real - (0.5 + 0.5 * math.exp(-2.0))) < 1e-6

    def test_alpha_zero_rabi(self):
        rho = integrate(localized_rho(2, 0), complete_graph(2), 0.0, 1.0)
        assert abs(rho[0, 0].real - math.cos(1.0) ** 2) < 1e-6
        assert abs(rho[1, 1].real - math.sin(1.0) ** 2) < 1e-6

    @pytest.mark.parametrize("make_graph", [two_triangle_graph, lambda: path_graph(3)])
    def test_long_time_limit_is_uniform(self, make_graph):
        g = make_graph()
        rho = integrate(localized_rho(g.n_nodes, 0), g, 0.8, 50.0)
        diag = np.real(np.diag(rho))
        assert np.max(np.abs(diag - 1.0 / g.n_nodes)) < 1e-4
        assert abs(np.trace(rho).real - 1.0) < 1e-8

    def test_trace_hermiticity_positivity(self):
        g = two_triangle_graph()
        rho = localized_rho(6, 1)
        for t in (0.5, 2.0, 10.0):
            rho_t = integrate(rho, g, 0.3, t)
            assert abs(np.trace(rho_t).real - 1.0) < 1e-8
            assert np.max(np.abs(rho_t - rho_t.conj().T)) < 1e-12
            assert np.linalg.eigvalsh(rho_t).min() > -1e-7

    def test_step_halving_self_check(self):
        g = two_triangle_graph()
        dt = lindblad.default_integrator_timestep(g)
        a = integrate(localized_rho(6, 0), g, 0.6, 2.0, dt=dt)
        b = integrate(localized_rho(6, 0), g, 0.6, 2.0, dt=dt / 2)
        assert np.max(np.abs(a - b)) < 1e-9

    def test_dt_precondition(self):
        g = two_triangle_graph()
        with pytest.raises(ValueError, match="dt"):
            integrate(localized_rho(6, 0), g, 0.5, 1.0, dt=0.01)

    def test_size_contract(self):
        graph, _ = generate_clustered_er(ClusteredErSpec((20, 20), 0.5, 0.1, seed=0))
        with pytest.raises(ValueError, match="N <= 32"):
            integrate(localized_rho(40, 0), graph, 0.5, 1.0)

    def test_trace_drift_guard(self, monkeypatch):
        monkeypatch.setattr(lindblad, "lindblad_rhs", lambda rho, g, a: np.eye(2, dtype=complex))
        with pytest.raises(InvariantViolation):
            integrate(localized_rho(2, 0), complete_graph(2), 0.5, 1.0)

    def test_rejects_invalid_density_matrix(self):
        bad = np.diag([0.8, 0.4]).astype(complex)
        with pytest.raises(ValueError, match="trace"):
            check_density_matrix(bad)


class TestUnitaryEvolve:
    def test_identity_at_zero_time(self):
        g = path_graph(3)
        psi = basis_state(3, 1)
        assert np.allclose(unitary_evolve(g, psi, 0.0), psi)

    def test_k2_quarter_period(self):
        psi = unitary_evolve(complete_graph(2), basis_state(2, 0), math.pi / 2)
        assert abs(abs(psi[1]) ** 2 - 1.0) < 1e-10

    def test_norm_conservation(self):
        g = path_graph(3)
        psi0 = basis_state(3, 0)
        for t in np.linspace(0.0, 7.0, 15):
            psi = unitary_evolve(g, psi0, t)
            assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


class TestEnsembleOccupations:
    def test_single_localized_trajectory_is_indicator(self):
        g = two_triangle_graph()
        walker = QuantumJumpWalker(alpha=1.0, walk_length=None, t_max=2.0, seed=0)
        traj = walker.trajectory(g, 0, snapshot_times=[0.5, 1.0, 2.0])
        mean, stderr = ensemble_occupations([traj], [0.5, 1.0, 2.0])
        assert np.all((mean == 0) | (mean == 1))
        assert np.all(mean.sum(axis=1) == 1)
        assert np.all(stderr == 0)

    def test_k2_matches_closed_form(self):
        mean, stderr = trajectory_occupations(
            complete_graph(2), 1.0, [1.0], 10_000, seed=13
        )
        expected = 0.5 + 0.5 * math.exp(-2.0)
        assert abs(mean[0, 0] - expected) < 3 * max(stderr[0, 0], 1e-9)

    def test_stderr_scaling(self):
        g = complete_graph(2)
        walker = QuantumJumpWalker(alpha=1.0, walk_length=None, t_max=1.0, seed=3)
        engine = walker.engine(g)
        trajs = [
            walker.trajectory(g, 0, walk_index=i, snapshot_times=[1.0], _engine=engine)
            for i in range(10_000)
        ]
        _, se_small = ensemble_occupations(trajs[:100], [1.0])
        _, se_big = ensemble_occupations(trajs, [1.0])
        ratio = se_small[0, 0] / se_big[0, 0]
        assert 8.0 < ratio < 12.0

    def test_grid_mismatch_rejected(self):
        g = complete_graph(2)
        walker = QuantumJumpWalker(alpha=1.0, walk_length=None, t_max=1.0, seed=0)
        traj = walker.trajectory(g, 0, snapshot_times=[1.0])
        with pytest.raises(ValueError, match="t_grid"):
            ensemble_occupations([traj], [0.5])
