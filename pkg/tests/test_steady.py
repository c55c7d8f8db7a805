from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.sparse as sp

from qubit_sr.errors import (
    DimensionOverflow,
    NoConvergence,
    NonUniqueSteadyState,
    StepSizeUnstable,
)
from qubit_sr.generator import (
    ArrayConfig,
    CouplingSpec,
    Liouvillian,
    build_coherent_hamiltonian,
    build_jump_operators,
    build_liouvillian,
    build_liouvillian_standard,
)
from qubit_sr.opalg import SIGMA_Z, DensityMatrix, partial_trace
from qubit_sr.steady import (
    ReducedParams,
    SolveMethod,
    analytic_steady_xxyy,
    analytic_steady_zz,
    check_uniqueness,
    closed_form_steady,
    commutant_dimension,
    propagate_to_steady,
    solve_config,
    solve_steady_numeric,
    steady_residual,
    steady_spectrum_analytic,
)
from tests.helpers import random_density_matrix

# =============================================================================
# HELPERS
# =============================================================================


def single_qubit(omega: float = 1.0, gamma: float = 1.0) -> ArrayConfig:
    return ArrayConfig.homogeneous(1, omega, gamma)


def dephasing_only() -> Liouvillian:
    """Pure dephasing of one undriven qubit: every diagonal state is stationary."""
    return build_liouvillian_standard(np.zeros((2, 2)), [SIGMA_Z])


def zz_config(r: float, j: float, omega: float = 1.0) -> ArrayConfig:
    return ArrayConfig.homogeneous(2, omega, r * omega, coupling=CouplingSpec.zz(j * omega))


# =============================================================================
# TESTS: Closed form
# =============================================================================


class TestAnalyticSteadyState:
    def test_reference_point(self) -> None:
        rho = analytic_steady_zz(1.0, 1.5).matrix
        assert np.isclose(rho[0, 0], 13 / 18)
        assert np.isclose(rho[0, 3], (-1 + 3j) / 18)
        assert np.isclose(rho[0, 1], (3 + 2j) / 18)
        assert np.isclose(rho[3, 3], 1 / 18)

    def test_reduced_ground_population(self) -> None:
        reduced = partial_trace(analytic_steady_zz(1.0, 1.5), [1])
        assert np.isclose(reduced.matrix[0, 0].real, 5 / 6)

    def test_no_decay_gives_maximally_mixed(self) -> None:
        assert np.allclose(analytic_steady_zz(0.0, 2.0).matrix, np.eye(4) / 4)

    def test_xxyy_depends_on_difference(self) -> None:
        assert np.allclose(
            analytic_steady_xxyy(0.7, 2.5, 1.0).matrix,
            analytic_steady_zz(0.7, 1.5).matrix,
        )

    @pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 3.0])
    @pytest.mark.parametrize("s", [-2.0, 0.0, 0.4, 1.5])
    def test_spectrum_matches_eigenvalues(self, r: float, s: float) -> None:
        expected = np.sort(steady_spectrum_analytic(r, s))
        actual = np.linalg.eigvalsh(analytic_steady_zz(r, s).matrix)
        assert np.allclose(actual, expected, atol=1e-10)

    def test_spectrum_reference_point(self) -> None:
        lam_1, lam_2, lam_3, lam_4 = steady_spectrum_analytic(1.0, 1.5)
        assert math.isclose(lam_1, 1 / 18) and lam_1 == lam_2
        assert math.isclose(lam_3 + lam_4, 16 / 18)
        assert math.isclose(lam_3, 0.0034859, abs_tol=1e-6)
        assert math.isclose(lam_4, 0.8854030, abs_tol=1e-6)
        actual = np.linalg.eigvalsh(analytic_steady_zz(1.0, 1.5).matrix)
        assert np.allclose(actual, sorted([lam_1, lam_2, lam_3, lam_4]), atol=1e-12)

    def test_product_state_without_coupling(self) -> None:
        single = solve_config(single_qubit(1.0, 0.8)).state.matrix
        assert np.allclose(analytic_steady_zz(0.8, 0.0).matrix, np.kron(single, single))

    def test_reduced_params(self) -> None:
        p = ReducedParams.from_rates(2.0, 1.0, 3.0)
        assert (p.r, p.s) == (0.5, 1.5)
        assert p.k == 3 + 2 * 0.25 + 1.25**2 + 4 * 0.25 * 2.25
        with pytest.raises(ValueError):
            ReducedParams(-0.1, 1.0)
        with pytest.raises(ValueError):
            ReducedParams.from_rates(0.0, 1.0, 1.0)


class TestClosedFormSteady:
    @pytest.mark.parametrize("j", [-1.5, -0.3, 0.0, 0.8, 2.0])
    def test_matches_numeric_zz(self, j: float) -> None:
        config = zz_config(0.6, j)
        numeric = solve_config(config).state.matrix
        assert np.allclose(closed_form_steady(config).matrix, numeric, atol=1e-9)

    def test_matches_numeric_xxyy(self) -> None:
        config = ArrayConfig.homogeneous(
            2, 1.0, 0.9, coupling=CouplingSpec.xxyy(1.7, 0.4)
        )
        numeric = solve_config(config).state.matrix
        assert np.allclose(closed_form_steady(config).matrix, numeric, atol=1e-9)

    def test_rejects_dephasing(self) -> None:
        config = ArrayConfig.homogeneous(2, 1.0, 1.0, gamma_dephase=0.1)
        with pytest.raises(ValueError, match="dephasing"):
            closed_form_steady(config)

    def test_rejects_inhomogeneous_drive(self) -> None:
        config = ArrayConfig(2, (1.0, 2.0), (0.0, 0.0), (1.0, 1.0), (0.0, 0.0), (0.0, 0.0))
        with pytest.raises(ValueError, match="homogeneous"):
            closed_form_steady(config)

    def test_rejects_larger_arrays(self) -> None:
        with pytest.raises(ValueError, match="two qubits"):
            closed_form_steady(ArrayConfig.homogeneous(3, 1.0, 1.0))


# =============================================================================
# TESTS: Numeric solver
# =============================================================================


class TestSolveNumeric:
    def test_single_qubit(self) -> None:
        report = solve_config(single_qubit())
        rho = report.state.matrix
        assert np.isclose(rho[1, 1], 1 / 3)
        assert np.isclose(rho[0, 1], 1j / 3)
        assert report.method is SolveMethod.NULLSPACE
        assert report.null_space_dim == 1
        assert report.residual < 1e-9

    @pytest.mark.parametrize("r", [0.05, 0.3, 1.0, 2.5, 10.0])
    @pytest.mark.parametrize("s", [0.0, 0.5, 1.5, 4.0])
    def test_matches_closed_form(self, r: float, s: float) -> None:
        numeric = solve_config(zz_config(r, -s)).state.matrix
        assert np.allclose(numeric, analytic_steady_zz(r, s).matrix, atol=1e-9)

    def test_linear_solve_agrees_with_nullspace(self) -> None:
        config = ArrayConfig.homogeneous(
            3, 1.0, 0.7, gamma_dephase=0.2, nbar=0.1, coupling=CouplingSpec.zz(1.5)
        )
        liouvillian = build_liouvillian(config)
        dense = solve_steady_numeric(liouvillian, method="nullspace")
        sparse = solve_steady_numeric(liouvillian, method="linear-solve")
        assert sparse.method is SolveMethod.LINEAR_SOLVE
        assert np.allclose(dense.state.matrix, sparse.state.matrix, atol=1e-9)

    def test_auto_switches_to_linear_solve(self) -> None:
        config = ArrayConfig.homogeneous(5, 1.0, 1.0, coupling=CouplingSpec.zz(1.5))
        report = solve_config(config)
        assert report.method is SolveMethod.LINEAR_SOLVE
        assert np.isclose(np.trace(report.state.matrix), 1)
        assert report.residual < 1e-9

    def test_pure_dephasing_is_maximally_mixed(self) -> None:
        config = ArrayConfig.homogeneous(
            3, 1.0, 0.0, gamma_dephase=0.5, coupling=CouplingSpec.zz(1.5)
        )
        assert np.allclose(solve_config(config).state.matrix, np.eye(8) / 8, atol=1e-9)

    def test_thermal_undriven_qubit(self) -> None:
        config = ArrayConfig.homogeneous(1, 0.0, 1.0, nbar=0.5)
        rho = solve_config(config).state.matrix
        # Detailed balance: p1 / p0 = nbar / (nbar + 1).
        assert np.isclose(rho[1, 1] / rho[0, 0], 0.5 / 1.5)

    def test_noiseless_is_not_unique(self) -> None:
        with pytest.raises(NonUniqueSteadyState) as exc_info:
            solve_config(ArrayConfig.homogeneous(2, 1.0, 0.0))
        assert exc_info.value.null_dim == 4

    def test_degenerate_null_space(self) -> None:
        with pytest.raises(NonUniqueSteadyState) as exc_info:
            solve_steady_numeric(dephasing_only(), method="nullspace")
        assert exc_info.value.null_dim == 2

    def test_degenerate_linear_solve(self) -> None:
        with pytest.raises(NonUniqueSteadyState):
            solve_steady_numeric(dephasing_only(), method="linear-solve")

    def test_degenerate_generator_on_sparse_path(self) -> None:
        # Only the first qubit decays; the other four drive freely.
        config = ArrayConfig(
            5, (1.0,) * 5, (0.0,) * 5, (1.0, 0.0, 0.0, 0.0, 0.0), (0.0,) * 5, (0.0,) * 5
        )
        liouvillian = build_liouvillian(config)
        with pytest.raises(NonUniqueSteadyState) as exc_info:
            solve_steady_numeric(liouvillian)
        assert exc_info.value.null_dim == check_uniqueness(liouvillian).null_dim
        assert exc_info.value.null_dim > 1

    def test_residual_bound_enforced(self, zz_pair: ArrayConfig) -> None:
        with pytest.raises(NoConvergence, match="residual"):
            solve_config(zz_pair, residual_bound=-1.0)

    def test_residual_bound_enforced_on_sparse_path(self) -> None:
        config = ArrayConfig.homogeneous(5, 1.0, 1.0, coupling=CouplingSpec.zz(1.5))
        with pytest.raises(NoConvergence, match="residual"):
            solve_config(config, residual_bound=-1.0)

    def test_non_positive_null_vector(self) -> None:
        v = np.array([3.0, 0.0, 0.0, -1.0])
        generator = np.eye(4) - np.outer(v, v) / (v @ v)
        liouvillian = Liouvillian(dim=4, matrix=sp.csr_matrix(generator, dtype=np.complex128))
        with pytest.raises(NoConvergence, match="negative eigenvalue"):
            solve_steady_numeric(liouvillian)

    def test_steady_residual(self) -> None:
        liouvillian = build_liouvillian(single_qubit(0.0, 1.0))
        assert math.isclose(steady_residual(liouvillian, np.eye(2) / 2), math.sqrt(2))
        assert steady_residual(liouvillian, DensityMatrix.ground(1)) == 0.0


class TestUniqueness:
    def test_driven_pair(self, zz_pair: ArrayConfig) -> None:
        assert tuple(check_uniqueness(build_liouvillian(zz_pair))) == (True, 1)

    def test_dephasing_only(self) -> None:
        assert tuple(check_uniqueness(dephasing_only())) == (False, 2)

    def test_zero_generator(self) -> None:
        zero = Liouvillian(dim=4, matrix=sp.csr_matrix((4, 4), dtype=np.complex128))
        assert tuple(check_uniqueness(zero)) == (False, 4)

    def test_commutant_of_driven_pair(self, zz_pair: ArrayConfig) -> None:
        h = build_coherent_hamiltonian(zz_pair)
        assert commutant_dimension(h, build_jump_operators(zz_pair)) == 1

    def test_commutant_of_dephasing(self) -> None:
        assert commutant_dimension(np.zeros((2, 2)), [SIGMA_Z.copy()]) == 2

    def test_commutant_size_limit(self) -> None:
        with pytest.raises(DimensionOverflow):
            commutant_dimension(np.eye(32), [])


# =============================================================================
# TESTS: Time propagation
# =============================================================================


class TestPropagation:
    def test_single_qubit_exact_propagator(self) -> None:
        liouvillian = build_liouvillian(single_qubit())
        result = propagate_to_steady(liouvillian, DensityMatrix.ground(1), t_max=200.0)
        assert result.converged
        assert np.isclose(result.state.matrix[1, 1], 1 / 3, atol=1e-9)
        assert np.isclose(result.state.matrix[0, 1], 1j / 3, atol=1e-9)

    def test_agrees_with_solver_under_dephasing(self) -> None:
        config = ArrayConfig.homogeneous(
            2, 1.0, 1.0, gamma_dephase=0.3, coupling=CouplingSpec.zz(1.5)
        )
        liouvillian = build_liouvillian(config)
        result = propagate_to_steady(liouvillian, DensityMatrix.maximally_mixed(2), 500.0)
        expected = solve_steady_numeric(liouvillian).state.matrix
        assert result.converged
        assert np.allclose(result.state.matrix, expected, atol=1e-8)
        assert result.residual < 1e-8

    def test_from_ground_state_reaches_closed_form(self) -> None:
        liouvillian = build_liouvillian(zz_config(1.0, -1.5))
        result = propagate_to_steady(liouvillian, DensityMatrix.ground(2), t_max=500.0)
        assert result.converged
        assert np.allclose(result.state.matrix, analytic_steady_zz(1.0, 1.5).matrix, atol=1e-6)

    def test_dephasing_only_forgets_initial_state(self, rng: np.random.Generator) -> None:
        config = ArrayConfig.homogeneous(
            2, 1.0, 0.0, gamma_dephase=0.5, coupling=CouplingSpec.zz(1.5)
        )
        rho0 = random_density_matrix(rng)
        result = propagate_to_steady(build_liouvillian(config), rho0, t_max=500.0)
        assert result.converged
        assert np.allclose(result.state.matrix, np.eye(4) / 4, atol=1e-8)

    @pytest.mark.parametrize("trial", range(5))
    def test_random_configs_match_solver(self, trial: int) -> None:
        rng = np.random.default_rng(1000 + trial)
        n = 2 + trial % 2
        config = ArrayConfig(
            n,
            tuple(rng.uniform(0.5, 1.5, n)),
            tuple(rng.uniform(-0.5, 0.5, n)),
            tuple(rng.uniform(0.5, 1.5, n)),
            tuple(rng.uniform(0.0, 0.3, n)),
            tuple(rng.uniform(0.0, 0.2, n)),
            CouplingSpec.zz(float(rng.uniform(-2.0, 2.0))),
        )
        liouvillian = build_liouvillian(config)
        result = propagate_to_steady(liouvillian, DensityMatrix.ground(n), t_max=1000.0)
        expected = solve_steady_numeric(liouvillian, method="nullspace").state.matrix
        assert result.converged
        assert np.allclose(result.state.matrix, expected, atol=1e-8)

    def test_runge_kutta_path(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr("qubit_sr.steady.propagate.DENSE_SUPEROPERATOR_DIM", 0)
        liouvillian = build_liouvillian(single_qubit())
        result = propagate_to_steady(liouvillian, DensityMatrix.ground(1), t_max=100.0)
        assert result.converged
        assert np.isclose(result.state.matrix[1, 1], 1 / 3, atol=1e-8)
        assert np.isclose(result.state.matrix[0, 1], 1j / 3, atol=1e-8)

    def test_unstable_step(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr("qubit_sr.steady.propagate.DENSE_SUPEROPERATOR_DIM", 0)
        liouvillian = build_liouvillian(single_qubit())
        with pytest.raises(StepSizeUnstable, match="Reduce the step size"):
            propagate_to_steady(liouvillian, DensityMatrix.ground(1), t_max=1e4, dt=10.0)

    def test_stops_at_time_limit(self) -> None:
        liouvillian = build_liouvillian(single_qubit(1.0, 0.01))
        result = propagate_to_steady(liouvillian, DensityMatrix.ground(1), t_max=1.0)
        assert not result.converged
        assert result.time >= 1.0
        assert np.isclose(np.trace(result.state.matrix), 1)

    def test_zero_generator_returns_initial_state(self) -> None:
        zero = Liouvillian(dim=4, matrix=sp.csr_matrix((4, 4), dtype=np.complex128))
        rho0 = DensityMatrix.maximally_mixed(1)
        result = propagate_to_steady(zero, rho0, t_max=1.0)
        assert result.state is rho0
        assert result.converged and result.time == 0.0

    def test_rejects_bad_arguments(self, zz_pair: ArrayConfig) -> None:
        liouvillian = build_liouvillian(zz_pair)
        with pytest.raises(ValueError, match="dimension"):
            propagate_to_steady(liouvillian, DensityMatrix.ground(1), 1.0)
        with pytest.raises(ValueError, match="t_max"):
            propagate_to_steady(liouvillian, DensityMatrix.ground(2), 0.0)
        with pytest.raises(ValueError, match="dt"):
            propagate_to_steady(liouvillian, DensityMatrix.ground(2), 1.0, dt=-0.1)
