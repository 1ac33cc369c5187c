import numpy as np
import pytest
from numpy.testing import assert_allclose

from qwalk import (
    DensityMatrix,
    FockSpace,
    MasterEqParams,
    StabilityBoundError,
    TruncationInadequateError,
    adjoint_action_check,
    coherent_state,
    coin_trace_channel,
    cs_qrw_step,
    cs_step_unitary,
    dagger,
    diffusion_limit_check,
    displacement,
    hw_functional,
    hw_transition_monomial,
    integrate_dual,
    integrate_master_eq,
    master_eq_rhs,
    trace_norm,
)


def vacuum(m):
    v = np.zeros((m, m), dtype=complex)
    v[0, 0] = 1.0
    return DensityMatrix(v)


def coherent_projector(alpha, f):
    cs = coherent_state(alpha, f)
    return np.outer(cs, cs.conj())


class TestFockSpace:
    def test_ladder_structure(self):
        f = FockSpace(6)
        for n in range(1, 6):
            col = np.zeros(6)
            col[n] = 1.0
            out = f.a @ col
            assert abs(out[n - 1] - np.sqrt(n)) < 1e-15

    def test_commutator_on_leading_block(self):
        f = FockSpace(16)
        comm = f.a @ f.a_dag - f.a_dag @ f.a
        assert np.max(np.abs(comm[:15, :15] - np.eye(15))) < 1e-12

    def test_number_operator(self):
        f = FockSpace(8)
        assert_allclose(f.num, np.diag(np.arange(8.0)))


class TestCoherentState:
    def test_vacuum(self):
        f = FockSpace(16)
        cs = coherent_state(0.0, f)
        assert_allclose(cs, np.eye(16)[0], atol=1e-15)

    def test_annihilation_eigenvector(self):
        f = FockSpace(32)
        for alpha in (1.0, 0.5 + 0.7j):
            cs = coherent_state(alpha, f)
            assert np.max(np.abs(f.a @ cs - alpha * cs)) < 1e-7

    def test_unit_norm(self):
        f = FockSpace(32)
        assert abs(np.vdot(coherent_state(1.0, f), coherent_state(1.0, f)) - 1.0) < 1e-14

    def test_truncation_guard(self):
        with pytest.raises(TruncationInadequateError):
            coherent_state(3.0, FockSpace(12))


class TestDisplacement:
    def test_zero_is_identity(self):
        f = FockSpace(12)
        assert_allclose(displacement(0.0, f), np.eye(12), atol=1e-14)

    def test_displaced_vacuum_is_coherent(self):
        f = FockSpace(32)
        for alpha in (0.3, 1.0, 0.4 - 0.6j):
            d = displacement(alpha, f)
            cs = coherent_state(alpha, f)
            assert np.max(np.abs(d[:, 0] - cs)) < 1e-7

    def test_collinear_composition(self):
        f = FockSpace(32)
        d = displacement(0.4, f) @ displacement(0.6, f)
        assert np.max(np.abs(d - displacement(1.0, f))) < 1e-6

    def test_unitarity(self):
        f = FockSpace(64)
        for alpha in (0.5, 1.5, 2.0):
            d = displacement(alpha, f)
            assert np.max(np.abs(d @ dagger(d) - np.eye(64))) < 1e-9


class TestTransitionMonomial:
    def test_zero_exponents_identity(self):
        f = FockSpace(10)
        assert_allclose(hw_transition_monomial(0, 0, 0.3, 0.5, f), np.eye(10), atol=1e-14)

    def test_balanced_linear_term(self):
        f = FockSpace(10)
        assert_allclose(hw_transition_monomial(0, 1, 0.5, 0.7, f), f.a, atol=1e-14)

    def test_expansion_oracle(self):
        # p = 1, alpha = 1: (ad + 1)(a + 1) = ad a + ad + a + 1
        f = FockSpace(12)
        got = hw_transition_monomial(1, 1, 1.0, 1.0, f)
        want = f.a_dag @ f.a + f.a_dag + f.a + np.eye(12)
        assert_allclose(got, want, atol=1e-13)

    def test_functional_examples(self):
        assert hw_functional(0, 0, 0.37, 0.5 + 0.1j) == 1.0
        alpha = 0.8 + 0.3j
        assert abs(hw_functional(1, 1, 0.5, alpha) - abs(alpha) ** 2) < 1e-15

    def test_functional_matches_density_trace(self):
        f = FockSpace(32)
        alpha, p = 0.9, 0.35
        rho = p * coherent_projector(alpha, f) + (1 - p) * coherent_projector(-alpha, f)
        for m_exp, n_exp in ((0, 1), (1, 0), (1, 1), (2, 0), (0, 2)):
            mono = np.linalg.matrix_power(f.a_dag, m_exp) @ np.linalg.matrix_power(f.a, n_exp)
            via_trace = np.trace(rho @ mono)
            assert abs(via_trace - hw_functional(m_exp, n_exp, p, alpha)) < 1e-6


class TestAdjointAction:
    def test_identity_fixed(self):
        f = FockSpace(24)
        rep = adjoint_action_check(np.eye(24), 0.4, 0.5, f)
        assert rep.max_block_deviation < 1e-10

    def test_linear_shift(self):
        # both routes send a to a + (2p - 1) alpha
        f = FockSpace(32)
        p, alpha = 0.3, 0.45
        rep = adjoint_action_check(f.a, p, alpha, f)
        assert rep.max_block_deviation < 1e-8
        d = displacement(-alpha, f)
        direct = p * (d @ f.a @ dagger(d)) + (1 - p) * (
            displacement(alpha, f) @ f.a @ dagger(displacement(alpha, f))
        )
        want = f.a + (2 * p - 1) * alpha * np.eye(32)
        assert np.max(np.abs(direct[:16, :16] - want[:16, :16])) < 1e-8

    def test_number_operator_dual_path(self):
        f = FockSpace(48)
        rep = adjoint_action_check(f.num, 0.5, 0.5, f, block=16)
        assert rep.max_block_deviation < 1e-6
        assert rep.fit_residual < 1e-10

    def test_degree_two_linearity(self, rng):
        # the transition action is term-by-term on ordered polynomials
        f = FockSpace(40)
        p, alpha = 0.6, 0.4
        coeffs = rng.normal(size=6) + 1j * rng.normal(size=6)
        basis = [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1)]
        poly = sum(
            c * np.linalg.matrix_power(f.a_dag, m) @ np.linalg.matrix_power(f.a, n)
            for c, (m, n) in zip(coeffs, basis)
        )
        rep = adjoint_action_check(poly, p, alpha, f, block=13)
        term_sum = sum(
            c * hw_transition_monomial(m, n, p, alpha, f) for c, (m, n) in zip(coeffs, basis)
        )
        d_minus, d_plus = displacement(-alpha, f), displacement(alpha, f)
        direct = p * (d_minus @ poly @ dagger(d_minus)) + (1 - p) * (d_plus @ poly @ dagger(d_plus))
        assert np.max(np.abs(direct[:13, :13] - term_sum[:13, :13])) < 1e-10
        assert rep.max_block_deviation < 1e-6


class TestCsQrwStep:
    def test_pure_displacement_of_vacuum(self):
        f = FockSpace(32)
        out = cs_qrw_step(vacuum(32), 1.0, 0.8, f)
        assert np.max(np.abs(out.mat - coherent_projector(0.8, f))) < 1e-7

    def test_trace_preserved_over_twenty_steps(self):
        f = FockSpace(32)
        rho = vacuum(32)
        for _ in range(20):
            rho = cs_qrw_step(rho, 0.5, 0.1, f)
        assert abs(np.trace(rho.mat) - 1.0) < 1e-12

    def test_matches_block_unitary_trace(self, rng):
        f = FockSpace(24)
        p, beta = 0.35, 0.2
        rho = vacuum(24)
        rho = cs_qrw_step(rho, 0.5, 0.15, f)  # move off the vacuum first
        v = cs_step_unitary(p, beta, f)
        via_trace = coin_trace_channel(v, rho, f)
        via_kraus = cs_qrw_step(rho, p, beta, f).mat
        assert np.max(np.abs(via_trace - via_kraus)) < 1e-11

    def test_truncation_guard(self):
        f = FockSpace(16)
        edge = np.zeros((16, 16), dtype=complex)
        edge[15, 15] = 1.0
        with pytest.raises(TruncationInadequateError):
            cs_qrw_step(DensityMatrix(edge), 0.5, 0.1, f)


class TestMasterEquation:
    def test_rhs_traceless_and_hermitian(self):
        f = FockSpace(20)
        params = MasterEqParams(c=0.0, gamma=0.07)
        rhs = master_eq_rhs(DensityMatrix.maximally_mixed(20), params, f)
        assert abs(np.trace(rhs)) < 1e-14
        assert np.max(np.abs(rhs - dagger(rhs))) < 1e-14

    def test_drift_moment(self):
        # gamma = 0, real c: d<a>/dt = c
        f = FockSpace(24)
        c = 0.4
        rhs = master_eq_rhs(vacuum(24), MasterEqParams(c=c, gamma=0.0), f)
        assert abs(np.trace(f.a @ rhs) - c) < 1e-8

    def test_zero_params_fixed_point(self):
        f = FockSpace(16)
        rho = vacuum(16)
        out = integrate_master_eq(rho, MasterEqParams(0.0, 0.0), 1.0, 1e-2, f)
        assert np.max(np.abs(out.mat - rho.mat)) < 1e-14

    def test_coherent_drift_trajectory(self):
        f = FockSpace(32)
        c = 1.0
        out = integrate_master_eq(vacuum(32), MasterEqParams(c=c, gamma=0.0), 0.5, 1e-3, f)
        mean_a = np.trace(f.a @ out.mat)
        assert abs(mean_a - c * 0.5) < 1e-6

    def test_trace_drift_tiny(self):
        f = FockSpace(40)
        out = integrate_master_eq(vacuum(40), MasterEqParams(c=0.0, gamma=0.05), 1.0, 1e-3, f)
        assert abs(np.trace(out.mat) - 1.0) < 1e-9

    def test_fourth_order_convergence(self):
        f = FockSpace(16)
        params = MasterEqParams(c=0.2, gamma=0.04)
        rho0 = vacuum(16)
        ref = integrate_master_eq(rho0, params, 0.5, 3.125e-4, f).mat
        err_coarse = np.max(np.abs(integrate_master_eq(rho0, params, 0.5, 5e-3, f).mat - ref))
        err_fine = np.max(np.abs(integrate_master_eq(rho0, params, 0.5, 2.5e-3, f).mat - ref))
        assert 10.0 < err_coarse / err_fine < 22.0

    def test_stability_guard(self):
        f = FockSpace(40)
        with pytest.raises(StabilityBoundError):
            integrate_master_eq(vacuum(40), MasterEqParams(0.0, 0.5), 1.0, 1e-2, f)

    def test_duality(self):
        # Tr(rho0 f_t) = Tr(rho_t f0) for degree <= 2 observables
        f = FockSpace(32)
        params = MasterEqParams(c=0.3, gamma=0.05)
        rho0 = DensityMatrix(coherent_projector(0.4, f))
        t, dt = 0.5, 1e-3
        rho_t = integrate_master_eq(rho0, params, t, dt, f)
        for obs in (f.a + f.a_dag, f.num):
            obs_t = integrate_dual(obs, params, t, dt, f)
            lhs = np.trace(rho0.mat @ obs_t)
            rhs = np.trace(rho_t.mat @ obs)
            assert abs(lhs - rhs) < 1e-6


class TestDiffusionLimit:
    def test_deviations_shrink(self):
        f = FockSpace(40)
        rep = diffusion_limit_check(0.0, 0.05, 1.0, [8, 16, 32, 64], f)
        assert rep.strictly_decreasing
        assert rep.deviations[3] < rep.deviations[1] / 2
        assert rep.reference_trace_drift < 1e-9

    def test_tiny_gamma_trivial(self):
        f = FockSpace(16)
        rep = diffusion_limit_check(0.0, 1e-8, 1.0, [4, 8], f, dt=1e-2)
        assert all(d < 1e-6 for d in rep.deviations)

    def test_drift_scaling_valid_range(self):
        f = FockSpace(24)
        rep = diffusion_limit_check(0.05, 0.05, 1.0, [16, 32], f, dt=2e-3)
        for e in rep.entries:
            assert 0.0 <= e.p <= 1.0

    def test_invalid_scaling_raises(self):
        from qwalk import ScalingInvalidError

        f = FockSpace(24)
        with pytest.raises(ScalingInvalidError):
            diffusion_limit_check(5.0, 1e-4, 1.0, [4], f, dt=1e-2)

    def test_trace_norm(self):
        m = np.diag([0.5, -0.25, 0.0]).astype(complex)
        assert abs(trace_norm(m) - 0.75) < 1e-14
