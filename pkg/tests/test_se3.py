import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_rotation, random_state
from liftquad.errors import NonSkewError, NumericalBlowupError, SingularInertiaError
from liftquad.se3 import (
    E1,
    E2,
    E3,
    BodyControl,
    PseudoControl,
    QuadParams,
    QuadState,
    body_to_pseudo,
    exp_so3,
    hat,
    integrate,
    project_so3,
    pseudo_to_body,
    quad_derivative,
    rotation_defect,
    vee,
)

finite_vec = st.lists(
    st.floats(min_value=-50, max_value=50, allow_nan=False), min_size=3, max_size=3
)


class TestHatVee:
    def test_hat_realizes_cross_product(self):
        np.testing.assert_allclose(hat(E1) @ E2, E3, atol=1e-15)

    def test_hat_annihilates_own_axis(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            v = rng.normal(size=3)
            np.testing.assert_allclose(hat(v) @ v, np.zeros(3), atol=1e-12)

    def test_hat_explicit_entries(self):
        expected = np.array([[0, -3, 2], [3, 0, -1], [-2, 1, 0]], dtype=float)
        np.testing.assert_allclose(hat([1, 2, 3]), expected)

    @given(finite_vec)
    @settings(max_examples=50, deadline=None)
    def test_vee_inverts_hat(self, v):
        np.testing.assert_allclose(vee(hat(v)), v, atol=1e-12)

    def test_vee_zero(self):
        np.testing.assert_allclose(vee(np.zeros((3, 3))), np.zeros(3))

    def test_vee_of_basis_hat(self):
        np.testing.assert_allclose(vee(hat(E3)), E3)

    def test_vee_rejects_non_skew(self):
        with pytest.raises(NonSkewError):
            vee(np.eye(3))

    @given(finite_vec, finite_vec)
    @settings(max_examples=50, deadline=None)
    def test_hat_matches_numpy_cross(self, a, b):
        np.testing.assert_allclose(hat(a) @ np.asarray(b), np.cross(a, b), atol=1e-9)


class TestRotations:
    def test_exp_so3_matches_dense_expm(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            phi = rng.normal(size=3)
            np.testing.assert_allclose(exp_so3(phi), scipy.linalg.expm(hat(phi)), atol=1e-12)

    def test_project_so3_restores_orthogonality(self):
        rng = np.random.default_rng(2)
        R = random_rotation(rng) + 1e-4 * rng.normal(size=(3, 3))
        P = project_so3(R)
        assert rotation_defect(P) < 1e-12
        assert np.linalg.det(P) > 0


class TestParams:
    def test_defaults(self, params):
        assert params.m == pytest.approx(0.904)
        np.testing.assert_allclose(np.diag(params.J), [0.0023, 0.0026, 0.0032])
        assert params.g == pytest.approx(9.81)

    def test_rejects_nonpositive_mass(self):
        with pytest.raises(ValueError):
            QuadParams(m=0.0)

    def test_rejects_asymmetric_inertia(self):
        J = np.diag([1.0, 1.0, 1.0])
        J[0, 1] = 0.5
        with pytest.raises(ValueError):
            QuadParams(J=J)

    def test_singular_inertia_raises_on_inverse(self):
        p = QuadParams(J=np.diag([0.0023, 0.0026, 0.0]))
        with pytest.raises(SingularInertiaError):
            p.inertia_inverse()


class TestDerivative:
    def test_hover_equilibrium(self, params):
        s = QuadState.identity()
        d = quad_derivative(s, BodyControl(params.m * params.g, np.zeros(3)), params)
        np.testing.assert_allclose(d.dx, np.zeros(3), atol=1e-15)
        np.testing.assert_allclose(d.dv, np.zeros(3), atol=1e-12)
        np.testing.assert_allclose(d.dR, np.zeros((3, 3)), atol=1e-15)
        np.testing.assert_allclose(d.domega, np.zeros(3), atol=1e-15)

    def test_free_fall(self, params):
        s = QuadState.identity()
        d = quad_derivative(s, BodyControl(0.0, np.zeros(3)), params)
        np.testing.assert_allclose(d.dv, [0.0, 0.0, -params.g])

    def test_principal_axis_spin_is_torque_free(self, params):
        s = QuadState(np.zeros(3), np.zeros(3), np.eye(3), E1)
        d = quad_derivative(s, BodyControl(0.0, np.zeros(3)), params)
        np.testing.assert_allclose(d.domega, np.zeros(3), atol=1e-12)

    def test_affine_in_control(self, params):
        # derivative(s, a u1 + b u2) = a d(u1) + b d(u2) - (a + b - 1) d(0)
        rng = np.random.default_rng(3)
        for _ in range(10):
            s = random_state(rng)
            u1 = BodyControl(rng.normal(), rng.normal(size=3))
            u2 = BodyControl(rng.normal(), rng.normal(size=3))
            a, b = rng.normal(size=2)
            mix = BodyControl(a * u1.f + b * u2.f, a * u1.M + b * u2.M)
            d_mix = quad_derivative(s, mix, params)
            d1 = quad_derivative(s, u1, params)
            d2 = quad_derivative(s, u2, params)
            d0 = quad_derivative(s, BodyControl(0.0, np.zeros(3)), params)
            for attr in ("dx", "dv", "dR", "domega"):
                lhs = getattr(d_mix, attr)
                rhs = (
                    a * getattr(d1, attr)
                    + b * getattr(d2, attr)
                    - (a + b - 1.0) * getattr(d0, attr)
                )
                np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestControlConversion:
    def test_torque_unchanged_at_zero_rate(self, params):
        s = QuadState.identity()
        u = pseudo_to_body(s, PseudoControl(2.0, [0.1, -0.2, 0.3]), params)
        np.testing.assert_allclose(u.M, [0.1, -0.2, 0.3])

    def test_roundtrip(self, params):
        rng = np.random.default_rng(4)
        for _ in range(20):
            s = random_state(rng)
            ubar = PseudoControl(rng.normal(), rng.normal(size=3))
            back = body_to_pseudo(s, pseudo_to_body(s, ubar, params), params)
            np.testing.assert_allclose(back.as_vector(), ubar.as_vector(), atol=1e-14)

    def test_spin_about_principal_axis_no_correction(self, params):
        s = QuadState(np.zeros(3), np.zeros(3), np.eye(3), E3)
        u = pseudo_to_body(s, PseudoControl(1.0, np.zeros(3)), params)
        np.testing.assert_allclose(u.M, np.zeros(3), atol=1e-15)


class TestIntegrate:
    def test_hover_is_stationary_over_1000_steps(self, params):
        s0 = QuadState.identity()
        u = BodyControl(params.m * params.g, np.zeros(3))
        traj = integrate(s0, lambda t: u, 1e-3, 1000, params)
        sT = traj.states[-1]
        assert np.linalg.norm(sT.x) < 1e-9
        assert np.linalg.norm(sT.v) < 1e-9
        assert np.linalg.norm(sT.R - np.eye(3)) < 1e-9
        assert np.linalg.norm(sT.omega) < 1e-9

    def test_constant_spin_matches_rodrigues(self):
        # gravity disabled via g ~ 0 so the only motion is the rotation
        p = QuadParams(g=1e-300)
        w = 0.3 * E3
        s0 = QuadState(np.zeros(3), np.zeros(3), np.eye(3), w)
        # torque holding constant omega: M = omega x J omega (zero here, diagonal J)
        traj = integrate(s0, lambda t: BodyControl(0.0, np.cross(w, p.J @ w)), 1e-3, 1000, p)
        R_expected = exp_so3(w * 1.0)
        np.testing.assert_allclose(traj.states[-1].R, R_expected, atol=1e-8)

    def test_torque_free_momentum_magnitude_conserved(self):
        p = QuadParams(g=1e-300)
        rng = np.random.default_rng(5)
        s0 = QuadState(np.zeros(3), np.zeros(3), np.eye(3), rng.normal(size=3))
        h0 = np.linalg.norm(p.J @ s0.omega)
        traj = integrate(s0, lambda t: BodyControl(0.0, np.zeros(3)), 1e-3, 10_000, p)
        h = np.array([np.linalg.norm(p.J @ st.omega) for st in traj.states])
        assert np.max(np.abs(h - h0)) < 1e-8

    def test_rotation_defect_below_tolerance_everywhere(self, params):
        rng = np.random.default_rng(6)
        s0 = random_state(rng)
        u = BodyControl(params.m * params.g, np.array([1e-3, -2e-3, 1e-3]))
        traj = integrate(s0, lambda t: u, 1e-3, 2000, params)
        worst = max(rotation_defect(st.R) for st in traj.states)
        assert worst < 1e-9

    def test_fourth_order_convergence(self, params):
        s0 = QuadState.identity()

        def control(t):
            return BodyControl(
                params.m * params.g * (1.0 + 0.2 * np.sin(3.0 * t)),
                1e-3 * np.array([np.sin(2 * t), np.cos(2 * t), np.sin(t)]),
            )

        def terminal(dt):
            steps = int(round(1.0 / dt))
            return integrate(s0, control, dt, steps, params).states[-1]

        ref = terminal(2e-4)

        def err(dt):
            s = terminal(dt)
            return max(
                np.max(np.abs(s.x - ref.x)),
                np.max(np.abs(s.v - ref.v)),
                np.max(np.abs(s.R - ref.R)),
                np.max(np.abs(s.omega - ref.omega)),
            )

        e1, e2 = err(4e-3), err(2e-3)
        assert e1 / e2 >= 8.0

    def test_blowup_guard(self, params):
        s0 = QuadState.identity()
        with pytest.raises(NumericalBlowupError):
            integrate(s0, lambda t: BodyControl(1e7, np.zeros(3)), 1e-2, 2000, params, guard=1e6)

    def test_rejects_nonpositive_dt(self, params):
        with pytest.raises(ValueError):
            integrate(QuadState.identity(), lambda t: BodyControl(0, np.zeros(3)), 0.0, 1, params)
