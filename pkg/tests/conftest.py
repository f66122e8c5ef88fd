import numpy as np
import pytest

from liftquad.se3 import QuadParams, QuadState, exp_so3


@pytest.fixture
def params():
    return QuadParams()


def random_rotation(rng):
    return exp_so3(rng.normal(size=3))


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_state(rng, pos_scale=2.0, vel_scale=2.0, omega_norm=0.7, exact_omega=False):
    """Bounded random state; omega_norm is the max (or exact) body-rate norm."""
    w = random_unit(rng) * (omega_norm if exact_omega else rng.uniform(0.0, omega_norm))
    return QuadState(
        x=rng.uniform(-pos_scale, pos_scale, size=3),
        v=rng.uniform(-vel_scale, vel_scale, size=3),
        R=random_rotation(rng),
        omega=w,
    )


def random_pseudo(rng, max_norm=10.0):
    from liftquad.se3 import PseudoControl

    u = rng.normal(size=4)
    u *= rng.uniform(0.0, max_norm) / np.linalg.norm(u)
    return PseudoControl(u[0], u[1:])


def flow_step(s, ubar, h, p):
    """One RK4 step of size h (sign allowed) along the pseudo-controlled flow.

    No attitude re-projection: used by finite-difference oracles where the
    projection would perturb the derivative being measured.
    """
    from liftquad.se3 import QuadState, _make_pseudo_rhs, _rk4_step

    rhs = _make_pseudo_rhs(lambda t: ubar, p, 0.0)
    x, v, R, w = _rk4_step(s.x, s.v, s.R, s.omega, h, rhs)
    return QuadState(x, v, R, w)


def fd_lift_derivative(s, ubar, p, order, h=1e-6):
    """Central finite difference of lift(flow(t)) at t = 0."""
    from liftquad.lifting import lift

    fwd = lift(flow_step(s, ubar, h, p), p, order)
    bwd = lift(flow_step(s, ubar, -h, p), p, order)
    return (fwd - bwd) / (2.0 * h)
