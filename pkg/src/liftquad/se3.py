"""Quadrotor rigid-body dynamics on SE(3).

This is the ground-truth plant used by every other module. Thrust acts along
the body z-axis, gravity along -e3 in the inertial frame, and the attitude is
carried as a rotation matrix that is re-orthonormalized (polar projection)
after every integration step.

Two control parameterizations exist side by side:

* ``BodyControl``   u = (f, M): total thrust and body torque.
* ``PseudoControl`` ubar = (f, Mbar) with Mbar = M - omega x (J omega), which
  makes the angular acceleration exactly J^-1 Mbar and is the input the lifted
  linear models are affine in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import (
    InvalidRotationError,
    NonSkewError,
    NumericalBlowupError,
    SingularInertiaError,
)

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

ROTATION_TOL = 1e-9


def hat(v) -> np.ndarray:
    """Skew-symmetric matrix S with S @ q == np.cross(v, q)."""
    v = np.asarray(v, dtype=float)
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def vee(S, tol: float = 1e-9) -> np.ndarray:
    """Inverse of :func:`hat`; raises ``NonSkewError`` if S is not skew."""
    S = np.asarray(S, dtype=float)
    if float(np.max(np.abs(S + S.T))) > tol:
        raise NonSkewError(f"matrix is not skew-symmetric within {tol:g}")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def skew_part(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    return 0.5 * (S - S.T)


def exp_so3(phi) -> np.ndarray:
    """Rodrigues formula: matrix exponential of hat(phi)."""
    phi = np.asarray(phi, dtype=float)
    angle = float(np.linalg.norm(phi))
    K = hat(phi)
    if angle < 1e-12:
        # second-order series is exact to machine precision here
        return np.eye(3) + K + 0.5 * (K @ K)
    K = K / angle
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def project_so3(R) -> np.ndarray:
    """Nearest rotation matrix in the Frobenius sense (polar projection)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    D = np.array([1.0, 1.0, np.sign(np.linalg.det(U @ Vt))])
    return (U * D) @ Vt


def rotation_defect(R) -> float:
    """Frobenius distance of R^T R from the identity."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def check_rotation(R, tol: float = ROTATION_TOL) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if rotation_defect(R) > tol or abs(float(np.linalg.det(R)) - 1.0) > tol:
        raise InvalidRotationError(
            f"matrix is not a rotation within {tol:g} "
            f"(defect {rotation_defect(R):.3e}, det {np.linalg.det(R):.9f})"
        )
    return R


@dataclass
class QuadParams:
    """Quadrotor mass/inertia parameters.

    Attributes:
        m: total mass [kg]
        J: 3x3 inertia matrix in the body frame [kg m^2]
        g: gravitational acceleration magnitude [m/s^2]; stored positive,
           the dynamics apply the minus sign.
    """

    m: float = 0.904
    J: np.ndarray = field(default_factory=lambda: np.diag([0.0023, 0.0026, 0.0032]))
    g: float = 9.81

    def __post_init__(self):
        self.J = np.asarray(self.J, dtype=float)
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.J.shape != (3, 3):
            raise ValueError("inertia matrix must be 3x3")
        if float(np.max(np.abs(self.J - self.J.T))) > 1e-12 * max(1.0, float(np.max(np.abs(self.J)))):
            raise ValueError("inertia matrix must be symmetric")
        if not self.g > 0:
            raise ValueError(f"gravity magnitude must be positive, got {self.g}")

    def inertia_inverse(self) -> np.ndarray:
        """J^-1, raising ``SingularInertiaError`` when J is not invertible."""
        eigs = np.linalg.eigvalsh(self.J)
        if eigs[0] <= 1e-12 * max(eigs[-1], 1e-300):
            raise SingularInertiaError(
                f"inertia matrix is singular (eigenvalues {eigs})"
            )
        return np.linalg.inv(self.J)


@dataclass
class QuadState:
    """State of the rigid body: position/velocity (inertial), attitude, rate (body)."""

    x: np.ndarray
    v: np.ndarray
    R: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(3)
        self.v = np.asarray(self.v, dtype=float).reshape(3)
        self.R = np.asarray(self.R, dtype=float).reshape(3, 3)
        self.omega = np.asarray(self.omega, dtype=float).reshape(3)

    def copy(self) -> "QuadState":
        return QuadState(self.x.copy(), self.v.copy(), self.R.copy(), self.omega.copy())

    def validate(self, tol: float = ROTATION_TOL) -> "QuadState":
        check_rotation(self.R, tol)
        return self

    @classmethod
    def identity(cls) -> "QuadState":
        return cls(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))


@dataclass
class BodyControl:
    """Thrust magnitude f [N] and body torque M [N m]."""

    f: float
    M: np.ndarray

    def __post_init__(self):
        self.f = float(self.f)
        self.M = np.asarray(self.M, dtype=float).reshape(3)


@dataclass
class PseudoControl:
    """Thrust f [N] and gyroscopic-compensated torque Mbar = M - omega x J omega."""

    f: float
    Mbar: np.ndarray

    def __post_init__(self):
        self.f = float(self.f)
        self.Mbar = np.asarray(self.Mbar, dtype=float).reshape(3)

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.f], self.Mbar))

    @classmethod
    def from_vector(cls, u) -> "PseudoControl":
        u = np.asarray(u, dtype=float).reshape(4)
        return cls(u[0], u[1:])


@dataclass
class QuadDerivative:
    dx: np.ndarray
    dv: np.ndarray
    dR: np.ndarray
    domega: np.ndarray


def pseudo_to_body(s: QuadState, ubar: PseudoControl, p: QuadParams) -> BodyControl:
    """M = Mbar + omega x (J omega); thrust unchanged."""
    return BodyControl(ubar.f, ubar.Mbar + np.cross(s.omega, p.J @ s.omega))


def body_to_pseudo(s: QuadState, u: BodyControl, p: QuadParams) -> PseudoControl:
    return PseudoControl(u.f, u.M - np.cross(s.omega, p.J @ s.omega))


def quad_derivative(s: QuadState, u: BodyControl, p: QuadParams) -> QuadDerivative:
    """Time derivative of the state under thrust/torque input."""
    dx = s.v.copy()
    dv = (u.f / p.m) * s.R[:, 2] - p.g * E3
    dR = s.R @ hat(s.omega)
    domega = np.linalg.solve(p.J, u.M - np.cross(s.omega, p.J @ s.omega))
    return QuadDerivative(dx, dv, dR, domega)


def quad_derivative_pseudo(s: QuadState, ubar: PseudoControl, p: QuadParams) -> QuadDerivative:
    """Same plant, parameterized by the gyroscopic-compensated torque."""
    dx = s.v.copy()
    dv = (ubar.f / p.m) * s.R[:, 2] - p.g * E3
    dR = s.R @ hat(s.omega)
    domega = np.linalg.solve(p.J, ubar.Mbar)
    return QuadDerivative(dx, dv, dR, domega)


@dataclass
class Trajectory:
    """Fixed-step state history; times[i] == i * dt + t0."""

    times: np.ndarray
    states: List[QuadState]

    def __len__(self) -> int:
        return len(self.states)


def _rk4_step(x, v, R, w, dt, rhs):
    """One classical RK4 step over the raw state arrays.

    ``rhs(t_frac, x, v, R, w)`` returns (dx, dv, dR, dw) where t_frac is the
    stage offset within [0, dt].
    """
    k1 = rhs(0.0, x, v, R, w)
    k2 = rhs(0.5 * dt, x + 0.5 * dt * k1[0], v + 0.5 * dt * k1[1], R + 0.5 * dt * k1[2], w + 0.5 * dt * k1[3])
    k3 = rhs(0.5 * dt, x + 0.5 * dt * k2[0], v + 0.5 * dt * k2[1], R + 0.5 * dt * k2[2], w + 0.5 * dt * k2[3])
    k4 = rhs(dt, x + dt * k3[0], v + dt * k3[1], R + dt * k3[2], w + dt * k3[3])
    c = dt / 6.0
    return (
        x + c * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        v + c * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        R + c * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        w + c * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    )


def _guard(x, v, w, guard, R=None):
    m = max(float(np.max(np.abs(x))), float(np.max(np.abs(v))), float(np.max(np.abs(w))))
    if R is not None:
        m = max(m, float(np.max(np.abs(R))))
    if not np.isfinite(m) or m > guard:
        raise NumericalBlowupError(f"state magnitude {m:.3e} exceeded guard {guard:.3e}")


def _make_body_rhs(control: Callable[[float], BodyControl], p: QuadParams, t0: float):
    Jinv = p.inertia_inverse()
    J = p.J
    m = p.m
    g = p.g

    def rhs(t_off, x, v, R, w):
        u = control(t0 + t_off)
        dv = (u.f / m) * R[:, 2]
        dv = dv - g * E3
        return v, dv, R @ hat(w), Jinv @ (u.M - np.cross(w, J @ w))

    return rhs


def _make_pseudo_rhs(control: Callable[[float], PseudoControl], p: QuadParams, t0: float):
    Jinv = p.inertia_inverse()
    m = p.m
    g = p.g

    def rhs(t_off, x, v, R, w):
        u = control(t0 + t_off)
        dv = (u.f / m) * R[:, 2]
        dv = dv - g * E3
        return v, dv, R @ hat(w), Jinv @ u.Mbar

    return rhs


def _integrate(s0, rhs_factory, control, dt, steps, p, guard, t0):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    s0.validate()
    x, v, R, w = s0.x.copy(), s0.v.copy(), s0.R.copy(), s0.omega.copy()
    times = t0 + dt * np.arange(steps + 1)
    states = [QuadState(x, v, R, w)]
    for i in range(steps):
        rhs = rhs_factory(control, p, float(times[i]))
        x, v, R, w = _rk4_step(x, v, R, w, dt, rhs)
        _guard(x, v, w, guard, R)
        R = project_so3(R)
        states.append(QuadState(x, v, R, w))
    return Trajectory(times, states)


def integrate(
    s0: QuadState,
    control: Callable[[float], BodyControl],
    dt: float,
    steps: int,
    p: QuadParams,
    guard: float = 1e6,
    t0: float = 0.0,
) -> Trajectory:
    """Propagate the plant with RK4 at a fixed step under a thrust/torque schedule.

    The attitude is polar-projected back onto SO(3) after every step; a
    ``NumericalBlowupError`` is raised when any state magnitude exceeds
    ``guard``.
    """
    return _integrate(s0, _make_body_rhs, control, dt, steps, p, guard, t0)


def integrate_pseudo(
    s0: QuadState,
    control: Callable[[float], PseudoControl],
    dt: float,
    steps: int,
    p: QuadParams,
    guard: float = 1e6,
    t0: float = 0.0,
) -> Trajectory:
    """Same as :func:`integrate` but driven by a pseudo-control schedule."""
    return _integrate(s0, _make_pseudo_rhs, control, dt, steps, p, guard, t0)


def step_constant_control(
    s: QuadState, u: BodyControl, dt: float, substeps: int, p: QuadParams, guard: float = 1e6
) -> QuadState:
    """Advance one sampling interval holding u constant (used by the closed loop)."""
    x, v, R, w = s.x, s.v, s.R, s.omega
    Jinv = p.inertia_inverse()
    J, m, g = p.J, p.m, p.g
    h = dt / substeps

    def rhs(t_off, x_, v_, R_, w_):
        dv = (u.f / m) * R_[:, 2]
        dv = dv - g * E3
        return v_, dv, R_ @ hat(w_), Jinv @ (u.M - np.cross(w_, J @ w_))

    for _ in range(substeps):
        x, v, R, w = _rk4_step(x, v, R, w, h, rhs)
        _guard(x, v, w, guard, R)
        R = project_so3(R)
    return QuadState(x, v, R, w)
