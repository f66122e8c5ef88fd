"""Lifted linear models: the constant drift matrix, the state-dependent input
matrix, the constant-selector LTI form with virtual controls, and the
least-squares maps between the 4-dim thrust/torque input and the virtual
control.

Conventions (shared with :mod:`liftquad.lifting`):

* lifted layout  [p_1..p_M | y_1..y_M | h_1..h_M | z_1..z_N];
* virtual-control layout
  [u_h1..u_h(M-1) | u_y0..u_y(M-1) | u_p1..u_p(M-1) | u_a1..u_a(N-1)],
  where component u_*k enters the lifted row of chain block k+1;
* the terminal block-row of every chain carries no state coupling in A
  (the dropped content is what :func:`liftquad.lifting.residual_blocks`
  reports) while the input matrix keeps its full control blocks on all rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import RankDeficientError
from .lifting import TruncationOrder, gravity_observable, lift, unvec_cm, vec_cm
from .se3 import E3, PseudoControl, QuadParams, QuadState, hat, skew_part

I3 = np.eye(3)
I9 = np.eye(9)


def build_A(order: TruncationOrder) -> np.ndarray:
    """Constant drift matrix of the truncated lifted dynamics.

    Non-terminal rows couple each block to its successor, plus the companion
    chain for the position/velocity rows:

        p_k row: I at p_{k+1} and at y_k        (k < M)
        y_k row: I at y_{k+1} and at h_k        (k < M)
        h_k row: I at h_{k+1}                   (k < M)
        z_j row: I at z_{j+1}                   (j < N)

    Terminal rows are identically zero, so A is nilpotent with exactly
    9 (M + N - 2) nonzero rows.
    """
    A = np.zeros((order.dim, order.dim))
    for k in range(1, order.M):
        A[order.p_block(k), order.p_block(k + 1)] = I3
        A[order.p_block(k), order.y_block(k)] = I3
        A[order.y_block(k), order.y_block(k + 1)] = I3
        A[order.y_block(k), order.h_block(k)] = I3
        A[order.h_block(k), order.h_block(k + 1)] = I3
    for j in range(1, order.N):
        A[order.z_block(j), order.z_block(j + 1)] = I9
    return A


def _power_list(T: np.ndarray, count: int) -> List[np.ndarray]:
    """[I, T, T^2, ..., T^count]."""
    pows = [np.eye(3)]
    for _ in range(count):
        pows.append(T @ pows[-1])
    return pows


def _coupling_sum(OT_pows: List[np.ndarray], a: np.ndarray, k: int) -> np.ndarray:
    """sum_{i=1..k} (Omega^T)^(i-1) hat((Omega^T)^(k-i) a).

    Left-multiplying the body rate derivative, this is the torque-to-row map of
    chain row k+1 (before the inertia inverse).
    """
    S = np.zeros((3, 3))
    for i in range(1, k + 1):
        S += OT_pows[i - 1] @ hat(OT_pows[k - i] @ a)
    return S


def _input_matrix_core(
    R: np.ndarray,
    Omega: np.ndarray,
    p1: np.ndarray,
    y1: np.ndarray,
    h1: np.ndarray,
    Jinv: np.ndarray,
    m: float,
    order: TruncationOrder,
) -> np.ndarray:
    M, N = order.M, order.N
    kmax = max(M, N)
    OT_pows = _power_list(Omega.T, kmax)
    O_pows = _power_list(Omega, kmax)

    B = np.zeros((order.dim, 4))
    # thrust column: row y_{k+1} gets (Omega^T)^k e3 / m
    for k in range(M):
        B[order.y_block(k + 1), 0] = OT_pows[k] @ (E3 / m)
    # torque columns of the positional chains: row of block k+1 gets the
    # coupling sum of its first block, times J^-1
    for k in range(1, M):
        B[order.p_block(k + 1), 1:] = _coupling_sum(OT_pows, p1, k) @ Jinv
        B[order.y_block(k + 1), 1:] = _coupling_sum(OT_pows, y1, k) @ Jinv
        B[order.h_block(k + 1), 1:] = _coupling_sum(OT_pows, h1, k) @ Jinv
    # attitude chain: row z_{k+1}, column m gets
    # vec(R sum_{i=1..k} Omega^(i-1) hat(j_m) Omega^(k-i)) with j_m = J^-1 e_m
    for k in range(1, N):
        for col in range(3):
            S = np.zeros((3, 3))
            jm_hat = hat(Jinv[:, col])
            for i in range(1, k + 1):
                S += O_pows[i - 1] @ jm_hat @ O_pows[k - i]
            B[order.z_block(k + 1), 1 + col] = vec_cm(R @ S)
    return B


def build_B(s: QuadState, p: QuadParams, order: TruncationOrder) -> np.ndarray:
    """State-dependent input matrix of the lifted dynamics, shape (9(M+N), 4)."""
    Jinv = p.inertia_inverse()
    R = s.R
    return _input_matrix_core(
        R, hat(s.omega), R.T @ s.x, R.T @ s.v, R.T @ gravity_observable(p), Jinv, p.m, order
    )


def build_B_from_lifted(X, p: QuadParams, order: TruncationOrder) -> np.ndarray:
    """Input matrix evaluated directly from a lifted vector.

    Used when propagating the lifted model itself: attitude and rate are read
    from the first two attitude blocks (the rate as the skew part, tolerant of
    small drift off SO(3)).
    """
    X = np.asarray(X, dtype=float)
    R = unvec_cm(X[order.z_block(1)])
    if order.N >= 2:
        Omega = skew_part(R.T @ unvec_cm(X[order.z_block(2)]))
    else:
        Omega = np.zeros((3, 3))
    return _input_matrix_core(
        R,
        Omega,
        X[order.p_block(1)],
        X[order.y_block(1)],
        X[order.h_block(1)],
        p.inertia_inverse(),
        p.m,
        order,
    )


def build_Bbar(order: TruncationOrder) -> np.ndarray:
    """Constant 0/1 selector routing each virtual-control component to its row.

    Columns are disjoint unit selectors, so Bbar^T Bbar = I. Rows p_1, h_1 and
    z_1 receive nothing (those rows have no control in the lifted dynamics).
    """
    if order.M < 2 or order.N < 2:
        raise ValueError("selector construction needs M >= 2 and N >= 2")
    B = np.zeros((order.dim, order.control_dim))
    col = 0
    for k in range(1, order.M):
        B[order.h_block(k + 1), col : col + 3] = I3
        col += 3
    for k in range(0, order.M):
        B[order.y_block(k + 1), col : col + 3] = I3
        col += 3
    for k in range(1, order.M):
        B[order.p_block(k + 1), col : col + 3] = I3
        col += 3
    for k in range(1, order.N):
        B[order.z_block(k + 1), col : col + 9] = I9
        col += 9
    assert col == order.control_dim
    return B


def virtual_slices(order: TruncationOrder) -> dict:
    """Named slices into a virtual-control vector, e.g. 'h1', 'y0', 'a2'."""
    out = {}
    col = 0
    for k in range(1, order.M):
        out[f"h{k}"] = slice(col, col + 3)
        col += 3
    for k in range(0, order.M):
        out[f"y{k}"] = slice(col, col + 3)
        col += 3
    for k in range(1, order.M):
        out[f"p{k}"] = slice(col, col + 3)
        col += 3
    for k in range(1, order.N):
        out[f"a{k}"] = slice(col, col + 9)
        col += 9
    return out


def pack_virtual(
    s: QuadState, ubar: PseudoControl, p: QuadParams, order: TruncationOrder
) -> np.ndarray:
    """Virtual control realized by a thrust/torque input at a given state.

    Each component is the corresponding input-matrix row block applied to
    ubar, so Bbar @ pack_virtual(...) == build_B(...) @ ubar identically.
    """
    B = build_B(s, p, order)
    u = ubar.as_vector()
    parts = []
    for k in range(1, order.M):
        parts.append(B[order.h_block(k + 1)] @ u)
    for k in range(0, order.M):
        parts.append(B[order.y_block(k + 1)] @ u)
    for k in range(1, order.M):
        parts.append(B[order.p_block(k + 1)] @ u)
    for k in range(1, order.N):
        parts.append(B[order.z_block(k + 1)] @ u)
    return np.concatenate(parts)


def recover_control(
    s: QuadState,
    U,
    p: QuadParams,
    order: TruncationOrder,
    rank_tol: float = 1e-10,
) -> PseudoControl:
    """Least-squares thrust/torque input realizing a virtual control.

    Minimizes || B(X) ubar - Bbar U ||_2. Unique whenever the input matrix has
    full column rank, which holds for any invertible inertia matrix; a
    ``RankDeficientError`` flags the numerical failure of that hypothesis.
    """
    U = np.asarray(U, dtype=float).reshape(order.control_dim)
    B = build_B(s, p, order)
    sv = np.linalg.svd(B, compute_uv=False)
    if sv[-1] < rank_tol * sv[0]:
        raise RankDeficientError(
            f"input matrix nearly rank deficient (sv ratio {sv[-1] / sv[0]:.3e})"
        )
    target = build_Bbar(order) @ U
    ubar, *_ = np.linalg.lstsq(B, target, rcond=None)
    return PseudoControl.from_vector(ubar)


def map_control_bounds(
    s: QuadState, ubar_b: PseudoControl, p: QuadParams, order: TruncationOrder
) -> np.ndarray:
    """Virtual-control image of a thrust/torque bound at a given state.

    Least-squares solution of Bbar U = B(X) ubar_b; unique because the
    selector columns are linearly independent (orthonormal, in fact, so this
    equals pack_virtual at the same state).
    """
    B = build_B(s, p, order)
    Bbar = build_Bbar(order)
    U, *_ = np.linalg.lstsq(Bbar, B @ ubar_b.as_vector(), rcond=None)
    return U


def nilpotent_expm(A: np.ndarray, t: float) -> np.ndarray:
    """exp(A t) for nilpotent A via the terminating Taylor sum (exact)."""
    n = A.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for i in range(1, n + 1):
        term = (t / i) * (A @ term)
        if not np.any(term):
            break
        out = out + term
    return out


def nilpotency_index(A: np.ndarray) -> int:
    """Smallest q with A^q == 0 (A must be nilpotent)."""
    n = A.shape[0]
    P = np.eye(n)
    for q in range(n + 1):
        if not np.any(P):
            return q
        P = A @ P
    raise ValueError("matrix is not nilpotent")


@dataclass
class LpvSystem:
    """Lifted dynamics with the state-dependent input matrix: dX = A X + B(X) ubar."""

    A: np.ndarray
    order: TruncationOrder
    params: QuadParams

    def input_matrix(self, s: QuadState) -> np.ndarray:
        return build_B(s, self.params, self.order)

    def derivative(self, s: QuadState, ubar: PseudoControl) -> np.ndarray:
        X = lift(s, self.params, self.order)
        return self.A @ X + self.input_matrix(s) @ ubar.as_vector()


@dataclass
class LtiSystem:
    """Constant-matrix form dX = A X + Bbar U with the virtual control U."""

    A: np.ndarray
    Bbar: np.ndarray
    order: TruncationOrder
    params: QuadParams


def build_lpv(p: QuadParams, order: TruncationOrder) -> LpvSystem:
    p.inertia_inverse()  # fail fast on singular inertia
    return LpvSystem(build_A(order), order, p)


def build_lti(p: QuadParams, order: TruncationOrder) -> LtiSystem:
    p.inertia_inverse()
    return LtiSystem(build_A(order), build_Bbar(order), order, p)


def lpv_derivative(s: QuadState, ubar: PseudoControl, sys: LpvSystem) -> np.ndarray:
    """A lift(s) + B(s) ubar.

    Equals the exact observable derivative on every chain row below the
    truncation order; on terminal rows it misses exactly the
    :func:`liftquad.lifting.residual_blocks` content.
    """
    return sys.derivative(s, ubar)
