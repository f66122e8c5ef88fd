"""Observable chains mapping SE(3) quadrotor states into the lifted linear space.

A lifted vector for truncation order (M, N) has the block layout

    [ p_1 .. p_M | y_1 .. y_M | h_1 .. h_M | z_1 .. z_N ]

with 3-vectors

    p_k = (Omega^T)^(k-1) R^T x      position chain
    y_k = (Omega^T)^(k-1) R^T v      velocity chain
    h_k = (Omega^T)^(k-1) R^T gamma  gravity chain, gamma = (0, 0, -g)

and 9-vectors (column-major vectorization)

    z_j = vec(R Omega^(j-1))         attitude chain

where Omega = hat(omega). Every chain obeys block(k+1) = Omega^T block(k)
(respectively z_{j+1} = vec(R Omega^j)); truncating at (M, N) drops the
terminal-row couplings quantified by :func:`residual_blocks`.

The sign of gamma is pinned so that the lifted velocity row reproduces the
plant acceleration -g e3 + (f/m) R e3; the finite-difference oracle tests
enforce it.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import InvalidRotationError, TruncationOrderError
from .se3 import QuadParams, QuadState, hat, rotation_defect


@dataclass(frozen=True)
class TruncationOrder:
    """Number of retained blocks in the positional chains (M) and attitude chain (N)."""

    M: int
    N: int

    def __post_init__(self):
        if int(self.M) != self.M or int(self.N) != self.N:
            raise ValueError("truncation orders must be integers")
        if self.M < 1 or self.N < 1:
            raise ValueError(f"truncation orders must be >= 1, got M={self.M}, N={self.N}")

    @property
    def dim(self) -> int:
        """Length of the lifted vector, 9 (M + N)."""
        return 9 * (self.M + self.N)

    @property
    def control_dim(self) -> int:
        """Length of the virtual control, 9 (M + N) - 15."""
        return 9 * (self.M + self.N) - 15

    # Block slices use the 1-based chain index of the formulas above.
    def p_block(self, k: int) -> slice:
        self._check(k, self.M, "p")
        return slice(3 * (k - 1), 3 * k)

    def y_block(self, k: int) -> slice:
        self._check(k, self.M, "y")
        return slice(3 * self.M + 3 * (k - 1), 3 * self.M + 3 * k)

    def h_block(self, k: int) -> slice:
        self._check(k, self.M, "h")
        return slice(6 * self.M + 3 * (k - 1), 6 * self.M + 3 * k)

    def z_block(self, j: int) -> slice:
        self._check(j, self.N, "z")
        return slice(9 * self.M + 9 * (j - 1), 9 * self.M + 9 * j)

    @staticmethod
    def _check(k: int, upper: int, chain: str) -> None:
        if not 1 <= k <= upper:
            raise IndexError(f"{chain}-chain index {k} outside 1..{upper}")


def vec_cm(A) -> np.ndarray:
    """Column-major vectorization; the single convention used everywhere."""
    return np.asarray(A, dtype=float).reshape(9, order="F")


def unvec_cm(a) -> np.ndarray:
    return np.asarray(a, dtype=float).reshape(3, 3, order="F")


def gravity_observable(p: QuadParams) -> np.ndarray:
    """Inertial acceleration vector lifted by the gravity chain: (0, 0, -g)."""
    return np.array([0.0, 0.0, -p.g])


def lift_components(x, v, R, omega, p: QuadParams, order: TruncationOrder) -> np.ndarray:
    """Lift an (x, v, R, omega) tuple; closed-form chain evaluation."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    R = np.asarray(R, dtype=float)
    omega = np.asarray(omega, dtype=float)

    OmegaT = hat(omega).T
    p1 = R.T @ x
    y1 = R.T @ v
    h1 = R.T @ gravity_observable(p)

    X = np.zeros(order.dim)
    T = np.eye(3)  # (Omega^T)^(k-1)
    for k in range(1, order.M + 1):
        X[order.p_block(k)] = T @ p1
        X[order.y_block(k)] = T @ y1
        X[order.h_block(k)] = T @ h1
        T = OmegaT @ T
    Z = R.copy()  # R Omega^(j-1)
    Omega = hat(omega)
    for j in range(1, order.N + 1):
        X[order.z_block(j)] = vec_cm(Z)
        Z = Z @ Omega
    return X


def lift(s: QuadState, p: QuadParams, order: TruncationOrder) -> np.ndarray:
    """Lifted observable vector of a plant state."""
    return lift_components(s.x, s.v, s.R, s.omega, p, order)


def lift_reference(
    x_ref, v_ref, R_ref, omega_ref, p: QuadParams, order: TruncationOrder
) -> np.ndarray:
    """Lift a reference tuple; identical to lifting a state with these values."""
    return lift_components(x_ref, v_ref, R_ref, omega_ref, p, order)


def unlift(X, order: TruncationOrder, tol: float = 1e-6) -> QuadState:
    """Recover (x, v, R, omega) from a lifted vector.

    Requires N >= 2 (omega lives in the second attitude block) and z_1 within
    ``tol`` of SO(3).
    """
    X = np.asarray(X, dtype=float)
    if X.shape != (order.dim,):
        raise ValueError(f"lifted vector has length {X.shape}, expected ({order.dim},)")
    if order.N < 2:
        raise TruncationOrderError("recovering omega needs at least two attitude blocks (N >= 2)")
    R = unvec_cm(X[order.z_block(1)])
    if rotation_defect(R) > tol or abs(float(np.linalg.det(R)) - 1.0) > tol:
        raise InvalidRotationError(
            f"first attitude block is not a rotation within {tol:g}"
        )
    Omega = R.T @ unvec_cm(X[order.z_block(2)])
    # Take the skew part; for a consistent lifted vector it is exactly skew.
    omega = np.array(
        [Omega[2, 1] - Omega[1, 2], Omega[0, 2] - Omega[2, 0], Omega[1, 0] - Omega[0, 1]]
    ) * 0.5
    x = R @ X[order.p_block(1)]
    v = R @ X[order.y_block(1)]
    return QuadState(x, v, R, omega)


def chain_norms(s: QuadState, p: QuadParams, kmax: int) -> dict:
    """Norms of the first ``kmax`` blocks of every chain (decay diagnostics)."""
    OmegaT = hat(s.omega).T
    Omega = hat(s.omega)
    gamma = gravity_observable(p)
    vecs = {"p": s.R.T @ s.x, "y": s.R.T @ s.v, "h": s.R.T @ gamma}
    out = {name: [] for name in ("p", "y", "h", "z")}
    for name in ("p", "y", "h"):
        b = vecs[name]
        for _ in range(kmax):
            out[name].append(float(np.linalg.norm(b)))
            b = OmegaT @ b
    Z = s.R.copy()
    for _ in range(kmax):
        out["z"].append(float(np.linalg.norm(vec_cm(Z))))
        Z = Z @ Omega
    return {name: np.array(vals) for name, vals in out.items()}


@dataclass
class ResidualReport:
    """Truncation residuals on the terminal block-rows of the lifted evolution.

    ``*_row`` fields are the exact derivative content the truncated system
    drops on each chain's last row (state couplings only; the control blocks
    are retained at every order, so the residual is control-independent):

        p-row:  p_{M+1} + y_M
        y-row:  y_{M+1} + h_M
        h-row:  h_{M+1}
        z-row:  z_{N+1}

    ``*_beyond`` fields are the first out-of-range block of each chain, the
    quantities whose norms vanish geometrically for ||omega|| <= 1/sqrt(2).
    """

    M: int
    N: int
    p_row: np.ndarray
    y_row: np.ndarray
    h_row: np.ndarray
    z_row: np.ndarray
    p_beyond: np.ndarray
    y_beyond: np.ndarray
    h_beyond: np.ndarray
    z_beyond: np.ndarray

    def row_norms(self) -> dict:
        return {
            "p": float(np.linalg.norm(self.p_row)),
            "y": float(np.linalg.norm(self.y_row)),
            "h": float(np.linalg.norm(self.h_row)),
            "z": float(np.linalg.norm(self.z_row)),
        }

    def beyond_norms(self) -> dict:
        return {
            "p": float(np.linalg.norm(self.p_beyond)),
            "y": float(np.linalg.norm(self.y_beyond)),
            "h": float(np.linalg.norm(self.h_beyond)),
            "z": float(np.linalg.norm(self.z_beyond)),
        }

    def stacked(self, order: TruncationOrder) -> np.ndarray:
        """Residual embedded into a full lifted vector (terminal rows only)."""
        r = np.zeros(order.dim)
        r[order.p_block(order.M)] = self.p_row
        r[order.y_block(order.M)] = self.y_row
        r[order.h_block(order.M)] = self.h_row
        r[order.z_block(order.N)] = self.z_row
        return r

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "N": self.N,
            "row_residuals": {
                "p": self.p_row.tolist(),
                "y": self.y_row.tolist(),
                "h": self.h_row.tolist(),
                "z": self.z_row.tolist(),
            },
            "row_norms": self.row_norms(),
            "beyond_norms": self.beyond_norms(),
        }


def residual_blocks(
    s: QuadState, p: QuadParams, order: TruncationOrder, ubar=None
) -> ResidualReport:
    """Exact derivative content dropped by the truncated system.

    ``ubar`` is accepted for signature symmetry with the derivative APIs but
    has no effect: the control blocks are retained on every row.
    """
    M, N = order.M, order.N
    OmegaT = hat(s.omega).T
    Omega = hat(s.omega)
    gamma = gravity_observable(p)

    def chain(b0, count):
        # returns blocks 1..count+1 of a positional chain
        blocks = [b0]
        for _ in range(count):
            blocks.append(OmegaT @ blocks[-1])
        return blocks

    p_chain = chain(s.R.T @ s.x, M)
    y_chain = chain(s.R.T @ s.v, M)
    h_chain = chain(s.R.T @ gamma, M)
    z_beyond = vec_cm(s.R @ np.linalg.matrix_power(Omega, N))

    return ResidualReport(
        M=M,
        N=N,
        p_row=p_chain[M] + y_chain[M - 1],
        y_row=y_chain[M] + h_chain[M - 1],
        h_row=h_chain[M],
        z_row=z_beyond,
        p_beyond=p_chain[M],
        y_beyond=y_chain[M],
        h_beyond=h_chain[M],
        z_beyond=z_beyond,
    )


def normalize_omega(omega, omega_max: float) -> np.ndarray:
    """Rescale a body rate by sqrt(2) * omega_max.

    For any omega with ||omega|| <= omega_max the result satisfies
    ||omega'|| <= 1/sqrt(2), the decay regime of the observable chains.
    """
    if not omega_max > 0:
        raise ValueError(f"omega_max must be positive, got {omega_max}")
    return np.asarray(omega, dtype=float) / (np.sqrt(2.0) * omega_max)
