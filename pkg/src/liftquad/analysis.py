"""Controllability diagnostics and the model-vs-plant approximation study.

Rank computations use an SVD with relative tolerance 1e-9 * sigma_max and
always report the tolerance alongside the result so borderline ranks stay
auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from .lifting import TruncationOrder, chain_norms, lift, unvec_cm
from .models import (
    build_A,
    build_B,
    build_B_from_lifted,
    build_Bbar,
    nilpotent_expm,
)
from .se3 import (
    PseudoControl,
    QuadParams,
    QuadState,
    Trajectory,
    exp_so3,
    integrate_pseudo,
    project_so3,
)

RANK_TOL_FACTOR = 1e-9


@dataclass
class RankReport:
    """Numerical rank of a named matrix with the SVD evidence."""

    name: str
    rows: int
    cols: int
    rank: int
    sv_max: float
    sv_min_retained: float
    tol: float

    @property
    def full_row_rank(self) -> bool:
        return self.rank == self.rows

    @property
    def full_column_rank(self) -> bool:
        return self.rank == self.cols

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "sv_max": self.sv_max,
            "sv_min_retained": self.sv_min_retained,
            "tol": self.tol,
            "full_row_rank": self.full_row_rank,
            "full_column_rank": self.full_column_rank,
        }


def matrix_rank_report(name: str, M, tol_factor: float = RANK_TOL_FACTOR) -> RankReport:
    M = np.asarray(M, dtype=float)
    sv = np.linalg.svd(M, compute_uv=False) if min(M.shape) > 0 else np.array([0.0])
    sv_max = float(sv[0]) if sv.size else 0.0
    tol = tol_factor * sv_max
    rank = int(np.sum(sv > tol))
    sv_min_ret = float(sv[rank - 1]) if rank > 0 else 0.0
    return RankReport(name, M.shape[0], M.shape[1], rank, sv_max, sv_min_ret, tol)


def controllability_matrix(A: np.ndarray, Bbar: np.ndarray) -> np.ndarray:
    """[Bbar, A Bbar, A^2 Bbar, ...] stopping at the nilpotency index of A."""
    blocks = [Bbar]
    T = A.copy()
    for _ in range(A.shape[0]):
        if not np.any(T):
            break
        blocks.append(T @ Bbar)
        T = T @ A
    return np.hstack(blocks)


def lti_controllability(order: TruncationOrder) -> RankReport:
    """Rank of the constant-selector controllability matrix for one (M, N)."""
    C = controllability_matrix(build_A(order), build_Bbar(order))
    return matrix_rank_report(f"ctrb_M{order.M}_N{order.N}", C)


@dataclass
class PointwiseControllabilityReport:
    """Rank evidence for the state-dependent model at one state.

    ``pbh`` is the rank of [A | B(X)] at the only eigenvalue (zero; A is
    nilpotent). ``terminal`` is the stack of the input blocks feeding the
    all-zero rows of A, an 18x4 matrix whose column rank drops exactly at the
    degenerate states x = v = omega = 0.
    """

    pbh: RankReport
    terminal: RankReport

    def to_dict(self) -> dict:
        return {"pbh": self.pbh.to_dict(), "terminal": self.terminal.to_dict()}


def terminal_input_stack(s: QuadState, p: QuadParams, order: TruncationOrder) -> np.ndarray:
    B = build_B(s, p, order)
    return np.vstack(
        [
            B[order.p_block(order.M)],
            B[order.y_block(order.M)],
            B[order.h_block(order.M)],
            B[order.z_block(order.N)],
        ]
    )


def lpv_pbh_test(
    s: QuadState, p: QuadParams, order: TruncationOrder
) -> PointwiseControllabilityReport:
    A = build_A(order)
    B = build_B(s, p, order)
    pbh = matrix_rank_report(f"pbh_M{order.M}_N{order.N}", np.hstack([A, B]))
    term = matrix_rank_report(
        f"terminal_rows_M{order.M}_N{order.N}", terminal_input_stack(s, p, order)
    )
    return PointwiseControllabilityReport(pbh, term)


def controllability_gramian(
    trajectory: Trajectory,
    p: QuadParams,
    order: TruncationOrder,
    t0: float,
    tf: float,
) -> np.ndarray:
    """Trapezoidal quadrature of exp(A tau) B B^T exp(A^T tau) along a trajectory."""
    if tf < t0:
        raise ValueError(f"empty window [{t0}, {tf}]")
    A = build_A(order)
    times = trajectory.times
    mask = (times >= t0 - 1e-12) & (times <= tf + 1e-12)
    idx = np.nonzero(mask)[0]
    n = order.dim
    if idx.size < 2:
        return np.zeros((n, n))
    integrand = []
    for i in idx:
        Phi = nilpotent_expm(A, float(times[i] - t0))
        PB = Phi @ build_B(trajectory.states[i], p, order)
        integrand.append(PB @ PB.T)
    W = np.zeros((n, n))
    for k in range(len(idx) - 1):
        dt = float(times[idx[k + 1]] - times[idx[k]])
        W += 0.5 * dt * (integrand[k] + integrand[k + 1])
    return W


def gramian_min_sv(
    trajectory: Trajectory,
    p: QuadParams,
    order: TruncationOrder,
    t0: float,
    tf: float,
) -> float:
    """Smallest singular value of the finite-window controllability Gramian."""
    W = controllability_gramian(trajectory, p, order, t0, tf)
    sv = np.linalg.svd(W, compute_uv=False)
    return float(sv[-1])


@dataclass
class ErrorSeries:
    """Normalized model-vs-plant error traces over time.

    psi is the chordal attitude distance trace(I - R_plant^T R_model)/2,
    computed with the model attitude projected onto SO(3) so the value stays
    in [0, 2].
    """

    t: np.ndarray
    err_x: np.ndarray
    err_v: np.ndarray
    psi: np.ndarray

    def rows(self):
        for i in range(self.t.size):
            yield [self.t[i], self.err_x[i], self.err_v[i], self.psi[i]]

    def mean_err_x(self) -> float:
        return float(np.mean(self.err_x))


@dataclass
class ApproxErrorConfig:
    """Configuration of the open-loop model-vs-plant comparison."""

    orders: Sequence[Tuple[int, int]] = ((3, 3), (4, 4), (5, 5))
    duration: float = 10.0
    seed: int = 0
    hold_dt: float = 0.05
    plant_dt: float = 1e-3
    model_dt: float = 5e-3
    sample_dt: float = 0.05
    guard: float = 1e6
    params: QuadParams = field(default_factory=QuadParams)


def excitation_control(
    p: QuadParams, seed: int, duration: float, hold_dt: float = 0.05
):
    """Oscillating-thrust test input with a small random torque.

    f(t) = 20 m g sin(t); each torque component is 0.001 xi sin(0.01 t) with
    xi resampled per hold interval from U[-6, 6] (envelope +/-0.006). Returns
    a callable t -> PseudoControl; deterministic given the seed.
    """
    rng = np.random.default_rng(seed)
    n_holds = int(np.ceil(duration / hold_dt)) + 2
    xi = rng.uniform(-6.0, 6.0, size=(n_holds, 3))
    amp = 20.0 * p.m * p.g

    def control(t: float) -> PseudoControl:
        i = min(int(t / hold_dt), n_holds - 1)
        return PseudoControl(amp * np.sin(t), 0.001 * xi[i] * np.sin(0.01 * t))

    return control


def _integrate_lifted(X0, p, order, control, dt, steps, guard):
    """RK4 on dX = A X + B(X) ubar(t) with B evaluated from the lifted vector."""
    A = build_A(order)

    def rhs(t, X):
        u = control(t).as_vector()
        return A @ X + build_B_from_lifted(X, p, order) @ u

    X = np.asarray(X0, dtype=float).copy()
    out = [X.copy()]
    t = 0.0
    for _ in range(steps):
        k1 = rhs(t, X)
        k2 = rhs(t + 0.5 * dt, X + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, X + 0.5 * dt * k2)
        k4 = rhs(t + dt, X + dt * k3)
        X = X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
        m = float(np.max(np.abs(X)))
        if not np.isfinite(m) or m > guard:
            raise NumericalBlowupError(
                f"lifted state magnitude {m:.3e} exceeded guard {guard:.3e}"
            )
        out.append(X.copy())
    return out


def approximation_error_experiment(cfg: ApproxErrorConfig) -> Dict[Tuple[int, int], ErrorSeries]:
    """Propagate the plant and the truncated lifted model under the same input.

    The plant and every (M, N) model share one excitation signal (same seed),
    start from the same initial condition, and are compared at the sampling
    grid: normalized position/velocity errors and the attitude distance psi.
    """
    p = cfg.params
    control = excitation_control(p, cfg.seed, cfg.duration, cfg.hold_dt)
    s0 = QuadState(
        x=np.array([0.1, 0.1, 0.1]),
        v=np.array([0.1, 0.1, 0.1]),
        R=np.eye(3),
        omega=np.array([0.05, 0.05, 0.05]),
    )

    n_samples = int(round(cfg.duration / cfg.sample_dt))
    plant_steps = int(round(cfg.duration / cfg.plant_dt))
    stride = int(round(cfg.sample_dt / cfg.plant_dt))
    if abs(stride * cfg.plant_dt - cfg.sample_dt) > 1e-12:
        raise ValueError("sample_dt must be a multiple of plant_dt")
    traj = integrate_pseudo(s0, control, cfg.plant_dt, plant_steps, p, guard=cfg.guard)
    plant_x = np.array([st.x for st in traj.states[:: stride]])
    plant_v = np.array([st.v for st in traj.states[:: stride]])
    plant_R = [st.R for st in traj.states[:: stride]]
    t_grid = traj.times[::stride]

    model_stride = int(round(cfg.sample_dt / cfg.model_dt))
    if abs(model_stride * cfg.model_dt - cfg.sample_dt) > 1e-12:
        raise ValueError("sample_dt must be a multiple of model_dt")
    model_steps = int(round(cfg.duration / cfg.model_dt))

    results: Dict[Tuple[int, int], ErrorSeries] = {}
    for (M, N) in cfg.orders:
        order = TruncationOrder(M, N)
        X0 = lift(s0, p, order)
        Xs = _integrate_lifted(X0, p, order, control, cfg.model_dt, model_steps, cfg.guard)
        Xs = Xs[::model_stride]
        err_x = np.zeros(n_samples + 1)
        err_v = np.zeros(n_samples + 1)
        psi = np.zeros(n_samples + 1)
        for i in range(n_samples + 1):
            X = Xs[i]
            Rm = unvec_cm(X[order.z_block(1)])
            xm = Rm @ X[order.p_block(1)]
            vm = Rm @ X[order.y_block(1)]
            err_x[i] = np.linalg.norm(xm - plant_x[i]) / max(np.linalg.norm(plant_x[i]), 1e-12)
            err_v[i] = np.linalg.norm(vm - plant_v[i]) / max(np.linalg.norm(plant_v[i]), 1e-12)
            psi[i] = 0.5 * np.trace(np.eye(3) - plant_R[i].T @ project_so3(Rm))
        results[(M, N)] = ErrorSeries(np.asarray(t_grid).copy(), err_x, err_v, psi)
    return results


def residual_decay_profile(
    p: QuadParams,
    omega_norm: float = 0.5,
    kmax: int = 10,
    n_states: int = 100,
    seed: int = 0,
) -> dict:
    """Chain-norm decay statistics over random bounded states.

    For each chain reports the worst adjacent-block norm ratio and whether the
    geometric bounds hold: ||y_k|| <= ||omega||^(k-1) ||v|| and
    ||z_j|| <= (sqrt(2) ||omega||)^(j-1) ||z_1||.
    """
    rng = np.random.default_rng(seed)
    worst_ratio = {"p": 0.0, "y": 0.0, "h": 0.0, "z": 0.0}
    y_bound_ok = True
    z_bound_ok = True
    for _ in range(n_states):
        w = rng.normal(size=3)
        w *= omega_norm / np.linalg.norm(w)
        s = QuadState(
            x=rng.uniform(-2, 2, size=3),
            v=rng.uniform(-2, 2, size=3),
            R=exp_so3(rng.normal(size=3)),
            omega=w,
        )
        norms = chain_norms(s, p, kmax)
        for name in worst_ratio:
            seq = norms[name]
            for k in range(1, len(seq)):
                if seq[k - 1] > 1e-14:
                    worst_ratio[name] = max(worst_ratio[name], seq[k] / seq[k - 1])
        vnorm = float(np.linalg.norm(s.v))
        for k in range(kmax):
            if norms["y"][k] > omega_norm**k * vnorm + 1e-12:
                y_bound_ok = False
            if norms["z"][k] > (np.sqrt(2) * omega_norm) ** k * norms["z"][0] + 1e-12:
                z_bound_ok = False
    return {
        "omega_norm": omega_norm,
        "kmax": kmax,
        "n_states": n_states,
        "seed": seed,
        "worst_adjacent_ratio": worst_ratio,
        "y_geometric_bound_holds": y_bound_ok,
        "z_geometric_bound_holds": z_bound_ok,
    }
