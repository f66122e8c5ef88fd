"""Receding-horizon tracking control in the lifted space.

The finite-horizon problem is the discretized quadratic tracking cost

    sum_{i=1..H} ||X_i - Xref_i||_Q^2 dt + sum_{i=0..H-1} ||U_i - Uref_i||_R^2 dt

subject to X_{i+1} = Ad X_i + Bd U_i (exact zero-order-hold discretization of
the constant-selector lifted model) and an optional box on the virtual
control. States are eliminated (condensed form); the unconstrained problem is
one positive-definite solve against a prefactorized Hessian, the boxed one is
solved with over-relaxed ADMM.

The closed loop lifts the plant state, solves the horizon problem, recovers
the thrust/torque input from the first virtual control by least squares, and
holds it over one sampling interval of the nonlinear plant.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import InfeasibleBoundsError
from .lifting import TruncationOrder, lift, lift_reference
from .models import LtiSystem, build_lti, map_control_bounds, recover_control
from .se3 import (
    PseudoControl,
    QuadParams,
    QuadState,
    pseudo_to_body,
    step_constant_control,
)
from .tasks import TrackingTask


@dataclass
class DiscreteLti:
    """Zero-order-hold discretization of the lifted constant-matrix model."""

    Ad: np.ndarray
    Bd: np.ndarray
    dt: float


def discretize(sys: LtiSystem, dt: float) -> DiscreteLti:
    """Exact ZOH: Ad = exp(A dt) and Bd = (int_0^dt exp(A s) ds) Bbar.

    Both series terminate because A is nilpotent.
    """
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    A = sys.A
    n = A.shape[0]
    Ad = np.eye(n)
    S = dt * np.eye(n)  # running integral of exp(A s)
    term = np.eye(n)
    for i in range(1, n + 1):
        term = (dt / i) * (A @ term)
        if not np.any(term):
            break
        Ad = Ad + term
        S = S + (dt / (i + 1)) * term
    return DiscreteLti(Ad, S @ sys.Bbar, dt)


def default_state_weights(order: TruncationOrder) -> np.ndarray:
    """Diagonal state weights: 1000 on the first two position and velocity
    blocks, 1 on the first two attitude blocks, zero elsewhere."""
    w = np.zeros(order.dim)
    w[order.p_block(1)] = 1000.0
    if order.M >= 2:
        w[order.p_block(2)] = 1000.0
        w[order.y_block(2)] = 1000.0
    w[order.y_block(1)] = 1000.0
    w[order.z_block(1)] = 1.0
    if order.N >= 2:
        w[order.z_block(2)] = 1.0
    return w


@dataclass
class MpcConfig:
    """Horizon layout, weights, and solver settings.

    Attributes:
        horizon: prediction horizon t_h [s]; must be an integer multiple of dt.
        dt: sampling interval [s].
        Q: state weight matrix (dim x dim), PSD.
        Rw: virtual-control weight matrix, PD.
        qp_tol: KKT/ADMM residual tolerance.
        max_iter: ADMM iteration cap.
        ubar_bound: optional (4,) magnitudes (f, M1, M2, M3); when set, each
            solve boxes the virtual control by +/- |image of the bound at the
            current lifted state|, held constant over the horizon.
        state_box: optional (lo, hi) bounds on the lifted state, applied at
            every horizon stage (API-level only; the CLI exposes the control
            box, the admissible state set has no canonical numeric values).
    """

    Q: np.ndarray
    Rw: np.ndarray
    horizon: float = 0.5
    dt: float = 0.05
    qp_tol: float = 1e-8
    max_iter: int = 2000
    ubar_bound: Optional[np.ndarray] = None
    state_box: Optional[Tuple[np.ndarray, np.ndarray]] = None
    terminal_weight: Optional[np.ndarray] = None

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.Rw = np.asarray(self.Rw, dtype=float)
        if self.ubar_bound is not None:
            self.ubar_bound = np.abs(np.asarray(self.ubar_bound, dtype=float).reshape(4))
        if self.state_box is not None:
            lo, hi = (np.asarray(b, dtype=float) for b in self.state_box)
            if np.any(lo > hi):
                raise ValueError("state box is empty (lower > upper)")
            self.state_box = (lo, hi)
        if self.terminal_weight is not None:
            self.terminal_weight = np.asarray(self.terminal_weight, dtype=float)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ValueError(
                f"horizon {self.horizon} must be a positive integer multiple of dt {self.dt}"
            )

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))


def default_mpc_config(order: TruncationOrder, params: Optional[QuadParams] = None, **overrides) -> MpcConfig:
    """Tracking defaults: 1000/1 state weights, R = 0.05 I, 0.5 s horizon at
    50 ms, a thrust/torque box mapped into the virtual-control space, and a
    10x terminal state weight.

    The box keeps the horizon problem from leaning on virtual-control
    directions no thrust/torque input can realize at the current state, and
    the terminal weight compensates the short horizon; without either, a
    large position step does not converge (the box) or settles several times
    slower than the plant can (the weight).
    """
    p = params if params is not None else QuadParams()
    Q = np.diag(default_state_weights(order))
    kw = dict(
        Q=Q,
        Rw=0.05 * np.eye(order.control_dim),
        ubar_bound=np.array([4.0 * p.m * p.g, 0.3, 0.3, 0.3]),
        terminal_weight=10.0 * Q,
    )
    kw.update(overrides)
    return MpcConfig(**kw)


@dataclass
class OcpDiagnostics:
    iterations: int
    converged: bool
    kkt_residual: float
    solve_ms: float
    cost: float


class CondensedOcp:
    """Horizon problem with states eliminated and the Hessian prefactorized.

    The Hessian depends only on (Ad, Bd, Q, Rw, H), so one instance serves a
    whole closed-loop run; each solve only rebuilds the linear term.
    """

    def __init__(self, disc: DiscreteLti, cfg: MpcConfig):
        self.disc = disc
        self.cfg = cfg
        n = disc.Ad.shape[0]
        m = disc.Bd.shape[1]
        H = cfg.steps
        if cfg.Q.shape != (n, n):
            raise ValueError(f"Q must be {n}x{n}")
        if cfg.Rw.shape != (m, m):
            raise ValueError(f"Rw must be {m}x{m}")
        self.n, self.m, self.H = n, m, H

        # X_stack = Sx X0 + Su U_stack, rows i = 1..H
        Ad_pows = [np.eye(n)]
        for _ in range(H):
            Ad_pows.append(disc.Ad @ Ad_pows[-1])
        Sx = np.vstack([Ad_pows[i] for i in range(1, H + 1)])
        Su = np.zeros((H * n, H * m))
        for i in range(1, H + 1):
            for j in range(i):
                Su[(i - 1) * n : i * n, j * m : (j + 1) * m] = Ad_pows[i - 1 - j] @ disc.Bd
        self.Sx, self.Su = Sx, Su

        Qb = scipy.linalg.block_diag(*([cfg.Q] * H))
        if cfg.terminal_weight is not None:
            Qb[(H - 1) * n :, (H - 1) * n :] += cfg.terminal_weight
        Rb = scipy.linalg.block_diag(*([cfg.Rw] * H))
        G = 2.0 * cfg.dt * (Su.T @ Qb @ Su + Rb)
        self.G = 0.5 * (G + G.T)
        self.QbSu = Qb @ Su
        self.Qb = Qb
        self.Rb = Rb
        self._chol = scipy.linalg.cho_factor(self.G)
        # box-solver state: diagonal step sizes, their factorization, and the
        # warm-started iterates carried across consecutive solves
        self._rho = np.clip(np.diag(self.G), 1e-6 * np.max(np.diag(self.G)), None)
        self._chol_rho = scipy.linalg.cho_factor(self.G + np.diag(self._rho))
        self._box_state: Optional[Tuple[np.ndarray, np.ndarray]] = None
        if cfg.state_box is not None:
            # joint constraints on [U; X]: factor G + rho (I + Su^T Su) once
            self._rho_gen = float(np.trace(self.G)) / self.G.shape[0]
            self._chol_gen = scipy.linalg.cho_factor(
                self.G + self._rho_gen * (np.eye(H * m) + Su.T @ Su)
            )

    # -- linear term -------------------------------------------------------
    def _gradient_const(self, X0, Xref, Uref):
        r = Xref.reshape(self.H * self.n)
        ur = Uref.reshape(self.H * self.m)
        e = self.Sx @ X0 - r
        return 2.0 * self.cfg.dt * (self.QbSu.T @ e - self.Rb @ ur)

    def cost(self, X0, U, Xref, Uref) -> float:
        Uv = U.reshape(self.H * self.m)
        x = self.Sx @ X0 + self.Su @ Uv - Xref.reshape(-1)
        du = Uv - Uref.reshape(-1)
        return float(self.cfg.dt * (x @ self.Qb @ x + du @ self.Rb @ du))

    # -- solvers -----------------------------------------------------------
    def solve(
        self,
        X0,
        Xref,
        Uref,
        box: Optional[Tuple[np.ndarray, np.ndarray]] = None,
        warm: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, OcpDiagnostics]:
        """Minimize the condensed cost; returns (U sequence HxM, diagnostics)."""
        t_start = time.perf_counter()
        X0 = np.asarray(X0, dtype=float).reshape(self.n)
        Xref = np.asarray(Xref, dtype=float).reshape(self.H, self.n)
        Uref = np.asarray(Uref, dtype=float).reshape(self.H, self.m)
        g = self._gradient_const(X0, Xref, Uref)

        if self.cfg.state_box is not None:
            u, iters, converged, kkt = self._admm_general(g, X0, box)
        elif box is None:
            u = scipy.linalg.cho_solve(self._chol, -g)
            kkt = float(np.linalg.norm(self.G @ u + g))
            iters, converged = 0, True
        else:
            lo, hi = (np.asarray(b, dtype=float).reshape(self.H * self.m) for b in box)
            if np.any(lo > hi + 1e-15):
                raise InfeasibleBoundsError("control box is empty (lower > upper)")
            u_free = scipy.linalg.cho_solve(self._chol, -g)
            if np.all(u_free >= lo - 1e-12) and np.all(u_free <= hi + 1e-12):
                # the box is inactive: the unconstrained minimizer is optimal
                u = np.clip(u_free, lo, hi)
                kkt = float(np.linalg.norm(self.G @ u_free + g))
                iters, converged = 0, True
            else:
                u, iters, converged, kkt = self._admm(g, lo, hi, warm)

        ms = (time.perf_counter() - t_start) * 1e3
        U = u.reshape(self.H, self.m)
        diag = OcpDiagnostics(
            iterations=iters,
            converged=converged,
            kkt_residual=kkt,
            solve_ms=ms,
            cost=self.cost(X0, U, Xref, Uref),
        )
        return U, diag

    def _kkt_residual(self, z, g, lo, hi) -> float:
        """Natural residual of the projected optimality condition."""
        return float(np.linalg.norm(z - np.clip(z - (self.G @ z + g), lo, hi)))

    def _admm_general(self, g, X0, box, alpha: float = 1.6):
        """Joint control/state box: ADMM on the constraint vector [U; X].

        X = Sx X0 + Su U is affine in U; the offset moves into the bounds.
        Used only when a state box is configured; no polish step, accuracy is
        whatever the iteration reaches at cfg.qp_tol.
        """
        nu = self.H * self.m
        lo_u = np.full(nu, -np.inf) if box is None else np.asarray(box[0], dtype=float)
        hi_u = np.full(nu, np.inf) if box is None else np.asarray(box[1], dtype=float)
        xlo, xhi = self.cfg.state_box
        off = self.Sx @ X0
        lo = np.concatenate([lo_u, np.tile(xlo, self.H) - off])
        hi = np.concatenate([hi_u, np.tile(xhi, self.H) - off])
        if np.any(lo > hi + 1e-12):
            raise InfeasibleBoundsError("joint control/state box is empty at this state")

        rho = self._rho_gen

        def amul(u):
            return np.concatenate([u, self.Su @ u])

        def atmul(y):
            return y[:nu] + self.Su.T @ y[nu:]

        z = np.clip(np.zeros(lo.size), lo, hi)
        w = np.zeros(lo.size)
        tol = self.cfg.qp_tol
        converged = False
        it = 0
        x = np.zeros(nu)
        while it < self.cfg.max_iter:
            it += 1
            x = scipy.linalg.cho_solve(self._chol_gen, rho * atmul(z - w) - g)
            zeta = amul(x)
            zeta_r = alpha * zeta + (1.0 - alpha) * z
            z_prev = z
            z = np.clip(zeta_r + w, lo, hi)
            w = w + zeta_r - z
            if it % 10 == 0:
                primal = float(np.linalg.norm(zeta - z))
                dual = float(rho * np.linalg.norm(atmul(z - z_prev)))
                if primal < tol and dual < tol:
                    converged = True
                    break
        y = rho * w
        kkt = max(
            float(np.linalg.norm(self.G @ x + g + atmul(y))),
            float(np.linalg.norm(amul(x) - np.clip(amul(x), lo, hi))),
        )
        return x, it, converged, kkt

    def _polish(self, z, g, lo, hi, act_tol):
        """Equality-solve on the active set guessed from the current iterate.

        Returns the polished point when it satisfies the box and the
        multiplier sign conditions, else None.
        """
        grad = self.G @ z + g
        at_lo = z <= lo + act_tol
        at_hi = z >= hi - act_tol
        pinned = lo >= hi - 1e-15  # zero-width components
        active = (at_lo & (grad > -act_tol)) | (at_hi & (grad < act_tol)) | pinned
        free = ~active
        x = np.where(at_hi, hi, lo)
        if free.any():
            Gff = self.G[np.ix_(free, free)]
            rhs = -g[free] - self.G[np.ix_(free, active)] @ x[active]
            try:
                x[free] = scipy.linalg.solve(Gff, rhs, assume_a="pos")
            except scipy.linalg.LinAlgError:
                return None
            if np.any(x[free] < lo[free] - act_tol) or np.any(x[free] > hi[free] + act_tol):
                return None
        # multiplier signs: at a lower bound the gradient must push down (>= 0),
        # at an upper bound it must push up (<= 0)
        grad = self.G @ x + g
        slack = act_tol * (1.0 + np.abs(g))
        lo_act = active & at_lo & ~pinned
        hi_act = active & at_hi & ~pinned
        if np.any(grad[lo_act] < -slack[lo_act]) or np.any(grad[hi_act] > slack[hi_act]):
            return None
        return np.clip(x, lo, hi)

    def _admm(self, g, lo, hi, warm, alpha: float = 1.6):
        """Over-relaxed ADMM with diagonal step sizes and active-set polish.

        The (z, w) pair persists across solves of the same instance, which is
        the receding-horizon warm start; `warm` overrides the primal iterate.
        """
        rho = self._rho
        if self._box_state is not None and warm is None:
            z, w = self._box_state
            z = np.clip(z, lo, hi)
        else:
            z = np.clip(warm if warm is not None else np.zeros_like(g), lo, hi)
            w = np.zeros_like(g)
        tol = self.cfg.qp_tol
        converged = False
        it = 0
        check_at = 10
        while it < self.cfg.max_iter:
            it += 1
            x = scipy.linalg.cho_solve(self._chol_rho, rho * (z - w) - g)
            x_r = alpha * x + (1.0 - alpha) * z
            z = np.clip(x_r + w, lo, hi)
            w = w + x_r - z
            if it >= check_at:
                check_at = it + 10
                kkt = self._kkt_residual(z, g, lo, hi)
                if kkt < tol:
                    converged = True
                    break
                polished = self._polish(z, g, lo, hi, act_tol=1e-9)
                if polished is not None:
                    kkt_p = self._kkt_residual(polished, g, lo, hi)
                    if kkt_p < tol:
                        self._box_state = (polished.copy(), w.copy())
                        return polished, it, True, kkt_p
        kkt = self._kkt_residual(z, g, lo, hi)
        if kkt < tol:
            converged = True
        self._box_state = (z.copy(), w.copy())
        return z, it, converged, kkt


def solve_ocp(
    X0,
    refs: Tuple[np.ndarray, np.ndarray],
    disc: DiscreteLti,
    cfg: MpcConfig,
    box: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> Tuple[np.ndarray, OcpDiagnostics]:
    """One-shot horizon solve; refs = (Xref (H x n), Uref (H x m))."""
    Xref, Uref = refs
    if np.asarray(Xref).shape[0] != cfg.steps:
        raise ValueError(f"reference window must have {cfg.steps} entries")
    return CondensedOcp(disc, cfg).solve(X0, Xref, Uref, box=box)


def hover_feedforward(p: QuadParams) -> PseudoControl:
    """Thrust balancing gravity, zero torque: the trim input at any fixed pose."""
    return PseudoControl(p.m * p.g, np.zeros(3))


def build_reference_window(
    task: TrackingTask,
    t: float,
    H: int,
    p: QuadParams,
    order: TruncationOrder,
    dt: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """References at t + i*dt for i = 1..H, holding the final sample past the
    task duration."""
    Xr = np.zeros((H, order.dim))
    Ur = np.zeros((H, order.control_dim))
    ff = hover_feedforward(p)
    for i in range(1, H + 1):
        ti = min(t + i * dt, task.duration)
        x = np.asarray(task.x_ref(ti), dtype=float)
        v = task.velocity(ti)
        R = np.asarray(task.R_ref(ti), dtype=float)
        w = np.asarray(task.omega_ref(ti), dtype=float)
        Xr[i - 1] = lift_reference(x, v, R, w, p, order)
        Ur[i - 1] = map_control_bounds(QuadState(x, v, R, w), ff, p, order)
    return Xr, Ur


@dataclass
class ClosedLoopLog:
    """Per-sampling-step record of one tracking run."""

    task: str
    M: int
    N: int
    dt: float
    t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    states: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    ubars: list = field(default_factory=list)
    psi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    err_pos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    err_vel: np.ndarray = field(default_factory=lambda: np.zeros(0))
    norm_err_pos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    qp_ms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    qp_iters: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    CSV_HEADER = (
        "t,x1,x2,x3,v1,v2,v3,"
        "r11,r12,r13,r21,r22,r23,r31,r32,r33,"
        "w1,w2,w3,f,M1,M2,M3,psi,err_pos,err_vel,qp_ms,qp_iters"
    )

    def rows(self):
        for i in range(self.t.size):
            s = self.states[i]
            u = self.controls[i]
            yield (
                [self.t[i]]
                + list(s.x)
                + list(s.v)
                + list(s.R.reshape(9))
                + list(s.omega)
                + [u.f]
                + list(u.M)
                + [self.psi[i], self.err_pos[i], self.err_vel[i], self.qp_ms[i], int(self.qp_iters[i])]
            )

    def settle_time(self, band: float) -> Optional[float]:
        """First time after which err_pos stays inside the band; None if never."""
        inside = self.err_pos < band
        if not inside[-1]:
            return None
        # last index that violates the band
        bad = np.nonzero(~inside)[0]
        if bad.size == 0:
            return float(self.t[0])
        k = bad[-1] + 1
        return float(self.t[k]) if k < self.t.size else None

    def summary(self) -> dict:
        settle = self.settle_time(0.05)
        return {
            "task": self.task,
            "M": self.M,
            "N": self.N,
            "dt": self.dt,
            "steps": int(self.t.size),
            "duration": float(self.t[-1] + self.dt) if self.t.size else 0.0,
            "mean_err_pos": float(np.mean(self.err_pos)),
            "max_err_pos": float(np.max(self.err_pos)),
            "mean_err_vel": float(np.mean(self.err_vel)),
            "mean_norm_err_pos": float(np.mean(self.norm_err_pos)),
            "mean_psi": float(np.mean(self.psi)),
            "max_psi": float(np.max(self.psi)),
            "mean_qp_ms": float(np.mean(self.qp_ms)),
            "max_qp_ms": float(np.max(self.qp_ms)),
            "mean_qp_iters": float(np.mean(self.qp_iters)),
            "settle_band_m": 0.05,
            "settle_time_s": settle,
            "settled_within_20s": bool(settle is not None and settle <= 20.0),
        }


def run_tracking(
    task: TrackingTask,
    p: QuadParams,
    order: TruncationOrder,
    cfg: MpcConfig,
    plant_dt: float = 1e-3,
    guard: float = 1e6,
) -> ClosedLoopLog:
    """Closed-loop tracking of the nonlinear plant with the lifted controller.

    Per sampling step: lift the plant state, solve the horizon problem, take
    the first virtual control, recover the thrust/torque input by least
    squares, convert to body torque, and hold it over the interval while the
    plant integrates at the fine step.
    """
    substeps = int(round(cfg.dt / plant_dt))
    if abs(substeps * plant_dt - cfg.dt) > 1e-12 or substeps < 1:
        raise ValueError("sampling interval must be an integer multiple of the plant step")

    lti = build_lti(p, order)
    disc = discretize(lti, cfg.dt)
    ocp = CondensedOcp(disc, cfg)
    H = cfg.steps
    steps = int(round(task.duration / cfg.dt))

    # every window sample lies on the sampling grid, so lift the references once
    n_grid = steps + H + 1
    Xr_grid = np.zeros((n_grid, order.dim))
    Ur_grid = np.zeros((n_grid, order.control_dim))
    ff = hover_feedforward(p)
    for i in range(n_grid):
        ti = min(i * cfg.dt, task.duration)
        x = np.asarray(task.x_ref(ti), dtype=float)
        v = task.velocity(ti)
        R = np.asarray(task.R_ref(ti), dtype=float)
        w = np.asarray(task.omega_ref(ti), dtype=float)
        Xr_grid[i] = lift_reference(x, v, R, w, p, order)
        Ur_grid[i] = map_control_bounds(QuadState(x, v, R, w), ff, p, order)

    log = ClosedLoopLog(task.name, order.M, order.N, cfg.dt)
    t_arr, psi_arr, ep_arr, ev_arr, nep_arr, ms_arr, it_arr = [], [], [], [], [], [], []

    state = task.initial_state()
    for i in range(steps):
        t = i * cfg.dt
        X0 = lift(state, p, order)
        Xw = Xr_grid[i + 1 : i + 1 + H]
        Uw = Ur_grid[i + 1 : i + 1 + H]

        box = None
        if cfg.ubar_bound is not None:
            Ub = np.abs(map_control_bounds(state, PseudoControl.from_vector(cfg.ubar_bound), p, order))
            stacked = np.tile(Ub, H)
            box = (-stacked, stacked)

        # warm start lives inside the solver (the previous step's iterates)
        U, diag = ocp.solve(X0, Xw, Uw, box=box)
        ubar = recover_control(state, U[0], p, order)
        u = pseudo_to_body(state, ubar, p)

        x_ref = np.asarray(task.x_ref(t), dtype=float)
        v_ref = task.velocity(t)
        R_ref = np.asarray(task.R_ref(t), dtype=float)
        t_arr.append(t)
        log.states.append(state.copy())
        log.controls.append(u)
        log.ubars.append(ubar)
        psi_arr.append(0.5 * float(np.trace(np.eye(3) - R_ref.T @ state.R)))
        ep = float(np.linalg.norm(state.x - x_ref))
        ep_arr.append(ep)
        ev_arr.append(float(np.linalg.norm(state.v - v_ref)))
        nep_arr.append(ep / max(float(np.linalg.norm(x_ref)), 1e-12))
        ms_arr.append(diag.solve_ms)
        it_arr.append(diag.iterations)

        state = step_constant_control(state, u, cfg.dt, substeps, p, guard=guard)

    log.t = np.array(t_arr)
    log.psi = np.array(psi_arr)
    log.err_pos = np.array(ep_arr)
    log.err_vel = np.array(ev_arr)
    log.norm_err_pos = np.array(nep_arr)
    log.qp_ms = np.array(ms_arr)
    log.qp_iters = np.array(it_arr, dtype=int)
    return log
