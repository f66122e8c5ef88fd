"""End-to-end acceptance gate.

One test per criterion, each printing a single verdict line (run with -s to
see them). Tolerances are pinned here and nowhere else; the tracking runs are
shared through a module fixture so the long simulations execute once.
"""

import time

import numpy as np
import pytest

from conftest import fd_lift_derivative, random_pseudo, random_state
from liftquad.analysis import (
    ApproxErrorConfig,
    approximation_error_experiment,
    lpv_pbh_test,
    lti_controllability,
)
from liftquad.errors import SingularInertiaError
from liftquad.lifting import TruncationOrder, chain_norms, residual_blocks
from liftquad.models import (
    build_B,
    build_Bbar,
    build_lpv,
    lpv_derivative,
    pack_virtual,
    recover_control,
)
from liftquad.mpc import CondensedOcp, default_mpc_config, run_tracking
from liftquad.se3 import QuadParams, QuadState
from liftquad.tasks import make_task
from test_mpc import box_qp_oracle, dense_kkt_oracle, small_instance


def _verdict(name, ok, detail):
    print(f"[ACCEPT] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def params():
    return QuadParams()


@pytest.fixture(scope="module")
def tracking_logs(params):
    """The three tracking tasks at stock settings, run once and shared."""
    order = TruncationOrder(3, 3)
    logs = {}
    walls = {}
    for name, duration in (("hover", 40.0), ("helix", 60.0), ("torus", 60.0)):
        cfg = default_mpc_config(order, params=params)
        t0 = time.perf_counter()
        logs[name] = run_tracking(make_task(name, duration), params, order, cfg)
        walls[name] = time.perf_counter() - t0
    return logs, walls


def test_derivative_oracle_equivalence(params):
    # finite-difference flow derivative of every observable block vs the
    # lifted model, residual added on the terminal rows
    t0 = time.perf_counter()
    order = TruncationOrder(3, 3)
    sys = build_lpv(params, order)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        s = random_state(rng, pos_scale=2.0, vel_scale=2.0, omega_norm=0.7)
        ubar = random_pseudo(rng, max_norm=10.0)
        fd = fd_lift_derivative(s, ubar, params, order)
        model = lpv_derivative(s, ubar, sys)
        resid = residual_blocks(s, params, order).stacked(order)
        blocks = [
            getattr(order, chain)(k)
            for chain in ("p_block", "y_block", "h_block")
            for k in range(1, order.M + 1)
        ] + [order.z_block(j) for j in range(1, order.N + 1)]
        for sl in blocks:
            err = np.linalg.norm(fd[sl] - model[sl] - resid[sl])
            worst = max(worst, err / max(np.linalg.norm(fd[sl]), 1e-9))
    elapsed = time.perf_counter() - t0
    _verdict(
        "derivative oracle equivalence",
        worst < 1e-5 and elapsed < 10.0,
        f"worst rel err {worst:.2e}, {elapsed:.1f}s",
    )


def test_lpv_lti_equivalence(params):
    t0 = time.perf_counter()
    order = TruncationOrder(3, 3)
    Bbar = build_Bbar(order)
    rng = np.random.default_rng(2025)
    worst = 0.0
    for _ in range(100):
        s = random_state(rng)
        ubar = random_pseudo(rng)
        gap = Bbar @ pack_virtual(s, ubar, params, order) - build_B(s, params, order) @ ubar.as_vector()
        worst = max(worst, float(np.linalg.norm(gap)))
    elapsed = time.perf_counter() - t0
    _verdict(
        "constant-selector equivalence",
        worst < 1e-12 and elapsed < 1.0,
        f"worst gap {worst:.2e}, {elapsed:.2f}s",
    )


def test_control_recovery_roundtrip(params):
    t0 = time.perf_counter()
    order = TruncationOrder(3, 3)
    rng = np.random.default_rng(2026)
    worst = 0.0
    for _ in range(100):
        s = random_state(rng)
        ubar = random_pseudo(rng)
        back = recover_control(s, pack_virtual(s, ubar, params, order), params, order)
        worst = max(worst, float(np.max(np.abs(back.as_vector() - ubar.as_vector()))))
    with pytest.raises(SingularInertiaError):
        bad = QuadParams(J=np.diag([0.0023, 0.0, 0.0032]))
        build_B(QuadState.identity(), bad, order)
    elapsed = time.perf_counter() - t0
    _verdict(
        "control recovery roundtrip",
        worst < 1e-9 and elapsed < 1.0,
        f"worst err {worst:.2e}, singular inertia raises, {elapsed:.2f}s",
    )


def test_controllability_ranks():
    t0 = time.perf_counter()
    failures = []
    for M in range(3, 6):
        for N in range(2, 6):
            r = lti_controllability(TruncationOrder(M, N))
            if r.rank != 9 * (M + N):
                failures.append((M, N, r.rank))
    elapsed = time.perf_counter() - t0
    _verdict(
        "controllability ranks",
        not failures and elapsed < 30.0,
        f"all 9(M+N) over M in 3..5, N in 2..5, {elapsed:.1f}s"
        + (f"; failures {failures}" if failures else ""),
    )


def test_pointwise_controllability(params):
    t0 = time.perf_counter()
    order = TruncationOrder(3, 3)
    rng = np.random.default_rng(2027)
    ok = True
    count = 0
    while count < 50:
        s = random_state(rng)
        if min(np.linalg.norm(s.x), np.linalg.norm(s.v), np.linalg.norm(s.omega)) < 1e-2:
            continue
        count += 1
        rep = lpv_pbh_test(s, params, order)
        ok = ok and rep.terminal.rank == 4
    nondeg_pbh = lpv_pbh_test(random_state(np.random.default_rng(1)), params, order).pbh.rank
    deg = lpv_pbh_test(QuadState.identity(), params, order)
    deficiency = deg.pbh.rank < nondeg_pbh and deg.terminal.rank < 4
    elapsed = time.perf_counter() - t0
    _verdict(
        "pointwise controllability",
        ok and deficiency and elapsed < 5.0,
        f"terminal rank 4 at 50 states; degenerate pbh {deg.pbh.rank} < {nondeg_pbh}, {elapsed:.1f}s",
    )


def test_residual_decay(params):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2028)
    ratio_ok, z_ok = True, True
    for _ in range(100):
        s = random_state(rng, omega_norm=0.5, exact_omega=True)
        norms = chain_norms(s, params, 10)
        y = norms["y"]
        for k in range(1, 10):
            if y[k - 1] > 1e-14 and y[k] / y[k - 1] > 0.5 + 1e-12:
                ratio_ok = False
        z = norms["z"]
        for j in range(10):
            if z[j] > (np.sqrt(2.0) * 0.5) ** j * z[0] + 1e-12:
                z_ok = False
    elapsed = time.perf_counter() - t0
    _verdict(
        "residual decay",
        ratio_ok and z_ok and elapsed < 1.0,
        f"y-ratios <= 0.5, z-chain geometric bound, {elapsed:.2f}s",
    )


def test_approximation_error_ordering():
    t0 = time.perf_counter()
    cfg = ApproxErrorConfig(orders=((3, 3), (5, 5)), duration=10.0, seed=0)
    series = approximation_error_experiment(cfg)
    m33 = float(np.mean(series[(3, 3)].err_x))
    m55 = float(np.mean(series[(5, 5)].err_x))
    starts_zero = series[(3, 3)].err_x[0] == 0.0 and series[(5, 5)].err_x[0] == 0.0
    elapsed = time.perf_counter() - t0
    _verdict(
        "approximation error ordering",
        m55 <= m33 and starts_zero and elapsed < 30.0,
        f"mean err (5,5) {m55:.3e} <= (3,3) {m33:.3e}, start at 0, {elapsed:.1f}s",
    )


def test_hover_tracking(tracking_logs):
    logs, walls = tracking_logs
    log = logs["hover"]
    mask = log.t > 20.0
    worst = float(np.max(log.err_pos[mask]))
    summary = log.summary()
    _verdict(
        "hover task",
        worst < 0.05 and summary["settled_within_20s"] and walls["hover"] < 120.0,
        f"max err after 20 s {worst:.4f} m, settle {summary['settle_time_s']:.1f}s, "
        f"wall {walls['hover']:.0f}s",
    )


def test_helix_tracking(tracking_logs):
    logs, walls = tracking_logs
    log = logs["helix"]
    mask = log.t > 5.0
    worst_psi = float(np.max(log.psi[mask]))
    mean_norm = float(np.mean(log.norm_err_pos))
    _verdict(
        "helix task",
        worst_psi < 5e-3 and mean_norm < 0.1 and walls["helix"] < 180.0,
        f"max psi after 5 s {worst_psi:.2e}, mean normalized err {mean_norm:.4f}, "
        f"wall {walls['helix']:.0f}s",
    )


def test_torus_tracking(tracking_logs):
    logs, walls = tracking_logs
    log = logs["torus"]
    worst_psi = float(np.max(log.psi))
    _verdict(
        "torus-knot task",
        worst_psi < 1e-2 and walls["torus"] < 180.0,
        f"max psi {worst_psi:.2e}, wall {walls['torus']:.0f}s",
    )


def test_qp_solve_time(tracking_logs):
    logs, _ = tracking_logs
    means = {name: float(np.mean(log.qp_ms)) for name, log in logs.items()}
    worst = max(means.values())
    _verdict(
        "horizon-problem solve time",
        worst < 50.0,
        "mean ms per task " + ", ".join(f"{k}={v:.1f}" for k, v in means.items()),
    )


def test_qp_matches_dense_oracles():
    cvxpy = pytest.importorskip("cvxpy")
    t0 = time.perf_counter()
    rng = np.random.default_rng(2029)
    worst_free, worst_boxed = 0.0, 0.0
    for i in range(20):
        boxed = i % 2 == 1
        H = 2 + (i % 3 == 0)
        order, p, disc, cfg, X0, Xref, Uref, box = small_instance(rng, H=H, boxed=boxed)
        ocp = CondensedOcp(disc, cfg)
        U, diag = ocp.solve(X0, Xref, Uref, box=box)
        if boxed:
            g = ocp._gradient_const(X0, Xref, Uref)
            U_star = box_qp_oracle(cvxpy, ocp.G, g, box[0], box[1]).reshape(U.shape)
            worst_boxed = max(worst_boxed, float(np.max(np.abs(U - U_star))))
        else:
            U_star = dense_kkt_oracle(disc, cfg, X0, Xref, Uref)
            worst_free = max(worst_free, float(np.max(np.abs(U - U_star))))
    elapsed = time.perf_counter() - t0
    _verdict(
        "horizon problem vs dense oracles",
        worst_free < 1e-9 and worst_boxed < 1e-9 and elapsed < 5.0,
        f"unconstrained {worst_free:.2e}, boxed {worst_boxed:.2e}, {elapsed:.1f}s",
    )
