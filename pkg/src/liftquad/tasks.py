"""Reference-trajectory tasks for the tracking experiments.

All built-in tasks use identity reference attitude and zero reference body
rate; the translational references are smooth closed forms with analytic
velocities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .se3 import QuadState


@dataclass
class TrackingTask:
    """One tracking experiment: references, duration, and the initial state."""

    name: str
    duration: float
    x_ref: Callable[[float], np.ndarray]
    v_ref: Optional[Callable[[float], np.ndarray]] = None
    R_ref: Callable[[float], np.ndarray] = field(default=lambda t: np.eye(3))
    omega_ref: Callable[[float], np.ndarray] = field(default=lambda t: np.zeros(3))
    initial_state: Callable[[], QuadState] = field(default=QuadState.identity)

    def velocity(self, t: float, h: float = 1e-4) -> np.ndarray:
        """Analytic reference velocity, or a central difference of x_ref."""
        if self.v_ref is not None:
            return np.asarray(self.v_ref(t), dtype=float)
        return (np.asarray(self.x_ref(t + h)) - np.asarray(self.x_ref(t - h))) / (2.0 * h)


def helix_task(duration: float = 60.0) -> TrackingTask:
    """Climbing helix; starts on the reference."""

    def x_ref(t):
        return np.array([t / 20.0, np.sin(t / 6.0), 2.0 * np.cos(t / 6.0)])

    def v_ref(t):
        return np.array([1.0 / 20.0, np.cos(t / 6.0) / 6.0, -np.sin(t / 6.0) / 3.0])

    def initial_state():
        return QuadState(x_ref(0.0), v_ref(0.0), np.eye(3), np.zeros(3))

    return TrackingTask("helix", duration, x_ref, v_ref, initial_state=initial_state)


def torus_knot_task(duration: float = 60.0) -> TrackingTask:
    """Closed torus-knot curve; starts on the reference."""

    def x_ref(t):
        return np.array(
            [
                np.sin(0.1 * t) + 2.0 * np.sin(0.2 * t),
                np.cos(0.1 * t) - 2.0 * np.cos(0.2 * t),
                -np.sin(0.3 * t),
            ]
        )

    def v_ref(t):
        return np.array(
            [
                0.1 * np.cos(0.1 * t) + 0.4 * np.cos(0.2 * t),
                -0.1 * np.sin(0.1 * t) + 0.4 * np.sin(0.2 * t),
                -0.3 * np.cos(0.3 * t),
            ]
        )

    def initial_state():
        return QuadState(x_ref(0.0), v_ref(0.0), np.eye(3), np.zeros(3))

    return TrackingTask("torus", duration, x_ref, v_ref, initial_state=initial_state)


def hover_task(duration: float = 40.0) -> TrackingTask:
    """Point-to-point move to a fixed hover position, starting at rest at the origin."""
    target = np.array([1.0, 1.3, 2.0])

    def x_ref(t):
        return target.copy()

    def v_ref(t):
        return np.zeros(3)

    return TrackingTask("hover", duration, x_ref, v_ref)


TASKS = {
    "helix": helix_task,
    "torus": torus_knot_task,
    "hover": hover_task,
}


def make_task(name: str, duration: Optional[float] = None) -> TrackingTask:
    if name not in TASKS:
        raise KeyError(f"unknown task {name!r}; available: {sorted(TASKS)}")
    task = TASKS[name]() if duration is None else TASKS[name](duration)
    return task
