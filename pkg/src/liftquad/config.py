"""Experiment configuration: INI-style file with sections, all defaults baked in.

Every CLI command works with no config file at all; a file (and per-flag
overrides) only changes what it names. Example:

    [quadrotor]
    mass = 0.904
    inertia = 0.0023, 0.0026, 0.0032   ; diagonal, or 9 row-major values
    gravity = 9.81

    [model]
    M = 3
    N = 3

    [mpc]
    horizon = 0.5
    dt = 0.05
    bounds = off
    thrust_bound = 40.0
    moment_bound = 2.0

    [run]
    seed = 0
    out = runs
    duration = 60
    plant_dt = 0.001

    [sweep]
    orders = 3,3; 4,4; 5,5
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .se3 import QuadParams


@dataclass
class ExperimentConfig:
    params: QuadParams = field(default_factory=QuadParams)
    M: int = 3
    N: int = 3
    horizon: float = 0.5
    dt: float = 0.05
    bounds_enabled: bool = True
    thrust_bound: Optional[float] = None  # default: 4 m g
    moment_bound: float = 0.3
    seed: int = 0
    out_dir: str = "runs"
    duration: Optional[float] = None
    plant_dt: float = 1e-3
    model_dt: float = 5e-3
    sweep_orders: List[Tuple[int, int]] = field(default_factory=lambda: [(3, 3), (4, 4), (5, 5)])
    workers: int = 1

    def ubar_bound(self) -> Optional[np.ndarray]:
        if not self.bounds_enabled:
            return None
        fb = self.thrust_bound if self.thrust_bound is not None else 4.0 * self.params.m * self.params.g
        return np.array([fb, self.moment_bound, self.moment_bound, self.moment_bound])


def _parse_floats(raw: str, n_expected: Tuple[int, ...]) -> List[float]:
    vals = [float(v) for v in raw.replace(";", ",").split(",") if v.strip()]
    if len(vals) not in n_expected:
        raise ValueError(f"expected {n_expected} numbers, got {len(vals)}")
    return vals


def _parse_orders(raw: str) -> List[Tuple[int, int]]:
    pairs = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        m, n = (int(v) for v in chunk.split(","))
        pairs.append((m, n))
    if not pairs:
        raise ValueError("no (M, N) pairs given")
    return pairs


def load_config(path: Optional[str] = None) -> ExperimentConfig:
    """Read a config file (or return defaults); raises ConfigError with the
    offending section/option or parser line context."""
    cfg = ExperimentConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path!r}: {exc}") from exc

    def grab(section, option, conv, setter):
        if parser.has_option(section, option):
            raw = parser.get(section, option)
            try:
                setter(conv(raw))
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"{path}: [{section}] {option} = {raw!r}: {exc}"
                ) from exc

    m = {"value": cfg.params.m}
    j = {"value": cfg.params.J}
    g = {"value": cfg.params.g}
    grab("quadrotor", "mass", float, lambda v: m.update(value=v))
    grab(
        "quadrotor",
        "inertia",
        lambda raw: _parse_floats(raw, (3, 9)),
        lambda v: j.update(value=np.diag(v) if len(v) == 3 else np.array(v).reshape(3, 3)),
    )
    grab("quadrotor", "gravity", float, lambda v: g.update(value=v))
    try:
        cfg.params = QuadParams(m=m["value"], J=j["value"], g=g["value"])
    except ValueError as exc:
        raise ConfigError(f"{path}: [quadrotor]: {exc}") from exc

    grab("model", "m", int, lambda v: setattr(cfg, "M", v))
    grab("model", "n", int, lambda v: setattr(cfg, "N", v))
    grab("mpc", "horizon", float, lambda v: setattr(cfg, "horizon", v))
    grab("mpc", "dt", float, lambda v: setattr(cfg, "dt", v))
    grab("mpc", "bounds", _parse_on_off, lambda v: setattr(cfg, "bounds_enabled", v))
    grab("mpc", "thrust_bound", float, lambda v: setattr(cfg, "thrust_bound", v))
    grab("mpc", "moment_bound", float, lambda v: setattr(cfg, "moment_bound", v))
    grab("run", "seed", int, lambda v: setattr(cfg, "seed", v))
    grab("run", "out", str, lambda v: setattr(cfg, "out_dir", v))
    grab("run", "duration", float, lambda v: setattr(cfg, "duration", v))
    grab("run", "plant_dt", float, lambda v: setattr(cfg, "plant_dt", v))
    grab("run", "model_dt", float, lambda v: setattr(cfg, "model_dt", v))
    grab("run", "workers", int, lambda v: setattr(cfg, "workers", v))
    grab("sweep", "orders", _parse_orders, lambda v: setattr(cfg, "sweep_orders", v))

    _validate(cfg, path)
    return cfg


def _parse_on_off(raw: str) -> bool:
    val = raw.strip().lower()
    if val in ("on", "true", "1", "yes"):
        return True
    if val in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"expected on/off, got {raw!r}")


def _validate(cfg: ExperimentConfig, path: str) -> None:
    problems = []
    if cfg.M < 1 or cfg.N < 1:
        problems.append(f"truncation orders must be >= 1 (M={cfg.M}, N={cfg.N})")
    if cfg.dt <= 0 or cfg.horizon <= 0:
        problems.append("mpc dt and horizon must be positive")
    elif abs(cfg.horizon / cfg.dt - round(cfg.horizon / cfg.dt)) > 1e-9:
        problems.append(f"horizon {cfg.horizon} is not a multiple of dt {cfg.dt}")
    if cfg.plant_dt <= 0:
        problems.append("plant_dt must be positive")
    elif abs(cfg.dt / cfg.plant_dt - round(cfg.dt / cfg.plant_dt)) > 1e-9:
        problems.append(f"mpc dt {cfg.dt} is not a multiple of plant_dt {cfg.plant_dt}")
    if cfg.duration is not None and cfg.duration <= 0:
        problems.append("duration must be positive")
    for (m_, n_) in cfg.sweep_orders:
        if m_ < 2 or n_ < 2:
            problems.append(f"sweep order ({m_},{n_}) below the supported minimum (2,2)")
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
