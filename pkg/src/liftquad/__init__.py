"""Analytic observable lifting of quadrotor dynamics on SE(3).

The package exposes, in dependency order:

* :mod:`liftquad.se3` - the nonlinear plant and SO(3) utilities;
* :mod:`liftquad.lifting` - observable chains, lifting/unlifting, residuals;
* :mod:`liftquad.models` - the lifted linear models and control maps;
* :mod:`liftquad.analysis` - controllability and approximation-error studies;
* :mod:`liftquad.mpc` - the receding-horizon tracking controller;
* :mod:`liftquad.cli` - the command-line front end.
"""

from .lifting import TruncationOrder, lift, lift_reference, residual_blocks, unlift
from .models import (
    LpvSystem,
    LtiSystem,
    build_A,
    build_B,
    build_Bbar,
    build_lpv,
    build_lti,
    map_control_bounds,
    pack_virtual,
    recover_control,
)
from .se3 import BodyControl, PseudoControl, QuadParams, QuadState

__all__ = [
    "BodyControl",
    "LpvSystem",
    "LtiSystem",
    "PseudoControl",
    "QuadParams",
    "QuadState",
    "TruncationOrder",
    "build_A",
    "build_B",
    "build_Bbar",
    "build_lpv",
    "build_lti",
    "lift",
    "lift_reference",
    "map_control_bounds",
    "pack_virtual",
    "recover_control",
    "residual_blocks",
    "unlift",
]

__version__ = "0.1.0"
