"""Simulation and control-planning toolkit for a magnetically
reprogrammable miniature soft robot.

Submodules:

* fieldspace — field/gradient state, frames, rotation algebra
* robot_model — geometry, materials, magnetization state, net moments
* beam_mech — tentacle and inner-beam solvers, characterization fits
* actuation — dipole wrenches, design/control matrices, field solving
* waveform — sampled field sequences and the deterministic CSV format
* gaits — gait waveform synthesis and the kinematic stepper
* reprogram_thermal — reprogramming waveforms, coercivity gate, heating
* safety — dB/dt and |H|f waveform auditing
* scaling — miniaturization scaling laws and feasibility
* config / cli — scenario files and the command-line surface
"""

from . import (
    actuation,
    beam_mech,
    config,
    fieldspace,
    gaits,
    reprogram_thermal,
    robot_model,
    safety,
    scaling,
    waveform,
)
from .errors import (
    ConfigError,
    InterlockError,
    InvalidArgumentError,
    MagbotError,
    SolverFailureError,
)
from .fieldspace import FieldState, Frame
from .robot_model import Mode, Robot, default_robot
from .waveform import Waveform

__version__ = "1.0.0"

__all__ = [
    "actuation",
    "beam_mech",
    "config",
    "fieldspace",
    "gaits",
    "reprogram_thermal",
    "robot_model",
    "safety",
    "scaling",
    "waveform",
    "ConfigError",
    "InterlockError",
    "InvalidArgumentError",
    "MagbotError",
    "SolverFailureError",
    "FieldState",
    "Frame",
    "Mode",
    "Robot",
    "default_robot",
    "Waveform",
    "__version__",
]
