"""Nonlinear beam mechanics.

Solvers for the two elastic subsystems of the robot plus the fixed-free
characterization inversion used to identify material constants:

* the soft tentacle, a fixed-free beam whose distributed magnetic
  torque density gives the boundary value problem
  gamma'' = -kappa * cos(gamma), gamma(0) = 0, gamma'(L) = 0,
  with kappa = M * A * |B| / (EI), solved by RK4 shooting;
* the inner beams, whose lumped tip moment gives the transcendental
  equilibrium (1/2) m |B| (sqrt(3) cos g + sin g) = EI g / l;
* the through-origin regression of gamma*sec(gamma) against |B| that
  recovers either a flexural rigidity or a sample magnetization.

Empirical data (opening curves, deviation angles) ship as small lookup
tables with linear interpolation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgumentError, SolverFailureError
from .fieldspace import rot_axis
from .robot_model import FUNCTION_MODES, MODE_PHI, Mode

DEFAULT_BVP_STEPS = 256


class Shape(enum.Enum):
    UPRIGHT_U = "upright_u"  # tips bent toward +z (b_z > 0)
    INVERTED_U = "inverted_u"  # tips bent toward -z (b_z < 0)


@dataclass(frozen=True)
class TentacleParams:
    youngs_modulus: float = 3.96e5  # Pa
    magnetization: float = 37.5e3  # A/m
    length: float = 4.4e-3  # total tentacle length; each half is length/2
    width: float = 1.5e-3
    thickness: float = 0.15e-3

    @property
    def second_moment(self) -> float:
        return self.width * self.thickness ** 3 / 12

    @property
    def cross_section(self) -> float:
        return self.width * self.thickness

    @property
    def flexural_rigidity(self) -> float:
        return self.youngs_modulus * self.second_moment


@dataclass(frozen=True)
class InnerBeamParams:
    youngs_modulus: float = 5.70e5  # Pa
    second_moment: float = 2.43e-17  # m^4
    lumped_moment: float = 108e3 * 0.0208e-9  # A*m^2
    length: float = 1.0e-3  # m

    @property
    def flexural_rigidity(self) -> float:
        return self.youngs_modulus * self.second_moment


@dataclass(frozen=True)
class TentacleDeflection:
    """Solved half-tentacle profile; gamma is the nonnegative magnitude."""

    s: np.ndarray  # grid on [0, length/2]
    gamma: np.ndarray  # radians, gamma(0) = 0
    applied_b: float  # signed tesla
    shape: Shape

    @property
    def tip_angle(self) -> float:
        return float(self.gamma[-1])

    @property
    def moment_sign(self) -> float:
        """Sign of the deformed-profile net moment along z."""
        return 1.0 if self.shape is Shape.UPRIGHT_U else -1.0

    @property
    def span(self) -> float:
        """Substrate-plane projection of the half-tentacle (m)."""
        return float(np.trapezoid(np.cos(self.gamma), self.s))

    @property
    def lift(self) -> float:
        """Out-of-plane reach of the half-tentacle tip (m)."""
        return float(np.trapezoid(np.sin(self.gamma), self.s))


def _integrate_shoot(kappa: float, half_len: float, slope0: float, n: int):
    """RK4 integration of gamma'' = -kappa cos(gamma) from the root.

    Returns the gamma grid and the terminal slope gamma'(L).
    """
    h = half_len / n
    g, gp = 0.0, slope0
    gammas = np.empty(n + 1)
    gammas[0] = 0.0
    for i in range(n):
        k1g, k1p = gp, -kappa * np.cos(g)
        k2g, k2p = gp + 0.5 * h * k1p, -kappa * np.cos(g + 0.5 * h * k1g)
        k3g, k3p = gp + 0.5 * h * k2p, -kappa * np.cos(g + 0.5 * h * k2g)
        k4g, k4p = gp + h * k3p, -kappa * np.cos(g + h * k3g)
        g += h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
        gp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        gammas[i + 1] = g
    return gammas, gp


def solve_tentacle(
    b_z: float,
    params: TentacleParams | None = None,
    n_steps: int = DEFAULT_BVP_STEPS,
) -> TentacleDeflection:
    """Solve the half-tentacle boundary value problem by shooting.

    The unknown root slope gamma'(0) is bracketed in [0, sqrt(2*kappa)]
    (the first integral of the ODE bounds it) and refined until the
    free-end condition gamma'(L) = 0 holds; the scaled terminal residual
    is driven below 1e-8.
    """
    if params is None:
        params = TentacleParams()
    if abs(b_z) > 0.1:
        raise InvalidArgumentError("|b_z| must be <= 0.1 T")
    half_len = params.length / 2
    shape = Shape.INVERTED_U if b_z < 0 else Shape.UPRIGHT_U
    s = np.linspace(0.0, half_len, n_steps + 1)
    if b_z == 0:
        return TentacleDeflection(s, np.zeros(n_steps + 1), 0.0, shape)
    kappa = (
        params.magnetization * params.cross_section * abs(b_z)
        / params.flexural_rigidity
    )

    def terminal_slope(slope0: float) -> float:
        _, gp_end = _integrate_shoot(kappa, half_len, slope0, n_steps)
        return gp_end

    hi = np.sqrt(2 * kappa) * (1 + 1e-9)
    try:
        slope0 = brentq(terminal_slope, 0.0, hi, xtol=1e-15, rtol=1e-15)
    except ValueError as exc:
        raise SolverFailureError(f"shooting bracket failed: {exc}") from exc
    gammas, gp_end = _integrate_shoot(kappa, half_len, slope0, n_steps)
    residual = abs(gp_end) * half_len  # scaled (dimensionless) residual
    if residual > 1e-8:
        raise SolverFailureError(
            "tentacle shooting did not converge", residual=residual
        )
    return TentacleDeflection(s, gammas, float(b_z), shape)


def solve_inner_beam(
    b_func: float, params: InnerBeamParams | None = None
) -> float:
    """Tip rotation (radians) of one inner beam at field magnitude b_func.

    Root of (1/2) m |B| (sqrt(3) cos g + sin g) - EI g / l on [0, pi/2).
    """
    if params is None:
        params = InnerBeamParams()
    if b_func < 0:
        raise InvalidArgumentError("b_func must be >= 0")
    if b_func == 0:
        return 0.0
    ei_over_l = params.flexural_rigidity / params.length
    half_mb = 0.5 * params.lumped_moment * b_func

    def balance(g: float) -> float:
        return half_mb * (np.sqrt(3) * np.cos(g) + np.sin(g)) - ei_over_l * g

    hi = np.pi / 2 - 1e-12
    if balance(hi) >= 0:
        raise SolverFailureError("no bracket: beam folds past pi/2")
    g = brentq(balance, 0.0, hi, xtol=1e-15, rtol=1e-15)
    if abs(balance(g)) > 1e-12 * max(half_mb, ei_over_l):
        raise SolverFailureError("inner-beam residual too large", residual=balance(g))
    return float(g)


def contact_field(
    gamma_contact: float, params: InnerBeamParams | None = None
) -> float:
    """Field magnitude (T) at which the inner beam reaches gamma_contact."""
    if params is None:
        params = InnerBeamParams()
    ei_over_l = params.flexural_rigidity / params.length
    g = gamma_contact
    return (
        ei_over_l * g
        / (0.5 * params.lumped_moment * (np.sqrt(3) * np.cos(g) + np.sin(g)))
    )


@dataclass(frozen=True)
class CharacterizationFit:
    slope: float  # (rad)/T, through-origin
    flexural_rigidity: float  # N*m^2 (given or derived)
    m_sample: float  # A/m (given or derived)
    residual: float  # relative rms misfit


def characterize(
    measurements,
    v_sample: float,
    l_beam: float,
    flexural_rigidity: float | None = None,
    m_sample: float | None = None,
) -> CharacterizationFit:
    """Invert fixed-free beam deflection data.

    measurements: (gamma_tip [rad], |B| [T]) pairs. Fits the
    through-origin line gamma*sec(gamma) = slope * |B| and uses
    slope = M * V * l / (EI) to recover whichever of EI / M was not
    supplied (exactly one must be).
    """
    if (flexural_rigidity is None) == (m_sample is None):
        raise InvalidArgumentError("supply exactly one of flexural_rigidity, m_sample")
    data = np.asarray(measurements, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2:
        raise InvalidArgumentError("need >= 2 (gamma, B) measurement pairs")
    gamma, b = data[:, 0], data[:, 1]
    if np.any(np.abs(gamma) >= np.pi / 2):
        raise InvalidArgumentError("|gamma| must be < pi/2")
    if np.allclose(b, 0):
        raise InvalidArgumentError("all-zero test fields")
    y = gamma / np.cos(gamma)
    slope = float(np.dot(y, b) / np.dot(b, b))
    if slope <= 0:
        raise InvalidArgumentError("fit slope must be positive")
    misfit = y - slope * b
    residual = float(np.linalg.norm(misfit) / max(np.linalg.norm(y), 1e-300))
    if flexural_rigidity is None:
        flexural_rigidity = m_sample * v_sample * l_beam / slope
    else:
        m_sample = slope * flexural_rigidity / (v_sample * l_beam)
    return CharacterizationFit(slope, float(flexural_rigidity), float(m_sample), residual)


def deviation_direction(mode: Mode, shape: Shape, xi: float) -> np.ndarray:
    """Unit direction of the function-mode net moment, tilted by xi.

    Composes the in-plane mode rotation with the out-of-plane deviation
    applied to the upright locomotion moment direction z-hat.
    """
    if mode not in FUNCTION_MODES:
        raise InvalidArgumentError("deviation_direction needs a function mode")
    phi = MODE_PHI[mode]
    z_hat = np.array([0.0, 0.0, 1.0])
    if shape is Shape.INVERTED_U:
        r = rot_axis("z", phi - np.pi / 2) @ rot_axis("x", -xi)
    else:
        r = rot_axis("z", -phi + 3 * np.pi / 2) @ rot_axis("x", xi)
    return r @ z_hat


@dataclass(frozen=True)
class OpeningCurve:
    """Measured opening of a function mechanism vs field magnitude."""

    mode: Mode
    threshold_b: float  # T; opening is 0 strictly below this
    samples: tuple  # ((b [T], opening [m]), ...) sorted by b
    max_opening: float  # m

    def __post_init__(self):
        bs = [s[0] for s in self.samples]
        ops = [s[1] for s in self.samples]
        if list(bs) != sorted(bs):
            raise InvalidArgumentError("opening samples must be sorted by field")
        if any(o2 < o1 for o1, o2 in zip(ops, ops[1:])):
            raise InvalidArgumentError("opening must be nondecreasing")


#: activation thresholds (T) per function mode
MODE_THRESHOLDS = {
    Mode.DRUG_DISPENSING: 4e-3,
    Mode.CUTTING: 5e-3,
    Mode.GRIPPING_STORAGE: 7e-3,
}


def default_opening_curves() -> dict:
    """Anchor-point opening tables; replace from config when digitized
    curve data is available."""
    return {
        Mode.DRUG_DISPENSING: OpeningCurve(
            Mode.DRUG_DISPENSING, 4e-3, ((4e-3, 0.0), (34e-3, 1.2e-3)), 1.2e-3
        ),
        Mode.CUTTING: OpeningCurve(
            Mode.CUTTING, 5e-3, ((5e-3, 0.0), (34e-3, 464e-6)), 464e-6
        ),
        Mode.GRIPPING_STORAGE: OpeningCurve(
            Mode.GRIPPING_STORAGE, 7e-3, ((7e-3, 0.0), (34e-3, 709e-6)), 709e-6
        ),
    }


def opening(mode: Mode, b_func: float, curve: OpeningCurve | None = None) -> float:
    """Mechanism opening (m): zero below threshold, interpolated above,
    clamped at the curve maximum."""
    if curve is None:
        curve = default_opening_curves()[mode]
    if curve.mode is not mode:
        raise InvalidArgumentError("opening curve does not match mode")
    if b_func < curve.threshold_b:
        return 0.0
    bs = np.array([s[0] for s in curve.samples])
    ops = np.array([s[1] for s in curve.samples])
    return float(min(np.interp(b_func, bs, ops), curve.max_opening))
