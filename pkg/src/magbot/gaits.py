"""Gait waveform generators and the quasi-static kinematic stepper.

Three gait families are synthesized as global-frame waveforms: rolling
(constant-magnitude rotating field), two-anchor crawling (a five-phase
magnitude/tilt cycle), and spin-walking (alternating quarter rotations
kept below the active mode's function threshold). The stepper predicts
ideal trajectories: below the step-out frequency the robot tracks the
field exactly, translation follows calibrated contact kinematics scaled
by (1 - slip), and tentacle curvature is re-solved at each field level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import actuation, beam_mech, robot_model
from .errors import InterlockError, InvalidArgumentError
from .fieldspace import Frame, map_to_global
from .robot_model import Mode, Robot
from .waveform import Waveform

CRAWL_B_HIGH = 22e-3  # T, anchored phase
CRAWL_B_LOW = 8e-3  # T, extended phase
CRAWL_TILT = np.deg2rad(32.0)
ROLL_F_CAP = 1.0  # Hz
CRAWL_F_CAP = 2.5  # Hz

#: category tag carried by locomotion waveform samples
TAG_LOCOMOTION = "I"


class GaitKind(enum.Enum):
    ROLL_LENGTH = "roll_length"
    ROLL_WIDTH = "roll_width"
    TWO_ANCHOR_CRAWL = "two_anchor_crawl"
    SPIN_WALK = "spin_walk"


@dataclass(frozen=True)
class GaitPlan:
    kind: GaitKind
    mode: Mode
    frequency: float  # Hz
    duration: float  # s
    b_magnitude: float  # T (nominal / anchored magnitude)
    steer: Callable | None = None  # theta(t) radians
    cycles: int = 0
    k2: float = 0.4


@dataclass
class Environment:
    slip_factor: float = 0.0  # 0 = ideal contact, 1 = no traction
    gravity: bool = True
    substrate_z: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.slip_factor <= 1.0:
            raise InvalidArgumentError("slip_factor must be in [0, 1]")


def env_preset(name: str) -> Environment:
    presets = {"air": Environment(slip_factor=0.0), "oil": Environment(slip_factor=0.0)}
    if name not in presets:
        raise InvalidArgumentError(f"unknown environment preset {name!r}")
    return presets[name]


@dataclass
class Trajectory:
    t: np.ndarray
    position: np.ndarray  # N x 3 m
    rpy: np.ndarray  # N x 3 rad (roll, pitch, yaw)
    tip_angle: np.ndarray  # N rad
    contact: np.ndarray  # N bool
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise InvalidArgumentError("trajectory time must be strictly increasing")
        if not np.all(np.isfinite(self.position)):
            raise InvalidArgumentError("positions must be finite")


def deformed_profile(robot: Robot, deflection: beam_mech.TentacleDeflection):
    """Dipole list of the robot with its tentacles deformed.

    Soft-tentacle segments take their curled positions and rotated
    moments (both halves mirror each other); lumped dipoles are
    unchanged. Positions are relative to the material origin.
    """
    geom = robot.geometry
    state = robot.magnetization
    m_t = state.magnetizations["tent_soft"]
    area = geom.tentacle_cross_section
    s = deflection.s
    gamma = deflection.gamma
    sign = deflection.moment_sign
    z_mid = geom.z_tent_soft + geom.t_tent / 2
    # deformed centerline by cumulative integration of the angle profile
    y_line = np.concatenate(
        [[0.0], np.cumsum(0.5 * (np.cos(gamma[1:]) + np.cos(gamma[:-1])) * np.diff(s))]
    )
    z_line = np.concatenate(
        [[0.0], np.cumsum(0.5 * (np.sin(gamma[1:]) + np.sin(gamma[:-1])) * np.diff(s))]
    )
    out = []
    n_seg = len(s) - 1
    for j in range(n_seg):
        ds = s[j + 1] - s[j]
        y = 0.5 * (y_line[j] + y_line[j + 1])
        z = z_mid + sign * 0.5 * (z_line[j] + z_line[j + 1])
        g_mid = 0.5 * (gamma[j] + gamma[j + 1])
        m_mag = m_t * area * ds
        m_vec = m_mag * np.array([0.0, np.cos(g_mid), sign * np.sin(g_mid)])
        out.append((np.array([0.0, y, z]), m_vec))
        out.append((np.array([0.0, -y, z]), m_vec * np.array([1.0, -1.0, 1.0])))
    # lumped dipoles from the undeformed profile (rigid components)
    lumped = robot_model.profile_moments(state, geom, n_segments=1)[2:]
    out.extend(lumped)
    return out


def locomotion_design(robot: Robot, b_z: float) -> actuation.DesignMatrix:
    """Design matrix for the tentacle shape held by a field of b_z."""
    deflection = beam_mech.solve_tentacle(
        b_z,
        beam_mech.TentacleParams(
            youngs_modulus=robot.params.e_tent,
            magnetization=robot.magnetization.magnetizations["tent_soft"],
            length=robot.geometry.l_tent,
            width=robot.geometry.b_tent,
            thickness=robot.geometry.t_tent,
        ),
    )
    com = robot_model.center_of_mass(robot.geometry)
    profile = [(r - com, m) for r, m in deformed_profile(robot, deflection)]
    if deflection.moment_sign < 0:
        # the local frame rides with the robot: flipped about x when the
        # body operates in the inverted shape, so the net moment stays +z
        flip = np.diag([1.0, -1.0, -1.0])
        profile = [(flip @ r, flip @ m) for r, m in profile]
    d = actuation.d_coefficients(profile)
    m_net = np.sum([m for _, m in profile], axis=0)
    return actuation.design_matrix(
        robot.magnetization.mode, float(np.linalg.norm(m_net)), d
    )


def _check_limits(robot: Robot, b_mag: float):
    if b_mag > robot.params.coil_b_max:
        raise InvalidArgumentError(
            f"|B| = {b_mag * 1e3:.1f} mT exceeds the coil capacity "
            f"{robot.params.coil_b_max * 1e3:.0f} mT"
        )


def _emit(robot, times, alphas, betas, mags, design, steer, k2, tag):
    """Solve per-sample signals in the intermediate frame and map out."""
    bs, gs = [], []
    for t, a, bm, mag in zip(times, alphas, betas, mags):
        theta = steer(t) if steer is not None else 0.0
        fs = actuation.solve_fields(design, theta, np.zeros(3), k1=mag, k2=k2)
        out = map_to_global(a, bm, fs)
        bs.append(out.b)
        gs.append(out.grad)
    return Waveform(
        np.asarray(times), np.array(bs), np.array(gs), Frame.GLOBAL,
        [tag] * len(times),
    )


def plan_roll(
    axis: str,
    b: float,
    f_roll: float,
    duration: float,
    steer: Callable | None = None,
    robot: Robot | None = None,
    k2: float | None = None,
):
    """Rolling gait: constant |B| rotating about a body axis."""
    robot = robot or robot_model.default_robot()
    if axis not in ("length", "width"):
        raise InvalidArgumentError("axis must be 'length' or 'width'")
    if not 0.0 <= f_roll <= ROLL_F_CAP:
        raise InvalidArgumentError(f"f_roll must be in [0, {ROLL_F_CAP}] Hz")
    _check_limits(robot, b)
    k2 = robot.params.k2_default if k2 is None else k2
    spp = robot.params.samples_per_period
    n = max(int(round(spp * (duration * f_roll if f_roll > 0 else 1))), 1)
    times = np.linspace(0.0, duration, n, endpoint=False)
    phases = 2 * np.pi * f_roll * times
    if axis == "length":
        alphas, betas = phases, np.zeros(n)
        kind = GaitKind.ROLL_LENGTH
    else:
        alphas, betas = np.zeros(n), phases
        kind = GaitKind.ROLL_WIDTH
    design = locomotion_design(robot, -b)  # inverted-U rolling shape
    wf = _emit(robot, times, alphas, betas, np.full(n, b), design, steer, k2,
               TAG_LOCOMOTION)
    plan = GaitPlan(kind, robot.magnetization.mode, f_roll, duration, b,
                    steer=steer, k2=k2)
    return plan, wf


def _crawl_cycle_profile(u: np.ndarray):
    """Field magnitude and tilt over one cycle, u in [0, 1).

    Five equal phases: hold 22 mT upright; tilt to +32 deg; drop to
    8 mT; tilt back; restore 22 mT.
    """
    b = np.empty_like(u)
    alpha = np.empty_like(u)
    ph = np.floor(u * 5).astype(int)
    frac = u * 5 - ph
    hi, lo, tilt = CRAWL_B_HIGH, CRAWL_B_LOW, CRAWL_TILT
    b[ph == 0] = hi
    alpha[ph == 0] = 0.0
    b[ph == 1] = hi
    alpha[ph == 1] = tilt * frac[ph == 1]
    b[ph == 2] = hi + (lo - hi) * frac[ph == 2]
    alpha[ph == 2] = tilt
    b[ph == 3] = lo
    alpha[ph == 3] = tilt * (1 - frac[ph == 3])
    b[ph == 4] = lo + (hi - lo) * frac[ph == 4]
    alpha[ph == 4] = 0.0
    return b, alpha


def plan_crawl(cycles: int, f_crawl: float, robot: Robot | None = None):
    """Two-anchor crawling; valid only in locomotion mode."""
    robot = robot or robot_model.default_robot()
    if robot.magnetization.mode is not Mode.LOCOMOTION:
        raise InterlockError("two-anchor crawling is exclusive to locomotion mode")
    if cycles < 0:
        raise InvalidArgumentError("cycles must be >= 0")
    if not 0.0 < f_crawl <= CRAWL_F_CAP:
        raise InvalidArgumentError(f"f_crawl must be in (0, {CRAWL_F_CAP}] Hz")
    plan = GaitPlan(
        GaitKind.TWO_ANCHOR_CRAWL, Mode.LOCOMOTION, f_crawl,
        cycles / f_crawl, CRAWL_B_HIGH, cycles=cycles,
        k2=robot.params.k2_default,
    )
    if cycles == 0:
        return plan, Waveform.empty()
    spp = robot.params.samples_per_period
    n = spp * cycles
    times = np.arange(n) / (spp * f_crawl)
    u = (times * f_crawl) % 1.0
    mags, alphas = _crawl_cycle_profile(u)
    design = locomotion_design(robot, -CRAWL_B_HIGH)
    wf = _emit(robot, times, alphas, np.zeros(n), mags, design, None,
               robot.params.k2_default, TAG_LOCOMOTION)
    return plan, wf


def plan_spin_walk(
    steps: int,
    mode: Mode,
    b: float | None = None,
    robot: Robot | None = None,
    step_duration: float = 1.0,
):
    """Alternating quarter rotations about body x then y.

    In a function mode the field magnitude must stay strictly below the
    mode's activation threshold so the function stays dormant while the
    robot walks (interlock).
    """
    robot = robot or robot_model.default_robot()
    if steps < 0:
        raise InvalidArgumentError("steps must be >= 0")
    if mode in beam_mech.MODE_THRESHOLDS:
        threshold = beam_mech.MODE_THRESHOLDS[mode]
        if b is None:
            b = threshold - 1e-3
        if b >= threshold:
            raise InterlockError(
                f"|B| = {b * 1e3:.1f} mT would activate {mode.value} "
                f"(threshold {threshold * 1e3:.0f} mT)"
            )
    elif b is None:
        b = 15e-3
    _check_limits(robot, b)
    plan = GaitPlan(
        GaitKind.SPIN_WALK, mode, 1.0 / step_duration,
        steps * step_duration, b, cycles=steps, k2=robot.params.k2_default,
    )
    if steps == 0:
        return plan, Waveform.empty()
    per_step = max(robot.params.samples_per_period // 4, 2)
    times, alphas, betas = [], [], []
    for k in range(steps):
        tt = k * step_duration + np.arange(per_step) / per_step * step_duration
        ramp = np.arange(per_step) / per_step * (np.pi / 2)
        times.append(tt)
        if k % 2 == 0:
            alphas.append(ramp)
            betas.append(np.zeros(per_step))
        else:
            alphas.append(np.zeros(per_step))
            betas.append(ramp)
    times = np.concatenate(times)
    n = len(times)
    design = locomotion_design(robot, -b)
    wf = _emit(robot, times, np.concatenate(alphas), np.concatenate(betas),
               np.full(n, b), design, None, robot.params.k2_default,
               TAG_LOCOMOTION)
    return plan, wf


def geometric_stride(
    robot: Robot | None = None,
    b_high: float = CRAWL_B_HIGH,
    b_low: float = CRAWL_B_LOW,
    tilt: float = CRAWL_TILT,
) -> float:
    """Crawl stride predicted from the solved tentacle shapes (m).

    Advance of the free tip through the tilted extension phase: the
    span gain projects through cos(tilt) and the lift change through
    sin(tilt), both per half-tentacle.
    """
    robot = robot or robot_model.default_robot()
    params = beam_mech.TentacleParams(
        youngs_modulus=robot.params.e_tent,
        magnetization=robot.magnetization.magnetizations["tent_soft"],
        length=robot.geometry.l_tent,
        width=robot.geometry.b_tent,
        thickness=robot.geometry.t_tent,
    )
    hi = beam_mech.solve_tentacle(b_high, params)
    lo = beam_mech.solve_tentacle(b_low, params)
    return (lo.span - hi.span) * np.cos(tilt) + (hi.lift - lo.lift) * np.sin(tilt)


def _roll_axis_speed(plan: GaitPlan, robot: Robot):
    if plan.kind is GaitKind.ROLL_LENGTH:
        circ = robot.params.circumference_length
        direction = np.array([0.0, 1.0, 0.0])
        step_out = robot.params.step_out_x
        axis = 0
    else:
        circ = robot.params.circumference_width
        direction = np.array([1.0, 0.0, 0.0])
        step_out = robot.params.step_out_y
        axis = 1
    return circ, direction, step_out, axis


def simulate(plan: GaitPlan, robot: Robot | None = None,
             env: Environment | None = None) -> Trajectory:
    """Quasi-static trajectory prediction for a gait plan.

    Deterministic: identical plan, robot, and environment produce a
    bit-identical trajectory.
    """
    robot = robot or robot_model.default_robot()
    env = env or Environment()
    spp = robot.params.samples_per_period
    flags = []
    tent_params = beam_mech.TentacleParams(
        youngs_modulus=robot.params.e_tent,
        magnetization=robot.magnetization.magnetizations["tent_soft"],
        length=robot.geometry.l_tent,
        width=robot.geometry.b_tent,
        thickness=robot.geometry.t_tent,
    )
    tip_cache: dict = {}

    def tip(b_mag: float) -> float:
        key = round(b_mag, 9)
        if key not in tip_cache:
            tip_cache[key] = beam_mech.solve_tentacle(b_mag, tent_params).tip_angle
        return tip_cache[key]

    if plan.kind in (GaitKind.ROLL_LENGTH, GaitKind.ROLL_WIDTH):
        n = max(int(round(spp * max(plan.duration * plan.frequency, 1))), 2)
        t = np.linspace(0.0, plan.duration, n)
        circ, direction, step_out, axis = _roll_axis_speed(plan, robot)
        omega = 2 * np.pi * plan.frequency
        tracking = omega <= step_out
        if not tracking:
            flags.append("step_out")
        speed = circ * plan.frequency * (1 - env.slip_factor) if tracking else 0.0
        pos = np.outer(t * speed, direction)
        rpy = np.zeros((n, 3))
        if tracking:
            rpy[:, axis] = omega * t
        tipan = np.full(n, tip(plan.b_magnitude))
        contact = np.ones(n, dtype=bool)
        return Trajectory(t, pos, rpy, tipan, contact, flags)

    if plan.kind is GaitKind.TWO_ANCHOR_CRAWL:
        if plan.cycles == 0:
            t = np.array([0.0])
            return Trajectory(t, np.zeros((1, 3)), np.zeros((1, 3)),
                              np.array([tip(CRAWL_B_HIGH)]),
                              np.ones(1, dtype=bool), flags)
        n = spp * plan.cycles + 1
        t = np.arange(n) / (spp * plan.frequency)
        tilt_rate = CRAWL_TILT / (0.2 / plan.frequency)
        if tilt_rate > robot.params.step_out_x:
            flags.append("step_out")
        stride = robot.params.crawl_stride * (1 - env.slip_factor)
        # ideal kinematics: linear advance, one stride per cycle
        pos = np.zeros((n, 3))
        pos[:, 1] = stride * plan.frequency * t
        u = (t * plan.frequency) % 1.0
        mags, alphas = _crawl_cycle_profile(u)
        rpy = np.zeros((n, 3))
        rpy[:, 0] = alphas
        tipan = np.array([tip(bm) for bm in mags])
        contact = np.ones(n, dtype=bool)
        return Trajectory(t, pos, rpy, tipan, contact, flags)

    if plan.kind is GaitKind.SPIN_WALK:
        steps = plan.cycles
        n = max(steps, 1) + 1
        t = np.arange(n) * (1.0 / plan.frequency)
        pos = np.zeros((n, 3))
        step = robot.params.spin_walk_step * (1 - env.slip_factor)
        pos[:, 0] = np.arange(n) * (step if steps > 0 else 0.0)
        rpy = np.zeros((n, 3))
        rpy[1::2, 0] = np.pi / 2
        tipan = np.full(n, tip(plan.b_magnitude))
        contact = np.ones(n, dtype=bool)
        return Trajectory(t, pos, rpy, tipan, contact, flags)

    raise InvalidArgumentError(f"unknown gait kind {plan.kind}")
