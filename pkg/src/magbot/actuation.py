"""Six-degrees-of-freedom actuation math.

Evaluates the magnetic wrench on a discretized magnetization profile,
builds the mode-specific 6x8 design matrices and the angle-parameterized
control matrix, and solves the redundant linear system for actuating
fields via pseudo-inverse plus null-space shaping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, SolverFailureError
from .fieldspace import FieldState, Frame, a_theta, gradient_matrix, rot_axis
from .robot_model import Mode

#: singular values below cutoff * sigma_max are treated as zero
SVD_CUTOFF = 1e-12


@dataclass(frozen=True)
class Wrench:
    torque: np.ndarray  # N*m
    force: np.ndarray  # N
    frame: Frame = Frame.LOCAL

    def __post_init__(self):
        t = np.asarray(self.torque, dtype=float)
        f = np.asarray(self.force, dtype=float)
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(f))):
            raise InvalidArgumentError("wrench entries must be finite")
        object.__setattr__(self, "torque", t)
        object.__setattr__(self, "force", f)


@dataclass(frozen=True)
class DCoefficients:
    """Moment-arm integrals of the magnetization profile (A*m^3)."""

    d2: float = 0.0
    d5: float = 0.0
    d6: float = 0.0
    d8: float = 0.0
    d9: float = 0.0
    d12: float = 0.0
    d15: float = 0.0


def d_coefficients(moments) -> DCoefficients:
    """Evaluate the moment-arm integrals as sums over dipoles.

    moments: iterable of (position r, moment m) pairs with r measured
    from the chosen center of mass.
    """
    d2 = d5 = d6 = d8 = d12 = d15 = 0.0
    for r, m in moments:
        rx, ry, rz = r
        mx, my, mz = m
        d2 += ry * my - rz * mz
        d6 += rz * mz - rx * mx
        d15 += rx * mx - ry * my
        d5 += -rz * mx
        d8 += -rz * mx - rx * mz
        d12 += rx * mz
    return DCoefficients(d2=d2, d5=d5, d6=d6, d8=d8, d9=d5, d12=d12, d15=d15)


def wrench(moments, fs: FieldState, com=None) -> Wrench:
    """Net torque and force on a dipole set from a local-frame field.

    torque = sum m x B + sum r x (G m); force = sum G m, with G the
    reconstructed gradient matrix and r measured from com.
    """
    if fs.frame is not Frame.LOCAL:
        raise InvalidArgumentError("wrench requires a local-frame field state")
    if com is None:
        com = np.zeros(3)
    g = gradient_matrix(fs.grad)
    torque = np.zeros(3)
    force = np.zeros(3)
    for r, m in moments:
        gm = g @ m
        torque += np.cross(m, fs.b) + np.cross(np.asarray(r) - com, gm)
        force += gm
    return Wrench(torque, force, Frame.LOCAL)


@dataclass(frozen=True)
class DesignMatrix:
    """6x8 map from [B; grad] to the wrench for a deformed shape."""

    mode: Mode
    moment_magnitude: float
    d: DCoefficients
    matrix: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix))


def design_matrix(mode: Mode, moment_magnitude: float, d: DCoefficients) -> DesignMatrix:
    """Fill the sparsity pattern for the given operating mode.

    Locomotion and drug-dispensing share a 9-nonzero pattern; cutting
    and gripping add four extra moment-arm couplings.
    """
    if moment_magnitude < 0:
        raise InvalidArgumentError("moment magnitude must be >= 0")
    mm = moment_magnitude
    mat = np.zeros((6, 8))
    mat[0, 1] = -mm
    mat[0, 4] = d.d2
    mat[1, 0] = mm
    mat[1, 3] = d.d6
    mat[2, 7] = d.d15
    mat[3, 3] = mm
    mat[4, 4] = mm
    mat[5, 5] = mm
    if mode in (Mode.CUTTING, Mode.GRIPPING_STORAGE):
        mat[0, 7] = d.d5
        mat[1, 5] = d.d8
        mat[1, 6] = d.d9
        mat[2, 4] = d.d12
    return DesignMatrix(mode, mm, d, mat)


def _block_rz(theta: float) -> np.ndarray:
    rz = rot_axis("z", theta)
    out = np.zeros((6, 6))
    out[:3, :3] = rz
    out[3:, 3:] = rz
    return out


def control_matrix(d: DesignMatrix, theta: float) -> np.ndarray:
    """Design matrix re-expressed in the intermediate frame at angle theta."""
    return _block_rz(theta) @ d.matrix @ a_theta(theta)


def first_null_vector() -> np.ndarray:
    """Pure B_z direction; null for every mode (column 3 of D is zero)."""
    e3 = np.zeros(8)
    e3[2] = 1.0
    return e3


def _analytic_second_null(theta: float) -> np.ndarray:
    """Rescaled closed form, bounded at every theta (no tan singularity)."""
    n = np.zeros(8)
    n[6] = np.cos(2 * theta)
    n[7] = -np.sin(2 * theta)
    return n


def second_null_vector(d: DesignMatrix, theta: float) -> np.ndarray:
    """Second homogeneous direction of C(theta).

    For locomotion/drug-dispensing this is the closed form
    [0,...,0, cos 2theta, -sin 2theta]. For cutting/gripping the extra
    design couplings shift it, so it is computed from the SVD null
    space: remove the first null vector's component, normalize the
    gradient sub-vector to unit norm, and fix the sign against the
    closed form so the result is deterministic and continuous.
    """
    c = control_matrix(d, theta)
    _, sv, vt = np.linalg.svd(c)
    null_dim = 8 - int(np.sum(sv > SVD_CUTOFF * sv[0]))
    if null_dim != 2:
        raise SolverFailureError(f"expected a 2-dim null space, got {null_dim}")
    basis = vt[6:, :]  # rows spanning the null space
    e3 = first_null_vector()
    analytic = _analytic_second_null(theta)
    # project the closed form onto the null space, then strip e3
    n = basis.T @ (basis @ analytic)
    n = n - np.dot(n, e3) * e3
    gnorm = np.linalg.norm(n[3:])
    if gnorm < 1e-12:
        raise SolverFailureError("degenerate second null vector")
    # dot(P a, a) >= 0 for any projection, so the sign is already fixed
    return n / gnorm


def solve_fields(
    d: DesignMatrix,
    theta: float,
    desired_force,
    k1: float = 0.0,
    k2: float = 0.0,
) -> FieldState:
    """Least-norm actuating signals plus null-space shaping.

    Returns the intermediate-frame field state x satisfying
    C(theta) x = [0; F], augmented with k1 along pure B_z and k2 along
    the second null direction.
    """
    f = np.asarray(desired_force, dtype=float)
    if f.shape != (3,) or not np.all(np.isfinite(f)):
        raise InvalidArgumentError("desired_force must be a finite 3-vector")
    c = control_matrix(d, theta)
    target = np.concatenate([np.zeros(3), f])
    u, sv, vt = np.linalg.svd(c, full_matrices=False)
    if np.sum(sv > SVD_CUTOFF * sv[0]) < 6:
        raise SolverFailureError("control matrix is rank deficient")
    x = vt.T @ ((u.T @ target) / sv)
    x = x + k1 * first_null_vector() + k2 * second_null_vector(d, theta)
    resid = float(np.linalg.norm(c @ x - target))
    if resid > 1e-9:
        raise SolverFailureError("field solve residual too large", residual=resid)
    return FieldState(x[:3], x[3:], Frame.INTERMEDIATE)


def restoring_torque(d: DesignMatrix, theta_actual: float, fs: FieldState) -> Wrench:
    """Wrench felt by a robot sitting at theta_actual under solved fields.

    fs is the intermediate-frame solution produced for the desired
    angle; the robot's own angle determines which control matrix applies.
    """
    if fs.frame is not Frame.INTERMEDIATE:
        raise InvalidArgumentError("restoring_torque needs an intermediate-frame state")
    w = control_matrix(d, theta_actual) @ fs.as_vector8()
    return Wrench(w[:3], w[3:], Frame.INTERMEDIATE)


def levitation_gradient(moment_magnitude: float, mass: float, g: float = 9.81) -> float:
    """Vertical field gradient (T/m) needed to support the robot's weight
    with its net moment fully aligned along z."""
    if moment_magnitude <= 0 or mass <= 0:
        raise InvalidArgumentError("moment and mass must be positive")
    return mass * g / moment_magnitude
