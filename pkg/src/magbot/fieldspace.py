"""Field and gradient algebra.

A magnetic actuation signal is a flux density 3-vector plus the five
independent spatial gradients that survive the zero-divergence and
zero-curl constraints. The full 3x3 gradient matrix is symmetric and
traceless, so five numbers determine it. The wire order of the gradient
5-vector is fixed everywhere (CSV, config, solver stacking):

    [dBz/dx, dBz/dy, dBz/dz, dBy/dy, dBx/dy]

Angles are radians internally; degrees appear only at CLI/config
boundaries.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

GRAD_COMPONENTS = ("dBzdx", "dBzdy", "dBzdz", "dBydy", "dBxdy")

#: constructive tolerance (things true by construction)
TOL_CONSTRUCT = 1e-12
#: oracle-comparison tolerance (independent recomputation)
TOL_ORACLE = 1e-10

#: compositions allowed before a rotation chain is re-orthonormalized
REORTHO_EVERY = 64


class Frame(enum.Enum):
    GLOBAL = "global"
    INTERMEDIATE = "intermediate"
    LOCAL = "local"


@dataclass(frozen=True)
class FieldState:
    """Flux density (T) and the five independent gradients (T/m)."""

    b: np.ndarray
    grad: np.ndarray
    frame: Frame = Frame.LOCAL

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        grad = np.asarray(self.grad, dtype=float)
        if b.shape != (3,) or grad.shape != (5,):
            raise InvalidArgumentError(
                f"FieldState needs a 3-vector b and 5-vector grad, "
                f"got shapes {b.shape} and {grad.shape}"
            )
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(grad))):
            raise InvalidArgumentError("FieldState entries must be finite")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "grad", grad)

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.b))

    def as_vector8(self) -> np.ndarray:
        """Stacked [b; grad] 8-vector used by the actuation solver."""
        return np.concatenate([self.b, self.grad])

    @staticmethod
    def zero(frame: Frame = Frame.LOCAL) -> "FieldState":
        return FieldState(np.zeros(3), np.zeros(5), frame)


def gradient_matrix(grad) -> np.ndarray:
    """Reconstruct the symmetric traceless 3x3 gradient matrix.

    The (x,x) entry is forced by the trace-zero constraint:
    dBx/dx = -dBy/dy - dBz/dz.
    """
    g = np.asarray(grad, dtype=float)
    if g.shape != (5,) or not np.all(np.isfinite(g)):
        raise InvalidArgumentError("gradient 5-vector must be finite with shape (5,)")
    gm = np.empty((3, 3))
    gm[2, 0] = gm[0, 2] = g[0]
    gm[2, 1] = gm[1, 2] = g[1]
    gm[2, 2] = g[2]
    gm[1, 1] = g[3]
    gm[0, 1] = gm[1, 0] = g[4]
    gm[0, 0] = -g[3] - g[2]
    return gm


def gradient_vector(gm: np.ndarray) -> np.ndarray:
    """Extract the gradient 5-vector from a symmetric traceless matrix.

    Inverse of :func:`gradient_matrix`.
    """
    gm = np.asarray(gm, dtype=float)
    return np.array([gm[2, 0], gm[2, 1], gm[2, 2], gm[1, 1], gm[0, 1]])


def rot_axis(axis: str, angle: float) -> np.ndarray:
    """Standard right-handed rotation matrix about a coordinate axis."""
    if not np.isfinite(angle):
        raise InvalidArgumentError("rotation angle must be finite")
    c, s = np.cos(angle), np.sin(angle)
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    if axis == "y":
        return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    if axis == "z":
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    raise InvalidArgumentError(f"axis must be one of x, y, z, got {axis!r}")


def orthonormalize(r: np.ndarray) -> np.ndarray:
    """Project a near-rotation back onto the rotation group (Gram-Schmidt)."""
    q = np.empty_like(r, dtype=float)
    for j in range(3):
        v = r[:, j].astype(float)
        for k in range(j):
            v = v - np.dot(q[:, k], v) * q[:, k]
        q[:, j] = v / np.linalg.norm(v)
    if np.linalg.det(q) < 0:
        q[:, 2] = -q[:, 2]
    return q


def compose(rotations) -> np.ndarray:
    """Multiply a sequence of rotations, bounding drift.

    Re-orthonormalizes every REORTHO_EVERY factors so that chains of
    thousands of compositions stay orthonormal to well under 1e-10.
    """
    out = np.eye(3)
    for count, r in enumerate(rotations, start=1):
        out = out @ np.asarray(r, dtype=float)
        if count % REORTHO_EVERY == 0:
            out = orthonormalize(out)
    return out


def a_theta(theta: float) -> np.ndarray:
    """8x8 matrix mapping intermediate-frame signals to the local frame.

    Acts on the stacked [b; grad] vector; parameterized by the desired
    sixth-degree-of-freedom angle theta.
    """
    if not np.isfinite(theta):
        raise InvalidArgumentError("theta must be finite")
    c, s = np.cos(theta), np.sin(theta)
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    a = np.zeros((8, 8))
    a[0, 0] = c
    a[0, 1] = s
    a[1, 0] = -s
    a[1, 1] = c
    a[2, 2] = 1.0
    a[3, 3] = c
    a[3, 4] = s
    a[4, 3] = -s
    a[4, 4] = c
    a[5, 5] = 1.0
    a[6, 5] = -(s ** 2)
    a[6, 6] = c2
    a[6, 7] = -s2
    a[7, 5] = 0.5 * s2
    a[7, 6] = s2
    a[7, 7] = c2
    return a


def a2_matrix(alpha: float, beta: float) -> np.ndarray:
    """5x5 gradient-vector transform for the intermediate -> global map.

    Equivalent to conjugating the gradient matrix by Rx(alpha)Ry(beta)
    and re-extracting the 5-vector; written out in closed form.
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    c2a, s2a = np.cos(2 * alpha), np.sin(2 * alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    c2b, s2b = np.cos(2 * beta), np.sin(2 * beta)
    return np.array(
        [
            [ca * c2b, sa * sb, ca * s2b, 0.5 * ca * s2b, sa * cb],
            [
                0.5 * s2a * s2b,
                c2a * cb,
                -0.5 * s2a * c2b,
                0.5 * s2a * (1 + sb ** 2),
                -c2a * sb,
            ],
            [
                -(ca ** 2) * s2b,
                s2a * cb,
                ca ** 2 * c2b,
                sa ** 2 - ca ** 2 * sb ** 2,
                -s2a * sb,
            ],
            [
                -(sa ** 2) * s2b,
                -s2a * cb,
                sa ** 2 * c2b,
                ca ** 2 - sa ** 2 * sb ** 2,
                s2a * sb,
            ],
            [-sa * c2b, ca * sb, -sa * s2b, -0.5 * sa * s2b, ca * cb],
        ]
    )


def map_to_global(alpha: float, beta: float, fs: FieldState) -> FieldState:
    """Express an intermediate-frame field state in the global frame.

    b transforms by Rx(alpha)Ry(beta); the gradient 5-vector by the
    closed-form A2(alpha, beta) matrix. |b| is preserved.
    """
    if fs.frame is not Frame.INTERMEDIATE:
        raise InvalidArgumentError("map_to_global requires an intermediate-frame state")
    r = rot_axis("x", alpha) @ rot_axis("y", beta)
    return FieldState(r @ fs.b, a2_matrix(alpha, beta) @ fs.grad, Frame.GLOBAL)
