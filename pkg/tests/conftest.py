"""Shared fixtures and profile builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from magbot import beam_mech, gaits, robot_model


@pytest.fixture
def robot():
    return robot_model.default_robot()


def tentacle_params(robot):
    return beam_mech.TentacleParams(
        youngs_modulus=robot.params.e_tent,
        magnetization=robot.magnetization.magnetizations["tent_soft"],
        length=robot.geometry.l_tent,
        width=robot.geometry.b_tent,
        thickness=robot.geometry.t_tent,
    )


def locomotion_profile(robot, b_z):
    """Deformed dipole profile in the moment-aligned local frame."""
    deflection = beam_mech.solve_tentacle(b_z, tentacle_params(robot))
    com = robot_model.center_of_mass(robot.geometry)
    prof = [(r - com, m) for r, m in gaits.deformed_profile(robot, deflection)]
    if deflection.moment_sign < 0:
        flip = np.diag([1.0, -1.0, -1.0])
        prof = [(flip @ r, flip @ m) for r, m in prof]
    return prof


def mirror_symmetric_profile(rng, n_pairs=12):
    """Random dipole set with zero x-y and y-z moment-arm cross sums.

    Every dipole is paired with its mirror through the x-z plane
    (y -> -y, m -> (mx, -my, mz)); one extra dipole at the origin
    cancels the net in-plane moment so the total points along +z.
    """
    prof = []
    for _ in range(n_pairs):
        r = rng.normal(size=3) * 1e-3
        m = rng.normal(size=3) * 1e-6
        prof.append((r.copy(), m.copy()))
        prof.append((r * np.array([1.0, -1.0, 1.0]), m * np.array([1.0, -1.0, 1.0])))
    sx = sum(m[0] for _, m in prof)
    sz = sum(m[2] for _, m in prof)
    prof.append((np.zeros(3), np.array([-sx, 0.0, 0.0])))
    if sz <= 0:  # ensure a positive net z moment
        prof.append((np.zeros(3), np.array([0.0, 0.0, abs(sz) + 1e-6])))
    return prof
