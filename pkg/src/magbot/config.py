"""TOML configuration loading: robot overrides and scenario scripts.

Any geometry, material, or calibration constant of the default robot
can be overridden under the [robot.*] tables (SI units throughout,
except angles in degrees and fields in mT where the key name says so).
Scenarios are ordered [[steps]] arrays executed by the CLI runner.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import ConfigError
from .robot_model import Mode, Robot, default_robot


@dataclass(frozen=True)
class Step:
    kind: str  # set_mode | gait | function | heat | wait
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    robot: Robot
    steps: tuple
    environment: str = "air"


def _replace_from_table(obj, table: dict, where: str):
    valid = {f.name for f in dataclasses.fields(obj)}
    unknown = set(table) - valid
    if unknown:
        raise ConfigError(f"unknown keys in [{where}]: {sorted(unknown)}")
    return dataclasses.replace(obj, **table)


def robot_from_dict(data: dict) -> Robot:
    robot = default_robot()
    section = data.get("robot", {})
    geometry = robot.geometry
    params = robot.params
    materials = dict(robot.materials)
    magnetization = robot.magnetization
    if "geometry" in section:
        geometry = _replace_from_table(geometry, section["geometry"], "robot.geometry")
    if "params" in section:
        params = _replace_from_table(params, section["params"], "robot.params")
    if "materials" in section:
        mags = dict(magnetization.magnetizations)
        for name, table in section["materials"].items():
            if name not in materials:
                raise ConfigError(f"unknown material {name!r}")
            materials[name] = _replace_from_table(
                materials[name], table, f"robot.materials.{name}"
            )
            if "m_magnetized" in table:
                mags[name] = float(table["m_magnetized"])
        magnetization = dataclasses.replace(magnetization, magnetizations=mags)
    return Robot(geometry, materials, magnetization, params)


_STEP_KINDS = {"set_mode", "gait", "function", "heat", "wait"}
_GAIT_NAMES = {"roll_length", "roll_width", "crawl", "spin_walk"}
_MODE_NAMES = {m.value: m for m in Mode}


def _validate_steps(steps) -> tuple:
    """Static interlock validation: modes must match before execution."""
    mode = Mode.LOCOMOTION
    out = []
    for idx, raw in enumerate(steps):
        if "kind" not in raw:
            raise ConfigError("step is missing 'kind'", step_index=idx)
        kind = raw["kind"]
        opts = {k: v for k, v in raw.items() if k != "kind"}
        if kind not in _STEP_KINDS:
            raise ConfigError(f"unknown step kind {kind!r}", step_index=idx)
        if kind == "set_mode":
            if opts.get("demag"):
                mode = Mode.LOCOMOTION
            elif "phi_deg" in opts:
                phi = float(opts["phi_deg"]) % 360.0
                match = {90.0: Mode.DRUG_DISPENSING, 330.0: Mode.CUTTING,
                         210.0: Mode.GRIPPING_STORAGE}.get(phi)
                if match is None:
                    raise ConfigError(
                        f"phi_deg must be 90, 330 or 210, got {phi}", step_index=idx
                    )
                mode = match
            else:
                raise ConfigError(
                    "set_mode needs phi_deg or demag=true", step_index=idx
                )
        elif kind == "gait":
            name = opts.get("gait")
            if name not in _GAIT_NAMES:
                raise ConfigError(f"unknown gait {name!r}", step_index=idx)
            if name == "crawl" and mode is not Mode.LOCOMOTION:
                raise ConfigError(
                    "two-anchor crawl requires locomotion mode", step_index=idx
                )
        elif kind == "function":
            want = opts.get("mode")
            if want not in _MODE_NAMES or _MODE_NAMES[want] is Mode.LOCOMOTION:
                raise ConfigError(f"function needs a function mode, got {want!r}",
                                  step_index=idx)
            if _MODE_NAMES[want] is not mode:
                raise ConfigError(
                    f"function step needs mode {want}, but the robot is in "
                    f"{mode.value}",
                    step_index=idx,
                )
        out.append(Step(kind, opts))
    return tuple(out)


def load_scenario(path) -> Scenario:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    robot = robot_from_dict(data)
    env = data.get("environment", {}).get("preset", "air")
    if env not in ("air", "oil"):
        raise ConfigError(f"environment preset must be air or oil, got {env!r}")
    steps = _validate_steps(data.get("steps", []))
    return Scenario(robot=robot, steps=steps, environment=env)


def load_robot(path) -> Robot:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    return robot_from_dict(data)
