"""Miniaturization scaling laws.

Shrinking the rigid body by lambda_body and the tentacles by
lambda_tent: magnetic torque and force scale with the magnet volume
(lambda^3), so beam thicknesses must be rescaled to keep deflections
unchanged, and payload capacities shrink with volume while the
generated/transferred heating ratio shrinks linearly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .beam_mech import InnerBeamParams, TentacleParams
from .errors import InvalidArgumentError

#: feasibility requirement constants (editable data, not laws)
DRUG_REQUIREMENT_M3 = 0.115e-9
SAMPLE_REQUIREMENT_M3 = 0.0359e-9
#: smallest available cutting-tool cross-section (5 um tool)
MIN_TOOL_AREA_M2 = 7.85e-11

BASE_DRUG_M3 = 0.230e-9
BASE_SAMPLE_M3 = 0.064e-9
BASE_CUTTER_M2 = 1.47e-10


@dataclass(frozen=True)
class ScalePlan:
    lambda_body: float = 2.07 / 2.50
    lambda_tent: float = 2.5 / 4.4

    def __post_init__(self):
        if not (0 < self.lambda_body <= 1 and 0 < self.lambda_tent <= 1):
            raise InvalidArgumentError("shrink factors must be in (0, 1]")

    def compose(self, other: "ScalePlan") -> "ScalePlan":
        return ScalePlan(
            self.lambda_body * other.lambda_body,
            self.lambda_tent * other.lambda_tent,
        )


def wrench_scale(plan: ScalePlan) -> float:
    """Torque/force factor: magnet volume scales as lambda_body^3."""
    return plan.lambda_body ** 3


def inner_thickness(plan: ScalePlan, h_old: float) -> float:
    """Inner-beam thickness preserving tip deflection after shrinking."""
    if h_old <= 0:
        raise InvalidArgumentError("h_old must be > 0")
    return plan.lambda_body * h_old


def tentacle_thickness(plan: ScalePlan, h_old: float) -> float:
    """Tentacle thickness preserving curvature after shrinking."""
    if h_old <= 0:
        raise InvalidArgumentError("h_old must be > 0")
    return plan.lambda_tent * h_old


@dataclass(frozen=True)
class CapacityReport:
    drug_volume: float  # m^3
    sample_volume: float  # m^3
    cutter_area: float  # m^2
    heating_ratio: float  # generated/transferred heat, relative
    drug_ok: bool
    sample_ok: bool
    cutter_ok: bool


def capacities(plan: ScalePlan) -> CapacityReport:
    """Payload capacities of the scaled robot vs the requirement data."""
    k = plan.lambda_body ** 3
    drug = BASE_DRUG_M3 * k
    sample = BASE_SAMPLE_M3 * k
    cutter = BASE_CUTTER_M2 * k  # pressure parity: force and area shrink alike
    return CapacityReport(
        drug_volume=drug,
        sample_volume=sample,
        cutter_area=cutter,
        heating_ratio=plan.lambda_body,
        drug_ok=drug >= DRUG_REQUIREMENT_M3,
        sample_ok=sample >= SAMPLE_REQUIREMENT_M3,
        cutter_ok=cutter >= MIN_TOOL_AREA_M2,
    )


def scale_tentacle_params(plan: ScalePlan, params: TentacleParams) -> TentacleParams:
    """Tentacle beam constants after shrinking (same material).

    Length, width, and thickness all scale by lambda_tent, which keeps
    the dimensionless load kappa*L^2 and hence the tip angle unchanged
    at any field magnitude.
    """
    lam = plan.lambda_tent
    return replace(
        params,
        length=params.length * lam,
        width=params.width * lam,
        thickness=params.thickness * lam,
    )


def scale_inner_params(plan: ScalePlan, params: InnerBeamParams) -> InnerBeamParams:
    """Inner-beam constants after shrinking.

    The lumped magnet moment scales with volume (lambda^3), length with
    lambda, width with lambda, and thickness with lambda, so the second
    moment scales with lambda^4 and the tip angle is preserved.
    """
    lam = plan.lambda_body
    return replace(
        params,
        lumped_moment=params.lumped_moment * lam ** 3,
        second_moment=params.second_moment * lam ** 4,
        length=params.length * lam,
    )


def feasibility_table(plan: ScalePlan) -> str:
    """Human-readable feasibility summary for the CLI."""
    cap = capacities(plan)
    rows = [
        ("wrench_scale", f"{wrench_scale(plan):.6g}", ""),
        ("inner_thickness_60um_m", f"{inner_thickness(plan, 60e-6):.6g}", ""),
        ("inner_thickness_20um_m", f"{inner_thickness(plan, 20e-6):.6g}", ""),
        ("tentacle_thickness_150um_m", f"{tentacle_thickness(plan, 150e-6):.6g}", ""),
        (
            "drug_volume_m3",
            f"{cap.drug_volume:.6g}",
            f"requirement {DRUG_REQUIREMENT_M3:.6g} -> "
            + ("pass" if cap.drug_ok else "fail"),
        ),
        (
            "sample_volume_m3",
            f"{cap.sample_volume:.6g}",
            f"requirement {SAMPLE_REQUIREMENT_M3:.6g} -> "
            + ("pass" if cap.sample_ok else "fail"),
        ),
        (
            "cutter_area_m2",
            f"{cap.cutter_area:.6g}",
            f"tool area {MIN_TOOL_AREA_M2:.6g} -> "
            + ("feasible" if cap.cutter_ok else "infeasible"),
        ),
        ("heating_ratio", f"{cap.heating_ratio:.6g}", ""),
    ]
    width = max(len(r[0]) for r in rows)
    return "\n".join(
        f"{name:<{width}}  {value}" + (f"  ({note})" if note else "")
        for name, value, note in rows
    )
