"""Reprogramming waveforms, the coercivity-gated state machine, and the
lumped remote-heating model.

The robot's operating mode is selected by magnetizing its programmable
components along an in-plane angle phi (90/330/210 degrees for the
three function modes) with a 60 mT pulse, or cleared back to locomotion
with a linearly decaying 65 mT alternating field. Components whose
intrinsic coercivity exceeds the applied peak keep their magnetization
unchanged (the coercivity gate).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgumentError
from .fieldspace import Frame
from .robot_model import (
    MIN_HARD_COERCIVITY,
    MagnetizationState,
    Mode,
    mode_from_phi,
)
from .waveform import Waveform


class ReprogramKind(enum.Enum):
    STEP_MAGNETIZE = "step_magnetize"
    RAMP_MAGNETIZE = "ramp_magnetize"
    DEMAGNETIZE = "demagnetize"


@dataclass(frozen=True)
class ReprogramParams:
    b_mag: float = 60e-3  # T, magnetizing amplitude
    ramp_rate: float = 12.0  # T/s
    b_demag: float = 65e-3  # T, demagnetizing start amplitude
    k_demag: float = 2e-3  # T per period of decay
    f_demag: float = 45.0  # Hz
    coil_resistance: float = 2.5  # ohm (reprogramming coil)
    coil_inductance: float = 1.9e-4  # H

    @property
    def demag_t_end(self) -> float:
        """Time at which the decaying envelope reaches zero."""
        return self.b_demag / (self.k_demag * self.f_demag)

    @property
    def step_settling_time(self) -> float:
        """2% settling time of the RL step response."""
        return 4 * self.coil_inductance / self.coil_resistance

    @property
    def ramp_t_end(self) -> float:
        return self.b_mag / self.ramp_rate


@dataclass(frozen=True)
class ReprogramWaveform:
    kind: ReprogramKind
    phi: float | None = None  # radians, in-plane magnetizing direction
    params: ReprogramParams = ReprogramParams()

    @property
    def peak_b(self) -> float:
        if self.kind is ReprogramKind.DEMAGNETIZE:
            return self.params.b_demag
        return self.params.b_mag

    @property
    def safety_tag(self) -> str:
        return "IIIb" if self.kind is ReprogramKind.DEMAGNETIZE else "IIIa"


def demag_waveform(t: float, params: ReprogramParams | None = None) -> float:
    """Signed demagnetizing sample (T): decaying-envelope cosine."""
    params = params or ReprogramParams()
    if not 0.0 <= t <= params.demag_t_end:
        raise InvalidArgumentError(
            f"t must be in [0, {params.demag_t_end:.4f}] s"
        )
    envelope = params.b_demag - params.k_demag * params.f_demag * t
    return envelope * np.cos(2 * np.pi * params.f_demag * t)


def magnetize_waveform(kind, t: float, params: ReprogramParams | None = None) -> float:
    """Magnetizing sample (T): RL step response or clamped ramp."""
    params = params or ReprogramParams()
    if t < 0:
        raise InvalidArgumentError("t must be >= 0")
    if kind is ReprogramKind.STEP_MAGNETIZE:
        rate = params.coil_resistance / params.coil_inductance
        return params.b_mag * (1 - np.exp(-rate * t))
    if kind is ReprogramKind.RAMP_MAGNETIZE:
        return min(params.ramp_rate * t, params.b_mag)
    raise InvalidArgumentError(f"not a magnetizing kind: {kind}")


def sample_reprogram_waveform(
    wf: ReprogramWaveform, dt: float = 1e-4
) -> Waveform:
    """Sampled global-frame waveform with its safety-category tag."""
    if dt <= 0:
        raise InvalidArgumentError("dt must be > 0")
    p = wf.params
    if wf.kind is ReprogramKind.DEMAGNETIZE:
        t_end = p.demag_t_end
        times = np.arange(0.0, t_end + dt / 2, dt)
        times = np.minimum(times, t_end)
        mags = np.array([demag_waveform(t, p) for t in times])
        direction = np.array([1.0, 0.0, 0.0])
    else:
        t_end = (
            5 * p.step_settling_time
            if wf.kind is ReprogramKind.STEP_MAGNETIZE
            else p.ramp_t_end
        )
        times = np.arange(0.0, t_end + dt / 2, dt)
        mags = np.array([magnetize_waveform(wf.kind, t, p) for t in times])
        phi = wf.phi if wf.phi is not None else 0.0
        direction = np.array([np.cos(phi), np.sin(phi), 0.0])
    b = np.outer(mags, direction)
    grad = np.zeros((len(times), 5))
    return Waveform(times, b, grad, Frame.GLOBAL, [wf.safety_tag] * len(times))


def apply_reprogram(
    state: MagnetizationState, waveform: ReprogramWaveform
) -> MagnetizationState:
    """Run the coercivity-gated magnetization state machine.

    Magnetizing sets the programmable components to their functional
    magnitudes along phi and switches to the matching function mode;
    demagnetizing drops them to the residual magnitudes (treated as
    negligible for moments) and returns to locomotion. Hard components
    are untouched as long as the peak field stays below their
    coercivity; a peak at or above the weakest hard coercivity is
    refused outright.
    """
    if waveform.peak_b >= MIN_HARD_COERCIVITY:
        raise InvalidArgumentError(
            f"peak field {waveform.peak_b * 1e3:.1f} mT would re-magnetize "
            f"hard components (weakest coercivity "
            f"{MIN_HARD_COERCIVITY * 1e3:.1f} mT)"
        )
    mags = dict(state.magnetizations)
    if waveform.kind is ReprogramKind.DEMAGNETIZE:
        mags["rprog"] = 1.19e3
        mags["heat"] = 0.766e3
        return replace(
            state,
            mode=Mode.LOCOMOTION,
            programmable_magnetized=False,
            phi=None,
            magnetizations=mags,
        )
    if waveform.phi is None:
        raise InvalidArgumentError("magnetizing waveform needs a phi direction")
    mode = mode_from_phi(waveform.phi)
    mags["rprog"] = 7.18e3
    mags["heat"] = 6.52e3
    return replace(
        state,
        mode=mode,
        programmable_magnetized=True,
        phi=float(waveform.phi % (2 * np.pi)),
        magnetizations=mags,
    )


@dataclass(frozen=True)
class ThermalState:
    temperature: float = 26.3  # deg C
    mass: float = 5.26e-6  # kg (heating component)
    specific_heat: float = 661.0  # J/(kg*K)
    heat_power: float = 1.36e-3  # W
    ambient: float = 26.3  # deg C
    cooling_tau: float = 30.0  # s


def heat_step(ts: ThermalState, dt: float, field_on: bool) -> ThermalState:
    """Advance the lossless lumped thermal model by dt seconds.

    Heating: dT = P dt / (m c). Cooling: exponential relaxation toward
    ambient with the configured time constant.
    """
    if dt < 0:
        raise InvalidArgumentError("dt must be >= 0")
    if dt == 0:
        return ts
    if field_on:
        d_temp = ts.heat_power * dt / (ts.mass * ts.specific_heat)
        return replace(ts, temperature=ts.temperature + d_temp)
    decayed = ts.ambient + (ts.temperature - ts.ambient) * np.exp(-dt / ts.cooling_tau)
    return replace(ts, temperature=float(decayed))


def heating_power_ratio(material: str, reference: str = "rprog") -> float:
    """Relative induction heating power between the lossy components.

    The heating component reaches the test temperature in a quarter of
    the reprogrammable module's time, so its power is fourfold.
    """
    powers = {"heat": 4.0, "rprog": 1.0}
    if material not in powers or reference not in powers:
        raise InvalidArgumentError("material must be 'heat' or 'rprog'")
    return powers[material] / powers[reference]
