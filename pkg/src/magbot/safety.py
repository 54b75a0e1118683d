"""Waveform safety auditing: nerve-stimulation and tissue-heating limits.

Every actuating field is checked against two scalar criteria:

* the peak temporal rate of change dB/dt must stay below
  54 * (1 + 0.138 / eta) T/s, where eta (ms) is the duration of a
  monotonic field ramp segment;
* the field-intensity/frequency product |H| f must stay below
  9.46e9 A/(m*s).

Analytic waveform kinds get closed-form values; sampled waveforms are
analyzed by finite differences. Reported dB/dt for step inputs is the
mean rate over the settling interval (B0/eta); the stricter t=0
instantaneous rate is also emitted as information. Step-input |H| f
uses a convention-fitted factor and is marked "flagged" rather than
pass/fail, as is the remote-heating dB/dt figure whose published table
value is inconsistent with its own closed form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .waveform import Waveform

MU_0 = 4 * np.pi * 1e-7  # H/m
HF_LIMIT = 9.46e9  # A/(m*s)

#: step-input |H| f convention factor (fitted; see flagged verdicts)
STEP_HF_FACTOR = 0.2005


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    FLAGGED = "flagged"  # convention-fitted or inconsistent source value


@dataclass(frozen=True)
class Harmonic:
    b0: float  # T
    f: float  # Hz


@dataclass(frozen=True)
class StepRL:
    b0: float  # T
    inductance: float  # H
    resistance: float  # ohm


@dataclass(frozen=True)
class Ramp:
    rate: float  # T/s
    t_end: float  # s


@dataclass(frozen=True)
class DecayingHarmonic:
    b0: float  # T
    decay_per_period: float  # T
    f: float  # Hz


@dataclass(frozen=True)
class Sampled:
    t: np.ndarray
    b: np.ndarray  # magnitudes |B|, tesla


ANALYTIC_KINDS = (Harmonic, StepRL, Ramp, DecayingHarmonic)


@dataclass(frozen=True)
class SafetyReport:
    category: str
    eta_ms: float
    max_allowed_dbdt: float  # T/s
    reported_dbdt: float  # T/s (verdict driver)
    instantaneous_dbdt: float | None  # T/s, informational for steps
    hf_product: float  # A/(m*s)
    dbdt_verdict: Verdict
    hf_verdict: Verdict
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return Verdict.FAIL not in (self.dbdt_verdict, self.hf_verdict)


def dbdt_limit(eta_ms: float) -> float:
    """Maximum allowable dB/dt (T/s) for a monotonic segment of eta ms."""
    if eta_ms <= 0:
        raise InvalidArgumentError("eta must be > 0 ms")
    return 54.0 * (1.0 + 0.138 / eta_ms)


def eta_of(spec) -> float:
    """Monotonic segment duration in milliseconds.

    Quarter period for (decaying) harmonics, 2% settling time for RL
    steps, the full ramp duration for ramps.
    """
    if isinstance(spec, (Harmonic, DecayingHarmonic)):
        return 1e3 / (4 * spec.f)
    if isinstance(spec, StepRL):
        return 1e3 * 4 * spec.inductance / spec.resistance
    if isinstance(spec, Ramp):
        return 1e3 * spec.t_end
    if isinstance(spec, Sampled):
        return _sampled_eta_ms(spec)
    raise InvalidArgumentError(f"not a waveform spec: {spec!r}")


def reported_dbdt(spec) -> float:
    """Highest dB/dt (T/s) by the reporting convention.

    Harmonics: peak slope 2 pi f B0. Ramp: the rate. Step: mean rate
    over the settling interval, B0/eta.
    """
    if isinstance(spec, (Harmonic, DecayingHarmonic)):
        return 2 * np.pi * spec.f * spec.b0
    if isinstance(spec, Ramp):
        return spec.rate
    if isinstance(spec, StepRL):
        return spec.b0 / (eta_of(spec) * 1e-3)
    if isinstance(spec, Sampled):
        return float(np.max(np.abs(np.diff(spec.b) / np.diff(spec.t))))
    raise InvalidArgumentError(f"not a waveform spec: {spec!r}")


def instantaneous_dbdt(spec) -> float | None:
    """t=0 slope for step inputs (stricter than the mean); None otherwise."""
    if isinstance(spec, StepRL):
        return spec.b0 * spec.resistance / spec.inductance
    return None


def hf_product(spec) -> float:
    """|H| f in A/(m*s): (B0/mu0) times the effective frequency.

    f_effective is the drive frequency for harmonics, 1/t_end for
    ramps, and the convention-fitted 1/eta multiple for steps.
    """
    if isinstance(spec, (Harmonic, DecayingHarmonic)):
        return spec.b0 / MU_0 * spec.f
    if isinstance(spec, Ramp):
        b_end = spec.rate * spec.t_end
        return b_end / MU_0 / spec.t_end
    if isinstance(spec, StepRL):
        eta_s = eta_of(spec) * 1e-3
        return spec.b0 / MU_0 / eta_s * STEP_HF_FACTOR
    if isinstance(spec, Sampled):
        b0 = float(np.max(np.abs(spec.b)))
        eta_s = _sampled_eta_ms(spec) * 1e-3
        return b0 / MU_0 / (4 * eta_s)
    raise InvalidArgumentError(f"not a waveform spec: {spec!r}")


def _sampled_eta_ms(spec: Sampled) -> float:
    """Longest monotonic run of |B| in a sampled record, milliseconds."""
    t = np.asarray(spec.t, dtype=float)
    b = np.asarray(spec.b, dtype=float)
    if len(t) < 2:
        raise InvalidArgumentError("need at least 2 samples")
    db = np.diff(b)
    sign = np.sign(db)
    best = 0.0
    start = 0
    for i in range(1, len(db) + 1):
        if i == len(db) or (sign[i] != sign[i - 1] and sign[i] != 0 and sign[i - 1] != 0):
            best = max(best, t[i] - t[start])
            start = i
    return best * 1e3


def audit(spec, category: str = "custom", flags: tuple = ()) -> SafetyReport:
    """Audit one waveform spec (analytic or sampled) or a Waveform.

    flags may contain "hf" and/or "dbdt" to mark criteria whose source
    convention is fitted or inconsistent; flagged criteria never count
    as pass or fail.
    """
    if isinstance(spec, Waveform):
        if len(spec) < 2:
            raise InvalidArgumentError("need at least 2 samples to audit")
        spec = Sampled(spec.t, spec.magnitudes)
    eta = eta_of(spec)
    limit = dbdt_limit(eta)
    rep = reported_dbdt(spec)
    hf = hf_product(spec)
    notes = []
    if "dbdt" in flags:
        dbdt_v = Verdict.FLAGGED
        notes.append("dB/dt convention flagged: computed from the closed form")
    else:
        dbdt_v = Verdict.PASS if rep <= limit else Verdict.FAIL
    if "hf" in flags:
        hf_v = Verdict.FLAGGED
        notes.append("|H|f convention-fitted for step inputs")
    else:
        hf_v = Verdict.PASS if hf <= HF_LIMIT else Verdict.FAIL
    return SafetyReport(
        category=category,
        eta_ms=eta,
        max_allowed_dbdt=limit,
        reported_dbdt=rep,
        instantaneous_dbdt=instantaneous_dbdt(spec),
        hf_product=hf,
        dbdt_verdict=dbdt_v,
        hf_verdict=hf_v,
        notes=tuple(notes),
    )


def reference_specs() -> dict:
    """The toolkit's standard field categories.

    I: locomotion rotation harmonic. II: function-actuation coil step.
    IIIa: magnetizing step and ramp. IIIb: demagnetizing decaying
    harmonic. IV: remote-heating high-frequency harmonic.
    """
    return {
        "I": Harmonic(15e-3, 3.0),
        "II": StepRL(34e-3, 6.3e-4, 0.79),
        "IIIa-step": StepRL(60e-3, 1.9e-4, 2.5),
        "IIIa-ramp": Ramp(12.0, 5e-3),
        "IIIb": DecayingHarmonic(65e-3, 2e-3, 45.0),
        "IV": Harmonic(9.34e-3, 75.4e3),
    }


#: criteria whose published values have no derivable convention
REFERENCE_FLAGS = {
    "II": ("hf",),
    "IIIa-step": ("hf",),
    "IV": ("dbdt",),
}


def audit_reference_table() -> list:
    """Audit every standard category; exactly one fail (IIIa step)."""
    return [
        audit(spec, category=cat, flags=REFERENCE_FLAGS.get(cat, ()))
        for cat, spec in reference_specs().items()
    ]


def format_report(report: SafetyReport) -> str:
    """One-criterion-per-line structured text block."""
    lines = [
        f"category={report.category}",
        f"eta_ms={report.eta_ms:.6g}",
        f"dbdt_limit_Tps={report.max_allowed_dbdt:.6g}",
        f"dbdt_reported_Tps={report.reported_dbdt:.6g} "
        f"verdict={report.dbdt_verdict.value}",
    ]
    if report.instantaneous_dbdt is not None:
        lines.append(f"dbdt_instantaneous_Tps={report.instantaneous_dbdt:.6g}")
    lines.append(
        f"hf_product_Apms={report.hf_product:.6g} verdict={report.hf_verdict.value}"
    )
    for note in report.notes:
        lines.append(f"note={note}")
    return "\n".join(lines)
