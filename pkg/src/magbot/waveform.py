"""Time-sampled field sequences and their deterministic CSV format.

The CSV schema is the toolkit's wire format: one row per sample, fixed
9-significant-digit decimal formatting, LF line endings, no locale or
wall-clock dependence, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, MagbotError
from .fieldspace import Frame

CSV_HEADER = (
    "t_s,Bx_T,By_T,Bz_T,dBzdx_Tpm,dBzdy_Tpm,dBzdz_Tpm,dBydy_Tpm,dBxdy_Tpm,frame,tag"
)


@dataclass
class Waveform:
    """Sampled actuation signal: times, fields, gradients, metadata tags."""

    t: np.ndarray  # seconds, strictly increasing
    b: np.ndarray  # N x 3 tesla
    grad: np.ndarray  # N x 5 tesla/meter
    frame: Frame = Frame.GLOBAL
    tags: list = field(default_factory=list)  # per-sample category tag

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.b = np.asarray(self.b, dtype=float).reshape(-1, 3)
        self.grad = np.asarray(self.grad, dtype=float).reshape(-1, 5)
        n = len(self.t)
        if self.b.shape[0] != n or self.grad.shape[0] != n:
            raise InvalidArgumentError("waveform arrays must share a length")
        if not self.tags:
            self.tags = [""] * n
        if len(self.tags) != n:
            raise InvalidArgumentError("one tag per sample required")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.linalg.norm(self.b, axis=1)

    @staticmethod
    def empty(frame: Frame = Frame.GLOBAL) -> "Waveform":
        return Waveform(np.empty(0), np.empty((0, 3)), np.empty((0, 5)), frame, [])

    @staticmethod
    def concat(parts, time_gap: float = 0.0) -> "Waveform":
        """Join waveforms end to end, shifting each part's clock."""
        parts = [p for p in parts if len(p) > 0]
        if not parts:
            return Waveform.empty()
        frame = parts[0].frame
        ts, bs, gs, tags = [], [], [], []
        offset = 0.0
        for p in parts:
            if p.frame is not frame:
                raise InvalidArgumentError("cannot concat waveforms across frames")
            ts.append(p.t + offset)
            bs.append(p.b)
            gs.append(p.grad)
            tags.extend(p.tags)
            offset = float(ts[-1][-1]) + time_gap
        return Waveform(np.concatenate(ts), np.vstack(bs), np.vstack(gs), frame, tags)


def _fmt(x: float) -> str:
    # fixed 9 significant digits, stable across platforms
    return f"{x:.9g}"


def emit_waveform_csv(waveform: Waveform, path) -> None:
    """Write the waveform in the canonical CSV schema."""
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(render_waveform_csv(waveform))
    except OSError as exc:
        raise MagbotError(f"cannot write waveform: {exc}") from exc


def render_waveform_csv(waveform: Waveform) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for i in range(len(waveform)):
        row = [_fmt(waveform.t[i])]
        row += [_fmt(v) for v in waveform.b[i]]
        row += [_fmt(v) for v in waveform.grad[i]]
        row.append(waveform.frame.value)
        row.append(waveform.tags[i])
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def parse_waveform_csv(path) -> Waveform:
    """Read a waveform written by emit_waveform_csv (lossless round trip)."""
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MagbotError(f"cannot read waveform: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise InvalidArgumentError("unrecognized waveform CSV header")
    t, b, grad, tags = [], [], [], []
    frame = Frame.GLOBAL
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 11:
            raise InvalidArgumentError(f"malformed waveform row: {line!r}")
        t.append(float(parts[0]))
        b.append([float(v) for v in parts[1:4]])
        grad.append([float(v) for v in parts[4:9]])
        frame = Frame(parts[9])
        tags.append(parts[10])
    if not t:
        return Waveform.empty(frame)
    return Waveform(np.array(t), np.array(b), np.array(grad), frame, tags)
