"""Command-line interface: scenario runner, safety auditor, scaling and
beam one-shots.

Subcommands: run, safety, scale, characterize, solve-beam. All outputs
are deterministic (no wall clock, no randomness, fixed formatting), so
re-running an identical invocation produces byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import beam_mech, config, gaits, reprogram_thermal as rt, safety, scaling
from .errors import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_SAFETY,
    EXIT_SOLVER,
    ConfigError,
    InterlockError,
    InvalidArgumentError,
    MagbotError,
    SolverFailureError,
)
from .fieldspace import Frame
from .robot_model import MODE_PHI, Mode
from .waveform import (
    Waveform,
    emit_waveform_csv,
    parse_waveform_csv,
    render_waveform_csv,
)

TRAJECTORY_HEADER = "t_s,x_m,y_m,z_m,roll_rad,pitch_rad,yaw_rad,tip_angle_rad,contact"

#: analytic references for composed-run auditing, keyed by sample tag
_TAG_FLAGS = {"II": ("hf",), "IIIa": ("hf",), "IV": ("dbdt",)}


def _fmt(x: float) -> str:
    return f"{x:.9g}"


class _RunState:
    """Mutable bookkeeping while a scenario executes."""

    def __init__(self, scenario: config.Scenario):
        self.robot = scenario.robot
        self.env = gaits.env_preset(scenario.environment)
        self.t = 0.0  # global clock, seconds
        self.pos = np.zeros(3)
        self.events: list[str] = []
        self.wave_t: list[np.ndarray] = []
        self.wave_b: list[np.ndarray] = []
        self.wave_g: list[np.ndarray] = []
        self.wave_tags: list[str] = []
        self.traj_rows: list[str] = []
        self.audits: list = []  # (category, analytic spec, flags)
        self.thermal = rt.ThermalState()

    def log(self, message: str):
        self.events.append(f"t={_fmt(self.t)} {message}")

    def add_waveform(self, wf: Waveform):
        if len(wf) == 0:
            return
        self.wave_t.append(wf.t + self.t)
        self.wave_b.append(wf.b)
        self.wave_g.append(wf.grad)
        self.wave_tags.extend(wf.tags)

    def add_trajectory(self, traj: gaits.Trajectory):
        for i in range(len(traj.t)):
            p = self.pos + traj.position[i]
            row = [
                _fmt(traj.t[i] + self.t),
                _fmt(p[0]), _fmt(p[1]), _fmt(p[2]),
                _fmt(traj.rpy[i, 0]), _fmt(traj.rpy[i, 1]), _fmt(traj.rpy[i, 2]),
                _fmt(traj.tip_angle[i]),
                "1" if traj.contact[i] else "0",
            ]
            self.traj_rows.append(",".join(row))

    def advance(self, duration: float):
        last = self.wave_t[-1][-1] if self.wave_t else 0.0
        self.t = max(self.t + duration, last + 1e-6)

    def composed(self) -> Waveform:
        if not self.wave_t:
            return Waveform.empty()
        return Waveform(
            np.concatenate(self.wave_t),
            np.vstack(self.wave_b),
            np.vstack(self.wave_g),
            Frame.GLOBAL,
            self.wave_tags,
        )


def _zero_samples(duration: float, n: int, tag: str = "") -> Waveform:
    t = np.linspace(0.0, duration, n, endpoint=False)
    return Waveform(t, np.zeros((n, 3)), np.zeros((n, 5)), Frame.GLOBAL, [tag] * n)


def _exec_set_mode(state: _RunState, opts: dict):
    p = rt.ReprogramParams()
    if opts.get("demag"):
        wf = rt.ReprogramWaveform(rt.ReprogramKind.DEMAGNETIZE, params=p)
        duration = p.demag_t_end
        state.audits.append(
            ("IIIb", safety.DecayingHarmonic(p.b_demag, p.k_demag, p.f_demag), ())
        )
    else:
        phi = np.deg2rad(float(opts["phi_deg"]))
        method = opts.get("method", "ramp")
        if method == "ramp":
            kind = rt.ReprogramKind.RAMP_MAGNETIZE
            duration = p.ramp_t_end
            state.audits.append(
                ("IIIa-ramp", safety.Ramp(p.ramp_rate, p.ramp_t_end), ())
            )
        elif method == "step":
            kind = rt.ReprogramKind.STEP_MAGNETIZE
            duration = 5 * p.step_settling_time
            state.audits.append(
                ("IIIa-step",
                 safety.StepRL(p.b_mag, p.coil_inductance, p.coil_resistance),
                 ("hf",))
            )
        else:
            raise ConfigError(f"set_mode method must be ramp or step, got {method!r}")
        wf = rt.ReprogramWaveform(kind, phi=phi, params=p)
    sampled = rt.sample_reprogram_waveform(wf, dt=1e-4)
    new_state = rt.apply_reprogram(state.robot.magnetization, wf)
    state.add_waveform(sampled)
    if wf.kind is rt.ReprogramKind.DEMAGNETIZE:
        state.log("demagnetize -> locomotion")
    else:
        state.log(
            f"magnetize phi_deg={_fmt(float(opts['phi_deg']))} -> "
            f"{new_state.mode.value}"
        )
    state.robot = state.robot.with_magnetization(new_state)
    state.advance(duration)


def _exec_gait(state: _RunState, opts: dict):
    name = opts["gait"]
    robot = state.robot
    if name in ("roll_length", "roll_width"):
        b = float(opts.get("b_mT", 15.0)) * 1e-3
        f = float(opts.get("f_hz", 0.5))
        duration = float(opts.get("duration_s", 1.0 / f if f > 0 else 1.0))
        plan, wf = gaits.plan_roll(name.removeprefix("roll_"), b, f, duration,
                                   robot=robot)
        state.audits.append(("I", safety.Harmonic(b, f), ()))
    elif name == "crawl":
        cycles = int(opts.get("cycles", 3))
        f = float(opts.get("f_hz", 1.0))
        plan, wf = gaits.plan_crawl(cycles, f, robot=robot)
        state.audits.append(("I", safety.Harmonic(gaits.CRAWL_B_HIGH, f), ()))
        duration = plan.duration
    else:  # spin_walk
        steps = int(opts.get("steps", 4))
        b = float(opts["b_mT"]) * 1e-3 if "b_mT" in opts else None
        plan, wf = gaits.plan_spin_walk(steps, robot.magnetization.mode, b,
                                        robot=robot)
        state.audits.append(
            ("I", safety.Harmonic(plan.b_magnitude, plan.frequency), ())
        )
        duration = plan.duration
    traj = gaits.simulate(plan, robot, state.env)
    state.add_waveform(wf)
    state.add_trajectory(traj)
    state.log(
        f"gait {plan.kind.value} f_hz={_fmt(plan.frequency)} "
        f"b_mT={_fmt(plan.b_magnitude * 1e3)}"
    )
    for flag in traj.flags:
        state.log(f"flag {flag}")
    state.pos = state.pos + traj.position[-1]
    state.advance(max(duration, float(traj.t[-1])))


def _exec_function(state: _RunState, opts: dict):
    mode = Mode(opts["mode"])
    b = float(opts.get("b_mT", 15.0)) * 1e-3
    duration = float(opts.get("duration_s", 2.0))
    if b > state.robot.params.coil_b_max:
        raise InvalidArgumentError(
            f"|B| = {b * 1e3:.1f} mT exceeds the coil capacity"
        )
    n = max(int(opts.get("samples", 100)), 1)
    t = np.linspace(0.0, duration, n, endpoint=False)
    bvec = np.tile([0.0, 0.0, b], (n, 1))
    state.add_waveform(
        Waveform(t, bvec, np.zeros((n, 5)), Frame.GLOBAL, ["II"] * n)
    )
    state.audits.append(("II", safety.StepRL(b, 6.3e-4, 0.79), ("hf",)))
    threshold = beam_mech.MODE_THRESHOLDS[mode]
    if b >= threshold:
        state.log(
            f"threshold_crossed {mode.value} b_mT={_fmt(b * 1e3)} "
            f"threshold_mT={_fmt(threshold * 1e3)}"
        )
    opening = beam_mech.opening(mode, b)
    note = " (opening > 0)" if opening > 0 else ""
    state.log(f"function {mode.value} opening_um={_fmt(opening * 1e6)}{note}")
    state.advance(duration)


def _exec_heat(state: _RunState, opts: dict):
    duration = float(opts.get("duration_s", 35.0))
    n = max(int(duration / 0.7), 2)
    # envelope samples of the high-frequency heating field (carrier is
    # audited analytically, not from the sampled record)
    t = np.linspace(0.0, duration, n, endpoint=False)
    bvec = np.tile([0.0, 0.0, 9.34e-3], (n, 1))
    state.add_waveform(
        Waveform(t, bvec, np.zeros((n, 5)), Frame.GLOBAL, ["IV"] * n)
    )
    state.audits.append(("IV", safety.Harmonic(9.34e-3, 75.4e3), ("dbdt",)))
    before = state.thermal.temperature
    state.thermal = rt.heat_step(state.thermal, duration, field_on=True)
    state.log(
        f"heat duration_s={_fmt(duration)} temp_C={_fmt(state.thermal.temperature)}"
        f" (+{_fmt(state.thermal.temperature - before)} K)"
    )
    state.advance(duration)


def _exec_wait(state: _RunState, opts: dict):
    duration = float(opts.get("duration_s", 1.0))
    state.add_waveform(_zero_samples(duration, max(int(duration / 0.1), 1)))
    state.thermal = rt.heat_step(state.thermal, duration, field_on=False)
    state.log(f"wait duration_s={_fmt(duration)}")
    state.advance(duration)


_EXECUTORS = {
    "set_mode": _exec_set_mode,
    "gait": _exec_gait,
    "function": _exec_function,
    "heat": _exec_heat,
    "wait": _exec_wait,
}


def run_scenario(scenario: config.Scenario, out_dir: Path) -> int:
    """Execute a scenario and write the four output files.

    Returns the exit code: 0, or 4 when the automatic safety audit of
    the composed waveform fails.
    """
    state = _RunState(scenario)
    for idx, step in enumerate(scenario.steps):
        try:
            _EXECUTORS[step.kind](state, step.options)
        except (InvalidArgumentError, InterlockError) as exc:
            raise ConfigError(str(exc), step_index=idx) from exc
    composed = state.composed()
    # audit each analytic category used by the run (deduplicated)
    reports = []
    seen = set()
    for cat, spec, flags in state.audits:
        key = (cat, spec)
        if key in seen:
            continue
        seen.add(key)
        reports.append(safety.audit(spec, category=cat, flags=flags))
    all_pass = all(r.passed for r in reports)

    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        emit_waveform_csv(composed, out_dir / "waveform.csv")
        with open(out_dir / "trajectory.csv", "w", newline="\n") as fh:
            fh.write(TRAJECTORY_HEADER + "\n")
            for row in state.traj_rows:
                fh.write(row + "\n")
        with open(out_dir / "events.log", "w", newline="\n") as fh:
            for line in state.events:
                fh.write(line + "\n")
        with open(out_dir / "safety_report.txt", "w", newline="\n") as fh:
            for r in reports:
                fh.write(safety.format_report(r) + "\n\n")
            fh.write(f"overall={'pass' if all_pass else 'fail'}\n")
    except OSError as exc:
        raise MagbotError(f"cannot write outputs: {exc}") from exc
    return EXIT_OK if all_pass else EXIT_SAFETY


def _cmd_run(args) -> int:
    scenario = config.load_scenario(args.config)
    if args.env is not None:
        scenario = config.Scenario(scenario.robot, scenario.steps, args.env)
    code = run_scenario(scenario, Path(args.out_dir))
    print(f"run complete: outputs in {args.out_dir}")
    if code != EXIT_OK:
        print("safety audit failed; see safety_report.txt", file=sys.stderr)
    return code


def _cmd_safety(args) -> int:
    if args.table:
        failed = False
        for report in safety.audit_reference_table():
            print(safety.format_report(report))
            print()
            failed = failed or not report.passed
        print(f"overall={'fail (expected: step magnetize)' if failed else 'pass'}")
        return EXIT_OK
    if not args.input:
        raise ConfigError("safety needs --input or --table")
    wf = parse_waveform_csv(args.input)
    report = safety.audit(wf, category="sampled")
    print(safety.format_report(report))
    return EXIT_OK if report.passed else EXIT_SAFETY


def _cmd_scale(args) -> int:
    plan = scaling.ScalePlan(args.lambda_body, args.lambda_tent)
    print(scaling.feasibility_table(plan))
    return EXIT_OK


def _cmd_characterize(args) -> int:
    try:
        data = np.loadtxt(args.input, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise MagbotError(f"cannot read measurements: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"malformed measurement CSV: {exc}") from exc
    if data.shape[1] != 2:
        raise ConfigError("measurement CSV needs two columns: gamma_rad,B_T")
    fit = beam_mech.characterize(
        data,
        v_sample=args.v_sample_mm3 * 1e-9,
        l_beam=args.l_beam_mm * 1e-3,
        flexural_rigidity=args.ei,
        m_sample=args.m_sample_kapm * 1e3 if args.m_sample_kapm else None,
    )
    print(f"slope_rad_per_T={fit.slope:.9g}")
    print(f"flexural_rigidity_Nm2={fit.flexural_rigidity:.9g}")
    print(f"magnetization_Apm={fit.m_sample:.9g}")
    print(f"relative_residual={fit.residual:.9g}")
    return EXIT_OK


def _cmd_solve_beam(args) -> int:
    b = args.b_mt * 1e-3
    if args.beam == "tentacle":
        sol = beam_mech.solve_tentacle(b)
        print(f"tip_angle_rad={sol.tip_angle:.9g}")
        print(f"tip_angle_deg={np.rad2deg(sol.tip_angle):.9g}")
        print(f"shape={sol.shape.value}")
        print(f"span_m={sol.span:.9g}")
        print(f"lift_m={sol.lift:.9g}")
    else:
        if b < 0:
            raise ConfigError("inner beam takes a nonnegative --b-mt")
        g = beam_mech.solve_inner_beam(b)
        print(f"tip_angle_rad={g:.9g}")
        print(f"tip_angle_deg={np.rad2deg(g):.9g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magbot",
        description="Simulation and control-planning toolkit for a "
        "magnetically reprogrammable miniature soft robot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out-dir", required=True)
    p_run.add_argument("--env", choices=("air", "oil"), default=None)
    p_run.set_defaults(func=_cmd_run)

    p_saf = sub.add_parser("safety", help="audit a waveform CSV")
    p_saf.add_argument("--input")
    p_saf.add_argument("--table", action="store_true",
                       help="audit the built-in reference categories")
    p_saf.set_defaults(func=_cmd_safety)

    p_sc = sub.add_parser("scale", help="miniaturization feasibility report")
    p_sc.add_argument("--lambda-body", type=float, default=2.07 / 2.50)
    p_sc.add_argument("--lambda-tent", type=float, default=2.5 / 4.4)
    p_sc.set_defaults(func=_cmd_scale)

    p_ch = sub.add_parser("characterize",
                          help="fit beam-deflection measurements")
    p_ch.add_argument("--input", required=True,
                      help="CSV with header and columns gamma_rad,B_T")
    p_ch.add_argument("--v-sample-mm3", type=float, default=7.07)
    p_ch.add_argument("--l-beam-mm", type=float, default=9.3)
    group = p_ch.add_mutually_exclusive_group(required=True)
    group.add_argument("--ei", type=float, help="known flexural rigidity, N*m^2")
    group.add_argument("--m-sample-kapm", type=float,
                       help="known magnetization, kA/m")
    p_ch.set_defaults(func=_cmd_characterize)

    p_sb = sub.add_parser("solve-beam", help="one-shot beam solutions")
    p_sb.add_argument("--beam", choices=("tentacle", "inner"), required=True)
    p_sb.add_argument("--b-mt", type=float, required=True,
                      help="field in mT (signed for the tentacle)")
    p_sb.set_defaults(func=_cmd_solve_beam)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        where = f" (step {exc.step_index})" if exc.step_index is not None else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidArgumentError, InterlockError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailureError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MagbotError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
