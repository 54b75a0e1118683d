"""CLI surface: scenario runs, exit codes, output determinism."""

from pathlib import Path

import numpy as np
import pytest

from magbot import cli, config
from magbot.errors import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_SAFETY,
    EXIT_SOLVER,
    ConfigError,
)
from magbot.waveform import CSV_HEADER, parse_waveform_csv

MISSION = str(Path(__file__).resolve().parents[1] / "scenarios"
              / "full_mission.toml")


def write_scenario(tmp_path, body):
    path = tmp_path / "scenario.toml"
    path.write_text(body)
    return str(path)


def run_cli(*argv):
    return cli.main(list(argv))


def test_empty_scenario_produces_valid_empty_outputs(tmp_path):
    cfg = write_scenario(tmp_path, "")
    out = tmp_path / "out"
    assert run_cli("run", "--config", cfg, "--out-dir", str(out)) == EXIT_OK
    assert (out / "waveform.csv").read_text() == CSV_HEADER + "\n"
    traj = (out / "trajectory.csv").read_text().splitlines()
    assert traj == [cli.TRAJECTORY_HEADER]
    assert (out / "events.log").read_text() == ""


def test_full_mission_events_in_order(tmp_path):
    out = tmp_path / "out"
    assert run_cli("run", "--config", MISSION, "--out-dir", str(out)) == EXIT_OK
    events = (out / "events.log").read_text()
    markers = [
        "gait roll_length",
        "function drug_dispensing",
        "demagnetize -> locomotion",
        "gait two_anchor_crawl",
        "function cutting",
        "function gripping_storage",
        "demagnetize -> locomotion",
        "gait two_anchor_crawl",
    ]
    pos = -1
    for marker in markers:
        nxt = events.find(marker, pos + 1)
        assert nxt > pos, f"event {marker!r} missing or out of order"
        pos = nxt


def test_full_mission_is_byte_identical_across_runs(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("run", "--config", MISSION, "--out-dir", str(out1)) == EXIT_OK
    assert run_cli("run", "--config", MISSION, "--out-dir", str(out2)) == EXIT_OK
    for name in ("waveform.csv", "trajectory.csv", "events.log",
                 "safety_report.txt"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_function_step_at_15mt_reports_positive_opening(tmp_path):
    cfg = write_scenario(tmp_path, """
[[steps]]
kind = "set_mode"
phi_deg = 90.0

[[steps]]
kind = "function"
mode = "drug_dispensing"
b_mT = 15.0
duration_s = 2.0
""")
    out = tmp_path / "out"
    assert run_cli("run", "--config", cfg, "--out-dir", str(out)) == EXIT_OK
    assert "opening > 0" in (out / "events.log").read_text()


def test_mode_mismatch_is_config_error_with_step_index(tmp_path):
    cfg = write_scenario(tmp_path, """
[[steps]]
kind = "function"
mode = "cutting"
""")
    with pytest.raises(ConfigError) as err:
        config.load_scenario(cfg)
    assert err.value.step_index == 0
    assert run_cli("run", "--config", cfg, "--out-dir", str(tmp_path / "o")) \
        == EXIT_CONFIG


def test_crawl_outside_locomotion_is_rejected(tmp_path):
    cfg = write_scenario(tmp_path, """
[[steps]]
kind = "set_mode"
phi_deg = 330.0

[[steps]]
kind = "gait"
gait = "crawl"
""")
    assert run_cli("run", "--config", cfg, "--out-dir", str(tmp_path / "o")) \
        == EXIT_CONFIG


def test_unknown_robot_key_is_config_error(tmp_path):
    cfg = write_scenario(tmp_path, """
[robot.geometry]
no_such_dimension = 1.0
""")
    assert run_cli("run", "--config", cfg, "--out-dir", str(tmp_path / "o")) \
        == EXIT_CONFIG


def test_robot_overrides_are_applied(tmp_path):
    cfg = write_scenario(tmp_path, """
[robot.params]
crawl_stride = 0.001

[robot.materials.tent_soft]
m_magnetized = 40000.0
""")
    scenario = config.load_scenario(cfg)
    assert scenario.robot.params.crawl_stride == 0.001
    assert scenario.robot.magnetization.magnetizations["tent_soft"] == 40000.0


def test_step_magnetize_fails_safety_audit(tmp_path):
    cfg = write_scenario(tmp_path, """
[[steps]]
kind = "set_mode"
phi_deg = 90.0
method = "step"
""")
    out = tmp_path / "out"
    assert run_cli("run", "--config", cfg, "--out-dir", str(out)) == EXIT_SAFETY
    report = (out / "safety_report.txt").read_text()
    assert "overall=fail" in report
    assert "verdict=fail" in report


def test_missing_config_file_is_config_error(tmp_path):
    assert run_cli("run", "--config", str(tmp_path / "nope.toml"),
                   "--out-dir", str(tmp_path / "o")) == EXIT_CONFIG


def test_solver_failure_exit_code():
    assert run_cli("solve-beam", "--beam", "inner", "--b-mt", "50000") \
        == EXIT_SOLVER


def test_solve_beam_outputs(capsys):
    assert run_cli("solve-beam", "--beam", "tentacle", "--b-mt", "8") == EXIT_OK
    out = capsys.readouterr().out
    assert "tip_angle_rad=0.770" in out
    assert "shape=upright_u" in out
    assert run_cli("solve-beam", "--beam", "inner", "--b-mt", "1.63") == EXIT_OK
    out = capsys.readouterr().out
    assert "tip_angle_rad=0.254870676" in out


def test_safety_subcommand_table(capsys):
    assert run_cli("safety", "--table") == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("category=") == 6
    assert out.count("verdict=fail") == 1


def test_safety_subcommand_on_failing_waveform(tmp_path):
    t = np.linspace(0.0, 0.01, 50)
    rows = [CSV_HEADER]
    for i, ti in enumerate(t):
        bz = 0.0 if i < 25 else 0.03  # hard step: far above the rate limit
        rows.append(f"{ti:.9g},0,0,{bz:.9g},0,0,0,0,0,global,")
    path = tmp_path / "w.csv"
    path.write_text("\n".join(rows) + "\n")
    assert run_cli("safety", "--input", str(path)) == EXIT_SAFETY


def test_safety_subcommand_on_passing_waveform(tmp_path):
    t = np.linspace(0.0, 2.0, 2000)
    rows = [CSV_HEADER]
    for ti in t:
        bz = 10e-3 * np.sin(2 * np.pi * ti)
        rows.append(f"{ti:.9g},0,0,{bz:.9g},0,0,0,0,0,global,")
    path = tmp_path / "w.csv"
    path.write_text("\n".join(rows) + "\n")
    assert run_cli("safety", "--input", str(path)) == EXIT_OK


def test_characterize_subcommand(tmp_path, capsys):
    slope = 58.5  # rad/T
    rows = ["gamma_rad,B_T"]
    for b_mt in (2, 4, 6, 8):
        b = b_mt * 1e-3
        g = slope * b
        for _ in range(100):
            g = slope * b * np.cos(g)
        rows.append(f"{g},{b}")
    path = tmp_path / "meas.csv"
    path.write_text("\n".join(rows) + "\n")
    assert run_cli("characterize", "--input", str(path),
                   "--m-sample-kapm", "108") == EXIT_OK
    out = capsys.readouterr().out
    ei = float(out.split("flexural_rigidity_Nm2=")[1].splitlines()[0])
    assert abs(ei - 1.21e-7) / 1.21e-7 < 0.015


def test_characterize_missing_input_is_io_error(tmp_path):
    assert run_cli("characterize", "--input", str(tmp_path / "x.csv"),
                   "--ei", "1e-7") == EXIT_IO


def test_scale_subcommand(capsys):
    assert run_cli("scale") == EXIT_OK
    out = capsys.readouterr().out
    assert "wrench_scale" in out and "pass" in out


def test_run_waveform_respects_actuation_coil_capacity(tmp_path):
    out = tmp_path / "out"
    run_cli("run", "--config", MISSION, "--out-dir", str(out))
    wf = parse_waveform_csv(out / "waveform.csv")
    mags = wf.magnitudes
    actuation_tags = np.array([tag in ("I", "II", "IV") for tag in wf.tags])
    assert mags[actuation_tags].max() <= 34e-3 + 1e-12
    assert np.abs(wf.grad).max() <= 0.4 + 1e-12
    assert np.all(np.diff(wf.t) > 0)
