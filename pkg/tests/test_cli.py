import json

import numpy as np
import pytest

from todalift import cli
from todalift.errors import ConfigError
from todalift.integrate import Trajectory

MINIMAL = {"n": 2, "g": [1.0], "q": [0.0, 0.0], "p": [0.0, 0.0], "t_final": 10.0}

CALM = {
    "n": 3,
    "g": [0.5, 0.4],
    "q": [-0.7, 0.0, 0.7],
    "p": [0.1, 0.0, -0.1],
    "t_final": 5.0,
}


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestParseConfig:
    def test_minimal_with_defaults(self):
        cfg = cli.parse_config(json.dumps(MINIMAL))
        assert cfg.method == "adaptive"
        assert cfg.rtol == 1e-10
        assert cfg.atol == 1e-12
        assert cfg.stride == 10
        assert cfg.p_y == 1.0
        assert np.array_equal(cfg.omega, [0.0])
        assert np.array_equal(cfg.p_omega, [1.0])

    def test_coupling_length_checked(self):
        doc = dict(MINIMAL, g=[1.0, 2.0])
        with pytest.raises(ConfigError, match="'g'"):
            cli.parse_config(json.dumps(doc))

    def test_tolerance_override(self):
        doc = dict(MINIMAL, rtol=1e-8)
        assert cli.parse_config(json.dumps(doc)).rtol == 1e-8

    def test_missing_key_named(self):
        doc = {k: v for k, v in MINIMAL.items() if k != "q"}
        with pytest.raises(ConfigError, match="'q'"):
            cli.parse_config(json.dumps(doc))

    def test_bad_tolerance_named(self):
        doc = dict(MINIMAL, rtol=-1.0)
        with pytest.raises(ConfigError, match="'rtol'"):
            cli.parse_config(json.dumps(doc))

    def test_unknown_key_rejected(self):
        doc = dict(MINIMAL, tfinal=3.0)
        with pytest.raises(ConfigError, match="'tfinal'"):
            cli.parse_config(json.dumps(doc))

    def test_not_json(self):
        with pytest.raises(ConfigError):
            cli.parse_config("{not json")


class TestWriteTrajectory:
    def test_empty_trajectory_header_only(self, tmp_path):
        traj = Trajectory(times=np.zeros(0), states=np.zeros((0, 2)), labels=("a", "b"))
        path = tmp_path / "empty.csv"
        cli.write_trajectory(traj, "csv", str(path))
        assert path.read_text() == "t,a,b\n"

    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(0)
        times = np.array([0.0, 0.1234567890123456])
        states = rng.uniform(-1, 1, (2, 3))
        traj = Trajectory(times=times, states=states, labels=("x_1", "x_2", "x_3"))
        path = tmp_path / "t.csv"
        cli.write_trajectory(traj, "csv", str(path))
        lines = path.read_text().strip().splitlines()
        for i, line in enumerate(lines[1:]):
            vals = [float(v) for v in line.split(",")]
            assert vals[0] == times[i]
            assert np.array_equal(np.array(vals[1:]), states[i])


class TestCommands:
    def test_toda_run_column_count(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, MINIMAL)
        assert cli.run_command(["toda", "run", "-c", cfgp]) == 0
        header = (tmp_path / "toda_run.csv").read_text().splitlines()[0].split(",")
        n, k = 2, 2
        assert len(header) == 1 + 2 * n + k + 1  # t, q, p, I_1..I_n, H
        assert header == ["t", "q_1", "q_2", "p_1", "p_2", "I_1", "I_2", "H"]

    def test_toda_run_deterministic(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, MINIMAL)
        assert cli.run_command(["toda", "run", "-c", cfgp]) == 0
        first = (tmp_path / "toda_run.csv").read_bytes()
        assert cli.run_command(["toda", "run", "-c", cfgp]) == 0
        assert (tmp_path / "toda_run.csv").read_bytes() == first

    def test_eisenhart_run_json_format(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, dict(CALM, output_format="json"))
        assert cli.run_command(["eisenhart", "run", "-c", cfgp]) == 0
        doc = json.loads((tmp_path / "eisenhart_run.json").read_text())
        assert set(doc) == {"t", "states", "monitors", "drift"}
        assert "p_y" in doc["monitors"]

    def test_oplift_compare(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, CALM)
        assert cli.run_command(["oplift", "compare", "-c", cfgp]) == 0
        rows = (tmp_path / "oplift_compare.csv").read_text().strip().splitlines()
        assert rows[0] == "pair,sup_dq"
        assert len(rows) == 4
        for row in rows[1:]:
            assert float(row.split(",")[1]) < 1e-6

    def test_oplift_exact_mode(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, CALM)
        assert cli.run_command(["oplift", "run", "--mode", "exact", "-c", cfgp]) == 0
        assert (tmp_path / "oplift_exact.csv").exists()

    def test_oplift_hamiltonian_mode(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, CALM)
        assert cli.run_command(["oplift", "run", "-c", cfgp]) == 0
        header = (tmp_path / "oplift_run.csv").read_text().splitlines()[0].split(",")
        assert "omega_1" in header and "p_omega_2" in header

    def test_forms_monitor_sets(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        assert cli.run_command(["forms", "monitor", "--set", "general", "-c", write_cfg(tmp_path, CALM)]) == 0
        two = {"n": 2, "g": [0.8], "q": [-0.4, 0.4], "p": [0.05, -0.05], "t_final": 5.0}
        assert cli.run_command(["forms", "monitor", "--set", "n2", "-c", write_cfg(tmp_path, two, "n2.json")]) == 0
        header = (tmp_path / "forms_n2.csv").read_text().splitlines()[0]
        assert "C_1" in header and "C_3" in header

    def test_reduce_check(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        assert cli.run_command(["reduce", "check", "-c", write_cfg(tmp_path, CALM)]) == 0
        doc = json.loads((tmp_path / "reduce_check.json").read_text())
        assert doc["max_ydot_residual"] < 1e-8
        assert doc["eisenhart_sup_dq"] < 1e-6

    def test_killing_extract_and_verify(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, CALM)
        assert cli.run_command(["killing", "extract", "-k", "2", "-c", cfgp]) == 0
        doc = json.loads((tmp_path / "killing_k2_eisenhart.json").read_text())
        assert doc["contraction_residual"] < 1e-10
        assert cli.run_command(["killing", "verify", "--lift", "eisenhart", "-k", "2", "-c", cfgp]) == 0
        reports = json.loads((tmp_path / "killing_verify_eisenhart.json").read_text())
        assert reports[0]["pass"] is True

    def test_identities_check(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        assert cli.run_command(["identities", "check", "-n", "5"]) == 0
        doc = json.loads((tmp_path / "identities.json").read_text())
        assert doc["z_closed_form"] < 1e-13
        assert doc["udu_round_trip"] < 1e-12

    def test_findings_report(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        assert cli.run_command(["findings", "report", "-n", "3"]) == 0
        doc = json.loads((tmp_path / "findings.json").read_text())
        assert "invariant_normalization" in doc

    def test_flag_overrides_config(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, MINIMAL)
        assert cli.run_command(["toda", "run", "-c", cfgp, "--t-final", "1.0", "--out", "short.csv"]) == 0
        rows = (tmp_path / "short.csv").read_text().strip().splitlines()
        assert float(rows[-1].split(",")[0]) == 1.0

    def test_unknown_subcommand_usage_error(self, capsys):
        assert cli.run_command(["frobnicate"]) == 2

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        assert cli.run_command(["toda", "run", "-c", str(bad)]) == 2

    def test_gate_failure_exits_one_with_report(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        sloppy = dict(MINIMAL, rtol=1e-3, atol=1e-3, q=[0.5, -0.5], p=[0.4, -0.4])
        cfgp = write_cfg(tmp_path, sloppy)
        assert cli.run_command(["toda", "run", "-c", cfgp]) == 1
        assert (tmp_path / "toda_run.csv").exists()

    def test_mismatched_monitor_set_exits_two(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TODALIFT_OUTDIR", str(tmp_path))
        cfgp = write_cfg(tmp_path, CALM)  # three particles
        assert cli.run_command(["forms", "monitor", "--set", "n2", "-c", cfgp]) == 2
