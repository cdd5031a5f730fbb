import json

import numpy as np
import pytest

from doblab import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, rows


class TestDiscretize:
    def test_double_integrator_values(self, capsys):
        code, out, _ = run_cli(capsys, "discretize", "--J", "1", "--b", "0", "--Ts", "0.001")
        assert code == 0
        assert "5e-07" in out.replace("e-7", "e-07")
        assert "0.001" in out

    def test_friction_decay(self, capsys):
        code, out, _ = run_cli(capsys, "discretize", "--J", "1", "--b", "1", "--Ts", "0.001")
        assert code == 0
        assert f"{np.exp(-0.001):.12g}"[:10] in out

    def test_bad_ts_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "discretize", "--J", "1", "--Ts", "-1")
        assert code == 2
        assert "error" in err


class TestTune:
    def test_hp_deadbeat(self, capsys):
        code, out, _ = run_cli(
            capsys, "tune", "hp", "--lambda1", "0", "--lambda2", "0",
            "--J", "0.005", "--b", "0.001", "--Ts", "0.001",
        )
        assert code == 0
        assert "stable (deadbeat)" in out

    def test_conventional_stable(self, capsys):
        code, out, _ = run_cli(
            capsys, "tune", "conventional", "--k", "1.5",
            "--J", "0.005", "--b", "0.001", "--Ts", "0.001",
        )
        assert code == 0
        assert "spectral_radius = 0.5" in out
        assert "verdict = stable" in out

    def test_conventional_unstable_warns_exit_zero(self, capsys):
        code, out, _ = run_cli(
            capsys, "tune", "conventional", "--k", "2.5",
            "--J", "0.005", "--b", "0.001", "--Ts", "0.001",
        )
        assert code == 0
        assert "verdict = unstable" in out
        assert "warning" in out


class TestSim:
    def test_pd_only_has_steady_tracking_error(self, capsys, tmp_path, scenario_dir):
        code, _, _ = run_cli(
            capsys, "sim",
            "--config", str(scenario_dir / "regulation_pd_only.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        header, rows = read_csv(tmp_path / "trace.csv")
        assert header == cli.CSV_COLUMNS
        # constant-load PD steady error ~ tau / Kp; well away from zero
        theta = rows[-500:, header.index("theta")]
        ref = rows[-500:, header.index("ref_pos")]
        assert np.mean(np.abs(ref - theta)) > 1e-3
        assert (tmp_path / "metrics.txt").exists()

    def test_row_count_contract(self, capsys, tmp_path, scenario_dir):
        code, _, _ = run_cli(
            capsys, "sim",
            "--config", str(scenario_dir / "ramp_hp.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        _, rows = read_csv(tmp_path / "trace.csv")
        assert len(rows) == int(np.floor(2.0 / 1e-3)) + 1

    def test_hp_deadbeat_scenario(self, capsys, tmp_path, scenario_dir):
        code, _, _ = run_cli(
            capsys, "sim",
            "--config", str(scenario_dir / "tracking_hp_deadbeat.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        header, rows = read_csv(tmp_path / "trace.csv")
        est = rows[2:, header.index("est_err")]
        assert np.max(np.abs(est)) <= 1e-9

    def test_missing_config_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "sim", "--config", str(tmp_path / "nope.json"))
        assert code == 2
        assert "not found" in err

    def test_bad_json_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run_cli(capsys, "sim", "--config", str(bad))
        assert code == 2
        assert "line" in err

    def test_divergence_exits_3(self, capsys, tmp_path, scenario_dir):
        doc = json.loads((scenario_dir / "ramp_conventional.json").read_text())
        doc["observer"] = {"type": "conventional", "k": 2.5}
        cfg = tmp_path / "diverge.json"
        cfg.write_text(json.dumps(doc))
        code, _, err = run_cli(capsys, "sim", "--config", str(cfg), "--out", str(tmp_path))
        assert code == 3
        assert "diverged at step" in err

    def test_byte_identical_reruns(self, capsys, tmp_path, scenario_dir):
        cfg = str(scenario_dir / "ramp_conventional.json")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_cli(capsys, "sim", "--config", cfg, "--out", str(out1))[0] == 0
        assert run_cli(capsys, "sim", "--config", cfg, "--out", str(out2))[0] == 0
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()

    def test_seed_env_override(self, capsys, tmp_path, scenario_dir, monkeypatch):
        doc = json.loads((scenario_dir / "ramp_conventional.json").read_text())
        doc["noise"] = {"omega_std": 0.05}
        cfg = tmp_path / "noisy.json"
        cfg.write_text(json.dumps(doc))
        out1, out2, out3 = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        monkeypatch.setenv("DOBLAB_SEED", "7")
        run_cli(capsys, "sim", "--config", str(cfg), "--out", str(out1))
        run_cli(capsys, "sim", "--config", str(cfg), "--out", str(out2))
        monkeypatch.setenv("DOBLAB_SEED", "8")
        run_cli(capsys, "sim", "--config", str(cfg), "--out", str(out3))
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
        assert (out1 / "trace.csv").read_bytes() != (out3 / "trace.csv").read_bytes()

    def test_mode_override(self, capsys, tmp_path, scenario_dir):
        code, out, _ = run_cli(
            capsys, "sim",
            "--config", str(scenario_dir / "regulation_pd_only.json"),
            "--out", str(tmp_path), "--mode", "discrete", "--emit", "summary",
        )
        assert code == 0
        assert not (tmp_path / "trace.csv").exists()
        assert "rms_track_err" in out


class TestCompare:
    def test_hp_beats_conventional(self, capsys, tmp_path, scenario_dir):
        code, out, _ = run_cli(
            capsys, "compare",
            "--config", str(scenario_dir / "compare_conv_vs_hp.json"),
            "--out", str(tmp_path),
        )
        assert code == 0
        lines = (tmp_path / "summary.txt").read_text().splitlines()
        assert lines[1].startswith("hp:")
        header, rows = read_csv(tmp_path / "compare.csv")
        assert header[: len(cli.CSV_COLUMNS)] == cli.CSV_COLUMNS
        for name in ("conventional", "hp"):
            assert f"tau_hat_{name}" in header
            assert f"est_err_{name}" in header

    def test_three_way_tracking_order(self, capsys, tmp_path, scenario_dir):
        from doblab.metrics import evaluate
        code, _, _ = run_cli(
            capsys, "compare",
            "--config", str(scenario_dir / "compare_three_way.json"),
            "--out", str(tmp_path), "--emit", "metrics",
        )
        assert code == 0
        text = (tmp_path / "summary.txt").read_text()
        track = {}
        for line in text.splitlines()[1:]:
            name = line.split(":")[0]
            track[name] = float(line.split("rms_track_err = ")[1].split()[0])
        assert track["hp"] < track["conventional"] < track["pd_only"]

    def test_duplicate_configs_tie_in_input_order(self, capsys, tmp_path, scenario_dir):
        doc = json.loads((scenario_dir / "compare_conv_vs_hp.json").read_text())
        doc["observers"] = [
            {"name": "first", "type": "conventional", "k": 0.5},
            {"name": "second", "type": "conventional", "k": 0.5},
        ]
        cfg = tmp_path / "dup.json"
        cfg.write_text(json.dumps(doc))
        code, _, _ = run_cli(capsys, "compare", "--config", str(cfg), "--out", str(tmp_path))
        assert code == 0
        lines = (tmp_path / "summary.txt").read_text().splitlines()
        assert lines[1].startswith("first:")
        assert lines[2].startswith("second:")

    def test_mismatched_ts_exits_2(self, capsys, tmp_path, scenario_dir):
        doc = json.loads((scenario_dir / "compare_conv_vs_hp.json").read_text())
        doc["observers"][1]["Ts"] = 0.002
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps(doc))
        code, _, err = run_cli(capsys, "compare", "--config", str(cfg), "--out", str(tmp_path))
        assert code == 2
        assert "mismatched Ts" in err

    def test_single_observer_exits_2(self, capsys, tmp_path, scenario_dir):
        doc = json.loads((scenario_dir / "compare_conv_vs_hp.json").read_text())
        doc["observers"] = doc["observers"][:1]
        cfg = tmp_path / "one.json"
        cfg.write_text(json.dumps(doc))
        code, _, _ = run_cli(capsys, "compare", "--config", str(cfg), "--out", str(tmp_path))
        assert code == 2
