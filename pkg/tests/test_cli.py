"""Command-line entry points, exercised in process through main()."""

import hashlib
import json

import pytest

from photonduplex.cli import main
from photonduplex.security import Message, read_bitmap, write_bitmap
from photonduplex.streams import substream


def run(*argv):
    return main(list(argv))


def file_hash(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def make_test_image(path, width=6, height=4, seed=0):
    rng = substream(seed, "cli-test-image")
    bits = tuple(int(b) for b in rng.integers(0, 2, size=width * height))
    write_bitmap(path, Message(bits, (width, height)))
    return bits


class TestGameSweep:
    def test_writes_csv_and_figure(self, tmp_path, capsys):
        code = run(
            "game-sweep",
            "--vis", "0.0,0.5,1.0",
            "--photons", "2000",
            "--settings", "10",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        assert (tmp_path / "sweep.csv").exists()
        assert (tmp_path / "sweep.png").exists()
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert lines[0] == (
            "visibility,success_probability,std_error,"
            "n_settings,photons_per_setting,seed"
        )
        assert len(lines) == 4
        out = capsys.readouterr().out
        assert "slope" in out

    def test_no_figures_flag(self, tmp_path):
        code = run(
            "game-sweep",
            "--vis", "0.5",
            "--photons", "500",
            "--settings", "5",
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        assert (tmp_path / "sweep.csv").exists()
        assert not (tmp_path / "sweep.png").exists()

    def test_out_of_range_visibility_rejected(self, tmp_path, capsys):
        code = run(
            "game-sweep", "--vis", "1.2", "--out-dir", str(tmp_path)
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_deterministic_outputs(self, tmp_path):
        hashes = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = run(
                "game-sweep",
                "--vis", "0.2,0.8",
                "--photons", "1000",
                "--settings", "8",
                "--seed", "99",
                "--out-dir", str(out),
            )
            assert code == 0
            hashes.append(
                (file_hash(out / "sweep.csv"), file_hash(out / "sweep.png"))
            )
        assert hashes[0] == hashes[1]


class TestProtocol:
    def test_full_run_outputs(self, tmp_path):
        code = run(
            "protocol",
            "--m", "2.919",
            "--ps", "0.935",
            "--pairs", "50",
            "--sets", "4",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        payload = json.loads((tmp_path / "protocol.json").read_text())
        for key in (
            "m",
            "p_s",
            "repetitions",
            "analytic_interval_success",
            "analytic_majority_success",
            "measured_success_mean",
            "measured_success_std_error",
            "binomial_sigma_per_set",
            "m_opt",
            "seed",
        ):
            assert key in payload
        assert payload["analytic_interval_success"] == pytest.approx(0.7732, abs=1e-4)
        assert payload["m_opt"] == pytest.approx(2.9234, abs=1e-4)
        lines = (tmp_path / "protocol.csv").read_text().splitlines()
        assert lines[0] == "set_id,repetitions,m,p_s,success_rate"
        assert len(lines) == 5
        assert (tmp_path / "protocol.png").exists()

    def test_vis_alternative_to_ps(self, tmp_path):
        code = run(
            "protocol",
            "--m", "2.919",
            "--vis", "0.87",
            "--pairs", "20",
            "--sets", "2",
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        payload = json.loads((tmp_path / "protocol.json").read_text())
        assert payload["p_s"] == pytest.approx(0.935, abs=1e-12)

    def test_ps_and_vis_together_rejected(self, tmp_path, capsys):
        code = run(
            "protocol",
            "--m", "2.919",
            "--ps", "0.935",
            "--vis", "0.87",
            "--out-dir", str(tmp_path),
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_optimize_m_only(self, tmp_path):
        code = run(
            "protocol",
            "--ps", "0.935",
            "--optimize-m",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        payload = json.loads((tmp_path / "protocol.json").read_text())
        assert set(payload) == {"p_s", "m_opt"}
        assert payload["m_opt"] == pytest.approx(2.9233882450123003, abs=1e-9)

    def test_missing_m_rejected(self, tmp_path, capsys):
        code = run("protocol", "--ps", "0.935", "--out-dir", str(tmp_path))
        assert code == 2
        assert "--m is required" in capsys.readouterr().err

    def test_even_repetitions_rejected(self, tmp_path, capsys):
        code = run(
            "protocol",
            "--m", "2.919",
            "--ps", "0.935",
            "--reps", "2",
            "--out-dir", str(tmp_path),
        )
        assert code == 2
        assert "odd" in capsys.readouterr().err

    def test_deterministic_outputs(self, tmp_path):
        hashes = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = run(
                "protocol",
                "--m", "3.34",
                "--ps", "0.935",
                "--pairs", "30",
                "--sets", "3",
                "--seed", "7",
                "--out-dir", str(out),
            )
            assert code == 0
            hashes.append(
                tuple(
                    file_hash(out / name2)
                    for name2 in ("protocol.json", "protocol.csv", "protocol.png")
                )
            )
        assert hashes[0] == hashes[1]


class TestTransmit:
    def test_perfect_channel_round_trip(self, tmp_path):
        image_path = tmp_path / "input.pbm"
        bits = make_test_image(image_path)
        code = run(
            "transmit",
            "--image", str(image_path),
            "--m", "20",
            "--vis", "1.0",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        received = read_bitmap(tmp_path / "received.pbm")
        assert received.bits == bits
        eve = read_bitmap(tmp_path / "eve.pbm")
        assert eve.shape == received.shape
        payload = json.loads((tmp_path / "transmit.json").read_text())
        assert payload["success_rate"] == 1.0
        assert payload["pixel_match_rate"] == 1.0
        assert payload["pixels"] == len(bits)
        assert (tmp_path / "transmit.png").exists()

    def test_noisy_channel_reports_rates(self, tmp_path):
        image_path = tmp_path / "input.pbm"
        make_test_image(image_path, width=10, height=10)
        code = run(
            "transmit",
            "--image", str(image_path),
            "--m", "3.34",
            "--ps", "0.935",
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        payload = json.loads((tmp_path / "transmit.json").read_text())
        assert 0.5 < payload["success_rate"] < 1.0
        assert payload["pixel_match_rate"] >= payload["success_rate"]
        assert payload["analytic_interval_success"] == pytest.approx(
            0.7694, abs=1e-4
        )

    def test_missing_image_rejected(self, tmp_path, capsys):
        code = run("transmit", "--out-dir", str(tmp_path))
        assert code == 2
        assert "--image is required" in capsys.readouterr().err

    def test_malformed_image_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.pbm"
        bad.write_text("P1\n2 2\n0 0 7 0\n")
        code = run(
            "transmit", "--image", str(bad), "--out-dir", str(tmp_path)
        )
        assert code == 2
        assert "7" in capsys.readouterr().err

    def test_nonexistent_image_rejected(self, tmp_path, capsys):
        code = run(
            "transmit",
            "--image", str(tmp_path / "missing.pbm"),
            "--out-dir", str(tmp_path),
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestG2:
    def test_outputs(self, tmp_path):
        code = run(
            "g2",
            "--contamination", "0.02",
            "--herald-rate", "20000",
            "--duration", "5",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        payload = json.loads((tmp_path / "g2.json").read_text())
        for key in ("g2", "sigma", "analytic_g2", "rates_per_s", "counts"):
            assert key in payload
        assert payload["g2"] == pytest.approx(
            payload["analytic_g2"], abs=4 * payload["sigma"]
        )
        assert payload["counts"]["n_hab"] <= min(
            payload["counts"]["n_ha"], payload["counts"]["n_hb"]
        )
        assert (tmp_path / "g2.png").exists()

    def test_zero_contamination(self, tmp_path):
        code = run(
            "g2",
            "--contamination", "0",
            "--herald-rate", "10000",
            "--duration", "2",
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        payload = json.loads((tmp_path / "g2.json").read_text())
        assert payload["g2"] == 0.0
        assert payload["sigma"] > 0.0

    def test_excessive_run_rejected(self, tmp_path, capsys):
        code = run(
            "g2",
            "--herald-rate", "1e8",
            "--duration", "1e5",
            "--out-dir", str(tmp_path),
        )
        assert code == 2
        assert "exceeds" in capsys.readouterr().err


class TestTiming:
    def test_outputs_and_verdict(self, tmp_path):
        code = run(
            "timing",
            "--events", "20000",
            "--out-dir", str(tmp_path),
        )
        assert code == 0
        payload = json.loads((tmp_path / "timing.json").read_text())
        assert set(payload["pairs"]) == {"AA", "AB", "BA", "BB"}
        assert payload["all_significant"] is True
        assert payload["overall_verdict"] is True
        for label, pair in payload["pairs"].items():
            assert pair["verdict"] is True
            assert pair["significance"] > 3.0
            assert pair["delta_t_ns"] < pair["reference_ns"]
        lines = (tmp_path / "timing.csv").read_text().splitlines()
        assert lines[0] == (
            "label,delta_t_ns,sigma_ns,reference_ns,significance,verdict"
        )
        assert len(lines) == 5
        assert (tmp_path / "timing.png").exists()

    def test_write_tags(self, tmp_path):
        code = run(
            "timing",
            "--events", "500",
            "--write-tags",
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        for label in ("AA", "AB", "BA", "BB"):
            assert (tmp_path / f"timing_tags_{label}.csv").exists()

    def test_fiber_corrected_delay_matches_geometry(self, tmp_path):
        plain_dir = tmp_path / "plain"
        fiber_dir = tmp_path / "fiber"
        for out, extra in (
            (plain_dir, []),
            (fiber_dir, ["--fiber-a", "2.080", "--fiber-b", "2.088"]),
        ):
            code = run(
                "timing",
                "--events", "20000",
                "--out-dir", str(out),
                "--no-figures",
                *extra,
            )
            assert code == 0
        plain = json.loads((plain_dir / "timing.json").read_text())
        fibered = json.loads((fiber_dir / "timing.json").read_text())
        for label in ("AA", "AB", "BA", "BB"):
            assert fibered["pairs"][label]["delta_t_ns"] == pytest.approx(
                plain["pairs"][label]["delta_t_ns"], abs=0.02
            )
        assert fibered["overall_verdict"] is True

    def test_bad_arm_rejected(self, tmp_path, capsys):
        code = run(
            "timing", "--arm-a", "-1", "--out-dir", str(tmp_path)
        )
        assert code == 2
        assert "arm lengths" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_defaults(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text(
            "# sweep settings\n"
            "vis = 0.4\n"
            "photons = 800\n"
            "settings = 6\n"
            "seed = 11\n"
        )
        code = run(
            "game-sweep",
            "--config", str(config),
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert len(lines) == 2
        row = lines[1].split(",")
        assert float(row[0]) == 0.4
        assert row[3] == "6"
        assert row[4] == "800"
        assert row[5] == "11"

    def test_flag_overrides_config(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("vis = 0.4\nphotons = 800\nsettings = 6\n")
        code = run(
            "game-sweep",
            "--config", str(config),
            "--vis", "0.9",
            "--out-dir", str(tmp_path),
            "--no-figures",
        )
        assert code == 0
        row = (tmp_path / "sweep.csv").read_text().splitlines()[1].split(",")
        assert float(row[0]) == 0.9

    def test_missing_config_rejected(self, tmp_path, capsys):
        code = run(
            "game-sweep",
            "--config", str(tmp_path / "nope.cfg"),
            "--out-dir", str(tmp_path),
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestParser:
    def test_unknown_command_exits(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_command_required(self):
        with pytest.raises(SystemExit):
            main([])
