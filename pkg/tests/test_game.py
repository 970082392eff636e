"""Success-probability game: per-setting play, sweeps, classical bound."""

import math

import numpy as np
import pytest

from photonduplex.game import (
    SWEEP_CSV_COLUMNS,
    GameConfig,
    GameResult,
    classical_baseline,
    fit_success_line,
    outputs_from_parity,
    play_setting,
    read_sweep_csv,
    run_game,
    visibility_sweep,
    write_sweep_csv,
)
from photonduplex.interferometer import BitPair, ChannelParams
from photonduplex.streams import substream


def make_config(visibility, n_settings=50, photons=2000, seed=7):
    return GameConfig(
        n_settings=n_settings,
        photons_per_setting=photons,
        channel=ChannelParams(visibility=visibility),
        seed=seed,
    )


class TestPlaySetting:
    def test_perfect_visibility_always_succeeds(self):
        channel = ChannelParams(visibility=1.0)
        rng = substream(0, "perfect")
        for x in (0, 1):
            for y in (0, 1):
                frac = play_setting(BitPair(x, y), 500, channel, rng)
                assert frac == 1.0

    def test_zero_visibility_is_a_coin_flip(self):
        channel = ChannelParams(visibility=0.0)
        rng = substream(1, "coin")
        n = 10**6
        frac = play_setting(BitPair(0, 1), n, channel, rng)
        assert frac == pytest.approx(0.5, abs=4 * 0.5 / math.sqrt(n))

    def test_matches_binomial_oracle(self):
        channel = ChannelParams(visibility=0.8)
        p = channel.correct_port_probability
        n = 10**5
        frac = play_setting(BitPair(1, 1), n, channel, substream(2, "binom"))
        assert frac == pytest.approx(p, abs=4 * math.sqrt(p * (1 - p) / n))

    def test_photon_count_validation(self):
        channel = ChannelParams(visibility=1.0)
        with pytest.raises(ValueError):
            play_setting(BitPair(0, 0), 0, channel, substream(0, "n"))


class TestOutputsFromParity:
    def test_correct_parity_reproduces_bits(self):
        for x in (0, 1):
            for y in (0, 1):
                pair = BitPair(x, y)
                out_a, out_b = outputs_from_parity(pair.parity, pair)
                # Alice's output equals Bob's bit and vice versa.
                assert out_a == y
                assert out_b == x

    def test_wrong_parity_flips_both(self):
        pair = BitPair(1, 0)
        out_a, out_b = outputs_from_parity(pair.parity ^ 1, pair)
        assert out_a == pair.y ^ 1
        assert out_b == pair.x ^ 1

    def test_parity_validation(self):
        with pytest.raises(ValueError):
            outputs_from_parity(2, BitPair(0, 0))


class TestRunGame:
    def test_result_invariants(self):
        result = run_game(make_config(0.9))
        assert isinstance(result, GameResult)
        assert 0.0 <= result.success_probability <= 1.0
        assert result.std_error >= 0.0
        assert len(result.per_setting_success) == 50
        assert result.success_probability == pytest.approx(
            np.mean(result.per_setting_success), abs=1e-12
        )

    def test_deterministic_for_fixed_seed(self):
        a = run_game(make_config(0.7, seed=123))
        b = run_game(make_config(0.7, seed=123))
        assert a == b

    def test_seed_changes_output(self):
        a = run_game(make_config(0.7, seed=123))
        b = run_game(make_config(0.7, seed=124))
        assert a.per_setting_success != b.per_setting_success

    def test_single_setting_has_zero_std_error(self):
        result = run_game(make_config(0.9, n_settings=1))
        assert result.std_error == 0.0

    def test_config_validation(self):
        channel = ChannelParams(visibility=0.5)
        with pytest.raises(ValueError):
            GameConfig(n_settings=0, photons_per_setting=10, channel=channel)
        with pytest.raises(ValueError):
            GameConfig(n_settings=10, photons_per_setting=0, channel=channel)


class TestVisibilitySweep:
    def test_linear_law_across_visibilities(self):
        # Success probability follows (1 + V) / 2; with 100 settings of
        # 1e5 photons each the standard error is a few 1e-4.
        config = make_config(0.0, n_settings=100, photons=10**5, seed=42)
        grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        sweep = visibility_sweep(grid, config)
        assert [v for v, _ in sweep] == grid
        for v, result in sweep:
            expected = 0.5 * (1.0 + v)
            if v == 1.0:
                assert result.success_probability == 1.0
            else:
                margin = 3 * result.std_error
                assert abs(result.success_probability - expected) <= margin

    def test_fit_recovers_slope_and_intercept(self):
        config = make_config(0.0, n_settings=100, photons=10**5, seed=42)
        grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
        sweep = visibility_sweep(grid, config)
        slope, intercept = fit_success_line(sweep)
        assert slope == pytest.approx(0.5, abs=0.01)
        assert intercept == pytest.approx(0.5, abs=0.01)

    def test_any_positive_visibility_beats_classical(self):
        config = make_config(0.0, n_settings=100, photons=10**4, seed=5)
        bound = classical_baseline(0.5)
        for v, result in visibility_sweep([0.1, 0.3, 0.5], config):
            assert result.success_probability - 3 * result.std_error > bound

    def test_points_use_fresh_random_sequences(self):
        config = make_config(0.0, n_settings=20, photons=500, seed=9)
        sweep = visibility_sweep([0.5, 0.5], config)
        assert (
            sweep[0][1].per_setting_success != sweep[1][1].per_setting_success
        )

    def test_fit_needs_two_points(self):
        config = make_config(0.0, n_settings=5, photons=100)
        sweep = visibility_sweep([0.5], config)
        with pytest.raises(ValueError):
            fit_success_line(sweep)


class TestClassicalBaseline:
    def test_no_communication_bound_is_half(self):
        assert classical_baseline(0.5) == 0.5

    def test_mixtures_cannot_beat_half(self):
        for w in np.linspace(0.0, 1.0, 11):
            assert classical_baseline(float(w)) <= 0.5 + 1e-12

    def test_mixture_weight_validation(self):
        with pytest.raises(ValueError):
            classical_baseline(1.5)
        with pytest.raises(ValueError):
            classical_baseline(-0.1)


class TestSweepCsv:
    def test_round_trip(self, tmp_path):
        config = make_config(0.0, n_settings=10, photons=200, seed=3)
        grid = [0.0, 0.5, 1.0]
        sweep = visibility_sweep(grid, config)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(path, sweep, config)
        rows = read_sweep_csv(path)
        assert [row["visibility"] for row in rows] == grid
        for row, (_, result) in zip(rows, sweep):
            assert row["success_probability"] == result.success_probability
            assert row["std_error"] == result.std_error
            assert row["n_settings"] == 10
            assert row["photons_per_setting"] == 200
            assert row["seed"] == 3

    def test_header_matches_contract(self, tmp_path):
        config = make_config(0.0, n_settings=5, photons=100)
        sweep = visibility_sweep([0.5], config)
        path = tmp_path / "sweep.csv"
        write_sweep_csv(path, sweep, config)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(SWEEP_CSV_COLUMNS)
        assert SWEEP_CSV_COLUMNS == (
            "visibility",
            "success_probability",
            "std_error",
            "n_settings",
            "photons_per_setting",
            "seed",
        )
