"""Two-way communication game on a shared single photon.

Each round ("setting") the referee hands Alice and Bob one random bit each;
both parties must output a guess of the other's bit after exchanging a
single photon. The photon's exit port reveals the bit parity, so each party
outputs parity XOR its own bit and both guesses are right whenever the
photon lands at the parity-correct port. Per-photon success is (1 + V)/2
at interference visibility V; any classical strategy with one carrier is
capped at 1/2, so every point above 1/2 certifies two-way signalling.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .interferometer import ALICE, BitPair, ChannelParams, correct_port, detection_probabilities
from .streams import spawn_seed, substream

SWEEP_CSV_COLUMNS = (
    "visibility",
    "success_probability",
    "std_error",
    "n_settings",
    "photons_per_setting",
    "seed",
)


@dataclass(frozen=True)
class GameConfig:
    """One game run: how many settings, photons per setting, channel, seed."""

    n_settings: int
    photons_per_setting: int
    channel: ChannelParams
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_settings < 1:
            raise ValueError(f"n_settings must be >= 1, got {self.n_settings}")
        if self.photons_per_setting < 1:
            raise ValueError(
                f"photons_per_setting must be >= 1, got {self.photons_per_setting}"
            )


@dataclass(frozen=True)
class GameResult:
    """Aggregated game outcome.

    success_probability is the mean of per_setting_success; std_error is the
    standard deviation over settings divided by sqrt(n_settings), i.e. the
    statistical variation over the input-bit sequence, not the photon-level
    binomial error.
    """

    success_probability: float
    std_error: float
    per_setting_success: tuple[float, ...]


def play_setting(
    bits: BitPair,
    photons: int,
    channel: ChannelParams,
    rng: np.random.Generator,
) -> float:
    """Fraction of `photons` that exit at the parity-correct port."""
    if photons < 1:
        raise ValueError(f"photons must be >= 1, got {photons}")
    p_alice, _ = detection_probabilities(bits, channel)
    n_alice = int(rng.binomial(photons, p_alice))
    n_correct = n_alice if correct_port(bits) == ALICE else photons - n_alice
    return n_correct / photons


def outputs_from_parity(parity: int, bits: BitPair) -> tuple[int, int]:
    """Game outputs (a, b) from an inferred parity: each party XORs its bit.

    With the true parity this yields a = y and b = x, the winning outputs.
    """
    if parity not in (0, 1):
        raise ValueError(f"parity must be 0 or 1, got {parity!r}")
    return parity ^ bits.x, parity ^ bits.y


def run_game(config: GameConfig) -> GameResult:
    """Play n_settings random bit pairs and aggregate the success statistics."""
    rng = substream(config.seed, "game")
    xs = rng.integers(0, 2, size=config.n_settings)
    ys = rng.integers(0, 2, size=config.n_settings)
    per_setting = tuple(
        play_setting(
            BitPair(int(x), int(y)), config.photons_per_setting, config.channel, rng
        )
        for x, y in zip(xs, ys)
    )
    mean = float(np.mean(per_setting))
    if config.n_settings > 1:
        std_error = float(np.std(per_setting, ddof=1) / math.sqrt(config.n_settings))
    else:
        std_error = 0.0
    return GameResult(mean, std_error, per_setting)


def visibility_sweep(
    v_values: list[float] | tuple[float, ...], config: GameConfig
) -> list[tuple[float, GameResult]]:
    """Run the game at each visibility with a fresh random input sequence.

    Each point derives its own seed from the config seed and the point index,
    so input sequences differ across points but the sweep is reproducible.
    """
    results = []
    for i, v in enumerate(v_values):
        point = replace(
            config,
            channel=replace(config.channel, visibility=float(v)),
            seed=spawn_seed(config.seed, f"sweep:{i}"),
        )
        results.append((float(v), run_game(point)))
    return results


def fit_success_line(
    sweep: list[tuple[float, GameResult]],
) -> tuple[float, float]:
    """Least-squares (slope, intercept) of success vs visibility.

    The ideal channel follows success = 0.5 * V + 0.5.
    """
    if len(sweep) < 2:
        raise ValueError("need at least 2 sweep points to fit a line")
    vs = np.array([v for v, _ in sweep])
    succ = np.array([r.success_probability for _, r in sweep])
    slope, intercept = np.polyfit(vs, succ, 1)
    return float(slope), float(intercept)


def classical_baseline(mixture_weight: float) -> float:
    """Best classical one-carrier success for a mixture of directions.

    mixture_weight is the probability the single carrier travels Alice to
    Bob; 1 - mixture_weight covers the reverse direction. For each direction
    all deterministic strategies are enumerated: the receiver learns the
    sender's bit and answers with any function of both bits (16 response
    tables); the sender learns nothing and answers with any function of its
    own bit (4 tables). Both directions top out at 1/2 (the receiver can
    always be right, the sender can only guess), so every mixture gives 1/2.
    """
    if not 0.0 <= mixture_weight <= 1.0:
        raise ValueError(f"mixture_weight must be in [0, 1], got {mixture_weight!r}")
    return (
        mixture_weight * _best_one_way_success()
        + (1.0 - mixture_weight) * _best_one_way_success()
    )


def _best_one_way_success() -> float:
    """Brute-force optimum when the carrier goes sender -> receiver.

    By relabeling, one direction suffices: sender holds bit s, receiver
    holds bit r and learns s. Sender outputs f(s), receiver outputs g(s, r);
    the round is won when f(s) = r and g(s, r) = s.
    """
    best = 0.0
    for f in _bit_functions(1):
        for g in _bit_functions(2):
            wins = sum(
                1
                for s in (0, 1)
                for r in (0, 1)
                if f[(s,)] == r and g[(s, r)] == s
            )
            best = max(best, wins / 4.0)
    return best


def _bit_functions(n_inputs: int) -> list[dict[tuple[int, ...], int]]:
    """All deterministic boolean functions of n_inputs bits, as lookup tables."""
    domain = [
        tuple((i >> k) & 1 for k in range(n_inputs)) for i in range(2**n_inputs)
    ]
    tables = []
    for code in range(2 ** len(domain)):
        tables.append({pt: (code >> j) & 1 for j, pt in enumerate(domain)})
    return tables


def write_sweep_csv(
    path: str | Path, sweep: list[tuple[float, GameResult]], config: GameConfig
) -> None:
    """Emit one CSV row per sweep point; seed column is the run's base seed."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_COLUMNS)
        for v, result in sweep:
            writer.writerow(
                [
                    repr(v),
                    repr(result.success_probability),
                    repr(result.std_error),
                    config.n_settings,
                    config.photons_per_setting,
                    config.seed,
                ]
            )


def read_sweep_csv(path: str | Path) -> list[dict[str, float]]:
    """Parse a sweep CSV back into per-row dictionaries of floats."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({k: float(v) for k, v in row.items()})
    return rows
