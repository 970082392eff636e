"""Loss-robust interval protocol with repetition-code error correction.

One bit pair is transmitted per fixed communication interval. The source
delivers a Poisson number of photons (mean m); each photon exits at the
parity-correct port with probability p_s = (1 + V)/2. Receiving at least
one photon tells a party the photon chose its port, so Alice infers parity
0 from one or more detections and parity 1 from silence, while Bob applies
the complementary rule (parity 1 from detections, 0 from silence). Each
party then decodes the other's bit as inferred parity XOR its own bit.

An interval decodes correctly at both ends exactly when at least one photon
arrived and none exited at the wrong port, giving the closed-form error
probability

    p_err(m, p_s) = 1 + exp(-m) - exp(-m (1 - p_s)),

minimized at m_opt = -ln(1 - p_s) / p_s. Repeating each pair an odd number
of times and taking majority votes suppresses the residual errors.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .interferometer import ALICE, BOB, BitPair, ChannelParams, sample_ports
from .source import SourceModel, sample_interval_count

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class ProtocolParams:
    """Operating point of the interval protocol.

    mean_detections: Poisson mean m of detected photons per interval.
    per_photon_success: p_s, probability a photon exits the correct port;
        tied to the channel visibility by p_s = (1 + V)/2.
    repetitions: odd number of intervals per bit pair for majority voting.
    """

    mean_detections: float
    per_photon_success: float
    repetitions: int = 1

    def __post_init__(self) -> None:
        if not self.mean_detections > 0.0:
            raise ValueError(
                f"mean_detections must be > 0, got {self.mean_detections!r}"
            )
        if not 0.5 <= self.per_photon_success <= 1.0:
            raise ValueError(
                f"per_photon_success must be in [0.5, 1], got {self.per_photon_success!r}"
            )
        if self.repetitions < 1 or self.repetitions % 2 == 0:
            raise ValueError(
                f"repetitions must be a positive odd count, got {self.repetitions!r}"
            )

    @property
    def visibility(self) -> float:
        """Channel visibility consistent with p_s = (1 + V)/2."""
        return 2.0 * self.per_photon_success - 1.0

    @classmethod
    def from_visibility(
        cls, mean_detections: float, visibility: float, repetitions: int = 1
    ) -> "ProtocolParams":
        if not 0.0 <= visibility <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {visibility!r}")
        return cls(mean_detections, 0.5 * (1.0 + visibility), repetitions)


@dataclass(frozen=True)
class IntervalRecord:
    """Everything one communication interval produced.

    success is true exactly when both decoded bits match the counterpart's
    sent bits, which happens iff at least one photon arrived and every
    photon exited at the parity-correct port.
    """

    bits: BitPair
    photon_ports: tuple[str, ...]
    inferred_parity_alice: int
    inferred_parity_bob: int
    decoded_bit_at_alice: int
    decoded_bit_at_bob: int
    success: bool


def analytic_error_probability(m: float, p_s: float) -> float:
    """Closed-form interval error probability 1 + e^(-m) - e^(-m (1-p_s)).

    Covers both failure modes: no photon detected, or at least one photon
    at the wrong port. Evaluated as exp(-m) - expm1(-m (1-p_s)) to stay
    accurate as p_s approaches 1.
    """
    if not m > 0.0:
        raise ValueError(f"m must be > 0, got {m!r}")
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must be in [0, 1], got {p_s!r}")
    return math.exp(-m) - math.expm1(-m * (1.0 - p_s))


def series_error_probability(
    m: float, p_s: float, *, tol: float = 1e-15, max_terms: int = 200
) -> float:
    """Same quantity as a truncated series e^(-m) (1 + sum m^n (1-p_s^n)/n!).

    Kept as an independent cross-check of the closed form; terms are added
    until they drop below tol (after passing the Poisson peak at n = m) or
    max_terms is reached.
    """
    if not m > 0.0:
        raise ValueError(f"m must be > 0, got {m!r}")
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must be in [0, 1], got {p_s!r}")
    total = 1.0
    poisson_term = 1.0
    ps_power = 1.0
    for n in range(1, max_terms + 1):
        poisson_term *= m / n
        ps_power *= p_s
        term = poisson_term * (1.0 - ps_power)
        total += term
        if n > m and poisson_term < tol:
            break
    return math.exp(-m) * total


def interval_success_probability(m: float, p_s: float) -> float:
    """Probability one interval decodes correctly at both ends."""
    return 1.0 - analytic_error_probability(m, p_s)


def optimal_mean_detections(p_s: float) -> float:
    """Mean photon number m_opt = -ln(1 - p_s)/p_s minimizing p_err.

    Defined for p_s strictly between 1/2 and 1: at p_s = 1 the optimum
    diverges (more photons always help), and at p_s <= 1/2 the photon port
    carries no usable parity signal.
    """
    if not 0.5 < p_s < 1.0:
        if p_s == 1.0:
            raise ValueError("m_opt diverges at p_s = 1: p_err is e^(-m), decreasing in m")
        raise ValueError(f"p_s must be in (0.5, 1), got {p_s!r}")
    return -math.log1p(-p_s) / p_s


def decode_interval(bits: BitPair, photon_ports: Sequence[str]) -> IntervalRecord:
    """Apply both parties' inference rules to one interval's port record."""
    n_alice = 0
    n_bob = 0
    for port in photon_ports:
        if port == ALICE:
            n_alice += 1
        elif port == BOB:
            n_bob += 1
        else:
            raise ValueError(f"unknown port {port!r}")
    inferred_alice = 0 if n_alice >= 1 else 1
    inferred_bob = 1 if n_bob >= 1 else 0
    decoded_at_alice = inferred_alice ^ bits.x
    decoded_at_bob = inferred_bob ^ bits.y
    return IntervalRecord(
        bits=bits,
        photon_ports=tuple(photon_ports),
        inferred_parity_alice=inferred_alice,
        inferred_parity_bob=inferred_bob,
        decoded_bit_at_alice=decoded_at_alice,
        decoded_bit_at_bob=decoded_at_bob,
        success=(decoded_at_alice == bits.y and decoded_at_bob == bits.x),
    )


def _check_consistency(
    params: ProtocolParams, channel: ChannelParams, source: SourceModel
) -> None:
    if abs(params.per_photon_success - channel.correct_port_probability) > CONSISTENCY_TOL:
        raise ValueError(
            "params.per_photon_success "
            f"({params.per_photon_success!r}) does not match the channel's "
            f"correct-port probability ({channel.correct_port_probability!r})"
        )
    if abs(params.mean_detections - source.mean_detections) > CONSISTENCY_TOL:
        raise ValueError(
            f"params.mean_detections ({params.mean_detections!r}) does not match "
            f"source.mean_detections ({source.mean_detections!r})"
        )


def run_interval(
    bits: BitPair,
    params: ProtocolParams,
    channel: ChannelParams,
    source: SourceModel,
    rng: np.random.Generator,
) -> IntervalRecord:
    """Simulate one communication interval photon by photon."""
    _check_consistency(params, channel, source)
    n = sample_interval_count(source, rng)
    at_alice = sample_ports(bits, n, channel, rng)
    ports = tuple(ALICE if hit else BOB for hit in at_alice)
    return decode_interval(bits, ports)


def simulate_interval_successes(
    params: ProtocolParams, n_intervals: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized interval outcomes: boolean success per interval.

    Distributionally identical to run_interval (Poisson photon count, each
    photon at the correct port with probability p_s, success iff n >= 1 and
    all photons correct), without materializing port records.
    """
    if n_intervals < 1:
        raise ValueError(f"n_intervals must be >= 1, got {n_intervals}")
    n = rng.poisson(params.mean_detections, size=n_intervals)
    correct = rng.binomial(n, params.per_photon_success)
    return (n >= 1) & (correct == n)


def majority_decode(outcomes: Sequence[int], repetitions: int) -> int:
    """Majority bit of an odd-length outcome list."""
    if repetitions < 1 or repetitions % 2 == 0:
        raise ValueError(f"repetitions must be a positive odd count, got {repetitions!r}")
    if len(outcomes) != repetitions:
        raise ValueError(
            f"expected {repetitions} outcomes, got {len(outcomes)}"
        )
    ones = 0
    for bit in outcomes:
        if bit not in (0, 1):
            raise ValueError(f"outcomes must be bits, got {bit!r}")
        ones += bit
    return 1 if ones > repetitions // 2 else 0


def repetition_protocol_success(params: ProtocolParams) -> float:
    """Analytic success of majority voting over `repetitions` intervals.

    Sum over k > r/2 of C(r, k) p^k (1-p)^(r-k) with p the single-interval
    success probability.
    """
    p = interval_success_probability(params.mean_detections, params.per_photon_success)
    r = params.repetitions
    return float(stats.binom.sf(r // 2, r, p))


@dataclass(frozen=True)
class MessageRun:
    """Outcome of transmitting a list of bit pairs with repetition coding.

    decoded_at_alice / decoded_at_bob hold each party's majority-voted
    estimate of the counterpart's bit, one entry per pair. pair_success
    counts a pair only when a majority of its intervals were error-free at
    both ends; that accounting matches the analytic majority-vote law
    (an interval erring at one end only still counts against the pair).
    """

    pairs: tuple[BitPair, ...]
    decoded_at_alice: tuple[int, ...]
    decoded_at_bob: tuple[int, ...]
    pair_success: tuple[bool, ...]
    success_rate: float


def run_message(
    bit_pairs: Sequence[BitPair],
    params: ProtocolParams,
    channel: ChannelParams,
    source: SourceModel,
    rng: np.random.Generator,
) -> MessageRun:
    """Send every pair through `repetitions` intervals and majority-decode."""
    if not bit_pairs:
        raise ValueError("bit_pairs must be non-empty")
    _check_consistency(params, channel, source)
    r = params.repetitions
    decoded_a = []
    decoded_b = []
    successes = []
    for bits in bit_pairs:
        records = [run_interval(bits, params, channel, source, rng) for _ in range(r)]
        decoded_a.append(majority_decode([rec.decoded_bit_at_alice for rec in records], r))
        decoded_b.append(majority_decode([rec.decoded_bit_at_bob for rec in records], r))
        successes.append(sum(rec.success for rec in records) > r // 2)
    return MessageRun(
        pairs=tuple(bit_pairs),
        decoded_at_alice=tuple(decoded_a),
        decoded_at_bob=tuple(decoded_b),
        pair_success=tuple(successes),
        success_rate=sum(successes) / len(successes),
    )


MESSAGE_CSV_COLUMNS = ("set_id", "repetitions", "m", "p_s", "success_rate")


def write_message_csv(
    path: str | Path,
    params: ProtocolParams,
    success_rates: Sequence[float],
) -> None:
    """One CSV row per message set at a fixed operating point."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MESSAGE_CSV_COLUMNS)
        for set_id, rate in enumerate(success_rates):
            writer.writerow(
                [
                    set_id,
                    params.repetitions,
                    repr(params.mean_detections),
                    repr(params.per_photon_success),
                    repr(float(rate)),
                ]
            )


def message_summary(
    params: ProtocolParams,
    success_rates: Sequence[float],
    pairs_per_set: int,
) -> dict:
    """JSON-ready comparison of measured success against the analytic laws."""
    if not success_rates:
        raise ValueError("success_rates must be non-empty")
    if pairs_per_set < 1:
        raise ValueError(f"pairs_per_set must be >= 1, got {pairs_per_set}")
    rates = np.asarray(success_rates, dtype=float)
    analytic = repetition_protocol_success(params)
    mean = float(rates.mean())
    if rates.size > 1:
        std_error = float(rates.std(ddof=1) / math.sqrt(rates.size))
    else:
        std_error = 0.0
    return {
        "m": params.mean_detections,
        "p_s": params.per_photon_success,
        "repetitions": params.repetitions,
        "analytic_interval_success": interval_success_probability(
            params.mean_detections, params.per_photon_success
        ),
        "analytic_majority_success": analytic,
        "n_sets": int(rates.size),
        "pairs_per_set": pairs_per_set,
        "set_success_rates": [float(r) for r in rates],
        "measured_success_mean": mean,
        "measured_success_std_error": std_error,
        "binomial_sigma_per_set": math.sqrt(
            max(analytic * (1.0 - analytic), 0.0) / pairs_per_set
        ),
    }
