"""Simulator and analysis toolkit for two-way communication on one photon.

A single photon split between two locations carries both parties' bits in
its phase; interference routes it to a port that reveals only their parity.
The package models that channel end to end: exact two-mode state algebra,
a Poissonian heralded source with g2(0) estimation, the parity-guessing
game and its visibility law, a loss-robust interval protocol with
repetition coding, one-time-pad image transfer with an explicit
eavesdropper view, and the arrival-time statistics that bound the exchange
time against a light round trip.
"""

from .game import (
    GameConfig,
    GameResult,
    classical_baseline,
    fit_success_line,
    outputs_from_parity,
    play_setting,
    run_game,
    visibility_sweep,
    write_sweep_csv,
)
from .interferometer import (
    ALICE,
    BOB,
    BitPair,
    ChannelParams,
    PhotonState,
    beamsplitter,
    correct_port,
    dephasing_sigma_for_visibility,
    detection_probabilities,
    encode_phases,
    prepare_superposition,
    sample_port,
    sample_port_dephased,
    visibility_from_counts,
)
from .protocol import (
    IntervalRecord,
    MessageRun,
    ProtocolParams,
    analytic_error_probability,
    decode_interval,
    interval_success_probability,
    majority_decode,
    message_summary,
    optimal_mean_detections,
    repetition_protocol_success,
    run_interval,
    run_message,
    series_error_probability,
    simulate_interval_successes,
)
from .security import (
    AnonymityReport,
    BitmapFormatError,
    EveView,
    Message,
    Transcript,
    direction_anonymity_check,
    eve_observe,
    otp_encode_decode,
    read_bitmap,
    simulate_transcript,
    transmit_image,
    write_bitmap,
)
from .source import (
    CoincidenceRates,
    SourceModel,
    g2_poisson_error,
    g2_zero,
    sample_interval_count,
    simulate_coincidence_run,
)
from .streams import spawn_seed, substream
from .timing import (
    SPEED_OF_LIGHT_M_PER_NS,
    GaussianFit,
    TimingDataset,
    TimingResult,
    analyze_dataset,
    causality_significance,
    delay_with_error,
    fiber_delay_correction,
    fit_gaussian,
    read_time_tags,
    synthesize_time_tags,
    write_time_tags,
)

__version__ = "0.1.0"

__all__ = [
    "ALICE",
    "BOB",
    "AnonymityReport",
    "BitPair",
    "BitmapFormatError",
    "ChannelParams",
    "CoincidenceRates",
    "EveView",
    "GameConfig",
    "GameResult",
    "GaussianFit",
    "IntervalRecord",
    "Message",
    "MessageRun",
    "PhotonState",
    "ProtocolParams",
    "SPEED_OF_LIGHT_M_PER_NS",
    "SourceModel",
    "TimingDataset",
    "TimingResult",
    "Transcript",
    "analytic_error_probability",
    "analyze_dataset",
    "beamsplitter",
    "causality_significance",
    "classical_baseline",
    "correct_port",
    "decode_interval",
    "delay_with_error",
    "dephasing_sigma_for_visibility",
    "detection_probabilities",
    "direction_anonymity_check",
    "encode_phases",
    "eve_observe",
    "fiber_delay_correction",
    "fit_gaussian",
    "fit_success_line",
    "g2_poisson_error",
    "g2_zero",
    "interval_success_probability",
    "majority_decode",
    "message_summary",
    "optimal_mean_detections",
    "otp_encode_decode",
    "outputs_from_parity",
    "play_setting",
    "prepare_superposition",
    "read_bitmap",
    "read_time_tags",
    "repetition_protocol_success",
    "run_game",
    "run_interval",
    "run_message",
    "sample_interval_count",
    "sample_port",
    "sample_port_dephased",
    "series_error_probability",
    "simulate_coincidence_run",
    "simulate_interval_successes",
    "simulate_transcript",
    "spawn_seed",
    "substream",
    "synthesize_time_tags",
    "transmit_image",
    "visibility_from_counts",
    "visibility_sweep",
    "write_bitmap",
    "write_sweep_csv",
    "write_time_tags",
]
