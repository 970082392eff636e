"""Two-mode single-photon interferometry.

One photon is shared between two locations (Alice's mode and Bob's mode).
Each party flips the sign of its mode amplitude to encode a bit, the two
modes interfere on a balanced beam splitter, and the output port reveals
the parity of the two bits. Finite interference visibility degrades the
port statistics linearly; an explicit Gaussian-dephasing sampler is
provided as an independent cross-check of that contrast model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-9

ALICE = "alice"
BOB = "bob"

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class PhotonState:
    """Single photon in two spatial modes, unit norm.

    amp_a and amp_b are the complex amplitudes of finding the photon at
    Alice's and Bob's location, respectively.
    """

    amp_a: complex
    amp_b: complex

    def __post_init__(self) -> None:
        norm = abs(self.amp_a) ** 2 + abs(self.amp_b) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |a|^2 + |b|^2 = {norm!r}")

    @classmethod
    def normalized(cls, amp_a: complex, amp_b: complex) -> "PhotonState":
        """Build a state from arbitrary amplitudes, rescaled to unit norm."""
        norm = math.sqrt(abs(amp_a) ** 2 + abs(amp_b) ** 2)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amp_a / norm, amp_b / norm)

    @property
    def prob_alice(self) -> float:
        return abs(self.amp_a) ** 2

    @property
    def prob_bob(self) -> float:
        return abs(self.amp_b) ** 2


@dataclass(frozen=True)
class BitPair:
    """Input bits of the two parties: x is Alice's, y is Bob's."""

    x: int
    y: int

    def __post_init__(self) -> None:
        if self.x not in (0, 1) or self.y not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got x={self.x!r}, y={self.y!r}")

    @property
    def parity(self) -> int:
        return self.x ^ self.y


@dataclass(frozen=True)
class ChannelParams:
    """Interference quality of the link.

    visibility: interference contrast V in [0, 1]. V = 1 routes every photon
        deterministically; V = 0 erases the interference entirely.
    phase_noise_sigma: optional Gaussian spread (radians) of a random phase
        between the two arms, used only by the explicit dephasing sampler.
    """

    visibility: float
    phase_noise_sigma: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {self.visibility!r}")
        if not self.phase_noise_sigma >= 0.0:
            raise ValueError(
                f"phase_noise_sigma must be >= 0, got {self.phase_noise_sigma!r}"
            )

    @property
    def effective_visibility(self) -> float:
        """Contrast after averaging over the Gaussian phase noise."""
        return self.visibility * math.exp(-0.5 * self.phase_noise_sigma**2)

    @property
    def correct_port_probability(self) -> float:
        """Per-photon probability of exiting at the parity-correct port."""
        return 0.5 * (1.0 + self.effective_visibility)


def prepare_superposition() -> PhotonState:
    """Photon split evenly between the two locations, both amplitudes real."""
    return PhotonState(_INV_SQRT2, _INV_SQRT2)


def encode_phases(state: PhotonState, bits: BitPair) -> PhotonState:
    """Each party multiplies its mode amplitude by (-1)^bit."""
    sign_a = -1.0 if bits.x else 1.0
    sign_b = -1.0 if bits.y else 1.0
    return PhotonState(sign_a * state.amp_a, sign_b * state.amp_b)


def beamsplitter(state: PhotonState) -> PhotonState:
    """Balanced beam splitter: (a, b) -> ((a+b)/sqrt2, (a-b)/sqrt2).

    The transform is its own inverse, so applying it twice is the identity.
    """
    return PhotonState(
        _INV_SQRT2 * (state.amp_a + state.amp_b),
        _INV_SQRT2 * (state.amp_a - state.amp_b),
    )


def detection_probabilities(bits: BitPair, channel: ChannelParams) -> tuple[float, float]:
    """Output-port probabilities (p_alice, p_bob) at finite visibility.

    p_alice = (1 + (-1)^(x XOR y) * V) / 2. Only the parity of the bits
    enters; at V = 1 this reproduces the deterministic routing of the ideal
    interferometer, and the photon reaches the parity-correct port with
    probability (1 + V) / 2 for every input pair.
    """
    sign = -1.0 if bits.parity else 1.0
    p_alice = 0.5 * (1.0 + sign * channel.effective_visibility)
    return p_alice, 1.0 - p_alice


def correct_port(bits: BitPair) -> str:
    """Port an ideal interferometer sends the photon to: parity 0 -> Alice."""
    return BOB if bits.parity else ALICE


def sample_port(bits: BitPair, channel: ChannelParams, rng: np.random.Generator) -> str:
    """Draw one detection port according to detection_probabilities."""
    p_alice, _ = detection_probabilities(bits, channel)
    return ALICE if rng.random() < p_alice else BOB


def sample_ports(
    bits: BitPair, n: int, channel: ChannelParams, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized sample_port: boolean array, True where the photon hit Alice."""
    if n < 0:
        raise ValueError(f"photon count must be >= 0, got {n}")
    p_alice, _ = detection_probabilities(bits, channel)
    return rng.random(n) < p_alice


def port_probability_with_phase(bits: BitPair, phase: float, contrast: float = 1.0) -> float:
    """Alice-port probability when the relative phase pi*parity is offset by `phase`.

    With a residual contrast c this is (1 + (-1)^parity * c * cos(phase)) / 2,
    i.e. cos^2(phase/2)-type fringes shifted by the encoded parity.
    """
    sign = -1.0 if bits.parity else 1.0
    return 0.5 * (1.0 + sign * contrast * math.cos(phase))


def sample_port_dephased(
    bits: BitPair, channel: ChannelParams, rng: np.random.Generator
) -> str:
    """Sample a port by drawing an explicit arm-phase error per photon.

    The phase is Gaussian with spread channel.phase_noise_sigma; averaged over
    it, the port statistics match detection_probabilities at the channel's
    effective visibility. Serves as an independent route to the same physics.
    """
    phase = rng.normal(0.0, channel.phase_noise_sigma) if channel.phase_noise_sigma else 0.0
    p_alice = port_probability_with_phase(bits, phase, channel.visibility)
    return ALICE if rng.random() < p_alice else BOB


def dephasing_sigma_for_visibility(visibility: float) -> float:
    """Gaussian phase spread whose average contrast equals `visibility`.

    Solves E[cos(phi)] = exp(-sigma^2/2) = V, so sigma = sqrt(-2 ln V).
    """
    if not 0.0 < visibility <= 1.0:
        raise ValueError(f"visibility must be in (0, 1] to calibrate, got {visibility!r}")
    return math.sqrt(-2.0 * math.log(visibility))


def visibility_from_counts(n_max: int, n_min: int) -> float:
    """Interference contrast (N_max - N_min) / (N_max + N_min) from counts."""
    if n_max < 0 or n_min < 0:
        raise ValueError("counts must be non-negative")
    if n_min > n_max:
        raise ValueError(f"n_max must be >= n_min, got {n_max} < {n_min}")
    if n_max == 0:
        raise ValueError("both counts are zero, visibility is undefined")
    return (n_max - n_min) / (n_max + n_min)
