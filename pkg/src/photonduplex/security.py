"""Eavesdropper semantics, one-time-pad messaging, and bitmap transport.

The photon's final port depends on the encoded bits only through their
parity x XOR y, so a noiseless observer of the whole channel learns exactly
the parity stream and nothing else. When one party encodes message bits and
the other encodes a fresh uniform pad, that parity stream is the one-time-
pad ciphertext: useless to the observer, decodable by the pad holder.
Because parity is symmetric in the two bits, the observer also cannot tell
which direction the message travelled.

Images travel as plain-text bitmaps: header "P1", a "width height" line,
then width*height whitespace-separated 0/1 tokens, row-major, 1 = black.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .interferometer import ALICE, BitPair, ChannelParams
from .protocol import ProtocolParams, run_interval, run_message
from .source import SourceModel


@dataclass(frozen=True)
class Message:
    """Bit payload, optionally carrying a bitmap shape (width, height)."""

    bits: tuple[int, ...]
    shape: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        for bit in self.bits:
            if bit not in (0, 1):
                raise ValueError(f"message bits must be 0 or 1, got {bit!r}")
        if self.shape is not None:
            width, height = self.shape
            if width < 1 or height < 1:
                raise ValueError(f"shape must be positive, got {self.shape!r}")
            if width * height != len(self.bits):
                raise ValueError(
                    f"shape {width}x{height} does not match {len(self.bits)} bits"
                )

    @classmethod
    def from_bits(
        cls, bits: Sequence[int], shape: tuple[int, int] | None = None
    ) -> "Message":
        return cls(tuple(int(b) for b in bits), shape)


@dataclass(frozen=True)
class EveView:
    """What a noiseless channel observer extracts: one parity per pair."""

    parities: tuple[int, ...]

    def __post_init__(self) -> None:
        for p in self.parities:
            if p not in (0, 1):
                raise ValueError(f"parities must be 0 or 1, got {p!r}")


def eve_observe(pairs: Sequence[BitPair]) -> EveView:
    """Parity stream leaked by the channel; symmetric under swapping x and y."""
    return EveView(tuple(p.parity for p in pairs))


def otp_encode_decode(message: Message, pad: Message) -> Message:
    """XOR the message with the pad; applying the same pad twice restores it.

    The result keeps the message's bitmap shape. Encoding and decoding are
    the same operation: parity = message XOR pad on the wire, and the pad
    holder recovers message = parity XOR pad.
    """
    if len(message.bits) != len(pad.bits):
        raise ValueError(
            f"length mismatch: message has {len(message.bits)} bits, "
            f"pad has {len(pad.bits)}"
        )
    return Message(
        tuple(m ^ p for m, p in zip(message.bits, pad.bits)), message.shape
    )


def transmit_image(
    image: Message,
    params: ProtocolParams,
    channel: ChannelParams,
    source: SourceModel,
    rng: np.random.Generator,
) -> tuple[Message, EveView, float]:
    """Send a bitmap from Alice to Bob under a fresh uniform one-time pad.

    Per pixel, Alice encodes the image bit and Bob encodes a pad bit drawn
    from rng; Bob reconstructs each pixel as his majority-voted parity XOR
    his pad bit. Returns Bob's decoded bitmap, the observer's true-parity
    stream (shaped like the image), and the pair success rate of the
    underlying protocol run (a pixel counts as a success only when a
    majority of its intervals decoded correctly at both ends).
    """
    if image.shape is None:
        raise ValueError("image must carry a bitmap shape")
    pad_bits = [int(b) for b in rng.integers(0, 2, size=len(image.bits))]
    pairs = [BitPair(x, y) for x, y in zip(image.bits, pad_bits)]
    run = run_message(pairs, params, channel, source, rng)
    received = Message(run.decoded_at_bob, image.shape)
    return received, eve_observe(pairs), run.success_rate


@dataclass(frozen=True)
class Transcript:
    """Channel-side record of one message run, as an observer would keep it."""

    parities: tuple[int, ...]
    alice_port_count: int
    bob_port_count: int


def simulate_transcript(
    message: Message,
    pad: Message,
    params: ProtocolParams,
    channel: ChannelParams,
    source: SourceModel,
    rng: np.random.Generator,
    swap_roles: bool = False,
) -> Transcript:
    """Run a message and record what the channel observer sees.

    With swap_roles the pad holder encodes on Alice's side and the message
    holder on Bob's; the parity stream is unchanged by construction.
    """
    if len(message.bits) != len(pad.bits):
        raise ValueError("message and pad must have equal length")
    if swap_roles:
        pairs = [BitPair(y, x) for x, y in zip(message.bits, pad.bits)]
    else:
        pairs = [BitPair(x, y) for x, y in zip(message.bits, pad.bits)]
    n_alice = 0
    n_total = 0
    for bits in pairs:
        for _ in range(params.repetitions):
            record = run_interval(bits, params, channel, source, rng)
            n_alice += sum(1 for port in record.photon_ports if port == ALICE)
            n_total += len(record.photon_ports)
    return Transcript(
        parities=eve_observe(pairs).parities,
        alice_port_count=n_alice,
        bob_port_count=n_total - n_alice,
    )


@dataclass(frozen=True)
class AnonymityReport:
    """Direction-anonymity comparison of two transcripts.

    parity_streams_equal asserts the observer's deterministic view is
    identical; the chi-square entry compares photon-port count tables for a
    residual statistical direction signal (p_value near uniform when none).
    """

    parity_streams_equal: bool
    port_table: tuple[tuple[int, int], tuple[int, int]]
    chi_square: float
    p_value: float


def direction_anonymity_check(
    transcript_a: Transcript, transcript_b: Transcript
) -> AnonymityReport:
    """Compare two transcripts that should be indistinguishable to Eve."""
    table = (
        (transcript_a.alice_port_count, transcript_a.bob_port_count),
        (transcript_b.alice_port_count, transcript_b.bob_port_count),
    )
    observed = np.array(table, dtype=float)
    if observed.sum() == 0 or (observed.sum(axis=0) == 0).any() or (
        observed.sum(axis=1) == 0
    ).any():
        chi_square, p_value = 0.0, 1.0
    else:
        chi_square, p_value, _, _ = stats.chi2_contingency(observed, correction=False)
    return AnonymityReport(
        parity_streams_equal=(transcript_a.parities == transcript_b.parities),
        port_table=table,
        chi_square=float(chi_square),
        p_value=float(p_value),
    )


class BitmapFormatError(ValueError):
    """Raised when a plain-text bitmap file violates the format."""


def read_bitmap(path: str | Path) -> Message:
    """Parse a plain-text bitmap file into a shaped Message.

    Errors name the offending line and token so malformed files are easy
    to fix.
    """
    tokens: list[tuple[int, str]] = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            for token in line.split():
                tokens.append((line_no, token))
    if not tokens:
        raise BitmapFormatError("line 1: empty file, expected 'P1' header")
    stream = iter(tokens)
    line_no, magic = next(stream)
    if magic != "P1":
        raise BitmapFormatError(
            f"line {line_no}: expected 'P1' header, got {magic!r}"
        )
    width = _read_dimension(stream, "width")
    height = _read_dimension(stream, "height")
    expected = width * height
    bits = []
    for line_no, token in stream:
        if token not in ("0", "1"):
            raise BitmapFormatError(
                f"line {line_no}: invalid pixel token {token!r}, expected 0 or 1"
            )
        bits.append(int(token))
        if len(bits) > expected:
            raise BitmapFormatError(
                f"line {line_no}: extra pixel token {token!r}, "
                f"expected exactly {expected} pixels"
            )
    if len(bits) < expected:
        raise BitmapFormatError(
            f"line {tokens[-1][0]}: expected {expected} pixel tokens, got {len(bits)}"
        )
    return Message(tuple(bits), (width, height))


def _read_dimension(stream, name: str) -> int:
    try:
        line_no, token = next(stream)
    except StopIteration:
        raise BitmapFormatError(f"unexpected end of file, missing {name}") from None
    try:
        value = int(token)
    except ValueError:
        raise BitmapFormatError(
            f"line {line_no}: invalid {name} token {token!r}, expected an integer"
        ) from None
    if value < 1:
        raise BitmapFormatError(f"line {line_no}: {name} must be >= 1, got {value}")
    return value


def write_bitmap(path: str | Path, message: Message) -> None:
    """Write a shaped Message as a plain-text bitmap (row per line)."""
    if message.shape is None:
        raise ValueError("message must carry a bitmap shape to be written")
    width, height = message.shape
    lines = ["P1", f"{width} {height}"]
    for row in range(height):
        row_bits = message.bits[row * width : (row + 1) * width]
        lines.append(" ".join(str(b) for b in row_bits))
    Path(path).write_text("\n".join(lines) + "\n")
