"""Heralded photon source: Poisson statistics and second-order coherence.

The source emits photon pairs; detecting one photon (the herald) announces
its partner, which enters the interferometer. The number of detected
photons per communication interval is Poissonian. Single-photon purity is
quantified by the heralded second-order correlation at zero delay,

    g2(0) = 2 * C_H * CC_HAB / (CC_HA + CC_HB)^2,

built from the herald singles rate C_H, the herald/output-port coincidence
rates CC_HA and CC_HB, and the triple-coincidence rate CC_HAB. An ideal
single-photon stream gives g2(0) = 0; classical light gives 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SourceModel:
    """Photon statistics at the input of the interferometer.

    mean_detections: Poisson mean m of detected photons per communication
        interval, after all losses.
    multiphoton_rate: probability that a heralded emission carries a second
        photon on top of the signal photon. Zero models an ideal
        single-photon source; raising it degrades g2(0).
    herald_rate: heralds per second, used by coincidence-run simulation.
    interval_seconds: communication interval length in seconds.
    """

    mean_detections: float
    multiphoton_rate: float = 0.0
    herald_rate: float = 1.0e5
    interval_seconds: float = 0.5

    def __post_init__(self) -> None:
        if not self.mean_detections > 0.0:
            raise ValueError(
                f"mean_detections must be > 0, got {self.mean_detections!r}"
            )
        if not 0.0 <= self.multiphoton_rate < 1.0:
            raise ValueError(
                f"multiphoton_rate must be in [0, 1), got {self.multiphoton_rate!r}"
            )
        if not self.herald_rate > 0.0:
            raise ValueError(f"herald_rate must be > 0, got {self.herald_rate!r}")
        if not self.interval_seconds > 0.0:
            raise ValueError(
                f"interval_seconds must be > 0, got {self.interval_seconds!r}"
            )

    @property
    def analytic_g2(self) -> float:
        """g2(0) implied by the generation model, q = multiphoton_rate.

        Per herald each port fires with probability 1/2 + q/4 and both
        ports fire together with probability q/2 (extra photon present and
        the two photons split). With herald rate R this gives
        CC_HA = CC_HB = R (1/2 + q/4) and CC_HAB = R q/2, so

            g2 = 2 R (R q/2) / (R (1 + q/2))^2 = q / (1 + q/2)^2.
        """
        q = self.multiphoton_rate
        return q / (1.0 + 0.5 * q) ** 2


def sample_interval_count(source: SourceModel, rng: np.random.Generator) -> int:
    """Number of detected photons during one communication interval."""
    return int(rng.poisson(source.mean_detections))


def sample_interval_counts(
    source: SourceModel, n_intervals: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized sample_interval_count over n_intervals."""
    if n_intervals < 0:
        raise ValueError(f"n_intervals must be >= 0, got {n_intervals}")
    return rng.poisson(source.mean_detections, size=n_intervals)


@dataclass(frozen=True)
class CoincidenceRates:
    """Measured count rates (counts/s) entering the g2(0) estimate.

    c_h: heralding-detector singles rate.
    cc_ha, cc_hb: herald/output-port twofold coincidence rates.
    cc_hab: threefold coincidence rate (herald and both output ports).
    """

    c_h: float
    cc_ha: float
    cc_hb: float
    cc_hab: float

    def __post_init__(self) -> None:
        for name in ("c_h", "cc_ha", "cc_hb", "cc_hab"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if self.cc_hab > min(self.cc_ha, self.cc_hb):
            raise ValueError(
                "cc_hab cannot exceed either twofold rate: "
                f"{self.cc_hab!r} > min({self.cc_ha!r}, {self.cc_hb!r})"
            )


def g2_zero(rates: CoincidenceRates) -> float:
    """Heralded second-order correlation at zero delay from count rates."""
    denom = rates.cc_ha + rates.cc_hb
    if denom <= 0.0:
        raise ValueError("cc_ha + cc_hb must be > 0, g2 is undefined")
    return 2.0 * rates.c_h * rates.cc_hab / denom**2


def g2_poisson_error(rates: CoincidenceRates, duration_s: float) -> float:
    """One-sigma uncertainty of g2_zero from Poisson counting statistics.

    First-order propagation over the integrated counts N = rate * duration:

        sigma/g2 = sqrt(1/N_H + 1/N_HAB + 4/(N_HA + N_HB)).

    The threefold count dominates. When no threefold coincidence was
    recorded the estimate is zero and the uncertainty is quoted at the
    one-count level: the g2 a single threefold event would have produced.
    """
    if not duration_s > 0.0:
        raise ValueError(f"duration_s must be > 0, got {duration_s!r}")
    n_sum = (rates.cc_ha + rates.cc_hb) * duration_s
    if n_sum <= 0.0:
        raise ValueError("cc_ha + cc_hb must be > 0, g2 is undefined")
    n_h = rates.c_h * duration_s
    if n_h <= 0.0:
        raise ValueError("c_h must be > 0 to propagate uncertainty")
    n_hab = rates.cc_hab * duration_s
    if n_hab <= 0.0:
        return 2.0 * n_h / n_sum**2
    return g2_zero(rates) * math.sqrt(1.0 / n_h + 1.0 / n_hab + 4.0 / n_sum)


def simulate_coincidence_run(
    source: SourceModel, duration_s: float, rng: np.random.Generator
) -> CoincidenceRates:
    """Monte Carlo of a g2(0) measurement run.

    Each herald (Poisson at source.herald_rate) comes with one signal photon
    sent to a 50/50 splitter, plus an extra photon with probability
    source.multiphoton_rate, routed independently. cc_ha/cc_hb count heralds
    with at least one photon at that port; cc_hab counts heralds where both
    ports fired. Coincidences are logical (same herald), not time-windowed.
    """
    if not duration_s > 0.0:
        raise ValueError(f"duration_s must be > 0, got {duration_s!r}")
    n_heralds = int(rng.poisson(source.herald_rate * duration_s))
    if n_heralds == 0:
        return CoincidenceRates(0.0, 0.0, 0.0, 0.0)
    signal_to_a = rng.random(n_heralds) < 0.5
    extra = rng.random(n_heralds) < source.multiphoton_rate
    extra_to_a = rng.random(n_heralds) < 0.5
    hit_a = signal_to_a | (extra & extra_to_a)
    hit_b = ~signal_to_a | (extra & ~extra_to_a)
    n_ha = int(np.count_nonzero(hit_a))
    n_hb = int(np.count_nonzero(hit_b))
    n_hab = int(np.count_nonzero(hit_a & hit_b))
    return CoincidenceRates(
        c_h=n_heralds / duration_s,
        cc_ha=n_ha / duration_s,
        cc_hb=n_hb / duration_s,
        cc_hab=n_hab / duration_s,
    )
