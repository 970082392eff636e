"""Arrival-time statistics and the round-trip significance test.

Reception and detection time tags (both referred to a common herald) are
histogrammed and fitted with Gaussians; the delay between the two fitted
means, with the fitted widths summed in quadrature, is compared against the
time light needs to cross the inter-party distance twice. A significance
|delta_t - reference| / sigma of at least 3, with delta_t below the
reference, certifies that the exchange finished faster than any double
traversal could.

Detector jitter enters twice per tag (herald detector plus measuring
detector), so each peak's width is sqrt(2) times the per-detector jitter.
Fits run on a histogram restricted to a window of +/- 3 robust scale units
around the sample mode, which excludes small satellite reflection peaks.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import optimize

SPEED_OF_LIGHT_M_PER_NS = 0.299792458
SIGNIFICANCE_CAP = 1e6
PAIR_LABELS = ("AA", "AB", "BA", "BB")

_WINDOW_HALF_WIDTH_SCALES = 3.0
_MAD_TO_SIGMA = 1.4826
# Below this, per-bin counts are too noisy for a histogram curve fit.
_MIN_HISTOGRAM_SAMPLES = 400


@dataclass(frozen=True)
class TimingDataset:
    """Reception and detection time tags (ns) for one station/detector pair."""

    reception_samples: np.ndarray
    detection_samples: np.ndarray
    label: str

    def __post_init__(self) -> None:
        for name in ("reception_samples", "detection_samples"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.size == 0:
                raise ValueError(f"{name} must be non-empty")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must contain only finite times")
            object.__setattr__(self, name, arr)
        if self.label not in PAIR_LABELS:
            raise ValueError(
                f"label must be one of {PAIR_LABELS}, got {self.label!r}"
            )


@dataclass(frozen=True)
class GaussianFit:
    """Fitted peak location and width; degenerate when the data had no spread."""

    mean: float
    sigma: float
    degenerate: bool = False


@dataclass(frozen=True)
class DelayEstimate:
    """Delay between fitted detection and reception peaks, with quadrature error."""

    delta_t: float
    sigma: float
    degenerate: bool = False


@dataclass(frozen=True)
class TimingResult:
    """Causality comparison for one dataset.

    significance = |delta_t - reference_time| / sigma, capped at
    SIGNIFICANCE_CAP when sigma is zero (capped flag set).
    reference_error_negligible records whether a supplied reference-time
    uncertainty is at least 4 times smaller than sigma, the condition under
    which ignoring it in the ratio is justified; None when no uncertainty
    was supplied.
    """

    delta_t: float
    sigma: float
    reference_time: float
    significance: float
    capped: bool = False
    reference_error_negligible: bool | None = None

    @property
    def verdict(self) -> bool:
        """True when the exchange beat the double traversal at 3 sigma."""
        return self.delta_t < self.reference_time and self.significance >= 3.0


def synthesize_time_tags(
    true_delay: float,
    jitter_sigma_per_detector: float,
    n_events: int,
    rng: np.random.Generator,
    *,
    label: str = "AA",
    reception_time: float = 0.0,
) -> TimingDataset:
    """Generate jittered reception/detection tags around the true times.

    Every tag picks up two independent Gaussian jitters (herald detector and
    measuring detector), so both peaks have standard deviation
    sqrt(2) * jitter_sigma_per_detector.
    """
    if jitter_sigma_per_detector < 0.0:
        raise ValueError(
            f"jitter must be >= 0, got {jitter_sigma_per_detector!r}"
        )
    if n_events < 2:
        raise ValueError(f"n_events must be >= 2, got {n_events}")
    j = jitter_sigma_per_detector
    reception = reception_time + rng.normal(0.0, j, n_events) + rng.normal(
        0.0, j, n_events
    )
    detection = (
        reception_time
        + true_delay
        + rng.normal(0.0, j, n_events)
        + rng.normal(0.0, j, n_events)
    )
    return TimingDataset(reception, detection, label)


def _robust_scale(samples: np.ndarray) -> float:
    mad = float(np.median(np.abs(samples - np.median(samples))))
    if mad > 0.0:
        return _MAD_TO_SIGMA * mad
    return float(np.std(samples))


def _mode_estimate(samples: np.ndarray) -> float:
    hist, edges = np.histogram(samples, bins="auto")
    peak = int(np.argmax(hist))
    return 0.5 * (edges[peak] + edges[peak + 1])


def fit_gaussian(samples: Sequence[float] | np.ndarray) -> GaussianFit:
    """Gaussian peak fit via least squares on a windowed histogram.

    The window is the sample mode +/- 3 robust scale units (median absolute
    deviation rescaled to sigma), which drops far satellite peaks before
    fitting. Bin heights inside the window follow the full Gaussian curve,
    so the fitted width is not biased by the truncation, unlike windowed
    sample moments. Below _MIN_HISTOGRAM_SAMPLES the histogram is too noisy
    to constrain a curve and the windowed moments are returned instead;
    their percent-level truncation bias is far below the statistical error
    at those sizes.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError(f"need at least 2 samples to fit, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    if float(np.ptp(x)) == 0.0:
        return GaussianFit(float(x[0]), 0.0, degenerate=True)
    scale = _robust_scale(x)
    mode = _mode_estimate(x)
    lo = mode - _WINDOW_HALF_WIDTH_SCALES * scale
    hi = mode + _WINDOW_HALF_WIDTH_SCALES * scale
    windowed = x[(x >= lo) & (x <= hi)]
    if windowed.size < 8 or float(np.ptp(windowed)) == 0.0:
        windowed = x
    if windowed.size < _MIN_HISTOGRAM_SAMPLES:
        return GaussianFit(float(windowed.mean()), float(windowed.std(ddof=1)))
    n_bins = int(max(12, min(80, round(math.sqrt(windowed.size)))))
    hist, edges = np.histogram(windowed, bins=n_bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    span = float(edges[-1] - edges[0])
    # Keep the optimizer on physical ground: the peak must sit inside the
    # histogram support and be neither narrower than a bin nor wider than
    # the whole window. Sparse small-sample histograms otherwise admit
    # runaway broad-Gaussian solutions.
    lower = (0.0, float(edges[0]), 0.5 * span / n_bins)
    upper = (4.0 * float(hist.max()), float(edges[-1]), span)
    guess = (
        float(hist.max()),
        min(max(float(windowed.mean()), lower[1]), upper[1]),
        min(max(float(windowed.std() or scale), lower[2]), upper[2]),
    )

    def gauss(t, amplitude, mean, sigma):
        return amplitude * np.exp(-0.5 * ((t - mean) / sigma) ** 2)

    try:
        popt, _ = optimize.curve_fit(
            gauss, centers, hist, p0=guess, bounds=(lower, upper), maxfev=10000
        )
        return GaussianFit(float(popt[1]), abs(float(popt[2])))
    except (RuntimeError, optimize.OptimizeWarning):
        # Pathological histograms fall back to windowed sample moments.
        return GaussianFit(float(windowed.mean()), float(windowed.std(ddof=1)))


def delay_with_error(dataset: TimingDataset) -> DelayEstimate:
    """Fitted detection mean minus reception mean, widths in quadrature."""
    reception = fit_gaussian(dataset.reception_samples)
    detection = fit_gaussian(dataset.detection_samples)
    return DelayEstimate(
        delta_t=detection.mean - reception.mean,
        sigma=math.hypot(reception.sigma, detection.sigma),
        degenerate=reception.degenerate or detection.degenerate,
    )


def fiber_delay_correction(length_m: float, group_index: float) -> float:
    """Transit time (ns) of a fiber patch: length * group_index / c."""
    if not length_m > 0.0:
        raise ValueError(f"length_m must be > 0, got {length_m!r}")
    if not group_index >= 1.0:
        raise ValueError(f"group_index must be >= 1, got {group_index!r}")
    return length_m * group_index / SPEED_OF_LIGHT_M_PER_NS


def causality_significance(
    delta_t: float,
    sigma: float,
    min_distance_m: float,
    fiber_correction_ns: float = 0.0,
    *,
    min_distance_error_m: float = 0.0,
) -> TimingResult:
    """Compare a measured delay against the double-traversal reference time.

    reference_time = 2 * min_distance_m / c. fiber_correction_ns is the
    transit time of an auxiliary fiber on the reception measurement path; it
    is added to delta_t because that fiber delays the reception tags, making
    the raw delay an underestimate. A nonzero min_distance_error_m reports
    whether its contribution is small enough (4x below sigma) to justify
    leaving it out of the ratio; it is never folded into the significance.
    """
    if not min_distance_m > 0.0:
        raise ValueError(f"min_distance_m must be > 0, got {min_distance_m!r}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma!r}")
    if min_distance_error_m < 0.0:
        raise ValueError(
            f"min_distance_error_m must be >= 0, got {min_distance_error_m!r}"
        )
    corrected = delta_t + fiber_correction_ns
    reference = 2.0 * min_distance_m / SPEED_OF_LIGHT_M_PER_NS
    deviation = abs(corrected - reference)
    capped = False
    if sigma > 0.0:
        significance = deviation / sigma
        if significance > SIGNIFICANCE_CAP:
            significance = SIGNIFICANCE_CAP
            capped = True
    elif deviation == 0.0:
        significance = 0.0
    else:
        significance = SIGNIFICANCE_CAP
        capped = True
    if min_distance_error_m > 0.0:
        reference_error = 2.0 * min_distance_error_m / SPEED_OF_LIGHT_M_PER_NS
        negligible = 4.0 * reference_error <= sigma
    else:
        negligible = None
    return TimingResult(
        delta_t=corrected,
        sigma=sigma,
        reference_time=reference,
        significance=significance,
        capped=capped,
        reference_error_negligible=negligible,
    )


def analyze_dataset(
    dataset: TimingDataset,
    min_distance_m: float,
    fiber_correction_ns: float = 0.0,
    *,
    min_distance_error_m: float = 0.0,
) -> TimingResult:
    """Full pipeline for one dataset: fit both peaks, then the significance."""
    estimate = delay_with_error(dataset)
    return causality_significance(
        estimate.delta_t,
        estimate.sigma,
        min_distance_m,
        fiber_correction_ns,
        min_distance_error_m=min_distance_error_m,
    )


TIME_TAG_CSV_COLUMNS = ("event_id", "kind", "time_ns")


def write_time_tags(path: str | Path, dataset: TimingDataset) -> None:
    """Dump a dataset as CSV rows (event_id, kind, time_ns), full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TIME_TAG_CSV_COLUMNS)
        for kind, samples in (
            ("reception", dataset.reception_samples),
            ("detection", dataset.detection_samples),
        ):
            for event_id, t in enumerate(samples):
                writer.writerow([event_id, kind, repr(float(t))])


def read_time_tags(path: str | Path, label: str = "AA") -> TimingDataset:
    """Parse a time-tag CSV back into a TimingDataset."""
    by_kind: dict[str, list[float]] = {"reception": [], "detection": []}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row_no, row in enumerate(reader, start=2):
            kind = row.get("kind")
            if kind not in by_kind:
                raise ValueError(
                    f"line {row_no}: kind must be reception or detection, got {kind!r}"
                )
            try:
                by_kind[kind].append(float(row["time_ns"]))
            except (KeyError, TypeError, ValueError):
                raise ValueError(
                    f"line {row_no}: invalid time_ns value {row.get('time_ns')!r}"
                ) from None
    return TimingDataset(
        np.array(by_kind["reception"]), np.array(by_kind["detection"]), label
    )


def timing_result_json(result: TimingResult) -> dict:
    """JSON-ready dictionary for one TimingResult (units in the key names)."""
    return {
        "delta_t_ns": result.delta_t,
        "sigma_ns": result.sigma,
        "reference_ns": result.reference_time,
        "significance": result.significance,
        "verdict": result.verdict,
        "significance_capped": result.capped,
        "reference_error_negligible": result.reference_error_negligible,
    }


def write_timing_json(path: str | Path, results: dict[str, TimingResult]) -> None:
    """Write per-pair results plus the overall verdict as JSON."""
    payload = {
        "pairs": {label: timing_result_json(r) for label, r in results.items()},
        "overall_verdict": all(r.verdict for r in results.values()),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
