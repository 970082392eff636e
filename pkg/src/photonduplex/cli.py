"""Command-line front-end for all simulations.

Subcommands: game-sweep, protocol, transmit, g2, timing. Every command
takes a global --seed and derives labeled substreams from it, so runs are
reproducible byte for byte and adding a command never perturbs another
command's stream. An optional flat key=value config file mirrors the flags;
flags override file values. Report outputs are delimited files (CSV/JSON,
plus plain-text bitmaps for images) with matplotlib figures rendered
alongside them unless --no-figures is given.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import figures
from .game import (
    GameConfig,
    fit_success_line,
    visibility_sweep,
    write_sweep_csv,
)
from .interferometer import BitPair, ChannelParams
from .protocol import (
    ProtocolParams,
    interval_success_probability,
    message_summary,
    optimal_mean_detections,
    repetition_protocol_success,
    run_message,
    write_message_csv,
)
from .security import Message, read_bitmap, transmit_image, write_bitmap
from .source import SourceModel, g2_poisson_error, g2_zero, simulate_coincidence_run
from .streams import spawn_seed, substream
from .timing import (
    PAIR_LABELS,
    SPEED_OF_LIGHT_M_PER_NS,
    analyze_dataset,
    fiber_delay_correction,
    synthesize_time_tags,
    timing_result_json,
    write_time_tags,
)

DEFAULT_SEED = 1234
_MAX_HERALDS = 2e8


def load_config(path: str | Path) -> dict[str, str]:
    """Flat key=value file; blank lines and # comments are ignored."""
    config: dict[str, str] = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(
                    f"{path}:{line_no}: expected key=value, got {line!r}"
                )
            key, _, value = line.partition("=")
            config[key.strip().lower().replace("-", "_")] = value.strip()
    return config


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float_list(text: str) -> list[float]:
    values = [float(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}")
    return values


class _Options:
    """Resolve each parameter: flag if given, else config value, else default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config) if args.config else {}

    def get(self, key: str, cast, default):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.config.get(key)
        if value is None:
            return default
        return cast(value) if isinstance(value, str) else value


def _ensure_out_dir(opts: _Options) -> Path:
    out_dir = Path(opts.get("out_dir", str, "."))
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _want_figures(opts: _Options) -> bool:
    return not opts.get("no_figures", _parse_bool, False)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _resolve_p_s(opts: _Options, default_ps: float | None) -> float:
    p_s = opts.get("ps", float, None)
    vis = opts.get("vis", float, None)
    if p_s is not None and vis is not None:
        raise ValueError("give either --ps or --vis, not both")
    if vis is not None:
        if not 0.0 <= vis <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {vis!r}")
        return 0.5 * (1.0 + vis)
    if p_s is not None:
        return p_s
    if default_ps is None:
        raise ValueError("one of --ps or --vis is required")
    return default_ps


def cmd_game_sweep(args: argparse.Namespace) -> int:
    opts = _Options(args)
    vis_values = opts.get("vis", _parse_float_list, [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    photons = opts.get("photons", int, 100_000)
    settings = opts.get("settings", int, 100)
    seed = opts.get("seed", int, DEFAULT_SEED)
    out_dir = _ensure_out_dir(opts)
    for v in vis_values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"visibility values must be in [0, 1], got {v!r}")
    config = GameConfig(
        n_settings=settings,
        photons_per_setting=photons,
        channel=ChannelParams(visibility=1.0),
        seed=seed,
    )
    sweep = visibility_sweep(vis_values, config)
    csv_path = out_dir / "sweep.csv"
    write_sweep_csv(csv_path, sweep, config)
    print(f"wrote {csv_path}")
    for v, result in sweep:
        print(
            f"V = {v:.3f}: success = {result.success_probability:.4f} "
            f"+/- {result.std_error:.4f} (ideal {(0.5 * (1 + v)):.4f})"
        )
    if len(sweep) >= 2:
        slope, intercept = fit_success_line(sweep)
        print(f"linear fit: slope = {slope:.4f}, intercept = {intercept:.4f} "
              "(ideal 0.5 and 0.5)")
    if _want_figures(opts):
        fig_path = out_dir / "sweep.png"
        figures.sweep_figure(sweep, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_protocol(args: argparse.Namespace) -> int:
    opts = _Options(args)
    seed = opts.get("seed", int, DEFAULT_SEED)
    reps = opts.get("reps", int, 1)
    n_pairs = opts.get("pairs", int, 100)
    n_sets = opts.get("sets", int, 10)
    optimize_only = opts.get("optimize_m", _parse_bool, False)
    m = opts.get("m", float, None)
    p_s = _resolve_p_s(opts, None)
    out_dir = _ensure_out_dir(opts)

    if optimize_only and m is None:
        m_opt = optimal_mean_detections(p_s)
        payload = {"p_s": p_s, "m_opt": m_opt}
        json_path = out_dir / "protocol.json"
        _write_json(json_path, payload)
        print(f"m_opt at p_s = {p_s:g}: {m_opt:.6f}")
        print(f"wrote {json_path}")
        return 0
    if m is None:
        raise ValueError("--m is required unless --optimize-m is given alone")

    params = ProtocolParams(m, p_s, reps)
    channel = ChannelParams(visibility=params.visibility)
    source = SourceModel(mean_detections=m)
    if n_pairs < 1 or n_sets < 1:
        raise ValueError("--pairs and --sets must be >= 1")

    rates = []
    for set_id in range(n_sets):
        rng = substream(seed, f"protocol:set:{set_id}")
        xs = rng.integers(0, 2, size=n_pairs)
        ys = rng.integers(0, 2, size=n_pairs)
        pairs = [BitPair(int(x), int(y)) for x, y in zip(xs, ys)]
        run = run_message(pairs, params, channel, source, rng)
        rates.append(run.success_rate)

    summary = message_summary(params, rates, n_pairs)
    try:
        summary["m_opt"] = optimal_mean_detections(p_s)
    except ValueError as exc:
        summary["m_opt"] = None
        summary["m_opt_note"] = str(exc)
    summary["seed"] = seed

    json_path = out_dir / "protocol.json"
    _write_json(json_path, summary)
    csv_path = out_dir / "protocol.csv"
    write_message_csv(csv_path, params, rates)
    print(
        f"analytic interval success: {summary['analytic_interval_success']:.4f}; "
        f"majority (r = {reps}): {summary['analytic_majority_success']:.4f}"
    )
    print(
        f"measured over {n_sets} sets x {n_pairs} pairs: "
        f"{summary['measured_success_mean']:.4f} "
        f"+/- {summary['measured_success_std_error']:.4f}"
    )
    if summary["m_opt"] is not None:
        print(f"m_opt at p_s = {p_s:g}: {summary['m_opt']:.4f}")
    print(f"wrote {json_path}")
    print(f"wrote {csv_path}")
    if _want_figures(opts):
        fig_path = out_dir / "protocol.png"
        figures.protocol_figure(
            params,
            summary["measured_success_mean"],
            summary["measured_success_std_error"],
            fig_path,
        )
        print(f"wrote {fig_path}")
    return 0


def cmd_transmit(args: argparse.Namespace) -> int:
    opts = _Options(args)
    image_path = opts.get("image", str, None)
    if image_path is None:
        raise ValueError("--image is required")
    m = opts.get("m", float, 3.34)
    p_s = _resolve_p_s(opts, 0.935)
    reps = opts.get("reps", int, 1)
    seed = opts.get("seed", int, DEFAULT_SEED)
    out_dir = _ensure_out_dir(opts)

    image = read_bitmap(image_path)
    params = ProtocolParams(m, p_s, reps)
    channel = ChannelParams(visibility=params.visibility)
    source = SourceModel(mean_detections=m)
    rng = substream(seed, "transmit")
    received, eve, success_rate = transmit_image(image, params, channel, source, rng)
    eve_message = Message(eve.parities, image.shape)
    pixel_match = sum(
        1 for sent, got in zip(image.bits, received.bits) if sent == got
    ) / len(image.bits)

    received_path = out_dir / "received.pbm"
    eve_path = out_dir / "eve.pbm"
    write_bitmap(received_path, received)
    write_bitmap(eve_path, eve_message)
    width, height = image.shape
    payload = {
        "width": width,
        "height": height,
        "pixels": len(image.bits),
        "m": m,
        "p_s": p_s,
        "repetitions": reps,
        "seed": seed,
        "success_rate": success_rate,
        "pixel_match_rate": pixel_match,
        "analytic_interval_success": interval_success_probability(m, p_s),
        "analytic_majority_success": repetition_protocol_success(params),
    }
    json_path = out_dir / "transmit.json"
    _write_json(json_path, payload)
    print(
        f"transmitted {width}x{height} bitmap: pair success rate "
        f"{success_rate:.4f}, pixel match {pixel_match:.4f}"
    )
    for path in (received_path, eve_path, json_path):
        print(f"wrote {path}")
    if _want_figures(opts):
        fig_path = out_dir / "transmit.png"
        figures.transmit_figure(image, received, eve_message, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_g2(args: argparse.Namespace) -> int:
    opts = _Options(args)
    contamination = opts.get("contamination", float, 0.01)
    herald_rate = opts.get("herald_rate", float, 50_000.0)
    duration = opts.get("duration", float, 30.0)
    seed = opts.get("seed", int, DEFAULT_SEED)
    out_dir = _ensure_out_dir(opts)

    source = SourceModel(
        mean_detections=1.0,
        multiphoton_rate=contamination,
        herald_rate=herald_rate,
    )
    if herald_rate * duration > _MAX_HERALDS:
        raise ValueError(
            f"herald_rate * duration = {herald_rate * duration:g} exceeds "
            f"{_MAX_HERALDS:g}; reduce one of them"
        )
    rng = substream(seed, "g2")
    rates = simulate_coincidence_run(source, duration, rng)
    if rates.cc_ha + rates.cc_hb <= 0.0:
        raise ValueError("run produced no coincidences; increase rate or duration")
    estimate = g2_zero(rates)
    error = g2_poisson_error(rates, duration)
    payload = {
        "g2": estimate,
        "sigma": error,
        "analytic_g2": source.analytic_g2,
        "multiphoton_rate": contamination,
        "herald_rate_per_s": herald_rate,
        "duration_s": duration,
        "seed": seed,
        "rates_per_s": {
            "c_h": rates.c_h,
            "cc_ha": rates.cc_ha,
            "cc_hb": rates.cc_hb,
            "cc_hab": rates.cc_hab,
        },
        "counts": {
            "n_h": rates.c_h * duration,
            "n_ha": rates.cc_ha * duration,
            "n_hb": rates.cc_hb * duration,
            "n_hab": rates.cc_hab * duration,
        },
    }
    json_path = out_dir / "g2.json"
    _write_json(json_path, payload)
    print(
        f"g2(0) = {estimate:.5f} +/- {error:.5f} "
        f"(generation model predicts {source.analytic_g2:.5f})"
    )
    print(f"wrote {json_path}")
    if _want_figures(opts):
        fig_path = out_dir / "g2.png"
        figures.g2_figure(estimate, error, source.analytic_g2, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_timing(args: argparse.Namespace) -> int:
    opts = _Options(args)
    arm_a = opts.get("arm_a", float, 1.06)
    arm_b = opts.get("arm_b", float, 1.19)
    min_distance = opts.get("min_distance", float, 1.56)
    distance_error = opts.get("distance_error", float, 0.01)
    jitter = opts.get("jitter_ns", float, 0.149)
    events = opts.get("events", int, 100_000)
    fiber_a = opts.get("fiber_a", float, None)
    fiber_b = opts.get("fiber_b", float, None)
    group_index = opts.get("group_index", float, 1.468)
    write_tags = opts.get("write_tags", _parse_bool, False)
    seed = opts.get("seed", int, DEFAULT_SEED)
    out_dir = _ensure_out_dir(opts)
    if arm_a <= 0.0 or arm_b <= 0.0:
        raise ValueError("arm lengths must be > 0")

    arms = {"A": arm_a, "B": arm_b}
    fibers = {"A": fiber_a, "B": fiber_b}
    datasets = {}
    results = {}
    for label in PAIR_LABELS:
        station, detector = label[0], label[1]
        geometry_delay = (arms[station] + arms[detector]) / SPEED_OF_LIGHT_M_PER_NS
        fiber_length = fibers[station]
        fiber_ns = (
            fiber_delay_correction(fiber_length, group_index)
            if fiber_length is not None
            else 0.0
        )
        dataset = synthesize_time_tags(
            true_delay=geometry_delay - fiber_ns,
            jitter_sigma_per_detector=jitter,
            n_events=events,
            rng=substream(seed, f"timing:{label}"),
            label=label,
            reception_time=fiber_ns,
        )
        datasets[label] = dataset
        results[label] = analyze_dataset(
            dataset,
            min_distance,
            fiber_correction_ns=fiber_ns,
            min_distance_error_m=distance_error,
        )
        if write_tags:
            tags_path = out_dir / f"timing_tags_{label}.csv"
            write_time_tags(tags_path, dataset)
            print(f"wrote {tags_path}")

    payload = {
        "geometry": {
            "arm_a_m": arm_a,
            "arm_b_m": arm_b,
            "min_distance_m": min_distance,
            "min_distance_error_m": distance_error,
            "jitter_ns_per_detector": jitter,
            "fiber_a_m": fiber_a,
            "fiber_b_m": fiber_b,
            "group_index": group_index,
            "events_per_pair": events,
            "seed": seed,
        },
        "pairs": {label: timing_result_json(results[label]) for label in PAIR_LABELS},
        "all_significant": all(r.significance >= 3.0 for r in results.values()),
        "overall_verdict": all(r.verdict for r in results.values()),
    }
    json_path = out_dir / "timing.json"
    _write_json(json_path, payload)

    csv_path = out_dir / "timing.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["label", "delta_t_ns", "sigma_ns", "reference_ns", "significance", "verdict"]
        )
        for label in PAIR_LABELS:
            r = results[label]
            writer.writerow(
                [
                    label,
                    repr(r.delta_t),
                    repr(r.sigma),
                    repr(r.reference_time),
                    repr(r.significance),
                    r.verdict,
                ]
            )

    for label in PAIR_LABELS:
        r = results[label]
        capped = " (capped)" if r.capped else ""
        print(
            f"{label}: delta_t = {r.delta_t:.3f} ns, sigma = {r.sigma:.3f} ns, "
            f"reference = {r.reference_time:.3f} ns, "
            f"significance = {r.significance:.2f}{capped}, verdict = {r.verdict}"
        )
    print(f"overall verdict: {payload['overall_verdict']}")
    print(f"wrote {json_path}")
    print(f"wrote {csv_path}")
    if _want_figures(opts):
        fig_path = out_dir / "timing.png"
        figures.timing_figure(datasets, results, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=str, help="base seed for all substreams")
    parser.add_argument("--out-dir", dest="out_dir", type=str,
                        help="directory for output files (default: .)")
    parser.add_argument("--config", type=str,
                        help="flat key=value config file; flags override it")
    parser.add_argument("--no-figures", dest="no_figures", action="store_true",
                        default=None, help="skip rendering figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonduplex",
        description=(
            "Simulate two-way communication on a single photon: the "
            "visibility game, the loss-robust interval protocol, one-time-"
            "pad image transfer, source correlation runs, and arrival-time "
            "causality checks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("game-sweep", help="success probability vs visibility")
    p.add_argument("--vis", type=str, help="comma-separated visibilities in [0, 1]")
    p.add_argument("--photons", type=str, help="photons per setting")
    p.add_argument("--settings", type=str, help="random bit pairs per point")
    _add_common(p)
    p.set_defaults(handler=cmd_game_sweep)

    p = sub.add_parser("protocol", help="interval protocol analytics and Monte Carlo")
    p.add_argument("--m", type=str, help="mean detected photons per interval")
    p.add_argument("--ps", type=str, help="per-photon correct-port probability")
    p.add_argument("--vis", type=str, help="channel visibility (alternative to --ps)")
    p.add_argument("--reps", type=str, help="odd repetitions per bit pair")
    p.add_argument("--pairs", type=str, help="bit pairs per set")
    p.add_argument("--sets", type=str, help="number of sets")
    p.add_argument("--optimize-m", dest="optimize_m", action="store_true",
                   default=None, help="report the optimal m for the given p_s")
    _add_common(p)
    p.set_defaults(handler=cmd_protocol)

    p = sub.add_parser("transmit", help="send a bitmap under a one-time pad")
    p.add_argument("--image", type=str, help="plain-text bitmap file (P1)")
    p.add_argument("--m", type=str, help="mean detected photons per interval")
    p.add_argument("--ps", type=str, help="per-photon correct-port probability")
    p.add_argument("--vis", type=str, help="channel visibility (alternative to --ps)")
    p.add_argument("--reps", type=str, help="odd repetitions per pixel")
    _add_common(p)
    p.set_defaults(handler=cmd_transmit)

    p = sub.add_parser("g2", help="simulate a heralded g2(0) measurement")
    p.add_argument("--contamination", type=str,
                   help="probability of a second photon per herald")
    p.add_argument("--herald-rate", dest="herald_rate", type=str,
                   help="heralds per second")
    p.add_argument("--duration", type=str, help="run length in seconds")
    _add_common(p)
    p.set_defaults(handler=cmd_g2)

    p = sub.add_parser("timing", help="arrival-time pipeline and causality check")
    p.add_argument("--arm-a", dest="arm_a", type=str, help="station A arm length (m)")
    p.add_argument("--arm-b", dest="arm_b", type=str, help="station B arm length (m)")
    p.add_argument("--min-distance", dest="min_distance", type=str,
                   help="minimum inter-party distance (m)")
    p.add_argument("--distance-error", dest="distance_error", type=str,
                   help="uncertainty of the minimum distance (m)")
    p.add_argument("--jitter-ns", dest="jitter_ns", type=str,
                   help="per-detector jitter standard deviation (ns)")
    p.add_argument("--events", type=str, help="time tags per pair")
    p.add_argument("--fiber-a", dest="fiber_a", type=str,
                   help="station A reception fiber length (m), optional")
    p.add_argument("--fiber-b", dest="fiber_b", type=str,
                   help="station B reception fiber length (m), optional")
    p.add_argument("--group-index", dest="group_index", type=str,
                   help="fiber group index (default 1.468)")
    p.add_argument("--write-tags", dest="write_tags", action="store_true",
                   default=None, help="also dump the synthetic time tags as CSV")
    _add_common(p)
    p.set_defaults(handler=cmd_timing)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
