"""Keyboard and mouse behavior features from sampled input state.

The input log is a fixed-cadence snapshot of the held key set, not an
event stream, so durations are reconstructed by crediting each sample
one nominal sampling period. On fixtures with exact cadences this
makes every fraction an exact rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptySupport, InsufficientData
from .model import DEFAULT_INPUT_PERIOD_S, InputSample, Interval
from .zones import ZoneModel, assign_zone

MOUSE1 = "MOUSE1"
KINEMATICS_WINDOW_S = 1.0


@dataclass(frozen=True)
class HoldInterval:
    """One maximal stretch during which a key stayed down."""
    key: str
    interval: Interval


@dataclass(frozen=True)
class ClickStats:
    click_count: int
    mean_duration_s: float
    clicks_per_minute: float


@dataclass(frozen=True)
class MouseKinematics:
    """Path length per window and speed per sample pair, as mean/std."""
    path_mean_px: float
    path_std_px: float
    vel_mean_px_s: float
    vel_std_px_s: float


def nominal_period(samples: list[InputSample]) -> float:
    """Median inter-sample spacing, or the 10 ms default when undecidable."""
    if len(samples) < 2:
        return DEFAULT_INPUT_PERIOD_S
    ts = np.asarray([s.t for s in samples])
    return float(np.median(np.diff(ts)))


def _key_runs(samples: list[InputSample], key: str):
    """Yield (first_index, last_index) of maximal runs holding `key`."""
    start = None
    for i, s in enumerate(samples):
        down = key in s.keys_down
        if down and start is None:
            start = i
        elif not down and start is not None:
            yield start, i - 1
            start = None
    if start is not None:
        yield start, len(samples) - 1


def key_hold_intervals(samples: list[InputSample], key: str,
                       period_s: float | None = None) -> list[HoldInterval]:
    """Maximal held stretches of `key` as half-open intervals.

    A run closes at the first sample after it; a run still held at the
    end of the data closes one nominal period past the last sample.
    """
    if period_s is None:
        period_s = nominal_period(samples)
    out: list[HoldInterval] = []
    for first, last in _key_runs(samples, key):
        start_t = samples[first].t
        end_t = samples[last + 1].t if last + 1 < len(samples) else samples[last].t + period_s
        out.append(HoldInterval(key=key, interval=Interval(start_t, end_t)))
    return out


def _overlap(lo: float, hi: float, intervals: list[Interval]) -> float:
    """Total length of [lo, hi) covered by the ordered disjoint intervals."""
    total = 0.0
    for iv in intervals:
        if iv.end_t <= lo:
            continue
        if iv.start_t >= hi:
            break
        total += min(hi, iv.end_t) - max(lo, iv.start_t)
    return total


def _alive_duration(alive: list[Interval]) -> float:
    return math.fsum(iv.end_t - iv.start_t for iv in alive)


def fraction_held(samples: list[InputSample], keys, alive: list[Interval],
                  mode: str = "any", period_s: float | None = None) -> float:
    """Fraction of alive time with the key condition satisfied.

    mode "any" matches samples whose held set intersects `keys`;
    mode "all" requires every key in `keys` to be held. Each matching
    sample contributes one nominal period, clipped to the alive spans.
    """
    if mode not in ("any", "all"):
        raise ValueError(f"mode must be 'any' or 'all', got {mode!r}")
    total = _alive_duration(alive)
    if not alive or total <= 0.0:
        raise EmptySupport("alive intervals have zero total duration")
    if period_s is None:
        period_s = nominal_period(samples)
    keyset = frozenset(keys)
    held = 0.0
    for s in samples:
        if mode == "any":
            match = bool(keyset & s.keys_down)
        else:
            match = keyset <= s.keys_down
        if match:
            held += _overlap(s.t, s.t + period_s, alive)
    return held / total


def click_stats(samples: list[InputSample], button: str = MOUSE1,
                alive: list[Interval] | None = None,
                period_s: float | None = None) -> ClickStats:
    """Click count, mean held duration, and rate within alive time.

    A click is one hold interval of `button`; its duration is clipped
    to the alive spans, and holds entirely outside them are dropped.
    """
    if alive is None or not alive:
        raise EmptySupport("click_stats needs non-empty alive intervals")
    total = _alive_duration(alive)
    if total <= 0.0:
        raise EmptySupport("alive intervals have zero total duration")
    durations: list[float] = []
    for hold in key_hold_intervals(samples, button, period_s):
        clipped = _overlap(hold.interval.start_t, hold.interval.end_t, alive)
        if clipped > 0.0:
            durations.append(clipped)
    count = len(durations)
    mean = math.fsum(durations) / count if count else 0.0
    return ClickStats(click_count=count, mean_duration_s=mean,
                      clicks_per_minute=count / (total / 60.0))


def mouse_kinematics(samples: list[InputSample], alive: list[Interval],
                     window_s: float = KINEMATICS_WINDOW_S) -> MouseKinematics:
    """Path-per-window and speed-per-step statistics inside alive time.

    Each alive interval is tiled into window_s bins (the tail bin may
    be shorter); a step between consecutive samples of one interval is
    credited to the bin holding its first sample. Stds use n-1 and are
    0.0 when fewer than two observations exist.
    """
    segments: list[list[InputSample]] = []
    for iv in alive:
        segments.append([s for s in samples if iv.start_t <= s.t < iv.end_t])
    if sum(len(seg) for seg in segments) < 2:
        raise InsufficientData("need at least 2 input samples inside alive time")

    paths: list[float] = []
    speeds: list[float] = []
    for iv, seg in zip(alive, segments):
        n_bins = max(1, math.ceil((iv.end_t - iv.start_t) / window_s))
        bin_path = [0.0] * n_bins
        for a, b in zip(seg, seg[1:]):
            step = math.hypot(b.mouse_x - a.mouse_x, b.mouse_y - a.mouse_y)
            dt = b.t - a.t
            speeds.append(step / dt)
            idx = min(int((a.t - iv.start_t) / window_s), n_bins - 1)
            bin_path[idx] += step
        if len(seg) >= 2:
            paths.extend(bin_path)

    def _mean_std(values: list[float]) -> tuple[float, float]:
        if not values:
            return 0.0, 0.0
        arr = np.asarray(values)
        std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        return float(arr.mean()), std

    path_mean, path_std = _mean_std(paths)
    vel_mean, vel_std = _mean_std(speeds)
    return MouseKinematics(path_mean_px=path_mean, path_std_px=path_std,
                           vel_mean_px_s=vel_mean, vel_std_px_s=vel_std)


def click_zone_distribution(samples: list[InputSample], button: str,
                            model: ZoneModel) -> tuple[float, ...]:
    """Normalized zone counts of click onsets (all-zero when no clicks).

    The zone is assigned from the mouse position at the onset sample,
    not the release.
    """
    counts = [0] * model.k
    clicks = 0
    for first, _ in _key_runs(samples, button):
        s = samples[first]
        counts[assign_zone((s.mouse_x, s.mouse_y), model) - 1] += 1
        clicks += 1
    if clicks == 0:
        return tuple(0.0 for _ in counts)
    return tuple(c / clicks for c in counts)


@dataclass(frozen=True)
class FeatureRow:
    player_id: str
    cohort: str
    round_index: int
    feature: str
    value: float


def write_feature_table(rows: list[FeatureRow], path) -> None:
    from .ingest import _write_text, fmt_num
    lines = ["player_id,cohort,round,feature,value"]
    for r in rows:
        lines.append(f"{r.player_id},{r.cohort},{r.round_index},{r.feature},{fmt_num(r.value)}")
    _write_text(path, "\n".join(lines) + "\n")
