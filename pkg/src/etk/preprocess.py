"""Signal preprocessing: alive-segment extraction, gap repair, heart rate.

The pipeline analyzes only the spans where the tracked player is alive
inside a round; everything else (buy time between rounds, post-death
spectating) is cut before any statistics are computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InsufficientData, UnknownPlayer
from .model import (
    BeatSeries,
    EventKind,
    GazeSample,
    GazeSeries,
    InputSample,
    Interval,
    MatchTimeline,
)

MAX_GAP_S = 0.1
BPM_WINDOW_BEATS = 4


@dataclass(frozen=True)
class MissingReport:
    """Missingness accounting for one gaze series.

    `gap_histogram` maps run length in samples to the number of invalid
    runs of that length, counted before any repair.
    `interpolated_samples` is how many of those samples a repair pass
    filled (zero for a plain audit).
    """
    total_samples: int
    missing_samples: int
    gap_histogram: dict[int, int] = field(default_factory=dict)
    interpolated_samples: int = 0

    @property
    def missing_fraction(self) -> float:
        return self.missing_samples / self.total_samples if self.total_samples else 0.0

    def to_dict(self) -> dict:
        return {
            "total_samples": self.total_samples,
            "missing_samples": self.missing_samples,
            "missing_fraction": self.missing_fraction,
            "gap_histogram": {str(k): v for k, v in sorted(self.gap_histogram.items())},
            "interpolated_samples": self.interpolated_samples,
        }


@dataclass(frozen=True)
class BpmSample:
    t: float
    bpm: float


def extract_alive_segments(timeline: MatchTimeline, player_id: str) -> list[Interval]:
    """Half-open [spawn, death) intervals for `player_id`, one per spawn.

    A spawn without a death in the same round closes at the round end.
    """
    if player_id not in timeline.spawned_players():
        raise UnknownPlayer(f"player {player_id!r} never spawns in this timeline")
    segments: list[Interval] = []
    for rnd in timeline.rounds:
        spawn_t: float | None = None
        for e in timeline.events:
            if not (rnd.start_t <= e.t <= rnd.end_t):
                continue
            if e.kind is EventKind.SPAWN and e.subject == player_id:
                # A spawn on the shared boundary of back-to-back rounds
                # belongs to the round it opens, not the one it closes.
                if e.t < rnd.end_t:
                    spawn_t = e.t
            elif spawn_t is not None and (
                (e.kind is EventKind.DEATH and e.subject == player_id)
                or (e.kind is EventKind.KILL and e.object == player_id)
            ):
                if e.t > spawn_t:
                    segments.append(Interval(spawn_t, e.t))
                spawn_t = None
        if spawn_t is not None and rnd.end_t > spawn_t:
            segments.append(Interval(spawn_t, rnd.end_t))
    return segments


def slice_by_intervals(stream, intervals: list[Interval]):
    """Cut a stream into one segment per half-open interval.

    Accepts a `GazeSeries` (returns a list of `GazeSeries`) or a list
    of `InputSample` (returns a list of lists). A segment holds exactly
    the samples with start_t <= t < end_t, in source order.
    """
    if isinstance(stream, GazeSeries):
        items = stream.samples
        wrap = lambda kept: GazeSeries(samples=kept, nominal_rate_hz=stream.nominal_rate_hz,
                                       screen=stream.screen, player=stream.player)
    else:
        items = list(stream)
        wrap = lambda kept: kept
    segments = []
    for iv in intervals:
        segments.append(wrap([s for s in items if iv.start_t <= s.t < iv.end_t]))
    return segments


def _invalid_runs(samples: list[GazeSample]):
    """Yield (first_index, last_index) for each maximal run of invalid samples."""
    i = 0
    n = len(samples)
    while i < n:
        if samples[i].valid:
            i += 1
            continue
        j = i
        while j + 1 < n and not samples[j + 1].valid:
            j += 1
        yield i, j
        i = j + 1


def interpolate_gaps(segment: GazeSeries,
                     max_gap_s: float = MAX_GAP_S) -> tuple[GazeSeries, MissingReport]:
    """Linearly fill short tracker dropouts and account for the rest.

    A run of invalid samples is repaired only when it is bracketed by
    valid samples on both sides and spans strictly less than
    `max_gap_s` (measured first-invalid to last-invalid timestamp;
    at a 60 Hz cadence the default admits up to 6 consecutive misses).
    Longer or boundary-touching runs stay invalid. Valid input samples
    are never changed.
    """
    samples = list(segment.samples)
    histogram: dict[int, int] = {}
    missing = 0
    interpolated = 0
    for first, last in _invalid_runs(segment.samples):
        length = last - first + 1
        missing += length
        histogram[length] = histogram.get(length, 0) + 1
        if first == 0 or last == len(samples) - 1:
            continue
        if samples[last].t - samples[first].t >= max_gap_s:
            continue
        left = samples[first - 1]
        right = samples[last + 1]
        span = right.t - left.t
        for k in range(first, last + 1):
            t = samples[k].t
            w = (t - left.t) / span
            samples[k] = GazeSample(t, left.x + w * (right.x - left.x),
                                    left.y + w * (right.y - left.y), True)
        interpolated += length
    repaired = GazeSeries(samples=samples, nominal_rate_hz=segment.nominal_rate_hz,
                          screen=segment.screen, player=segment.player)
    report = MissingReport(total_samples=len(samples), missing_samples=missing,
                           gap_histogram=histogram, interpolated_samples=interpolated)
    return repaired, report


def missing_stats(series: GazeSeries) -> MissingReport:
    """Audit invalid samples and their run structure without repairing."""
    histogram: dict[int, int] = {}
    missing = 0
    for first, last in _invalid_runs(series.samples):
        length = last - first + 1
        missing += length
        histogram[length] = histogram.get(length, 0) + 1
    return MissingReport(total_samples=len(series.samples), missing_samples=missing,
                         gap_histogram=histogram, interpolated_samples=0)


def beats_to_bpm(beats: BeatSeries, window_beats: int = BPM_WINDOW_BEATS) -> list[BpmSample]:
    """Instantaneous pulse from a trailing window of beats.

    At each beat from index window_beats-1 on, the rate is
    ``60 * (window_beats - 1) / (t_i - t_{i-window_beats+1})``: the
    number of inter-beat intervals inside the window over its duration.
    """
    if window_beats < 2:
        raise ValueError(f"window_beats must be >= 2, got {window_beats}")
    times = beats.beat_times
    if len(times) < window_beats:
        raise InsufficientData(
            f"need at least {window_beats} beats, got {len(times)}")
    out: list[BpmSample] = []
    for i in range(window_beats - 1, len(times)):
        dt = times[i] - times[i - window_beats + 1]
        out.append(BpmSample(t=times[i], bpm=60.0 * (window_beats - 1) / dt))
    return out


def mean_bpm(samples: list[BpmSample]) -> float:
    if not samples:
        raise InsufficientData("no bpm samples")
    return math.fsum(s.bpm for s in samples) / len(samples)
