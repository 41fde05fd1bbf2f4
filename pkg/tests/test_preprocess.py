"""Alive segments, gap interpolation, missingness, and BPM derivation."""
import math

import pytest

from etk.errors import InsufficientData, UnknownPlayer
from etk.model import BeatSeries, EventKind, GameEvent, Interval
from etk.preprocess import (
    beats_to_bpm,
    extract_alive_segments,
    interpolate_gaps,
    missing_stats,
    slice_by_intervals,
)
from conftest import make_gaze, make_timeline


def timeline_one_round(events):
    return make_timeline([(0.0, 40.0)], events)


class TestAliveSegments:
    def test_death_closes_segment(self):
        tl = timeline_one_round([GameEvent(0.0, EventKind.SPAWN, "p1"),
                                 GameEvent(25.0, EventKind.DEATH, "p1")])
        assert extract_alive_segments(tl, "p1") == [Interval(0.0, 25.0)]

    def test_survived_round_closes_at_round_end(self):
        tl = timeline_one_round([GameEvent(0.0, EventKind.SPAWN, "p1")])
        assert extract_alive_segments(tl, "p1") == [Interval(0.0, 40.0)]

    def test_kill_event_also_closes_victim_segment(self):
        tl = timeline_one_round([GameEvent(0.0, EventKind.SPAWN, "p1"),
                                 GameEvent(0.0, EventKind.SPAWN, "e"),
                                 GameEvent(30.0, EventKind.KILL, "e", "p1")])
        assert extract_alive_segments(tl, "p1") == [Interval(0.0, 30.0)]

    def test_two_rounds_two_segments(self):
        tl = make_timeline(
            [(0.0, 40.0), (40.0, 80.0)],
            [GameEvent(0.0, EventKind.SPAWN, "p1"),
             GameEvent(25.0, EventKind.DEATH, "p1"),
             GameEvent(40.0, EventKind.SPAWN, "p1")],
        )
        assert extract_alive_segments(tl, "p1") == [Interval(0.0, 25.0),
                                                    Interval(40.0, 80.0)]

    def test_boundary_spawn_belongs_to_the_round_it_opens(self):
        # Back-to-back rounds share t=40; the spawn there must not be
        # swallowed by round 1.
        tl = make_timeline(
            [(0.0, 40.0), (40.0, 80.0)],
            [GameEvent(0.0, EventKind.SPAWN, "p1"),
             GameEvent(40.0, EventKind.SPAWN, "p1")],
        )
        segments = extract_alive_segments(tl, "p1")
        assert segments == [Interval(0.0, 40.0), Interval(40.0, 80.0)]

    def test_unknown_player_raises(self):
        tl = timeline_one_round([GameEvent(0.0, EventKind.SPAWN, "p1")])
        with pytest.raises(UnknownPlayer):
            extract_alive_segments(tl, "nobody")


class TestSliceByIntervals:
    def test_half_open_membership(self):
        series = make_gaze([(float(i), 1.0, 1.0) for i in range(10)])
        segments = slice_by_intervals(series, [Interval(2.0, 5.0)])
        assert [s.t for s in segments[0].samples] == [2.0, 3.0, 4.0]

    def test_one_segment_per_interval(self):
        series = make_gaze([(float(i), 1.0, 1.0) for i in range(10)])
        segments = slice_by_intervals(series, [Interval(0.0, 3.0), Interval(7.0, 9.0)])
        assert len(segments) == 2
        assert len(segments[0].samples) == 3
        assert len(segments[1].samples) == 2

    def test_empty_interval_yields_empty_segment(self):
        series = make_gaze([(0.0, 1.0, 1.0)])
        segments = slice_by_intervals(series, [Interval(5.0, 6.0)])
        assert segments[0].samples == []

    def test_partition_loses_and_duplicates_nothing(self):
        series = make_gaze([(i * 0.5, 1.0, 1.0) for i in range(20)])
        cuts = [Interval(0.0, 2.5), Interval(2.5, 6.0), Interval(6.0, 10.0)]
        segments = slice_by_intervals(series, cuts)
        rejoined = [s.t for seg in segments for s in seg.samples]
        assert rejoined == [s.t for s in series.samples]

    def test_input_samples_supported(self):
        from etk.model import InputSample
        samples = [InputSample(float(i), 0.0, 0.0, frozenset()) for i in range(5)]
        segments = slice_by_intervals(samples, [Interval(1.0, 3.0)])
        assert [s.t for s in segments[0]] == [1.0, 2.0]


class TestInterpolateGaps:
    def test_short_gap_filled_on_the_analytic_line(self):
        points = [(0.0, 0.0, 0.0), (0.01, None, None), (0.02, None, None),
                  (0.05, 10.0, 20.0)]
        repaired, report = interpolate_gaps(make_gaze(points))
        for s in repaired.samples:
            assert s.valid
        assert repaired.samples[1].x == pytest.approx(10.0 * 0.01 / 0.05, abs=1e-12)
        assert repaired.samples[2].y == pytest.approx(20.0 * 0.02 / 0.05, abs=1e-12)
        assert report.interpolated_samples == 2
        assert report.missing_samples == 2

    def test_long_gap_stays_invalid(self):
        points = [(0.0, 0.0, 0.0)]
        points += [(0.05 + i * 0.05, None, None) for i in range(4)]  # 0.15 s span
        points += [(0.30, 10.0, 10.0)]
        repaired, report = interpolate_gaps(make_gaze(points))
        assert sum(not s.valid for s in repaired.samples) == 4
        assert report.interpolated_samples == 0
        assert report.gap_histogram == {4: 1}

    def test_boundary_gaps_never_extrapolated(self):
        points = [(0.0, None, None), (0.01, 1.0, 1.0), (0.02, None, None)]
        repaired, report = interpolate_gaps(make_gaze(points))
        assert not repaired.samples[0].valid
        assert not repaired.samples[2].valid
        assert report.interpolated_samples == 0

    def test_six_consecutive_misses_fill_at_60hz_but_seven_do_not(self):
        def gap_series(k):
            points = [(0.0, 0.0, 0.0)]
            points += [((i + 1) / 60.0, None, None) for i in range(k)]
            points += [((k + 1) / 60.0, 60.0, 60.0)]
            return make_gaze(points)

        repaired6, report6 = interpolate_gaps(gap_series(6))
        assert all(s.valid for s in repaired6.samples)
        assert report6.interpolated_samples == 6

        repaired7, report7 = interpolate_gaps(gap_series(7))
        assert sum(not s.valid for s in repaired7.samples) == 7
        assert report7.interpolated_samples == 0

    def test_valid_samples_never_change(self):
        points = [(0.0, 3.0, 4.0), (0.01, None, None), (0.02, 5.0, 6.0)]
        source = make_gaze(points)
        repaired, _ = interpolate_gaps(source)
        assert repaired.samples[0] == source.samples[0]
        assert repaired.samples[2] == source.samples[2]

    def test_interpolated_values_inside_bracketing_box(self):
        points = [(0.0, 10.0, 100.0), (0.02, None, None), (0.04, 20.0, 50.0)]
        repaired, _ = interpolate_gaps(make_gaze(points))
        mid = repaired.samples[1]
        assert 10.0 <= mid.x <= 20.0
        assert 50.0 <= mid.y <= 100.0

    def test_missing_accounting_balances(self):
        points = [(0.0, 1.0, 1.0), (0.01, None, None), (0.02, 1.0, 1.0),
                  (0.5, None, None), (0.75, None, None), (1.0, None, None),
                  (1.5, 2.0, 2.0)]
        source = make_gaze(points)
        before = missing_stats(source)
        repaired, report = interpolate_gaps(source)
        after = missing_stats(repaired)
        assert before.missing_fraction == (
            after.missing_fraction + report.interpolated_samples / report.total_samples)


class TestMissingStats:
    def test_four_percent(self):
        points = [(i * 0.01, None, None) if i < 4 else (i * 0.01, 1.0, 1.0)
                  for i in range(100)]
        report = missing_stats(make_gaze(points))
        assert report.missing_fraction == 0.04
        assert report.gap_histogram == {4: 1}

    def test_all_valid_and_all_invalid(self):
        assert missing_stats(make_gaze([(0.0, 1.0, 1.0)])).missing_fraction == 0.0
        assert missing_stats(make_gaze([(0.0, None, None)])).missing_fraction == 1.0

    def test_empty_series(self):
        assert missing_stats(make_gaze([])).missing_fraction == 0.0


class TestBeatsToBpm:
    def test_constant_half_second_interval_gives_120(self):
        beats = BeatSeries(beat_times=[0.5 * (i + 1) for i in range(20)])
        samples = beats_to_bpm(beats)
        assert len(samples) == 17
        assert all(s.bpm == 120.0 for s in samples)

    def test_one_second_interval_gives_60(self):
        beats = BeatSeries(beat_times=[float(i + 1) for i in range(6)])
        assert all(s.bpm == 60.0 for s in beats_to_bpm(beats))

    def test_too_few_beats_raises(self):
        with pytest.raises(InsufficientData):
            beats_to_bpm(BeatSeries(beat_times=[1.0, 1.5, 2.0]))

    def test_sample_timestamps_are_window_ends(self):
        beats = BeatSeries(beat_times=[1.0, 1.5, 2.0, 2.5, 3.0])
        samples = beats_to_bpm(beats)
        assert [s.t for s in samples] == [2.5, 3.0]
