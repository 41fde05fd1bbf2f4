"""Parser and writer behavior for the four capture formats."""
import io

import pytest
from hypothesis import given, settings, strategies as st

from etk.errors import AssemblyError, ParseError
from etk.ingest import (
    assemble_session,
    fmt_num,
    parse_demo_events,
    parse_gaze_log,
    parse_hrm_log,
    parse_input_log,
    read_session_dir,
    write_demo_events,
    write_gaze_csv,
    write_hrm_txt,
    write_input_csv,
    write_session_dir,
)
from etk.model import Cohort, EventKind, PlayerMeta


def test_parse_gaze_happy_path():
    text = b"t,x,y\n0.000,960,540\n0.016,970,545\n"
    series = parse_gaze_log(text)
    assert len(series) == 2
    assert series.samples[0].x == 960.0
    assert series.samples[1].t == 0.016


def test_parse_gaze_empty_pair_is_invalid_sample():
    series = parse_gaze_log(b"t,x,y\n0.000,960,540\n0.033,,\n")
    assert not series.samples[1].valid
    assert series.samples[1].t == 0.033


def test_parse_gaze_malformed_number_names_line():
    with pytest.raises(ParseError) as exc:
        parse_gaze_log(b"t,x,y\nabc,1,2\n")
    assert exc.value.line == 2
    assert exc.value.kind == "gaze"


def test_parse_gaze_decreasing_timestamp_rejected():
    with pytest.raises(ParseError) as exc:
        parse_gaze_log(b"t,x,y\n0.5,1,1\n0.4,1,1\n")
    assert "increasing" in exc.value.message


def test_parse_gaze_duplicate_timestamp_rejected():
    with pytest.raises(ParseError):
        parse_gaze_log(b"t,x,y\n0.5,1,1\n0.5,2,2\n")


def test_parse_gaze_wrong_header_rejected():
    with pytest.raises(ParseError):
        parse_gaze_log(b"time,x,y\n0,1,2\n")


def test_parse_gaze_comments_and_blanks_skipped():
    series = parse_gaze_log(b"# capture v1\nt,x,y\n\n0.0,1,2\n# trailing\n")
    assert len(series) == 1


def test_parse_gaze_byte_offset_points_at_row():
    data = b"t,x,y\n0.0,1,2\nbroken\n"
    with pytest.raises(ParseError) as exc:
        parse_gaze_log(data)
    assert data[exc.value.byte_offset:].startswith(b"broken")


def test_parse_input_happy_path():
    samples = parse_input_log(b"t,mouse_x,mouse_y,keys\n0.010,500,300,W+MOUSE1\n0.020,500,300,\n")
    assert samples[0].keys_down == frozenset({"W", "MOUSE1"})
    assert samples[1].keys_down == frozenset()


def test_parse_input_unknown_key_rejected():
    with pytest.raises(ParseError) as exc:
        parse_input_log(b"t,mouse_x,mouse_y,keys\n0.030,500,300,W+XYZZY\n")
    assert "XYZZY" in exc.value.message


def test_parse_hrm_happy_path():
    beats = parse_hrm_log(b"1.0\n1.5\n2.0\n")
    assert beats.beat_times == [1.0, 1.5, 2.0]


def test_parse_hrm_non_increasing_rejected():
    with pytest.raises(ParseError):
        parse_hrm_log(b"1.0\n0.9\n")


def test_parse_hrm_impossible_pulse_rejected():
    with pytest.raises(ParseError) as exc:
        parse_hrm_log(b"1.0\n1.1\n")
    assert "240" in exc.value.message


def test_parse_demo_happy_path():
    text = (b"round_start 0 1\nspawn 0 p1\ndeath 25 p1\nround_end 40 1\n")
    timeline = parse_demo_events(text)
    assert len(timeline.rounds) == 1
    assert [e.kind for e in timeline.events] == [EventKind.SPAWN, EventKind.DEATH]


def test_parse_demo_twelve_rounds():
    lines = []
    for i in range(12):
        lines.append(f"round_start {i * 40} {i + 1}")
        lines.append(f"spawn {i * 40} p1")
        lines.append(f"round_end {(i + 1) * 40} {i + 1}")
    timeline = parse_demo_events("\n".join(lines).encode())
    assert len(timeline.rounds) == 12


def test_parse_demo_event_outside_round_rejected():
    text = b"round_start 0 1\nspawn 0 p1\nround_end 40 1\ndeath 50 p1\n"
    with pytest.raises(ParseError) as exc:
        parse_demo_events(text)
    assert "outside" in exc.value.message


def test_parse_demo_unknown_kind_rejected():
    with pytest.raises(ParseError):
        parse_demo_events(b"round_start 0 1\nteleport 5 p1\nround_end 40 1\n")


def test_parse_demo_unspawned_player_rejected():
    text = b"round_start 0 1\nspawn 0 p1\nkill 5 p1 ghost\nround_end 40 1\n"
    with pytest.raises(ParseError) as exc:
        parse_demo_events(text)
    assert "ghost" in exc.value.message


def test_parse_demo_overlapping_rounds_rejected():
    text = b"round_start 0 1\nspawn 1 p1\nround_end 40 1\nround_start 30 2\nround_end 70 2\n"
    with pytest.raises(ParseError):
        parse_demo_events(text)


def test_parse_demo_unclosed_round_rejected():
    with pytest.raises(ParseError) as exc:
        parse_demo_events(b"round_start 0 1\nspawn 0 p1\n")
    assert "never ends" in str(exc.value)


def test_assemble_session_rejects_clock_offset(tiny_session):
    bad_gaze = parse_gaze_log(b"t,x,y\n0.0,1,1\n500.0,2,2\n")
    with pytest.raises(AssemblyError) as exc:
        assemble_session(tiny_session.meta, bad_gaze, [], tiny_session.timeline, None)
    assert exc.value.violations


def test_assemble_session_hrm_optional(tiny_session):
    session = assemble_session(tiny_session.meta, tiny_session.gaze,
                               tiny_session.input, tiny_session.timeline, None)
    assert session.hrm is None


def test_write_parse_round_trip_structural(tiny_session):
    buf = io.BytesIO()
    write_gaze_csv(tiny_session.gaze, buf)
    reparsed = parse_gaze_log(buf.getvalue())
    assert reparsed.samples == tiny_session.gaze.samples

    buf = io.BytesIO()
    write_input_csv(tiny_session.input, buf)
    assert parse_input_log(buf.getvalue()) == tiny_session.input

    buf = io.BytesIO()
    write_hrm_txt(tiny_session.hrm, buf)
    assert parse_hrm_log(buf.getvalue()).beat_times == tiny_session.hrm.beat_times

    buf = io.BytesIO()
    write_demo_events(tiny_session.timeline, buf)
    reparsed = parse_demo_events(buf.getvalue())
    assert reparsed.rounds == tiny_session.timeline.rounds
    assert reparsed.events == sorted(
        tiny_session.timeline.events,
        key=lambda e: (e.t, {"spawn": 2, "weapon_fire": 3, "kill": 4, "death": 5}[e.kind.value],
                       e.subject, e.object or ""))


def test_session_dir_round_trip(tmp_path, tiny_session):
    d = write_session_dir(tiny_session, tmp_path / "s1")
    session = read_session_dir(d)
    assert session.meta == tiny_session.meta
    assert session.gaze.samples == tiny_session.gaze.samples
    assert session.input == tiny_session.input
    assert session.hrm.beat_times == tiny_session.hrm.beat_times


def test_read_session_dir_missing_files(tmp_path):
    (tmp_path / "incomplete").mkdir()
    with pytest.raises(AssemblyError) as exc:
        read_session_dir(tmp_path / "incomplete")
    assert "missing" in str(exc.value)


def test_fmt_num_integers_have_no_decimal_point():
    assert fmt_num(40.0) == "40"
    assert fmt_num(-3.0) == "-3"
    assert fmt_num(0.5) == "0.5"


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False))
def test_fmt_num_round_trips_exactly(value):
    assert float(fmt_num(value)) == value


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1e6, allow_nan=False),
                          st.floats(0, 1920, allow_nan=False),
                          st.floats(0, 1080, allow_nan=False)),
                min_size=0, max_size=30))
def test_gaze_write_parse_write_is_byte_identical(rows):
    rows = sorted({r[0]: r for r in rows}.values())
    from conftest import make_gaze
    series = make_gaze(rows)
    first = io.BytesIO()
    write_gaze_csv(series, first)
    second = io.BytesIO()
    write_gaze_csv(parse_gaze_log(first.getvalue()), second)
    assert first.getvalue() == second.getvalue()
