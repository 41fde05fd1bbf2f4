"""Parsers and writers for the four session capture formats.

Formats (all UTF-8, `#`-prefixed comment lines ignored):

* ``gaze.csv``    — header ``t,x,y``; one row per gaze sample; an empty
  ``x,y`` pair marks a sample the tracker lost.
* ``input.csv``   — header ``t,mouse_x,mouse_y,keys``; ``keys`` is a
  ``+``-joined subset of the declared key alphabet, empty when idle.
* ``hrm.txt``     — one heart-beat timestamp per line.
* ``demo.events`` — space-separated game events:
  ``round_start <t> <index>``, ``round_end <t> <index>``,
  ``spawn <t> <player>``, ``death <t> <player>``,
  ``kill <t> <killer> <victim>``, ``weapon_fire <t> <player>``.

Each parser streams its input a line at a time and reports failures as
`ParseError` with the 1-based line number and byte offset. Writers emit
a canonical form (shortest round-tripping numbers, keys in alphabet
order, events sorted by time) so that write -> parse -> write is
byte-identical.
"""
from __future__ import annotations

import io
import json
import math
import os
from pathlib import Path

from .errors import AssemblyError, ParseError
from .model import (
    BeatSeries,
    Cohort,
    DEFAULT_GAZE_RATE_HZ,
    DEFAULT_SCREEN,
    EventKind,
    GameEvent,
    GazeSample,
    GazeSeries,
    InputSample,
    KEY_ALPHABET,
    MatchTimeline,
    MIN_BEAT_INTERVAL_S,
    PlayerMeta,
    Round,
    Session,
    canonical_key_order,
    validate_session,
    with_player,
)

GAZE_FILE = "gaze.csv"
INPUT_FILE = "input.csv"
HRM_FILE = "hrm.txt"
DEMO_FILE = "demo.events"
META_FILE = "meta.json"

GAZE_HEADER = "t,x,y"
INPUT_HEADER = "t,mouse_x,mouse_y,keys"

_KEY_SET = set(KEY_ALPHABET)

# Canonical ordering of demo lines sharing a timestamp.
_EVENT_RANK = {
    "round_end": 0,
    "round_start": 1,
    "spawn": 2,
    "weapon_fire": 3,
    "kill": 4,
    "death": 5,
}
_KIND_RANK = {
    EventKind.SPAWN: 2,
    EventKind.WEAPON_FIRE: 3,
    EventKind.KILL: 4,
    EventKind.DEATH: 5,
}


def fmt_num(v: float) -> str:
    """Shortest decimal string that parses back to exactly `v`."""
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _iter_lines(source, kind: str):
    """Yield (lineno, byte_offset, stripped_text) skipping blanks and comments."""
    if isinstance(source, (str, os.PathLike)):
        stream = open(source, "rb")
        close = True
    elif isinstance(source, (bytes, bytearray)):
        stream = io.BytesIO(source)
        close = True
    else:
        stream = source
        close = False
    try:
        offset = 0
        lineno = 0
        for raw in stream:
            lineno += 1
            line_offset = offset
            offset += len(raw)
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise ParseError(kind, lineno, line_offset, f"invalid UTF-8: {e}") from None
            text = text.rstrip("\r\n")
            if not text or text.lstrip().startswith("#"):
                continue
            yield lineno, line_offset, text
    finally:
        if close:
            stream.close()


def _parse_float(tok: str, kind: str, lineno: int, offset: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(kind, lineno, offset, f"malformed {what} {tok!r}") from None
    if not math.isfinite(v):
        raise ParseError(kind, lineno, offset, f"non-finite {what} {tok!r}")
    return v


def _parse_int(tok: str, kind: str, lineno: int, offset: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(kind, lineno, offset, f"malformed {what} {tok!r}") from None


def parse_gaze_log(source, screen: tuple[int, int] = DEFAULT_SCREEN,
                   rate_hz: float = DEFAULT_GAZE_RATE_HZ) -> GazeSeries:
    """Parse a gaze CSV into a `GazeSeries`.

    Rows with an empty coordinate pair become valid=False samples that
    keep their timestamp, so missingness stays measurable from the file.
    """
    kind = "gaze"
    samples: list[GazeSample] = []
    prev_t = -math.inf
    saw_header = False
    for lineno, offset, text in _iter_lines(source, kind):
        if not saw_header:
            if text != GAZE_HEADER:
                raise ParseError(kind, lineno, offset,
                                 f"expected header {GAZE_HEADER!r}, got {text!r}")
            saw_header = True
            continue
        parts = text.split(",")
        if len(parts) != 3:
            raise ParseError(kind, lineno, offset, f"expected 3 columns, got {len(parts)}")
        t = _parse_float(parts[0], kind, lineno, offset, "timestamp")
        if t <= prev_t:
            raise ParseError(kind, lineno, offset,
                             f"timestamp {t} is not strictly increasing (previous {prev_t})")
        prev_t = t
        if parts[1] == "" or parts[2] == "":
            samples.append(GazeSample.missing(t))
        else:
            x = _parse_float(parts[1], kind, lineno, offset, "x coordinate")
            y = _parse_float(parts[2], kind, lineno, offset, "y coordinate")
            samples.append(GazeSample(t, x, y, True))
    if not saw_header:
        raise ParseError(kind, 1, 0, "empty file: missing header")
    return GazeSeries(samples=samples, nominal_rate_hz=rate_hz, screen=screen)


def parse_input_log(source) -> list[InputSample]:
    """Parse an input CSV into sampled key/mouse state snapshots."""
    kind = "input"
    samples: list[InputSample] = []
    prev_t = -math.inf
    saw_header = False
    for lineno, offset, text in _iter_lines(source, kind):
        if not saw_header:
            if text != INPUT_HEADER:
                raise ParseError(kind, lineno, offset,
                                 f"expected header {INPUT_HEADER!r}, got {text!r}")
            saw_header = True
            continue
        parts = text.split(",")
        if len(parts) != 4:
            raise ParseError(kind, lineno, offset, f"expected 4 columns, got {len(parts)}")
        t = _parse_float(parts[0], kind, lineno, offset, "timestamp")
        if t <= prev_t:
            raise ParseError(kind, lineno, offset,
                             f"timestamp {t} is not strictly increasing (previous {prev_t})")
        prev_t = t
        mx = _parse_float(parts[1], kind, lineno, offset, "mouse_x")
        my = _parse_float(parts[2], kind, lineno, offset, "mouse_y")
        keys: frozenset[str] = frozenset()
        if parts[3]:
            toks = parts[3].split("+")
            for tok in toks:
                if tok not in _KEY_SET:
                    raise ParseError(kind, lineno, offset, f"unknown key token {tok!r}")
            keys = frozenset(toks)
        samples.append(InputSample(t, mx, my, keys))
    if not saw_header:
        raise ParseError(kind, 1, 0, "empty file: missing header")
    return samples


def parse_hrm_log(source) -> BeatSeries:
    """Parse heart-beat timestamps, one per line."""
    kind = "hrm"
    beats: list[float] = []
    prev_t = -math.inf
    for lineno, offset, text in _iter_lines(source, kind):
        t = _parse_float(text.strip(), kind, lineno, offset, "beat time")
        if t <= prev_t:
            raise ParseError(kind, lineno, offset,
                             f"beat time {t} is not increasing (previous {prev_t})")
        if beats and t - prev_t <= MIN_BEAT_INTERVAL_S:
            raise ParseError(kind, lineno, offset,
                             f"inter-beat interval {t - prev_t:.4f}s implies pulse above 240 bpm")
        prev_t = t
        beats.append(t)
    return BeatSeries(beat_times=beats)


def parse_demo_events(source) -> MatchTimeline:
    """Parse a demo event export into an ordered, validated timeline."""
    kind = "demo"
    rounds: list[Round] = []
    open_round: tuple[int, float, int, int] | None = None  # (index, start_t, lineno, offset)
    events: list[tuple[int, int, GameEvent]] = []
    seen_idx: set[int] = set()

    for lineno, offset, text in _iter_lines(source, kind):
        parts = text.split()
        if len(parts) < 2:
            raise ParseError(kind, lineno, offset, f"malformed event line {text!r}")
        tag = parts[0]
        t = _parse_float(parts[1], kind, lineno, offset, "timestamp")

        if tag == "round_start":
            if len(parts) != 3:
                raise ParseError(kind, lineno, offset, "round_start takes <t> <index>")
            idx = _parse_int(parts[2], kind, lineno, offset, "round index")
            if open_round is not None:
                raise ParseError(kind, lineno, offset,
                                 f"round {idx} starts while round {open_round[0]} is still open")
            if idx in seen_idx:
                raise ParseError(kind, lineno, offset, f"duplicate round index {idx}")
            if rounds and t < rounds[-1].end_t:
                raise ParseError(kind, lineno, offset,
                                 f"round {idx} starts at {t}, overlapping the previous round")
            open_round = (idx, t, lineno, offset)
            seen_idx.add(idx)
        elif tag == "round_end":
            if len(parts) != 3:
                raise ParseError(kind, lineno, offset, "round_end takes <t> <index>")
            idx = _parse_int(parts[2], kind, lineno, offset, "round index")
            if open_round is None or open_round[0] != idx:
                raise ParseError(kind, lineno, offset, f"round_end {idx} without matching round_start")
            if t <= open_round[1]:
                raise ParseError(kind, lineno, offset,
                                 f"round {idx} ends at {t}, before its start {open_round[1]}")
            rounds.append(Round(index=idx, start_t=open_round[1], end_t=t))
            open_round = None
        elif tag in ("spawn", "death", "weapon_fire"):
            if len(parts) != 3:
                raise ParseError(kind, lineno, offset, f"{tag} takes <t> <player>")
            events.append((lineno, offset, GameEvent(t, EventKind(tag), parts[2])))
        elif tag == "kill":
            if len(parts) != 4:
                raise ParseError(kind, lineno, offset, "kill takes <t> <killer> <victim>")
            events.append((lineno, offset, GameEvent(t, EventKind.KILL, parts[2], parts[3])))
        else:
            raise ParseError(kind, lineno, offset, f"unknown event kind {tag!r}")

    if open_round is not None:
        raise ParseError(kind, open_round[2], open_round[3],
                         f"round {open_round[0]} never ends")

    timeline_probe = MatchTimeline(rounds=rounds, events=[])
    spawned = {e.subject for _, _, e in events if e.kind is EventKind.SPAWN}
    for lineno, offset, e in events:
        if timeline_probe.round_containing(e.t) is None:
            raise ParseError(kind, lineno, offset,
                             f"{e.kind.value} at t={fmt_num(e.t)} lies outside every round")
        if e.subject not in spawned:
            raise ParseError(kind, lineno, offset, f"player {e.subject!r} never spawns")
        if e.object is not None and e.object not in spawned:
            raise ParseError(kind, lineno, offset, f"player {e.object!r} never spawns")

    ordered = sorted(
        (e for _, _, e in events),
        key=lambda e: (e.t, _KIND_RANK[e.kind], e.subject, e.object or ""),
    )
    return MatchTimeline(rounds=sorted(rounds, key=lambda r: r.start_t), events=ordered)


def assemble_session(meta: PlayerMeta, gaze: GazeSeries, input_samples: list[InputSample],
                     timeline: MatchTimeline, hrm: BeatSeries | None = None) -> Session:
    """Bind parsed streams into a `Session`, refusing invalid combinations."""
    session = Session(
        meta=meta,
        gaze=with_player(gaze, meta),
        input=list(input_samples),
        timeline=timeline,
        hrm=with_player(hrm, meta) if hrm is not None else None,
    )
    violations = validate_session(session)
    if violations:
        raise AssemblyError(violations)
    return session


# ---------------------------------------------------------------------------
# Writers (canonical form)

def write_gaze_csv(series: GazeSeries, path) -> None:
    lines = [GAZE_HEADER]
    for s in series.samples:
        if s.valid:
            lines.append(f"{fmt_num(s.t)},{fmt_num(s.x)},{fmt_num(s.y)}")
        else:
            lines.append(f"{fmt_num(s.t)},,")
    _write_text(path, "\n".join(lines) + "\n")


def write_input_csv(samples: list[InputSample], path) -> None:
    lines = [INPUT_HEADER]
    for s in samples:
        keys = "+".join(canonical_key_order(s.keys_down))
        lines.append(f"{fmt_num(s.t)},{fmt_num(s.mouse_x)},{fmt_num(s.mouse_y)},{keys}")
    _write_text(path, "\n".join(lines) + "\n")


def write_hrm_txt(beats: BeatSeries, path) -> None:
    _write_text(path, "".join(fmt_num(t) + "\n" for t in beats.beat_times))


def _demo_lines(timeline: MatchTimeline) -> list[str]:
    items: list[tuple[float, int, str]] = []
    for r in timeline.rounds:
        items.append((r.start_t, _EVENT_RANK["round_start"],
                      f"round_start {fmt_num(r.start_t)} {r.index}"))
        items.append((r.end_t, _EVENT_RANK["round_end"],
                      f"round_end {fmt_num(r.end_t)} {r.index}"))
    for e in timeline.events:
        if e.kind is EventKind.KILL:
            text = f"kill {fmt_num(e.t)} {e.subject} {e.object}"
        else:
            text = f"{e.kind.value} {fmt_num(e.t)} {e.subject}"
        items.append((e.t, _KIND_RANK[e.kind], text))
    items.sort(key=lambda it: (it[0], it[1], it[2]))
    return [text for _, _, text in items]


def write_demo_events(timeline: MatchTimeline, path) -> None:
    _write_text(path, "\n".join(_demo_lines(timeline)) + "\n")


def _write_text(path, text: str) -> None:
    if hasattr(path, "write"):
        data = text.encode("utf-8")
        try:
            path.write(data)
        except TypeError:
            path.write(text)
        return
    with open(path, "wb") as f:
        f.write(text.encode("utf-8"))


# ---------------------------------------------------------------------------
# Session directories

def write_meta_json(session: Session, path) -> None:
    meta = {
        "player_id": session.meta.player_id,
        "cohort": session.meta.cohort.value,
        "n": session.meta.n,
        "screen": list(session.gaze.screen),
        "gaze_rate_hz": session.gaze.nominal_rate_hz,
    }
    _write_text(path, json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_meta_json(path) -> tuple[PlayerMeta, tuple[int, int], float]:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    try:
        meta = PlayerMeta(player_id=str(raw["player_id"]),
                          cohort=Cohort(raw["cohort"]),
                          n=int(raw["n"]))
    except (KeyError, ValueError) as e:
        raise AssemblyError([], f"bad {META_FILE}: {e}") from None
    screen = tuple(raw.get("screen", DEFAULT_SCREEN))
    rate = float(raw.get("gaze_rate_hz", DEFAULT_GAZE_RATE_HZ))
    return meta, (int(screen[0]), int(screen[1])), rate


def write_session_dir(session: Session, directory) -> Path:
    """Write all capture files for one session into `directory`."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_meta_json(session, d / META_FILE)
    write_gaze_csv(session.gaze, d / GAZE_FILE)
    write_input_csv(session.input, d / INPUT_FILE)
    if session.hrm is not None:
        write_hrm_txt(session.hrm, d / HRM_FILE)
    write_demo_events(session.timeline, d / DEMO_FILE)
    return d


def read_session_dir(directory) -> Session:
    """Parse a session directory (hrm.txt optional) into a validated Session."""
    d = Path(directory)
    missing = [name for name in (META_FILE, GAZE_FILE, INPUT_FILE, DEMO_FILE)
               if not (d / name).is_file()]
    if missing:
        raise AssemblyError([], f"session directory {d} is missing {', '.join(missing)}")
    meta, screen, rate = read_meta_json(d / META_FILE)
    gaze = parse_gaze_log(d / GAZE_FILE, screen=screen, rate_hz=rate)
    input_samples = parse_input_log(d / INPUT_FILE)
    hrm = parse_hrm_log(d / HRM_FILE) if (d / HRM_FILE).is_file() else None
    timeline = parse_demo_events(d / DEMO_FILE)
    return assemble_session(meta, gaze, input_samples, timeline, hrm)
