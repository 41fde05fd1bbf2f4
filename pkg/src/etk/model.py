"""Domain model for multi-sensor eSports session recordings.

Every stream (gaze, input, heart beats, game events) shares a single
session-relative clock measured in seconds, so downstream code never
juggles device-native units. All types are plain immutable values:
construct them, share them across workers, never mutate them.
Validation reports problems as `Violation` records instead of raising,
so a session can be inspected wholesale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

DEFAULT_SCREEN = (1920, 1080)
DEFAULT_GAZE_RATE_HZ = 60.0
DEFAULT_INPUT_PERIOD_S = 0.01

# A human pulse stays below 240 bpm, so consecutive beats are >0.25 s apart.
MIN_BEAT_INTERVAL_S = 0.25

# Sensor clocks may run slightly past the final round before capture stops.
TIME_SLACK_S = 1.0

KEY_ALPHABET = (
    "W", "A", "S", "D",
    "MOUSE1", "MOUSE2",
    "SPACE", "CTRL", "SHIFT",
    "R", "E", "Q",
    "1", "2", "3", "4", "5",
)
_KEY_RANK = {k: i for i, k in enumerate(KEY_ALPHABET)}


def canonical_key_order(keys) -> list[str]:
    """Sort key tokens into the declared alphabet order (unknowns last)."""
    return sorted(keys, key=lambda k: (_KEY_RANK.get(k, len(KEY_ALPHABET)), k))


class Cohort(str, Enum):
    PROFESSIONAL = "professional"
    AMATEUR = "amateur"


class EventKind(str, Enum):
    SPAWN = "spawn"
    DEATH = "death"
    KILL = "kill"
    WEAPON_FIRE = "weapon_fire"


@dataclass(frozen=True)
class PlayerMeta:
    """Identity of one recorded player; `n` is the 1-based dataset index."""

    player_id: str
    cohort: Cohort
    n: int


@dataclass(frozen=True)
class GazeSample:
    """One gaze observation; invalid samples carry NaN coordinates."""

    t: float
    x: float
    y: float
    valid: bool = True

    @staticmethod
    def missing(t: float) -> "GazeSample":
        return GazeSample(t, math.nan, math.nan, False)


@dataclass(frozen=True)
class GazeSeries:
    """Ordered gaze samples plus the capture geometry they live in."""

    samples: list[GazeSample]
    nominal_rate_hz: float = DEFAULT_GAZE_RATE_HZ
    screen: tuple[int, int] = DEFAULT_SCREEN
    player: PlayerMeta | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Columnar view: (t, x, y, valid) as numpy arrays."""
        n = len(self.samples)
        t = np.empty(n)
        x = np.empty(n)
        y = np.empty(n)
        valid = np.empty(n, dtype=bool)
        for i, s in enumerate(self.samples):
            t[i] = s.t
            x[i] = s.x
            y[i] = s.y
            valid[i] = s.valid
        return t, x, y, valid


@dataclass(frozen=True)
class InputSample:
    """Sampled keyboard/mouse state at a fixed cadence (not an event stream)."""

    t: float
    mouse_x: float
    mouse_y: float
    keys_down: frozenset[str] = frozenset()


@dataclass(frozen=True)
class BeatSeries:
    """Heart beat timestamps for one player."""

    beat_times: list[float]
    player: PlayerMeta | None = None

    def __len__(self) -> int:
        return len(self.beat_times)


@dataclass(frozen=True)
class Round:
    index: int
    start_t: float
    end_t: float

    @property
    def duration(self) -> float:
        return self.end_t - self.start_t

    def contains(self, t: float) -> bool:
        return self.start_t <= t <= self.end_t


@dataclass(frozen=True)
class GameEvent:
    """A demo-log event; `object` is set only for kills (the victim)."""

    t: float
    kind: EventKind
    subject: str
    object: str | None = None


@dataclass(frozen=True)
class MatchTimeline:
    """Ordered rounds and the in-round events extracted from the game demo."""

    rounds: list[Round]
    events: list[GameEvent]

    def round_containing(self, t: float) -> Round | None:
        for r in self.rounds:
            if r.contains(t):
                return r
        return None

    def spawned_players(self) -> set[str]:
        return {e.subject for e in self.events if e.kind is EventKind.SPAWN}


@dataclass(frozen=True)
class Interval:
    """Half-open time span [start_t, end_t)."""

    start_t: float
    end_t: float

    @property
    def duration(self) -> float:
        return self.end_t - self.start_t

    def contains(self, t: float) -> bool:
        return self.start_t <= t < self.end_t


@dataclass(frozen=True)
class Session:
    """All synchronized streams captured for one player in one match."""

    meta: PlayerMeta
    gaze: GazeSeries
    input: list[InputSample]
    timeline: MatchTimeline
    hrm: BeatSeries | None = None


@dataclass(frozen=True)
class Violation:
    """One invariant breach found by `validate_session`."""

    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


def _validate_meta(meta: PlayerMeta, out: list[Violation]) -> None:
    if not meta.player_id:
        out.append(Violation("meta.player_id", "player id is empty"))
    if meta.n < 1:
        out.append(Violation("meta.n", f"player index must be >= 1, got {meta.n}"))


def _validate_gaze(gaze: GazeSeries, out: list[Violation]) -> None:
    if gaze.nominal_rate_hz <= 0:
        out.append(Violation("gaze.nominal_rate_hz",
                             f"rate must be positive, got {gaze.nominal_rate_hz}"))
    w, h = gaze.screen
    if w <= 0 or h <= 0:
        out.append(Violation("gaze.screen", f"screen dims must be positive, got {gaze.screen}"))
    prev_t = -math.inf
    for i, s in enumerate(gaze.samples):
        loc = f"gaze.samples[{i}]"
        if s.t < 0:
            out.append(Violation(loc, f"negative timestamp {s.t}"))
        if s.t <= prev_t:
            out.append(Violation(loc, f"timestamp {s.t} not increasing (previous {prev_t})"))
        prev_t = s.t
        if s.valid:
            if not (math.isfinite(s.x) and math.isfinite(s.y)):
                out.append(Violation(loc, "valid sample with non-finite coordinates"))
            elif not (0 <= s.x <= w and 0 <= s.y <= h):
                out.append(Violation(loc, f"gaze point ({s.x}, {s.y}) outside {w}x{h} screen"))


def _validate_input(samples: list[InputSample], out: list[Violation]) -> None:
    alphabet = set(KEY_ALPHABET)
    prev_t = -math.inf
    for i, s in enumerate(samples):
        loc = f"input[{i}]"
        if s.t <= prev_t:
            out.append(Violation(loc, f"timestamp {s.t} not increasing (previous {prev_t})"))
        prev_t = s.t
        unknown = s.keys_down - alphabet
        if unknown:
            out.append(Violation(loc, f"unknown key tokens {sorted(unknown)}"))


def _validate_hrm(hrm: BeatSeries, out: list[Violation]) -> None:
    prev_t = -math.inf
    for i, t in enumerate(hrm.beat_times):
        loc = f"hrm.beat_times[{i}]"
        if t <= prev_t:
            out.append(Violation(loc, f"beat time {t} not increasing (previous {prev_t})"))
        elif i > 0 and t - prev_t <= MIN_BEAT_INTERVAL_S:
            out.append(Violation(loc, f"inter-beat interval {t - prev_t:.4f}s implies pulse above 240 bpm"))
        prev_t = t


def _validate_timeline(timeline: MatchTimeline, out: list[Violation]) -> None:
    if not timeline.rounds:
        out.append(Violation("timeline.rounds", "timeline has no rounds"))
    seen_idx: set[int] = set()
    prev_end = -math.inf
    prev_start = -math.inf
    for i, r in enumerate(timeline.rounds):
        loc = f"timeline.rounds[{i}]"
        if r.end_t <= r.start_t:
            out.append(Violation(loc, f"round {r.index} ends at {r.end_t} before it starts at {r.start_t}"))
        if r.start_t < prev_start:
            out.append(Violation(loc, f"round {r.index} out of order"))
        elif r.start_t < prev_end:
            out.append(Violation(loc, f"round {r.index} overlaps the previous round"))
        prev_start, prev_end = r.start_t, r.end_t
        if r.index in seen_idx:
            out.append(Violation(loc, f"duplicate round index {r.index}"))
        seen_idx.add(r.index)

    spawned = timeline.spawned_players()
    for i, e in enumerate(timeline.events):
        loc = f"timeline.events[{i}]"
        if timeline.round_containing(e.t) is None:
            out.append(Violation(loc, f"{e.kind.value} at t={e.t} lies outside every round"))
        if e.kind is EventKind.KILL:
            if e.object is None:
                out.append(Violation(loc, "kill event without a victim"))
            elif e.object not in spawned:
                out.append(Violation(loc, f"victim '{e.object}' never spawns"))
        elif e.object is not None:
            out.append(Violation(loc, f"{e.kind.value} event must not carry a second player"))
        if e.subject not in spawned:
            out.append(Violation(loc, f"player '{e.subject}' never spawns"))


def validate_session(session: Session) -> list[Violation]:
    """Check every invariant of a session; an empty list means valid.

    Pure and idempotent: the input is never mutated and repeated calls
    return identical lists.
    """
    out: list[Violation] = []
    _validate_meta(session.meta, out)
    _validate_gaze(session.gaze, out)
    _validate_input(session.input, out)
    if session.hrm is not None:
        _validate_hrm(session.hrm, out)
    _validate_timeline(session.timeline, out)

    if session.meta.player_id not in session.timeline.spawned_players():
        out.append(Violation("session", f"player '{session.meta.player_id}' never spawns in the timeline"))

    if session.timeline.rounds:
        horizon = max(r.end_t for r in session.timeline.rounds) + TIME_SLACK_S
        for name, last_t in (
            ("gaze", session.gaze.samples[-1].t if session.gaze.samples else None),
            ("input", session.input[-1].t if session.input else None),
            ("hrm", session.hrm.beat_times[-1] if session.hrm and session.hrm.beat_times else None),
        ):
            if last_t is not None and last_t > horizon:
                out.append(Violation(
                    f"session.{name}",
                    f"last sample at t={last_t} runs past the match end ({horizon - TIME_SLACK_S}) "
                    f"by more than {TIME_SLACK_S}s; streams do not share a time origin"))
    return out


def with_player(value, meta: PlayerMeta):
    """Return a copy of a gaze or beat series tagged with its player."""
    return replace(value, player=meta)
