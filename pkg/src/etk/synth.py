"""Seeded synthetic session generator.

Sessions are sampled from cohort profiles: a zone-level Markov dwell
model for gaze (persist in the current zone, else redraw from the
stationary propensity vector), two-state run-length processes for the
held-key patterns, a random walk for the mouse, and jittered
inter-beat intervals for the heart-rate channel. Everything downstream
observes only zone occupancy and key-state fractions, so this level of
fidelity is exactly enough to exercise the full pipeline.

All randomness flows from one `Rng` seed through per-channel child
streams; the same seed always yields byte-identical capture files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidProfile
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
    MatchTimeline,
    PlayerMeta,
    Round,
    Session,
)
from .rng import Rng
from .zones import default_zone_model

DEFAULT_INPUT_RATE_HZ = 100.0

# Shared (cohort-independent) input process settings. The forward-key
# base process and the standalone-click process are identical across
# cohorts so that only the profile-controlled channels differ.
W_BASE_RATE = 0.30
W_BASE_MEAN_HOLD_S = 0.8
CLICK_RATE = 0.05
CLICK_MEAN_HOLD_S = 0.15
AD_MEAN_HOLD_S = 0.4
WM1_MEAN_HOLD_S = 0.6

MISSING_RUN_MEAN_SAMPLES = 3.0
DEATH_PROB = 0.25
BPM_JITTER = 0.08

_PROFILE_FIELDS = ("zone_dwell", "dwell_persistence", "gaze_noise_px", "missing_rate",
                   "ad_hold_rate", "w_m1_rate", "bpm_base")


@dataclass(frozen=True)
class CohortProfile:
    """Generation targets for one cohort.

    `zone_dwell` is the stationary zone propensity vector (the chain
    redraws from it, so it is also the long-run occupancy);
    `dwell_persistence` is the per-sample probability of staying put.
    `ad_hold_rate` and `w_m1_rate` are target fractions of time with
    A-or-D held and with W and MOUSE1 held together.
    """
    zone_dwell: tuple[float, ...]
    dwell_persistence: float
    gaze_noise_px: float
    missing_rate: float
    ad_hold_rate: float
    w_m1_rate: float
    bpm_base: float

    def __post_init__(self):
        object.__setattr__(self, "zone_dwell", tuple(float(p) for p in self.zone_dwell))
        dwell = self.zone_dwell
        if not dwell:
            raise InvalidProfile("zone_dwell is empty")
        if any(p < 0.0 for p in dwell):
            raise InvalidProfile(f"zone_dwell has negative entries: {dwell}")
        if abs(sum(dwell) - 1.0) > 1e-9:
            raise InvalidProfile(f"zone_dwell sums to {sum(dwell)}, expected 1")
        if not (0.0 <= self.dwell_persistence < 1.0):
            raise InvalidProfile(f"dwell_persistence {self.dwell_persistence} outside [0, 1)")
        if self.gaze_noise_px < 0.0:
            raise InvalidProfile(f"gaze_noise_px {self.gaze_noise_px} is negative")
        for name in ("missing_rate", "ad_hold_rate", "w_m1_rate"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise InvalidProfile(f"{name} {v} outside [0, 1]")
        if not (30.0 <= self.bpm_base <= 220.0):
            raise InvalidProfile(f"bpm_base {self.bpm_base} outside [30, 220]")

    def to_dict(self) -> dict:
        return {
            "zone_dwell": list(self.zone_dwell),
            "dwell_persistence": self.dwell_persistence,
            "gaze_noise_px": self.gaze_noise_px,
            "missing_rate": self.missing_rate,
            "ad_hold_rate": self.ad_hold_rate,
            "w_m1_rate": self.w_m1_rate,
            "bpm_base": self.bpm_base,
        }

    @staticmethod
    def from_dict(raw: dict) -> "CohortProfile":
        missing = [f for f in _PROFILE_FIELDS if f not in raw]
        if missing:
            raise InvalidProfile(f"profile is missing fields: {', '.join(missing)}")
        try:
            return CohortProfile(
                zone_dwell=tuple(float(p) for p in raw["zone_dwell"]),
                dwell_persistence=float(raw["dwell_persistence"]),
                gaze_noise_px=float(raw["gaze_noise_px"]),
                missing_rate=float(raw["missing_rate"]),
                ad_hold_rate=float(raw["ad_hold_rate"]),
                w_m1_rate=float(raw["w_m1_rate"]),
                bpm_base=float(raw["bpm_base"]),
            )
        except (TypeError, ValueError) as e:
            raise InvalidProfile(f"malformed profile field: {e}") from None


@dataclass(frozen=True)
class Scenario:
    """Match structure to generate: `rounds` back-to-back rounds."""
    rounds: int = 12
    round_s: float = 40.0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.round_s <= 0.0:
            raise ValueError(f"round_s must be positive, got {self.round_s}")

    @property
    def total_s(self) -> float:
        return self.rounds * self.round_s


def default_profiles() -> tuple[CohortProfile, CohortProfile]:
    """(professional, amateur) profile pair used when none is supplied.

    Professionals concentrate on the central crosshair zone and rarely
    glance at the radar; amateurs spread their gaze, check the radar
    more, strafe less, and fire while running forward far more often.
    """
    professional = CohortProfile(
        zone_dwell=(0.62, 0.04, 0.04, 0.05, 0.04, 0.05, 0.04, 0.06, 0.06),
        dwell_persistence=0.97,
        gaze_noise_px=45.0,
        missing_rate=0.04,
        ad_hold_rate=0.32,
        w_m1_rate=0.04,
        bpm_base=78.0,
    )
    amateur = CohortProfile(
        zone_dwell=(0.44, 0.13, 0.05, 0.06, 0.05, 0.06, 0.05, 0.08, 0.08),
        dwell_persistence=0.97,
        gaze_noise_px=60.0,
        missing_rate=0.04,
        ad_hold_rate=0.18,
        w_m1_rate=0.12,
        bpm_base=92.0,
    )
    return professional, amateur


def load_profiles(path) -> dict[Cohort, CohortProfile]:
    """Read cohort profiles from JSON: {"professional": {...}, "amateur": {...}}."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidProfile(f"cannot read profile JSON: {e}") from None
    if not isinstance(raw, dict) or not raw:
        raise InvalidProfile("profile JSON must be a non-empty object keyed by cohort")
    out: dict[Cohort, CohortProfile] = {}
    for key, value in raw.items():
        try:
            cohort = Cohort(key)
        except ValueError:
            raise InvalidProfile(f"unknown cohort {key!r}") from None
        if not isinstance(value, dict):
            raise InvalidProfile(f"profile for {key!r} must be an object")
        out[cohort] = CohortProfile.from_dict(value)
    return out


def _two_state_runs(rng: Rng, n: int, on_fraction: float,
                    mean_on_samples: float) -> list[tuple[int, int]]:
    """ON runs [start, end) of a two-state renewal process over n slots.

    Run lengths are geometric with the given ON mean; the OFF mean is
    set so the long-run ON fraction equals `on_fraction`.
    """
    if on_fraction <= 0.0 or n == 0:
        return []
    if on_fraction >= 1.0:
        return [(0, n)]
    mean_off = mean_on_samples * (1.0 - on_fraction) / on_fraction
    p_on = min(1.0, 1.0 / mean_on_samples)
    p_off = min(1.0, 1.0 / mean_off)
    runs: list[tuple[int, int]] = []
    pos = 0
    state_on = rng.random() < on_fraction
    while pos < n:
        length = rng.geometric(p_on if state_on else p_off)
        if state_on:
            runs.append((pos, min(pos + length, n)))
        pos += length
        state_on = not state_on
    return runs


def _runs_to_mask(runs: list[tuple[int, int]], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    for start, end in runs:
        mask[start:end] = True
    return mask


def _missing_mask(rng: Rng, n: int, missing_rate: float) -> np.ndarray:
    """Invalid-sample mask with geometric runs averaging a few samples."""
    if missing_rate <= 0.0 or n == 0:
        return np.zeros(n, dtype=bool)
    if missing_rate >= 1.0:
        return np.ones(n, dtype=bool)
    runs = _two_state_runs(rng, n, missing_rate, MISSING_RUN_MEAN_SAMPLES)
    return _runs_to_mask(runs, n)


def _generate_timeline(rng: Rng, scenario: Scenario, player_id: str) -> MatchTimeline:
    """Rounds plus spawn/kill/death events for the player and two bots."""
    rounds: list[Round] = []
    events: list[GameEvent] = []
    for i in range(scenario.rounds):
        start = i * scenario.round_s
        end = (i + 1) * scenario.round_s
        rounds.append(Round(index=i + 1, start_t=start, end_t=end))
        events.append(GameEvent(start, EventKind.SPAWN, player_id))
        events.append(GameEvent(start, EventKind.SPAWN, "bot_a"))
        events.append(GameEvent(start, EventKind.SPAWN, "bot_b"))
        if rng.random() < DEATH_PROB:
            death_t = start + rng.uniform(0.6, 0.95) * scenario.round_s
            events.append(GameEvent(death_t, EventKind.KILL, "bot_a", player_id))
            events.append(GameEvent(death_t, EventKind.DEATH, player_id))
        else:
            kill_t = start + rng.uniform(0.3, 0.8) * scenario.round_s
            fire_t = max(start, kill_t - 0.1)
            events.append(GameEvent(fire_t, EventKind.WEAPON_FIRE, player_id))
            events.append(GameEvent(kill_t, EventKind.KILL, player_id, "bot_a"))
            events.append(GameEvent(kill_t, EventKind.DEATH, "bot_a"))
    return MatchTimeline(rounds=rounds, events=events)


def _generate_gaze(rng_zone: Rng, rng_noise: Rng, rng_missing: Rng,
                   profile: CohortProfile, total_s: float, rate_hz: float,
                   screen: tuple[int, int]) -> GazeSeries:
    n = int(round(total_s * rate_hz))
    times = np.arange(n) / rate_hz

    # Markov zone chain: redraw when the persistence coin fails.
    redraw = rng_zone.random_block(n) >= profile.dwell_persistence
    redraw[0] = True
    cum = np.cumsum(profile.zone_dwell)
    draws = np.searchsorted(cum, rng_zone.random_block(n), side="right")
    draws = np.minimum(draws, len(cum) - 1)
    last_redraw = np.maximum.accumulate(np.where(redraw, np.arange(n), -1))
    chain = draws[last_redraw]

    centers = default_zone_model().centers_array()
    if len(profile.zone_dwell) != len(centers):
        raise InvalidProfile(
            f"zone_dwell has {len(profile.zone_dwell)} entries, zone model has {len(centers)}")
    w, h = screen
    x = centers[chain, 0] + profile.gaze_noise_px * rng_noise.normal_block(n)
    y = centers[chain, 1] + profile.gaze_noise_px * rng_noise.normal_block(n)
    x = np.round(np.clip(x, 0.0, w), 2)
    y = np.round(np.clip(y, 0.0, h), 2)

    invalid = _missing_mask(rng_missing, n, profile.missing_rate)
    samples = [
        GazeSample.missing(float(times[i])) if invalid[i]
        else GazeSample(float(times[i]), float(x[i]), float(y[i]), True)
        for i in range(n)
    ]
    return GazeSeries(samples=samples, nominal_rate_hz=rate_hz, screen=screen)


def _generate_input(rng_keys: Rng, rng_mouse: Rng, profile: CohortProfile,
                    total_s: float, rate_hz: float,
                    screen: tuple[int, int]) -> list[InputSample]:
    n = int(round(total_s * rate_hz))
    times = np.arange(n) / rate_hz

    ad_runs = _two_state_runs(rng_keys, n, profile.ad_hold_rate, AD_MEAN_HOLD_S * rate_hz)
    a = np.zeros(n, dtype=bool)
    d = np.zeros(n, dtype=bool)
    for start, end in ad_runs:
        if rng_keys.random() < 0.5:
            a[start:end] = True
        else:
            d[start:end] = True

    overlay = _runs_to_mask(
        _two_state_runs(rng_keys, n, profile.w_m1_rate, WM1_MEAN_HOLD_S * rate_hz), n)
    w_base = _runs_to_mask(
        _two_state_runs(rng_keys, n, W_BASE_RATE, W_BASE_MEAN_HOLD_S * rate_hz), n)
    clicks = _runs_to_mask(
        _two_state_runs(rng_keys, n, CLICK_RATE, CLICK_MEAN_HOLD_S * rate_hz), n)

    w = w_base | overlay
    # Standalone clicks never coincide with W, so W+MOUSE1 time is
    # exactly the overlay process and tracks w_m1_rate.
    m1 = overlay | (clicks & ~w)

    combo = (a.astype(np.int8) + 2 * d.astype(np.int8)
             + 4 * w.astype(np.int8) + 8 * m1.astype(np.int8))
    combo_sets = {}
    for code in np.unique(combo):
        keys = []
        if code & 1:
            keys.append("A")
        if code & 2:
            keys.append("D")
        if code & 4:
            keys.append("W")
        if code & 8:
            keys.append("MOUSE1")
        combo_sets[int(code)] = frozenset(keys)

    width, height = screen
    mx = np.clip(960.0 + np.cumsum(rng_mouse.normal_block(n) * 6.0), 0.0, width)
    my = np.clip(540.0 + np.cumsum(rng_mouse.normal_block(n) * 4.0), 0.0, height)
    mx = np.round(mx, 2)
    my = np.round(my, 2)

    return [
        InputSample(float(times[i]), float(mx[i]), float(my[i]), combo_sets[int(combo[i])])
        for i in range(n)
    ]


def _generate_beats(rng: Rng, profile: CohortProfile, total_s: float) -> BeatSeries:
    ibi = 60.0 / profile.bpm_base
    beats: list[float] = []
    t = ibi * (0.5 + 0.5 * rng.random())
    while t < total_s - 0.1:
        beats.append(round(t, 3))
        t += ibi * (1.0 + BPM_JITTER * (rng.random() - 0.5))
    return BeatSeries(beat_times=beats)


def generate_session(profile: CohortProfile, scenario: Scenario, seed: int,
                     meta: PlayerMeta, screen: tuple[int, int] = DEFAULT_SCREEN,
                     gaze_rate_hz: float = DEFAULT_GAZE_RATE_HZ,
                     input_rate_hz: float = DEFAULT_INPUT_RATE_HZ) -> Session:
    """One full synthetic session, deterministic in (profile, scenario, seed)."""
    base = Rng(seed)
    r_timeline = Rng(base.child_seed(0))
    r_zone = Rng(base.child_seed(1))
    r_noise = Rng(base.child_seed(2))
    r_missing = Rng(base.child_seed(3))
    r_keys = Rng(base.child_seed(4))
    r_mouse = Rng(base.child_seed(5))
    r_hrm = Rng(base.child_seed(6))

    timeline = _generate_timeline(r_timeline, scenario, meta.player_id)
    gaze = _generate_gaze(r_zone, r_noise, r_missing, profile,
                          scenario.total_s, gaze_rate_hz, screen)
    input_samples = _generate_input(r_keys, r_mouse, profile,
                                    scenario.total_s, input_rate_hz, screen)
    hrm = _generate_beats(r_hrm, profile, scenario.total_s)

    from .ingest import assemble_session
    return assemble_session(meta, gaze, input_samples, timeline, hrm)
