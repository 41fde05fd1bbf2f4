"""Screen zones: models, gaze-to-zone assignment, rolling-window statistics.

A zone model is an ordered set of K labeled screen points. Gaze samples
are matched to the nearest center (Euclidean distance, 1-based index),
turning the gaze track into a categorical sequence. Rolling windows
over that sequence yield per-window zone occupancy distributions, and
their arithmetic mean summarizes a whole segment or session.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, EmptyInput, ParseError
from .model import GazeSeries
from .rng import Rng

DEFAULT_WINDOW_S = 15.0
DEFAULT_HOP_S = 1.0
DEFAULT_CELL_PX = 10
_WINDOW_EDGE_TOL = 1e-9
_LLOYD_TOL_PX = 1e-6
_LLOYD_MAX_ITER = 100

_DEFAULT_CENTERS = (
    (960.0, 540.0),
    (345.0, 815.0),
    (310.0, 180.0),
    (1205.0, 530.0),
    (1610.0, 180.0),
    (715.0, 530.0),
    (1575.0, 815.0),
    (960.0, 260.0),
    (960.0, 900.0),
)
_DEFAULT_LABELS = (
    "Aiming Cross-hair",
    "Radar Area",
    "Armor & Health Bar",
    "Right Area of Sight",
    "Weapon & Ammo Panel",
    "Left Area of Sight",
    "Kill & Death Log",
    "Bottom Area of Sight",
    "Timer & Players Panel",
)


@dataclass(frozen=True)
class ZoneModel:
    """Ordered labeled zone centers; zone k is centers[k-1] (1-based outside)."""
    centers: tuple[tuple[float, float], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.centers) < 1:
            raise ValueError("zone model needs at least one center")
        if len(self.labels) != len(self.centers):
            raise ValueError(f"{len(self.labels)} labels for {len(self.centers)} centers")
        if len(set(self.centers)) != len(self.centers):
            raise ValueError("zone centers must be pairwise distinct")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("zone labels must be unique")

    @property
    def k(self) -> int:
        return len(self.centers)

    def centers_array(self) -> np.ndarray:
        return np.asarray(self.centers, dtype=float)


def default_zone_model() -> ZoneModel:
    """The nine-zone 1920x1080 model used throughout."""
    return ZoneModel(centers=_DEFAULT_CENTERS, labels=_DEFAULT_LABELS)


@dataclass(frozen=True, eq=False)
class ZoneSequence:
    """Categorical gaze track: zone index (1..k) per retained sample.

    `span` is the enclosing segment's [start, end) in seconds; window
    placement anchors there rather than at the first sample, so sparse
    segments still window consistently. When absent, the sample extent
    is used.
    """
    times: np.ndarray
    zones: np.ndarray
    k: int
    span: tuple[float, float] | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        zones = np.asarray(self.zones, dtype=np.int64)
        if times.shape != zones.shape or times.ndim != 1:
            raise ValueError("times and zones must be parallel 1-D arrays")
        if len(zones) and (zones.min() < 1 or zones.max() > self.k):
            raise ValueError(f"zone indices must lie in 1..{self.k}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "zones", zones)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class WindowDistribution:
    """Zone occupancy fractions for one rolling window."""
    window_index: int
    window_start: float
    probs: tuple[float, ...]


@dataclass(frozen=True)
class AveragedDistribution:
    """Arithmetic mean of a set of window distributions."""
    probs: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class Heatmap:
    """2-D gaze count grid; grid[row][col] covers a cell_px square."""
    grid: np.ndarray
    cell_px: int
    total: int

    def normalized(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros_like(self.grid, dtype=float)
        return self.grid / float(self.total)


def assign_zone(point: tuple[float, float], model: ZoneModel) -> int:
    """1-based index of the Euclidean-nearest center; ties take the lowest index."""
    x, y = point
    centers = model.centers_array()
    d2 = (centers[:, 0] - x) ** 2 + (centers[:, 1] - y) ** 2
    return int(np.argmin(d2)) + 1


def assign_zones(segment: GazeSeries, model: ZoneModel,
                 span: tuple[float, float] | None = None) -> ZoneSequence:
    """Categorize every valid sample of a gaze segment."""
    t, x, y, valid = segment.to_arrays()
    t, x, y = t[valid], x[valid], y[valid]
    if len(t) == 0:
        return ZoneSequence(times=t, zones=np.zeros(0, dtype=np.int64), k=model.k, span=span)
    centers = model.centers_array()
    d2 = (x[:, None] - centers[None, :, 0]) ** 2 + (y[:, None] - centers[None, :, 1]) ** 2
    return ZoneSequence(times=t, zones=np.argmin(d2, axis=1) + 1, k=model.k, span=span)


def _nearest(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def lloyd_step(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    """One Lloyd update.

    Returns the re-estimated centers and the within-cluster sum of
    squared distances of the assignment made against the input centers.
    Clusters that attract no points keep their current center.
    """
    assign = _nearest(points, centers)
    sse = 0.0
    new_centers = centers.copy()
    for j in range(len(centers)):
        mask = assign == j
        if mask.any():
            cluster = points[mask]
            new_centers[j] = cluster.mean(axis=0)
            sse += float(((cluster - centers[j]) ** 2).sum())
    return new_centers, sse


def _kmeanspp_seeds(points: np.ndarray, k: int, rng: Rng) -> np.ndarray:
    """k-means++ seeding: first center uniform, then d^2-weighted picks."""
    seeds = [points[rng.randrange(len(points))]]
    while len(seeds) < k:
        d2 = ((points[:, None, :] - np.asarray(seeds)[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        total = float(d2.sum())
        if total <= 0.0:
            raise DegenerateInput(f"fewer than {k} distinct points")
        target = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), target, side="right"))
        seeds.append(points[min(idx, len(points) - 1)])
    return np.asarray(seeds, dtype=float)


def fit_zones(points, k: int, mode: str = "fixed", seeds=None, seed: int = 0) -> ZoneModel:
    """Build a zone model from gaze points.

    mode "fixed" returns `seeds` verbatim; "lloyd" runs Lloyd
    iterations from `seeds` (k-means++ seeded by `seed` when absent)
    until the largest center movement drops below 1e-6 px or 100
    iterations pass; "farthest_first" runs greedy k-center growth from
    the point nearest the centroid. Non-fixed modes need at least k
    distinct points.
    """
    if mode == "fixed":
        if seeds is None:
            raise ValueError("mode 'fixed' requires seeds")
        centers = [tuple(float(c) for c in s) for s in seeds]
        return ZoneModel(centers=tuple(centers),
                         labels=tuple(f"Zone {i + 1}" for i in range(len(centers))))

    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError("points must be a non-empty list of (x, y) pairs")
    distinct = len(np.unique(pts, axis=0))
    if distinct < k:
        raise DegenerateInput(f"{distinct} distinct points cannot support k={k}")

    if mode == "lloyd":
        if seeds is not None:
            centers = np.asarray(seeds, dtype=float)
        else:
            centers = _kmeanspp_seeds(pts, k, Rng(seed))
        for _ in range(_LLOYD_MAX_ITER):
            new_centers, _ = lloyd_step(pts, centers)
            movement = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
            centers = new_centers
            if movement < _LLOYD_TOL_PX:
                break
    elif mode == "farthest_first":
        centroid = pts.mean(axis=0)
        first = int(np.argmin(((pts - centroid) ** 2).sum(axis=1)))
        chosen = [pts[first]]
        for _ in range(1, k):
            d2 = ((pts[:, None, :] - np.asarray(chosen)[None, :, :]) ** 2).sum(axis=2).min(axis=1)
            chosen.append(pts[int(np.argmax(d2))])
        centers = np.asarray(chosen, dtype=float)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    dedup: list[tuple[float, float]] = []
    for c in centers:
        pt = (float(c[0]), float(c[1]))
        if pt in dedup:
            raise DegenerateInput("clustering collapsed two centers onto one point")
        dedup.append(pt)
    return ZoneModel(centers=tuple(dedup),
                     labels=tuple(f"Zone {i + 1}" for i in range(len(dedup))))


def window_distributions(seq: ZoneSequence, window_s: float = DEFAULT_WINDOW_S,
                         hop_s: float = DEFAULT_HOP_S) -> list[WindowDistribution]:
    """Rolling-window zone occupancy distributions over one segment.

    Windows are [start, start+window_s) anchored at the segment span
    start and advanced by hop_s; only windows lying fully inside the
    span are emitted, and windows holding no samples are skipped.
    `window_index` counts hops, so window_start = span_start +
    index*hop_s even when earlier windows were skipped.
    """
    if window_s <= 0 or hop_s <= 0:
        raise ValueError("window_s and hop_s must be positive")
    if len(seq) == 0 and seq.span is None:
        return []
    span_start, span_end = seq.span if seq.span is not None else (
        float(seq.times[0]), float(seq.times[-1]))
    out: list[WindowDistribution] = []
    tau = 0
    while True:
        start = span_start + tau * hop_s
        if start + window_s > span_end + _WINDOW_EDGE_TOL:
            break
        lo = int(np.searchsorted(seq.times, start, side="left"))
        hi = int(np.searchsorted(seq.times, start + window_s, side="left"))
        if hi > lo:
            counts = np.bincount(seq.zones[lo:hi], minlength=seq.k + 1)[1:]
            probs = counts / float(hi - lo)
            out.append(WindowDistribution(window_index=tau, window_start=start,
                                          probs=tuple(float(p) for p in probs)))
        tau += 1
    return out


def average_distribution(windows: list[WindowDistribution]) -> AveragedDistribution:
    """Eq.-style session summary: the arithmetic mean of window probs."""
    if not windows:
        raise EmptyInput("cannot average zero windows")
    k = len(windows[0].probs)
    for w in windows:
        if len(w.probs) != k:
            raise DimensionMismatch(f"window has {len(w.probs)} zones, expected {k}")
    mat = np.asarray([w.probs for w in windows], dtype=float)
    return AveragedDistribution(probs=tuple(float(p) for p in mat.mean(axis=0)))


def zone_shares(seq: ZoneSequence) -> tuple[float, ...]:
    """Fraction of samples per zone over a whole sequence."""
    if len(seq) == 0:
        raise EmptyInput("cannot compute shares of an empty sequence")
    counts = np.bincount(seq.zones, minlength=seq.k + 1)[1:]
    return tuple(float(c) / len(seq) for c in counts)


def heatmap_grid(points, screen: tuple[int, int], cell_px: int = DEFAULT_CELL_PX) -> Heatmap:
    """Count points into a cell_px grid; right/bottom edges clamp inward."""
    if cell_px < 1:
        raise ValueError("cell_px must be >= 1")
    width, height = screen
    cols = max(1, math.ceil(width / cell_px))
    rows = max(1, math.ceil(height / cell_px))
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    grid = np.zeros((rows, cols), dtype=np.int64)
    if len(pts):
        cx = np.clip((pts[:, 0] // cell_px).astype(int), 0, cols - 1)
        cy = np.clip((pts[:, 1] // cell_px).astype(int), 0, rows - 1)
        np.add.at(grid, (cy, cx), 1)
    return Heatmap(grid=grid, cell_px=cell_px, total=len(pts))


# ---------------------------------------------------------------------------
# Exports

def write_zone_model_csv(model: ZoneModel, path) -> None:
    from .ingest import _write_text, fmt_num
    lines = ["k,label,x,y"]
    for i, ((x, y), label) in enumerate(zip(model.centers, model.labels), start=1):
        lines.append(f"{i},{label},{fmt_num(x)},{fmt_num(y)}")
    _write_text(path, "\n".join(lines) + "\n")


def read_zone_model_csv(path) -> ZoneModel:
    from .ingest import _iter_lines
    centers: list[tuple[float, float]] = []
    labels: list[str] = []
    saw_header = False
    for lineno, offset, text in _iter_lines(path, "zones"):
        if not saw_header:
            if text != "k,label,x,y":
                raise ParseError("zones", lineno, offset,
                                 f"expected header 'k,label,x,y', got {text!r}")
            saw_header = True
            continue
        parts = text.split(",")
        if len(parts) != 4:
            raise ParseError("zones", lineno, offset, f"expected 4 columns, got {len(parts)}")
        try:
            idx = int(parts[0])
            x = float(parts[2])
            y = float(parts[3])
        except ValueError as e:
            raise ParseError("zones", lineno, offset, str(e)) from None
        if idx != len(centers) + 1:
            raise ParseError("zones", lineno, offset,
                             f"zone index {idx} out of order (expected {len(centers) + 1})")
        centers.append((x, y))
        labels.append(parts[1])
    if not saw_header:
        raise ParseError("zones", 1, 0, "empty file: missing header")
    if not centers:
        raise ParseError("zones", 1, 0, "zone model has no centers")
    return ZoneModel(centers=tuple(centers), labels=tuple(labels))


def write_heatmap_csv(hm: Heatmap, path) -> None:
    from .ingest import _write_text
    lines = [",".join(str(int(v)) for v in row) for row in hm.grid]
    _write_text(path, "\n".join(lines) + "\n")


def write_heatmap_pgm(hm: Heatmap, path) -> None:
    """P2 (plain) PGM, counts max-normalized onto 0..255."""
    from .ingest import _write_text
    rows, cols = hm.grid.shape
    peak = int(hm.grid.max()) if hm.total else 0
    if peak > 0:
        scaled = np.rint(hm.grid * (255.0 / peak)).astype(int)
    else:
        scaled = np.zeros_like(hm.grid, dtype=int)
    lines = [f"P2", f"{cols} {rows}", "255"]
    for row in scaled:
        line = ""
        for v in row:
            tok = str(int(v))
            if line and len(line) + 1 + len(tok) > 70:
                lines.append(line)
                line = tok
            else:
                line = tok if not line else f"{line} {tok}"
        lines.append(line)
    _write_text(path, "\n".join(lines) + "\n")
