"""Command-line entry point: `etk ingest | analyze | synth`.

Every run is reproducible: outputs are plain CSV/PGM/JSON written
atomically, a `manifest.json` records the effective configuration,
seed, and SHA-256 digests of the inputs, and rerunning with the same
inputs produces a byte-identical output tree.

Exit codes: 0 success, 2 parse/profile error, 3 assembly/validation
error, 4 degenerate analysis input. `ETK_LOG` sets log verbosity.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    AssemblyError,
    DegenerateData,
    EtkError,
    InsufficientData,
    InvalidProfile,
    ParseError,
)
from .ingest import META_FILE, read_session_dir, write_session_dir, fmt_num
from .input_features import (
    MOUSE1,
    FeatureRow,
    click_stats,
    fraction_held,
    mouse_kinematics,
    write_feature_table,
)
from .model import Cohort, PlayerMeta, Session
from .numerics import fit_kde, fit_pca, kde_curve, project, silverman_bandwidth
from .preprocess import (
    beats_to_bpm,
    extract_alive_segments,
    interpolate_gaps,
    mean_bpm,
    missing_stats,
    slice_by_intervals,
)
from .rng import Rng
from .synth import CohortProfile, Scenario, default_profiles, generate_session, load_profiles
from .zones import (
    ZoneModel,
    assign_zones,
    average_distribution,
    default_zone_model,
    heatmap_grid,
    read_zone_model_csv,
    window_distributions,
    write_heatmap_csv,
    write_heatmap_pgm,
    write_zone_model_csv,
)

log = logging.getLogger("etk")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ASSEMBLY = 3
EXIT_DEGENERATE = 4

KDE_FEATURES = ("ad_hold_fraction", "w_m1_fraction")


def _configure_logging() -> None:
    level = os.environ.get("ETK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def _atomic_write(path: Path, writer) -> None:
    """Run `writer(tmp_path)` then rename over the target."""
    tmp = Path(str(path) + ".tmp")
    writer(tmp)
    os.replace(tmp, path)


def _atomic_write_text(path: Path, text: str) -> None:
    _atomic_write(path, lambda tmp: tmp.write_bytes(text.encode("utf-8")))


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _dir_digests(directory: Path) -> dict[str, str]:
    return {p.name: _sha256(p) for p in sorted(directory.iterdir()) if p.is_file()}


def _expand_session_dirs(paths: list[str]) -> list[Path]:
    """Resolve arguments to session directories.

    A path holding a meta.json is a session; otherwise its immediate
    children holding one are used. Anything else is an assembly error.
    """
    out: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if (p / META_FILE).is_file():
            out.append(p)
            continue
        if p.is_dir():
            children = sorted(c for c in p.iterdir() if (c / META_FILE).is_file())
            if children:
                out.extend(children)
                continue
        raise AssemblyError([], f"{p} is not a session directory and contains none")
    return out


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: dict) -> None:
    manifest = {"command": command, "config": config, "inputs": inputs}
    _atomic_write_text(out_dir / "manifest.json",
                       json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# ingest

def _session_summary(session: Session) -> dict:
    return {
        "player_id": session.meta.player_id,
        "cohort": session.meta.cohort.value,
        "rounds": len(session.timeline.rounds),
        "events": len(session.timeline.events),
        "gaze_samples": len(session.gaze),
        "input_samples": len(session.input),
        "beats": len(session.hrm) if session.hrm is not None else 0,
        "missing_fraction": missing_stats(session.gaze).missing_fraction,
    }


def cmd_ingest(args) -> int:
    dirs = _expand_session_dirs(args.paths)
    summaries = []
    for d in dirs:
        session = read_session_dir(d)
        log.info("ingested %s: %d rounds", d, len(session.timeline.rounds))
        summaries.append({"directory": str(d), **_session_summary(session)})
    payload = json.dumps(summaries, indent=2, sort_keys=True)
    print(payload)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write_text(out_dir / "summary.json", payload + "\n")
        _write_manifest(out_dir, "ingest", {"paths": [str(d) for d in dirs]},
                        {str(d): _dir_digests(d) for d in dirs})
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze

@dataclass
class _SessionDerived:
    """Everything one session contributes to the pooled artifacts."""
    meta: PlayerMeta
    missing: dict
    window_rows: list[tuple]      # (round, window_index, window_start, probs)
    averaged: tuple[float, ...] | None
    feature_rows: list[FeatureRow]
    heat_points: list[tuple[float, float]]


def _derive_session(directory: Path, model: ZoneModel,
                    window_s: float, hop_s: float) -> _SessionDerived:
    session = read_session_dir(directory)
    meta = session.meta
    alive = extract_alive_segments(session.timeline, meta.player_id)

    audit = missing_stats(session.gaze)
    gaze_segments = slice_by_intervals(session.gaze, alive)
    input_segments = slice_by_intervals(session.input, alive)

    interpolated = 0
    window_rows: list[tuple] = []
    all_windows = []
    heat_points: list[tuple[float, float]] = []
    feature_rows: list[FeatureRow] = []

    for interval, gaze_seg, input_seg in zip(alive, gaze_segments, input_segments):
        rnd = session.timeline.round_containing(interval.start_t)
        round_index = rnd.index if rnd is not None else 0
        repaired, report = interpolate_gaps(gaze_seg)
        interpolated += report.interpolated_samples

        seq = assign_zones(repaired, model, span=(interval.start_t, interval.end_t))
        windows = window_distributions(seq, window_s=window_s, hop_s=hop_s)
        all_windows.extend(windows)
        for wd in windows:
            window_rows.append((round_index, wd.window_index, wd.window_start, wd.probs))

        for s in repaired.samples:
            if s.valid:
                heat_points.append((s.x, s.y))

        cohort = meta.cohort.value
        segment_alive = [interval]
        try:
            feature_rows.append(FeatureRow(meta.player_id, cohort, round_index,
                                           "ad_hold_fraction",
                                           fraction_held(input_seg, {"A", "D"},
                                                         segment_alive, mode="any")))
            feature_rows.append(FeatureRow(meta.player_id, cohort, round_index,
                                           "w_m1_fraction",
                                           fraction_held(input_seg, {"W", MOUSE1},
                                                         segment_alive, mode="all")))
            stats = click_stats(input_seg, MOUSE1, segment_alive)
            feature_rows.append(FeatureRow(meta.player_id, cohort, round_index,
                                           "clicks_per_minute", stats.clicks_per_minute))
            feature_rows.append(FeatureRow(meta.player_id, cohort, round_index,
                                           "click_mean_duration_s", stats.mean_duration_s))
            kin = mouse_kinematics(input_seg, segment_alive)
            feature_rows.append(FeatureRow(meta.player_id, cohort, round_index,
                                           "mouse_path_mean_px", kin.path_mean_px))
            feature_rows.append(FeatureRow(meta.player_id, cohort, round_index,
                                           "mouse_vel_mean_px_s", kin.vel_mean_px_s))
        except (EtkError, ValueError) as e:
            log.warning("%s round %d: skipping input features (%s)",
                        meta.player_id, round_index, e)

    if session.hrm is not None:
        try:
            feature_rows.append(FeatureRow(meta.player_id, meta.cohort.value, 0,
                                           "bpm_mean", mean_bpm(beats_to_bpm(session.hrm))))
        except InsufficientData as e:
            log.warning("%s: skipping bpm (%s)", meta.player_id, e)

    averaged = None
    if all_windows:
        averaged = average_distribution(all_windows).probs
    else:
        log.warning("%s: no rolling windows (segments shorter than %gs)",
                    meta.player_id, window_s)

    missing = dict(audit.to_dict(), interpolated_samples=interpolated)
    return _SessionDerived(meta=meta, missing=missing, window_rows=window_rows,
                           averaged=averaged, feature_rows=feature_rows,
                           heat_points=heat_points)


def _write_windows_csv(path: Path, derived: list[_SessionDerived], k: int) -> None:
    header = "player_id,cohort,round,window_index,window_start," + \
        ",".join(f"p{i}" for i in range(1, k + 1))
    lines = [header]
    for d in derived:
        for round_index, idx, start, probs in d.window_rows:
            probs_text = ",".join(fmt_num(p) for p in probs)
            lines.append(f"{d.meta.player_id},{d.meta.cohort.value},{round_index},"
                         f"{idx},{fmt_num(start)},{probs_text}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _write_averages_csv(path: Path, derived: list[_SessionDerived], k: int) -> None:
    header = "player_id,cohort," + ",".join(f"p{i}" for i in range(1, k + 1))
    lines = [header]
    for d in derived:
        if d.averaged is None:
            continue
        lines.append(f"{d.meta.player_id},{d.meta.cohort.value},"
                     + ",".join(fmt_num(p) for p in d.averaged))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _write_pca_csvs(out_dir: Path, derived: list[_SessionDerived], k: int) -> None:
    vectors = []
    for d in derived:
        for _, _, _, probs in d.window_rows:
            vectors.append(probs)
    model = fit_pca(vectors)

    cols = ",".join(f"v{i}" for i in range(1, k + 1))
    lines = [f"row,{cols}"]
    lines.append("mean," + ",".join(fmt_num(v) for v in model.mean))
    for i, comp in enumerate(model.components, start=1):
        lines.append(f"component_{i}," + ",".join(fmt_num(v) for v in comp))
    lines.append("explained_variance," + ",".join(fmt_num(v) for v in model.explained_variance))
    lines.append("explained_ratio," + ",".join(fmt_num(v) for v in model.explained_ratio))
    _atomic_write_text(out_dir / "pca_model.csv", "\n".join(lines) + "\n")

    proj_lines = ["kind,player_id,cohort,round,window_index,pc1,pc2"]
    for d in derived:
        for round_index, idx, _, probs in d.window_rows:
            x, y = project(model, probs, dims=2)
            proj_lines.append(f"window,{d.meta.player_id},{d.meta.cohort.value},"
                              f"{round_index},{idx},{fmt_num(x)},{fmt_num(y)}")
    for d in derived:
        if d.averaged is None:
            continue
        x, y = project(model, d.averaged, dims=2)
        proj_lines.append(f"average,{d.meta.player_id},{d.meta.cohort.value},,,"
                          f"{fmt_num(x)},{fmt_num(y)}")
    _atomic_write_text(out_dir / "pca_projections.csv", "\n".join(proj_lines) + "\n")


def _write_missing_json(path: Path, derived: list[_SessionDerived]) -> None:
    payload = {d.meta.player_id: d.missing for d in derived}
    _atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_heatmaps(out_dir: Path, derived: list[_SessionDerived],
                    screen: tuple[int, int]) -> None:
    for cohort in Cohort:
        points = [p for d in derived if d.meta.cohort is cohort for p in d.heat_points]
        if not points:
            continue
        hm = heatmap_grid(points, screen=screen)
        _atomic_write(out_dir / f"heatmap_{cohort.value}.csv",
                      lambda tmp, hm=hm: write_heatmap_csv(hm, tmp))
        _atomic_write(out_dir / f"heatmap_{cohort.value}.pgm",
                      lambda tmp, hm=hm: write_heatmap_pgm(hm, tmp))


def _write_kde_csv(path: Path, derived: list[_SessionDerived], bandwidth: str) -> None:
    lines = ["cohort,feature,x,density"]
    for cohort in Cohort:
        for feature in KDE_FEATURES:
            values = [r.value for d in derived if d.meta.cohort is cohort
                      for r in d.feature_rows if r.feature == feature]
            if len(values) < 2:
                continue
            try:
                h = float(bandwidth) if bandwidth != "auto" else silverman_bandwidth(values)
                xs, dens = kde_curve(fit_kde(values, h))
            except EtkError as e:
                log.warning("kde %s/%s skipped: %s", cohort.value, feature, e)
                continue
            for x, dv in zip(xs, dens):
                lines.append(f"{cohort.value},{feature},{fmt_num(x)},{fmt_num(dv)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def cmd_analyze(args) -> int:
    dirs = _expand_session_dirs(args.paths)
    if args.zones == "default":
        model = default_zone_model()
    else:
        model = read_zone_model_csv(args.zones)
    if args.window_s <= 0 or args.hop_s <= 0:
        raise ValueError("--window-s and --hop-s must be positive")
    if args.bandwidth != "auto":
        if float(args.bandwidth) <= 0:
            raise ValueError("--bandwidth must be positive or 'auto'")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        derived = list(pool.map(
            lambda d: _derive_session(d, model, args.window_s, args.hop_s), dirs))
    derived.sort(key=lambda d: (d.meta.cohort.value, d.meta.player_id))

    screens = {read_session_dir_screen(d) for d in dirs}
    screen = sorted(screens)[0]
    if len(screens) > 1:
        log.warning("sessions use differing screens %s; heatmaps use %s", screens, screen)

    k = model.k
    _write_missing_json(out_dir / "missing.json", derived)
    _write_windows_csv(out_dir / "windows.csv", derived, k)
    _write_averages_csv(out_dir / "averages.csv", derived, k)
    _atomic_write(out_dir / "zones.csv", lambda tmp: write_zone_model_csv(model, tmp))
    feature_rows = [r for d in derived for r in d.feature_rows]
    _atomic_write(out_dir / "features.csv",
                  lambda tmp: write_feature_table(feature_rows, tmp))
    _write_kde_csv(out_dir / "kde.csv", derived, args.bandwidth)
    _write_heatmaps(out_dir, derived, screen)

    if len(derived) < 2:
        log.warning("only %d session(s): PCA skipped", len(derived))
    else:
        _write_pca_csvs(out_dir, derived, k)

    _write_manifest(out_dir, "analyze",
                    {"zones": args.zones, "window_s": args.window_s, "hop_s": args.hop_s,
                     "bandwidth": args.bandwidth, "jobs": args.jobs, "seed": args.seed},
                    {str(d): _dir_digests(d) for d in dirs})
    log.info("analyze wrote %s", out_dir)
    return EXIT_OK


def read_session_dir_screen(directory: Path) -> tuple[int, int]:
    from .ingest import read_meta_json
    _, screen, _ = read_meta_json(Path(directory) / META_FILE)
    return screen


# ---------------------------------------------------------------------------
# synth

def cmd_synth(args) -> int:
    if args.count < 0:
        raise ValueError(f"--count must be >= 0, got {args.count}")
    if args.profile:
        profiles = load_profiles(args.profile)
    else:
        pro, am = default_profiles()
        profiles = {Cohort.PROFESSIONAL: pro, Cohort.AMATEUR: am}
    if args.count == 0:
        return EXIT_OK

    scenario = Scenario(rounds=args.rounds, round_s=args.round_s)
    if Cohort.PROFESSIONAL in profiles and Cohort.AMATEUR in profiles:
        n_pro = round(args.count / 3)
    elif Cohort.PROFESSIONAL in profiles:
        n_pro = args.count
    else:
        n_pro = 0

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    master = Rng(args.seed)
    written: list[Path] = []
    for i in range(args.count):
        if i < n_pro:
            cohort, prefix = Cohort.PROFESSIONAL, "pro"
        else:
            cohort, prefix = Cohort.AMATEUR, "am"
        meta = PlayerMeta(player_id=f"{prefix}{i + 1:02d}", cohort=cohort, n=i + 1)
        session = generate_session(profiles[cohort], scenario,
                                   seed=master.child_seed(i), meta=meta)
        written.append(write_session_dir(session, out_dir / meta.player_id))
        log.info("synthesized %s (%s)", meta.player_id, cohort.value)

    _write_manifest(out_dir, "synth",
                    {"count": args.count, "seed": args.seed,
                     "profile": args.profile or "default",
                     "rounds": args.rounds, "round_s": args.round_s},
                    {"profile": _sha256(Path(args.profile))} if args.profile else {})
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etk",
        description="Offline gaze/input/heart-rate session analysis toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse and validate session directories")
    p_ingest.add_argument("paths", nargs="+", help="session directories (or one parent)")
    p_ingest.add_argument("--out", default=None, help="write summary + manifest here")
    p_ingest.set_defaults(func=cmd_ingest)

    p_an = sub.add_parser("analyze", help="run the full analysis pipeline")
    p_an.add_argument("paths", nargs="+", help="session directories (or one parent)")
    p_an.add_argument("--out", required=True, help="artifact output directory")
    p_an.add_argument("--zones", default="default",
                      help="zone model CSV path, or 'default'")
    p_an.add_argument("--window-s", type=float, default=15.0, dest="window_s")
    p_an.add_argument("--hop-s", type=float, default=1.0, dest="hop_s")
    p_an.add_argument("--bandwidth", default="auto",
                      help="KDE bandwidth value, or 'auto' for Silverman")
    p_an.add_argument("--jobs", type=int, default=1)
    p_an.add_argument("--seed", type=int, default=0)
    p_an.set_defaults(func=cmd_analyze)

    p_syn = sub.add_parser("synth", help="generate synthetic session directories")
    p_syn.add_argument("--out", required=True)
    p_syn.add_argument("--count", type=int, default=15)
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.add_argument("--profile", default=None, help="cohort profile JSON")
    p_syn.add_argument("--rounds", type=int, default=12)
    p_syn.add_argument("--round-s", type=float, default=40.0, dest="round_s")
    p_syn.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        log.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidProfile as e:
        print(f"error: invalid profile: {e}", file=sys.stderr)
        return EXIT_PARSE
    except AssemblyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ASSEMBLY
    except DegenerateData as e:
        print(f"error: degenerate analysis input: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (EtkError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
