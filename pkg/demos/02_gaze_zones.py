"""
Gaze zones: assignment, rolling windows, and heatmaps
=====================================================

Gaze positions are mapped onto a fixed set of nine screen zones
(cross-hair, radar, health bar, ...), each gaze sample going to the
nearest zone center.  From the resulting categorical track we compute
rolling-window occupancy distributions, their average, and a pixel
heatmap.
"""
import tempfile
from pathlib import Path

import numpy as np

from etk import (
    PlayerMeta,
    Cohort,
    Scenario,
    assign_zone,
    assign_zones,
    average_distribution,
    default_profiles,
    default_zone_model,
    extract_alive_segments,
    fit_zones,
    generate_session,
    heatmap_grid,
    interpolate_gaps,
    slice_by_intervals,
    window_distributions,
)
from etk.zones import write_heatmap_pgm

# --- 1. The zone model ------------------------------------------------------
model = default_zone_model()
print(f"{model.k} zones on a 1920x1080 screen:")
for i, (center, label) in enumerate(zip(model.centers, model.labels), start=1):
    print(f"  {i}: {label:24s} at {center}")

# A point is assigned to the nearest center (1-based index).
print("(100, 100)  ->", assign_zone((100.0, 100.0), model),
      "=", model.labels[assign_zone((100.0, 100.0), model) - 1])
print("(960, 540)  ->", assign_zone((960.0, 540.0), model))

# --- 2. A session's zone track ----------------------------------------------
# The preprocessing chain: keep only alive time, repair short gaze
# dropouts, then classify each sample.
pro_profile, am_profile = default_profiles()
scenario = Scenario(rounds=6, round_s=40.0)
session = generate_session(pro_profile, scenario, seed=7,
                           meta=PlayerMeta(player_id="pro01",
                                           cohort=Cohort.PROFESSIONAL, n=1))

alive = extract_alive_segments(session.timeline, session.meta.player_id)
print(f"\nalive intervals: {[(iv.start_t, iv.end_t) for iv in alive[:3]]} ...")

windows = []
for interval, segment in zip(alive, slice_by_intervals(session.gaze, alive)):
    repaired, _ = interpolate_gaps(segment)
    seq = assign_zones(repaired, model, span=(interval.start_t, interval.end_t))
    windows.extend(window_distributions(seq))  # 15 s windows, 1 s hop

print(f"rolling windows: {len(windows)}")
w0 = windows[0]
print(f"window {w0.window_index} at t={w0.window_start:.0f}s:",
      " ".join(f"{p:.2f}" for p in w0.probs))

# Each window distribution sums to one; so does their average.
avg = average_distribution(windows)
print("averaged distribution:", " ".join(f"{p:.3f}" for p in avg.probs))
print(f"sum = {sum(avg.probs):.12f}, cross-hair share = {avg.probs[0]:.3f}")

# --- 3. Pixel heatmap ---------------------------------------------------------
# Raw (not zone-quantised) gaze positions binned into 40 px cells.
points = [(s.x, s.y) for s in session.gaze.samples if s.valid]
hm = heatmap_grid(points, screen=session.gaze.screen, cell_px=40)
peak_row, peak_col = np.unravel_index(int(hm.grid.argmax()), hm.grid.shape)
print(f"\nheatmap {hm.grid.shape[0]}x{hm.grid.shape[1]} cells, "
      f"{hm.total} points, peak cell ({peak_col}, {peak_row}) "
      f"~ pixel ({peak_col * 40 + 20}, {peak_row * 40 + 20})")

out = Path(tempfile.mkdtemp(prefix="etk-demo2-")) / "heatmap.pgm"
write_heatmap_pgm(hm, out)
print(f"wrote grayscale PGM to {out}")

# --- 4. Recovering centers from data ------------------------------------------
# The zone table is normally taken as given ("fixed" mode), but
# fit_zones can also cluster: Lloyd iterations from greedy
# farthest-first seeds recover blob centers from raw points.
rng = np.random.default_rng(42)
true_centers = [(400.0, 300.0), (1500.0, 300.0), (960.0, 800.0)]
blob = np.vstack([np.add(c, rng.normal(0.0, 25.0, size=(400, 2)))
                  for c in true_centers])
fitted = fit_zones(blob, k=3, mode="lloyd", seed=1)
recovered = sorted(fitted.centers)
for got, want in zip(recovered, sorted(true_centers)):
    err = float(np.hypot(got[0] - want[0], got[1] - want[1]))
    print(f"true {want} -> fitted ({got[0]:7.2f}, {got[1]:7.2f}), off by {err:.2f} px")
