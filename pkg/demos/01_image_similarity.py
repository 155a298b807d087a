"""Walkthrough of the similarity index that drives redundancy filtering.

The index scores two scalar planes in [-1, 1]: 1 for identical signals,
-1 for perfectly anti-correlated ones, and values in between as structure,
luminance, or contrast drift apart. Frame similarity averages it over
8x8 tiles of the luma planes, so a small moving object still dents an
otherwise-static scene's score.
"""

import numpy as np

from framesieve import (
    frame_similarity,
    generate,
    luma,
    preset_config,
    uqi,
    uqi_windowed,
)

# --- toy vectors -----------------------------------------------------------

ramp = np.array([1.0, 2.0, 3.0, 4.0])
print("identical ramps          ->", uqi(ramp, ramp))
print("anti-correlated ramps    ->", uqi(ramp, ramp[::-1]))
print("constant equal buffers   ->", uqi(np.full(8, 5.0), np.full(8, 5.0)))
print("ramp vs shifted ramp     ->", uqi(ramp, ramp + 20.0))

# A constant luminance shift never reaches 1: the index penalizes
# brightness drift even when the structure matches exactly.

# --- planes and windows ------------------------------------------------------

rng = np.random.default_rng(0)
plane = rng.integers(0, 256, (64, 64)).astype(float)
noisy = plane + rng.normal(0, 25, plane.shape)
print("\nplane vs itself (B=8)    ->", uqi_windowed(plane, plane, 8))
print("plane vs noisy copy      ->", round(uqi_windowed(plane, noisy, 8), 4))
print("plane vs fresh noise     ->", round(uqi_windowed(plane, rng.integers(0, 256, (64, 64)).astype(float), 8), 4))

# --- whole frames ------------------------------------------------------------

config = preset_config("stop_and_go", seed=7)
frames = [g.frame for g in generate(config)]

print("\nstop-and-go stream, tile size 8:")
for a, b, note in [(0, 1, "both moving"), (16, 17, "inside a pause"), (14, 15, "pause boundary")]:
    q = frame_similarity(frames[a], frames[b])
    print(f"  frame {a:3d} vs {b:3d} ({note:>14}) -> {q:.4f}")

print("\nluma of frame 0: shape", luma(frames[0].rgb).shape, "mean", round(luma(frames[0].rgb).mean(), 1))
