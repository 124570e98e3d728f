#!/usr/bin/env python3
"""Generates the bundled example recordings under data/.

pick_place.demo.jsonl: a hand picks a sponge with ~40 deg yaw, lifts it over a cup and
sets it down in a box with ~50 deg pitch, then releases. Landmarks are projected through
the camera model and perturbed with seeded pixel/depth noise.

return_loop.demo.jsonl: a noise-free out-and-back motion with half a second of rest at
each end, so start and goal coincide even after smoothing. Exercises the degenerate-span
path.
"""

import json
import math
import pathlib

import numpy as np

PIXEL_NOISE = 0.5
DEPTH_NOISE = 0.001

CAMERA = {"H": 1.0, "X": 640, "Y": 480, "theta_x_deg": 69.0, "theta_y_deg": 42.0}


def world_to_pixel(p):
    h = CAMERA["H"]
    fx = math.radians(CAMERA["theta_x_deg"])
    fy = math.radians(CAMERA["theta_y_deg"])
    d = h - p[2]
    x_p = CAMERA["X"] / 2 + math.atan(p[0] / d) / fx * CAMERA["X"]
    y_p = CAMERA["Y"] / 2 + math.atan(p[1] / d) / fy * CAMERA["Y"]
    return x_p, y_p, d


def min_jerk(u):
    u = min(max(u, 0.0), 1.0)
    return 10 * u**3 - 15 * u**4 + 6 * u**5


def piecewise(t, keys):
    """keys: list of (time, value); min-jerk blend between consecutive keys."""
    if t <= keys[0][0]:
        return np.asarray(keys[0][1], dtype=float)
    for (t0, v0), (t1, v1) in zip(keys, keys[1:]):
        if t <= t1:
            s = min_jerk((t - t0) / (t1 - t0)) if t1 > t0 else 1.0
            return np.asarray(v0, dtype=float) + s * (np.asarray(v1) - np.asarray(v0))
    return np.asarray(keys[-1][1], dtype=float)


def hand_landmarks(wrist, yaw, pitch, spread):
    """21 world points; thumb tip / index tip placed so the hand's Euler angles are
    (yaw, pitch, 0) and the fingertips are `spread` apart."""
    a = 0.07
    thumb = wrist + np.array([a * math.cos(pitch), 0.06, -a * math.sin(pitch)])
    index = thumb + spread * np.array([math.sin(yaw), -math.cos(yaw), 0.0])
    pts = [wrist]
    # thumb chain 1..4, index chain 5..8
    for tip in (thumb, index):
        for f in (0.35, 0.6, 0.8, 1.0):
            pts.append(wrist + f * (tip - wrist))
    # middle, ring, pinky chains 9..20 folded toward the palm
    for w_index in (0.75, 0.6, 0.45):
        tip = w_index * index + (1 - w_index) * wrist
        for f in (0.35, 0.6, 0.8, 1.0):
            pts.append(wrist + f * (tip - wrist))
    assert len(pts) == 21
    return pts


def frame_record(t, pts, rng=None):
    kps = []
    for p in pts:
        x_p, y_p, d = world_to_pixel(p)
        if rng is not None:
            x_p += rng.normal(0.0, PIXEL_NOISE)
            y_p += rng.normal(0.0, PIXEL_NOISE)
            d += rng.normal(0.0, DEPTH_NOISE)
        assert 0 <= x_p <= CAMERA["X"] and 0 <= y_p <= CAMERA["Y"] and d > 0, (t, p)
        kps.append([round(x_p, 2), round(y_p, 2), round(d, 4)])
    return {"t": round(t, 4), "keypoints": kps}


def pick_place(rng):
    start = (0.20, -0.18, 0.24)
    sponge = (0.24, -0.14, 0.18)
    cup = (0.28, 0.02, 0.34)
    box = (0.30, 0.20, 0.28)
    wrist_keys = [(0.0, start), (1.0, start), (3.5, sponge), (4.5, sponge),
                  (7.0, cup), (9.5, box), (12.0, box)]
    yaw_keys = [(0.0, 0.0), (1.0, 0.0), (3.5, 40.0), (7.0, 40.0), (9.5, 0.0), (12.0, 0.0)]
    pitch_keys = [(0.0, 0.0), (7.0, 0.0), (9.5, 50.0), (12.0, 50.0)]
    spread_keys = [(0.0, 0.14), (3.6, 0.14), (4.4, 0.04), (9.6, 0.04), (10.4, 0.14),
                   (12.0, 0.14)]
    frames = []
    k = 0
    while True:
        t = k / 30.0
        if t > 12.0 + 1e-9:
            break
        if 0 < k and t < 12.0 - 1e-9:
            t += rng.uniform(-0.004, 0.004)
        wrist = piecewise(t, wrist_keys)
        yaw = math.radians(float(piecewise(t, yaw_keys)))
        pitch = math.radians(float(piecewise(t, pitch_keys)))
        spread = float(piecewise(t, spread_keys))
        frames.append(frame_record(t, hand_landmarks(wrist, yaw, pitch, spread), rng))
        k += 1
    return frames


def return_loop():
    start = np.array([0.22, -0.10, 0.25])
    far = np.array([0.28, 0.08, 0.32])
    n = 121
    half = [start + min_jerk(2 * k / (n - 1)) * (far - start) for k in range((n + 1) // 2)]
    rest = [start] * 15
    path = rest + half + half[-2::-1] + rest
    frames = []
    for k, wrist in enumerate(path):
        frames.append(frame_record(k / 30.0, hand_landmarks(wrist, 0.3, 0.2, 0.14)))
    return frames


def write(path, frames):
    with open(path, "w", encoding="utf-8") as fh:
        for f in frames:
            fh.write(json.dumps(f, separators=(",", ":")) + "\n")


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "data"
    root.mkdir(exist_ok=True)
    with open(root / "camera.json", "w", encoding="utf-8") as fh:
        json.dump(CAMERA, fh, indent=2)
        fh.write("\n")
    write(root / "pick_place.demo.jsonl", pick_place(np.random.default_rng(20240613)))
    write(root / "return_loop.demo.jsonl", return_loop())


if __name__ == "__main__":
    main()
