"""Continuity probe for the line-band demo scenes.

Usage: python3 band_probe.py RESULT_PNG SCENE_JSON

Prints one number: the worst per-column brightness of the ink band inside
the filled rectangle (0 = the dark line runs unbroken, ~1 = the band is
missing somewhere).  Columns are scored by the mean of channel 0 over the
band rows, and the maximum over columns is reported.
"""

import json
import math
import sys

import numpy as np
from PIL import Image


def main() -> None:
    result_path, scene_path = sys.argv[1], sys.argv[2]
    scene = json.loads(open(scene_path, encoding="utf-8").read())
    arr = np.asarray(Image.open(result_path).convert("RGB"), dtype=np.float64) / 255.0

    x0, x1, y0, y1 = scene["omega"]
    dx0, dx1, dy0, dy1 = scene["domain"]
    W, H = scene["resolution"]
    half_width = scene["half_width"]
    th = math.radians(scene["theta_deg"])
    assert arr.shape[:2] == (H, W), f"result is {arr.shape[:2]}, scene says {(H, W)}"

    hx = (x1 - x0) / W
    hy = (y1 - y0) / H
    x = x0 + (np.arange(W) + 0.5) * hx
    y = y1 - (np.arange(H) + 0.5) * hy
    X, Y = np.meshgrid(x, y)
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    d = -(X - cx) * math.sin(th) + (Y - cy) * math.cos(th)

    inside = (X >= dx0) & (X <= dx1) & (Y >= dy0) & (Y <= dy1)
    band = (np.abs(d) <= half_width) & inside

    worst = 0.0
    for col in range(W):
        rows = band[:, col]
        if rows.any():
            worst = max(worst, float(arr[rows, col, 0].mean()))
    print(f"{worst:.4f}")


if __name__ == "__main__":
    main()
