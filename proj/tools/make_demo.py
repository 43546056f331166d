#!/usr/bin/env python3
"""Regenerates data/demo.csv, a 24x24 grid of five covariates over ten
latent zones (one deliberately tiny, ~1.5% of cells, so a global design
can miss it). Deterministic; the committed file matches SEED = 7."""

import math
import os
import random

W, H = 24, 24
D = 5
SEED = 7

NAMES = ["elev", "slope", "ndvi", "moist", "clay"]


def zone_means(rng, k, spacing=4.5):
    means = []
    while len(means) < k:
        cand = [rng.uniform(0.0, 10.0) for _ in range(D)]
        ok = all(
            math.dist(cand, m) >= spacing for m in means
        )
        if ok:
            means.append(cand)
    return means


def main():
    rng = random.Random(SEED)
    means = zone_means(rng, 10)

    # Voronoi seeds for zones 0..8; zone 9 is a small disc near (20.5, 3.5)
    spots = [
        (3.0, 3.0), (12.0, 2.5), (21.0, 8.5), (4.5, 11.0), (12.5, 10.5),
        (20.0, 16.5), (3.5, 19.0), (11.5, 19.5), (19.5, 21.5),
    ]
    tiny_center = (20.5, 3.5)

    def zone_of(col, row):
        if math.dist((col + 0.5, row + 0.5), tiny_center) <= 1.6:
            return 9
        best = 0
        best_d = math.dist((col + 0.5, row + 0.5), spots[0])
        for z in range(1, len(spots)):
            dz = math.dist((col + 0.5, row + 0.5), spots[z])
            if dz < best_d:
                best, best_d = z, dz
        return best

    masked = set(rng.sample(range(W * H), 8))

    out_dir = os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "demo.csv")
    with open(path, "w", newline="") as f:
        f.write("x,y," + ",".join(NAMES) + "\n")
        for row in range(H):
            for col in range(W):
                x = 100.0 + (col + 0.5) * 10.0
                y = 2000.0 - (row + 0.5) * 10.0
                z = zone_of(col, row)
                vals = [means[z][j] + rng.gauss(0.0, 0.3) for j in range(D)]
                cells = [f"{x:.1f}", f"{y:.1f}"]
                for j in range(D):
                    if row * W + col in masked and j == 1:
                        cells.append("nan")
                    else:
                        cells.append(f"{vals[j]:.5f}")
                f.write(",".join(cells) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
