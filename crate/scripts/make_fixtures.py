#!/usr/bin/env python3
"""Regenerates the mesh fixtures shipped in crates/core/fixtures.

Voronoi meshes: Lloyd-relaxed centroidal Voronoi tessellations of the unit
square, clipped exactly by mirroring the seeds across the four sides.
Non-convex meshes: structured n x n grids whose interior edges are bent at
their midpoints in an alternating pattern; boundary edges are split but kept
straight.
"""
import os
import sys

import numpy as np
from scipy.spatial import Voronoi

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures")


def mirrored(points):
    x, y = points[:, 0], points[:, 1]
    return np.vstack([
        points,
        np.column_stack([-x, y]),
        np.column_stack([2.0 - x, y]),
        np.column_stack([x, -y]),
        np.column_stack([x, 2.0 - y]),
    ])


def polygon_area_centroid(pts):
    x, y = pts[:, 0], pts[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    a = 0.5 * cross.sum()
    cx = ((x + xs) * cross).sum() / (6.0 * a)
    cy = ((y + ys) * cross).sum() / (6.0 * a)
    return a, np.array([cx, cy])


def voronoi_cells(seeds):
    vor = Voronoi(mirrored(seeds))
    cells = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        assert -1 not in region and len(region) >= 3
        cells.append(list(region))
    return vor.vertices, cells


def lloyd(seeds, iterations):
    for _ in range(iterations):
        verts, cells = voronoi_cells(seeds)
        new = []
        for c in cells:
            pts = verts[c]
            _, cen = polygon_area_centroid(pts)
            new.append(cen)
        seeds = np.clip(np.array(new), 1e-9, 1 - 1e-9)
    return seeds


def voronoi_mesh(nc, seed):
    rng = np.random.default_rng(seed)
    seeds = lloyd(rng.random((nc, 2)), 60)
    verts, cells = voronoi_cells(seeds)
    used = sorted({v for c in cells for v in c})
    remap = {v: i for i, v in enumerate(used)}
    coords = verts[used].copy()
    for d in range(2):
        for target in (0.0, 1.0):
            mask = np.abs(coords[:, d] - target) < 1e-10
            coords[mask, d] = target
    out_cells = []
    for c in cells:
        idx = [remap[v] for v in c]
        a, _ = polygon_area_centroid(coords[idx])
        if a < 0:
            idx.reverse()
        out_cells.append(idx)
    return coords, out_cells


def nonconvex_mesh(n, bend=0.15):
    h = 1.0 / n
    coords = []
    index = {}

    def vid(key, xy):
        if key not in index:
            index[key] = len(coords)
            coords.append(xy)
        return index[key]

    def corner(i, j):
        return vid(("c", i, j), (i * h, j * h))

    def hmid(i, j):
        # edge from (i, j) to (i + 1, j)
        dy = 0.0 if j in (0, n) else bend * h * (1 if (i + j) % 2 == 0 else -1)
        return vid(("h", i, j), ((i + 0.5) * h, j * h + dy))

    def vmid(i, j):
        # edge from (i, j) to (i, j + 1)
        dx = 0.0 if i in (0, n) else bend * h * (1 if (i + j) % 2 == 1 else -1)
        return vid(("v", i, j), (i * h + dx, (j + 0.5) * h))

    cells = []
    for j in range(n):
        for i in range(n):
            cells.append([
                corner(i, j), hmid(i, j), corner(i + 1, j), vmid(i + 1, j),
                corner(i + 1, j + 1), hmid(i, j + 1), corner(i, j + 1), vmid(i, j),
            ])
    return np.array(coords), cells


def write(path, coords, cells, comment):
    with open(path, "w") as fh:
        fh.write("polymesh 1\n")
        fh.write(f"# {comment}\n")
        fh.write(f"{len(coords)} {len(cells)}\n")
        for x, y in coords:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
        for c in cells:
            fh.write(f"{len(c)} " + " ".join(str(v) for v in c) + "\n")


def main():
    os.makedirs(OUT, exist_ok=True)
    for level, nc in enumerate([16, 64, 256, 1024]):
        coords, cells = voronoi_mesh(nc, 1000 + level)
        write(os.path.join(OUT, f"voronoi_{nc}.mesh"), coords, cells,
              f"Lloyd-relaxed Voronoi mesh, {nc} cells, seed {1000 + level}")
    for n in [4, 8, 16, 32]:
        coords, cells = nonconvex_mesh(n)
        write(os.path.join(OUT, f"nonconvex_{n * n}.mesh"), coords, cells,
              f"bent-edge non-convex mesh, {n}x{n} cells")


if __name__ == "__main__":
    sys.exit(main())
