#!/usr/bin/env python3
"""Generate the `fig1` built-in: an asymmetric periodic triangulation of the
unit torus, obtained as the periodic Delaunay triangulation of a fixed point
set. Writes the mesh interchange text format to stdout."""
import sys

import numpy as np
from scipy.spatial import Delaunay

POINTS = np.array([
    [0.00, 0.00],
    [0.41, 0.07],
    [0.72, 0.18],
    [0.20, 0.33],
    [0.57, 0.40],
    [0.88, 0.43],
    [0.10, 0.62],
    [0.36, 0.71],
    [0.69, 0.80],
    [0.52, 0.97],
    [0.93, 0.74],
])


def main():
    n = len(POINTS)
    tiles = []
    owner = []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            tiles.append(POINTS + [dx, dy])
            owner.extend(range(n))
    pts = np.vstack(tiles)
    tri = Delaunay(pts)
    faces = []
    for simplex in tri.simplices:
        corners = pts[simplex]
        bary = corners.mean(axis=0)
        if not (0.0 <= bary[0] < 1.0 and 0.0 <= bary[1] < 1.0):
            continue
        a, b, c = corners
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        ids = [owner[s] for s in simplex]
        if cross < 0:
            ids = [ids[0], ids[2], ids[1]]
        faces.append(ids)
    edges = set()
    for f in faces:
        for k in range(3):
            u, v = f[k], f[(k + 1) % 3]
            if u == v:
                sys.exit("loop edge")
            edges.add((min(u, v), max(u, v)))
    if n - len(edges) + len(faces) != 0:
        sys.exit(f"euler mismatch V={n} E={len(edges)} F={len(faces)}")
    if 2 * len(edges) != 3 * len(faces):
        sys.exit("multi-edge on the torus")
    # lifts are recovered by the nearest-image rule, so every edge vector
    # must be shorter than half a period in each coordinate
    for u, v in edges:
        d = POINTS[v] - POINTS[u]
        d -= np.round(d)
        if np.max(np.abs(d)) >= 0.45:
            sys.exit(f"edge {u}-{v} too long for nearest-image lifting")
    print("# fig1: periodic Delaunay triangulation of 11 points on the unit torus")
    print("periods 1 0 0 1")
    for i, (x, y) in enumerate(POINTS):
        print(f"v {i} {x:.2f} {y:.2f}")
    for f in faces:
        print(f"f {f[0]} {f[1]} {f[2]}")
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    print(f"# degrees {deg}", file=sys.stderr)


if __name__ == "__main__":
    main()
