"""Convex polyhedra used as mechanism hosts: vertices, oriented faces, edges."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from scipy.spatial import ConvexHull

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class Polyhedron:
    """Convex polyhedron with counter-clockwise (outward) face loops."""

    vertices: np.ndarray
    faces: tuple[tuple[int, ...], ...]

    @cached_property
    def normals(self) -> np.ndarray:
        out = []
        for f in self.faces:
            P = self.vertices[list(f)]
            n = np.cross(P[1] - P[0], P[2] - P[0])
            out.append(n / np.linalg.norm(n))
        return np.array(out)

    @cached_property
    def edges(self) -> tuple[tuple[int, int, int, int], ...]:
        """``(v0, v1, left_face, right_face)`` per edge, ``v0 < v1``.

        ``left_face`` traverses ``v0 -> v1`` in its CCW loop.
        """
        owner: dict[tuple[int, int], int] = {}
        for fi, f in enumerate(self.faces):
            for k in range(len(f)):
                owner[(f[k], f[(k + 1) % len(f)])] = fi
        out = []
        for (u, v), fi in owner.items():
            if u < v:
                out.append((u, v, fi, owner[(v, u)]))
        return tuple(sorted(out))

    @cached_property
    def vertex_faces(self) -> tuple[tuple[int, ...], ...]:
        """Cyclic ring of faces around each vertex."""
        owner: dict[tuple[int, int], int] = {}
        for fi, f in enumerate(self.faces):
            for k in range(len(f)):
                owner[(f[k], f[(k + 1) % len(f)])] = fi
        out = []
        for v in range(len(self.vertices)):
            start = min(fi for fi, f in enumerate(self.faces) if v in f)
            ring = [start]
            while True:
                f = self.faces[ring[-1]]
                w = f[(f.index(v) + 1) % len(f)]
                fi = owner[(w, v)]
                if fi == start:
                    break
                ring.append(fi)
            out.append(tuple(ring))
        return tuple(out)

    def edge_length(self) -> float:
        u, v, _, _ = self.edges[0]
        return float(np.linalg.norm(self.vertices[u] - self.vertices[v]))

    def scaled(self, edge: float) -> "Polyhedron":
        return Polyhedron(self.vertices * (edge / self.edge_length()), self.faces)

    def inradius(self, face: int = 0) -> float:
        return float(self.vertices[self.faces[face][0]] @ self.normals[face])

    def volume(self) -> float:
        return polygon_mesh_volume(self.vertices, self.faces)


def polygon_mesh_volume(vertices, faces) -> float:
    """Divergence-theorem volume of a closed, outward-oriented polygon mesh."""
    V = np.asarray(vertices, dtype=float)
    total = 0.0
    for f in faces:
        p0 = V[f[0]]
        for k in range(1, len(f) - 1):
            total += p0 @ np.cross(V[f[k]], V[f[k + 1]])
    return total / 6.0


def hull_polyhedron(points, decimals: int = 9) -> Polyhedron:
    """Convex hull with coplanar triangles merged into polygon faces."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    used = np.unique(hull.simplices)
    remap = {int(old): new for new, old in enumerate(used)}
    V = pts[used]
    groups: dict[tuple, set[int]] = {}
    for eq, simplex in zip(hull.equations, hull.simplices):
        key = tuple(np.round(eq, decimals) + 0.0)
        groups.setdefault(key, set()).update(remap[int(i)] for i in simplex)
    faces = []
    for key, idx in groups.items():
        n = np.array(key[:3])
        idx = sorted(idx)
        c = V[idx].mean(axis=0)
        e1 = V[idx[0]] - c
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        ang = [np.arctan2((V[i] - c) @ e2, (V[i] - c) @ e1) for i in idx]
        faces.append(tuple(int(i) for _, i in sorted(zip(ang, idx))))
    faces.sort(key=lambda f: tuple(np.round(V[list(f)].mean(axis=0), 6)))
    return Polyhedron(V, tuple(faces))


def tetrahedron() -> Polyhedron:
    """Regular tetrahedron with edge midpoints on the coordinate axes."""
    verts = [(1, -1, 1), (-1, 1, 1), (1, 1, -1), (-1, -1, -1)]
    return hull_polyhedron(np.array(verts, dtype=float)).scaled(1.0)


def cube() -> Polyhedron:
    verts = list(product((-1.0, 1.0), repeat=3))
    return hull_polyhedron(np.array(verts)).scaled(1.0)


def dodecahedron() -> Polyhedron:
    """Regular dodecahedron with edge midpoints on the coordinate axes."""
    g, h = GOLDEN, 1.0 / GOLDEN
    verts = list(product((-1.0, 1.0), repeat=3))
    for s1, s2 in product((-1.0, 1.0), repeat=2):
        verts += [(0.0, s1 * h, s2 * g), (s1 * h, s2 * g, 0.0), (s2 * g, 0.0, s1 * h)]
    return hull_polyhedron(np.array(verts)).scaled(1.0)


def prism(n: int) -> Polyhedron:
    """Right regular ``n``-gonal prism with square sides."""
    if n < 3:
        raise ValueError("prism needs n >= 3")
    # circumradius giving unit polygon edge; half-height 1/2 gives square sides
    rho = 0.5 / np.sin(np.pi / n)
    ang = 2 * np.pi * (np.arange(n) + 0.5) / n
    ring = np.column_stack([rho * np.cos(ang), rho * np.sin(ang)])
    verts = [(x, y, z) for z in (-0.5, 0.5) for x, y in ring]
    return hull_polyhedron(np.array(verts))
