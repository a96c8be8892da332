"""Closed-form tetrahedral kinematics and configuration meshes for every host."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .builder import BuildError, Configuration, PolyhedronKind, check_configuration, host_layout
from .polyhedra import hull_polyhedron, polygon_mesh_volume

LABELS = ("platform", "limb", "newface")
VOLUME_CONVENTION = "closed-hull volume: gaps between platforms count as interior"


def _check(a: float, phi: float) -> None:
    if not a > 0:
        raise ValueError(f"edge length must be positive, got {a}")
    if not 0.0 <= phi <= math.pi / 2 + 1e-12:
        raise ValueError(f"phi must lie in [0, pi/2], got {phi}")


def insphere_radius(a: float, phi: float) -> float:
    """Tetrahedral mechanism: centroid-to-platform distance."""
    _check(a, phi)
    return math.sqrt(6.0) * a * (3.0 * math.sin(phi) + 1.0) / 12.0


def circumsphere_radius(a: float, phi: float) -> float:
    """Tetrahedral mechanism: largest vertex distance (8 sits under the root)."""
    _check(a, phi)
    s = math.sin(phi)
    return a * math.sqrt((3.0 * s * s + 2.0 * s + 3.0) / 8.0)


def volume(a: float, phi: float) -> float:
    """Tetrahedral mechanism: enclosed volume (see ``VOLUME_CONVENTION``)."""
    _check(a, phi)
    s = math.sin(phi)
    return math.sqrt(2.0) * a**3 * (s**3 + 9.0 * s * s + 9.0 * s + 1.0) / 12.0


def volume_derivative(a: float, phi: float) -> float:
    _check(a, phi)
    s, c = math.sin(phi), math.cos(phi)
    return math.sqrt(2.0) * a**3 * (3.0 * s * s + 18.0 * s + 9.0) * c / 12.0


@dataclass(frozen=True)
class ConfigurationMesh:
    vertices: np.ndarray
    faces: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.faces) != len(self.labels):
            raise ValueError("one label per face")
        bad = set(self.labels) - set(LABELS)
        if bad:
            raise ValueError(f"unknown labels {sorted(bad)}")

    def faces_with(self, label: str) -> list[tuple[int, ...]]:
        return [f for f, l in zip(self.faces, self.labels) if l == label]

    def label_counts(self) -> dict[str, int]:
        return {l: self.labels.count(l) for l in LABELS}

    def compact(self, tol: float = 1e-12) -> "ConfigurationMesh":
        """Merge coincident vertices and drop faces that collapse."""
        scale = max(1.0, float(np.max(np.abs(self.vertices))))
        keep: list[np.ndarray] = []
        remap = []
        for p in self.vertices:
            for k, q in enumerate(keep):
                if np.max(np.abs(p - q)) <= tol * scale:
                    remap.append(k)
                    break
            else:
                remap.append(len(keep))
                keep.append(p)
        faces, labels = [], []
        for f, lab in zip(self.faces, self.labels):
            g: list[int] = []
            for i in f:
                j = remap[i]
                if not g or g[-1] != j:
                    g.append(j)
            while len(g) > 1 and g[0] == g[-1]:
                g.pop()
            if len(set(g)) >= 3:
                faces.append(tuple(g))
                labels.append(lab)
        return ConfigurationMesh(np.array(keep), tuple(faces), tuple(labels))

    def edge_faces(self) -> dict[tuple[int, int], int]:
        """Directed-edge use counts."""
        out: dict[tuple[int, int], int] = {}
        for f in self.faces:
            for k in range(len(f)):
                e = (f[k], f[(k + 1) % len(f)])
                out[e] = out.get(e, 0) + 1
        return out

    def is_watertight(self) -> bool:
        """Every edge used once in each direction (closed and consistently oriented)."""
        used = self.edge_faces()
        return all(n == 1 and used.get((v, u), 0) == 1 for (u, v), n in used.items())

    def volume(self) -> float:
        return polygon_mesh_volume(self.vertices, self.faces)

    def max_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def hull(self):
        return hull_polyhedron(self.vertices)


def configuration_geometry(kind, a: float = 1.0, gamma: float | None = None,
                           phi: float = 0.0) -> ConfigurationMesh:
    """Closed surface of the mechanism at fold angle ``phi``.

    Platforms are the host faces pushed out along their normals. Each split edge
    becomes a quad swept by its Sarrus limbs; each host vertex opens into a
    polygon bounded by its surrounding platforms. The mesh is uncompacted, so
    at ``phi = 0`` the limb and vertex faces are degenerate (see ``compact``).
    """
    kind = PolyhedronKind.parse(kind)
    check_configuration(kind, Configuration(phi, a, gamma))
    layout = host_layout(kind)
    P = layout.poly
    s = layout.platform_offset(a, phi)
    base = a * P.vertices
    verts: list[np.ndarray] = []
    index: dict[tuple[int, int], int] = {}
    for fi, f in enumerate(P.faces):
        for v in f:
            index[(fi, v)] = len(verts)
            verts.append(base[v] + s * P.normals[fi])
    faces: list[tuple[int, ...]] = []
    labels: list[str] = []
    for fi, f in enumerate(P.faces):
        faces.append(tuple(index[(fi, v)] for v in f))
        labels.append("platform")
    for u, v, left, right in P.edges:
        # left face runs u -> v, so the quad runs v -> u on the left side
        faces.append((index[(left, v)], index[(left, u)], index[(right, u)], index[(right, v)]))
        labels.append("limb")
    for v, ring in enumerate(P.vertex_faces):
        # the face ring winds clockwise seen from outside
        faces.append(tuple(index[(fi, v)] for fi in reversed(ring)))
        labels.append("newface")
    mesh = ConfigurationMesh(np.array(verts), tuple(faces), tuple(labels))
    if mesh.volume() < 0:
        raise BuildError("mesh orientation is inverted")
    return mesh


def platform_distances(kind, a: float, phi: float) -> np.ndarray:
    """Distance from the centroid to each platform plane."""
    mesh = configuration_geometry(kind, a, None, phi)
    out = []
    for f in mesh.faces_with("platform"):
        P = mesh.vertices[list(f)]
        n = np.cross(P[1] - P[0], P[2] - P[0])
        out.append(float(P[0] @ n / np.linalg.norm(n)))
    return np.array(out)


def mesh_quantities(kind, a: float, phi: float) -> dict[str, float]:
    """Numerical r, R and V from the configuration mesh (any constructible kind)."""
    mesh = configuration_geometry(kind, a, None, phi)
    return {
        "r": float(np.min(platform_distances(kind, a, phi))),
        "R": mesh.max_radius(),
        "V": mesh.volume(),
    }


def symmetry_generators(kind) -> list[np.ndarray]:
    """Orthogonal generators of the host's full symmetry group."""
    kind = PolyhedronKind.parse(kind)
    cyc = np.array([[0.0, 1, 0], [0, 0, 1], [1, 0, 0]])
    swap = np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, 1]])
    flip = np.diag([-1.0, 1, 1])
    if kind.name == "tetrahedron":
        return [cyc, swap]
    if kind.name == "cube":
        return [cyc, swap, flip]
    if kind.name == "dodecahedron":
        g = (1 + math.sqrt(5)) / 2
        axis = np.array([0.0, g, 1.0]) / math.sqrt(1 + g * g)
        return [cyc, flip, _rotation(axis, 2 * math.pi / 5)]
    if kind.name == "prism":
        return [_rotation(np.array([0.0, 0, 1]), 2 * math.pi / kind.n),
                np.diag([1.0, 1, -1]), np.diag([1.0, -1, 1])]
    raise BuildError(f"no symmetry data for {kind.label}")


def _rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


def symmetry_defect(points: np.ndarray, G: np.ndarray) -> float:
    """Largest distance from a transformed point to its nearest original point."""
    Q = points @ G.T
    d = np.linalg.norm(Q[:, None, :] - points[None, :, :], axis=2)
    return float(np.max(np.min(d, axis=1)))
