"""Construction of Sarrus-inspired deployable polyhedral mechanisms.

A mechanism is a host polyhedron whose faces become rigid platforms and whose
edges each receive one Sarrus unit. Platforms translate along their face
normals; every unit is a 6R loop (two 3R limbs, four panel links).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import networkx as nx
import numpy as np

from . import frame_tables, polyhedra
from .sarrus import SarrusParams, equivalent_motion_screw, unit_screws
from .screw import RigidTransform

NOTE_CUBE_P5 = (
    "cube frame 5: tabulated offset direction [1 0 1] duplicates frame 1; "
    "using [1 1 0]/sqrt2 (the z-axis of the tabulated R5)"
)
NOTE_DODECA_GAMMA = (
    "dodecahedron gamma_max: catalog prints 139.18 deg, construction text gives "
    "138.19 deg; geometry gives 138.19 deg"
)
NOTE_PRISM_GAMMA = (
    "prism gamma_max: printed closed form is garbled; derived geometrically as the "
    "binding limb-plane angle; the reading 2acos((1+sec^2(pi/N))^-1/2) matches the "
    "side-side units, which bind for N >= 4 (side-cap units bind for N = 3)"
)


class BuildError(ValueError):
    """Mechanism cannot be built with the requested inputs."""


class NotConstructibleError(BuildError):
    """Catalog-only kind; geometry is not generated in this version."""


class InterferenceError(BuildError):
    """Limb angle outside ``(0, gamma_max]``."""


# --------------------------------------------------------------------------
# kinds and catalog

_PLATONIC = ("tetrahedron", "cube", "dodecahedron")
_ARCHIMEDEAN = (
    "truncated-tetrahedron",
    "truncated-cube",
    "truncated-octahedron",
    "truncated-cuboctahedron",
    "truncated-dodecahedron",
    "truncated-icosahedron",
    "truncated-icosidodecahedron",
)


@dataclass(frozen=True)
class PolyhedronKind:
    name: str
    n: int | None = None

    def __post_init__(self):
        if self.name == "prism":
            if self.n is None or self.n < 3:
                raise BuildError("prism requires N >= 3")
        elif self.name not in _PLATONIC + _ARCHIMEDEAN:
            raise BuildError(f"unknown polyhedron kind {self.name!r}")
        elif self.n is not None:
            raise BuildError(f"{self.name} takes no N")

    @classmethod
    def parse(cls, text: "str | PolyhedronKind") -> "PolyhedronKind":
        """Accept ``cube``, ``prism:5``, ``prism5``, ``truncated_cube`` ..."""
        if isinstance(text, PolyhedronKind):
            return text
        t = text.strip().lower().replace("_", "-").replace(" ", "-")
        m = re.fullmatch(r"(\d+)-?prism|prism[:\-(]?(\d+)\)?", t)
        if m:
            return cls("prism", int(m.group(1) or m.group(2)))
        return cls(t)

    @property
    def constructible(self) -> bool:
        return self.name in _PLATONIC or self.name == "prism"

    @property
    def label(self) -> str:
        return f"prism{self.n}" if self.name == "prism" else self.name

    def polyhedron(self, a: float = 1.0) -> polyhedra.Polyhedron:
        if not self.constructible:
            raise NotConstructibleError(
                f"{self.name} is catalog data only; use table1_row() for its counts"
            )
        host = {
            "tetrahedron": polyhedra.tetrahedron,
            "cube": polyhedra.cube,
            "dodecahedron": polyhedra.dodecahedron,
        }.get(self.name)
        P = host() if host else polyhedra.prism(self.n)
        return P.scaled(a)


@dataclass(frozen=True)
class Table1Row:
    kind: PolyhedronKind
    n_sarrus: int
    n_link: int
    n_joint: int
    beta: tuple[tuple[float, tuple[int, int]], ...]
    gamma_max: float | None  # degrees as printed; None when printed as a formula
    notes: tuple[str, ...] = ()


_CATALOG = {
    "tetrahedron": (6, 28, 36, ((35.26, (3, 3)),), 70.53),
    "cube": (12, 54, 72, ((45.0, (4, 4)),), 109.47),
    "dodecahedron": (30, 132, 180, ((58.28, (5, 5)),), 139.18),
    "truncated-tetrahedron": (18, 80, 108, ((54.74, (3, 6)), (35.26, (6, 6))), 129.52),
    "truncated-cube": (36, 158, 216, ((62.63, (3, 8)), (45.0, (8, 8))), 147.35),
    "truncated-octahedron": (36, 158, 216, ((62.63, (4, 6)), (54.74, (6, 6))), 143.13),
    "truncated-cuboctahedron": (
        72, 314, 432, ((72.37, (4, 6)), (67.5, (4, 8)), (62.63, (6, 8))), 155.09,
    ),
    "truncated-dodecahedron": (90, 392, 540, ((71.31, (3, 10)), (58.28, (10, 10))), 160.61),
    "truncated-icosahedron": (90, 392, 540, ((69.09, (6, 6)), (71.31, (5, 6))), 156.72),
    "truncated-icosidodecahedron": (
        180, 782, 1080, ((79.55, (4, 6)), (74.14, (4, 10)), (71.31, (6, 10))), 164.89,
    ),
}


def table1_row(kind) -> Table1Row:
    """Catalog row for any listed kind; prisms use the ``N`` closed forms."""
    kind = PolyhedronKind.parse(kind)
    if kind.name == "prism":
        n = kind.n
        return Table1Row(
            kind, 3 * n, 13 * n + 2, 18 * n,
            ((90.0 * (n - 2) / n, (4, 4)), (45.0, (4, n))),
            None,
            (NOTE_PRISM_GAMMA,),
        )
    ns, nl, nj, beta, gmax = _CATALOG[kind.name]
    notes = (NOTE_DODECA_GAMMA,) if kind.name == "dodecahedron" else ()
    return Table1Row(kind, ns, nl, nj, beta, gmax, notes)


def table1_rows(prism_n=range(3, 11)) -> list[Table1Row]:
    rows = [table1_row(k) for k in _PLATONIC + _ARCHIMEDEAN]
    return rows + [table1_row(PolyhedronKind("prism", n)) for n in prism_n]


# --------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class PlatformFrame:
    """Placement of Sarrus unit ``index`` (1-based): rotation and offset direction.

    ``d`` is filled per configuration so that the offset is ``d * dir``.
    """

    index: int
    R: np.ndarray
    dir: np.ndarray
    d: float | None = None

    def transform(self, d: float | None = None) -> RigidTransform:
        d = self.d if d is None else d
        if d is None:
            raise BuildError(f"frame {self.index} has no offset scale")
        return RigidTransform(self.R, d * self.dir)


@dataclass(frozen=True)
class UnitSite:
    """Static placement data of one Sarrus unit on the host polyhedron."""

    index: int
    platforms: tuple[int, int]  # (platform 1, platform 2); y points 1 -> 2
    vertices: tuple[int, int]  # host vertex at limb 1 (x < 0), at limb 2
    R: np.ndarray
    kappa: float  # |n2 - n1|: separation per unit radial platform offset


@dataclass(frozen=True)
class HostLayout:
    kind: PolyhedronKind
    poly: polyhedra.Polyhedron  # unit edge length
    sites: tuple[UnitSite, ...]
    notes: tuple[str, ...]

    @cached_property
    def kappa_max(self) -> float:
        return max(s.kappa for s in self.sites)

    def platform_offset(self, a: float, phi: float) -> float:
        """Radial travel of every platform along its face normal."""
        return a * math.sin(phi) / self.kappa_max

    def unit_phi(self, site: UnitSite, phi: float) -> float:
        """Fold angle of ``site`` when the fastest-opening unit is at ``phi``."""
        return math.asin(min(1.0, math.sin(phi) * site.kappa / self.kappa_max))

    def frames(self, a: float, phi: float) -> list[PlatformFrame]:
        P = self.poly
        s = self.platform_offset(a, phi)
        out = []
        for site in self.sites:
            i, j = site.platforms
            u, v = site.vertices
            mid = a * 0.5 * (P.vertices[u] + P.vertices[v])
            O = mid + 0.5 * s * (P.normals[i] + P.normals[j])
            d = float(np.linalg.norm(O))
            out.append(PlatformFrame(site.index, site.R, O / d, d))
        return out


def _site(P, index, edge, y_hint=None) -> UnitSite:
    u, v, f1, f2 = edge
    n1, n2 = P.normals[f1], P.normals[f2]
    y = n2 - n1
    if y_hint is not None and y @ y_hint < 0:
        f1, f2, n1, n2, y = f2, f1, n2, n1, -y
    kappa = float(np.linalg.norm(y))
    y = y / kappa
    z = n1 + n2
    z = z / np.linalg.norm(z)
    x = np.cross(y, z)
    if x @ (P.vertices[v] - P.vertices[u]) < 0:
        u, v = v, u
    return UnitSite(index, (f1, f2), (u, v), np.column_stack([x, y, z]), kappa)


def _match_published(P, kind_name) -> tuple[list[UnitSite], list[str]]:
    table = frame_tables.TABLES[kind_name]
    mids = {}
    for e in P.edges:
        m = 0.5 * (P.vertices[e[0]] + P.vertices[e[1]])
        mids[e] = m / np.linalg.norm(m)
    free = dict(mids)
    sites, notes = [], []
    for idx, (R_pub, p_pub) in enumerate(table, start=1):
        hit = None
        for cand in (p_pub, R_pub[:, 2]):
            for e, m in free.items():
                if np.allclose(m, cand, atol=1e-9):
                    hit = e
                    break
            if hit:
                break
        if hit is None:
            raise BuildError(f"{kind_name} frame {idx}: no edge matches the tabulated data")
        del free[hit]
        site = _site(P, idx, hit, y_hint=R_pub[:, 1])
        if not np.allclose(mids[hit], p_pub, atol=1e-9):
            notes.append(
                NOTE_CUBE_P5 if (kind_name, idx) == ("cube", 5)
                else f"{kind_name} frame {idx}: tabulated offset direction disagrees with geometry"
            )
        if not np.allclose(site.R, R_pub, atol=1e-12):
            bad = [c for c in range(3) if not np.allclose(site.R[:, c], R_pub[:, c], atol=1e-12)]
            ortho = np.allclose(R_pub.T @ R_pub, np.eye(3), atol=1e-9)
            notes.append(
                f"{kind_name} frame {idx}: tabulated R column(s) {bad} differ from geometry"
                + ("" if ortho else " (tabulated R is not a rotation)")
                + "; geometry used"
            )
        sites.append(site)
    return sites, notes


def host_layout(kind) -> HostLayout:
    """Unit placements on the unit-edge host, numbered like the published frames."""
    return _host_layout(PolyhedronKind.parse(kind))


@lru_cache(maxsize=None)
def _host_layout(kind: PolyhedronKind) -> HostLayout:
    P = kind.polyhedron(1.0)
    if kind.name in frame_tables.TABLES:
        sites, notes = _match_published(P, kind.name)
    else:
        sites = [_site(P, k + 1, e) for k, e in enumerate(P.edges)]
        notes = []
    return HostLayout(kind, P, tuple(sites), tuple(notes))


def platform_frames(kind) -> list[PlatformFrame]:
    """Frame rotations and offset directions (``d`` left unset)."""
    layout = host_layout(kind)
    return [
        PlatformFrame(f.index, f.R, f.dir) for f in layout.frames(1.0, 0.0)
    ]


# --------------------------------------------------------------------------
# gamma_max


def _limb_plane_alpha(layout: HostLayout, site: UnitSite, end: int) -> float:
    """Half limb angle that lays the limb into its vertex face when deployed."""
    P = layout.poly
    vert = site.vertices[end]
    ring = P.vertex_faces[vert]
    s = layout.platform_offset(1.0, np.pi / 2)
    pts = np.array([P.vertices[vert] + s * P.normals[f] for f in ring])
    N = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    if N @ P.vertices[vert] < 0:
        N = -N
    x, z = site.R[:, 0], site.R[:, 2]
    sign = -1.0 if end == 0 else 1.0  # limb 2 tilts the opposite way
    return math.atan2(z @ N, sign * (x @ N))


def gamma_max_by_unit(kind) -> list[float]:
    """Interference bound (radians) for each unit, from deployed geometry."""
    layout = host_layout(kind)
    return [2.0 * min(_limb_plane_alpha(layout, s, 0), _limb_plane_alpha(layout, s, 1))
            for s in layout.sites]


def gamma_max(kind) -> float:
    """Largest admissible limb angle (radians) for a constructible kind."""
    return min(gamma_max_by_unit(kind))


def prism_gamma_formula(n: int) -> float:
    """One legible reading of the printed prism bound, ``2 acos((1 + sec^2(pi/N))^-1/2)``."""
    return 2.0 * math.acos((1.0 + 1.0 / math.cos(math.pi / n) ** 2) ** -0.5)


# --------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class Joint:
    """One joint; its generator moves ``links[1]`` relative to ``links[0]``.

    ``position`` is 1..3 along the limb (1 on platform 1, 3 on platform 2).
    ``screw`` is the local-frame generator at the build configuration.
    """

    id: int
    links: tuple[int, int]
    unit: int
    limb: int
    position: int
    type: str = "R"
    screw: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def fold_sign(self) -> int:
        """Sign turning this joint's rate into the (mid-)fold-angle rate."""
        base = 1 if self.position != 2 else -1
        return base if self.limb == 1 else -base


@dataclass(frozen=True)
class MechanismGraph:
    kind: PolyhedronKind
    method: str  # "original" (revolute joints) or "equivalent" (one prismatic per unit)
    links: tuple[str, ...]
    joints: tuple[Joint, ...]
    n_units: int
    unit_platforms: tuple[tuple[int, int], ...]
    vertex_rings: tuple[tuple[int, tuple[int, ...]], ...]  # (host vertex, platform ring)
    unit_vertices: tuple[tuple[int, int], ...]
    loops: tuple[tuple[tuple[int, int], ...], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    @property
    def n_platforms(self) -> int:
        return sum(1 for x in self.links if x.startswith("platform"))

    @property
    def loop_count(self) -> int:
        return self.n_joints - self.n_links + 1

    def link_graph(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        G.add_nodes_from(range(self.n_links))
        for j in self.joints:
            G.add_edge(*j.links, key=j.id)
        return G

    def unit_joints(self, unit: int) -> list[Joint]:
        return [j for j in self.joints if j.unit == unit]

    def limb_path(self, unit: int, limb: int, from_platform: int) -> list[tuple[int, int]]:
        """Signed joints crossing ``unit`` through ``limb`` starting at a platform."""
        chain = [j for j in self.joints if j.unit == unit and j.limb == limb]
        chain.sort(key=lambda j: j.position)
        if self.unit_platforms[unit][0] == from_platform:
            return [(j.id, 1) for j in chain]
        return [(j.id, -1) for j in reversed(chain)]

    def equivalent(self) -> "MechanismGraph":
        """Graph with each Sarrus unit collapsed to one prismatic joint."""
        if self.method == "equivalent":
            return self
        joints = tuple(
            Joint(u, self.unit_platforms[u], u, 0, 0, "P", equivalent_motion_screw())
            for u in range(self.n_units)
        )
        links = tuple(x for x in self.links if x.startswith("platform"))
        g = MechanismGraph(self.kind, "equivalent", links, joints, self.n_units,
                           self.unit_platforms, self.vertex_rings, self.unit_vertices,
                           notes=self.notes)
        return _with_loops(g)


def independent_loops(graph: MechanismGraph) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Cycle basis: one loop per Sarrus unit plus one per host vertex but the last.

    Each host-vertex loop runs around the ring of platforms meeting at that
    vertex, crossing every unit through the limb that sits at the vertex.
    """
    if not nx.is_connected(graph.link_graph()):
        raise BuildError("mechanism graph is disconnected")
    loops = []
    if graph.method == "original":
        for u in range(graph.n_units):
            p1 = graph.unit_platforms[u][0]
            fwd = graph.limb_path(u, 1, p1)
            back = [(jid, -s) for jid, s in reversed(graph.limb_path(u, 2, p1))]
            loops.append(tuple(fwd + back))
    pair_to_unit = {frozenset(p): u for u, p in enumerate(graph.unit_platforms)}
    for vert, ring in graph.vertex_rings[:-1]:
        loop = []
        for k, f in enumerate(ring):
            g = ring[(k + 1) % len(ring)]
            u = pair_to_unit[frozenset((f, g))]
            if graph.method == "original":
                limb = 1 if graph.unit_vertices[u][0] == vert else 2
                loop += graph.limb_path(u, limb, f)
            else:
                loop.append((u, 1 if graph.unit_platforms[u][0] == f else -1))
        loops.append(tuple(loop))
    if len(loops) != graph.loop_count:
        raise BuildError(f"built {len(loops)} loops, expected {graph.loop_count}")
    _check_independent(graph, loops)
    return tuple(loops)


def _check_independent(graph, loops):
    C = np.zeros((len(loops), graph.n_joints))
    for r, loop in enumerate(loops):
        for jid, s in loop:
            C[r, jid] += s
    if np.linalg.matrix_rank(C) != len(loops):
        raise BuildError("loop set is not independent")


def _with_loops(g: MechanismGraph) -> MechanismGraph:
    return MechanismGraph(g.kind, g.method, g.links, g.joints, g.n_units, g.unit_platforms,
                          g.vertex_rings, g.unit_vertices, independent_loops(g), g.notes)


@dataclass(frozen=True)
class Configuration:
    """Pose parameters; ``d_scale`` rescales every frame offset (mobility probe)."""

    phi: float
    a: float = 1.0
    gamma: float | None = None  # None -> gamma_max of the kind
    d_scale: float = 1.0


def check_configuration(kind, config: Configuration) -> float:
    """Validate ``config`` for ``kind``; return the effective gamma."""
    kind = PolyhedronKind.parse(kind)
    if not kind.constructible:
        raise NotConstructibleError(
            f"{kind.name} is catalog data only; use table1_row() for its counts"
        )
    if not config.a > 0:
        raise BuildError("edge length must be positive")
    if not -1e-12 <= config.phi <= np.pi / 2 + 1e-12:
        raise BuildError(f"phi={config.phi} outside [0, pi/2]")
    gmax = gamma_max(kind)
    gamma = gmax if config.gamma is None else config.gamma
    if not 0.0 < gamma <= gmax + 1e-9:
        raise InterferenceError(
            f"gamma={math.degrees(gamma):.4f} deg outside (0, {math.degrees(gmax):.4f}] deg"
        )
    return min(gamma, gmax)


def unit_params(layout: HostLayout, config: Configuration, gamma: float) -> list[SarrusParams]:
    return [SarrusParams(config.a, gamma, layout.unit_phi(s, config.phi)) for s in layout.sites]


def build_mechanism(kind, a: float = 1.0, gamma: float | None = None, phi: float = math.pi / 6):
    """Build the revolute-joint graph and the frames at one configuration.

    Returns ``(graph, frames)``; ``gamma=None`` selects ``gamma_max``.
    """
    kind = PolyhedronKind.parse(kind)
    config = Configuration(phi, a, gamma)
    gamma = check_configuration(kind, config)
    layout = host_layout(kind)
    params = unit_params(layout, config, gamma)
    P = layout.poly
    links = [f"platform{f}" for f in range(len(P.faces))]
    joints = []
    for u, site in enumerate(layout.sites):
        S = unit_screws(params[u])
        p1, p2 = site.platforms
        for limb in (1, 2):
            base = len(links)
            links += [f"unit{site.index}.limb{limb}.panel{k}" for k in (1, 2)]
            chain = [p1, base, base + 1, p2]
            for pos in (1, 2, 3):
                col = 3 * (limb - 1) + pos - 1
                joints.append(Joint(len(joints), (chain[pos - 1], chain[pos]), u, limb, pos,
                                    "R", S[:, col]))
    rings = tuple((v, ring) for v, ring in enumerate(P.vertex_faces))
    notes = list(layout.notes)
    if kind.name == "dodecahedron":
        notes.append(NOTE_DODECA_GAMMA)
    if kind.name == "prism":
        notes.append(NOTE_PRISM_GAMMA)
    g = MechanismGraph(kind, "original", tuple(links), tuple(joints), len(layout.sites),
                       tuple(s.platforms for s in layout.sites), rings,
                       tuple(s.vertices for s in layout.sites), notes=tuple(notes))
    return _with_loops(g), layout.frames(a, phi)


def known_discrepancies() -> list[str]:
    """Every flagged conflict between the published data and the geometry."""
    notes: list[str] = []
    for name in _PLATONIC:
        notes.extend(host_layout(name).notes)
    return notes + [NOTE_DODECA_GAMMA, NOTE_PRISM_GAMMA]
