import math

import networkx as nx
import numpy as np
import pytest

from sarrus_dpm import frame_tables
from sarrus_dpm.builder import (
    BuildError,
    InterferenceError,
    NotConstructibleError,
    PolyhedronKind,
    build_mechanism,
    gamma_max,
    gamma_max_by_unit,
    host_layout,
    known_discrepancies,
    platform_frames,
    prism_gamma_formula,
    table1_row,
    table1_rows,
)
from sarrus_dpm.mobility import joint_screws
from sarrus_dpm.builder import Configuration

from conftest import DEG, PLATONIC, built

# Archimedean face counts (F) of the catalog-only hosts; E = number of units
ARCHIMEDEAN_FACES = {
    "truncated-tetrahedron": 8, "truncated-cube": 14, "truncated-octahedron": 14,
    "truncated-cuboctahedron": 26, "truncated-dodecahedron": 32,
    "truncated-icosahedron": 32, "truncated-icosidodecahedron": 62,
}


@pytest.mark.parametrize("kind,expected", [
    ("tetrahedron", (6, 28, 36, 9)),
    ("cube", (12, 54, 72, 19)),
    ("dodecahedron", (30, 132, 180, 49)),
])
def test_platonic_counts(kind, expected):
    g, frames = built(kind)
    assert (g.n_units, g.n_links, g.n_joints, len(g.loops)) == expected
    assert len(frames) == g.n_units


@pytest.mark.parametrize("n", range(3, 11))
def test_prism_counts(n):
    g, _ = build_mechanism(f"prism{n}")
    assert (g.n_units, g.n_links, g.n_joints) == (3 * n, 13 * n + 2, 18 * n)
    assert len(g.loops) == 18 * n - (13 * n + 2) + 1
    row = table1_row(f"prism{n}")
    assert (row.n_sarrus, row.n_link, row.n_joint) == (3 * n, 13 * n + 2, 18 * n)


@pytest.mark.parametrize("kind", PLATONIC + ("prism3", "prism6"))
def test_loops_are_closed_cycles(kind):
    g, _ = built(kind) if kind in PLATONIC else build_mechanism(kind)
    G = g.link_graph()
    assert nx.is_connected(G)
    assert G.number_of_edges() == nx.Graph(G).number_of_edges()  # no parallel joints
    assert len(g.loops) == len(nx.cycle_basis(nx.Graph(G)))
    for loop in g.loops:
        # walk the loop: each joint must start where the previous one ended
        start = None
        cur = None
        for jid, s in loop:
            a, b = g.joints[jid].links
            src, dst = (a, b) if s > 0 else (b, a)
            if cur is None:
                start = src
            else:
                assert src == cur
            cur = dst
        assert cur == start
    eq = g.equivalent()
    assert len(eq.loops) == eq.n_joints - eq.n_links + 1


def test_unit_loops_first_and_local():
    g, _ = built("tetrahedron")
    for u in range(g.n_units):
        assert sorted(j for j, _ in g.loops[u]) == list(range(6 * u, 6 * u + 6))


def test_published_frames_agree_except_flagged():
    for kind in PLATONIC:
        layout = host_layout(kind)
        table = frame_tables.TABLES[kind]
        flagged = set()
        for note in layout.notes:
            flagged.add(int(note.split("frame ")[1].split(":")[0]))
        for site, (R_pub, p_pub) in zip(layout.sites, table):
            R = site.R
            np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)
            if site.index not in flagged:
                np.testing.assert_allclose(R, R_pub, atol=1e-12)
        assert flagged == {"tetrahedron": set(), "cube": {5}, "dodecahedron": {16}}[kind]


def test_frame_conventions():
    for kind in PLATONIC + ("prism5",):
        layout = host_layout(kind)
        P = layout.poly
        for site in layout.sites:
            n1, n2 = P.normals[site.platforms[0]], P.normals[site.platforms[1]]
            y = (n2 - n1) / np.linalg.norm(n2 - n1)
            np.testing.assert_allclose(site.R[:, 1], y, atol=1e-12)
            z = (n1 + n2) / np.linalg.norm(n1 + n2)
            np.testing.assert_allclose(site.R[:, 2], z, atol=1e-12)
            u, v = site.vertices
            x = P.vertices[v] - P.vertices[u]
            np.testing.assert_allclose(site.R[:, 0], x / np.linalg.norm(x), atol=1e-12)


def test_cube_p5_correction():
    frames = platform_frames("cube")
    p5 = frames[4].dir
    np.testing.assert_allclose(p5, np.array([1, 1, 0]) / math.sqrt(2), atol=1e-12)
    dirs = {tuple(np.round(f.dir, 9)) for f in frames}
    assert len(dirs) == 12


@pytest.mark.parametrize("kind", PLATONIC)
def test_frame_dirs_closed_under_symmetry(kind):
    from sarrus_dpm.kinematics import symmetry_defect, symmetry_generators

    dirs = np.array([f.dir for f in platform_frames(kind)])
    for G in symmetry_generators(kind):
        assert symmetry_defect(dirs, G) < 1e-12


def test_gamma_max_values():
    assert math.degrees(gamma_max("tetrahedron")) == pytest.approx(70.53, abs=5e-3)
    assert math.degrees(gamma_max("cube")) == pytest.approx(109.47, abs=5e-3)
    # the catalog prints 139.18; the construction text and the geometry give 138.19
    assert math.degrees(gamma_max("dodecahedron")) == pytest.approx(138.19, abs=5e-3)
    assert table1_row("dodecahedron").gamma_max == 139.18
    assert any("139.18" in n and "138.19" in n for n in known_discrepancies())
    # tetrahedral value is the dihedral angle acos(1/3)
    assert gamma_max("tetrahedron") == pytest.approx(math.acos(1 / 3), abs=1e-12)
    assert gamma_max("cube") == pytest.approx(math.pi - math.acos(1 / 3), abs=1e-12)


def test_prism_gamma_max():
    assert gamma_max("prism4") == pytest.approx(gamma_max("cube"), abs=1e-12)
    for n in range(4, 11):
        assert gamma_max(f"prism{n}") == pytest.approx(prism_gamma_formula(n), abs=1e-12)
    # triangular prism: the cap-side units bind, below the side-side formula value
    per_unit = gamma_max_by_unit("prism3")
    assert min(per_unit) < prism_gamma_formula(3) - 0.5
    assert max(per_unit) == pytest.approx(prism_gamma_formula(3), abs=1e-12)


@pytest.mark.parametrize("kind", PLATONIC + ("prism3", "prism5"))
def test_limb_axis_angle_is_gamma(kind):
    gamma = 0.8 * gamma_max(kind)
    g, frames = build_mechanism(kind, 1.0, gamma, 40 * DEG)
    S = joint_screws(g, frames, Configuration(40 * DEG, 1.0, gamma))
    for u in range(g.n_units):
        w1 = S[:3, 6 * u]
        w2 = S[:3, 6 * u + 3]
        assert math.acos(np.clip(w1 @ w2, -1, 1)) == pytest.approx(gamma, abs=1e-12)


def test_half_dihedral_beta():
    for kind in PLATONIC + ("prism3", "prism7"):
        P = host_layout(kind).poly
        got = sorted({round(math.degrees(math.acos(-P.normals[l] @ P.normals[r])) / 2, 2)
                      for _, _, l, r in P.edges})
        want = sorted(round(b, 2) for b, _ in table1_row(kind).beta)
        assert got == want


def test_table1_rows():
    rows = {r.kind.label: r for r in table1_rows()}
    t = rows["tetrahedron"]
    assert (t.n_sarrus, t.n_link, t.n_joint, t.beta, t.gamma_max) == (
        6, 28, 36, ((35.26, (3, 3)),), 70.53)
    ti = rows["truncated-icosahedron"]
    assert (ti.n_sarrus, ti.n_link, ti.n_joint) == (90, 392, 540)
    p5 = rows["prism5"]
    assert (p5.n_sarrus, p5.n_link, p5.n_joint) == (15, 67, 90)
    assert len(rows) == 10 + 8


@pytest.mark.parametrize("name,faces", sorted(ARCHIMEDEAN_FACES.items()))
def test_archimedean_counts_consistent(name, faces):
    row = table1_row(name)
    edges = row.n_sarrus
    assert row.n_link == faces + 4 * edges
    assert row.n_joint == 6 * edges


def test_kind_parsing():
    assert PolyhedronKind.parse("prism:5") == PolyhedronKind("prism", 5)
    assert PolyhedronKind.parse("5-prism") == PolyhedronKind("prism", 5)
    assert PolyhedronKind.parse("Truncated_Cube").name == "truncated-cube"
    for bad in ("prism2", "icosahedron", "cube7"):
        with pytest.raises(BuildError):
            PolyhedronKind.parse(bad)


def test_build_errors():
    with pytest.raises(NotConstructibleError, match="table1_row"):
        build_mechanism("truncated-cube")
    with pytest.raises(InterferenceError):
        build_mechanism("tetrahedron", 1.0, 71 * DEG)
    with pytest.raises(InterferenceError):
        build_mechanism("dodecahedron", 1.0, math.radians(139.18))
    with pytest.raises(BuildError):
        build_mechanism("cube", 1.0, None, 1.7)
    with pytest.raises(BuildError):
        build_mechanism("cube", -1.0)


def test_frame_without_offset_rejected():
    with pytest.raises(BuildError):
        platform_frames("tetrahedron")[0].transform()
