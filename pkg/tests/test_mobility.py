import math

import numpy as np
import pytest

from sarrus_dpm.builder import BuildError, Configuration, build_mechanism, host_layout
from sarrus_dpm.mobility import (
    MobilityError,
    PoeModel,
    assemble_constraint_matrix,
    compute_mobility,
    integrate_motion,
    joint_screws,
    loop_matrix,
    platform_velocities,
    sweep_rank,
    synchronization_check,
)
from sarrus_dpm.screw import RigidTransform, adjoint, numerical_rank

from conftest import DEG, PLATONIC, built

EXPECTED = {
    ("tetrahedron", "original"): ((54, 36), 35),
    ("tetrahedron", "equivalent"): ((18, 6), 5),
    ("cube", "original"): ((114, 72), 71),
    ("cube", "equivalent"): ((42, 12), 11),
    ("dodecahedron", "original"): ((294, 180), 179),
    ("dodecahedron", "equivalent"): ((114, 30), 29),
}
C30 = Configuration(30 * DEG)


@pytest.mark.parametrize("key", sorted(EXPECTED))
def test_shape_rank_mobility(key):
    kind, method = key
    g, frames = built(kind)
    shape, rank = EXPECTED[key]
    M = assemble_constraint_matrix(g, frames, Configuration(math.pi / 6), method)
    assert M.shape == shape
    rep = compute_mobility(g, frames, Configuration(math.pi / 6), method)
    assert (rep.shape, rep.rank, rep.mobility) == (shape, rank, 1)
    assert rep.shape[0] == 6 * (rep.shape[0] // 6)
    assert rep.mobility == rep.n_joints - rep.rank
    assert np.linalg.norm(M @ rep.motion_mode) < 1e-12 * np.linalg.norm(M)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_prism_mobility_one(n):
    g, frames = build_mechanism(f"prism{n}")
    for method in ("original", "equivalent"):
        rep = compute_mobility(g, None, C30, method)
        assert rep.mobility == 1
        assert rep.shape[0] == 6 * (rep.n_joints - (g.n_links if method == "original"
                                                     else g.n_platforms) + 1)


def test_equivalent_mode_is_uniform_on_platonic_hosts(platonic):
    g, _ = built(platonic)
    mode = compute_mobility(g, None, C30, "equivalent").motion_mode
    n = g.n_units
    np.testing.assert_allclose(mode, np.full(n, 1 / math.sqrt(n)), atol=1e-12)


def test_original_mode_sarrus_pattern(platonic):
    # inside every unit the joint rates follow the 6R Sarrus pattern (1, -2, 1, -1, 2, -1)
    g, _ = built(platonic)
    mode = compute_mobility(g, None, C30, "original").motion_mode
    pattern = np.array([1, -2, 1, -1, 2, -1.0])
    for u in range(g.n_units):
        rates = mode[6 * u: 6 * u + 6]
        np.testing.assert_allclose(rates, rates[0] * pattern, atol=1e-12)
    assert mode[0] > 0


def test_tetrahedron_block_structure():
    g, frames = built("tetrahedron")
    M = assemble_constraint_matrix(g, frames, C30, "original")
    S = joint_screws(g, frames, C30)
    for u in range(6):
        band = M[6 * u: 6 * u + 6]
        outside = np.delete(band, range(6 * u, 6 * u + 6), axis=1)
        assert not outside.any()
        block = band[:, 6 * u: 6 * u + 6]
        np.testing.assert_array_equal(np.abs(block), np.abs(S[:, 6 * u: 6 * u + 6]))


def test_loop_reversal_flips_band_only():
    g, frames = built("cube")
    S = joint_screws(g, frames, C30)
    M = loop_matrix(g, S)
    k = 7
    rev = tuple((j, -s) for j, s in reversed(g.loops[k]))
    from dataclasses import replace

    g2 = replace(g, loops=g.loops[:k] + (rev,) + g.loops[k + 1:])
    M2 = loop_matrix(g2, S)
    np.testing.assert_array_equal(M2[6 * k: 6 * k + 6], -M[6 * k: 6 * k + 6])
    np.testing.assert_array_equal(np.delete(M2, range(6 * k, 6 * k + 6), 0),
                                  np.delete(M, range(6 * k, 6 * k + 6), 0))
    assert numerical_rank(M2) == numerical_rank(M)


@pytest.mark.parametrize("kind", PLATONIC + ("prism5",))
def test_scale_independence(kind):
    g, _ = built(kind) if kind in PLATONIC else build_mechanism(kind)
    for method in ("original", "equivalent"):
        base = compute_mobility(g, None, C30, method)
        doubled = compute_mobility(g, None, Configuration(30 * DEG, d_scale=2.0), method)
        assert doubled.rank == base.rank and doubled.mobility == 1
        M = assemble_constraint_matrix(g, None, C30, method)
        assert numerical_rank(1e3 * M) == numerical_rank(1e-3 * M) == base.rank


def test_rank_tolerance_robust():
    for (kind, method), (_, rank) in EXPECTED.items():
        M = assemble_constraint_matrix(built(kind)[0], None, C30, method)
        assert {numerical_rank(M, t) for t in (1e-12, 1e-10, 1e-9, 1e-8, 1e-6)} == {rank}


@pytest.mark.parametrize("kind", PLATONIC + ("prism3", "prism6"))
def test_synchronization(kind):
    g, _ = built(kind) if kind in PLATONIC else build_mechanism(kind)
    rep = synchronization_check(g, None, Configuration(35 * DEG))
    assert rep.passed
    assert rep.fold_error < 1e-9 and rep.mid_error < 1e-9 and rep.radial_error < 1e-9
    assert np.all(rep.fold_rates > 0)


def test_platform_velocities_radial_equal(platonic):
    g, _ = built(platonic)
    v = platform_velocities(g, C30)
    n = host_layout(platonic).poly.normals
    speeds = np.einsum("ij,ij->i", v, n)
    np.testing.assert_allclose(v, speeds[:, None] * n, atol=1e-12)
    np.testing.assert_allclose(speeds, speeds[0], rtol=1e-12)
    assert speeds[0] > 0


@pytest.mark.parametrize("kind", PLATONIC + ("prism4", "prism7"))
def test_methods_agree(kind):
    g, _ = built(kind) if kind in PLATONIC else build_mechanism(kind)
    for deg in (15, 30, 45, 60, 75):
        c = Configuration(deg * DEG)
        assert compute_mobility(g, None, c, "original").mobility == 1
        assert compute_mobility(g, None, c, "equivalent").mobility == 1
        v1 = platform_velocities(g, c, "original")
        v2 = platform_velocities(g, c, "equivalent")
        np.testing.assert_allclose(v1, v2, atol=1e-9)


def test_sweep_tetrahedron_and_cube():
    g, _ = built("tetrahedron")
    res = sweep_rank(g, C30, 5 * DEG, 85 * DEG, 81, "original")
    assert set(res.ranks) == {35} and res.deviations == []
    assert set(res.endpoints) == {0.0, math.pi / 2}
    g, _ = built("cube")
    res = sweep_rank(g, C30, 5 * DEG, 85 * DEG, 81, "equivalent")
    assert set(res.ranks) == {11} and res.deviations == []


def test_sweep_endpoints_recorded_not_judged():
    g, _ = built("tetrahedron")
    res = sweep_rank(g, C30, 0.0, math.pi / 2, 7, "original")
    # folded and deployed poses are singular; they stay out of the deviation list
    assert res.ranks[0] < 35 and res.ranks[-1] < 35
    assert res.deviations == []
    assert res.endpoints[0.0] == res.ranks[0]


def test_sweep_preconditions():
    g, _ = built("tetrahedron")
    with pytest.raises(BuildError):
        sweep_rank(g, C30, 0.5, 0.4, 10)
    with pytest.raises(BuildError):
        sweep_rank(g, C30, 0.1, 0.4, 1)


def test_integrate_tetrahedron_200_steps():
    g, _ = built("tetrahedron")
    tr = integrate_motion(g, C30, 10 * DEG, 80 * DEG, 200)
    assert tr.fold.shape == (201, 6)
    assert tr.max_spread < 1e-6 and tr.max_mid_error < 1e-6
    assert tr.fold[-1] == pytest.approx(np.full(6, 80 * DEG), abs=1e-9)
    assert tr.closure_error < 1e-9


def test_integrate_dodecahedron():
    g, _ = built("dodecahedron")
    tr = integrate_motion(g, C30, 20 * DEG, 70 * DEG, 40)
    assert tr.max_spread < 1e-6 and tr.max_mid_error < 1e-6 and tr.closure_error < 1e-9


def test_integrate_zero_length():
    g, _ = built("cube")
    tr = integrate_motion(g, C30, 40 * DEG, 40 * DEG, 10)
    assert len(tr.phi) == 1 and tr.max_spread == 0.0


def test_integrated_pose_matches_direct_construction():
    # POE pose at the end must equal the pose built directly at phi1, seen from platform 0
    g, _ = built("cube")
    phi0, phi1 = 20 * DEG, 65 * DEG
    tr = integrate_motion(g, C30, phi0, phi1, 60)
    model = PoeModel(g, joint_screws(g, None, Configuration(phi0)))
    S_end = model.screws(tr.displacement)
    layout = host_layout("cube")
    n0 = layout.poly.normals[0]
    shift = layout.platform_offset(1.0, phi1) - layout.platform_offset(1.0, phi0)
    T = RigidTransform(np.eye(3), -shift * n0)
    S_direct = adjoint(T, joint_screws(g, None, Configuration(phi1)))
    np.testing.assert_allclose(S_end, S_direct, atol=1e-9)


def test_integrate_prism_classes():
    g, _ = build_mechanism("prism3")
    tr = integrate_motion(g, C30, 10 * DEG, 70 * DEG, 120)
    layout = host_layout("prism3")
    want = [layout.unit_phi(s, 70 * DEG) for s in layout.sites]
    np.testing.assert_allclose(tr.fold[-1], want, atol=1e-7)
    assert tr.max_spread < 1e-6


def test_integrate_preconditions():
    g, _ = built("tetrahedron")
    with pytest.raises(BuildError):
        integrate_motion(g, C30, 10 * DEG, 90 * DEG, 10)
    with pytest.raises(BuildError):
        integrate_motion(g, C30, 10 * DEG, 20 * DEG, 0)


def test_errors():
    g, frames = built("tetrahedron")
    with pytest.raises(BuildError):
        assemble_constraint_matrix(g, frames[:5], C30)
    with pytest.raises(BuildError):
        assemble_constraint_matrix(g, None, Configuration(2.0))
    with pytest.raises(BuildError):
        assemble_constraint_matrix(g, None, C30, "lagrangian")
    with pytest.raises(MobilityError):
        synchronization_check(g, None, Configuration(0.0))
