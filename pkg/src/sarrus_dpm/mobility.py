"""Constraint-matrix assembly, mobility, and the one-DOF motion mode."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .builder import (
    BuildError,
    Configuration,
    MechanismGraph,
    PlatformFrame,
    check_configuration,
    host_layout,
    unit_params,
)
from .sarrus import equivalent_motion_screw, unit_screws
from .screw import (
    DEFAULT_TOL,
    RigidTransform,
    adjoint,
    exp_twist,
    nullspace_basis,
    numerical_rank,
    singular_gap,
)

METHODS = ("original", "equivalent")


class MobilityError(RuntimeError):
    """Analysis precondition failed (e.g. no unique motion mode)."""


@dataclass
class AnalysisReport:
    kind: str
    method: str
    phi: float
    n_joints: int
    shape: tuple[int, int]
    rank: int
    mobility: int
    tol: float
    motion_mode: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)
    kept_sigma: float = float("nan")  # smallest retained singular value / sigma_max
    dropped_sigma: float = float("nan")  # largest discarded singular value / sigma_max

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "method": self.method,
            "phi_deg": math.degrees(self.phi),
            "n_joints": self.n_joints,
            "matrix_rows": self.shape[0],
            "matrix_cols": self.shape[1],
            "rank": self.rank,
            "mobility": self.mobility,
            "tol": self.tol,
            "sigma_kept_rel": self.kept_sigma,
            "sigma_dropped_rel": self.dropped_sigma,
            "motion_mode": None if self.motion_mode is None else self.motion_mode.tolist(),
            "notes": list(self.notes),
        }


def _resolve(graph: MechanismGraph, method: str) -> MechanismGraph:
    if method not in METHODS:
        raise BuildError(f"method must be one of {METHODS}, got {method!r}")
    if method == "equivalent":
        return graph.equivalent()
    if graph.method != "original":
        raise BuildError("original method needs the revolute-joint graph")
    return graph


def configuration_frames(graph: MechanismGraph, config: Configuration) -> list[PlatformFrame]:
    return host_layout(graph.kind).frames(config.a, config.phi)


def joint_screws(graph: MechanismGraph, frames, config: Configuration) -> np.ndarray:
    """Body-frame screws of every joint of ``graph`` as a ``(6, n_joints)`` matrix."""
    gamma = check_configuration(graph.kind, config)
    if frames is None:
        frames = configuration_frames(graph, config)
    if len(frames) != graph.n_units:
        raise BuildError(f"{len(frames)} frames for {graph.n_units} Sarrus units")
    transforms = [f.transform(f.d * config.d_scale) for f in frames]
    S = np.zeros((6, graph.n_joints))
    if graph.method == "equivalent":
        for j in graph.joints:
            S[:, j.id] = adjoint(transforms[j.unit], equivalent_motion_screw())
        return S
    layout = host_layout(graph.kind)
    params = unit_params(layout, config, gamma)
    local = [unit_screws(p) for p in params]
    for j in graph.joints:
        col = 3 * (j.limb - 1) + j.position - 1
        S[:, j.id] = adjoint(transforms[j.unit], local[j.unit][:, col])
    return S


def loop_matrix(graph: MechanismGraph, screws: np.ndarray) -> np.ndarray:
    """Kirchhoff stacking: one signed 6-row band per independent loop."""
    M = np.zeros((6 * len(graph.loops), graph.n_joints))
    for r, loop in enumerate(graph.loops):
        for jid, sign in loop:
            M[6 * r : 6 * r + 6, jid] += sign * screws[:, jid]
    return M


def assemble_constraint_matrix(graph, frames=None, config: Configuration | None = None,
                               method: str = "original") -> np.ndarray:
    if config is None:
        raise BuildError("configuration required")
    g = _resolve(graph, method)
    return loop_matrix(g, joint_screws(g, frames, config))


def _normalize_mode(graph: MechanismGraph, v: np.ndarray) -> np.ndarray:
    lead = v[0] * (graph.joints[0].fold_sign if graph.method == "original" else 1)
    if abs(lead) < 1e-12:
        raise MobilityError("motion mode does not move the first Sarrus unit")
    v = v / np.linalg.norm(v)
    return v if lead > 0 else -v


def compute_mobility(graph, frames=None, config: Configuration | None = None,
                     method: str = "original", tol: float = DEFAULT_TOL) -> AnalysisReport:
    g = _resolve(graph, method)
    M = loop_matrix(g, joint_screws(g, frames, config))
    rank = numerical_rank(M, tol)
    kept, dropped = singular_gap(M, rank)
    mobility = g.n_joints - rank
    mode = None
    if mobility == 1:
        mode = _normalize_mode(g, nullspace_basis(M, tol)[0])
    return AnalysisReport(
        g.kind.label, method, config.phi, g.n_joints, M.shape, rank, mobility, tol, mode,
        list(g.notes), kept, dropped,
    )


def motion_mode(graph, config: Configuration, method="original", tol=DEFAULT_TOL) -> np.ndarray:
    rep = compute_mobility(graph, None, config, method, tol)
    if rep.mobility != 1:
        raise MobilityError(f"mobility is {rep.mobility}; no unique motion mode")
    return rep.motion_mode


def _tree(graph: MechanismGraph):
    """BFS spanning tree from platform 0: per link, signed joint path from the root."""
    adj: dict[int, list[tuple[int, int, int]]] = {k: [] for k in range(graph.n_links)}
    for j in graph.joints:
        a, b = j.links
        adj[a].append((b, j.id, 1))
        adj[b].append((a, j.id, -1))
    path = {0: []}
    queue = deque([0])
    while queue:
        cur = queue.popleft()
        for nb, jid, s in adj[cur]:
            if nb not in path:
                path[nb] = path[cur] + [(jid, s)]
                queue.append(nb)
    if len(path) != graph.n_links:
        raise BuildError("mechanism graph is disconnected")
    return path


def platform_twists(graph: MechanismGraph, screws: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Twist of every platform relative to platform 0, shape ``(n_platforms, 6)``."""
    path = _tree(graph)
    out = np.zeros((graph.n_platforms, 6))
    for p in range(graph.n_platforms):
        for jid, s in path[p]:
            out[p] += s * rates[jid] * screws[:, jid]
    return out


def platform_velocities(graph, config: Configuration, method="original", tol=DEFAULT_TOL):
    """Centroid-relative translation rates of the platforms, unit-normalized overall."""
    g = _resolve(graph, method)
    S = joint_screws(g, None, config)
    mode = motion_mode(g, config, method, tol)
    tw = platform_twists(g, S, mode)
    if np.max(np.abs(tw[:, :3])) > 1e-9 * max(1.0, np.max(np.abs(tw))):
        raise MobilityError("platforms rotate relative to each other")
    v = tw[:, 3:] - tw[:, 3:].mean(axis=0)
    return v / np.linalg.norm(v)


@dataclass
class SyncReport:
    kind: str
    phi: float
    fold_rates: np.ndarray  # (n_units, 4) outer-joint rates in fold convention
    mid_rates: np.ndarray  # (n_units, 2)
    fold_error: float  # max relative spread of fold rates within each unit class
    mid_error: float  # max relative |mid - 2 outer|
    radial_error: float  # max deviation of platform velocity from radial, equal speed
    passed: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "phi_deg": math.degrees(self.phi),
            "fold_rates": self.fold_rates[:, 0].tolist(),
            "mid_rates": self.mid_rates[:, 0].tolist(),
            "fold_error": self.fold_error,
            "mid_error": self.mid_error,
            "radial_error": self.radial_error,
            "passed": self.passed,
        }


def unit_classes(graph: MechanismGraph) -> list[list[int]]:
    """Units grouped by their opening ratio; a single class for Platonic hosts."""
    layout = host_layout(graph.kind)
    groups: dict[float, list[int]] = {}
    for u, s in enumerate(layout.sites):
        groups.setdefault(round(s.kappa, 9), []).append(u)
    return list(groups.values())


def synchronization_check(graph, frames=None, config: Configuration | None = None,
                          tol: float = DEFAULT_TOL, rtol: float = 1e-9) -> SyncReport:
    g = _resolve(graph, "original")
    rep = compute_mobility(g, frames, config, "original", tol)
    if rep.mobility != 1:
        raise MobilityError(f"mobility is {rep.mobility}; no unique motion mode")
    mode = rep.motion_mode
    fold = np.zeros((g.n_units, 4))
    mid = np.zeros((g.n_units, 2))
    for j in g.joints:
        r = j.fold_sign * mode[j.id]
        if j.position == 2:
            mid[j.unit, j.limb - 1] = r
        else:
            fold[j.unit, 2 * (j.limb - 1) + (j.position // 3)] = r
    scale = np.max(np.abs(fold))
    fold_err = 0.0
    for cls in unit_classes(g):
        block = fold[cls]
        fold_err = max(fold_err, float(np.ptp(block) / scale))
    mid_err = float(np.max(np.abs(mid - 2.0 * fold[:, [0, 2]])) / scale)
    v = platform_velocities(g, config, "original", tol)
    layout = host_layout(g.kind)
    n = layout.poly.normals
    radial = np.einsum("ij,ij->i", v, n)
    off = np.linalg.norm(v - radial[:, None] * n, axis=1)
    if g.kind.name == "prism":
        rad_err = float(np.max(off) / np.max(np.abs(radial)))
    else:
        rad_err = float(max(np.max(off), np.ptp(radial)) / np.max(np.abs(radial)))
    passed = fold_err < rtol and mid_err < rtol and rad_err < rtol and np.all(radial > 0)
    return SyncReport(g.kind.label, config.phi, fold, mid, fold_err, mid_err, rad_err,
                      bool(passed))


@dataclass
class SweepResult:
    kind: str
    method: str
    phis: np.ndarray
    ranks: list[int]
    generic_rank: int
    deviations: list[float]  # interior phi values whose rank differs
    endpoints: dict[float, int]  # rank at excluded boundary angles 0 and pi/2

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "method": self.method,
            "phi_deg": [math.degrees(p) for p in self.phis],
            "rank": self.ranks,
            "generic_rank": self.generic_rank,
            "deviations_deg": [math.degrees(p) for p in self.deviations],
            "endpoint_rank": {f"{math.degrees(k):g}": v for k, v in self.endpoints.items()},
        }


def sweep_rank(graph, config: Configuration, phi_from: float, phi_to: float, steps: int,
               method: str = "original", tol: float = DEFAULT_TOL,
               probe_endpoints: bool = True) -> SweepResult:
    """Rank at ``steps`` evenly spaced angles; boundary angles recorded, never judged."""
    if not (0.0 <= phi_from < phi_to <= math.pi / 2 + 1e-12):
        raise BuildError("need 0 <= phi_from < phi_to <= pi/2")
    if steps < 2:
        raise BuildError("steps must be >= 2")
    g = _resolve(graph, method)
    phis = np.linspace(phi_from, phi_to, steps)

    def rank_at(phi):
        cfg = Configuration(float(phi), config.a, config.gamma, config.d_scale)
        return numerical_rank(loop_matrix(g, joint_screws(g, None, cfg)), tol)

    ranks = [rank_at(p) for p in phis]
    interior = [(p, r) for p, r in zip(phis, ranks) if 1e-12 < p < math.pi / 2 - 1e-12]
    generic = rank_at(math.pi / 6)
    deviations = [float(p) for p, r in interior if r != generic]
    endpoints = {}
    if probe_endpoints:
        endpoints = {0.0: rank_at(0.0), math.pi / 2: rank_at(math.pi / 2)}
    return SweepResult(g.kind.label, method, phis, ranks, generic, deviations, endpoints)


@dataclass
class Trajectory:
    kind: str
    phi: np.ndarray  # path parameter: global fold angle
    fold: np.ndarray  # (steps+1, n_units) fold angle per unit (limb 1 outer joint)
    outer: np.ndarray  # (steps+1, n_units, 4) all outer-joint fold angles
    mid: np.ndarray  # (steps+1, n_units, 2) mid-joint angles
    spread: np.ndarray  # per step, max spread of fold angles within each unit class
    mid_error: np.ndarray  # per step, max |mid - 2 fold|
    closure_error: float  # max loop-closure residual at the end
    displacement: np.ndarray  # final joint displacements from the start pose

    @property
    def max_spread(self) -> float:
        return float(np.max(self.spread))

    @property
    def max_mid_error(self) -> float:
        return float(np.max(self.mid_error))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "steps": len(self.phi) - 1,
            "phi0_deg": math.degrees(self.phi[0]),
            "phi1_deg": math.degrees(self.phi[-1]),
            "max_spread_rad": self.max_spread,
            "max_mid_error_rad": self.max_mid_error,
            "closure_error": self.closure_error,
            "final_fold_deg": np.degrees(self.fold[-1]).tolist(),
        }


class PoeModel:
    """Forward kinematics by products of exponentials over a spanning tree."""

    def __init__(self, graph: MechanismGraph, home: np.ndarray):
        self.graph = graph
        self.home = home
        self.path = _tree(graph)
        # order links so parents come first
        self.order = sorted(self.path, key=lambda k: len(self.path[k]))
        self.parent = {}
        for link in self.order[1:]:
            jid, s = self.path[link][-1]
            a, b = graph.joints[jid].links
            self.parent[link] = (a if s > 0 else b, jid, s)

    def poses(self, dtheta: np.ndarray) -> dict[int, RigidTransform]:
        out = {0: RigidTransform.identity()}
        for link in self.order[1:]:
            par, jid, s = self.parent[link]
            out[link] = out[par].compose(exp_twist(self.home[:, jid], s * dtheta[jid]))
        return out

    def screws(self, dtheta: np.ndarray) -> np.ndarray:
        poses = self.poses(dtheta)
        S = np.empty_like(self.home)
        for j in self.graph.joints:
            S[:, j.id] = adjoint(poses[j.links[0]], self.home[:, j.id])
        return S

    def closure_error(self, dtheta: np.ndarray) -> float:
        err = 0.0
        for loop in self.graph.loops:
            T = RigidTransform.identity()
            for jid, s in loop:
                T = T.compose(exp_twist(self.home[:, jid], s * dtheta[jid]))
            err = max(err, float(np.max(np.abs(T.matrix() - np.eye(4)))))
        return err


def integrate_motion(graph, config: Configuration, phi0: float, phi1: float, steps: int,
                     tol: float = DEFAULT_TOL) -> Trajectory:
    """RK4 integration of the motion mode, parameterized by the global fold angle.

    The global angle is the fold angle of the fastest-opening unit (every unit on
    a Platonic host). Starts from the synchronized pose at ``phi0`` and follows
    the nullspace of the Kirchhoff matrix rebuilt at every stage from
    product-of-exponentials forward kinematics.
    """
    g = _resolve(graph, "original")
    if steps < 1:
        raise BuildError("steps must be >= 1")
    if not (0.0 < phi0 < math.pi / 2 and 0.0 < phi1 < math.pi / 2):
        raise BuildError("phi0 and phi1 must lie in (0, pi/2)")
    layout = host_layout(g.kind)
    ref_unit = next(u for u, s in enumerate(layout.sites)
                    if math.isclose(s.kappa, layout.kappa_max, rel_tol=1e-12))
    ref = next(j for j in g.joints if j.unit == ref_unit and j.limb == 1 and j.position == 1)
    start = Configuration(phi0, config.a, config.gamma, config.d_scale)
    model = PoeModel(g, joint_screws(g, None, start))
    params0 = unit_params(layout, start, check_configuration(g.kind, start))
    phi_units0 = np.array([p.phi for p in params0])

    def rate(dtheta):
        M = loop_matrix(g, model.screws(dtheta))
        basis = nullspace_basis(M, tol)
        if len(basis) != 1:
            raise MobilityError(
                f"rank drop near fold angle {math.degrees(phi0 + dtheta[ref.id]):.6f} deg"
            )
        v = basis[0]
        return v / (v[ref.id] * ref.fold_sign)

    n = g.n_joints
    dtheta = np.zeros(n)
    h = (phi1 - phi0) / steps
    states = [dtheta.copy()]
    for _ in range(steps if phi1 != phi0 else 0):
        k1 = rate(dtheta)
        k2 = rate(dtheta + 0.5 * h * k1)
        k3 = rate(dtheta + 0.5 * h * k2)
        k4 = rate(dtheta + h * k3)
        dtheta = dtheta + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        states.append(dtheta.copy())
    if phi1 == phi0:
        steps = 0

    fs = np.array([j.fold_sign for j in g.joints])
    n_steps = len(states)
    outer = np.zeros((n_steps, g.n_units, 4))
    mid = np.zeros((n_steps, g.n_units, 2))
    for t, d in enumerate(states):
        ang = fs * d
        for j in g.joints:
            if j.position == 2:
                mid[t, j.unit, j.limb - 1] = 2 * phi_units0[j.unit] + ang[j.id]
            else:
                outer[t, j.unit, 2 * (j.limb - 1) + j.position // 3] = phi_units0[j.unit] + ang[j.id]
    fold = outer[:, :, 0]
    spread = np.zeros(n_steps)
    for cls in unit_classes(g):
        spread = np.maximum(spread, np.ptp(outer[:, cls, :].reshape(n_steps, -1), axis=1))
    mid_error = np.max(np.abs(mid - 2.0 * outer[:, :, [0, 2]]), axis=(1, 2))
    phis = phi0 + h * np.arange(n_steps) if steps else np.array([phi0])
    return Trajectory(g.kind.label, phis, fold, outer, mid, spread, mid_error,
                      model.closure_error(states[-1]), states[-1])
