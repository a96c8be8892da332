"""The single Sarrus linkage in its local frame.

Local frame: origin at the centre of the virtual plane between the two
platforms, ``y`` along the straight-line motion, ``z`` normal to the virtual
plane. Limb 1 sits at ``x = -l``, limb 2 at ``x = +l``; platform 1 carries
joints 1 and 4 (``y < 0``), platform 2 carries joints 3 and 6 (``y > 0``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .screw import DEFAULT_TOL, ScrewError, nullspace_basis, numerical_rank, prismatic


@dataclass(frozen=True)
class SarrusParams:
    """Geometry of one Sarrus unit.

    ``a`` is the platform edge length, ``gamma`` the angle between the two
    limbs' joint axes and ``phi`` the fold angle between a half-limb and its
    platform (0 folded, pi/2 deployed). ``b`` and ``l`` are both pinned to
    ``a / 2`` and ``alpha`` to ``gamma / 2``.
    """

    a: float
    gamma: float
    phi: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"edge length must be positive, got {self.a}")
        if not 0.0 < self.gamma < np.pi:
            raise ValueError(f"gamma must lie in (0, pi), got {self.gamma}")
        if not -1e-12 <= self.phi <= np.pi / 2 + 1e-12:
            raise ValueError(f"phi must lie in [0, pi/2], got {self.phi}")

    @property
    def alpha(self) -> float:
        return self.gamma / 2.0

    @property
    def b(self) -> float:
        return self.a / 2.0

    @property
    def l(self) -> float:  # noqa: E743
        return self.a / 2.0


def limb1_screws(p: SarrusParams) -> np.ndarray:
    """Joint screws 1..3 (columns) of limb 1 in the local frame."""
    sa, ca = np.sin(p.alpha), np.cos(p.alpha)
    sp, cp = np.sin(p.phi), np.cos(p.phi)
    b, l = p.b, p.l
    return np.array(
        [
            [sa, 0.0, ca, -b * ca * sp, l * ca, b * sa * sp],
            [sa, 0.0, ca, 0.0, l * ca - b * cp, 0.0],
            [sa, 0.0, ca, b * ca * sp, l * ca, -b * sa * sp],
        ]
    ).T


def limb2_screws(p: SarrusParams) -> np.ndarray:
    """Joint screws 4..6 (columns) of limb 2 in the local frame."""
    sa, ca = np.sin(p.alpha), np.cos(p.alpha)
    sp, cp = np.sin(p.phi), np.cos(p.phi)
    b, l = p.b, p.l
    return np.array(
        [
            [-sa, 0.0, ca, -b * ca * sp, -l * ca, -b * sa * sp],
            [-sa, 0.0, ca, 0.0, b * cp - l * ca, 0.0],
            [-sa, 0.0, ca, b * ca * sp, -l * ca, b * sa * sp],
        ]
    ).T


def unit_screws(p: SarrusParams) -> np.ndarray:
    """All six joint screws as a 6x6 column matrix."""
    return np.hstack([limb1_screws(p), limb2_screws(p)])


def _swap(S: np.ndarray) -> np.ndarray:
    return np.vstack([S[3:], S[:3]])


def limb_constraint_system(limb, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the screws reciprocal to a 3R limb."""
    S = np.asarray(limb, dtype=float)
    if S.shape != (6, 3):
        raise ScrewError(f"limb must be a 6x3 screw matrix, got {S.shape}")
    if numerical_rank(S, tol) != 3:
        raise ScrewError("degenerate limb: joint screws are not independent")
    basis = nullspace_basis(_swap(S).T, tol)
    return np.column_stack(basis)


def constraint_multiset(p: SarrusParams, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Both limbs' constraint screws stacked as a 6x6 column matrix."""
    return np.hstack(
        [limb_constraint_system(limb1_screws(p), tol), limb_constraint_system(limb2_screws(p), tol)]
    )


def equivalent_motion_screw(p: SarrusParams | None = None) -> np.ndarray:
    """Prismatic screw along local ``y`` replacing the whole unit."""
    return prismatic([0.0, 1.0, 0.0])


def platform_separation(p: SarrusParams) -> float:
    """Displacement of platform 2 from platform 1 along local ``y``.

    Read off the limb: the foot points of axes 1 and 3 (``omega x v`` for a
    unit ``omega``) lie on the two platform edges.
    """
    S = limb1_screws(p)
    feet = [np.cross(S[:3, k], S[3:, k]) for k in (0, 2)]
    return float(feet[1][1] - feet[0][1])


# Closed-form constraint bases as published, kept as fixtures for subspace checks.


def reference_limb1_constraints(p: SarrusParams) -> np.ndarray:
    ta, cot = np.tan(p.alpha), 1.0 / np.tan(p.alpha)
    return np.array(
        [[ta, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, -cot, 0, 1]], dtype=float
    ).T


def reference_limb2_constraints(p: SarrusParams) -> np.ndarray:
    ta, cot = np.tan(p.alpha), 1.0 / np.tan(p.alpha)
    return np.array(
        [[-ta, 0, 1, 0, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, cot, 0, 1]], dtype=float
    ).T


REFERENCE_COMBINED_BASIS = np.array(
    [
        [1, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, -1, 0, 1],
        [-1, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 1],
    ],
    dtype=float,
).T


def subspace_distance(A, B, tol: float = DEFAULT_TOL) -> float:
    """Sine of the largest principal angle between two column spans."""

    def span(M):
        U, sv, _ = np.linalg.svd(np.asarray(M, dtype=float), full_matrices=False)
        return U[:, : numerical_rank(M, tol)]

    Qa, Qb = span(A), span(B)
    if Qa.shape[1] != Qb.shape[1]:
        return 1.0
    # residual of B after projecting onto A; its 2-norm is the sine directly
    return float(np.linalg.norm(Qb - Qa @ (Qa.T @ Qb), 2))
