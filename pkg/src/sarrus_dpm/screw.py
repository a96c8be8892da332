"""Screw algebra in ray-order Plucker coordinates ``[omega | v]``.

Twists are plain ``(6,)`` float arrays; stacked screws are ``(6, n)`` column
matrices, the layout used for every constraint matrix in the package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9
_ORTHO_TOL = 1e-12


class ScrewError(ValueError):
    """Invalid screw, transform, or matrix input."""


def screw(omega, v) -> np.ndarray:
    """Pack angular and moment parts into one ray-order screw."""
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    if omega.shape != (3,) or v.shape != (3,):
        raise ScrewError("screw parts must be 3-vectors")
    return np.concatenate([omega, v])


def revolute(direction, point) -> np.ndarray:
    """Unit revolute screw about the line through ``point`` along ``direction``."""
    w = np.asarray(direction, dtype=float)
    n = np.linalg.norm(w)
    if n == 0.0:
        raise ScrewError("revolute axis direction is zero")
    w = w / n
    return screw(w, np.cross(np.asarray(point, dtype=float), w))


def prismatic(direction) -> np.ndarray:
    """Unit pure-translation screw."""
    t = np.asarray(direction, dtype=float)
    n = np.linalg.norm(t)
    if n == 0.0:
        raise ScrewError("prismatic direction is zero")
    return screw(np.zeros(3), t / n)


def skew(p) -> np.ndarray:
    x, y, z = np.asarray(p, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def reciprocal_product(a, b) -> float:
    """Symmetric reciprocal pairing ``omega_a . v_b + omega_b . v_a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(a[:3] @ b[3:] + b[:3] @ a[3:])


@dataclass(frozen=True)
class RigidTransform:
    """Proper rigid motion ``x -> R x + p``."""

    R: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        R = np.array(self.R, dtype=float).reshape(3, 3)
        p = np.array(self.p, dtype=float).reshape(3)
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(p))):
            raise ScrewError("transform has non-finite entries")
        if np.max(np.abs(R.T @ R - np.eye(3))) > _ORTHO_TOL * 10:
            raise ScrewError("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > _ORTHO_TOL * 10:
            raise ScrewError("rotation has det != +1")
        R.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "p", p)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous matrix."""
        T = np.eye(4)
        T[:3, :3] = self.R
        T[:3, 3] = self.p
        return T

    def adjoint_matrix(self) -> np.ndarray:
        """6x6 twist adjoint ``[[R, 0], [p^ R, R]]``."""
        Ad = np.zeros((6, 6))
        Ad[:3, :3] = self.R
        Ad[3:, 3:] = self.R
        Ad[3:, :3] = skew(self.p) @ self.R
        return Ad

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        return RigidTransform(self.R @ other.R, self.R @ other.p + self.p)

    def inverse(self) -> "RigidTransform":
        return RigidTransform(self.R.T, -self.R.T @ self.p)

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.R.T + self.p


def adjoint(T: RigidTransform, s) -> np.ndarray:
    """Map a screw (or a ``(6, n)`` stack of screws) through ``T``."""
    if not isinstance(T, RigidTransform):
        T = RigidTransform(*T)
    return T.adjoint_matrix() @ np.asarray(s, dtype=float)


def exp_twist(s, theta: float) -> RigidTransform:
    """Rigid motion generated by moving ``theta`` along the unit screw ``s``."""
    s = np.asarray(s, dtype=float)
    w, v = s[:3], s[3:]
    if np.linalg.norm(w) < 1e-14:
        return RigidTransform(np.eye(3), v * theta)
    W = skew(w)
    st, ct = np.sin(theta), np.cos(theta)
    R = np.eye(3) + st * W + (1.0 - ct) * (W @ W)
    # v = q x w for a point q on the axis: p = (I - R) q + pitch part (zero here)
    q = np.cross(w, v)
    pitch = float(w @ v)
    p = (np.eye(3) - R) @ q + pitch * theta * w
    return RigidTransform(R, p)


def _check_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ScrewError("matrix must be 2-D and nonempty")
    if not np.all(np.isfinite(M)):
        raise ScrewError("matrix has non-finite entries")
    return M


def _threshold(sv: np.ndarray, shape, tol: float) -> float:
    if not tol > 0:
        raise ScrewError("tolerance must be positive")
    smax = sv[0] if sv.size else 0.0
    return tol * smax * max(shape)


def numerical_rank(M, tol: float = DEFAULT_TOL) -> int:
    """Count singular values above ``tol * sigma_max * max(rows, cols)``."""
    M = _check_matrix(M)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > _threshold(sv, M.shape, tol)))


def nullspace_basis(M, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal right-nullspace basis, one unit vector per entry."""
    M = _check_matrix(M)
    _, sv, Vt = np.linalg.svd(M, full_matrices=True)
    rank = 0 if sv[0] == 0.0 else int(np.count_nonzero(sv > _threshold(sv, M.shape, tol)))
    return [Vt[k].copy() for k in range(rank, M.shape[1])]


def singular_gap(M, rank: int) -> tuple[float, float]:
    """Relative size of the last kept and first dropped singular values."""
    M = _check_matrix(M)
    sv = np.linalg.svd(M, compute_uv=False)
    full = np.zeros(min(M.shape) + 1)
    full[: sv.size] = sv
    top = sv[0] if sv[0] > 0 else 1.0
    return float(full[rank - 1] / top) if rank > 0 else 1.0, float(full[rank] / top)
