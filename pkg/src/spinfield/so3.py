"""Rotation group SO(3) in the z-y-z Euler convention.

A rotation with Euler angles (alpha, beta, gamma) is the matrix
``Rz(alpha) @ Ry(beta) @ Rz(gamma)``.  The isotropy group of the north pole
is the subgroup of rotations about the z axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ChartDomainError

TWO_PI = 2.0 * np.pi
ANGLE_TOL = 1e-10
POLE_EPS = 1e-9
# below this sin(beta) the z-y-z decomposition is treated as degenerate
_GIMBAL_TOL = 1e-12


def _wrap(angle):
    a = np.mod(angle, TWO_PI)
    # mod can return exactly 2*pi for tiny negative inputs
    return np.where(a >= TWO_PI, 0.0, a)


def euler_to_matrix(alpha, beta, gamma) -> np.ndarray:
    """Vectorised ``Rz(alpha) Ry(beta) Rz(gamma)``; output shape ``(..., 3, 3)``."""
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float))
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    m = np.empty(alpha.shape + (3, 3))
    m[..., 0, 0] = ca * cb * cg - sa * sg
    m[..., 0, 1] = -ca * cb * sg - sa * cg
    m[..., 0, 2] = ca * sb
    m[..., 1, 0] = sa * cb * cg + ca * sg
    m[..., 1, 1] = -sa * cb * sg + ca * cg
    m[..., 1, 2] = sa * sb
    m[..., 2, 0] = -sb * cg
    m[..., 2, 1] = sb * sg
    m[..., 2, 2] = cb
    return m


def matrix_to_euler(m):
    """Recover canonical z-y-z angles from rotation matrices ``(..., 3, 3)``.

    At gimbal lock (beta in {0, pi}) gamma is set to 0 and the free angle is
    folded into alpha.
    """
    m = np.asarray(m, float)
    sb = np.hypot(m[..., 0, 2], m[..., 1, 2])
    beta = np.arctan2(sb, np.clip(m[..., 2, 2], -1.0, 1.0))
    alpha = np.arctan2(m[..., 1, 2], m[..., 0, 2])
    gamma = np.arctan2(m[..., 2, 1], -m[..., 2, 0])
    degenerate = sb < _GIMBAL_TOL
    if np.any(degenerate):
        north = m[..., 2, 2] > 0
        a_north = np.arctan2(m[..., 1, 0], m[..., 0, 0])
        a_south = np.arctan2(-m[..., 1, 0], -m[..., 0, 0])
        alpha = np.where(degenerate, np.where(north, a_north, a_south), alpha)
        gamma = np.where(degenerate, 0.0, gamma)
        beta = np.where(degenerate, np.where(north, 0.0, np.pi), beta)
    return _wrap(alpha), beta, _wrap(gamma)


def axis_angle_matrix(axis, angle) -> np.ndarray:
    """Counter-clockwise rotation by ``angle`` about ``axis`` (right-hand rule)."""
    u = np.asarray(axis, float)
    u = u / np.linalg.norm(u)
    k = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


@dataclass(frozen=True)
class Rotation:
    """Element of SO(3) stored as canonical z-y-z Euler angles."""

    alpha: float
    beta: float
    gamma: float
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alpha, beta, gamma = float(self.alpha), float(self.beta), float(self.gamma)
        if not 0.0 <= beta <= np.pi:
            # out-of-range beta: go through the matrix to canonicalise
            alpha, beta, gamma = (float(v) for v in matrix_to_euler(
                euler_to_matrix(alpha, beta, gamma)))
        object.__setattr__(self, "alpha", float(_wrap(alpha)))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", float(_wrap(gamma)))
        mat = euler_to_matrix(self.alpha, self.beta, self.gamma)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_matrix(cls, m) -> "Rotation":
        a, b, g = matrix_to_euler(np.asarray(m, float))
        return cls(float(a), float(b), float(g))

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def about_axis(cls, axis, angle: float) -> "Rotation":
        return cls.from_matrix(axis_angle_matrix(axis, angle))

    @property
    def euler(self) -> tuple[float, float, float]:
        return self.alpha, self.beta, self.gamma

    def inverse(self) -> "Rotation":
        return Rotation.from_matrix(self.matrix.T)

    def __matmul__(self, other):
        if isinstance(other, KElement):
            other = other.as_rotation()
        if isinstance(other, Rotation):
            return Rotation.from_matrix(self.matrix @ other.matrix)
        if isinstance(other, SpherePoint):
            return act(self, other)
        return NotImplemented

    def is_close(self, other: "Rotation", tol: float = ANGLE_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) < tol)


@dataclass(frozen=True)
class KElement:
    """Rotation by ``gamma`` about the north-south axis."""

    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(_wrap(float(self.gamma))))

    def as_rotation(self) -> Rotation:
        # canonical form folds the angle into alpha (beta = 0 => gamma = 0)
        return Rotation(self.gamma, 0.0, 0.0)

    def inverse(self) -> "KElement":
        return KElement(-self.gamma)

    def __matmul__(self, other):
        if isinstance(other, KElement):
            return KElement(self.gamma + other.gamma)
        if isinstance(other, Rotation):
            return self.as_rotation() @ other
        return NotImplemented


@dataclass(frozen=True)
class SpherePoint:
    """Point of the unit sphere in colatitude/longitude coordinates."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not 0.0 <= theta <= np.pi:
            raise ValueError(f"colatitude {theta} outside [0, pi]")
        phi = 0.0 if theta in (0.0, np.pi) else float(_wrap(float(self.phi)))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        v = np.asarray(v, float)
        v = v / np.linalg.norm(v)
        theta = float(np.arctan2(np.hypot(v[0], v[1]), v[2]))
        phi = float(np.arctan2(v[1], v[0]))
        return cls(theta, phi)

    @classmethod
    def north(cls) -> "SpherePoint":
        return cls(0.0, 0.0)

    @classmethod
    def south(cls) -> "SpherePoint":
        return cls(np.pi, 0.0)

    @property
    def vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    def distance(self, other: "SpherePoint") -> float:
        """Geodesic distance on the unit sphere."""
        a, b = self.vector, other.vector
        return float(np.arctan2(np.linalg.norm(np.cross(a, b)), a @ b))

    def near_pole(self, eps: float = POLE_EPS) -> bool:
        return self.theta < eps or np.pi - self.theta < eps


def compose(r1, r2):
    """Group product ``r1 r2``; two K elements compose inside K."""
    return r1 @ r2


def inverse(r):
    return r.inverse()


def act(r: Rotation, x: SpherePoint) -> SpherePoint:
    return SpherePoint.from_vector(r.matrix @ x.vector)


def section(x: SpherePoint) -> Rotation:
    """Canonical representative ``g_x`` with ``g_x x0 = x`` and third Euler angle 0.

    Poles get the identity (north) and ``(0, pi, 0)`` (south).
    """
    return Rotation(x.phi, x.theta, 0.0)


def character(s: int, k) -> complex:
    """Character ``chi_s(k) = exp(i s gamma)`` of the subgroup K."""
    gamma = k.gamma if isinstance(k, KElement) else float(k)
    return complex(np.exp(1j * s * gamma))


def k_factor(r2: Rotation, r1: Rotation, x: SpherePoint) -> KElement:
    """The K element ``g_{r2^-1 x}^-1 r2^-1 r1 g_{r1^-1 x}`` relating two chart representatives."""
    return KElement(float(np.arctan2(*_k_factor_sin_cos(r2, r1, x))))


def k_factor_matrix(r2: Rotation, r1: Rotation, x: SpherePoint) -> np.ndarray:
    """Matrix of the k-factor product before projection onto K."""
    y1 = act(r1.inverse(), x)
    y2 = act(r2.inverse(), x)
    if y1.near_pole() or y2.near_pole():
        raise ChartDomainError("point is within the pole exclusion radius of a chart")
    return section(y2).matrix.T @ r2.matrix.T @ r1.matrix @ section(y1).matrix


def _k_factor_sin_cos(r2, r1, x):
    m = k_factor_matrix(r2, r1, x)
    return m[1, 0], m[0, 0]


def random_rotations(n: int, rng: np.random.Generator) -> list[Rotation]:
    """Haar-distributed rotations via normalised Gaussian quaternions."""
    return [Rotation.from_matrix(m) for m in random_rotation_matrices(n, rng)]


def random_rotation_matrices(n: int, rng: np.random.Generator) -> np.ndarray:
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    m = np.empty((n, 3, 3))
    m[:, 0, 0] = 1 - 2 * (y * y + z * z)
    m[:, 0, 1] = 2 * (x * y - z * w)
    m[:, 0, 2] = 2 * (x * z + y * w)
    m[:, 1, 0] = 2 * (x * y + z * w)
    m[:, 1, 1] = 1 - 2 * (x * x + z * z)
    m[:, 1, 2] = 2 * (y * z - x * w)
    m[:, 2, 0] = 2 * (x * z - y * w)
    m[:, 2, 1] = 2 * (y * z + x * w)
    m[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return m


def random_sphere_points(n: int, rng: np.random.Generator) -> list[SpherePoint]:
    v = rng.standard_normal((n, 3))
    return [SpherePoint.from_vector(u) for u in v]
