"""Charts, transition functions and tangent frames of the spin line bundles over S^2.

The chart ``U_R`` is the sphere minus the rotated poles ``R x0`` and ``R x1``.
Its representatives are ``g^R_x = R section(R^-1 x)`` and two charts are glued
by the character of the K element

    k_{R2,R1}(x) = section(R2^-1 x)^-1 R2^-1 R1 section(R1^-1 x).

The tangent frame ``rho_R(x) = R rho(R^-1 x)`` points along increasing
rotated longitude.  Angles in the tangent plane are measured counterclockwise
seen from outside the sphere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartDomainError
from .reports import VerificationReport
from .so3 import (POLE_EPS, KElement, Rotation, SpherePoint, act, axis_angle_matrix, character,
                  k_factor, k_factor_matrix, random_rotation_matrices)

LEMMA_TOL = 1e-9
COCYCLE_TOL = 1e-10
# k-factors must land in K: the polar entry of their matrix must be 1 to this tolerance
IN_K_TOL = 1e-10
_MAX_RESAMPLE = 1000


def _wrap_pi(angle: float) -> float:
    """Representative of ``angle`` in ``(-pi, pi]``."""
    a = float(np.mod(angle + np.pi, 2.0 * np.pi)) - np.pi
    return np.pi if a == -np.pi else a


@dataclass(frozen=True)
class Chart:
    """Chart ``U_R``: every point except the rotated poles ``R x0`` and ``R x1``."""

    label: Rotation
    eps: float = POLE_EPS

    @property
    def excluded(self) -> tuple[SpherePoint, SpherePoint]:
        return act(self.label, SpherePoint.north()), act(self.label, SpherePoint.south())

    def contains(self, x: SpherePoint) -> bool:
        return not act(self.label.inverse(), x).near_pole(self.eps)

    def coordinates(self, x: SpherePoint) -> tuple[float, float]:
        """Rotated colatitude and longitude of ``x``."""
        y = self._preimage(x)
        return y.theta, y.phi

    def representative(self, x: SpherePoint) -> Rotation:
        """``g^R_x = R section(R^-1 x)``."""
        y = self._preimage(x)
        return self.label @ Rotation(y.phi, y.theta, 0.0)

    def _preimage(self, x: SpherePoint) -> SpherePoint:
        y = act(self.label.inverse(), x)
        if y.near_pole(self.eps):
            raise ChartDomainError("point lies on an excluded pole of the chart")
        return y


@dataclass(frozen=True)
class TangentFrame:
    """Unit tangent vector ``rho`` at a base point."""

    base: SpherePoint
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, float)
        if abs(np.linalg.norm(rho) - 1.0) > 1e-12 or abs(rho @ self.base.vector) > 1e-12:
            raise ValueError("rho must be a unit vector tangent at the base point")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)


def rho(x: SpherePoint, eps: float = POLE_EPS) -> np.ndarray:
    """Unit tangent along increasing longitude, ``(-x2, x1, 0) / sqrt(x1^2 + x2^2)``."""
    v = x.vector
    r = np.hypot(v[0], v[1])
    if r < eps:
        raise ChartDomainError("longitude direction is undefined at the poles")
    return np.array([-v[1], v[0], 0.0]) / r


def rho_frame(r: Rotation, x: SpherePoint) -> TangentFrame:
    """Frame ``rho_R(x) = R rho(R^-1 x)`` of the chart ``U_R``."""
    vec = r.matrix @ rho(act(r.inverse(), x))
    return TangentFrame(x, vec / np.linalg.norm(vec))


def transition(s: int, r2: Rotation, r1: Rotation, x: SpherePoint) -> complex:
    """Transition factor from chart ``U_{r1}`` to chart ``U_{r2}`` at ``x``."""
    return character(s, k_factor(r2, r1, x))


def omega_angle(r2: Rotation, r1: Rotation, x: SpherePoint) -> float:
    """Rotation angle of ``k_{r2,r1}(x)`` in ``(-pi, pi]``."""
    return _wrap_pi(k_factor(r2, r1, x).gamma)


def psi_angle(r2: Rotation, r1: Rotation, x: SpherePoint) -> float:
    """Oriented angle from ``rho_{r1}(x)`` to ``rho_{r2}(x)``, in ``(-pi, pi]``."""
    a = rho_frame(r1, x).rho
    b = rho_frame(r2, x).rho
    return _wrap_pi(np.arctan2(x.vector @ np.cross(a, b), a @ b))


def psi_angle_acos(r2: Rotation, r1: Rotation, x: SpherePoint) -> float:
    """Same angle as :func:`psi_angle` from ``arccos`` of the inner product plus an orientation sign."""
    a = rho_frame(r1, x).rho
    b = rho_frame(r2, x).rho
    angle = float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
    return angle if x.vector @ np.cross(a, b) >= 0.0 else -angle


def k_polar_residual(r2: Rotation, r1: Rotation, x: SpherePoint) -> float:
    """Distance of the k-factor matrix from the subgroup K."""
    m = k_factor_matrix(r2, r1, x)
    return float(max(abs(m[2, 2] - 1.0), abs(m[0, 2]), abs(m[1, 2]), abs(m[2, 0]), abs(m[2, 1])))


def rotation_about(x: SpherePoint, angle: float) -> Rotation:
    """Rotation by ``angle`` about the axis through ``x``."""
    return Rotation.from_matrix(axis_angle_matrix(x.vector, angle))


def latitude_rotation(x: SpherePoint, angle: float) -> Rotation:
    """Rotation about the axis orthogonal to the plane of ``x`` and the north pole.

    It moves points along the meridian of ``x`` without turning the tangent plane there.
    """
    v = x.vector
    axis = np.array([-v[1], v[0], 0.0])
    if np.linalg.norm(axis) < POLE_EPS:
        raise ChartDomainError("meridian plane is undefined at the poles")
    return Rotation.from_matrix(axis_angle_matrix(axis, angle))


def _random_trial(rng: np.random.Generator):
    mats = random_rotation_matrices(2, rng)
    v = rng.standard_normal(3)
    return Rotation.from_matrix(mats[0]), Rotation.from_matrix(mats[1]), SpherePoint.from_vector(v)


def _lemma_residual(r2, r1, x) -> tuple[float, float]:
    omega = k_factor(r2, r1, x).gamma
    return abs(_wrap_pi(omega + psi_angle(r2, r1, x))), k_polar_residual(r2, r1, x)


def verify_angle_lemma(trials: int, seed: int, cases=None, tol: float = LEMMA_TOL) -> VerificationReport:
    """Check ``omega_{R2,R1}(x) = -psi_{R2,R1}(x)`` on random or given ``(r2, r1, x)``.

    Random trials whose point falls within the pole margin of a chart are
    redrawn; explicit ``cases`` in that situation are dropped.  Both count as
    skipped.
    """
    rng = np.random.default_rng(seed)
    if cases is None:
        cases = (_random_trial(rng) for _ in range(trials + _MAX_RESAMPLE))
        limit = trials
    else:
        cases = list(cases)
        limit = len(cases)
    done = failures = skipped = 0
    worst = 0.0
    failed = []
    for r2, r1, x in cases:
        if done == limit:
            break
        try:
            res, polar = _lemma_residual(r2, r1, x)
        except ChartDomainError:
            skipped += 1
            continue
        done += 1
        worst = max(worst, res)
        if not (res < tol and polar < IN_K_TOL):
            failures += 1
            failed.append((r2.euler, r1.euler, (x.theta, x.phi), res))
    return VerificationReport("angle-lemma", done, failures, skipped, worst, tol, failed)


def cocycle_residual(s: int, rl: Rotation, ri: Rotation, rj: Rotation, x: SpherePoint) -> float:
    return abs(transition(s, rl, ri, x) * transition(s, ri, rj, x) - transition(s, rl, rj, x))


def verify_cocycle(s: int, triples: int, seed: int, tol: float = COCYCLE_TOL) -> VerificationReport:
    """Check ``lambda_{l,i} lambda_{i,j} = lambda_{l,j}`` and ``lambda_{j,j} = 1`` on random triple overlaps."""
    rng = np.random.default_rng(seed)
    done = failures = skipped = 0
    worst = 0.0
    failed = []
    while done < triples and skipped <= _MAX_RESAMPLE + triples:
        mats = random_rotation_matrices(3, rng)
        rl, ri, rj = (Rotation.from_matrix(m) for m in mats)
        x = SpherePoint.from_vector(rng.standard_normal(3))
        try:
            res = max(cocycle_residual(s, rl, ri, rj, x), abs(transition(s, rj, rj, x) - 1.0))
        except ChartDomainError:
            skipped += 1
            continue
        done += 1
        worst = max(worst, res)
        if not res < tol:
            failures += 1
            failed.append((rl.euler, ri.euler, rj.euler, (x.theta, x.phi), res))
    return VerificationReport(f"cocycle s={s}", done, failures, skipped, worst, tol, failed)


__all__ = [
    "Chart", "TangentFrame", "KElement", "rho", "rho_frame", "transition", "omega_angle", "psi_angle",
    "psi_angle_acos", "k_polar_residual", "rotation_about", "latitude_rotation", "verify_angle_lemma",
    "cocycle_residual", "verify_cocycle",
]
