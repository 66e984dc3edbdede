"""Gaussian synthesis of spin-s random fields from a spectrum and white noise.

The pullback of a spin-s field to SO(3) is

    X_g = sum_l alpha_l sum_m a_{l,m} D^l_{m,-s}(g),

with independent standard complex Gaussian ``a_{l,m}`` (or, for real s = 0
fields, ``a_{l,-m} = (-1)^m conj(a_{l,m})``).  Chart values on the sphere are
taken at the canonical representative ``section(x)``.

Coefficients come from a counter-based generator: replicate ``r`` of seed
``seed`` is a Philox stream keyed by ``seed`` with counter offset ``r``, and
the coefficient ``(l, m)`` always reads position ``l^2 + l + m`` of that
stream, so draws do not depend on the band limit or on evaluation order.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import RealityError, ShapeMismatchError
from .harmonics import wigner_d_series
from .so3 import Rotation, SpherePoint, section
from .spectral import SpinSpectrum, halfsphere_f_coefficients

_MASK64 = (1 << 64) - 1
# second key word separates coefficient streams from any other Philox use
_STREAM_TAG = 0x5350494E4649454C
_POINT_CHUNK = 512
_DRAW_CHUNK = 250


class Reality(str, enum.Enum):
    COMPLEX = "complex"
    REAL = "real"


def coefficient_index(ell: int, m: int) -> int:
    return ell * ell + ell + m


def spectrum_digest(f) -> str:
    """Short content hash of a spectrum, used as provenance."""
    data = getattr(f, "alpha", None)
    if data is None:
        data = f.coeffs
    text = f"{type(f).__name__}|{f.spin}|{f.band_limit}|" + ",".join(
        f"{complex(v).real:.17g}:{complex(v).imag:.17g}" for v in data)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _raw_stream(seed: int, replicate: int, size: int) -> np.ndarray:
    bitgen = np.random.Philox(
        key=np.array([seed & _MASK64, _STREAM_TAG], dtype=np.uint64),
        counter=np.array([0, replicate & _MASK64, 0, 0], dtype=np.uint64),
    )
    return bitgen.random_raw(2 * size).reshape(size, 2)


def _box_muller(raw: np.ndarray) -> np.ndarray:
    u1 = ((raw[..., 0] >> np.uint64(11)).astype(float) + 1.0) * 2.0 ** -53
    # angle in [-pi, pi): trig range reduction is cheaper than on [0, 2 pi)
    angle = (raw[..., 1] >> np.uint64(11)).astype(float) * (2.0 ** -53 * 2.0 * np.pi) - np.pi
    r = np.sqrt(-np.log(u1))
    out = np.empty(u1.shape, complex)
    out.real = r * np.cos(angle)
    out.imag = r * np.sin(angle)
    return out


def complex_gaussians(seed: int, replicate: int, size: int, positions=None) -> np.ndarray:
    """Standard complex Gaussians (E|z|^2 = 1) read at stream positions.

    Positions default to ``0..size-1``; ``size`` must exceed every position.
    """
    raw = _raw_stream(seed, replicate, size)
    return _box_muller(raw if positions is None else raw[positions])


def _orders(spin: int, band_limit: int):
    ells = np.concatenate([np.full(2 * l + 1, l) for l in range(abs(spin), band_limit + 1)])
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(abs(spin), band_limit + 1)])
    return ells, ms


def _real_constrain(z: np.ndarray, ells: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """Impose ``a_{l,-m} = (-1)^m conj(a_{l,m})`` using the m >= 0 entries of ``z``."""
    out = z.copy()
    zero = ms == 0
    out[..., zero] = np.sqrt(2.0) * z[..., zero].real
    neg = np.nonzero(ms < 0)[0]
    mirror = neg - 2 * ms[neg]  # same l, order -m
    sign = np.where(ms[neg] % 2 == 0, 1.0, -1.0)
    out[..., neg] = sign * np.conj(z[..., mirror])
    return out


def _check_reality(f: SpinSpectrum, reality: Reality):
    if Reality(reality) is Reality.REAL and (f.spin != 0 or np.any(f.alpha.imag != 0)):
        raise RealityError("real-constrained draws need spin 0 and real coefficients")


@dataclass(frozen=True)
class CoefficientDraw:
    """Realised white-noise coefficients ``a_{l,m}``, ``l = |s|..L``, flattened by (l, m)."""

    spin: int
    band_limit: int
    coeffs: np.ndarray = field(repr=False)
    reality: Reality
    seed: int
    replicate: int = 0

    def __getitem__(self, lm) -> complex:
        ell, m = lm
        if ell < abs(self.spin) or ell > self.band_limit or abs(m) > ell:
            raise IndexError(f"no coefficient ({ell}, {m})")
        return complex(self.coeffs[coefficient_index(ell, m) - self.spin ** 2])


def draw_matrix(f: SpinSpectrum, seed: int, reality: Reality = Reality.COMPLEX,
                n: int = 1, first: int = 0) -> np.ndarray:
    """Coefficients of replicates ``first .. first+n-1`` as an ``(n, ncoef)`` array."""
    _check_reality(f, reality)
    size = (f.band_limit + 1) ** 2
    lo = f.spin ** 2
    if Reality(reality) is Reality.COMPLEX:
        raw = np.stack([_raw_stream(seed, r, size)[lo:] for r in range(first, first + n)])
        return _box_muller(raw)
    ells, ms = _orders(f.spin, f.band_limit)
    keep = np.nonzero(ms >= 0)[0]
    raw = np.stack([_raw_stream(seed, r, size)[lo:][keep] for r in range(first, first + n)])
    z = np.zeros((n, ms.size), complex)
    z[:, keep] = _box_muller(raw)
    return _real_constrain(z, ells, ms)


def draw_coefficients(f: SpinSpectrum, seed: int, reality: Reality = Reality.COMPLEX,
                      replicate: int = 0) -> CoefficientDraw:
    coeffs = draw_matrix(f, seed, reality, 1, replicate)[0]
    coeffs.setflags(write=False)
    return CoefficientDraw(f.spin, f.band_limit, coeffs, Reality(reality), seed, replicate)


def zero_draw(f: SpinSpectrum) -> CoefficientDraw:
    n = (f.band_limit + 1) ** 2 - f.spin ** 2
    return CoefficientDraw(f.spin, f.band_limit, np.zeros(n, complex), Reality.COMPLEX, 0)


def pullback_basis(f: SpinSpectrum, alpha, beta, gamma) -> np.ndarray:
    """``B[j, p] = alpha_l D^l_{m,-s}(g_p)`` for flattened ``j = (l, m)``; shape ``(ncoef, npoints)``."""
    alpha, beta, gamma = (np.atleast_1d(np.asarray(v, float)) for v in (alpha, beta, gamma))
    s, big_l = f.spin, f.band_limit
    ms_all = np.arange(-big_l, big_l + 1)
    d = wigner_d_series(ms_all[:, None], -s, big_l, beta[None, :])
    rows = []
    for ell in range(abs(s), big_l + 1):
        sl = slice(big_l - ell, big_l + ell + 1)
        phase = np.exp(1j * (np.arange(-ell, ell + 1)[:, None] * alpha[None, :] - s * gamma[None, :]))
        rows.append(f.coefficient(ell) * d[ell, sl] * phase)
    return np.concatenate(rows, axis=0)


def _check_draw(f: SpinSpectrum, draw: CoefficientDraw):
    if draw.spin != f.spin or draw.band_limit != f.band_limit:
        raise ShapeMismatchError(
            f"draw (s={draw.spin}, L={draw.band_limit}) does not match spectrum (s={f.spin}, L={f.band_limit})")


def synthesize_pullback(f: SpinSpectrum, draw: CoefficientDraw, g: Rotation) -> complex:
    _check_draw(f, draw)
    return complex(draw.coeffs @ pullback_basis(f, g.alpha, g.beta, g.gamma)[:, 0])


def pullback_values(f: SpinSpectrum, coeffs: np.ndarray, alpha, beta, gamma) -> np.ndarray:
    """Evaluate ``X_g`` for coefficient rows ``coeffs`` (shape ``(n, ncoef)``) at many rotations."""
    alpha, beta, gamma = (np.atleast_1d(np.asarray(v, float)) for v in (alpha, beta, gamma))
    coeffs = np.atleast_2d(coeffs)
    out = np.empty((coeffs.shape[0], alpha.size), complex)
    for lo in range(0, alpha.size, _POINT_CHUNK):
        hi = lo + _POINT_CHUNK
        out[:, lo:hi] = coeffs @ pullback_basis(f, alpha[lo:hi], beta[lo:hi], gamma[lo:hi])
    return out


def pullback_samples(f: SpinSpectrum, seed: int, reality: Reality, n: int, alpha, beta, gamma,
                     first: int = 0, mode_weights: np.ndarray | None = None) -> np.ndarray:
    """Monte Carlo replicates ``first .. first+n-1`` of ``X`` at given rotations; shape ``(n, npoints)``.

    ``mode_weights`` (one factor per flattened ``(l, m)``) rescales the noise
    coefficients; it exists to build deliberately anisotropic controls.
    """
    basis = pullback_basis(f, alpha, beta, gamma)
    if mode_weights is not None:
        basis = np.asarray(mode_weights)[:, None] * basis
    out = np.empty((n, basis.shape[1]), complex)
    for lo in range(0, n, _DRAW_CHUNK):
        k = min(_DRAW_CHUNK, n - lo)
        out[lo:lo + k] = draw_matrix(f, seed, reality, k, first + lo) @ basis
    return out


def _point_angles(points):
    theta = np.array([p.theta for p in points], float)
    phi = np.array([p.phi for p in points], float)
    return phi, theta, np.zeros_like(theta)


def field_samples(f: SpinSpectrum, seed: int, reality: Reality, n: int, points, first: int = 0) -> np.ndarray:
    """Monte Carlo replicates of chart values at sphere points (canonical representatives)."""
    return pullback_samples(f, seed, reality, n, *_point_angles(points), first=first)


@dataclass(frozen=True)
class FieldRealization:
    """Chart values of one field sample on a list of sphere points."""

    spin: int
    band_limit: int
    grid: tuple
    values: np.ndarray = field(repr=False)
    seed: int
    spectrum_id: str
    replicate: int = 0
    grid_kind: str = "nodes"

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ShapeMismatchError("grid and values differ in length")

    @property
    def theta(self) -> np.ndarray:
        return np.array([p.theta for p in self.grid])

    @property
    def phi(self) -> np.ndarray:
        return np.array([p.phi for p in self.grid])


def synthesize_field(f: SpinSpectrum, draw: CoefficientDraw, grid, grid_kind: str = "nodes") -> FieldRealization:
    _check_draw(f, draw)
    grid = tuple(grid)
    values = pullback_values(f, draw.coeffs, *_point_angles(grid))[0]
    return FieldRealization(f.spin, f.band_limit, grid, values, draw.seed, spectrum_digest(f),
                            draw.replicate, grid_kind)


def levy_samples(band_limit: int, points, n: int, seed: int, first: int = 0):
    """Replicates of the half-sphere field ``T`` and of ``W = T - T_{x0}`` at ``points``.

    Returns ``(T, W)``, each of shape ``(n, len(points))``, real valued.
    """
    f = halfsphere_f_coefficients(band_limit)
    pts = list(points) + [SpherePoint.north()]
    t = field_samples(f, seed, Reality.REAL, n, pts, first).real
    w = t[:, :-1] - t[:, -1:]
    # W vanishes at the north pole by definition
    w[:, [p.theta == 0.0 for p in points]] = 0.0
    return t[:, :-1], w


def levy_field(band_limit: int, seed: int, grid, replicate: int = 0, grid_kind: str = "nodes") -> FieldRealization:
    """One sample of Levy's spherical Brownian field ``W`` on ``grid``."""
    grid = tuple(grid)
    _, w = levy_samples(band_limit, grid, 1, seed, replicate)
    return FieldRealization(0, band_limit, grid, w[0].astype(complex), seed,
                            spectrum_digest(halfsphere_f_coefficients(band_limit)), replicate, grid_kind)


def section_to_pullback(values, spin: int, k_angles) -> np.ndarray:
    """Pullback values at representatives ``section(x) k`` from chart values at ``section(x)``.

    Type-s law: ``X_{g k} = chi_s(k^-1) X_g``.
    """
    return np.asarray(values) * np.exp(-1j * spin * np.asarray(k_angles, float))


def pullback_to_section(values, spin: int, k_angles) -> np.ndarray:
    return np.asarray(values) * np.exp(1j * spin * np.asarray(k_angles, float))


def representative_offsets(points, representatives) -> np.ndarray:
    """Angles of ``k = section(x)^-1 g`` for representatives ``g`` of the points ``x``."""
    out = []
    for x, g in zip(points, representatives):
        m = section(x).matrix.T @ g.matrix
        out.append(np.arctan2(m[1, 0], m[0, 0]))
    return np.array(out)
