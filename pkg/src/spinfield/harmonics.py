"""Legendre polynomials, Wigner d/D functions, spin harmonics and quadrature.

Phase convention: ``D^l_{m,n}(alpha, beta, gamma) = exp(i m alpha) d^l_{m,n}(beta)
exp(i n gamma)`` so that ``D^l(k) v_m = exp(i m gamma) v_m`` for a rotation k
about the z axis.  The real matrices ``d^l`` are the usual Wigner small-d
matrices with ``d^l_{0,0}(beta) = P_l(cos beta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ResourceError
from .so3 import Rotation, SpherePoint, euler_to_matrix, section

SPHERE = "sphere"
ROTATION_GROUP = "rotation_group"
MAX_QUADRATURE_NODES = 4_000_000


def legendre(ell: int, t):
    """Legendre polynomial ``P_ell(t)`` by the three-term recurrence."""
    t_arr = np.asarray(t, float)
    if np.any(np.abs(t_arr) > 1.0):
        raise DomainError("Legendre argument must lie in [-1, 1]")
    if ell < 0:
        raise DomainError("degree must be non-negative")
    p_prev = np.ones_like(t_arr)
    if ell == 0:
        return p_prev if t_arr.ndim else float(p_prev)
    p = t_arr.copy()
    for n in range(1, ell):
        p_prev, p = p, ((2 * n + 1) * t_arr * p - n * p_prev) / (n + 1)
    return p if t_arr.ndim else float(p)


def legendre_integral01_exact(ell: int) -> Fraction:
    """Exact rational value of the integral of ``P_ell`` over [0, 1]."""
    if ell == 0:
        return Fraction(1)
    if ell % 2 == 0:
        return Fraction(0)
    m = (ell - 1) // 2
    value = Fraction(factorial(2 * m) * comb(2 * m + 1, m), 2 ** (2 * m + 1) * factorial(2 * m + 1))
    return value if m % 2 == 0 else -value


def legendre_integral01(ell: int) -> float:
    return float(legendre_integral01_exact(ell))


def _log_abs_seed(ell, m, n):
    """Log-magnitude, sign and exponents of ``d^ell_{m,n}`` when ``ell = max(|m|,|n|)``.

    At that degree the factorial sum collapses to the single term ``k = max(0, n - m)``.
    """
    k = np.maximum(0, n - m)

    def lf(v):
        # log-factorial; arguments are only negative off the seed entries
        return gammaln(np.maximum(v, 0) + 1)

    log_mag = 0.5 * (lf(ell + m) + lf(ell - m) + lf(ell + n) + lf(ell - n)) \
        - lf(ell + n - k) - lf(k) - lf(m - n + k) - lf(ell - m - k)
    sign = np.where((m - n + k) % 2 == 0, 1.0, -1.0)
    cos_exp = 2 * ell + n - m - 2 * k
    sin_exp = m - n + 2 * k
    return log_mag, sign, cos_exp, sin_exp


def wigner_d_series(m, n, ell_max: int, beta) -> np.ndarray:
    """``d^l_{m,n}(beta)`` for ``l = 0..ell_max``, by recurrence in ``l``.

    ``m``, ``n`` and ``beta`` broadcast together; the result has a leading axis
    of length ``ell_max + 1``.  Entries with ``l < max(|m|, |n|)`` are zero.
    """
    m, n, beta = np.broadcast_arrays(np.asarray(m, int), np.asarray(n, int), np.asarray(beta, float))
    shape = beta.shape
    out = np.zeros((ell_max + 1,) + shape)
    cb = np.cos(beta)
    with np.errstate(divide="ignore"):
        log_c = np.log(np.cos(beta / 2))
        log_s = np.log(np.sin(beta / 2))
    start = np.maximum(np.abs(m), np.abs(n))
    mm = (m * m).astype(float)
    nn = (n * n).astype(float)
    mn = (m * n).astype(float)
    for ell in range(ell_max + 1):
        cur = np.zeros(shape)
        if ell >= 1:
            rec = start < ell
            if np.any(rec):
                l1 = ell - 1.0
                denom = np.sqrt(np.where(rec, (ell * ell - mm) * (ell * ell - nn), 1.0))
                shift = np.where(mn == 0, 0.0, mn / max(ell * l1, 1.0))
                a = ell * (2 * ell - 1) / denom * (cb - shift)
                b_num = np.sqrt(np.clip((l1 * l1 - mm) * (l1 * l1 - nn), 0.0, None))
                b = np.where(b_num == 0, 0.0, ell * b_num / (max(l1, 1.0) * denom))
                val = a * out[ell - 1] - b * (out[ell - 2] if ell >= 2 else 0.0)
                cur = np.where(rec, val, cur)
        seed = start == ell
        if np.any(seed):
            log_mag, sign, ce, se = _log_abs_seed(ell, m, n)
            with np.errstate(invalid="ignore", over="ignore"):
                log_val = (log_mag + np.where(ce == 0, 0.0, ce * log_c)
                           + np.where(se == 0, 0.0, se * log_s))
                cur = np.where(seed, sign * np.exp(log_val), cur)
        out[ell] = cur
    return out


def wigner_d(ell: int, beta: float) -> np.ndarray:
    """Real ``(2l+1) x (2l+1)`` matrix ``d^l(beta)``, rows/cols indexed ``-l..l``."""
    idx = np.arange(-ell, ell + 1)
    return wigner_d_series(idx[:, None], idx[None, :], ell, beta)[ell]


def wigner_d_all(ell_max: int, beta) -> list[np.ndarray]:
    """All ``d^l`` matrices up to ``ell_max`` at an array of angles.

    Returns a list whose ``l``-th entry has shape ``beta.shape + (2l+1, 2l+1)``.
    """
    beta = np.asarray(beta, float)
    idx = np.arange(-ell_max, ell_max + 1)
    full = wigner_d_series(idx[:, None, None], idx[None, :, None], ell_max, beta.reshape(1, 1, -1))
    blocks = []
    for ell in range(ell_max + 1):
        sl = slice(ell_max - ell, ell_max + ell + 1)
        blk = np.moveaxis(full[ell, sl, sl, :], -1, 0)
        blocks.append(blk.reshape(beta.shape + blk.shape[1:]))
    return blocks


@dataclass(frozen=True)
class WignerBlock:
    """Matrix ``D^l(g)``; ``block[m, n]`` indexes by signed orders."""

    ell: int
    entries: np.ndarray

    def __getitem__(self, mn):
        m, n = mn
        if abs(m) > self.ell or abs(n) > self.ell:
            raise IndexError(f"order out of range for l={self.ell}")
        return self.entries[m + self.ell, n + self.ell]

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.ell, self.ell + 1)


def wigner_D(ell: int, r: Rotation) -> WignerBlock:
    idx = np.arange(-ell, ell + 1)
    d = wigner_d(ell, r.beta)
    mat = np.exp(1j * idx * r.alpha)[:, None] * d * np.exp(1j * idx * r.gamma)[None, :]
    return WignerBlock(ell, mat)


def wigner_D_all(ell_max: int, alpha, beta, gamma) -> list[np.ndarray]:
    """``D^l`` for ``l <= ell_max`` at arrays of Euler angles (shape ``(N, 2l+1, 2l+1)`` each)."""
    alpha, beta, gamma = (np.atleast_1d(np.asarray(v, float)) for v in (alpha, beta, gamma))
    d_blocks = wigner_d_all(ell_max, beta)
    out = []
    for ell, d in enumerate(d_blocks):
        idx = np.arange(-ell, ell + 1)
        ea = np.exp(1j * alpha[:, None] * idx[None, :])
        eg = np.exp(1j * gamma[:, None] * idx[None, :])
        out.append(ea[:, :, None] * d * eg[:, None, :])
    return out


def wigner_D_entry(m, n: int, ell_max: int, alpha, beta, gamma) -> np.ndarray:
    """``D^l_{m,n}`` for ``l = 0..ell_max`` at arrays of Euler angles.

    ``m`` may be an array of orders; the result has shape ``(ell_max + 1,) +
    broadcast(m, angles)``.
    """
    alpha, beta, gamma = (np.asarray(v, float) for v in (alpha, beta, gamma))
    m = np.asarray(m, int)
    d = wigner_d_series(m, n, ell_max, beta)
    return d * np.exp(1j * (m * alpha + n * gamma))


def sph_harm(ell: int, m: int, x: SpherePoint) -> complex:
    """Spherical harmonic for the sphere of total mass ``4 pi``."""
    return spin_sph_harm(0, ell, m, x)


def spin_sph_harm(s: int, ell: int, m: int, x: SpherePoint) -> complex:
    """Chart value of the spin ``-s`` harmonic at the canonical representative ``section(x)``.

    Equals ``sqrt((2l+1)/4pi) * conj(D^l_{m,s}(g_x))``.
    """
    if abs(m) > ell or ell < abs(s):
        raise IndexError(f"invalid indices l={ell}, m={m}, s={s}")
    g = section(x)
    d = wigner_d_series(m, s, ell, g.beta)[ell]
    value = np.exp(1j * (m * g.alpha + s * g.gamma)) * d
    return complex(np.sqrt((2 * ell + 1) / (4 * np.pi)) * np.conj(value))


def spin_sph_harm_grid(s: int, ell_max: int, theta, phi) -> np.ndarray:
    """Spin harmonics at canonical representatives for arrays of points.

    Returns an array of shape ``(ell_max + 1, 2 ell_max + 1, npoints)`` indexed
    ``[l, m + ell_max, point]``; invalid ``(l, m)`` entries are zero.
    """
    theta = np.atleast_1d(np.asarray(theta, float))
    phi = np.atleast_1d(np.asarray(phi, float))
    m = np.arange(-ell_max, ell_max + 1)[:, None]
    d = wigner_d_series(m, s, ell_max, theta[None, :])
    norm = np.sqrt((2 * np.arange(ell_max + 1) + 1) / (4 * np.pi))[:, None, None]
    return norm * np.exp(-1j * m * phi[None, :])[None] * d


@dataclass(frozen=True)
class QuadratureRule:
    """Product Gauss-Legendre / trapezoid rule on the sphere or on SO(3).

    For ``domain == ROTATION_GROUP`` the node arrays are Euler angles
    ``alpha, beta, gamma`` and the weights sum to 1; on the sphere ``beta`` is
    the colatitude, ``alpha`` the longitude, ``gamma`` is zero and the weights
    sum to ``4 pi``.
    """

    domain: str
    band_limit: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.weights.size

    @property
    def nodes(self) -> list:
        if self.domain == SPHERE:
            pts = [SpherePoint(b, a) for a, b in zip(self.alpha, self.beta)]
        else:
            pts = [Rotation(a, b, g) for a, b, g in zip(self.alpha, self.beta, self.gamma)]
        return list(zip(pts, self.weights))

    @property
    def matrices(self) -> np.ndarray:
        return euler_to_matrix(self.alpha, self.beta, self.gamma)

    def integrate(self, values) -> complex | np.ndarray:
        """Weighted sum over the last axis of ``values``."""
        out = np.asarray(values) @ self.weights
        return out


def quadrature(domain: str, band_limit: int, max_nodes: int = MAX_QUADRATURE_NODES) -> QuadratureRule:
    """Rule exact for ``D^l_{m,n} conj(D^l'_{m',n'})`` with ``l, l' <= band_limit``."""
    if band_limit < 0:
        raise ValueError("band limit must be non-negative")
    n_beta = band_limit + 1
    n_az = 2 * band_limit + 2
    x, w = np.polynomial.legendre.leggauss(n_beta)
    beta = np.arccos(x)
    az = 2 * np.pi * np.arange(n_az) / n_az
    if domain == SPHERE:
        if n_beta * n_az > max_nodes:
            raise ResourceError(f"{n_beta * n_az} nodes exceed cap {max_nodes}")
        a, b = np.meshgrid(az, beta, indexing="ij")
        wt = np.broadcast_to(w[None, :] * (2 * np.pi / n_az), a.shape)
        return QuadratureRule(SPHERE, band_limit, a.ravel(), b.ravel(), np.zeros(a.size), wt.ravel().copy())
    if domain == ROTATION_GROUP:
        count = n_beta * n_az * n_az
        if count > max_nodes:
            raise ResourceError(f"{count} nodes exceed cap {max_nodes}")
        a, b, g = np.meshgrid(az, beta, az, indexing="ij")
        wt = np.broadcast_to((w / 2.0)[None, :, None] / (n_az * n_az), a.shape)
        return QuadratureRule(ROTATION_GROUP, band_limit, a.ravel(), b.ravel(), g.ravel(), wt.ravel().copy())
    raise ValueError(f"unknown domain {domain!r}")
