"""Band-limited spectral algebra for bi-s-associated functions on SO(3).

A :class:`SpinSpectrum` ``(s, L, alpha)`` represents

    f = sum_{l=|s|}^{L} sqrt(2l+1) alpha_l D^l_{s,s},

and a :class:`CovarianceSpectrum` ``(s, L, c)`` represents the positive definite
function of a spin-s field,

    phi = sum_{l=|s|}^{L} c_l D^l_{-s,-s}.

With these conventions ``phi_from_f`` is ``c_l = |alpha_l|^2``, the convolution
multiplies coefficients with a ``1/sqrt(2l+1)`` factor, and ``f * f_breve``
evaluated at ``g^-1`` equals ``phi(g)``.  The Haar measure of SO(3) has mass 1.
For s = 0 the coefficient ``alpha_l`` is also the projection of the function
onto the central harmonic ``sqrt(2l+1) P_l(cos theta)`` of the sphere with
mass 1; multiply by ``sqrt(4 pi)`` for the mass ``4 pi`` harmonics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln

from .errors import BandLimitError, NegativeCoefficientError, SpinMismatchError
from .harmonics import ROTATION_GROUP, QuadratureRule, legendre_integral01, wigner_D_entry
from .so3 import Rotation, random_rotation_matrices, matrix_to_euler

NEGATIVE_TOL = 1e-12


def _ells(spin: int, band_limit: int) -> np.ndarray:
    return np.arange(abs(spin), band_limit + 1)


def _angles(g):
    if isinstance(g, Rotation):
        return g.alpha, g.beta, g.gamma
    return g


@dataclass(frozen=True)
class SpinSpectrum:
    """Coefficients ``alpha_l`` (``l = |s|..L``) of a bi-s-associated function."""

    spin: int
    band_limit: int
    alpha: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.alpha, dtype=complex).ravel()
        if self.band_limit < abs(self.spin):
            raise ValueError("band limit must be at least |spin|")
        if a.size != self.band_limit - abs(self.spin) + 1:
            raise ValueError(f"expected {self.band_limit - abs(self.spin) + 1} coefficients, got {a.size}")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def ells(self) -> np.ndarray:
        return _ells(self.spin, self.band_limit)

    def coefficient(self, ell: int) -> complex:
        if ell < abs(self.spin) or ell > self.band_limit:
            return 0j
        return complex(self.alpha[ell - abs(self.spin)])

    def norm2(self) -> float:
        """Squared L2 norm on SO(3)."""
        return float(np.sum(np.abs(self.alpha) ** 2))

    def evaluate(self, alpha, beta, gamma) -> np.ndarray:
        """Vectorised evaluation at Euler angles."""
        d = wigner_D_entry(self.spin, self.spin, self.band_limit, alpha, beta, gamma)
        w = np.sqrt(2 * self.ells + 1) * self.alpha
        return np.tensordot(w, d[abs(self.spin):], axes=1)

    def __call__(self, g: Rotation) -> complex:
        return complex(self.evaluate(*_angles(g)))


# coefficients against the central harmonics when s = 0
ScalarSpectrum = SpinSpectrum


@dataclass(frozen=True)
class CovarianceSpectrum:
    """Coefficients ``c_l`` of ``phi = sum c_l D^l_{-s,-s}``.

    Negative entries are representable so that they can be diagnosed; the
    square root refuses them.
    """

    spin: int
    band_limit: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if self.band_limit < abs(self.spin):
            raise ValueError("band limit must be at least |spin|")
        if c.size != self.band_limit - abs(self.spin) + 1:
            raise ValueError(f"expected {self.band_limit - abs(self.spin) + 1} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def ells(self) -> np.ndarray:
        return _ells(self.spin, self.band_limit)

    def coefficient(self, ell: int) -> float:
        if ell < abs(self.spin) or ell > self.band_limit:
            return 0.0
        return float(self.coeffs[ell - abs(self.spin)])

    def total_power(self) -> float:
        """``phi(e)``, the pointwise variance of the field."""
        return float(np.sum(self.coeffs))

    def gangolli_sum(self) -> float:
        """``sum sqrt(2l+1) c_l``; finite by construction at a finite band limit."""
        return float(np.sum(np.sqrt(2 * self.ells + 1) * np.abs(self.coeffs)))

    def evaluate(self, alpha, beta, gamma) -> np.ndarray:
        d = wigner_D_entry(-self.spin, -self.spin, self.band_limit, alpha, beta, gamma)
        return np.tensordot(self.coeffs.astype(complex), d[abs(self.spin):], axes=1)

    def __call__(self, g: Rotation) -> complex:
        return complex(self.evaluate(*_angles(g)))


def synthesize_fn(sigma: SpinSpectrum, g: Rotation) -> complex:
    return sigma(g)


def analyze(samples, rule: QuadratureRule, s: int, band_limit: int) -> SpinSpectrum:
    """Project samples of a bi-s-associated function at the rule's nodes onto ``D^l_{s,s}``."""
    if rule.domain != ROTATION_GROUP:
        raise ValueError("analysis needs a rotation-group quadrature rule")
    if rule.band_limit < band_limit:
        raise BandLimitError(f"rule band {rule.band_limit} < requested {band_limit}")
    d = wigner_D_entry(s, s, band_limit, rule.alpha, rule.beta, rule.gamma)[abs(s):]
    ells = _ells(s, band_limit)
    proj = (np.conj(d) * rule.weights) @ np.asarray(samples, complex)
    return SpinSpectrum(s, band_limit, np.sqrt(2 * ells + 1) * proj)


def convolution_unit(s: int, band_limit: int) -> SpinSpectrum:
    """Band-limited unit of convolution for spin-s spectra."""
    return SpinSpectrum(s, band_limit, np.sqrt(2 * _ells(s, band_limit) + 1.0))


def convolve(f: SpinSpectrum, g: SpinSpectrum) -> SpinSpectrum:
    """Spectrum of ``(f * g)(x) = int f(h) g(h^-1 x) dh``."""
    if f.spin != g.spin:
        raise SpinMismatchError(f"cannot convolve spin {f.spin} with spin {g.spin}")
    band = min(f.band_limit, g.band_limit)
    n = band - abs(f.spin) + 1
    ells = _ells(f.spin, band)
    return SpinSpectrum(f.spin, band, f.alpha[:n] * g.alpha[:n] / np.sqrt(2 * ells + 1))


def involution(f: SpinSpectrum) -> SpinSpectrum:
    """Spectrum of ``f_breve(g) = conj(f(g^-1))``.

    Since ``D^l_{s,s}(g^-1) = conj(D^l_{s,s}(g))`` the involution stays in the
    spin-s class and simply conjugates the coefficients.
    """
    return SpinSpectrum(f.spin, f.band_limit, np.conj(f.alpha))


def phi_from_f(f: SpinSpectrum) -> CovarianceSpectrum:
    return CovarianceSpectrum(f.spin, f.band_limit, np.abs(f.alpha) ** 2)


@dataclass(frozen=True)
class AllPlus:
    def signs(self, ells: np.ndarray) -> np.ndarray:
        return np.ones(ells.shape, dtype=complex)


@dataclass(frozen=True)
class Alternating:
    """Sign ``(-1)^(floor(l/2) + parity)``; on odd degrees this alternates ``+,-,+,...``."""

    parity: int = 0

    def signs(self, ells: np.ndarray) -> np.ndarray:
        return np.where((ells // 2 + self.parity) % 2 == 0, 1.0, -1.0).astype(complex)


@dataclass(frozen=True)
class ExplicitSigns:
    """Unit-modulus factors given per degree, starting at ``l = |s|``."""

    values: Sequence[complex]

    def signs(self, ells: np.ndarray) -> np.ndarray:
        v = np.asarray(self.values, dtype=complex)
        if v.size != ells.size:
            raise ValueError(f"need {ells.size} phase factors, got {v.size}")
        if np.any(np.abs(np.abs(v) - 1.0) > 1e-12):
            raise ValueError("phase factors must have unit modulus")
        return v


SignPolicy = Union[AllPlus, Alternating, ExplicitSigns]


def sqrt_spectrum(phi: CovarianceSpectrum, signs: SignPolicy = AllPlus()) -> SpinSpectrum:
    """A convolution square root: ``f`` with ``(f * f_breve)(g^-1) = phi(g)``."""
    c = phi.coeffs
    if np.any(c < -NEGATIVE_TOL):
        bad = phi.ells[c < -NEGATIVE_TOL]
        raise NegativeCoefficientError(f"negative covariance coefficient at l={bad.tolist()}")
    root = np.sqrt(np.clip(c, 0.0, None))
    return SpinSpectrum(phi.spin, phi.band_limit, signs.signs(phi.ells) * root)


def levy_c(ell: int) -> float:
    """``pi * ((3*5*...*(l-2)) / (2*4*...*(l+1)))^2`` for odd ``l``, zero for even ``l``.

    Evaluated in log space; for ``l = 2m+1`` the ratio is ``(2m)! / (2^(2m+1) m! (m+1)!)``.
    """
    if ell % 2 == 0:
        return 0.0
    m = (ell - 1) // 2
    log_ratio = gammaln(2 * m + 1) - (2 * m + 1) * np.log(2.0) - gammaln(m + 1) - gammaln(m + 2)
    return float(np.pi * np.exp(2.0 * log_ratio))


def levy_phi_coefficients(band_limit: int) -> CovarianceSpectrum:
    """Spectrum of ``phi(x) = pi/2 - d(x, x0)/2``, the covariance of the half-sphere field.

    The constant term is the spherical mean ``pi/4``; odd degrees carry
    ``(2l+1) c_l / 4``.
    """
    if band_limit < 1:
        raise ValueError("band limit must be at least 1")
    ells = np.arange(band_limit + 1)
    c = np.array([levy_c(int(l)) for l in ells])
    coeffs = (2 * ells + 1) * c / 4.0
    coeffs[0] = np.pi / 4.0
    return CovarianceSpectrum(0, band_limit, coeffs)


def halfsphere_f_coefficients(band_limit: int) -> SpinSpectrum:
    """Spectrum of ``sqrt(pi) * 1_H`` with ``H`` the northern half-sphere."""
    if band_limit < 1:
        raise ValueError("band limit must be at least 1")
    ells = np.arange(band_limit + 1)
    integrals = np.array([legendre_integral01(int(l)) for l in ells])
    return SpinSpectrum(0, band_limit, 0.5 * np.sqrt(np.pi) * np.sqrt(2 * ells + 1) * integrals)


def central_projection(spec, mass: float = 1.0) -> np.ndarray:
    """Projections onto the central harmonics ``Y_{l,0}`` of a sphere with total ``mass``.

    Accepts an s = 0 spin or covariance spectrum.  With mass 1 the harmonic is
    ``sqrt(2l+1) P_l``; with mass ``4 pi`` it is ``sqrt((2l+1)/(4 pi)) P_l``.
    """
    if spec.spin != 0:
        raise SpinMismatchError("central harmonics need spin 0")
    ells = spec.ells
    raw = spec.alpha if isinstance(spec, SpinSpectrum) else spec.coeffs / np.sqrt(2 * ells + 1)
    return raw * np.sqrt(mass)


@dataclass(frozen=True)
class PositiveDefiniteReport:
    min_coefficient: float
    coefficient_ok: bool
    gram_min_eigenvalue: float
    gram_ok: bool
    n_points: int
    per_degree_min_eigenvalue: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.coefficient_ok and self.gram_ok

    def to_text(self) -> str:
        lines = [
            f"coefficients  min={self.min_coefficient:.6e}  {'PASS' if self.coefficient_ok else 'FAIL'}",
            f"gram n={self.n_points}  min_eig={self.gram_min_eigenvalue:.6e}  {'PASS' if self.gram_ok else 'FAIL'}",
        ]
        for ell, ev in self.per_degree_min_eigenvalue.items():
            lines.append(f"  degree {ell}: min_eig={ev:.6e}")
        return "\n".join(lines)


def gram_matrix(phi: CovarianceSpectrum, matrices: np.ndarray) -> np.ndarray:
    """``G[i, j] = phi(g_i^-1 g_j)`` for rotation matrices ``g_i``."""
    rel = np.einsum("iba,jbc->ijac", matrices, matrices)
    a, b, g = matrix_to_euler(rel)
    return phi.evaluate(a, b, g)


def check_positive_definite(phi: CovarianceSpectrum, n: int = 50, seed: int = 0,
                            per_degree: bool = False, tol: float = 1e-8) -> PositiveDefiniteReport:
    """Coefficient sign test plus an empirical Gram-matrix eigenvalue test."""
    rng = np.random.default_rng(seed)
    mats = random_rotation_matrices(n, rng)
    gram = gram_matrix(phi, mats)
    herm = 0.5 * (gram + gram.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    per = {}
    if per_degree:
        rel = np.einsum("iba,jbc->ijac", mats, mats)
        a, b, g = matrix_to_euler(rel)
        d = wigner_D_entry(-phi.spin, -phi.spin, phi.band_limit, a, b, g)
        for ell, c in zip(phi.ells, phi.coeffs):
            comp = c * d[ell]
            per[int(ell)] = float(np.linalg.eigvalsh(0.5 * (comp + comp.conj().T))[0])
    min_c = float(np.min(phi.coeffs)) if phi.coeffs.size else 0.0
    gram_ok = min_eig >= -tol and all(v >= -tol for v in per.values())
    return PositiveDefiniteReport(min_c, min_c >= -NEGATIVE_TOL, min_eig, gram_ok, n, per)
