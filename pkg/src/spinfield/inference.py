"""Monte Carlo estimators that confront synthesized fields with their second-order laws.

All estimators accumulate per-draw statistics chunk by chunk through
:class:`MomentAccumulator`, whose merge is associative, so the result does not
depend on how the replicate range is split.  Standard errors use the unbiased
``n - 1`` variance and verdicts are ``k``-sigma bands, optionally widened by a
Bonferroni correction over the entries of one report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BandLimitError
from .fieldsynth import Reality, levy_samples, pullback_basis, pullback_samples
from .harmonics import ROTATION_GROUP, QuadratureRule, legendre
from .reports import EstimatorReport, bonferroni_sigma
from .so3 import Rotation, SpherePoint
from .spectral import SpinSpectrum, levy_phi_coefficients, phi_from_f

DEFAULT_K_SIGMA = 3.0
_CHUNK = 2000


@dataclass
class MomentAccumulator:
    """Running count, mean and centred sum of squares (complex entries allowed).

    ``merge`` is Chan's pairwise update, so any grouping of the same samples
    gives the same moments up to rounding.
    """

    count: int = 0
    mean: np.ndarray | complex = 0.0
    m2: np.ndarray | float = 0.0

    @classmethod
    def from_samples(cls, x) -> "MomentAccumulator":
        x = np.asarray(x)
        if x.shape[0] == 0:
            return cls()
        mean = x.mean(axis=0)
        return cls(x.shape[0], mean, np.sum(np.abs(x - mean) ** 2, axis=0))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + np.abs(delta) ** 2 * (self.count * other.count / n)
        return MomentAccumulator(n, mean, m2)

    @property
    def variance(self):
        """Unbiased variance (of the modulus, for complex samples)."""
        return self.m2 / (self.count - 1)

    @property
    def standard_error(self):
        return np.sqrt(self.variance / self.count)


def _check_n(n: int):
    if n < 2:
        raise ValueError("need at least two draws")


def _accumulate(stat, n: int, chunk: int = _CHUNK) -> MomentAccumulator:
    """Merge ``stat(first, k)`` over the replicate range ``0..n-1``."""
    acc = MomentAccumulator()
    for lo in range(0, n, chunk):
        acc = acc.merge(MomentAccumulator.from_samples(stat(lo, min(chunk, n - lo))))
    return acc


def _pair_angles(pairs):
    gs = [g for g, _ in pairs] + [h for _, h in pairs]
    return (np.array([g.alpha for g in gs]), np.array([g.beta for g in gs]),
            np.array([g.gamma for g in gs]))


def phi_target(spec: SpinSpectrum, g: Rotation, h: Rotation) -> complex:
    """``E[X_g conj(X_h)] = phi(h^-1 g)`` from the spectrum."""
    return phi_from_f(spec)(h.inverse() @ g)


def _k(k_sigma, count, bonferroni):
    return bonferroni_sigma(k_sigma, count) if bonferroni else k_sigma


def _moment(spec, pairs, n, seed, reality, conjugate, mode_weights=None):
    npairs = len(pairs)
    a, b, g = _pair_angles(pairs)

    def stat(first, k):
        x = pullback_samples(spec, seed, reality, k, a, b, g, first, mode_weights)
        right = np.conj(x[:, npairs:]) if conjugate else x[:, npairs:]
        return x[:, :npairs] * right

    return _accumulate(stat, n)


def _labels(pairs):
    return [f"pair{i}" for i in range(len(pairs))]


def empirical_covariance(spec: SpinSpectrum, pairs, n: int, seed: int,
                         reality: Reality = Reality.COMPLEX, k_sigma: float = DEFAULT_K_SIGMA,
                         bonferroni: bool = False) -> EstimatorReport:
    """Mean of ``X_g conj(X_h)`` per pair, against ``phi(h^-1 g)``."""
    _check_n(n)
    acc = _moment(spec, pairs, n, seed, reality, conjugate=True)
    target = np.array([phi_target(spec, g, h) for g, h in pairs])
    return EstimatorReport("covariance", acc.mean, acc.standard_error, target, n,
                           _k(k_sigma, len(pairs), bonferroni), "phi(h^-1 g)", labels=_labels(pairs))


def empirical_relation(spec: SpinSpectrum, pairs, n: int, seed: int,
                       reality: Reality = Reality.COMPLEX, k_sigma: float = DEFAULT_K_SIGMA,
                       bonferroni: bool = False) -> EstimatorReport:
    """Mean of ``X_g X_h`` per pair.

    Complex draws target 0.  A real scalar field equals its conjugate, so its
    relation kernel is the covariance itself; that case is flagged.
    """
    _check_n(n)
    acc = _moment(spec, pairs, n, seed, reality, conjugate=False)
    if Reality(reality) is Reality.REAL:
        target = np.array([phi_target(spec, g, h) for g, h in pairs])
        flags, prov = ("real-field",), "phi(h^-1 g) (real field)"
    else:
        target, flags, prov = np.zeros(len(pairs), complex), (), "0"
    return EstimatorReport("relation", acc.mean, acc.standard_error, target, n,
                           _k(k_sigma, len(pairs), bonferroni), prov, labels=_labels(pairs), flags=flags)


def sample_on_rule(spec: SpinSpectrum, rule: QuadratureRule, n: int, seed: int,
                   reality: Reality = Reality.COMPLEX, first: int = 0) -> np.ndarray:
    """Pullback replicates at the nodes of a rotation-group rule; shape ``(n, nodes)``."""
    return pullback_samples(spec, seed, reality, n, rule.alpha, rule.beta, rule.gamma, first)


def project_coefficients(samples, rule: QuadratureRule, s: int, band_limit: int) -> np.ndarray:
    """``a_hat[l, m] = (2l+1) int X conj(D^l_{m,-s})`` flattened by ``(l, m)``; shape ``(n, ncoef)``."""
    if rule.domain != ROTATION_GROUP:
        raise ValueError("projection needs a rotation-group quadrature rule")
    if rule.band_limit < band_limit:
        raise BandLimitError(f"rule band {rule.band_limit} < requested {band_limit}")
    samples = np.atleast_2d(np.asarray(samples, complex))
    unit = SpinSpectrum(s, band_limit, np.ones(band_limit - abs(s) + 1))
    basis = pullback_basis(unit, rule.alpha, rule.beta, rule.gamma)
    ells = np.concatenate([np.full(2 * l + 1, l) for l in range(abs(s), band_limit + 1)])
    return (samples @ (np.conj(basis) * rule.weights).T) * (2 * ells + 1)


@dataclass
class SpectrumReport:
    """Per-degree and per-order power of projected coefficients plus their cross-correlations."""

    spin: int
    band_limit: int
    coefficients: np.ndarray = field(repr=False)
    power: EstimatorReport
    correlation: EstimatorReport
    degree_power: np.ndarray
    target_power: np.ndarray | None = None

    @property
    def name(self) -> str:
        return "spectrum"

    @property
    def passed(self) -> bool:
        return self.power.passed and self.correlation.passed

    def to_text(self) -> str:
        head = f"spectrum: {'PASS' if self.passed else 'FAIL'}  s={self.spin}  L={self.band_limit}"
        lines = [head]
        for i, ell in enumerate(range(abs(self.spin), self.band_limit + 1)):
            line = f"  degree {ell}  power={self.degree_power[i]:.6g}"
            if self.target_power is not None:
                line += f"  target={self.target_power[i]:.6g}"
            lines.append(line)
        worst = int(np.argmax(self.correlation.z_scores)) if self.correlation.estimate.size else 0
        lines.append(self.power.to_text().splitlines()[0])
        lines.append(self.correlation.to_text().splitlines()[0]
                     + (f"  worst={self.correlation.labels[worst]}" if self.correlation.labels else ""))
        return "\n".join(lines)


def _orders(s, band_limit):
    return [(ell, m) for ell in range(abs(s), band_limit + 1) for m in range(-ell, ell + 1)]


def estimate_spectrum(samples, rule: QuadratureRule, s: int, band_limit: int,
                      spec: SpinSpectrum | None = None, k_sigma: float = DEFAULT_K_SIGMA,
                      bonferroni: bool = False) -> SpectrumReport:
    """Power structure of coefficients projected from pullback samples at a rule's nodes.

    Per-order powers are tested for equality within each degree: each
    ``mean |a_hat[l, m]|^2`` is compared with the average over the other orders
    of the same degree, with the standard error of that difference.  Cross
    correlations ``mean(a_j conj(a_k)) / sqrt(p_j p_k)`` are tested against 0
    for every pair ``j < k`` with standard error ``1 / sqrt(n)``.
    """
    coeffs = project_coefficients(samples, rule, s, band_limit)
    n = coeffs.shape[0]
    orders = _orders(s, band_limit)
    powers = np.abs(coeffs) ** 2
    acc = MomentAccumulator.from_samples(powers)
    p, se = acc.mean, acc.standard_error if n > 1 else np.zeros(len(orders))

    diff, diff_se, labels, degree_power = [], [], [], []
    start = 0
    for ell in range(abs(s), band_limit + 1):
        size = 2 * ell + 1
        sl = slice(start, start + size)
        degree_power.append(p[sl].mean())
        for j in range(size):
            if size == 1:
                continue
            others = np.delete(np.arange(size), j)
            diff.append(p[sl][j] - p[sl][others].mean())
            diff_se.append(np.sqrt(se[sl][j] ** 2 + np.sum(se[sl][others] ** 2) / (size - 1) ** 2))
            labels.append(f"l={ell},m={j - ell}")
        start += size
    power = EstimatorReport("per-order power", np.array(diff), np.array(diff_se), 0.0, n,
                            _k(k_sigma, len(diff), bonferroni), "equal power within degree", labels=labels)

    norm = np.sqrt(np.outer(p, p))
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = (coeffs.T @ np.conj(coeffs)) / n / norm
    iu = np.triu_indices(len(orders), 1)
    rho_flat = np.nan_to_num(rho[iu])
    pair_labels = [f"{orders[i]}~{orders[j]}" for i, j in zip(*iu)]
    corr = EstimatorReport("cross-correlation", rho_flat, np.full(rho_flat.shape, 1.0 / np.sqrt(n)), 0.0, n,
                           _k(k_sigma, rho_flat.size, bonferroni), "0", labels=pair_labels)
    target = None if spec is None else np.abs(spec.alpha[:band_limit - abs(s) + 1]) ** 2
    return SpectrumReport(s, band_limit, coeffs, power, corr, np.array(degree_power), target)


def levy_truncated_variance(band_limit: int, d) -> np.ndarray:
    """``Var(W_x - W_y)`` of the band-limited field at geodesic distance ``d``."""
    phi = levy_phi_coefficients(band_limit)
    t = np.cos(np.asarray(d, float))
    total = phi.total_power()
    at_d = sum(c * legendre(int(ell), t) for ell, c in zip(phi.ells, phi.coeffs))
    return 2.0 * (total - at_d)


def levy_truncated_covariance(band_limit: int, x: SpherePoint, y: SpherePoint) -> float:
    """Band-limited ``Cov(W_x, W_y)`` from ``phi`` at the three relevant distances."""
    north = SpherePoint.north()
    phi = levy_phi_coefficients(band_limit)

    def k(d):
        return sum(c * legendre(int(ell), np.cos(d)) for ell, c in zip(phi.ells, phi.coeffs))

    return float(k(x.distance(y)) - k(x.distance(north)) - k(y.distance(north)) + k(0.0))


def _variance_se(x, var):
    """Standard error of the sample variance from the fourth central moment."""
    centred = x - x.mean(axis=0)
    return np.sqrt(np.maximum(np.mean(centred ** 4, axis=0) - var ** 2, 0.0) / x.shape[0])


def distance_report(band_limit: int, pairs, w: np.ndarray, rel_tol: float = 0.03,
                    truncation_allowance: bool = True, kernel: bool = True,
                    k_sigma: float = DEFAULT_K_SIGMA) -> EstimatorReport:
    """Distance-law report from samples ``w`` of ``W`` at the flattened pair points ``x0, y0, x1, y1, ...``."""
    n = w.shape[0]
    _check_n(n)
    wx, wy = w[:, 0::2], w[:, 1::2]
    diffs = wx - wy
    dist = np.array([x.distance(y) for x, y in pairs])
    var = np.var(diffs, axis=0, ddof=1)
    gap = np.abs(levy_truncated_variance(band_limit, dist) - dist) if truncation_allowance else 0.0
    labels = [f"d={d:.4f}" for d in dist]
    estimate, se, target, allow = [var], [_variance_se(diffs, var)], [dist], [rel_tol * dist + gap]
    ks = [np.zeros(dist.size)]
    if kernel:
        north = SpherePoint.north()
        acc = MomentAccumulator.from_samples(wx * wy)
        kern = np.array([0.5 * (x.distance(north) + y.distance(north) - x.distance(y)) for x, y in pairs])
        kgap = (np.abs([levy_truncated_covariance(band_limit, x, y) for x, y in pairs] - kern)
                if truncation_allowance else 0.0)
        estimate.append(acc.mean)
        se.append(acc.standard_error)
        target.append(kern)
        allow.append(kgap + np.zeros(dist.size))
        ks.append(np.full(dist.size, k_sigma))
        labels += [f"cov d={d:.4f}" for d in dist]
    return EstimatorReport("levy distance law", np.concatenate(estimate), np.concatenate(se),
                           np.concatenate(target), n, np.concatenate(ks), "geodesic distance",
                           np.concatenate(allow), labels)


def pointwise_variance_report(points, t: np.ndarray, rel_tol: float = 0.03) -> EstimatorReport:
    """``Var(T_x)`` of half-sphere field samples ``t`` against ``pi / 2``."""
    _check_n(t.shape[0])
    var = np.var(t, axis=0, ddof=1)
    return EstimatorReport("levy pointwise variance", var, _variance_se(t, var), np.pi / 2, t.shape[0], 0.0,
                           "pi/2", rel_tol * np.pi / 2,
                           [f"theta={p.theta:.3f},phi={p.phi:.3f}" for p in points])


def distance_variance_check(band_limit: int, pairs, n: int, seed: int, rel_tol: float = 0.03,
                            truncation_allowance: bool = True, kernel: bool = True,
                            k_sigma: float = DEFAULT_K_SIGMA) -> EstimatorReport:
    """``Var(W_x - W_y)`` against the geodesic distance for the Levy field.

    Variance entries pass within ``rel_tol`` of the target, plus the
    deterministic gap between the band-limited and the exact law when
    ``truncation_allowance`` is set.  With ``kernel`` the covariance form
    ``(d(x,x0) + d(y,x0) - d(x,y)) / 2`` is checked at the same pairs within
    ``k_sigma`` standard errors plus its own truncation gap.
    """
    _check_n(n)
    _, w = levy_samples(band_limit, [p for pair in pairs for p in pair], n, seed)
    return distance_report(band_limit, pairs, w, rel_tol, truncation_allowance, kernel, k_sigma)


def levy_variance_check(band_limit: int, points, n: int, seed: int, rel_tol: float = 0.03) -> EstimatorReport:
    """``Var(T_x)`` of the half-sphere field against ``pi / 2``."""
    _check_n(n)
    t, _ = levy_samples(band_limit, points, n, seed)
    return pointwise_variance_report(points, t, rel_tol)


def levy_law_checks(band_limit: int, pairs, points, n: int, seed: int, rel_tol: float = 0.03,
                    truncation_allowance: bool = True, kernel: bool = True) -> list[EstimatorReport]:
    """Distance law at ``pairs`` and pointwise variance at ``points`` from one set of draws."""
    _check_n(n)
    flat = [p for pair in pairs for p in pair]
    t, w = levy_samples(band_limit, flat + list(points), n, seed)
    return [distance_report(band_limit, pairs, w[:, :len(flat)], rel_tol, truncation_allowance, kernel),
            pointwise_variance_report(points, t[:, len(flat):], rel_tol)]


def isotropy_check(spec: SpinSpectrum, rotations, pairs, n: int, seed: int,
                   reality: Reality = Reality.COMPLEX, mode_weights=None,
                   k_sigma: float = DEFAULT_K_SIGMA, bonferroni: bool = False) -> EstimatorReport:
    """Covariance at ``(R g, R h)`` against ``(g, h)`` from the same draws.

    The statistic per draw is ``X_g conj(X_h) - X_{Rg} conj(X_{Rh})``; its mean
    must vanish for an isotropic field.  Using common draws makes the paired
    standard error exact and gives identical estimates for ``R = e``.
    """
    _check_n(n)
    rotations = list(rotations)
    all_pairs = list(pairs) + [(r @ g, r @ h) for r in rotations for g, h in pairs]
    npairs = len(pairs)
    a, b, g = _pair_angles(all_pairs)
    total = len(all_pairs)

    def stat(first, k):
        x = pullback_samples(spec, seed, reality, k, a, b, g, first, mode_weights)
        prod = (x[:, :total] * np.conj(x[:, total:])).reshape(k, len(rotations) + 1, npairs)
        return (prod[:, :1, :] - prod[:, 1:, :]).reshape(k, -1)

    acc = _accumulate(stat, n)
    labels = [f"R{i}/pair{j}" for i in range(len(rotations)) for j in range(npairs)]
    return EstimatorReport("isotropy", acc.mean, acc.standard_error, 0.0, n,
                           _k(k_sigma, len(labels), bonferroni), "0 (rotation invariance)", labels=labels)


def zonal_mode_weights(spin: int, band_limit: int) -> np.ndarray:
    """Noise weights keeping only ``m = 0``: a deliberately anisotropic field."""
    ms = np.concatenate([np.arange(-l, l + 1) for l in range(abs(spin), band_limit + 1)])
    return (ms == 0).astype(float)


def standard_error_at(spec: SpinSpectrum, pair, n: int, seed: int, first: int = 0,
                      reality: Reality = Reality.COMPLEX) -> tuple[complex, float]:
    """Covariance estimate and its standard error from replicates ``first .. first+n-1``."""
    _check_n(n)
    a, b, g = _pair_angles([pair])
    x = pullback_samples(spec, seed, reality, n, a, b, g, first)
    acc = MomentAccumulator.from_samples(x[:, 0] * np.conj(x[:, 1]))
    return complex(acc.mean), float(acc.standard_error)
