"""Verification suites combining the spectral, synthesis, inference and bundle checks.

Each suite takes a covariance spectrum and returns a list of reports (objects
with ``name``, ``passed`` and ``to_text``).
"""

from __future__ import annotations

import numpy as np

from .bundle import verify_angle_lemma, verify_cocycle
from .errors import NegativeCoefficientError
from .fieldsynth import Reality, draw_coefficients, pullback_values
from .harmonics import ROTATION_GROUP, quadrature
from .inference import (empirical_covariance, empirical_relation, estimate_spectrum, isotropy_check,
                        sample_on_rule, zonal_mode_weights)
from .reports import VerificationReport
from .so3 import matrix_to_euler, random_rotation_matrices, random_rotations
from .spectral import (AllPlus, Alternating, CovarianceSpectrum, SpinSpectrum, analyze, check_positive_definite,
                       convolve, involution, phi_from_f, sqrt_spectrum)

SQRT_TOL = 1e-9
ROUNDTRIP_TOL = 1e-10
TYPE_LAW_TOL = 1e-10
# spectra above this band limit skip the full SO(3) quadrature of the structure suite
STRUCTURE_MAX_BAND = 12


def square_root_residual(phi: CovarianceSpectrum, f: SpinSpectrum, matrices: np.ndarray) -> float:
    """``max |phi(g) - (f * f_breve)(g^-1)|`` over rotation matrices."""
    conv = convolve(f, involution(f))
    a, b, g = matrix_to_euler(matrices)
    ai, bi, gi = matrix_to_euler(np.swapaxes(matrices, -1, -2))
    return float(np.max(np.abs(phi.evaluate(a, b, g) - conv.evaluate(ai, bi, gi))))


def type_law_residual(f: SpinSpectrum, seed: int, n: int = 1000, rng_seed: int = 0) -> float:
    """``max |X_{gk} - chi_s(k^-1) X_g|`` for one field sample at random ``(g, k)``."""
    rng = np.random.default_rng(rng_seed)
    a, b, g = matrix_to_euler(random_rotation_matrices(n, rng))
    k = rng.uniform(0.0, 2 * np.pi, n)
    draw = draw_coefficients(f, seed)
    x_g = pullback_values(f, draw.coeffs, a, b, g)[0]
    x_gk = pullback_values(f, draw.coeffs, a, b, g + k)[0]
    return float(np.max(np.abs(x_gk - np.exp(-1j * f.spin * k) * x_g)))


def spectral_suite(phi: CovarianceSpectrum, seed: int = 0) -> list:
    reports = []
    pd = check_positive_definite(phi, seed=seed)
    reports.append(VerificationReport("positive definite", 1, 0 if pd.passed else 1, 0,
                                      max(0.0, -pd.min_coefficient, -pd.gram_min_eigenvalue), 0.0))
    if not pd.coefficient_ok:
        return reports
    mats = random_rotation_matrices(200, np.random.default_rng(seed))
    worst = 0.0
    failures = 0
    for policy in (AllPlus(), Alternating(0), Alternating(1)):
        res = square_root_residual(phi, sqrt_spectrum(phi, policy), mats)
        worst = max(worst, res)
        failures += res >= SQRT_TOL
    reports.append(VerificationReport("square root", 3, failures, 0, worst, SQRT_TOL))
    f = sqrt_spectrum(phi)
    rule = quadrature(ROTATION_GROUP, phi.band_limit) if phi.band_limit <= STRUCTURE_MAX_BAND else None
    if rule is not None:
        back = analyze(f.evaluate(rule.alpha, rule.beta, rule.gamma), rule, f.spin, f.band_limit)
        res = float(np.max(np.abs(back.alpha - f.alpha)))
        reports.append(VerificationReport("analysis round trip", 1, int(res >= ROUNDTRIP_TOL), 0, res,
                                          ROUNDTRIP_TOL))
    return reports


def covariance_suite(phi: CovarianceSpectrum, seed: int = 0, n: int = 4000, pairs: int = 5) -> list:
    f = sqrt_spectrum(phi)
    rots = random_rotations(2 * pairs, np.random.default_rng(seed))
    pr = list(zip(rots[:pairs], rots[pairs:]))
    reality = Reality.COMPLEX
    return [empirical_covariance(f, pr, n, seed, reality), empirical_relation(f, pr, n, seed, reality)]


def structure_suite(phi: CovarianceSpectrum, seed: int = 0, n: int = 500) -> list:
    if phi.band_limit > STRUCTURE_MAX_BAND:
        return []
    f = sqrt_spectrum(phi)
    rule = quadrature(ROTATION_GROUP, phi.band_limit)
    rep = estimate_spectrum(sample_on_rule(f, rule, n, seed), rule, f.spin, f.band_limit, spec=f,
                            bonferroni=True)
    return [rep]


def type_law_suite(phi: CovarianceSpectrum, seed: int = 0) -> list:
    res = type_law_residual(sqrt_spectrum(phi), seed)
    return [VerificationReport(f"type-s law s={phi.spin}", 1000, int(res >= TYPE_LAW_TOL), 0, res, TYPE_LAW_TOL)]


def isotropy_suite(phi: CovarianceSpectrum, seed: int = 0, n: int = 4000) -> list:
    f = sqrt_spectrum(phi)
    rng = np.random.default_rng(seed)
    rots = random_rotations(13, rng)
    pairs = list(zip(rots[3:8], rots[8:13]))
    plain = isotropy_check(f, rots[:3], pairs, n, seed)
    control = isotropy_check(f, rots[:3], pairs, n, seed,
                             mode_weights=zonal_mode_weights(f.spin, f.band_limit))
    rejected = VerificationReport("anisotropic control rejected", 1, 0 if not control.passed else 1, 0,
                                  float(np.max(control.z_scores)), 3.0)
    return [plain, rejected]


def bundle_suite(phi: CovarianceSpectrum | None = None, seed: int = 0, trials: int = 1000) -> list:
    spin = 2 if phi is None or phi.spin == 0 else phi.spin
    return [verify_angle_lemma(trials, seed), verify_cocycle(spin, max(trials // 2, 1), seed + 1)]


SUITES = {
    "spectral": spectral_suite,
    "covariance": covariance_suite,
    "structure": structure_suite,
    "type-law": type_law_suite,
    "isotropy": isotropy_suite,
    "bundle": bundle_suite,
}
DEFAULT_SUITES = ("spectral", "covariance", "structure", "type-law", "isotropy", "bundle")


def run_suites(phi: CovarianceSpectrum, names=DEFAULT_SUITES, seed: int = 0) -> list:
    """Run the named suites; a suite that cannot build a square root fails instead of raising."""
    reports = []
    for name in names:
        try:
            reports.extend(SUITES[name](phi, seed=seed))
        except NegativeCoefficientError as exc:
            reports.append(VerificationReport(f"{name} ({exc})", 1, 1, 0, float("nan"), 0.0))
    return reports


def root_to_covariance(spec) -> CovarianceSpectrum:
    return spec if isinstance(spec, CovarianceSpectrum) else phi_from_f(spec)
