import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinfield.errors import RealityError, ShapeMismatchError
from spinfield.fieldsynth import (CoefficientDraw, Reality, coefficient_index, complex_gaussians,
                                  draw_coefficients, draw_matrix, field_samples, levy_field, levy_samples,
                                  pullback_samples, pullback_to_section, pullback_values,
                                  representative_offsets, section_to_pullback, synthesize_field,
                                  synthesize_pullback, zero_draw)
from spinfield.harmonics import wigner_D_entry
from spinfield.so3 import KElement, Rotation, SpherePoint, matrix_to_euler, random_rotation_matrices, section
from spinfield.spectral import SpinSpectrum, levy_phi_coefficients


def spectrum(s=1, band=5, seed=0):
    rng = np.random.default_rng(seed)
    n = band - abs(s) + 1
    return SpinSpectrum(s, band, rng.standard_normal(n) + 1j * rng.standard_normal(n))


def test_draws_are_deterministic():
    f = spectrum()
    a = draw_coefficients(f, 7)
    b = draw_coefficients(f, 7)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, draw_coefficients(f, 8).coeffs)
    assert not np.array_equal(a.coeffs, draw_coefficients(f, 7, replicate=1).coeffs)


def test_draws_do_not_depend_on_band_limit():
    small, big = draw_coefficients(spectrum(1, 4), 3), draw_coefficients(spectrum(1, 9), 3)
    for ell in range(1, 5):
        for m in range(-ell, ell + 1):
            assert small[ell, m] == big[ell, m]


def test_draw_reads_stream_position():
    f = spectrum(2, 4)
    z = complex_gaussians(11, 0, 25)
    draw = draw_coefficients(f, 11)
    assert draw[3, -1] == z[coefficient_index(3, -1)]
    assert draw[2, 2] == z[8]
    with pytest.raises(IndexError):
        draw[1, 0]


def test_batch_matches_single_replicates():
    f = spectrum(0, 3)
    batch = draw_matrix(f, 5, n=4, first=2)
    for i in range(4):
        assert np.array_equal(batch[i], draw_coefficients(f, 5, replicate=2 + i).coeffs)


def test_gaussian_moments():
    z = complex_gaussians(1, 0, 100000)
    assert abs(z.mean()) < 4 / np.sqrt(1e5)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.02)
    assert abs(np.mean(z ** 2)) < 0.02
    assert np.var(z.real) == pytest.approx(0.5, abs=0.01)


def test_real_constraint():
    f = SpinSpectrum(0, 4, np.ones(5))
    draw = draw_coefficients(f, 2, Reality.REAL)
    assert draw[3, -2] == pytest.approx(np.conj(draw[3, 2]))
    assert draw[3, -1] == pytest.approx(-np.conj(draw[3, 1]))
    assert draw[2, 0].imag == 0.0
    # positive orders are shared with the complex draw
    assert draw[3, 2] == draw_coefficients(f, 2)[3, 2]


def test_real_draw_requires_scalar_real_spectrum():
    with pytest.raises(RealityError):
        draw_coefficients(spectrum(1, 3), 0, Reality.REAL)
    with pytest.raises(RealityError):
        draw_coefficients(SpinSpectrum(0, 2, [1, 1j, 0]), 0, Reality.REAL)


def test_real_field_is_real():
    f = SpinSpectrum(0, 6, np.random.default_rng(1).standard_normal(7))
    a, b, g = matrix_to_euler(random_rotation_matrices(40, np.random.default_rng(2)))
    x = pullback_values(f, draw_coefficients(f, 4, Reality.REAL).coeffs, a, b, np.zeros_like(g))
    assert np.max(np.abs(x.imag)) < 1e-12


def test_zero_draw_gives_zero_field():
    f = spectrum()
    grid = [SpherePoint(0.3, 1.0), SpherePoint(2.0, 4.0)]
    assert np.all(synthesize_field(f, zero_draw(f), grid).values == 0)


def test_single_mode():
    f = spectrum(1, 3)
    coeffs = np.zeros(16 - 1, complex)
    idx = coefficient_index(2, -1) - 1
    coeffs[idx] = 1.0
    g = Rotation(0.3, 1.2, -0.7)
    draw = CoefficientDraw(1, 3, coeffs, Reality.COMPLEX, 0)
    expected = f.coefficient(2) * wigner_D_entry(-1, -1, 3, g.alpha, g.beta, g.gamma)[2]
    assert synthesize_pullback(f, draw, g) == pytest.approx(expected, abs=1e-13)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        synthesize_pullback(spectrum(1, 4), draw_coefficients(spectrum(1, 3), 0), Rotation.identity())
    with pytest.raises(ShapeMismatchError):
        synthesize_pullback(spectrum(2, 4), draw_coefficients(spectrum(1, 4), 0), Rotation.identity())


@given(st.sampled_from([-2, -1, 1, 2]), st.floats(0, 6.28))
def test_type_law(s, k):
    f = spectrum(s, 5, seed=abs(s))
    draw = draw_coefficients(f, 9)
    g = Rotation(0.4, 2.1, 0.9)
    assert synthesize_pullback(f, draw, g @ KElement(k)) == pytest.approx(
        np.exp(-1j * s * k) * synthesize_pullback(f, draw, g), abs=1e-10)


def test_constant_spectrum_gives_constant_field():
    f = SpinSpectrum(0, 0, [2.0])
    draw = draw_coefficients(f, 1)
    grid = [SpherePoint(t, p) for t, p in [(0.0, 0.0), (1.0, 2.0), (3.0, 5.0)]]
    values = synthesize_field(f, draw, grid).values
    assert np.allclose(values, 2.0 * draw[0, 0])


def test_pointwise_variance_is_total_power():
    f = spectrum(2, 4, seed=3)
    rots = [Rotation(0.1, 0.5, 0.2), Rotation(2.0, 2.5, 1.0)]
    x = pullback_samples(f, 0, Reality.COMPLEX, 20000, [r.alpha for r in rots], [r.beta for r in rots],
                         [r.gamma for r in rots])
    total = np.sum(np.abs(f.alpha) ** 2)
    assert np.mean(np.abs(x) ** 2, axis=0) == pytest.approx([total, total], rel=0.05)


def test_field_samples_use_section():
    f = spectrum(1, 3)
    x = SpherePoint(1.1, 0.4)
    g = section(x)
    direct = pullback_samples(f, 3, Reality.COMPLEX, 5, g.alpha, g.beta, g.gamma)
    assert np.array_equal(field_samples(f, 3, Reality.COMPLEX, 5, [x]), direct)


def test_levy_field_vanishes_at_north_pole():
    grid = [SpherePoint.north(), SpherePoint(1.0, 2.0)]
    real = levy_field(12, 5, grid)
    assert real.values[0] == 0
    t, w = levy_samples(12, grid, 3, 5)
    assert np.all(w[:, 0] == 0) and np.allclose(w[:, 1], t[:, 1] - t[:, 0])


def test_levy_covariance_matches_spectrum():
    # the half-sphere field has covariance (pi/2 - d)/2 up to truncation
    x, y = SpherePoint(0.7, 0.2), SpherePoint(1.9, 2.5)
    t, _ = levy_samples(20, [x, y], 20000, 3)
    c = np.mean(t[:, 0] * t[:, 1])
    d = np.arccos(np.clip(x.vector @ y.vector, -1, 1))
    exact = levy_phi_coefficients(20)(Rotation(0.0, d, 0.0)).real
    assert c == pytest.approx(exact, abs=4 * np.sqrt((np.pi / 4) ** 2 * 2 / 20000))


def test_section_pullback_round_trip():
    values = np.array([1 + 2j, -0.5j])
    k = np.array([0.3, 2.0])
    assert np.allclose(pullback_to_section(section_to_pullback(values, 2, k), 2, k), values)


def test_representative_offsets():
    x = SpherePoint(1.2, 0.8)
    g = section(x) @ KElement(0.6)
    assert representative_offsets([x], [g])[0] == pytest.approx(0.6)
