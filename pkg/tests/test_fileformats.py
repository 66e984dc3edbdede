import numpy as np
import pytest

from spinfield.fieldsynth import draw_coefficients, synthesize_field
from spinfield.fileformats import (equiangular_grid, parse_header, read_nodes, read_realization,
                                   read_spectrum, realization_from_bytes, realization_to_bytes,
                                   spectrum_from_text, spectrum_to_text, write_realization, write_spectrum)
from spinfield.so3 import SpherePoint
from spinfield.spectral import CovarianceSpectrum, SpinSpectrum


def realization():
    f = SpinSpectrum(1, 4, np.array([0.3, 1 - 2j, 0.1, np.pi]))
    return synthesize_field(f, draw_coefficients(f, 12, replicate=2), equiangular_grid(5, 6), "equiangular:5x6")


def test_spectrum_round_trip(tmp_path):
    for spec in (CovarianceSpectrum(2, 5, [0.1, 1 / 3, 2.0, 0.0]), SpinSpectrum(-1, 3, [1j, np.e, -0.25])):
        back = spectrum_from_text(spectrum_to_text(spec))
        assert type(back) is type(spec) and back.spin == spec.spin and back.band_limit == spec.band_limit
        data = spec.coeffs if isinstance(spec, CovarianceSpectrum) else spec.alpha
        assert np.array_equal(getattr(back, "coeffs", getattr(back, "alpha", None)), data)
        path = tmp_path / "s.json"
        write_spectrum(spec, path)
        assert spectrum_to_text(read_spectrum(path)) == spectrum_to_text(spec)


@pytest.mark.parametrize("text", ["{", '{"spin": 0}', '{"spin": 0, "band_limit": 1, "kind": "x", "coefficients": [[1, 0], [1, 0]]}',
                                  '{"spin": 0, "band_limit": 0, "kind": "covariance", "coefficients": [[1, 1]]}'])
def test_malformed_spectrum(text):
    with pytest.raises(ValueError):
        spectrum_from_text(text)


@pytest.mark.parametrize("fmt", ["text", "packed"])
def test_realization_round_trip(tmp_path, fmt):
    real = realization()
    path = tmp_path / "r.dat"
    write_realization(real, path, fmt)
    back = read_realization(path)
    assert np.array_equal(back.values, real.values)
    assert np.array_equal(back.theta, real.theta) and np.array_equal(back.phi, real.phi)
    assert (back.spin, back.band_limit, back.seed, back.replicate) == (1, 4, 12, 2)
    assert back.spectrum_id == real.spectrum_id and back.grid_kind == "equiangular:5x6"


def test_realization_bytes_are_deterministic():
    assert realization_to_bytes(realization()) == realization_to_bytes(realization())
    assert realization_to_bytes(realization(), "packed") == realization_to_bytes(realization(), "packed")


def test_header():
    head = realization_to_bytes(realization()).split(b"\n")[0].decode()
    meta = parse_header(head)
    assert meta["spin"] == "1" and meta["format"] == "text" and meta["replicate"] == "2"
    with pytest.raises(ValueError):
        parse_header("spin=1")
    with pytest.raises(ValueError):
        realization_from_bytes(b"no newline")
    with pytest.raises(ValueError):
        realization_to_bytes(realization(), "xml")


def test_equiangular_grid():
    grid = equiangular_grid(3, 4)
    assert len(grid) == 12
    assert grid[0].theta == 0.0 and grid[-1].theta == pytest.approx(np.pi)
    assert grid[5].phi == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        equiangular_grid(0, 3)


def test_read_nodes(tmp_path):
    path = tmp_path / "nodes.txt"
    path.write_text("# theta phi\n0.5 1.0\n1.5 2.0\n")
    assert read_nodes(path) == [SpherePoint(0.5, 1.0), SpherePoint(1.5, 2.0)]
    path.write_text("1 2 3\n")
    with pytest.raises(ValueError):
        read_nodes(path)
