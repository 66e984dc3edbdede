"""Spectrum and realization files.

Spectrum files are JSON objects ``{spin, band_limit, kind, coefficients}``
where ``kind`` is ``"covariance"`` (coefficients ``c_l``) or ``"root"``
(coefficients ``alpha_l``) and ``coefficients`` lists ``[re, im]`` pairs from
``l = |s|``.  Realization files start with one header line

    # spin=2 band_limit=8 seed=1 grid=equiangular:16x32 spectrum=<digest> replicate=0 format=text

followed, in text format, by one ``theta phi re im`` row per node, or, in
packed format, by the same four columns as little-endian float64.  All text
numbers carry 17 significant digits.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fieldsynth import FieldRealization
from .so3 import SpherePoint
from .spectral import CovarianceSpectrum, SpinSpectrum

KINDS = ("covariance", "root")
FORMATS = ("text", "packed")


def _num(v: float) -> str:
    return format(float(v), ".17g")


def spectrum_to_text(spec) -> str:
    if isinstance(spec, CovarianceSpectrum):
        kind, values = "covariance", spec.coeffs.astype(complex)
    else:
        kind, values = "root", spec.alpha
    pairs = ",\n    ".join(f"[{_num(v.real)}, {_num(v.imag)}]" for v in values)
    return (f'{{\n  "spin": {spec.spin},\n  "band_limit": {spec.band_limit},\n  "kind": "{kind}",\n'
            f'  "coefficients": [\n    {pairs}\n  ]\n}}\n')


def spectrum_from_text(text: str):
    """Parse a spectrum document; raises ``ValueError`` on malformed input."""
    try:
        doc = json.loads(text)
        spin, band, kind = int(doc["spin"]), int(doc["band_limit"]), doc["kind"]
        coeffs = np.array([complex(float(re), float(im)) for re, im in doc["coefficients"]])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed spectrum document: {exc}") from exc
    if kind == "covariance":
        if np.any(coeffs.imag != 0):
            raise ValueError("covariance coefficients must be real")
        return CovarianceSpectrum(spin, band, coeffs.real)
    if kind == "root":
        return SpinSpectrum(spin, band, coeffs)
    raise ValueError(f"unknown spectrum kind {kind!r}")


def write_spectrum(spec, path) -> None:
    Path(path).write_text(spectrum_to_text(spec))


def read_spectrum(path):
    return spectrum_from_text(Path(path).read_text())


def _header(real: FieldRealization, fmt: str) -> str:
    return (f"# spin={real.spin} band_limit={real.band_limit} seed={real.seed} grid={real.grid_kind}"
            f" spectrum={real.spectrum_id} replicate={real.replicate} format={fmt}\n")


def realization_table(real: FieldRealization) -> np.ndarray:
    """Columns ``theta, phi, re, im`` as an ``(N, 4)`` float array."""
    v = np.asarray(real.values, complex)
    return np.column_stack([real.theta, real.phi, v.real, v.imag])


def realization_to_bytes(real: FieldRealization, fmt: str = "text") -> bytes:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    table = realization_table(real)
    head = _header(real, fmt).encode()
    if fmt == "packed":
        return head + table.astype("<f8").tobytes()
    rows = "".join(" ".join(_num(v) for v in row) + "\n" for row in table)
    return head + rows.encode()


def write_realization(real: FieldRealization, path, fmt: str = "text") -> None:
    Path(path).write_bytes(realization_to_bytes(real, fmt))


def parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise ValueError("realization file lacks a header line")
    fields = {}
    for token in line[1:].split():
        key, _, value = token.partition("=")
        fields[key] = value
    return fields


def realization_from_bytes(data: bytes) -> FieldRealization:
    head, sep, body = data.partition(b"\n")
    if not sep:
        raise ValueError("realization file lacks a header line")
    meta = parse_header(head.decode())
    fmt = meta.get("format", "text")
    if fmt == "packed":
        if len(body) % 32:
            raise ValueError("packed body is not a whole number of records")
        table = np.frombuffer(body, dtype="<f8").reshape(-1, 4)
    else:
        table = np.loadtxt(body.decode().splitlines(), ndmin=2) if body.strip() else np.zeros((0, 4))
    grid = tuple(SpherePoint(t, p) for t, p in table[:, :2])
    return FieldRealization(int(meta["spin"]), int(meta["band_limit"]), grid,
                            table[:, 2] + 1j * table[:, 3], int(meta["seed"]), meta.get("spectrum", ""),
                            int(meta.get("replicate", 0)), meta.get("grid", "nodes"))


def read_realization(path) -> FieldRealization:
    return realization_from_bytes(Path(path).read_bytes())


def equiangular_grid(n_theta: int, n_phi: int) -> list[SpherePoint]:
    """Colatitudes ``pi i / (n_theta - 1)`` (poles included) times longitudes ``2 pi j / n_phi``."""
    if n_theta < 1 or n_phi < 1:
        raise ValueError("grid dimensions must be positive")
    theta = np.pi * np.arange(n_theta) / max(n_theta - 1, 1)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    return [SpherePoint(min(t, np.pi), p) for t in theta for p in phi]


def read_nodes(path) -> list[SpherePoint]:
    """Node list file: one ``theta phi`` pair per line, ``#`` comments allowed."""
    table = np.loadtxt(path, ndmin=2, comments="#")
    if table.shape[1] != 2:
        raise ValueError("node file needs two columns: theta phi")
    return [SpherePoint(t, p) for t, p in table]
