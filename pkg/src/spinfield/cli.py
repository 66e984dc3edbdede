"""Command-line interface: ``spinfield {synth,levy,spectrum,verify,bundle-check}``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage or
I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

import numpy as np

from .bundle import verify_angle_lemma, verify_cocycle
from .errors import SpinFieldError
from .fieldsynth import Reality, draw_coefficients, levy_field, synthesize_field
from .fileformats import (FORMATS, equiangular_grid, read_nodes, read_spectrum, realization_to_bytes,
                          write_spectrum)
from .inference import levy_law_checks, levy_variance_check
from .so3 import SpherePoint, random_sphere_points
from .spectral import (AllPlus, Alternating, CovarianceSpectrum, halfsphere_f_coefficients, sqrt_spectrum)
from .suites import DEFAULT_SUITES, SUITES, root_to_covariance, run_suites

DEFAULT_SEED = 20240601
DEFAULT_GRID = "64x128"
EXAMPLE_SPECTRUM = "example_spectrum.json"


class UsageError(Exception):
    pass


def parse_grid(text: str) -> tuple[int, int]:
    try:
        t, p = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"grid must look like 64x128, got {text!r}") from None
    if t < 1 or p < 1:
        raise UsageError("grid dimensions must be positive")
    return t, p


def _grid(args):
    if args.nodes:
        return read_nodes(args.nodes), "nodes"
    t, p = parse_grid(args.grid)
    return equiangular_grid(t, p), f"equiangular:{t}x{p}"


def _write(args, real):
    data = realization_to_bytes(real, args.format)
    if args.out in (None, "-"):
        if args.format == "packed":
            raise UsageError("packed output needs --out")
        sys.stdout.write(data.decode())
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)


def _load_spectrum(path):
    if path is None:
        ref = resources.files("spinfield") / "data" / EXAMPLE_SPECTRUM
        with resources.as_file(ref) as p:
            return read_spectrum(p)
    return read_spectrum(path)


def _emit(reports) -> int:
    for rep in reports:
        print(rep.to_text())
    ok = all(rep.passed for rep in reports)
    print("RESULT: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_synth(args) -> int:
    spec = _load_spectrum(args.spectrum)
    f = spec if not isinstance(spec, CovarianceSpectrum) else sqrt_spectrum(spec)
    grid, kind = _grid(args)
    reality = Reality.REAL if args.real else Reality.COMPLEX
    draw = draw_coefficients(f, args.seed, reality, args.replicate)
    real = synthesize_field(f, draw, grid, kind)
    _write(args, real)
    print(f"# provenance spectrum={real.spectrum_id} seed={args.seed} replicate={args.replicate}",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def _distance_pairs(seed: int, count: int = 5):
    """Pairs of points at distances spread over ``[0.5, pi]``."""
    rng = np.random.default_rng(seed)
    pairs = []
    for d in np.linspace(0.5, np.pi, count):
        x = random_sphere_points(1, rng)[0]
        v = x.vector
        u = np.cross(v, rng.standard_normal(3))
        u /= np.linalg.norm(u)
        pairs.append((x, SpherePoint.from_vector(np.cos(d) * v + np.sin(d) * u)))
    return pairs


def cmd_levy(args) -> int:
    if args.band_limit < 1:
        raise UsageError("band limit must be at least 1")
    grid, kind = _grid(args)
    real = levy_field(args.band_limit, args.seed, grid, grid_kind=kind)
    if args.out not in (None, "-"):
        _write(args, real)
    rng = np.random.default_rng(args.seed)
    points = random_sphere_points(1, rng)
    if args.check_distance:
        reports = levy_law_checks(args.band_limit, _distance_pairs(args.seed), points, args.n, args.seed)
    else:
        reports = [levy_variance_check(args.band_limit, points, args.n, args.seed)]
    print(f"# provenance spectrum={real.spectrum_id} seed={args.seed}")
    return _emit(reports)


def cmd_spectrum(args) -> int:
    if args.levy:
        spec = halfsphere_f_coefficients(args.band_limit)
    elif args.spectrum:
        spec = read_spectrum(args.spectrum)
        if args.sqrt:
            policy = AllPlus() if args.signs == "plus" else Alternating(0)
            spec = sqrt_spectrum(root_to_covariance(spec), policy)
    else:
        if args.band_limit < abs(args.spin):
            raise UsageError("band limit must be at least |spin|")
        rng = np.random.default_rng(args.seed)
        size = args.band_limit - abs(args.spin) + 1
        spec = CovarianceSpectrum(args.spin, args.band_limit, rng.uniform(0.1, 1.0, size))
    if args.out in (None, "-"):
        from .fileformats import spectrum_to_text
        sys.stdout.write(spectrum_to_text(spec))
    else:
        write_spectrum(spec, args.out)
    return 0


def cmd_verify(args) -> int:
    phi = root_to_covariance(_load_spectrum(args.spectrum))
    names = DEFAULT_SUITES if args.suite in (None, "default") else tuple(args.suite.split(","))
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    return _emit(run_suites(phi, names, args.seed))


def cmd_bundle_check(args) -> int:
    reports = [verify_angle_lemma(args.n, args.seed), verify_cocycle(args.spin, max(args.n // 2, 1), args.seed + 1)]
    return _emit(reports)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinfield", description="Spin-weighted Gaussian random fields on the sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=10000):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
        p.add_argument("--n", type=int, default=n_default, help="number of Monte Carlo draws or trials")

    def output(p):
        p.add_argument("--grid", default=DEFAULT_GRID, help="equiangular grid TxP, poles included (default 64x128)")
        p.add_argument("--nodes", help="node list file with 'theta phi' rows (overrides --grid)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("synth", help="synthesize one field sample from a spectrum file")
    p.add_argument("--spectrum", help="spectrum file (default: shipped example)")
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--real", action="store_true", help="real-valued draw (spin 0, real coefficients)")
    common(p)
    output(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("levy", help="sample of Levy's spherical Brownian field with a variance summary")
    p.add_argument("--band-limit", type=int, default=100)
    p.add_argument("--check-distance", action="store_true", help="also check Var(W_x - W_y) = d(x, y)")
    common(p)
    output(p)
    p.set_defaults(func=cmd_levy)

    p = sub.add_parser("spectrum", help="write a spectrum file")
    p.add_argument("--spin", type=int, default=0)
    p.add_argument("--band-limit", type=int, default=8)
    p.add_argument("--levy", action="store_true", help="half-sphere root spectrum of the Levy field")
    p.add_argument("--spectrum", help="input spectrum file to convert")
    p.add_argument("--sqrt", action="store_true", help="write a square root of the input covariance")
    p.add_argument("--signs", choices=("plus", "alternating"), default="plus")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run verification suites on a spectrum")
    p.add_argument("--spectrum", help="spectrum file (default: shipped example)")
    p.add_argument("--suite", help=f"comma-separated suites from {','.join(SUITES)} or 'default'")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bundle-check", help="angle lemma and cocycle identities on random charts")
    p.add_argument("--spin", type=int, default=2)
    common(p, n_default=1000)
    p.set_defaults(func=cmd_bundle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "n", 2) < 2:
            raise UsageError("--n must be at least 2")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, SpinFieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
