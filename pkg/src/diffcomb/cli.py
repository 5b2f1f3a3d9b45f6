"""Command-line interface.

Every run writes its outputs plus a manifest.json recording the exact
argument vector, package and numpy versions, backend, and thread count.
`rerun` replays a manifest into a fresh directory; all data files are
byte-identical because every code path is deterministic given the recorded
arguments (stochastic generators take explicit seeds).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, is_dataclass

import numpy as np

from . import __version__, _kernels
from ._config import get_threads, set_threads
from .analysis import homometry_report, scaling_exponent, thinning_experiment
from .autocorr import autocorrelation, save_autocorrelation
from .diffraction import (
    detect_peaks,
    fold_diffraction,
    intensity_scan,
    save_diffraction,
    save_folded,
    save_peaks,
    uniform_grid,
)
from .generators import GENERATORS, build_pointset
from .lattice import Lattice, LatticeError
from .pointset import AlgebraError, LatticeAlgebra, load_pointset, save_pointset


class UsageError(ValueError):
    """Bad command-line input (unknown generator, malformed argument)."""


def _parse_basis(text: str) -> list[list[float]]:
    return [[float(v) for v in row.split(",")] for row in text.split(";")]


def _parse_motif(text: str) -> list:
    out = []
    for entry in text.split(";"):
        offs, _, wt = entry.partition(":")
        offset = [float(v) for v in offs.split(",")]
        w = complex(wt) if wt else 1.0 + 0.0j
        out.append([offset, [w.real, w.imag]])
    return out


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _parse_seeds(text: str) -> list[int]:
    """Either an explicit comma-separated seed list or a bare count.

    A single integer N is shorthand for seeds 0..N-1.
    """
    if "," in text:
        return [int(v) for v in text.split(",")]
    return list(range(int(text)))


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {_key(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return k


def _default_out(command: str) -> str:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    return os.path.join("runs", f"{command}-{stamp}-{os.getpid()}")


def _write_manifest(args, command: str, argv: list[str], outputs: list[str],
                    extra: dict | None = None, inputs: list[str] | None = None):
    params = {
        k: v for k, v in vars(args).items() if k not in ("func", "command") and not k.startswith("_")
    }
    manifest = {
        "schema": "diffcomb-run-v1",
        "command": command,
        "argv": list(argv),
        "params": _jsonable(params),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "backend": _kernels.backend_name(),
        "threads": get_threads(),
        "inputs": list(inputs or []),
        "outputs": outputs,
        "duration_seconds": round(time.monotonic() - getattr(args, "_t0", time.monotonic()), 6),
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _write_report(out_dir: str, report) -> str:
    path = os.path.join(out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(_jsonable(report), fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def _generator_params(args) -> dict:
    params = {}
    if args.basis:
        params["basis"] = _parse_basis(args.basis)
    if args.motif:
        params["motif"] = _parse_motif(args.motif)
    for name in ("x_max", "x_min", "r", "p", "window_lo", "window_hi"):
        v = getattr(args, name, None)
        if v is not None:
            params[name] = v
    for name in ("n", "seed", "iterations"):
        v = getattr(args, name, None)
        if v is not None:
            params[name] = int(v)
    if getattr(args, "region", None):
        params["region"] = args.region
    return params


def _grid_for(args, dim: int) -> np.ndarray:
    return uniform_grid(args.k_min, args.k_max, args.k_step, dim)


def cmd_generate(args, argv) -> int:
    if args.name not in GENERATORS:
        raise UsageError(f"unknown generator {args.name!r}; known: {', '.join(sorted(GENERATORS))}")
    S = build_pointset(args.name, _generator_params(args))
    os.makedirs(args.out, exist_ok=True)
    save_pointset(S, os.path.join(args.out, "points.csv"))
    density = len(S) / S.region.volume()
    _write_manifest(
        args, "generate", argv, ["points.csv", "points.json"],
        {"n_points": len(S), "generator": args.name, "density": density},
    )
    print(f"generate: {len(S)} points (density {density:.6g}) -> {args.out}")
    return 0


def cmd_autocorr(args, argv) -> int:
    S = load_pointset(args.points)
    est = autocorrelation(S, z_max=args.z_max, normalization=args.normalization)
    os.makedirs(args.out, exist_ok=True)
    save_autocorrelation(est, os.path.join(args.out, "autocorr.csv"))
    _write_manifest(
        args, "autocorr", argv, ["autocorr.csv", "autocorr.csv.json"],
        {"n_points": est.n_points, "n_displacements": len(est.coefficients),
         "z_max": est.z_max, "normalization": est.normalization},
        inputs=[args.points],
    )
    print(f"autocorr: {len(est.coefficients)} displacements -> {args.out}")
    return 0


def cmd_diffract(args, argv) -> int:
    S = load_pointset(args.points)
    grid = _grid_for(args, S.dim)
    est = intensity_scan(S, grid, estimator=args.estimator)
    os.makedirs(args.out, exist_ok=True)
    save_diffraction(est, os.path.join(args.out, "diffraction.csv"))
    _write_manifest(
        args, "diffract", argv, ["diffraction.csv"],
        {"n_points": est.n_points, "n_k": est.k.shape[0], "estimator": est.estimator},
        inputs=[args.points],
    )
    print(f"diffract: {est.k.shape[0]} wavenumbers -> {args.out}")
    return 0


def cmd_peaks(args, argv) -> int:
    S = load_pointset(args.points)
    grid = _grid_for(args, S.dim)
    est = intensity_scan(S, grid, estimator="amplitude_squared")
    peaks = detect_peaks(est, args.threshold, pointset=None if args.no_refine else S)
    os.makedirs(args.out, exist_ok=True)
    save_peaks(peaks, os.path.join(args.out, "peaks.csv"))
    _write_manifest(
        args, "peaks", argv, ["peaks.csv"],
        {"n_peaks": len(peaks), "threshold": args.threshold},
        inputs=[args.points],
    )
    print(f"peaks: {len(peaks)} above {args.threshold} -> {args.out}")
    return 0


def cmd_fold(args, argv) -> int:
    S = load_pointset(args.points)
    if args.basis:
        L = Lattice(np.array(_parse_basis(args.basis)))
    elif isinstance(S.algebra, LatticeAlgebra):
        L = S.algebra.lattice
    else:
        raise LatticeError("points are not lattice-supported; pass --basis for the direct lattice")
    grid = _grid_for(args, S.dim)
    est = intensity_scan(S, grid, estimator="amplitude_squared")
    folded = fold_diffraction(est, L.dual(), bins=args.bins)
    os.makedirs(args.out, exist_ok=True)
    save_folded(folded, os.path.join(args.out, "folded.csv"))
    spread = folded.max_spread()
    verdict = None
    if args.spread_tol is not None:
        verdict = "PASS" if spread <= args.spread_tol else "FAIL"
    extra = {"bins": folded.bins, "max_spread": spread}
    if verdict:
        extra["verdict"] = verdict
    _write_manifest(args, "fold", argv, ["folded.csv"], extra, inputs=[args.points])
    tail = f" [{verdict}]" if verdict else ""
    print(f"fold: max spread {spread:.3e} over {folded.index.shape[0]} bins{tail} -> {args.out}")
    return 0 if verdict != "FAIL" else 1


def cmd_homometry(args, argv) -> int:
    A = load_pointset(args.points_a)
    B = load_pointset(args.points_b)
    rep = homometry_report(A, B, z_max=args.z_max, tolerance=args.tolerance,
                           normalization=args.normalization)
    os.makedirs(args.out, exist_ok=True)
    _write_report(args.out, rep)
    table = os.path.join(args.out, "comparison.csv")
    with open(table, "w") as fh:
        fh.write("displacement,re_a,im_a,re_b,im_b,abs_diff\n")
        for key, va, vb, dv in rep.table:
            fh.write(
                ",".join(
                    ['"' + " ".join(str(v) for v in key) + '"'] +
                    [f"{x:.15g}" for x in (va.real, va.imag, vb.real, vb.imag, dv)]
                ) + "\n"
            )
    _write_manifest(
        args, "homometry", argv, ["report.json", "comparison.csv"],
        {"verdict": rep.verdict, "max_deviation": rep.max_deviation},
        inputs=[args.points_a, args.points_b],
    )
    print(f"homometry: {rep.verdict} (max deviation {rep.max_deviation:.4g}, tolerance {rep.tolerance})")
    return 0 if rep.verdict == "HOMOMETRIC-AT-SCALE" else 1


def cmd_thin(args, argv) -> int:
    S = load_pointset(args.points)
    grid = _grid_for(args, S.dim)
    est = intensity_scan(S, grid, estimator="amplitude_squared")
    peaks = detect_peaks(est, args.threshold, pointset=S).top_nonzero(args.n_peaks)
    rep = thinning_experiment(S, args.p, _parse_seeds(args.seeds), peaks)
    os.makedirs(args.out, exist_ok=True)
    _write_report(args.out, rep)
    _write_manifest(
        args, "thin", argv, ["report.json"],
        {"verdict": rep.verdict,
         "ratio_predicted": rep.ratio_predicted,
         "background_predicted": rep.background_predicted},
        inputs=[args.points],
    )
    print(
        f"thin: {rep.verdict} mean peak ratio {float(rep.ratio_mean.mean()):.4f} "
        f"(predicted {rep.ratio_predicted:.4f}), background {rep.background_mean:.4f} "
        f"(predicted {rep.background_predicted:.4f})"
    )
    return 0 if rep.verdict == "PASS" else 1


def cmd_scaling(args, argv) -> int:
    if args.name not in GENERATORS:
        raise UsageError(f"unknown generator {args.name!r}; known: {', '.join(sorted(GENERATORS))}")
    rep = scaling_exponent(args.name, _parse_floats(args.k), _parse_floats(args.sizes),
                           params=_generator_params(args))
    os.makedirs(args.out, exist_ok=True)
    _write_report(args.out, rep)
    _write_manifest(args, "scaling", argv, ["report.json"],
                    {"beta": rep.beta, "label": rep.label})
    print(f"scaling: beta = {rep.beta:.4f} ({rep.label})")
    return 0


def cmd_rerun(args, argv) -> int:
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    if manifest.get("schema") != "diffcomb-run-v1":
        raise ValueError(f"unrecognized manifest schema {manifest.get('schema')!r}")
    replay = list(manifest["argv"])
    if "--out" in replay:
        i = replay.index("--out")
        replay[i + 1] = args.out
    else:
        replay += ["--out", args.out]
    print(f"rerun: replaying `{' '.join(replay)}`")
    return main(replay)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffcomb",
        description="Point-set diffraction workbench: generate combs, estimate "
                    "autocorrelations and diffraction, run comparison experiments.",
    )
    parser.add_argument("--version", action="version", version=f"diffcomb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default: runs/<command>-<stamp>)")
    common.add_argument("--threads", type=int, default=None, help="worker threads for batched kernels")

    gen_params = argparse.ArgumentParser(add_help=False)
    gen_params.add_argument("--basis", help="lattice basis, rows ; separated: '2,0;1,1'")
    gen_params.add_argument("--motif", help="motif 'x1,..:w;x1,..:w' with complex weights")
    gen_params.add_argument("--x-max", dest="x_max", type=float)
    gen_params.add_argument("--x-min", dest="x_min", type=float)
    gen_params.add_argument("--r", type=float, help="region radius")
    gen_params.add_argument("--region", choices=["box", "ball"])
    gen_params.add_argument("--n", type=int, help="point count for integer-supported sequences")
    gen_params.add_argument("--p", type=float, help="Bernoulli retention probability")
    gen_params.add_argument("--seed", type=int)
    gen_params.add_argument("--iterations", type=int, help="substitution iterations")
    gen_params.add_argument("--window-lo", dest="window_lo", type=float)
    gen_params.add_argument("--window-hi", dest="window_hi", type=float)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--k-min", dest="k_min", type=float, default=0.0)
    grid.add_argument("--k-max", dest="k_max", type=float, default=1.0)
    grid.add_argument("--k-step", dest="k_step", type=float, default=1.0 / 1024)

    p = sub.add_parser("generate", parents=[common, gen_params], help="build a point set")
    p.add_argument("name", help="generator name")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("autocorr", parents=[common], help="autocorrelation coefficients")
    p.add_argument("--points", required=True, help="points.csv written by generate")
    p.add_argument("--z-max", dest="z_max", type=float, default=64.0)
    p.add_argument("--normalization", choices=["literal", "boundary_corrected"],
                   default="boundary_corrected")
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("diffract", parents=[common, grid], help="intensity scan on a k grid")
    p.add_argument("--points", required=True)
    p.add_argument("--estimator", choices=["amplitude_squared", "periodogram"],
                   default="amplitude_squared")
    p.set_defaults(func=cmd_diffract)

    p = sub.add_parser("peaks", parents=[common, grid], help="detect and refine Bragg peaks")
    p.add_argument("--points", required=True)
    p.add_argument("--threshold", type=float, default=1e-3)
    p.add_argument("--no-refine", action="store_true", help="skip golden-section refinement")
    p.set_defaults(func=cmd_peaks)

    p = sub.add_parser("fold", parents=[common, grid],
                       help="fold a k grid modulo the reciprocal lattice")
    p.add_argument("--points", required=True)
    p.add_argument("--basis", help="direct lattice basis (default: the points' own lattice)")
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--spread-tol", dest="spread_tol", type=float, default=None,
                   help="verdict threshold on max per-bin spread (FAIL exits 1)")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("homometry", parents=[common], help="compare two autocorrelations")
    p.add_argument("--points-a", dest="points_a", required=True)
    p.add_argument("--points-b", dest="points_b", required=True)
    p.add_argument("--z-max", dest="z_max", type=float, default=32.0)
    p.add_argument("--tolerance", type=float, default=0.03)
    p.add_argument("--normalization", choices=["literal", "boundary_corrected"],
                   default="boundary_corrected")
    p.set_defaults(func=cmd_homometry)

    p = sub.add_parser("thin", parents=[common, grid], help="Bernoulli thinning experiment")
    p.add_argument("--points", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seeds", required=True,
                   help="comma-separated seed list, or a bare count N for seeds 0..N-1")
    p.add_argument("--threshold", type=float, default=1e-3)
    p.add_argument("--n-peaks", dest="n_peaks", type=int, default=3)
    p.set_defaults(func=cmd_thin)

    p = sub.add_parser("scaling", parents=[common, gen_params], help="intensity scaling fit")
    p.add_argument("name", help="generator name")
    p.add_argument("--k", required=True, help="probe wavenumber (comma-separated for nD)")
    p.add_argument("--sizes", required=True, help="comma-separated sizes")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("rerun", parents=[common], help="replay a recorded manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_rerun)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(argv) if argv is not None else sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args._t0 = time.monotonic()
    if getattr(args, "threads", None):
        set_threads(args.threads)
    if getattr(args, "out", None) is None and args.command != "rerun":
        args.out = _default_out(args.command)
    if args.command == "rerun" and args.out is None:
        args.out = _default_out("rerun")
    try:
        return args.func(args, argv)
    except (UsageError, ValueError, LatticeError, AlgebraError, OSError, OverflowError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
