"""Command-line pipeline: fit-boundary, solve, map, verify.

Runs are driven by a JSON config file; repeated flags override config
fields. Exit codes: 0 success, 2 config error, 3 numerical failure,
4 invariant breach. Everything is deterministic, so a fixed config
reproduces its outputs bit for bit.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundary import (
    TrigBoundary,
    boundary_from_dict,
    boundary_to_dict,
    detect_corners,
)
from .corrector import (
    CorrectedCorrespondence,
    apply_corrections,
    build_spline,
    monotonicity_report,
)
from .errors import AcuteMapError, ConfigError, InvariantError, NumericalError
from .fredholm import FredholmSolution, RawCorrespondence, assemble, solve
from .mapper import DiskMap

DEFAULTS = {
    "M": 64,
    "N": 1024,
    "Nq": 1024,
    "Nq_spline": 256,
    "corners": None,
    "corner_threshold": 0.2,
    "slope_floor": 0.05,
    "delta_rim": 5e-3,
    "spline": "cubic",
    "f0_tol": 1e-2,
    "out_dir": "out",
}


@dataclass
class RunConfig:
    boundary: object
    M: int = 64
    N: int = 1024
    Nq: int = 1024
    Nq_spline: int = 256
    corners: object = None
    corner_threshold: float = 0.2
    slope_floor: float = 0.05
    delta_rim: float = 5e-3
    spline: str = "cubic"
    f0_tol: float = 1e-2
    out_dir: Path = Path("out")
    base_dir: Path = field(default_factory=Path)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _write_json(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(args):
    raw = _read_json(args.config)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "boundary" not in raw:
        raise ConfigError("config needs a 'boundary' field (inline spec or path)")
    merged = dict(DEFAULTS)
    merged.update(raw)
    for name in ("M", "N", "Nq", "Nq_spline", "slope_floor", "delta_rim",
                 "spline", "out_dir"):
        flag = getattr(args, name, None)
        if flag is not None:
            merged[name] = flag
    if getattr(args, "corners_mode", None) is not None:
        merged["corners"] = {"auto": "auto", "none": []}[args.corners_mode]

    cfg = RunConfig(
        boundary=merged["boundary"],
        M=int(merged["M"]),
        N=int(merged["N"]),
        Nq=int(merged["Nq"]),
        Nq_spline=int(merged["Nq_spline"]),
        corners=merged["corners"],
        corner_threshold=float(merged["corner_threshold"]),
        slope_floor=float(merged["slope_floor"]),
        delta_rim=float(merged["delta_rim"]),
        spline=str(merged["spline"]),
        f0_tol=float(merged["f0_tol"]),
        out_dir=Path(merged["out_dir"]),
        base_dir=Path(args.config).resolve().parent,
    )
    if cfg.spline not in ("cubic", "linear"):
        raise ConfigError(f"spline kind must be 'cubic' or 'linear', got {cfg.spline!r}")
    if cfg.M < 1 or cfg.N < 4 or cfg.Nq < 16 or cfg.Nq_spline < 8:
        raise ConfigError("M, N, Nq, Nq_spline must be positive and sensible")
    if cfg.M > cfg.N // 4:
        raise ConfigError(f"M={cfg.M} exceeds N/4={cfg.N // 4}; raise N or lower M")
    if not 0.0 < cfg.delta_rim < 1.0:
        raise ConfigError("delta_rim must lie in (0, 1)")
    return cfg


def _load_boundary(cfg):
    spec = cfg.boundary
    if isinstance(spec, str):
        spec = _read_json(cfg.base_dir / spec)
    return boundary_from_dict(spec)


def _corner_requests(cfg, boundary, file_corners):
    """Resolve the corner list: explicit config entries, 'auto', or file."""
    corners = cfg.corners
    if corners == "auto":
        detected = detect_corners(boundary, threshold=cfg.corner_threshold)
        return [(c.t0, cfg.spline) for c in detected]
    if corners is None:
        return [(c.t0, cfg.spline) for c in file_corners]
    out = []
    for entry in corners:
        if not isinstance(entry, dict) or "t0" not in entry:
            raise ConfigError("each corner entry needs at least a 't0' field")
        kind = entry.get("spline", cfg.spline)
        if kind not in ("cubic", "linear"):
            raise ConfigError(f"corner spline kind {kind!r} invalid")
        out.append((float(entry["t0"]), kind))
    return out


def _rebuild(cfg):
    """Reload boundary, solution, and corrections written by cmd_solve."""
    boundary, _ = _load_boundary(cfg)
    sol = FredholmSolution.from_dict(_read_json(cfg.out_dir / "solution.json"))
    raw = RawCorrespondence(boundary, sol)
    correction = _read_json(cfg.out_dir / "correction.json")
    splines = []
    for entry in correction.get("corners", []):
        if entry.get("fold"):
            splines.append(
                build_spline(
                    raw,
                    float(entry["t0"]),
                    float(entry["eps1"]),
                    float(entry["eps2"]),
                    kind=entry.get("kind", cfg.spline),
                    theta_star=entry.get("theta_star"),
                )
            )
    if splines:
        return CorrectedCorrespondence(raw, splines)
    return raw


def cmd_fit_boundary(args):
    data = _read_json(args.samples)
    if isinstance(data, dict) and "samples" in data:
        pts = data["samples"]
    elif isinstance(data, list):
        pts = data
    else:
        raise ConfigError("samples file must be a list of [x, y] or {'samples': ...}")
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError("samples must be [x, y] pairs")
    boundary = TrigBoundary.fit(arr[:, 0] + 1j * arr[:, 1], args.m, args.n)
    corners = []
    if args.detect_corners:
        corners = detect_corners(boundary, threshold=args.corner_threshold)
    _write_json(Path(args.out), boundary_to_dict(boundary, corners))
    print(f"fit residual {boundary.fit_residual:.6e}")
    for c in corners:
        print(f"corner t0={c.t0:.6f} angle={c.lam:.4f}*pi")
    print(f"wrote {args.out}")
    return 0


def _dump_kernel_grid(out_dir, grid):
    """Kernel matrix and forcing samples as plain CSV, for debugging plots."""
    out_dir.mkdir(parents=True, exist_ok=True)
    np.savetxt(out_dir / "kernel_matrix.csv", grid.matrix, delimiter=",")
    np.savetxt(
        out_dir / "kernel_forcing.csv",
        np.column_stack([grid.nodes, grid.forcing]),
        delimiter=",",
        header="t,P",
        comments="",
    )


def cmd_solve(args):
    cfg = load_config(args)
    boundary, file_corners = _load_boundary(cfg)
    system = assemble(boundary, cfg.M, cfg.N)
    solution = solve(system)
    if args.dump_kernels:
        _dump_kernel_grid(cfg.out_dir, system.grid)
    _write_json(cfg.out_dir / "solution.json", solution.to_dict())
    raw = RawCorrespondence(boundary, solution)
    requests = _corner_requests(cfg, boundary, file_corners)
    corr, reports = apply_corrections(
        raw, requests, kind=cfg.spline, slope_floor=cfg.slope_floor
    )
    mono = monotonicity_report(corr)
    _write_json(
        cfg.out_dir / "correction.json",
        {"corners": reports, "monotone": mono["monotone"], "span": mono["span"]},
    )
    print(f"residual {solution.residual_norm:.3e}")
    for rep in reports:
        if rep["fold"]:
            print(
                f"corner t0={rep['t0']:.6f}: corrected on "
                f"[-{rep['eps1']:.4f}, +{rep['eps2']:.4f}] "
                f"({rep['kind']}, retries {rep['retries']})"
            )
        else:
            print(f"corner t0={rep['t0']:.6f}: no fold")
    print(f"monotone {mono['monotone']} span {mono['span']:.12f}")
    if not mono["monotone"]:
        print("correspondence is not strictly increasing", file=sys.stderr)
        return 4
    return 0


def _polar_grid(radii, angles):
    rr = np.asarray(radii, dtype=float)
    aa = 2.0 * np.pi * np.arange(angles) / angles
    return (rr[:, None] * np.exp(1j * aa)[None, :]).ravel()


def cmd_map(args):
    cfg = load_config(args)
    corr = _rebuild(cfg)
    disk = DiskMap(corr, nq=cfg.Nq, nq_spline=cfg.Nq_spline, delta_rim=cfg.delta_rim)
    radii = _parse_floats(args.radii) if args.radii else [0.25, 0.5, 0.75, 0.9]
    zetas = _polar_grid(radii, args.angles)
    bad = np.nonzero(np.abs(zetas) > disk.trusted_radius + 1e-12)[0]
    values = np.full(zetas.size, np.nan + 1j * np.nan)
    good = np.setdiff1d(np.arange(zetas.size), bad)
    if good.size:
        values[good] = disk.map_points(zetas[good], workers=args.workers)
    _write_grid_csv(cfg.out_dir / "map_grid.csv", zetas, values)
    report = disk.verify().to_dict()
    report["point_errors"] = [
        {"index": int(i), "reason": f"|zeta| > {disk.trusted_radius:.6f}"}
        for i in bad
    ]
    _write_json(cfg.out_dir / "report.json", report)
    if args.levels:
        _write_levels_csv(
            cfg.out_dir / "level_lines.csv", disk, _parse_floats(args.levels),
            args.angles, args.rays,
        )
    print(
        f"f0_abs {report['f0_abs']:.3e} boundary_dev {report['boundary_dev']:.3e} "
        f"winding {report['winding']} cr_residual {report['cr_residual']:.3e}"
    )
    if bad.size:
        print(f"{bad.size} grid points outside the trusted region", file=sys.stderr)
        return 3
    if report["winding"] != 1 or report["f0_abs"] > cfg.f0_tol:
        return 4
    return 0


def cmd_verify(args):
    cfg = load_config(args)
    corr = _rebuild(cfg)
    mono = monotonicity_report(corr)
    disk = DiskMap(corr, nq=cfg.Nq, nq_spline=cfg.Nq_spline, delta_rim=cfg.delta_rim)
    report = disk.verify().to_dict()
    report["monotone"] = mono["monotone"]
    report["span"] = mono["span"]
    _write_json(cfg.out_dir / "report.json", report)
    print(
        f"monotone {mono['monotone']} winding {report['winding']} "
        f"f0_abs {report['f0_abs']:.3e} boundary_dev {report['boundary_dev']:.3e}"
    )
    if not mono["monotone"] or report["winding"] != 1:
        return 4
    return 0


def _parse_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}") from exc


def _row(*values):
    # repr of builtin floats is the shortest round-trip form
    return ",".join(repr(float(v)) for v in values)


def _write_grid_csv(path, zetas, values):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("re_zeta,im_zeta,re_f,im_f\n")
        for z, f in zip(zetas, values):
            fh.write(_row(z.real, z.imag, f.real, f.imag) + "\n")


def _write_levels_csv(path, disk, levels, angles, rays):
    path.parent.mkdir(parents=True, exist_ok=True)
    aa = 2.0 * np.pi * np.arange(angles) / angles
    with open(path, "w") as fh:
        fh.write("kind,index,re_zeta,im_zeta,re_f,im_f\n")
        for idx, r in enumerate(levels):
            zs = r * np.exp(1j * aa)
            fs = disk.map_points(zs)
            for z, f in zip(zs, fs):
                fh.write(f"circle,{idx}," + _row(z.real, z.imag, f.real, f.imag) + "\n")
        if rays:
            rr = np.linspace(0.0, max(levels), 64)
            for idx in range(rays):
                zs = rr * np.exp(1j * (2.0 * np.pi * idx / rays))
                fs = disk.map_points(zs)
                for z, f in zip(zs, fs):
                    fh.write(f"ray,{idx}," + _row(z.real, z.imag, f.real, f.imag) + "\n")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="acutemap",
        description="Approximate conformal maps of the disk onto domains "
        "with acute corners",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit-boundary", help="fit coefficients to curve samples")
    fit.add_argument("samples", help="JSON file with {'samples': [[x, y], ...]}")
    fit.add_argument("--m", type=int, required=True, help="negative extent")
    fit.add_argument("--n", type=int, required=True, help="positive extent")
    fit.add_argument("--out", default="boundary.json")
    fit.add_argument("--corner-threshold", type=float, default=0.2)
    fit.add_argument("--no-detect-corners", dest="detect_corners",
                     action="store_false")
    fit.set_defaults(func=cmd_fit_boundary, detect_corners=True)

    def common(p):
        p.add_argument("--config", required=True)
        p.add_argument("--M", type=int, dest="M")
        p.add_argument("--N", type=int, dest="N")
        p.add_argument("--Nq", type=int, dest="Nq")
        p.add_argument("--Nq-spline", type=int, dest="Nq_spline")
        p.add_argument("--spline", choices=("cubic", "linear"), dest="spline")
        p.add_argument("--slope-floor", type=float, dest="slope_floor")
        p.add_argument("--delta-rim", type=float, dest="delta_rim")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--corners", choices=("auto", "none"), dest="corners_mode")

    sol = sub.add_parser("solve", help="solve the correspondence and correct corners")
    common(sol)
    sol.add_argument("--dump-kernels", action="store_true",
                     help="also write the sampled kernel grid as CSV")
    sol.set_defaults(func=cmd_solve)

    mp = sub.add_parser("map", help="evaluate the map on a polar grid")
    common(mp)
    mp.add_argument("--radii", help="comma-separated grid radii")
    mp.add_argument("--angles", type=int, default=64)
    mp.add_argument("--levels", help="comma-separated level-line radii")
    mp.add_argument("--rays", type=int, default=0)
    mp.add_argument("--workers", type=int, default=1)
    mp.set_defaults(func=cmd_map)

    ver = sub.add_parser("verify", help="re-check invariants and quality metrics")
    common(ver)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 4
    except AcuteMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
