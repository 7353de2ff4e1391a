"""Command-line front end: ``zipfif construct|feasible|render|verify``.

Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 empty feasibility
interval, 4 failed verification check.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, number
from .errors import ZipfifError
from .render import CurveSample, refine_orbit
from .shape import (
    STAGES,
    FeasibleInterval,
    check_family,
    compute_slope_aux,
    feasible_interval,
    line_values_at,
)
from .system import ZipperSystem, build_system
from .verify import (
    check_envelope,
    check_interpolation,
    check_lines,
    check_positive,
    check_rectangle,
    l1_error,
    weierstrass,
)

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_EMPTY, EXIT_FAILED = 0, 1, 2, 3, 4
SVG_MAX_POINTS = 20000


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(type(o).__name__)


def _finite(v):
    """JSON has no inf/nan; encode them as strings."""
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _finite(t) for k, t in v.items()}
    if isinstance(v, (list, tuple)):
        return [_finite(t) for t in v]
    return v


def write_json(path: Path, report: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_finite(report), indent=2, default=_json_default) + "\n")


def write_curve_csv(path: Path, sample: CurveSample) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("x,f1,f2\n")
        for x, a, b in zip(sample.x, sample.f1, sample.f2):
            fh.write(f"{x:.17g},{a:.17g},{b:.17g}\n")


def read_curve_csv(path: Path) -> CurveSample:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["x", "f1", "f2"]:
        raise ConfigError(f"{path}: expected header x,f1,f2")
    arr = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if arr.size == 0:
        raise OSError(f"{path} has no rows")
    return CurveSample(arr[:, 0], arr[:, 1], arr[:, 2])


def _decimate(x: np.ndarray, v: np.ndarray, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep the min and max of each bucket so spikes survive thinning."""
    if len(x) <= limit:
        return x, v
    edges = np.linspace(0, len(x), limit // 2 + 1).astype(int)
    keep = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        seg = v[lo:hi]
        keep.extend(sorted({lo + int(seg.argmin()), lo + int(seg.argmax())}))
    keep = np.array(keep)
    return x[keep], v[keep]


def write_svg(
    path: Path, sample: CurveSample, cfg: RunConfig, component: str = "f1",
    width: int = 800, height: int = 500,
) -> None:
    """SVG 1.1 plot: one polyline for the curve plus any configured constraint geometry."""
    x, v = _decimate(sample.x, sample.component(component), SVG_MAX_POINTS)
    spec = cfg.shape
    overlays: list[tuple[np.ndarray, np.ndarray]] = []
    knots = cfg.data.xs
    if spec is not None and component == "f1":
        if spec.mode == "rectangle":
            for k in (spec.k1, spec.k2):
                overlays.append((knots[[0, -1]], np.array([k, k])))
        elif spec.mode in ("above", "below", "between"):
            for which in ("b1", "b2"):
                if getattr(spec, which) is not None:
                    lx, ly = line_values_at(cfg.data, spec, which)
                    overlays.append((lx, ly))
    ys = np.concatenate([v] + [o[1] for o in overlays])
    x0, x1 = float(knots[0]), float(knots[-1])
    y0, y1 = float(ys.min()), float(ys.max())
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 40

    def pts(px, py):
        sx = pad + (px - x0) / (x1 - x0) * (width - 2 * pad)
        sy = height - pad - (py - y0) / (y1 - y0) * (height - 2 * pad)
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}"'
        f' viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for ox, oy in overlays:
        parts.append(
            f'<polyline points="{pts(ox, oy)}" fill="none" stroke="#c0392b"'
            ' stroke-width="1" stroke-dasharray="4,3"/>'
        )
    parts.append(f'<polyline points="{pts(x, v)}" fill="none" stroke="#1f4e9c" stroke-width="0.8"/>')
    parts.append(
        f'<text x="{pad}" y="{pad - 12}" font-family="sans-serif" font-size="12">'
        f"{component} on [{x0:g}, {x1:g}], range [{y0:.4g}, {y1:.4g}]</text>"
    )
    parts.append("</svg>")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "omega", None) is not None:
        if cfg.shape is None:
            raise ConfigError("--omega needs a shape section in the config")
        cfg = replace(cfg, shape=replace(cfg.shape, omega=args.omega))
    if getattr(args, "depth", None) is not None:
        cfg = replace(cfg, render=replace(cfg.render, depth=args.depth))
    if getattr(args, "relaxed_contraction", False):
        cfg = replace(cfg, relaxed=True)
    if getattr(args, "out", None) is not None:
        cfg = replace(cfg, output=replace(cfg.output, dir=Path(args.out)))
    return cfg


def _system(cfg: RunConfig) -> ZipperSystem:
    return build_system(cfg.data, cfg.sig, cfg.fam, relaxed=cfg.relaxed)


def _constants(sys_: ZipperSystem) -> dict:
    out = dict(sys_.constants())
    out["a"] = sys_.a.tolist()
    out["b"] = sys_.b.tolist()
    out["lipschitz"] = dict(sys_.lipschitz)
    out["relaxed"] = sys_.relaxed
    return out


def cmd_construct(cfg: RunConfig, args) -> tuple[int, dict]:
    t = time.perf_counter()
    s = _system(cfg)
    report = {"command": "construct", "constants": _constants(s)}
    report["timings"] = {"construct_s": time.perf_counter() - t}
    for k, v in s.constants().items():
        print(f"{k:7s} = {v:.12g}")
    if not s.has_envelope:
        print("note: envelope denominator is not positive; U, Utilde, theta, kappa undefined")
    return EXIT_OK, report


def parse_given(items: Sequence[str] | None, n: int) -> list[dict]:
    """``name=v`` applies to every subinterval; ``name=v1,...,vn`` gives one value each."""
    per = [dict() for _ in range(n)]
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--given expects name=value, got {item!r}")
        name, _, rhs = item.partition("=")
        name = name.strip()
        if name not in STAGES:
            raise ConfigError(f"--given name must be one of {STAGES}, got {name!r}")
        vals = [number(v) for v in rhs.split(",")]
        if len(vals) == 1:
            vals = vals * n
        if len(vals) != n:
            raise ConfigError(f"--given {name} needs 1 or {n} values, got {len(vals)}")
        for i, v in enumerate(vals):
            per[i][name] = v
    return per


def _aux(cfg: RunConfig):
    if cfg.shape.mode == "rectangle" and not cfg.shape.corrected:
        return None
    return compute_slope_aux(cfg.data, cfg.shape, fam=cfg.fam, sig=cfg.sig)


def cmd_feasible(cfg: RunConfig, args) -> tuple[int, dict]:
    if cfg.shape is None:
        raise ConfigError("feasible needs a shape section in the config")
    spec = cfg.shape
    spec.check(cfg.data)
    aux = _aux(cfg)
    n = cfg.data.n
    report: dict = {"command": "feasible", "mode": spec.mode, "omega": spec.omega}
    if aux is not None:
        report["auxiliaries"] = asdict(aux)
    any_empty = False
    if args.stage == "all":
        fam_report = check_family(cfg.data, cfg.fam, spec, aux, sig=cfg.sig)
        rows = []
        print(f"{'i':>2} {'factor':6} {'interval':28} {'chosen':>20}  result")
        for c in fam_report.checks:
            chosen = f"{c.vmin:.6g}" if c.vmin == c.vmax else f"[{c.vmin:.6g}, {c.vmax:.6g}]"
            print(f"{c.interval:>2} {c.factor:6} {str(c.bounds):28} {chosen:>20}  "
                  + ("ok" if c.passed else c.binding))
            any_empty |= c.bounds.empty
            rows.append(_interval_row(c.interval, c.factor, c.bounds) | {
                "vmin": c.vmin, "vmax": c.vmax, "passed": c.passed, "binding": c.binding})
        print(f"S̄ = {fam_report.sbar:.6g}, ω = {spec.omega:g}"
              + ("" if fam_report.omega_ok else "  (S̄ < ω fails)"))
        report.update(rows=rows, sbar=fam_report.sbar, omega_ok=fam_report.omega_ok,
                      passed=fam_report.passed)
    else:
        given = parse_given(args.given, n)
        rows = []
        for i in range(n):
            iv = feasible_interval(cfg.data, spec, args.stage, i, aux, given[i])
            print(f"{args.stage}_{i + 1}: {iv}")
            any_empty |= iv.empty
            rows.append(_interval_row(i + 1, args.stage, iv))
        report["rows"] = rows
    report["any_empty"] = any_empty
    return (EXIT_EMPTY if any_empty else EXIT_OK), report


def _interval_row(i: int, name: str, iv: FeasibleInterval) -> dict:
    return {"interval": i, "factor": name, "lo": iv.lo, "hi": iv.hi,
            "lo_strict": iv.lo_strict, "hi_strict": iv.hi_strict, "empty": iv.empty}


def _render(cfg: RunConfig, s: ZipperSystem) -> CurveSample:
    return refine_orbit(s, cfg.render.depth, max_points=cfg.render.max_points)


def cmd_render(cfg: RunConfig, args) -> tuple[int, dict]:
    t = time.perf_counter()
    s = _system(cfg)
    sample = _render(cfg, s)
    elapsed = time.perf_counter() - t
    out = cfg.output.dir
    files = []
    if "csv" in cfg.output.formats:
        write_curve_csv(out / "curve.csv", sample)
        files.append(out / "curve.csv")
    if args.plot or "svg" in cfg.output.formats:
        comp = args.plot or "f1"
        write_svg(out / f"curve_{comp}.svg", sample, cfg, comp)
        files.append(out / f"curve_{comp}.svg")
    report = {
        "command": "render",
        "depth": cfg.render.depth,
        "raw_points": sample.raw_count,
        "unique_points": len(sample),
        "f1_range": [float(sample.f1.min()), float(sample.f1.max())],
        "f2_range": [float(sample.f2.min()), float(sample.f2.max())],
        "files": [str(f) for f in files],
        "timings": {"render_s": elapsed},
    }
    print(f"depth {cfg.render.depth}: {sample.raw_count} points, {len(sample)} after dedup")
    print(f"f1 in [{report['f1_range'][0]:.6g}, {report['f1_range'][1]:.6g}]")
    for f in files:
        print(f"wrote {f}")
    if "json" in cfg.output.formats:
        write_json(out / "render.json", report)
    return EXIT_OK, report


def shape_check(cfg: RunConfig, sample: CurveSample):
    """The verification matching the configured shape mode, or None."""
    spec = cfg.shape
    if spec is None:
        return None
    knots = cfg.data.xs
    if spec.mode == "rectangle":
        return check_rectangle(sample, spec.k1, spec.k2)
    if spec.mode == "positivity":
        return check_positive(sample)
    m = spec.line_slopes(cfg.data)
    if spec.mode == "above":
        return check_lines(sample, knots, m, spec.b1, "above")
    if spec.mode == "below":
        return check_lines(sample, knots, m, spec.b2, "below")
    return check_lines(sample, knots, m, spec.b1, "between", spec.b2)


def parse_terms(text: str) -> int:
    t = text.partition("=")[2] if "=" in text else text
    try:
        v = int(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected terms=N, got {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError("terms must be >= 1")
    return v


def cmd_verify(cfg: RunConfig, args) -> tuple[int, dict]:
    t = time.perf_counter()
    s = _system(cfg)
    if args.curve:
        sample = read_curve_csv(Path(args.curve))
    else:
        sample = _render(cfg, s)
    t_render = time.perf_counter() - t
    reports = [check_interpolation(sample, cfg.data)]
    if s.has_envelope:
        reports.append(check_envelope(sample, s.U, s.Utilde))
    sc = shape_check(cfg, sample)
    if sc is not None:
        reports.append(sc)
    metrics = {}
    if args.against_weierstrass:
        terms = args.against_weierstrass
        metrics["weierstrass_l1"] = l1_error(
            sample, lambda x: weierstrass(x, terms), m=args.samples
        )
        metrics["weierstrass_terms"] = terms
        metrics["l1_samples"] = args.samples
    for r in reports:
        print(r)
    for k, v in metrics.items():
        print(f"{k} = {v:.6g}" if isinstance(v, float) else f"{k} = {v}")
    passed = all(r.passed for r in reports)
    report = {
        "command": "verify",
        "constants": _constants(s),
        "depth": None if args.curve else cfg.render.depth,
        "checks": [r.to_dict() for r in reports],
        "metrics": metrics,
        "passed": passed,
        "timings": {"render_s": t_render, "total_s": time.perf_counter() - t},
    }
    if "json" in cfg.output.formats:
        write_json(cfg.output.dir / "verify.json", report)
    return (EXIT_OK if passed else EXIT_FAILED), report


COMMANDS = {
    "construct": cmd_construct,
    "feasible": cmd_feasible,
    "render": cmd_render,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zipfif", description="Zipper hidden-variable fractal interpolation."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML run configuration")
    common.add_argument("--relaxed-contraction", action="store_true",
                        help="skip the per-interval norm-sum bound")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--json", action="store_true", help="print the report as JSON")

    sub.add_parser("construct", parents=[common], help="derive the system constants")

    p = sub.add_parser("feasible", parents=[common], help="feasibility intervals")
    p.add_argument("--stage", choices=STAGES + ("all",), default="p",
                   help="factor to bound; 'all' checks the configured factors")
    p.add_argument("--given", action="append", metavar="NAME=VALUE[,VALUE...]",
                   help="chosen value(s) of an earlier-stage factor")
    p.add_argument("--omega", type=float)

    p = sub.add_parser("render", parents=[common], help="render the attractor to CSV/SVG")
    p.add_argument("--depth", type=int)
    p.add_argument("--plot", choices=("f1", "f2"))

    p = sub.add_parser("verify", parents=[common], help="run the geometric checks")
    p.add_argument("--depth", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--curve", help="verify a previously rendered curve CSV")
    p.add_argument("--against-weierstrass", type=parse_terms, metavar="terms=N",
                   help="report the normalized L1 distance to the Weierstrass function")
    p.add_argument("--samples", type=int, default=10**5,
                   help="midpoint samples for the L1 error")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        code, report = COMMANDS[args.command](cfg, args)
        if args.json:
            print(json.dumps(_finite(report), indent=2, default=_json_default))
        if args.out and args.command in ("construct", "feasible"):
            write_json(cfg.output.dir / f"{args.command}.json", report)
        return code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ZipfifError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
