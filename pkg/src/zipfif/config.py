"""Run configuration: a YAML file plus a data CSV.

Grammar (all keys optional unless marked)::

    data: points.csv          # required; header x,y[,z]; relative to this file
    z: [ ... ]                # hidden ordinates, required when the CSV has no z column
    signature: [0, 1, ...]    # required; one 0/1 flag per subinterval
    factors:                  # required; n entries each, a number c0 or a pair [c0, c1]
      p: [...]
      q: [...]
      pt: [...]
      qt: [...]
    relaxed_contraction: false
    shape:
      mode: rectangle | positivity | above | below | between
      k1: ..  k2: ..  kt1: ..  kt2: ..
      slopes: [...]           # default: data chord slopes
      b1: [...]               # intercepts of the lines under the data
      b2: [...]               # intercepts of the lines over the data
      omega: 0.975
      corrected: false
    render:
      depth: 6
      tol: 1.0e-9
      samples: 1001
      max_points: 10000000
    output:
      dir: out
      formats: [csv, json]    # any of csv, json, svg

Numbers may be written as fractions (``-2/3``) in both files.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from .errors import LengthMismatch, ValidationError
from .model import ExtendedDataSet, ScalingFamily, Signature
from .shape import ShapeSpec

TOP_KEYS = {"data", "z", "signature", "factors", "relaxed_contraction", "shape", "render", "output"}
SHAPE_KEYS = {"mode", "k1", "k2", "kt1", "kt2", "slopes", "b1", "b2", "omega", "corrected"}
RENDER_KEYS = {"depth", "tol", "samples", "max_points"}
OUTPUT_KEYS = {"dir", "formats"}
FORMATS = {"csv", "json", "svg"}


class ConfigError(ValidationError):
    """Malformed configuration (unknown key, wrong type, missing field)."""


def number(v: Any) -> float:
    """Parse an int, float or fraction string such as ``"-2/3"``."""
    if isinstance(v, bool):
        raise ConfigError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    try:
        return float(Fraction(str(v).strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {v!r}") from exc


def _numbers(name: str, v: Any) -> tuple[float, ...]:
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"{name} must be a list")
    return tuple(number(t) for t in v)


def _reject_unknown(section: str, d: dict, allowed: set) -> None:
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(sorted(extra))}")


@dataclass(frozen=True)
class RenderOptions:
    depth: int = 6
    tol: float = 1e-9
    samples: int = 1001
    max_points: int = 10**7


@dataclass(frozen=True)
class OutputOptions:
    dir: Path = Path("out")
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    data_path: Path
    data: ExtendedDataSet
    sig: Signature
    fam: ScalingFamily
    shape: ShapeSpec | None = None
    render: RenderOptions = field(default_factory=RenderOptions)
    output: OutputOptions = field(default_factory=OutputOptions)
    relaxed: bool = False


def read_data_csv(path: Path) -> tuple[list[float], list[float], list[float] | None]:
    """Read columns ``x, y`` and optionally ``z``; raises OSError or ConfigError."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise OSError(f"data file {path} is empty")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["x", "y"] or header[2:] not in ([], ["z"]):
        raise ConfigError(f"data header must be x,y or x,y,z; got {','.join(header)}")
    body = rows[1:]
    if not body:
        raise OSError(f"data file {path} has no rows")
    cols = list(zip(*body))
    if any(len(r) != len(header) for r in body):
        raise ConfigError(f"every row of {path} needs {len(header)} fields")
    x = [number(v) for v in cols[0]]
    y = [number(v) for v in cols[1]]
    z = [number(v) for v in cols[2]] if len(header) == 3 else None
    return x, y, z


def _factors(raw: Any) -> ScalingFamily:
    if not isinstance(raw, dict):
        raise ConfigError("factors must be a mapping with keys p, q, pt, qt")
    _reject_unknown("factors", raw, {"p", "q", "pt", "qt"})
    missing = {"p", "q", "pt", "qt"} - set(raw)
    if missing:
        raise ConfigError(f"factors missing: {', '.join(sorted(missing))}")
    lists = {}
    for k in ("p", "q", "pt", "qt"):
        if not isinstance(raw[k], list):
            raise ConfigError(f"factors.{k} must be a list")
        lists[k] = tuple(
            (number(v[0]), number(v[1]) if len(v) > 1 else 0.0)
            if isinstance(v, (list, tuple))
            else (number(v), 0.0)
            for v in raw[k]
        )
    return ScalingFamily(**lists)


def _shape(raw: Any) -> ShapeSpec:
    if not isinstance(raw, dict):
        raise ConfigError("shape must be a mapping")
    _reject_unknown("shape", raw, SHAPE_KEYS)
    if "mode" not in raw:
        raise ConfigError("shape.mode is required")
    kw: dict[str, Any] = {"mode": str(raw["mode"])}
    for k in ("k1", "k2", "kt1", "kt2", "omega"):
        if k in raw:
            kw[k] = number(raw[k])
    for k in ("slopes", "b1", "b2"):
        if k in raw:
            kw[k] = _numbers(f"shape.{k}", raw[k])
    if "corrected" in raw:
        kw["corrected"] = bool(raw["corrected"])
    return ShapeSpec(**kw)


def _render(raw: Any) -> RenderOptions:
    if not isinstance(raw, dict):
        raise ConfigError("render must be a mapping")
    _reject_unknown("render", raw, RENDER_KEYS)
    kw = {}
    for k in ("depth", "samples", "max_points"):
        if k in raw:
            kw[k] = int(raw[k])
    if "tol" in raw:
        kw["tol"] = number(raw["tol"])
    return RenderOptions(**kw)


def _output(raw: Any, base: Path) -> OutputOptions:
    if not isinstance(raw, dict):
        raise ConfigError("output must be a mapping")
    _reject_unknown("output", raw, OUTPUT_KEYS)
    out = OutputOptions(dir=base / "out")
    d = base / str(raw["dir"]) if "dir" in raw else out.dir
    fmts = tuple(raw.get("formats", out.formats))
    bad = set(fmts) - FORMATS
    if bad:
        raise ConfigError(f"unknown output format(s): {', '.join(sorted(bad))}")
    return OutputOptions(d, fmts)


def parse_config(raw: Any, base: Path) -> RunConfig:
    """Build a :class:`RunConfig` from a parsed YAML mapping; paths resolve against ``base``."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    _reject_unknown("config", raw, TOP_KEYS)
    for k in ("data", "signature", "factors"):
        if k not in raw:
            raise ConfigError(f"config key {k!r} is required")
    data_path = base / str(raw["data"])
    x, y, z = read_data_csv(data_path)
    if "z" in raw:
        if z is not None:
            raise ConfigError("z given both in the data file and in the config")
        z = list(_numbers("z", raw["z"]))
    if z is None:
        raise ConfigError("data file has no z column; supply the hidden ordinates under 'z'")
    data = ExtendedDataSet(tuple(x), tuple(y), tuple(z))
    sig = raw["signature"]
    if not isinstance(sig, list):
        raise ConfigError("signature must be a list of 0/1 flags")
    sig = Signature(tuple(int(v) for v in sig))
    if len(sig) != data.n:
        raise LengthMismatch(f"signature has {len(sig)} entries, data has n={data.n}")
    return RunConfig(
        data_path=data_path,
        data=data,
        sig=sig,
        fam=_factors(raw["factors"]),
        shape=_shape(raw["shape"]) if raw.get("shape") is not None else None,
        render=_render(raw.get("render") or {}),
        output=_output(raw.get("output") or {}, base),
        relaxed=bool(raw.get("relaxed_contraction", False)),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw, path.parent)
