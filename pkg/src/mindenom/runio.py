"""Run configuration and result files.

A run emits three artifacts into the output directory:

- ``samples.csv``   header ``index,input,statistic``; the input column is
  a ``;``-joined tuple when a sample has several coordinates;
- ``cdf.csv``       header ``T,xi_hat`` on the shared geometric grid;
- ``manifest.json`` the resolved configuration, RNG identifier, backend,
  summary statistics, and wall time.

All floats are written with 17 significant digits, so re-running with the
configuration echoed in the manifest reproduces the data files byte for
byte (the manifest differs only in wall time).  Runs with several deltas
suffix the per-delta files with the delta value.

Configuration may come from a TOML file; explicit command-line flags win
over the file, which wins over per-experiment defaults.
"""

import json
import os
import time

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from mindenom import __version__
from mindenom.rng import ALGORITHM
from mindenom._backend import BACKEND

__all__ = [
    "ConfigError",
    "RunConfig",
    "fmt_float",
    "samples_csv_text",
    "cdf_csv_text",
    "manifest_text",
    "write_outputs",
    "svg_overlay",
    "merged_cdf_csv",
]

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "theorem-1.2",
    "theorem-1.4",
    "theorem-5.5",
    "theorem-1.5",
    "siegel-check",
    "oracle-suite",
)

_DEFAULTS = {
    "theorem-1.2": {"deltas": (1e-2, 1e-4, 1e-6), "n": 100000},
    "theorem-1.4": {"deltas": (1e-2, 1e-4), "n": 50000, "m": 2},
    "theorem-5.5": {"deltas": (1e-2, 1e-4), "n": 50000, "m": 1, "ndim": 2},
    "theorem-1.5": {"deltas": (1e-4,), "n": 20000, "origami": "torus"},
    "siegel-check": {"n": 200000},
    "oracle-suite": {"n": 200},
}


class ConfigError(ValueError):
    """Invalid run configuration; the CLI maps this to exit code 2."""


_FIELDS = {
    "experiment": str,
    "n": int,
    "seed": int,
    "deltas": tuple,
    "m": int,
    "ndim": int,
    "origami": str,
    "alpha": int,
    "refine": int,
    "region": tuple,
    "out": str,
    "threads": int,
    "qcap": int,
    "shell_cap": int,
    "acap": int,
    "rmax": float,
}


class RunConfig:
    """Resolved run parameters; unknown keys are rejected."""

    def __init__(self, experiment, **kw):
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}")
        base = {
            "experiment": experiment,
            "n": 0,
            "seed": 0,
            "deltas": (),
            "m": 1,
            "ndim": 1,
            "origami": "torus",
            "alpha": 0,
            "refine": 16,
            "region": (-2.0, 2.0, -2.0, 2.0),
            "out": ".",
            "threads": 0,
            "qcap": 10**7,
            "shell_cap": 10**3,
            "acap": 1 << 20,
            "rmax": 2.0**20,
        }
        base.update(_DEFAULTS[experiment])
        for key, val in kw.items():
            if key not in _FIELDS:
                raise ConfigError(f"unknown configuration key {key!r}")
            if val is None:
                continue
            base[key] = val
        for key, typ in _FIELDS.items():
            try:
                if typ is tuple:
                    base[key] = tuple(float(v) for v in base[key])
                else:
                    base[key] = typ(base[key])
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {key!r}: {base[key]!r}")
        self.__dict__.update(base)
        self._validate()

    def _validate(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.experiment not in ("siegel-check", "oracle-suite"):
            if not self.deltas:
                raise ConfigError("need at least one delta")
            if any(not 0 < d < 1 for d in self.deltas):
                raise ConfigError("deltas must lie in (0, 1)")
            if len(set(self.deltas)) != len(self.deltas):
                raise ConfigError("duplicate delta")
        if self.experiment == "theorem-1.4" and self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.experiment == "theorem-5.5" and not (self.m >= 1 and 1 <= self.ndim <= 3):
            raise ConfigError("need m >= 1 and 1 <= ndim <= 3")
        if self.experiment == "theorem-1.5":
            if self.alpha < 0:
                raise ConfigError("alpha must be >= 0 (0 = detect)")
            if self.refine < 2:
                raise ConfigError("refine must be >= 2")
        if self.experiment == "siegel-check":
            x0, x1, y0, y1 = self.region
            if not (x0 < x1 and y0 < y1):
                raise ConfigError("degenerate region")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0")

    def as_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.__dict__.items())}

    @classmethod
    def from_sources(cls, experiment, toml_path=None, **flags):
        file_kw = {}
        if toml_path:
            try:
                with open(toml_path, "rb") as fh:
                    data = tomllib.load(fh)
            except (OSError, tomllib.TOMLDecodeError) as exc:
                raise ConfigError(f"cannot read config {toml_path}: {exc}")
            if not isinstance(data, dict):
                raise ConfigError("config file must be a TOML table")
            file_kw = dict(data)
            file_kw.pop("experiment", None)
        merged = dict(file_kw)
        for key, val in flags.items():
            if val is not None:
                merged[key] = val
        return cls(experiment, **merged)


def fmt_float(v):
    return f"{float(v):.17g}"


def samples_csv_text(inputs, stats):
    """CSV body for per-sample rows; inputs may be scalars or tuples."""
    lines = ["index,input,statistic"]
    for i, (inp, st) in enumerate(zip(inputs, stats)):
        if inp is None:
            cell = ""
        elif isinstance(inp, (tuple, list)) or hasattr(inp, "ndim"):
            cell = ";".join(fmt_float(v) for v in _flat(inp))
        else:
            cell = fmt_float(inp)
        lines.append(f"{i},{cell},{fmt_float(st)}")
    return "\n".join(lines) + "\n"


def _flat(v):
    if hasattr(v, "ravel"):
        return v.ravel().tolist()
    out = []
    for item in v:
        if isinstance(item, (tuple, list)):
            out.extend(_flat(item))
        else:
            out.append(item)
    return out


def cdf_csv_text(grid, xi):
    lines = ["T,xi_hat"]
    for t, x in zip(grid, xi):
        lines.append(f"{fmt_float(t)},{fmt_float(x)}")
    return "\n".join(lines) + "\n"


def manifest_text(config, results, files, wall_time):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "rng": ALGORITHM,
        "backend": BACKEND,
        "config": config.as_dict(),
        "results": results,
        "files": sorted(files),
        "wall_time_seconds": round(float(wall_time), 3),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_outputs(outdir, texts):
    """Write {relpath: text} atomically-ish: everything is rendered first."""
    os.makedirs(outdir, exist_ok=True)
    for rel, text in texts.items():
        with open(os.path.join(outdir, rel), "w") as fh:
            fh.write(text)


class StopWatch:
    def __init__(self):
        self.t0 = time.monotonic()

    def elapsed(self):
        return time.monotonic() - self.t0


# -- plotting -----------------------------------------------------------------

_PALETTE = ("#1b6ca8", "#c2452d", "#3a8f4d", "#8452a8", "#b58a1f", "#3f3f3f")


def _read_cdf_csv(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0].split(",")[:2] != ["T", "xi_hat"]:
        raise ConfigError(f"{path} is not a cdf csv")
    ts, xs = [], []
    for ln in lines[1:]:
        t, x = ln.split(",")[:2]
        ts.append(float(t))
        xs.append(float(x))
    return ts, xs


def merged_cdf_csv(paths):
    """Join several cdf files on their (shared) grid; columns named by stem."""
    curves = [_read_cdf_csv(p) for p in paths]
    grid = curves[0][0]
    for ts, _ in curves[1:]:
        if len(ts) != len(grid) or any(abs(a - b) > 1e-12 * max(abs(a), 1.0) for a, b in zip(ts, grid)):
            raise ConfigError("cdf files use different grids; cannot merge")
    names = [os.path.splitext(os.path.basename(p))[0] for p in paths]
    lines = ["T," + ",".join(names)]
    for i, t in enumerate(grid):
        lines.append(fmt_float(t) + "," + ",".join(fmt_float(c[1][i]) for c in curves))
    return "\n".join(lines) + "\n"


def svg_overlay(paths, width=720, height=480):
    """Overlay CDF curves on a log-x plot as a standalone SVG."""
    import math

    curves = [_read_cdf_csv(p) for p in paths]
    names = [os.path.splitext(os.path.basename(p))[0] for p in paths]
    tmin = min(min(ts) for ts, _ in curves)
    tmax = max(max(ts) for ts, _ in curves)
    if tmin <= 0 or tmax <= tmin:
        raise ConfigError("plot needs positive grid values")
    pad = 50
    w, h = width - 2 * pad, height - 2 * pad

    def px(t):
        return pad + w * (math.log(t) - math.log(tmin)) / (math.log(tmax) - math.log(tmin))

    def py(x):
        return pad + h * (1.0 - x)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{w}" height="{h}" fill="none" stroke="#999"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = py(frac)
        parts.append(f'<line x1="{pad}" y1="{y:.1f}" x2="{pad + w}" y2="{y:.1f}" stroke="#eee"/>')
        parts.append(
            f'<text x="{pad - 8}" y="{y + 4:.1f}" font-size="11" text-anchor="end" fill="#444">{frac:g}</text>'
        )
    decade = math.floor(math.log10(tmin))
    while 10.0**decade <= tmax:
        t = 10.0**decade
        if t >= tmin:
            x = px(t)
            parts.append(f'<line x1="{x:.1f}" y1="{pad}" x2="{x:.1f}" y2="{pad + h}" stroke="#eee"/>')
            parts.append(
                f'<text x="{x:.1f}" y="{pad + h + 16}" font-size="11" text-anchor="middle" fill="#444">1e{decade}</text>'
            )
        decade += 1
    for k, ((ts, xs), name) in enumerate(zip(curves, names)):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{px(t):.2f},{py(x):.2f}" for t, x in zip(ts, xs))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{pad + 10}" y="{pad + 16 + 14 * k}" font-size="12" fill="{color}">{name}</text>'
        )
    parts.append(
        f'<text x="{pad + w / 2:.0f}" y="{height - 10}" font-size="12" text-anchor="middle" fill="#222">T</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
