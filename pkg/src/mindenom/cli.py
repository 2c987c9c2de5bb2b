"""``lab`` command-line front end.

Each experiment subcommand resolves its configuration (defaults < TOML
config file < explicit flags), runs entirely in memory, and only then
writes ``samples.csv``, ``cdf.csv`` and ``manifest.json`` into the output
directory, so a failed run leaves no partial data behind.  Runs with
several deltas suffix the per-delta files with the delta value.

Exit codes: 0 success, 2 configuration or validation error, 3 search cap
exceeded.
"""

import argparse
import math
import os
import sys
from fractions import Fraction

import numpy as np

from mindenom import __version__
from mindenom import experiments as ex
from mindenom import rational
from mindenom import surfaces as su
from mindenom.errors import CapExceededError
from mindenom.lattice import ConeSpec, LatticeBasis, f_cone_exact
from mindenom.rng import Stream
from mindenom.runio import (
    ConfigError,
    RunConfig,
    StopWatch,
    cdf_csv_text,
    manifest_text,
    merged_cdf_csv,
    samples_csv_text,
    svg_overlay,
    write_outputs,
)
from mindenom.stats import ChenHaynesEstimate, EmpiricalCDF, default_t_grid, ks_distance, mean_estimate

# documented limiting constant for the mean of sqrt(delta) * q over uniform x
MEAN_TARGET_DOCUMENTED = 16.0 / math.pi**2
# value the open-interval convention implemented here actually converges to
MEAN_OPEN_INTERVAL = 16.0 / (math.sqrt(2.0) * math.pi**2)

_ORIGAMI_PRESETS = {"torus": su.TORUS, "l3": su.L3, "st6": su.ST6}


def _tag(delta):
    return f"{delta:g}"


def _suffix(deltas, delta):
    return "" if len(deltas) == 1 else f"-{_tag(delta)}"


def _grid_cdf(cdf, grid=None):
    g = default_t_grid() if grid is None else grid
    return g, cdf(g)


def _resolve_origami(name):
    key = name.strip().lower()
    if key in _ORIGAMI_PRESETS:
        return _ORIGAMI_PRESETS[key]
    if os.path.exists(name):
        try:
            with open(name) as fh:
                return su.parse_origami(fh.read())
        except ValueError as exc:
            raise ConfigError(f"bad origami file {name}: {exc}")
    raise ConfigError(f"origami must be one of {sorted(_ORIGAMI_PRESETS)} or a file path")


def _run_theorem_12(cfg):
    texts = {}
    results = {"deltas": {}}
    rhs_seed = cfg.seed + 1
    hx, hy, hth, hfs = ex.haar_f_samples(cfg.n, rhs_seed, rmax=cfg.rmax)
    rhs = EmpiricalCDF(hfs)
    results["haar"] = {
        "seed": rhs_seed,
        "mean": mean_estimate(rhs),
        "n": cfg.n,
    }
    results["mean_target_documented"] = MEAN_TARGET_DOCUMENTED
    results["mean_open_interval_limit"] = MEAN_OPEN_INTERVAL
    texts["samples-haar.csv"] = samples_csv_text(
        [(x, y, t) for x, y, t in zip(hx, hy, hth)], hfs
    )
    g, xi = _grid_cdf(rhs)
    texts["cdf-haar.csv"] = cdf_csv_text(g, xi)
    for delta in cfg.deltas:
        sfx = _suffix(cfg.deltas, delta)
        xs, stat = ex.qmin_samples(delta, cfg.n, cfg.seed)
        lhs = EmpiricalCDF(stat)
        sv, hf = ex.horocycle_samples(delta, cfg.n, rmax=cfg.rmax)
        horo = EmpiricalCDF(hf)
        est = ChenHaynesEstimate.from_cdf(lhs, delta, cfg.seed)
        texts[f"samples{sfx}.csv"] = samples_csv_text(xs, stat)
        texts[f"cdf{sfx}.csv"] = cdf_csv_text(est.grid, est.xi_hat)
        gh, xih = _grid_cdf(horo)
        texts[f"cdf-horocycle{sfx}.csv"] = cdf_csv_text(gh, xih)
        results["deltas"][_tag(delta)] = {
            "mean_lhs": mean_estimate(lhs),
            "ks_lhs_haar": ks_distance(lhs, rhs),
            "ks_horocycle_haar": ks_distance(horo, rhs),
        }
    return results, texts


def _run_theorem_14(cfg):
    texts = {}
    results = {"m": cfg.m, "deltas": {}}
    cdfs = {}
    for delta in cfg.deltas:
        sfx = _suffix(cfg.deltas, delta)
        xs, stat = ex.qm_samples(cfg.m, delta, cfg.n, cfg.seed, qcap=cfg.qcap)
        lhs = EmpiricalCDF(stat)
        cdfs[delta] = lhs
        est = ChenHaynesEstimate.from_cdf(lhs, delta, cfg.seed)
        texts[f"samples{sfx}.csv"] = samples_csv_text(list(xs), stat)
        texts[f"cdf{sfx}.csv"] = cdf_csv_text(est.grid, est.xi_hat)
        results["deltas"][_tag(delta)] = {"mean_lhs": mean_estimate(lhs)}
    order = sorted(cfg.deltas, reverse=True)
    for a, b in zip(order, order[1:]):
        results["deltas"][_tag(b)]["ks_vs_coarser"] = ks_distance(cdfs[b], cdfs[a])
    return results, texts


def _run_theorem_55(cfg):
    texts = {}
    results = {"m": cfg.m, "ndim": cfg.ndim, "deltas": {}}
    cdfs = {}
    for delta in cfg.deltas:
        sfx = _suffix(cfg.deltas, delta)
        xs, stat = ex.qmn_samples(cfg.m, cfg.ndim, delta, cfg.n, cfg.seed, shell_cap=cfg.shell_cap)
        lhs = EmpiricalCDF(stat)
        cdfs[delta] = lhs
        est = ChenHaynesEstimate.from_cdf(lhs, delta, cfg.seed)
        texts[f"samples{sfx}.csv"] = samples_csv_text(list(xs), stat)
        texts[f"cdf{sfx}.csv"] = cdf_csv_text(est.grid, est.xi_hat)
        results["deltas"][_tag(delta)] = {"mean_lhs": mean_estimate(lhs)}
    order = sorted(cfg.deltas, reverse=True)
    for a, b in zip(order, order[1:]):
        results["deltas"][_tag(b)]["ks_vs_coarser"] = ks_distance(cdfs[b], cdfs[a])
    return results, texts


def _run_theorem_15(cfg):
    origami = _resolve_origami(cfg.origami)
    alpha = cfg.alpha if cfg.alpha else su.minimal_veech_alpha(origami)
    texts = {}
    results = {
        "origami": cfg.origami,
        "degree": origami.degree,
        "alpha": alpha,
        "printed_cone_value": su.printed_cone_value(origami, alpha=alpha),
        "deltas": {},
    }
    rhs = None
    if origami.degree == 1:
        rhs = ex.rhs_haar_cdf(cfg.n, cfg.seed + 1)
        results["haar_seed"] = cfg.seed + 1
    for delta in cfg.deltas:
        sfx = _suffix(cfg.deltas, delta)
        svals, stat = su.sc_samples(origami, alpha, delta, cfg.n, acap=cfg.acap)
        _, stat_fine = su.sc_samples(origami, alpha, delta / cfg.refine, cfg.n, acap=cfg.acap)
        lhs = EmpiricalCDF(stat)
        fine = EmpiricalCDF(stat_fine)
        est = ChenHaynesEstimate.from_cdf(lhs, delta, cfg.seed)
        texts[f"samples{sfx}.csv"] = samples_csv_text(svals, stat)
        texts[f"cdf{sfx}.csv"] = cdf_csv_text(est.grid, est.xi_hat)
        entry = {
            "mean_lhs": mean_estimate(lhs),
            "ks_refine": ks_distance(lhs, fine),
            "refine": cfg.refine,
        }
        if rhs is not None:
            entry["ks_haar"] = ks_distance(lhs, rhs)
        results["deltas"][_tag(delta)] = entry
    return results, texts


def _run_siegel(cfg):
    counts = ex.box_counts(cfg.seed, cfg.region, cfg.n)
    x0, x1, y0, y1 = cfg.region
    area = (x1 - x0) * (y1 - y0)
    cdf = EmpiricalCDF(counts)
    grid = np.arange(0.0, float(counts.max()) + 1.0)
    results = {
        "region": list(cfg.region),
        "area": area,
        "mean_count": float(counts.mean()),
        "abs_error": abs(float(counts.mean()) - area),
        "max_count": int(counts.max()),
    }
    texts = {
        "samples.csv": samples_csv_text([None] * len(counts), counts.astype(float)),
        "cdf.csv": cdf_csv_text(grid, cdf(grid)),
    }
    return results, texts


def _run_oracle_suite(cfg):
    rows = []
    stats = []
    mismatches = 0
    stream = Stream(cfg.seed, 0)
    for i in range(cfg.n):
        den = stream.randint(7, 10**6)
        num = stream.randint(0, den)
        x = Fraction(num, den)
        delta = Fraction(1, stream.randint(5, 5000))
        hit = rational.qmin(x, delta)
        brute = rational.qmin_bruteforce(x, delta)
        basis = LatticeBasis(((1, -x), (0, 1)))
        cone = ConeSpec(1, 1, delta, "one-sided")
        lat = f_cone_exact(basis, cone)
        qm1 = rational.q_m((x,), delta)
        snorm, _ = rational.q_mn(((x,),), delta, shell_cap=int(1 / delta) + 2)
        agree = (
            hit == brute
            and hit.fraction in rational.OpenInterval(x - delta, x + delta)
            and lat.unorm == hit.q
            and qm1 == hit.q
            and snorm == hit.q
        )
        if not agree:
            mismatches += 1
        rows.append((float(x), float(delta)))
        stats.append(float(hit.q))
    results = {"cases": cfg.n, "mismatches": mismatches}
    texts = {
        "samples.csv": samples_csv_text(rows, stats),
        "cdf.csv": cdf_csv_text(*_grid_cdf(EmpiricalCDF(stats), np.geomspace(1.0, max(stats) + 1.0, 128))),
    }
    if mismatches:
        raise ConfigError(f"oracle suite found {mismatches} mismatching cases")
    return results, texts


_RUNNERS = {
    "theorem-1.2": _run_theorem_12,
    "theorem-1.4": _run_theorem_14,
    "theorem-5.5": _run_theorem_55,
    "theorem-1.5": _run_theorem_15,
    "siegel-check": _run_siegel,
    "oracle-suite": _run_oracle_suite,
}


def _add_common(p):
    p.add_argument("--config", help="TOML file with configuration keys")
    p.add_argument("--n", type=int, help="number of samples / grid points")
    p.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--threads", type=int, help="worker processes (default LAB_THREADS or 1)")


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="lab", description="minimal-denominator statistics laboratory"
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p12 = sub.add_parser("theorem-1.2", help="scalar statistic vs lattice reference law")
    _add_common(p12)
    p12.add_argument("--delta", type=float, action="append", dest="deltas", metavar="D")
    p12.add_argument("--rmax", type=float, help="cone search radius cap")

    p14 = sub.add_parser("theorem-1.4", help="simultaneous (vector) statistic")
    _add_common(p14)
    p14.add_argument("--delta", type=float, action="append", dest="deltas", metavar="D")
    p14.add_argument("--m", type=int, help="vector length")
    p14.add_argument("--qcap", type=int, help="denominator search cap")

    p55 = sub.add_parser("theorem-5.5", help="matrix statistic")
    _add_common(p55)
    p55.add_argument("--delta", type=float, action="append", dest="deltas", metavar="D")
    p55.add_argument("--m", type=int, help="number of rows")
    p55.add_argument("--ndim", type=int, help="number of columns (1..3)")
    p55.add_argument("--shell-cap", type=int, dest="shell_cap", help="shell search cap")

    p15 = sub.add_parser("theorem-1.5", help="square-tiled surface shear statistic")
    _add_common(p15)
    p15.add_argument("--delta", type=float, action="append", dest="deltas", metavar="D")
    p15.add_argument("--origami", help="preset (torus, l3, st6) or file path")
    p15.add_argument("--alpha", type=int, help="shear period (0 = detect)")
    p15.add_argument("--refine", type=int, help="delta refinement factor for stabilization")
    p15.add_argument("--acap", type=int, help="column search cap")

    psg = sub.add_parser("siegel-check", help="mean lattice-point count vs area")
    _add_common(psg)
    psg.add_argument("--x0", type=float, default=None)
    psg.add_argument("--x1", type=float, default=None)
    psg.add_argument("--y0", type=float, default=None)
    psg.add_argument("--y1", type=float, default=None)

    por = sub.add_parser("oracle-suite", help="cross-check exact search implementations")
    _add_common(por)

    ppl = sub.add_parser("plot", help="overlay cdf csv files as svg")
    ppl.add_argument("--out", required=True, help="output svg path")
    ppl.add_argument("inputs", nargs="+", help="cdf csv files")
    return ap


def _run_plot(args):
    for p in args.inputs:
        if not os.path.exists(p):
            raise ConfigError(f"no such file: {p}")
    svg = svg_overlay(args.inputs)
    merged = merged_cdf_csv(args.inputs)
    outdir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(outdir, exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write(svg)
    base, _ = os.path.splitext(args.out)
    with open(base + "-merged.csv", "w") as fh:
        fh.write(merged)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            return _run_plot(args)
        flags = {
            k: v
            for k, v in vars(args).items()
            if k not in ("command", "config") and v is not None
        }
        if args.command == "siegel-check":
            region_flags = [flags.pop(k, None) for k in ("x0", "x1", "y0", "y1")]
            if any(v is not None for v in region_flags):
                if any(v is None for v in region_flags):
                    raise ConfigError("give all four of --x0 --x1 --y0 --y1 or none")
                flags["region"] = tuple(region_flags)
        cfg = RunConfig.from_sources(args.command, toml_path=args.config, **flags)
        watch = StopWatch()
        old_threads = os.environ.get("LAB_THREADS")
        if cfg.threads:
            os.environ["LAB_THREADS"] = str(cfg.threads)
        try:
            results, texts = _RUNNERS[cfg.experiment](cfg)
        finally:
            if cfg.threads:
                if old_threads is None:
                    os.environ.pop("LAB_THREADS", None)
                else:
                    os.environ["LAB_THREADS"] = old_threads
        texts["manifest.json"] = manifest_text(cfg, results, list(texts) + ["manifest.json"], watch.elapsed())
        write_outputs(cfg.out, texts)
        print(f"wrote {len(texts)} files to {cfg.out}")
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
