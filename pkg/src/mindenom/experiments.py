"""Monte-Carlo experiment drivers over the batch kernels.

Work is split into fixed-size chunks keyed by absolute sample index; each
sample owns its own random stream, so results are bit-identical whether a
run uses one process or many (LAB_THREADS) and wherever chunk boundaries
fall.  Statistics are normalized here, in shared numpy code, so both
kernel backends feed the same arithmetic.

Normalizations (delta -> 0 laws):
- scalar:  sqrt(delta) * q
- vector:  delta^(m/(m+1)) * q      (m simultaneous coordinates)
- matrix:  delta^(m/(m+n)) * ||q||  (m x n systems)
The reference law is the cone minimum F of a Haar-random unimodular
lattice; expanding horocycle orbits reproduce it deterministically.
"""

import math
import multiprocessing
import os

import numpy as np

from mindenom import _backend
from mindenom.errors import CapExceededError
from mindenom.stats import EmpiricalCDF

__all__ = [
    "qmin_samples",
    "lhs_qmin_cdf",
    "qm_samples",
    "lhs_qm_cdf",
    "qmn_samples",
    "lhs_qmn_cdf",
    "haar_f_samples",
    "rhs_haar_cdf",
    "horocycle_samples",
    "horocycle_orbit_cdf",
    "box_counts",
    "disk_counts",
]

_CHUNK = 4096


def _threads():
    raw = os.environ.get("LAB_THREADS", "1")
    try:
        t = int(raw)
    except ValueError:
        raise ValueError(f"LAB_THREADS must be an integer, got {raw!r}")
    return max(t, 1)


def _worker(task):
    name, kwargs = task
    return getattr(_backend.kernel, name)(**kwargs)


def _run_chunked(name, total, base_kwargs, start0=0):
    """Run a batch kernel over [start0, start0+total) in index chunks."""
    if total < 1:
        raise ValueError("need at least one sample")
    tasks = []
    s = start0
    end = start0 + total
    while s < end:
        c = min(_CHUNK, end - s)
        kw = dict(base_kwargs)
        kw["start"] = s
        kw["count"] = c
        tasks.append((name, kw))
        s += c
    nthreads = _threads()
    if nthreads == 1 or len(tasks) == 1:
        parts = [_worker(t) for t in tasks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(min(nthreads, len(tasks))) as pool:
            parts = pool.map(_worker, tasks)
    first = parts[0]
    if not isinstance(first, tuple):
        return np.concatenate(parts)
    out = []
    for i in range(len(first)):
        pieces = [p[i] for p in parts]
        if isinstance(pieces[0], np.ndarray):
            out.append(np.concatenate(pieces))
        else:
            out.append(sum(pieces))  # scalar tallies (e.g. proposal counts)
    return tuple(out)


# -- uniform-sample minimal denominators ------------------------------------


def qmin_samples(delta, n, seed=0, start=0):
    """(x draws, sqrt(delta)*q) for n independent uniform samples."""
    delta = float(delta)
    xs, qs = _run_chunked("qmin_batch", n, {"seed": int(seed), "delta": delta}, start0=start)
    return xs, math.sqrt(delta) * qs.astype(np.float64)


def lhs_qmin_cdf(delta, n, seed=0):
    return EmpiricalCDF(qmin_samples(delta, n, seed)[1])


def qm_samples(m, delta, n, seed=0, start=0, qcap=10**7):
    """(x draws row-major, delta^(m/(m+1)) * q) for m-vector samples."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    delta = float(delta)
    xs, qs = _run_chunked(
        "qm_batch", n, {"seed": int(seed), "delta": delta, "m": m, "qcap": int(qcap)}, start0=start
    )
    if (qs == 0).any():
        raise CapExceededError(f"simultaneous search exceeded qcap {qcap}")
    scale = delta ** (m / (m + 1))
    return xs.reshape(n, m), scale * qs.astype(np.float64)


def lhs_qm_cdf(m, delta, n, seed=0, qcap=10**7):
    return EmpiricalCDF(qm_samples(m, delta, n, seed, qcap=qcap)[1])


def qmn_samples(m, ndim, delta, n, seed=0, start=0, shell_cap=10**3):
    """(X draws (n, m, ndim), delta^(m/(m+ndim)) * ||q||) for matrix samples."""
    m = int(m)
    ndim = int(ndim)
    if m < 1 or ndim < 1:
        raise ValueError("matrix dimensions must be >= 1")
    delta = float(delta)
    xs, qs = _run_chunked(
        "qmn_batch",
        n,
        {"seed": int(seed), "delta": delta, "m": m, "n": ndim, "shell_cap": int(shell_cap)},
        start0=start,
    )
    if (qs == 0).any():
        raise CapExceededError(f"matrix search exceeded shell cap {shell_cap}")
    scale = delta ** (m / (m + ndim))
    return xs.reshape(n, m, ndim), scale * qs.astype(np.float64)


def lhs_qmn_cdf(m, ndim, delta, n, seed=0, shell_cap=10**3):
    return EmpiricalCDF(qmn_samples(m, ndim, delta, n, seed, shell_cap=shell_cap)[1])


# -- reference law: Haar-random lattices and horocycle orbits ----------------


def haar_f_samples(n, seed=0, start=0, delta=1.0, one_sided=True, rmax=2.0**20):
    """(x, y, theta, F) over Haar draws; F is the cone minimum at delta."""
    xs, ys, ths, fs, _ = _run_chunked(
        "haar_batch",
        n,
        {"seed": int(seed), "delta": float(delta), "one_sided": 1 if one_sided else 0, "rmax": float(rmax)},
        start0=start,
    )
    if (fs < 0).any():
        raise CapExceededError(f"cone search exceeded radius cap {rmax}")
    return xs, ys, ths, fs


def rhs_haar_cdf(n, seed=0, delta=1.0, one_sided=True):
    return EmpiricalCDF(haar_f_samples(n, seed, delta=delta, one_sided=one_sided)[3])


def horocycle_samples(delta, n, ngrid=None, one_sided=True, rmax=2.0**20):
    """(shear grid, F) along the renormalized shear orbit at tolerance delta."""
    if ngrid is None:
        ngrid = n
    svals, fs = _run_chunked(
        "horocycle_batch",
        n,
        {"delta": float(delta), "ngrid": int(ngrid), "one_sided": 1 if one_sided else 0, "rmax": float(rmax)},
    )
    if (fs < 0).any():
        raise CapExceededError(f"cone search exceeded radius cap {rmax}")
    return svals, fs


def horocycle_orbit_cdf(delta, n, one_sided=True):
    return EmpiricalCDF(horocycle_samples(delta, n, one_sided=one_sided)[1])


# -- Siegel-type count statistics --------------------------------------------


def box_counts(seed, region, n, start=0):
    """Nonzero lattice point counts in an axis box over Haar draws."""
    x0, x1, y0, y1 = (float(v) for v in region)
    return _run_chunked(
        "box_count_batch", n, {"seed": int(seed), "x0": x0, "x1": x1, "y0": y0, "y1": y1}, start0=start
    )


def disk_counts(seed, radius, n, phi=0.0, start=0):
    """Counts in a disk of the given radius, rotated by phi, over Haar draws."""
    return _run_chunked(
        "disk_count_batch",
        n,
        {"seed": int(seed), "radius": float(radius), "cphi": math.cos(phi), "sphi": math.sin(phi)},
        start0=start,
    )
