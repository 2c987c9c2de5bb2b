"""Compare the compiled kernel against the pure-Python fallback.

Runs each batch kernel on both backends with identical arguments, checks
that the outputs agree exactly, and prints a timing table.  Sizes are small
enough that the whole run finishes in well under a minute on one core;
scale them with --factor to get steadier numbers.
"""

import argparse
import time

import numpy as np

from mindenom import _pykernel
from mindenom.surfaces import ST6

try:
    from mindenom import _ckernel
except ImportError:
    _ckernel = None


def _cases(factor):
    sh, sv, svi, singular = ST6.kernel_arrays()
    return [
        ("qmin_batch", {"seed": 1, "delta": 1e-4, "start": 0, "count": 30000 * factor}),
        ("qm_batch", {"seed": 2, "delta": 1e-2, "m": 2, "start": 0,
                      "count": 5000 * factor, "qcap": 1 << 20}),
        ("qmn_batch", {"seed": 3, "delta": 0.05, "m": 1, "n": 2, "start": 0,
                       "count": 1500 * factor, "shell_cap": 1 << 20}),
        ("haar_batch", {"seed": 4, "start": 0, "count": 15000 * factor,
                        "delta": 1.0, "one_sided": 1, "rmax": 2.0 ** 20}),
        ("horocycle_batch", {"delta": 2.0 ** -10, "ngrid": 15000 * factor, "start": 0,
                             "count": 15000 * factor, "one_sided": 1, "rmax": 2.0 ** 20}),
        ("psi_origami_batch", {"sh": sh, "sv": sv, "svi": svi, "singular": singular,
                               "alpha": 6, "delta": 2.0 ** -8, "ngrid": 8000 * factor,
                               "start": 0, "count": 8000 * factor, "acap": 1 << 20}),
    ]


def _time(fn, kwargs, repeats):
    out = fn(**kwargs)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(**kwargs)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--factor", type=int, default=1, help="scale every case size")
    ap.add_argument("--repeats", type=int, default=3, help="timed runs per case")
    args = ap.parse_args()

    if _ckernel is None:
        print("compiled kernel not available; timing the Python fallback only")

    rows = []
    for name, kwargs in _cases(args.factor):
        py_out, py_t = _time(getattr(_pykernel, name), kwargs, args.repeats)
        if _ckernel is None:
            rows.append((name, kwargs.get("count"), py_t, None, None))
            continue
        c_out, c_t = _time(getattr(_ckernel, name), kwargs, args.repeats)
        for a, b in zip(py_out, c_out):
            assert np.array_equal(np.asarray(a), np.asarray(b)), name
        rows.append((name, kwargs.get("count"), py_t, c_t, py_t / c_t))

    print(f"{'kernel':<20} {'count':>8} {'python s':>10} {'c s':>10} {'speedup':>8}")
    for name, count, py_t, c_t, ratio in rows:
        c_s = f"{c_t:10.4f}" if c_t is not None else f"{'-':>10}"
        r_s = f"{ratio:8.1f}" if ratio is not None else f"{'-':>8}"
        print(f"{name:<20} {count:>8} {py_t:10.4f} {c_s} {r_s}")


if __name__ == "__main__":
    main()
