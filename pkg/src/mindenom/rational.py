"""Exact minimal-denominator search.

Everything here is exact: inputs are arbitrary rationals (ints, Fractions,
or floats taken at their exact binary value), intervals are open, and all
comparisons are strict integer comparisons.  The continued-fraction
descent is shared with the batch kernels; ``qmin_bruteforce`` is an
independent linear scan used as an oracle.

Witness conventions, fixed for reproducibility:
- among equal-denominator witnesses, the numerator closest to the interval
  midpoint wins, ties to the smaller numerator (only the q = 1 case can
  actually tie);
- ``q_mn`` returns the witness vector that comes first when coordinates
  are enumerated in magnitude-then-sign order 0, 1, -1, 2, -2, ...
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from mindenom._pykernel import _qmin_core
from mindenom.errors import CapExceededError

__all__ = [
    "OpenInterval",
    "FractionHit",
    "simplest_in_interval",
    "qmin",
    "qmin_bruteforce",
    "q_m",
    "q_mn",
]


def _rat(v):
    """Exact Fraction view of an int, Fraction, or float."""
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class OpenInterval:
    """Open interval (lo, hi) with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", _rat(self.lo))
        object.__setattr__(self, "hi", _rat(self.hi))
        if not self.lo < self.hi:
            raise ValueError("open interval needs lo < hi")

    def __contains__(self, v):
        return self.lo < _rat(v) < self.hi


@dataclass(frozen=True)
class FractionHit:
    """A fraction p/q found strictly inside a query interval."""

    q: int
    p: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("denominator must be positive")

    @property
    def fraction(self):
        return Fraction(self.p, self.q)


def simplest_in_interval(interval):
    """Minimal-denominator fraction strictly inside an open interval."""
    if not isinstance(interval, OpenInterval):
        interval = OpenInterval(*interval)
    lo, hi = interval.lo, interval.hi
    # common-denominator integer form (lo, hi) = (L/D, H/D)
    D = lo.denominator * hi.denominator
    L = lo.numerator * hi.denominator
    H = hi.numerator * lo.denominator
    q, p = _qmin_core(L, H, D)
    return FractionHit(q, p)


def qmin(x, delta):
    """Minimal denominator q with some p/q in (x - delta, x + delta)."""
    x = _rat(x)
    delta = _rat(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    return simplest_in_interval(OpenInterval(x - delta, x + delta))


def qmin_bruteforce(x, delta):
    """Linear-scan oracle for qmin; same tie-break, independent search."""
    x = _rat(x)
    delta = _rat(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    lo = x - delta
    hi = x + delta
    q = 0
    while True:
        q += 1
        best = None
        bestdist = None
        for p in range(math.floor(q * lo), math.ceil(q * hi) + 1):
            if lo * q < p < hi * q:
                dist = abs(x - Fraction(p, q))
                if best is None or dist < bestdist or (dist == bestdist and p < best):
                    best = p
                    bestdist = dist
        if best is not None:
            return FractionHit(q, best)


def _int_dist(t):
    """Distance of a Fraction to the nearest integer."""
    fr = t - math.floor(t)
    return min(fr, 1 - fr)


def q_m(x, delta, qcap=10**7):
    """Least q >= 1 with max_i |x_i - p_i/q| < delta for some integers p_i."""
    xs = [_rat(v) for v in x]
    if not xs:
        raise ValueError("need at least one coordinate")
    delta = _rat(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    for q in range(1, qcap + 1):
        if all(_int_dist(q * v) < q * delta for v in xs):
            return q
    raise CapExceededError(f"no denominator <= {qcap}")


def _rank(c):
    # enumeration rank 0, 1, -1, 2, -2, ...
    return 2 * c - 1 if c > 0 else -2 * c


def _shell_reps(n, s):
    """Sup-norm-s integer vectors, first nonzero positive, in rank order."""
    ranked = [0]
    for v in range(1, s + 1):
        ranked.append(v)
        ranked.append(-v)
    out = []
    for q in itertools.product(ranked, repeat=n):
        if max(abs(c) for c in q) != s:
            continue
        lead = next(c for c in q if c != 0)
        if lead < 0:
            continue
        out.append(q)
    return out


def q_mn(X, delta, shell_cap=10**3):
    """Least sup-norm of a nonzero integer q with dist(Xq, Z^m) < delta*|q|.

    X is an m x n row matrix of rationals.  Returns (qnorm, witness); the
    witness is the first hit in magnitude-then-sign coordinate order
    within the winning shell (q and -q are equivalent, the representative
    with positive leading coordinate is reported).
    """
    rows = [[_rat(v) for v in row] for row in X]
    if not rows or not rows[0]:
        raise ValueError("matrix must be nonempty")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("ragged matrix")
    delta = _rat(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    for s in range(1, shell_cap + 1):
        bound = delta * s
        for q in _shell_reps(n, s):
            ok = True
            for row in rows:
                t = sum(c * v for c, v in zip(q, row))
                if _int_dist(t) >= bound:
                    ok = False
                    break
            if ok:
                return s, q
    raise CapExceededError(f"no solution in shells up to {shell_cap}")
