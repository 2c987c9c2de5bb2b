"""Lattices, diagonal/shear flows, and shortest-vector-in-cone minima.

A lattice is given by a basis matrix whose *columns* generate it.  Entries
may be exact (int/Fraction) or float; the search routines come in a float
flavor (``f_cone``) and an exact flavor (``f_cone_exact``) with identical
search order and tie-breaking, so the two can be cross-checked on rational
inputs.

The cone for parameters (n, m, delta) lives in R^{n+m} with coordinates
split as (u, v), u the first n coordinates.  Membership:

- two-sided:        u != 0 and ||v||_inf < delta * ||u||_inf
- one-sided:        n == 1, u > 0 and ||v||_inf < delta * u
- one-sided-no-abs: n == m == 1, u > 0 and v < delta * u

``f_cone`` returns the minimal ||u||_inf (u itself for the one-sided
cones) over nonzero lattice points in the cone, plus a witness.  Ties on
the norm are broken by the lexicographically smallest coefficient vector
in the *given* basis.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from mindenom import _backend
from mindenom.errors import CapExceededError

__all__ = [
    "LatticeBasis",
    "ConeSpec",
    "ConeHit",
    "geodesic_2",
    "horocycle_2",
    "geodesic_mn",
    "horocycle_mn",
    "apply_matrix",
    "f_cone",
    "f_cone_exact",
]

_SIDES = ("two-sided", "one-sided", "one-sided-no-abs")


@dataclass(frozen=True)
class LatticeBasis:
    """Square basis matrix, stored as a tuple of column tuples."""

    columns: tuple

    def __post_init__(self):
        cols = tuple(tuple(c) for c in self.columns)
        d = len(cols)
        if d == 0 or any(len(c) != d for c in cols):
            raise ValueError("basis must be square and nonempty")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def identity(cls, d):
        return cls(tuple(tuple(1 if i == j else 0 for i in range(d)) for j in range(d)))

    @property
    def d(self):
        return len(self.columns)

    def rows(self):
        return tuple(tuple(c[i] for c in self.columns) for i in range(self.d))

    def vector(self, coeffs):
        """Lattice point with the given integer coefficients."""
        return tuple(
            sum(a * c[i] for a, c in zip(coeffs, self.columns)) for i in range(self.d)
        )

    def det(self):
        return _det(self.rows())


def _det(rows):
    d = len(rows)
    if d == 1:
        return rows[0][0]
    total = 0
    sign = 1
    for j in range(d):
        minor = tuple(r[:j] + r[j + 1 :] for r in rows[1:])
        total += sign * rows[0][j] * _det(minor)
        sign = -sign
    return total


def apply_matrix(M, basis):
    """Left-multiply a basis by a matrix given as a tuple of rows."""
    rows = tuple(tuple(r) for r in M)
    d = basis.d
    if len(rows) != d or any(len(r) != d for r in rows):
        raise ValueError("matrix shape mismatch")
    cols = tuple(
        tuple(sum(rows[i][k] * col[k] for k in range(d)) for i in range(d))
        for col in basis.columns
    )
    return LatticeBasis(cols)


def geodesic_2(t):
    """diag(e^{t/2}, e^{-t/2}) as a row matrix."""
    a = math.exp(0.5 * t)
    return ((a, 0.0), (0.0, 1.0 / a))


def horocycle_2(s):
    """Lower-triangular shear [[1, 0], [-s, 1]]; exact if s is exact."""
    one = 1 if isinstance(s, (int, Fraction)) else 1.0
    return ((one, 0 * s), (-s, one))


def geodesic_mn(t, m, n):
    """Block flow diag(e^{t/(m+n)} Id_n, e^{-nt/(m(m+n))} Id_m)."""
    if m < 1 or n < 1:
        raise ValueError("block sizes must be positive")
    a = math.exp(t / (m + n))
    b = math.exp(-n * t / (m * (m + n)))
    d = m + n
    return tuple(
        tuple((a if i < n else b) if i == j else 0.0 for j in range(d)) for i in range(d)
    )


def horocycle_mn(X):
    """Block shear [[Id_n, 0], [-X, Id_m]] for an m x n matrix X."""
    rows = [tuple(r) for r in X]
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m < 1 or n < 1 or any(len(r) != n for r in rows):
        raise ValueError("X must be a nonempty m x n matrix")
    d = m + n
    out = []
    for i in range(n):
        out.append(tuple(1 if j == i else 0 for j in range(d)))
    for i in range(m):
        out.append(tuple(-rows[i][j] if j < n else (1 if j == n + i else 0) for j in range(d)))
    return tuple(out)


@dataclass(frozen=True)
class ConeSpec:
    """Cone parameters; see module docstring for membership rules."""

    n: int
    m: int
    delta: object
    sided: str = "two-sided"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.sided not in _SIDES:
            raise ValueError(f"sided must be one of {_SIDES}")
        if self.sided != "two-sided" and self.n != 1:
            raise ValueError("one-sided cones need n == 1")
        if self.sided == "one-sided-no-abs" and self.m != 1:
            raise ValueError("the no-abs cone needs m == 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    @property
    def d(self):
        return self.n + self.m

    def unorm(self, w):
        u = w[: self.n]
        if self.sided == "two-sided":
            return max(abs(c) for c in u)
        return u[0]

    def contains(self, w):
        u = w[: self.n]
        v = w[self.n :]
        if self.sided == "two-sided":
            un = max(abs(c) for c in u)
            if un <= 0:
                return False
            return all(abs(c) < self.delta * un for c in v)
        if u[0] <= 0:
            return False
        if self.sided == "one-sided":
            return all(abs(c) < self.delta * u[0] for c in v)
        return v[0] < self.delta * u[0]


@dataclass(frozen=True)
class ConeHit:
    """Minimizer: the lattice point, its cone norm, and basis coefficients."""

    vector: tuple
    unorm: object
    coeffs: tuple


def _size_reduce(cols, U):
    """Pairwise size reduction + swap passes; returns reduced cols, U.

    U tracks the change of basis: reduced_j = sum_i U[i][j] * original_i,
    so a coefficient vector a in the reduced basis maps to U @ a in the
    original one.  Full LLL quality is unnecessary at these dimensions;
    a few sweeps tighten the enumeration box enough.
    """
    d = len(cols)
    cols = [list(c) for c in cols]
    U = [list(r) for r in U]

    def dot(a, b):
        return sum(x * y for x, y in zip(a, b))

    for _ in range(32):
        changed = False
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                den = dot(cols[j], cols[j])
                if den == 0:
                    continue
                num = dot(cols[i], cols[j])
                if isinstance(den, float) or isinstance(num, float):
                    mu = math.floor(num / den + 0.5)
                else:
                    mu = math.floor(Fraction(num, den) + Fraction(1, 2))
                if mu != 0:
                    for k in range(d):
                        cols[i][k] -= mu * cols[j][k]
                        U[k][i] -= mu * U[k][j]
                    changed = True
        for i in range(d - 1):
            if dot(cols[i + 1], cols[i + 1]) < dot(cols[i], cols[i]):
                cols[i], cols[i + 1] = cols[i + 1], cols[i]
                for k in range(d):
                    U[k][i], U[k][i + 1] = U[k][i + 1], U[k][i]
                changed = True
        if not changed:
            break
    return cols, U


def _inverse_rows(cols):
    """Rows of B^{-1} for the column matrix B, via Gauss-Jordan in floats."""
    d = len(cols)
    a = [[float(cols[j][i]) for j in range(d)] for i in range(d)]
    inv = [[1.0 if i == j else 0.0 for j in range(d)] for i in range(d)]
    for c in range(d):
        piv = max(range(c, d), key=lambda r: abs(a[r][c]))
        if a[piv][c] == 0.0:
            raise ValueError("singular basis")
        a[c], a[piv] = a[piv], a[c]
        inv[c], inv[piv] = inv[piv], inv[c]
        s = 1.0 / a[c][c]
        a[c] = [x * s for x in a[c]]
        inv[c] = [x * s for x in inv[c]]
        for r in range(d):
            if r != c:
                f = a[r][c]
                if f != 0.0:
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[c])]
    return inv


def _search(basis, cone, search_cap, exact):
    """Shared shell search for f_cone / f_cone_exact."""
    n, d = cone.n, cone.d
    if basis.d != d:
        raise ValueError("basis dimension does not match cone")
    delta = cone.delta
    cols0 = [list(c) for c in basis.columns]
    U0 = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    cols, U = _size_reduce(cols0, U0)
    inv = _inverse_rows(cols)
    dfl = float(delta)

    best = None  # (unorm, coeffs_original, vector)
    R = 1.0
    while R <= search_cap:
        # any cone point with norm <= R sits in the slab |u_i| <= R,
        # |v_i| <= delta*R; bound each reduced coefficient through B^{-1}
        bounds = []
        for j in range(d):
            b = sum(abs(inv[j][l]) * (R if l < n else dfl * R) for l in range(d))
            bounds.append(math.floor(b + 1e-9) + 1)
        for a in itertools.product(*(range(-b, b + 1) for b in bounds)):
            if all(c == 0 for c in a):
                continue
            w = tuple(sum(a[j] * cols[j][i] for j in range(d)) for i in range(d))
            if not cone.contains(w):
                continue
            un = cone.unorm(w)
            if exact:
                if un > R:
                    continue
            elif un > R * (1 + 1e-12):
                continue
            orig = tuple(sum(U[i][j] * a[j] for j in range(d)) for i in range(d))
            if best is None or un < best[0] or (un == best[0] and orig < best[1]):
                best = (un, orig, w)
        if best is not None:
            return ConeHit(vector=best[2], unorm=best[0], coeffs=best[1])
        R *= 2.0
    raise CapExceededError(f"no cone point with norm <= {search_cap}")


def f_cone(basis, cone, search_cap=2.0**20):
    """Float cone minimum.  d == 2 delegates to the batch kernel."""
    if cone.d == 2 and cone.sided in ("one-sided", "two-sided"):
        cols = basis.columns
        f, a1, a2, wx, wy = _backend.kernel.f11(
            float(cols[0][0]),
            float(cols[1][0]),
            float(cols[0][1]),
            float(cols[1][1]),
            float(cone.delta),
            1 if cone.sided == "one-sided" else 0,
            float(search_cap),
        )
        if f < 0.0:
            raise CapExceededError(f"no cone point with norm <= {search_cap}")
        return ConeHit(vector=(wx, wy), unorm=f, coeffs=(int(a1), int(a2)))
    fb = LatticeBasis(tuple(tuple(float(x) for x in c) for c in basis.columns))
    fcone = ConeSpec(cone.n, cone.m, float(cone.delta), cone.sided)
    return _search(fb, fcone, float(search_cap), exact=False)


def f_cone_exact(basis, cone, search_cap=2.0**20):
    """Exact cone minimum over Fraction arithmetic; same conventions."""
    eb = LatticeBasis(
        tuple(tuple(x if isinstance(x, Fraction) else Fraction(x) for x in c) for c in basis.columns)
    )
    dl = cone.delta if isinstance(cone.delta, Fraction) else Fraction(cone.delta)
    econe = ConeSpec(cone.n, cone.m, dl, cone.sided)
    return _search(eb, econe, float(search_cap), exact=True)
