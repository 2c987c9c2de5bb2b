"""Square-tiled translation surfaces and their saddle-connection holonomy.

A surface of degree d is a pair of permutations (sigma_h, sigma_v) of the
squares 0..d-1 (right and up neighbors), transitive so that the surface is
connected.  Vertex classes are the orbits of the commutator map

    u(s) = sigma_v(sigma_h(sigma_v^{-1}(sigma_h^{-1}(s))))

acting on lower-left corners; an orbit of length k is a vertex with cone
angle 2*pi*k.  Orbits of length > 1 are cone points and are marked; if all
orbits are trivial (torus covers), every vertex is marked instead so that
the saddle-connection machinery always has a nonempty vertex set.

Holonomy is enumerated by exact ray tracing on the square grid: each
marked vertex emits one separatrix per incident square in each primitive
direction, and the first marked vertex the ray meets closes one saddle
connection, so every oriented connection is found exactly once and
multiplicity bookkeeping is automatic.  The SL2(Z) action is realized on
the permutation pair and is validated against the linear action on
holonomy vectors by the test suite.

Generator matrices, for reference:

    T_upper = [[1, 1], [0, 1]]   T_lower = [[1, 0], [-1, 1]]
    S       = [[0, -1], [1, 0]]
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from mindenom import _backend
from mindenom.errors import CapExceededError

__all__ = [
    "Origami",
    "parse_origami",
    "format_origami",
    "HolonomySet",
    "enumerate_holonomies",
    "primitive_vectors",
    "psi",
    "act_matrix",
    "sl2z_act_origami",
    "origami_isomorphic",
    "veech_h_alpha_check",
    "minimal_veech_alpha",
    "sc_samples",
    "sc_experiment",
    "has_holonomy",
    "printed_cone_value",
    "TORUS",
    "L3",
    "ST6",
]

GENERATORS = {
    "T_upper": ((1, 1), (0, 1)),
    "T_upper_inv": ((1, -1), (0, 1)),
    "T_lower": ((1, 0), (-1, 1)),
    "T_lower_inv": ((1, 0), (1, 1)),
    "S": ((0, -1), (1, 0)),
    "S_inv": ((0, 1), (-1, 0)),
}


def _check_perm(p, d):
    return len(p) == d and sorted(p) == list(range(d))


def _inv(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def _compose(p, q):
    """(p o q)(s) = p[q[s]]."""
    return tuple(p[q[s]] for s in range(len(p)))


@dataclass(frozen=True)
class Origami:
    """Square-tiled surface given by right/up permutations (0-based)."""

    sigma_h: tuple
    sigma_v: tuple

    def __post_init__(self):
        sh = tuple(int(v) for v in self.sigma_h)
        sv = tuple(int(v) for v in self.sigma_v)
        d = len(sh)
        if d < 1 or not _check_perm(sh, d) or not _check_perm(sv, d):
            raise ValueError("sigma_h and sigma_v must be permutations of equal degree")
        object.__setattr__(self, "sigma_h", sh)
        object.__setattr__(self, "sigma_v", sv)
        seen = {0}
        frontier = [0]
        while frontier:
            s = frontier.pop()
            for t in (sh[s], sv[s]):
                if t not in seen:
                    seen.add(t)
                    frontier.append(t)
        if len(seen) != d:
            raise ValueError("surface is disconnected")

    @property
    def degree(self):
        return len(self.sigma_h)

    @cached_property
    def sigma_h_inv(self):
        return _inv(self.sigma_h)

    @cached_property
    def sigma_v_inv(self):
        return _inv(self.sigma_v)

    @cached_property
    def vertex_orbits(self):
        """Orbits of the corner map u; one orbit per vertex of the surface."""
        sh, sv = self.sigma_h, self.sigma_v
        shi, svi = self.sigma_h_inv, self.sigma_v_inv
        u = tuple(sv[sh[svi[shi[s]]]] for s in range(self.degree))
        seen = [False] * self.degree
        orbits = []
        for s in range(self.degree):
            if seen[s]:
                continue
            orb = [s]
            seen[s] = True
            t = u[s]
            while t != s:
                orb.append(t)
                seen[t] = True
                t = u[t]
            orbits.append(tuple(orb))
        return tuple(orbits)

    @cached_property
    def marked_orbits(self):
        """Cone-point orbits, or every orbit when the surface is flat."""
        cones = tuple(o for o in self.vertex_orbits if len(o) > 1)
        return cones if cones else self.vertex_orbits

    @cached_property
    def singular_flags(self):
        """singular_flags[s] == 1 iff square s has a marked lower-left corner."""
        flags = [0] * self.degree
        for orb in self.marked_orbits:
            for s in orb:
                flags[s] = 1
        return tuple(flags)

    def kernel_arrays(self):
        """(sh, sv, svi, singular) in the dtypes the batch kernels expect."""
        return (
            np.asarray(self.sigma_h, dtype=np.int64),
            np.asarray(self.sigma_v, dtype=np.int64),
            np.asarray(self.sigma_v_inv, dtype=np.int64),
            np.asarray(self.singular_flags, dtype=np.int8),
        )


def _cycles(p):
    d = len(p)
    seen = [False] * d
    out = []
    for s in range(d):
        if seen[s]:
            continue
        cyc = [s]
        seen[s] = True
        t = p[s]
        while t != s:
            cyc.append(t)
            seen[t] = True
            t = p[t]
        out.append(cyc)
    return out


def format_origami(o):
    """Two-line cycle-notation form, squares numbered from 1."""

    def fmt(p):
        return "".join("(" + " ".join(str(s + 1) for s in c) + ")" for c in _cycles(p))

    return f"h={fmt(o.sigma_h)}\nv={fmt(o.sigma_v)}"


def parse_origami(text):
    """Parse the two-line cycle form; degree = largest square label."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    spec = {}
    for ln in lines:
        if "=" not in ln:
            raise ValueError(f"bad origami line: {ln!r}")
        key, val = ln.split("=", 1)
        key = key.strip().lower()
        if key not in ("h", "v"):
            raise ValueError(f"bad origami key: {key!r}")
        cycles = []
        body = val.strip()
        while body:
            if not body.startswith("("):
                raise ValueError(f"bad cycle syntax: {val!r}")
            close = body.index(")")
            inner = body[1:close].replace(",", " ").split()
            cycles.append([int(t) for t in inner])
            body = body[close + 1 :].strip()
        spec[key] = cycles
    if set(spec) != {"h", "v"}:
        raise ValueError("origami needs one h= line and one v= line")
    labels = [s for cycles in spec.values() for c in cycles for s in c]
    d = max(labels, default=1)
    if min(labels, default=1) < 1:
        raise ValueError("square labels are 1-based")
    perms = {}
    for key, cycles in spec.items():
        p = list(range(d))
        seen = set()
        for c in cycles:
            for s in c:
                if s in seen:
                    raise ValueError(f"square {s} repeated in {key}=")
                seen.add(s)
            for i, s in enumerate(c):
                p[s - 1] = c[(i + 1) % len(c)] - 1
        perms[key] = tuple(p)
    return Origami(sigma_h=perms["h"], sigma_v=perms["v"])


TORUS = Origami((0,), (0,))
L3 = Origami((1, 0, 2), (2, 1, 0))
# degree-6 surface whose holonomy set is a proper subset of the primitive
# vectors, so its shear statistics genuinely differ from the torus
ST6 = Origami((4, 3, 0, 2, 5, 1), (3, 0, 1, 5, 2, 4))


@dataclass(frozen=True)
class HolonomySet:
    """Multiset of holonomy vectors certified complete up to ||.||_inf <= radius."""

    vectors: tuple
    radius: object

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(sorted(tuple(v) for v in self.vectors)))

    def clip(self, r):
        """Restrict to sup-norm <= r (r <= radius keeps certification)."""
        kept = tuple(v for v in self.vectors if max(abs(v[0]), abs(v[1])) <= r)
        return HolonomySet(vectors=kept, radius=min(self.radius, r))

    def counts(self):
        out = {}
        for v in self.vectors:
            out[v] = out.get(v, 0) + 1
        return out


def _trace(o, arrays, start, p, q, gmax):
    sh, sv, svi, sing = arrays
    return _backend.kernel.trace_first_hit(sh, sv, svi, sing, start, p, q, gmax)


def enumerate_holonomies(o, radius):
    """All saddle-connection holonomy vectors with sup-norm <= radius.

    Rays are traced once per outgoing separatrix in every primitive
    direction with positive first coordinate (plus straight up); the
    mirror-image half of the set is the negation of the traced half.
    """
    R = int(radius)
    if R < 1:
        raise ValueError("radius must be >= 1")
    arrays = o.kernel_arrays()
    starts_up = [s for s in range(o.degree) if o.singular_flags[s]]
    starts_dn = [o.sigma_v_inv[s] for s in starts_up]
    half = []

    def run_direction(p, q):
        gmax = R // max(p, abs(q))
        if gmax < 1:
            return
        starts = starts_up if q >= 0 else starts_dn
        for st in starts:
            g = _trace(o, arrays, st, p, q, gmax)
            if g:
                half.append((g * p, g * q))

    run_direction(0, 1)
    for p in range(1, R + 1):
        for q in range(-R, R + 1):
            if math.gcd(p, abs(q)) == 1:
                run_direction(p, q)
    vectors = half + [(-a, -b) for (a, b) in half]
    return HolonomySet(vectors=vectors, radius=R)


def primitive_vectors(radius):
    """Primitive integer vectors of sup-norm <= radius (torus holonomy oracle)."""
    R = int(radius)
    out = []
    for a in range(-R, R + 1):
        for b in range(-R, R + 1):
            if (a, b) != (0, 0) and math.gcd(abs(a), abs(b)) == 1:
                out.append((a, b))
    return HolonomySet(vectors=out, radius=R)


def psi(holonomies, delta, symmetric=False):
    """Shortest-in-cone statistic over an explicit holonomy set.

    symmetric: min x over vectors with x > 0 and |y| < delta * x.
    printed (symmetric=False): min x over vectors with x > 0, y < delta * x.
    Raises if the minimum cannot be certified inside the set's radius.
    """
    best = None
    for x, y in holonomies.vectors:
        if x <= 0:
            continue
        ybound = abs(y) if symmetric else y
        if ybound < delta * x and (best is None or x < best):
            best = x
    if best is None or best > holonomies.radius:
        raise CapExceededError("cone minimum not certified within holonomy radius")
    return best


def act_matrix(A, holonomies):
    """Linear image of a holonomy set; the certified radius shrinks by the
    operator norm of A^{-1} (rows-of-A convention, det A = +-1)."""
    (a, b), (c, d) = A
    det = a * d - b * c
    if det not in (1, -1):
        raise ValueError("need a unimodular matrix")
    vecs = [(a * x + b * y, c * x + d * y) for x, y in holonomies.vectors]
    inv_norm = max(abs(d) + abs(b), abs(c) + abs(a))  # rows of A^{-1}, |det| = 1
    new_radius = holonomies.radius / inv_norm
    return HolonomySet(vectors=vecs, radius=new_radius)


def sl2z_act_origami(gen, o):
    """Image of an origami under a generator of SL2(Z).

    gen is one of T_upper, T_lower, S, or their *_inv forms.  The defining
    property, checked by the test suite, is that holonomy transforms
    linearly: Lambda(gen . O) = M_gen . Lambda(O).
    """
    sh, sv = o.sigma_h, o.sigma_v
    shi, svi = o.sigma_h_inv, o.sigma_v_inv
    if gen == "T_upper":
        pair = (sh, _compose(sv, shi))
    elif gen == "T_upper_inv":
        pair = (sh, _compose(sv, sh))
    elif gen == "T_lower":
        pair = (_compose(sh, sv), sv)
    elif gen == "T_lower_inv":
        pair = (_compose(sh, svi), sv)
    elif gen == "S":
        pair = (svi, sh)
    elif gen == "S_inv":
        pair = (sv, shi)
    else:
        raise ValueError(f"unknown generator {gen!r}")
    return Origami(sigma_h=pair[0], sigma_v=pair[1])


def origami_isomorphic(a, b):
    """True if some relabeling of squares carries (sh_a, sv_a) to (sh_b, sv_b)."""
    if a.degree != b.degree:
        return False
    d = a.degree
    for image0 in range(d):
        m = {0: image0}
        frontier = [0]
        ok = True
        while frontier and ok:
            s = frontier.pop()
            for pa, pb in ((a.sigma_h, b.sigma_h), (a.sigma_v, b.sigma_v)):
                t, u = pa[s], pb[m[s]]
                if t in m:
                    if m[t] != u:
                        ok = False
                        break
                else:
                    m[t] = u
                    frontier.append(t)
        if ok and len(m) == d and len(set(m.values())) == d:
            # transitivity guarantees full coverage; recheck both perms
            if all(m[a.sigma_h[s]] == b.sigma_h[m[s]] for s in range(d)) and all(
                m[a.sigma_v[s]] == b.sigma_v[m[s]] for s in range(d)
            ):
                return True
    return False


def veech_h_alpha_check(o, alpha):
    """Does the lower shear power [[1,0],[-alpha,1]] preserve the surface?"""
    cur = o
    for _ in range(int(alpha)):
        cur = sl2z_act_origami("T_lower", cur)
    return origami_isomorphic(cur, o)


def minimal_veech_alpha(o, bound=64):
    """Least alpha >= 1 with T_lower^alpha fixing the surface up to relabeling."""
    cur = o
    for alpha in range(1, int(bound) + 1):
        cur = sl2z_act_origami("T_lower", cur)
        if origami_isomorphic(cur, o):
            return alpha
    raise CapExceededError(f"no shear period <= {bound}")


def sc_samples(o, alpha, delta, n, start=0, acap=1 << 20):
    """Normalized symmetric-cone minima over the shear grid of one period.

    Grid point i shears by s = alpha*(2i+1)/(2n); the statistic is
    sqrt(delta) * Psi_delta(h_s surface) with the symmetric cone.
    Returns (shear values, statistics).
    """
    sh, sv, svi, sing = o.kernel_arrays()
    svals, avals = _backend.kernel.psi_origami_batch(
        sh, sv, svi, sing, int(alpha), float(delta), int(n), int(start), int(n), int(acap)
    )
    if (avals == 0).any():
        raise CapExceededError(f"cone search exceeded column cap {acap}")
    return svals, math.sqrt(delta) * avals.astype(np.float64)


def sc_experiment(o, alpha, delta, n, refine=16, acap=1 << 20):
    """Stabilization pair: normalized statistics at delta and delta/refine."""
    _, stat = sc_samples(o, alpha, delta, n, acap=acap)
    _, stat_fine = sc_samples(o, alpha, delta / refine, n, acap=acap)
    return stat, stat_fine


def has_holonomy(o, a, b, arrays=None):
    """Exact membership of (a, b) in the holonomy set, by ray tracing."""
    a = int(a)
    b = int(b)
    if (a, b) == (0, 0):
        return False
    if a < 0 or (a == 0 and b < 0):
        a, b = -a, -b
    g = math.gcd(a, abs(b))
    p, q = a // g, b // g
    if arrays is None:
        arrays = o.kernel_arrays()
    if q >= 0:
        starts = [s for s in range(o.degree) if o.singular_flags[s]]
    else:
        starts = [o.sigma_v_inv[s] for s in range(o.degree) if o.singular_flags[s]]
    return any(_trace(o, arrays, st, p, q, g) == g for st in starts)


def printed_cone_value(o, alpha=None, acap=4096):
    """Constant value of the one-direction cone statistic.

    With the cone y < delta * x the set of admissible columns does not
    depend on the shear or on delta: column a works as soon as the surface
    carries any vector (a, b), because the shear period alpha makes the
    b-values in column a periodic mod alpha * a, hence unbounded below.
    The value is the least such column.
    """
    if alpha is None:
        alpha = minimal_veech_alpha(o)
    arrays = o.kernel_arrays()
    for a in range(1, acap + 1):
        for b in range(0, alpha * a):
            if has_holonomy(o, a, b, arrays=arrays):
                return a
    raise CapExceededError(f"no populated column <= {acap}")
