"""Pure-Python computational kernels.

This module is the reference implementation of the numeric contract shared
with the compiled extension (``mindenom._ckernel``).  Every public function
here has a compiled twin with identical semantics; outputs must agree
bit-for-bit, so float expressions are written in the exact same operation
order in both kernels and transcendental calls go through libm in both.

Randomness contract
-------------------
All sampling is counter-based (Philox4x64-10).  Sample ``i`` of a run with
seed ``s`` draws from the stream keyed ``(s, i)``; within a stream, 256-bit
counters 0, 1, 2, ... produce blocks of four 64-bit words consumed in
order.  A uniform double in [0, 1) is ``(word >> 11) * 2**-53``.  Because
no state is shared between samples, any partition of [start, start+count)
into chunks reproduces identical output.

Exact arithmetic contract
-------------------------
Uniform doubles are exact dyadic rationals (k / 2**53) and a positive float
tolerance is the exact dyadic its bits denote, so interval membership and
distance-to-integer tests below are pure integer comparisons, never float
ones.  The compiled kernel runs them in 128-bit integers; magnitudes are
bounded well under 2**120 for every path the batches exercise.
"""

import math

import numpy as np

MASK64 = (1 << 64) - 1

_PHILOX_M0 = 0xD2E7470EE14C6C93
_PHILOX_M1 = 0xCA5A826395121157
_PHILOX_W0 = 0x9E3779B97F4A7C15
_PHILOX_W1 = 0xBB67AE8584CAA73B

_INV53 = 2.0 ** -53
_TWO_PI = 6.283185307179586476925287
_Y_FLOOR = 0.8660254037844386467637232  # sqrt(3)/2, lower edge of the fundamental strip


def backend_name():
    return "python"


# ---------------------------------------------------------------------------
# counter-based RNG
# ---------------------------------------------------------------------------

def philox4_block(key0, key1, ctr):
    """One Philox4x64-10 block: counter (ctr, 0, 0, 0), returns 4 words."""
    k0 = key0 & MASK64
    k1 = key1 & MASK64
    x0 = ctr & MASK64
    x1 = 0
    x2 = 0
    x3 = 0
    for _ in range(10):
        p0 = _PHILOX_M0 * x0
        p1 = _PHILOX_M1 * x2
        hi0 = p0 >> 64
        lo0 = p0 & MASK64
        hi1 = p1 >> 64
        lo1 = p1 & MASK64
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 = (k0 + _PHILOX_W0) & MASK64
        k1 = (k1 + _PHILOX_W1) & MASK64
    return x0, x1, x2, x3


class _Draws:
    """Word cursor over one sample stream (key = (seed, index))."""

    __slots__ = ("k0", "k1", "block", "buf", "pos")

    def __init__(self, seed, index):
        self.k0 = seed & MASK64
        self.k1 = index & MASK64
        self.block = 0
        self.buf = None
        self.pos = 4

    def next_u64(self):
        if self.pos == 4:
            self.buf = philox4_block(self.k0, self.k1, self.block)
            self.block += 1
            self.pos = 0
        w = self.buf[self.pos]
        self.pos += 1
        return w

    def uniform(self):
        return (self.next_u64() >> 11) * _INV53


# ---------------------------------------------------------------------------
# exact minimal-denominator core
# ---------------------------------------------------------------------------

def _fdiv(a, b):
    # floor division with b > 0; Python's // already floors
    return a // b


def _qmin_core(L, H, D):
    """Minimal-denominator fraction in the open interval (L/D, H/D).

    Requires L < H, D > 0.  Returns (q, p) with p/q in the interval and q
    minimal.  For q >= 2 the witness is unique; for q = 1 the integer
    closest to the interval midpoint is chosen, ties to the smaller one.
    """
    n0 = _fdiv(L, D) + 1
    if n0 * D < H:
        # an integer lies strictly inside
        n1 = -_fdiv(-H, D) - 1
        mid2 = L + H  # midpoint = mid2 / (2D)
        zf = _fdiv(mid2, 2 * D)
        z1 = zf
        if z1 < n0:
            z1 = n0
        elif z1 > n1:
            z1 = n1
        z2 = zf + 1
        if z2 < n0:
            z2 = n0
        elif z2 > n1:
            z2 = n1
        a1 = abs(2 * D * z1 - mid2)
        a2 = abs(2 * D * z2 - mid2)
        z = z1 if (a1 < a2 or (a1 == a2 and z1 <= z2)) else z2
        return 1, z

    # continued-fraction descent; state is the open interval (A/B, C/Dn),
    # with Dn == 0 meaning an infinite upper endpoint
    k = n0 - 1
    terms = [k]
    A = D
    B = H - k * D
    C = D
    Dn = L - k * D
    while True:
        k = _fdiv(A, B) + 1  # smallest integer strictly above A/B
        if Dn == 0 or k * Dn < C:
            terms.append(k)
            break
        k -= 1
        nA = Dn
        nB = C - k * Dn
        nC = B
        nDn = A - k * B
        A, B, C, Dn = nA, nB, nC, nDn
        terms.append(k)

    num = terms[-1]
    den = 1
    for a in reversed(terms[1:-1]):
        num, den = a * num + den, num
    p = terms[0] * num + den
    q = num
    return q, p


def qmin_exact(xn, xd, dn, dd):
    """(q, p) for the open interval (x - d, x + d), x = xn/xd, d = dn/dd > 0."""
    g = math.gcd(xd, dd)
    du = dd // g
    xu = xd // g
    D = xd * du
    L = xn * du - dn * xu
    H = xn * du + dn * xu
    return _qmin_core(L, H, D)


def qmin_dyadic(xm, xe, dm, de):
    """(q, p) for the open interval (x - d, x + d), x = xm/2**xe, d = dm/2**de."""
    E = xe if xe > de else de
    L = (xm << (E - xe)) - (dm << (E - de))
    H = (xm << (E - xe)) + (dm << (E - de))
    return _qmin_core(L, H, 1 << E)


def _split_pos_float(v):
    """Exact dyadic decomposition of a positive float: v = m / 2**e."""
    fr, ex = math.frexp(v)
    m = int(fr * 9007199254740992.0)  # fr * 2**53, exact
    e = 53 - ex
    while e > 0 and (m & 1) == 0:
        m >>= 1
        e -= 1
    if e < 0:
        m <<= -e
        e = 0
    return m, e


def qmin_batch(seed, delta, start, count):
    """Minimal denominators of uniform x at tolerance delta.

    Sample i draws x uniformly (one word from stream (seed, start+i)) and
    resolves q_min(x, delta).  Returns (x array, q array).
    """
    dm, de = _split_pos_float(delta)
    xs = np.empty(count, dtype=np.float64)
    qs = np.empty(count, dtype=np.int64)
    for j in range(count):
        dr = _Draws(seed, start + j)
        w = dr.next_u64() >> 11
        xs[j] = w * _INV53
        E = de if de > 53 else 53
        L = (w << (E - 53)) - (dm << (E - de))
        H = (w << (E - 53)) + (dm << (E - de))
        q, _ = _qmin_core(L, H, 1 << E)
        qs[j] = q
    return xs, qs


def qm_batch(seed, delta, m, start, count, qcap):
    """Simultaneous minimal denominators for m-vectors of uniforms.

    Sample i draws an m-vector x and finds the least q >= 1 with
    dist(q*x_j, Z) < q*delta for every coordinate.  Returns the draws
    (row-major, count*m) and the q values; q = 0 flags a cap overrun.
    """
    dm, de = _split_pos_float(delta)
    E = de if de > 53 else 53
    one = 1 << E
    half = one >> 1
    d = dm << (E - de)
    xs = np.empty(count * m, dtype=np.float64)
    qs = np.empty(count, dtype=np.int64)
    ks = [0] * m
    rs = [0] * m
    for j in range(count):
        dr = _Draws(seed, start + j)
        for i in range(m):
            w = dr.next_u64() >> 11
            xs[j * m + i] = w * _INV53
            ks[i] = w << (E - 53)
            rs[i] = 0
        qfound = 0
        q = 0
        while q < qcap:
            q += 1
            for i in range(m):
                r = rs[i] + ks[i]
                if r >= one:
                    r -= one
                rs[i] = r
            qd = q * d
            ok = True
            for i in range(m):
                r = rs[i]
                dist = r if r <= half else one - r
                if dist >= qd:
                    ok = False
                    break
            if ok:
                qfound = q
                break
        qs[j] = qfound
    return xs, qs


def _qmn_shell_reps(n, s):
    """Half-shell representatives of sup-norm s in Z^n (first nonzero > 0)."""
    if n == 1:
        return [(s,)]
    if n == 2:
        reps = [(s, j) for j in range(-s, s + 1)]
        for j in range(1, s):
            reps.append((j, s))
            reps.append((j, -s))
        reps.append((0, s))
        return reps
    if n == 3:
        reps = []
        for a in range(-s, s + 1):
            for b in range(-s, s + 1):
                reps.append((s, a, b))
        for q1 in range(1, s):
            for a in range(-s, s + 1):
                for b in range(-s, s + 1):
                    if abs(a) == s or abs(b) == s:
                        reps.append((q1, a, b))
        for t in _qmn_shell_reps(2, s):
            reps.append((0,) + t)
        return reps
    raise ValueError("shell enumeration implemented for n <= 3")


def qmn_batch(seed, delta, m, n, start, count, shell_cap):
    """Matrix minimal-denominator search over integer shells.

    Sample i draws an m*n matrix X of uniforms (row-major) and finds the
    least s = ||q||_inf over nonzero integer q with
    dist(X q, Z^m)_inf < delta * s.  Returns (draws, s values); s = 0
    flags a cap overrun.
    """
    if n > 3:
        raise ValueError("qmn_batch supports n <= 3")
    dm, de = _split_pos_float(delta)
    E = de if de > 53 else 53
    one = 1 << E
    half = one >> 1
    d = dm << (E - de)
    xs = np.empty(count * m * n, dtype=np.float64)
    qs = np.empty(count, dtype=np.int64)
    K = [[0] * n for _ in range(m)]
    for j in range(count):
        dr = _Draws(seed, start + j)
        for i in range(m):
            for l in range(n):
                w = dr.next_u64() >> 11
                xs[(j * m + i) * n + l] = w * _INV53
                K[i][l] = w << (E - 53)
        found = 0
        s = 0
        while s < shell_cap and not found:
            s += 1
            bound = s * d
            for rep in _qmn_shell_reps(n, s):
                ok = True
                for i in range(m):
                    v = 0
                    for l in range(n):
                        v += K[i][l] * rep[l]
                    r = v % one
                    dist = r if r <= half else one - r
                    if dist >= bound:
                        ok = False
                        break
                if ok:
                    found = s
                    break
        qs[j] = found
    return xs, qs


# ---------------------------------------------------------------------------
# planar cone minimization
# ---------------------------------------------------------------------------

def f11(b00, b01, b10, b11, delta, one_sided, rmax):
    """Least first-coordinate norm of a lattice point in a planar cone.

    The lattice is spanned by columns (b00, b10) and (b01, b11).  Cone
    membership for w = (wx, wy): one_sided requires wx > 0 and
    |wy| < delta*wx; two-sided requires wx != 0 and |wy| < delta*|wx|.
    Returns (unorm, a1, a2, wx, wy) where (a1, a2) are the integer
    coefficients of the minimizer in the input basis, ties broken by
    lexicographic coefficient order.  unorm = -1.0 signals that no point
    was found with |wx| <= rmax.
    """
    # Gauss reduction with unimodular tracking: reduced_j = B * (t0j, t1j)
    v0x = b00
    v0y = b10
    v1x = b01
    v1y = b11
    t00 = 1
    t10 = 0
    t01 = 0
    t11 = 1
    while True:
        n0 = v0x * v0x + v0y * v0y
        n1 = v1x * v1x + v1y * v1y
        if n0 > n1:
            v0x, v1x = v1x, v0x
            v0y, v1y = v1y, v0y
            t00, t01 = t01, t00
            t10, t11 = t11, t10
            n0 = n1
        if n0 == 0.0:
            break  # degenerate basis; bail out and let the scan fail
        mu = math.floor((v0x * v1x + v0y * v1y) / n0 + 0.5)
        if mu == 0:
            break
        v1x = v1x - mu * v0x
        v1y = v1y - mu * v0y
        t01 = t01 - mu * t00
        t11 = t11 - mu * t10
    det = v0x * v1y - v0y * v1x
    if det == 0.0:
        return -1.0, 0, 0, 0.0, 0.0
    i00 = v1y / det
    i01 = -v1x / det
    i10 = -v0y / det
    i11 = v0x / det

    R = 1.0
    while R <= rmax:
        wy_max = delta * R
        c0 = math.floor(abs(i00) * R + abs(i01) * wy_max) + 1
        c1 = math.floor(abs(i10) * R + abs(i11) * wy_max) + 1
        best = -1.0
        ba1 = 0
        ba2 = 0
        bwx = 0.0
        bwy = 0.0
        for a in range(-c0, c0 + 1):
            for b in range(-c1, c1 + 1):
                if a == 0 and b == 0:
                    continue
                wx = a * v0x + b * v1x
                wy = a * v0y + b * v1y
                if one_sided:
                    if wx <= 0.0:
                        continue
                    u = wx
                else:
                    if wx == 0.0:
                        continue
                    u = wx if wx > 0.0 else -wx
                if u > R:
                    continue
                lim = delta * u
                if wy < lim and -wy < lim:
                    a1 = a * t00 + b * t01
                    a2 = a * t10 + b * t11
                    if (
                        best < 0.0
                        or u < best
                        or (u == best and (a1 < ba1 or (a1 == ba1 and a2 < ba2)))
                    ):
                        best = u
                        ba1 = a1
                        ba2 = a2
                        bwx = wx
                        bwy = wy
        if best >= 0.0:
            return best, ba1, ba2, bwx, bwy
        R = R * 2.0
    return -1.0, 0, 0, 0.0, 0.0


# ---------------------------------------------------------------------------
# unimodular-lattice sampling and statistics over it
# ---------------------------------------------------------------------------

def _draw_lattice(dr):
    """One fundamental-domain draw; returns (x, y, theta, basis, proposals)."""
    proposals = 0
    while True:
        proposals += 1
        x = dr.uniform() - 0.5
        u = 1.0 - dr.uniform()  # in (0, 1]
        y = _Y_FLOOR / u
        if x * x + y * y >= 1.0:
            break
    theta = _TWO_PI * dr.uniform()
    c = math.cos(theta)
    s = math.sin(theta)
    # rotation(theta) times the upper-triangular shape basis
    # [[1/sqrt(y), x/sqrt(y)], [0, sqrt(y)]]; the shape point x + iy lies in
    # the classical fundamental domain, matching the rejection rule above.
    sy = math.sqrt(y)
    b00 = c / sy
    b01 = (c * x) / sy - s * sy
    b10 = s / sy
    b11 = (s * x) / sy + c * sy
    return x, y, theta, (b00, b01, b10, b11), proposals


def haar_batch(seed, start, count, delta, one_sided, rmax):
    """Cone minima over independently sampled unimodular lattices.

    Returns (x, y, theta, f) arrays and the total number of rejection
    proposals consumed.  f = -1.0 flags a search cap overrun.
    """
    xs = np.empty(count, dtype=np.float64)
    ys = np.empty(count, dtype=np.float64)
    ths = np.empty(count, dtype=np.float64)
    fs = np.empty(count, dtype=np.float64)
    total = 0
    for j in range(count):
        dr = _Draws(seed, start + j)
        x, y, theta, basis, prop = _draw_lattice(dr)
        total += prop
        xs[j] = x
        ys[j] = y
        ths[j] = theta
        fs[j], _, _, _, _ = f11(basis[0], basis[1], basis[2], basis[3], delta, one_sided, rmax)
    return xs, ys, ths, fs, total


def horocycle_batch(delta, ngrid, start, count, one_sided, rmax):
    """Normalized cone minima along a deterministic shear orbit.

    Grid point i uses x = (i + 0.5)/ngrid and evaluates the cone minimum
    of the renormalized shear lattice with tolerance 1.
    """
    sq = math.sqrt(delta)
    svals = np.empty(count, dtype=np.float64)
    fs = np.empty(count, dtype=np.float64)
    for j in range(count):
        i = start + j
        x = (i + 0.5) / ngrid
        svals[j] = x
        fs[j], _, _, _, _ = f11(sq, 0.0, -x / sq, 1.0 / sq, 1.0, one_sided, rmax)
    return svals, fs


def box_count_batch(seed, start, count, x0, x1, y0, y1):
    """Nonzero lattice point counts in a closed axis box, one lattice per sample."""
    counts = np.empty(count, dtype=np.int64)
    for j in range(count):
        dr = _Draws(seed, start + j)
        _, _, _, basis, _ = _draw_lattice(dr)
        b00, b01, b10, b11 = basis
        det = b00 * b11 - b01 * b10
        i00 = b11 / det
        i01 = -b01 / det
        i10 = -b10 / det
        i11 = b00 / det
        W = max(abs(x0), abs(x1))
        H = max(abs(y0), abs(y1))
        c0 = math.floor(abs(i00) * W + abs(i01) * H) + 1
        c1 = math.floor(abs(i10) * W + abs(i11) * H) + 1
        cnt = 0
        for a in range(-c0, c0 + 1):
            for b in range(-c1, c1 + 1):
                if a == 0 and b == 0:
                    continue
                wx = a * b00 + b * b01
                wy = a * b10 + b * b11
                if x0 <= wx <= x1 and y0 <= wy <= y1:
                    cnt += 1
        counts[j] = cnt
    return counts


def disk_count_batch(seed, start, count, radius, cphi, sphi):
    """Nonzero lattice point counts in a closed disk, after rotating by phi."""
    counts = np.empty(count, dtype=np.int64)
    r2 = radius * radius
    for j in range(count):
        dr = _Draws(seed, start + j)
        _, _, _, basis, _ = _draw_lattice(dr)
        b00 = cphi * basis[0] - sphi * basis[2]
        b01 = cphi * basis[1] - sphi * basis[3]
        b10 = sphi * basis[0] + cphi * basis[2]
        b11 = sphi * basis[1] + cphi * basis[3]
        det = b00 * b11 - b01 * b10
        i00 = b11 / det
        i01 = -b01 / det
        i10 = -b10 / det
        i11 = b00 / det
        c0 = math.floor(math.sqrt(i00 * i00 + i01 * i01) * radius) + 1
        c1 = math.floor(math.sqrt(i10 * i10 + i11 * i11) * radius) + 1
        cnt = 0
        for a in range(-c0, c0 + 1):
            for b in range(-c1, c1 + 1):
                if a == 0 and b == 0:
                    continue
                wx = a * b00 + b * b01
                wy = a * b10 + b * b11
                if wx * wx + wy * wy <= r2:
                    cnt += 1
        counts[j] = cnt
    return counts


# ---------------------------------------------------------------------------
# square-tiled surface primitives
# ---------------------------------------------------------------------------

def psi_torus_batch(delta, ngrid, start, count, symmetric):
    """Shortest visible primitive column on the sheared standard torus.

    Grid point i shears by s = (2i+1)/(2*ngrid) and scans columns a = 1, 2,
    ... for an integer b with gcd(a, b) = 1 whose sheared height b - a*s
    falls strictly inside the cone of slope delta (symmetric: |b - a*s| <
    delta*a; one-sided: b - a*s < delta*a, which the first column already
    satisfies).  Values are exact integer comparisons throughout.
    """
    dm, de = _split_pos_float(delta)
    sd = 2 * ngrid
    svals = np.empty(count, dtype=np.float64)
    avals = np.empty(count, dtype=np.int64)
    for j in range(count):
        i = start + j
        sn = 2 * i + 1
        svals[j] = sn / sd
        if not symmetric:
            # any integer strictly below a*(s + delta) works at a = 1
            avals[j] = 1
            continue
        a = 0
        found = 0
        while not found:
            a += 1
            # need |b*sd - a*sn| * 2**de < a * dm * sd, gcd(a, b) = 1
            rhs = a * dm * sd
            center = a * sn
            b0 = center // sd  # candidates straddle a*s
            b = b0
            while b * sd * (1 << de) > center * (1 << de) - rhs:
                b -= 1
            b += 1  # smallest admissible b
            while b * sd * (1 << de) < center * (1 << de) + rhs:
                if math.gcd(a, b if b >= 0 else -b) == 1:
                    found = a
                    break
                b += 1
        avals[j] = found
    return svals, avals


def psi_origami_batch(sh, sv, svi, singular, alpha, delta, ngrid, start, count, acap):
    """Shortest sheared-cone holonomy column over a stratified shear grid.

    Grid point i shears the surface by s = alpha*(2i+1)/(2*ngrid) and finds
    the least a >= 1 such that some holonomy vector (a, b) of the surface
    satisfies |b - a*s| < delta*a (symmetric cone, exact comparisons).
    Membership of (a, b) is decided by ray tracing from every singular
    corner.  Returns (s array, a array); a = 0 flags an acap overrun.
    """
    dm, de = _split_pos_float(delta)
    d = len(sh)
    sd = 2 * ngrid
    svals = np.empty(count, dtype=np.float64)
    avals = np.empty(count, dtype=np.int64)
    starts_up = [t for t in range(d) if singular[t]]
    starts_dn = [svi[t] for t in starts_up]
    for j in range(count):
        i = start + j
        sn = alpha * (2 * i + 1)
        svals[j] = sn / sd
        a = 0
        found = 0
        while found == 0 and a < acap:
            a += 1
            rhs = a * dm * sd
            center = (a * sn) << de
            lo = center - rhs
            hi = center + rhs
            b = (a * sn) // sd
            while (b * sd) << de > lo:
                b -= 1
            b += 1
            while (b * sd) << de < hi:
                g = math.gcd(a, b if b >= 0 else -b)
                p = a // g
                q = b // g  # exact: g divides b
                starts = starts_up if q >= 0 else starts_dn
                for st in starts:
                    if trace_first_hit(sh, sv, svi, singular, st, p, q, g) == g:
                        found = a
                        break
                if found:
                    break
                b += 1
        avals[j] = found
    return svals, avals


def trace_first_hit(sh, sv, svi, singular, start, p0, q0, gmax):
    """First singular vertex along a ray on a square-tiled surface.

    The surface is given by right/up square permutations sh, sv (svi is
    the inverse of sv) and a flag array marking squares whose lower-left
    corner is a singular vertex.  The ray leaves a singular vertex with
    primitive direction (p0, q0) entering square ``start`` (the square
    having that vertex at its lower-left for q0 >= 0, upper-left for
    q0 < 0).  Returns the first multiple g <= gmax at which the ray meets
    a singular vertex, or 0 if none does.
    """
    s = start
    if p0 == 0:
        # vertical ray
        for g in range(1, gmax + 1):
            s = sv[s]
            if singular[s]:
                return g
        return 0
    if q0 == 0:
        for g in range(1, gmax + 1):
            s = sh[s]
            if singular[s]:
                return g
        return 0
    qa = q0 if q0 > 0 else -q0
    up = q0 > 0
    k = 1
    l = 1
    kmax = gmax * p0
    while k <= kmax:
        ke = k * qa
        le = l * p0
        if ke < le:
            s = sh[s]
            k += 1
        elif ke > le:
            s = sv[s] if up else svi[s]
            l += 1
        else:
            # the ray passes through a vertex of the tiling
            if up:
                nxt = sv[sh[s]]
                vtx = nxt
            else:
                nxt = svi[sh[s]]
                vtx = sh[s]
            if singular[vtx]:
                return k // p0
            s = nxt
            k += 1
            l += 1
    return 0
