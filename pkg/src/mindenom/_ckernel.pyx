# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled computational kernels.

Twin of ``mindenom._pykernel``: identical public names, signatures, and
semantics; outputs agree bit-for-bit.  See the pure module for the full
randomness and exact-arithmetic contract.  Exact paths run in 128-bit
integers here, with argument guards where that width could be exceeded.
"""

import numpy as np

from libc.math cimport cos, floor, frexp, sin, sqrt

cdef extern from *:
    ctypedef long long int128 "__int128_t"
    ctypedef unsigned long long uint128 "__uint128_t"

ctypedef unsigned long long u64
ctypedef long long i64
ctypedef signed char i8

cdef double INV53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 6.283185307179586476925287
cdef double Y_FLOOR = 0.8660254037844386467637232  # sqrt(3)/2

cdef u64 PHILOX_M0 = 0xD2E7470EE14C6C93
cdef u64 PHILOX_M1 = 0xCA5A826395121157
cdef u64 PHILOX_W0 = 0x9E3779B97F4A7C15
cdef u64 PHILOX_W1 = 0xBB67AE8584CAA73B

MASK64 = (1 << 64) - 1


def backend_name():
    return "c"


# ---------------------------------------------------------------------------
# counter-based RNG
# ---------------------------------------------------------------------------

cdef void _philox_block(u64 k0, u64 k1, u64 ctr, u64 *out) noexcept nogil:
    cdef u64 x0 = ctr, x1 = 0, x2 = 0, x3 = 0
    cdef uint128 p0, p1
    cdef u64 hi0, lo0, hi1, lo1
    cdef int r
    for r in range(10):
        p0 = (<uint128> PHILOX_M0) * x0
        p1 = (<uint128> PHILOX_M1) * x2
        hi0 = <u64> (p0 >> 64)
        lo0 = <u64> p0
        hi1 = <u64> (p1 >> 64)
        lo1 = <u64> p1
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 = k0 + PHILOX_W0
        k1 = k1 + PHILOX_W1
    out[0] = x0
    out[1] = x1
    out[2] = x2
    out[3] = x3


def philox4_block(key0, key1, ctr):
    """One Philox4x64-10 block: counter (ctr, 0, 0, 0), returns 4 words."""
    cdef u64 k0 = <u64> (key0 & MASK64)
    cdef u64 k1 = <u64> (key1 & MASK64)
    cdef u64 c = <u64> (ctr & MASK64)
    cdef u64 out[4]
    _philox_block(k0, k1, c, out)
    return out[0], out[1], out[2], out[3]


cdef struct Draws:
    u64 k0
    u64 k1
    u64 block
    u64 buf[4]
    int pos


cdef void _draws_init(Draws *d, u64 seed, u64 index) noexcept nogil:
    d.k0 = seed
    d.k1 = index
    d.block = 0
    d.pos = 4


cdef u64 _draws_next(Draws *d) noexcept nogil:
    cdef u64 w
    if d.pos == 4:
        _philox_block(d.k0, d.k1, d.block, d.buf)
        d.block += 1
        d.pos = 0
    w = d.buf[d.pos]
    d.pos += 1
    return w


cdef double _draws_uniform(Draws *d) noexcept nogil:
    return (<double> (_draws_next(d) >> 11)) * INV53


# ---------------------------------------------------------------------------
# exact minimal-denominator core
# ---------------------------------------------------------------------------

cdef int128 _fdiv128(int128 a, int128 b) noexcept nogil:
    # floor division, b > 0
    cdef int128 q = a / b
    if a % b != 0 and a < 0:
        q -= 1
    return q


cdef int _qmin_core(int128 L, int128 H, int128 D, i64 *qout, i64 *pout) noexcept nogil:
    """Minimal-denominator fraction in (L/D, H/D); 0 on success."""
    cdef int128 terms[256]
    cdef int nt = 0, i
    cdef int128 n0, n1, mid2, zf, z1, z2, a1, a2, z, k
    cdef int128 A, B, C, Dn, nA, nB, nC, nDn, num, den

    n0 = _fdiv128(L, D) + 1
    if n0 * D < H:
        n1 = -_fdiv128(-H, D) - 1
        mid2 = L + H
        zf = _fdiv128(mid2, 2 * D)
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
        a1 = 2 * D * z1 - mid2
        if a1 < 0:
            a1 = -a1
        a2 = 2 * D * z2 - mid2
        if a2 < 0:
            a2 = -a2
        z = z1 if (a1 < a2 or (a1 == a2 and z1 <= z2)) else z2
        qout[0] = 1
        pout[0] = <i64> z
        return 0

    k = n0 - 1
    terms[nt] = k
    nt += 1
    A = D
    B = H - k * D
    C = D
    Dn = L - k * D
    while True:
        k = _fdiv128(A, B) + 1
        if Dn == 0 or k * Dn < C:
            if nt >= 255:
                return -1
            terms[nt] = k
            nt += 1
            break
        k -= 1
        nA = Dn
        nB = C - k * Dn
        nC = B
        nDn = A - k * B
        A = nA
        B = nB
        C = nC
        Dn = nDn
        if nt >= 255:
            return -1
        terms[nt] = k
        nt += 1

    num = terms[nt - 1]
    den = 1
    for i in range(nt - 2, 0, -1):
        nA = terms[i] * num + den
        den = num
        num = nA
    qout[0] = <i64> num
    pout[0] = <i64> (terms[0] * num + den)
    return 0


cdef int _split_pos_float(double v, i64 *m_out, int *e_out) noexcept nogil:
    """Exact dyadic decomposition of a positive double: v = m / 2**e."""
    cdef int ex
    cdef double fr = frexp(v, &ex)
    cdef i64 m = <i64> (fr * 9007199254740992.0)
    cdef int e = 53 - ex
    while e > 0 and (m & 1) == 0:
        m >>= 1
        e -= 1
    if e < 0:
        if e < -10:
            return -1
        m <<= -e
        e = 0
    m_out[0] = m
    e_out[0] = e
    return 0


cdef int _check_delta(double delta) except -1:
    if not (delta > 8.271806125530277e-25 and delta < 1099511627776.0):
        # 2**-80 < delta < 2**40 keeps every integer path inside 128 bits
        raise ValueError("delta out of supported range")
    return 0


def qmin_dyadic(xm, xe, dm, de):
    """(q, p) for the open interval (x - d, x + d), x = xm/2**xe, d = dm/2**de."""
    cdef i64 cxm = <i64> xm
    cdef i64 cdm = <i64> dm
    cdef int cxe = <int> xe
    cdef int cde = <int> de
    if cxe < 0 or cxe > 90 or cde < 0 or cde > 90:
        raise ValueError("exponent out of range")
    if cdm <= 0 or cdm >= (1 << 62) or cxm <= -(1 << 62) or cxm >= (1 << 62):
        raise ValueError("mantissa out of range")
    cdef int E = cxe if cxe > cde else cde
    if E + 62 - (cxe if cxe < cde else cde) > 110:
        raise ValueError("operands too wide for the compiled kernel")
    cdef int128 L = ((<int128> cxm) << (E - cxe)) - ((<int128> cdm) << (E - cde))
    cdef int128 H = ((<int128> cxm) << (E - cxe)) + ((<int128> cdm) << (E - cde))
    cdef i64 q = 0, p = 0
    if _qmin_core(L, H, (<int128> 1) << E, &q, &p) != 0:
        raise RuntimeError("descent did not terminate")
    return q, p


def qmin_batch(seed, delta, start, count):
    """Minimal denominators of uniform x at tolerance delta; see _pykernel."""
    _check_delta(delta)
    cdef i64 dm = 0
    cdef int de = 0
    if _split_pos_float(delta, &dm, &de) != 0:
        raise ValueError("delta out of supported range")
    cdef u64 cseed = <u64> (seed & MASK64)
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    xs_arr = np.empty(n, dtype=np.float64)
    qs_arr = np.empty(n, dtype=np.int64)
    cdef double[:] xs = xs_arr
    cdef i64[:] qs = qs_arr
    cdef Draws dr
    cdef i64 j, q, p
    cdef u64 w
    cdef int E = de if de > 53 else 53
    cdef int128 L, H, D
    D = (<int128> 1) << E
    for j in range(n):
        _draws_init(&dr, cseed, <u64> (cstart + j))
        w = _draws_next(&dr) >> 11
        xs[j] = (<double> w) * INV53
        L = ((<int128> w) << (E - 53)) - ((<int128> dm) << (E - de))
        H = ((<int128> w) << (E - 53)) + ((<int128> dm) << (E - de))
        q = 0
        p = 0
        if _qmin_core(L, H, D, &q, &p) != 0:
            raise RuntimeError("descent did not terminate")
        qs[j] = q
    return xs_arr, qs_arr


def qm_batch(seed, delta, m, start, count, qcap):
    """Simultaneous minimal denominators for m-vectors; see _pykernel."""
    _check_delta(delta)
    cdef int cm = <int> m
    if cm < 1 or cm > 8:
        raise ValueError("m out of range for the compiled kernel")
    cdef i64 dm = 0
    cdef int de = 0
    if _split_pos_float(delta, &dm, &de) != 0:
        raise ValueError("delta out of supported range")
    cdef u64 cseed = <u64> (seed & MASK64)
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef i64 cap = <i64> qcap
    xs_arr = np.empty(n * cm, dtype=np.float64)
    qs_arr = np.empty(n, dtype=np.int64)
    cdef double[:] xs = xs_arr
    cdef i64[:] qs = qs_arr
    cdef int E = de if de > 53 else 53
    cdef int128 one = (<int128> 1) << E
    cdef int128 half = one >> 1
    cdef int128 d = (<int128> dm) << (E - de)
    cdef int128 ks[8]
    cdef int128 rs[8]
    cdef int128 r, dist, qd
    cdef Draws dr
    cdef i64 j, q, qfound
    cdef int i
    cdef u64 w
    cdef bint ok
    for j in range(n):
        _draws_init(&dr, cseed, <u64> (cstart + j))
        for i in range(cm):
            w = _draws_next(&dr) >> 11
            xs[j * cm + i] = (<double> w) * INV53
            ks[i] = (<int128> w) << (E - 53)
            rs[i] = 0
        qfound = 0
        q = 0
        while q < cap:
            q += 1
            for i in range(cm):
                r = rs[i] + ks[i]
                if r >= one:
                    r -= one
                rs[i] = r
            qd = q * d
            ok = True
            for i in range(cm):
                r = rs[i]
                dist = r if r <= half else one - r
                if dist >= qd:
                    ok = False
                    break
            if ok:
                qfound = q
                break
        qs[j] = qfound
    return xs_arr, qs_arr


cdef bint _qmn_hit(int128 *K, int cm, int cn, i64 *rep, int128 one, int128 half,
                   int128 bound) noexcept nogil:
    cdef int i, l
    cdef int128 v, r, dist
    for i in range(cm):
        v = 0
        for l in range(cn):
            v += K[i * 3 + l] * rep[l]
        r = v % one
        if r < 0:
            r += one
        dist = r if r <= half else one - r
        if dist >= bound:
            return False
    return True


def qmn_batch(seed, delta, m, n, start, count, shell_cap):
    """Matrix minimal-denominator search over integer shells; see _pykernel."""
    _check_delta(delta)
    cdef int cm = <int> m
    cdef int cn = <int> n
    if cm < 1 or cm > 3:
        raise ValueError("m out of range for the compiled kernel")
    if cn < 1 or cn > 3:
        raise ValueError("qmn_batch supports n <= 3")
    cdef i64 dm = 0
    cdef int de = 0
    if _split_pos_float(delta, &dm, &de) != 0:
        raise ValueError("delta out of supported range")
    cdef u64 cseed = <u64> (seed & MASK64)
    cdef i64 cstart = <i64> start
    cdef i64 cnt = <i64> count
    cdef i64 cap = <i64> shell_cap
    xs_arr = np.empty(cnt * cm * cn, dtype=np.float64)
    qs_arr = np.empty(cnt, dtype=np.int64)
    cdef double[:] xs = xs_arr
    cdef i64[:] qs = qs_arr
    cdef int E = de if de > 53 else 53
    cdef int128 one = (<int128> 1) << E
    cdef int128 half = one >> 1
    cdef int128 d = (<int128> dm) << (E - de)
    cdef int128 K[9]
    cdef i64 rep[3]
    cdef int128 bound
    cdef Draws dr
    cdef i64 j, s, found, a, b, q1
    cdef int i, l
    cdef u64 w
    for j in range(cnt):
        _draws_init(&dr, cseed, <u64> (cstart + j))
        for i in range(cm):
            for l in range(cn):
                w = _draws_next(&dr) >> 11
                xs[(j * cm + i) * cn + l] = (<double> w) * INV53
                K[i * 3 + l] = (<int128> w) << (E - 53)
        found = 0
        s = 0
        while s < cap and found == 0:
            s += 1
            bound = s * d
            if cn == 1:
                rep[0] = s
                if _qmn_hit(K, cm, cn, rep, one, half, bound):
                    found = s
            elif cn == 2:
                rep[0] = s
                for a in range(-s, s + 1):
                    rep[1] = a
                    if _qmn_hit(K, cm, cn, rep, one, half, bound):
                        found = s
                        break
                if found == 0:
                    for q1 in range(1, s):
                        rep[0] = q1
                        rep[1] = s
                        if _qmn_hit(K, cm, cn, rep, one, half, bound):
                            found = s
                            break
                        rep[1] = -s
                        if _qmn_hit(K, cm, cn, rep, one, half, bound):
                            found = s
                            break
                if found == 0:
                    rep[0] = 0
                    rep[1] = s
                    if _qmn_hit(K, cm, cn, rep, one, half, bound):
                        found = s
            else:
                rep[0] = s
                for a in range(-s, s + 1):
                    rep[1] = a
                    for b in range(-s, s + 1):
                        rep[2] = b
                        if _qmn_hit(K, cm, cn, rep, one, half, bound):
                            found = s
                            break
                    if found:
                        break
                if found == 0:
                    for q1 in range(1, s):
                        rep[0] = q1
                        for a in range(-s, s + 1):
                            if found:
                                break
                            rep[1] = a
                            for b in range(-s, s + 1):
                                if a != s and a != -s and b != s and b != -s:
                                    continue
                                rep[2] = b
                                if _qmn_hit(K, cm, cn, rep, one, half, bound):
                                    found = s
                                    break
                        if found:
                            break
                if found == 0:
                    rep[0] = 0
                    rep[1] = s
                    for a in range(-s, s + 1):
                        rep[2] = a
                        if _qmn_hit(K, cm, cn, rep, one, half, bound):
                            found = s
                            break
                if found == 0:
                    for q1 in range(1, s):
                        rep[0] = 0
                        rep[1] = q1
                        rep[2] = s
                        if _qmn_hit(K, cm, cn, rep, one, half, bound):
                            found = s
                            break
                        rep[2] = -s
                        if _qmn_hit(K, cm, cn, rep, one, half, bound):
                            found = s
                            break
                if found == 0:
                    rep[0] = 0
                    rep[1] = 0
                    rep[2] = s
                    if _qmn_hit(K, cm, cn, rep, one, half, bound):
                        found = s
        qs[j] = found
    return xs_arr, qs_arr


# ---------------------------------------------------------------------------
# planar cone minimization
# ---------------------------------------------------------------------------

cdef int _f11_core(double b00, double b01, double b10, double b11, double delta,
                   bint one_sided, double rmax, double *fout, i64 *a1out,
                   i64 *a2out, double *wxout, double *wyout) noexcept nogil:
    cdef double v0x = b00, v0y = b10, v1x = b01, v1y = b11
    cdef i64 t00 = 1, t10 = 0, t01 = 0, t11 = 1
    cdef double n0, n1, tmp, det
    cdef i64 mu, itmp
    while True:
        n0 = v0x * v0x + v0y * v0y
        n1 = v1x * v1x + v1y * v1y
        if n0 > n1:
            tmp = v0x; v0x = v1x; v1x = tmp
            tmp = v0y; v0y = v1y; v1y = tmp
            itmp = t00; t00 = t01; t01 = itmp
            itmp = t10; t10 = t11; t11 = itmp
            n0 = n1
        if n0 == 0.0:
            break
        mu = <i64> floor((v0x * v1x + v0y * v1y) / n0 + 0.5)
        if mu == 0:
            break
        v1x = v1x - mu * v0x
        v1y = v1y - mu * v0y
        t01 = t01 - mu * t00
        t11 = t11 - mu * t10
    det = v0x * v1y - v0y * v1x
    if det == 0.0:
        fout[0] = -1.0
        return -1
    cdef double i00 = v1y / det
    cdef double i01 = -v1x / det
    cdef double i10 = -v0y / det
    cdef double i11 = v0x / det

    cdef double R = 1.0
    cdef double wy_max, best, bwx, bwy, wx, wy, u, lim
    cdef i64 c0, c1, a, b, a1, a2, ba1, ba2
    while R <= rmax:
        wy_max = delta * R
        c0 = (<i64> floor((i00 if i00 >= 0.0 else -i00) * R
                          + (i01 if i01 >= 0.0 else -i01) * wy_max)) + 1
        c1 = (<i64> floor((i10 if i10 >= 0.0 else -i10) * R
                          + (i11 if i11 >= 0.0 else -i11) * wy_max)) + 1
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
                    if (best < 0.0 or u < best
                            or (u == best and (a1 < ba1 or (a1 == ba1 and a2 < ba2)))):
                        best = u
                        ba1 = a1
                        ba2 = a2
                        bwx = wx
                        bwy = wy
        if best >= 0.0:
            fout[0] = best
            a1out[0] = ba1
            a2out[0] = ba2
            wxout[0] = bwx
            wyout[0] = bwy
            return 0
        R = R * 2.0
    fout[0] = -1.0
    return -1


def f11(b00, b01, b10, b11, delta, one_sided, rmax):
    """Least first-coordinate norm of a lattice point in a planar cone."""
    cdef double f = -1.0, wx = 0.0, wy = 0.0
    cdef i64 a1 = 0, a2 = 0
    _f11_core(b00, b01, b10, b11, delta, bool(one_sided), rmax,
              &f, &a1, &a2, &wx, &wy)
    return f, a1, a2, wx, wy


# ---------------------------------------------------------------------------
# unimodular-lattice sampling and statistics over it
# ---------------------------------------------------------------------------

cdef i64 _draw_lattice(Draws *dr, double *x_out, double *y_out, double *th_out,
                       double *basis) noexcept nogil:
    cdef i64 proposals = 0
    cdef double x, u, y, theta, c, s, sy
    while True:
        proposals += 1
        x = _draws_uniform(dr) - 0.5
        u = 1.0 - _draws_uniform(dr)
        y = Y_FLOOR / u
        if x * x + y * y >= 1.0:
            break
    theta = TWO_PI * _draws_uniform(dr)
    c = cos(theta)
    s = sin(theta)
    # rotation(theta) times [[1/sqrt(y), x/sqrt(y)], [0, sqrt(y)]]; same
    # expression order as the python kernel for bit-identical floats.
    sy = sqrt(y)
    basis[0] = c / sy
    basis[1] = (c * x) / sy - s * sy
    basis[2] = s / sy
    basis[3] = (s * x) / sy + c * sy
    x_out[0] = x
    y_out[0] = y
    th_out[0] = theta
    return proposals


def haar_batch(seed, start, count, delta, one_sided, rmax):
    """Cone minima over independently sampled unimodular lattices."""
    cdef u64 cseed = <u64> (seed & MASK64)
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef double cdelta = delta
    cdef double crmax = rmax
    cdef bint side = bool(one_sided)
    xs_arr = np.empty(n, dtype=np.float64)
    ys_arr = np.empty(n, dtype=np.float64)
    ths_arr = np.empty(n, dtype=np.float64)
    fs_arr = np.empty(n, dtype=np.float64)
    cdef double[:] xs = xs_arr
    cdef double[:] ys = ys_arr
    cdef double[:] ths = ths_arr
    cdef double[:] fs = fs_arr
    cdef Draws dr
    cdef double basis[4]
    cdef double x, y, th, f, wx, wy
    cdef i64 j, total = 0, a1, a2
    for j in range(n):
        _draws_init(&dr, cseed, <u64> (cstart + j))
        total += _draw_lattice(&dr, &x, &y, &th, basis)
        xs[j] = x
        ys[j] = y
        ths[j] = th
        f = -1.0
        _f11_core(basis[0], basis[1], basis[2], basis[3], cdelta, side, crmax,
                  &f, &a1, &a2, &wx, &wy)
        fs[j] = f
    return xs_arr, ys_arr, ths_arr, fs_arr, total


def horocycle_batch(delta, ngrid, start, count, one_sided, rmax):
    """Normalized cone minima along a deterministic shear orbit."""
    cdef double sq = sqrt(delta)
    cdef i64 cngrid = <i64> ngrid
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef double crmax = rmax
    cdef bint side = bool(one_sided)
    svals_arr = np.empty(n, dtype=np.float64)
    fs_arr = np.empty(n, dtype=np.float64)
    cdef double[:] svals = svals_arr
    cdef double[:] fs = fs_arr
    cdef i64 j, i, a1, a2
    cdef double x, f, wx, wy
    for j in range(n):
        i = cstart + j
        x = ((<double> i) + 0.5) / (<double> cngrid)
        svals[j] = x
        f = -1.0
        _f11_core(sq, 0.0, -x / sq, 1.0 / sq, 1.0, side, crmax,
                  &f, &a1, &a2, &wx, &wy)
        fs[j] = f
    return svals_arr, fs_arr


def box_count_batch(seed, start, count, x0, x1, y0, y1):
    """Nonzero lattice point counts in a closed axis box, one lattice per sample."""
    cdef u64 cseed = <u64> (seed & MASK64)
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef double cx0 = x0, cx1 = x1, cy0 = y0, cy1 = y1
    counts_arr = np.empty(n, dtype=np.int64)
    cdef i64[:] counts = counts_arr
    cdef Draws dr
    cdef double basis[4]
    cdef double x, y, th, b00, b01, b10, b11, det, i00, i01, i10, i11, W, H, wx, wy
    cdef i64 j, c0, c1, a, b, cnt
    for j in range(n):
        _draws_init(&dr, cseed, <u64> (cstart + j))
        _draw_lattice(&dr, &x, &y, &th, basis)
        b00 = basis[0]
        b01 = basis[1]
        b10 = basis[2]
        b11 = basis[3]
        det = b00 * b11 - b01 * b10
        i00 = b11 / det
        i01 = -b01 / det
        i10 = -b10 / det
        i11 = b00 / det
        W = (cx0 if cx0 >= 0.0 else -cx0)
        if (cx1 if cx1 >= 0.0 else -cx1) > W:
            W = (cx1 if cx1 >= 0.0 else -cx1)
        H = (cy0 if cy0 >= 0.0 else -cy0)
        if (cy1 if cy1 >= 0.0 else -cy1) > H:
            H = (cy1 if cy1 >= 0.0 else -cy1)
        c0 = (<i64> floor((i00 if i00 >= 0.0 else -i00) * W
                          + (i01 if i01 >= 0.0 else -i01) * H)) + 1
        c1 = (<i64> floor((i10 if i10 >= 0.0 else -i10) * W
                          + (i11 if i11 >= 0.0 else -i11) * H)) + 1
        cnt = 0
        for a in range(-c0, c0 + 1):
            for b in range(-c1, c1 + 1):
                if a == 0 and b == 0:
                    continue
                wx = a * b00 + b * b01
                wy = a * b10 + b * b11
                if cx0 <= wx <= cx1 and cy0 <= wy <= cy1:
                    cnt += 1
        counts[j] = cnt
    return counts_arr


def disk_count_batch(seed, start, count, radius, cphi, sphi):
    """Nonzero lattice point counts in a closed disk, after rotating by phi."""
    cdef u64 cseed = <u64> (seed & MASK64)
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef double r = radius, cc = cphi, ss = sphi
    cdef double r2 = r * r
    counts_arr = np.empty(n, dtype=np.int64)
    cdef i64[:] counts = counts_arr
    cdef Draws dr
    cdef double basis[4]
    cdef double x, y, th, b00, b01, b10, b11, det, i00, i01, i10, i11, wx, wy
    cdef i64 j, c0, c1, a, b, cnt
    for j in range(n):
        _draws_init(&dr, cseed, <u64> (cstart + j))
        _draw_lattice(&dr, &x, &y, &th, basis)
        b00 = cc * basis[0] - ss * basis[2]
        b01 = cc * basis[1] - ss * basis[3]
        b10 = ss * basis[0] + cc * basis[2]
        b11 = ss * basis[1] + cc * basis[3]
        det = b00 * b11 - b01 * b10
        i00 = b11 / det
        i01 = -b01 / det
        i10 = -b10 / det
        i11 = b00 / det
        c0 = (<i64> floor(sqrt(i00 * i00 + i01 * i01) * r)) + 1
        c1 = (<i64> floor(sqrt(i10 * i10 + i11 * i11) * r)) + 1
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
    return counts_arr


# ---------------------------------------------------------------------------
# square-tiled surface primitives
# ---------------------------------------------------------------------------

cdef i64 _gcd64(i64 a, i64 b) noexcept nogil:
    cdef i64 t
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


def psi_torus_batch(delta, ngrid, start, count, symmetric):
    """Shortest visible primitive column on the sheared standard torus."""
    _check_delta(delta)
    cdef i64 dm64 = 0
    cdef int de = 0
    if _split_pos_float(delta, &dm64, &de) != 0:
        raise ValueError("delta out of supported range")
    cdef i64 cngrid = <i64> ngrid
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef bint sym = bool(symmetric)
    if cngrid <= 0 or cngrid > (1 << 40):
        raise ValueError("grid size out of range")
    svals_arr = np.empty(n, dtype=np.float64)
    avals_arr = np.empty(n, dtype=np.int64)
    cdef double[:] svals = svals_arr
    cdef i64[:] avals = avals_arr
    cdef i64 sd = 2 * cngrid
    cdef i64 j, i, sn, a, found, b, b0, g
    cdef int128 rhs, center, lo, hi, bb
    for j in range(n):
        i = cstart + j
        sn = 2 * i + 1
        svals[j] = (<double> sn) / (<double> sd)
        if not sym:
            avals[j] = 1
            continue
        a = 0
        found = 0
        while found == 0:
            a += 1
            rhs = (<int128> a) * dm64 * sd
            center = ((<int128> a) * sn) << de
            lo = center - rhs
            hi = center + rhs
            b0 = <i64> (((<int128> a) * sn) / sd)
            b = b0
            while ((<int128> (b * sd)) << de) > lo:
                b -= 1
            b += 1
            while ((<int128> (b * sd)) << de) < hi:
                g = _gcd64(a, b if b >= 0 else -b)
                if g == 1:
                    found = a
                    break
                b += 1
        avals[j] = found
    return svals_arr, avals_arr


cdef i64 _trace_core(i64[:] sh, i64[:] sv, i64[:] svi, i8[:] sing,
                     i64 s, i64 p0, i64 q0, i64 gmax) noexcept nogil:
    cdef i64 g, k, l, ke, le, kmax, qa, nxt, vtx
    cdef bint up
    if p0 == 0:
        for g in range(1, gmax + 1):
            s = sv[s]
            if sing[s]:
                return g
        return 0
    if q0 == 0:
        for g in range(1, gmax + 1):
            s = sh[s]
            if sing[s]:
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
            if up:
                nxt = sv[sh[s]]
                vtx = nxt
            else:
                nxt = svi[sh[s]]
                vtx = sh[s]
            if sing[vtx]:
                return k // p0
            s = nxt
            k += 1
            l += 1
    return 0


def trace_first_hit(sh, sv, svi, singular, start, p0, q0, gmax):
    """First singular vertex along a ray on a square-tiled surface."""
    cdef i64[:] csh = sh
    cdef i64[:] csv = sv
    cdef i64[:] csvi = svi
    cdef i8[:] csing = singular
    cdef i64 s = <i64> start
    cdef i64 cp0 = <i64> p0
    cdef i64 cq0 = <i64> q0
    cdef i64 cgmax = <i64> gmax
    cdef i64 qa
    if cgmax < 0:
        raise ValueError("gmax must be nonnegative")
    if cp0 != 0 and cq0 != 0:
        qa = cq0 if cq0 > 0 else -cq0
        if cgmax > (1 << 20) or cp0 > (1 << 20) or qa > (1 << 20):
            raise ValueError("trace bounds too large")
    return _trace_core(csh, csv, csvi, csing, s, cp0, cq0, cgmax)


def psi_origami_batch(sh, sv, svi, singular, alpha, delta, ngrid, start, count, acap):
    """Shortest sheared-cone holonomy column over a stratified shear grid."""
    _check_delta(delta)
    cdef i64 dm64 = 0
    cdef int de = 0
    if _split_pos_float(delta, &dm64, &de) != 0:
        raise ValueError("delta out of supported range")
    if de > 70:
        raise ValueError("delta too small for the compiled scan")
    cdef i64[:] csh = sh
    cdef i64[:] csv = sv
    cdef i64[:] csvi = svi
    cdef i8[:] csing = singular
    cdef i64 calpha = <i64> alpha
    cdef i64 cngrid = <i64> ngrid
    cdef i64 cstart = <i64> start
    cdef i64 n = <i64> count
    cdef i64 cacap = <i64> acap
    cdef i64 d = csh.shape[0]
    if calpha < 1 or calpha > 1024:
        raise ValueError("alpha out of range")
    if cngrid < 1 or cngrid > (1 << 20):
        raise ValueError("grid size out of range")
    if cstart < 0 or cstart + n > (1 << 34):
        raise ValueError("sample range out of range")
    if cacap < 1 or cacap > (1 << 20):
        raise ValueError("acap out of range")
    svals_arr = np.empty(n, dtype=np.float64)
    avals_arr = np.empty(n, dtype=np.int64)
    cdef double[:] svals = svals_arr
    cdef i64[:] avals = avals_arr
    starts_up_arr = np.array([t for t in range(d) if singular[t]], dtype=np.int64)
    starts_dn_arr = np.array([svi[t] for t in range(d) if singular[t]], dtype=np.int64)
    cdef i64[:] starts_up = starts_up_arr
    cdef i64[:] starts_dn = starts_dn_arr
    cdef i64 nstarts = starts_up_arr.shape[0]
    if nstarts == 0:
        raise ValueError("surface has no singular corner")
    cdef i64 sd = 2 * cngrid
    cdef i64 j, i, sn, a, found, b, g, p, q, t, st
    cdef int128 rhs, center, lo, hi
    cdef bint hit
    for j in range(n):
        i = cstart + j
        sn = calpha * (2 * i + 1)
        svals[j] = (<double> sn) / (<double> sd)
        a = 0
        found = 0
        while found == 0 and a < cacap:
            a += 1
            rhs = (<int128> a) * dm64 * sd
            center = ((<int128> a) * sn) << de
            lo = center - rhs
            hi = center + rhs
            b = (a * sn) / sd
            while ((<int128> (b * sd)) << de) > lo:
                b -= 1
            b += 1
            while ((<int128> (b * sd)) << de) < hi:
                g = _gcd64(a, b if b >= 0 else -b)
                p = a / g
                q = b / g
                hit = 0
                if q >= 0:
                    for t in range(nstarts):
                        st = starts_up[t]
                        if _trace_core(csh, csv, csvi, csing, st, p, q, g) == g:
                            hit = 1
                            break
                else:
                    for t in range(nstarts):
                        st = starts_dn[t]
                        if _trace_core(csh, csv, csvi, csing, st, p, q, g) == g:
                            hit = 1
                            break
                if hit:
                    found = a
                    break
                b += 1
        avals[j] = found
    return svals_arr, avals_arr
