"""Exact minimal-denominator search: frozen cases, oracles, invariances."""

import math
from fractions import Fraction as F

import pytest

from mindenom.errors import CapExceededError
from mindenom.rational import (
    FractionHit,
    OpenInterval,
    q_m,
    q_mn,
    qmin,
    qmin_bruteforce,
    simplest_in_interval,
)
from mindenom.rng import Stream


def test_simplest_in_interval_frozen_cases():
    assert simplest_in_interval((F(1, 4), F(3, 4))) == FractionHit(q=2, p=1)
    assert simplest_in_interval((F(11, 25), F(23, 50))) == FractionHit(q=9, p=4)
    assert simplest_in_interval(OpenInterval(F(5, 2), F(7, 2))) == FractionHit(q=1, p=3)


def test_interval_is_open():
    # 1/2 is an endpoint, not inside
    hit = simplest_in_interval((F(1, 2), F(3, 4)))
    assert hit.fraction != F(1, 2)
    assert F(1, 2) < hit.fraction < F(3, 4)
    with pytest.raises(ValueError):
        OpenInterval(F(1, 2), F(1, 2))


def test_q1_tie_break_uses_interval_midpoint():
    assert simplest_in_interval((F(26, 5), F(89, 10))).p == 7  # midpoint 7.05
    assert simplest_in_interval((F(1, 5), F(14, 5))).p == 1  # midpoint 1.5, tie down
    assert simplest_in_interval((F(-3, 10), F(5, 2))).p == 1  # midpoint 1.1


def test_qmin_frozen_cases():
    assert qmin(F(9, 20), F(1, 100)).q == 9
    assert qmin(F(1, 2), F(1, 3)).q == 2
    assert qmin(F(1, 2), F(2, 3)) == FractionHit(q=1, p=0)  # midpoint tie -> 0
    assert qmin(F(5, 8), F(1, 1000)) == FractionHit(q=8, p=5)


def test_qmin_accepts_floats_at_exact_binary_value():
    assert qmin(0.5, 0.75).q == 1
    assert qmin(0.5, 0.25) == qmin(F(1, 2), F(1, 4))


def test_qmin_outside_unit_interval():
    # shift invariance: q_min(x + k, d) == q_min(x, d)
    for x, d in [(F(9, 20), F(1, 100)), (F(3, 7), F(1, 50))]:
        base = qmin(x, d)
        for k in (-3, 1, 12):
            shifted = qmin(x + k, d)
            assert shifted.q == base.q
            assert shifted.fraction - k == base.fraction


def test_qmin_reflection_invariance():
    for x, d in [(F(9, 20), F(1, 100)), (F(13, 31), F(1, 64)), (F(2, 5), F(3, 1000))]:
        assert qmin(-x, d).q == qmin(x, d).q


def test_qmin_monotone_in_delta():
    x = F(357, 1000)
    deltas = [F(1, 10), F(1, 50), F(1, 200), F(1, 1500), F(1, 10**4)]
    qs = [qmin(x, d).q for d in deltas]
    assert qs == sorted(qs)


def test_qmin_farey_bound():
    # consecutive Farey fractions of order Q are at distance > 1/Q^2, so
    # q_min(x, d) <= ceil(1/d): check the slightly generous floor bound
    stream = Stream(2024, 0)
    for _ in range(200):
        x = F(stream.randint(0, 10**6), 10**6)
        d = F(1, stream.randint(2, 3000))
        q = qmin(x, d).q
        assert 1 <= q <= math.floor(1 / d) + 1


def test_qmin_vs_bruteforce_random():
    stream = Stream(77, 0)
    for _ in range(300):
        den = stream.randint(7, 10**5)
        x = F(stream.randint(0, den), den)
        d = F(1, stream.randint(5, 2000))
        assert qmin(x, d) == qmin_bruteforce(x, d)


def test_witness_is_in_interval_and_reduced_for_q_ge_2():
    stream = Stream(99, 0)
    for _ in range(200):
        x = F(stream.randint(0, 997), 997)
        d = F(1, stream.randint(30, 4000))
        hit = qmin(x, d)
        assert abs(x - hit.fraction) < d
        if hit.q >= 2:
            assert math.gcd(abs(hit.p), hit.q) == 1


def test_q_m_frozen_and_specializes_to_qmin():
    assert q_m((F(1, 2), F(1, 3)), F(1, 100)) == 6
    stream = Stream(31, 0)
    for _ in range(50):
        x = F(stream.randint(0, 4999), 4999)
        d = F(1, stream.randint(5, 500))
        assert q_m((x,), d) == qmin(x, d).q


def test_q_m_dominates_componentwise_qmin():
    stream = Stream(32, 0)
    for _ in range(30):
        xs = tuple(F(stream.randint(0, 991), 991) for _ in range(2))
        d = F(1, stream.randint(5, 200))
        q = q_m(xs, d)
        assert q >= max(qmin(x, d).q for x in xs)
        for x in xs:
            t = q * x
            fr = t - math.floor(t)
            assert min(fr, 1 - fr) < q * d


def test_q_m_cap():
    # exact hits need q divisible by both denominators (8633 > qcap)
    with pytest.raises(CapExceededError):
        q_m((F(1, 97), F(1, 89)), F(1, 10**9), qcap=100)


def test_q_mn_frozen_witness():
    qnorm, witness = q_mn([[F(1, 2), F(1, 3)]], F(1, 5))
    assert qnorm == 1
    assert witness == (1, 1)


def test_q_mn_specializes_to_q_m():
    # column matrix: the shell norm with n = 1 is exactly the q_m search
    stream = Stream(33, 0)
    for _ in range(30):
        xs = tuple(F(stream.randint(0, 499), 499) for _ in range(2))
        d = F(1, stream.randint(5, 60))
        qnorm, witness = q_mn([[x] for x in xs], d)
        assert qnorm == q_m(xs, d)
        assert witness == (qnorm,)


def test_q_mn_witness_is_admissible_and_half_shell():
    stream = Stream(34, 0)
    for _ in range(40):
        X = [[F(stream.randint(0, 499), 499) for _ in range(2)]]
        d = F(1, stream.randint(5, 80))
        qnorm, w = q_mn(X, d)
        assert max(abs(c) for c in w) == qnorm
        lead = next(c for c in w if c != 0)
        assert lead > 0
        for row in X:
            t = sum(c * v for c, v in zip(w, row))
            fr = t - math.floor(t)
            assert min(fr, 1 - fr) < d * qnorm


def test_q_mn_magnitude_then_sign_order():
    # both (1, 1) and (1, -1) are admissible here; rank order prefers (1, 1)
    X = [[F(1, 2), F(1, 3)]]
    _, w = q_mn(X, F(1, 5))
    assert w == (1, 1)
    # and a case where only the negative second coordinate works
    X2 = [[F(1, 2), F(7, 24)]]
    qn2, w2 = q_mn(X2, F(1, 5))
    t = X2[0][0] * w2[0] + X2[0][1] * w2[1]
    fr = t - math.floor(t)
    assert min(fr, 1 - fr) < F(1, 5) * qn2


def test_q_mn_cap():
    # 89a + 97b = 0 mod 8633 has no nonzero solution of sup-norm <= 3
    with pytest.raises(CapExceededError):
        q_mn([[F(1, 97), F(1, 89)]], F(1, 10**9), shell_cap=3)


def test_validation_errors():
    with pytest.raises(ValueError):
        qmin(F(1, 2), 0)
    with pytest.raises(ValueError):
        q_m((), F(1, 10))
    with pytest.raises(ValueError):
        q_mn([[F(1, 2)], [F(1, 3), F(1, 4)]], F(1, 10))
    with pytest.raises(ValueError):
        FractionHit(q=0, p=1)
