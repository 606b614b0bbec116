import random

import pytest

from treecochain.fq import Poly
from treecochain.laurent import (
    RatF,
    ratf_from_tail,
    tail_inverse,
    tail_mul_poly,
    tail_polypart,
)


def rand_ratf(rng, F, max_deg=5):
    while True:
        num = Poly(F, [rng.randrange(F.q) for _ in range(rng.randint(0, max_deg + 1))])
        den = Poly(F, [rng.randrange(F.q) for _ in range(rng.randint(1, max_deg + 1))])
        if den.is_zero():
            continue
        return RatF(num, den)


def test_ord_formula(F3):
    rng = random.Random(7)
    for _ in range(100):
        x = rand_ratf(rng, F3)
        if x.is_zero():
            continue
        assert x.ord() == x.den.deg - x.num.deg
    assert RatF.pi_pow(F3, 3).ord() == 3
    assert RatF.pi_pow(F3, -2).ord() == -2


def test_window_reproduces_value(F3, F4):
    # re-summing the cached window plus the exact remainder gives the value back
    for F in (F3, F4):
        rng = random.Random(8)
        for _ in range(100):
            x = rand_ratf(rng, F)
            if x.is_zero():
                continue
            hi = rng.randint(0, 8)
            partial = x.truncated(hi)
            rem = x - partial
            assert rem.is_zero() or rem.ord() >= hi


def test_series_coefficients_match_arithmetic(F3):
    # 1/(T - 1) = pi + pi^2 + pi^3 + ... at infinity (geometric tail)
    T = Poly.x(F3)
    x = RatF(Poly.one(F3), T - Poly.one(F3))
    for i in range(1, 8):
        assert x.coeff(i) == 1
    assert x.coeff(0) == 0


def test_tail_mul_poly_matches_ratf(F3):
    rng = random.Random(9)
    T = Poly.x(F3)
    for _ in range(80):
        tail = {i: rng.randrange(3) for i in range(-3, 4)}
        tail = {i: a for i, a in tail.items() if a}
        f = Poly(F3, [rng.randrange(3) for _ in range(rng.randint(1, 4))])
        if f.is_zero():
            continue
        lhs = ratf_from_tail(F3, tail_mul_poly(F3, tail, f))
        rhs = ratf_from_tail(F3, tail) * RatF.from_poly(f)
        assert lhs == rhs


def test_tail_inverse(F3):
    rng = random.Random(10)
    for _ in range(60):
        tail = {i: rng.randrange(3) for i in range(1, 5)}
        tail = {i: a for i, a in tail.items() if a}
        if not tail:
            continue
        hi = rng.randint(0, 6)
        inv = tail_inverse(F3, tail, hi)
        # u * inv(u) = 1 + O(pi^(hi - ord(u)))-ish: verify through exact RatF
        u = ratf_from_tail(F3, tail)
        v = ratf_from_tail(F3, inv)
        err = u * v - RatF.one(F3)
        m = min(tail)
        if not err.is_zero():
            assert err.ord() >= hi - m


def test_tail_polypart(F3):
    tail = {-2: 1, 0: 2, 3: 1}
    p = tail_polypart(F3, tail)
    assert p.coeffs == (2, 0, 1)  # 2 + T^2
    assert tail_polypart(F3, {1: 2}) == Poly.zero(F3)


def test_zero_denominator_rejected(F3):
    with pytest.raises(ZeroDivisionError):
        RatF(Poly.one(F3), Poly.zero(F3))
