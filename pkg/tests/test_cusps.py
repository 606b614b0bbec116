import random

import pytest

from treecochain.cusps import (
    CuspSet,
    RelationLattice,
    cusp_classify,
    cusp_group,
    cusp_matrix_witness,
    cusp_orbit_bfs,
    cusp_w_action,
    d_eps_vector,
    delta_divisor,
    delta_eps_divisor,
    exponent_check,
    normalize_p1,
    pullback_vector,
    rho_exponent,
    validate_cusp_invariant,
    vector_degree,
    w_permute,
)
from treecochain.eisenstein import EpsVector
from treecochain.fq import Poly, gcd_poly, poly_from_str


def test_cusp_set_basics(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    cs = CuspSet(F3, (T, T + one))
    assert cs.size() == 4
    assert [d.deg for d in cs.divisors] == [0, 1, 1, 2]
    with pytest.raises(ValueError):
        CuspSet(F3, (T, T))


def test_w_action_examples(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    n = T * (T + one)
    assert cusp_w_action(T, one, n) == T
    assert cusp_w_action(T, n, n) == T + one
    for m in CuspSet(F3, (T, T + one)).divisors:
        assert cusp_w_action(n, m, n) == n // m
        # involution
        for d in (T, T + one, n):
            assert cusp_w_action(d, cusp_w_action(d, m, n), n) == m
    with pytest.raises(ValueError):
        cusp_w_action(T * T, one, n)


def test_w_action_group_law(F3):
    # composition acts like the product divided by the squared gcd
    T = Poly.x(F3)
    one = Poly.one(F3)
    p2 = poly_from_str(F3, "T^2+1")
    primes = (T, T + one, p2)
    n = T * (T + one) * p2
    cs = CuspSet(F3, primes)
    divs = [d for d in cs.divisors]
    for d1 in divs:
        if not gcd_poly(d1, n // d1).is_one():
            continue
        for d2 in divs:
            if not gcd_poly(d2, n // d2).is_one():
                continue
            g = gcd_poly(d1, d2)
            d3 = (d1 * d2) // (g * g)
            for m in divs:
                lhs = cusp_w_action(d1, cusp_w_action(d2, m, n), n)
                assert lhs == cusp_w_action(d3, m, n)
    # faithfulness: only d = 1 fixes every cusp
    for d1 in divs:
        if not gcd_poly(d1, n // d1).is_one():
            continue
        fixes_all = all(cusp_w_action(d1, m, n) == m for m in divs)
        assert fixes_all == d1.is_one()


def test_classify_examples_and_golden(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    n = T * (T + one)
    assert cusp_classify(one, T, n) == T
    assert cusp_classify(T + Poly.const(F3, 2), T, n) == T
    # golden: the zero column entry lands on [n] (the infinity class)
    assert cusp_classify(one, Poly.zero(F3), n) == n
    with pytest.raises(ValueError):
        cusp_classify(T, T, n)  # not coprime


def test_orbit_bfs_agrees(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    n = T * (T + one)
    assert cusp_orbit_bfs(one, T, n) == T
    assert cusp_orbit_bfs(T + Poly.const(F3, 2), T, n) == T
    assert cusp_orbit_bfs(one, Poly.zero(F3), n) == n


def test_validate_invariant_window(F3, F2):
    T = Poly.x(F3)
    assert validate_cusp_invariant(F3, [T, T + Poly.one(F3)], deg_cap=3) > 100
    T2 = Poly.x(F2)
    assert validate_cusp_invariant(F2, [T2], deg_cap=4) > 50


def test_matrix_witness_random(F3, F2):
    T = Poly.x(F3)
    n = T * (T + Poly.one(F3))
    rng = random.Random(61)
    done = 0
    while done < 60:
        a = Poly(F3, [rng.randrange(3) for _ in range(rng.randint(1, 4))])
        b = Poly(F3, [rng.randrange(3) for _ in range(rng.randint(1, 4))])
        if (a.is_zero() and b.is_zero()) or not gcd_poly(a, b).is_one():
            continue
        if a.is_zero() and b.deg != 0:
            continue
        cusp_matrix_witness(a, b, n)  # self-verifying
        done += 1
    # quadratic level over F2 and level one
    n2 = poly_from_str(F2, "T^2+T+1")
    cusp_matrix_witness(Poly.one(F2), Poly.x(F2), n2)
    cusp_matrix_witness(Poly.one(F2), Poly.zero(F2), Poly.one(F2))


def test_normalize_p1(F3):
    T = Poly.x(F3)
    two = Poly.const(F3, 2)
    a, b = normalize_p1(two * T, two)
    assert a == T and b == Poly.one(F3)
    with pytest.raises(ValueError):
        normalize_p1(Poly.zero(F3), Poly.zero(F3))
    with pytest.raises(ValueError):
        normalize_p1(T, T)


def test_delta_divisor_example(F3):
    T = Poly.x(F3)
    cs = CuspSet(F3, (T, T + Poly.one(F3)))
    assert delta_divisor(cs, T) == (3, 9, 1, 3)
    for d in cs.divisors:
        vec = delta_divisor(cs, d)
        assert all(v > 0 for v in vec)


def test_relation_generators_degree_zero(F3):
    T = Poly.x(F3)
    lat = RelationLattice(CuspSet(F3, (T, T + Poly.one(F3))))
    assert lat.generators
    for g in lat.generators:
        assert vector_degree(g) == 0
    assert lat.quotient_is_finite()


def test_signed_divisor_expansion(F3):
    T = Poly.x(F3)
    cs = CuspSet(F3, (T, T + Poly.one(F3)))
    eps = EpsVector((-1, -1))
    assert d_eps_vector(cs, eps) == (1, -1, -1, 1)
    assert delta_eps_divisor(cs, eps) == (4, -4, -4, 4)
    for eps in EpsVector.all_vectors(2):
        dvec = d_eps_vector(cs, eps)
        assert vector_degree(dvec) == (4 if eps.is_ones() else 0)
        signed = delta_eps_divisor(cs, eps)
        if not eps.is_ones():
            n_c = eps.n_const([T, T + Poly.one(F3)], 3)
            eps_n = eps.of_divisor([T, T + Poly.one(F3)], cs.level)
            assert signed == tuple(eps_n * n_c * x for x in dvec)


def test_w_permutation_eigen(F3):
    T = Poly.x(F3)
    primes = (T, T + Poly.one(F3))
    cs = CuspSet(F3, primes)
    for eps in EpsVector.all_vectors(2):
        dvec = d_eps_vector(cs, eps)
        for i, p in enumerate(primes):
            assert w_permute(cs, p, dvec) == tuple(eps.signs[i] * x for x in dvec)


def test_cusp_group_orders(F3, F2):
    T = Poly.x(F3)
    rep = cusp_group(F3, [T, T + Poly.one(F3)])
    by_eps = {r["eps"]: r for r in rep["rows"]}
    assert by_eps["--"]["order"] == 4  # lower = upper = 4 forces equality
    assert by_eps["--"]["sandwich_ok"] and by_eps["--"]["principal_matches"]
    assert by_eps["++"]["excluded"]
    # prime level: cyclic of order dividing |p| - 1
    for F, prime in ((F3, Poly.x(F3)), (F2, poly_from_str(F2, "T^2+T+1"))):
        repp = cusp_group(F, [prime])
        eds = [d for d in repp["elementary_divisors"] if d not in (0, 1)]
        rho = rho_exponent([prime], F.q)
        assert rho == F.q**prime.deg - 1
        for d in eds:
            assert rho % d == 0


def test_exponent_check(F3, F2):
    T = Poly.x(F3)
    rep = exponent_check(F3, [T, T + Poly.one(F3)])
    assert rep["ok"] and rep["rho"] == 64
    assert exponent_check(F3, [T])["ok"]
    assert exponent_check(F3, [])["ok"]
    T2 = Poly.x(F2)
    pr = [T2, T2 + Poly.one(F2), poly_from_str(F2, "T^2+T+1")]
    rep3 = exponent_check(F2, pr)
    assert rep3["ok"]


def test_pullback_vectors(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = (T, T + one)
    cs_low = CuspSet(F3, (T,))
    cs_high = CuspSet(F3, primes)
    vec = (1, -1)  # [T] - [1] at the lower level
    up = pullback_vector(cs_low, cs_high, T + one, vec)
    # pi^*([m]) = |p| [m] + [m p]
    want = [0] * 4
    want[cs_high.index(one)] = 3
    want[cs_high.index(T + one)] = 1
    want[cs_high.index(T)] = -3
    want[cs_high.index(T * (T + one))] = -1
    assert up == tuple(want)
