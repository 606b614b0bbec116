import random
from fractions import Fraction

import pytest

from treecochain.cochain import (
    DepthError,
    apply_t,
    apply_u,
    apply_w_pointwise,
    forward_star,
    star_equal,
)
from treecochain.cyclo import CycloRing
from treecochain.eisenstein import (
    EisCombo,
    EpsVector,
    annihilator_cascade,
    build_e_eps,
    eisenstein_order,
    etilde_closed,
    etilde_fourier,
    uniqueness_pipeline,
    validate_squarefree_level,
)
from treecochain.fq import Poly, monic_polys, poly_from_str
from treecochain.tree import bar, make_edge


def rand_edge(rng, F, kmin, kmax, positive=None):
    k = rng.randint(kmin, kmax)
    tail = {i: rng.randrange(F.q) for i in range(-2, k)}
    pos = rng.random() < 0.5 if positive is None else positive
    return make_edge(F, k, tail, pos)


def test_etilde_closed_examples(F3, F2):
    e0 = make_edge(F3, 0, {}, True)
    assert etilde_closed(e0) == 3
    assert etilde_closed(bar(e0)) == 1
    # class of reversed e_2 at q = 2: 1 + q - q^3 = -5
    e2 = make_edge(F2, -2, {}, True)
    assert etilde_closed(bar(e2)) == 1 + 2 - 8
    rng = random.Random(41)
    for _ in range(100):
        e = rand_edge(rng, F3, -4, 5)
        assert etilde_closed(e) + etilde_closed(bar(e)) == 4


def test_etilde_fourier_values(F3):
    data = etilde_fourier(F3, 4)
    one = Poly.one(F3)
    T = Poly.x(F3)
    assert data.c0.to_fraction() == 3
    assert data.pairing.to_fraction() == 4
    assert data.star_value(one).to_fraction() == Fraction(-8, 3)
    assert data.star_value(T).to_fraction() == Fraction(-32, 9)
    assert data.eval(make_edge(F3, 2, {}, True)).to_fraction() == -5


@pytest.mark.parametrize("qname", ["F2", "F3", "F4", "F5"])
def test_dual_evaluation(qname, request):
    F = request.getfixturevalue(qname)
    data = etilde_fourier(F, 6)
    rng = random.Random(42)
    count = 0
    while count < 120:
        e = rand_edge(rng, F, -6, 8)
        try:
            got = data.eval(e)
        except DepthError:
            continue
        assert got.to_fraction() == etilde_closed(e), e
        count += 1


def test_build_e_eps_constants(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    combo, data = build_e_eps(F3, primes, EpsVector((-1, -1)), 4)
    assert data.c0.to_fraction() == 12
    assert data.star_value(one).to_fraction() == Fraction(-8, 3)
    assert data.pairing.is_zero()
    _, ones_data = build_e_eps(F3, primes, EpsVector.ones(2), 4)
    assert ones_data.pairing.to_fraction() == 4
    assert ones_data.c0.to_fraction() == 12
    # s = 0 gives the level-one generator back
    combo0, data0 = build_e_eps(F3, [], EpsVector(()), 4)
    assert star_equal(data0, etilde_fourier(F3, 4))


def test_build_e_eps_validation(F3):
    T = Poly.x(F3)
    with pytest.raises(ValueError):
        build_e_eps(F3, [T, T], EpsVector((1, 1)), 3)  # repeated prime
    with pytest.raises(ValueError):
        build_e_eps(F3, [T * T], EpsVector((1,)), 3)  # reducible factor
    with pytest.raises(ValueError):
        build_e_eps(F3, [T], EpsVector((1, 1)), 3)  # wrong sign count
    with pytest.raises(ValueError):
        validate_squarefree_level(F3, [Poly.const(F3, 2) * T])  # non-monic


def test_combo_w_toggle(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    combo = EisCombo.make(F3, primes, {one: Fraction(2), T: Fraction(5)})
    toggled = combo.apply_w(T)
    assert toggled.coeff(one) == 5 and toggled.coeff(T) == 2
    assert combo.apply_w(one) == combo
    n = T * (T + one)
    # W_n sends the coefficient at d to n/d
    wn = combo.apply_w(n)
    assert wn.coeff(n) == 2 and wn.coeff(T + one) == 5


def test_w_eigen_symbolic_and_pointwise(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    n = T * (T + one)
    rng = random.Random(43)
    for eps in EpsVector.all_vectors(2):
        combo, data = build_e_eps(F3, primes, eps, 7)
        for i, p in enumerate(primes):
            assert combo.apply_w(p) == combo.scale(eps.signs[i])
            for variant in (0, 1):
                wev = apply_w_pointwise(data.eval, n, p, variant)
                count = 0
                while count < 8:
                    e = rand_edge(rng, F3, -2, 2, positive=True)
                    try:
                        lhs = wev(e)
                    except DepthError:
                        continue
                    assert lhs == data.eval(e) * eps.signs[i]
                    count += 1


def test_hecke_eigen_e_eps(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    p2 = poly_from_str(F3, "T^2+1")
    for eps in (EpsVector((-1, -1)), EpsVector((1, -1))):
        _, data = build_e_eps(F3, primes, eps, 5)
        lam = p2.norm() + 1
        lhs = apply_t(data, p2)
        assert lhs.c0 == data.c0 * lam
        for d in range(lhs.depth + 1):
            for m in monic_polys(F3, d):
                assert lhs.star.value(m) == data.star.value(m) * lam


def test_integrality(F3):
    T = Poly.x(F3)
    primes = [T, T + Poly.one(F3)]
    rng = random.Random(44)
    for eps in EpsVector.all_vectors(2):
        _, data = build_e_eps(F3, primes, eps, 7)
        count = 0
        while count < 50:
            e = rand_edge(rng, F3, -4, 5)
            try:
                v = data.eval(e)
            except DepthError:
                continue
            assert v.is_integer(), (eps, e, v)
            count += 1


def test_u_fixed_vector_even_degree(F3):
    # level T * (T^2+1): the parity vector flipped at the last (even-degree)
    # prime is fixed by U there, and the trace kills it
    T = Poly.x(F3)
    p2 = poly_from_str(F3, "T^2+1")
    primes = [T, p2]
    ehs = EpsVector.parity_flipped_at(primes, 1)
    combo, _ = build_e_eps(F3, primes, ehs, 4)
    assert combo.apply_u(p2) == combo
    assert combo.add(combo.apply_w(p2).apply_u(p2)).is_zero()


def test_u_torsion_odd_degree(F5):
    T5 = Poly.x(F5)
    p3 = poly_from_str(F5, "T^3+T+1")
    combo, _ = build_e_eps(F5, [p3], EpsVector.parity_flipped_at([p3], 0), 4)
    x = combo.apply_u(p3).add(combo)
    target = EisCombo.make(F5, [], {Poly.one(F5): Fraction(1)}).embed_level([p3])
    scalar = Fraction(2 * (5**3 + 1), 6)
    assert x == target.scale(scalar)
    assert scalar.denominator == 1 and scalar.numerator % 3 == 0
    # in the mod ring, any 3-torsion scalar annihilates E|U + E
    xd = x.to_fourier(3, CycloRing(5, 9))
    assert (xd.c0 * 3).is_zero()
    for d in range(3):
        for m in monic_polys(F5, d):
            assert (xd.star.value(m) * 3).is_zero()


def test_trace_multiplier_and_linearity(F3):
    T = Poly.x(F3)
    p2 = poly_from_str(F3, "T^2+1")
    primes = [T, p2]
    base, _ = build_e_eps(F3, [T], EpsVector((1,)), 4)
    emb = base.embed_level(primes)
    assert emb.trace_down(p2) == base.scale(3**2 + 1)
    other, _ = build_e_eps(F3, [T], EpsVector((-1,)), 4)
    lhs = emb.add(other.embed_level(primes)).trace_down(p2)
    rhs = emb.trace_down(p2).add(other.embed_level(primes).trace_down(p2))
    assert lhs == rhs


def test_combo_u_distributes(F3):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    a, _ = build_e_eps(F3, primes, EpsVector((1, -1)), 3)
    b, _ = build_e_eps(F3, primes, EpsVector((-1, 1)), 3)
    assert a.add(b).apply_u(T) == a.apply_u(T).add(b.apply_u(T))


def test_combo_fourier_u_consistency(F3):
    """Symbolic U on the span agrees with the Fourier-side operator."""
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    combo, data = build_e_eps(F3, primes, EpsVector((1, -1)), 5)
    sym = combo.apply_u(T).to_fourier(4)
    fou = apply_u(data, T)
    assert star_equal(sym, fou, depth=4)


def test_eisenstein_order_formula(F3, F2):
    T = Poly.x(F3)
    one = Poly.one(F3)
    primes = [T, T + one]
    rep = eisenstein_order(F3, primes, EpsVector((-1, -1)), 5, 2)
    assert rep["order"] == 1 and rep["matches_formula"]
    # a nontrivial order: q = 2, level T (T^2+T+1), parity vector
    T2 = Poly.x(F2)
    pr = [T2, poly_from_str(F2, "T^2+T+1")]
    eh = EpsVector.parity(pr)
    rep = eisenstein_order(F2, pr, eh, 5, 1)
    assert rep["N_over_nu"] == -5 and rep["order"] == 5 and rep["matches_formula"]
    cert = rep["certificate"]
    assert cert["cuspidal_kills_c0"] and cert["smaller_scalar_fails"]
    assert cert["harmonic_mod"] and cert["pairing_exact_zero"]
    # the all-ones vector gives the trivial group
    rep1 = eisenstein_order(F2, pr, EpsVector.ones(2), 5, 2)
    assert rep1["order"] == 1 and rep1["matches_formula"]


def test_eisenstein_order_hypotheses(F3):
    T = Poly.x(F3)
    primes = [T, T + Poly.one(F3)]
    # l = 2 divides q - 1 = 2: outside the hypotheses for every q
    with pytest.raises(ValueError, match="outside theorem hypotheses"):
        eisenstein_order(F3, primes, EpsVector((-1, -1)), 2, 2)
    with pytest.raises(ValueError, match="outside theorem hypotheses"):
        eisenstein_order(F3, primes, EpsVector((1, -1)), 3, 1)  # l = p
    with pytest.raises(ValueError):
        eisenstein_order(F3, primes, EpsVector((1, -1)), 4, 1)  # not prime


def test_eta_independence(F3, F5, F9):
    """Integer-valued transforms agree under a second additive character,
    including over an extension field where the trace twists the exponent."""
    for F in (F3, F5, F9):
        ring = CycloRing(F.p)
        closed = lambda e: ring.from_int(etilde_closed(e))
        for d in range(0, 2):
            for m in monic_polys(F, d):
                v1 = forward_star(closed, F, ring, m, char_mult=1)
                v2 = forward_star(closed, F, ring, m, char_mult=2)
                assert v1 == v2


def test_e_eps_negative_edge_paths_agree(F3):
    """Positivization and pairing-subtraction agree on eigencochains too."""
    T = Poly.x(F3)
    primes = [T, T + Poly.one(F3)]
    rng = random.Random(47)
    for eps in (EpsVector((-1, -1)), EpsVector((1, -1))):
        _, data = build_e_eps(F3, primes, eps, 8)
        count = 0
        while count < 25:
            e = rand_edge(rng, F3, -4, 4, positive=False)
            try:
                data.eval(e, verify=True)
            except DepthError:
                continue
            count += 1


def test_pairing_from_scratch_at_base_edge(F3):
    """The stored pairing equals eval(e_0) + eval(reversed e_0) recomputed
    through the congruence-group positivization."""
    T = Poly.x(F3)
    primes = [T, T + Poly.one(F3)]
    e0 = make_edge(F3, 0, {}, True)
    for eps in EpsVector.all_vectors(2):
        _, data = build_e_eps(F3, primes, eps, 7)
        assert data.eval(e0) + data.eval(bar(e0)) == data.pairing
    data1 = etilde_fourier(F3, 7)
    assert data1.eval(e0) + data1.eval(bar(e0)) == data1.pairing


def test_uniqueness_pipeline(F3):
    T = Poly.x(F3)
    p2 = poly_from_str(F3, "T^2+1")
    primes = [T, p2]
    for eps in EpsVector.all_vectors(2):
        for scalar in (1, 7, Fraction(5, 3)):
            checks = uniqueness_pipeline(F3, primes, eps, 4, scalar)
            assert checks and all(ok for _, ok in checks), (eps, scalar, checks)
    # level one base case
    assert all(ok for _, ok in uniqueness_pipeline(F3, [], EpsVector(()), 3))


def test_annihilator_cascade_mod_config(F5):
    # q = 5, l = 3 | q + 1, level a cubic prime (3 | deg): the full cascade
    p3 = poly_from_str(F5, "T^3+T+1")
    eH = EpsVector.parity([p3])
    _, data = build_e_eps(F5, [p3], eH, 5)
    mod = data.reduce_mod(3, 1)
    checks = annihilator_cascade(mod, [p3], eH.signs[-1], 4)
    assert all(ok for _, ok in checks), checks


def test_annihilator_cascade_integer_level_raised(F3):
    # over Z: hypotheses hold for g|B_p inputs (support checks only)
    T = Poly.x(F3)
    p2 = poly_from_str(F3, "T^2+1")
    g, _ = build_e_eps(F3, [T], EpsVector.parity([T]), 5)
    f = EisCombo.make(F3, [T, p2], {d * p2: c for d, c in g.coeffs}, g.nu)
    checks = annihilator_cascade(f.to_fourier(5), [T, p2], 1, 3)
    assert checks[0][1] and checks[1][1]  # hypothesis + support
