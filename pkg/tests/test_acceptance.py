"""Acceptance criteria, one test per criterion, one pass/fail line each.

Every comparison is exact (integer / rational / cyclotomic equality); the
stated runtime budgets are asserted where the criterion pins one.
"""

import random
import time
from fractions import Fraction
from itertools import combinations

from treecochain.cochain import (
    DepthError,
    apply_b,
    apply_k,
    apply_t,
    apply_w_pointwise,
    forward_const,
    forward_star,
    level_lower,
    star_equal,
)
from treecochain.cyclo import CycloRing
from treecochain.cusps import cusp_group, exponent_check
from treecochain.eisenstein import (
    EisCombo,
    EpsVector,
    build_e_eps,
    eisenstein_order,
    etilde_closed,
    etilde_fourier,
)
from treecochain.fq import (
    Fq,
    Poly,
    gcd_poly,
    monic_irreducibles,
    monic_polys,
    poly_from_str,
    sigma,
)
from treecochain.sampling import sample_edge
from treecochain.tree import bar, incoming_neighbors, make_edge, reduce_to_positive


def report(criterion: str, ok: bool, details: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {details}")
    assert ok, f"{criterion}: {details}"


FIELDS = {2: lambda: Fq(2), 3: lambda: Fq(3), 4: lambda: Fq(2, 2, (1, 1, 1)),
          5: lambda: Fq(5)}


def test_c01_dual_evaluation_oracle():
    """Closed form equals the Fourier expansion at >= 500 seeded edges per q."""
    depth = 8
    want = 500
    lines = []
    for q in (2, 3, 4, 5):
        F = FIELDS[q]()
        data = etilde_fourier(F, depth)
        rng = random.Random(1000 + q)
        t0 = time.perf_counter()
        checked = 0
        mismatches = 0
        while checked < want:
            e = sample_edge(rng, F, depth)
            try:
                got = data.eval(e)
            except DepthError:
                continue  # positivized level beyond depth + 2
            if got.to_fraction() != etilde_closed(e):
                mismatches += 1
            checked += 1
        dt = time.perf_counter() - t0
        assert dt < 60, f"q={q} took {dt:.1f}s"
        lines.append(f"q={q}: {checked} edges, {mismatches} mismatches, {dt:.1f}s")
        assert mismatches == 0
    report("C1 dual-evaluation", True, "; ".join(lines))


def test_c02_pseudo_harmonic_flow():
    """Sum over incoming neighbors equals the edge value for the full family."""
    F = Fq(3)
    T = Poly.x(F)
    one = Poly.one(F)
    p2 = poly_from_str(F, "T^2+1")
    levels = [[T], [T, T + one], [T, T + one, p2]]
    depth = 6
    want = 200
    t0 = time.perf_counter()
    lines = []
    for primes in levels:
        family = [etilde_fourier(F, depth)]
        for eps in EpsVector.all_vectors(len(primes)):
            family.append(build_e_eps(F, primes, eps, depth)[1])
        rng = random.Random(2000 + len(primes))
        checked = 0
        bad = 0
        while checked < want:
            e = sample_edge(rng, F, depth - 1)
            nbrs = incoming_neighbors(e)
            try:
                for data in family:
                    vals = [data.eval(nb) for nb in nbrs]
                    total = vals[0]
                    for v in vals[1:]:
                        total = total + v
                    if total != data.eval(e):
                        bad += 1
            except DepthError:
                continue
            checked += 1
        lines.append(f"s={len(primes)}: {checked} edges x {len(family)} cochains, {bad} failures")
        assert bad == 0
    dt = time.perf_counter() - t0
    assert dt < 120, f"flow took {dt:.1f}s"
    report("C2 pseudo-harmonic-flow", True, "; ".join(lines) + f"; {dt:.1f}s")


def test_c03_fourier_roundtrip():
    """Forward transforms recover the closed-form coefficients exactly."""
    cases = [(2, 4), (3, 4), (4, 4), (5, 3)]
    lines = []
    for q, max_deg in cases:
        F = FIELDS[q]()
        ring = CycloRing(F.p)
        closed = lambda e: ring.from_int(etilde_closed(e))
        st1 = forward_star(closed, F, ring, Poly.one(F))
        assert st1.to_fraction() == Fraction(1 - q * q, q)
        c0 = forward_const(closed, F, ring, 0)
        assert c0.to_fraction() == q
        count = 0
        for d in range(0, max_deg + 1):
            for m in monic_polys(F, d):
                got = forward_star(closed, F, ring, m)
                want = Fraction((1 - q * q) * sigma(m), q ** (1 + d))
                assert got.to_fraction() == want, (q, m)
                count += 1
        lines.append(f"q={q}: {count} coefficients to degree {max_deg}")
    report("C3 fourier-roundtrip", True, "; ".join(lines))


def test_c04_hecke_eigenvalue():
    """T_p eigenvalue |p| + 1 coefficientwise for all p off the level, deg <= 3."""
    F = Fq(3)
    T = Poly.x(F)
    one = Poly.one(F)
    primes = [T, T + one]
    n = T * (T + one)
    depth = 5
    family = [("etilde", etilde_fourier(F, depth))]
    for eps in EpsVector.all_vectors(2):
        family.append((f"E^{eps}", build_e_eps(F, primes, eps, depth)[1]))
    hecke = [p for p in monic_irreducibles(F, 3) if gcd_poly(p, n).is_one()]
    assert len(hecke) >= 10
    checked = 0
    for label, data in family:
        usable = hecke if label != "etilde" else monic_irreducibles(F, 3)
        for p in usable:
            if p.deg > depth:
                continue
            lam = p.norm() + 1
            lhs = apply_t(data, p)
            assert lhs.c0 == data.c0 * lam, (label, p)
            assert lhs.pairing == data.pairing * lam
            for d in range(lhs.depth + 1):
                for m in monic_polys(F, d):
                    assert lhs.star.value(m) == data.star.value(m) * lam, (label, p, m)
            checked += 1
    report("C4 hecke-eigenvalue", True,
           f"{checked} (cochain, prime) pairs, primes to degree 3, exact")


def test_c05_atkin_lehner():
    """W eigenvalues via the symbolic toggle and two explicit matrices."""
    F = Fq(3)
    T = Poly.x(F)
    one = Poly.one(F)
    p2 = poly_from_str(F, "T^2+1")
    levels = [[T], [T, T + one], [T, T + one, p2]]
    total = 0
    for primes in levels:
        n = Poly.one(F)
        for p in primes:
            n = n * p
        depth = 6 if len(primes) < 3 else 7
        rng = random.Random(500 + len(primes))
        for eps in EpsVector.all_vectors(len(primes)):
            combo, data = build_e_eps(F, primes, eps, depth)
            for i, p in enumerate(primes):
                assert combo.apply_w(p) == combo.scale(eps.signs[i]), (eps, p)
                evs = [apply_w_pointwise(data.eval, n, p, v) for v in (0, 1)]
                checked = 0
                attempts = 0
                while checked < 10 and attempts < 400:
                    attempts += 1
                    e = sample_edge(rng, F, 2, orient="pos")
                    try:
                        want = data.eval(e) * eps.signs[i]
                        got0, got1 = evs[0](e), evs[1](e)
                    except DepthError:
                        continue
                    assert got0 == want and got1 == want, (eps, p, e)
                    checked += 1
                assert checked == 10
                total += 1
    report("C5 atkin-lehner", True,
           f"{total} (eps, prime) pairs over s = 1..3, toggle + 2 matrices, exact")


def test_c06_pairing_constants():
    """f(e) + f(bar e) equals the predicted constant; harmonic iff eps != ones."""
    F = Fq(3)
    T = Poly.x(F)
    one = Poly.one(F)
    primes = [T, T + one]
    depth = 7
    q = 3
    family = [(None, etilde_fourier(F, depth), Fraction(q + 1))]
    for eps in EpsVector.all_vectors(2):
        _, data = build_e_eps(F, primes, eps, depth)
        family.append((eps, data, eps.pairing_fr(primes, q)))
    want_edges = 200
    for eps, data, constant in family:
        rng = random.Random(600)
        assert data.pairing.to_fraction() == constant
        if eps is not None:
            assert (constant == 0) == (not eps.is_ones())
        checked = 0
        while checked < want_edges:
            e = sample_edge(rng, F, depth)
            try:
                s = data.eval(e) + data.eval(bar(e))
            except DepthError:
                continue
            assert s.to_fraction() == constant, (eps, e)
            checked += 1
    report("C6 pairing-constants", True,
           f"{want_edges} edges per cochain, {len(family)} cochains, exact")


def test_c07_annihilator_and_level_lowering():
    """K_p coefficient rule and the B_p reconstruction with f|W_p = g."""
    F = Fq(3)
    T = Poly.x(F)
    one = Poly.one(F)
    depth = 6
    base = etilde_fourier(F, depth)
    rng = random.Random(700)
    for p in (T, T + one, poly_from_str(F, "T^2+1")):
        ek = apply_k(base, p)
        for d in range(ek.depth + 1):
            for m in monic_polys(F, d):
                if p.divides(m):
                    assert ek.star.value(m).is_zero()
                else:
                    v = ek.star.value(m)
                    assert v == base.star.value(m) and not v.is_zero()
        f = apply_b(base, p)
        g = level_lower(f, p)
        assert star_equal(g, base, depth=depth - p.deg)
        assert star_equal(apply_b(g, p), f, depth=depth)
        wev = apply_w_pointwise(f.eval, f.level, p)
        checked = 0
        while checked < 25:
            e = sample_edge(rng, F, 2, orient="pos")
            try:
                assert wev(e) == g.eval(e), (p, e)
            except DepthError:
                continue
            checked += 1
    report("C7 annihilator-level-lowering", True,
           "K rule (iff), reconstruction, W image: 3 primes, exact")


def test_c08_trace_and_u_identities():
    """The flipped-parity eigencochain under U and the trace, both regimes."""
    # even last degree: fixed vector, trace kills it
    F3 = Fq(3)
    T = Poly.x(F3)
    p2 = poly_from_str(F3, "T^2+1")
    primes = [T, p2]
    ehs = EpsVector.parity_flipped_at(primes, 1)
    combo, _ = build_e_eps(F3, primes, ehs, 5)
    assert combo.apply_u(p2) == combo
    assert combo.add(combo.apply_w(p2).apply_u(p2)).is_zero()
    # lower-level inputs gain the (|p|+1) multiplier
    lowc, _ = build_e_eps(F3, [T], EpsVector.parity([T]), 5)
    assert lowc.embed_level(primes).trace_down(p2) == lowc.scale(10)
    # odd degree divisible by l | q+1: the torsion variant
    F5 = Fq(5)
    p3 = poly_from_str(F5, "T^3+T+1")
    combo5, _ = build_e_eps(F5, [p3], EpsVector.parity_flipped_at([p3], 0), 5)
    x = combo5.apply_u(p3).add(combo5)
    target = EisCombo.make(F5, [], {Poly.one(F5): Fraction(1)}).embed_level([p3])
    scalar = Fraction(2 * (5**3 + 1), 6)
    assert x == target.scale(scalar)
    assert scalar == 42 and 42 % 3 == 0
    ring9 = CycloRing(5, 9)
    xd = x.to_fourier(3, ring9)
    a = 3  # a generator of R[3] in Z/9
    assert (xd.c0 * a).is_zero() and (xd.pairing * a).is_zero()
    for d in range(3):
        for m in monic_polys(F5, d):
            assert (xd.star.value(m) * a).is_zero()
    report("C8 trace-u-identities", True,
           "(q=3, deg p_s = 2) fixed vector + trace kill; (q=5, l=3) scalar 42, "
           "mod-9 annihilation")


def _sweep_levels(F, max_s=3, max_deg=2):
    pool = monic_irreducibles(F, max_deg)
    for s in range(1, max_s + 1):
        for combo in combinations(pool, s):
            yield list(combo)


def _ell_r_list(q, cap=81):
    out = []
    for ell in range(2, cap + 1):
        if any(ell % d == 0 for d in range(2, int(ell**0.5) + 1)):
            continue
        if (q * (q - 1)) % ell == 0:
            continue
        r = 1
        while ell**r <= cap:
            out.append((ell, r))
            r += 1
    return out


def test_c09_theorem_order_suite():
    """gcd(l^r, |N/nu|) with certificates over the full small sweep."""
    t0 = time.perf_counter()
    total = 0
    nontrivial = 0
    for q in (2, 3, 4):
        F = FIELDS[q]()
        ellrs = _ell_r_list(q)
        for primes in _sweep_levels(F):
            for eps in EpsVector.all_vectors(len(primes)):
                n_c = eps.n_const(primes, q)
                nu = eps.nu(primes, q)
                for ell, r in ellrs:
                    rep = eisenstein_order(F, primes, eps, ell, r)
                    assert rep["matches_formula"], rep
                    cert = rep["certificate"]
                    assert cert["cuspidal_kills_c0"]
                    assert cert["smaller_scalar_fails"]
                    if not eps.is_ones():
                        assert cert["harmonic_mod"] and cert["pairing_exact_zero"]
                        if rep["order"] > 1:
                            nontrivial += 1
                    total += 1
    dt = time.perf_counter() - t0
    assert dt < 300, f"order sweep took {dt:.1f}s"
    report("C9 theorem-orders", True,
           f"{total} (q, n, eps, l, r) checks, {nontrivial} nontrivial orders, {dt:.1f}s")


def test_c10_cusp_divisor_sandwich():
    """Order sandwich, signed principal expansion, W eigenvectors: same sweep."""
    t0 = time.perf_counter()
    levels = 0
    rows = 0
    for q in (2, 3, 4):
        F = FIELDS[q]()
        for primes in _sweep_levels(F):
            rep = cusp_group(F, primes)
            assert rep["finite"]
            for row in rep["rows"]:
                assert row["w_eigen"], row
                if row["excluded"]:
                    assert row["deg_nonzero"]
                    continue
                assert row["principal_matches"], row
                assert row["sandwich_ok"], row
                rows += 1
            levels += 1
    dt = time.perf_counter() - t0
    report("C10 cusp-divisor-sandwich", True,
           f"{levels} levels, {rows} eigenvector rows, {dt:.1f}s")


def test_c11_exponent_bound():
    """Every elementary divisor divides rho(n); trivial p-part; pullbacks."""
    t0 = time.perf_counter()
    levels = 0
    for q in (2, 3, 4):
        F = FIELDS[q]()
        for primes in _sweep_levels(F):
            rep = exponent_check(F, primes)
            assert rep["divides_rho"], (q, primes, rep)
            assert rep["p_part_trivial"]
            assert rep["pullbacks_in_lattice"]
            levels += 1
    dt = time.perf_counter() - t0
    report("C11 exponent-bound", True, f"{levels} levels, {dt:.1f}s")


def test_c12_constructive_positivization():
    """Certified level-n elements positivize >= 200 seeded negative edges."""
    configs = [
        (Fq(3), "T,T+1"),
        (Fq(2), "T,T^2+T+1"),
        (Fq(5), "T"),
    ]
    lines = []
    for F, lvl in configs:
        primes = [poly_from_str(F, s) for s in lvl.split(",")]
        n = Poly.one(F)
        for p in primes:
            n = n * p
        rng = random.Random(1200 + F.q)
        for i in range(200):
            k = rng.randint(-6, 6)
            tail = {j: rng.randrange(F.q) for j in range(-2, k)}
            e = make_edge(F, k, tail, False)
            gamma, epos = reduce_to_positive(e, n)
            assert gamma.is_gamma0(n), (F.q, lvl, e)
            assert epos.positive
        lines.append(f"q={F.q} n={lvl}: 200 edges")
    report("C12 positivization", True, "; ".join(lines))
