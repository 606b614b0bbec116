"""Cusps for square-free levels, the divisor relation lattice, and order bounds.

The cusps of the level-n group (n = p_1 ... p_s square-free) are the 2^s
orbits [m] of the column (1, m) over monic m | n; the involution W_d sends
[m] to [m d / (m, d)^2].  A complete orbit invariant of a normalized
coprime column (a, b) is gcd(b, n): it is constant on orbits (the lower row
of a level-n matrix acts as (a, b) -> (c a + d b) with d invertible mod n)
and separates the 2^s classes; a bounded orbit search is kept as an
independent oracle, and its failure is a hard error, not a fallback.

The relation lattice P_known is spanned by the pairwise differences of the
vectors ord_[m] Delta_d = |n| |(m,d)|^2 / (|m| |d|): exactly the principal
divisors of ratios of the rescaled discriminant.  Quotients Div^0 / P_known
surject onto the actual cuspidal class group, so every order claim is a
divisibility sandwich, never an equality claim.  Entries stay signed; |.|
enters only when forming group orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm

from .eisenstein import EpsVector
from .fq import Fq, Poly, divisors_of_squarefree, gcd_poly, xgcd
from .snf import smith_normal_form


def _prime_factors_int(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _ord_at(ell: int, n: int) -> int:
    if n == 0:
        raise ValueError("ord of 0")
    n = abs(n)
    out = 0
    while n % ell == 0:
        n //= ell
        out += 1
    return out


@dataclass(frozen=True)
class CuspSet:
    """The 2^s cusps [m], m | n, in a fixed (degree, coefficients) order."""

    field: Fq
    primes: tuple[Poly, ...]

    def __post_init__(self):
        seen = set()
        for p in self.primes:
            if not p.is_monic() or p.deg < 1 or p in seen:
                raise ValueError("level must be a product of distinct monic primes")
            seen.add(p)

    @property
    def level(self) -> Poly:
        n = Poly.one(self.field)
        for p in self.primes:
            n = n * p
        return n

    @property
    def divisors(self) -> list[Poly]:
        return divisors_of_squarefree(self.field, list(self.primes))

    def index(self, m: Poly) -> int:
        for i, d in enumerate(self.divisors):
            if d == m:
                return i
        raise ValueError("not a divisor of the level")

    def size(self) -> int:
        return 2 ** len(self.primes)


def cusp_w_action(d: Poly, m: Poly, n: Poly) -> Poly:
    """W_d [m] = [m d / (m, d)^2] for d || n, m | n."""
    if not d.divides(n) or not gcd_poly(d, n // d).is_one():
        raise ValueError("W_d needs d || n")
    if not m.divides(n):
        raise ValueError("[m] needs m | n")
    g = gcd_poly(m, d)
    return (m * d) // (g * g)


def normalize_p1(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Scale a coprime column so a is monic (or a = 0, b = 1)."""
    if a.is_zero() and b.is_zero():
        raise ValueError("(0, 0) is not a projective point")
    if not gcd_poly(a, b).is_one():
        raise ValueError("column entries must be coprime")
    F = a.field
    if a.is_zero():
        return a, Poly.one(F)
    lam = F.inv(a.lead())
    return a.scale(lam), b.scale(lam)


def cusp_classify(a: Poly, b: Poly, n: Poly) -> Poly:
    """The divisor m | n with (a, b) in the orbit of (1, m): m = gcd(b, n)."""
    a, b = normalize_p1(a, b)
    if b.is_zero():
        return n
    return gcd_poly(b, n)


def _orbit_labels(
    field: Fq, n: Poly, deg_cap: int, node_cap: int
) -> dict[tuple[Poly, Poly], Poly]:
    """Bounded multi-source orbit search from the base points (1, m), m | n.

    Generators: upper translations (x, y) -> (x + c y, y), lower level-n
    translations (x, y) -> (x, y + c n x), and unit diagonals
    (x, y) -> (u x, y) (not absorbed by projective normalization).  Labels
    every point reached inside the degree window by the base point it came
    from; finding intersecting orbits is a hard error.
    """
    from .fq import monic_polys

    F = field
    cs = []
    for d in range(0, 2):
        for m in monic_polys(F, d):
            for lead in range(1, F.q):
                cs.append(m.scale(lead))
    units = [Poly.const(F, u) for u in range(2, F.q)]
    labels: dict[tuple[Poly, Poly], Poly] = {}
    frontier: list[tuple[Poly, Poly]] = []
    for m in divisors_of_squarefree(F, list(factor_primes(n))):
        pt = normalize_p1(Poly.one(F), m)
        labels[pt] = m
        frontier.append(pt)
    while frontier and len(labels) < node_cap:
        nxt = []
        for pt in frontier:
            x, y = pt
            lab = labels[pt]
            moves = [(x + c * y, y) for c in cs]
            moves += [(x, y + (c * n) * x) for c in cs]
            moves += [(u * x, y) for u in units]
            for nx, ny in moves:
                if max(nx.deg, ny.deg) > deg_cap:
                    continue
                npt = normalize_p1(nx, ny)
                old = labels.get(npt)
                if old is None:
                    labels[npt] = lab
                    nxt.append(npt)
                elif old != lab:
                    raise AssertionError("orbit search found intersecting orbits")
        frontier = nxt
    return labels


def cusp_orbit_bfs(
    a: Poly, b: Poly, n: Poly, deg_cap: int = 4, node_cap: int = 200_000
) -> Poly:
    """Classify a (small) point by the bounded orbit search alone.

    Oracle independent of the gcd invariant; the window only certifies
    points it reaches, so exhausting the caps without meeting (a, b) is a
    hard error rather than a fallback to the invariant.
    """
    target = normalize_p1(a, b)
    cap = max(deg_cap, a.deg + 1, b.deg + 1, n.deg + 1)
    labels = _orbit_labels(a.field, n, cap, node_cap)
    if target not in labels:
        raise AssertionError("orbit search exhausted its caps without classifying")
    return labels[target]


def validate_cusp_invariant(
    field: Fq, primes: list[Poly], deg_cap: int = 4, node_cap: int = 200_000
) -> int:
    """Once-per-configuration validation of the gcd classifier.

    Runs the bounded orbit search and checks, for every point it labels,
    that gcd(b, n) equals the base point the orbit search assigned.  Returns
    the number of points certified; any mismatch is a hard error.
    """
    n = Poly.one(field)
    for p in primes:
        n = n * p
    labels = _orbit_labels(field, n, deg_cap, node_cap)
    for (a, b), m in labels.items():
        if cusp_classify(a, b, n) != m:
            raise AssertionError(f"gcd invariant disagrees with the orbit at ({a}, {b})")
    return len(labels)


def cusp_matrix_witness(a: Poly, b: Poly, n: Poly) -> "tuple[Poly, Poly, Poly, Poly]":
    """An explicit level-n matrix gamma with gamma (1, m)^t = (a, b)^t,
    m = gcd(b, n): a constructive certificate that (a, b) lies in the orbit
    the gcd invariant names.

    For b != 0: pick d = b/m mod n/m shifted by t n/m so that b | a d - 1
    (solvable since gcd(a, b) = gcd(n/m, b) = 1), then c = b - d m is
    divisible by n, beta = (a d - 1)/b is exact, alpha = a - m beta, and
    det = alpha d - beta c = 1.  Entries returned as (alpha, beta, c, d).
    """
    a, b = normalize_p1(a, b)
    F = a.field
    one = Poly.one(F)
    if b.is_zero():
        # (1, 0) = gamma (1, n) with gamma = [[1, 0], [-n, 1]]
        return one, Poly.zero(F), -n, one
    m = gcd_poly(b, n)
    b1 = b // m
    n1 = n // m
    d0 = b1 % n1 if n1.deg >= 1 else Poly.zero(F)
    g, s, _ = xgcd((a * n1) % b if not b.is_one() else Poly.zero(F), b)
    if not g.is_one():
        raise AssertionError("witness construction lost coprimality")
    t = (s * (one - a * d0)) % b
    d = d0 + t * n1
    c = b - d * m
    if not n.divides(c):
        raise AssertionError("witness lower-left not divisible by the level")
    num = a * d - one
    beta, rem = divmod(num, b)
    if not rem.is_zero():
        raise AssertionError("witness division was not exact")
    alpha = a - m * beta
    det = alpha * d - beta * c
    if not det.is_one():
        raise AssertionError("witness determinant is not 1")
    # action check: gamma (1, m)^t = (alpha + beta m, c + d m) = (a, b)
    if alpha + beta * m != a or c + d * m != b:
        raise AssertionError("witness does not map the base point")
    return alpha, beta, c, d


def factor_primes(n: Poly) -> list[Poly]:
    from .fq import factorize

    if n.is_one():
        return []
    fac = factorize(n)
    if any(a > 1 for a in fac.values()):
        raise ValueError("level is not square-free")
    return sorted(fac, key=lambda p: p.sort_key())


# ---------------------------------------------------------------------------
# divisor vectors

def delta_divisor(cs: CuspSet, d: Poly) -> tuple[int, ...]:
    """ord_[m] of the d-rescaled discriminant: |n| |(m,d)|^2 / (|m| |d|)."""
    q = cs.field.q
    n = cs.level
    if not d.divides(n):
        raise ValueError("needs d | n")
    out = []
    for m in cs.divisors:
        g = gcd_poly(m, d)
        exp = n.deg + 2 * g.deg - m.deg - d.deg
        if exp < 0:
            raise AssertionError("order formula left the integers")
        out.append(q**exp)
    return tuple(out)


def d_eps_vector(cs: CuspSet, eps: EpsVector) -> tuple[int, ...]:
    """D^eps = sum over d | n of eps_d [d], as a cusp vector."""
    primes = list(cs.primes)
    return tuple(eps.of_divisor(primes, d) for d in cs.divisors)


def w_permute(cs: CuspSet, d: Poly, vec: tuple[int, ...]) -> tuple[int, ...]:
    """Push a cusp vector through the W_d permutation of cusps."""
    n = cs.level
    out = [0] * cs.size()
    for i, m in enumerate(cs.divisors):
        out[cs.index(cusp_w_action(d, m, n))] += vec[i]
    return tuple(out)


def vector_degree(vec: tuple[int, ...]) -> int:
    return sum(vec)


def delta_eps_divisor(cs: CuspSet, eps: EpsVector) -> tuple[int, ...]:
    """sum over d | n of eps_d * delta_divisor(d): the eps-signed principal
    divisor; equals eps_n N(n, eps) D^eps entrywise."""
    primes = list(cs.primes)
    out = [0] * cs.size()
    for d in cs.divisors:
        sd = eps.of_divisor(primes, d)
        for i, v in enumerate(delta_divisor(cs, d)):
            out[i] += sd * v
    return tuple(out)


def rho_exponent(primes: list[Poly], q: int) -> int:
    """prod over i of (|p_i| - 1)(|p_i| + 1)^(s-1): annihilates the quotient."""
    s = len(primes)
    out = 1
    for p in primes:
        np_ = q**p.deg
        out *= (np_ - 1) * (np_ + 1) ** (s - 1)
    return out


# ---------------------------------------------------------------------------
# the relation lattice and quotient orders

class RelationLattice:
    """Span of the pairwise differences of the delta divisor vectors.

    Coordinates on Div^0 use the basis [d] - [1] for divisors d != 1; a
    degree-zero vector's coordinates are its entries away from [1].
    """

    def __init__(self, cs: CuspSet):
        self.cusps = cs
        divisors = cs.divisors
        deltas = [delta_divisor(cs, d) for d in divisors]
        gens = []
        for i in range(len(divisors)):
            for j in range(i + 1, len(divisors)):
                g = tuple(a - b for a, b in zip(deltas[i], deltas[j]))
                if vector_degree(g) != 0:
                    raise AssertionError("relation generator has nonzero degree")
                gens.append(g)
        self.generators = gens
        self.dim = cs.size() - 1
        rows = [self._coords(g) for g in gens] or [[0] * self.dim]
        if self.dim == 0:
            rows = [[]]
        self.matrix = rows
        u, d, v = smith_normal_form(rows) if self.dim else ([[1]], [[]], [])
        self._v = v
        self._diag = [d[i][i] for i in range(min(len(d), self.dim))] if self.dim else []
        self.elementary_divisors = list(self._diag) + [0] * (self.dim - len(self._diag))

    def _coords(self, vec: tuple[int, ...]) -> list[int]:
        if vector_degree(vec) != 0:
            raise ValueError("only degree-zero vectors have lattice coordinates")
        i1 = self.cusps.index(Poly.one(self.cusps.field))
        return [v for i, v in enumerate(vec) if i != i1]

    def _in_snf_coords(self, vec: tuple[int, ...]) -> list[int]:
        y = self._coords(vec)
        return [sum(y[i] * self._v[i][j] for i in range(self.dim)) for j in range(self.dim)]

    def contains(self, vec: tuple[int, ...]) -> bool:
        if self.dim == 0:
            return vector_degree(vec) == 0
        z = self._in_snf_coords(vec)
        for zi, di in zip(z, self.elementary_divisors):
            if di == 0:
                if zi != 0:
                    return False
            elif zi % di != 0:
                return False
        return True

    def order_of(self, vec: tuple[int, ...]) -> int:
        """Order of the image of vec in Div^0 / lattice (0 if infinite)."""
        if self.dim == 0:
            return 1
        z = self._in_snf_coords(vec)
        out = 1
        for zi, di in zip(z, self.elementary_divisors):
            if di == 0:
                if zi != 0:
                    return 0
            else:
                out = lcm(out, di // gcd(di, zi))
        return out

    def quotient_is_finite(self) -> bool:
        return all(d != 0 for d in self.elementary_divisors)


def relation_lattice(field: Fq, primes: list[Poly]) -> RelationLattice:
    return RelationLattice(CuspSet(field, tuple(primes)))


def pullback_vector(
    cs_low: CuspSet, cs_high: CuspSet, p: Poly, vec: tuple[int, ...]
) -> tuple[int, ...]:
    """pi_p^* of a cusp vector: [m] at level n/p becomes |p| [m] + [m p]."""
    q = cs_low.field.q
    out = [0] * cs_high.size()
    for i, m in enumerate(cs_low.divisors):
        if vec[i]:
            out[cs_high.index(m)] += q**p.deg * vec[i]
            out[cs_high.index(m * p)] += vec[i]
    return tuple(out)


def cusp_group(field: Fq, primes: list[Poly], ell_filter=None) -> dict:
    """Quotient structure and per-eps orders with the divisibility sandwich.

    For each eps != ones: the order of D^eps in Div^0/P_known satisfies
    ord_l(N/nu) <= ord_l(order) <= ord_l(N) at every prime l not dividing
    q(q-1); the signed principal divisor expands to eps_n N D^eps; W_{p_i}
    fixes D^eps up to eps_i.
    """
    q = field.q
    cs = CuspSet(field, tuple(primes))
    lat = RelationLattice(cs)
    n_poly = cs.level
    s = len(primes)
    rows = []
    for eps in EpsVector.all_vectors(s):
        n_c = eps.n_const(primes, q)
        nu = eps.nu(primes, q)
        dvec = d_eps_vector(cs, eps)
        entry = {
            "eps": str(eps),
            "N": n_c,
            "nu": nu,
            "deg_D": vector_degree(dvec),
            "w_eigen": all(
                w_permute(cs, p, dvec) == tuple(x * eps.signs[i] for x in dvec)
                for i, p in enumerate(primes)
            ),
        }
        if eps.is_ones():
            entry["excluded"] = True
            entry["deg_nonzero"] = vector_degree(dvec) == 2**s
            rows.append(entry)
            continue
        entry["excluded"] = False
        if vector_degree(dvec) != 0:
            raise AssertionError("deg D^eps must vanish off the all-ones vector")
        eps_n = eps.of_divisor(primes, n_poly)
        signed = delta_eps_divisor(cs, eps)
        entry["principal_matches"] = signed == tuple(eps_n * n_c * x for x in dvec)
        order = lat.order_of(dvec)
        entry["order"] = order
        sandwich = True
        ells = set(_prime_factors_int(n_c)) | set(_prime_factors_int(order))
        for ell in sorted(ells):
            if (q * (q - 1)) % ell == 0:
                continue
            if ell_filter is not None and not ell_filter(ell):
                continue
            lo = _ord_at(ell, n_c // nu) if n_c // nu else 0
            hi = _ord_at(ell, n_c)
            mid = _ord_at(ell, order) if order else None
            if mid is None or not (lo <= mid <= hi):
                sandwich = False
        entry["sandwich_ok"] = sandwich
        rows.append(entry)
    return {
        "q": q,
        "s": s,
        "level": n_poly,
        "elementary_divisors": lat.elementary_divisors,
        "finite": lat.quotient_is_finite(),
        "rows": rows,
        "lattice": lat,
    }


def exponent_check(field: Fq, primes: list[Poly]) -> dict:
    """Every elementary divisor divides rho(n); rho is prime to p, so the
    computed quotient has trivial p-part; projection pullbacks of the lower
    relation generators are lattice members."""
    q = field.q
    cs = CuspSet(field, tuple(primes))
    lat = RelationLattice(cs)
    rho = rho_exponent(primes, q)
    divides_rho = all(d != 0 and rho % d == 0 for d in lat.elementary_divisors)
    p_part_trivial = all(d % field.p != 0 for d in lat.elementary_divisors if d)
    pullbacks_ok = True
    for p in primes:
        lower = [pp for pp in primes if pp != p]
        cs_low = CuspSet(field, tuple(lower))
        lat_low = RelationLattice(cs_low)
        for g in lat_low.generators:
            if not lat.contains(pullback_vector(cs_low, cs, p, g)):
                pullbacks_ok = False
    return {
        "rho": rho,
        "elementary_divisors": lat.elementary_divisors,
        "divides_rho": divides_rho,
        "p_part_trivial": p_part_trivial,
        "pullbacks_in_lattice": pullbacks_ok,
        "ok": divides_rho and p_part_trivial and pullbacks_ok,
    }
