"""The Bruhat-Tits tree of PGL2 over F_q((1/T)): edges, action, reductions.

Edges are cosets g * Z(F_inf) * I_inf where I_inf is the Iwahori group
(integral matrices with lower-left entry divisible by pi).  A positive edge
has the unique representative [[pi^k, u], [0, 1]] with u a tail mod pi^k;
the involution e -> bar(e) is right multiplication by [[0, 1], [pi, 0]].

Orientation test: a coset is positive iff ord(c) > ord(d) for the bottom
row (c, d).  This is right-invariant: right multiplication by an Iwahori
element [[x, y], [z, w]] (x, w units, ord z >= 1) sends (c, d) to
(cx + dz, cy + dw); if ord c > ord d then ord(cx + dz) >= min(ord c,
ord d + 1) > ord d = ord(cy + dw), and scalars shift both orders equally.
Positive representatives have bottom row (0, 1); their bars have (pi, 0);
so the test matches the two-sided coset decomposition.

Vertices are never reified: origin/terminus relations are expressed through
edge identities (incoming_neighbors) and, for tests, the predicate
same_vertex.

Half-line convention: the positive edge (k = -i, u = 0) is e_i (origin v_i,
terminus v_{i+1}, with v_i the class of [[pi^(-i), 0], [0, 1]]), and
(k, 0, +) for k >= 1 represents the class of bar(e_{k-1}).  All orientation
bookkeeping is normalized against this single convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fq import (
    Fq,
    Poly,
    _coeff_str,
    _parse_coeff,
    crt,
    factorize,
    gcd_poly,
    is_irreducible,
    monic_polys,
    xgcd,
)
from .laurent import (
    ORD_ZERO,
    RatF,
    Tail,
    ratf_from_tail,
    tail_canonical,
    tail_inverse,
    tail_mul_poly,
    tail_polypart,
)


@dataclass(frozen=True)
class TreeEdge:
    """Normalized edge: level exponent k, tail u (indices < k), orientation."""

    field: Fq
    k: int
    u: tuple[tuple[int, int], ...]
    positive: bool

    def tail(self) -> Tail:
        return dict(self.u)

    def ucoeff(self, i: int) -> int:
        for j, a in self.u:
            if j == i:
                return a
        return 0

    def __repr__(self) -> str:
        return f"TreeEdge({edge_to_str(self)})"


def make_edge(field: Fq, k: int, tail: Tail | dict, positive: bool) -> TreeEdge:
    cut = {i: a for i, a in tail.items() if a and i < k}
    return TreeEdge(field, k, tail_canonical(cut), positive)


def bar(e: TreeEdge) -> TreeEdge:
    """Reverse orientation; an involution."""
    return TreeEdge(e.field, e.k, e.u, not e.positive)


class Mat2:
    """2x2 matrix over F_q(T) with nonzero determinant not enforced here."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: RatF, b: RatF, c: RatF, d: RatF):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def from_polys(cls, a: Poly, b: Poly, c: Poly, d: Poly) -> "Mat2":
        return cls(*(RatF.from_poly(x) for x in (a, b, c, d)))

    @classmethod
    def identity(cls, field: Fq) -> "Mat2":
        one, zero = RatF.one(field), RatF.zero(field)
        return cls(one, zero, zero, one)

    @property
    def field(self) -> Fq:
        return self.a.field

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def det(self) -> RatF:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mat2":
        dt = self.det()
        if dt.is_zero():
            raise ValueError("singular matrix")
        return Mat2(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def scale(self, z: RatF) -> "Mat2":
        return Mat2(self.a * z, self.b * z, self.c * z, self.d * z)

    def entries(self) -> tuple[RatF, RatF, RatF, RatF]:
        return (self.a, self.b, self.c, self.d)

    def is_poly_entries(self) -> bool:
        return all(x.is_poly() for x in self.entries())

    def is_gl2a(self) -> bool:
        """Entries in A and determinant a nonzero constant."""
        dt = self.det()
        return self.is_poly_entries() and dt.is_poly() and dt.num.is_const() and not dt.is_zero()

    def is_gamma0(self, n: Poly) -> bool:
        return self.is_gl2a() and n.divides(self.c.num)

    def __repr__(self) -> str:
        return f"Mat2({self.a!r}, {self.b!r}; {self.c!r}, {self.d!r})"


# -- standard matrices -------------------------------------------------------

def flip_mat(field: Fq) -> Mat2:
    """[[0, 1], [pi, 0]]: the edge-reversing involution (right action)."""
    zero, one = RatF.zero(field), RatF.one(field)
    return Mat2(zero, one, RatF.pi_pow(field, 1), zero)


def flip_inv_mat(field: Fq) -> Mat2:
    zero, one = RatF.zero(field), RatF.one(field)
    return Mat2(zero, RatF.pi_pow(field, -1), one, zero)


def weyl_mat(field: Fq) -> Mat2:
    return Mat2.from_polys(
        Poly.zero(field), Poly.one(field), Poly.one(field), Poly.zero(field)
    )


def upper_mat(b: Poly) -> Mat2:
    """S_b = [[1, b], [0, 1]]."""
    F = b.field
    return Mat2.from_polys(Poly.one(F), b, Poly.zero(F), Poly.one(F))


def b_mat(m: Poly) -> Mat2:
    """B_m = [[m, 0], [0, 1]]."""
    F = m.field
    return Mat2.from_polys(m, Poly.zero(F), Poly.zero(F), Poly.one(F))


def edge_matrix(e: TreeEdge) -> Mat2:
    """The defining coset representative (includes the flip for negative e)."""
    F = e.field
    m = Mat2(
        RatF.pi_pow(F, e.k),
        ratf_from_tail(F, e.tail()),
        RatF.zero(F),
        RatF.one(F),
    )
    return m if e.positive else m * flip_mat(F)


# -- normal form and action ---------------------------------------------------

def normal_form(g: Mat2) -> TreeEdge:
    """The unique normalized edge in the coset g * Z * I_inf."""
    F = g.field
    if g.det().is_zero():
        raise ValueError("singular matrix defines no edge")
    positive = g.c.ord() > g.d.ord()
    if not positive:
        g = g * flip_inv_mat(F)
        assert g.c.ord() > g.d.ord()
    k = g.det().ord() - 2 * g.d.ord()
    assert isinstance(k, int)
    u = (g.b / g.d).tail_below(k)
    return make_edge(F, k, u, positive)


def act(g: Mat2, e: TreeEdge) -> TreeEdge:
    """Left action on edges: the normal form of g * (matrix of e)."""
    return normal_form(g * edge_matrix(e))


def incoming_neighbors(e: TreeEdge) -> list[TreeEdge]:
    """The q edges e' != bar(e) with t(e') = o(e).

    Computed in closed form on tails (no matrix arithmetic):
      o(e) positive (k, u): the q edges (k+1, u + y*pi^k, +), y in F_q;
      o(e) negative (k, u): the q-1 edges (k, u') with u' differing from u
      in the pi^(k-1) coefficient, plus (k-1, u mod pi^(k-1), -).
    """
    F = e.field
    u = e.tail()
    out = []
    if e.positive:
        for y in F.elements():
            t = dict(u)
            if y:
                t[e.k] = y
            out.append(make_edge(F, e.k + 1, t, True))
    else:
        cur = e.ucoeff(e.k - 1)
        for y in F.elements():
            if y == cur:
                continue
            t = dict(u)
            t[e.k - 1] = y
            out.append(make_edge(F, e.k, t, True))
        out.append(make_edge(F, e.k - 1, u, False))
    return out


def same_vertex(m1: Mat2, m2: Mat2) -> bool:
    """Whether two matrices define the same vertex class (mod Z * GL2(O))."""
    x = m1.inverse() * m2
    o = x.det().ord()
    if o is ORD_ZERO or o % 2 != 0:
        return False
    t = o // 2
    return all(v.is_zero() or v.ord() >= t for v in x.entries())


def origin_matrix(e: TreeEdge) -> Mat2:
    return edge_matrix(e)


def terminus_matrix(e: TreeEdge) -> Mat2:
    return edge_matrix(e) * flip_mat(e.field)


# -- reduction to the GL2(A) half-line ----------------------------------------

def reduce_class(e: TreeEdge) -> tuple[int, bool]:
    """(index, flipped) of the half-line class, without the witness matrix.

    Same loop as reduce_gl2a minus the gamma bookkeeping; the closed-form
    evaluator calls this in bulk.
    """
    F = e.field
    k, u, pos = e.k, e.tail(), e.positive
    cap = abs(k) + len(u) + 8
    for _ in range(cap):
        u = {i: a for i, a in u.items() if i >= 1}
        if not u:
            if k <= 0:
                return -k, (not pos)
            k, pos = -(k - 1), not pos
            continue
        m = min(u)
        u = tail_inverse(F, u, k - 2 * m)
        k = k - 2 * m
    raise AssertionError("half-line reduction failed to terminate")


def reduce_gl2a(e: TreeEdge) -> tuple[int, bool, Mat2]:
    """Reduce an edge to the half-line: gamma in GL2(A) with

        act(gamma, e) = (-index, 0, +)   if not flipped,
        act(gamma, e) = (-index, 0, -)   if flipped.

    Continued-fraction style: strip the polynomial part of u by a
    translation, apply the Weyl flip, repeat.  Each flip lowers k by
    2 * ord(u) >= 2, so the loop terminates; the iteration cap errs loudly
    rather than looping.
    """
    F = e.field
    k, u, pos = e.k, e.tail(), e.positive
    gamma = Mat2.identity(F)
    cap = abs(k) + len(u) + 8
    for _ in range(cap):
        b = tail_polypart(F, u)
        if not b.is_zero():
            gamma = upper_mat(-b) * gamma
            u = {i: a for i, a in u.items() if i >= 1}
        if not u:
            if k <= 0:
                return -k, (not pos), gamma
            # (k, 0) with k >= 1 lies over bar(e_{k-1}); one Weyl flip
            gamma = weyl_mat(F) * gamma
            k, pos = -(k - 1), not pos
            continue
        m = min(u)
        gamma = weyl_mat(F) * gamma
        u = tail_inverse(F, u, k - 2 * m)
        k = k - 2 * m
    raise AssertionError("half-line reduction failed to terminate")


# -- constructive positivization in Gamma_0(n) ---------------------------------

def _first_coprime_irreducible(n: Poly) -> Poly:
    for d in range(1, n.deg + 2):
        for f in monic_polys(n.field, d):
            if is_irreducible(f) and gcd_poly(f, n).is_one():
                return f
    raise AssertionError("no coprime irreducible found")  # unreachable


def _small_polys(field: Fq, max_deg: int, cap: int):
    """Polynomials of degree <= max_deg in a stable order (zero first)."""
    yield Poly.zero(field)
    count = 1
    for d in range(0, max_deg + 1):
        for lead in range(1, field.q):
            lowers = monic_polys(field, d)
            for m in lowers:
                f = m.scale(lead)
                if f.deg == d:
                    yield f
                    count += 1
                    if count >= cap:
                        return


def _solve_affine(field: Fq, rows: list[list[int]], rhs: list[int]):
    """Solve rows * y = rhs over F_q; returns (particular, nullspace basis) or None."""
    nunk = len(rows[0]) if rows else 0
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    piv_cols = []
    rank = 0
    for col in range(nunk):
        piv = next((i for i in range(rank, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            continue
        aug[rank], aug[piv] = aug[piv], aug[rank]
        inv = field.inv(aug[rank][col])
        aug[rank] = [field.mul(x, inv) for x in aug[rank]]
        for i in range(len(aug)):
            if i != rank and aug[i][col]:
                f = aug[i][col]
                aug[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(aug[i], aug[rank])]
        piv_cols.append(col)
        rank += 1
    for i in range(rank, len(aug)):
        if aug[i][nunk] != 0:
            return None
    part = [0] * nunk
    for r, col in enumerate(piv_cols):
        part[col] = aug[r][nunk]
    free = [c for c in range(nunk) if c not in piv_cols]
    basis = []
    for fc in free:
        vec = [0] * nunk
        vec[fc] = 1
        for r, col in enumerate(piv_cols):
            vec[col] = field.neg(aug[r][fc])
        basis.append(vec)
    return part, basis


def _enumerate_solutions(field: Fq, part: list[int], basis: list[list[int]], cap: int):
    """Affine solution set, deterministically ordered, at most cap entries."""
    import itertools as it

    yield list(part)
    n = 1
    for weights in it.product(field.elements(), repeat=len(basis)):
        if all(w == 0 for w in weights):
            continue
        vec = list(part)
        for w, bvec in zip(weights, basis):
            if w:
                row = field.mul_t[w]
                vec = [field.add(v, row[b]) for v, b in zip(vec, bvec)]
        yield vec
        n += 1
        if n >= cap:
            return


def _complete_gamma(c: Poly, d: Poly) -> Mat2:
    """gamma = [[a, b], [c, d]] with det = 1, given gcd(c, d) = 1."""
    g, s, t = xgcd(d, c)
    assert g.is_one()
    return Mat2.from_polys(s, -t, c, d)


def reduce_to_positive(e: TreeEdge, n: Poly) -> tuple[Mat2, TreeEdge]:
    """A certified gamma in Gamma_0(n) with act(gamma, e) positive.

    Positive edges come back unchanged with gamma = identity.  For a
    negative edge (r, u), gamma = [[a, b], [c, d]] positivizes iff
    ord(c*u + d) >= r - deg c with n | c and gcd(c, d) = 1; the search
    ascends deg(c) (small deg c keeps the positivized level small), solving
    the tail-vanishing conditions by linear algebra, with the approximation
    construction (denominator n * w^M, w a coprime irreducible) as a total
    fallback.
    """
    F = e.field
    if not n.is_monic():
        raise ValueError("level must be monic")
    if e.positive:
        return Mat2.identity(F), e

    r, u = e.k, e.tail()
    nu_tail = tail_mul_poly(F, u, n)

    def try_candidate(c1: Poly) -> Mat2 | None:
        c = n * c1
        s = r - c.deg
        cu = tail_mul_poly(F, u, c)
        if any(cu.get(i, 0) for i in range(1, s)):
            return None
        d0 = -tail_polypart(F, cu)
        max_delta_deg = -s if s <= 0 else -1
        deltas = _small_polys(F, max_delta_deg, 64) if max_delta_deg >= 0 else iter(
            [Poly.zero(F)]
        )
        for delta in deltas:
            d = d0 + delta
            if gcd_poly(c, d).is_one():
                return _complete_gamma(c, d)
        return None

    for t in range(0, max(r, 0) + n.deg + 3):
        s = r - n.deg - t
        if s - 1 >= 1:
            # conditions (c1 * n * u)_i = 0 for i = 1..s-1, c1 monic of degree t
            rows = [[nu_tail.get(i + j, 0) for j in range(t)] for i in range(1, s)]
            rhs = [F.neg(nu_tail.get(i + t, 0)) for i in range(1, s)]
            solved = _solve_affine(F, rows, rhs)
            if solved is None:
                continue
            part, basis = solved
            candidates = (
                Poly(F, y + [1]) for y in _enumerate_solutions(F, part, basis, 128)
            )
        else:
            candidates = (m for m in monic_polys(F, t))
        for c1 in candidates:
            gamma = try_candidate(c1)
            if gamma is not None:
                epos = act(gamma, e)
                assert epos.positive and gamma.is_gamma0(n)
                return gamma, epos

    # Fallback: approximation-theorem construction, always succeeds.
    w = _first_coprime_irreducible(n)
    M = max(1, -(-(r + w.deg - 1) // w.deg))
    c = n * w**M
    cu = tail_mul_poly(F, u, c)
    d0 = -tail_polypart(F, cu)
    moduli = [p for p in factorize(n)] if n.deg >= 1 else []
    moduli.append(w)
    one = Poly.one(F)
    delta = crt([(m, (one - d0) % m) for m in moduli])
    d = d0 + delta
    assert gcd_poly(c, d).is_one()
    gamma = _complete_gamma(c, d)
    epos = act(gamma, e)
    assert epos.positive and gamma.is_gamma0(n)
    return gamma, epos


# -- text format ----------------------------------------------------------------

def edge_to_str(e: TreeEdge) -> str:
    """"(k; u; +/-)" with u written in T and pi, e.g. "(3; T+pi; +)"."""
    terms = []
    for i, a in sorted(e.u):
        if i < 0:
            var = "T" if i == -1 else f"T^{-i}"
        elif i == 0:
            var = ""
        else:
            var = "pi" if i == 1 else f"pi^{i}"
        cs = _coeff_str(e.field, a)
        if not var:
            terms.append(cs)
        elif a == 1:
            terms.append(var)
        else:
            terms.append(f"{cs}*{var}")
    ustr = "+".join(terms) if terms else "0"
    return f"({e.k}; {ustr}; {'+' if e.positive else '-'})"


def edge_from_str(field: Fq, s: str) -> TreeEdge:
    s = s.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"bad edge string {s!r}")
    parts = s[1:-1].split(";")
    if len(parts) != 3:
        raise ValueError(f"edge string needs three ';' fields: {s!r}")
    k = int(parts[0].strip())
    orient = parts[2].strip()
    if orient not in ("+", "-"):
        raise ValueError(f"bad orientation {orient!r}")
    ustr = parts[1].replace(" ", "")
    tail: Tail = {}
    if ustr != "0":
        depth = 0
        cur: list[str] = []
        segs = []
        for ch in ustr:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch == "+" and depth == 0:
                segs.append("".join(cur))
                cur = []
            else:
                cur.append(ch)
        segs.append("".join(cur))
        for seg in segs:
            if not seg:
                raise ValueError("empty term in edge tail")
            if "T" in seg:
                head, _, exp = seg.partition("T")
                if exp and not exp.startswith("^"):
                    raise ValueError(f"bad term {seg!r}")
                idx = -1 if exp == "" else -int(exp[1:])
                has_var = True
            elif "pi" in seg:
                head, _, exp = seg.partition("pi")
                if exp and not exp.startswith("^"):
                    raise ValueError(f"bad term {seg!r}")
                idx = 1 if exp == "" else int(exp[1:])
                has_var = True
            else:
                head, idx, has_var = seg, 0, False
            if has_var and head:
                if not head.endswith("*"):
                    raise ValueError(f"bad term {seg!r}")
                head = head[:-1]
            a = _parse_coeff(field, head) if head else 1
            if idx in tail:
                raise ValueError(f"repeated exponent in {s!r}")
            if idx >= k:
                raise ValueError(f"tail term pi^{idx} not below pi^{k}")
            if a:
                tail[idx] = a
    return make_edge(field, k, tail, orient == "+")
