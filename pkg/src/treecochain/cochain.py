"""Invariant pseudo-harmonic cochains as Fourier data, and the operator calculus.

A cochain invariant under the level-n Hecke congruence group is stored as
its constant coefficient c0 = f0(1), its ideal coefficients f*(m) for monic
m up to a declared depth, and its pairing constant c = f(e) + f(bar e).
Evaluation on a positive edge (k, u) expands

    f(k, u) = c0 q^(-k) + sum over nonzero m in A, deg m <= k-2, of
              f*(monic(m)) q^(-(k-2-deg m)) eta(m u),

grouping each associate class {c m0 : c unit}: the unit average collapses
to q-1 when (m0 u)_1 = 0 and to -1 otherwise (true for every nontrivial
character, so evaluation itself is character-free).  Star providers
therefore expose two aggregates per degree, the full sum and the sum over
the hyperplane (m u)_1 = 0, which the level-one Eisenstein kernel computes
by exact linear-algebra counts rather than enumeration.

Negative edges are evaluated after constructive positivization in
Gamma_0(n); a verification mode cross-checks against the pairing-constant
subtraction.  Depth is a hard contract: out-of-depth access raises
DepthError, never a silent truncation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Mapping

from .cyclo import Cyc, CycloRing, eta_of_coeff
from .fq import Fq, Poly, gcd_poly, monic_polys, poly_from_str, poly_to_str, sigma, xgcd
from .laurent import tail_mul_poly
from .tree import Mat2, TreeEdge, act, b_mat, bar, make_edge, reduce_to_positive


class DepthError(Exception):
    """Raised when an operation needs Fourier coefficients beyond the depth."""


# ---------------------------------------------------------------------------
# the level-one Eisenstein kernel: sigma-weighted aggregates

class EisKernel:
    """Aggregates for the star family m -> (1 - q^2) sigma(m) / q^(1 + deg m).

    sum over monic m of degree d of sigma(m) factors through divisor pairs
    (m0, g): counting pairs with (m0 g u)_1 = 0 reduces, for fixed m0, to
    whether the first few expansion coefficients of m0*u vanish, and the
    number of such m0 is q^(e - rank) of an explicit linear system.  All
    results are exact; caches are idempotent memo tables.
    """

    def __init__(self, field: Fq):
        self.field = field
        self._sigma: dict[Poly, int] = {}
        self._wall: dict[tuple[int, tuple[int, ...]], int] = {}
        self._zc: dict[tuple[int, int, tuple[int, ...]], int] = {}

    def sigma_of(self, m: Poly) -> int:
        v = self._sigma.get(m)
        if v is None:
            v = sigma(m)
            self._sigma[m] = v
        return v

    def star_fr(self, m: Poly) -> Fraction:
        q = self.field.q
        return Fraction((1 - q * q) * self.sigma_of(m), q ** (1 + m.deg))

    def sum_all_fr(self, d: int) -> Fraction:
        q = self.field.q
        s_all = q**d * (q ** (d + 1) - 1) // (q - 1)
        return Fraction((1 - q * q) * s_all, q ** (1 + d))

    def _z_count(self, e: int, t: int, x: Mapping[int, int]) -> int:
        """#(monic m0, deg e) with (m0 x)_i = 0 for i = 1..t."""
        if t <= 0:
            return self.field.q**e
        key = (e, t, tuple(x.get(i, 0) for i in range(1, t + e + 1)))
        v = self._zc.get(key)
        if v is not None:
            return v
        F = self.field
        # rows: sum_{j<e} y_j x_{i+j} = -x_{i+e}, i = 1..t
        aug = [
            [x.get(i + j, 0) for j in range(e)] + [F.neg(x.get(i + e, 0))]
            for i in range(1, t + 1)
        ]
        rank = 0
        for col in range(e):
            piv = next((r for r in range(rank, t) if aug[r][col]), None)
            if piv is None:
                continue
            aug[rank], aug[piv] = aug[piv], aug[rank]
            inv = F.inv(aug[rank][col])
            aug[rank] = [F.mul(v2, inv) for v2 in aug[rank]]
            for r in range(t):
                if r != rank and aug[r][col]:
                    fct = aug[r][col]
                    aug[r] = [F.sub(a2, F.mul(fct, b2)) for a2, b2 in zip(aug[r], aug[rank])]
            rank += 1
        consistent = all(aug[r][e] == 0 for r in range(rank, t))
        v = self.field.q ** (e - rank) if consistent else 0
        self._zc[key] = v
        return v

    def wall_sigma(self, d: int, x: Mapping[int, int]) -> int:
        """sum of sigma(m) over monic m of degree d with (m x)_1 = 0."""
        key = (d, tuple(x.get(i, 0) for i in range(1, d + 2)))
        v = self._wall.get(key)
        if v is not None:
            return v
        q = self.field.q
        total = 0
        for e in range(d + 1):
            c = d - e
            if c == 0:
                n_ec = self._z_count(e, 1, x)
            else:
                z_c = self._z_count(e, c, x)
                z_c1 = self._z_count(e, c + 1, x)
                n_ec = q**c * z_c1 + q ** (c - 1) * (q**e - z_c)
            total += q**e * n_ec
        self._wall[key] = total
        return total

    def sum_wall_fr(self, d: int, x: Mapping[int, int]) -> Fraction:
        q = self.field.q
        return Fraction((1 - q * q) * self.wall_sigma(d, x), q ** (1 + d))


_kernels: dict[Fq, EisKernel] = {}


def eis_kernel(field: Fq) -> EisKernel:
    k = _kernels.get(field)
    if k is None:
        k = EisKernel(field)
        _kernels[field] = k
    return k


# ---------------------------------------------------------------------------
# star providers

class ComboStar:
    """Star data of sum c_d * (level-one Eisenstein | B_d): exact and lazy.

    Individual summands may have denominators outside Z[1/p]; only the
    aggregated values are guaranteed to land in the coefficient ring, so all
    arithmetic happens in Fraction and converts once per query.
    """

    def __init__(self, field: Fq, ring: CycloRing, terms: list[tuple[Fraction, Poly]]):
        self.field = field
        self.ring = ring
        self.terms = [(Fraction(c), d) for c, d in terms]
        self.kernel = eis_kernel(field)

    def value_fr(self, m: Poly) -> Fraction:
        total = Fraction(0)
        for c, d in self.terms:
            if c and d.divides(m):
                total += c * self.kernel.star_fr(m // d)
        return total

    def value(self, m: Poly) -> Cyc:
        return self.ring.from_fraction(self.value_fr(m))

    def sum_all(self, d: int) -> Cyc:
        total = Fraction(0)
        for c, dd in self.terms:
            if c and dd.deg <= d:
                total += c * self.kernel.sum_all_fr(d - dd.deg)
        return self.ring.from_fraction(total)

    def sum_wall(self, d: int, u: Mapping[int, int]) -> Cyc:
        total = Fraction(0)
        for c, dd in self.terms:
            if c and dd.deg <= d:
                x = tail_mul_poly(self.field, u, dd) if dd.deg > 0 else dict(u)
                total += c * self.kernel.sum_wall_fr(d - dd.deg, x)
        return self.ring.from_fraction(total)

    def shift_b(self, m: Poly) -> "ComboStar":
        return ComboStar(self.field, self.ring, [(c, d * m) for c, d in self.terms])

    def with_ring(self, ring: CycloRing) -> "ComboStar":
        return ComboStar(self.field, ring, self.terms)

    def max_depth(self) -> int | None:
        return None  # unbounded


class TableStar:
    """Star data as an explicit complete table for monic m up to a depth."""

    def __init__(self, field: Fq, ring: CycloRing, table: dict[Poly, Cyc], depth: int):
        self.field = field
        self.ring = ring
        self.table = table
        self.depth = depth
        self._sums: dict[int, Cyc] = {}

    def value(self, m: Poly) -> Cyc:
        if m.deg > self.depth:
            raise DepthError(f"insufficient Fourier depth: deg {m.deg} > {self.depth}")
        v = self.table.get(m)
        return v if v is not None else self.ring.zero()

    def sum_all(self, d: int) -> Cyc:
        if d > self.depth:
            raise DepthError(f"insufficient Fourier depth: deg {d} > {self.depth}")
        v = self._sums.get(d)
        if v is None:
            v = self.ring.zero()
            for m in monic_polys(self.field, d):
                v = v + self.value(m)
            self._sums[d] = v
        return v

    def sum_wall(self, d: int, u: Mapping[int, int]) -> Cyc:
        if d > self.depth:
            raise DepthError(f"insufficient Fourier depth: deg {d} > {self.depth}")
        F = self.field
        total = self.ring.zero()
        for m in monic_polys(F, d):
            a1 = 0
            for j, mj in enumerate(m.coeffs):
                if mj:
                    uj = u.get(1 + j, 0)
                    if uj:
                        a1 = F.add(a1, F.mul(mj, uj))
            if a1 == 0:
                total = total + self.value(m)
        return total

    def shift_b(self, m: Poly) -> "TableStar":
        return TableStar(
            self.field,
            self.ring,
            {r * m: v for r, v in self.table.items()},
            self.depth + m.deg,
        )

    def with_ring(self, ring: CycloRing) -> "TableStar":
        return TableStar(
            self.field, ring, {m: ring.convert(v) for m, v in self.table.items()}, self.depth
        )

    def max_depth(self) -> int | None:
        return self.depth


StarProvider = ComboStar | TableStar


# ---------------------------------------------------------------------------
# Fourier data

@dataclass(frozen=True)
class FourierData:
    """A level-n invariant pseudo-harmonic cochain, determined by its data."""

    field: Fq
    ring: CycloRing
    level: Poly
    depth: int
    c0: Cyc
    pairing: Cyc
    star: StarProvider
    hecke_eigen: bool = False  # permits coprime-depth extension via the star family

    def star_value(self, m: Poly) -> Cyc:
        if not m.is_monic():
            raise ValueError("star coefficients are indexed by monic polynomials")
        if m.deg > self.depth:
            if not (self.hecke_eigen and gcd_poly(m, self.level).is_one()):
                raise DepthError(
                    f"insufficient Fourier depth: deg {m.deg} > depth {self.depth}"
                )
        return self.star.value(m)

    def eval(self, e: TreeEdge, verify: bool = False) -> Cyc:
        """Value on an edge; negative edges go through positivization.

        With verify=True a negative edge is also evaluated through the
        pairing-constant subtraction and the two paths must agree.
        """
        if e.field != self.field:
            raise ValueError("edge and cochain live over different fields")
        q = self.field.q
        if not e.positive:
            _, epos = reduce_to_positive(e, self.level)
            v = self.eval(epos)
            if verify:
                v2 = self.pairing - self.eval(bar(e))
                if v != v2:
                    raise AssertionError(
                        f"negative-edge evaluation paths disagree at {e}"
                    )
            return v
        k = e.k
        if k - 2 > self.depth:
            raise DepthError(
                f"insufficient Fourier depth: edge level {k} > depth {self.depth} + 2"
            )
        total = self.c0.div_q_pow(q, k)
        if k >= 2:
            u = e.tail()
            for d in range(0, k - 1):
                a_d = self.star.sum_wall(d, u)
                b_d = self.star.sum_all(d)
                total = total + (a_d * q - b_d).div_q_pow(q, k - 2 - d)
        return total

    def evaluator(self) -> Callable[[TreeEdge], Cyc]:
        return self.eval

    # -- serialization ----------------------------------------------------------
    def to_json_dict(self) -> dict:
        entries = []
        for d in range(self.depth + 1):
            for m in monic_polys(self.field, d):
                entries.append((poly_to_str(m), self.star.value(m).to_json()))
        entries.sort(key=lambda kv: kv[0])
        return {
            "level": poly_to_str(self.level),
            "depth": self.depth,
            "c0": self.c0.to_json(),
            "pairing": self.pairing.to_json(),
            "star": [[k, v] for k, v in entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, field: Fq, ring: CycloRing, data: dict) -> "FourierData":
        table = {
            poly_from_str(field, k): Cyc.from_json(ring, v) for k, v in data["star"]
        }
        depth = int(data["depth"])
        return cls(
            field=field,
            ring=ring,
            level=poly_from_str(field, data["level"]),
            depth=depth,
            c0=Cyc.from_json(ring, data["c0"]),
            pairing=Cyc.from_json(ring, data["pairing"]),
            star=TableStar(field, ring, table, depth),
        )

    def reduce_mod(self, ell: int, r: int) -> "FourierData":
        """The same cochain with coefficients reduced into (Z/ell^r)[zeta_p]."""
        ring = CycloRing(self.field.p, ell**r)
        return FourierData(
            field=self.field,
            ring=ring,
            level=self.level,
            depth=self.depth,
            c0=ring.convert(self.c0),
            pairing=ring.convert(self.pairing),
            star=self.star.with_ring(ring),
            hecke_eigen=self.hecke_eigen,
        )


def materialize(f: FourierData, depth: int | None = None) -> FourierData:
    """Copy with an explicit star table (drops lazy structure)."""
    depth = f.depth if depth is None else depth
    if depth > f.depth:
        raise DepthError("cannot materialize beyond declared depth")
    table = {}
    for d in range(depth + 1):
        for m in monic_polys(f.field, d):
            table[m] = f.star.value(m)
    return replace(f, depth=depth, star=TableStar(f.field, f.ring, table, depth))


def star_equal(f: FourierData, g: FourierData, depth: int | None = None) -> bool:
    """Coefficientwise equality (c0, pairing, all star values up to depth)."""
    if depth is None:
        depth = min(f.depth, g.depth)
    if f.c0 != g.c0 or f.pairing != g.pairing:
        return False
    for d in range(depth + 1):
        for m in monic_polys(f.field, d):
            if f.star.value(m) != g.star.value(m):
                return False
    return True


# ---------------------------------------------------------------------------
# forward Fourier transforms

def _tails(field: Fq, lo: int, hi: int):
    """All tails supported on indices lo..hi (inclusive), stable order."""
    idx = list(range(lo, hi + 1))
    for labels in itertools.product(field.elements(), repeat=len(idx)):
        yield {i: a for i, a in zip(idx, labels) if a}


def forward_star(
    values: Callable[[TreeEdge], Cyc],
    field: Fq,
    ring: CycloRing,
    m: Poly,
    char_mult: int = 1,
) -> Cyc:
    """f*(m) = q^(-1-deg m) sum over u in (pi)/(pi^(2+deg m)) of
    f(2 + deg m, u) eta(-m u), for monic nonzero m."""
    if m.is_zero() or not m.is_monic():
        raise ValueError("forward transform wants a monic nonzero index")
    d = m.deg
    k = 2 + d
    total = ring.zero()
    F = field
    for u in _tails(field, 1, d + 1):
        v = values(make_edge(field, k, u, True))
        a1 = 0
        for j, mj in enumerate(m.coeffs):
            if mj:
                uj = u.get(1 + j, 0)
                if uj:
                    a1 = F.add(a1, F.mul(mj, uj))
        total = total + v * eta_of_coeff(field, ring, F.neg(a1), char_mult)
    return total.div_q_pow(field.q, 1 + d)


def forward_const(
    values: Callable[[TreeEdge], Cyc], field: Fq, ring: CycloRing, k: int
) -> Cyc:
    """f0(pi^k): the averaged sum for k >= 1, the plain value for k <= 1."""
    if k <= 1:
        return values(make_edge(field, k, {}, True))
    total = ring.zero()
    for u in _tails(field, 1, k - 1):
        total = total + values(make_edge(field, k, u, True))
    return total.div_q_pow(field.q, k - 1)


# ---------------------------------------------------------------------------
# operator calculus on Fourier data

@dataclass(frozen=True)
class OperatorTag:
    """A named operator with its parameter: B(m), T(p), U(p), K(p), or W(m).

    Parameter constraints are those of the calculus: the parameter is monic;
    primes for T/U/K; at level n, U needs p | n, T needs p coprime to n, and
    W needs m exactly dividing n.  validate() checks the constraint against
    a level, apply() dispatches to the Fourier-side operator.
    """

    kind: str
    parameter: Poly

    _KINDS = ("B", "T", "U", "K", "W")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"operator kind must be one of {self._KINDS}")
        if not self.parameter.is_monic():
            raise ValueError("operator parameter must be monic")

    def validate(self, level: Poly) -> None:
        from .fq import is_irreducible

        p = self.parameter
        if self.kind in ("T", "U", "K") and (p.deg < 1 or not is_irreducible(p)):
            raise ValueError(f"{self.kind} wants a prime parameter")
        if self.kind == "U" and not p.divides(level):
            raise ValueError("U_p needs p | level")
        if self.kind == "T" and p.divides(level):
            raise ValueError("T_p needs p coprime to the level")
        if self.kind == "W":
            if not p.divides(level) or not gcd_poly(p, level // p).is_one():
                raise ValueError("W_m needs m || level")

    def apply(self, f: FourierData) -> FourierData:
        self.validate(f.level)
        if self.kind == "B":
            return apply_b(f, self.parameter)
        if self.kind == "T":
            return apply_t(f, self.parameter)
        if self.kind == "U":
            return apply_u(f, self.parameter)
        if self.kind == "K":
            return apply_k(f, self.parameter)
        raise ValueError("W acts pointwise; use apply_w_pointwise")


def apply_b(f: FourierData, m: Poly) -> FourierData:
    """f | B_m: level and depth grow by m; star shifts; pairing is unchanged
    (the reversal involution commutes with every left action)."""
    if m.is_zero() or not m.is_monic():
        raise ValueError("B_m wants a monic nonzero m")
    return FourierData(
        field=f.field,
        ring=f.ring,
        level=f.level * m,
        depth=f.depth + m.deg,
        c0=f.c0 * m.norm(),
        pairing=f.pairing,
        star=f.star.shift_b(m),
    )


def _require_prime_arg(f: FourierData, p: Poly) -> None:
    from .fq import is_irreducible

    if not p.is_monic() or p.deg < 1 or not is_irreducible(p):
        raise ValueError("operator parameter must be a monic prime")


def apply_u(f: FourierData, p: Poly) -> FourierData:
    """f | U_p for p dividing the level: star(m) -> |p| star(m p), c0 fixed."""
    _require_prime_arg(f, p)
    if not p.divides(f.level):
        raise ValueError("U_p needs p | level (use T_p away from the level)")
    if p.deg > f.depth:
        raise DepthError("depth underflow applying U_p")
    depth = f.depth - p.deg
    np_ = p.norm()
    table = {}
    for d in range(depth + 1):
        for m in monic_polys(f.field, d):
            table[m] = f.star.value(m * p) * np_
    return FourierData(
        field=f.field,
        ring=f.ring,
        level=f.level,
        depth=depth,
        c0=f.c0,
        pairing=f.pairing * np_,
        star=TableStar(f.field, f.ring, table, depth),
    )


def apply_t(f: FourierData, p: Poly) -> FourierData:
    """f | T_p = f | U_p + f | B_p for p coprime to the level."""
    _require_prime_arg(f, p)
    if p.divides(f.level):
        raise ValueError("T_p needs p coprime to the level (use U_p at the level)")
    if p.deg > f.depth:
        raise DepthError("depth underflow applying T_p")
    depth = f.depth - p.deg
    np_ = p.norm()
    table = {}
    for d in range(depth + 1):
        for m in monic_polys(f.field, d):
            v = f.star.value(m * p) * np_
            if p.divides(m):
                v = v + f.star.value(m // p)
            table[m] = v
    return FourierData(
        field=f.field,
        ring=f.ring,
        level=f.level,
        depth=depth,
        c0=f.c0 * (np_ + 1),
        pairing=f.pairing * (np_ + 1),
        star=TableStar(f.field, f.ring, table, depth),
    )


def apply_k(f: FourierData, p: Poly) -> FourierData:
    """The annihilator K_p = 1 - |p|^(-1) U_p B_p: keeps star(m) for p
    coprime to m, kills the rest; level grows by p, constant and pairing die."""
    _require_prime_arg(f, p)
    if p.deg > f.depth:
        raise DepthError("depth underflow applying K_p")
    table = {}
    for d in range(f.depth + 1):
        for m in monic_polys(f.field, d):
            table[m] = f.ring.zero() if p.divides(m) else f.star.value(m)
    return FourierData(
        field=f.field,
        ring=f.ring,
        level=f.level * p,
        depth=f.depth,
        c0=f.ring.zero(),
        pairing=f.ring.zero(),
        star=TableStar(f.field, f.ring, table, f.depth),
    )


def level_lower(f: FourierData, p: Poly) -> FourierData:
    """Given star supported on multiples of p (checked), the g with
    f = g | B_p and f | W_p = g, one level down."""
    _require_prime_arg(f, p)
    if not p.divides(f.level) or p.divides(f.level // p):
        raise ValueError("level lowering wants p exactly dividing the level")
    for d in range(f.depth + 1):
        for m in monic_polys(f.field, d):
            if not p.divides(m) and not f.star.value(m).is_zero():
                raise ValueError("star is not supported on multiples of p")
    if p.deg > f.depth:
        raise DepthError("depth underflow lowering the level")
    depth = f.depth - p.deg
    table = {}
    for d in range(depth + 1):
        for m in monic_polys(f.field, d):
            table[m] = f.star.value(m * p)
    return FourierData(
        field=f.field,
        ring=f.ring,
        level=f.level // p,
        depth=depth,
        c0=f.c0.div_q_pow(f.field.q, p.deg),
        pairing=f.pairing,
        star=TableStar(f.field, f.ring, table, depth),
    )


# ---------------------------------------------------------------------------
# Atkin-Lehner matrices and pointwise operator oracles

def w_matrix(n: Poly, m: Poly, variant: int = 0) -> Mat2:
    """A matrix [[a m, b], [c n, d m]] with det exactly m, for m || n.

    variant selects among valid choices (the action must not depend on it).
    """
    if not (m.is_monic() and n.is_monic()):
        raise ValueError("level and divisor must be monic")
    if not m.divides(n) or not gcd_poly(m, n // m).is_one():
        raise ValueError("W_m needs m || n")
    g, s, t = xgcd(m, n // m)
    assert g.is_one()
    if variant:
        # s -> s + h (n/m), t -> t - h m preserves s m + t (n/m) = 1
        h = Poly.x(m.field) ** (variant - 1)
        s = s + h * (n // m)
        t = t - h * m
    return Mat2.from_polys(s * m, -t, n, m)


def apply_w_pointwise(
    values: Callable[[TreeEdge], Cyc], n: Poly, m: Poly, variant: int = 0
) -> Callable[[TreeEdge], Cyc]:
    """e -> f(W_m e); independent of the matrix choice on level-n cochains."""
    w = w_matrix(n, m, variant)
    return lambda e: values(act(w, e))


def apply_u_pointwise(
    values: Callable[[TreeEdge], Cyc], p: Poly
) -> Callable[[TreeEdge], Cyc]:
    """Definition-level U_p: sum over deg b < deg p of f(B_p^(-1) S_b e)."""
    F = p.field
    mats = []
    for db in range(p.deg):
        for b in monic_polys(F, db):
            for lead in range(1, F.q):
                bb = b.scale(lead)
                mats.append(Mat2.from_polys(Poly.one(F), bb, Poly.zero(F), p))
    mats.append(Mat2.from_polys(Poly.one(F), Poly.zero(F), Poly.zero(F), p))

    def out(e: TreeEdge) -> Cyc:
        total = None
        for g in mats:
            v = values(act(g, e))
            total = v if total is None else total + v
        return total

    return out


def apply_b_pointwise(
    values: Callable[[TreeEdge], Cyc], m: Poly
) -> Callable[[TreeEdge], Cyc]:
    g = b_mat(m)
    return lambda e: values(act(g, e))


def apply_t_pointwise(
    values: Callable[[TreeEdge], Cyc], p: Poly
) -> Callable[[TreeEdge], Cyc]:
    up = apply_u_pointwise(values, p)
    bp = apply_b_pointwise(values, p)
    return lambda e: up(e) + bp(e)


def apply_k_pointwise(
    values: Callable[[TreeEdge], Cyc], p: Poly, ring: CycloRing
) -> Callable[[TreeEdge], Cyc]:
    """K_p = 1 - |p|^(-1) U_p B_p as an edge evaluator (U first, then B)."""
    F = p.field
    u_part = apply_u_pointwise(values, p)
    ub_part = apply_b_pointwise(u_part, p)

    def out(e: TreeEdge) -> Cyc:
        return values(e) - ub_part(e).div_q_pow(F.q, p.deg)

    return out
