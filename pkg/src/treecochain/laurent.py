"""Exact rational functions over F_q with Laurent expansion at infinity.

The place at infinity of F_q(T) has uniformizer pi = 1/T, and
ord(f/g) = deg g - deg f.  Every value here is an exact fraction of
polynomials; Laurent windows are computed on demand and memoized (write-once
per index, so the cache is invisible to callers).  Finite Laurent tails
(elements of F_q[T, 1/T], used for tree-edge coordinates) are plain
{exponent: label} dicts with nonzero labels.
"""

from __future__ import annotations

import math
from typing import Mapping

from .fq import Fq, Poly, gcd_poly

ORD_ZERO = math.inf  # ord at infinity of the zero function

Tail = dict[int, int]


class RatF:
    """num/den over F_q, normalized: den monic, gcd(num, den) = 1."""

    __slots__ = ("num", "den", "_ser")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly.zero(num.field), Poly.one(num.field)
        else:
            g = gcd_poly(num, den)
            if g.deg >= 1:
                num, den = num // g, den // g
            lead_inv = num.field.inv(den.lead())
            num, den = num.scale(lead_inv), den.scale(lead_inv)
        self.num = num
        self.den = den
        self._ser: list[int] | None = None

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_poly(cls, f: Poly) -> "RatF":
        return cls(f, Poly.one(f.field))

    @classmethod
    def zero(cls, field: Fq) -> "RatF":
        return cls(Poly.zero(field), Poly.one(field))

    @classmethod
    def one(cls, field: Fq) -> "RatF":
        return cls(Poly.one(field), Poly.one(field))

    @classmethod
    def pi_pow(cls, field: Fq, k: int) -> "RatF":
        """pi^k = T^(-k)."""
        if k <= 0:
            return cls(Poly.x(field) ** (-k), Poly.one(field))
        return cls(Poly.one(field), Poly.x(field) ** k)

    @property
    def field(self) -> Fq:
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def ord(self) -> int | float:
        """ord at infinity; +inf for 0."""
        if self.num.is_zero():
            return ORD_ZERO
        return self.den.deg - self.num.deg

    # -- arithmetic -------------------------------------------------------------
    def __add__(self, other: "RatF") -> "RatF":
        return RatF(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatF") -> "RatF":
        return RatF(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatF":
        return RatF(-self.num, self.den)

    def __mul__(self, other: "RatF") -> "RatF":
        return RatF(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatF") -> "RatF":
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RatF(self.num * other.den, self.den * other.num)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RatF) and self.num == other.num and self.den == other.den
        )

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        from .fq import poly_to_str

        if self.den.is_one():
            return f"RatF({poly_to_str(self.num)})"
        return f"RatF(({poly_to_str(self.num)})/({poly_to_str(self.den)}))"

    def is_poly(self) -> bool:
        return self.den.is_one()

    # -- Laurent expansion --------------------------------------------------------
    def _extend_series(self, count: int) -> None:
        # num/den = pi^ord * N(pi)/D(pi) with N, D power series in pi,
        # D(0) != 0; divide as power series.
        F = self.field
        if self._ser is None:
            self._ser = []
        if self.num.is_zero():
            return
        n_rev = self.num.coeffs[::-1]
        d_rev = self.den.coeffs[::-1]
        d0_inv = F.inv(d_rev[0])
        ser = self._ser
        while len(ser) < count:
            j = len(ser)
            acc = n_rev[j] if j < len(n_rev) else 0
            for i in range(1, min(j, len(d_rev) - 1) + 1):
                acc = F.sub(acc, F.mul(d_rev[i], ser[j - i]))
            ser.append(F.mul(acc, d0_inv))

    def coeff(self, i: int) -> int:
        """Laurent coefficient of pi^i at infinity."""
        if self.num.is_zero():
            return 0
        base = self.den.deg - self.num.deg
        if i < base:
            return 0
        self._extend_series(i - base + 1)
        return self._ser[i - base]

    def tail_below(self, hi: int) -> Tail:
        """Coefficients {i: a_i != 0} of the expansion for i < hi (exact)."""
        if self.num.is_zero():
            return {}
        base = self.den.deg - self.num.deg
        out: Tail = {}
        for i in range(base, hi):
            a = self.coeff(i)
            if a:
                out[i] = a
        return out

    def truncated(self, hi: int) -> "RatF":
        """The finite tail of the expansion below pi^hi, as an exact function."""
        return ratf_from_tail(self.field, self.tail_below(hi))


# ---------------------------------------------------------------------------
# finite Laurent tails

def tail_canonical(tail: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((i, a) for i, a in tail.items() if a))


def tail_coeff(tail: Mapping[int, int], i: int) -> int:
    return tail.get(i, 0)


def ratf_from_tail(field: Fq, tail: Mapping[int, int]) -> RatF:
    """Sum of a_i * T^(-i) as an exact rational function."""
    if not tail:
        return RatF.zero(field)
    shift = max(max(tail), 0)
    coeffs = [0] * (shift - min(tail) + 1)
    for i, a in tail.items():
        coeffs[shift - i] = a
    return RatF(Poly(field, coeffs), Poly.x(field) ** shift)


def tail_mul_poly(field: Fq, tail: Mapping[int, int], f: Poly) -> Tail:
    """Tail of f * u where u is a finite tail (exact: T^j shifts indices by -j)."""
    out: Tail = {}
    for j, c in enumerate(f.coeffs):
        if c == 0:
            continue
        row = field.mul_t[c]
        for i, a in tail.items():
            k = i - j
            v = field.add(out.get(k, 0), row[a])
            if v:
                out[k] = v
            elif k in out:
                del out[k]
    return out


def tail_add(field: Fq, t1: Mapping[int, int], t2: Mapping[int, int]) -> Tail:
    out: Tail = dict(t1)
    for i, a in t2.items():
        v = field.add(out.get(i, 0), a)
        if v:
            out[i] = v
        elif i in out:
            del out[i]
    return out


def tail_polypart(field: Fq, tail: Mapping[int, int]) -> Poly:
    """The polynomial part: sum over indices i <= 0 of a_i * T^(-i)."""
    if not tail:
        return Poly.zero(field)
    lo = min(tail)
    if lo > 0:
        return Poly.zero(field)
    coeffs = [0] * (-lo + 1)
    for i, a in tail.items():
        if i <= 0:
            coeffs[-i] = a
    return Poly(field, coeffs)


def tail_inverse(field: Fq, tail: Mapping[int, int], hi: int) -> Tail:
    """Tail (below pi^hi) of 1/u for a nonzero finite tail u.

    Power-series inversion of the unit part: if u = pi^m * (a_m + ...), the
    inverse starts at pi^(-m).
    """
    if not tail:
        raise ZeroDivisionError("inverse of the zero tail")
    m = min(tail)
    count = hi + m  # coefficients of the inverse from pi^(-m) to pi^(hi-1)
    if count <= 0:
        return {}
    a = [tail.get(m + j, 0) for j in range(count)]
    a0_inv = field.inv(a[0])
    b = [0] * count
    b[0] = a0_inv
    for j in range(1, count):
        acc = 0
        for i in range(1, j + 1):
            if a[i]:
                acc = field.add(acc, field.mul(a[i], b[j - i]))
        b[j] = field.mul(field.neg(acc), a0_inv)
    return {(-m + j): b[j] for j in range(count) if b[j]}
