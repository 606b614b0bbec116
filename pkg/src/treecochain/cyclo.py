"""Exact cyclotomic scalars: Z[zeta_p, 1/p], or (Z/l^r Z)[zeta_p].

zeta is a primitive p-th root of unity, represented on the basis
1, zeta, ..., zeta^(p-2) with the relation 1 + zeta + ... + zeta^(p-1) = 0
held exactly.  Exact-mode values carry an explicit p-power denominator
(p is the one prime the theory inverts); mod-mode values live over Z/l^r
with gcd(l, p) = 1 enforced, where p is invertible.

The additive character eta sends sum a_i pi^i to zeta^(Tr(a_1)); any
nontrivial character works, so a multiplier c in 1..p-1 (eta_0 replaced by
its c-th power) is accepted and independence can be tested.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .fq import Fq, _is_prime


class CycloRing:
    """Descriptor for the coefficient ring: exact Z[zeta_p, 1/p] or mod l^r."""

    def __init__(self, p: int, modulus: int | None = None):
        if not _is_prime(p):
            raise ValueError("p must be prime")
        if modulus is not None:
            if modulus < 2:
                raise ValueError("modulus must be >= 2")
            if gcd(modulus, p) != 1:
                raise ValueError("p must be invertible: gcd(l^r, p) = 1 required")
        self.p = p
        self.modulus = modulus
        self.dim = p - 1

    @property
    def exact(self) -> bool:
        return self.modulus is None

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CycloRing)
            and (self.p, self.modulus) == (other.p, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    def __repr__(self) -> str:
        if self.exact:
            return f"CycloRing(p={self.p})"
        return f"CycloRing(p={self.p}, mod={self.modulus})"

    # -- element constructors --------------------------------------------------
    def make(self, coords: Sequence[int], denpow: int = 0) -> "Cyc":
        return Cyc(self, coords, denpow)

    def zero(self) -> "Cyc":
        return Cyc(self, (0,) * self.dim, 0)

    def one(self) -> "Cyc":
        return self.from_int(1)

    def from_int(self, n: int) -> "Cyc":
        return Cyc(self, (n,) + (0,) * (self.dim - 1), 0)

    def from_fraction(self, x: Fraction | int) -> "Cyc":
        """Embed a rational; exact mode demands a p-power denominator."""
        x = Fraction(x)
        num, den = x.numerator, x.denominator
        if self.exact:
            e = 0
            while den % self.p == 0:
                den //= self.p
                e += 1
            if den != 1:
                raise ValueError(
                    f"denominator {x.denominator} is not a power of p={self.p}"
                )
            return Cyc(self, (num,) + (0,) * (self.dim - 1), e)
        if gcd(den, self.modulus) != 1:
            raise ValueError(f"denominator {den} not invertible mod {self.modulus}")
        val = num * pow(den, -1, self.modulus) % self.modulus
        return Cyc(self, (val,) + (0,) * (self.dim - 1), 0)

    def zeta_pow(self, t: int) -> "Cyc":
        """zeta^t for t in Z (reduced mod p)."""
        t %= self.p
        if t < self.dim:
            coords = [0] * self.dim
            coords[t] = 1
            return Cyc(self, coords, 0)
        # zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
        return Cyc(self, (-1,) * self.dim, 0)

    def convert(self, x: "Cyc") -> "Cyc":
        """Map an exact value into this ring (identity if already here)."""
        if x.ring == self:
            return x
        if not x.ring.exact or x.ring.p != self.p:
            raise ValueError("can only convert exact values into a matching ring")
        if self.exact:
            return x
        p_inv = pow(self.p, -1, self.modulus)
        scale = pow(p_inv, x.denpow, self.modulus)
        return Cyc(self, tuple(c * scale % self.modulus for c in x.coords), 0)


class Cyc:
    """One scalar; immutable, normalized at construction."""

    __slots__ = ("ring", "coords", "denpow")

    def __init__(self, ring: CycloRing, coords: Iterable[int], denpow: int = 0):
        cs = list(coords)
        if len(cs) != ring.dim:
            raise ValueError("wrong coordinate length")
        if ring.exact:
            if denpow < 0:
                cs = [c * ring.p ** (-denpow) for c in cs]
                denpow = 0
            while denpow > 0 and all(c % ring.p == 0 for c in cs):
                cs = [c // ring.p for c in cs]
                denpow -= 1
        else:
            cs = [c % ring.modulus for c in cs]
            denpow = 0
        self.ring = ring
        self.coords = tuple(cs)
        self.denpow = denpow

    def _check(self, other: "Cyc") -> None:
        if self.ring != other.ring:
            raise ValueError("mixed scalar rings")

    # -- ring operations ----------------------------------------------------------
    def __add__(self, other: "Cyc") -> "Cyc":
        self._check(other)
        r = self.ring
        if r.exact:
            e = max(self.denpow, other.denpow)
            sa = r.p ** (e - self.denpow)
            sb = r.p ** (e - other.denpow)
            return Cyc(r, (a * sa + b * sb for a, b in zip(self.coords, other.coords)), e)
        return Cyc(r, (a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Cyc":
        return Cyc(self.ring, (-a for a in self.coords), self.denpow)

    def __sub__(self, other: "Cyc") -> "Cyc":
        return self + (-other)

    def __mul__(self, other: "Cyc | int | Fraction") -> "Cyc":
        r = self.ring
        if isinstance(other, (int, Fraction)):
            return self * r.from_fraction(other)
        self._check(other)
        # convolution mod (zeta^p - 1), then reduction mod the p-th cyclotomic
        p = r.p
        full = [0] * p
        a = self.coords + (0,)
        b = other.coords + (0,)
        for i in range(p):
            ai = a[i]
            if ai:
                for j in range(p):
                    if b[j]:
                        full[(i + j) % p] += ai * b[j]
        last = full[p - 1]
        coords = [full[i] - last for i in range(p - 1)]
        return Cyc(r, coords, self.denpow + other.denpow)

    def __rmul__(self, other: "int | Fraction") -> "Cyc":
        return self * other

    def div_q_pow(self, q: int, k: int) -> "Cyc":
        """Divide by q^k where q is a power of the ring's p (k may be negative)."""
        r = self.ring
        e = 0
        qq = q
        while qq % r.p == 0:
            qq //= r.p
            e += 1
        if qq != 1:
            raise ValueError("q is not a power of p")
        if r.exact:
            return Cyc(r, self.coords, self.denpow + e * k)
        scale = pow(pow(r.p, -1, r.modulus) if k > 0 else r.p, abs(e * k), r.modulus)
        return Cyc(r, (c * scale for c in self.coords))

    # -- predicates / conversions -------------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def to_fraction(self) -> Fraction:
        if not self.ring.exact:
            raise ValueError("mod-mode scalar has no canonical fraction")
        if not self.is_rational():
            raise ValueError("scalar has nonzero cyclotomic part")
        return Fraction(self.coords[0], self.ring.p**self.denpow)

    def is_integer(self) -> bool:
        """True when the value lies in Z (exact mode) or is a plain residue."""
        if self.ring.exact:
            return self.is_rational() and self.denpow == 0
        return self.is_rational()

    def as_int(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self!r} is not an integer")
        return self.coords[0]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if isinstance(other, Fraction):
            other = self.ring.from_fraction(other)
        return (
            isinstance(other, Cyc)
            and self.ring == other.ring
            and self.coords == other.coords
            and self.denpow == other.denpow
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.coords, self.denpow))

    def __repr__(self) -> str:
        if self.is_rational():
            if self.ring.exact:
                return f"Cyc({self.to_fraction()})"
            return f"Cyc({self.coords[0]} mod {self.ring.modulus})"
        body = ",".join(str(c) for c in self.coords)
        if self.ring.exact and self.denpow:
            return f"Cyc([{body}]/p^{self.denpow})"
        return f"Cyc([{body}])"

    # -- serialization ---------------------------------------------------------------
    def to_json(self) -> dict:
        if self.ring.exact:
            return {"coords": list(self.coords), "den_pow": self.denpow}
        return {"coords": list(self.coords), "mod": self.ring.modulus}

    @classmethod
    def from_json(cls, ring: CycloRing, data: dict) -> "Cyc":
        if ring.exact:
            return cls(ring, data["coords"], data.get("den_pow", 0))
        if data.get("mod") != ring.modulus:
            raise ValueError("modulus mismatch in serialized scalar")
        return cls(ring, data["coords"], 0)


def eta_of_coeff(field: Fq, ring: CycloRing, a1: int, char_mult: int = 1) -> Cyc:
    """eta applied to a value whose pi^1 coefficient is a1.

    eta(sum a_i pi^i) = eta_0(Tr(a_1)) with eta_0(t) = zeta^(c*t); c = 1 is
    the reference character, other units c give the alternative characters
    used for independence checks.
    """
    if field.p != ring.p:
        raise ValueError("field characteristic and ring p differ")
    if not (1 <= char_mult < field.p):
        raise ValueError("character multiplier must be a unit mod p")
    return ring.zeta_pow(char_mult * field.trace(a1))


def eta(x, ring: CycloRing, char_mult: int = 1) -> Cyc:
    """eta on an exact rational function or finite tail (reads the pi^1 term)."""
    from .laurent import RatF

    if isinstance(x, RatF):
        return eta_of_coeff(x.field, ring, x.coeff(1), char_mult)
    raise TypeError("eta expects a RatF value")
