"""Finite fields F_q (q = p^e) and exact polynomial arithmetic over them.

Field elements are integer labels 0..q-1 encoding the coefficient vector
(a_0, ..., a_{e-1}) over F_p in base p, with respect to the power basis of a
user-supplied irreducible modulus when e > 1.  All element arithmetic is
table-driven, so extension fields cost the same as prime fields at runtime.
Labels 0..p-1 are exactly the prime subfield.

Polynomials are immutable coefficient tuples (ascending degree, no trailing
zeros); ideals of F_q[T] are identified with their monic generators
throughout.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# F_p[x] helpers used only while constructing a field (plain int lists).

def _fp_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_trim(out)


def _fp_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        a = _fp_trim(a)
        if not a or len(a) - 1 < dm:
            break
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for j, y in enumerate(m):
            a[shift + j] = (a[shift + j] - c * y) % p
        a = _fp_trim(a)
    return a


def _fp_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _fp_powmod_x(pk: int, m: Sequence[int], p: int) -> list[int]:
    """x^(p^pk) reduced mod m, by iterated Frobenius."""
    r = _fp_mod([0, 1], m, p)
    for _ in range(pk):
        acc = _fp_mod([1], m, p)
        base = r
        n = p
        while n:
            if n & 1:
                acc = _fp_mod(_fp_mul(acc, base, p), m, p)
            base = _fp_mod(_fp_mul(base, base, p), m, p)
            n >>= 1
        r = acc
    return r


def _fp_sub_x(f: Sequence[int], p: int) -> list[int]:
    out = list(f)
    while len(out) < 2:
        out.append(0)
    out[1] = (out[1] - 1) % p
    return _fp_trim(out)


def _fp_irreducible(m: Sequence[int], p: int) -> bool:
    e = len(m) - 1
    if e < 1:
        return False
    # Rabin: x^(p^e) == x mod m, and gcd(x^(p^(e/r)) - x, m) = 1 for primes r | e.
    if _fp_sub_x(_fp_powmod_x(e, m, p), p):
        return False
    for r in {d for d in range(2, e + 1) if e % d == 0 and _is_prime(d)}:
        diff = _fp_sub_x(_fp_powmod_x(e // r, m, p), p)
        g = _fp_gcd(m, diff, p) if diff else list(m)
        if len(g) - 1 >= 1:
            return False
    return True


class Fq:
    """The finite field F_q, q = p^e, with table-driven element arithmetic.

    For e > 1 a modulus must be supplied as the ascending F_p coefficient
    tuple of a monic irreducible of degree e (printed in the generator
    symbol ``g``).  Standard generator tables are intentionally out of
    scope; callers choose their modulus.
    """

    def __init__(self, p: int, e: int = 1, modulus: Sequence[int] | None = None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        if e == 1:
            if modulus is not None:
                raise ValueError("modulus only applies to extension fields")
            mod = (0, 1)
        else:
            if modulus is None:
                raise ValueError(f"F_{p}^{e} needs an irreducible modulus over F_{p}")
            mod = tuple(int(c) % p for c in modulus)
            if len(mod) != e + 1 or mod[-1] != 1:
                raise ValueError("modulus must be monic of degree e")
            if not _fp_irreducible(mod, p):
                raise ValueError("modulus is reducible over F_p")
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = mod
        self._build_tables()

    def _vec(self, a: int) -> list[int]:
        v = []
        for _ in range(self.e):
            v.append(a % self.p)
            a //= self.p
        return v

    def _label(self, v: Sequence[int]) -> int:
        a = 0
        for c in reversed(v):
            a = a * self.p + (c % self.p)
        return a

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q
        self.add_t = [[0] * q for _ in range(q)]
        self.mul_t = [[0] * q for _ in range(q)]
        self.neg_t = [0] * q
        vecs = [self._vec(a) for a in range(q)]
        for a in range(q):
            self.neg_t[a] = self._label([(-x) % p for x in vecs[a]])
            for b in range(q):
                self.add_t[a][b] = self._label([(x + y) % p for x, y in zip(vecs[a], vecs[b])])
                prod = _fp_mod(_fp_mul(vecs[a], vecs[b], p), self.modulus, p)
                prod += [0] * (e - len(prod))
                self.mul_t[a][b] = self._label(prod)
        self.inv_t = [0] * q
        for a in range(1, q):
            self.inv_t[a] = self.pow(a, q - 2)
        # Trace to F_p: sum of the Frobenius orbit a + a^p + ... + a^(p^(e-1)).
        self.trace_t = [0] * q
        for a in range(q):
            acc, x = 0, a
            for _ in range(e):
                acc = self.add_t[acc][x]
                x = self.pow(x, p)
            if acc >= p:
                raise AssertionError("trace left the prime subfield")
            self.trace_t[a] = acc

    # -- element operations ------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return self.add_t[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_t[a][self.neg_t[b]]

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_t[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_q")
        return self.inv_t[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_t[a][self.inv(b)]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        r, base = 1, a
        while n:
            if n & 1:
                r = self.mul_t[r][base]
            base = self.mul_t[base][base]
            n >>= 1
        return r

    def trace(self, a: int) -> int:
        """Trace to F_p, returned as an integer in 0..p-1."""
        return self.trace_t[a]

    def elements(self) -> range:
        return range(self.q)

    def label_str(self, a: int) -> str:
        """Element as a polynomial in the generator g (plain int for e = 1)."""
        if self.e == 1 or a < self.p:
            return str(a)
        v = self._vec(a)
        terms = []
        for i in range(self.e - 1, -1, -1):
            c = v[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                gpow = "g" if i == 1 else f"g^{i}"
                terms.append(gpow if c == 1 else f"{c}*{gpow}")
        return "+".join(terms) if terms else "0"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Fq)
            and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __repr__(self) -> str:
        return f"Fq({self.p})" if self.e == 1 else f"Fq({self.p}^{self.e})"


class Poly:
    """Polynomial over F_q: immutable ascending coefficient tuple of labels.

    The zero polynomial has an empty tuple and degree -1 (callers that need
    deg(0) = -infinity must guard); |f| = q^deg(f) for nonzero f.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Fq, coeffs: Iterable[int]):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.field = field
        self.coeffs = tuple(c)

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, field: Fq) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: Fq) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def const(cls, field: Fq, a: int) -> "Poly":
        return cls(field, (a,))

    @classmethod
    def x(cls, field: Fq) -> "Poly":
        return cls(field, (0, 1))

    # -- structure -----------------------------------------------------------
    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def lead(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def norm(self) -> int:
        """|f| = q^deg f = #(A / f) for nonzero f."""
        if self.is_zero():
            raise ValueError("norm of the zero polynomial")
        return self.field.q ** self.deg

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = F.add_t[out[i]][y]
        return Poly(F, out)

    def __neg__(self) -> "Poly":
        F = self.field
        return Poly(F, (F.neg_t[c] for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                row = F.mul_t[x]
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = F.add_t[out[i + j]][row[y]]
        return Poly(F, out)

    def scale(self, a: int) -> "Poly":
        F = self.field
        if a == 0:
            return Poly.zero(F)
        row = F.mul_t[a]
        return Poly(F, (row[c] for c in self.coeffs))

    def shift(self, n: int) -> "Poly":
        """Multiply by T^n (n >= 0)."""
        if self.is_zero():
            return self
        return Poly(self.field, (0,) * n + self.coeffs)

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.coeffs
        dd = len(d) - 1
        inv_lead = F.inv(d[-1])
        q = [0] * max(0, len(r) - dd)
        while len(r) - 1 >= dd and r:
            c = F.mul_t[r[-1]][inv_lead]
            sh = len(r) - 1 - dd
            q[sh] = c
            row = F.mul_t[c]
            for j, y in enumerate(d):
                r[sh + j] = F.sub(r[sh + j], row[y])
            while r and r[-1] == 0:
                r.pop()
        return Poly(F, q), Poly(F, r)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        r, base = Poly.one(self.field), self
        while n:
            if n & 1:
                r = r * base
            base = base * base
            n >>= 1
        return r

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.lead()))

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    # -- comparisons / hashing -------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs and self.field == other.field

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def sort_key(self) -> tuple:
        return (self.deg, self.coeffs[::-1])

    def __repr__(self) -> str:
        return f"Poly({poly_to_str(self)})"


# ---------------------------------------------------------------------------
# gcd machinery

def gcd_poly(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Monic g = gcd(a, b) with g = s*a + t*b.  Errors if both inputs are zero."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd undefined: both inputs zero")
    F = a.field
    r0, r1 = a, b
    s0, s1 = Poly.one(F), Poly.zero(F)
    t0, t1 = Poly.zero(F), Poly.one(F)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lead_inv = F.inv(r0.lead())
    return r0.scale(lead_inv), s0.scale(lead_inv), t0.scale(lead_inv)


def crt(pairs: Sequence[tuple[Poly, Poly]]) -> Poly:
    """Solve r = residue_i mod modulus_i for pairwise coprime moduli.

    Result has deg < sum of the moduli degrees.
    """
    if not pairs:
        raise ValueError("crt needs at least one (modulus, residue) pair")
    F = pairs[0][0].field
    mod_acc, r_acc = pairs[0][0], pairs[0][1] % pairs[0][0]
    for m, r in pairs[1:]:
        g, s, t = xgcd(mod_acc, m)
        if not g.is_one():
            raise ValueError("crt moduli are not pairwise coprime")
        # r_new = r_acc + mod_acc * s * (r - r_acc)  (mod mod_acc * m)
        new_mod = mod_acc * m
        r_acc = (r_acc + mod_acc * (s * (r - r_acc) % m)) % new_mod
        mod_acc = new_mod
    return r_acc


# ---------------------------------------------------------------------------
# irreducibility, primes, divisor sums

def _pow_frobenius(f: Poly, k: int) -> Poly:
    """x^(q^k) mod f."""
    F = f.field
    r = Poly.x(F) % f
    for _ in range(k):
        acc = Poly.one(F) % f
        base = r
        n = F.q
        while n:
            if n & 1:
                acc = (acc * base) % f
            base = (base * base) % f
            n >>= 1
        r = acc
    return r


def is_irreducible(f: Poly) -> bool:
    """Rabin's test over F_q.  Errors on constant input."""
    if f.deg < 1:
        raise ValueError("irreducibility is undefined for constants")
    n = f.deg
    x = Poly.x(f.field)
    if not ((_pow_frobenius(f, n) - x) % f).is_zero():
        return False
    for r in {d for d in range(2, n + 1) if n % d == 0 and _is_prime(d)}:
        g = gcd_poly(f, (_pow_frobenius(f, n // r) - x) % f)
        if g.deg >= 1:
            return False
    return True


def monic_polys(field: Fq, deg: int) -> Iterator[Poly]:
    """All monic polynomials of exact degree deg (q^deg of them), stable order."""
    if deg < 0:
        return
    for lower in itertools.product(field.elements(), repeat=deg):
        yield Poly(field, lower + (1,))


def monic_irreducibles(field: Fq, max_deg: int) -> list[Poly]:
    out = []
    for d in range(1, max_deg + 1):
        for f in monic_polys(field, d):
            if is_irreducible(f):
                out.append(f)
    return out


def factorize(m: Poly) -> dict[Poly, int]:
    """Monic prime factorization by trial division (desk-scale inputs).

    Any divisor of minimal degree is automatically irreducible, so plain
    ascending trial division yields the prime factorization.
    """
    if m.is_zero():
        raise ValueError("cannot factor 0")
    m = m.monic()
    out: dict[Poly, int] = {}
    d = 1
    while m.deg >= 1:
        if d > m.deg // 2:
            out[m] = out.get(m, 0) + 1
            break
        for f in monic_polys(m.field, d):
            while f.divides(m):
                out[f] = out.get(f, 0) + 1
                m = m // f
            if m.deg < 1:
                break
        d += 1
    return out


def sigma(m: Poly) -> int:
    """Sum of q^(deg m') over monic divisors m' of m; multiplicative."""
    if m.is_zero():
        raise ValueError("sigma(0) is undefined")
    q = m.field.q
    out = 1
    for prime, a in factorize(m).items():
        qd = q**prime.deg
        out *= sum(qd**j for j in range(a + 1))
    return out


def divisors_of_squarefree(field: Fq, primes: Sequence[Poly]) -> list[Poly]:
    """The 2^s monic divisors of p_1 ... p_s, sorted by (degree, coefficients)."""
    out = [Poly.one(field)]
    for p in primes:
        out = out + [d * p for d in out]
    return sorted(out, key=lambda d: d.sort_key())


# ---------------------------------------------------------------------------
# text format: "T^3+2*T+1", generator "g" for extension coefficients

def _coeff_str(field: Fq, a: int) -> str:
    s = field.label_str(a)
    return f"({s})" if "+" in s else s


def poly_to_str(f: Poly) -> str:
    if f.is_zero():
        return "0"
    terms = []
    for i in range(f.deg, -1, -1):
        c = f[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(_coeff_str(f.field, c))
        else:
            tpow = "T" if i == 1 else f"T^{i}"
            terms.append(tpow if c == 1 else f"{_coeff_str(f.field, c)}*{tpow}")
    return "+".join(terms)


def _parse_coeff(field: Fq, tok: str) -> int:
    tok = tok.strip()
    if tok.startswith("(") and tok.endswith(")"):
        tok = tok[1:-1]
    label = 0
    for part in tok.split("+"):
        part = part.strip()
        if not part:
            raise ValueError("empty coefficient term")
        if "g" in part:
            if field.e == 1:
                raise ValueError("generator g used over a prime field")
            if "*" in part:
                cstr, gstr = part.split("*", 1)
            else:
                cstr, gstr = "1", part
            c = int(cstr)
            gstr = gstr.strip()
            if gstr == "g":
                k = 1
            elif gstr.startswith("g^"):
                k = int(gstr[2:])
            else:
                raise ValueError(f"bad generator term {part!r}")
            if not (0 <= c < field.p) or not (1 <= k < field.e):
                raise ValueError(f"non-canonical coefficient {part!r}")
            vec = [0] * field.e
            vec[k] = c
            label = field.add(label, field._label(vec))
        else:
            c = int(part)
            if not (0 <= c < field.p):
                raise ValueError(f"coefficient {c} not in 0..{field.p - 1}")
            label = field.add(label, c)
    return label


def poly_from_str(field: Fq, s: str) -> Poly:
    """Parse "T^3+2*T+1" (generator g allowed in coefficients for e > 1).

    Rejects non-canonical coefficient values and repeated powers of T.
    """
    s = s.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial string")
    if s == "0":
        return Poly.zero(field)
    # split on '+' at paren depth 0
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if ch == "+" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if depth != 0:
        raise ValueError("unbalanced parentheses")
    seen: dict[int, int] = {}
    for part in parts:
        if not part:
            raise ValueError("empty term")
        if "T" in part:
            head, _, tail = part.partition("T")
            if head:
                if not head.endswith("*"):
                    raise ValueError(f"bad term {part!r}: use coeff*T^k")
                head = head[:-1]
            if tail == "":
                k = 1
            elif tail.startswith("^"):
                k = int(tail[1:])
                if k < 1:
                    raise ValueError("powers of T must be positive")
            else:
                raise ValueError(f"bad term {part!r}")
            c = _parse_coeff(field, head) if head else 1
        else:
            k = 0
            c = _parse_coeff(field, part)
        if k in seen:
            raise ValueError(f"repeated power T^{k}")
        seen[k] = c
    coeffs = [0] * (max(seen) + 1)
    for k, c in seen.items():
        coeffs[k] = c
    return Poly(field, coeffs)
