"""Smith normal form over Z with unimodular transforms, exact arithmetic.

smith_normal_form(M) returns (U, D, V) with U M V = D, U and V unimodular,
and the diagonal d_1 | d_2 | ... (nonnegative).  Plain row/column reduction
with a divisibility fix-up pass; Python integers keep everything exact.
"""

from __future__ import annotations

Matrix = list[list[int]]


def _identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return []
    rows, inner, cols = len(a), len(b), len(b[0])
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                oi = out[i]
                for j in range(cols):
                    oi[j] += x * bk[j]
    return out


def _det2_unimodular(a: int, b: int, c: int, d: int) -> None:
    assert abs(a * d - b * c) == 1


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """(U, D, V) with U m V = D diagonal, d_1 | d_2 | ..., U, V unimodular."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    u = _identity(rows)
    v = _identity(cols)

    def row_op(i, j, x, y, z, w):
        # rows i, j <- (x i + y j, z i + w j); det must be a unit
        _det2_unimodular(x, y, z, w)
        for mat in (a, u):
            ri, rj = mat[i], mat[j]
            for k in range(len(ri)):
                ri[k], rj[k] = x * ri[k] + y * rj[k], z * ri[k] + w * rj[k]

    def col_op(i, j, x, y, z, w):
        _det2_unimodular(x, y, z, w)
        for mat in (a, v):
            for r in mat:
                r[i], r[j] = x * r[i] + z * r[j], y * r[i] + w * r[j]

    def reduce_at(t: int) -> None:
        while True:
            # find a pivot
            piv = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j]:
                        piv = (i, j)
                        break
                if piv:
                    break
            if piv is None:
                return
            pi, pj = piv
            if pi != t:
                row_op(t, pi, 0, 1, 1, 0)
            if pj != t:
                col_op(t, pj, 0, 1, 1, 0)
            # clear column and row t; plain elementary clears when the pivot
            # divides (a Bezout transform would churn the pivot row forever),
            # gcd transforms otherwise (each strictly shrinks |pivot|)
            changed = True
            while changed:
                changed = False
                for i in range(t + 1, rows):
                    if a[i][t]:
                        p, x = a[t][t], a[i][t]
                        if x % p == 0:
                            row_op(t, i, 1, 0, -(x // p), 1)
                        else:
                            g, s, tt = _xgcd(p, x)
                            row_op(t, i, s, tt, -(x // g), p // g)
                        changed = True
                for j in range(t + 1, cols):
                    if a[t][j]:
                        p, x = a[t][t], a[t][j]
                        if x % p == 0:
                            col_op(t, j, 1, -(x // p), 0, 1)
                        else:
                            g, s, tt = _xgcd(p, x)
                            # col_t <- s col_t + tt col_j (pivot g), col_j cleared
                            col_op(t, j, s, -(x // g), tt, p // g)
                        changed = True
            # clearing columns can refill the row and vice versa; loop until both clear
            if all(a[i][t] == 0 for i in range(t + 1, rows)) and all(
                a[t][j] == 0 for j in range(t + 1, cols)
            ):
                return

    def negate_row(i: int) -> None:
        for mat in (a, u):
            mat[i] = [-x for x in mat[i]]

    def normalize_signs() -> None:
        for t in range(r):
            if a[t][t] < 0:
                negate_row(t)

    r = min(rows, cols)
    for t in range(r):
        reduce_at(t)
    normalize_signs()

    # divisibility chain: if d_t does not divide d_{t+1}, fold and redo
    t = 0
    while t < r - 1:
        dt, dn = a[t][t], a[t + 1][t + 1]
        if dt and dn % dt != 0:
            # add column t+1 into column t, then re-reduce the block at t
            col_op(t, t + 1, 1, 0, 1, 1)
            reduce_at(t)
            normalize_signs()
            t = 0
            continue
        if dt == 0 and dn != 0:
            # zero diagonal entries must come last; swap
            row_op(t, t + 1, 0, 1, 1, 0)
            col_op(t, t + 1, 0, 1, 1, 0)
            t = 0
            continue
        t += 1
    return u, a, v


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g = gcd(a,b) > 0 with g = s a + t b."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def elementary_divisors(m: Matrix) -> list[int]:
    """The nonzero diagonal of the Smith form (without 1s removed)."""
    _, d, _ = smith_normal_form(m)
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        out.append(d[i][i])
    return out


def is_unimodular(m: Matrix) -> bool:
    return abs(_det(m)) == 1


def _det(m: Matrix) -> int:
    n = len(m)
    a = [[x for x in row] for row in m]
    from fractions import Fraction

    af = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if af[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            af[c], af[piv] = af[piv], af[c]
            det = -det
        det *= af[c][c]
        inv = 1 / af[c][c]
        for r in range(c + 1, n):
            if af[r][c]:
                f = af[r][c] * inv
                af[r] = [x - f * y for x, y in zip(af[r], af[c])]
    assert det.denominator == 1
    return int(det)
