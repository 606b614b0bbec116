"""Verification suites: machine checks for every exactly-checkable statement.

Each suite maps onto one verified statement family and produces rows
(name, paper_tag, status, details); paper_tag carries a stable slug naming
the statement the row checks.  Suites are deterministic given (config,
seed), order-normalized before emission, and all comparisons are exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd

from .cochain import (
    DepthError,
    FourierData,
    apply_b,
    apply_k,
    apply_t,
    apply_w_pointwise,
    level_lower,
    star_equal,
    w_matrix,
)
from .cusps import (
    cusp_group,
    cusp_matrix_witness,
    exponent_check,
    validate_cusp_invariant,
)
from .eisenstein import (
    EpsVector,
    annihilator_cascade,
    build_e_eps,
    eisenstein_order,
    etilde_fourier,
    validate_squarefree_level,
)
from .fq import (
    Fq,
    Poly,
    gcd_poly,
    monic_irreducibles,
    monic_polys,
    poly_to_str,
)
from .sampling import sample_until
from .tree import bar, incoming_neighbors, normal_form


@dataclass
class Check:
    name: str
    tag: str
    ok: bool
    details: str = ""

    def row(self) -> dict:
        return {
            "name": self.name,
            "paper_tag": self.tag,
            "status": "pass" if self.ok else "fail",
            "details": self.details,
        }


@dataclass
class RunConfig:
    """Validated run parameters shared by the suites and the CLI."""

    field: Fq
    primes: list[Poly] = dc_field(default_factory=list)
    ell: int | None = None
    r: int = 1
    depth: int = 8
    samples: int = 200
    seed: int = 1
    eps: EpsVector | None = None  # restrict eigencochain suites to one vector

    def __post_init__(self):
        validate_squarefree_level(self.field, self.primes)
        if self.eps is not None and self.eps.s != len(self.primes):
            raise ValueError("eps length differs from the number of level primes")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.ell is not None:
            from .fq import _is_prime

            if not _is_prime(self.ell):
                raise ValueError(f"l = {self.ell} is not prime")
            q = self.field.q
            if (q * (q - 1)) % self.ell == 0:
                raise ValueError("l must not divide q(q-1)")
        if self.r < 1:
            raise ValueError("r must be >= 1")

    @property
    def level(self) -> Poly:
        n = Poly.one(self.field)
        for p in self.primes:
            n = n * p
        return n

    def rng(self) -> random.Random:
        return random.Random(self.seed)

    def describe(self) -> dict:
        out = {
            "q": self.field.q,
            "level": [poly_to_str(p) for p in self.primes],
            "depth": self.depth,
            "samples": self.samples,
            "seed": self.seed,
        }
        if self.field.e > 1:
            gen_mod = Poly(Fq(self.field.p), self.field.modulus)
            out["ext_modulus"] = poly_to_str(gen_mod).replace("T", "g")
        if self.ell is not None:
            out["ell"] = self.ell
            out["r"] = self.r
        return out


def _eps_vectors(cfg: RunConfig) -> list[EpsVector]:
    if cfg.eps is not None:
        return [cfg.eps]
    return EpsVector.all_vectors(len(cfg.primes))


def _eigen_family(cfg: RunConfig) -> list[tuple[str, FourierData]]:
    """The level-one generator plus the requested E^eps at the level."""
    out = [("etilde", etilde_fourier(cfg.field, cfg.depth))]
    if cfg.primes:
        for eps in _eps_vectors(cfg):
            _, data = build_e_eps(cfg.field, cfg.primes, eps, cfg.depth)
            out.append((f"E^{eps}", data))
    return out


def _in_depth(data: FourierData, e) -> bool:
    try:
        data.eval(e)
        return True
    except DepthError:
        return False


# ---------------------------------------------------------------------------
# suites

def suite_pharm(cfg: RunConfig) -> list[Check]:
    """Flow identity: the value at e equals the sum over incoming neighbors."""
    checks = []
    rng = cfg.rng()
    family = _eigen_family(cfg)
    for label, data in family:
        edges = sample_until(
            rng,
            cfg.field,
            cfg.depth - 1,
            cfg.samples,
            lambda e: _in_depth(data, e)
            and all(_in_depth(data, nb) for nb in incoming_neighbors(e)),
        )
        bad = 0
        for e in edges:
            total = None
            for nb in incoming_neighbors(e):
                v = data.eval(nb)
                total = v if total is None else total + v
            if total != data.eval(e):
                bad += 1
        checks.append(
            Check(
                f"flow[{label}]",
                "flow-identity",
                bad == 0,
                f"{len(edges)} edges, {bad} failures",
            )
        )
    return checks


def suite_pairing(cfg: RunConfig) -> list[Check]:
    """f(e) + f(bar e) equals the pairing constant at sampled edges."""
    checks = []
    rng = cfg.rng()
    for label, data in _eigen_family(cfg):
        edges = sample_until(
            rng,
            cfg.field,
            cfg.depth,
            cfg.samples,
            lambda e: _in_depth(data, e) and _in_depth(data, bar(e)),
        )
        bad = sum(
            1 for e in edges if data.eval(e) + data.eval(bar(e)) != data.pairing
        )
        harmonic = data.pairing.is_zero()
        checks.append(
            Check(
                f"pairing[{label}]",
                "pairing-constant",
                bad == 0,
                f"{len(edges)} edges, constant {data.pairing!r}, harmonic={harmonic}",
            )
        )
    return checks


def suite_hecke_eigen(cfg: RunConfig, max_prime_deg: int = 3) -> list[Check]:
    """T_p eigenvalue |p| + 1, coefficientwise, for primes p off the level."""
    checks = []
    n = cfg.level
    primes = [
        p
        for p in monic_irreducibles(cfg.field, max_prime_deg)
        if gcd_poly(p, n).is_one() and p.deg <= cfg.depth
    ]
    for label, data in _eigen_family(cfg):
        for p in primes:
            lam = p.norm() + 1
            lhs = apply_t(data, p)
            ok = lhs.c0 == data.c0 * lam and lhs.pairing == data.pairing * lam
            if ok:
                for d in range(lhs.depth + 1):
                    for m in monic_polys(cfg.field, d):
                        if lhs.star.value(m) != data.star.value(m) * lam:
                            ok = False
                            break
                    if not ok:
                        break
            checks.append(
                Check(
                    f"hecke[{label}|T_{poly_to_str(p)}]",
                    "hecke-eigenvalue",
                    ok,
                    f"eigenvalue {lam}",
                )
            )
    return checks


def suite_atkin_lehner(cfg: RunConfig, edges_per_case: int = 25) -> list[Check]:
    """E^eps | W_{p_i} = eps_i E^eps: symbolic toggle and both explicit matrices."""
    checks = []
    rng = cfg.rng()
    s = len(cfg.primes)
    if s == 0:
        return [Check("atkin-lehner[level-one]", "atkin-lehner-eigenvalue", True, "no level primes")]
    n = cfg.level
    for eps in _eps_vectors(cfg):
        combo, data = build_e_eps(cfg.field, cfg.primes, eps, cfg.depth)
        sym_ok = all(
            combo.apply_w(p) == combo.scale(eps.signs[i])
            for i, p in enumerate(cfg.primes)
        )
        checks.append(
            Check(f"w-toggle[E^{eps}]", "atkin-lehner-eigenvalue", sym_ok, "symbolic")
        )
        for i, p in enumerate(cfg.primes):
            evs = [apply_w_pointwise(data.eval, n, p, v) for v in (0, 1)]
            edges = sample_until(
                rng,
                cfg.field,
                max(1, cfg.depth - 2 * n.deg - 2),
                edges_per_case,
                lambda e: _in_depth(data, e)
                and all(_in_depth(data, normal_form(w_matrix(n, p, v) * _edge_mat(e))) for v in (0, 1)),
            )
            bad = 0
            for e in edges:
                want = data.eval(e) * eps.signs[i]
                got0, got1 = evs[0](e), evs[1](e)
                if got0 != want or got1 != want:
                    bad += 1
            checks.append(
                Check(
                    f"w-pointwise[E^{eps}|W_{poly_to_str(p)}]",
                    "atkin-lehner-eigenvalue",
                    bad == 0,
                    f"{len(edges)} edges, two matrix variants",
                )
            )
    return checks


def _edge_mat(e):
    from .tree import edge_matrix

    return edge_matrix(e)


def suite_level_lower(cfg: RunConfig, edges_per_case: int = 20) -> list[Check]:
    """For f = (level-one generator)|B_p: g = f|B_p^{-1} exists with f = g|B_p
    and f|W_p = g."""
    checks = []
    rng = cfg.rng()
    ps = cfg.primes or [Poly.x(cfg.field)]
    for p in ps:
        base = etilde_fourier(cfg.field, cfg.depth)
        f = apply_b(base, p)
        g = level_lower(f, p)
        back = apply_b(g, p)
        ok = star_equal(back, f, depth=min(f.depth, back.depth))
        checks.append(
            Check(
                f"lower[B_{poly_to_str(p)}-reconstruction]",
                "level-lowering",
                ok,
                "g|B_p = f coefficientwise",
            )
        )
        wev = apply_w_pointwise(f.eval, f.level, p)
        edges = sample_until(
            rng,
            cfg.field,
            max(1, cfg.depth - 2 * p.deg - 2),
            edges_per_case,
            lambda e: _in_depth(g, e)
            and _in_depth(f, normal_form(w_matrix(f.level, p, 0) * _edge_mat(e))),
        )
        bad = sum(1 for e in edges if wev(e) != g.eval(e))
        checks.append(
            Check(
                f"lower[W_{poly_to_str(p)}-image]",
                "level-lowering",
                bad == 0,
                f"{len(edges)} edges: f|W_p = g pointwise",
            )
        )
    return checks


def suite_annihilator(cfg: RunConfig) -> list[Check]:
    """K_p coefficient rule, idempotence, commutation; the cascade in the
    coefficient ring where its hypotheses hold."""
    checks = []
    F = cfg.field
    base = etilde_fourier(F, cfg.depth)
    ps = cfg.primes or [Poly.x(F)]
    p = ps[0]
    ek = apply_k(base, p)
    rule_ok = True
    for d in range(ek.depth + 1):
        for m in monic_polys(F, d):
            want = base.star.value(m) if not p.divides(m) else ek.ring.zero()
            if ek.star.value(m) != want:
                rule_ok = False
            if (ek.star.value(m).is_zero()) != p.divides(m) and not base.star.value(m).is_zero():
                rule_ok = False
    checks.append(
        Check(
            f"k-rule[K_{poly_to_str(p)}]",
            "annihilator-rule",
            rule_ok,
            "star kept off p, killed on p",
        )
    )
    ekk = apply_k(ek, p)
    checks.append(
        Check(
            "k-idempotent",
            "annihilator-rule",
            star_equal(ekk, ek, depth=min(ek.depth, ekk.depth))
            and ekk.c0 == ek.c0,
            "",
        )
    )
    if len(ps) >= 2:
        q_ = ps[1]
        ab = apply_k(apply_k(base, p), q_)
        ba = apply_k(apply_k(base, q_), p)
        checks.append(
            Check(
                "k-commute",
                "annihilator-rule",
                star_equal(ab, ba, depth=min(ab.depth, ba.depth)),
                f"K_{poly_to_str(p)} K_{poly_to_str(q_)} = K_{poly_to_str(q_)} K_{poly_to_str(p)}",
            )
        )
    # cascade: the mod-l configuration where the hypotheses hold
    if cfg.ell is not None and cfg.primes:
        q = F.q
        if (q + 1) % cfg.ell == 0 and all(p_.deg % cfg.ell == 0 for p_ in cfg.primes):
            eps_h = EpsVector.parity(cfg.primes)
            _, data = build_e_eps(F, cfg.primes, eps_h, cfg.depth)
            data_mod = data.reduce_mod(cfg.ell, 1)
            sgn = eps_h.signs[-1]
            window = max(0, cfg.depth - 2)
            cas = annihilator_cascade(data_mod, cfg.primes, sgn, window)
            for name, ok in cas:
                checks.append(Check(f"cascade[{name}]", "annihilator-cascade", ok, f"mod {cfg.ell}"))
        else:
            checks.append(
                Check(
                    "cascade[config]",
                    "annihilator-cascade",
                    True,
                    "hypotheses (l | q+1, l | deg p_i) not met; vacuous here",
                )
            )
    return checks


def suite_trace(cfg: RunConfig) -> list[Check]:
    """Trace-map identities on the symbolic combinations."""
    checks = []
    F = cfg.field
    q = F.q
    if not cfg.primes:
        return [Check("trace[level-one]", "trace-fixed-vector", True, "no level primes")]
    p_s = cfg.primes[-1]
    # on inputs of lower level the trace multiplies by |p| + 1
    lower = [p for p in cfg.primes[:-1]]
    base, _ = build_e_eps(F, lower, EpsVector.ones(len(lower)), cfg.depth)
    emb = base.embed_level(cfg.primes)
    ok = emb.trace_down(p_s) == base.scale(q**p_s.deg + 1)
    checks.append(
        Check("trace[multiplier]", "trace-multiplier", ok, f"(|p|+1) = {q**p_s.deg + 1}")
    )
    # linearity
    b2, _ = build_e_eps(F, lower, EpsVector.parity(lower), cfg.depth) if lower else (base, None)
    lin = emb.add(b2.embed_level(cfg.primes)).trace_down(p_s) == emb.trace_down(
        p_s
    ).add(b2.embed_level(cfg.primes).trace_down(p_s))
    checks.append(Check("trace[linear]", "trace-multiplier", lin, ""))
    # the flipped-parity eigencochain: fixed by U (even degree) or killed by the trace
    ehs = EpsVector.parity_flipped_at(cfg.primes, len(cfg.primes) - 1)
    combo, _ = build_e_eps(F, cfg.primes, ehs, cfg.depth)
    if p_s.deg % 2 == 0:
        checks.append(
            Check(
                "u-fixed-vector",
                "u-fixed-vector",
                combo.apply_u(p_s) == combo,
                f"deg p_s = {p_s.deg} even",
            )
        )
        traced = combo.add(combo.apply_w(p_s).apply_u(p_s))
        checks.append(
            Check("trace[kills-flipped-parity]", "trace-fixed-vector", traced.is_zero(), "")
        )
    else:
        # odd degree: E|U + E = 2 (|p|+1)/(q+1) E^{parity(n/p_s)}, and any
        # n | (q+1, deg p_s) annihilates the scalar
        x = combo.apply_u(p_s).add(combo)
        target, _ = build_e_eps(F, lower, EpsVector.parity(lower), cfg.depth)
        scalar = Fraction(2 * (q**p_s.deg + 1), q + 1)
        ok = x == target.embed_level(cfg.primes).scale(scalar)
        divisor = gcd(q + 1, p_s.deg)
        torsion_ok = scalar.denominator == 1 and scalar.numerator % divisor == 0
        checks.append(
            Check(
                "u-torsion",
                "u-torsion",
                ok and torsion_ok,
                f"scalar {scalar}, killed by n | ({q+1}, {p_s.deg}) = {divisor}",
            )
        )
    return checks


def suite_theorem_orders(cfg: RunConfig) -> list[Check]:
    """Eigenspace order formula gcd(l^r, |N/nu|) with generator certificates."""
    if cfg.ell is None:
        raise ValueError("theorem-orders needs --ell")
    checks = []
    for eps in _eps_vectors(cfg):
        rep = eisenstein_order(cfg.field, cfg.primes, eps, cfg.ell, cfg.r)
        cert = rep["certificate"]
        if eps.is_ones():
            # here cuspidality and harmonicity jointly force the zero scalar
            ok = rep["matches_formula"] and rep["order"] == 1
        else:
            ok = (
                rep["matches_formula"]
                and cert["cuspidal_kills_c0"]
                and cert["smaller_scalar_fails"]
                and cert["harmonic_mod"]
                and cert["pairing_exact_zero"]
            )
        checks.append(
            Check(
                f"order[eps={eps}]",
                "eigenspace-order",
                ok,
                f"order {rep['order']} = gcd({cfg.ell}^{cfg.r}, |{rep['N_over_nu']}|)"
                if not eps.is_ones()
                else f"order {rep['order']} (trivial eigenspace)",
            )
        )
    return checks


def eisenstein_rows(cfg: RunConfig) -> list[dict]:
    """Report rows (q, n, eps, N, nu, N/nu, pairing, verified flags)."""
    rows = []
    q = cfg.field.q
    for eps in _eps_vectors(cfg):
        n_c = eps.n_const(cfg.primes, q)
        nu = eps.nu(cfg.primes, q)
        pairing = eps.pairing_fr(cfg.primes, q)
        row = {
            "q": q,
            "n": poly_to_str(cfg.level),
            "eps": str(eps),
            "N": n_c,
            "nu": nu,
            "N_over_nu": n_c // nu,
            "pairing": str(pairing),
        }
        if cfg.ell is not None:
            rep = eisenstein_order(cfg.field, cfg.primes, eps, cfg.ell, cfg.r)
            row["ell"] = cfg.ell
            row["r"] = cfg.r
            row["order"] = rep["order"]
            row["verified"] = rep["matches_formula"]
        rows.append(row)
    return rows


def suite_cusp_group(cfg: RunConfig) -> list[Check]:
    """Cusp lattice quotient: orders, sandwich, W-action, orbit invariant."""
    checks = []
    F = cfg.field
    rep = cusp_group(F, cfg.primes)
    checks.append(
        Check(
            "lattice[finite]",
            "order-sandwich",
            rep["finite"],
            f"elementary divisors {rep['elementary_divisors']}",
        )
    )
    for row in rep["rows"]:
        if row["excluded"]:
            checks.append(
                Check(
                    f"degree[eps={row['eps']}]",
                    "cusp-degree",
                    row["deg_nonzero"] and row["w_eigen"],
                    "all-ones vector has nonzero degree; excluded from Div^0",
                )
            )
            continue
        checks.append(
            Check(
                f"cusp[eps={row['eps']}]",
                "order-sandwich",
                row["w_eigen"] and row["principal_matches"] and row["sandwich_ok"],
                f"order {row['order']}, N {row['N']}, nu {row['nu']}",
            )
        )
    npts = validate_cusp_invariant(F, cfg.primes, deg_cap=3)
    checks.append(
        Check("orbit-invariant", "orbit-invariant", True, f"{npts} orbit points certified")
    )
    # witness certificates for a few random points
    rng = cfg.rng()
    n = cfg.level
    good = 0
    trials = 0
    while good < 20 and trials < 400:
        trials += 1
        a = Poly(F, [rng.randrange(F.q) for _ in range(rng.randint(1, 4))])
        b = Poly(F, [rng.randrange(F.q) for _ in range(rng.randint(1, 4))])
        if (a.is_zero() and b.is_zero()) or not gcd_poly(a, b).is_one():
            continue
        cusp_matrix_witness(a, b, n)  # self-verifying; raises on failure
        good += 1
    checks.append(
        Check("orbit-witness", "orbit-invariant", good >= 20, f"{good} matrix witnesses")
    )
    return checks


def cusp_rows(cfg: RunConfig) -> list[dict]:
    """Table rows (q, n, s, elementary_divisors, eps, N, nu, D_eps_order,
    sandwich_ok, rho, exponent_ok)."""
    F = cfg.field
    rep = cusp_group(F, cfg.primes)
    exp = exponent_check(F, cfg.primes)
    out = []
    for row in rep["rows"]:
        out.append(
            {
                "q": F.q,
                "n": poly_to_str(cfg.level),
                "s": len(cfg.primes),
                "elementary_divisors": ";".join(str(d) for d in rep["elementary_divisors"]),
                "eps": row["eps"],
                "N": row["N"],
                "nu": row["nu"],
                "D_eps_order": row.get("order", ""),
                "sandwich_ok": row.get("sandwich_ok", ""),
                "rho": exp["rho"],
                "exponent_ok": exp["ok"],
            }
        )
    return out


def suite_exponent_rho(cfg: RunConfig) -> list[Check]:
    rep = exponent_check(cfg.field, cfg.primes)
    return [
        Check(
            "exponent[divides-rho]",
            "exponent-bound",
            rep["divides_rho"],
            f"rho = {rep['rho']}, divisors {rep['elementary_divisors']}",
        ),
        Check("exponent[p-part-trivial]", "p-part-trivial", rep["p_part_trivial"], ""),
        Check(
            "exponent[pullbacks]",
            "projection-pullback",
            rep["pullbacks_in_lattice"],
            "lower-level relations pull back into the lattice",
        ),
    ]


SUITES = {
    "pharm": suite_pharm,
    "pairing": suite_pairing,
    "hecke-eigen": suite_hecke_eigen,
    "atkin-lehner": suite_atkin_lehner,
    "level-lower": suite_level_lower,
    "annihilator": suite_annihilator,
    "trace": suite_trace,
    "theorem-orders": suite_theorem_orders,
    "cusp-group": suite_cusp_group,
    "exponent-rho": suite_exponent_rho,
}


def required_depth(name: str, cfg: RunConfig) -> int:
    """Minimum working depth per suite, computed up front."""
    max_p = max((p.deg for p in cfg.primes), default=1)
    return {
        "pharm": 1,
        "pairing": 1,
        "hecke-eigen": 3,
        "atkin-lehner": max_p,
        "level-lower": max_p + 1,
        "annihilator": max_p + 1,
        "trace": max_p,
        "theorem-orders": 0,
        "cusp-group": 0,
        "exponent-rho": 0,
    }[name]


def run_suite(name: str, cfg: RunConfig) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    need = required_depth(name, cfg)
    if cfg.depth < need:
        raise ValueError(f"suite {name} needs depth >= {need}, got {cfg.depth}")
    checks = SUITES[name](cfg)
    checks = sorted(checks, key=lambda c: c.name)
    passed = sum(1 for c in checks if c.ok)
    return {
        "config": cfg.describe(),
        "suite": name,
        "checks": [c.row() for c in checks],
        "summary": {
            "total": len(checks),
            "passed": passed,
            "failed": len(checks) - passed,
        },
    }
