"""Command-line verification driver.

    treecochain eval  {etilde|eeps} --q Q [--ext-modulus M] --edge "(k; u; +/-)" ...
    treecochain verify SUITE --q Q --level T,T+1 [--ell L --r R] [--depth D]
    treecochain sweep --q 2,3 --s 2 --max-prime-deg 1 [--max-ellr 81]

Exit codes: 0 all checks pass, 1 verification failure, 2 usage error,
3 depth/resource error.  Reports carry no timestamps; identical config and
seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import combinations

from .cochain import DepthError
from .cyclo import CycloRing
from .eisenstein import (
    EpsVector,
    build_e_eps,
    eisenstein_order,
    etilde_closed,
    etilde_fourier,
)
from .fq import Fq, Poly, is_irreducible, monic_irreducibles, poly_from_str, poly_to_str
from .suites import RunConfig, SUITES, cusp_rows, eisenstein_rows, run_suite
from .tree import edge_from_str

GUARD_Q = 9
GUARD_S = 3
GUARD_PRIME_DEG = 3
GUARD_ELLR = 128


class UsageError(Exception):
    pass


def _parse_q(qstr: str, ext_modulus: str | None) -> Fq:
    try:
        q = int(qstr)
    except ValueError:
        raise UsageError(f"bad q: {qstr!r}")
    p, e = None, None
    for cand in range(2, q + 1):
        k, n = 0, q
        while n % cand == 0:
            n //= cand
            k += 1
        if n == 1 and k >= 1:
            p, e = cand, k
            break
    if p is None:
        raise UsageError(f"q = {q} is not a prime power")
    if e == 1:
        if ext_modulus:
            raise UsageError("--ext-modulus only applies to extension fields")
        return Fq(p)
    if not ext_modulus:
        raise UsageError(f"q = {q} needs --ext-modulus (irreducible of degree {e} in g)")
    base = Fq(p)
    mod_poly = poly_from_str(base, ext_modulus.replace("g", "T"))
    coeffs = list(mod_poly.coeffs)
    try:
        return Fq(p, e, coeffs)
    except ValueError as exc:
        raise UsageError(str(exc))


def _parse_level(field: Fq, level: str | None) -> list[Poly]:
    if not level:
        return []
    primes = []
    for part in level.split(","):
        part = part.strip()
        if not part:
            raise UsageError("empty entry in --level")
        try:
            p = poly_from_str(field, part)
        except ValueError as exc:
            raise UsageError(f"bad level factor {part!r}: {exc}")
        primes.append(p)
    if len(set(primes)) != len(primes):
        raise UsageError("duplicate prime in level list")
    for p in primes:
        if p.deg < 1 or not p.is_monic() or not is_irreducible(p):
            raise UsageError(f"level factor {poly_to_str(p)} is not a monic irreducible")
    return primes


def _parse_eps(s: str | None, count: int) -> EpsVector | None:
    if s is None:
        return None
    signs = []
    for ch in s:
        if ch in "+p":
            signs.append(1)
        elif ch in "-m":
            signs.append(-1)
        else:
            raise UsageError(f"--eps must be a string of +/- (or p/m), got {s!r}")
    if len(signs) != count:
        raise UsageError(f"--eps length {len(signs)} != number of level primes {count}")
    return EpsVector(tuple(signs))


def _emit(data, out: str | None, fmt: str, csv_fields: list[str] | None = None) -> None:
    if fmt == "json":
        text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        rows = data if isinstance(data, list) else data.get("checks", [])
        fields = csv_fields or (list(rows[0].keys()) if rows else [])
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fields})
        text = buf.getvalue()
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args) -> int:
    field = _parse_q(args.q, args.ext_modulus)
    try:
        edge = edge_from_str(field, args.edge)
    except (ValueError, IndexError) as exc:
        print(f"error: bad edge string: {exc}", file=sys.stderr)
        return 2
    ring = CycloRing(field.p)
    if args.target == "etilde":
        closed = etilde_closed(edge)
        data = etilde_fourier(field, args.depth)
        fourier = data.eval(edge)
        diff = fourier - ring.from_int(closed)
        print(f"closed={closed} fourier={fourier.to_fraction()} diff={diff.to_fraction()}")
        return 0 if diff.is_zero() else 1
    # eeps
    primes = _parse_level(field, args.level)
    if not primes:
        raise UsageError("eval eeps needs --level")
    eps = _parse_eps(args.eps, len(primes))
    if eps is None:
        raise UsageError("eval eeps needs --eps")
    combo, data = build_e_eps(field, primes, eps, args.depth)
    closed_fr = combo.eval_closed(edge)
    fourier = data.eval(edge)
    diff = fourier - ring.from_fraction(closed_fr)
    print(f"closed={closed_fr} fourier={fourier.to_fraction()} diff={diff.to_fraction()}")
    return 0 if diff.is_zero() else 1


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {sorted(SUITES)}",
              file=sys.stderr)
        return 2
    field = _parse_q(args.q, args.ext_modulus)
    primes = _parse_level(field, args.level)
    try:
        cfg = RunConfig(
            field=field,
            primes=primes,
            ell=args.ell,
            r=args.r,
            depth=args.depth,
            samples=args.samples,
            seed=args.seed,
            eps=_parse_eps(args.eps, len(primes)),
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    report = run_suite(args.suite, cfg)
    if args.suite == "theorem-orders":
        report["rows"] = eisenstein_rows(cfg)
    if args.suite in ("cusp-group", "exponent-rho"):
        report["rows"] = cusp_rows(cfg)
    if args.format == "csv" and args.suite == "theorem-orders":
        _emit(report["rows"], args.out, "csv", EIS_FIELDS)
    elif args.format == "csv" and args.suite == "cusp-group":
        _emit(report["rows"], args.out, "csv", CUSP_FIELDS[:-1])
    else:
        _emit(report, args.out, args.format)
    for check in report["checks"]:
        mark = "PASS" if check["status"] == "pass" else "FAIL"
        print(f"[{mark}] {check['name']} ({check['paper_tag']}) {check['details']}",
              file=sys.stderr)
    return 0 if report["summary"]["failed"] == 0 else 1


CUSP_FIELDS = [
    "q", "n", "s", "elementary_divisors", "eps", "N", "nu",
    "D_eps_order", "sandwich_ok", "rho", "exponent_ok", "eis_orders_ok",
]

EIS_FIELDS = ["q", "n", "eps", "N", "nu", "N_over_nu", "pairing",
              "ell", "r", "order", "verified"]


def cmd_sweep(args) -> int:
    qs = [s for s in (args.q or "").split(",") if s]
    if not qs:
        rows: list[dict] = []
        _emit(rows, args.out, args.format, CUSP_FIELDS)
        return 0
    if args.s > GUARD_S:
        print(f"error: guard rail s <= {GUARD_S}", file=sys.stderr)
        return 2
    if args.max_prime_deg > GUARD_PRIME_DEG:
        print(f"error: guard rail deg p_i <= {GUARD_PRIME_DEG}", file=sys.stderr)
        return 2
    if args.max_ellr > GUARD_ELLR:
        print(f"error: guard rail l^r <= {GUARD_ELLR}", file=sys.stderr)
        return 2
    rows = []
    for qstr in qs:
        field = _parse_q(qstr, args.ext_modulus)
        if field.q > GUARD_Q:
            print(f"error: guard rail q <= {GUARD_Q}", file=sys.stderr)
            return 2
        q = field.q
        ell_rs = _ell_r_pairs(q, args.max_ellr)
        primes_pool = monic_irreducibles(field, args.max_prime_deg)
        for combo in combinations(primes_pool, args.s):
            cfg = RunConfig(field=field, primes=list(combo), depth=2, samples=1,
                            seed=args.seed)
            base_rows = cusp_rows(cfg)
            orders_ok = True
            for eps in EpsVector.all_vectors(args.s):
                for ell, r in ell_rs:
                    rep = eisenstein_order(field, list(combo), eps, ell, r)
                    if not rep["matches_formula"]:
                        orders_ok = False
            for row in base_rows:
                row["eis_orders_ok"] = orders_ok
                rows.append(row)
    rows.sort(key=lambda r: (r["q"], r["n"], r["eps"]))
    _emit(rows, args.out, args.format, CUSP_FIELDS)
    bad = [r for r in rows if not (r["exponent_ok"] and r["eis_orders_ok"]
                                   and (r["sandwich_ok"] in ("", True)))]
    return 0 if not bad else 1


def _ell_r_pairs(q: int, cap: int) -> list[tuple[int, int]]:
    out = []
    ell = 2
    while ell <= cap:
        is_p = all(ell % d for d in range(2, int(ell**0.5) + 1))
        if is_p and (q * (q - 1)) % ell != 0:
            r = 1
            while ell**r <= cap:
                out.append((ell, r))
                r += 1
        ell += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="treecochain",
        description="exact verification of tree cochain identities and cusp lattices",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_level=True):
        p.add_argument("--q", required=True, help="field size (prime power)")
        p.add_argument("--ext-modulus", default=None,
                       help="irreducible modulus in g for extension fields")
        if with_level:
            p.add_argument("--level", default=None,
                           help="comma-separated monic irreducible level factors")
        p.add_argument("--depth", type=int, default=8)
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--out", default=None, help="write the report to a file")
        p.add_argument("--format", default="json", choices=["json", "csv"])

    pe = sub.add_parser("eval", help="evaluate a cochain on one edge, both paths")
    pe.add_argument("target", choices=["etilde", "eeps"])
    pe.add_argument("--edge", required=True, help='edge string "(k; u; +/-)"')
    pe.add_argument("--eps", default=None, help="sign string like +-+")
    common(pe)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("suite")
    pv.add_argument("--ell", type=int, default=None)
    pv.add_argument("--r", type=int, default=1)
    pv.add_argument("--eps", default=None)
    common(pv)

    ps = sub.add_parser("sweep", help="cusp/eigenspace tables over a family")
    ps.add_argument("--q", default="", help="comma-separated field sizes")
    ps.add_argument("--ext-modulus", default=None)
    ps.add_argument("--s", type=int, default=1, help="number of level primes")
    ps.add_argument("--max-prime-deg", type=int, default=1)
    ps.add_argument("--max-ellr", type=int, default=81)
    ps.add_argument("--seed", type=int, default=1)
    ps.add_argument("--out", default=None)
    ps.add_argument("--format", default="csv", choices=["json", "csv"])
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return 2
    except (UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DepthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
