"""Command-line front end.

One subcommand per verification pipeline plus series/cusp/eta utilities.
Exit codes: 0 all checks pass, 1 a verification failed (counterexamples in
the report), 2 usage or invalid input. Reports are emitted as JSON (default
for `verify`) or an aligned text table; big integers are serialized as
decimal strings and rationals as "p/q".
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import engine, locring
from .cusps import (
    Cusp,
    cusp_equivalent,
    cusps_of,
    ligozat_order,
    newman_is_modular,
    order_table,
    radu_lower_bound,
)
from .report import VerificationReport, encode_value
from .series import EtaQuotient, dk_series, eta_quotient_series, FractionalPowerError


@dataclass
class RunConfig:
    subcommand: str
    flags: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"
    seed: int = 0


class UsageError(Exception):
    pass


def _parse_exponents(text: str) -> dict[int, int]:
    out: dict[int, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            d, r = part.split("=")
            out[int(d)] = int(r)
        except ValueError as e:
            raise UsageError(f"bad exponent entry {part!r}; expected d=r") from e
    if not out:
        raise UsageError("empty exponent list")
    return out


def emit_report(report: VerificationReport, fmt: str = "json") -> str:
    return report.to_json() if fmt == "json" else report.to_text()


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit(payload, cfg: RunConfig, text_lines=None) -> None:
    if cfg.format == "json":
        _write(json.dumps(encode_value(payload), indent=2), cfg.out)
    else:
        if text_lines is None:
            text_lines = [json.dumps(encode_value(payload))]
        _write("\n".join(str(l) for l in text_lines), cfg.out)


def _report_exit(report: VerificationReport, cfg: RunConfig) -> int:
    _write(emit_report(report, cfg.format), cfg.out)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_verify(args, cfg: RunConfig) -> int:
    which = args.pipeline
    if which == "congruence":
        rep = engine.check_congruence_direct(args.alpha_max, args.cases)
    elif which == "fundamental":
        rep = engine.verify_fundamental_relations(args.terms)
    elif which == "initial":
        rep = engine.verify_initial_relations(args.terms)
    elif which == "modeq":
        rep = engine.verify_modular_equations(args.terms)
    elif which == "lemmas":
        rep = locring.check_exponent_lemmas(args.m_max, args.r_max, args.l_max)
    elif which == "h-congruences":
        rep = locring.check_h_congruences(args.n_max, args.r_max, args.m_max)
    elif which == "that":
        rep = locring.check_that_vectors()
    elif which == "stability":
        rep = engine.stability_iteration(args.alpha_max, args.terms)
    elif which == "u3-contract":
        rep = engine.verify_u3_contract(args.terms)
    elif which == "vsets":
        rep = engine.check_stability_set_samples(args.samples, cfg.seed)
    else:  # pragma: no cover
        raise UsageError(f"unknown pipeline {which}")
    return _report_exit(rep, cfg)


def _cmd_series(args, cfg: RunConfig) -> int:
    if args.kind == "dk":
        s = dk_series(args.k, args.terms)
        label = f"d_{args.k}"
    elif args.kind == "l-alpha":
        s = engine.l_series(args.alpha, args.terms)
        label = f"L_{args.alpha}"
    else:  # eta
        eq = EtaQuotient(args.level, _parse_exponents(args.exp), args.scale)
        s = eta_quotient_series(eq, args.terms)
        label = "eta-quotient"
    payload = {
        "series": label,
        "terms": args.terms,
        "valuation": s.valuation,
        "coefficients": {str(e): s.coeff(e) for e in range((s.valuation or 0), s.prec)},
    }
    lines = [f"{label}: q^{e} -> {s.coeff(e)}" for e in range((s.valuation or 0), s.prec)]
    _emit(payload, cfg, lines)
    return 0


def _cmd_cusp(args, cfg: RunConfig) -> int:
    if args.action == "list":
        cs = cusps_of(args.level)
        payload = {"level": args.level, "cusps": [{"a": c.a, "c": c.c} for c in cs]}
        _emit(payload, cfg, [str(c) for c in cs])
        return 0
    c1 = Cusp.parse(args.first, args.level)
    c2 = Cusp.parse(args.second, args.level)
    eq = cusp_equivalent(c1, c2, args.level)
    _emit({"level": args.level, "first": str(c1), "second": str(c2), "equivalent": eq},
          cfg, ["equivalent" if eq else "inequivalent"])
    return 0


def _cmd_eta(args, cfg: RunConfig) -> int:
    if args.action == "radu-bound":
        cusp = Cusp.parse(args.cusp, args.level)
        gen = _parse_exponents(args.gen_exp)
        pre = _parse_exponents(args.prefactor_exp)
        bound = radu_lower_bound(gen, args.m, args.t, pre, cusp)
        # echo the full sieve instantiation so the bound stays auditable
        _emit({"level": args.level, "cusp": str(cusp), "m": args.m, "t": args.t,
               "generating_exponents": gen, "prefactor_exponents": pre,
               "bound": bound}, cfg, [str(bound)])
        return 0
    eq = EtaQuotient(args.level, _parse_exponents(args.exp), args.scale)
    if args.action == "newman":
        res = newman_is_modular(eq)
        payload = {
            "level": args.level,
            "conditions": {
                "weight_zero": res.weight_zero,
                "sum_delta_r_mod24": res.sum_delta_r,
                "sum_inverse_r_mod24": res.sum_inverse_r,
                "square_product": res.square_product,
            },
            "modular": res.is_modular,
        }
        _emit(payload, cfg, ["modular" if res.is_modular else "not modular"])
        return 0
    # order
    pre = eq.prefactor_exponent()
    if args.prefactor_q is not None and pre != Fraction(args.prefactor_q):
        raise UsageError(f"declared q-prefactor {args.prefactor_q} but quotient has {pre}")
    if args.cusp:
        cusp = Cusp.parse(args.cusp, args.level)
        val = ligozat_order(eq, cusp)
        _emit({"level": args.level, "cusp": str(cusp), "order": val}, cfg, [str(val)])
        return 0
    table = order_table(eq, args.level)
    payload = {
        "level": args.level,
        "cusps": [{"a": c.a, "c": c.c} for c in table.rows],
        "orders": {str(c): v for c, v in table.rows.items()},
    }
    _emit(payload, cfg, [f"{c}: {v}" for c, v in table.rows.items()])
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS,
                        help="output format (default: json for verify, text for utilities)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for sampled property checks")

    p = argparse.ArgumentParser(
        prog="congruence-forge",
        description="Exact verification toolkit for the 3-adic plane-partition congruence family",
    )
    p.set_defaults(out=None, format=None, seed=0)
    sub = p.add_subparsers(dest="command", required=True)

    def leaf(group, name):
        return group.add_parser(name, parents=[common])

    v = sub.add_parser("verify", help="run a verification pipeline")
    vp = v.add_subparsers(dest="pipeline", required=True)
    q = leaf(vp, "congruence")
    q.add_argument("--alpha-max", type=int, default=6)
    q.add_argument("--cases", type=int, default=50)
    q = leaf(vp, "fundamental")
    q.add_argument("--terms", type=int, default=100)
    q = leaf(vp, "initial")
    q.add_argument("--terms", type=int, default=60)
    q = leaf(vp, "modeq")
    q.add_argument("--terms", type=int, default=200)
    q = leaf(vp, "lemmas")
    q.add_argument("--m-max", type=int, default=60)
    q.add_argument("--r-max", type=int, default=60)
    q.add_argument("--l-max", type=int, default=12)
    q = leaf(vp, "h-congruences")
    q.add_argument("--n-max", type=int, default=10)
    q.add_argument("--r-max", type=int, default=8)
    q.add_argument("--m-max", type=int, default=9)
    q = leaf(vp, "that")
    q = leaf(vp, "stability")
    q.add_argument("--alpha-max", type=int, default=5)
    q.add_argument("--terms", type=int, default=100,
                   help="required overlap of the series cross-check")
    q = leaf(vp, "u3-contract")
    q.add_argument("--terms", type=int, default=60)
    q = leaf(vp, "vsets")
    q.add_argument("--samples", type=int, default=200)

    s = sub.add_parser("series", help="expand a series")
    sp = s.add_subparsers(dest="kind", required=True)
    q = leaf(sp, "dk")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--terms", type=int, default=20)
    q = leaf(sp, "l-alpha")
    q.add_argument("--alpha", type=int, required=True)
    q.add_argument("--terms", type=int, default=20)
    q = leaf(sp, "eta")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--exp", required=True, help="comma list d=r of eta exponents")
    q.add_argument("--scale", type=int, default=1)
    q.add_argument("--terms", type=int, default=20)

    c = sub.add_parser("cusp", help="cusp utilities")
    cp = c.add_subparsers(dest="action", required=True)
    q = leaf(cp, "list")
    q.add_argument("--level", type=int, required=True)
    q = leaf(cp, "equiv")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--first", required=True)
    q.add_argument("--second", required=True)

    e = sub.add_parser("eta", help="eta-quotient analysis")
    ep = e.add_subparsers(dest="action", required=True)
    q = leaf(ep, "order")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--exp", required=True)
    q.add_argument("--scale", type=int, default=1)
    q.add_argument("--cusp", help="a/c or inf; omit for the full table")
    q.add_argument("--prefactor-q", type=int, default=None,
                   help="assert the integral q-power prefactor")
    q = leaf(ep, "newman")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--exp", required=True)
    q.add_argument("--scale", type=int, default=1)
    q = leaf(ep, "radu-bound")
    q.add_argument("--gen-exp", required=True,
                   help="exponents of the generating product, comma list d=r")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--prefactor-exp", required=True)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--cusp", required=True)
    return p


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(2_000_000)
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or ("json" if args.command == "verify" else "text")
    cfg = RunConfig(subcommand=args.command, out=args.out, format=fmt, seed=args.seed)
    try:
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        if args.command == "series":
            return _cmd_series(args, cfg)
        if args.command == "cusp":
            return _cmd_cusp(args, cfg)
        if args.command == "eta":
            return _cmd_eta(args, cfg)
    except (UsageError, FractionalPowerError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
