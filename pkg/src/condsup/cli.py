"""Command line front end: ``condsup {condops,check,price,ergodic} SCENARIO ...``.

Exit codes: 0 success / condition holds, 1 condition fails, 2 parse error,
3 validation error.  ``--format json`` emits one JSON document per run; its
schema ships as ``condsup/schemas/report.schema.json``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import ergodic as erg
from .lattice import (
    ConditionalSystem,
    LatticeError,
    cond_expectation,
    cond_inf,
    cond_sup,
    delta,
    lp_limit_estimate,
    nearest_in_range,
)
from .market import (
    AIPViolation,
    VerificationError,
    aip_check,
    aip_check_multiperiod,
    na_check,
    superhedge_price,
    superhedge_verify,
)
from .scenario import ScenarioError, ScenarioParseError, ScenarioValidationError, load

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


def _atoms_text(atoms) -> str:
    return " ".join("{" + ",".join(map(str, a)) + "}" for a in atoms)


def _vec_text(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> list[str]:
    widths = [max(len(r[k]) for r in [header, *rows]) for k in range(len(header))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header, *rows]]


def _rational_arg(text: str) -> Fraction:
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid rational {text!r}")
    if x <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def cmd_condops(args) -> tuple[dict, list[str], int]:
    sc = load(args.scenario)
    flt = sc.require_filtration()
    f = sc.vector(args.vector)
    if not 0 <= args.time <= flt.horizon:
        raise ScenarioValidationError(f"--time {args.time} outside 0..{flt.horizon}")
    sys_ = flt.system(args.time)
    g, dist = nearest_in_range(f, sys_)
    rows = {
        "f": f,
        "F": cond_expectation(f, sys_),
        "M_F": cond_sup(f, sys_),
        "m_F": cond_inf(f, sys_),
        "delta": delta(f, sys_),
        "nearest": g,
        "dist": dist,
    }
    lp = lp_limit_estimate(abs(f), sys_, args.p_max)
    doc = {
        "command": "condops",
        "vector": args.vector,
        "time": args.time,
        "atoms": [list(a) for a in sys_.atoms],
        "in_range": sys_.in_range(f),
        "values": {k: v.as_strings() for k, v in rows.items()},
        "lp_limit": {
            "p": list(lp.ps),
            "gap": [float(x) for x in lp.gaps],
            "monotone": lp.monotone,
        },
    }
    labels = {"F": "F(f)", "M_F": "M_F(f)", "m_F": "m_F(f)", "delta": "delta(f)"}
    lines = [f"vector {args.vector} on P_{args.time}: {_atoms_text(sys_.atoms)}"]
    lines += _table(
        ["", *(f"w{i}" for i in range(f.space.size))],
        [[labels.get(k, k), *v.as_strings()] for k, v in rows.items()],
    )
    lines.append("")
    lines.append("lp-limit of |f| (sup gap to M_F(|f|)):")
    lines += _table(["p", "gap"], [[str(p), f"{gap:.6e}"] for p, gap in zip(lp.ps, lp.gaps)])
    lines.append(f"monotone in p: {'yes' if lp.monotone else 'no'}")
    return doc, lines, EXIT_OK


def _strategy_json(strat):
    return [h.as_strings() for h in strat.holdings]


def cmd_check(args) -> tuple[dict, list[str], int]:
    sc = load(args.scenario)
    m = sc.require_market()
    if args.condition == "aip":
        rep = aip_check(m)
        multi = aip_check_multiperiod(m)
        doc = {
            "command": "check",
            "condition": "aip",
            "holds": rep.holds,
            "multiperiod_agrees": multi.holds == rep.holds,
            "violations": [
                {
                    "t": v.t,
                    "atom": list(v.atom),
                    "side": v.side,
                    "price": v.certificate.price.as_strings(),
                    "strategy": _strategy_json(v.certificate.strategy),
                    "verified": v.certificate.verify(m),
                }
                for v in rep.violations
            ],
        }
        lines = [f"AIP: {'holds' if rep.holds else 'fails'}"]
        for v in rep.violations:
            gap = -v.certificate.price[v.atom[0]]
            pos = "long" if v.side == "lower" else "short"
            lines.append(
                f"  t={v.t} atom {_atoms_text([v.atom])}: {v.side} bound violated; "
                f"certificate: {pos} 1 unit at price {-gap} superhedges 0"
            )
        lines.append(f"multi-period check agrees: {'yes' if doc['multiperiod_agrees'] else 'NO'}")
        return doc, lines, EXIT_OK if rep.holds else EXIT_FAIL

    rep = na_check(m)
    cert = rep.certificate
    doc = {
        "command": "check",
        "condition": "na",
        "holds": rep.holds,
        "strict": rep.strict,
        "aip": rep.aip,
        "decided_by": rep.decided_by,
        "certificate": None
        if cert is None
        else {"t": cert.t, "atom": list(cert.atom), "strategy": _strategy_json(cert.strategy), "verified": cert.verify(m)},
    }
    how = "strictness hypothesis satisfied" if rep.strict else "decided by sign analysis"
    lines = [f"NA: {'holds' if rep.holds else 'fails'} ({how})", f"AIP: {'holds' if rep.aip else 'fails'}"]
    if cert is not None:
        theta = cert.strategy.at(cert.t)[cert.atom[0]]
        lines.append(
            f"  arbitrage at t={cert.t} atom {_atoms_text([cert.atom])}: hold {theta} unit(s) for one step at zero cost"
        )
    return doc, lines, EXIT_OK if rep.holds else EXIT_FAIL


def cmd_price(args) -> tuple[dict, list[str], int]:
    sc = load(args.scenario)
    m = sc.require_market()
    h = sc.claim(args.claim)
    t = args.time
    if not 0 <= t <= m.horizon:
        raise ScenarioValidationError(f"--time {t} outside 0..{m.horizon}")
    base = {"command": "price", "claim": args.claim, "time": t}
    try:
        res = superhedge_price(m, h, t)
    except AIPViolation as exc:
        doc = {**base, "error": {"kind": "aip", "message": str(exc), "t": exc.t, "atom": list(exc.atom)}}
        return doc, [f"price: {exc}"], EXIT_FAIL
    try:
        ver = superhedge_verify(m, h, t, res.price, args.eps)
    except VerificationError as exc:
        doc = {**base, "error": {"kind": "verification", "message": str(exc)}}
        return doc, [f"price: verification failed: {exc}"], EXIT_FAIL
    flt = m.filtration
    atoms_t = flt.partitions[t].atoms
    theta_t = res.strategy.at(t) if t < m.horizon else None
    doc = {
        **base,
        "prices": [
            {
                "atom": list(a),
                "price": str(res.price[a[0]]),
                "theta": None if theta_t is None else str(theta_t[a[0]]),
            }
            for a in atoms_t
        ],
        "strategy": [
            {"time": s, "atoms": [{"atom": list(a), "theta": str(res.strategy.at(s)[a[0]])} for a in flt.partitions[s].atoms]}
            for s in range(t, m.horizon)
        ],
        "values": [v.as_strings() for v in res.values],
        "verification": {
            "eps": str(ver.eps),
            "certified": ver.certified,
            "refuted": ver.refuted,
            "minimal": ver.minimal,
            "dual_bound": ver.dual_bound.as_strings(),
        },
    }
    status = f"verified minimal at eps={ver.eps}" if ver.minimal else f"NOT verified at eps={ver.eps}"
    lines = []
    for a in atoms_t:
        head = "" if len(atoms_t) == 1 else f"atom {_atoms_text([a])}: "
        theta = "" if theta_t is None else f", theta_{t} = {theta_t[a[0]]}"
        lines.append(f"{head}pi_{t} = {res.price[a[0]]}{theta}, {status}")
    if m.horizon - t > 1:
        lines.append("hedge:")
        for s in range(t + 1, m.horizon):
            for a in flt.partitions[s].atoms:
                lines.append(
                    f"  t={s} atom {_atoms_text([a])}: pi_{s} = {res.values[s - t][a[0]]}, "
                    f"theta_{s} = {res.strategy.at(s)[a[0]]}"
                )
    return doc, lines, EXIT_OK if ver.minimal else EXIT_FAIL


def cmd_ergodic(args) -> tuple[dict, list[str], int]:
    sc = load(args.scenario)
    ts = sc.require_transform()
    ergodic = erg.is_ergodic(ts)
    rep = erg.max_ergodic_check(ts, args.trials, args.seed)
    n = erg.period(ts)
    inv_sys = ConditionalSystem(ts.space, erg.invariant_partition(ts))
    cesaro = []
    for name, f in sc.vectors.items():
        mean = erg.cesaro_mean(ts, f, n)
        ff = cond_expectation(f, ts.sys)
        cesaro.append(
            {
                "vector": name,
                "n": n,
                "mean": mean.as_strings(),
                "expectation": ff.as_strings(),
                "invariant_expectation": cond_expectation(f, inv_sys).as_strings(),
                "equal": mean == ff,
            }
        )
    doc = {
        "command": "ergodic",
        "ergodic": ergodic,
        "cycles": [list(c) for c in erg.cycles(ts)],
        "period": n,
        "max_ergodic": {
            "consistent": rep.consistent,
            "trials": rep.trials,
            "seed": args.seed,
            "mismatches": rep.mismatches,
            "counterexample": None if rep.counterexample is None else rep.counterexample.as_strings(),
        },
        "cesaro": cesaro,
    }
    verdict = (
        f"consistent ({rep.trials} trials)"
        if rep.consistent
        else f"inconsistent, counterexample f = {_vec_text(rep.counterexample)}"
    )
    lines = [
        f"ergodic: {'yes' if ergodic else 'no'}; max-ergodic: {verdict}",
        f"cycles: {' '.join('(' + ' '.join(map(str, c)) + ')' for c in erg.cycles(ts))}; period {n}",
    ]
    if cesaro:
        lines.append(f"Cesaro means at n = {n}:")
        lines += _table(
            ["vector", "mean", "F f", "equal"],
            [[c["vector"], _vec_text(c["mean"]), _vec_text(c["expectation"]), "yes" if c["equal"] else "no"] for c in cesaro],
        )
    return doc, lines, EXIT_OK if ergodic and rep.consistent else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")

    parser = argparse.ArgumentParser(prog="condsup", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("condops", parents=[common], help="conditional operators on a named vector")
    p.add_argument("scenario")
    p.add_argument("vector")
    p.add_argument("--time", type=int, default=0, help="filtration time whose partition defines F (default 0)")
    p.add_argument("--p-max", type=int, default=4096, dest="p_max")
    p.set_defaults(func=cmd_condops)

    p = sub.add_parser("check", parents=[common], help="AIP or NA verdict for the price process")
    p.add_argument("scenario")
    p.add_argument("condition", choices=["aip", "na"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("price", parents=[common], help="minimal superhedging price of a named claim")
    p.add_argument("scenario")
    p.add_argument("claim")
    p.add_argument("--time", type=int, default=0)
    p.add_argument("--eps", type=_rational_arg, default=Fraction(1, 1000))
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("ergodic", parents=[common], help="ergodicity and max-ergodic check of the transform")
    p.add_argument("scenario")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ergodic)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, lines, code = args.func(args)
    except ScenarioError as exc:
        code = exc.exit_code
        kind = "parse" if isinstance(exc, ScenarioParseError) else "validation"
        doc, lines = {"command": args.command, "error": {"kind": kind, "message": str(exc)}}, None
    except LatticeError as exc:
        code, kind = EXIT_INVALID, "validation"
        doc, lines = {"command": args.command, "error": {"kind": kind, "message": str(exc)}}, None
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    elif lines is None:
        print(f"condsup {args.command}: {doc['error']['kind']} error: {doc['error']['message']}", file=sys.stderr)
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
