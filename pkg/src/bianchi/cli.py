"""Command-line front end.

Exit codes: 0 success, 1 a checked property came out false, 2 usage or
capacity error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from .certify import (
    SubgroupDescriptor,
    certify_noncongruence,
    power_subgroup_status,
    reduced_forms,
    reference_abelianization,
    verify_appendix_a,
    verify_lemma_6_1,
)
from .ideals import CapacityError, factor_ideal, format_ideal, parse_ideal, split_type
from .indexcalc import (
    DEFAULT_CAPS,
    Caps,
    index_formula,
    verify_filtration,
    verify_multiplicativity,
    verify_surjectivity,
    verify_wohlfahrt_closure,
)
from .quadring import make_ring
from .sweep import SUITES, run_suite, squarefree_range, to_csv

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parallelism(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("parallelism must be at least 1")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=_positive, default=DEFAULT_CAPS.group, help="group element cap")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--parallelism", type=_parallelism, default=1)

    parser = argparse.ArgumentParser(prog="bianchi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str, *, d=True, p=False, q=False, ideal=False, m=False, n=False):
        sp = sub.add_parser(name, help=help, parents=[common])
        if d:
            sp.add_argument("-d", type=int, required=True)
        if p:
            sp.add_argument("-p", type=int, required=True)
        if q:
            sp.add_argument("-q", type=int, required=True)
        if ideal:
            sp.add_argument("--ideal", action="append", required=True)
        if m:
            sp.add_argument("-m", type=_positive, required=True)
        if n:
            sp.add_argument("-n", type=_positive, required=True)
        return sp

    add("split", "splitting type of a rational prime", p=True)
    add("classnum", "class number by reduced forms")
    add("abelianization", "reference abelianization data")
    add("index", "closed-form index with brute-force oracle", ideal=True)
    add("factor", "prime ideal factorization", ideal=True)
    add("verify-surjectivity", "S, T_1, T_w generate SL(2, O/I)", ideal=True)
    add("verify-filtration", "kernel of SL(2, O/P^(m+1)) -> SL(2, O/P^m)", ideal=True, m=True)
    add("verify-multiplicativity", "index is multiplicative on coprime ideals", ideal=True)
    add("verify-wohlfahrt", "normal closure of T_1^m, T_w^m in SL(2, O/(mn))", m=True, n=True)
    add("verify-lemma61", "PSL(2, O/2) and its square subgroup")
    add("verify-appendix-a", "ramified q >= 5 relations and index-q check", q=True)
    cert = add("certify", "non-congruence certificate", q=True)
    cert.add_argument("--name", default="B_d")
    cert.add_argument("--index", type=_positive, default=1)
    cert.add_argument("--level", type=_positive, default=1)
    cert.add_argument("--free-rank", type=int, default=None)
    cert.add_argument("--torsion", type=_int_list, default=None)
    ps = add("power-status", "congruence status of B_d^2, B_d' and PE_d analogues")
    ps.add_argument("--mod-squares-order", type=_positive, default=None)
    sw = sub.add_parser("sweep", help="run a named verification suite", parents=[common])
    sw.add_argument("--suite", choices=SUITES + ("all",), required=True)
    sw.add_argument("--d-list", type=_int_list, default=None, help="comma-separated d values")
    sw.add_argument("--d-min", type=int, default=None)
    sw.add_argument("--d-max", type=int, default=-1)
    sw.add_argument("--norm-bound", type=_positive, default=None)
    return parser


def _one_ideal(args, R):
    if len(args.ideal) != 1:
        raise UsageError(f"{args.command} takes exactly one --ideal")
    return parse_ideal(args.ideal[0], R)


def dispatch(args: argparse.Namespace) -> tuple[Any, bool]:
    caps = Caps(group=args.cap)
    cmd = args.command
    if cmd == "sweep":
        ds = args.d_list
        if ds is None and args.d_min is not None:
            ds = squarefree_range(args.d_min, args.d_max)
        report = run_suite(args.suite, ds, args.norm_bound, caps, args.parallelism)
        return report, report["ok"]
    if args.format == "csv":
        raise UsageError("csv output is only available for sweep")

    R = make_ring(args.d)
    if cmd == "split":
        return split_type(R, args.p).as_dict(), True
    if cmd == "classnum":
        forms = reduced_forms(args.d)
        return {"d": args.d, "class_number": len(forms), "reduced_forms": [list(f) for f in forms]}, True
    if cmd == "abelianization":
        return reference_abelianization(args.d).as_dict(), True
    if cmd == "index":
        rep = index_formula(R, _one_ideal(args, R), caps)
        return rep.as_dict(), rep.oracle is None or rep.match
    if cmd == "factor":
        I = _one_ideal(args, R)
        return {"ideal": format_ideal(I, hnf=True), "norm": I.norm, "factors": factor_ideal(I).as_list()}, True
    if cmd == "verify-surjectivity":
        rep = verify_surjectivity(R, _one_ideal(args, R), caps)
        return rep.as_dict(), rep.surjective
    if cmd == "verify-filtration":
        rep = verify_filtration(R, _one_ideal(args, R), args.m, caps)
        return rep.as_dict(), rep.ok
    if cmd == "verify-multiplicativity":
        if len(args.ideal) != 2:
            raise UsageError("verify-multiplicativity takes two --ideal arguments")
        A, B = (parse_ideal(s, R) for s in args.ideal)
        rep = verify_multiplicativity(R, A, B, caps)
        return rep.as_dict(), rep.ok
    if cmd == "verify-wohlfahrt":
        rep = verify_wohlfahrt_closure(R, args.m, args.n, caps)
        return rep.as_dict(), rep.equal
    if cmd == "verify-lemma61":
        rep = verify_lemma_6_1(args.d)
        return rep.as_dict(), rep.ok
    if cmd == "verify-appendix-a":
        rep = verify_appendix_a(args.d, args.q, caps)
        return rep.as_dict(), rep.ok
    if cmd == "certify":
        desc = SubgroupDescriptor(
            args.name, args.index, args.level, args.free_rank,
            tuple(args.torsion) if args.torsion is not None else None,
        )
        return certify_noncongruence(args.d, args.q, desc).as_dict(), True
    if cmd == "power-status":
        return power_subgroup_status(args.d, args.mod_squares_order).as_dict(), True
    raise UsageError(f"unknown command {cmd}")


def _text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            _text(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}" for v in obj
        )
    return f"{pad}{obj}"


def render(payload: Any, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(payload)
    if fmt == "text":
        return _text(payload) + "\n"
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _attach_list_values(argv: list[str]) -> list[str]:
    # "--d-list -1,-2" would otherwise be read as an unknown option
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--d-list", "--torsion"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_list_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        payload, ok = dispatch(args)
    except (UsageError, CapacityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(payload, args.format))
    return EXIT_OK if ok else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
