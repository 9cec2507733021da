"""Command-line front end.

Exit codes: 0 success, 2 validation error (JSON error object on stdout),
1 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import ThetaError
from .cycle import cycle_closed_form, cycle_solver, selector
from .qexp import QExpansion, is_weakly_p_singular, theta_iterate
from .serre import BOREL_MODES, Irreducible, descriptor_from_dict, omega4_digits, serre_weight
from .verify import verify_local


class UsageError(ThetaError):
    code = "UsageError"


class InputError(Exception):
    """I/O or JSON parse failure (exit code 1)."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError("IOError", f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("ParseError", f"{path}: invalid JSON: {exc}") from exc


def _batch(paths, fn):
    out = [fn(_load(path)) for path in paths]
    return out[0] if len(out) == 1 else out


def cmd_theta_apply(args) -> str:
    if args.iterations < 0:
        raise UsageError("--iterations must be >= 0")
    if args.out and len(args.inputs) > 1:
        raise UsageError("--out takes a single input file")
    results = [theta_iterate(QExpansion.from_dict(_load(p)), args.iterations) for p in args.inputs]
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(results[0].to_json() + "\n")
        except OSError as exc:
            raise InputError("IOError", f"cannot write {args.out}: {exc.strerror}") from exc
        return ""
    docs = [g.to_dict() for g in results]
    return dumps(docs[0] if len(docs) == 1 else docs)


def _psingular(data) -> dict:
    f = QExpansion.from_dict(data)
    witnesses = [t.to_list() for t in f.coeffs if t.det % f.p]
    return {
        "weakly_p_singular": is_weakly_p_singular(f),
        "scope": "within max_trace",
        "max_trace": f.max_trace,
        "is_zero": f.is_zero(),
        "witnesses": witnesses,
    }


def cmd_psingular(args) -> str:
    return dumps(_batch(args.inputs, _psingular))


def cmd_cycle(args) -> str:
    if args.solver:
        sols = cycle_solver(args.p, args.r, args.k, args.semi_ordinary)
        return dumps({"p": args.p, "r": args.r, "k": args.k, "semi_ordinary": args.semi_ordinary,
                      "provenance": "solver", "solutions": [s.to_dict() for s in sols]})
    return dumps(cycle_closed_form(args.p, args.r, args.k, args.semi_ordinary).to_dict())


def cmd_serre(args) -> str:
    def one(data):
        if args.mode is not None and isinstance(data, dict):
            data = dict(data, mode=args.mode)
        mode = data.get("mode", "uniform") if isinstance(data, dict) else "uniform"
        d = descriptor_from_dict(data)
        sw = serre_weight(d, mode)
        out = sw.to_dict()
        out["checks"] = sw.checks()
        if isinstance(d, Irreducible):
            *digits, distinct = omega4_digits(d.p, d.a)
            out["omega4"] = {"digits": digits, "distinct": distinct}
        if args.with_selector:
            j, flag = selector(d.p, sw.w)
            out["selector"] = {"j": j, "use_theta3": flag}
        return out
    return dumps(_batch(args.inputs, one))


def cmd_verify_local(args) -> tuple[str, int]:
    report = verify_local(args.r_max)
    return dumps(report), 0 if report["ok"] else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="siegeltheta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("theta-apply", help="apply the big theta operator to a q-expansion")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theta_apply)

    p = sub.add_parser("psingular-check", help="weak p-singularity within the truncation")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FILE")
    p.set_defaults(func=cmd_psingular)

    p = sub.add_parser("cycle", help="theta cycle of a filtration value")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--semi-ordinary", action="store_true")
    p.add_argument("--solver", action="store_true", help="enumerate low-point structures")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("serre-weight", help="classical Serre weight of a descriptor")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="FILE")
    p.add_argument("--with-selector", action="store_true")
    p.add_argument("--mode", choices=BOREL_MODES, default=None, help="Borel variant")
    p.set_defaults(func=cmd_serre)

    p = sub.add_parser("verify-local", help="compare local theta formulas symbolically")
    p.add_argument("--r-max", type=int, default=1)
    p.set_defaults(func=cmd_verify_local)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except ThetaError as exc:
        print(dumps({"error": exc.to_dict()}))
        return 2
    except InputError as exc:
        print(dumps({"error": {"code": exc.code, "message": str(exc)}}))
        return 1
    text, code = result if isinstance(result, tuple) else (result, 0)
    if text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
