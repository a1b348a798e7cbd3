"""Command-line front end.

Exit codes: 0 success, 2 validation failure, 3 check failure, 4 I/O failure.
On failure the last line on stderr is ``<Reason>: <detail>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from permcodes import checks
from permcodes.code_builder import (
    CodeParameters,
    InvalidParameters,
    descriptor,
    exact_str,
    gram_matrix,
    load_descriptor,
    validate,
)
from permcodes.exact_poly import format_fraction
from permcodes.fidelity import GridOutOfRange, fidelity_lower_bound, table_rows, taylor_comparison
from permcodes.number_theory import coprime_sequence_from_prime

EXIT_OK, EXIT_VALIDATION, EXIT_CHECK, EXIT_IO = 0, 2, 3, 4


class CliFailure(Exception):
    def __init__(self, code: int, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.code = code


@dataclass
class RunConfig:
    command: str
    n: tuple[int, ...] | None = None
    q: int | None = None
    gamma_min: float | None = None
    gamma_max: float | None = None
    count: int = 1
    spacing: str = "log"
    out: Path | None = None
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)

    def gamma_grid(self) -> list[float]:
        lo = self.gamma_min
        hi = self.gamma_max if self.gamma_max is not None else lo
        if lo is None:
            raise CliFailure(EXIT_VALIDATION, "GridOutOfRange", "no gamma given")
        if self.count < 1:
            raise CliFailure(EXIT_VALIDATION, "GridOutOfRange", f"count={self.count} < 1")
        for g in (lo, hi):
            if not 0 < g < 1:
                raise CliFailure(EXIT_VALIDATION, "GridOutOfRange", f"gamma={g} outside (0, 1)")
        if hi < lo:
            raise CliFailure(EXIT_VALIDATION, "GridOutOfRange", f"gamma-max {hi} < gamma-min {lo}")
        if self.count == 1:
            return [lo]
        if self.spacing == "log":
            return [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), self.count)]
        return [float(x) for x in np.linspace(lo, hi, self.count)]


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _tolerance(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if name not in checks.DEFAULT_TOLERANCES or not value:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE with NAME in {sorted(checks.DEFAULT_TOLERANCES)}")
    return name, float(value)


def _add_code_source(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("code parameters")
    src.add_argument("--code", type=Path, help="descriptor written by `build`")
    src.add_argument("--n", type=_int_list, help="comma-separated n_1,...,n_D")
    src.add_argument("--primes-from", type=int, metavar="P", help="first prime of the coprime recipe")
    src.add_argument("--D", type=int, default=3, help="number of logical states with --primes-from")
    src.add_argument("--q", type=int, default=3, help="length exponent, m = N**q")
    src.add_argument("--legacy", action="store_true", help="relax the D>=3 size constraints")
    src.add_argument("--allow-odd-N", action="store_true")


def _params(args: argparse.Namespace) -> CodeParameters:
    try:
        if args.code is not None:
            try:
                return load_descriptor(args.code)
            except OSError as exc:
                raise CliFailure(EXIT_IO, "IOError", f"{args.code}: {exc.strerror}") from None
            except (ValueError, KeyError) as exc:
                raise CliFailure(EXIT_VALIDATION, "BadDescriptor", str(exc)) from None
        if args.primes_from is not None:
            n = coprime_sequence_from_prime(args.primes_from, args.D).values
        elif args.n is not None:
            n = args.n
        else:
            raise CliFailure(EXIT_VALIDATION, "MissingParameters", "give --code, --n or --primes-from")
        return validate(n, args.q, legacy=args.legacy, allow_odd_N=args.allow_odd_N)
    except InvalidParameters as exc:
        raise CliFailure(EXIT_VALIDATION, exc.violations[0].kind, exc.violations[0].detail) from None
    except ValueError as exc:
        raise CliFailure(EXIT_VALIDATION, "InvalidParameters", str(exc)) from None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.write_text(text)
    except OSError as exc:
        raise CliFailure(EXIT_IO, "IOError", f"{out}: {exc.strerror}") from None


def _summary(params: CodeParameters) -> str:
    gram = gram_matrix(params)
    where = "-" if gram.argmax is None else f"{gram.argmax[0]},{gram.argmax[1]}"
    return (
        f"n={','.join(map(str, params.n))} N={params.N} g={','.join(map(str, params.g))} "
        f"q={params.q} m={params.m} gram_max_off_diagonal={exact_str(gram.max_off_diagonal)} at={where}\n"
    )


# --------------------------------------------------------------------------
# commands


def cmd_build(args: argparse.Namespace) -> int:
    params = _params(args)
    text = json.dumps(descriptor(params), indent=2) + "\n"
    _emit(text, args.out)
    # keep stdout a clean descriptor when no file is given
    (sys.stdout if args.out is not None else sys.stderr).write(_summary(params))
    return EXIT_OK


def cmd_fidelity(args: argparse.Namespace) -> int:
    params = _params(args)
    cfg = RunConfig(
        "fidelity",
        gamma_min=args.gamma if args.gamma is not None else args.gamma_min,
        gamma_max=args.gamma if args.gamma is not None else args.gamma_max,
        count=1 if args.gamma is not None else args.count,
        spacing=args.spacing,
        out=args.out,
    )
    try:
        report = fidelity_lower_bound(params, cfg.gamma_grid())
    except GridOutOfRange as exc:
        raise CliFailure(EXIT_VALIDATION, "GridOutOfRange", str(exc)) from None
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(table_rows(report, discounted=args.discounted))
    _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


def taylor_text(params: CodeParameters) -> tuple[str, bool]:
    tc = taylor_comparison(params, order=2)
    c = tc.constants
    lines = [
        f"code n={','.join(map(str, params.n))} N={params.N} g={','.join(map(str, params.g))} q={params.q} m={params.m}",
        f"constant_term={format_fraction(tc.constant)}",
        f"closed_form_c={format_fraction(c['c'])}",
        f"closed_form_c_prime={format_fraction(c['c_prime'])}",
        f"closed_form_first_order={format_fraction(c['first_order'])}",
        f"closed_form_second_order={format_fraction(c['second_order'])}",
        f"closed_form_second_order_c_prime={format_fraction(c['second_order_prime'])}",
    ]
    if "first_order_q_scaled" in c:
        lines.append(f"closed_form_first_order_q_scaled={format_fraction(c['first_order_q_scaled'])}")
    for o in tc.orders:
        arg = ",".join(f"{k}:{v}" for k, v in o.argmin.items())
        lines += [
            f"order={o.order} extracted={format_fraction(o.extracted)} closed_form={format_fraction(o.closed_form)} "
            f"delta={format_fraction(o.delta)} status={'agree' if o.agrees else 'discrepancy'} argmin={arg}",
            f"order={o.order} uniform_d={format_fraction(o.uniform)} per_coefficient_min={format_fraction(o.per_coefficient)}",
        ]
    ok = tc.first_order_ok and tc.constant == 1
    if "first_order_q_scaled" in c:
        ok = ok and tc.orders[0].extracted >= c["first_order_q_scaled"]
    lines.append(f"first_order_within_closed_form_bound={'yes' if tc.first_order_ok else 'no'}")
    return "\n".join(lines) + "\n", ok


def cmd_taylor(args: argparse.Namespace) -> int:
    text, ok = taylor_text(_params(args))
    _emit(text, args.out)
    if not ok:
        raise CliFailure(EXIT_CHECK, "CheckFailed", "first-order coefficient below the closed-form bound")
    return EXIT_OK


def _finish_checks(results: list[checks.CheckResult], out: Path | None) -> int:
    _emit(checks.format_report(results), out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise CliFailure(EXIT_CHECK, "CheckFailed", ",".join(failed))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    if not 0 <= args.gamma <= 1:
        raise CliFailure(EXIT_VALIDATION, "GridOutOfRange", f"gamma={args.gamma} outside [0, 1]")
    if not 2 <= args.m <= 14:
        raise CliFailure(EXIT_VALIDATION, "TooLarge", f"m={args.m} outside 2..14")
    results = checks.oracle_suite(args.m, args.gamma, args.seed, dict(args.tol or []))
    return _finish_checks(results, args.out)


def cmd_check(args: argparse.Namespace) -> int:
    return _finish_checks(checks.code_checks(_params(args)), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permcodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a code and write its descriptor")
    _add_code_source(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("fidelity", help="fidelity lower bound on a gamma grid (CSV)")
    _add_code_source(p)
    p.add_argument("--gamma", type=float, help="single gamma point")
    p.add_argument("--gamma-min", type=float, default=1e-4)
    p.add_argument("--gamma-max", type=float, default=1e-2)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--discounted", action="store_true", help="add the Gram-corrected bound column")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("taylor", help="exact gamma and gamma^2 coefficients versus closed forms")
    _add_code_source(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_taylor)

    p = sub.add_parser("oracle", help="dense-simulator cross-checks")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=_tolerance, action="append", metavar="NAME=VALUE")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="orthogonality and Diophantine report")
    _add_code_source(p)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            sys.stderr.write("UsageError: invalid arguments\n")
            return EXIT_VALIDATION
        return EXIT_OK
    try:
        return args.func(args)
    except CliFailure as exc:
        sys.stdout.flush()
        sys.stderr.write(f"{exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
