"""Command-line front end: ``montgomery <command> [options]``.

Output is CSV: a ``# montgomery-toolkit v1`` line, further ``#`` metadata
lines, one line of column names, then data.  Floats are written with
``repr`` (shortest round-trip form).  Exit codes: 0 success, 1 invalid
arguments, 2 numerical failure or a failed ``verify`` criterion.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import curves, eig, semiclassic

HEADER = "# montgomery-toolkit v1"
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(ValueError):
    pass


class SolveFailure(RuntimeError):
    def __init__(self, where: str, params: str, cause: BaseException):
        super().__init__(f"{where}: {cause} [{params}]")


def parse_range(text: str) -> list[float]:
    """``min:max:step`` (inclusive) or a single number."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}; expected min:max:step") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"range {text!r} must be a number or min:max:step")
    lo, hi, step = nums
    if not step > 0 or hi < lo:
        raise UsageError(f"range {text!r} needs step > 0 and max >= min")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_levels(text: str) -> list[int]:
    """Comma list of levels and ``a..b`` ranges, e.g. ``1..6`` or ``1,3,5..7``."""
    out: list[int] = []
    try:
        for chunk in text.split(","):
            if ".." in chunk:
                a, b = chunk.split("..")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(chunk))
    except ValueError:
        raise UsageError(f"cannot parse level list {text!r}") from None
    if not out or min(out) < 1:
        raise UsageError(f"levels must be integers >= 1, got {text!r}")
    return out


def fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _threads() -> int:
    raw = os.environ.get("MONT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"MONT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("MONT_THREADS must be >= 1")
    return n


def _guarded(fn, where: str):
    def run(item):
        try:
            return fn(*item)
        except Exception as exc:
            raise SolveFailure(where, ", ".join(map(str, item)), exc) from exc
    return run


def pmap(fn, items, where: str):
    """Ordered map, threaded when ``MONT_THREADS`` > 1."""
    run = _guarded(fn, where)
    n = _threads()
    if n == 1:
        return [run(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(run, items))


def write_csv(rows, columns, meta, out: Path | None) -> None:
    lines = [HEADER] + [f"# {m}" for m in meta] + [",".join(columns)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _spectrum_row(alpha, j):
    return (alpha, j, curves.eigenvalue(j, alpha))


def cmd_spectrum(args):
    alphas, levels = parse_range(args.alpha), parse_levels(args.levels)
    items = [(a, j) for a in alphas for j in levels]
    rows = pmap(_spectrum_row, items, "curves.eigenvalue")
    return rows, ["alpha", "j", "lambda"], [f"spectrum alpha={args.alpha} levels={args.levels}"]


def _curve_row(alpha, j, second):
    s = curves.eigen_curve(j, alpha, second=second)
    row = [alpha, j, s.lam, s.lambda_prime]
    if second:
        row.append(s.lambda_second)
    row.append(s.E)
    return tuple(row)


def cmd_curve(args):
    alphas, levels = parse_range(args.alpha), parse_levels(args.levels)
    items = [(a, j, args.second) for j in levels for a in alphas]
    rows = pmap(_curve_row, items, "curves.eigen_curve")
    cols = ["alpha", "j", "lambda", "lambda_prime"] + (["lambda_second"] if args.second else []) + ["E"]
    return rows, cols, [f"curve alpha={args.alpha} levels={args.levels}"]


def _critical_row(j, bracket):
    cp = curves.find_critical(j, bracket)
    return (j, cp.alpha_c, cp.lambda_at, cp.quotient, cp.second_deriv, cp.is_minimum)


def cmd_critical(args):
    levels = parse_levels(args.level)
    bracket = None
    if args.bracket:
        try:
            a, b = (float(p) for p in args.bracket.split(":"))
        except ValueError:
            raise UsageError(f"bracket must be a:b, got {args.bracket!r}") from None
        if not 0 < a < b:
            raise UsageError("bracket needs 0 < a < b")
        bracket = (a, b)
    rows = pmap(_critical_row, [(j, bracket) for j in levels], "curves.find_critical")
    cols = ["j", "alpha_c", "lambda", "quotient", "lambda_second", "minimum"]
    return rows, cols, [f"critical levels={args.level}"]


def _profile_row(E):
    p = semiclassic.classical_profile(E)
    return (E, p.turning.x_minus, p.turning.x_plus, p.C, p.F, p.Phi,
            p.action, p.action_deriv, p.moment2)


def cmd_semiclassic(args):
    if args.what == "ec":
        return [(semiclassic.find_Ec(),)], ["E_c"], ["zero of F above the separatrix"]
    if args.what == "limit":
        ec = semiclassic.find_Ec()
        row = (ec, semiclassic.F_prime(ec), semiclassic.capital_G(ec),
               semiclassic.second_derivative_limit())
        return [row], ["E_c", "F_prime", "G", "lambda_second_limit"], []
    if args.what == "regime1":
        return [semiclassic.regime1_constants()], ["K1", "limit"], []
    if args.E is None:
        raise UsageError("semiclassic profile needs --E")
    energies = parse_range(args.E)
    if min(energies) < 0:
        raise UsageError("energies must be >= 0")
    rows = pmap(_profile_row, [(E,) for E in energies], "semiclassic.classical_profile")
    cols = ["E", "x_minus", "x_plus", "C", "F", "Phi", "action", "action_deriv", "moment2"]
    return rows, cols, [f"profile E={args.E}"]


def _bohr_row(alpha, j, target):
    level = j if j is not None else curves.pick_level(alpha, target)
    c = curves.semiclassical_comparison(level, alpha)
    return (alpha, c.h, level, c.E, c.mu, c.bs_error, c.phi, c.phi_error, c.moment_error)


def cmd_bohr(args):
    alphas = parse_range(args.alpha)
    if min(alphas) <= 1.0:
        raise UsageError("bohr needs alpha > 1")
    level = None
    if args.level is not None:
        level = parse_levels(args.level)
        if len(level) != 1:
            raise UsageError("bohr takes a single --level")
        level = level[0]
    rows = pmap(_bohr_row, [(a, level, args.E) for a in alphas], "curves.semiclassical_comparison")
    cols = ["alpha", "h", "j", "E", "mu", "bs_error", "Phi", "phi_error", "moment_error"]
    return rows, cols, [f"bohr alpha={args.alpha} target_E={args.E}"]


def cmd_verify(args):
    from .acceptance import run_all

    only = set(parse_levels(args.only)) if args.only else None
    if only and max(only) > 11:
        raise UsageError("criteria are numbered 1..11")
    results = run_all(only)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_NUMERIC if failed else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=eig.DEFAULT_SEED,
                        help="seed of the inverse-iteration start vector")
    common.add_argument("-o", "--output", type=Path, help="write CSV here instead of stdout")
    p = _Parser(prog="montgomery", description="Spectral toolkit for -d^2/dt^2 + (t^2/2 - alpha)^2")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    s = sub.add_parser("spectrum", help="lambda_j(alpha) on a grid")
    s.add_argument("--alpha", required=True, help="min:max:step or a number")
    s.add_argument("--levels", default="1..6")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("curve", help="lambda_j and Feynman-Hellmann lambda_j' over alpha")
    s.add_argument("--alpha", required=True)
    s.add_argument("--levels", default="1..6")
    s.add_argument("--second", action="store_true", help="also compute lambda_j''")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("critical", help="critical points of lambda_j")
    s.add_argument("--level", "--levels", dest="level", required=True)
    s.add_argument("--bracket", help="a:b bracket for lambda_j' (default: auto scan)")
    s.set_defaults(func=cmd_critical)

    s = sub.add_parser("semiclassic", help="classical functionals of V(x) = (x^2/2 - 1)^2")
    s.add_argument("what", choices=["ec", "limit", "regime1", "profile"])
    s.add_argument("--E", help="energies for 'profile', min:max:step")
    s.set_defaults(func=cmd_semiclassic)

    s = sub.add_parser("bohr", help="compare levels with Bohr-Sommerfeld and classical limits")
    s.add_argument("--alpha", required=True)
    s.add_argument("--level", help="full-line level (default: closest to --E)")
    s.add_argument("--E", type=float, default=2.35, help="target rescaled energy")
    s.set_defaults(func=cmd_bohr)

    s = sub.add_parser("verify", help="run acceptance criteria 1-11")
    s.add_argument("--only", help="subset, e.g. 1,2,10..11")
    s.set_defaults(func=cmd_verify)
    return p


_VALUE_OPTIONS = ("--alpha", "--E", "--bracket")


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-2.5:6.5:0.05" as an option; glue it to its flag
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _VALUE_OPTIONS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    eig.set_default_seed(args.seed)
    try:
        result = args.func(args)
        if isinstance(result, int):
            return result
        rows, columns, meta = result
        write_csv(rows, columns, meta + [f"seed={args.seed}"], args.output)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"montgomery: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolveFailure as exc:
        print(f"montgomery {args.command}: numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        frame = traceback.extract_tb(exc.__traceback__)[-1]
        where = Path(frame.filename).stem
        print(f"montgomery {args.command}: numerical failure in {where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
