"""
Command-line interface.

Exit codes: 0 success, 1 usage error, 2 computation error (limit, range,
checkpoint), 3 verification failure (an identity mismatch or a table row
outside its calibrated band).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal, InvalidOperation
from typing import Iterable, Sequence

from . import asymptotics, bounds, gapstats, identities, sequence
from .errors import NextPrimeError
from .sieve import PrimeEngine, SieveConfig

DEFAULT_LIMIT = 10**8
EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_int(text: str) -> int:
    """Integer from ``"100"``, ``"1e6"`` or ``"10_000"``; must be exact."""
    try:
        val = Decimal(text.replace("_", ""))
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not val.is_finite() or val != val.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(val)


def parse_list(text: str) -> list[int]:
    return [parse_int(t) for t in text.split(",") if t.strip()]


def _global_options() -> argparse.ArgumentParser:
    # Defaults are suppressed so the options may appear before or after the
    # subcommand without one position clobbering the other.
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--limit", type=parse_int, default=S, help="sieve bound (default 1e8)")
    p.add_argument("--format", choices=("csv", "json", "table"), default=S)
    p.add_argument("--output", default=S, help="output file (default stdout)")
    p.add_argument("--threads", type=parse_int, default=S, help="sieve threads, 0 = auto")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = _Parser(prog="nextprime", parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("seq", parents=[common], help="stream (n, a_n)")
    p.add_argument("--from", dest="lo", type=parse_int, required=True)
    p.add_argument("--to", dest="hi", type=parse_int, required=True)

    p = sub.add_parser("sum", parents=[common], help="S_n = a_1 + ... + a_n")
    p.add_argument("--n", type=parse_int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--closed", dest="how", action="store_const", const="closed")
    g.add_argument("--brute", dest="how", action="store_const", const="brute")
    g.add_argument("--both", dest="how", action="store_const", const="both")

    p = sub.add_parser("prod", parents=[common], help="P_{n-1} = a_1 ... a_{n-1}")
    p.add_argument("--n", type=parse_int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="mode", action="store_const", const="exact")
    g.add_argument("--log", dest="mode", action="store_const", const="log")
    p.add_argument("--exact-cap", type=parse_int, default=None)

    p = sub.add_parser("count", parents=[common], help="#{n <= x : a_n = a}")
    p.add_argument("--a", type=parse_int, required=True)
    p.add_argument("--x", type=parse_int, required=True)

    p = sub.add_parser("verify", parents=[common], help="closed forms vs brute force")
    p.add_argument("--n", type=parse_list, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--exact-cap", type=parse_int, default=None)

    p = sub.add_parser("asympt", parents=[common], help="ratio/residual tables")
    p.add_argument("--which", choices=sorted(asymptotics.TABLES), required=True)
    p.add_argument("--grid", type=parse_list, default=None)
    p.add_argument("--save", metavar="P", help="checkpoint after every row")
    p.add_argument("--resume", metavar="P", help="continue from a checkpoint")
    p.add_argument("--stop-after", type=parse_int, default=None, metavar="ROWS")

    p = sub.add_parser("checkpoint", parents=[common], help="save/resume gap aggregates")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--save", metavar="P")
    g.add_argument("--resume", metavar="P")
    p.add_argument("--upto", type=parse_int, required=True)
    p.add_argument(
        "--mode",
        choices=("index", "prime"),
        default="index",
        help="upto is a gap index (default) or a prime-value bound",
    )
    p.add_argument("--to", dest="save_to", metavar="P", help="with --resume: write here")
    return parser


# ---------------------------------------------------------------- output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render(columns: Sequence[str], rows: Iterable[Sequence], fmt: str, extra: dict | None = None) -> str:
    rows = list(rows)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    if fmt == "json":
        obj = {"columns": list(columns), "rows": [dict(zip(columns, r)) for r in rows]}
        if extra:
            obj.update(extra)
        return json.dumps(obj, allow_nan=False) + "\n"
    cells = [list(columns)] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    if extra:
        lines.extend(f"{k}: {_fmt(v)}" for k, v in extra.items() if not isinstance(v, dict))
        for k, v in extra.items():
            if isinstance(v, dict):
                lines.append(f"{k}: " + ", ".join(f"{a}={_fmt(b)}" for a, b in v.items()))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands


def _cmd_seq(eng, a):
    if a.lo < 1 or a.hi < a.lo:
        raise UsageError("seq needs 1 <= --from <= --to")
    rows = ((r.n, r.a_n) for r in sequence.stream_a(eng, a.lo, a.hi))
    return ["n", "a_n"], rows, None, EXIT_OK


def _cmd_sum(eng, a):
    how = a.how or "closed"
    closed = identities.sum_a_closed(eng, a.n) if how in ("closed", "both") else None
    brute = identities.sum_a_brute(eng, a.n) if how in ("brute", "both") else None
    code = EXIT_VERIFY if how == "both" and closed != brute else EXIT_OK
    return ["n", "s_closed", "s_brute"], [(a.n, closed, brute)], None, code


def _exact_cap(eng, a) -> int:
    if a.exact_cap is None:
        return min(identities.DEFAULT_EXACT_CAP, eng.limit)
    if a.exact_cap > eng.limit:
        raise UsageError(f"nextprime: error: --exact-cap {a.exact_cap} exceeds --limit {eng.limit}")
    return a.exact_cap


def _cmd_prod(eng, a):
    mode = a.mode or "log"
    val = identities.prod_a_closed(eng, a.n, mode, _exact_cap(eng, a))
    col = "p_prev" if mode == "exact" else "log_p_prev"
    return ["n", col], [(a.n, val)], None, EXIT_OK


def _cmd_count(eng, a):
    return ["a", "x", "count"], [(a.a, a.x, sequence.solution_count(eng, a.a, a.x))], None, EXIT_OK


def _cmd_verify(eng, a):
    reports = identities.verify_identities(eng, a.n, a.exact, _exact_cap(eng, a))
    rows = []
    for r in reports:
        exact = None
        if r.p_exact_closed is not None:
            exact = "equal" if r.exact_ok else "differ"
        rows.append(
            (r.n, r.branch_used, r.s_closed, r.s_brute, r.log_p_closed,
             r.log_p_brute, exact, r.passed, r.error)
        )
    cols = ["n", "branch", "s_closed", "s_brute", "log_p_closed", "log_p_brute",
            "exact_product", "passed", "error"]
    if any(r.mismatch for r in reports):
        code = EXIT_VERIFY
    elif any(r.error for r in reports):
        code = EXIT_COMPUTE
    else:
        code = EXIT_OK
    return cols, rows, None, code


def _cmd_asympt(eng, a):
    grid = a.grid or asymptotics.default_grid()
    if any(b <= c for c, b in zip(grid, grid[1:])):
        raise UsageError("nextprime: error: --grid must be strictly increasing")
    if a.save and a.resume and a.save != a.resume:
        raise UsageError("--save and --resume must name the same file when combined")
    path = a.resume or a.save
    rows = asymptotics.run_table(
        eng, a.which, grid, checkpoint=path, resume=bool(a.resume), stop_after=a.stop_after
    )
    fit, extra = None, None
    if a.which == "gaps2" and len(rows) >= 3:
        fit = asymptotics.gap_square_exponent(eng, [r.x for r in rows], rows)
        extra = {"fit": {"slope": fit.slope, "intercept": fit.intercept,
                         "r_squared": fit.r_squared, "points_used": fit.points_used}}
    cols = ["x", "raw", "normalizer", "ratio", "residual", "label"]
    out = [(r.x, r.raw, r.normalizer, r.ratio, r.residual, r.label) for r in rows]
    bad = bounds.check_rows(a.which, rows, eng, fit)
    for msg in bad:
        print(f"bound violated: {msg}", file=sys.stderr)
    return cols, out, extra, EXIT_VERIFY if bad else EXIT_OK


def _cmd_checkpoint(eng, a):
    mode = gapstats.Mode.PRIME_VALUE_BOUND if a.mode == "prime" else gapstats.Mode.GAP_INDEX_BOUND
    start, dest = None, a.save
    if a.resume:
        start = gapstats.load_checkpoint(a.resume)
        gapstats.validate_against(start, eng)
        dest = a.save_to or a.resume
    agg = gapstats.accumulate_to(eng, a.upto, mode, start=start)
    gapstats.save_checkpoint(agg, dest, eng.limit)
    cols = ["k", "last_prime", "sum_d", "sum_d2", "twin_gaps", "sum_log_d",
            "sum_log_d_factorial", "sum_harmonic"]
    row = (agg.k, agg.last_prime, agg.sum_d, agg.sum_d2, agg.twin_gaps,
           float(agg.sum_log_d), float(agg.sum_log_d_factorial), float(agg.sum_harmonic))
    return cols, [row], None, EXIT_OK


COMMANDS = {
    "seq": _cmd_seq,
    "sum": _cmd_sum,
    "prod": _cmd_prod,
    "count": _cmd_count,
    "verify": _cmd_verify,
    "asympt": _cmd_asympt,
    "checkpoint": _cmd_checkpoint,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "nextprime: error: a subcommand is required")
        limit = getattr(args, "limit", DEFAULT_LIMIT)
        fmt = getattr(args, "format", "table")
        output = getattr(args, "output", None)
        threads = getattr(args, "threads", 0)
        try:
            config = SieveConfig(limit=limit, parallel_segments=threads)
        except ValueError as exc:
            raise UsageError(f"nextprime: error: {exc}") from None
        engine = PrimeEngine(config)
        cols, rows, extra, code = COMMANDS[args.command](engine, args)
        text = render(cols, rows, fmt, extra)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except (NextPrimeError, ValueError, ArithmeticError, OSError) as exc:
        print(f"nextprime: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE

    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
