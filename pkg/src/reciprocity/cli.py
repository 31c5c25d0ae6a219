"""Batch command line: one subcommand per computation, CSV or JSON on stdout or --out.

Every artifact starts with the tool version and an echo of the parsed
configuration, and carries no timestamps, so identical invocations give
identical bytes. Exit codes: 0 success, 2 usage, 3 precondition, 4 invariant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .arithmetic import is_prime, jacobi_symbol, legendre_symbol
from .errors import InvariantViolation, PreconditionError, SearchExhausted
from .pell import classify_two_prime_case, fundamental_pell, solve_six_equations
from .quadform import (
    Discriminant,
    QuadForm,
    class_number,
    from_determinant,
    lemma_prediction,
    proper_representations,
    representation_counts,
    unit_count,
)
from .series import (
    DEFAULT_EPS_SCHEDULE,
    SeriesParams,
    class_number_formula_check,
    dirichlet_series_expansion_check,
    divergence_witness,
    fundamental_identity_check,
    product_ratio,
    teege_identity_check,
)
from .ternary import TernaryForm, solvability, valid_forms, verify_reciprocity_cases
from .witness import (
    admissible_start,
    find_witness,
    mertens_sum,
    rogers_partition,
    smallest_admissible_above,
    teege_descent,
)

SCHEMA = 1

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_INVARIANT = 0, 2, 3, 4


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# --- formatting ---------------------------------------------------------------


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return format(v, ".17g")
    return v


def render(table: Table, command: str, config: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "version": __version__,
            "command": command,
            "config": config,
            "columns": table.columns,
            "rows": [[_json_cell(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# reciprocity {__version__}\n")
    buf.write(f"# command: {command}\n")
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def read_artifact(text: str) -> tuple[dict, Table]:
    """Parse CSV or JSON output back into (metadata, table)."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return {k: doc[k] for k in ("schema", "version", "command", "config")}, Table(
            doc["columns"], doc["rows"]
        )
    meta: dict = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# config: "):
            meta["config"] = json.loads(line[len("# config: ") :])
        elif line.startswith("# command: "):
            meta["command"] = line[len("# command: ") :]
        elif line.startswith("# reciprocity "):
            meta["version"] = line[len("# reciprocity ") :]
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    return meta, Table(columns, [[_parse_cell(c) for c in row] for row in reader])


# --- handlers -----------------------------------------------------------------


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _disc(args) -> Discriminant:
    if args.d is not None:
        return Discriminant(args.d)
    if args.D is not None:
        return from_determinant(args.D)
    raise UsageError("one of --d or --D is required")


def cmd_symbol(args) -> Table:
    _need(args, "a", "n")
    kind = "legendre" if is_prime(args.n) and args.n > 2 else "jacobi"
    value = legendre_symbol(args.a, args.n) if kind == "legendre" else jacobi_symbol(args.a, args.n)
    return Table(["a", "n", "symbol", "kind"], [[args.a, args.n, value, kind]])


def cmd_pell(args) -> Table:
    _need(args, "D")
    sol = fundamental_pell(args.D)
    return Table(["D", "T", "U", "regulator"], [[sol.D, sol.T, sol.U, math.log(sol.unit)]])


def cmd_pell_cases(args) -> Table:
    _need(args, "b", "beta")
    if args.a is None:
        r = classify_two_prime_case(args.b, args.beta)
    else:
        r = solve_six_equations(args.a, args.b, args.beta)
    return Table(["case", "first", "second", "sign", "M", "N"], [[r.case_id, r.first, r.second, r.sign, r.M, r.N]])


def cmd_classnum(args) -> Table:
    classes = class_number(_disc(args))
    reps = ";".join(f"({Q.a},{Q.b},{Q.c})" for Q in classes.representatives)
    return Table(["d", "h", "representatives"], [[classes.d.d, classes.h, reps]])


def cmd_represent(args) -> Table:
    if args.a is not None:
        _need(args, "b", "c", "n")
        Q = QuadForm(args.a, args.b, args.c)
        if Q.disc > 0 and args.limit is not None:
            pairs = proper_representations(Q, args.n, bound=args.limit)
        else:
            pairs = proper_representations(Q, args.n, domain="automorph" if Q.disc > 0 else None)
        return Table(["form", "m", "x", "y"], [[str(Q), args.n, x, y] for x, y in pairs])
    _need(args, "limit")
    disc = _disc(args)
    counts = representation_counts(class_number(disc), args.limit)
    table = Table(["d", "n", "count", "mu", "w", "predicted", "agrees"])
    for n in range(1, args.limit + 1):
        if math.gcd(n, 2 * disc.d) != 1:
            continue
        mu, predicted = lemma_prediction(disc, n)
        table.rows.append([disc.d, n, counts[n], mu, unit_count(disc), predicted, counts[n] == predicted])
    if not all(row[-1] for row in table.rows):
        bad = [row for row in table.rows if not row[-1]]
        raise InvariantViolation("counting lemma fails", rows=bad)
    return table


def cmd_ternary(args) -> Table:
    columns = ["a", "b", "c", "res_a", "res_b", "res_c", "signs", "conditions", "witness"]
    if args.a is not None:
        _need(args, "b", "c")
        forms = [TernaryForm(args.a, args.b, args.c)]
    else:
        _need(args, "limit")
        forms = valid_forms(args.limit)
    table = Table(columns)
    mismatches = []
    for F in forms:
        r = solvability(F)
        witness = "" if r.witness is None else "{},{},{}".format(*r.witness)
        table.rows.append([F.a, F.b, F.c, *r.residue_conditions, r.sign_condition, r.solvable, witness])
        if r.solvable != (r.witness is not None):
            mismatches.append((F.a, F.b, F.c))
    if mismatches:
        raise InvariantViolation("solvability criterion disagrees with search", forms=mismatches[:20])
    return table


def cmd_verify_qr(args) -> Table:
    _need(args, "limit")
    report = verify_reciprocity_cases(args.limit)
    if report.violations:
        raise InvariantViolation("reciprocity implication violated", violations=report.violations[:20])
    return Table(["case", "pairs", "violations"], [[c, n, 0] for c, n in report.rows()])


def _schedule(args) -> tuple[float, ...]:
    if args.eps_schedule is None:
        return DEFAULT_EPS_SCHEDULE
    try:
        return tuple(float(e) for e in args.eps_schedule.split(","))
    except ValueError:
        raise UsageError("--eps-schedule takes comma-separated floats") from None


def _params(args) -> SeriesParams:
    return SeriesParams(
        args.s if args.s is not None else 2.0,
        args.lattice_cutoff or 2000,
        args.prime_cutoff or 2000,
        args.n_cutoff or 2000,
    )


def cmd_series(args) -> Table:
    check = args.check
    if check == "euler":
        _need(args, "D")
        r = dirichlet_series_expansion_check(args.D, _params(args))
        return Table(["D", "s", "series", "product", "residual", "terms"], [[args.D, _params(args).s, r.series, r.product, r.residual, r.terms]])
    if check == "fundamental":
        r = fundamental_identity_check(_disc(args), _params(args))
        return Table(["d", "s", "lhs", "rhs", "residual", "k", "w"], [[r.d, r.s, r.lhs, r.rhs, r.residual, r.k, r.w]])
    if check == "classnum":
        r = class_number_formula_check(_disc(args), _schedule(args), args.lattice_cutoff or 10**6)
        table = Table(["d", "h", "eps", "scaled_sum", "closed_form", "extrapolated", "deviation", "monotone"])
        for e, g in zip(r.eps, r.scaled_sums):
            table.rows.append([r.d, r.h, e, g, r.closed_form, r.extrapolated, r.deviation, r.monotone])
        return table
    if check == "teege":
        _need(args, "D")
        P = args.prime_cutoff or 10**6
        r = teege_identity_check(args.D, P, _schedule(args))
        table = Table(["p", "eps", "lhs", "rhs", "deviation", "ratio_without_A", "extrapolated"])
        for e, rhs, dev in zip(r.eps, r.rhs, r.deviations):
            table.rows.append([r.p, e, r.lhs, rhs, dev, product_ratio(r.p, 1 + e, P, include_A=False) / 2, r.extrapolated])
        return table
    if check == "diverge":
        targets = args.target or [1.0, 2.0, 5.0]
        table = Table(["target", "cutoff", "value", "minorant", "primes_used", "complete"])
        for t in targets:
            r = divergence_witness(t, args.limit or 10**8)
            table.rows.append([r.target, r.cutoff, r.value, r.minorant, r.primes_used, r.complete])
        return table
    raise UsageError("series needs --check {euler|fundamental|classnum|teege|diverge}")


def cmd_witness(args) -> Table:
    _need(args, "a")
    r = find_witness(args.a, args.limit or 10**6)
    return Table(["a", "beta", "method"], [[r.a, r.beta, r.method]])


def cmd_descent(args) -> Table:
    _need(args, "a")
    start = args.b if args.b is not None else smallest_admissible_above(args.a)
    if not admissible_start(args.a, start):
        raise PreconditionError(f"B_start={start} is not admissible for p={args.a}")
    chain = teege_descent(args.a, start)
    table = Table(["p", "step", "x", "B", "b_prime", "terminal"])
    for i, s in enumerate(chain.steps):
        table.rows.append([chain.p, i, s.x, s.B, s.b_prime, chain.terminal])
    if not chain.steps:
        table.rows.append([chain.p, 0, None, None, None, chain.terminal])
    return table


def _xs(args) -> list[int]:
    if not args.x:
        raise UsageError("--x is required")
    try:
        return [int(float(v)) for v in args.x.split(",")]
    except ValueError:
        raise UsageError("--x takes comma-separated integers") from None


def cmd_rogers(args) -> Table:
    _need(args, "D")
    table = Table(["D", "x", "s1+", "s1-", "s3+", "s3-", "excluded", "quarter_ln_x", "n3-", "partition_residual"])
    for x in _xs(args):
        r = rogers_partition(args.D, x)
        mertens = mertens_sum(x)
        residual = abs(r.total - mertens) / mertens
        if residual > 1e-9:
            raise InvariantViolation("partition identity fails", D=args.D, x=x, residual=residual)
        table.rows.append([args.D, x, r.s1_plus, r.s1_minus, r.s3_plus, r.s3_minus, r.excluded, r.quarter_ln_x, r.counts["3-"], residual])
    return table


def cmd_mertens(args) -> Table:
    table = Table(["x", "sum", "ln_x", "difference"])
    for x in _xs(args):
        m = mertens_sum(x)
        table.rows.append([x, m, math.log(x), m - math.log(x)])
    return table


COMMANDS = {
    "symbol": cmd_symbol,
    "pell": cmd_pell,
    "pell-cases": cmd_pell_cases,
    "classnum": cmd_classnum,
    "represent": cmd_represent,
    "ternary": cmd_ternary,
    "verify-qr": cmd_verify_qr,
    "series": cmd_series,
    "witness": cmd_witness,
    "descent": cmd_descent,
    "rogers": cmd_rogers,
    "mertens": cmd_mertens,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reciprocity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        for flag in ("--d", "--D", "--a", "--b", "--c", "--n", "--beta", "--limit", "--lattice-cutoff", "--prime-cutoff", "--n-cutoff"):
            p.add_argument(flag, type=int)
        p.add_argument("--s", type=float)
        p.add_argument("--x")
        p.add_argument("--eps-schedule")
        p.add_argument("--target", type=float, action="append")
        p.add_argument("--check", choices=("euler", "fundamental", "classnum", "teege", "diverge"))
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out")
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if v is not None and k not in ("out",)}


def _fail(code: int, kind: str, message: str, context: dict | None = None) -> int:
    record = {"schema": SCHEMA, "error": kind, "message": message}
    if context:
        record["context"] = context
    sys.stderr.write(json.dumps(record, default=str, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        table = COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except PreconditionError as exc:
        return _fail(EXIT_PRECONDITION, "precondition", str(exc))
    except InvariantViolation as exc:
        return _fail(EXIT_INVARIANT, "invariant", str(exc), exc.context)
    except SearchExhausted as exc:
        return _fail(EXIT_INVARIANT, "search-exhausted", str(exc), {"ceiling": exc.ceiling})
    text = render(table, args.command, _config(args), args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
