"""Command-line front end.

Exit codes: 0 success (or pass/evidence), 1 failed check or singular orbit,
2 usage error, 3 term budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .cluster import Seed, make_Bk, mutation_sequence, symbolic_seed
from .errors import BudgetExceeded, NotDivisible, SingularityEncountered, UsageError
from .laurent import LaurentPoly, VarTable
from .rational import RationalFunction
from .recurrences import (
    NonAutonomyZ,
    OrbitRecord,
    YOrbit,
    default_budget,
    nonautonomous_orbit,
    qp1_step,
    qp2_step,
    somos_orbit,
    y_even_orbit,
    y_odd_orbit,
    y_order,
)
from .verification import (
    check_coprime_x,
    check_coprime_y,
    check_involution_commutation,
    check_laurent,
    check_mutation_period,
    check_y_equation_consistency,
    irreducibility_probe,
)

CHECK_ORDER = ("periodicity", "involution", "laurent", "coprime-x", "coprime-y", "y-equation", "irreducibility")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exact rational number: {text!r}") from None


def _numbers(text: str) -> list[Fraction]:
    return [_number(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _params(text: str | None) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not of the form name=value")
        name, value = item.split("=", 1)
        name = name.strip()
        if name in out:
            raise UsageError(f"parameter {name} given twice")
        out[name] = _number(value)
        if out[name] == 0:
            raise UsageError(f"parameter {name} must be nonzero")
    return out


def _range(text: str | None) -> tuple[int | None, int | None]:
    if text is None:
        return None, None
    parts = text.split("..")
    if len(parts) != 2:
        raise UsageError(f"range must look like A..B, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"range must look like A..B, got {text!r}") from None


def _emit_int(v):
    return v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v


# ---------------------------------------------------------------------------
# subcommands


def cmd_bk(args) -> tuple[str, int]:
    return _dump({"k": args.k, "matrix": make_Bk(args.k).to_lists()}), 0


def cmd_mutate(args) -> tuple[str, int]:
    if args.seed:
        try:
            with open(args.seed) as fh:
                seed = Seed.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read seed file {args.seed}: {exc}") from None
    elif args.k:
        seed = symbolic_seed(make_Bk(args.k))
    else:
        raise UsageError("mutate needs --seed FILE or --k K")
    seed = mutation_sequence(seed, _int_list(args.directions))
    return _dump(seed.to_json()), 0


def _export(orbit: OrbitRecord, fmt: str, first: int | None) -> str:
    if fmt == "csv":
        return orbit.to_csv(first)
    return orbit.to_jsonl(first)


def cmd_somos(args) -> tuple[str, int]:
    k = args.k
    if args.symbolic and args.initial:
        raise UsageError("--initial and --symbolic are exclusive")
    if args.symbolic:
        initial = LaurentPoly.gens(VarTable([f"x{i}" for i in range(1, k + 1)]))
    else:
        initial = _numbers(args.initial) if args.initial else [Fraction(1)] * k
    orbit = somos_orbit(k, initial, args.steps, budget=args.budget)
    first = 1 if args.include_initial else k + 1
    return _export(orbit, args.format, first), 0


def _root_names(k: int) -> tuple[str, ...]:
    return ("a", "b") if k % 2 == 0 else ("q", "r", "s")


def _y_params(k: int, given: dict, table: VarTable | None):
    """alpha, beta[, gamma] from either direct values or root parameters."""
    names = ["alpha", "beta"] + (["gamma"] if k % 2 else [])
    roots = _root_names(k)
    if any(n in given for n in roots):
        if set(given) != set(roots):
            raise UsageError(f"root parameters for k={k} are {','.join(roots)}")
        p = NonAutonomyZ.numeric(k, **given).params()
        return [p[n] for n in names]
    unknown = set(given) - set(names)
    if unknown:
        raise UsageError(f"unknown parameters {sorted(unknown)}; expected {names} or {list(roots)}")
    out = []
    for n in names:
        if n in given:
            out.append(given[n])
        elif table is not None:
            out.append(RationalFunction.var(table, n))
        else:
            raise UsageError(f"missing parameter {n} (or pass --symbolic)")
    return out


def cmd_orbit(args) -> tuple[str, int]:
    eq = args.eq
    k = args.k
    if eq == "qp1":
        k = 4 if k is None else k
        if k != 4:
            raise UsageError("qp1 is the k=4 equation")
    if eq == "qp2":
        k = 5 if k is None else k
        if k != 5:
            raise UsageError("qp2 is the k=5 equation")
    if k is None:
        raise UsageError("--k is required")
    if eq == "y-even" and k % 2:
        raise UsageError("y-even needs even k")
    if eq == "y-odd" and k % 2 == 0:
        raise UsageError("y-odd needs odd k")
    given = _params(args.params)
    if eq == "bilinear":
        return _bilinear(args, k, given)

    order = y_order(k)
    if args.symbolic:
        names = [f"y{i}" for i in range(order)] + ["alpha", "beta"] + (["gamma"] if k % 2 else [])
        table = VarTable(names)
        initial = [RationalFunction.var(table, f"y{i}") for i in range(order)]
        if args.initial:
            raise UsageError("--initial and --symbolic are exclusive")
    else:
        table = None
        if not args.initial:
            raise UsageError("numeric orbits need --initial")
        initial = _numbers(args.initial)
        if len(initial) != order:
            raise UsageError(f"k={k} needs {order} initial values")
    par = _y_params(k, given, table)
    if eq == "qp1":
        ys = list(initial)
        for n in range(args.steps):
            ys.append(qp1_step(ys[n], ys[n + 1], n, *par))
        orbit = YOrbit(k=4, equation="qp1", start=0, values=[_emit_int(v) for v in ys])
    elif eq == "qp2":
        f, g = [initial[0]], [initial[1]]
        ys = list(initial)
        n = 0
        while len(ys) < order + args.steps:
            fn, gn = qp2_step(f[n], g[n], n, *par)
            f.append(fn)
            g.append(gn)
            ys.extend([fn, gn])
            n += 1
        orbit = YOrbit(k=5, equation="qp2", start=0, values=[_emit_int(v) for v in ys[: order + args.steps]])
    elif k % 2 == 0:
        orbit = y_even_orbit(k, initial, *par, args.steps, budget=args.budget)
    else:
        orbit = y_odd_orbit(k, initial, *par, args.steps, budget=args.budget)
    first = 0 if args.include_initial else order
    return _export(orbit, args.format, first), 0


def _bilinear(args, k: int, given: dict) -> tuple[str, int]:
    roots = _root_names(k)
    names = [f"x{i}" for i in range(1, k + 1)]
    if args.symbolic:
        if args.initial:
            raise UsageError("--initial and --symbolic are exclusive")
        missing = [r for r in roots if r not in given]
        table = VarTable(names + missing)
        initial = [LaurentPoly.var(table, n) for n in names]
    else:
        table = None
        initial = _numbers(args.initial) if args.initial else [Fraction(1)] * k
    extra = set(given) - set(roots)
    if extra:
        raise UsageError(f"bilinear orbits take root parameters {','.join(roots)}, got {sorted(extra)}")
    if not given and not args.symbolic:
        orbit = somos_orbit(k, initial, args.steps, budget=args.budget)
    else:
        values = {}
        for r in roots:
            if r in given:
                values[r] = given[r]
            elif table is not None:
                values[r] = LaurentPoly.var(table, r)
            else:
                raise UsageError(f"missing root parameter {r}")
        orbit = nonautonomous_orbit(k, initial, NonAutonomyZ(k, values), args.steps, budget=args.budget)
    first = 1 if args.include_initial else k + 1
    return _export(orbit, args.format, first), 0


def _run_check(name: str, args):
    k = args.k
    budget = args.budget
    if name == "periodicity":
        return check_mutation_period(k)
    if name == "involution":
        return check_involution_commutation(k, args.trials, args.random_seed)
    if name == "laurent":
        return check_laurent(k, args.steps or 10, budget=budget)
    if name == "coprime-x":
        first, last = _range(args.range)
        if first is None:
            first, last = k + 1, 12 if k <= 5 else k + 6
        return check_coprime_x(k, first, last, budget=budget)
    if name == "coprime-y":
        return check_coprime_y(k, args.max_n, budget=budget)
    if name == "y-equation":
        steps = args.steps or k + 4
        return check_y_equation_consistency(k, steps, y_order(k) + 3, budget=budget)
    if name == "irreducibility":
        return irreducibility_probe(k)
    raise UsageError(f"unknown check {name!r}")


def cmd_verify(args) -> tuple[str, int]:
    if args.k is None or args.k < 4:
        raise UsageError("verify needs --k K with K >= 4")
    names = CHECK_ORDER if args.check == "ALL" else (args.check,)
    lines, code = [], 0
    for name in names:
        report = _run_check(name, args)
        lines.append(report.dumps() + "\n")
        if not report.ok:
            code = 1
    return "".join(lines), code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write output to FILE instead of stdout")
    common.add_argument("--budget", type=int, help="term budget for symbolic orbits "
                        "(overrides CLUSTER_PAINLEVE_BUDGET, default 10^6)")

    p = _Parser(prog="cluster-painleve", description="Cluster mutations, Somos-type recurrences "
                "and q-Painleve orbits in exact arithmetic.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("bk", parents=[common], help="print the exchange matrix B_k")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_bk)

    s = sub.add_parser("mutate", parents=[common], help="mutate a seed along directions")
    s.add_argument("--seed", help="seed JSON file (default: symbolic seed on B_k, needs --k)")
    s.add_argument("--k", type=int)
    s.add_argument("--directions", required=True, help="comma-separated, 1-based")
    s.set_defaults(func=cmd_mutate)

    s = sub.add_parser("somos", parents=[common], help="bilinear Somos-k orbit")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--initial", help="comma-separated initial values (default all ones)")
    s.add_argument("--symbolic", action="store_true", help="initial values x1..xk as symbols")
    s.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    s.add_argument("--include-initial", action="store_true")
    s.set_defaults(func=cmd_somos)

    s = sub.add_parser("orbit", parents=[common], help="q-Painleve, reduced y or bilinear orbit")
    s.add_argument("--eq", required=True, choices=("qp1", "qp2", "y-even", "y-odd", "bilinear"))
    s.add_argument("--k", type=int)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--params", help="alpha=,beta=[,gamma=] or roots a=,b= / q=,r=,s=")
    s.add_argument("--initial")
    s.add_argument("--symbolic", action="store_true")
    s.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    s.add_argument("--include-initial", action="store_true")
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("verify", parents=[common], help="run verification checks")
    s.add_argument("check", choices=("ALL",) + CHECK_ORDER)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--range", help="index range A..B for coprime-x")
    s.add_argument("--max-n", type=int, dest="max_n")
    s.add_argument("--steps", type=int, help="steps for laurent / y-equation")
    s.add_argument("--trials", type=int, default=25)
    s.add_argument("--random-seed", type=int, default=0, dest="random_seed")
    s.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        if args.budget is None:
            args.budget = default_budget()
        elif args.budget <= 0:
            raise UsageError("--budget must be positive")
        if getattr(args, "steps", None) is not None and args.steps < 0:
            raise UsageError("--steps must be nonnegative")
        text, code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=stderr)
        return 3
    except (SingularityEncountered, NotDivisible) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=stderr)
            return 2
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
