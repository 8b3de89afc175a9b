"""Mechanized checks: Laurent phenomenon, co-primeness, irreducibility probes.

Every check returns a :class:`CheckReport` and is deterministic given its
arguments (random trials take an explicit seed value).
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd as igcd

from .cluster import (
    ExchangeMatrix,
    Seed,
    check_mutation_period as _period_holds,
    coefficient_orbit,
    make_Bk,
    mutate_seed,
    symbolic_seed,
)
from .errors import NotDivisible, UsageError
from .laurent import LaurentPoly, VarTable, exact_div, gcd
from .rational import RationalFunction, coprime_pairs
from .recurrences import (
    nonautonomous_symbolic,
    somos_orbit,
    somos_symbolic,
    y_even_orbit,
    y_even_step,
    y_from_x,
    y_full_step,
    y_odd_orbit,
    y_odd_step,
    y_order,
    y_symbolic_table,
)

__all__ = [
    "CheckReport",
    "FibonacciTable",
    "check_mutation_period",
    "check_laurent",
    "check_coprime_x",
    "check_coprime_y",
    "coprime_threshold",
    "irreducibility_probe",
    "check_y_equation_consistency",
    "check_involution_commutation",
    "default_max_n",
]

PASS, FAIL, EVIDENCE = "pass", "fail", "evidence"


@dataclass
class CheckReport:
    check: str
    params: dict
    verdict: str
    cases: int = 0
    witnesses: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, EVIDENCE):
            raise UsageError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.witnesses:
            raise UsageError("a failing report needs at least one witness")

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "verdict": self.verdict,
            "cases": self.cases,
            "witnesses": self.witnesses,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


class FibonacciTable:
    """v_0 = 0, v_1 = v_2 = 1, v_n = v_{n-1} + v_{n-2}; grows on demand."""

    def __init__(self, upto: int = 2):
        self.v = [0, 1, 1]
        self.extend(upto)

    def extend(self, upto: int) -> None:
        while len(self.v) <= upto:
            self.v.append(self.v[-1] + self.v[-2])

    def __getitem__(self, n: int) -> int:
        if n < 0:
            raise UsageError("Fibonacci index must be nonnegative")
        self.extend(n)
        return self.v[n]


def _poly_str(p) -> str:
    return str(p)


# ---------------------------------------------------------------------------


def check_mutation_period(k: int) -> CheckReport:
    """Cyclic mutation of B_k reproduces B_k up to the index shift."""
    ok = _period_holds(k)
    witnesses = [] if ok else [{"k": k, "matrix": make_Bk(k).to_lists()}]
    return CheckReport("periodicity", {"k": k}, PASS if ok else FAIL, k, witnesses)


def _corrupted_orbit(k: int, steps: int):
    """Drop the x_{n+k-1} factor: x_{n+k} x_n = x_{n+1} + x_{n+k-2} x_{n+2}.

    (Dropping x_{n+2} instead happens to stay Laurent at k=4.)
    """
    table = VarTable([f"x{i}" for i in range(1, k + 1)])
    xs = [None] + LaurentPoly.gens(table)
    for n in range(1, steps + 1):
        xs.append(exact_div(xs[n + 1] + xs[n + k - 2] * xs[n + 2], xs[n]))
    return xs[1:]


def check_laurent(k: int, steps: int = 10, corrupt: bool = False, budget: int | None = None) -> CheckReport:
    """x_{k+1}..x_{k+steps} over symbols x1..xk; every division must be exact."""
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    params = {"k": k, "steps": steps, "corrupt": corrupt}
    try:
        if corrupt:
            values = _corrupted_orbit(k, steps)
        else:
            values = somos_symbolic(k, steps, budget=budget).values
    except NotDivisible as exc:
        return CheckReport("laurent", params, FAIL, 0, [{"error": "NotDivisible", "detail": str(exc)}])
    witnesses = [{"n": n, "terms": len(v)} for n, v in enumerate(values, start=1) if n > k]
    return CheckReport("laurent", params, PASS, steps, witnesses)


def _symbolic_x(k: int, stop: int, budget=None) -> list:
    return somos_symbolic(k, max(0, stop - k), budget=budget, cross_check=False).values


def check_coprime_x(k: int, first: int | None = None, last: int | None = None, budget=None) -> CheckReport:
    """Every pair x_n, x_{n'} (first <= n < n' <= last) has a unit gcd and a non-monomial ratio."""
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    first = k + 1 if first is None else first
    last = k + 8 if last is None else last
    if first < 1 or last < first:
        raise UsageError(f"bad index range {first}..{last}")
    xs = _symbolic_x(k, last, budget)
    pairs = list(combinations(range(first, last + 1), 2))
    witnesses, bad = [], []
    for n, m in pairs:
        g = gcd(xs[n - 1], xs[m - 1])
        ratio = RationalFunction(xs[n - 1], xs[m - 1])
        monomial_ratio = ratio.num.is_monomial() and ratio.den.is_monomial()
        ok = g.is_unit() and not monomial_ratio
        witnesses.append({"pair": [n, m], "coprime": ok, "gcd": _poly_str(g)})
        if not ok:
            bad.append((n, m))
    assert len(witnesses) == len(pairs)
    params = {"k": k, "range": [first, last], "pairs": len(pairs)}
    return CheckReport("coprime-x", params, FAIL if bad else PASS, len(pairs), witnesses)


def coprime_threshold(k: int) -> int:
    """Pairs with |n - n'| above this are claimed coprime (proved for k=4,5; conjectured beyond)."""
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    return {4: 2, 5: 3}.get(k, k - 2)


def default_max_n(k: int) -> int:
    if k <= 5:
        return 8
    return 6 if k <= 7 else k + 1


def _symbolic_y(k: int, max_n: int, budget=None) -> list:
    table = y_symbolic_table(k)
    gens = RationalFunction.gens(table)
    order = y_order(k)
    init, alpha, beta = gens[:order], gens[order], gens[order + 1]
    steps = max(0, max_n - order + 1)
    if k % 2 == 0:
        return y_even_orbit(k, init, alpha, beta, steps, budget).values[: max_n + 1]
    return y_odd_orbit(k, init, alpha, beta, gens[order + 2], steps, budget).values[: max_n + 1]


def check_coprime_y(k: int, max_n: int | None = None, budget=None) -> CheckReport:
    """Pairwise co-primeness of y_0..y_{max_n} beyond the distance threshold.

    The values are rational functions in y_0..y_{order-1}, alpha, beta (and
    gamma).  Shared factors of nearby pairs are recorded but never fail.
    """
    max_n = default_max_n(k) if max_n is None else max_n
    thr = coprime_threshold(k)
    ys = _symbolic_y(k, max_n, budget)
    witnesses, bad, checked = [], 0, 0
    for n, m in combinations(range(max_n + 1), 2):
        shared = coprime_pairs(ys[n], ys[m])
        if m - n > thr:
            checked += 1
            witnesses.append({"kind": "pair", "pair": [n, m], "coprime": not shared})
            if shared:
                bad += 1
                witnesses[-1]["shared"] = [[a, b, _poly_str(g)] for a, b, g in shared]
        elif shared:
            witnesses.append({"kind": "within-threshold", "pair": [n, m],
                              "shared": [[a, b, _poly_str(g)] for a, b, g in shared]})
    expected = sum(1 for n, m in combinations(range(max_n + 1), 2) if m - n > thr)
    assert checked == expected
    if bad:
        verdict = FAIL
    else:
        verdict = PASS if k in (4, 5) else EVIDENCE
    params = {"k": k, "max_n": max_n, "threshold": thr, "pairs": checked}
    return CheckReport("coprime-y", params, verdict, checked, witnesses)


def irreducibility_probe(k: int, growth_terms: int = 20) -> CheckReport:
    """Specialization probes: u-sequence shape, quadratic exclusion, Fibonacci gcds, growth.

    (a) x_1 = ... = x_{k-1} = 1, x_k = t gives u_{k+1} = t+1 and
        u_j = v_{j-k+1} t + v_{j-k} for j = k+2 .. 2k-3;
    (b) u_{2k-2} = v_{k-3} t^2 + (v_{k-2}+v_{k-4}) t + v_{k-3}, not divisible by t+1;
    (c) gcd(v_i, v_{i+1}) = 1 for i <= 2k;
    (d) the all-ones orbit has x_{k+2} = 3, x_{k+3} = 7 and x_n > 2 x_{n-1}
        for k+3 <= n <= k+growth_terms.
    """
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    table = VarTable(["t"])
    t = LaurentPoly.var(table, "t")
    one = LaurentPoly.one(table)
    v = FibonacciTable(2 * k + 1)
    u = somos_orbit(k, [one] * (k - 1) + [t], k - 2, budget=None)
    witnesses = []

    # (a)
    got = {k + 1: u[k + 1]}
    want = {k + 1: t + 1}
    for j in range(k + 2, 2 * k - 2):
        got[j] = u[j]
        want[j] = t * v[j - k + 1] + v[j - k]
    mism = [j for j in got if got[j] != want[j]]
    ok_a = not mism
    witnesses.append({"sub": "a", "ok": ok_a,
                      "u": {str(j): _poly_str(got[j]) for j in sorted(got)},
                      "mismatch": mism})

    # (b)
    uq = u[2 * k - 2]
    quad = t * t * v[k - 3] + t * (v[k - 2] + v[k - 4]) + v[k - 3]
    shape = uq == quad
    try:
        exact_div(uq, t + 1)
        divisible = True
    except NotDivisible:
        divisible = False
    g = gcd(uq, t + 1)
    agree = divisible == (not g.is_unit())
    ok_b = shape and not divisible and agree
    witnesses.append({"sub": "b", "ok": ok_b, "j": 2 * k - 2, "u": _poly_str(uq),
                      "expected": _poly_str(quad), "divisible_by_t_plus_1": divisible,
                      "gcd_with_t_plus_1": _poly_str(g)})

    # (c)
    bad_c = [i for i in range(0, 2 * k + 1) if igcd(v[i], v[i + 1]) != 1]
    ok_c = not bad_c
    witnesses.append({"sub": "c", "ok": ok_c, "upto": 2 * k, "bad": bad_c})

    # (d)
    xt = somos_orbit(k, [1] * k, growth_terms, budget=None)
    first = {"x_k+2": xt[k + 2], "x_k+3": xt[k + 3]}
    viol = [n for n in range(k + 3, k + growth_terms + 1) if not xt[n] > 2 * xt[n - 1]]
    ok_d = xt[k + 2] == 3 and xt[k + 3] == 7 and not viol
    witnesses.append({"sub": "d", "ok": ok_d, "values": first, "growth_violations": viol})

    verdict = PASS if (ok_a and ok_b and ok_c and ok_d) else FAIL
    return CheckReport("irreducibility", {"k": k, "growth_terms": growth_terms}, verdict, 4, witnesses)


def check_y_equation_consistency(k: int, steps: int = 6, bilinear_steps: int | None = None,
                                 budget=None) -> CheckReport:
    """(i) mutation coefficients obey the order-k y-recurrence;
    (ii) y_from_x on the symbolic non-autonomous orbit obeys the reduced equation.

    `steps` counts mutations for (i) and bilinear steps for (ii) unless
    `bilinear_steps` is given.
    """
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    bilinear_steps = steps if bilinear_steps is None else bilinear_steps
    witnesses = []
    fails = 0

    ys = coefficient_orbit(k, steps)
    checked_i = []
    for n in range(0, len(ys) - k):
        ok = y_full_step(ys[n:n + k]) == ys[n + k]
        checked_i.append(n)
        if not ok:
            fails += 1
            witnesses.append({"part": "mutation", "n": n, "ok": False})
    witnesses.append({"part": "mutation", "checked": checked_i})

    orbit = nonautonomous_symbolic(k, bilinear_steps, budget)
    p = orbit.z.params()
    order = y_order(k)
    count = orbit.stop - k + 1  # y_n needs x_{n+k-1}
    yx = [y_from_x(orbit, n) for n in range(0, count)]
    checked_ii = []
    for n in range(0, len(yx) - order):
        w = yx[n:n + order]
        if k % 2 == 0:
            nxt = y_even_step(k, w, n, p["alpha"], p["beta"])
        else:
            nxt = y_odd_step(k, w, n, p["alpha"], p["beta"], p["gamma"])
        checked_ii.append(n)
        if nxt != yx[n + order]:
            fails += 1
            witnesses.append({"part": "bilinear", "n": n, "ok": False})
    witnesses.append({"part": "bilinear", "checked": checked_ii})

    params = {"k": k, "steps": steps, "bilinear_steps": bilinear_steps}
    cases = len(checked_i) + len(checked_ii)
    return CheckReport("y-equation", params, FAIL if fails else PASS, cases, witnesses)


def _random_skew(k: int, rng: random.Random, bound: int = 2) -> ExchangeMatrix:
    rows = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            b = rng.randint(-bound, bound)
            rows[i][j] = b
            rows[j][i] = -b
    return ExchangeMatrix(tuple(tuple(r) for r in rows))


def check_involution_commutation(k: int, trials: int = 25, seed: int = 0) -> CheckReport:
    """mu_d^2 = id for every direction; mu_i mu_j = mu_j mu_i whenever b_ij = 0.

    Trial 0 uses B_k, later trials random skew-symmetric matrices with entries
    in [-2, 2].  A non-commuting pair of B_k is reported as an informational
    control.
    """
    if k < 2:
        raise UsageError(f"k must be >= 2, got {k}")
    rng = random.Random(seed)
    witnesses, cases, fails = [], 0, 0
    for trial in range(trials):
        B = make_Bk(k) if trial == 0 and k >= 4 else _random_skew(k, rng)
        s = symbolic_seed(B)
        for d in range(1, k + 1):
            cases += 1
            if mutate_seed(mutate_seed(s, d), d) != s:
                fails += 1
                witnesses.append({"trial": trial, "involution": d, "matrix": B.to_lists()})
        for i, j in combinations(range(1, k + 1), 2):
            if B[i, j] != 0:
                continue
            cases += 1
            if mutate_seed(mutate_seed(s, i), j) != mutate_seed(mutate_seed(s, j), i):
                fails += 1
                witnesses.append({"trial": trial, "commute": [i, j], "matrix": B.to_lists()})
    if k >= 4:
        B = make_Bk(k)
        pair = next((i, j) for i, j in combinations(range(1, k + 1), 2) if B[i, j] != 0)
        s = symbolic_seed(B)
        commutes = _commutes(s, *pair)
        witnesses.append({"control": list(pair), "b": B[pair], "commutes": commutes, "informational": True})
    params = {"k": k, "trials": trials, "seed": seed}
    return CheckReport("involution", params, FAIL if fails else PASS, cases, witnesses)


def _commutes(s: Seed, i: int, j: int) -> bool:
    return mutate_seed(mutate_seed(s, i), j) == mutate_seed(mutate_seed(s, j), i)
