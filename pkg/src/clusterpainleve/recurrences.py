"""Orbit generators for the bilinear and coefficient recurrences of B_k.

All arithmetic is exact.  Values may be Python ints/Fractions (numeric
orbits), LaurentPolys (bilinear orbits over symbolic initial data) or
RationalFunctions (coefficient orbits).

Indexing: bilinear (x) orbits store x_1..x_k as initial data; coefficient
(y) orbits start at y_0.

Fractional powers of the parameters alpha, beta, gamma are avoided with
root variables::

    even k:          alpha = a^(2k-6),  beta = b^(k-3)
    odd k = 2m+1:    alpha = q^(m-1),   beta = r^(m-1),  gamma = s^(m-1)

so every non-autonomous factor z_n is a Laurent monomial.
"""
from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .cluster import cluster_orbit
from .errors import BudgetExceeded, DivisionByZero, NotDivisible, SingularityEncountered, UsageError
from .laurent import LaurentPoly, VarTable, exact_div
from .rational import RationalFunction

__all__ = [
    "DEFAULT_BUDGET",
    "default_budget",
    "OrbitRecord",
    "BilinearOrbit",
    "YOrbit",
    "NonAutonomyZ",
    "somos_orbit",
    "somos_symbolic",
    "z_value",
    "nonautonomous_orbit",
    "nonautonomous_symbolic",
    "y_from_x",
    "y_full_step",
    "y_full_orbit",
    "y_even_step",
    "y_even_orbit",
    "qp1_step",
    "y_odd_step",
    "y_odd_orbit",
    "fg_step",
    "fg_orbit",
    "qp2_step",
    "alpha_invariant",
    "beta_invariant",
    "y_order",
    "y_symbolic_table",
    "value_to_json",
]

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    """Term budget for symbolic orbits: $CLUSTER_PAINLEVE_BUDGET or 10**6."""
    raw = os.environ.get("CLUSTER_PAINLEVE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"CLUSTER_PAINLEVE_BUDGET must be an integer, got {raw!r}") from None
    if value <= 0:
        raise UsageError("CLUSTER_PAINLEVE_BUDGET must be positive")
    return value


def _size(v) -> int:
    if isinstance(v, LaurentPoly):
        return len(v)
    if isinstance(v, RationalFunction):
        return v.nterms()
    return 1


def _check_budget(values: Sequence, budget: int | None):
    if budget is None:
        return
    total = sum(_size(v) for v in values)
    if total > budget:
        raise BudgetExceeded(f"symbolic orbit holds {total} terms, over the budget of {budget}")


def value_to_json(v):
    if isinstance(v, (LaurentPoly, RationalFunction)):
        return v.to_json()
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _is_zero(v) -> bool:
    if isinstance(v, (LaurentPoly, RationalFunction)):
        return v.is_zero()
    return v == 0


def _div(a, b):
    """a / b in the ring of the operands; exact for LaurentPolys."""
    if _is_zero(b):
        raise SingularityEncountered("division by zero in recurrence")
    if isinstance(a, LaurentPoly) and isinstance(b, LaurentPoly):
        return exact_div(a, b)
    if isinstance(a, LaurentPoly) and isinstance(b, (int, Fraction)):
        b = Fraction(b)
        if b.denominator == 1:
            return exact_div(a, LaurentPoly.const(a.table, b.numerator))
        return RationalFunction.coerce(a, a.table) / b
    if isinstance(a, (RationalFunction, LaurentPoly)) or isinstance(b, (RationalFunction, LaurentPoly)):
        table = a.table if isinstance(a, (RationalFunction, LaurentPoly)) else b.table
        try:
            return RationalFunction.coerce(a, table) / RationalFunction.coerce(b, table)
        except DivisionByZero as exc:
            raise SingularityEncountered(str(exc)) from exc
    return Fraction(a) / Fraction(b)


def _inv(v):
    return _div(1, v)


def _plus_one(v):
    return v + 1


def _prod(values, start=1):
    out = start
    for v in values:
        out = out * v
    return out


# ---------------------------------------------------------------------------
# orbit containers


@dataclass
class OrbitRecord:
    """An indexed run of values: values[i] is the term with index start + i."""

    k: int
    equation: str
    start: int
    values: list
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int):
        i = n - self.start
        if i < 0 or i >= len(self.values):
            raise UsageError(f"index {n} outside the orbit range {self.start}..{self.stop - 1}")
        return self.values[i]

    @property
    def stop(self) -> int:
        return self.start + len(self.values)

    def indices(self) -> range:
        return range(self.start, self.stop)

    def is_numeric(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    def records(self, first: int | None = None):
        first = self.start if first is None else first
        for n in range(first, self.stop):
            yield {"n": n, "value": value_to_json(self[n])}

    def to_jsonl(self, first: int | None = None) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records(first))

    def to_csv(self, first: int | None = None) -> str:
        if not self.is_numeric():
            raise UsageError("CSV export is limited to numeric orbits")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "value"])
        for r in self.records(first):
            writer.writerow([r["n"], r["value"]])
        return buf.getvalue()


@dataclass
class BilinearOrbit(OrbitRecord):
    z: "NonAutonomyZ | None" = None


@dataclass
class YOrbit(OrbitRecord):
    pass


def _emit(v):
    """Collapse integral Fractions to ints."""
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


# ---------------------------------------------------------------------------
# bilinear recurrences


def _bilinear_orbit(k, initial, steps, z, budget, equation):
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    if len(initial) != k:
        raise UsageError(f"need {k} initial values, got {len(initial)}")
    if steps < 0:
        raise UsageError("steps must be nonnegative")
    xs = [None] + [_emit(Fraction(v)) if isinstance(v, (int, Fraction)) else v for v in initial]
    if any(_is_zero(v) for v in xs[1:]):
        raise SingularityEncountered("initial values must be nonzero")
    symbolic = any(isinstance(v, (LaurentPoly, RationalFunction)) for v in xs[1:])
    units = not symbolic and all(abs(v) == 1 for v in xs[1:])
    for n in range(1, steps + 1):
        rhs = xs[n + k - 1] * xs[n + 1] + xs[n + k - 2] * xs[n + 2]
        if z is not None:
            rhs = _z_times(z_value(z, n), rhs)
        try:
            nxt = _div(rhs, xs[n])
        except NotDivisible as exc:
            raise NotDivisible(f"x_{n + k} is not a Laurent polynomial: {exc}") from exc
        nxt = _emit(nxt)
        if _is_zero(nxt):
            raise SingularityEncountered(f"x_{n + k} = 0")
        if units and z is None and not isinstance(nxt, int):
            raise AssertionError(f"x_{n + k} = {nxt} is not an integer for unit initial data")
        xs.append(nxt)
        if symbolic:
            _check_budget(xs[n + 1:], budget)
    return BilinearOrbit(k=k, equation=equation, start=1, values=xs[1:], z=z)


def somos_orbit(k: int, initial: Sequence, steps: int, budget: int | None = None) -> BilinearOrbit:
    """x_{n+k} = (x_{n+k-1} x_{n+1} + x_{n+k-2} x_{n+2}) / x_n, extended by `steps` terms."""
    if budget is None:
        budget = default_budget()
    return _bilinear_orbit(k, list(initial), steps, None, budget, "bilinear")


def somos_symbolic(k: int, steps: int, budget: int | None = None, cross_check: bool = True) -> BilinearOrbit:
    """Somos-k orbit over fresh symbols x1..xk, optionally checked against B_k mutations."""
    table = VarTable([f"x{i}" for i in range(1, k + 1)])
    orbit = somos_orbit(k, LaurentPoly.gens(table), steps, budget)
    if cross_check:
        mutated = cluster_orbit(k, steps, LaurentPoly.gens(table))
        for n, (a, b) in enumerate(zip(orbit.values, mutated), start=1):
            if a != b:
                raise AssertionError(f"x_{n}: recurrence and mutation orbits disagree")
    return orbit


@dataclass(frozen=True)
class NonAutonomyZ:
    """Root parameters of z_n.  Values are LaurentPoly variables or nonzero numbers."""

    k: int
    roots: Mapping[str, object]

    def __post_init__(self):
        k = self.k
        if k < 4:
            raise UsageError(f"k must be >= 4, got {k}")
        need = {"a", "b"} if k % 2 == 0 else {"q", "r", "s"}
        if set(self.roots) != need:
            raise UsageError(f"k={k} needs root parameters {sorted(need)}, got {sorted(self.roots)}")
        for name, v in self.roots.items():
            if not isinstance(v, LaurentPoly) and Fraction(v) == 0:
                raise UsageError(f"root parameter {name} must be nonzero")

    @property
    def kind(self) -> str:
        return "even" if self.k % 2 == 0 else "odd"

    @classmethod
    def symbolic(cls, k: int, table: VarTable) -> "NonAutonomyZ":
        names = ("a", "b") if k % 2 == 0 else ("q", "r", "s")
        return cls(k, {name: LaurentPoly.var(table, name) for name in names})

    @classmethod
    def numeric(cls, k: int, **values) -> "NonAutonomyZ":
        return cls(k, {name: Fraction(v) for name, v in values.items()})

    def params(self) -> dict:
        """alpha, beta (and gamma) expressed through the roots."""
        k = self.k
        R = self.roots
        if k % 2 == 0:
            return {"alpha": R["a"] ** (2 * k - 6), "beta": R["b"] ** (k - 3)}
        m = (k - 1) // 2
        return {"alpha": R["q"] ** (m - 1), "beta": R["r"] ** (m - 1), "gamma": R["s"] ** (m - 1)}


def _rpow(v, e: int):
    if isinstance(v, LaurentPoly):
        return v ** e
    return Fraction(v) ** e


def z_value(z: NonAutonomyZ, n: int):
    """z_n as a Laurent monomial in the root parameters (or a number)."""
    k = z.k
    R = z.roots
    if k % 2 == 0:
        return _emit(R["b"] * _rpow(R["a"], 2 * n - k + 2)) if not isinstance(R["b"], LaurentPoly) \
            else R["b"] * _rpow(R["a"], 2 * n - k + 2)
    m = (k - 1) // 2
    if n % 2 == 0:
        j = n // 2
        val = R["r"] * _rpow(R["s"], -1) * _rpow(R["q"], 2 * j - m + 1)
    else:
        j = (n - 1) // 2
        val = R["r"] * R["s"] * _rpow(R["q"], 2 * j - m + 2)
    return _emit(val)


def _z_times(zn, rhs):
    if isinstance(zn, LaurentPoly) and not isinstance(rhs, (LaurentPoly, RationalFunction)):
        raise UsageError("symbolic root parameters need symbolic initial data")
    if isinstance(rhs, LaurentPoly) and isinstance(zn, Fraction):
        if zn.denominator != 1:
            raise UsageError("numeric root parameters with symbolic initial data must give integral z_n")
        zn = zn.numerator
    return rhs * zn


def nonautonomous_orbit(k: int, initial: Sequence, z: NonAutonomyZ, steps: int,
                        budget: int | None = None) -> BilinearOrbit:
    """x_{n+k} x_n = z_n (x_{n+k-1} x_{n+1} + x_{n+k-2} x_{n+2})."""
    if z.k != k:
        raise UsageError(f"z descriptor built for k={z.k}, orbit has k={k}")
    if budget is None:
        budget = default_budget()
    return _bilinear_orbit(k, list(initial), steps, z, budget, "nonautonomous")


def nonautonomous_symbolic(k: int, steps: int, budget: int | None = None) -> BilinearOrbit:
    """Orbit over x1..xk with symbolic roots (a, b) or (q, r, s) in one table."""
    roots = ("a", "b") if k % 2 == 0 else ("q", "r", "s")
    table = VarTable([f"x{i}" for i in range(1, k + 1)] + list(roots))
    z = NonAutonomyZ.symbolic(k, table)
    initial = [LaurentPoly.var(table, f"x{i}") for i in range(1, k + 1)]
    return nonautonomous_orbit(k, initial, z, steps, budget)


def y_from_x(orbit: BilinearOrbit, n: int):
    """y_n = x_{n+k-1} x_{n+1} / (x_{n+k-2} x_{n+2})."""
    k = orbit.k
    num = orbit[n + k - 1] * orbit[n + 1]
    den = orbit[n + k - 2] * orbit[n + 2]
    if isinstance(num, LaurentPoly):
        return RationalFunction(num, den)
    return _emit(_div(num, den))


# ---------------------------------------------------------------------------
# coefficient recurrences


def y_order(k: int) -> int:
    """Order of the reduced y-equation: k-2 for even k, k-3 for odd k."""
    if k < 4:
        raise UsageError(f"k must be >= 4, got {k}")
    return k - 2 if k % 2 == 0 else k - 3


def y_full_step(window: Sequence):
    """y_{n+k} from y_n..y_{n+k-1} (the order-k coefficient recurrence)."""
    k = len(window)
    if k < 4:
        raise UsageError("window must hold k >= 4 values")
    num = _plus_one(window[k - 1]) * _plus_one(window[1])
    den = window[0] * _plus_one(_inv(window[k - 2])) * _plus_one(_inv(window[2]))
    return _emit(_div(num, den))


def _run(initial, steps, order, step: Callable, budget, symbolic):
    ys = list(initial)
    for n in range(steps):
        ys.append(_emit(step(ys[n:n + order], n)))
        if symbolic:
            _check_budget(ys[n + 1:], budget)
    return ys


def _symbolic(values) -> bool:
    return any(isinstance(v, (LaurentPoly, RationalFunction)) for v in values)


def _prep(initial, order):
    if len(initial) != order:
        raise UsageError(f"need {order} initial values, got {len(initial)}")
    return [Fraction(v) if isinstance(v, int) else v for v in initial]


def y_full_orbit(k: int, initial: Sequence, steps: int, budget: int | None = None) -> YOrbit:
    initial = _prep(list(initial), k)
    budget = default_budget() if budget is None else budget
    ys = _run(initial, steps, k, lambda w, n: y_full_step(w), budget, _symbolic(initial))
    return YOrbit(k=k, equation="y-full", start=0, values=[_emit(v) for v in ys])


def y_even_step(k: int, window: Sequence, n: int, alpha, beta):
    """y_{n+k-2} = beta alpha^n / y_n * prod_{i=1}^{k-3} (y_{n+i}+1) / y_{n+i}^2."""
    if k < 4 or k % 2:
        raise UsageError(f"y_even_step needs even k >= 4, got {k}")
    if len(window) != k - 2:
        raise UsageError(f"window must hold {k - 2} values")
    num = beta * alpha ** n
    num = num * _prod(_plus_one(window[i]) for i in range(1, k - 2))
    den = window[0] * _prod(window[i] ** 2 for i in range(1, k - 2))
    return _emit(_div(num, den))


def qp1_step(y_n, y_n1, n: int, alpha, beta):
    """q-PI: y_{n+2} y_n = beta alpha^n (y_{n+1} + 1) / y_{n+1}^2."""
    return _emit(_div(beta * alpha ** n * (y_n1 + 1), y_n1 ** 2 * y_n))


def y_even_orbit(k: int, initial: Sequence, alpha, beta, steps: int, budget: int | None = None) -> YOrbit:
    initial = _prep(list(initial), k - 2)
    budget = default_budget() if budget is None else budget
    ys = _run(initial, steps, k - 2, lambda w, n: y_even_step(k, w, n, alpha, beta), budget,
              _symbolic(initial + [alpha, beta]))
    return YOrbit(k=k, equation="qp1" if k == 4 else "y-even", start=0,
                  values=[_emit(v) for v in ys], params={"alpha": alpha, "beta": beta})


def y_odd_step(k: int, window: Sequence, n: int, alpha, beta, gamma):
    """y_{n+2m-2} = beta gamma^((-1)^n) alpha^n prod_{i=1}^{m-1}(y_{n+2i-1}+1) / (y_n prod_{i=1}^{2m-3} y_{n+i})."""
    if k < 5 or k % 2 == 0:
        raise UsageError(f"y_odd_step needs odd k >= 5, got {k}")
    m = (k - 1) // 2
    if len(window) != 2 * m - 2:
        raise UsageError(f"window must hold {2 * m - 2} values")
    g = gamma if n % 2 == 0 else _inv(gamma)
    num = beta * g * alpha ** n
    num = num * _prod(_plus_one(window[2 * i - 1]) for i in range(1, m))
    den = window[0] * _prod(window[i] for i in range(1, 2 * m - 2))
    return _emit(_div(num, den))


def y_odd_orbit(k: int, initial: Sequence, alpha, beta, gamma, steps: int,
                budget: int | None = None) -> YOrbit:
    m = (k - 1) // 2
    initial = _prep(list(initial), 2 * m - 2)
    budget = default_budget() if budget is None else budget
    ys = _run(initial, steps, 2 * m - 2, lambda w, n: y_odd_step(k, w, n, alpha, beta, gamma), budget,
              _symbolic(initial + [alpha, beta, gamma]))
    return YOrbit(k=k, equation="qp2" if k == 5 else "y-odd", start=0,
                  values=[_emit(v) for v in ys], params={"alpha": alpha, "beta": beta, "gamma": gamma})


def fg_step(m: int, f: Sequence, g: Sequence, n: int, alpha, beta, gamma):
    """(f_{n+m-1}, g_{n+m-1}) from f_n..f_{n+m-2}, g_n..g_{n+m-2}, where f_n = y_{2n}, g_n = y_{2n+1}."""
    if m < 2 or len(f) != m - 1 or len(g) != m - 1:
        raise UsageError(f"fg_step needs m >= 2 and windows of length m-1")
    # f_{n+m-1} f_n = beta gamma alpha^{2n} prod_{i=0}^{m-2} (g_{n+i}+1)/g_{n+i} prod_{i=1}^{m-2} 1/f_{n+i}
    num = beta * gamma * alpha ** (2 * n) * _prod(_plus_one(g[i]) for i in range(m - 1))
    den = f[0] * _prod(g[i] for i in range(m - 1)) * _prod(f[i] for i in range(1, m - 1))
    f_next = _emit(_div(num, den))
    fs = list(f) + [f_next]
    # g_{n+m-1} g_n = beta gamma^{-1} alpha^{2n+1} prod_{i=1}^{m-1} (f_{n+i}+1)/f_{n+i} prod_{i=1}^{m-2} 1/g_{n+i}
    num = beta * alpha ** (2 * n + 1) * _prod(_plus_one(fs[i]) for i in range(1, m))
    den = gamma * g[0] * _prod(fs[i] for i in range(1, m)) * _prod(g[i] for i in range(1, m - 1))
    g_next = _emit(_div(num, den))
    return f_next, g_next


def qp2_step(f_n, g_n, n: int, alpha, beta, gamma):
    """q-PII: f_{n+1} f_n = beta gamma alpha^{2n} (g_n+1)/g_n, g_{n+1} g_n = beta gamma^{-1} alpha^{2n+1} (f_{n+1}+1)/f_{n+1}."""
    f_next = _emit(_div(beta * gamma * alpha ** (2 * n) * (g_n + 1), g_n * f_n))
    g_next = _emit(_div(beta * alpha ** (2 * n + 1) * (f_next + 1), gamma * f_next * g_n))
    return f_next, g_next


def fg_orbit(m: int, f0: Sequence, g0: Sequence, alpha, beta, gamma, steps: int) -> tuple[list, list]:
    """Iterate fg_step: returns ([f_0, ...], [g_0, ...]) each extended by `steps` terms."""
    fs = list(_prep(list(f0), m - 1))
    gs = list(_prep(list(g0), m - 1))
    for n in range(steps):
        fn, gn = fg_step(m, fs[n:n + m - 1], gs[n:n + m - 1], n, alpha, beta, gamma)
        fs.append(fn)
        gs.append(gn)
    return [_emit(v) for v in fs], [_emit(v) for v in gs]


# ---------------------------------------------------------------------------
# conserved quantities


def alpha_invariant(window: Sequence, k: int):
    """y_{n+k-1} y_{n+k-2} (y_{n+1}+1) / (y_{n+1} y_n (y_{n+k-2}+1)) from y_n..y_{n+k-1}.

    Constant along orbits of the order-k recurrence; equals alpha for the
    even reduced equation and alpha^2 for the odd one.
    """
    if len(window) < k:
        raise UsageError(f"window must hold {k} values")
    num = window[k - 1] * window[k - 2] * _plus_one(window[1])
    den = window[1] * window[0] * _plus_one(window[k - 2])
    return _emit(_div(num, den))


def beta_invariant(window: Sequence, k: int, alpha=None, n: int = 0):
    """The beta-type product, divided by alpha^n when alpha is given.

    even k, window y_n..y_{n+k-2}:
        y_{n+k-2} y_n prod_{i=1}^{k-3} y_{n+i}^2 / (y_{n+i}+1)  (= beta alpha^n)
    odd k = 2m+1, window y_n..y_{n+2m-2}:
        prod_{i=0}^{2m-2} y_{n+i} / prod_{i=1}^{m-1} (y_{n+2i-1}+1)  (= beta gamma^((-1)^n) alpha^n)
    """
    if k % 2 == 0:
        if len(window) < k - 1:
            raise UsageError(f"window must hold {k - 1} values")
        num = window[k - 2] * window[0] * _prod(window[i] ** 2 for i in range(1, k - 2))
        den = _prod(_plus_one(window[i]) for i in range(1, k - 2))
    else:
        m = (k - 1) // 2
        if len(window) < 2 * m - 1:
            raise UsageError(f"window must hold {2 * m - 1} values")
        num = _prod(window[i] for i in range(2 * m - 1))
        den = _prod(_plus_one(window[2 * i - 1]) for i in range(1, m))
    if alpha is not None and n:
        den = den * alpha ** n
    return _emit(_div(num, den))


def y_symbolic_table(k: int) -> VarTable:
    """Variables y0..y_{order-1}, alpha, beta (and gamma for odd k)."""
    names = [f"y{i}" for i in range(y_order(k))] + ["alpha", "beta"]
    if k % 2:
        names.append("gamma")
    return VarTable(names)
