"""Reduced rational functions over integer-coefficient Laurent polynomials.

A :class:`RationalFunction` stores ``num / den`` with both parts in
``Z[x^{+-1}]`` over a shared :class:`~clusterpainleve.laurent.VarTable`.
The canonical form is:

* ``den`` is a polynomial not divisible by any variable, with positive
  lex-leading coefficient (monomials and signs live in ``num``);
* ``num`` and ``den`` have no common non-unit factor, including integer
  content (``den`` may still be a bare integer, e.g. ``y/2``).

Two values are equal iff their canonical parts are equal.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as igcd
from typing import Mapping

from .errors import DivisionByZero, UsageError
from .laurent import LaurentPoly, VarTable, _min_exps, exact_div, gcd, is_coprime

__all__ = [
    "RationalFunction",
    "rf_add",
    "rf_sub",
    "rf_mul",
    "rf_div",
    "rf_inv",
    "coprime_rf",
    "coprime_pairs",
]


def _strip_den(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Move the monomial shift and sign of den into num (no gcd work)."""
    m = _min_exps(den._terms, len(den.table))
    if any(m):
        neg = tuple(-x for x in m)
        den = den.shift(neg)
        num = num.shift(neg)
    if den._terms[max(den._terms)] < 0:
        num, den = -num, -den
    return num, den


class RationalFunction:
    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.one(num.table)
        if num.table != den.table:
            raise UsageError("numerator and denominator use different variable tables")
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        self.num, self.den = self._reduce(num, den)
        self._hash = None

    @classmethod
    def _make(cls, num: LaurentPoly, den: LaurentPoly) -> "RationalFunction":
        r = object.__new__(cls)
        r.num = num
        r.den = den
        r._hash = None
        return r

    @staticmethod
    def _reduce(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        table = num.table
        if num.is_zero():
            return num, LaurentPoly.one(table)
        num, den = _strip_den(num, den)
        if den.is_constant():
            c = den.constant_value()
            g = igcd(num.content(), c)
            if g != 1:
                num = exact_div(num, LaurentPoly.const(table, g))
                den = LaurentPoly.const(table, c // g)
            return num, den
        g = gcd(num, den)
        if not g.is_unit():
            num = exact_div(num, g)
            den = exact_div(den, g)
        return num, den

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, table: VarTable) -> "RationalFunction":
        return cls._make(LaurentPoly.zero(table), LaurentPoly.one(table))

    @classmethod
    def one(cls, table: VarTable) -> "RationalFunction":
        return cls._make(LaurentPoly.one(table), LaurentPoly.one(table))

    @classmethod
    def var(cls, table: VarTable, name: str) -> "RationalFunction":
        return cls._make(LaurentPoly.var(table, name), LaurentPoly.one(table))

    @classmethod
    def gens(cls, table: VarTable) -> list["RationalFunction"]:
        return [cls.var(table, name) for name in table]

    @classmethod
    def coerce(cls, value, table: VarTable) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            if value.table != table:
                raise UsageError(f"variable tables differ: {value.table} vs {table}")
            return value
        if isinstance(value, LaurentPoly):
            if value.table != table:
                raise UsageError(f"variable tables differ: {value.table} vs {table}")
            return cls._make(value, LaurentPoly.one(table))
        if isinstance(value, (int, Fraction)):
            value = Fraction(value)
            num = LaurentPoly.const(table, value.numerator)
            return cls._make(num, LaurentPoly.const(table, value.denominator))
        raise UsageError(f"cannot convert {type(value).__name__} to a rational function")

    # -- inspection -------------------------------------------------------

    @property
    def table(self) -> VarTable:
        return self.num.table

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise UsageError(f"{self} is not constant")
        return Fraction(self.num.constant_value(), self.den.constant_value())

    def is_laurent(self) -> bool:
        """True when the value lies in Z[x^{+-1}] (denominator 1)."""
        return self.den == 1

    def nterms(self) -> int:
        return len(self.num) + len(self.den)

    # -- arithmetic -------------------------------------------------------

    def _other(self, other):
        if isinstance(other, (RationalFunction, LaurentPoly, int, Fraction)):
            return RationalFunction.coerce(other, self.table)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return rf_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return rf_add(self, -other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return rf_add(other, -self)

    def __neg__(self):
        return RationalFunction._make(-self.num, self.den)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return rf_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return rf_div(self, other)

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return NotImplemented
        return rf_div(other, self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inv() ** (-n)
        return RationalFunction._make(self.num ** n, self.den ** n)

    def inv(self) -> "RationalFunction":
        return rf_inv(self)

    def substitute(self, assignment: Mapping[str, object]):
        """Evaluate num and den under the assignment and divide."""
        num = self.num.substitute(assignment)
        den = self.den.substitute(assignment)
        if den == 0:
            raise DivisionByZero("denominator vanishes under the substitution")
        if isinstance(num, LaurentPoly) and isinstance(den, LaurentPoly):
            return RationalFunction(num, den)
        if isinstance(num, LaurentPoly) or isinstance(den, LaurentPoly):
            table = num.table if isinstance(num, LaurentPoly) else den.table
            return RationalFunction.coerce(num, table) / RationalFunction.coerce(den, table)
        result = num / den
        if isinstance(result, Fraction) and result.denominator == 1:
            return result.numerator
        return result

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, LaurentPoly):
            return self.den == 1 and self.num == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: Mapping, table: VarTable | None = None) -> "RationalFunction":
        num = LaurentPoly.from_json(data["num"], table)
        den = LaurentPoly.from_json(data["den"], num.table)
        return cls(num, den)

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        num = str(self.num)
        if len(self.num) > 1:
            num = f"({num})"
        den = str(self.den)
        if len(self.den) > 1 or not self.den.is_constant():
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def _check(f: RationalFunction, g: RationalFunction):
    if f.table != g.table:
        raise UsageError(f"variable tables differ: {f.table} vs {g.table}")


def rf_add(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    _check(f, g)
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    a, b, c, d = f.num, f.den, g.num, g.den
    if b == d:
        if b == 1:
            return RationalFunction._make(a + c, b)
        num = a + c
        if num.is_zero():
            return RationalFunction.zero(f.table)
        h = gcd(num, b)
        if h.is_unit():
            return RationalFunction._make(num, b)
        return RationalFunction._make(*_strip_den(exact_div(num, h), exact_div(b, h)))
    h = gcd(b, d)
    if h.is_unit():
        num = a * d + c * b
        if num.is_zero():
            return RationalFunction.zero(f.table)
        return RationalFunction._make(num, b * d)
    b1 = exact_div(b, h)
    d1 = exact_div(d, h)
    num = a * d1 + c * b1
    if num.is_zero():
        return RationalFunction.zero(f.table)
    den = b1 * d1 * h
    h2 = gcd(num, h)
    if not h2.is_unit():
        num = exact_div(num, h2)
        den = exact_div(den, h2)
    return RationalFunction._make(*_strip_den(num, den))


def rf_sub(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    return rf_add(f, -g)


def rf_mul(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    _check(f, g)
    if f.is_zero() or g.is_zero():
        return RationalFunction.zero(f.table)
    a, b, c, d = f.num, f.den, g.num, g.den
    if b == 1 and d == 1:
        return RationalFunction._make(a * c, b)
    if d != 1:
        h = gcd(a, d)
        if not h.is_unit():
            a, d = exact_div(a, h), exact_div(d, h)
    if b != 1:
        h = gcd(c, b)
        if not h.is_unit():
            c, b = exact_div(c, h), exact_div(b, h)
    return RationalFunction._make(*_strip_den(a * c, b * d))


def rf_inv(f: RationalFunction) -> RationalFunction:
    if f.is_zero():
        raise DivisionByZero("inverse of the zero rational function")
    return RationalFunction._make(*_strip_den(f.den, f.num))


def rf_div(f: RationalFunction, g: RationalFunction) -> RationalFunction:
    _check(f, g)
    return rf_mul(f, rf_inv(g))


def coprime_pairs(f: RationalFunction, g: RationalFunction) -> list[tuple[str, str, LaurentPoly]]:
    """Non-unit gcds among the four cross pairs of num/den parts (over Q)."""
    _check(f, g)
    shared = []
    for fname, fp in (("num", f.num), ("den", f.den)):
        for gname, gp in (("num", g.num), ("den", g.den)):
            if not is_coprime(fp, gp, over="Q"):
                shared.append((fname, gname, gcd(fp, gp)))
    return shared


def coprime_rf(f: RationalFunction, g: RationalFunction) -> bool:
    """Co-primeness of two rational functions: all cross num/den pairs coprime in Q[x^{+-1}]."""
    _check(f, g)
    for fp in (f.num, f.den):
        for gp in (g.num, g.den):
            if not is_coprime(fp, gp, over="Q"):
                return False
    return True
