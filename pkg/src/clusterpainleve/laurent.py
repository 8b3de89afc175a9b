"""Sparse multivariate Laurent polynomials over the integers.

A :class:`LaurentPoly` is a finite map from exponent vectors (tuples of
ints, negative entries allowed) to nonzero Python ints, indexed by a shared
:class:`VarTable`.  Values are immutable; every operation returns a new
polynomial in canonical form (no stored zero coefficients).

The module also provides exact division, substitution, content/monomial
extraction and a multivariate GCD (heuristic GCD with a primitive
pseudo-remainder sequence fallback).
"""
from __future__ import annotations

import heapq
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as igcd
from math import isqrt
from operator import add, sub
from typing import Iterable, Mapping

from .errors import DivisionByZero, NotDivisible, SingularSubstitution, UsageError

try:
    import flint
    from flint.utils.flint_exceptions import DomainError as _FlintDomainError
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None
    _FlintDomainError = ArithmeticError

__all__ = [
    "VarTable",
    "Monomial",
    "LaurentPoly",
    "add_poly",
    "mul_poly",
    "neg_poly",
    "exact_div",
    "substitute",
    "is_unit",
    "monomial_part",
    "gcd",
    "is_coprime",
    "get_backend",
    "set_backend",
    "use_backend",
]

# Products with more term pairs than this go through FLINT when it is active.
_FLINT_MUL_CUTOFF = 64
_backend = "flint" if flint is not None else "python"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Select "flint" (python-flint fmpz_mpoly) or "python" (pure-Python kernel)."""
    global _backend
    if name not in ("flint", "python"):
        raise UsageError(f"unknown backend {name!r}")
    if name == "flint" and flint is None:
        raise UsageError("python-flint is not installed")
    _backend = name


@contextmanager
def use_backend(name: str):
    old = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def _use_flint(table) -> bool:
    return _backend == "flint" and len(table) > 0


def _flint_ctx(table):
    return flint.fmpz_mpoly_ctx.get(table.names, "lex")


class VarTable:
    """Ordered, immutable list of distinct variable names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for name in names:
            if not isinstance(name, str) or not name:
                raise UsageError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate variable names in {names}")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarTable({list(self.names)!r})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r} (table has {list(self.names)})") from None

    def extend(self, *names: str) -> "VarTable":
        return VarTable(self.names + tuple(names))

    def zero_exps(self) -> tuple:
        return (0,) * len(self.names)


@dataclass(frozen=True)
class Monomial:
    """coeff * x^exps; coeff is a nonzero int."""

    coeff: int
    exps: tuple

    def __post_init__(self):
        if self.coeff == 0:
            raise UsageError("monomial coefficient must be nonzero")

    def to_poly(self, table: VarTable) -> "LaurentPoly":
        return LaurentPoly._make(table, {tuple(self.exps): self.coeff})


class LaurentPoly:
    """Immutable sparse Laurent polynomial with integer coefficients.

    Storage is a term map ``{exponent tuple: int}``; when the FLINT backend
    is active, large products, quotients and gcds also keep a cached
    ``(lowest exponents, fmpz_mpoly)`` pair and the term map is built lazily.
    """

    __slots__ = ("table", "_d", "_fp", "_hash")

    def __init__(self, table: VarTable, terms: Mapping[tuple, int] | None = None):
        n = len(table)
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise UsageError(f"exponent vector {exps} does not match {n} variables")
            if not isinstance(coeff, int):
                if isinstance(coeff, Fraction) and coeff.denominator == 1:
                    coeff = coeff.numerator
                else:
                    raise UsageError(f"coefficient {coeff!r} is not an integer")
            coeff = int(coeff)
            if coeff:
                clean[exps] = clean.get(exps, 0) + coeff
                if not clean[exps]:
                    del clean[exps]
        self.table = table
        self._d = clean
        self._fp = None
        self._hash = None

    @classmethod
    def _make(cls, table: VarTable, terms: dict) -> "LaurentPoly":
        # trusted constructor: terms already canonical and owned by the result
        p = object.__new__(cls)
        p.table = table
        p._d = terms
        p._fp = None
        p._hash = None
        return p

    @classmethod
    def _from_fp(cls, table: VarTable, shift: tuple, fp) -> "LaurentPoly":
        # fp must not be divisible by any variable (shift = lowest exponents)
        p = object.__new__(cls)
        p.table = table
        p._d = None
        p._fp = (shift if not fp.is_zero() else table.zero_exps(), fp)
        p._hash = None
        return p

    @property
    def _terms(self) -> dict:
        d = self._d
        if d is None:
            shift, fp = self._fp
            # FLINT hands back fmpz exponents; keep plain ints in the dict
            if any(shift):
                d = {tuple(int(a) + b for a, b in zip(e, shift)): int(c) for e, c in fp.to_dict().items()}
            else:
                d = {tuple(map(int, e)): int(c) for e, c in fp.to_dict().items()}
            self._d = d
        return d

    def _flint(self):
        """(lowest exponents, fmpz_mpoly of the shifted polynomial)."""
        if self._fp is None:
            ctx = _flint_ctx(self.table)
            m, P = _shifted(self._d, len(self.table))
            self._fp = (m, ctx.from_dict(P))
        return self._fp

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, table: VarTable) -> "LaurentPoly":
        return cls._make(table, {})

    @classmethod
    def const(cls, table: VarTable, c: int) -> "LaurentPoly":
        c = int(c)
        return cls._make(table, {table.zero_exps(): c} if c else {})

    @classmethod
    def one(cls, table: VarTable) -> "LaurentPoly":
        return cls.const(table, 1)

    @classmethod
    def var(cls, table: VarTable, name: str, power: int = 1) -> "LaurentPoly":
        exps = [0] * len(table)
        exps[table.index(name)] = power
        return cls._make(table, {tuple(exps): 1})

    @classmethod
    def monomial(cls, table: VarTable, coeff: int, exps: Mapping[str, int] | tuple) -> "LaurentPoly":
        if isinstance(exps, Mapping):
            vec = [0] * len(table)
            for name, e in exps.items():
                vec[table.index(name)] += e
            exps = tuple(vec)
        return cls(table, {tuple(exps): coeff})

    @classmethod
    def gens(cls, table: VarTable) -> list["LaurentPoly"]:
        return [cls.var(table, name) for name in table]

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> list[tuple[tuple, int]]:
        """Terms sorted lexicographically by exponent vector."""
        return sorted(self._terms.items())

    def __len__(self) -> int:
        if self._d is None:
            return len(self._fp[1])
        return len(self._d)

    def __bool__(self) -> bool:
        return len(self) > 0

    def is_zero(self) -> bool:
        return len(self) == 0

    def is_monomial(self) -> bool:
        return len(self) == 1

    def is_constant(self) -> bool:
        if self._d is None:
            shift, fp = self._fp
            return fp.is_constant() and not any(shift)
        d = self._d
        return not d or (len(d) == 1 and not any(next(iter(d))))

    def constant_value(self) -> int:
        if not self.is_constant():
            raise UsageError(f"{self} is not constant")
        return self._terms.get(self.table.zero_exps(), 0)

    def is_unit(self) -> bool:
        if len(self) != 1:
            return False
        return abs(next(iter(self._terms.values()))) == 1

    def leading_term(self) -> tuple[tuple, int]:
        if self.is_zero():
            raise UsageError("zero polynomial has no leading term")
        e = max(self._terms)
        return e, self._terms[e]

    def leading_coefficient(self) -> int:
        if self._d is None:
            return int(self._fp[1].leading_coefficient())
        return self.leading_term()[1]

    def min_exponents(self) -> tuple:
        if self._fp is not None:
            return self._fp[0]
        return _min_exps(self._d, len(self.table))

    def max_exponents(self) -> tuple:
        if self.is_zero():
            return self.table.zero_exps()
        return tuple(max(col) for col in zip(*self._terms))

    def total_degree(self) -> int:
        if self.is_zero():
            return 0
        return max(sum(e) for e in self._terms)

    def variables(self) -> list[str]:
        """Names of the variables that occur with a nonzero exponent."""
        used = _used_vars(self._terms, len(self.table))
        return [self.table.names[i] for i in sorted(used)]

    def content(self) -> int:
        if self._d is None:
            return int(self._fp[1].content())
        return _content(self._d)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.table != self.table:
                raise UsageError(f"variable tables differ: {self.table} vs {other.table}")
            return other
        if isinstance(other, int):
            return LaurentPoly.const(self.table, other)
        if isinstance(other, Fraction) and other.denominator == 1:
            return LaurentPoly.const(self.table, other.numerator)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return LaurentPoly._make(self.table, _add_terms(self._terms, other._terms))

    __radd__ = __add__

    def __neg__(self):
        if self._d is None:
            shift, fp = self._fp
            return LaurentPoly._from_fp(self.table, shift, -fp)
        return LaurentPoly._make(self.table, {e: -c for e, c in self._d.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return LaurentPoly._make(self.table, _sub_terms(self._terms, other._terms))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return LaurentPoly.zero(self.table)
            if self._d is None:
                shift, fp = self._fp
                return LaurentPoly._from_fp(self.table, shift, fp * other)
            return LaurentPoly._make(self.table, {e: c * other for e, c in self._d.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if _use_flint(self.table) and (
            self._d is None or other._d is None or len(self) * len(other) > _FLINT_MUL_CUTOFF
        ):
            ma, fa = self._flint()
            mb, fb = other._flint()
            return LaurentPoly._from_fp(self.table, tuple(map(add, ma, mb)), fa * fb)
        return LaurentPoly._make(self.table, _mul_terms(self._terms, other._terms))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if not self.is_unit():
                raise NotDivisible(f"{self} is not a unit; cannot raise to power {n}")
            (e, c), = self._terms.items()
            return LaurentPoly._make(self.table, {tuple(x * n for x in e): 1 if n % 2 == 0 else c})
        if len(self) == 1:
            (e, c), = self._terms.items()
            return LaurentPoly._make(self.table, {tuple(x * n for x in e): c ** n})
        if n == 0:
            return LaurentPoly.one(self.table)
        if _use_flint(self.table):
            m, fp = self._flint()
            return LaurentPoly._from_fp(self.table, tuple(x * n for x in m), fp ** n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, exps: tuple) -> "LaurentPoly":
        """Multiply by the monomial x^exps."""
        if not any(exps):
            return self
        if self._d is None:
            shift, fp = self._fp
            return LaurentPoly._from_fp(self.table, tuple(map(add, shift, exps)), fp)
        return LaurentPoly._make(
            self.table, {tuple(map(add, e, exps)): c for e, c in self._d.items()}
        )

    def exact_div(self, other) -> "LaurentPoly":
        return exact_div(self, other)

    def substitute(self, assignment):
        return substitute(self, assignment)

    def monomial_part(self):
        return monomial_part(self)

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            if self.table != other.table:
                return False
            if self._d is None and other._d is None:
                return self._fp[0] == other._fp[0] and self._fp[1] == other._fp[1]
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self._terms.items())))
        return self._hash

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": list(self.table.names),
            "terms": [{"coeff": str(c), "exps": list(e)} for e, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping, table: VarTable | None = None) -> "LaurentPoly":
        t = VarTable(data["vars"])
        if table is not None and table != t:
            raise UsageError(f"polynomial variables {t.names} do not match {table.names}")
        terms = {}
        for term in data["terms"]:
            exps = tuple(int(e) for e in term["exps"])
            if exps in terms:
                raise UsageError(f"duplicate exponent vector {exps}")
            coeff = int(term["coeff"])
            if not coeff:
                raise UsageError("zero coefficient in polynomial JSON")
            terms[exps] = coeff
        return cls(t, terms)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            factors = []
            for name, x in zip(self.table.names, e):
                if x == 1:
                    factors.append(name)
                elif x:
                    factors.append(f"{name}^{x}")
            mono = "*".join(factors)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"



# ---------------------------------------------------------------------------
# raw term-map helpers (dict: exps tuple -> int)


def _add_terms(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + c
        if v:
            out[e] = v
        else:
            del out[e]
    return out


def _sub_terms(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) - c
        if v:
            out[e] = v
        else:
            del out[e]
    return out


def _mul_terms(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    bitems = list(b.items())
    for ea, ca in a.items():
        for eb, cb in bitems:
            e = tuple(map(add, ea, eb))
            out[e] = get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _scale(a: dict, c: int) -> dict:
    return {e: v * c for e, v in a.items()}


def _content(terms: dict) -> int:
    g = 0
    for c in terms.values():
        g = igcd(g, c)
        if g == 1:
            break
    return g


def _min_exps(terms: dict, n: int) -> tuple:
    if not terms:
        return (0,) * n
    return tuple(min(col) for col in zip(*terms))


def _used_vars(terms: dict, n: int) -> set:
    used = set()
    for e in terms:
        for i, x in enumerate(e):
            if x:
                used.add(i)
        if len(used) == n:
            break
    return used


def _shifted(terms: dict, n: int) -> tuple[tuple, dict]:
    """Split off the lowest exponent vector: terms = x^m * P, P a polynomial."""
    m = _min_exps(terms, n)
    if not any(m):
        return m, terms
    return m, {tuple(map(sub, e, m)): c for e, c in terms.items()}


def _normalize_sign(terms: dict) -> dict:
    if terms and terms[max(terms)] < 0:
        return {e: -c for e, c in terms.items()}
    return terms


def _poly_exact_quo(f: dict, g: dict) -> dict:
    """Exact quotient f/g of polynomials (nonnegative exponents), lex order.

    Raises NotDivisible as soon as a remainder term cannot be cancelled.
    """
    if not g:
        raise DivisionByZero("division by the zero polynomial")
    if not f:
        return {}
    lead_g = max(g)
    lc_g = g[lead_g]
    rest = [(e, c) for e, c in g.items() if e != lead_g]
    rem = dict(f)
    heap = [tuple(-x for x in e) for e in rem]
    heapq.heapify(heap)
    quo = {}
    while heap:
        key = heapq.heappop(heap)
        e = tuple(-x for x in key)
        c = rem.pop(e, 0)
        if not c:
            continue
        d = tuple(map(sub, e, lead_g))
        if min(d) < 0:
            raise NotDivisible("leading term not divisible")
        q, r = divmod(c, lc_g)
        if r:
            raise NotDivisible("leading coefficient not divisible")
        quo[d] = q
        for eg, cg in rest:
            k = tuple(map(add, d, eg))
            v = rem.get(k, 0) - q * cg
            if v:
                if k not in rem:
                    heapq.heappush(heap, tuple(-x for x in k))
                rem[k] = v
            else:
                rem.pop(k, None)
    return quo


# ---------------------------------------------------------------------------
# public functional API


def _check_tables(p: LaurentPoly, q: LaurentPoly):
    if not isinstance(p, LaurentPoly) or not isinstance(q, LaurentPoly):
        raise UsageError("expected LaurentPoly operands")
    if p.table != q.table:
        raise UsageError(f"variable tables differ: {p.table} vs {q.table}")


def add_poly(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    _check_tables(p, q)
    return p + q


def mul_poly(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    _check_tables(p, q)
    return p * q


def neg_poly(p: LaurentPoly) -> LaurentPoly:
    return -p


def exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Return r with p = q*r in the Laurent ring, or raise NotDivisible."""
    _check_tables(p, q)
    if q.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    table = p.table
    if p.is_zero():
        return LaurentPoly.zero(table)
    n = len(table)
    if q.is_monomial():
        (eq, cq), = q._terms.items()
        if abs(cq) == 1 and p._d is None:
            shift, fp = p._fp
            return LaurentPoly._from_fp(table, tuple(map(sub, shift, eq)), fp * cq)
        out = {}
        for e, c in p._terms.items():
            v, r = divmod(c, cq)
            if r:
                raise NotDivisible(f"coefficient {c} not divisible by {cq}")
            out[tuple(map(sub, e, eq))] = v
        return LaurentPoly._make(table, out)
    if _use_flint(table):
        mp, fP = p._flint()
        mq, fQ = q._flint()
        try:
            quo = fP / fQ
        except _FlintDomainError:
            raise NotDivisible(f"{q} does not divide {p}") from None
        return LaurentPoly._from_fp(table, tuple(map(sub, mp, mq)), quo)
    mp, P = _shifted(p._terms, n)
    mq, Q = _shifted(q._terms, n)
    quo = _poly_exact_quo(P, Q)
    shift = tuple(map(sub, mp, mq))
    if any(shift):
        quo = {tuple(map(add, e, shift)): c for e, c in quo.items()}
    return LaurentPoly._make(table, quo)


def is_unit(p: LaurentPoly) -> bool:
    return p.is_unit()


def monomial_part(p: LaurentPoly) -> tuple[Monomial, LaurentPoly]:
    """Split p = m * pp with m a monomial carrying content, sign and lowest exponents.

    pp is an ordinary polynomial with coprime coefficients, not divisible by
    any variable, and positive (lex-)leading coefficient.
    """
    if p.is_zero():
        raise UsageError("monomial_part of the zero polynomial")
    table = p.table
    if p._d is None:
        m, fp = p._fp
        c = int(fp.content())
        if fp.leading_coefficient() < 0:
            c = -c
        return Monomial(c, m), LaurentPoly._from_fp(table, table.zero_exps(), fp / c if c != 1 else fp)
    m, P = _shifted(p._d, len(table))
    c = _content(P)
    if P[max(P)] < 0:
        c = -c
    if c != 1:
        P = {e: v // c for e, v in P.items()}
    return Monomial(c, m), LaurentPoly._make(table, P)


def _normalized(p: LaurentPoly) -> LaurentPoly:
    m, pp = monomial_part(p)
    c = abs(m.coeff)
    return pp if c == 1 else pp * c


def gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Greatest common divisor in Z[x^{+-1}], normalized.

    The result has no monomial (variable-shift) factor, positive leading
    coefficient, and carries the gcd of the integer contents.
    """
    _check_tables(p, q)
    if p.is_zero() and q.is_zero():
        raise UsageError("gcd(0, 0) is undefined")
    if p.is_zero():
        return _normalized(q)
    if q.is_zero():
        return _normalized(p)
    table = p.table
    if p.is_monomial() or q.is_monomial():
        return LaurentPoly.const(table, igcd(p.content(), q.content()))
    if _use_flint(table):
        _, fP = p._flint()
        _, fQ = q._flint()
        return LaurentPoly._from_fp(table, table.zero_exps(), fP.gcd(fQ))
    mp, P = monomial_part(p)
    mq, Q = monomial_part(q)
    c = igcd(mp.coeff, mq.coeff)
    h = _poly_gcd(P._terms, Q._terms, len(table))
    if c != 1:
        h = _scale(h, c)
    return LaurentPoly._make(table, h)


def is_coprime(p: LaurentPoly, q: LaurentPoly, over: str = "Z") -> bool:
    """True when p and q share no non-unit factor.

    ``over="Z"`` works in Z[x^{+-1}] (integer contents count as factors);
    ``over="Q"`` works in Q[x^{+-1}] where nonzero constants are units.
    """
    if over not in ("Z", "Q"):
        raise UsageError(f"unknown coefficient ring {over!r}")
    g = gcd(p, q)
    if over == "Q":
        return g.is_constant()
    return g.is_unit()



# ---------------------------------------------------------------------------
# multivariate polynomial GCD


class _HeuristicFailed(Exception):
    pass


def _poly_gcd(f: dict, g: dict, n: int, method: str = "auto") -> dict:
    """gcd of primitive, variable-free-of-monomial-factor polynomials f, g.

    Returns a primitive polynomial with positive leading coefficient.
    """
    if f == g:
        return _normalize_sign(f)
    zero = (0,) * n
    if len(f) == 1 and zero in f or len(g) == 1 and zero in g:
        return {zero: 1}
    if not (_used_vars(f, n) & _used_vars(g, n)):
        return {zero: 1}
    if method in ("auto", "heu"):
        try:
            h, _, _ = _heu_gcd(f, g, n)
            return h
        except _HeuristicFailed:
            if method == "heu":
                raise
    return _prs_gcd(f, g, n)


def _eval_var(f: dict, v: int, xi: int) -> dict:
    out: dict = {}
    powers: dict = {}
    for e, c in f.items():
        k = e[v]
        if k:
            p = powers.get(k)
            if p is None:
                p = powers[k] = xi ** k
            c = c * p
            e = e[:v] + (0,) + e[v + 1:]
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _interpolate(h: dict, xi: int, v: int) -> dict:
    """Recover a polynomial in variable v from its (symmetric) xi-adic image."""
    out = {}
    half = xi // 2
    i = 0
    while h:
        nxt = {}
        for e, c in h.items():
            r = c % xi
            if r > half:
                r -= xi
            if r:
                out[e[:v] + (i,) + e[v + 1:]] = r
            q = (c - r) // xi
            if q:
                nxt[e] = q
        h = nxt
        i += 1
    return _normalize_sign(out)


def _heu_gcd(f: dict, g: dict, n: int) -> tuple[dict, dict, dict]:
    """Heuristic GCD (Char, Geddes, Gonnet) by evaluation and xi-adic lifting.

    Returns (h, f/h, g/h); h has positive leading coefficient.  Every
    candidate is confirmed by exact division before it is returned.
    """
    used = sorted(_used_vars(f, n) | _used_vars(g, n))
    if not used:
        zero = (0,) * n
        a, b = f[zero], g[zero]
        h = igcd(a, b)
        return {zero: h}, {zero: a // h}, {zero: b // h}
    c = igcd(_content(f), _content(g))
    if c != 1:
        f = {e: x // c for e, x in f.items()}
        g = {e: x // c for e, x in g.items()}
    v = used[-1]
    f_norm = max(abs(x) for x in f.values())
    g_norm = max(abs(x) for x in g.values())
    xi = max(
        2 * min(f_norm, g_norm) + 29,
        2 * min(f_norm // abs(f[max(f)]), g_norm // abs(g[max(g)])) + 2,
    )
    for _ in range(6):
        ff = _eval_var(f, v, xi)
        gg = _eval_var(g, v, xi)
        if ff and gg:
            h, cff, cfg = _heu_gcd(ff, gg, n)
            h = _interpolate(h, xi, v)
            hc = _content(h)
            if hc != 1:
                h = {e: x // hc for e, x in h.items()}
            try:
                qf = _poly_exact_quo(f, h)
                qg = _poly_exact_quo(g, h)
                return (_scale(h, c) if c != 1 else h), qf, qg
            except NotDivisible:
                pass
            for cof, this, other in ((cff, f, g), (cfg, g, f)):
                cof = _interpolate(cof, xi, v)
                try:
                    h = _poly_exact_quo(this, cof)
                    h = _normalize_sign(h)
                    hc = _content(h)
                    if hc != 1:
                        h = {e: x // hc for e, x in h.items()}
                    qf = _poly_exact_quo(f, h)
                    qg = _poly_exact_quo(g, h)
                    return (_scale(h, c) if c != 1 else h), qf, qg
                except NotDivisible:
                    pass
        xi = 73794 * xi * isqrt(isqrt(xi)) // 27011
    raise _HeuristicFailed


def _to_uni(f: dict, v: int) -> dict:
    """View f as a polynomial in variable v: degree -> coefficient term-map."""
    out: dict = {}
    for e, c in f.items():
        out.setdefault(e[v], {})[e[:v] + (0,) + e[v + 1:]] = c
    return out


def _from_uni(F: dict, v: int) -> dict:
    out = {}
    for d, coeff in F.items():
        for e, c in coeff.items():
            out[e[:v] + (d,) + e[v + 1:]] = c
    return out


def _gcd_with_content(f: dict, g: dict, n: int, method: str) -> dict:
    """gcd of arbitrary nonzero polynomials (content and monomial factors kept)."""
    mf, F = _shifted(f, n)
    mg, G = _shifted(g, n)
    m = tuple(map(min, mf, mg))
    cf, cg = _content(F), _content(G)
    c = igcd(cf, cg)
    F = _normalize_sign({e: x // cf for e, x in F.items()})
    G = _normalize_sign({e: x // cg for e, x in G.items()})
    h = _poly_gcd(F, G, n, method)
    if c != 1:
        h = _scale(h, c)
    if any(m):
        h = {tuple(map(add, e, m)): x for e, x in h.items()}
    return h


def _uni_content(F: dict, n: int) -> dict:
    it = iter(F.values())
    cont = next(it)
    for coeff in it:
        if len(cont) == 1 and not any(next(iter(cont))) and abs(next(iter(cont.values()))) == 1:
            break
        cont = _gcd_with_content(cont, coeff, n, "prs")
    return _normalize_sign(cont)


def _prem(A: dict, B: dict) -> dict:
    """Pseudo-remainder of univariate A by B with polynomial coefficients."""
    dB = max(B)
    lcB = B[dB]
    R = dict(A)
    steps = max(A) - dB + 1
    while R and max(R) >= dB:
        dR = max(R)
        lcR = R[dR]
        new = {d: _mul_terms(lcB, c) for d, c in R.items()}
        for d, c in B.items():
            k = d + dR - dB
            t = _sub_terms(new.get(k, {}), _mul_terms(lcR, c))
            if t:
                new[k] = t
            else:
                new.pop(k, None)
        R = new
        steps -= 1
    if steps > 0 and R:
        factor = {next(iter(lcB)): 1}
        for _ in range(steps):
            factor = _mul_terms(factor, lcB)
        R = {d: _mul_terms(factor, c) for d, c in R.items()}
    return R


def _prs_gcd(f: dict, g: dict, n: int) -> dict:
    """Subresultant pseudo-remainder sequence GCD, recursive in the variables.

    f, g are nonzero; the result keeps integer content and monomial factors.
    """
    used_f = _used_vars(f, n)
    used_g = _used_vars(g, n)
    if not used_f and not used_g:
        zero = (0,) * n
        return {zero: igcd(f[zero], g[zero])}
    # main variable: the one of lowest degree keeps pseudo-remainders small
    common = used_f & used_g
    if common:
        v = min(common, key=lambda i: (max(max(e[i] for e in f), max(e[i] for e in g)), i))
    else:
        v = min(used_f | used_g)
    F = _to_uni(f, v)
    G = _to_uni(g, v)
    cF = _uni_content(F, n)
    cG = _uni_content(G, n)
    c = _gcd_with_content(cF, cG, n, "prs")
    if v not in used_f or v not in used_g:
        # one side is constant in v: the gcd lives in the coefficient ring
        return _normalize_sign(c)
    F = {d: _poly_exact_quo_any(x, cF, n) for d, x in F.items()}
    G = {d: _poly_exact_quo_any(x, cG, n) for d, x in G.items()}
    if max(F) < max(G):
        F, G = G, F
    one = {(0,) * n: 1}
    lc_prev, h = one, one
    while True:
        delta = max(F) - max(G)
        R = _prem(F, G)
        if not R:
            break
        if max(R) == 0:
            G = {0: one}
            break
        divisor = _mul_terms(lc_prev, _dict_pow(h, delta))
        F, G = G, {d: _poly_exact_quo_any(x, divisor, n) for d, x in R.items()}
        lc_prev = F[max(F)]
        if delta == 1:
            h = lc_prev
        elif delta > 1:
            h = _poly_exact_quo_any(_dict_pow(lc_prev, delta), _dict_pow(h, delta - 1), n)
    cG = _uni_content(G, n)
    G = {d: _poly_exact_quo_any(x, cG, n) for d, x in G.items()}
    h = _mul_terms(_from_uni(G, v), c)
    return _normalize_sign(h)


def _dict_pow(f: dict, e: int) -> dict:
    out = {next(iter(f))[:0] + (0,) * len(next(iter(f))): 1}
    for _ in range(e):
        out = _mul_terms(out, f)
    return out


def _poly_exact_quo_any(f: dict, g: dict, n: int) -> dict:
    """Exact quotient allowing g to carry a monomial factor."""
    mf, F = _shifted(f, n)
    mg, G = _shifted(g, n)
    q = _poly_exact_quo(F, G)
    shift = tuple(map(sub, mf, mg))
    if any(shift):
        q = {tuple(map(add, e, shift)): c for e, c in q.items()}
    return q


# ---------------------------------------------------------------------------
# substitution


def substitute(p: LaurentPoly, assignment: Mapping[str, object]):
    """Image of p under x_i -> assignment[x_i].

    Values may be ints, Fractions, LaurentPolys (all over one common table) or
    RationalFunctions.  The result lives in the "largest" ring involved:
    Fraction < LaurentPoly < RationalFunction.  A LaurentPoly value that is not
    a unit but occurs with a negative exponent promotes the result to a
    RationalFunction.
    """
    from .rational import RationalFunction

    table = p.table
    n = len(table)
    used = _used_vars(p._terms, n)
    values = {}
    for i in used:
        name = table.names[i]
        if name not in assignment:
            raise UsageError(f"variable {name!r} is not assigned")
        values[i] = assignment[name]
    mins = _min_exps(p._terms, n)

    poly_tables = {v.table for v in values.values() if isinstance(v, LaurentPoly)}
    rf_tables = {v.table for v in values.values() if isinstance(v, RationalFunction)}
    tables = poly_tables | rf_tables
    if len(tables) > 1:
        raise UsageError("substituted values live over different variable tables")
    target = next(iter(tables)) if tables else None

    need_rf = bool(rf_tables)
    for i, val in values.items():
        if not isinstance(val, (LaurentPoly, RationalFunction, int, Fraction)):
            raise UsageError(f"cannot substitute value of type {type(val).__name__}")
        if isinstance(val, LaurentPoly) and mins[i] < 0 and not val.is_unit():
            need_rf = True
        if isinstance(val, Fraction) and val.denominator != 1:
            need_rf = True

    if target is None:
        conv = {i: Fraction(v) for i, v in values.items()}
        zero, one = Fraction(0), Fraction(1)
    elif need_rf:
        conv = {i: RationalFunction.coerce(v, target) for i, v in values.items()}
        zero, one = RationalFunction.zero(target), RationalFunction.one(target)
    else:
        conv = {i: v if isinstance(v, LaurentPoly) else LaurentPoly.const(target, int(v))
                for i, v in values.items()}
        zero, one = LaurentPoly.zero(target), LaurentPoly.one(target)

    for i, v in conv.items():
        if v == 0 and mins[i] < 0:
            raise SingularSubstitution(f"{table.names[i]} = 0 but it occurs with a negative exponent")

    cache: dict = {}

    def power(i, k):
        key = (i, k)
        r = cache.get(key)
        if r is None:
            base = conv[i]
            if k < 0:
                if isinstance(base, LaurentPoly):
                    r = base ** k
                elif isinstance(base, RationalFunction):
                    r = base.inv() ** (-k)
                else:
                    r = 1 / base ** (-k)
            else:
                r = base ** k
            cache[key] = r
        return r

    total = zero
    for e, c in p.items():
        term = one * c
        for i in used:
            if e[i]:
                term = term * power(i, e[i])
        total = total + term
    if target is None and total.denominator == 1:
        return int(total)
    return total
