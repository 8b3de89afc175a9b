"""Exchange matrices, seeds and seed mutation.

Directions are 1-based throughout the public API.  A mutation reads the
pre-mutation matrix for the matrix, cluster-variable and coefficient
updates alike; the matrix is replaced only afterwards.

Coefficient mutation uses the exponent ``-b[d][i]`` in both branches::

    y_i -> y_i * (1/y_d + 1)^(-b)   if b = b[d][i] > 0
    y_i -> y_i * (y_d + 1)^(-b)     if b < 0

which is the convention under which the orbit relations for ``B_k`` hold
(e.g. ``y_{n,n+1} = y_{n-1,n+1} (y_{n-1,n} + 1)`` where ``b = -1``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotDivisible, SingularityEncountered, UsageError
from .laurent import LaurentPoly, VarTable, exact_div
from .rational import RationalFunction

__all__ = [
    "ExchangeMatrix",
    "Seed",
    "CyclicShift",
    "make_Bk",
    "mutate_matrix",
    "mutate_x",
    "mutate_y",
    "mutate_seed",
    "mutation_sequence",
    "check_mutation_period",
    "cyclic_schedule",
    "symbolic_seed",
    "cluster_orbit",
    "coefficient_orbit",
]

B4 = ((0, -1, 2, -1), (1, 0, -3, 2), (-2, 3, 0, -1), (1, -2, 1, 0))
B5 = (
    (0, -1, 1, 1, -1),
    (1, 0, -2, 0, 1),
    (-1, 2, 0, -2, 1),
    (-1, 0, 2, 0, -1),
    (1, -1, -1, 1, 0),
)


@dataclass(frozen=True)
class ExchangeMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        k = len(rows)
        if k < 1 or any(len(row) != k for row in rows):
            raise UsageError("exchange matrix must be square and nonempty")
        for i in range(k):
            if rows[i][i]:
                raise UsageError(f"nonzero diagonal entry at ({i + 1},{i + 1})")
            for j in range(i + 1, k):
                if rows[i][j] != -rows[j][i]:
                    raise UsageError(f"matrix is not skew-symmetric at ({i + 1},{j + 1})")
        object.__setattr__(self, "entries", rows)

    @property
    def k(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        """1-based entry access: B[i, j] = b_{i,j}."""
        i, j = ij
        return self.entries[i - 1][j - 1]

    def row(self, i: int) -> tuple:
        return self.entries[i - 1]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def conjugate(self, power: int = 1) -> "ExchangeMatrix":
        """R^p B R^-p, i.e. the entry b_{i,j} moves to position (i+p, j+p) mod k."""
        k = self.k
        p = power % k
        out = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                out[(i + p) % k][(j + p) % k] = self.entries[i][j]
        return ExchangeMatrix(tuple(map(tuple, out)))


@dataclass(frozen=True)
class CyclicShift:
    """The k x k permutation matrix R with R e_i = e_{i+1 mod k}."""

    k: int

    def matrix(self) -> tuple:
        k = self.k
        return tuple(tuple(1 if i == (j + 1) % k else 0 for j in range(k)) for i in range(k))

    def power(self, p: int) -> tuple:
        k = self.k
        p %= k
        return tuple(tuple(1 if i == (j + p) % k else 0 for j in range(k)) for i in range(k))

    def conjugate(self, B: ExchangeMatrix, p: int = 1) -> ExchangeMatrix:
        """Literal R^p B R^-p by matrix products (R^-1 = R^T)."""
        Rp = self.power(p)
        k = self.k
        RB = [[sum(Rp[i][t] * B.entries[t][j] for t in range(k)) for j in range(k)] for i in range(k)]
        out = [[sum(RB[i][t] * Rp[j][t] for t in range(k)) for j in range(k)] for i in range(k)]
        return ExchangeMatrix(tuple(map(tuple, out)))


def make_Bk(k: int) -> ExchangeMatrix:
    """The k x k exchange matrix B_k (k >= 4) whose mutations are cyclic shifts."""
    if not isinstance(k, int) or k < 4:
        raise UsageError(f"B_k is defined for k >= 4, got {k!r}")
    e = [[0] * (k + 1) for _ in range(k + 1)]
    for i in range(1, k):
        e[i][i + 1] = -2
    for i in range(1, k - 1):
        e[i][i + 2] = 1
    e[1][2] += 1
    e[1][k - 1] += 1
    e[1][k] -= 1
    e[2][k - 1] -= 1
    e[2][k] += 1
    e[k - 1][k] += 1
    for i in range(1, k + 1):
        for j in range(1, i):
            e[i][j] = -e[j][i]
    B = ExchangeMatrix(tuple(tuple(row[1:]) for row in e[1:]))
    if k == 4:
        assert B.entries == B4
    elif k == 5:
        assert B.entries == B5
    return B


def _check_dir(B: ExchangeMatrix, d: int):
    if not isinstance(d, int) or not 1 <= d <= B.k:
        raise UsageError(f"mutation direction {d!r} out of range 1..{B.k}")


def mutate_matrix(B: ExchangeMatrix, d: int) -> ExchangeMatrix:
    _check_dir(B, d)
    k = B.k
    b = B.entries
    c = d - 1
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == c or j == c:
                row.append(-b[i][j])
            elif b[i][c] > 0 and b[c][j] > 0:
                row.append(b[i][j] + b[i][c] * b[c][j])
            elif b[i][c] < 0 and b[c][j] < 0:
                row.append(b[i][j] - b[i][c] * b[c][j])
            else:
                row.append(b[i][j])
        out.append(tuple(row))
    return ExchangeMatrix(tuple(out))


@dataclass(frozen=True)
class Seed:
    """(B, x, y): exchange matrix, cluster variables, coefficients.

    Entries of x may be LaurentPolys, RationalFunctions or exact numbers;
    entries of y may be RationalFunctions or exact numbers.
    """

    matrix: ExchangeMatrix
    x: tuple
    y: tuple

    def __post_init__(self):
        k = self.matrix.k
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        if len(self.x) != k or len(self.y) != k:
            raise UsageError(f"seed tuples must have length {k}")
        for v in self.x:
            if v == 0:
                raise UsageError("cluster variables must be nonzero")

    @property
    def k(self) -> int:
        return self.matrix.k

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "matrix": self.matrix.to_lists(),
            "x": [_poly_json(v) for v in self.x],
            "y": [_rf_json(v) for v in self.y],
        }

    @classmethod
    def from_json(cls, data) -> "Seed":
        matrix = ExchangeMatrix(tuple(tuple(row) for row in data["matrix"]))
        if int(data["k"]) != matrix.k:
            raise UsageError(f"k={data['k']} does not match a {matrix.k}x{matrix.k} matrix")
        x = [LaurentPoly.from_json(p) for p in data["x"]]
        y = [RationalFunction.from_json(r) for r in data["y"]]
        return cls(matrix, tuple(x), tuple(y))


def _poly_json(v):
    if isinstance(v, LaurentPoly):
        return v.to_json()
    if isinstance(v, RationalFunction):
        if not v.is_laurent():
            raise UsageError("cluster variable is not a Laurent polynomial")
        return v.num.to_json()
    v = Fraction(v)
    if v.denominator != 1:
        raise UsageError("numeric cluster variable is not an integer")
    return LaurentPoly.const(VarTable([]), v.numerator).to_json()


def _rf_json(v):
    if isinstance(v, RationalFunction):
        return v.to_json()
    if isinstance(v, LaurentPoly):
        return RationalFunction.coerce(v, v.table).to_json()
    return RationalFunction.coerce(Fraction(v), VarTable([])).to_json()


def _prod(values: Iterable, start):
    out = start
    for v in values:
        out = out * v
    return out


def _one_like(v):
    if isinstance(v, LaurentPoly):
        return LaurentPoly.one(v.table)
    if isinstance(v, RationalFunction):
        return RationalFunction.one(v.table)
    return Fraction(1)


def exchange_binomial(B: ExchangeMatrix, x: Sequence, d: int):
    """prod_{b_dj>0} x_j^b_dj + prod_{b_dj<0} x_j^-b_dj for direction d."""
    row = B.row(d)
    one = _one_like(x[d - 1])
    pos = _prod((x[j] ** b for j, b in enumerate(row) if b > 0), one)
    neg = _prod((x[j] ** -b for j, b in enumerate(row) if b < 0), one)
    return pos + neg


def _divide(a, b):
    if isinstance(a, LaurentPoly) and isinstance(b, LaurentPoly):
        return exact_div(a, b)
    if b == 0:
        raise SingularityEncountered("division by zero")
    if isinstance(a, (LaurentPoly, RationalFunction)) or isinstance(b, (LaurentPoly, RationalFunction)):
        table = a.table if isinstance(a, (LaurentPoly, RationalFunction)) else b.table
        return RationalFunction.coerce(a, table) / RationalFunction.coerce(b, table)
    return Fraction(a) / Fraction(b)


def mutate_x(seed: Seed, d: int) -> Seed:
    _check_dir(seed.matrix, d)
    x = list(seed.x)
    x[d - 1] = _divide(exchange_binomial(seed.matrix, x, d), x[d - 1])
    if x[d - 1] == 0:
        raise SingularityEncountered(f"cluster variable x{d} became zero")
    return Seed(seed.matrix, tuple(x), seed.y)


def mutate_y(seed: Seed, d: int) -> Seed:
    _check_dir(seed.matrix, d)
    y = list(seed.y)
    yd = y[d - 1]
    if not isinstance(yd, RationalFunction) and (yd == 0 or yd == -1):
        raise SingularityEncountered(f"coefficient y{d} = {yd} cannot be mutated")
    if isinstance(yd, RationalFunction) and (yd.is_zero() or yd == -1):
        raise SingularityEncountered(f"coefficient y{d} = {yd} cannot be mutated")
    one = _one_like(yd)
    inv = one / yd if isinstance(yd, RationalFunction) else 1 / Fraction(yd)
    row = seed.matrix.row(d)
    for i, b in enumerate(row):
        if i == d - 1 or b == 0:
            continue
        if b > 0:
            y[i] = y[i] * (inv + 1) ** (-b)
        else:
            y[i] = y[i] * (yd + 1) ** (-b)
    y[d - 1] = inv
    return Seed(seed.matrix, seed.x, tuple(y))


def mutate_seed(seed: Seed, d: int) -> Seed:
    sx = mutate_x(seed, d)
    sy = mutate_y(seed, d)
    return Seed(mutate_matrix(seed.matrix, d), sx.x, sy.y)


def mutation_sequence(seed: Seed, dirs: Iterable[int]) -> Seed:
    for d in dirs:
        seed = mutate_seed(seed, d)
    return seed


def cyclic_schedule(k: int, steps: int, start: int = 1) -> list[int]:
    """Directions start, start+1, ... reduced into 1..k."""
    return [(start - 1 + i) % k + 1 for i in range(steps)]


def check_mutation_period(k: int) -> bool:
    """mu_n(R^{n-1} B_k R^{-(n-1)}) == R^n B_k R^{-n} for n = 1..k, and R^k B_k R^-k == B_k."""
    B = make_Bk(k)
    R = CyclicShift(k)
    cur = B
    for n in range(1, k + 1):
        if cur != R.conjugate(B, n - 1):
            return False
        cur = mutate_matrix(cur, n)
        if cur != R.conjugate(B, n):
            return False
    return cur == B


def symbolic_seed(B: ExchangeMatrix, x_names=None, y_names=None) -> Seed:
    """Seed with fresh variables x1..xk (Laurent) and y1..yk (rational)."""
    k = B.k
    x_names = x_names or [f"x{i}" for i in range(1, k + 1)]
    y_names = y_names or [f"y{i}" for i in range(1, k + 1)]
    xt = VarTable(x_names)
    yt = VarTable(y_names)
    return Seed(B, tuple(LaurentPoly.gens(xt)), tuple(RationalFunction.gens(yt)))


def cluster_orbit(k: int, steps: int, x0: Sequence | None = None) -> list:
    """[x_1, ..., x_{k+steps}] generated by mutating B_k in the cyclic order 1,2,...,k,1,...

    Only the cluster variables are mutated; the k initial values default to
    fresh symbols x1..xk.
    """
    B = make_Bk(k)
    if x0 is None:
        x0 = LaurentPoly.gens(VarTable([f"x{i}" for i in range(1, k + 1)]))
    seed = Seed(B, tuple(x0), (Fraction(1),) * k)
    out = list(seed.x)
    for d in cyclic_schedule(k, steps):
        try:
            seed = mutate_x(seed, d)
        except NotDivisible as exc:
            raise NotDivisible(f"mutation {len(out) - k + 1} (direction {d}) left the Laurent ring") from exc
        seed = Seed(mutate_matrix(seed.matrix, d), seed.x, seed.y)
        out.append(seed.x[d - 1])
    return out


def coefficient_orbit(k: int, steps: int, y0: Sequence | None = None) -> list:
    """[y_0, ..., y_steps] with y_n the coefficient at position n+1 (mod k) after n mutations.

    The initial coefficients default to fresh symbols y1..yk.
    """
    B = make_Bk(k)
    if y0 is None:
        y0 = RationalFunction.gens(VarTable([f"y{i}" for i in range(1, k + 1)]))
    seed = Seed(B, (Fraction(1),) * k, tuple(y0))
    out = [seed.y[0]]
    for n, d in enumerate(cyclic_schedule(k, steps), start=1):
        seed = mutate_y(seed, d)
        seed = Seed(mutate_matrix(seed.matrix, d), seed.x, seed.y)
        out.append(seed.y[n % k])
    return out
