"""Exact dense linear algebra over the rationals and prime fields.

Everything downstream (normal forms, resolutions, Tor, isomorphism tests)
reduces to rank/kernel/solve questions over an exact field, so this module
deliberately avoids floating point: scalars are `fractions.Fraction` over the
rationals and plain ints in ``[0, p)`` over GF(p).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "FieldSpec",
    "Matrix",
    "SubspaceReducer",
    "QQ",
]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    # deterministic Miller-Rabin; the witness set covers all n < 3.3e24
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Ground field: the rationals when ``p is None``, otherwise GF(p)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and (self.p < 2 or self.p >= 2**31 or not _is_prime(self.p)):
            raise ValueError(f"field characteristic must be a prime < 2^31, got {self.p}")

    @property
    def name(self) -> str:
        return "rational" if self.p is None else f"gf {self.p}"

    def zero(self):
        return Fraction(0) if self.p is None else 0

    def one(self):
        return Fraction(1) if self.p is None else 1

    def from_int(self, n: int):
        return Fraction(n) if self.p is None else n % self.p

    def from_fraction(self, num: int, den: int):
        if self.p is None:
            return Fraction(num, den)
        d = den % self.p
        if d == 0:
            raise ZeroDivisionError(f"denominator {den} vanishes in GF({self.p})")
        return num * pow(d, self.p - 2, self.p) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else a * b % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if self.p is None:
            return Fraction(1) / a
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return a / b if self.p is None else self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def parse_scalar(self, text: str):
        """Parse ``int`` or ``int/int`` in this field."""
        if "/" in text:
            num, den = text.split("/", 1)
            return self.from_fraction(int(num), int(den))
        return self.from_int(int(text))

    def format_scalar(self, a) -> str:
        return str(a)


QQ = FieldSpec()


class Matrix:
    """Dense matrix with exact entries, row-major storage."""

    __slots__ = ("field", "rows", "cols", "data", "_rref")

    def __init__(self, field: FieldSpec, rows: int, cols: int, data=None):
        self.field = field
        self.rows = rows
        self.cols = cols
        if data is None:
            z = field.zero()
            self.data = [[z] * cols for _ in range(rows)]
        else:
            self.data = data
            if len(data) != rows or any(len(r) != cols for r in data):
                raise ValueError("matrix shape mismatch")
        self._rref = None

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: list[list]):
        r = len(rows)
        c = len(rows[0]) if rows else 0
        return cls(field, r, c, [list(row) for row in rows])

    @classmethod
    def zero(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        m = cls(field, n, n)
        one = field.one()
        for i in range(n):
            m.data[i][i] = one
        return m

    @classmethod
    def from_columns(cls, field: FieldSpec, cols: list[list], nrows: int | None = None):
        if not cols:
            if nrows is None:
                raise ValueError("need nrows for an empty column list")
            return cls(field, nrows, 0)
        n = len(cols[0])
        m = cls(field, n, len(cols))
        for j, col in enumerate(cols):
            for i in range(n):
                m.data[i][j] = col[i]
        return m

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.rows, self.cols, [row[:] for row in self.data])

    def column(self, j: int) -> list:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __repr__(self):
        return f"Matrix({self.field.name}, {self.rows}x{self.cols})"

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def __add__(self, other: "Matrix") -> "Matrix":
        f = self.field
        return Matrix(
            f,
            self.rows,
            self.cols,
            [
                [f.add(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        f = self.field
        return Matrix(
            f,
            self.rows,
            self.cols,
            [
                [f.sub(a, b) for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ],
        )

    def scale(self, c) -> "Matrix":
        f = self.field
        return Matrix(f, self.rows, self.cols, [[f.mul(c, x) for x in row] for row in self.data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        p = self.field.p
        out = Matrix(self.field, self.rows, other.cols)
        od, sd, td = out.data, self.data, other.data
        for i in range(self.rows):
            srow = sd[i]
            orow = od[i]
            for k in range(self.cols):
                a = srow[k]
                if a == 0:
                    continue
                trow = td[k]
                if p is None:
                    for j in range(other.cols):
                        b = trow[j]
                        if b != 0:
                            orow[j] += a * b
                else:
                    for j in range(other.cols):
                        b = trow[j]
                        if b != 0:
                            orow[j] = (orow[j] + a * b) % p
        return out

    def apply(self, vec: list) -> list:
        """Matrix times column vector."""
        p = self.field.p
        out = []
        for row in self.data:
            if p is None:
                s = Fraction(0)
                for a, b in zip(row, vec):
                    if a != 0 and b != 0:
                        s += a * b
            else:
                s = 0
                for a, b in zip(row, vec):
                    s += a * b
                s %= p
            out.append(s)
        return out

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field,
            self.cols,
            self.rows,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Matrix(
            self.field,
            self.rows,
            self.cols + other.cols,
            [ra + rb for ra, rb in zip(self.data, other.data)],
        )

    def _rref_inplace(self, m: list[list]) -> tuple[int, list[int]]:
        """Reduce ``m`` to reduced row echelon form; return (rank, pivot columns)."""
        p = self.field.p
        nrows = len(m)
        ncols = len(m[0]) if m else 0
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            pr = None
            for i in range(r, nrows):
                if m[i][c] != 0:
                    pr = i
                    break
            if pr is None:
                continue
            if pr != r:
                m[r], m[pr] = m[pr], m[r]
            row = m[r]
            piv = row[c]
            if p is None:
                if piv != 1:
                    inv = Fraction(1) / piv
                    m[r] = row = [x * inv for x in row]
                for i in range(nrows):
                    if i == r:
                        continue
                    f = m[i][c]
                    if f != 0:
                        mi = m[i]
                        m[i] = [a - f * b for a, b in zip(mi, row)]
            else:
                if piv != 1:
                    inv = pow(piv, p - 2, p)
                    m[r] = row = [x * inv % p for x in row]
                for i in range(nrows):
                    if i == r:
                        continue
                    f = m[i][c]
                    if f != 0:
                        mi = m[i]
                        m[i] = [(a - f * b) % p for a, b in zip(mi, row)]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        return r, pivots

    def rref(self) -> tuple["Matrix", int, list[int]]:
        """Unique reduced row echelon form: (reduced, rank, pivot columns)."""
        if self._rref is None:
            m = [row[:] for row in self.data]
            rank, pivots = self._rref_inplace(m)
            self._rref = (Matrix(self.field, self.rows, self.cols, m), rank, pivots)
        return self._rref

    def rank(self) -> int:
        return self.rref()[1]

    def kernel_basis(self) -> "Matrix":
        """Columns spanning the right null space, in echelon-canonical form.

        The column for free variable j has a 1 in position j and the negated
        reduced coefficients in the pivot positions; columns are ordered by
        free column index.
        """
        red, rank, pivots = self.rref()
        f = self.field
        pivset = set(pivots)
        free = [j for j in range(self.cols) if j not in pivset]
        cols = []
        for j in free:
            v = [f.zero()] * self.cols
            v[j] = f.one()
            for i, pc in enumerate(pivots):
                c = red.data[i][j]
                if c != 0:
                    v[pc] = f.neg(c)
            cols.append(v)
        return Matrix.from_columns(f, cols, nrows=self.cols)

    def solve(self, rhs: "Matrix") -> "Matrix | None":
        """Some x with self @ x = rhs, or None; free variables are set to zero."""
        if rhs.rows != self.rows:
            raise ValueError("rhs row count mismatch")
        aug = self.hstack(rhs)
        m = [row[:] for row in aug.data]
        rank, pivots = self._rref_inplace(m)
        f = self.field
        for pc in pivots:
            if pc >= self.cols:
                return None
        x = Matrix(f, self.cols, rhs.cols)
        for i, pc in enumerate(pivots):
            for j in range(rhs.cols):
                x.data[pc][j] = m[i][self.cols + j]
        return x


class SubspaceReducer:
    """Incremental reduced-echelon basis of a subspace of k^n.

    Supports membership tests, span growth and canonical reduction modulo the
    subspace; the reduction of any vector is supported on the complement of
    the pivot set, which doubles as a canonical basis of the quotient space.
    """

    def __init__(self, field: FieldSpec, dim: int, vectors=None):
        self.field = field
        self.dim = dim
        self.rows: dict[int, list] = {}  # pivot index -> reduced row
        if vectors is not None:
            for v in vectors:
                self.insert(v)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: list) -> list:
        f = self.field
        p = f.p
        v = list(vec)
        for j in sorted(self.rows):
            c = v[j]
            if c != 0:
                row = self.rows[j]
                if p is None:
                    v = [a - c * b for a, b in zip(v, row)]
                else:
                    v = [(a - c * b) % p for a, b in zip(v, row)]
        return v

    def contains(self, vec: list) -> bool:
        return all(x == 0 for x in self.reduce(vec))

    def insert(self, vec: list) -> bool:
        """Add vec to the span; True if the rank grew."""
        f = self.field
        p = f.p
        v = self.reduce(vec)
        piv = None
        for j, c in enumerate(v):
            if c != 0:
                piv = j
                break
        if piv is None:
            return False
        c = v[piv]
        if c != f.one():
            inv = f.inv(c)
            if p is None:
                v = [x * inv for x in v]
            else:
                v = [x * inv % p for x in v]
        # keep existing rows reduced against the new one
        for j, row in self.rows.items():
            c = row[piv]
            if c != 0:
                if p is None:
                    self.rows[j] = [a - c * b for a, b in zip(row, v)]
                else:
                    self.rows[j] = [(a - c * b) % p for a, b in zip(row, v)]
        self.rows[piv] = v
        return True

    def pivot_indices(self) -> list[int]:
        return sorted(self.rows)

    def complement_indices(self) -> list[int]:
        pivs = self.rows
        return [j for j in range(self.dim) if j not in pivs]

    def coords_in_complement(self, vec: list) -> list:
        """Coordinates of vec + span in the complement basis."""
        v = self.reduce(vec)
        return [v[j] for j in self.complement_indices()]

    def basis_rows(self) -> list[list]:
        return [self.rows[j] for j in sorted(self.rows)]
