"""Exact dense linear algebra over Q and over prime fields F_p.

Every downstream computation (homology, lifting problems, Kan extensions)
reduces to ranks, kernels, and affine solves over an exact field, so this
module deliberately avoids floating point anywhere.  Matrices are small
(desk scale), dense, and immutable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

__all__ = [
    "Field",
    "QQ",
    "GF",
    "Matrix",
    "rref",
    "rank",
    "kernel_basis",
    "solve_affine",
    "cokernel_projection",
    "right_inverse",
    "inverse",
    "extend_to_basis",
]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Field:
    """The rationals (``p is None``) or the prime field F_p.

    Rational elements are ``Fraction``; prime-field elements are ints
    normalized to ``[0, p)``.  Scalars of different fields never mix.
    """

    __slots__ = ("p",)

    def __init__(self, p: Optional[int] = None):
        if p is not None and not _is_prime(p):
            raise ValueError(f"field characteristic must be prime, got {p}")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    @property
    def zero(self):
        return Fraction(0) if self.p is None else 0

    @property
    def one(self):
        return Fraction(1) if self.p is None else 1

    def of(self, x):
        """Coerce an int, Fraction, or string like ``\"3/4\"`` to a scalar."""
        if self.p is None:
            if isinstance(x, str):
                return Fraction(x)
            return Fraction(x)
        if isinstance(x, str):
            if "/" in x:
                num, den = x.split("/")
                return self.mul(int(num) % self.p, self.inv(int(den) % self.p))
            x = int(x)
        return int(x) % self.p

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a) if self.p is None else pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def format(self, a) -> str:
        return str(a)

    def elements(self) -> Iterable:
        """All field elements; only available for prime fields."""
        if self.p is None:
            raise ValueError("cannot enumerate QQ")
        return range(self.p)


QQ = Field()

_gf_cache: dict[int, Field] = {}


def GF(p: int) -> Field:
    if p not in _gf_cache:
        _gf_cache[p] = Field(p)
    return _gf_cache[p]


class Matrix:
    """Immutable dense matrix with an explicit shape; 0 rows or columns allowed."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, nrows: int, ncols: int, rows):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix dimension")
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise ValueError(
                f"entry grid does not match shape {nrows}x{ncols}"
            )
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rows(field: Field, rows, ncols: Optional[int] = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("cannot infer column count from an empty grid")
            ncols = len(rows[0])
        coerced = [[field.of(x) for x in r] for r in rows]
        return Matrix(field, len(rows), ncols, coerced)

    @staticmethod
    def zero(field: Field, nrows: int, ncols: int) -> "Matrix":
        m = object.__new__(Matrix)
        m.field = field
        m.nrows = nrows
        m.ncols = ncols
        zrow = (field.zero,) * ncols
        m.rows = (zrow,) * nrows
        return m

    @staticmethod
    def from_entries(field: Field, nrows: int, ncols: int, entries: dict) -> "Matrix":
        """Build from a sparse {(i, j): value} map; empty rows share storage."""
        byrow: dict = {}
        for (i, j), v in entries.items():
            if v != 0:
                byrow.setdefault(i, {})[j] = v
        zrow = (field.zero,) * ncols
        rows = []
        for i in range(nrows):
            d = byrow.get(i)
            if not d:
                rows.append(zrow)
            else:
                r = [field.zero] * ncols
                for j, v in d.items():
                    r[j] = v
                rows.append(tuple(r))
        m = object.__new__(Matrix)
        m.field = field
        m.nrows = nrows
        m.ncols = ncols
        m.rows = tuple(rows)
        return m

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return Matrix(
            field, n, n, [[o if i == j else z for j in range(n)] for i in range(n)]
        )

    # -- basics ------------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def entry(self, i: int, j: int):
        return self.rows[i][j]

    def is_zero(self) -> bool:
        return all(self.field.is_zero(x) for r in self.rows for x in r)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field, self.nrows, self.ncols, self.rows))

    def __repr__(self):
        return f"Matrix({self.field!r}, {self.nrows}x{self.ncols}, {self.rows!r})"

    # -- arithmetic --------------------------------------------------------

    def add(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        f = self.field
        return Matrix(
            f,
            self.nrows,
            self.ncols,
            [
                [
                    (b if a == 0 else (a if b == 0 else f.add(a, b)))
                    for a, b in zip(ra, rb)
                ]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def sub(self, other: "Matrix") -> "Matrix":
        return self.add(other.neg())

    def neg(self) -> "Matrix":
        f = self.field
        return Matrix(
            f, self.nrows, self.ncols, [[f.neg(a) for a in r] for r in self.rows]
        )

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.of(c)
        return Matrix(
            f, self.nrows, self.ncols, [[f.mul(c, a) for a in r] for r in self.rows]
        )

    def mul(self, other: "Matrix") -> "Matrix":
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.ncols != other.nrows:
            raise ValueError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        f = self.field
        if other.nrows == 0 or self.nrows == 0 or other.ncols == 0:
            return Matrix.zero(f, self.nrows, other.ncols)
        # sparse-aware accumulation: most structure maps are permutation-like
        p = f.p
        brows = other.rows
        out = []
        zero = f.zero
        for r in self.rows:
            acc = [zero] * other.ncols
            touched = False
            for k, a in enumerate(r):
                if a == 0:
                    continue
                brow = brows[k]
                for j, b in enumerate(brow):
                    if b == 0:
                        continue
                    touched = True
                    if p is None:
                        acc[j] = acc[j] + a * b
                    else:
                        acc[j] = (acc[j] + a * b) % p
            out.append(acc if touched else [zero] * other.ncols)
        return Matrix(f, self.nrows, other.ncols, out)

    def transpose(self) -> "Matrix":
        out = [
            [self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)
        ]
        return Matrix(self.field, self.ncols, self.nrows, out)

    # -- assembly ----------------------------------------------------------

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch in hstack")
        return Matrix(
            self.field,
            self.nrows,
            self.ncols + other.ncols,
            [ra + rb for ra, rb in zip(self.rows, other.rows)],
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch in vstack")
        return Matrix(
            self.field, self.nrows + other.nrows, self.ncols, self.rows + other.rows
        )

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product; pairs with row-major vectorization via
        vec(A X B) = kron(A, B^T) vec(X)."""
        f = self.field
        out = []
        for ra in self.rows:
            for rb in other.rows:
                out.append([f.mul(a, b) for a in ra for b in rb])
        return Matrix(f, self.nrows * other.nrows, self.ncols * other.ncols, out)

    def vec(self) -> "Matrix":
        """Row-major flattening into a column vector."""
        flat = [x for r in self.rows for x in r]
        return Matrix(self.field, len(flat), 1, [[x] for x in flat])

    @staticmethod
    def unvec(field: Field, column: "Matrix", nrows: int, ncols: int) -> "Matrix":
        flat = [r[0] for r in column.rows]
        if len(flat) != nrows * ncols:
            raise ValueError("unvec size mismatch")
        return Matrix(
            field, nrows, ncols, [flat[i * ncols : (i + 1) * ncols] for i in range(nrows)]
        )

    def column(self, j: int) -> "Matrix":
        return Matrix(self.field, self.nrows, 1, [[r[j]] for r in self.rows])

    def columns(self) -> list["Matrix"]:
        return [self.column(j) for j in range(self.ncols)]

    def _check_same_shape(self, other: "Matrix"):
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")


def block_diag(field: Field, blocks: list[Matrix]) -> Matrix:
    nrows = sum(b.nrows for b in blocks)
    ncols = sum(b.ncols for b in blocks)
    out = [[field.zero] * ncols for _ in range(nrows)]
    i0 = j0 = 0
    for b in blocks:
        for i in range(b.nrows):
            for j in range(b.ncols):
                out[i0 + i][j0 + j] = b.rows[i][j]
        i0 += b.nrows
        j0 += b.ncols
    return Matrix(field, nrows, ncols, out)


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form with its pivot columns.

    Pivots are chosen in fixed column order (leftmost first), which makes
    every derived basis and solution choice deterministic.  Rows are kept
    as sparse maps internally; the structure maps this package eliminates
    are mostly permutation-like.
    """
    f = m.field
    p = f.p
    rows = [
        {j: x for j, x in enumerate(r) if x != 0} for r in m.rows
    ]
    # column -> set of row indices with a nonzero entry there
    pivots = []
    rank_ = 0
    n = m.nrows
    for col in range(m.ncols):
        piv = None
        for i in range(rank_, n):
            if rows[i].get(col, 0) != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank_], rows[piv] = rows[piv], rows[rank_]
        prow = rows[rank_]
        inv = f.inv(prow[col])
        if inv != 1:
            if p is None:
                for j in list(prow):
                    prow[j] = prow[j] * inv
            else:
                for j in list(prow):
                    prow[j] = (prow[j] * inv) % p
        for i in range(n):
            if i == rank_:
                continue
            ri = rows[i]
            c = ri.get(col)
            if not c:
                continue
            if p is None:
                for j, v in prow.items():
                    nv = ri.get(j, 0) - c * v
                    if nv:
                        ri[j] = nv
                    elif j in ri:
                        del ri[j]
            else:
                for j, v in prow.items():
                    nv = (ri.get(j, 0) - c * v) % p
                    if nv:
                        ri[j] = nv
                    elif j in ri:
                        del ri[j]
        pivots.append(col)
        rank_ += 1
        if rank_ == n:
            break
    zero = f.zero
    dense = []
    for r in rows:
        row = [zero] * m.ncols
        for j, v in r.items():
            row[j] = v
        dense.append(row)
    return Matrix(f, m.nrows, m.ncols, dense), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of ker(m); deterministic via the fixed elimination."""
    f = m.field
    r, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.ncols) if j not in pivset]
    cols = []
    for j in free:
        v = [f.zero] * m.ncols
        v[j] = f.one
        for i, pc in enumerate(pivots):
            v[pc] = f.neg(r.rows[i][j])
        cols.append(v)
    out = [[cols[k][i] for k in range(len(cols))] for i in range(m.ncols)]
    return Matrix(f, m.ncols, len(free), out)


def solve_affine(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Some exact solution x of a x = b, or None when unsolvable.

    b may have several columns; free variables are set to zero, so the
    answer is the one produced by the fixed column-ordered elimination.
    """
    if a.field != b.field:
        raise ValueError("field mismatch")
    if a.nrows != b.nrows:
        raise ValueError(f"a has {a.nrows} rows but b has {b.nrows}")
    f = a.field
    aug, pivots = rref(a.hstack(b))
    for i in range(len(pivots), a.nrows):
        if any(not f.is_zero(aug.rows[i][a.ncols + k]) for k in range(b.ncols)):
            return None
    if any(p >= a.ncols for p in pivots):
        return None
    x = [[f.zero] * b.ncols for _ in range(a.ncols)]
    for i, pc in enumerate(pivots):
        for k in range(b.ncols):
            x[pc][k] = aug.rows[i][a.ncols + k]
    return Matrix(f, a.ncols, b.ncols, x)


def extend_to_basis(cols: Matrix) -> Matrix:
    """Extend the (independent) columns of ``cols`` to a basis of the
    ambient space by appending standard basis vectors in index order."""
    f = cols.field
    n = cols.nrows
    current = cols
    r = rank(cols)
    if r != cols.ncols:
        raise ValueError("columns are not independent")
    for j in range(n):
        if current.ncols == n:
            break
        e = Matrix(f, n, 1, [[f.one if i == j else f.zero] for i in range(n)])
        cand = current.hstack(e)
        if rank(cand) > current.ncols:
            current = cand
    return current


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError("only square matrices invert")
    x = solve_affine(m, Matrix.identity(m.field, m.nrows))
    if x is None:
        raise ValueError("matrix is singular")
    return x


def right_inverse(m: Matrix) -> Optional[Matrix]:
    return solve_affine(m, Matrix.identity(m.field, m.nrows))


def cokernel_projection(m: Matrix) -> Matrix:
    """A surjection q with q m = 0, rank(q) = rows - rank(m); q restricted
    to the chosen complement of im(m) is the identity chart."""
    f = m.field
    n = m.nrows
    _, pivots = rref(m)
    im_basis_cols = [m.column(j) for j in pivots]
    im = (
        im_basis_cols[0]
        if im_basis_cols
        else Matrix.zero(f, n, 0)
    )
    for c in im_basis_cols[1:]:
        im = im.hstack(c)
    full = extend_to_basis(im)
    inv = inverse(full)
    r = len(pivots)
    return Matrix(f, n - r, n, inv.rows[r:])
