"""The pluggable monoidal base: bounded chain complexes with the projective
model structure, and finite-dimensional vector spaces as a degenerate
second instance.

A base bundles the monoidal structure (delegated to :mod:`ecwb.chain`),
the three map classes, generating (acyclic) cofibrations over a degree
window, functorial factorizations, and an exact lifting solver.
"""

from __future__ import annotations

from typing import Optional

from .linalg import Field, Matrix, rank, solve_affine
from . import chain as ch
from .chain import ChainComplex, ChainMap

__all__ = [
    "MonoidalBase",
    "ChainBase",
    "VectBase",
    "solve_lifting",
    "lifting_system",
    "pushout_product",
]


class MonoidalBase:
    """Shared interface for the two concrete bases."""

    field: Field

    def unit(self) -> ChainComplex:
        return ChainComplex.unit(self.field)

    # monoidal structure is uniform across instances
    def tensor(self, v, w):
        return ch.tensor(v, w)

    def internal_hom(self, v, w):
        return ch.hom_complex(v, w)

    def check_object(self, v: ChainComplex) -> None:
        pass

    # model structure: instances fill these in
    def is_weak_equivalence(self, f: ChainMap) -> bool:
        raise NotImplementedError

    def is_fibration(self, f: ChainMap) -> bool:
        raise NotImplementedError

    def is_cofibration(self, f: ChainMap) -> bool:
        raise NotImplementedError

    def is_acyclic_fibration(self, f: ChainMap) -> bool:
        return self.is_fibration(f) and self.is_weak_equivalence(f)

    def is_acyclic_cofibration(self, f: ChainMap) -> bool:
        return self.is_cofibration(f) and self.is_weak_equivalence(f)

    def generating_cofibrations(self) -> list[ChainMap]:
        raise NotImplementedError

    def generating_acyclic_cofibrations(self) -> list[ChainMap]:
        raise NotImplementedError

    def factor(self, f: ChainMap, mode: str) -> tuple[ChainMap, ChainMap]:
        raise NotImplementedError


class ChainBase(MonoidalBase):
    """Bounded complexes over a field, projective model structure.

    Weak equivalences are quasi-isomorphisms, fibrations are degreewise
    surjections, and (since the coefficients form a field) cofibrations
    are degreewise injections.  Generators live in the configured degree
    window: sphere-to-disk inclusions and disk coverings of zero.
    """

    def __init__(self, field: Field, window: tuple[int, int] = (-3, 3)):
        self.field = field
        lo, hi = window
        if lo > hi:
            raise ValueError("empty degree window")
        self.window = (lo, hi)

    def __repr__(self):
        return f"ChainBase({self.field!r}, window={self.window})"

    def __eq__(self, other):
        return (
            isinstance(other, ChainBase)
            and self.field == other.field
            and self.window == other.window
        )

    def __hash__(self):
        return hash(("ChainBase", self.field, self.window))

    def is_weak_equivalence(self, f: ChainMap) -> bool:
        return ch.is_quasi_iso(f)

    def is_fibration(self, f: ChainMap) -> bool:
        return f.is_surjective()

    def is_cofibration(self, f: ChainMap) -> bool:
        return f.is_injective()

    def generating_cofibrations(self) -> list[ChainMap]:
        """Boundary inclusions S^{n-1} -> D^n for n in the window."""
        lo, hi = self.window
        out = []
        for n in range(lo, hi + 1):
            s = ch.sphere(self.field, n - 1)
            d = ch.disk(self.field, n)
            out.append(
                ChainMap(s, d, {n - 1: Matrix.identity(self.field, 1)})
            )
        return out

    def generating_acyclic_cofibrations(self) -> list[ChainMap]:
        """Disk inclusions 0 -> D^n for n in the window."""
        lo, hi = self.window
        return [
            ChainMap.zero_map(ChainComplex.zero(self.field), ch.disk(self.field, n))
            for n in range(lo, hi + 1)
        ]

    def factor(self, f: ChainMap, mode: str) -> tuple[ChainMap, ChainMap]:
        """Cylinder (cofibration, acyclic fibration) or disk-augmented
        (acyclic cofibration, fibration) factorization of f."""
        if mode == "cof-then-acyclicfib":
            cyl, i, r = ch.mapping_cylinder(f)
            return i, r
        if mode == "acycliccof-then-fib":
            p, q = ch.disk_cover(f.target)
            total, incs, projs = ch.direct_sum([f.source, p], self.field)
            j = incs[0]
            pr = ch.cotuple_map([f, q], projs)
            return j, pr
        raise ValueError(f"unknown factorization mode: {mode}")


class VectBase(MonoidalBase):
    """Finite-dimensional vector spaces, presented as complexes concentrated
    in degree zero; the degenerate model structure (weak equivalence =
    isomorphism, every map a fibration and a cofibration)."""

    def __init__(self, field: Field):
        self.field = field

    def __repr__(self):
        return f"VectBase({self.field!r})"

    def __eq__(self, other):
        return isinstance(other, VectBase) and self.field == other.field

    def __hash__(self):
        return hash(("VectBase", self.field))

    def check_object(self, v: ChainComplex) -> None:
        if any(n != 0 for n in v.dims):
            raise ValueError("vector-space objects live in degree 0 only")

    def space(self, dim: int) -> ChainComplex:
        return ch.sphere(self.field, 0, dim) if dim else ChainComplex.zero(self.field)

    def is_weak_equivalence(self, f: ChainMap) -> bool:
        return f.is_iso()

    def is_fibration(self, f: ChainMap) -> bool:
        return True

    def is_cofibration(self, f: ChainMap) -> bool:
        return True

    def generating_cofibrations(self) -> list[ChainMap]:
        return [
            ChainMap.zero_map(ChainComplex.zero(self.field), self.unit())
        ]

    def generating_acyclic_cofibrations(self) -> list[ChainMap]:
        return []

    def factor(self, f: ChainMap, mode: str) -> tuple[ChainMap, ChainMap]:
        if mode == "cof-then-acyclicfib":
            return f, ChainMap.identity(f.target)
        if mode == "acycliccof-then-fib":
            return ChainMap.identity(f.source), f
        raise ValueError(f"unknown factorization mode: {mode}")


# ---------------------------------------------------------------------------
# lifting problems
# ---------------------------------------------------------------------------


def lifting_system(
    i: ChainMap, p: ChainMap, top: ChainMap, bottom: ChainMap
) -> tuple[Matrix, Matrix, list[tuple[int, int, int]]]:
    """The affine system for a filler h: X -> E in the square

        A --top--> E
        |i         |p        with  p ∘ top = bottom ∘ i.
        X -bottom-> B

    Unknowns are the entries of the components h_n; equations enforce the
    chain-map property, h ∘ i = top, and p ∘ h = bottom.  Returns the
    coefficient matrix, right-hand side, and the unknown layout (n, rows,
    cols per degree block).
    """
    x = bottom.source
    e = p.source
    field = x.field
    if p.after(top) != bottom.after(i):
        raise ValueError("square does not commute")
    layout = []
    offset = {}
    total = 0
    for n in sorted(set(x.dims) | set(e.dims)):
        r, c = e.dim(n), x.dim(n)
        if r and c:
            layout.append((n, r, c))
            offset[n] = total
            total += r * c

    rows: list[list] = []
    rhs: list[list] = []

    def var_block(n):
        if n in offset:
            _, r, c = next(t for t in layout if t[0] == n)
            return offset[n], r, c
        return None

    def add_equation(coeffs: dict[int, Matrix], rhs_mat: Matrix):
        # coeffs maps degree n to a matrix K with: sum_n K_n vec(h_n) = vec(rhs)
        nrows = rhs_mat.nrows * rhs_mat.ncols
        block = [[field.zero] * total for _ in range(nrows)]
        for n, K in coeffs.items():
            vb = var_block(n)
            if vb is None:
                if not K.is_zero():
                    raise AssertionError("equation touches an absent unknown block")
                continue
            off, r, c = vb
            for a in range(K.nrows):
                for b in range(K.ncols):
                    v = K.rows[a][b]
                    if not field.is_zero(v):
                        block[a][off + b] = field.add(block[a][off + b], v)
        rows.extend(block)
        rhs.extend([[v] for row in rhs_mat.rows for v in row])

    # chain-map equations: d_E h_n - h_{n-1} d_X = 0
    for n in sorted(set(x.dims) | set(e.dims)):
        tgt_r = e.dim(n - 1)
        src_c = x.dim(n)
        if tgt_r == 0 or src_c == 0:
            continue
        coeffs = {}
        if e.dim(n) and x.dim(n):
            coeffs[n] = e.d(n).kron(Matrix.identity(field, src_c))
        if e.dim(n - 1) and x.dim(n - 1):
            coeffs[n - 1] = (
                Matrix.identity(field, tgt_r).kron(x.d(n).transpose()).neg()
            )
        if coeffs:
            add_equation(coeffs, Matrix.zero(field, tgt_r, src_c))

    # h ∘ i = top
    a = i.source
    for n in sorted(set(a.dims) | set(e.dims)):
        if e.dim(n) == 0 or a.dim(n) == 0:
            continue
        coeffs = {}
        if x.dim(n):
            coeffs[n] = Matrix.identity(field, e.dim(n)).kron(i.f(n).transpose())
        add_equation(coeffs, top.f(n))

    # p ∘ h = bottom
    b = p.target
    for n in sorted(set(x.dims) | set(b.dims)):
        if b.dim(n) == 0 or x.dim(n) == 0:
            continue
        coeffs = {}
        if e.dim(n):
            coeffs[n] = p.f(n).kron(Matrix.identity(field, x.dim(n)))
        add_equation(coeffs, bottom.f(n))

    if not rows:
        return Matrix.zero(field, 0, total), Matrix.zero(field, 0, 1), layout
    return (
        Matrix(field, len(rows), total, rows),
        Matrix(field, len(rhs), 1, rhs),
        layout,
    )


def solve_lifting(
    i: ChainMap, p: ChainMap, top: ChainMap, bottom: ChainMap
) -> Optional[ChainMap]:
    """An exact filler for the lifting square, or None when none exists."""
    x = bottom.source
    e = p.source
    field = x.field
    a_mat, b_mat, layout = lifting_system(i, p, top, bottom)
    sol = solve_affine(a_mat, b_mat)
    if sol is None:
        return None
    comps = {}
    off = 0
    for n, r, c in layout:
        flat = [sol.rows[off + k][0] for k in range(r * c)]
        comps[n] = Matrix(field, r, c, [flat[k * c : (k + 1) * c] for k in range(r)])
        off += r * c
    h = ChainMap(x, e, comps)
    if h.after(i) != top or p.after(h) != bottom:
        raise AssertionError("solver returned an invalid filler")
    return h


def lifting_solvable_by_rank(i, p, top, bottom) -> bool:
    """Independent solvability oracle: compare rank(A) with rank([A|b])."""
    a_mat, b_mat, _ = lifting_system(i, p, top, bottom)
    return rank(a_mat) == rank(a_mat.hstack(b_mat))


def pushout_product(i: ChainMap, j: ChainMap) -> ChainMap:
    """The corner map A⊗Y ∪_{A⊗B} X⊗B -> X⊗Y induced by i: A -> X and
    j: B -> Y."""
    a, x = i.source, i.target
    b, y = j.source, j.target
    left = ch.tensor_map(ChainMap.identity(a), j)  # A⊗B -> A⊗Y
    rightm = ch.tensor_map(i, ChainMap.identity(b))  # A⊗B -> X⊗B
    corner, inc_ay, inc_xb = ch.pushout(left, rightm)
    xy = ch.tensor(x, y)
    f1 = ch.tensor_map(i, ChainMap.identity(y))  # A⊗Y -> X⊗Y
    f2 = ch.tensor_map(ChainMap.identity(x), j)  # X⊗B -> X⊗Y
    # factor (f1, f2) through the pushout
    total, incs, projs = ch.direct_sum([ch.tensor(a, y), ch.tensor(x, b)], a.field)
    hmap = ch.cotuple_map([f1, f2], projs)
    qmap = ch.cotuple_map([inc_ay, inc_xb], projs)
    return ch.induced_on_quotient(qmap, hmap)
