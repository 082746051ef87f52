"""Transport of enrichment along a strong-monoidal left adjoint.

The concrete instance pairs finite-dimensional vector spaces with bounded
complexes: the left adjoint includes a space in degree 0 and the right
adjoint takes degree-0 cycles, so transported hom spaces are exactly the
spaces of chain maps.
"""

from __future__ import annotations

from .linalg import Matrix, kernel_basis, solve_affine
from . import chain as ch
from .chain import ChainComplex, ChainMap
from .base import MonoidalBase, ChainBase, VectBase
from .vcat import VCategory

__all__ = [
    "BaseChange",
    "IdentityChange",
    "DegreeZeroChange",
    "change_enrichment",
    "check_monoidal_quillen",
]


class BaseChange:
    """A strong symmetric monoidal left adjoint T: V -> W together with its
    lax symmetric monoidal right adjoint U, plus the comparison data the
    transport needs."""

    source: MonoidalBase  # V
    target: MonoidalBase  # W

    def T_ob(self, v: ChainComplex) -> ChainComplex:
        raise NotImplementedError

    def T_map(self, f: ChainMap) -> ChainMap:
        raise NotImplementedError

    def U_ob(self, w: ChainComplex) -> ChainComplex:
        raise NotImplementedError

    def U_map(self, f: ChainMap) -> ChainMap:
        raise NotImplementedError

    def unit_comparison(self) -> ChainMap:
        """I_V -> U(I_W)."""
        raise NotImplementedError

    def product_comparison(self, a: ChainComplex, b: ChainComplex) -> ChainMap:
        """U(a) ⊗ U(b) -> U(a ⊗ b)."""
        raise NotImplementedError

    def T_product_iso(self, v1: ChainComplex, v2: ChainComplex) -> ChainMap:
        """T(v1) ⊗ T(v2) -> T(v1 ⊗ v2), an isomorphism."""
        raise NotImplementedError

    def T_unit_iso(self) -> ChainMap:
        """T(I_V) -> I_W, an isomorphism (checked by callers)."""
        raise NotImplementedError

    def adjoint(self, f: ChainMap) -> ChainMap:
        """Turn T(v) -> w into v -> U(w)."""
        raise NotImplementedError

    def unadjoint(self, g: ChainMap, w: ChainComplex) -> ChainMap:
        """Turn v -> U(w) into T(v) -> w."""
        raise NotImplementedError


class IdentityChange(BaseChange):
    def __init__(self, base: MonoidalBase):
        self.source = base
        self.target = base

    def T_ob(self, v):
        return v

    def T_map(self, f):
        return f

    def U_ob(self, w):
        return w

    def U_map(self, f):
        return f

    def unit_comparison(self):
        return ChainMap.identity(ChainComplex.unit(self.source.field))

    def product_comparison(self, a, b):
        return ChainMap.identity(ch.tensor(a, b))

    def T_product_iso(self, v1, v2):
        return ChainMap.identity(ch.tensor(v1, v2))

    def T_unit_iso(self):
        return ChainMap.identity(ChainComplex.unit(self.source.field))

    def adjoint(self, f):
        return f

    def unadjoint(self, g, w):
        return g


class DegreeZeroChange(BaseChange):
    """T includes a vector space as a complex in degree 0; U takes degree-0
    cycles.  U(hom(V, W)) is then the space of chain maps V -> W."""

    def __init__(self, vect: VectBase, chk: ChainBase):
        if vect.field != chk.field:
            raise ValueError("field mismatch")
        self.source = vect
        self.target = chk
        self.field = vect.field

    def cycle_basis(self, w: ChainComplex) -> Matrix:
        """The chosen basis of degree-0 cycles, as columns in W_0."""
        if w.dim(0) == 0:
            return Matrix.zero(self.field, 0, 0)
        return kernel_basis(w.d(0))

    def cycle_inclusion(self, w: ChainComplex) -> ChainMap:
        """U(w) -> w, the degree-0 chain map picking out the cycles."""
        k = self.cycle_basis(w)
        return ChainMap(self.U_ob(w), w, {0: k} if k.ncols else {})

    def T_ob(self, v):
        self.source.check_object(v)
        return v

    def T_map(self, f):
        return f

    def U_ob(self, w):
        k = self.cycle_basis(w)
        return ch.sphere(self.field, 0, k.ncols) if k.ncols else ChainComplex.zero(self.field)

    def U_map(self, f):
        ks = self.cycle_basis(f.source)
        kt = self.cycle_basis(f.target)
        if ks.ncols == 0 or kt.ncols == 0:
            return ChainMap.zero_map(self.U_ob(f.source), self.U_ob(f.target))
        sol = solve_affine(kt, f.f(0).mul(ks))
        if sol is None:
            raise AssertionError("chain map does not preserve cycles")
        return ChainMap(self.U_ob(f.source), self.U_ob(f.target), {0: sol})

    def unit_comparison(self):
        return ChainMap.identity(ChainComplex.unit(self.field))

    def product_comparison(self, a, b):
        ka, kb = self.cycle_basis(a), self.cycle_basis(b)
        src = ch.tensor(self.U_ob(a), self.U_ob(b))
        tgt = self.U_ob(ch.tensor(a, b))
        if src.dim(0) == 0 or tgt.dim(0) == 0:
            return ChainMap.zero_map(src, tgt)
        ab = ch.tensor(a, b)
        basis = ch.tensor_basis(a, b, 0)
        pos = {t: i for i, t in enumerate(basis)}
        cols = []
        for i in range(ka.ncols):
            for j in range(kb.ncols):
                vec = [self.field.zero] * len(basis)
                for (degs, idxs), row in pos.items():
                    if degs == (0, 0):
                        vec[row] = self.field.mul(
                            ka.rows[idxs[0]][i], kb.rows[idxs[1]][j]
                        )
                cols.append(vec)
        prod = Matrix(
            self.field, len(basis), len(cols), [[c[r] for c in cols] for r in range(len(basis))]
        )
        kab = self.cycle_basis(ab)
        sol = solve_affine(kab, prod)
        if sol is None:
            raise AssertionError("product of cycles is not a cycle")
        return ChainMap(src, tgt, {0: sol})

    def T_product_iso(self, v1, v2):
        return ChainMap.identity(ch.tensor(v1, v2))

    def T_unit_iso(self):
        return ChainMap.identity(ChainComplex.unit(self.field))

    def adjoint(self, f):
        v = f.source
        k = self.cycle_basis(f.target)
        u = self.U_ob(f.target)
        if v.dim(0) == 0 or k.ncols == 0:
            return ChainMap.zero_map(v, u)
        sol = solve_affine(k, f.f(0))
        if sol is None:
            raise AssertionError("image of a degree-0 map is not in the cycles")
        return ChainMap(v, u, {0: sol})

    def unadjoint(self, g, w):
        k = self.cycle_basis(w)
        comp = k.mul(g.f(0)) if g.source.dim(0) else None
        return ChainMap(
            g.source, w, {0: comp} if comp is not None else {}
        )


def change_enrichment(n: VCategory, bc: BaseChange) -> VCategory:
    """Transport a category enriched in bc.target to one enriched in
    bc.source, hom objects U(hom), structure through the lax comparisons."""
    hom = {}
    comp = {}
    unit = {}
    for a in n.objects:
        for b in n.objects:
            hom[(a, b)] = bc.U_ob(n.hom[(a, b)])
    for a in n.objects:
        for b in n.objects:
            for c in n.objects:
                cmp_ = bc.product_comparison(n.hom[(b, c)], n.hom[(a, b)])
                comp[(a, b, c)] = bc.U_map(n.mu(a, b, c)).after(cmp_)
        unit[a] = bc.U_map(n.eta(a)).after(bc.unit_comparison())
    return VCategory(bc.source, n.objects, hom, comp, unit)


def check_monoidal_quillen(
    bc: BaseChange, samples: list, qi_map: ChainMap
) -> list[str]:
    """Data check for a monoidal Quillen pair: T strong monoidal on samples
    and T of the cofibrant-approximation map a weak equivalence."""
    report = []
    if not bc.T_unit_iso().is_iso():
        report.append("T does not preserve the unit up to isomorphism")
    for v1, v2 in samples:
        if not bc.T_product_iso(v1, v2).is_iso():
            report.append("T product comparison is not an isomorphism")
            break
    tq = bc.T_map(qi_map)
    if not bc.target.is_weak_equivalence(tq):
        report.append("T of the unit approximation is not a weak equivalence")
    return report
