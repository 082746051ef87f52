"""Comparison machinery between a presheaf category on a chosen full
subcategory and its ambient category: the restricted-Yoneda adjunction
with explicit unit/counit, detection predicates, bimodules and
quasi-equivalences with the pullback-category zigzag, and a desk-scale
Morita demonstration.

The ambient category is always a presheaf category over a small enriched
category, so every hom object, tensor, and (co)limit is computable.
"""

from __future__ import annotations

import random
from typing import Optional

from .linalg import Matrix, rank
from . import chain as ch
from .chain import ChainComplex, ChainMap
from .vcat import VCategory, VFunctor, check_category_axioms, check_functor_axioms
from . import presheaf as ps
from .presheaf import Presheaf, PresheafMap, PresheafHom

__all__ = [
    "FullSubcategoryData",
    "full_embedding",
    "presheaf_end_category",
    "restricted_yoneda",
    "restricted_yoneda_map",
    "Extension",
    "extension",
    "adjunction_forward",
    "adjunction_backward",
    "unit_map",
    "counit_map",
    "free_extension_iso",
    "unit_eta",
    "is_domain_equivalence",
    "is_domain_fibration",
    "reflecting_set_check",
    "hom_invariance_check",
    "Bimodule",
    "QuasiEquivalence",
    "check_bimodule",
    "check_quasi_equivalence",
    "pullback_category",
    "endomorphism_category",
    "zigzag_build",
    "quasi_equiv_from_pairs",
    "tensored_adjoint_check",
    "morita_demo",
    "MoritaReport",
]


class FullSubcategoryData:
    """A chosen family of presheaves M_d over the ambient domain, with the
    induced hom category and the comparison functor data.

    When built by :func:`full_embedding` the hom objects literally are the
    enriched presheaf homs and ``delta`` maps are identities.
    """

    def __init__(
        self,
        ambient: VCategory,
        objects: dict,
        dcat: VCategory,
        delta: dict,
        homs: Optional[dict] = None,
    ):
        self.ambient = ambient
        self.objects = dict(objects)
        self.dcat = dcat
        self.delta = dict(delta)
        self.homs = homs or {}

    def hom_pair(self, d, e) -> PresheafHom:
        key = (d, e)
        if key not in self.homs:
            self.homs[key] = ps.presheaf_hom(self.objects[d], self.objects[e])
        return self.homs[key]


def presheaf_end_category(ambient: VCategory, objects: dict) -> tuple[VCategory, dict]:
    """The full subcategory of presheaves on the ambient domain spanned by
    the named objects; also returns the PresheafHom bookkeeping."""
    labels = sorted(objects)
    homs = {}
    hom_obj = {}
    for a in labels:
        for b in labels:
            homs[(a, b)] = ps.presheaf_hom(objects[a], objects[b])
            hom_obj[(a, b)] = homs[(a, b)].complex
    comp = {}
    unit = {}
    for a in labels:
        for b in labels:
            for c in labels:
                comp[(a, b, c)] = _hom_composition_cached(
                    homs, objects, a, b, c
                )
        unit[a] = ps.presheaf_map_to_element(PresheafMap.identity(objects[a]))
    cat = VCategory(ambient.base, labels, hom_obj, comp, unit)
    return cat, homs


def _hom_composition_cached(homs: dict, objects: dict, a, b, c) -> ChainMap:
    hyz = homs[(b, c)]
    hxy = homs[(a, b)]
    hxz = homs[(a, c)]
    total = None
    for d in objects[a].domain.objects:
        comp_d = ch.hom_compose(
            objects[a].levels[d], objects[b].levels[d], objects[c].levels[d]
        )
        piece = hxz._inc[d].after(comp_d).after(
            ch.tensor_map(hyz.project(d), hxy.project(d))
        )
        total = piece if total is None else total.add(piece)
    return hxz.factor(total)


def full_embedding(ambient: VCategory, objects: dict) -> FullSubcategoryData:
    dcat, homs = presheaf_end_category(ambient, objects)
    delta = {
        (a, b): ChainMap.identity(dcat.hom[(a, b)])
        for a in dcat.objects
        for b in dcat.objects
    }
    return FullSubcategoryData(ambient, objects, dcat, delta, homs)


def endomorphism_category(ambient: VCategory, objects: dict) -> VCategory:
    return presheaf_end_category(ambient, objects)[0]


# ---------------------------------------------------------------------------
# the restricted Yoneda functor and its left adjoint
# ---------------------------------------------------------------------------


def _delta_level_action(sub: FullSubcategoryData, d, e, level) -> ChainMap:
    """hom_D(d,e) ⊗ (M_d)_level -> (M_e)_level, the uncurried comparison."""
    he = sub.hom_pair(d, e)
    md, me = sub.objects[d], sub.objects[e]
    proj = he.project(level).after(sub.delta[(d, e)])
    return ch.eval_map(md.levels[level], me.levels[level]).after(
        ch.tensor_map(proj, ChainMap.identity(md.levels[level]))
    )


def restricted_yoneda(sub: FullSubcategoryData, m: Presheaf) -> Presheaf:
    """U(m): the presheaf d -> hom(M_d, m) on the chosen category."""
    dcat = sub.dcat
    hom_pairs = {d: ps.presheaf_hom(sub.objects[d], m) for d in dcat.objects}
    levels = {d: hom_pairs[d].complex for d in dcat.objects}
    actions = {}
    for d in dcat.objects:
        for e in dcat.objects:
            # hom(M_e, m) ⊗ D(d,e) -> hom(M_d, m)
            he = hom_pairs[e]
            hd = hom_pairs[d]
            dpair = sub.hom_pair(d, e)
            total = None
            for lev in sub.ambient.objects:
                compose_lev = ch.hom_compose(
                    sub.objects[d].levels[lev], sub.objects[e].levels[lev], m.levels[lev]
                )
                piece = hd._inc[lev].after(compose_lev).after(
                    ch.tensor_map(
                        he.project(lev),
                        dpair.project(lev).after(sub.delta[(d, e)]),
                    )
                )
                total = piece if total is None else total.add(piece)
            into = hd.factor(total)
            actions[(d, e)] = into
    return Presheaf(dcat, levels, actions)


def restricted_yoneda_map(sub: FullSubcategoryData, f: PresheafMap) -> PresheafMap:
    """U on morphisms: postcomposition on every hom object."""
    um = restricted_yoneda(sub, f.source)
    un = restricted_yoneda(sub, f.target)
    dcat = sub.dcat
    comps = {}
    for d in dcat.objects:
        hs = ps.presheaf_hom(sub.objects[d], f.source)
        ht = ps.presheaf_hom(sub.objects[d], f.target)
        total = None
        for lev in sub.ambient.objects:
            piece = ht._inc[lev].after(
                ch.hom_postcompose(sub.objects[d].levels[lev], f.at(lev))
            ).after(hs.project(lev))
            total = piece if total is None else total.add(piece)
        comps[d] = ht.factor(total)
    return PresheafMap(um, un, comps)


class Extension:
    """T(x) = x ⊗_D delta, computed as a levelwise coequalizer over the
    ambient domain, with the generator inclusions retained."""

    def __init__(self, sub: FullSubcategoryData, x: Presheaf):
        self.sub = sub
        self.x = x
        dcat = sub.dcat
        amb = sub.ambient
        field = amb.base.field
        levels = {}
        self._incs = {}
        self._projections = {}
        self._sums = {}
        for lev in amb.objects:
            bparts = [
                ch.tensor(x.levels[d], sub.objects[d].levels[lev])
                for d in dcat.objects
            ]
            bsum, bincs, bprojs = ch.direct_sum(bparts, field)
            objindex = {d: k for k, d in enumerate(dcat.objects)}
            aparts = []
            akeys = []
            for d in dcat.objects:
                for d2 in dcat.objects:
                    aparts.append(
                        ch.tensor(
                            ch.tensor(x.levels[d2], dcat.hom[(d, d2)]),
                            sub.objects[d].levels[lev],
                        )
                    )
                    akeys.append((d, d2))
            atotal, aincs, aprojs = ch.direct_sum(aparts, field)
            m1 = None
            m2 = None
            for k, (d, d2) in enumerate(akeys):
                xd2 = x.levels[d2]
                hdd = dcat.hom[(d, d2)]
                mdl = sub.objects[d].levels[lev]
                p1 = bincs[objindex[d]].after(
                    ch.tensor_map(x.action(d, d2), ChainMap.identity(mdl))
                ).after(aprojs[k])
                lam = _delta_level_action(sub, d, d2, lev)
                p2 = bincs[objindex[d2]].after(
                    ch.tensor_map(ChainMap.identity(xd2), lam).after(
                        ch.associator(xd2, hdd, mdl)
                    )
                ).after(aprojs[k])
                m1 = p1 if m1 is None else m1.add(p1)
                m2 = p2 if m2 is None else m2.add(p2)
            if m1 is None:
                q, qmap = bsum, ChainMap.identity(bsum)
            else:
                q, qmap = ch.coequalizer(m1, m2)
            levels[lev] = q
            self._incs[lev] = {d: qmap.after(bincs[objindex[d]]) for d in dcat.objects}
            self._projections[lev] = qmap
            self._sums[lev] = (bsum, bincs, bprojs, bparts)
        actions = {}
        for lev in amb.objects:
            for lev2 in amb.objects:
                hee = amb.hom[(lev, lev2)]
                bsum2, bincs2, bprojs2, bparts2 = self._sums[lev2]
                dist = ch.distributor(bparts2, hee, field)
                pieces = []
                _, _, piece_projs = ch.direct_sum(
                    [ch.tensor(s, hee) for s in bparts2], field
                )
                for k, d in enumerate(dcat.objects):
                    xd = x.levels[d]
                    mdl2 = sub.objects[d].levels[lev2]
                    a1 = ch.associator(xd, mdl2, hee)
                    a2 = ch.tensor_map(
                        ChainMap.identity(xd), sub.objects[d].action(lev, lev2)
                    )
                    pieces.append(self._incs[lev][d].after(a2).after(a1))
                glued = ch.cotuple_map(pieces, piece_projs)
                g_on_sum = glued.after(ch.inverse_map(dist))
                qten = ch.tensor_map(self._projections[lev2], ChainMap.identity(hee))
                actions[(lev, lev2)] = ch.induced_on_quotient(qten, g_on_sum)
        self.presheaf = Presheaf(amb, levels, actions)

    def include(self, d, lev) -> ChainMap:
        return self._incs[lev][d]


def extension(sub: FullSubcategoryData, x: Presheaf) -> Extension:
    return Extension(sub, x)


def adjunction_forward(sub: FullSubcategoryData, ext: Extension, g: PresheafMap) -> PresheafMap:
    """Maps(T x, m) -> Maps(x, U m)."""
    x = ext.x
    m = g.target
    um = restricted_yoneda(sub, m)
    dcat = sub.dcat
    comps = {}
    for d in dcat.objects:
        hom_pair = ps.presheaf_hom(sub.objects[d], m)
        pieces = {}
        for lev in sub.ambient.objects:
            mdl = sub.objects[d].levels[lev]
            piece = g.at(lev).after(ext.include(d, lev))
            pieces[lev] = ch.curry(piece, x.levels[d], mdl)
        comps[d] = hom_pair.pack(pieces)
    return PresheafMap(x, um, comps)


def adjunction_backward(
    sub: FullSubcategoryData, ext: Extension, m: Presheaf, f: PresheafMap
) -> PresheafMap:
    """Maps(x, U m) -> Maps(T x, m)."""
    x = ext.x
    dcat = sub.dcat
    comps = {}
    for lev in sub.ambient.objects:
        bsum, bincs, bprojs, bparts = ext._sums[lev]
        pieces = []
        for d in dcat.objects:
            hom_pair = ps.presheaf_hom(sub.objects[d], m)
            mdl = sub.objects[d].levels[lev]
            step = ch.eval_map(mdl, m.levels[lev]).after(
                ch.tensor_map(
                    hom_pair.project(lev).after(f.at(d)), ChainMap.identity(mdl)
                )
            )
            pieces.append(step)
        glued = ch.cotuple_map(pieces, bprojs)
        comps[lev] = ch.induced_on_quotient(ext._projections[lev], glued)
    return PresheafMap(ext.presheaf, m, comps)


def unit_map(sub: FullSubcategoryData, x: Presheaf) -> PresheafMap:
    ext = Extension(sub, x)
    return adjunction_forward(sub, ext, PresheafMap.identity(ext.presheaf))


def counit_map(sub: FullSubcategoryData, d: str) -> tuple[Extension, PresheafMap]:
    """epsilon at the object d: T(Y(d)) -> M_d."""
    yd = ps.yoneda(sub.dcat, d)
    ext = Extension(sub, yd)
    um = restricted_yoneda(sub, sub.objects[d])
    # the canonical Y(d) -> U(M_d) is the comparison map at every level
    comps = {e: sub.delta[(e, d)] for e in sub.dcat.objects}
    to_um = PresheafMap(yd, um, comps)
    eps = adjunction_backward(sub, ext, sub.objects[d], to_um)
    return ext, eps


def free_extension_iso(
    sub: FullSubcategoryData, d: str, v: ChainComplex
) -> tuple[Extension, PresheafMap, PresheafMap]:
    """T(F_d v) ≅ M_d ⊙ v, with both inverse maps exhibited exactly."""
    dcat = sub.dcat
    fdv = ps.free_presheaf(dcat, d, v)
    ext = Extension(sub, fdv)
    target = ps.presheaf_tensor(sub.objects[d], v)
    amb = sub.ambient
    field = amb.base.field
    fwd_comps = {}
    for lev in amb.objects:
        bsum, bincs, bprojs, bparts = ext._sums[lev]
        pieces = []
        for d2 in dcat.objects:
            vd = ch.tensor(v, dcat.hom[(d2, d)])
            md2l = sub.objects[d2].levels[lev]
            lam = _delta_level_action(sub, d2, d, lev)
            step = (
                ch.symmetry(v, sub.objects[d].levels[lev])
                .after(ch.tensor_map(ChainMap.identity(v), lam))
                .after(ch.associator(v, dcat.hom[(d2, d)], md2l))
            )
            pieces.append(step)
        glued = ch.cotuple_map(pieces, bprojs)
        fwd_comps[lev] = ch.induced_on_quotient(ext._projections[lev], glued)
    fwd = PresheafMap(ext.presheaf, target, fwd_comps)
    back_comps = {}
    for lev in amb.objects:
        mdl = sub.objects[d].levels[lev]
        ins = ch.tensor_map(ChainMap.identity(v), dcat.eta(d)).after(
            ch.inverse_map(ch.right_unitor(v))
        )
        step = ext.include(d, lev).after(
            ch.tensor_map(ins, ChainMap.identity(mdl))
        ).after(ch.symmetry(mdl, v))
        back_comps[lev] = step
    back = PresheafMap(target, ext.presheaf, back_comps)
    return ext, fwd, back


def unit_eta(sub: FullSubcategoryData, d: str, v: ChainComplex) -> dict:
    """The unit on F_d v, levelwise: v ⊗ D(e,d) -> hom(M_e, M_d ⊙ v),
    as the comparison map followed by the tensor interchange."""
    dcat = sub.dcat
    out = {}
    mdv = ps.presheaf_tensor(sub.objects[d], v)
    for e in dcat.objects:
        om = ps.omega_presheaf(sub.objects[e], sub.objects[d], v)
        step = om.after(
            ch.tensor_map(sub.delta[(e, d)], ChainMap.identity(v))
        ).after(ch.symmetry(v, dcat.hom[(e, d)]))
        out[e] = step
    return out


# ---------------------------------------------------------------------------
# detection predicates
# ---------------------------------------------------------------------------


def is_domain_equivalence(sub: FullSubcategoryData, f: PresheafMap) -> bool:
    return ps.is_level_weak_equivalence(restricted_yoneda_map(sub, f))


def is_domain_fibration(sub: FullSubcategoryData, f: PresheafMap) -> bool:
    return ps.is_level_fibration(restricted_yoneda_map(sub, f))


def reflecting_set_check(sub: FullSubcategoryData, samples: list) -> list[dict]:
    """For each sampled ambient map: does U detect its weak-equivalence
    status?  Violations are maps U sees as equivalences that are not."""
    out = []
    for name, f in samples:
        uf_weq = is_domain_equivalence(sub, f)
        f_weq = ps.is_level_weak_equivalence(f)
        out.append(
            {
                "map": name,
                "detected": uf_weq,
                "actual": f_weq,
                "violation": bool(uf_weq and not f_weq),
            }
        )
    return out


def hom_invariance_check(
    m: Presheaf,
    m2: Presheaf,
    n: Presheaf,
    n2: Presheaf,
    zeta: PresheafMap,
    xi: PresheafMap,
    m_cofibrant: bool = True,
    m2_cofibrant: bool = True,
) -> dict:
    """Weak invariance of enriched homs: precomposition with zeta and
    postcomposition with xi are quasi-isomorphisms.  Skipped with a warning
    when cofibrancy is not certified."""
    base = m.domain.base
    if not (m_cofibrant and m2_cofibrant):
        return {"skipped": True, "reason": "source objects lack cofibrancy certificates"}
    hm2n = ps.presheaf_hom(m2, n)
    hmn = ps.presheaf_hom(m, n)
    total = None
    for lev in m.domain.objects:
        piece = hmn._inc[lev].after(
            ch.hom_precompose(zeta.at(lev), n.levels[lev])
        ).after(hm2n.project(lev))
        total = piece if total is None else total.add(piece)
    zeta_star = hmn.factor(total)
    hmn2 = ps.presheaf_hom(m, n2)
    total = None
    for lev in m.domain.objects:
        piece = hmn2._inc[lev].after(
            ch.hom_postcompose(m.levels[lev], xi.at(lev))
        ).after(hmn.project(lev))
        total = piece if total is None else total.add(piece)
    xi_star = hmn2.factor(total)
    return {
        "skipped": False,
        "precomposition_weq": base.is_weak_equivalence(zeta_star),
        "postcomposition_weq": base.is_weak_equivalence(xi_star),
    }


# ---------------------------------------------------------------------------
# bimodules and quasi-equivalences
# ---------------------------------------------------------------------------


class Bimodule:
    """hom[(x,y)] carries a left action of ``left`` in the y slot and a
    right action of ``right`` in the x slot; both categories share the
    object set.

    left_action[(x,d,e)]: left.hom(d,e) ⊗ F(x,d) -> F(x,e)
    right_action[(x,y,e)]: F(y,e) ⊗ right.hom(x,y) -> F(x,e)
    """

    def __init__(self, left: VCategory, right: VCategory, hom: dict, left_action: dict, right_action: dict):
        if left.objects != right.objects:
            raise ValueError("bimodule categories must share objects")
        self.left = left
        self.right = right
        self.objects = left.objects
        self.hom = dict(hom)
        self.left_action = dict(left_action)
        self.right_action = dict(right_action)


def check_bimodule(b: Bimodule) -> list[str]:
    report = []
    O = b.objects
    L, R = b.left, b.right
    for x in O:
        for c in O:
            for d in O:
                for e in O:
                    lde = L.hom[(d, e)]
                    lcd = L.hom[(c, d)]
                    fxc = b.hom[(x, c)]
                    way1 = b.left_action[(x, c, e)].after(
                        ch.tensor_map(L.mu(c, d, e), ChainMap.identity(fxc))
                    )
                    way2 = (
                        b.left_action[(x, d, e)]
                        .after(ch.tensor_map(ChainMap.identity(lde), b.left_action[(x, c, d)]))
                        .after(ch.associator(lde, lcd, fxc))
                    )
                    if way1 != way2:
                        report.append(f"left associativity fails at ({x};{c},{d},{e})")
    for x in O:
        for y in O:
            for d in O:
                for e in O:
                    lde = L.hom[(d, e)]
                    fyd = b.hom[(y, d)]
                    rxy = R.hom[(x, y)]
                    way1 = b.right_action[(x, y, e)].after(
                        ch.tensor_map(b.left_action[(y, d, e)], ChainMap.identity(rxy))
                    )
                    way2 = (
                        b.left_action[(x, d, e)]
                        .after(ch.tensor_map(ChainMap.identity(lde), b.right_action[(x, y, d)]))
                        .after(ch.associator(lde, fyd, rxy))
                    )
                    if way1 != way2:
                        report.append(f"middle compatibility fails at ({x},{y};{d},{e})")
    for x in O:
        for y in O:
            for z in O:
                for e in O:
                    fze = b.hom[(z, e)]
                    ryz = R.hom[(y, z)]
                    rxy = R.hom[(x, y)]
                    way1 = b.right_action[(x, y, e)].after(
                        ch.tensor_map(b.right_action[(y, z, e)], ChainMap.identity(rxy))
                    )
                    way2 = (
                        b.right_action[(x, z, e)]
                        .after(ch.tensor_map(ChainMap.identity(fze), R.mu(x, y, z)))
                        .after(ch.associator(fze, ryz, rxy))
                    )
                    if way1 != way2:
                        report.append(f"right associativity fails at ({x},{y},{z};{e})")
    for x in O:
        for d in O:
            fxd = b.hom[(x, d)]
            lhs = b.left_action[(x, d, d)].after(
                ch.tensor_map(L.eta(d), ChainMap.identity(fxd))
            ).after(ch.inverse_map(ch.left_unitor(fxd)))
            if lhs != ChainMap.identity(fxd):
                report.append(f"left unit fails at ({x},{d})")
            rhs = b.right_action[(x, x, d)].after(
                ch.tensor_map(ChainMap.identity(fxd), R.eta(x))
            ).after(ch.inverse_map(ch.right_unitor(fxd)))
            if rhs != ChainMap.identity(fxd):
                report.append(f"right unit fails at ({x},{d})")
    return report


class QuasiEquivalence:
    """A bimodule with chosen unit elements zeta_d: I -> F(d,d)."""

    def __init__(self, bimodule: Bimodule, zeta: dict):
        self.bimodule = bimodule
        self.zeta = dict(zeta)

    def zeta_upper(self, d, e) -> ChainMap:
        """(zeta_d)^*: left.hom(d,e) -> F(d,e)."""
        b = self.bimodule
        lde = b.left.hom[(d, e)]
        return b.left_action[(d, d, e)].after(
            ch.tensor_map(ChainMap.identity(lde), self.zeta[d])
        ).after(ch.inverse_map(ch.right_unitor(lde)))

    def zeta_lower(self, d, e) -> ChainMap:
        """(zeta_e)_*: right.hom(d,e) -> F(d,e)."""
        b = self.bimodule
        rde = b.right.hom[(d, e)]
        return b.right_action[(d, e, e)].after(
            ch.tensor_map(self.zeta[e], ChainMap.identity(rde))
        ).after(ch.inverse_map(ch.left_unitor(rde)))


def check_qweak_maps(qe: QuasiEquivalence) -> list[str]:
    """Only the two families of unit-induced comparison maps."""
    report = []
    base = qe.bimodule.left.base
    for d in qe.bimodule.objects:
        for e in qe.bimodule.objects:
            if not base.is_weak_equivalence(qe.zeta_upper(d, e)):
                report.append(f"(zeta_{d})^* is not a weak equivalence at ({d},{e})")
            if not base.is_weak_equivalence(qe.zeta_lower(d, e)):
                report.append(f"(zeta_{e})_* is not a weak equivalence at ({d},{e})")
    return report


def check_quasi_equivalence(qe: QuasiEquivalence) -> list[str]:
    return check_bimodule(qe.bimodule) + check_qweak_maps(qe)


def pullback_category(qe: QuasiEquivalence) -> tuple[VCategory, VFunctor, VFunctor]:
    """Hom objects are the pullbacks of the two comparison maps; units and
    composition are induced through the pullback inclusions."""
    b = qe.bimodule
    L, R = b.left, b.right
    base = L.base
    field = base.field
    hom = {}
    legsL = {}
    legsR = {}
    incs = {}
    for d in b.objects:
        for e in b.objects:
            p, legl, legr = ch.pullback(qe.zeta_upper(d, e), qe.zeta_lower(d, e))
            hom[(d, e)] = p
            legsL[(d, e)] = legl
            legsR[(d, e)] = legr
            sumle, sincs, _ = ch.direct_sum(
                [L.hom[(d, e)], R.hom[(d, e)]], field
            )
            incs[(d, e)] = sincs[0].after(legl).add(sincs[1].after(legr))
    comp = {}
    unit = {}
    for a in b.objects:
        for c in b.objects:
            for e in b.objects:
                u = L.mu(a, c, e).after(ch.tensor_map(legsL[(c, e)], legsL[(a, c)]))
                v = R.mu(a, c, e).after(ch.tensor_map(legsR[(c, e)], legsR[(a, c)]))
                sumle, sincs, _ = ch.direct_sum(
                    [L.hom[(a, e)], R.hom[(a, e)]], field
                )
                pair = sincs[0].after(u).add(sincs[1].after(v))
                try:
                    comp[(a, c, e)] = ch.induced_on_subobject(incs[(a, e)], pair)
                except ValueError:
                    raise ValueError(
                        f"induced composition not defined at ({a},{c},{e})"
                    )
    for a in b.objects:
        sumle, sincs, _ = ch.direct_sum([L.hom[(a, a)], R.hom[(a, a)]], field)
        pair = sincs[0].after(L.eta(a)).add(sincs[1].after(R.eta(a)))
        unit[a] = ch.induced_on_subobject(incs[(a, a)], pair)
    g = VCategory(base, b.objects, hom, comp, unit)
    to_left = VFunctor(g, L, {o: o for o in b.objects}, legsL)
    to_right = VFunctor(g, R, {o: o for o in b.objects}, legsR)
    return g, to_left, to_right


def functor_is_weak_equivalence(F: VFunctor) -> bool:
    """Weakly full and faithful (hom-level quasi-isos) and identity-on-objects
    essential surjectivity."""
    base = F.source.base
    if sorted(set(F.ob_map.values())) != sorted(F.target.objects):
        return False
    return all(
        base.is_weak_equivalence(F.on(a, b))
        for a in F.source.objects
        for b in F.source.objects
    )


# ---------------------------------------------------------------------------
# the zigzag between quasi-equivalent categories
# ---------------------------------------------------------------------------


class ZigzagResult:
    def __init__(self, categories, functors, verdicts, details):
        self.categories = categories
        self.functors = functors
        self.verdicts = verdicts
        self.details = details

    def all_weak_equivalences(self) -> bool:
        return all(self.verdicts.values())


def zigzag_build(qe: QuasiEquivalence, verify_input: bool = True) -> ZigzagResult:
    """The five-term chain of categories connecting the two sides of a
    quasi-equivalence, with every comparison functor checked to be a
    hom-level quasi-isomorphism."""
    b = qe.bimodule
    dcat = b.left
    ecat = b.right
    details: dict = {}
    if verify_input:
        rep = check_quasi_equivalence(qe)
        details["input"] = rep
        if rep:
            raise ValueError("input is not a quasi-equivalence: " + "; ".join(rep))

    # the bimodule as a family of presheaves over the right-hand category
    fpre = {}
    for e in b.objects:
        levels = {d: b.hom[(d, e)] for d in b.objects}
        actions = {
            (d, d2): b.right_action[(d, d2, e)] for d in b.objects for d2 in b.objects
        }
        fpre[e] = Presheaf(ecat, levels, actions)

    yon = {e: ps.yoneda(ecat, e) for e in b.objects}
    theta = {
        e: PresheafMap(yon[e], fpre[e], {d: qe.zeta_lower(d, e) for d in b.objects})
        for e in b.objects
    }

    # factor theta as an acyclic cofibration followed by a fibration
    xpre = {}
    iota = {}
    rho = {}
    for e in b.objects:
        cover, q = ps.acyclic_cover(fpre[e])
        total, incs, projs = ps.presheaf_sum([yon[e], cover], ecat)
        xpre[e] = total
        iota[e] = incs[0]
        rho[e] = ps.presheaf_cotuple([theta[e], q], projs)

    end_cat, end_pairs = presheaf_end_category(ecat, {e: xpre[e] for e in b.objects})
    yon_pairs = {
        (x, y): ps.presheaf_hom(yon[x], yon[y]) for x in b.objects for y in b.objects
    }

    # Y-bimodule between End(X) (left) and the right-hand category
    ypairs = {
        (x, e): ps.presheaf_hom(yon[x], xpre[e]) for x in b.objects for e in b.objects
    }
    yhom = {k: v.complex for k, v in ypairs.items()}
    y_left = {}
    y_right = {}
    for x in b.objects:
        for d in b.objects:
            for e in b.objects:
                y_left[(x, d, e)] = ps.compose_hom_pairs(
                    end_pairs[(d, e)], ypairs[(x, d)], ypairs[(x, e)]
                )
    for x in b.objects:
        for y in b.objects:
            for e in b.objects:
                yhm = ps.yoneda_hom_map(ecat, x, y, yon_pairs[(x, y)])
                comp = ps.compose_hom_pairs(
                    ypairs[(y, e)], yon_pairs[(x, y)], ypairs[(x, e)]
                )
                y_right[(x, y, e)] = comp.after(
                    ch.tensor_map(ChainMap.identity(yhom[(y, e)]), yhm)
                )
    ybim = Bimodule(end_cat, ecat, yhom, y_left, y_right)
    iota_el = {e: ps.presheaf_map_to_element(iota[e]) for e in b.objects}
    yqe = QuasiEquivalence(ybim, iota_el)

    # Z-bimodule between the left-hand category and End(X)
    fpre_pairs = {
        (e, f): ps.presheaf_hom(fpre[e], fpre[f]) for e in b.objects for f in b.objects
    }
    zpairs = {
        (x, e): ps.presheaf_hom(xpre[x], fpre[e]) for x in b.objects for e in b.objects
    }
    zhom = {k: v.complex for k, v in zpairs.items()}
    z_left = {}
    z_right = {}
    fmap = {}
    for e in b.objects:
        for f in b.objects:
            pieces = {
                d: ch.curry(
                    b.left_action[(d, e, f)], dcat.hom[(e, f)], b.hom[(d, e)]
                )
                for d in b.objects
            }
            fmap[(e, f)] = fpre_pairs[(e, f)].pack(pieces)
    for x in b.objects:
        for e in b.objects:
            for f in b.objects:
                comp = ps.compose_hom_pairs(
                    fpre_pairs[(e, f)], zpairs[(x, e)], zpairs[(x, f)]
                )
                z_left[(x, e, f)] = comp.after(
                    ch.tensor_map(fmap[(e, f)], ChainMap.identity(zhom[(x, e)]))
                )
    for x in b.objects:
        for y in b.objects:
            for e in b.objects:
                z_right[(x, y, e)] = ps.compose_hom_pairs(
                    zpairs[(y, e)], end_pairs[(x, y)], zpairs[(x, e)]
                )
    zbim = Bimodule(dcat, end_cat, zhom, z_left, z_right)
    rho_el = {e: ps.presheaf_map_to_element(rho[e]) for e in b.objects}
    zqe = QuasiEquivalence(zbim, rho_el)

    # the derived bimodules satisfy their axioms by construction (verified on
    # small instances in the test suite); here only the comparison maps are
    # re-checked, the cubic-size axiom tensors being out of desk reach
    details["y_comparison_maps"] = check_qweak_maps(yqe)
    details["z_comparison_maps"] = check_qweak_maps(zqe)
    if details["y_comparison_maps"] or details["z_comparison_maps"]:
        raise ValueError("derived comparison maps fail the weak-equivalence test")

    gy, gy_to_end, gy_to_e = pullback_category(yqe)
    gz, gz_to_d, gz_to_end = pullback_category(zqe)

    categories = {
        "right": ecat,
        "pullback_y": gy,
        "endomorphisms": end_cat,
        "pullback_z": gz,
        "left": dcat,
    }
    functors = [
        ("pullback_y->right", gy_to_e),
        ("pullback_y->endomorphisms", gy_to_end),
        ("pullback_z->endomorphisms", gz_to_end),
        ("pullback_z->left", gz_to_d),
    ]
    verdicts = {}
    for name, F in functors:
        verdicts[name] = functor_is_weak_equivalence(F)
        details[name + ":axioms"] = check_functor_axioms(F)
    return ZigzagResult(categories, functors, verdicts, details)


def quasi_equiv_from_pairs(
    ambient: VCategory, ms: dict, ns: dict, zeta: dict
) -> QuasiEquivalence:
    """The quasi-equivalence between the full subcategories spanned by two
    levelwise weakly equivalent object families, from hom invariance."""
    if sorted(ms) != sorted(ns):
        raise ValueError("object families must share labels")
    left_cat, left_pairs = presheaf_end_category(ambient, ns)
    right_cat, right_pairs = presheaf_end_category(ambient, ms)
    fpairs = {
        (x, e): ps.presheaf_hom(ms[x], ns[e]) for x in ms for e in ns
    }
    hom = {k: v.complex for k, v in fpairs.items()}
    left_action = {}
    right_action = {}
    for x in ms:
        for d in ms:
            for e in ms:
                left_action[(x, d, e)] = ps.compose_hom_pairs(
                    left_pairs[(d, e)], fpairs[(x, d)], fpairs[(x, e)]
                )
        for y in ms:
            for e in ms:
                right_action[(x, y, e)] = ps.compose_hom_pairs(
                    fpairs[(y, e)], right_pairs[(x, y)], fpairs[(x, e)]
                )
    zeta_el = {d: ps.presheaf_map_to_element(zeta[d]) for d in ms}
    bim = Bimodule(left_cat, right_cat, hom, left_action, right_action)
    return QuasiEquivalence(bim, zeta_el)


# ---------------------------------------------------------------------------
# tensored adjoint pairs across a base change
# ---------------------------------------------------------------------------


class TensoredAdjunction:
    """An adjunction (J, K) between presheaf categories over the two ends
    of a base change, together with the tensor-compatibility witness."""

    def __init__(self, bc, phi: VFunctor, ecat_w: VCategory):
        self.bc = bc
        self.phi = phi
        self.ecat_w = ecat_w

    def J(self, x: Presheaf) -> ps.TExtension:
        return ps.base_change_left(self.bc, self.phi, self.ecat_w, x)

    def K(self, y: Presheaf) -> Presheaf:
        return ps.base_change_right(self.bc, self.phi, self.ecat_w, y)

    def K_map(self, f: PresheafMap) -> PresheafMap:
        return PresheafMap(
            self.K(f.source),
            self.K(f.target),
            {
                d: self.bc.U_map(f.at(self.phi.ob_map[d]))
                for d in self.phi.source.objects
            },
        )

    def tensor_witness(self, x: Presheaf, v: ChainComplex) -> PresheafMap:
        """J(x) ⊙ T(v) -> J(x ⊙ v), built on coequalizer generators."""
        bc = self.bc
        phi = self.phi
        ecat = self.ecat_w
        dcat = phi.source
        ext_x = self.J(x)
        ext_xv = self.J(ps.presheaf_tensor(x, v))
        jx_tv = ps.presheaf_tensor(ext_x.presheaf, bc.T_ob(v))
        tv = bc.T_ob(v)
        comps = {}
        for e1 in ecat.objects:
            bsum, bincs, bprojs, bparts = ext_x._sums[e1]
            dist = ch.distributor(bparts, tv, ecat.base.field)
            pieces = []
            _, _, piece_projs = ch.direct_sum(
                [ch.tensor(s, tv) for s in bparts], ecat.base.field
            )
            for k, d in enumerate(dcat.objects):
                txd = bc.T_ob(x.levels[d])
                hw = ecat.hom[(e1, phi.ob_map[d])]
                txv = bc.T_ob(ch.tensor(x.levels[d], v))
                # (T x_d ⊗ hom) ⊗ T v  ->  T(x_d ⊗ v) ⊗ hom
                s1 = ch.associator(txd, hw, tv)
                s2 = ch.tensor_map(ChainMap.identity(txd), ch.symmetry(hw, tv))
                s3 = ch.inverse_map(ch.associator(txd, tv, hw))
                s4 = ch.tensor_map(
                    bc.T_product_iso(x.levels[d], v), ChainMap.identity(hw)
                )
                piece = ext_xv.include(d, e1).after(s4).after(s3).after(s2).after(s1)
                pieces.append(piece)
            glued = ch.cotuple_map(pieces, piece_projs)
            g_on_sum = glued.after(ch.inverse_map(dist))
            qten = ch.tensor_map(ext_x._projections[e1], ChainMap.identity(tv))
            comps[e1] = ch.induced_on_quotient(qten, g_on_sum)
        return PresheafMap(jx_tv, ext_xv.presheaf, comps)


def tensored_adjoint_check(ta: TensoredAdjunction, samples: list) -> dict:
    """Verify the unit and associativity coherence of the tensor witness and
    the derived hom comparison, exactly, on the given (x, v, v2) samples."""
    bc = ta.bc
    report = {"unit": [], "associativity": [], "derived_hom": []}
    vfield = bc.source.field
    unit_v = ChainComplex.unit(vfield)
    for x, v, v2 in samples:
        ext = ta.J(x)
        # unit coherence: through Jx ⊙ T(I) versus J of the unitor
        w_unit = ta.tensor_witness(x, unit_v)
        xi = ps.presheaf_tensor(x, unit_v)
        ext_xi = ta.J(xi)
        lhs = w_unit
        # build J(rho^{-1}): J x -> J(x ⊙ I) on coequalizer levels
        rho_inv = PresheafMap(
            x,
            xi,
            {
                d: ch.inverse_map(ch.right_unitor(x.levels[d]))
                for d in x.domain.objects
            },
        )
        jrho = _extension_map(ta, ext, ext_xi, rho_inv)
        jx_ti = ps.presheaf_tensor(ext.presheaf, bc.T_ob(unit_v))
        ins = PresheafMap(
            ext.presheaf,
            jx_ti,
            {
                e: ch.inverse_map(ch.right_unitor(ext.presheaf.levels[e]))
                for e in ta.ecat_w.objects
            },
        )
        ok = lhs.after(ins) == jrho
        report["unit"].append(ok)
        # associativity coherence
        w_v = ta.tensor_witness(x, v)
        xv = ps.presheaf_tensor(x, v)
        w_xv_v2 = ta.tensor_witness(xv, v2)
        top = w_xv_v2.after(ps.presheaf_tensor_map(w_v, bc.T_ob(v2)))
        vv2 = ch.tensor(v, v2)
        w_vv2 = ta.tensor_witness(x, vv2)
        ext_xv_v2 = ta.J(ps.presheaf_tensor(xv, v2))
        ext_x_vv2 = ta.J(ps.presheaf_tensor(x, vv2))
        assoc_inner = PresheafMap(
            ps.presheaf_tensor(xv, v2),
            ps.presheaf_tensor(x, vv2),
            {
                d: ch.associator(x.levels[d], v, v2)
                for d in x.domain.objects
            },
        )
        jassoc = _extension_map(ta, ext_xv_v2, ext_x_vv2, assoc_inner)
        tv, tv2 = bc.T_ob(v), bc.T_ob(v2)
        jx = ext.presheaf
        pre = PresheafMap(
            ps.presheaf_tensor(ps.presheaf_tensor(jx, tv), tv2),
            ps.presheaf_tensor(jx, ch.tensor(tv, tv2)),
            {
                e: ch.associator(jx.levels[e], tv, tv2)
                for e in ta.ecat_w.objects
            },
        )
        tprod = PresheafMap(
            ps.presheaf_tensor(jx, ch.tensor(tv, tv2)),
            ps.presheaf_tensor(jx, bc.T_ob(vv2)),
            {
                e: ch.tensor_map(
                    ChainMap.identity(jx.levels[e]), bc.T_product_iso(v, v2)
                )
                for e in ta.ecat_w.objects
            },
        )
        bottom = jassoc.after(w_vv2).after(tprod).after(pre)
        report["associativity"].append(top == bottom)
        # derived hom comparison: U hom(Jx, y) has the dimensions of
        # hom(x, Ky), and the explicit adjunction bijection round-trips
        y = ps.presheaf_tensor(ext.presheaf, bc.T_ob(v))  # a convenient target
        homw = ps.presheaf_hom(ext.presheaf, y)
        lhs_obj = bc.U_ob(homw.complex)
        ky = ta.K(y)
        homv = ps.presheaf_hom(x, ky).complex
        dims_match = lhs_obj.dims == homv.dims
        g = ps.random_presheaf_map(ext.presheaf, y, random.Random(0))
        fwd = ps.base_change_forward(bc, ta.phi, ta.ecat_w, x, g)
        back = ps.base_change_backward(bc, ta.phi, ta.ecat_w, x, y, fwd)
        report["derived_hom"].append(bool(dims_match and back == g))
    return report


def _extension_map(ta: TensoredAdjunction, ext_src: ps.TExtension, ext_tgt: ps.TExtension, f: PresheafMap) -> PresheafMap:
    """J applied to a presheaf map, induced on the coequalizer levels."""
    bc = ta.bc
    phi = ta.phi
    ecat = ta.ecat_w
    dcat = phi.source
    comps = {}
    for e1 in ecat.objects:
        bsum, bincs, bprojs, bparts = ext_src._sums[e1]
        pieces = []
        for d in dcat.objects:
            hw = ecat.hom[(e1, phi.ob_map[d])]
            piece = ext_tgt.include(d, e1).after(
                ch.tensor_map(bc.T_map(f.at(d)), ChainMap.identity(hw))
            )
            pieces.append(piece)
        glued = ch.cotuple_map(pieces, bprojs)
        comps[e1] = ch.induced_on_quotient(ext_src._projections[e1], glued)
    return PresheafMap(ext_src.presheaf, ext_tgt.presheaf, comps)


def tensorthm_bimodule(ta: TensoredAdjunction, es: dict) -> QuasiEquivalence:
    """The bimodule linking a family of presheaves over the far base with
    the family of their images under K, via the hom comparison of K."""
    ecat_w = ta.ecat_w
    bc = ta.bc
    ks = {lbl: ta.K(y) for lbl, y in es.items()}
    dcat_v = ta.phi.source
    left_raw, left_pairs_w = presheaf_end_category(ecat_w, es)
    from .changebase import change_enrichment

    left_cat = change_enrichment(left_raw, bc)
    right_cat, right_pairs = presheaf_end_category(dcat_v, ks)
    fpairs = {
        (x, e): ps.presheaf_hom(ks[x], ks[e]) for x in es for e in es
    }
    hom = {k: v.complex for k, v in fpairs.items()}
    # left action through K on hom objects: U hom_W(X,Y) -> hom_V(KX, KY)
    kmaps = {}
    for x in es:
        for e in es:
            kmaps[(x, e)] = _k_hom_comparison(ta, es[x], es[e], left_pairs_w[(x, e)], fpairs[(x, e)])
    left_action = {}
    right_action = {}
    for x in es:
        for d in es:
            for e in es:
                comp = ps.compose_hom_pairs(
                    fpairs[(d, e)], fpairs[(x, d)], fpairs[(x, e)]
                )
                left_action[(x, d, e)] = comp.after(
                    ch.tensor_map(kmaps[(d, e)], ChainMap.identity(hom[(x, d)]))
                )
        for y in es:
            for e in es:
                right_action[(x, y, e)] = ps.compose_hom_pairs(
                    fpairs[(y, e)], right_pairs[(x, y)], fpairs[(x, e)]
                )
    bim = Bimodule(left_cat, right_cat, hom, left_action, right_action)
    zeta = {d: ps.presheaf_map_to_element(PresheafMap.identity(ks[d])) for d in es}
    return QuasiEquivalence(bim, zeta)


def _k_hom_comparison(ta, yx, ye, pair_w, pair_v) -> ChainMap:
    """U(hom_W(X, Y)) -> hom_V(KX, KY) by applying K to a cycle basis."""
    bc = ta.bc
    u_obj = bc.U_ob(pair_w.complex)
    field = bc.source.field
    if u_obj.dim(0) == 0:
        return ChainMap.zero_map(u_obj, pair_v.complex)
    cyc = bc.cycle_basis(pair_w.complex)
    unit_w = ChainComplex.unit(bc.target.field)
    cols = []
    for j in range(cyc.ncols):
        el = ChainMap(unit_w, pair_w.complex, {0: cyc.column(j)})
        f = ps.element_to_presheaf_map(el, pair_w)
        kf = ta.K_map(f)
        target_el = ps.presheaf_map_to_element(kf)
        cols.append([r[0] for r in target_el.f(0).rows])
    m = Matrix(
        field,
        pair_v.complex.dim(0),
        len(cols),
        [[cols[j][i] for j in range(len(cols))] for i in range(pair_v.complex.dim(0))],
    )
    return ChainMap(u_obj, pair_v.complex, {0: m})


# ---------------------------------------------------------------------------
# the Morita demonstration
# ---------------------------------------------------------------------------


class MoritaReport:
    def __init__(self, checks: dict, homology: dict, seed: int, witnesses: dict):
        self.checks = checks
        self.homology = homology
        self.seed = seed
        self.witnesses = witnesses

    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "checks": {k: self.checks[k] for k in sorted(self.checks)},
            "homology": {
                k: {str(n): v for n, v in sorted(tbl.items())}
                for k, tbl in sorted(self.homology.items())
            },
            "seed": self.seed,
            "witnesses": {k: self.witnesses[k] for k in sorted(self.witnesses)},
        }


def morita_demo(
    sub: FullSubcategoryData,
    coproduct_sizes=(1, 2, 3, 4),
    n_samples: int = 16,
    seed: int = 0,
) -> MoritaReport:
    """Unit/counit isomorphism checks, finite-coproduct compactness of the
    generators, and weak-equivalence detection on sampled ambient maps."""
    rng = random.Random(seed)
    checks: dict = {}
    witnesses: dict = {}
    dcat = sub.dcat
    amb = sub.ambient
    field = amb.base.field
    unit_v = ChainComplex.unit(field)

    for d in dcat.objects:
        fd = ps.free_presheaf(dcat, d, unit_v)
        eta = unit_map(sub, fd)
        checks[f"unit_iso[{d}]"] = all(
            eta.at(e).is_iso() for e in dcat.objects
        )
        ext, eps = counit_map(sub, d)
        checks[f"counit_iso[{d}]"] = all(
            eps.at(lev).is_iso() for lev in amb.objects
        )

    for d in dcat.objects:
        md = sub.objects[d]
        for n in coproduct_sizes:
            ys = [ps.random_presheaf(amb, rng) for _ in range(n)]
            big, incs, _ = ps.presheaf_sum(ys, amb)
            hom_big = ps.presheaf_hom(md, big)
            parts = [ps.presheaf_hom(md, y) for y in ys]
            total, _, tprojs = ch.direct_sum([p.complex for p in parts], field)
            glued = None
            for k, p in enumerate(parts):
                pieces = {}
                for lev in amb.objects:
                    pieces[lev] = ch.hom_postcompose(
                        md.levels[lev], incs[k].at(lev)
                    ).after(p.project(lev))
                into = hom_big.pack(pieces)
                piece = into.after(tprojs[k])
                glued = piece if glued is None else glued.add(piece)
            ok = (
                glued.is_iso()
                if glued is not None
                else hom_big.complex.is_zero()
            )
            checks[f"compactness[{d},n={n}]"] = bool(ok)

    samples = []
    for e in amb.objects:
        ye = ps.yoneda(amb, e)
        samples.append((f"zero_to_Y({e})", PresheafMap(
            ps.zero_presheaf(amb), ye,
            {o: ChainMap.zero_map(ChainComplex.zero(field), ye.levels[o]) for o in amb.objects},
        )))
    while len(samples) < n_samples:
        a = ps.random_presheaf(amb, rng)
        b = ps.random_presheaf(amb, rng)
        f = ps.random_presheaf_map(a, b, rng)
        samples.append((f"sample{len(samples)}", f))
    detection = reflecting_set_check(sub, samples)
    violations = [r["map"] for r in detection if r["violation"]]
    checks["generator_detection"] = not violations
    if violations:
        witnesses["generator_detection"] = violations

    homology = {}
    for d in dcat.objects:
        for e in dcat.objects:
            homology[f"hom({d},{e})"] = ch.homology_dims(dcat.hom[(d, e)])
    return MoritaReport(checks, homology, seed, witnesses)
