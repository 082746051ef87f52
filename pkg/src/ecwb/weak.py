"""Weakly unital enriched categories and presheaves.

Units are maps out of a chosen weak equivalence q: QI -> I instead of the
unit itself; the two unit squares trade the honest triangle for designated
endomorphism corrections xi.
"""

from __future__ import annotations

from . import chain as ch
from .chain import ChainComplex, ChainMap
from .base import MonoidalBase
from .vcat import VCategory

__all__ = [
    "WeaklyUnitalVCategory",
    "WeaklyUnitalPresheaf",
    "check_weakly_unital",
    "check_weakly_unital_presheaf",
    "weakly_unital_from_category",
    "cylinder_unit_approximation",
]


class WeaklyUnitalVCategory:
    """Associative composition, units QI -> hom(d,d), designated
    pre/post-composition corrections, and the fixed map gamma: QI -> I."""

    def __init__(
        self,
        base: MonoidalBase,
        objects,
        hom: dict,
        comp: dict,
        eta: dict,
        xi_pre: dict,
        xi_post: dict,
        qi: ChainComplex,
        gamma: ChainMap,
    ):
        self.base = base
        self.objects = tuple(sorted(objects))
        self.hom = dict(hom)
        self.comp = dict(comp)
        self.eta = dict(eta)
        self.xi_pre = dict(xi_pre)
        self.xi_post = dict(xi_post)
        self.qi = qi
        self.gamma = gamma
        if gamma.source != qi or gamma.target != ChainComplex.unit(base.field):
            raise ValueError("gamma must map QI to the unit")
        for d in self.objects:
            e = self.eta.get(d)
            if e is None or e.source != qi or e.target != self.hom[(d, d)]:
                raise ValueError(f"unit at {d} has wrong shape")


class WeaklyUnitalPresheaf:
    """Levels and associative actions over a weakly unital domain, plus the
    designated level endomorphisms entering the unit square."""

    def __init__(self, domain: WeaklyUnitalVCategory, levels: dict, actions: dict, xi_level: dict):
        self.domain = domain
        self.levels = dict(levels)
        self.actions = dict(actions)
        self.xi_level = dict(xi_level)


def check_weakly_unital(d: WeaklyUnitalVCategory) -> list[str]:
    report = []
    base = d.base
    if not base.is_weak_equivalence(d.gamma):
        report.append("gamma: QI -> I is not a weak equivalence")
    for (a, b), xi in sorted(d.xi_pre.items()):
        if not base.is_weak_equivalence(xi):
            report.append(f"xi precomposition at ({a},{b}) is not a weak equivalence")
    for (a, b), xi in sorted(d.xi_post.items()):
        if not base.is_weak_equivalence(xi):
            report.append(f"xi postcomposition at ({a},{b}) is not a weak equivalence")
    # associativity, exactly as for honest categories
    for a in d.objects:
        for b in d.objects:
            for c in d.objects:
                for e in d.objects:
                    hce = d.hom[(c, e)]
                    hbc = d.hom[(b, c)]
                    hab = d.hom[(a, b)]
                    lhs = d.comp[(a, b, e)].after(
                        ch.tensor_map(d.comp[(b, c, e)], ChainMap.identity(hab))
                    )
                    rhs = (
                        d.comp[(a, c, e)]
                        .after(ch.tensor_map(ChainMap.identity(hce), d.comp[(a, b, c)]))
                        .after(ch.associator(hce, hbc, hab))
                    )
                    if lhs != rhs:
                        report.append(f"associativity fails at ({a},{b},{c},{e})")
    # right unit square: compose against eta_d equals xi_pre ⊗ gamma
    for a in d.objects:
        for b in d.objects:
            hab = d.hom[(a, b)]
            lhs = d.comp[(a, a, b)].after(
                ch.tensor_map(ChainMap.identity(hab), d.eta[a])
            )
            rhs = ch.right_unitor(hab).after(
                ch.tensor_map(d.xi_pre[(a, b)], d.gamma)
            )
            if lhs != rhs:
                report.append(f"right unit square fails at ({a},{b})")
            lhs2 = d.comp[(a, b, b)].after(
                ch.tensor_map(d.eta[b], ChainMap.identity(hab))
            )
            rhs2 = ch.left_unitor(hab).after(
                ch.tensor_map(d.gamma, d.xi_post[(a, b)])
            )
            if lhs2 != rhs2:
                report.append(f"left unit square fails at ({a},{b})")
    return report


def check_weakly_unital_presheaf(x: WeaklyUnitalPresheaf) -> list[str]:
    report = []
    d = x.domain
    # action associativity
    for a in d.objects:
        for b in d.objects:
            for c in d.objects:
                xc = x.levels[c]
                hbc = d.hom[(b, c)]
                hab = d.hom[(a, b)]
                lhs = x.actions[(a, b)].after(
                    ch.tensor_map(x.actions[(b, c)], ChainMap.identity(hab))
                )
                rhs = (
                    x.actions[(a, c)]
                    .after(ch.tensor_map(ChainMap.identity(xc), d.comp[(a, b, c)]))
                    .after(ch.associator(xc, hbc, hab))
                )
                if lhs != rhs:
                    report.append(f"action associativity fails at ({a},{b},{c})")
    # unit square: adjoint action after eta equals the xi endomorphism
    for a in d.objects:
        xa = x.levels[a]
        act = x.actions[(a, a)]
        adj = ch.curry(
            act.after(ch.symmetry(d.hom[(a, a)], xa)), d.hom[(a, a)], xa
        )
        lhs = adj.after(d.eta[a])
        rhs = ch.hom_element(x.xi_level[a]).after(d.gamma)
        if lhs != rhs:
            report.append(f"presheaf unit square fails at {a}")
    return report


def weakly_unital_from_category(
    c: VCategory, qi: ChainComplex, gamma: ChainMap
) -> WeaklyUnitalVCategory:
    """View an honest category as weakly unital: units factor through gamma
    and the designated corrections are identities."""
    eta = {d: c.eta(d).after(gamma) for d in c.objects}
    xi_pre = {
        (a, b): ChainMap.identity(c.hom[(a, b)]) for a in c.objects for b in c.objects
    }
    xi_post = {
        (a, b): ChainMap.identity(c.hom[(a, b)]) for a in c.objects for b in c.objects
    }
    return WeaklyUnitalVCategory(
        c.base, c.objects, c.hom, c.comp, eta, xi_pre, xi_post, qi, gamma
    )


def cylinder_unit_approximation(base: MonoidalBase) -> tuple[ChainComplex, ChainMap]:
    """QI = the mapping cylinder of id on the unit, with its collapse map;
    a surjective weak equivalence QI -> I that is not an isomorphism."""
    unit = ChainComplex.unit(base.field)
    cyl, i, r = ch.mapping_cylinder(ChainMap.identity(unit))
    return cyl, r
