"""Ordered valuation algebras and their reconstruction as completions.

A valuation algebra carries labelled valuations over a lattice of domains,
with combination, focusing onto smaller domains and one identity per
domain.  Here every operation is an explicit finite table so the axioms can
be checked exhaustively.  Combination may be partial (table absence), which
the relational instance needs since an empty join is not a valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from typing import Any, Mapping

from .errors import NoAdjointError, PreconditionError, StructuralError
from .grothendieck import (
    GrothElem,
    IndexedFamily,
    JoinSemilattice,
    check_semilattice,
    completion_leq,
    groth_opcm,
    powerset_lattice,
)
from .morphisms import Hom, synthesize_upper
from .opcm import FiniteOpcm, LawReport, check_opcm_laws
from .order import Preorder, canonical, is_preorder, sort_key
from .relational import AttributeSchema, Relation, natural_join, project


@dataclass(frozen=True)
class ValuationAlgebra:
    order: Preorder
    domains: JoinSemilattice
    combine: Mapping
    label: Mapping
    focus: Mapping
    identity: Mapping

    @property
    def valuations(self) -> tuple:
        return self.order.carrier

    def leq(self, a, b) -> bool:
        return self.order.leq(a, b)

    def d(self, phi):
        return self.label[phi]

    def comb(self, a, b):
        return self.combine.get((a, b))

    def down(self, phi, x):
        return self.focus[(phi, x)]

    def e(self, x):
        return self.identity[x]

    def of_domain(self, x) -> list:
        return [p for p in self.valuations if self.label[p] == x]


def validate_ova_structure(V: ValuationAlgebra) -> None:
    D = V.domains
    if D.meet is None:
        raise PreconditionError("the domain lattice needs a meet table")
    lat = check_semilattice(D)
    if not lat.ok:
        raise StructuralError(f"domain lattice is invalid: {lat.failed()}")
    phis = V.order.elements
    for phi in V.valuations:
        if V.label.get(phi) not in D.order.elements:
            raise StructuralError(f"valuation {phi!r} has no valid domain")
    for x in D.carrier:
        if V.identity.get(x) not in phis:
            raise StructuralError(f"no identity valuation for domain {x!r}")
    for (a, b), c in V.combine.items():
        if a not in phis or b not in phis or c not in phis:
            raise StructuralError(f"combine entry {(a, b)!r} leaves the valuations")
    for (phi, x), psi in V.focus.items():
        if phi not in phis or psi not in phis:
            raise StructuralError(f"focus entry {(phi, x)!r} leaves the valuations")
        if not D.leq(x, V.label[phi]):
            raise StructuralError(f"focus of {phi!r} onto {x!r} is outside its domain")
    for phi in V.valuations:
        for x in D.order.down(V.label[phi]):
            if (phi, x) not in V.focus:
                raise StructuralError(f"focus of {phi!r} onto {x!r} is missing")


def check_ova_axioms(V: ValuationAlgebra) -> LawReport:
    """The nine conditions, itemised, each checked over every applicable tuple."""
    validate_ova_structure(V)
    D = V.domains
    P = V.valuations
    report = LawReport("ordered valuation algebra")

    po = report.law("partial-order")
    po.check(is_preorder(P, V.order.pairs) and V.order.is_antisymmetric(), ())

    c1 = report.law("1-commutative-semigroup")
    undefined = 0
    for a, b in cartesian(P, repeat=2):
        ab = V.comb(a, b)
        if ab is None:
            undefined += 1
            c1.check(V.comb(b, a) is None, ("commutative", a, b))
        else:
            c1.check(V.comb(b, a) == ab, ("commutative", a, b))
    for a, b, c in cartesian(P, repeat=3):
        bc = V.comb(b, c)
        ab = V.comb(a, b)
        left = None if bc is None else V.comb(a, bc)
        right = None if ab is None else V.comb(ab, c)
        c1.check(left == right, ("associative", a, b, c))
    if undefined:
        c1.note = f"combination is partial ({undefined} undefined pairs)"

    c2 = report.law("2-same-domain")
    for a, b in sorted(V.order.pairs, key=sort_key):
        c2.check(V.d(a) == V.d(b), (a, b))

    c3 = report.law("3-identity")
    for x in D.carrier:
        c3.check(V.d(V.e(x)) == x, ("label", x))
        for y in D.carrier:
            c3.check(V.comb(V.e(x), V.e(y)) == V.e(D.join[(x, y)]), ("join", x, y))
    for phi in P:
        c3.check(V.comb(phi, V.e(V.d(phi))) == phi, ("neutral", phi))

    c4 = report.law("4-stability")
    for x, y in sorted(D.order.pairs, key=sort_key):
        c4.check(V.down(V.e(y), x) == V.e(x), (x, y))

    c5 = report.law("5-labelling")
    for (a, b), c in sorted(V.combine.items(), key=lambda kv: sort_key(kv[0])):
        c5.check(V.d(c) == D.join[(V.d(a), V.d(b))], ("combine", a, b))
    for (phi, x), psi in sorted(V.focus.items(), key=lambda kv: sort_key(kv[0])):
        c5.check(V.d(psi) == x, ("focus", phi, x))

    c6 = report.law("6-focus-transitivity")
    for phi in P:
        dom = D.order.down(V.d(phi))
        for y in dom:
            for x in D.order.down(y):
                c6.check(V.down(V.down(phi, y), x) == V.down(phi, x), (phi, y, x))

    c7 = report.law("7-distributivity")
    for a, b in cartesian(P, repeat=2):
        ab = V.comb(a, b)
        lhs = None if ab is None else V.down(ab, V.d(a))
        rhs = V.comb(a, V.down(b, D.meet[(V.d(a), V.d(b))]))
        c7.check(lhs == rhs, (a, b))

    c8 = report.law("8-combination-monotone")
    pairs = sorted(V.order.pairs, key=sort_key)
    for a1, b1 in pairs:
        for a2, b2 in pairs:
            lo, hi = V.comb(a1, a2), V.comb(b1, b2)
            if lo is not None and hi is not None:
                c8.check(V.leq(lo, hi), (a1, b1, a2, b2))

    c9 = report.law("9-focus-monotone")
    for a, b in pairs:
        if V.d(a) != V.d(b):
            continue
        for x in D.order.down(V.d(a)):
            c9.check(V.leq(V.down(a, x), V.down(b, x)), (a, b, x))
    return report


def vacuous_extension(V: ValuationAlgebra, phi, y):
    """``phi (x) e_y``: the same information over a larger domain."""
    if not V.domains.leq(V.d(phi), y):
        raise PreconditionError(f"{y!r} does not contain the domain of {phi!r}")
    out = V.comb(phi, V.e(y))
    if out is None:
        raise StructuralError(f"vacuous extension of {phi!r} to {y!r} is undefined")
    return out


def fiber_opcm(V: ValuationAlgebra, x) -> FiniteOpcm:
    members = canonical(V.of_domain(x))
    keep = set(members)
    pairs = frozenset((a, b) for a, b in V.order.pairs if a in keep and b in keep)
    table = {
        (a, b): c for (a, b), c in V.combine.items() if a in keep and b in keep
    }
    return FiniteOpcm(Preorder(members, pairs), V.e(x), table)


def family_from_ova(V: ValuationAlgebra) -> IndexedFamily:
    """One ordered commutative monoid per domain, with vacuous extension between them."""
    axioms = check_ova_axioms(V)
    if not axioms.ok:
        raise PreconditionError(f"not an ordered valuation algebra: {axioms.failed()}")
    D = V.domains
    fibers = {x: fiber_opcm(V, x) for x in D.carrier}
    for x, M in fibers.items():
        laws = check_opcm_laws(M)
        if not laws.ok:
            raise PreconditionError(f"domain {x!r} is not an ordered monoid: {laws.failed()}")
    transitions = {
        (x, y): Hom(fibers[x], fibers[y], {p: vacuous_extension(V, p, y) for p in fibers[x].carrier})
        for x, y in D.order.pairs
    }
    return IndexedFamily(D, fibers, transitions)


# -- the extended order -----------------------------------------------------


def extended_leq(V: ValuationAlgebra, a, b) -> bool:
    if not V.domains.leq(V.d(a), V.d(b)):
        return False
    ext = V.comb(a, V.e(V.d(b)))
    return ext is not None and V.leq(ext, b)


def extended_order(V: ValuationAlgebra) -> Preorder:
    """Compare across domains by first extending the smaller one."""
    P = V.valuations
    return Preorder(P, frozenset((a, b) for a in P for b in P if extended_leq(V, a, b)))


def check_extended_order(V: ValuationAlgebra) -> LawReport:
    """The ordering conditions survive the extension; same-domain comparability does not."""
    ext = extended_order(V)
    D = V.domains
    P = V.valuations
    report = LawReport("extended order")
    po = report.law("partial-order")
    po.check(is_preorder(P, ext.pairs) and ext.is_antisymmetric(), ())
    same = report.law("coincides-within-domain")
    for a, b in cartesian(P, repeat=2):
        if V.d(a) == V.d(b):
            same.check(ext.leq(a, b) == V.leq(a, b), (a, b))
    pairs = sorted(ext.pairs, key=sort_key)
    c8 = report.law("8-combination-monotone")
    for a1, b1 in pairs:
        for a2, b2 in pairs:
            lo, hi = V.comb(a1, a2), V.comb(b1, b2)
            if lo is not None and hi is not None:
                c8.check(ext.leq(lo, hi), (a1, b1, a2, b2))
    c9 = report.law("9-focus-monotone")
    for a, b in pairs:
        for x in D.order.down(V.d(a)):
            c9.check(ext.leq(V.down(a, x), V.down(b, x)), (a, b, x))
    cross = sum(1 for a, b in pairs if V.d(a) != V.d(b))
    report.law("2-same-domain").note = (
        f"not required; {cross} comparable pairs span different domains"
    )
    return report


# -- extension / focusing adjunction ----------------------------------------


def identity_least(V: ValuationAlgebra) -> bool:
    return all(V.leq(V.e(V.d(p)), p) for p in V.valuations)


def _regular_at(V: ValuationAlgebra, phi, x, chi) -> bool:
    left = V.comb(V.down(phi, x), chi)
    whole = None if left is None else V.comb(left, phi)
    return whole is not None and V.leq(whole, phi)


def find_regularity_witness(V: ValuationAlgebra) -> dict | None:
    """Search every candidate; None when some (phi, x) has no witness."""
    witness = {}
    for phi in V.valuations:
        for x in V.domains.order.down(V.d(phi)):
            for chi in V.of_domain(x):
                if _regular_at(V, phi, x, chi):
                    witness[(phi, x)] = chi
                    break
            else:
                return None
    return witness


def validate_witness(V: ValuationAlgebra, witness: Mapping) -> None:
    for phi in V.valuations:
        for x in V.domains.order.down(V.d(phi)):
            chi = witness.get((phi, x))
            if chi is None:
                raise PreconditionError(f"witness lacks an entry for {(phi, x)!r}")
            if V.d(chi) != x or not _regular_at(V, phi, x, chi):
                raise PreconditionError(f"witness entry for {(phi, x)!r} is invalid")


def check_galois_lemma(V: ValuationAlgebra, witness: Mapping | None = None) -> LawReport:
    """Extension then compare versus compare after focusing, in both directions."""
    D = V.domains
    report = LawReport("extension/focusing adjunction")
    triples = [
        (phi, y, psi)
        for phi in V.valuations
        for y in D.order.up(V.d(phi))
        for psi in V.of_domain(y)
    ]
    p1 = report.law("part-1")
    for phi, y, psi in triples:
        x = V.d(phi)
        if V.leq(vacuous_extension(V, phi, y), psi):
            p1.check(V.leq(phi, V.down(psi, x)), (phi, y, psi))

    p2 = report.law("part-2")
    if witness is not None:
        validate_witness(V, witness)
        regular = True
    else:
        regular = find_regularity_witness(V) is not None
    least = identity_least(V)
    if not (regular and least):
        p2.unmet = True
        missing = [n for n, ok in (("identity-least", least), ("regular", regular)) if not ok]
        p2.note = "hypothesis unmet: " + ", ".join(missing)
        return report
    for phi, y, psi in triples:
        x = V.d(phi)
        if V.leq(phi, V.down(psi, x)):
            p2.check(V.leq(vacuous_extension(V, phi, y), psi), (phi, y, psi))
    return report


# -- the representation theorem ---------------------------------------------


def ova_from_completion(F: IndexedFamily, G: FiniteOpcm | None = None) -> ValuationAlgebra:
    """Read a valuation algebra back off a completion: focusing is the upper
    adjoint of each transition."""
    L = F.index
    G = groth_opcm(F) if G is None else G
    pairs = frozenset((a, b) for a, b in G.order.pairs if a.index == b.index)
    focus = {}
    for x, y in L.order.pairs:
        upper = synthesize_upper(F.transition[(x, y)])
        for psi in F.fiber[y].carrier:
            focus[(GrothElem(y, psi), x)] = GrothElem(x, upper[psi])
    return ValuationAlgebra(
        order=Preorder(G.carrier, pairs),
        domains=L,
        combine=dict(G.table),
        label={a: a.index for a in G.carrier},
        focus=focus,
        identity={x: GrothElem(x, F.fiber[x].zero) for x in L.carrier},
    )


def check_isomorphism_theorem(V: ValuationAlgebra) -> LawReport:
    """Rebuild V as the completion of its domain family and compare everything."""
    report = LawReport("valuation algebra = completion")
    axioms = check_ova_axioms(V)
    hyp = report.law("hyp-axioms")
    if not axioms.ok:
        hyp.unmet, hyp.note = True, f"failed: {axioms.failed()}"
    least = report.law("hyp-identity-least")
    if not identity_least(V):
        least.unmet, least.note = True, "some e_x is not least in its domain"
    reg = report.law("hyp-regular")
    if find_regularity_witness(V) is None:
        reg.unmet, reg.note = True, "no regularity witness exists"
    if any(r.unmet for r in (hyp, least, reg)):
        return report

    F = family_from_ova(V)
    G = groth_opcm(F)
    D = V.domains
    back = {a: a.elem for a in G.carrier}

    bij = report.law("bijection")
    bij.check(sorted(back.values(), key=sort_key) == sorted(V.valuations, key=sort_key), ())
    for a in G.carrier:
        bij.check(V.d(a.elem) == a.index, (a,))

    ext = extended_order(V)
    iso = report.law("order-isomorphism")
    for a, b in cartesian(G.carrier, repeat=2):
        iso.check(completion_leq(F, a, b) == ext.leq(back[a], back[b]), (a, b))

    comb = report.law("combine-correspondence")
    for a, b in cartesian(G.carrier, repeat=2):
        box = G.combine(a, b)
        direct = V.comb(back[a], back[b])
        ok = (box is None) == (direct is None) and (box is None or back[box] == direct)
        if ok and direct is not None:
            z = D.join[(a.index, b.index)]
            lifted = V.comb(vacuous_extension(V, back[a], z), vacuous_extension(V, back[b], z))
            ok = lifted == direct
        comb.check(ok, (a, b))

    zero = report.law("zero")
    zero.check(back[G.zero] == V.e(D.bottom), (G.zero,))

    proj = report.law("projection-is-label")
    for a in G.carrier:
        proj.check(a.index == V.d(back[a]), (a,))

    foc = report.law("focus-is-upper-adjoint")
    for x, y in sorted(D.order.pairs, key=sort_key):
        try:
            upper = synthesize_upper(F.transition[(x, y)])
        except NoAdjointError:
            foc.check(False, ("no-adjoint", x, y))
            continue
        for psi in F.fiber[y].carrier:
            foc.check(upper[psi] == V.down(psi, x), (psi, x))

    trip = report.law("round-trip")
    W = ova_from_completion(F, G)
    trip.check(
        {(back[a], back[b]) for a, b in W.order.pairs} == set(V.order.pairs), ("order",)
    )
    trip.check(
        {(back[a], back[b]): back[c] for (a, b), c in W.combine.items()} == dict(V.combine),
        ("combine",),
    )
    trip.check({back[a]: x for a, x in W.label.items()} == dict(V.label), ("label",))
    trip.check({(back[a], x): back[c] for (a, x), c in W.focus.items()} == dict(V.focus), ("focus",))
    trip.check({x: back[a] for x, a in W.identity.items()} == dict(V.identity), ("identity",))
    return report


# -- the relational instance ------------------------------------------------


def relational_ova(schema: AttributeSchema, with_null: bool = False) -> ValuationAlgebra:
    """Relations over every attribute subset: join, projection, full relations.

    With ``with_null`` each domain also gets its empty relation, which makes
    combination total.
    """
    from .instances import nonempty_subsets

    D = powerset_lattice(schema.attrs)
    vals = []
    for A in D.carrier:
        vals += [GrothElem(A, S) for S in nonempty_subsets(schema.tuples(A))]
        if with_null:
            vals.append(GrothElem(A, frozenset()))
    vals = canonical(vals)
    pairs = frozenset((a, b) for a in vals for b in vals if a.index == b.index and b.elem <= a.elem)

    def rel(v: GrothElem) -> Relation:
        return Relation(tuple(sorted(v.index)), v.elem)

    combine = {}
    for a, b in cartesian(vals, repeat=2):
        idx = a.index | b.index
        if not a.elem or not b.elem:
            if with_null:
                combine[(a, b)] = GrothElem(idx, frozenset())
            continue
        j = natural_join(rel(a), rel(b))
        if j is not None:
            combine[(a, b)] = j.as_elem()
        elif with_null:
            combine[(a, b)] = GrothElem(idx, frozenset())
    focus = {}
    for v in vals:
        for x in D.order.down(v.index):
            focus[(v, x)] = project(rel(v), x).as_elem() if v.elem else GrothElem(x, frozenset())
    identity = {A: GrothElem(A, schema.tuples(A)) for A in D.carrier}
    return ValuationAlgebra(
        order=Preorder(vals, pairs),
        domains=D,
        combine=combine,
        label={v: v.index for v in vals},
        focus=focus,
        identity=identity,
    )
