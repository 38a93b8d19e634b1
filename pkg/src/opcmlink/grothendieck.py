"""Grothendieck completion of a family of OPCMs indexed by a finite order.

Elements of the completion are pairs ``(i, x)`` with ``x`` in the fiber over
``i``; ``(i, x) <= (j, y)`` when ``i <= j`` and ``x`` extended to ``j`` lies
below ``y``.  Over a bounded join-semilattice the completion is itself an
OPCM whose combine extends both arguments to the join and combines there.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from typing import Any, Iterable, Mapping, NamedTuple

from .errors import NoAdjointError, PreconditionError, StructuralError
from .limits import ensure_within_cap
from .morphisms import Hom, check_hom, synthesize_upper
from .opcm import FiniteOpcm, LawReport
from .order import Preorder, canonical, is_preorder, sort_key


@dataclass(frozen=True)
class JoinSemilattice:
    """Finite partial order with a bottom and a join table; optionally meets too."""

    order: Preorder
    bottom: Any
    join: Mapping
    meet: Mapping | None = None

    @property
    def carrier(self) -> tuple:
        return self.order.carrier

    def leq(self, i, j) -> bool:
        return self.order.leq(i, j)


def check_semilattice(L: JoinSemilattice) -> LawReport:
    """Validate the stored join (and meet) tables as least upper (greatest lower) bounds."""
    report = LawReport("join-semilattice")
    C = L.carrier
    po = report.law("partial-order")
    po.check(is_preorder(C, L.order.pairs) and L.order.is_antisymmetric(), ())
    bot = report.law("bottom")
    bot.check(L.bottom in L.order.elements, (L.bottom,))
    for i in C:
        bot.check(L.leq(L.bottom, i), (L.bottom, i))
    lub = report.law("join-is-lub")
    for i, j in cartesian(C, repeat=2):
        k = L.join.get((i, j))
        ok = k is not None and L.leq(i, k) and L.leq(j, k)
        ok = ok and all(L.leq(k, u) for u in C if L.leq(i, u) and L.leq(j, u))
        lub.check(ok, (i, j))
    if L.meet is not None:
        glb = report.law("meet-is-glb")
        for i, j in cartesian(C, repeat=2):
            m = L.meet.get((i, j))
            ok = m is not None and L.leq(m, i) and L.leq(m, j)
            ok = ok and all(L.leq(u, m) for u in C if L.leq(u, i) and L.leq(u, j))
            glb.check(ok, (i, j))
    return report


def powerset_lattice(attrs: Iterable) -> JoinSemilattice:
    """All subsets under inclusion, with union and intersection."""
    from .instances import nonempty_subsets

    subsets = canonical([frozenset()] + nonempty_subsets(attrs))
    order = Preorder(subsets, frozenset((a, b) for a in subsets for b in subsets if a <= b))
    join = {(a, b): a | b for a in subsets for b in subsets}
    meet = {(a, b): a & b for a in subsets for b in subsets}
    return JoinSemilattice(order, frozenset(), join, meet)


def chain_lattice(n: int) -> JoinSemilattice:
    """``0 < 1 < ... < n-1``."""
    C = tuple(range(n))
    order = Preorder(C, frozenset((i, j) for i in C for j in C if i <= j))
    return JoinSemilattice(
        order,
        0,
        {(i, j): max(i, j) for i in C for j in C},
        {(i, j): min(i, j) for i in C for j in C},
    )


class GrothElem(NamedTuple):
    index: Any
    elem: Any


@dataclass(frozen=True)
class IndexedFamily:
    """One OPCM per index and a transition homomorphism for every ``i <= j``.

    ``index`` is a JoinSemilattice, or a bare Preorder when only the
    completion preorder is wanted.
    """

    index: Any
    fiber: Mapping
    transition: Mapping

    @property
    def index_order(self) -> Preorder:
        return self.index.order if isinstance(self.index, JoinSemilattice) else self.index

    def extend(self, i, j, x):
        return self.transition[(i, j)](x)

    def elements(self) -> tuple:
        return tuple(
            GrothElem(i, x) for i in self.index_order.carrier for x in self.fiber[i].carrier
        )


def _same(a: FiniteOpcm, b: FiniteOpcm) -> bool:
    return a is b or a == b


def check_functor(F: IndexedFamily) -> LawReport:
    """Transitions are homomorphisms, identities on the nose, and compose strictly."""
    P = F.index_order
    for i in P.carrier:
        if i not in F.fiber:
            raise StructuralError(f"no fiber over {i!r}")
    for i, j in sorted(P.pairs, key=sort_key):
        T = F.transition.get((i, j))
        if T is None:
            raise StructuralError(f"missing transition {i!r} -> {j!r}")
        if not (_same(T.source, F.fiber[i]) and _same(T.target, F.fiber[j])):
            raise StructuralError(f"transition {i!r} -> {j!r} has the wrong endpoints")
    report = LawReport("functor")
    homs = report.law("transitions-homomorphic")
    for i, j in sorted(P.pairs, key=sort_key):
        homs.check(check_hom(F.transition[(i, j)]).ok, (i, j))
    ident = report.law("identity")
    pseudo = False
    for i in P.carrier:
        M = F.fiber[i]
        for x in M.carrier:
            y = F.extend(i, i, x)
            if not ident.check(y == x, (i, x)) and M.equiv(x, y):
                pseudo = True
    comp = report.law("composition")
    for i, j in sorted(P.pairs, key=sort_key):
        for k in P.up(j):
            M = F.fiber[k]
            for x in F.fiber[i].carrier:
                a = F.extend(j, k, F.extend(i, j, x))
                b = F.extend(i, k, x)
                if not comp.check(a == b, (i, j, k, x)) and M.equiv(a, b):
                    pseudo = True
    if pseudo:
        note = "holds only up to equivalence: pseudo-functors are not supported"
        ident.note = comp.note = note
    return report


def completion_leq(F: IndexedFamily, a, b) -> bool:
    (i, x), (j, y) = a, b
    if not F.index_order.leq(i, j):
        return False
    return F.fiber[j].leq(F.extend(i, j, x), y)


def completion_order(F: IndexedFamily) -> Preorder:
    E = canonical(F.elements())
    return Preorder(E, frozenset((a, b) for a in E for b in E if completion_leq(F, a, b)))


def check_completion_props(F: IndexedFamily) -> LawReport:
    """The five structural facts about the completion and its projection."""
    P = F.index_order
    order = completion_order(F)
    E = order.carrier
    report = LawReport("completion")

    pre = report.law("preorder")
    pre.check(is_preorder(E, order.pairs), ())

    poset = report.law("poset")
    if P.is_antisymmetric() and all(F.fiber[i].order.is_antisymmetric() for i in P.carrier):
        for a, b in sorted(order.pairs, key=sort_key):
            if a != b:
                poset.check((b, a) not in order.pairs, (a, b))
    else:
        poset.unmet = True
        poset.note = "hypothesis unmet: index or a fiber is not antisymmetric"

    proj = report.law("projection-monotone")
    for a, b in sorted(order.pairs, key=sort_key):
        proj.check(P.leq(a.index, b.index), (a, b))

    opfib = report.law("opfibration")
    for a in E:
        for j in P.up(a.index):
            lift = GrothElem(j, F.extend(a.index, j, a.elem))
            ok = order.leq(a, lift) and all(
                order.leq(lift, c) for c in order.up(a) if P.leq(j, c.index)
            )
            opfib.check(ok, (a, j))

    dual = report.law("dual-opfibration")
    try:
        for i, j in P.pairs:
            synthesize_upper(F.transition[(i, j)])
    except NoAdjointError:
        dual.unmet = True
        dual.note = "hypothesis unmet: some transition has no upper adjoint"
        return report
    for b in E:
        below = order.down(b)
        for i in P.down(b.index):
            candidates = [GrothElem(i, x) for x in F.fiber[i].carrier]
            ok = any(
                order.leq(c, b)
                and all(order.leq(d, c) for d in below if P.leq(d.index, i))
                for c in candidates
            )
            dual.check(ok, (b, i))
    return report


def groth_opcm(F: IndexedFamily, max_carrier: int | None = None) -> FiniteOpcm:
    """The completion as an OPCM: extend both arguments to the join, combine there."""
    L = F.index
    if not isinstance(L, JoinSemilattice):
        raise PreconditionError("the completion OPCM needs a join-semilattice index")
    total = sum(len(F.fiber[i]) for i in L.carrier)
    ensure_within_cap(total, "Grothendieck completion", max_carrier)
    order = completion_order(F)
    table = {}
    for a, b in cartesian(order.carrier, repeat=2):
        k = L.join[(a.index, b.index)]
        z = F.fiber[k].combine(F.extend(a.index, k, a.elem), F.extend(b.index, k, b.elem))
        if z is not None:
            table[(a, b)] = GrothElem(k, z)
    zero = GrothElem(L.bottom, F.fiber[L.bottom].zero)
    return FiniteOpcm(order, zero, table)


def check_groth_props(F: IndexedFamily, G: FiniteOpcm | None = None) -> LawReport:
    """Facts about the completion OPCM beyond the OPCM axioms themselves."""
    L = F.index
    G = groth_opcm(F) if G is None else G
    report = LawReport("completion OPCM")

    pj = report.law("projection-preserves-join")
    for (a, b), c in sorted(G.table.items(), key=lambda kv: sort_key(kv[0])):
        pj.check(c.index == L.join[(a.index, b.index)], (a, b))

    chain = report.law("combine-monotone-chain")
    for a1, a2 in sorted(G.order.pairs, key=sort_key):
        for b in G.carrier:
            if not (G.defined(a1, b) and G.defined(a2, b)):
                continue
            k1 = L.join[(a1.index, b.index)]
            k2 = L.join[(a2.index, b.index)]
            M = F.fiber[k2]
            pushed = F.extend(k1, k2, G.combine(a1, b).elem)
            direct = M.combine(F.extend(a1.index, k2, a1.elem), F.extend(b.index, k2, b.elem))
            upper = M.combine(F.extend(a2.index, k2, a2.elem), F.extend(b.index, k2, b.elem))
            ok = (
                L.leq(k1, k2)
                and direct is not None
                and M.equiv(pushed, direct)
                and M.leq(direct, upper)
            )
            chain.check(ok, (a1, a2, b))

    fib = report.law("fiber-order-restriction")
    for i in L.carrier:
        M = F.fiber[i]
        for x, y in cartesian(M.carrier, repeat=2):
            fib.check(G.leq(GrothElem(i, x), GrothElem(i, y)) == M.leq(x, y), (i, x, y))
    return report


def constant_family(L: JoinSemilattice | Preorder, M: FiniteOpcm) -> IndexedFamily:
    """The same OPCM everywhere with identity transitions."""
    P = L.order if isinstance(L, JoinSemilattice) else L
    ident = Hom(M, M, {x: x for x in M.carrier})
    return IndexedFamily(L, {i: M for i in P.carrier}, {pair: ident for pair in P.pairs})
