"""Homomorphisms, changes of domain (Galois connections) and linking passages."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from typing import Any, Callable, Mapping

from .errors import InconsistentLinkage, NoAdjointError, PreconditionError, StructuralError
from .instances import possibility_of_set
from .opcm import FiniteOpcm, LawReport
from .order import sort_key


@dataclass(frozen=True)
class Hom:
    """A total map between the carriers of two OPCMs."""

    source: FiniteOpcm
    target: FiniteOpcm
    mapping: Mapping

    @classmethod
    def from_function(cls, source: FiniteOpcm, target: FiniteOpcm, fn: Callable) -> Hom:
        return cls(source, target, {x: fn(x) for x in source.carrier})

    def __call__(self, x):
        return self.mapping[x]

    def then(self, g: Hom) -> Hom:
        """``g . self``."""
        if self.target != g.source:
            raise StructuralError("cannot compose: codomain and domain differ")
        return Hom(self.source, g.target, {x: g(self(x)) for x in self.source.carrier})


def identity_hom(M: FiniteOpcm) -> Hom:
    return Hom(M, M, {x: x for x in M.carrier})


def trivial_hom(M: FiniteOpcm, N: FiniteOpcm) -> Hom:
    """The map that forgets everything: constant zero."""
    return Hom(M, N, {x: N.zero for x in M.carrier})


def _check_total(f: Hom) -> None:
    for x in f.source.carrier:
        if x not in f.mapping:
            raise StructuralError(f"map is undefined at {x!r}")
        if f.mapping[x] not in f.target.elements:
            raise StructuralError(f"image {f.mapping[x]!r} of {x!r} is outside the target")


def check_hom(f: Hom) -> LawReport:
    """HOM1 monotone, HOM2 zero preserved, HOM3 combine preserved (with definedness)."""
    _check_total(f)
    M, N = f.source, f.target
    report = LawReport("homomorphism")
    h1 = report.law("HOM1")
    for x, y in sorted(M.order.pairs, key=sort_key):
        h1.check(N.leq(f(x), f(y)), (x, y))
    h2 = report.law("HOM2")
    h2.same(N, f(M.zero), N.zero, (M.zero,))
    h3 = report.law("HOM3")
    for (x, y), z in sorted(M.table.items(), key=lambda kv: sort_key(kv[0])):
        fxy = N.combine(f(x), f(y))
        if fxy is None:
            h3.check(False, (x, y))
        else:
            h3.same(N, f(z), fxy, (x, y))
    return report


def check_embedding(f: Hom) -> bool:
    """Order-reflecting as well as order-preserving."""
    if not check_hom(f).ok:
        raise PreconditionError("not a homomorphism")
    M, N = f.source, f.target
    return all(N.leq(f(x), f(y)) == M.leq(x, y) for x, y in cartesian(M.carrier, repeat=2))


def is_isomorphism(f: Hom) -> bool:
    images = {f(x) for x in f.source.carrier}
    return check_embedding(f) and len(images) == len(f.source) == len(f.target)


# -- changes of domain ------------------------------------------------------


@dataclass(frozen=True)
class GaloisConnection:
    """A homomorphism ``lower: M -> N`` with a monotone ``upper: N -> M``."""

    lower: Hom
    upper: Mapping

    @property
    def source(self) -> FiniteOpcm:
        return self.lower.source

    @property
    def target(self) -> FiniteOpcm:
        return self.lower.target

    def restrict(self, y):
        return self.upper[y]

    def closure(self, x):
        return self.upper[self.lower(x)]


def synthesize_upper(f: Hom) -> dict:
    """Upper adjoint of f: y maps to a greatest x with ``f(x) <= y``.

    Raises NoAdjointError when some such set has no greatest element.
    """
    M, N = f.source, f.target
    upper = {}
    for y in N.carrier:
        below = [x for x in M.carrier if N.leq(f(x), y)]
        tops = [x for x in below if all(M.leq(w, x) for w in below)]
        if not tops:
            raise NoAdjointError(f"no greatest element maps below {y!r}")
        upper[y] = min(tops, key=sort_key)
    return upper


def change_of_domain(f: Hom) -> GaloisConnection:
    return GaloisConnection(f, synthesize_upper(f))


def check_galois(gc: GaloisConnection) -> LawReport:
    """Adjunction on all pairs, plus the closure-operator laws it implies."""
    M, N = gc.source, gc.target
    report = check_hom(gc.lower)
    report.subject = "Galois connection"
    for y in N.carrier:
        if y not in gc.upper:
            raise StructuralError(f"upper adjoint is undefined at {y!r}")
        if gc.upper[y] not in M.elements:
            raise StructuralError(f"upper image of {y!r} is outside the source")
    mono = report.law("upper-monotone")
    for y1, y2 in sorted(N.order.pairs, key=sort_key):
        mono.check(M.leq(gc.upper[y1], gc.upper[y2]), (y1, y2))
    adj = report.law("adjunction")
    for x, y in cartesian(M.carrier, N.carrier):
        adj.check(N.leq(gc.lower(x), y) == M.leq(x, gc.upper[y]), (x, y))
    ext = report.law("closure-extensive")
    idem = report.law("closure-idempotent")
    cmono = report.law("closure-monotone")
    for x in M.carrier:
        cx = gc.closure(x)
        ext.check(M.leq(x, cx), (x,))
        idem.check(M.leq(gc.closure(cx), cx), (x,))
    for x1, x2 in sorted(M.order.pairs, key=sort_key):
        cmono.check(M.leq(gc.closure(x1), gc.closure(x2)), (x1, x2))
    return report


def compose_galois(gc1: GaloisConnection, gc2: GaloisConnection) -> GaloisConnection:
    """``gc2 . gc1``: lowers compose forwards, uppers backwards."""
    if gc1.target != gc2.source:
        raise StructuralError("cannot compose: codomain and domain differ")
    lower = gc1.lower.then(gc2.lower)
    upper = {z: gc1.upper[gc2.upper[z]] for z in gc2.target.carrier}
    return GaloisConnection(lower, upper)


def identity_galois(M: FiniteOpcm) -> GaloisConnection:
    return GaloisConnection(identity_hom(M), {x: x for x in M.carrier})


def preimage_galois(f: Mapping, codomain=None) -> GaloisConnection:
    """Preimage ``P+Y -> P+X`` paired with forward image, for a surjection ``f: X -> Y``."""
    X = frozenset(f)
    Y = frozenset(f.values()) if codomain is None else frozenset(codomain)
    missed = Y - set(f.values())
    if missed:
        raise PreconditionError(f"map is not surjective; misses {sorted(missed, key=sort_key)!r}")
    for x in X:
        if f[x] not in Y:
            raise StructuralError(f"{x!r} maps outside the codomain")
    PY, PX = possibility_of_set(Y), possibility_of_set(X)
    lower = Hom(PY, PX, {V: frozenset(x for x in X if f[x] in V) for V in PY.carrier})
    upper = {U: frozenset(f[x] for x in U) for U in PX.carrier}
    return GaloisConnection(lower, upper)


@dataclass(frozen=True)
class Comparison:
    """Outcome of an inequality check ``lhs <= rhs``.

    ``status`` is one of "equal", "strict", "violated" or "vacuous".
    """

    status: str
    lhs: Any = None
    rhs: Any = None

    @property
    def holds(self) -> bool:
        return self.status != "violated"

    def __bool__(self) -> bool:
        return self.holds


def _compare(M: FiniteOpcm, lhs, rhs) -> Comparison:
    if lhs is None or rhs is None:
        return Comparison("vacuous", lhs, rhs)
    if not M.leq(lhs, rhs):
        return Comparison("violated", lhs, rhs)
    return Comparison("equal" if M.leq(rhs, lhs) else "strict", lhs, rhs)


def check_extension_inequality(gc: GaloisConnection, x, y) -> Comparison:
    """Compare ``x (+) f*(y)`` with ``f*(f(x) (+) y)`` in the source."""
    M, N = gc.source, gc.target
    M.order.require(x)
    N.order.require(y)
    lhs = M.combine(x, gc.upper[y])
    fx_y = N.combine(gc.lower(x), y)
    rhs = None if fx_y is None else gc.upper[fx_y]
    return _compare(M, lhs, rhs)


# -- linking passages -------------------------------------------------------


@dataclass(frozen=True)
class LinkingPassage:
    """Common domain K mapped into M1 and M2 (g1, g2), both mapped into N (f1, f2)."""

    g1: GaloisConnection
    g2: GaloisConnection
    f1: GaloisConnection
    f2: GaloisConnection

    def __post_init__(self):
        if self.g1.source != self.g2.source:
            raise StructuralError("g1 and g2 must share the common domain")
        if self.g1.target != self.f1.source or self.g2.target != self.f2.source:
            raise StructuralError("g_i must land where f_i starts")
        if self.f1.target != self.f2.target:
            raise StructuralError("f1 and f2 must share the joint domain")

    @property
    def K(self) -> FiniteOpcm:
        return self.g1.source

    @property
    def M1(self) -> FiniteOpcm:
        return self.f1.source

    @property
    def M2(self) -> FiniteOpcm:
        return self.f2.source

    @property
    def N(self) -> FiniteOpcm:
        return self.f1.target


def check_linking_passage(lp: LinkingPassage, check_connections: bool = True) -> LawReport:
    report = LawReport("linking passage")
    if check_connections:
        for name in ("g1", "g2", "f1", "f2"):
            sub = check_galois(getattr(lp, name))
            if not sub.ok:
                raise PreconditionError(f"{name} is not a change of domain: {sub.failed()}")
    square = report.law("commutes")
    for k in lp.K.carrier:
        square.same(lp.N, lp.f1.lower(lp.g1.lower(k)), lp.f2.lower(lp.g2.lower(k)), (k,))
    return report


def link(lp: LinkingPassage, x1, x2):
    """Transfer both pieces of data into N and combine them there."""
    lp.M1.order.require(x1)
    lp.M2.order.require(x2)
    a, b = lp.f1.lower(x1), lp.f2.lower(x2)
    z = lp.N.combine(a, b)
    if z is None:
        raise InconsistentLinkage(f"{x1!r} and {x2!r} cannot be linked consistently")
    return z


def two_routes(lp: LinkingPassage, x) -> tuple:
    """``(g2 . g1*(x), f2* . f1(x))``: x moved to M2 through K and through N."""
    lp.M1.order.require(x)
    return lp.g2.lower(lp.g1.upper[x]), lp.f2.upper[lp.f1.lower(x)]


def check_two_routes(lp: LinkingPassage, x) -> Comparison:
    """The route through N keeps at least as much as the route through K.

    Checks ``g2 . g1*(x) <= f2* . f1(x)``: from ``g1 g1*(x) <= x`` we get
    ``f2 g2 g1*(x) = f1 g1 g1*(x) <= f1(x)`` and adjointness of f2 finishes.
    """
    via_k, via_n = two_routes(lp, x)
    return _compare(lp.M2, via_k, via_n)
