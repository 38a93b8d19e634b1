"""Finite preorders, information equivalence, powerset liftings and quotients.

An information order is any preorder: ``x <= y`` reads "y is at least as
informative as x".  Carriers are finite and explicitly enumerated so that
every law can be checked by brute force.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Any, Callable, Hashable, Iterable, Literal, NamedTuple

from .errors import PreconditionError, StructuralError

Element = Hashable
LiftMode = Literal["flat", "sharp", "natural"]
LIFT_MODES: tuple[LiftMode, ...] = ("flat", "sharp", "natural")


def sort_key(x: Any) -> tuple:
    """Total, deterministic sort key for the element types used here.

    Works across ints, strings, tuples (including named tuples) and
    frozensets, which have no native mutual ordering.
    """
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, (int, float)):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(sort_key(e) for e in x))
    if isinstance(x, frozenset):
        return (3, len(x), tuple(sorted(sort_key(e) for e in x)))
    return (4, repr(x))


def canonical(xs: Iterable[Element]) -> tuple:
    """Deduplicate and sort."""
    return tuple(sorted(set(xs), key=sort_key))


@dataclass(frozen=True)
class Preorder:
    """A finite carrier with an explicit relation.

    The raw constructor does not validate; use :func:`is_preorder` or one of
    the classmethod constructors, which do.
    """

    carrier: tuple
    pairs: frozenset

    @classmethod
    def from_pairs(cls, carrier: Iterable[Element], pairs: Iterable[tuple]) -> Preorder:
        carrier = canonical(carrier)
        pairs = frozenset(pairs)
        if not is_preorder(carrier, pairs):
            raise StructuralError("relation is not reflexive and transitive")
        return cls(carrier, pairs)

    @classmethod
    def from_predicate(
        cls, carrier: Iterable[Element], leq: Callable[[Any, Any], bool], validate: bool = True
    ) -> Preorder:
        carrier = canonical(carrier)
        pairs = frozenset((x, y) for x in carrier for y in carrier if leq(x, y))
        if validate and not is_preorder(carrier, pairs):
            raise StructuralError("predicate does not define a preorder")
        return cls(carrier, pairs)

    @classmethod
    def discrete(cls, carrier: Iterable[Element]) -> Preorder:
        carrier = canonical(carrier)
        return cls(carrier, frozenset((x, x) for x in carrier))

    @classmethod
    def closure_of(cls, carrier: Iterable[Element], pairs: Iterable[tuple]) -> Preorder:
        """Reflexive-transitive closure of ``pairs``."""
        carrier = canonical(carrier)
        return cls(carrier, reflexive_transitive_closure(carrier, pairs))

    @cached_property
    def elements(self) -> frozenset:
        return frozenset(self.carrier)

    def leq(self, x, y) -> bool:
        return (x, y) in self.pairs

    def equiv(self, x, y) -> bool:
        return (x, y) in self.pairs and (y, x) in self.pairs

    def up(self, x) -> frozenset:
        return frozenset(y for y in self.carrier if (x, y) in self.pairs)

    def down(self, y) -> frozenset:
        return frozenset(x for x in self.carrier if (x, y) in self.pairs)

    def is_antisymmetric(self) -> bool:
        return all(x == y or (y, x) not in self.pairs for x, y in self.pairs)

    def require(self, *xs) -> None:
        for x in xs:
            if x not in self.elements:
                raise StructuralError(f"element {x!r} is not in the carrier")


def reflexive_transitive_closure(carrier: Iterable[Element], pairs: Iterable[tuple]) -> frozenset:
    carrier = list(carrier)
    rel = set(pairs) | {(x, x) for x in carrier}
    succ: dict = {x: set() for x in carrier}
    for x, y in rel:
        succ.setdefault(x, set()).add(y)
    # Warshall over the successor sets.
    for k in carrier:
        for i in carrier:
            if k in succ[i]:
                succ[i] |= succ[k]
    return frozenset((x, y) for x in carrier for y in succ[x])


def is_preorder(carrier: Iterable[Element], pairs: Iterable[tuple]) -> bool:
    """True iff ``pairs`` is reflexive and transitive on ``carrier``."""
    carrier = list(carrier)
    members = set(carrier)
    rel = set(pairs)
    for x, y in rel:
        if x not in members or y not in members:
            raise StructuralError(f"pair {(x, y)!r} mentions an element outside the carrier")
    if any((x, x) not in rel for x in carrier):
        return False
    succ: dict = {x: set() for x in carrier}
    for x, y in rel:
        succ[x].add(y)
    for x, y in rel:
        if not succ[y] <= succ[x]:
            return False
    return True


def equiv(P: Preorder, x, y) -> bool:
    P.require(x, y)
    return P.equiv(x, y)


def _subset(P: Preorder, S: Iterable[Element], name: str) -> frozenset:
    S = frozenset(S)
    if not S:
        raise PreconditionError(f"{name} must be non-empty")
    P.require(*S)
    return S


def lift(P: Preorder, mode: LiftMode, S: Iterable[Element], T: Iterable[Element]) -> bool:
    """Compare two non-empty subsets under one of the three liftings.

    flat:    every x in S has some y in T above it (T enriches S)
    sharp:   every y in T has some x in S below it (S adulterates T)
    natural: both.
    """
    S = _subset(P, S, "S")
    T = _subset(P, T, "T")
    if mode == "flat":
        return _flat(P, S, T)
    if mode == "sharp":
        return _sharp(P, S, T)
    if mode == "natural":
        return _flat(P, S, T) and _sharp(P, S, T)
    raise PreconditionError(f"unknown lifting mode {mode!r}; expected one of {LIFT_MODES}")


def _flat(P: Preorder, S: frozenset, T: frozenset) -> bool:
    return all(any(P.leq(x, y) for y in T) for x in S)


def _sharp(P: Preorder, S: frozenset, T: frozenset) -> bool:
    return all(any(P.leq(x, y) for x in S) for y in T)


def convex_hull(P: Preorder, S: Iterable[Element]) -> frozenset:
    """Everything lying between two members of S."""
    S = _subset(P, S, "S")
    return frozenset(
        a for a in P.carrier if any(P.leq(x, a) for x in S) and any(P.leq(a, y) for y in S)
    )


class InfoClass(NamedTuple):
    """An equivalence class of elements with the same information content."""

    representative: Any
    members: frozenset


def quotient(P: Preorder) -> tuple[Preorder, dict]:
    """Collapse equivalent elements; returns the class poset and the projection."""
    projection: dict = {}
    for x in P.carrier:
        if x in projection:
            continue
        members = frozenset(y for y in P.carrier if P.equiv(x, y))
        cls = InfoClass(min(members, key=sort_key), members)
        for y in members:
            projection[y] = cls
    classes = canonical(projection.values())
    pairs = frozenset(
        (c, d) for c, d in product(classes, repeat=2) if P.leq(c.representative, d.representative)
    )
    return Preorder(classes, pairs), projection
