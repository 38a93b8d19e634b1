"""Concrete OPCMs: flat algebras, prefix codes and possibility powersets."""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable

from .errors import PreconditionError, StructuralError
from .limits import ensure_within_cap
from .opcm import FiniteOpcm, LawReport
from .order import Preorder, canonical, sort_key

BOTTOM = "⊥"

# Codes that appear in the worked postcode examples, with the empty string
# standing for "everywhere".
POST_CODES = (
    "",
    "SA",
    "SA1",
    "SA2",
    "SA1 3",
    "SA2 8",
    "SA1 3LP",
    "SA2 8PP",
    "SA2 8PW",
    "SA2 8QF",
)


# -- flat -------------------------------------------------------------------


def flat(X: Iterable) -> FiniteOpcm:
    """X plus an unknown element below everything; combine is the join."""
    X = canonical(X)
    if not X:
        raise PreconditionError("flat algebra needs a non-empty set")
    if BOTTOM in X:
        raise StructuralError(f"{BOTTOM!r} is reserved for the unknown element")
    carrier = (BOTTOM,) + X
    pairs = {(BOTTOM, x) for x in carrier} | {(x, x) for x in X}
    table = {(BOTTOM, BOTTOM): BOTTOM}
    for x in X:
        table[(BOTTOM, x)] = x
        table[(x, BOTTOM)] = x
        table[(x, x)] = x
    return FiniteOpcm(Preorder(canonical(carrier), frozenset(pairs)), BOTTOM, table)


# -- prefix codes -----------------------------------------------------------

_POSTCODE = re.compile(r"^([A-Z]{1,2})(\d[A-Z\d]?)?(?: (\d)([A-Z]{2})?)?$")


def postcode_levels(code: str) -> list[str]:
    """Area, district, sector and unit prefixes of a (partial) UK postcode.

    >>> postcode_levels("SA2 8PP")
    ['SA', 'SA2', 'SA2 8', 'SA2 8PP']
    """
    if code == "":
        return []
    m = _POSTCODE.match(code)
    if m is None:
        raise StructuralError(f"{code!r} is not a partial postcode")
    area, district, sector, unit = m.groups()
    if district is None and sector is not None:
        raise StructuralError(f"{code!r} skips the district")
    levels = [area]
    if district:
        levels.append(area + district)
    if sector:
        levels.append(f"{area}{district} {sector}")
    if unit:
        levels.append(f"{area}{district} {sector}{unit}")
    return levels


@dataclass(frozen=True)
class PrefixCodeSet:
    """A finite set of codes ordered by prefix, always containing the empty code.

    ``levels`` maps a code to its declared-level prefixes (outermost first,
    ending with the code itself); every such prefix must be a member.
    When omitted, only the presence of the empty code is enforced.
    """

    codes: frozenset
    levels: Callable[[str], list] | None = None

    def __post_init__(self):
        codes = frozenset(self.codes) | {""}
        object.__setattr__(self, "codes", codes)
        if self.levels is not None:
            for c in codes:
                for p in self.levels(c):
                    if p not in codes:
                        raise StructuralError(f"prefix {p!r} of {c!r} is missing")

    @property
    def alphabet(self) -> frozenset:
        return frozenset("".join(self.codes))

    def leaves(self) -> frozenset:
        """Codes with no proper extension in the set."""
        return frozenset(
            c for c in self.codes if not any(d != c and d.startswith(c) for d in self.codes)
        )

    def realize(self, code: str, leaves: Iterable[str] | None = None) -> frozenset:
        """The leaves a partial code stands for."""
        leaves = self.leaves() if leaves is None else frozenset(leaves)
        return frozenset(p for p in leaves if p.startswith(code))


POST = PrefixCodeSet(frozenset(POST_CODES), postcode_levels)


def load_prefix_codes(path: str | Path, levels=None) -> PrefixCodeSet:
    """One code per line; the empty code is implicit and blank lines are skipped."""
    text = Path(path).read_text(encoding="utf-8")
    codes = {ln.strip() for ln in text.splitlines() if ln.strip()}
    codes.discard("ε")
    return PrefixCodeSet(frozenset(codes), levels)


def prefix_opcm(codes: PrefixCodeSet) -> FiniteOpcm:
    """Prefix order, empty code as zero, and combine = the longer of two
    comparable codes."""

    def op(x: str, y: str):
        if y.startswith(x):
            return y
        if x.startswith(y):
            return x
        return None

    return FiniteOpcm.from_function(codes.codes, lambda x, y: y.startswith(x), "", op)


def post_opcm() -> FiniteOpcm:
    return prefix_opcm(POST)


# -- possibility over a set -------------------------------------------------


def nonempty_subsets(X: Iterable, max_size: int | None = None) -> list[frozenset]:
    X = canonical(X)
    top = len(X) if max_size is None else min(max_size, len(X))
    return [frozenset(c) for k in range(1, top + 1) for c in combinations(X, k)]


def possibility_of_set(X: Iterable, max_carrier: int | None = None) -> FiniteOpcm:
    """Non-empty subsets under reverse inclusion, combined by intersection."""
    X = frozenset(X)
    if not X:
        raise PreconditionError("possibility powerset needs a non-empty set")
    ensure_within_cap(2 ** len(X) - 1, f"non-empty powerset of a {len(X)}-set", max_carrier)
    return _possibility_of_set(X)


_POW_CACHE: dict = {}


def _possibility_of_set(X: frozenset) -> FiniteOpcm:
    cached = _POW_CACHE.get(X)
    if cached is not None:
        return cached
    subsets = canonical(nonempty_subsets(X))
    pairs = frozenset((s, t) for s in subsets for t in subsets if t <= s)
    table = {}
    for s in subsets:
        for t in subsets:
            u = s & t
            if u:
                table[(s, t)] = u
    M = FiniteOpcm(Preorder(subsets, pairs), X, table)
    _POW_CACHE[X] = M
    return M


# -- possibility over an OPCM -----------------------------------------------


def check_downward_closed(M: FiniteOpcm) -> LawReport:
    """``x <= x'`` and ``x' # y`` imply ``x # y``.  Truthiness via ``.ok``."""
    report = LawReport("downward closure")
    law = report.law("downward-closed")
    for x, x2 in sorted(M.order.pairs, key=sort_key):
        for y in M.carrier:
            if M.defined(x2, y):
                law.check(M.defined(x, y), (x, x2, y))
    return report


def is_downward_closed(M: FiniteOpcm) -> bool:
    return check_downward_closed(M).ok


def lifted_combine(M: FiniteOpcm, P: frozenset, Q: frozenset) -> frozenset | None:
    """All combinations of a member of P with a member of Q; None when there are none."""
    out = frozenset(
        z for x in P for y in Q if (z := M.table.get((x, y))) is not None
    )
    return out or None


def sharp_leq(M: FiniteOpcm, P: frozenset, Q: frozenset) -> bool:
    return all(any(M.leq(x, y) for x in P) for y in Q)


def possibility_of_opcm(
    M: FiniteOpcm,
    full_limit: int = 5,
    max_subset_size: int = 3,
    max_carrier: int | None = None,
) -> FiniteOpcm:
    """Non-empty subsets of an OPCM under the sharp lifting and pointwise combine.

    When M has more than ``full_limit`` elements only subsets of size at
    most ``max_subset_size`` are seeded, then closed under the lifted
    combine so the table stays total on its own carrier.
    """
    if not is_downward_closed(M):
        raise PreconditionError("possibility over an OPCM needs a downward-closed OPCM")
    if len(M) <= full_limit:
        seeds = nonempty_subsets(M.carrier)
    else:
        seeds = nonempty_subsets(M.carrier, max_subset_size)
    carrier = set(seeds) | {frozenset([M.zero])}
    frontier = list(carrier)
    while frontier:
        new = []
        for P in frontier:
            for Q in list(carrier):
                for R in (lifted_combine(M, P, Q), lifted_combine(M, Q, P)):
                    if R is not None and R not in carrier:
                        carrier.add(R)
                        new.append(R)
        ensure_within_cap(len(carrier), "possibility-over-OPCM carrier", max_carrier)
        frontier = new
    carrier = canonical(carrier)
    pairs = frozenset((P, Q) for P in carrier for Q in carrier if sharp_leq(M, P, Q))
    table = {}
    for P in carrier:
        for Q in carrier:
            R = lifted_combine(M, P, Q)
            if R is not None:
                table[(P, Q)] = R
    return FiniteOpcm(Preorder(carrier, pairs), frozenset([M.zero]), table)


def sub_opcm(M: FiniteOpcm, elements: Iterable) -> FiniteOpcm:
    """Restrict M to a subset that contains zero and is closed under combine."""
    keep = frozenset(elements)
    if M.zero not in keep:
        raise StructuralError("a sub-OPCM must contain zero")
    table = {}
    for (x, y), z in M.table.items():
        if x in keep and y in keep:
            if z not in keep:
                raise StructuralError(f"{x!r} (+) {y!r} = {z!r} leaves the subset")
            table[(x, y)] = z
    pairs = frozenset((x, y) for x, y in M.order.pairs if x in keep and y in keep)
    return FiniteOpcm(Preorder(canonical(keep), pairs), M.zero, table)
