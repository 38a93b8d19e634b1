"""Ordered partial commutative monoids over explicit finite tables.

Partiality is table absence: ``x (+) y`` is defined exactly when ``(x, y)``
is a key of :attr:`FiniteOpcm.table`.  All laws are checked up to
information equivalence, never raw equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as cartesian
from typing import Any, Callable, Iterable, Mapping

from .errors import PreconditionError, StructuralError
from .limits import ensure_within_cap
from .order import InfoClass, Preorder, canonical, is_preorder, quotient, sort_key


@dataclass(frozen=True)
class FiniteOpcm:
    order: Preorder
    zero: Any
    table: Mapping[tuple, Any]

    @classmethod
    def from_function(
        cls,
        carrier: Iterable,
        leq: Callable[[Any, Any], bool],
        zero,
        op: Callable[[Any, Any], Any],
    ) -> FiniteOpcm:
        """Tabulate ``op`` over the carrier; ``op`` returns None where undefined."""
        order = Preorder.from_predicate(carrier, leq)
        table = {}
        for x, y in cartesian(order.carrier, repeat=2):
            z = op(x, y)
            if z is not None:
                table[(x, y)] = z
        return cls(order, zero, table)

    @property
    def carrier(self) -> tuple:
        return self.order.carrier

    @cached_property
    def elements(self) -> frozenset:
        return self.order.elements

    def __len__(self) -> int:
        return len(self.order.carrier)

    def leq(self, x, y) -> bool:
        return (x, y) in self.order.pairs

    def equiv(self, x, y) -> bool:
        return self.order.equiv(x, y)

    def defined(self, x, y) -> bool:
        return (x, y) in self.table

    def combine(self, x, y):
        """``x (+) y``, or None when undefined."""
        return self.table.get((x, y))


def validate_structure(M: FiniteOpcm) -> None:
    """Raise StructuralError unless every referenced element is in the carrier."""
    members = M.elements
    if None in members:
        raise StructuralError("None cannot be a carrier element")
    if len(members) != len(M.carrier):
        raise StructuralError("carrier has duplicate elements")
    if M.zero not in members:
        raise StructuralError(f"zero {M.zero!r} is not in the carrier")
    for x, y in M.order.pairs:
        if x not in members or y not in members:
            raise StructuralError(f"order pair {(x, y)!r} leaves the carrier")
    for (x, y), z in M.table.items():
        if x not in members or y not in members or z not in members:
            raise StructuralError(f"combine entry {(x, y)!r} -> {z!r} leaves the carrier")


# -- law reports ------------------------------------------------------------


@dataclass
class LawResult:
    name: str
    checked: int = 0
    witnesses: list = field(default_factory=list)
    up_to_equiv: int = 0
    unmet: bool = False
    note: str = ""

    @property
    def status(self) -> str:
        if self.witnesses:
            return "fail"
        if self.unmet:
            return "unmet"
        return "pass"

    @property
    def passed(self) -> bool:
        return not self.witnesses

    def check(self, ok: bool, witness: tuple) -> bool:
        self.checked += 1
        if not ok:
            self.witnesses.append(witness)
        return ok

    def same(self, M: FiniteOpcm, a, b, witness: tuple) -> bool:
        """Record an up-to-equivalence comparison."""
        ok = a == b or M.equiv(a, b)
        if ok and a != b:
            self.up_to_equiv += 1
        return self.check(ok, witness)


@dataclass
class LawReport:
    """Itemised verdicts of an exhaustive law check."""

    subject: str
    laws: dict = field(default_factory=dict)

    def law(self, name: str) -> LawResult:
        if name not in self.laws:
            self.laws[name] = LawResult(name)
        return self.laws[name]

    def __getitem__(self, name: str) -> LawResult:
        return self.laws[name]

    def __contains__(self, name: str) -> bool:
        return name in self.laws

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.laws.values())

    def failed(self) -> list[str]:
        return [name for name, r in self.laws.items() if not r.passed]

    def merge(self, other: LawReport, prefix: str = "") -> LawReport:
        for name, r in other.laws.items():
            self.laws[prefix + name] = r
        return self

    def to_dict(self, render: Callable[[Any], str] | None = None) -> dict:
        render = render or render_element
        return {
            "subject": self.subject,
            "ok": self.ok,
            "laws": {
                name: {
                    "status": r.status,
                    "checked": r.checked,
                    "up_to_equiv": r.up_to_equiv,
                    "note": r.note,
                    "witnesses": [[render(w) for w in wit] for wit in r.witnesses],
                }
                for name, r in self.laws.items()
            },
        }

    def text(self, max_witnesses: int = 5) -> str:
        lines = [f"{self.subject}: {'ok' if self.ok else 'FAILED'}"]
        width = max((len(n) for n in self.laws), default=0)
        for name, r in self.laws.items():
            extra = f", {r.up_to_equiv} up to equivalence" if r.up_to_equiv else ""
            line = f"  {name.ljust(width)}  {r.status:5}  ({r.checked} checked{extra})"
            if r.note:
                line += f"  {r.note}"
            lines.append(line)
            for wit in r.witnesses[:max_witnesses]:
                lines.append("      witness: " + ", ".join(render_element(w) for w in wit))
            if len(r.witnesses) > max_witnesses:
                lines.append(f"      ... {len(r.witnesses) - max_witnesses} more")
        return "\n".join(lines)


def render_element(x: Any) -> str:
    """Injective human-readable label for an element."""
    if x == "":
        return "ε"
    if isinstance(x, str):
        return x
    if isinstance(x, frozenset):
        return "{" + ",".join(render_element(e) for e in sorted(x, key=sort_key)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(render_element(e) for e in x) + ")"
    return repr(x)


# -- the axioms -------------------------------------------------------------


def check_opcm_laws(
    M: FiniteOpcm, strict_def3: bool = False, max_carrier: int | None = None
) -> LawReport:
    """Exhaustively check the preorder and OPCM1-OPCM4 over the whole carrier.

    OPCM3 is checked in the stated direction (hypotheses ``y # z`` and
    ``x # (y+z)``) and, unless ``strict_def3``, also in the mirrored one
    (hypotheses ``x # y`` and ``(x+y) # z``).
    """
    validate_structure(M)
    ensure_within_cap(len(M), "OPCM carrier", max_carrier)
    C = M.carrier
    table = M.table
    report = LawReport("OPCM laws")

    pre = report.law("preorder")
    pre.checked = len(C)
    if not is_preorder(C, M.order.pairs):
        for x in C:
            pre.check(M.leq(x, x), ("reflexive", x))
        for x, y in sorted(M.order.pairs, key=sort_key):
            for z in C:
                if M.leq(y, z):
                    pre.check(M.leq(x, z), ("transitive", x, y, z))

    law1 = report.law("OPCM1")
    for x in C:
        z = table.get((M.zero, x))
        if z is None:
            law1.check(False, (M.zero, x))
        else:
            law1.same(M, z, x, (M.zero, x))

    law2 = report.law("OPCM2")
    for x, y in cartesian(C, repeat=2):
        xy = table.get((x, y))
        if xy is None:
            continue
        yx = table.get((y, x))
        if yx is None:
            law2.check(False, (x, y))
        else:
            law2.same(M, xy, yx, (x, y))

    law3 = report.law("OPCM3")
    for x, y, z in cartesian(C, repeat=3):
        yz = table.get((y, z))
        if yz is not None:
            x_yz = table.get((x, yz))
            if x_yz is not None:
                xy = table.get((x, y))
                xy_z = None if xy is None else table.get((xy, z))
                if xy_z is None:
                    law3.check(False, (x, y, z))
                else:
                    law3.same(M, x_yz, xy_z, (x, y, z))
        if strict_def3:
            continue
        xy = table.get((x, y))
        if xy is not None:
            xy_z = table.get((xy, z))
            if xy_z is not None:
                x_yz = None if yz is None else table.get((x, yz))
                if x_yz is None:
                    law3.check(False, (x, y, z))
                else:
                    law3.same(M, x_yz, xy_z, (x, y, z))
    if not strict_def3:
        law3.note = "both directions"

    law4 = report.law("OPCM4")
    for x1, x2 in sorted(M.order.pairs, key=sort_key):
        for y in C:
            a = table.get((x1, y))
            b = table.get((x2, y))
            if a is not None and b is not None:
                law4.check(M.leq(a, b), (x1, x2, y))
    return report


def is_opcm(M: FiniteOpcm, **kwargs) -> bool:
    return check_opcm_laws(M, **kwargs).ok


# -- algebraic ordering -----------------------------------------------------


def algebraic_leq(M: FiniteOpcm, x, y) -> bool:
    """Is there some z with ``x (+) z`` defined and equivalent to ``y``?"""
    M.order.require(x, y)
    for z in M.carrier:
        w = M.table.get((x, z))
        if w is not None and (w == y or M.equiv(w, y)):
            return True
    return False


def algebraic_opcm(M: FiniteOpcm) -> FiniteOpcm:
    """Re-order a PCM by its algebraic ordering."""
    if any(x != y for x, y in M.order.pairs):
        raise PreconditionError("algebraic ordering is defined here for PCMs (discrete order) only")
    validate_structure(M)
    pairs = frozenset(
        (x, M.table[(x, z)]) for x in M.carrier for z in M.carrier if (x, z) in M.table
    )
    return FiniteOpcm(Preorder(M.carrier, pairs | {(x, x) for x in M.carrier}), M.zero, dict(M.table))


def check_algebraic_opcm(
    M: FiniteOpcm, pairwise: bool = False, max_carrier: int | None = None
) -> LawReport:
    """Check that a PCM under its algebraic ordering is an OPCM with zero least.

    The monotonicity item takes the literal hypothesis ``x # x`` by default;
    ``pairwise=True`` drops it and relies on ``x' # y'`` alone.
    """
    A = algebraic_opcm(M)
    report = check_opcm_laws(A, max_carrier=max_carrier)
    report.subject = "algebraic ordering"
    least = report.law("zero-least")
    for x in A.carrier:
        least.check(A.leq(A.zero, x), (A.zero, x))

    mono = report.law("pair-monotone")
    mono.note = "pairwise reading" if pairwise else "literal reading (x # x)"
    ups = {x: A.order.up(x) for x in A.carrier}
    for x, y in cartesian(A.carrier, repeat=2):
        if not pairwise and not A.defined(x, x):
            continue
        for x2 in ups[x]:
            for y2 in ups[y]:
                top = A.combine(x2, y2)
                if top is None:
                    continue
                xy = A.combine(x, y)
                mono.check(xy is not None and A.leq(xy, top), (x, y, x2, y2))
    return report


def check_compatibility(M: FiniteOpcm) -> LawReport:
    """When zero is least: algebraic order implies information order, and
    both arguments lie below their combination."""
    validate_structure(M)
    report = LawReport("compatibility")
    alg = report.law("algebraic-implies-info")
    upper = report.law("combine-is-upper-bound")
    if not all(M.leq(M.zero, x) for x in M.carrier):
        for r in (alg, upper):
            r.unmet = True
            r.note = "hypothesis unmet: zero is not least"
        return report
    for x, y in cartesian(M.carrier, repeat=2):
        if algebraic_leq(M, x, y):
            alg.check(M.leq(x, y), (x, y))
        xy = M.combine(x, y)
        if xy is not None:
            upper.check(M.leq(x, xy) and M.leq(y, xy), (x, y))
    return report


# -- products ---------------------------------------------------------------


def product(M1: FiniteOpcm, M2: FiniteOpcm) -> FiniteOpcm:
    carrier = canonical(cartesian(M1.carrier, M2.carrier))
    pairs = frozenset(
        ((a1, a2), (b1, b2))
        for (a1, b1) in M1.order.pairs
        for (a2, b2) in M2.order.pairs
    )
    table = {}
    for (x1, y1), z1 in M1.table.items():
        for (x2, y2), z2 in M2.table.items():
            table[((x1, x2), (y1, y2))] = (z1, z2)
    return FiniteOpcm(Preorder(carrier, pairs), (M1.zero, M2.zero), table)


def projections(M1: FiniteOpcm, M2: FiniteOpcm):
    """The two projection homomorphisms out of ``product(M1, M2)``."""
    from .morphisms import Hom

    P = product(M1, M2)
    return (
        Hom(P, M1, {p: p[0] for p in P.carrier}),
        Hom(P, M2, {p: p[1] for p in P.carrier}),
    )


def check_product_universal(M1: FiniteOpcm, M2: FiniteOpcm, N: FiniteOpcm, f1, f2) -> bool:
    """The pairing of two homomorphisms out of N is the unique mediating map."""
    from .morphisms import Hom, check_hom

    for name, f, target in (("f1", f1, M1), ("f2", f2, M2)):
        if f.source != N or f.target != target:
            raise StructuralError(f"{name} does not run from N to its factor")
        if not check_hom(f).ok:
            raise PreconditionError(f"{name} is not a homomorphism")
    P = product(M1, M2)
    h = Hom(N, P, {x: (f1(x), f2(x)) for x in N.carrier})
    if not check_hom(h).ok:
        return False
    pi1, pi2 = projections(M1, M2)
    if any(pi1(h(x)) != f1(x) or pi2(h(x)) != f2(x) for x in N.carrier):
        return False
    # Uniqueness: the projections are jointly injective, so any map k with
    # pi_i . k = f_i has k(x) = (f1 x, f2 x) = h(x).
    seen = {}
    for p in P.carrier:
        key = (pi1(p), pi2(p))
        if key in seen:
            return False
        seen[key] = p
    return True


# -- quotient ---------------------------------------------------------------


def quotient_opcm(M: FiniteOpcm) -> FiniteOpcm:
    """Collapse equivalent elements into a partially ordered OPCM."""
    validate_structure(M)
    order, proj = quotient(M.order)
    table: dict = {}
    for (x, y), z in M.table.items():
        key = (proj[x], proj[y])
        cls = proj[z]
        prev = table.setdefault(key, cls)
        if prev != cls:
            raise StructuralError(
                f"representatives of {key[0].representative!r} and {key[1].representative!r} "
                f"combine into different classes {prev.representative!r} and {cls.representative!r}"
            )
    return FiniteOpcm(order, proj[M.zero], table)


def class_of(Q: FiniteOpcm, x) -> InfoClass:
    for c in Q.carrier:
        if x in c.members:
            return c
    raise StructuralError(f"{x!r} belongs to no class")


# -- canonical text dump ----------------------------------------------------

DUMP_HEADER = "opcm v1"


def dump_opcm(M: FiniteOpcm) -> str:
    """Canonical dump: sorted elements, order pairs and combine triples.

    Every element is written as a JSON string label, one record per line.
    """
    validate_structure(M)
    labels = {x: render_element(x) for x in M.carrier}
    if len(set(labels.values())) != len(labels):
        raise StructuralError("element labels collide; cannot dump")
    enc = lambda x: json.dumps(labels[x], ensure_ascii=False)  # noqa: E731
    lines = [DUMP_HEADER, f"zero {enc(M.zero)}"]
    lines += [f"elem {enc(x)}" for x in M.carrier]
    lines += [
        f"leq {enc(x)} {enc(y)}" for x, y in sorted(M.order.pairs, key=sort_key)
    ]
    lines += [
        f"comb {enc(x)} {enc(y)} {enc(z)}"
        for (x, y), z in sorted(M.table.items(), key=lambda kv: sort_key(kv[0]))
    ]
    return "\n".join(lines) + "\n"


def load_opcm(text: str) -> FiniteOpcm:
    """Parse :func:`dump_opcm` output; elements come back as string labels.

    The result is not law-checked, only structurally validated.
    """
    decoder = json.JSONDecoder()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0].strip() != DUMP_HEADER:
        raise StructuralError(f"missing {DUMP_HEADER!r} header")
    zero = None
    elems: list = []
    pairs: set = set()
    table: dict = {}
    for lineno, line in enumerate(lines[1:], start=2):
        tag, _, rest = line.partition(" ")
        args = []
        rest = rest.strip()
        while rest:
            try:
                value, end = decoder.raw_decode(rest)
            except json.JSONDecodeError as exc:
                raise StructuralError(f"line {lineno}: {exc}") from None
            if not isinstance(value, str):
                raise StructuralError(f"line {lineno}: labels must be JSON strings")
            args.append(value)
            rest = rest[end:].lstrip()
        arity = {"zero": 1, "elem": 1, "leq": 2, "comb": 3}.get(tag)
        if arity is None or len(args) != arity:
            raise StructuralError(f"line {lineno}: malformed record {line!r}")
        if tag == "zero":
            zero = args[0]
        elif tag == "elem":
            elems.append(args[0])
        elif tag == "leq":
            pairs.add(tuple(args))
        else:
            key = (args[0], args[1])
            if key in table:
                raise StructuralError(f"line {lineno}: duplicate combine entry {key!r}")
            table[key] = args[2]
    if zero is None:
        raise StructuralError("no zero record")
    M = FiniteOpcm(Preorder(canonical(elems), frozenset(pairs)), zero, table)
    validate_structure(M)
    return M
