"""Tabular data in the possibility representation.

A relation over attributes A is a non-empty set of tuples, read as the set
of possibilities one of which is true.  Rows are stored as plain tuples in
sorted attribute order so that a relation over A *is* an element of the
non-empty powerset of the product of A's domains.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError, StructuralError
from .grothendieck import GrothElem, IndexedFamily, groth_opcm, powerset_lattice
from .instances import possibility_of_set
from .morphisms import Hom, LinkingPassage, preimage_galois
from .opcm import LawReport
from .order import Preorder, canonical, sort_key

log = logging.getLogger(__name__)


# -- hierarchies ------------------------------------------------------------


@dataclass(frozen=True)
class Hierarchy:
    """A generalisation tree with named levels.

    ``parents[k]`` maps every value of level ``k + 1`` to its parent at
    level ``k``; level 0 holds the single root.
    """

    levels: tuple
    parents: tuple
    root: str = ""

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "parents", tuple(dict(p) for p in self.parents))
        if len(self.parents) != len(self.levels) - 1:
            raise StructuralError("need one parent map per level below the root")
        if len(set(self.levels)) != len(self.levels):
            raise StructuralError("level names must be distinct")
        above = {self.root}
        seen = {self.root}
        for k, mapping in enumerate(self.parents, start=1):
            for child, parent in mapping.items():
                if parent not in above:
                    raise StructuralError(
                        f"parent {parent!r} of {child!r} is not a value of level {k - 1}"
                    )
                if child in seen:
                    raise StructuralError(f"value {child!r} occurs on more than one level")
            above = set(mapping)
            seen |= above

    @classmethod
    def from_json(cls, obj: Mapping) -> Hierarchy:
        try:
            levels = obj["levels"]
            parents = obj.get("parents", [])
        except (KeyError, TypeError, AttributeError):
            raise StructuralError("hierarchy needs 'levels' and 'parents'") from None
        root = obj.get("root")
        if root is None:
            tops = {p for p in parents[0].values()} if parents else set()
            if len(tops) != 1:
                raise StructuralError("level 0 must be a single root")
            root = tops.pop()
        return cls(tuple(levels), tuple(parents), root)

    def to_json(self) -> dict:
        return {"levels": list(self.levels), "root": self.root, "parents": [dict(p) for p in self.parents]}

    def level_index(self, level: int | str) -> int:
        if isinstance(level, int) or (isinstance(level, str) and level.isdigit()):
            k = int(level)
            if not 0 <= k < len(self.levels):
                raise StructuralError(f"level {k} out of range 0..{len(self.levels) - 1}")
            return k
        try:
            return self.levels.index(level)
        except ValueError:
            raise StructuralError(f"unknown level {level!r}; have {list(self.levels)}") from None

    def values(self, level: int | str) -> frozenset:
        k = self.level_index(level)
        return frozenset([self.root]) if k == 0 else frozenset(self.parents[k - 1])

    def nodes(self) -> frozenset:
        out = {self.root}
        for p in self.parents:
            out |= set(p)
        return frozenset(out)

    def level_of(self, value) -> int:
        if value == self.root:
            return 0
        for k, p in enumerate(self.parents, start=1):
            if value in p:
                return k
        raise StructuralError(f"value {value!r} is not covered by the hierarchy")

    def ancestor(self, value, level: int | str):
        k = self.level_index(level)
        current, at = value, self.level_of(value)
        if at < k:
            raise StructuralError(f"{value!r} is at level {at}, above level {k}")
        while at > k:
            current = self.parents[at - 1][current]
            at -= 1
        return current

    def is_ancestor(self, a, v) -> bool:
        """``a`` generalises ``v`` (reflexive)."""
        ka = self.level_of(a)
        kv = self.level_of(v)
        return ka <= kv and self.ancestor(v, ka) == a

    def preorder(self) -> Preorder:
        nodes = canonical(self.nodes())
        return Preorder(
            nodes, frozenset((a, v) for a in nodes for v in nodes if self.is_ancestor(a, v))
        )


def load_hierarchies(path: str | Path) -> dict:
    """``{attribute: {"levels": [...], "parents": [{child: parent}, ...]}}``."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise StructuralError(f"{path}: expected a JSON object keyed by attribute")
    return {attr: Hierarchy.from_json(spec) for attr, spec in raw.items()}


# -- schemas and relations --------------------------------------------------


@dataclass(frozen=True)
class AttributeSchema:
    domains: Mapping
    hierarchies: Mapping = field(default_factory=dict)

    def __post_init__(self):
        doms = {a: frozenset(v) for a, v in self.domains.items()}
        for a, d in doms.items():
            if not d:
                raise StructuralError(f"domain of {a!r} is empty")
        object.__setattr__(self, "domains", doms)

    @property
    def attrs(self) -> tuple:
        return tuple(sorted(self.domains))

    def require(self, attrs: Iterable) -> None:
        missing = set(attrs) - set(self.domains)
        if missing:
            raise StructuralError(f"attributes {sorted(missing)} are not in the schema")

    def tuples(self, attrs: Iterable) -> frozenset:
        """The product of the domains of ``attrs`` (one empty tuple for no attributes)."""
        attrs = tuple(sorted(attrs))
        self.require(attrs)
        return frozenset(cartesian(*(canonical(self.domains[a]) for a in attrs)))

    def restricted(self, attrs: Iterable) -> AttributeSchema:
        attrs = set(attrs)
        return AttributeSchema(
            {a: d for a, d in self.domains.items() if a in attrs},
            {a: h for a, h in self.hierarchies.items() if a in attrs},
        )


def merge_schemas(s1: AttributeSchema | None, s2: AttributeSchema | None) -> AttributeSchema | None:
    if s1 is None or s2 is None:
        return s1 if s2 is None else s2
    for a in set(s1.domains) & set(s2.domains):
        if s1.domains[a] != s2.domains[a]:
            raise StructuralError(f"attribute {a!r} has different domains in the two schemas")
    return AttributeSchema({**s1.domains, **s2.domains}, {**s1.hierarchies, **s2.hierarchies})


@dataclass(frozen=True)
class Relation:
    """A non-empty set of rows over ``attrs`` (sorted), optionally with a schema.

    The schema only carries domains; it takes no part in equality.
    """

    attrs: tuple
    rows: frozenset
    schema: AttributeSchema | None = field(default=None, compare=False)

    def __post_init__(self):
        attrs = tuple(self.attrs)
        if list(attrs) != sorted(set(attrs)):
            raise StructuralError("attrs must be sorted and distinct; use Relation.make")
        object.__setattr__(self, "attrs", attrs)
        rows = frozenset(self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise PreconditionError("a relation must have at least one row")
        for r in rows:
            if len(r) != len(attrs):
                raise StructuralError(f"row {r!r} does not match attributes {attrs}")
        if self.schema is not None:
            self.schema.require(attrs)
            for pos, a in enumerate(attrs):
                dom = self.schema.domains[a]
                for r in rows:
                    if r[pos] not in dom:
                        raise StructuralError(f"value {r[pos]!r} is not in the domain of {a!r}")

    @classmethod
    def make(
        cls,
        attrs: Sequence[str],
        rows: Iterable,
        schema: AttributeSchema | None = None,
    ) -> Relation:
        """Build from rows given as dicts or as tuples in ``attrs`` order."""
        attrs = list(attrs)
        if len(set(attrs)) != len(attrs):
            raise StructuralError(f"duplicate attribute in {attrs}")
        order = sorted(range(len(attrs)), key=lambda k: attrs[k])
        out = set()
        for r in rows:
            if isinstance(r, Mapping):
                r = tuple(r[a] for a in attrs)
            r = tuple(r)
            if len(r) != len(attrs):
                raise StructuralError(f"row {r!r} does not match attributes {attrs}")
            out.add(tuple(r[k] for k in order))
        return cls(tuple(sorted(attrs)), frozenset(out), schema)

    @classmethod
    def full(cls, schema: AttributeSchema, attrs: Iterable) -> Relation:
        """Every combination: the vacuous relation over ``attrs``."""
        attrs = tuple(sorted(attrs))
        return cls(attrs, schema.tuples(attrs), schema)

    @property
    def index(self) -> frozenset:
        return frozenset(self.attrs)

    def as_elem(self) -> GrothElem:
        return GrothElem(self.index, self.rows)

    def dicts(self) -> list[dict]:
        return [dict(zip(self.attrs, r)) for r in sorted(self.rows, key=sort_key)]

    def __len__(self) -> int:
        return len(self.rows)


def _positions(attrs: Sequence[str], sub: Iterable[str]) -> tuple:
    where = {a: k for k, a in enumerate(attrs)}
    return tuple(where[a] for a in sorted(sub))


def project(R: Relation, A: Iterable[str]) -> Relation:
    """Restrict every row to ``A``."""
    A = set(A)
    if not A <= set(R.attrs):
        raise StructuralError(f"cannot project onto {sorted(A - set(R.attrs))}: not attributes of R")
    pos = _positions(R.attrs, A)
    schema = None if R.schema is None else R.schema.restricted(A)
    return Relation(tuple(sorted(A)), frozenset(tuple(r[k] for k in pos) for r in R.rows), schema)


def extend(R: Relation, B: Iterable[str], schema: AttributeSchema | None = None) -> Relation:
    """Pad R with every combination of values for the attributes it lacks."""
    B = set(B)
    if not B >= set(R.attrs):
        raise StructuralError(f"target attributes {sorted(B)} do not contain {list(R.attrs)}")
    schema = schema or R.schema
    if schema is None:
        raise PreconditionError("extending needs domains for the new attributes")
    new = tuple(sorted(B - set(R.attrs)))
    attrs = tuple(sorted(B))
    pad = schema.tuples(new)
    old_pos = {a: k for k, a in enumerate(R.attrs)}
    new_pos = {a: k for k, a in enumerate(new)}
    rows = frozenset(
        tuple(r[old_pos[a]] if a in old_pos else p[new_pos[a]] for a in attrs)
        for r in R.rows
        for p in pad
    )
    return Relation(attrs, rows, merge_schemas(R.schema, schema.restricted(B)))


def natural_join(R: Relation, S: Relation) -> Relation | None:
    """Rows over both attribute sets agreeing with R and S; None when empty.

    Hash join on the shared attributes, building on the smaller side.
    """
    schema = merge_schemas(R.schema, S.schema)
    shared = tuple(sorted(set(R.attrs) & set(S.attrs)))
    attrs = tuple(sorted(set(R.attrs) | set(S.attrs)))
    build, probe = (R, S) if len(R) <= len(S) else (S, R)
    bkey = _positions(build.attrs, shared)
    pkey = _positions(probe.attrs, shared)
    buckets: dict = {}
    for r in build.rows:
        buckets.setdefault(tuple(r[k] for k in bkey), []).append(r)
    bpos = {a: k for k, a in enumerate(build.attrs)}
    ppos = {a: k for k, a in enumerate(probe.attrs)}
    rows = set()
    for p in probe.rows:
        for b in buckets.get(tuple(p[k] for k in pkey), ()):
            rows.add(tuple(b[bpos[a]] if a in bpos else p[ppos[a]] for a in attrs))
    if not rows:
        return None
    return Relation(attrs, frozenset(rows), schema)


def generalize(R: Relation, attr: str, level: int | str, hierarchy: Hierarchy | None = None) -> Relation:
    """Replace ``attr`` by its ancestor at ``level`` (set semantics)."""
    if attr not in R.attrs:
        raise StructuralError(f"{attr!r} is not an attribute of R")
    if hierarchy is None:
        if R.schema is None or attr not in R.schema.hierarchies:
            raise StructuralError(f"no hierarchy for {attr!r}")
        hierarchy = R.schema.hierarchies[attr]
    k = R.attrs.index(attr)
    rows = frozenset(r[:k] + (hierarchy.ancestor(r[k], level),) + r[k + 1 :] for r in R.rows)
    schema = None
    if R.schema is not None:
        doms = dict(R.schema.domains)
        doms[attr] = hierarchy.values(level)
        schema = AttributeSchema(doms, R.schema.hierarchies)
    return Relation(R.attrs, rows, schema)


# -- the relational family --------------------------------------------------


def projection_map(schema: AttributeSchema, B: Iterable[str], A: Iterable[str]) -> dict:
    """``p_{B,A}`` on tuples: restrict tuples over B to A."""
    B, A = tuple(sorted(B)), tuple(sorted(A))
    pos = _positions(B, A)
    return {t: tuple(t[k] for k in pos) for t in schema.tuples(B)}


def relational_family(schema: AttributeSchema) -> IndexedFamily:
    """Subsets of attributes, each sent to the possibility powerset of its tuples,
    with padding (preimage of projection) as transitions."""
    L = powerset_lattice(schema.attrs)
    fibers = {A: possibility_of_set(schema.tuples(A)) for A in L.carrier}
    transitions = {}
    for A, B in L.order.pairs:
        src, tgt = fibers[A], fibers[B]
        if A == B:
            transitions[(A, B)] = Hom(src, tgt, {S: S for S in src.carrier})
            continue
        p = projection_map(schema, B, A)
        transitions[(A, B)] = Hom(
            src, tgt, {S: frozenset(t for t, s in p.items() if s in S) for S in src.carrier}
        )
    return IndexedFamily(L, fibers, transitions)


def check_join_is_boxplus(schema: AttributeSchema) -> LawReport:
    """Compare the completion's combine with natural join on every pair."""
    F = relational_family(schema)
    G = groth_opcm(F)
    report = LawReport("natural join = completion combine")
    defined = report.law("definedness")
    equal = report.law("equality")
    for a, b in cartesian(G.carrier, repeat=2):
        box = G.combine(a, b)
        j = natural_join(Relation(tuple(sorted(a.index)), a.elem), Relation(tuple(sorted(b.index)), b.elem))
        if not defined.check((box is None) == (j is None), (a, b)):
            continue
        if box is not None:
            equal.check(box == j.as_elem(), (a, b))
    return report


def projection_square(
    schema: AttributeSchema, I: Iterable[str], J: Iterable[str], K: Iterable[str] | None = None
) -> LinkingPassage:
    """The linking passage ``P+Phi_K -> P+Phi_I, P+Phi_J -> P+Phi_{I u J}`` of preimages.

    K defaults to the shared attributes ``I n J``.
    """
    I, J = frozenset(I), frozenset(J)
    K = I & J if K is None else frozenset(K)
    if not K <= I & J:
        raise StructuralError("the common domain must use shared attributes only")
    N = I | J
    g1 = preimage_galois(projection_map(schema, I, K), schema.tuples(K))
    g2 = preimage_galois(projection_map(schema, J, K), schema.tuples(K))
    f1 = preimage_galois(projection_map(schema, N, I), schema.tuples(I))
    f2 = preimage_galois(projection_map(schema, N, J), schema.tuples(J))
    return LinkingPassage(g1, g2, f1, f2)


# -- CSV ----------------------------------------------------------------------


def read_table(path: str | Path) -> tuple[list[str], list[tuple]]:
    """Header and rows of an RFC 4180 CSV file, multiplicities kept."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise StructuralError(f"{path}: empty file, expected a header row") from None
        if len(set(header)) != len(header):
            raise StructuralError(f"{path}: duplicate column names in header")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise StructuralError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            rows.append(tuple(row))
    return header, rows


def load_relation(path: str | Path, schema: AttributeSchema | None = None) -> tuple[Relation, list[str]]:
    """Load a CSV as a set of rows; returns the relation and the file's column order."""
    header, rows = read_table(path)
    distinct = set(rows)
    dropped = len(rows) - len(distinct)
    if dropped:
        log.warning("%s: collapsed %d duplicate row(s)", path, dropped)
    if not distinct:
        raise PreconditionError(f"{path}: no data rows")
    return Relation.make(header, distinct, schema), header


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def relation_rows(R: Relation, columns: Sequence[str]) -> list[tuple]:
    """Rows reordered to ``columns`` and sorted."""
    pos = _positions_in_order(R.attrs, columns)
    return sorted((tuple(r[k] for k in pos) for r in R.rows), key=sort_key)


def _positions_in_order(attrs: Sequence[str], columns: Sequence[str]) -> tuple:
    where = {a: k for k, a in enumerate(attrs)}
    if set(columns) != set(attrs):
        raise StructuralError(f"columns {list(columns)} do not match attributes {list(attrs)}")
    return tuple(where[c] for c in columns)
