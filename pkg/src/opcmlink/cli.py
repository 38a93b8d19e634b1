"""Command-line entry point.

Exit codes: 0 success, 1 semantic failure (law violation, inconsistent
join, uncovered value, invalid code), 2 usage or structural error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import OpcmError, StructuralError
from .grothendieck import check_functor, groth_opcm
from .instances import flat, load_prefix_codes, possibility_of_opcm, possibility_of_set, prefix_opcm
from .opcm import DUMP_HEADER, FiniteOpcm, LawReport, check_opcm_laws, load_opcm, product
from .relational import (
    AttributeSchema,
    Hierarchy,
    Relation,
    load_hierarchies,
    natural_join,
    read_table,
    relation_rows,
    relational_family,
    write_table,
)

log = logging.getLogger("opcmlink")

ROOT_ALIASES = ("ε", "")
SUPPRESSED = "*"


class UsageError(Exception):
    """Bad arguments or malformed input files: exit 2."""


class SemanticError(Exception):
    """Well-formed input with no meaningful answer: exit 1."""


@dataclass
class Dataset:
    """A CSV table with multiplicities and row order kept."""

    header: list
    rows: list
    path: str

    @classmethod
    def load(cls, path: str) -> Dataset:
        header, rows = read_table(path)
        return cls(list(header), list(rows), str(path))

    def column(self, attr: str) -> int:
        try:
            return self.header.index(attr)
        except ValueError:
            raise UsageError(f"{self.path}: no column {attr!r}; have {self.header}") from None

    def schema(self) -> AttributeSchema:
        """Domains inferred from the observed values."""
        return AttributeSchema({a: {r[k] for r in self.rows} for k, a in enumerate(self.header)})

    def relation(self, schema: AttributeSchema | None = None) -> Relation:
        distinct = set(self.rows)
        if len(distinct) < len(self.rows):
            log.warning("%s: collapsed %d duplicate row(s)", self.path, len(self.rows) - len(distinct))
        if not distinct:
            raise UsageError(f"{self.path}: no data rows")
        return Relation.make(self.header, distinct, schema)


# -- check-laws ---------------------------------------------------------------


def _load_schema(path: str) -> AttributeSchema:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None
    domains = raw.get("domains") if isinstance(raw, dict) else None
    if not isinstance(domains, dict):
        raise UsageError(f"{path}: expected {{\"domains\": {{attr: [values]}}}}")
    hierarchies = {a: Hierarchy.from_json(h) for a, h in raw.get("hierarchies", {}).items()}
    return AttributeSchema(domains, hierarchies)


def _opcm_from_file(path: str) -> FiniteOpcm:
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith(DUMP_HEADER):
        return load_opcm(text)
    return prefix_opcm(load_prefix_codes(path))


def build_target(spec: str) -> tuple[FiniteOpcm, LawReport | None]:
    """Parse a target such as ``flat:3`` into an OPCM (plus any extra report)."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise UsageError(f"target {spec!r} must look like kind:argument")
    if kind in ("flat", "possibility"):
        try:
            n = int(arg)
        except ValueError:
            raise UsageError(f"{kind} needs an integer size, got {arg!r}") from None
        if not 1 <= n <= 26:
            raise UsageError(f"{kind} size must be between 1 and 26")
        if kind == "flat":
            return flat("abcdefghijklmnopqrstuvwxyz"[:n]), None
        return possibility_of_set(range(1, n + 1)), None
    if kind == "prefix":
        return prefix_opcm(load_prefix_codes(arg)), None
    if kind == "possibility-opcm":
        return possibility_of_opcm(_opcm_from_file(arg)), None
    if kind == "table":
        return load_opcm(Path(arg).read_text(encoding="utf-8")), None
    if kind == "product":
        left, comma, right = arg.partition(",")
        if not comma:
            raise UsageError("product needs two comma-separated targets")
        return product(build_target(left)[0], build_target(right)[0]), None
    if kind == "groth":
        F = relational_family(_load_schema(arg))
        return groth_opcm(F), check_functor(F)
    raise UsageError(f"unknown target kind {kind!r}")


def cmd_check_laws(args) -> int:
    M, extra = build_target(args.target)
    report = check_opcm_laws(M)
    report.subject = f"{args.target} ({len(M)} elements)"
    if extra is not None:
        report.merge(extra, "functor/")
    if args.json:
        print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    else:
        print(report.text())
    return 0 if report.ok else 1


# -- join -------------------------------------------------------------------


def cmd_join(args) -> int:
    a, b = Dataset.load(args.left), Dataset.load(args.right)
    if args.schema:
        schema = _load_schema(args.schema)
    else:
        doms: dict = {}
        for ds in (a, b):
            for attr, dom in ds.schema().domains.items():
                doms.setdefault(attr, set()).update(dom)
        schema = AttributeSchema(doms)
    R, S = a.relation(schema), b.relation(schema)
    columns = a.header + [c for c in b.header if c not in a.header]
    print(f"{a.path}: {len(a.rows)} rows, {len(R)} distinct")
    print(f"{b.path}: {len(b.rows)} rows, {len(S)} distinct")
    J = natural_join(R, S)
    if J is None:
        raise SemanticError("inconsistent: empty join")
    write_table(args.out, columns, relation_rows(J, columns))
    print(f"{args.out}: {len(J)} rows")
    return 0


# -- generalize -------------------------------------------------------------


def _hierarchy_for(path: str, attr: str) -> Hierarchy:
    hs = load_hierarchies(path)
    if attr not in hs:
        raise UsageError(f"{path}: no hierarchy for {attr!r}")
    return hs[attr]


def cmd_generalize(args) -> int:
    ds = Dataset.load(args.data)
    k = ds.column(args.attr)
    drops = [ds.column(d) for d in args.drop]
    h = _hierarchy_for(args.hierarchy, args.attr)
    h.level_index(args.level)
    nodes = h.nodes()
    rows = []
    for r in ds.rows:
        if r[k] not in nodes:
            raise SemanticError(f"value {r[k]!r} of {args.attr!r} is not covered by the hierarchy")
        try:
            up = h.ancestor(r[k], args.level)
        except StructuralError as exc:
            raise SemanticError(str(exc)) from None
        row = list(r)
        row[k] = up
        for d in drops:
            row[d] = SUPPRESSED
        rows.append(row)
    write_table(args.out, ds.header, rows)
    return 0


# -- freq ---------------------------------------------------------------------


def at_least_fraction(values: Sequence[str], code: str, hierarchy: Hierarchy | None = None) -> Fraction:
    """Share of values at least as informative as ``code``."""
    if not values:
        raise SemanticError("no rows")
    if hierarchy is not None:
        if code in ROOT_ALIASES:
            code = hierarchy.root
        nodes = hierarchy.nodes()
        if code not in nodes:
            raise SemanticError(f"{code!r} is not a node of the hierarchy")
        for v in set(values):
            if v not in nodes:
                raise SemanticError(f"value {v!r} is not covered by the hierarchy")
        hits = sum(1 for v in values if hierarchy.is_ancestor(code, v))
    else:
        if code in ROOT_ALIASES:
            code = ""
        if not any(v.startswith(code) for v in values):
            raise SemanticError(f"{code!r} is not a prefix of any value")
        hits = sum(1 for v in values if v.startswith(code))
    return Fraction(hits, len(values))


def cmd_freq(args) -> int:
    ds = Dataset.load(args.data)
    k = ds.column(args.attr)
    h = _hierarchy_for(args.hierarchy, args.attr) if args.hierarchy else None
    p = at_least_fraction([r[k] for r in ds.rows], args.at_least, h)
    if args.json:
        print(json.dumps({"fraction": str(p), "decimal": float(p)}))
    else:
        print(p)
        print(f"{float(p):.6f}")
    return 0


# -- audit --------------------------------------------------------------------


def cmd_audit(args) -> int:
    ds = Dataset.load(args.data)
    cols = [ds.column(q) for q in args.quasi]
    if not ds.rows:
        raise SemanticError("no rows")
    classes = Counter(tuple(r[k] for k in cols) for r in ds.rows)
    unique = sum(1 for n in classes.values() if n == 1)
    total = len(ds.rows)
    hist = Counter(classes.values())
    if args.json:
        print(
            json.dumps(
                {
                    "rows": total,
                    "unique": unique,
                    "fraction": f"{unique}/{total}",
                    "histogram": {str(s): hist[s] for s in sorted(hist)},
                }
            )
        )
    else:
        print(f"unique: {unique}/{total}")
        print(f"fraction: {unique / total:.6f}")
        print("class size histogram:")
        for s in sorted(hist):
            print(f"  {s}: {hist[s]}")
    return 0


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opcmlink", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check-laws", help="check the OPCM laws of a finite instance")
    c.add_argument(
        "target",
        help="flat:N, possibility:N, prefix:FILE, possibility-opcm:FILE, "
        "product:T1,T2, groth:SCHEMA.json or table:DUMP",
    )
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check_laws)

    j = sub.add_parser(
        "join",
        help="natural join of two CSV files",
        description="Natural join with set semantics: duplicate input rows are "
        "collapsed and every output row appears once.",
    )
    j.add_argument("left")
    j.add_argument("right")
    j.add_argument("out")
    j.add_argument("--schema", help='JSON file {"domains": {attr: [values]}}')
    j.set_defaults(func=cmd_join)

    g = sub.add_parser("generalize", help="replace a column by its ancestors at a level")
    g.add_argument("data")
    g.add_argument("out")
    g.add_argument("--attr", required=True)
    g.add_argument("--level", required=True, help="level name or number (0 is the root)")
    g.add_argument("--hierarchy", required=True)
    g.add_argument("--drop", action="append", default=[], metavar="ATTR", help=f"replace ATTR by {SUPPRESSED!r}")
    g.set_defaults(func=cmd_generalize)

    f = sub.add_parser("freq", help="share of rows at least as informative as a code")
    f.add_argument("data")
    f.add_argument("--attr", required=True)
    f.add_argument("--at-least", required=True, dest="at_least", help="code; ε is the root")
    f.add_argument("--hierarchy", help="without one, codes are ordered by prefix")
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_freq)

    a = sub.add_parser("audit", help="how many rows are unique on the quasi-identifiers")
    a.add_argument("data")
    a.add_argument("--quasi", nargs="+", required=True)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_audit)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SemanticError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (UsageError, OpcmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
