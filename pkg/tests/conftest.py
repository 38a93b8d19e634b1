from __future__ import annotations

from pathlib import Path

import pytest

from opcmlink.grothendieck import chain_lattice
from opcmlink.instances import POST, post_opcm
from opcmlink.order import Preorder
from opcmlink.relational import AttributeSchema
from opcmlink.valuation import ValuationAlgebra

DATA = Path(__file__).parent / "data"


def prefix_leq(x: str, y: str) -> bool:
    """Independent oracle for the postcode order."""
    return y[: len(x)] == x


@pytest.fixture(scope="session")
def post():
    return post_opcm()


@pytest.fixture(scope="session")
def post_order():
    return Preorder.from_predicate(POST.codes, prefix_leq)


@pytest.fixture(scope="session")
def schema_ab():
    return AttributeSchema({"a": {0, 1}, "b": {0, 1}})


def saturating_ova() -> ValuationAlgebra:
    """Two domains 0 < 1, each a three-step saturating counter.

    Combining a valuation with itself always gains information, so no
    regularity witness can exist.
    """
    D = chain_lattice(2)
    lo, hi = ("e0", "b", "b2"), ("e1", "a", "c")
    up = dict(zip(lo, hi))
    down = dict(zip(hi, lo))
    rank = {v: k for k, v in enumerate(lo)} | {v: k for k, v in enumerate(hi)}
    label = {v: 0 for v in lo} | {v: 1 for v in hi}
    vals = lo + hi
    pairs = frozenset(
        (p, q) for p in vals for q in vals if label[p] == label[q] and rank[p] <= rank[q]
    )
    combine = {}
    for p in vals:
        for q in vals:
            level = max(label[p], label[q])
            r = min(2, rank[p] + rank[q])
            combine[(p, q)] = (lo if level == 0 else hi)[r]
    focus = {}
    for p in vals:
        focus[(p, label[p])] = p
        if label[p] == 1:
            focus[(p, 0)] = down[p]
    return ValuationAlgebra(
        order=Preorder(vals, pairs),
        domains=D,
        combine=combine,
        label=label,
        focus=focus,
        identity={0: "e0", 1: "e1"},
    )


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
