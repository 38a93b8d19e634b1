from itertools import product as cartesian

import pytest

from opcmlink.errors import PreconditionError, ResourceError, StructuralError
from opcmlink.grothendieck import (
    GrothElem,
    IndexedFamily,
    JoinSemilattice,
    chain_lattice,
    check_completion_props,
    check_functor,
    check_groth_props,
    check_semilattice,
    completion_leq,
    constant_family,
    groth_opcm,
    powerset_lattice,
)
from opcmlink.instances import flat, possibility_of_set
from opcmlink.morphisms import Hom, identity_hom
from opcmlink.opcm import FiniteOpcm, check_opcm_laws
from opcmlink.order import Preorder
from opcmlink.relational import relational_family

fs = frozenset
A, B, AB, E = fs("a"), fs("b"), fs("ab"), fs()


@pytest.fixture(scope="module")
def family(schema_ab):
    return relational_family(schema_ab)


@pytest.fixture(scope="module")
def G(family):
    return groth_opcm(family)


def test_semilattices_validate():
    assert check_semilattice(powerset_lattice("ab")).ok
    assert check_semilattice(chain_lattice(3)).ok
    L = chain_lattice(2)
    bad = JoinSemilattice(L.order, 0, {**L.join, (0, 1): 0})
    assert "join-is-lub" in check_semilattice(bad).failed()


def test_relational_functor(family):
    assert check_functor(family).ok


def test_constant_family():
    F = constant_family(chain_lattice(3), flat("ab"))
    assert check_functor(F).ok
    assert check_opcm_laws(groth_opcm(F)).ok


def test_redirected_transition_breaks_composition(family):
    T = family.transition[(A, AB)]
    # the full relation is the image of the unit under the transition from the empty set
    S = fs({(0,), (1,)})
    mapping = dict(T.mapping)
    mapping[S] = fs({(0, 0), (0, 1)})
    F = IndexedFamily(family.index, family.fiber, {**family.transition, (A, AB): Hom(T.source, T.target, mapping)})
    report = check_functor(F)
    assert "composition" in report.failed()
    assert (E, A, AB, fs({()})) in report["composition"].witnesses


def test_missing_transition(family):
    trans = dict(family.transition)
    del trans[(A, AB)]
    with pytest.raises(StructuralError):
        check_functor(IndexedFamily(family.index, family.fiber, trans))


def test_pseudo_functor_diagnostic():
    # identity transition that only agrees up to equivalence
    order = Preorder.closure_of(["0", "x", "y"], {("x", "y"), ("y", "x"), ("0", "x")})
    table = {("0", v): v for v in order.carrier} | {(v, "0"): v for v in order.carrier}
    table |= {(u, v): "x" for u in "xy" for v in "xy"}
    N = FiniteOpcm(order, "0", table)
    swap = Hom(N, N, {"0": "0", "x": "y", "y": "x"})
    L = Preorder.discrete([0])
    F = IndexedFamily(L, {0: N}, {(0, 0): swap})
    report = check_functor(F)
    assert "identity" in report.failed()
    assert "pseudo-functors are not supported" in report["identity"].note


def test_completion_leq_examples(family):
    assert completion_leq(family, (A, fs({(0,)})), (AB, fs({(0, 1)})))
    assert not completion_leq(family, (AB, fs({(0, 1)})), (A, fs({(0,)})))
    for a in family.elements():
        assert completion_leq(family, a, a)


def test_completion_leq_matches_padding_oracle(family, schema_ab):
    # (I,S) <= (J,T) iff I <= J and every row of T restricts into S
    def oracle(a, b):
        if not a.index <= b.index:
            return False
        cols = sorted(b.index)
        keep = [cols.index(c) for c in sorted(a.index)]
        return all(tuple(t[k] for k in keep) in a.elem for t in b.elem)

    for a, b in cartesian(family.elements(), repeat=2):
        assert completion_leq(family, a, b) == oracle(a, b)


def test_completion_props(family):
    report = check_completion_props(family)
    assert report.ok, report.text()
    assert not any(r.unmet for r in report.laws.values())


def test_poset_hypothesis_unmet_over_cycle():
    L = Preorder.closure_of("pq", {("p", "q"), ("q", "p")})
    report = check_completion_props(constant_family(L, flat("a")))
    assert report["poset"].unmet
    assert report["preorder"].passed


def test_cocartesian_lift(family):
    a = GrothElem(A, fs({(0,)}))
    lift = GrothElem(AB, family.extend(A, AB, a.elem))
    assert lift.elem == {(0, 0), (0, 1)}
    order = Preorder(tuple(family.elements()), fs(
        (x, y) for x in family.elements() for y in family.elements() if completion_leq(family, x, y)
    ))
    above = [c for c in order.up(a) if c.index == AB]
    assert lift in above
    assert all(order.leq(lift, c) for c in above)


def test_groth_opcm(G, family):
    assert len(G) == 22
    assert check_opcm_laws(G).ok
    zero = G.zero
    assert zero == (E, fs({()}))
    for a in G.carrier:
        assert G.equiv(G.combine(zero, a), a)
    assert G.combine(GrothElem(A, fs({(0,)})), GrothElem(B, fs({(1,)}))) == (AB, fs({(0, 1)}))
    assert G.combine(GrothElem(A, fs({(0,)})), GrothElem(A, fs({(1,)}))) is None


def test_groth_props(family, G):
    report = check_groth_props(family, G)
    assert report.ok, report.text()


def test_groth_needs_lattice_and_cap(family, schema_ab):
    with pytest.raises(PreconditionError):
        groth_opcm(IndexedFamily(family.index.order, family.fiber, family.transition))
    with pytest.raises(ResourceError):
        groth_opcm(family, max_carrier=10)
