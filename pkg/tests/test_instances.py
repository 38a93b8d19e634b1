from itertools import product as cartesian

import pytest

from conftest import DATA, prefix_leq
from opcmlink.errors import PreconditionError, ResourceError, StructuralError
from opcmlink.instances import (
    BOTTOM,
    POST,
    POST_CODES,
    PrefixCodeSet,
    check_downward_closed,
    flat,
    is_downward_closed,
    lifted_combine,
    load_prefix_codes,
    possibility_of_opcm,
    possibility_of_set,
    postcode_levels,
    prefix_opcm,
    sharp_leq,
    sub_opcm,
)
from opcmlink.opcm import FiniteOpcm, check_compatibility, check_opcm_laws

SUB5 = ["", "SA", "SA1", "SA2", "SA2 8"]


def test_flat_small():
    F = flat("a")
    assert F.combine("a", "a") == "a"
    assert F.combine(BOTTOM, "a") == "a"
    assert flat("ab").combine("a", "b") is None
    assert check_opcm_laws(flat("abc")).ok


def test_flat_rejects_bottom_collision():
    with pytest.raises(StructuralError):
        flat(["a", BOTTOM])


def test_post_fixture_is_literal():
    assert POST.codes == set(POST_CODES)
    assert len(POST.codes) == 10


def test_prefix_chain(post):
    chain = ["", "SA", "SA2", "SA2 8", "SA2 8PP"]
    for x, y in zip(chain, chain[1:]):
        assert post.leq(x, y)
    assert post.combine("SA", "SA2 8") == "SA2 8"
    assert post.combine("SA1", "SA2") is None


def test_prefix_order_matches_oracle(post):
    for x, y in cartesian(post.carrier, repeat=2):
        assert post.leq(x, y) == prefix_leq(x, y)
        expect = y if prefix_leq(x, y) else x if prefix_leq(y, x) else None
        assert post.combine(x, y) == expect


def test_postcode_levels():
    assert postcode_levels("SA2 8PP") == ["SA", "SA2", "SA2 8", "SA2 8PP"]
    assert postcode_levels("SA1") == ["SA", "SA1"]
    assert postcode_levels("") == []
    with pytest.raises(StructuralError):
        postcode_levels("sa2")


def test_prefix_set_needs_declared_levels():
    with pytest.raises(StructuralError):
        PrefixCodeSet(frozenset({"SA2 8PP"}), postcode_levels)
    assert "" in PrefixCodeSet(frozenset({"SA"})).codes


def test_load_prefix_codes():
    codes = load_prefix_codes(DATA / "post.txt", postcode_levels)
    assert codes.codes == POST.codes
    assert check_opcm_laws(prefix_opcm(codes)).ok


def test_realization_forward_direction_on_post(post):
    for P, Q in cartesian(post.carrier, repeat=2):
        if post.leq(P, Q):
            assert POST.realize(P) >= POST.realize(Q)


def test_realization_is_not_faithful_on_post():
    # a code with a single extension stands for the same leaves as its child
    assert POST.realize("SA1") == POST.realize("SA1 3")
    assert not prefix_leq("SA1 3", "SA1")


def test_realization_biconditional_when_every_node_branches():
    codes = PrefixCodeSet(frozenset({"A", "B", "AA", "AB", "BA", "BB", "ABA", "ABB"}))
    M = prefix_opcm(codes)
    for P, Q in cartesian(M.carrier, repeat=2):
        assert M.leq(P, Q) == (codes.realize(P) >= codes.realize(Q))


def test_possibility_of_set_examples():
    M = possibility_of_set({1, 2, 3})
    assert len(M) == 7
    assert M.combine(frozenset({1, 2}), frozenset({2, 3})) == {2}
    assert M.combine(frozenset({1}), frozenset({2})) is None
    X = frozenset({1, 2, 3})
    for S in M.carrier:
        assert M.combine(S, X) == S
        assert M.leq(M.zero, S)
    for S, T in cartesian(M.carrier, repeat=2):
        assert M.leq(S, T) == (T <= S)
        assert M.combine(S, T) == ((S & T) or None)
    assert check_opcm_laws(M).ok
    assert check_compatibility(M).ok


def test_possibility_of_set_is_cached():
    assert possibility_of_set({1, 2}) is possibility_of_set([2, 1])


def test_possibility_of_set_cap():
    with pytest.raises(ResourceError):
        possibility_of_set(range(7))
    with pytest.raises(PreconditionError):
        possibility_of_set(set())


def test_downward_closed(post):
    assert is_downward_closed(post)
    assert is_downward_closed(flat("ab"))
    table = dict(post.table)
    del table[("SA", "SA2 8")]
    report = check_downward_closed(FiniteOpcm(post.order, post.zero, table))
    assert not report.ok
    assert ("SA", "SA2", "SA2 8") in report["downward-closed"].witnesses


def test_lifted_combine_on_post(post):
    fs = frozenset
    assert lifted_combine(post, fs({"SA1", "SA2"}), fs({"SA2 8"})) == {"SA2 8"}
    assert lifted_combine(post, fs({"SA1 3LP"}), fs({"SA2 8PP"})) is None


def test_possibility_of_opcm_on_sub_post(post):
    M = sub_opcm(post, SUB5)
    P = possibility_of_opcm(M)
    assert len(P) == 31
    assert check_opcm_laws(P).ok
    eps = frozenset({""})
    assert P.zero == eps
    for S in P.carrier:
        assert P.equiv(P.combine(S, eps), S)


def test_possibility_of_opcm_equalities_are_up_to_equivalence(post):
    M = sub_opcm(post, SUB5)
    P = possibility_of_opcm(M)

    def same(a, b):
        return (a is None and b is None) or (
            a is not None and b is not None and sharp_leq(M, a, b) and sharp_leq(M, b, a)
        )

    for S, T in cartesian(P.carrier, repeat=2):
        assert same(P.combine(S, T), P.combine(T, S))
    for S, T, U in cartesian(P.carrier, repeat=3):
        st, tu = P.combine(S, T), P.combine(T, U)
        left = None if st is None else P.combine(st, U)
        right = None if tu is None else P.combine(S, tu)
        if left is not None and right is not None:
            assert same(left, right)
    # the order is only a preorder: some distinct subsets carry the same information
    assert not P.order.is_antisymmetric()


def test_possibility_of_opcm_definedness_needs_one_pair(post):
    M = sub_opcm(post, SUB5)
    P = possibility_of_opcm(M)
    S, T = frozenset({"SA1", "SA2"}), frozenset({"SA2 8"})
    assert P.combine(S, T) == {"SA2 8"}


def test_possibility_of_opcm_precondition(post):
    table = dict(post.table)
    del table[("SA", "SA2 8")]
    with pytest.raises(PreconditionError):
        possibility_of_opcm(FiniteOpcm(post.order, post.zero, table))


def test_possibility_of_opcm_cap(post):
    with pytest.raises(ResourceError):
        possibility_of_opcm(post)


def test_sub_opcm_checks_closure(post):
    with pytest.raises(StructuralError):
        sub_opcm(post, ["SA"])
    P = possibility_of_set({1, 2, 3})
    fs = frozenset
    with pytest.raises(StructuralError):
        sub_opcm(P, [fs({1, 2, 3}), fs({1, 2}), fs({2, 3})])
    assert len(sub_opcm(P, [fs({1, 2, 3}), fs({1, 2}), fs({2, 3}), fs({2})])) == 4
