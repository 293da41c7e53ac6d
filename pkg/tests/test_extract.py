"""Bound-extraction rules, one test each, plus properties of decompose/outlives."""

import pytest
from hypothesis import given, settings, strategies as st

from lifecheck.extract import OutlivesBound, decompose, derive_bounds, outlives
from lifecheck.frontend import parse_crate
from lifecheck.model import (
    STATIC,
    Adt,
    Generic,
    Lifetime,
    Prim,
    RawShared,
    RawUnique,
    RET_ROOT,
    SharedRef,
    StructDef,
    StructTable,
    UniqueRef,
    local,
)

A, B, C = (Lifetime.named(n) for n in "abc")
X = local("x")


def facts(t, structs=None, depth=8):
    return {str(f.path): f for f in decompose(X, t, structs or StructTable(), depth)}


def lt(f):
    return None if f.borrowed_for is None else str(f.borrowed_for)


# -- value rules -------------------------------------------------------------------


def test_contains_self():
    f = facts(Prim("i32"))
    assert list(f) == ["x"]
    assert f["x"].type == Prim("i32") and f["x"].owned


def test_borrow():
    f = facts(SharedRef(A, Prim("i32")))
    assert lt(f["*x"]) == "'a" and f["*x"].type == Prim("i32")
    assert f["*x"].immutable_only


def test_mut_borrow():
    f = facts(UniqueRef(A, Prim("i32")))
    assert lt(f["*x"]) == "'a"
    assert f["*x"].mutably_held


PAIR = StructDef("Pair", (), (), (("l", Prim("i32")), ("r", Prim("u8"))))


def test_field_inherits_enclosing_lifetime():
    f = facts(SharedRef(A, Adt("Pair")), StructTable([PAIR]))
    assert lt(f["(*x).l"]) == "'a" and f["(*x).r"].type == Prim("u8")


def test_field_eps_owned_struct():
    f = facts(Adt("Pair"), StructTable([PAIR]))
    assert f["x.l"].owned and f["x.r"].owned


def test_inner_lifetime_takes_over():
    holder = StructDef("H", ("h",), (), (("r", SharedRef(Lifetime.named("h"), Prim("i32"))),))
    f = facts(SharedRef(A, Adt("H", (B,))), StructTable([holder]))
    assert lt(f["(*x).r"]) == "'a"
    assert lt(f["*(*x).r"]) == "'b"


OWNER_C = StructDef("OC", (), (), (("p", RawShared(Prim("i32"))),))
OWNER_M = StructDef("OM", (), (), (("p", RawUnique(Prim("i32"))),))


def test_raw_owned():
    f = facts(Adt("OC"), StructTable([OWNER_C]))
    assert f["*(x.p)"].owned and f["*(x.p)"].via_raw


def test_raw_mut_owned():
    f = facts(Adt("OM"), StructTable([OWNER_M]))
    assert f["*(x.p)"].owned and f["*(x.p)"].via_raw
    # behind a borrow the pointee inherits the borrow's lifetime
    g = facts(SharedRef(A, Adt("OM")), StructTable([OWNER_M]))
    assert lt(g["*(*x).p"]) == "'a"


def test_raw_lifetime():
    s = StructDef("V", ("v",), (), (("p", RawShared(Prim("i32"))),))
    f = facts(Adt("V", (B,)), StructTable([s]))
    assert lt(f["*(x.p)"]) == "'b" and f["*(x.p)"].via_raw


def test_raw_mut_lifetime():
    s = StructDef("V", ("v", "w"), (), (("p", RawUnique(Prim("i32"))),))
    f = decompose(X, SharedRef(C, Adt("V", (A, B))), StructTable([s]))
    pointee = {str(x.borrowed_for) for x in f if str(x.path) == "*(*x).p"}
    assert pointee == {"'a", "'b"}


# -- bound rules -------------------------------------------------------------------


def test_b_inner_longer():
    bounds = derive_bounds([SharedRef(A, SharedRef(B, Prim("i32")))])
    assert OutlivesBound(B, A) in bounds
    assert outlives(bounds, B, A) and not outlives(bounds, A, B)


def test_b_reflexive():
    assert outlives(frozenset(), A, A)


def test_b_static():
    assert outlives(frozenset(), STATIC, A)
    assert not outlives(frozenset(), A, STATIC)


def test_b_extract_inner_struct_args():
    holder = StructDef("H", ("h",), (), (("r", SharedRef(Lifetime.named("h"), Prim("i32"))),))
    bounds = derive_bounds([SharedRef(A, Adt("H", (B,)))], StructTable([holder]))
    assert OutlivesBound(B, A) in bounds


def test_b_extract_inner_type_args():
    bounds = derive_bounds([UniqueRef(A, Adt("Vec", (), (SharedRef(C, Prim("u8")),)))])
    assert OutlivesBound(C, A) in bounds


def test_generic_bounds_do_not_leak_into_enclosing():
    bounds = derive_bounds([SharedRef(A, Generic("F", (B,)))])
    assert OutlivesBound(B, A) not in bounds


def test_declared_bounds_kept():
    assert derive_bounds([], declared=[(A, B)]) == {OutlivesBound(A, B)}


# -- fig.rs facts, frozen -------------------------------------------------------------

# value / type / borrowed-for rows; None means owned
BAR_FACTS = {
    "*arg1": ("i32", "'a"),
    "*arg2": ("Bar", "'b"),
    "(*arg2).y": ("String", "'b"),
    "(*arg2).z": ("*mut i32", "'b"),
    "*(*arg2).z": ("i32", "'b"),
    "ret.x": ("*mut String", None),
    "*(ret.x)": ("String", "'a"),
    "ret.w": ("&'a mut i32", None),
    "*(ret.w)": ("i32", "'a"),
}


def test_bar_facts(fig):
    bar = fig.function("bar")
    rows = {}
    for p in bar.params:
        rows.update({str(f.path): (str(f.type), lt(f)) for f in decompose(p.root, p.type, fig.structs)})
    rows.update({str(f.path): (str(f.type), lt(f)) for f in decompose(RET_ROOT, bar.return_type, fig.structs)})
    for path, row in BAR_FACTS.items():
        assert rows[path] == row, path
    assert derive_bounds([p.type for p in bar.params], fig.structs) == frozenset()


# -- properties ----------------------------------------------------------------------

RECURSIVE = parse_crate(
    """
struct Node { val: i32, next: *mut Node, kids: Vec<Node> }
struct List<'a> { head: &'a Node, tail: *const List<'a> }
struct Tree { left: Box<Tree>, right: Box<Tree> }
"""
).structs

ROOTS = [
    Adt("Node"),
    SharedRef(A, Adt("List", (B,))),
    UniqueRef(A, Adt("Tree")),
    RawUnique(Adt("Node")),
]


@pytest.mark.parametrize("t", ROOTS, ids=str)
def test_decompose_terminates_and_is_monotone(t):
    prev = set()
    for depth in range(1, 10):
        cur = {(f.path, f.type, f.borrowed_for, f.via_raw) for f in decompose(X, t, RECURSIVE, depth)}
        assert prev <= cur
        assert all(p.depth <= depth for p, *_ in cur)
        prev = cur


def test_decompose_rejects_zero_depth():
    with pytest.raises(ValueError):
        decompose(X, Prim("i32"), max_depth=0)


lifetimes = st.sampled_from([Lifetime.named(n) for n in "abcdef"] + [STATIC, Lifetime.anon(1), Lifetime.anon(2)])
bound_sets = st.frozensets(st.builds(OutlivesBound, lifetimes, lifetimes), max_size=8)


@settings(max_examples=1000, deadline=None)
@given(lifetimes, lifetimes)
def test_reflexive_and_static_random_pairs(l1, l2):
    assert outlives(frozenset(), l1, l1)
    assert outlives(frozenset(), STATIC, l2)


@settings(max_examples=300, deadline=None)
@given(bound_sets, lifetimes, lifetimes, lifetimes)
def test_outlives_transitive(bounds, l1, l2, l3):
    if outlives(bounds, l1, l2) and outlives(bounds, l2, l3):
        assert outlives(bounds, l1, l3)


def test_bound_by_static_outlives_everything():
    bounds = frozenset({OutlivesBound(A, STATIC)})
    assert outlives(bounds, A, B)
