from hypothesis import given, strategies as st

from lifecheck.model import (
    STATIC,
    Adt,
    Generic,
    Lifetime,
    MatchPolicy,
    Prim,
    RawShared,
    RawUnique,
    RET_ROOT,
    SharedRef,
    Slice,
    StructDef,
    StructTable,
    UniqueRef,
    ValuePath,
    local,
    type_equal,
    type_of_path,
)

A, B = Lifetime.named("a"), Lifetime.named("b")
WILD = MatchPolicy(generic_wildcard=True)


def test_lifetime_text():
    assert str(A) == "'a"
    assert str(STATIC) == "'static"
    assert str(Lifetime.anon(3)) == "'_3"
    assert Lifetime.named("'x") == Lifetime.named("x")


def test_type_equal_ignores_lifetimes():
    assert type_equal(SharedRef(A, Prim("i32")), SharedRef(B, Prim("i32")))
    assert not type_equal(SharedRef(A, Prim("i32")), UniqueRef(A, Prim("i32")))
    assert not type_equal(RawShared(Prim("u8")), RawUnique(Prim("u8")))


def test_generic_wildcard_only_under_policy():
    raw = RawUnique(Adt("ffi::sqlite3"))
    f = Generic("F", (A,))
    assert not type_equal(raw, f)
    assert type_equal(raw, f, WILD)
    assert type_equal(f, raw, WILD)


def test_path_qualified_names_match():
    assert type_equal(Adt("ffi::sqlite3"), Adt("sqlite3"))


def test_path_printing():
    ret_x = ValuePath(RET_ROOT).field("x").deref()
    assert str(ret_x) == "*(ret.x)"
    arg2 = ValuePath(local("arg2")).deref().field("y")
    assert str(arg2) == "(*arg2).y"
    assert str(arg2.deref()) == "*(*arg2).y"
    assert str(ValuePath(RET_ROOT).deref().index()) == "(*ret)[_]"


def test_prefix_sorts_first():
    p = ValuePath(local("a"))
    assert p < p.deref() < p.deref().field("x")


def test_type_of_path_instantiates_struct():
    s = StructDef("S", ("a",), ("T",), (("r", SharedRef(Lifetime.named("a"), Generic("T"))),))
    table = StructTable([s])
    root_t = Adt("S", (B,), (Prim("u8"),))
    t = type_of_path(ValuePath(local("s")).field("r").deref(), root_t, table)
    assert t == Prim("u8")


_leaf = st.sampled_from([Prim("i32"), Prim("u8"), Generic("T"), Generic("F", (A,)), Adt("Node")])
_lt = st.sampled_from([A, B, STATIC, None])


def _wrap(children):
    return st.one_of(
        st.builds(SharedRef, _lt, children),
        st.builds(UniqueRef, _lt, children),
        st.builds(RawShared, children),
        st.builds(RawUnique, children),
        st.builds(Slice, children),
        st.builds(lambda l, t: Adt("Box", (l,) if l else (), (t,)), _lt, children),
    )


types = st.recursive(_leaf, _wrap, max_leaves=6)


@given(types)
def test_type_equal_reflexive(t):
    assert type_equal(t, t)
    assert type_equal(t, t, WILD)


@given(types, types)
def test_type_equal_symmetric(t1, t2):
    assert type_equal(t1, t2) == type_equal(t2, t1)
    assert type_equal(t1, t2, WILD) == type_equal(t2, t1, WILD)


@given(types, types, types)
def test_strict_type_equal_transitive(t1, t2, t3):
    if type_equal(t1, t2) and type_equal(t2, t3):
        assert type_equal(t1, t3)
