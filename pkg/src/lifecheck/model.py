"""
Subject-language model shared by every analysis stage.

Types, lifetimes, struct definitions, function models and the basic-block
body IR. All values are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, Optional, Tuple, Union


class LifecheckError(Exception):
    """Base class for analyzer errors."""


class UnknownStruct(LifecheckError):
    pass


class PathTypeError(LifecheckError):
    """A value path does not type-check against its root type."""


# ---------------------------------------------------------------------------
# Lifetimes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Lifetime:
    kind: str  # "named" | "static" | "anon"
    name: str = ""
    id: int = 0

    @staticmethod
    def named(name: str) -> "Lifetime":
        name = name.lstrip("'")
        if not name:
            raise ValueError("named lifetime needs an identifier")
        return Lifetime("named", name)

    @staticmethod
    def anon(id: int = 0) -> "Lifetime":
        # id 0 marks a `'_` that elision has not numbered yet
        return Lifetime("anon", "", id)

    @property
    def is_static(self) -> bool:
        return self.kind == "static"

    @property
    def is_anon(self) -> bool:
        return self.kind == "anon"

    def __str__(self) -> str:
        if self.kind == "static":
            return "'static"
        if self.kind == "anon":
            return "'_" if self.id == 0 else f"'_{self.id}"
        return f"'{self.name}"


STATIC = Lifetime("static", "static")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SharedRef:
    lifetime: Optional[Lifetime]
    inner: "SubjectType"

    def __str__(self) -> str:
        lt = f"{self.lifetime} " if self.lifetime is not None else ""
        return f"&{lt}{self.inner}"


@dataclass(frozen=True)
class UniqueRef:
    lifetime: Optional[Lifetime]
    inner: "SubjectType"

    def __str__(self) -> str:
        lt = f"{self.lifetime} " if self.lifetime is not None else ""
        return f"&{lt}mut {self.inner}"


@dataclass(frozen=True)
class RawShared:
    inner: "SubjectType"

    def __str__(self) -> str:
        return f"*const {self.inner}"


@dataclass(frozen=True)
class RawUnique:
    inner: "SubjectType"

    def __str__(self) -> str:
        return f"*mut {self.inner}"


@dataclass(frozen=True)
class Adt:
    name: str
    lifetime_args: Tuple[Lifetime, ...] = ()
    type_args: Tuple["SubjectType", ...] = ()

    def __str__(self) -> str:
        args = [str(l) for l in self.lifetime_args] + [str(t) for t in self.type_args]
        if self.name == "(tuple)":
            return "(" + ", ".join(str(t) for t in self.type_args) + ("," if len(self.type_args) == 1 else "") + ")"
        return self.name + (f"<{', '.join(args)}>" if args else "")


@dataclass(frozen=True)
class Slice:
    element: "SubjectType"

    def __str__(self) -> str:
        return f"[{self.element}]"


@dataclass(frozen=True)
class Generic:
    name: str
    lifetime_bounds: Tuple[Lifetime, ...] = ()

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Prim:
    name: str

    def __str__(self) -> str:
        return self.name


SubjectType = Union[SharedRef, UniqueRef, RawShared, RawUnique, Adt, Slice, Generic, Prim]

REFERENCES = (SharedRef, UniqueRef)
RAWS = (RawShared, RawUnique)
POINTERS = REFERENCES + RAWS

PRIMITIVES = frozenset(
    "i8 i16 i32 i64 i128 isize u8 u16 u32 u64 u128 usize f32 f64 bool char str ()".split()
)

SELF_TYPE = Adt("Self")


def is_mut_pointer(t: SubjectType) -> bool:
    return isinstance(t, (UniqueRef, RawUnique))


def lifetimes_in(t: SubjectType) -> Iterator[Lifetime]:
    """Every lifetime occurring syntactically in ``t`` (pre-order)."""
    if isinstance(t, REFERENCES):
        if t.lifetime is not None:
            yield t.lifetime
        yield from lifetimes_in(t.inner)
    elif isinstance(t, RAWS):
        yield from lifetimes_in(t.inner)
    elif isinstance(t, Adt):
        yield from t.lifetime_args
        for a in t.type_args:
            yield from lifetimes_in(a)
    elif isinstance(t, Slice):
        yield from lifetimes_in(t.element)
    elif isinstance(t, Generic):
        yield from t.lifetime_bounds


def map_type(t: SubjectType, fn) -> SubjectType:
    """Rebuild ``t`` bottom-up, applying ``fn`` to every node after its children."""
    if isinstance(t, (SharedRef, UniqueRef)):
        t = replace(t, inner=map_type(t.inner, fn))
    elif isinstance(t, RAWS):
        t = replace(t, inner=map_type(t.inner, fn))
    elif isinstance(t, Adt):
        t = replace(t, type_args=tuple(map_type(a, fn) for a in t.type_args))
    elif isinstance(t, Slice):
        t = replace(t, element=map_type(t.element, fn))
    return fn(t)


def erase_lifetimes(t: SubjectType) -> SubjectType:
    def erase(node):
        if isinstance(node, REFERENCES):
            return replace(node, lifetime=None)
        if isinstance(node, Adt):
            return replace(node, lifetime_args=())
        if isinstance(node, Generic):
            return replace(node, lifetime_bounds=())
        return node

    return map_type(t, erase)


@dataclass(frozen=True)
class MatchPolicy:
    generic_wildcard: bool = False


def type_equal(t1: SubjectType, t2: SubjectType, policy: MatchPolicy = MatchPolicy()) -> bool:
    """Structural type equality, ignoring lifetime labels.

    Lifetimes are what the checker compares, so two types that differ only
    in their labels are the same value type. With ``generic_wildcard`` a
    generic parameter carrying a lifetime bound matches anything.
    """
    if policy.generic_wildcard:
        if isinstance(t1, Generic) and t1.lifetime_bounds:
            return True
        if isinstance(t2, Generic) and t2.lifetime_bounds:
            return True
    if type(t1) is not type(t2):
        return False
    if isinstance(t1, (SharedRef, UniqueRef, RawShared, RawUnique)):
        return type_equal(t1.inner, t2.inner, policy)
    if isinstance(t1, Slice):
        return type_equal(t1.element, t2.element, policy)
    if isinstance(t1, Adt):
        return (
            _base_name(t1.name) == _base_name(t2.name)
            and len(t1.type_args) == len(t2.type_args)
            and all(type_equal(a, b, policy) for a, b in zip(t1.type_args, t2.type_args))
        )
    return t1.name == t2.name


def _base_name(path: str) -> str:
    return path.rsplit("::", 1)[-1]


# ---------------------------------------------------------------------------
# Structs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    file: str = "<input>"
    start_line: int = 0
    end_line: int = 0


@dataclass(frozen=True)
class StructDef:
    name: str
    lifetime_params: Tuple[str, ...] = ()
    type_params: Tuple[str, ...] = ()
    fields: Tuple[Tuple[str, SubjectType], ...] = ()
    opaque: bool = False
    span: Span = field(default=Span(), compare=False)

    def field_type(self, name: str) -> Optional[SubjectType]:
        for fname, ftype in self.fields:
            if fname == name:
                return ftype
        return None

    def instantiate(self, adt: Adt) -> Tuple[Tuple[str, SubjectType], ...]:
        """Field list with the struct's parameters replaced by ``adt``'s arguments."""
        lmap: Dict[str, Lifetime] = dict(zip(self.lifetime_params, adt.lifetime_args))
        tmap: Dict[str, SubjectType] = dict(zip(self.type_params, adt.type_args))

        def sub_lt(l: Optional[Lifetime]) -> Optional[Lifetime]:
            if l is not None and l.kind == "named" and l.name in lmap:
                return lmap[l.name]
            return l

        def sub(node):
            if isinstance(node, REFERENCES):
                return replace(node, lifetime=sub_lt(node.lifetime))
            if isinstance(node, Adt):
                return replace(node, lifetime_args=tuple(sub_lt(l) for l in node.lifetime_args))
            if isinstance(node, Generic):
                if node.name in tmap:
                    return tmap[node.name]
                return replace(node, lifetime_bounds=tuple(sub_lt(l) for l in node.lifetime_bounds))
            return node

        return tuple((fname, map_type(ftype, sub)) for fname, ftype in self.fields)

    def instance_lifetimes(self, adt: Adt) -> Tuple[Lifetime, ...]:
        """The lifetime arguments bound to this struct's lifetime parameters."""
        return tuple(adt.lifetime_args[: len(self.lifetime_params)])


class StructTable:
    """Struct definitions by name; path-qualified names resolve by last segment."""

    def __init__(self, defs: Iterable[StructDef] = ()) -> None:
        self._defs: Dict[str, StructDef] = {}
        for d in defs:
            self.add(d)

    def add(self, d: StructDef) -> None:
        self._defs[d.name] = d

    def get(self, name: str) -> Optional[StructDef]:
        return self._defs.get(_base_name(name))

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def __iter__(self) -> Iterator[StructDef]:
        return iter(self._defs.values())

    def __len__(self) -> int:
        return len(self._defs)

    def __eq__(self, other) -> bool:
        return isinstance(other, StructTable) and self._defs == other._defs

    def is_opaque(self, adt: Adt) -> bool:
        d = self.get(adt.name)
        return d is None or d.opaque


# ---------------------------------------------------------------------------
# Value paths
# ---------------------------------------------------------------------------

DEREF = "*"
INDEX = "[]"


@dataclass(frozen=True, order=True)
class Root:
    kind: str  # "arg" | "self" | "ret" | "local"
    name: str
    index: int = -1

    def __str__(self) -> str:
        return self.name


SELF_ROOT = Root("self", "self", 0)
RET_ROOT = Root("ret", "ret")


def local(name: str) -> Root:
    return Root("local", name)


@dataclass(frozen=True)
class ValuePath:
    """A root plus projections; ``"*"`` derefs, ``"[]"`` indexes, anything else is a field."""

    root: Root
    projections: Tuple[str, ...] = ()

    def deref(self) -> "ValuePath":
        return ValuePath(self.root, self.projections + (DEREF,))

    def field(self, name: str) -> "ValuePath":
        return ValuePath(self.root, self.projections + (name,))

    def index(self) -> "ValuePath":
        return ValuePath(self.root, self.projections + (INDEX,))

    @property
    def depth(self) -> int:
        return len(self.projections)

    def __str__(self) -> str:
        text = self.root.name
        for p in self.projections:
            if p == DEREF:
                # `*x.f` already means `*(x.f)`; parenthesize only a bare-root field chain
                if text[0] in "*(" or all(c.isalnum() or c == "_" for c in text):
                    text = "*" + text
                else:
                    text = f"*({text})"
            elif p == INDEX:
                text = f"({text})[_]" if text.startswith("*") else f"{text}[_]"
            else:
                text = f"({text}).{p}" if text.startswith("*") else f"{text}.{p}"
        return text

    def sort_key(self):
        # prefixes sort before their extensions
        return (self.root.name, self.projections)

    def __lt__(self, other: "ValuePath") -> bool:
        return self.sort_key() < other.sort_key()


Place = ValuePath


def type_of_path(path: ValuePath, root_type: SubjectType, structs: StructTable) -> SubjectType:
    """Type of ``path`` given its root's type; raises PathTypeError when ill-typed."""
    t = root_type
    for p in path.projections:
        t = project_type(t, p, structs)
        if t is None:
            raise PathTypeError(f"cannot apply {p!r} in {path}")
    return t


def project_type(t: SubjectType, proj: str, structs: StructTable) -> Optional[SubjectType]:
    if proj == DEREF:
        return t.inner if isinstance(t, POINTERS) else None
    if proj == INDEX:
        return t.element if isinstance(t, Slice) else None
    if not isinstance(t, Adt):
        return None
    d = structs.get(t.name)
    if d is None or d.opaque:
        if proj.startswith("<") and proj.endswith(">"):
            i = int(proj[1:-1])
            return t.type_args[i] if i < len(t.type_args) else None
        return None
    return dict(d.instantiate(t)).get(proj)


def content_field(i: int) -> str:
    """Pseudo-field naming the i-th type argument of an opaque container."""
    return f"<{i}>"


# ---------------------------------------------------------------------------
# Body IR
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Use:
    place: Place


@dataclass(frozen=True)
class RefTo:
    place: Place
    mutable: bool = False


@dataclass(frozen=True)
class Aggregate:
    adt: str
    fields: Tuple[Tuple[str, Optional[Place]], ...]  # None stands for a constant


Rvalue = Union[Use, RefTo, Aggregate]


@dataclass(frozen=True)
class Assign:
    dst: Place
    rv: Rvalue


@dataclass(frozen=True)
class Call:
    dst: Place
    callee: str
    args: Tuple[Place, ...]


@dataclass(frozen=True)
class ReturnStmt:
    place: Optional[Place] = None


Statement = Union[Assign, Call, ReturnStmt]


@dataclass
class BasicBlock:
    statements: list = field(default_factory=list)
    successors: list = field(default_factory=list)


@dataclass
class Body:
    blocks: list = field(default_factory=list)

    def statements(self) -> Iterator[Statement]:
        for b in self.blocks:
            yield from b.statements

    def validate(self) -> None:
        n = len(self.blocks)
        if n == 0:
            raise ValueError("body has no entry block")
        for i, b in enumerate(self.blocks):
            for s in b.successors:
                if not 0 <= s < n:
                    raise ValueError(f"block {i} has invalid successor {s}")
            if any(isinstance(st, ReturnStmt) for st in b.statements) and b.successors:
                raise ValueError(f"returning block {i} has successors")


# ---------------------------------------------------------------------------
# Functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImplRef:
    self_type: Adt
    trait: Optional[str] = None
    lifetime_params: Tuple[str, ...] = ()
    type_params: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Param:
    name: str
    type: SubjectType
    root: Root


@dataclass(frozen=True)
class FunctionModel:
    name: str
    params: Tuple[Param, ...] = ()
    return_type: Optional[SubjectType] = None
    lifetime_params: Tuple[str, ...] = ()
    impl_of: Optional[ImplRef] = None
    where_bounds: Tuple[Tuple[str, Lifetime], ...] = ()
    lifetime_bounds: Tuple[Tuple[Lifetime, Lifetime], ...] = ()  # (longer, shorter)
    body: Optional[Body] = field(default=None, compare=False)
    body_error: Optional[str] = field(default=None, compare=False)
    span: Span = field(default=Span(), compare=False)

    @property
    def qualname(self) -> str:
        if self.impl_of is None:
            return self.name
        return f"{_base_name(self.impl_of.self_type.name)}::{self.name}"

    @property
    def self_param(self) -> Optional[Param]:
        for p in self.params:
            if p.root.kind == "self":
                return p
        return None

    def root_type(self, root: Root) -> Optional[SubjectType]:
        if root.kind == "ret":
            return self.return_type
        for p in self.params:
            if p.root == root:
                return p.type
        return None


def resolve_self(fn: FunctionModel, structs: StructTable) -> FunctionModel:
    """Replace ``Self`` in the signature with the impl's struct type."""
    if fn.impl_of is None:
        return fn
    self_ty = fn.impl_of.self_type
    if structs.get(self_ty.name) is None:
        raise UnknownStruct(f"impl of undeclared struct {self_ty.name}")

    def sub(node):
        if isinstance(node, Adt) and node.name == "Self" and not node.type_args:
            return self_ty
        return node

    params = tuple(replace(p, type=map_type(p.type, sub)) for p in fn.params)
    ret = map_type(fn.return_type, sub) if fn.return_type is not None else None
    return replace(fn, params=params, return_type=ret)


@dataclass
class CrateModel:
    structs: StructTable
    functions: list
    diagnostics: list = field(default_factory=list)
    file: str = "<input>"

    def function(self, qualname: str) -> FunctionModel:
        for f in self.functions:
            if f.qualname == qualname:
                return f
        raise KeyError(qualname)
