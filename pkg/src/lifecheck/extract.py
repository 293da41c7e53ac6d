"""Lifetime-bound extraction: value paths with the lifetime each must outlive."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .model import (
    DEREF,
    INDEX,
    RAWS,
    REFERENCES,
    Adt,
    Lifetime,
    RawUnique,
    Root,
    Slice,
    StructTable,
    SubjectType,
    UniqueRef,
    ValuePath,
    content_field,
    local,
)

DEFAULT_MAX_DEPTH = 8


@dataclass(frozen=True)
class ExtractionFact:
    path: ValuePath
    type: SubjectType
    borrowed_for: Optional[Lifetime]  # None: owned
    via_raw: bool = False
    # pointer kind crossed at each Deref of the path: "&", "&mut", "*const", "*mut"
    derefs: Tuple[str, ...] = field(default=(), compare=False)

    @property
    def mutably_held(self) -> bool:
        """The value sits directly behind a mutable pointer (only indexing after it)."""
        projs = self.path.projections
        if not self.derefs or DEREF not in projs:
            return False
        last = len(projs) - 1 - projs[::-1].index(DEREF)
        if any(p != INDEX for p in projs[last + 1 :]):
            return False
        return self.derefs[-1] in ("&mut", "*mut")

    @property
    def immutable_only(self) -> bool:
        return bool(self.derefs) and all(k in ("&", "*const") for k in self.derefs)

    @property
    def owned(self) -> bool:
        return self.borrowed_for is None

    def __str__(self) -> str:
        lt = "Owned" if self.borrowed_for is None else str(self.borrowed_for)
        return f"{self.path}: {self.type} : {lt}" + (" (raw)" if self.via_raw else "")


@dataclass(frozen=True, order=True)
class OutlivesBound:
    longer: Lifetime
    shorter: Lifetime

    def __str__(self) -> str:
        return f"{self.longer}: {self.shorter}"


def decompose(
    root: Root,
    t: SubjectType,
    structs: Optional[StructTable] = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> List[ExtractionFact]:
    """All facts reachable from a value of type ``t`` at ``root``.

    Every value carries the lifetime of the innermost reference it sits
    behind. A raw pointer's pointee takes the lifetime parameters of the
    struct holding the pointer, one fact each; a pointer in a struct without
    lifetime parameters is owned by it and so inherits the current lifetime.
    Paths stop growing after ``max_depth`` projections.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    structs = structs or StructTable()
    out: List[ExtractionFact] = []
    seen = set()

    def visit(path: ValuePath, ty: SubjectType, cur: Optional[Lifetime], raw: bool,
              holder: Tuple[Lifetime, ...], by_value: Tuple[str, ...], derefs: Tuple[str, ...] = ()) -> None:
        key = (path, cur)
        if key in seen:
            return
        seen.add(key)
        out.append(ExtractionFact(path, ty, cur, raw, derefs))
        if path.depth >= max_depth:
            return
        if isinstance(ty, REFERENCES):
            kind = "&mut" if isinstance(ty, UniqueRef) else "&"
            visit(path.deref(), ty.inner, ty.lifetime, raw, (), (), derefs + (kind,))
        elif isinstance(ty, RAWS):
            kind = "*mut" if isinstance(ty, RawUnique) else "*const"
            for lt in holder or (cur,):
                visit(path.deref(), ty.inner, lt, True, (), (), derefs + (kind,))
        elif isinstance(ty, Slice):
            visit(path.index(), ty.element, cur, raw, holder, by_value, derefs)
        elif isinstance(ty, Adt):
            d = structs.get(ty.name)
            if d is None or d.opaque:
                # unknown layout: only the type arguments are visible, as owned contents
                inner_holder = tuple(l for l in ty.lifetime_args if l is not None) or holder
                for i, arg in enumerate(ty.type_args):
                    visit(path.field(content_field(i)), arg, cur, raw, inner_holder, by_value, derefs)
                return
            if d.name in by_value:
                return
            inner_holder = tuple(l for l in d.instance_lifetimes(ty) if l is not None)
            for fname, ftype in d.instantiate(ty):
                visit(path.field(fname), ftype, cur, raw, inner_holder, by_value + (d.name,), derefs)

    visit(ValuePath(root), t, None, False, (), ())
    return out


def is_raw_involved(fact: ExtractionFact) -> bool:
    return fact.via_raw or isinstance(fact.type, RAWS)


def _walk_lifetimes(t: SubjectType) -> Iterable[Lifetime]:
    # generic bounds say what a type parameter outlives, not what encloses it
    if isinstance(t, REFERENCES):
        if t.lifetime is not None:
            yield t.lifetime
        yield from _walk_lifetimes(t.inner)
    elif isinstance(t, RAWS):
        yield from _walk_lifetimes(t.inner)
    elif isinstance(t, Adt):
        yield from (l for l in t.lifetime_args if l is not None)
        for a in t.type_args:
            yield from _walk_lifetimes(a)
    elif isinstance(t, Slice):
        yield from _walk_lifetimes(t.element)


def derive_bounds(
    arg_types: Sequence[SubjectType],
    structs: Optional[StructTable] = None,
    declared: Iterable[Tuple[Lifetime, Lifetime]] = (),
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> FrozenSet[OutlivesBound]:
    """Outlives bounds implied by the argument types plus declared `'a: 'b` bounds.

    A reference `&'r T` is only well-formed when everything in ``T``
    outlives ``'r``; struct fields are visited so references inside
    instantiated structs contribute too.
    """
    structs = structs or StructTable()
    found = set()
    for i, t in enumerate(arg_types):
        for fact in decompose(local(f"_b{i}"), t, structs, max_depth):
            ty = fact.type
            if isinstance(ty, REFERENCES) and ty.lifetime is not None:
                for inner in _walk_lifetimes(ty.inner):
                    if inner != ty.lifetime:
                        found.add(OutlivesBound(inner, ty.lifetime))
    for longer, shorter in declared:
        if longer != shorter:
            found.add(OutlivesBound(longer, shorter))
    return frozenset(found)


@lru_cache(maxsize=4096)
def _closure(bounds: FrozenSet[OutlivesBound]) -> FrozenSet[Tuple[Lifetime, Lifetime]]:
    pairs = {(b.longer, b.shorter) for b in bounds}
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            for c, d in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return frozenset(pairs)


def outlives(bounds: Iterable[OutlivesBound], l1: Lifetime, l2: Lifetime) -> bool:
    """True when ``l1`` is known to be at least as long as ``l2``."""
    if l1 == l2 or l1.is_static:
        return True
    closed = _closure(frozenset(bounds))
    # anything bounded by 'static outlives everything 'static does
    return (l1, l2) in closed or any(s.is_static for a, s in closed if a == l1)


__all__ = [
    "DEFAULT_MAX_DEPTH",
    "ExtractionFact",
    "OutlivesBound",
    "decompose",
    "derive_bounds",
    "is_raw_involved",
    "outlives",
]
