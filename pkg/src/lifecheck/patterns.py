"""Violation patterns over extracted facts (arg-return and arg-arg pairs)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .extract import (
    DEFAULT_MAX_DEPTH,
    ExtractionFact,
    OutlivesBound,
    decompose,
    derive_bounds,
    is_raw_involved,
    outlives,
)
from .model import (
    RET_ROOT,
    FunctionModel,
    Generic,
    Lifetime,
    MatchPolicy,
    RawUnique,
    Span,
    StructTable,
    UniqueRef,
    ValuePath,
    type_equal,
)

log = logging.getLogger(__name__)

MAX_CANDIDATES = 256

_STRICT = MatchPolicy(generic_wildcard=False)
_WILDCARD = MatchPolicy(generic_wildcard=True)


class Kind(str, Enum):
    UAF_ARG_RETURN = "uaf-arg-return"
    UAF_ARG_ARG = "uaf-arg-arg"
    NEM_ARG_RETURN = "nem-arg-return"

    @property
    def rank(self) -> int:
        return list(Kind).index(self)


@dataclass(frozen=True)
class CandidateViolation:
    kind: Kind
    source: ExtractionFact
    target: ExtractionFact
    function: str
    span: Span = field(default=Span(), compare=False)
    stage: str = "candidate"

    def sort_key(self):
        return (self.kind.rank, self.source.path.sort_key(), self.target.path.sort_key())

    def __str__(self) -> str:
        return f"{self.function}: {self.kind.value} {self.source.path} -> {self.target.path}"


# -- helpers ---------------------------------------------------------------------


def _lifetimes_conflict(bounds, s: ExtractionFact, t: ExtractionFact) -> bool:
    return (
        s.borrowed_for is not None
        and t.borrowed_for is not None
        and not outlives(bounds, s.borrowed_for, t.borrowed_for)
    )


def _pointee_of_mut(fact: ExtractionFact):
    ty = fact.type
    if isinstance(ty, (UniqueRef, RawUnique)):
        return ty.inner
    return None


def _is_bounded_generic(fact: ExtractionFact) -> bool:
    return isinstance(fact.type, Generic) and bool(fact.type.lifetime_bounds)


def _effective_lifetimes(fact: ExtractionFact) -> Tuple[Lifetime, ...]:
    if fact.borrowed_for is not None:
        return (fact.borrowed_for,)
    if _is_bounded_generic(fact):
        return fact.type.lifetime_bounds
    return ()


def _held_pair(bounds, s: ExtractionFact, t: ExtractionFact) -> bool:
    # the same value reachable mutably from both sides
    return (
        s.mutably_held
        and t.mutably_held
        and type_equal(s.type, t.type, _STRICT)
        and _lifetimes_conflict(bounds, s, t)
        and (is_raw_involved(s) or is_raw_involved(t))
    )


def _pointer_pair(bounds, s: ExtractionFact, t: ExtractionFact) -> bool:
    sp, tp = _pointee_of_mut(s), _pointee_of_mut(t)
    matches = (sp is not None and type_equal(sp, t.type, _STRICT)) or (
        tp is not None and type_equal(tp, s.type, _STRICT)
    )
    return matches and _lifetimes_conflict(bounds, s, t) and (is_raw_involved(s) or is_raw_involved(t))


# -- the three checks ------------------------------------------------------------


def check_arg_return_uaf(
    arg_facts: Sequence[ExtractionFact],
    ret_facts: Sequence[ExtractionFact],
    bounds: Iterable[OutlivesBound],
    function: str = "",
    span: Span = Span(),
) -> List[CandidateViolation]:
    bounds = frozenset(bounds)
    out: Dict[tuple, CandidateViolation] = {}
    for s in arg_facts:
        if s.borrowed_for is None:
            continue
        for t in ret_facts:
            if not (is_raw_involved(s) or is_raw_involved(t)):
                continue
            if not type_equal(s.type, t.type, _STRICT):
                continue
            if t.borrowed_for is None or not outlives(bounds, s.borrowed_for, t.borrowed_for):
                key = (s.path, t.path)
                out.setdefault(key, CandidateViolation(Kind.UAF_ARG_RETURN, s, t, function, span))
    return list(out.values())


def check_arg_return_nem(
    arg_facts: Sequence[ExtractionFact],
    ret_facts: Sequence[ExtractionFact],
    bounds: Iterable[OutlivesBound],
    function: str = "",
    span: Span = Span(),
) -> List[CandidateViolation]:
    bounds = frozenset(bounds)
    out: Dict[tuple, CandidateViolation] = {}
    for s in arg_facts:
        for t in ret_facts:
            if _pointer_pair(bounds, s, t) or _held_pair(bounds, s, t):
                out.setdefault((s.path, t.path), CandidateViolation(Kind.NEM_ARG_RETURN, s, t, function, span))
    return list(out.values())


def check_arg_arg_uaf(
    facts_by_arg: Sequence[Sequence[ExtractionFact]],
    bounds: Iterable[OutlivesBound] = (),
    function: str = "",
    span: Span = Span(),
) -> List[CandidateViolation]:
    """Values of matching type in two different arguments.

    The side reached through a mutable pointer is the one written to, so it
    is the target; when that does not decide, the side holding the raw
    pointer is. Sources whose lifetime is `'static` are safe to store.
    """
    out: Dict[tuple, CandidateViolation] = {}
    for left, right in combinations(facts_by_arg, 2):
        for a in left:
            for b in right:
                if a.immutable_only and b.immutable_only:
                    continue
                if not type_equal(a.type, b.type, _WILDCARD):
                    continue
                concrete = [f for f in (a, b) if not _is_bounded_generic(f)]
                if not any(is_raw_involved(f) for f in concrete):
                    continue
                src, tgt = _orient(a, b)
                lts = _effective_lifetimes(src)
                if not lts or any(l.is_static for l in lts):
                    continue
                out.setdefault((src.path, tgt.path), CandidateViolation(Kind.UAF_ARG_ARG, src, tgt, function, span))
    return list(out.values())


def _orient(a: ExtractionFact, b: ExtractionFact) -> Tuple[ExtractionFact, ExtractionFact]:
    if a.mutably_held != b.mutably_held:
        return (b, a) if a.mutably_held else (a, b)
    ra, rb = is_raw_involved(a), is_raw_involved(b)
    if ra != rb:
        return (b, a) if ra else (a, b)
    return a, b


# -- orchestration ---------------------------------------------------------------


def function_bounds(fn: FunctionModel, structs: StructTable, max_depth: int = DEFAULT_MAX_DEPTH) -> FrozenSet[OutlivesBound]:
    return derive_bounds([p.type for p in fn.params], structs, fn.lifetime_bounds, max_depth)


def check_function(
    fn: FunctionModel,
    structs: Optional[StructTable] = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    limit: int = MAX_CANDIDATES,
) -> List[CandidateViolation]:
    """All candidates for one elaborated function, deduplicated and sorted."""
    structs = structs or StructTable()
    by_arg = [decompose(p.root, p.type, structs, max_depth) for p in fn.params]
    arg_facts = [f for facts in by_arg for f in facts]
    bounds = function_bounds(fn, structs, max_depth)
    name, span = fn.qualname, fn.span
    found: List[CandidateViolation] = []
    if fn.return_type is not None:
        ret_facts = decompose(RET_ROOT, fn.return_type, structs, max_depth)
        nem = check_arg_return_nem(arg_facts, ret_facts, bounds, name, span)
        held = {(c.source.path, c.target.path) for c in nem}
        uaf = [
            c for c in check_arg_return_uaf(arg_facts, ret_facts, bounds, name, span)
            if (c.source.path, c.target.path) not in held
        ]
        found += uaf + nem
    found += check_arg_arg_uaf(by_arg, bounds, name, span)
    found.sort(key=CandidateViolation.sort_key)
    if len(found) > limit:
        log.warning("%s: %d candidates, keeping the first %d", name, len(found), limit)
        found = found[:limit]
    return found


def with_stage(c: CandidateViolation, stage: str) -> CandidateViolation:
    return replace(c, stage=stage)


def flow_query(c: CandidateViolation) -> Tuple[ValuePath, ValuePath]:
    """The (from, to) paths whose flow would make ``c`` real.

    For the pointer form of non-exclusive mutability the pointee of the
    pointer side is what must reach the other side.
    """
    s, t = c.source, c.target
    if c.kind is Kind.NEM_ARG_RETURN:
        sp, tp = _pointee_of_mut(s), _pointee_of_mut(t)
        if sp is not None and type_equal(sp, t.type, _STRICT):
            return s.path.deref(), t.path
        if tp is not None and type_equal(tp, s.type, _STRICT):
            return s.path, t.path.deref()
    return s.path, t.path
