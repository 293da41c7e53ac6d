"""Expansion of elided and `'_` lifetimes into numbered anonymous lifetimes."""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from ..model import (
    REFERENCES,
    Adt,
    FunctionModel,
    Lifetime,
    LifecheckError,
    StructTable,
    SubjectType,
    lifetimes_in,
    map_type,
)


class ElisionError(LifecheckError):
    pass


def _needs_fill(l: Optional[Lifetime]) -> bool:
    return l is None or (l.is_anon and l.id == 0)


def _pad_adt(node: Adt, structs: StructTable) -> Adt:
    d = structs.get(node.name)
    if d is None or d.opaque:
        return node
    missing = len(d.lifetime_params) - len(node.lifetime_args)
    if missing > 0:
        return replace(node, lifetime_args=node.lifetime_args + (None,) * missing)
    return node


def expand_elision(fn: FunctionModel, structs: Optional[StructTable] = None) -> FunctionModel:
    """Number every input-position elided lifetime and bind output-position ones.

    Output lifetimes left out entirely bind to the single input lifetime, or
    failing that to the `self` reference's lifetime. A written `'_` in the
    output is a fresh lifetime of its own.
    """
    structs = structs or StructTable()
    existing = [l.id for p in fn.params for l in lifetimes_in(p.type) if l is not None and l.is_anon]
    if fn.return_type is not None:
        existing += [l.id for l in lifetimes_in(fn.return_type) if l is not None and l.is_anon]
    counter = [max(existing, default=0)]

    def fresh() -> Lifetime:
        counter[0] += 1
        return Lifetime.anon(counter[0])

    def fill_input(node):
        if isinstance(node, Adt):
            node = _pad_adt(node, structs)
            if any(_needs_fill(l) for l in node.lifetime_args):
                return replace(node, lifetime_args=tuple(fresh() if _needs_fill(l) else l for l in node.lifetime_args))
        elif isinstance(node, REFERENCES) and _needs_fill(node.lifetime):
            return replace(node, lifetime=fresh())
        return node

    # pre-order numbering: outer references get the smaller ids
    params = tuple(replace(p, type=_map_preorder(p.type, fill_input)) for p in fn.params)
    ret = fn.return_type
    if ret is not None:
        inputs = []
        for p in params:
            for l in _signature_lifetimes(p.type):
                if l not in inputs:
                    inputs.append(l)
        self_lt = None
        sp = next((p for p in params if p.root.kind == "self"), None)
        if sp is not None and isinstance(sp.type, REFERENCES):
            self_lt = sp.type.lifetime

        def bound_output() -> Lifetime:
            if len(inputs) == 1:
                return inputs[0]
            if self_lt is not None:
                return self_lt
            raise ElisionError(
                f"{fn.qualname}: cannot infer output lifetime "
                f"({len(inputs)} input lifetimes and no self reference)"
            )

        def fill_output(node):
            if isinstance(node, Adt):
                node = _pad_adt(node, structs)
                if any(_needs_fill(l) for l in node.lifetime_args):
                    return replace(
                        node,
                        lifetime_args=tuple(
                            bound_output() if l is None else fresh() if _needs_fill(l) else l
                            for l in node.lifetime_args
                        ),
                    )
            elif isinstance(node, REFERENCES):
                if node.lifetime is None:
                    return replace(node, lifetime=bound_output())
                if _needs_fill(node.lifetime):
                    return replace(node, lifetime=fresh())
            return node

        ret = _map_preorder(ret, fill_output)
    return replace(fn, params=params, return_type=ret)


def _map_preorder(t: SubjectType, fn) -> SubjectType:
    t = fn(t)
    if hasattr(t, "inner"):
        return replace(t, inner=_map_preorder(t.inner, fn))
    if isinstance(t, Adt):
        return replace(t, type_args=tuple(_map_preorder(a, fn) for a in t.type_args))
    if hasattr(t, "element"):
        return replace(t, element=_map_preorder(t.element, fn))
    return t


def _signature_lifetimes(t: SubjectType):
    # generic bounds do not take part in elision
    found = []

    def visit(node):
        if isinstance(node, REFERENCES) and node.lifetime is not None:
            found.append(node.lifetime)
        elif isinstance(node, Adt):
            found.extend(l for l in node.lifetime_args if l is not None)
        return node

    _map_preorder(t, visit)
    return found


def is_fully_elaborated(fn: FunctionModel, structs: Optional[StructTable] = None) -> bool:
    """True when no type in the signature holds an unbound or `'_` lifetime."""
    structs = structs or StructTable()
    types = [p.type for p in fn.params] + ([fn.return_type] if fn.return_type is not None else [])
    for t in types:
        ok = [True]

        def check(node):
            if isinstance(node, REFERENCES) and _needs_fill(node.lifetime):
                ok[0] = False
            if isinstance(node, Adt):
                if any(_needs_fill(l) for l in node.lifetime_args):
                    ok[0] = False
                d = structs.get(node.name)
                if d is not None and not d.opaque and len(node.lifetime_args) < len(d.lifetime_params):
                    ok[0] = False
            return node

        map_type(t, check)
        if not ok[0]:
            return False
    return True
