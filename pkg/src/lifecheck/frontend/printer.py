"""Source printer for parsed models; its output parses back to the same model."""

from __future__ import annotations

from typing import Dict, List

from ..model import (
    Assign,
    Body,
    Call,
    CrateModel,
    FunctionModel,
    Generic,
    ImplRef,
    RefTo,
    ReturnStmt,
    StructDef,
    SubjectType,
    Use,
    map_type,
)


def format_type(t: SubjectType) -> str:
    return str(t)


def _generics_in(types) -> Dict[str, tuple]:
    found: Dict[str, tuple] = {}

    def visit(node):
        if isinstance(node, Generic) and not node.name.startswith(("dyn ", "impl ")) and node.name != "_":
            found.setdefault(node.name, node.lifetime_bounds)
        return node

    for t in types:
        map_type(t, visit)
    return found


def format_struct(d: StructDef) -> str:
    params = [f"'{l}" for l in d.lifetime_params]
    bounds = _generics_in(t for _, t in d.fields)
    for tp in d.type_params:
        b = bounds.get(tp, ())
        params.append(tp + (": " + " + ".join(str(l) for l in b) if b else ""))
    head = f"struct {d.name}" + (f"<{', '.join(params)}>" if params else "")
    if d.fields and all(f.isdigit() for f, _ in d.fields):
        return head + "(" + ", ".join(format_type(t) for _, t in d.fields) + ");"
    if not d.fields:
        return head + " {}"
    lines = [f"    {f}: {format_type(t)}," for f, t in d.fields]
    return head + " {\n" + "\n".join(lines) + "\n}"


def _sig_types(fn: FunctionModel) -> List[SubjectType]:
    return [p.type for p in fn.params] + ([fn.return_type] if fn.return_type is not None else [])


def format_fn(fn: FunctionModel, indent: str = "") -> str:
    impl_params = set(fn.impl_of.type_params) if fn.impl_of else set()
    generics = [g for g in _generics_in(_sig_types(fn)) if g not in impl_params]
    for g, _ in fn.where_bounds:
        if g not in generics and g not in impl_params:
            generics.append(g)
    params = [f"'{l}" for l in fn.lifetime_params] + generics
    head = f"fn {fn.name}" + (f"<{', '.join(params)}>" if params else "")
    args = ", ".join(f"{p.name}: {format_type(p.type)}" for p in fn.params)
    head += f"({args})"
    if fn.return_type is not None:
        head += f" -> {format_type(fn.return_type)}"
    where = [f"{a}: {b}" for a, b in fn.lifetime_bounds] + [f"{g}: {l}" for g, l in fn.where_bounds]
    if where:
        head += " where " + ", ".join(where)
    if fn.body is None or len(fn.body.blocks) != 1:
        # bodies with control flow are not printed
        return indent + head + ";"
    inner = indent + "    "
    body = "\n".join(inner + line for line in format_body(fn.body))
    return f"{indent}{head} {{\n{body}\n{indent}}}" if body else f"{indent}{head} {{}}"


def format_body(body: Body) -> List[str]:
    """Statement lines for a single-block body (multi-block control flow is not printed)."""
    if len(body.blocks) != 1:
        raise ValueError("only single-block bodies can be printed")
    lines: List[str] = []
    stmts = body.blocks[0].statements
    for i, s in enumerate(stmts):
        if isinstance(s, Assign):
            lines.append(f"{s.dst} = {_rvalue(s.rv)};")
        elif isinstance(s, Call):
            lines.append(_call(s))
        elif isinstance(s, ReturnStmt):
            if i != len(stmts) - 1:
                raise ValueError("return before the end of a single-block body")
            if s.place is not None:
                lines.append(str(s.place))
    return lines


def _rvalue(rv) -> str:
    if isinstance(rv, Use):
        return str(rv.place)
    if isinstance(rv, RefTo):
        return f"&{'mut ' if rv.mutable else ''}{rv.place}"
    raise ValueError(f"cannot print rvalue {rv!r}")


def _call(s: Call) -> str:
    if s.callee.startswith("op"):
        op = s.callee[2:]
        if op.endswith("=") and op not in ("==", "!=", "<=", ">=") and len(s.args) == 2 and s.args[0] == s.dst:
            return f"{s.dst} {op} {s.args[1]};"
        if len(s.args) == 2:
            return f"{s.dst} = {s.args[0]} {op} {s.args[1]};"
        if len(s.args) == 1:
            return f"{s.dst} = {op}{s.args[0]};"
    return f"{s.dst} = {s.callee}({', '.join(str(a) for a in s.args)});"


def _impl_header(ref: ImplRef, fns: List[FunctionModel]) -> str:
    bounds: Dict[str, tuple] = {}
    for fn in fns:
        for g, b in _generics_in(_sig_types(fn)).items():
            if g in ref.type_params:
                bounds.setdefault(g, b)
    params = [f"'{l}" for l in ref.lifetime_params]
    for tp in ref.type_params:
        b = bounds.get(tp, ())
        params.append(tp + (": " + " + ".join(str(l) for l in b) if b else ""))
    head = "impl" + (f"<{', '.join(params)}>" if params else "") + " "
    if ref.trait:
        head += f"{ref.trait} for "
    return head + format_type(ref.self_type)


def format_crate(crate: CrateModel) -> str:
    parts = [format_struct(d) for d in crate.structs]
    for fn in crate.functions:
        if fn.impl_of is None:
            parts.append(format_fn(fn))
        else:
            parts.append(_impl_header(fn.impl_of, [fn]) + " {\n" + format_fn(fn, "    ") + "\n}")
    return "\n\n".join(parts) + "\n"

