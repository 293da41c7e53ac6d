"""Source text to CrateModel: parsing, elision expansion and body lowering."""

from __future__ import annotations

from dataclasses import replace

from ..model import CrateModel, FunctionModel, LifecheckError, StructTable, resolve_self
from .elision import ElisionError, expand_elision, is_fully_elaborated
from .lexer import ParseError
from .lowering import LoweringError, lower_body
from .parser import ParsedFn, Unsupported, parse_body, parse_source

__all__ = [
    "ElisionError",
    "LoweringError",
    "ParseError",
    "Unsupported",
    "expand_elision",
    "is_fully_elaborated",
    "lower_body",
    "parse_crate",
]


def parse_crate(source: str, filename: str = "<input>") -> CrateModel:
    """Parse one source file.

    Malformed structs or signatures raise ParseError. Functions whose
    signature cannot be elaborated are skipped with a diagnostic; bodies
    that cannot be lowered are dropped, leaving a signature-only model.
    """
    parsed = parse_source(source, filename)
    structs = StructTable(parsed.structs)
    crate = CrateModel(structs, [], list(parsed.diagnostics), filename)
    for pf in parsed.fns:
        fn = _build(pf, structs, crate.diagnostics)
        if fn is not None:
            crate.functions.append(fn)
    return crate


def _build(pf: ParsedFn, structs: StructTable, diagnostics: list):
    fn = FunctionModel(
        name=pf.name,
        params=pf.params,
        return_type=pf.return_type,
        lifetime_params=pf.lifetime_params,
        impl_of=pf.impl_of,
        where_bounds=pf.where_bounds,
        lifetime_bounds=pf.lifetime_bounds,
        span=pf.span,
    )
    where = f"{pf.span.file}:{pf.span.start_line}"
    try:
        fn = expand_elision(resolve_self(fn, structs), structs)
    except LifecheckError as exc:
        diagnostics.append(f"{where}: skipped {fn.qualname}: {exc}")
        return None
    if pf.body_tokens is None:
        return fn
    try:
        block = parse_body(pf.body_tokens, pf.span.file)
        body = lower_body(block, fn, structs)
    except (Unsupported, ParseError, LoweringError) as exc:
        diagnostics.append(f"{where}: body of {fn.qualname} not analyzed: {exc}")
        return replace(fn, body_error=str(exc))
    return replace(fn, body=body)
