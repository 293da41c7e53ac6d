"""
Recursive-descent parser for the supported source subset.

Struct definitions and function signatures are parsed straight into model
types; a malformed one raises ParseError. Function bodies are kept as token
slices and parsed on demand by ``parse_body`` into a small expression AST,
where anything outside the supported vocabulary raises Unsupported.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from ..model import (
    PRIMITIVES,
    SELF_ROOT,
    SELF_TYPE,
    Adt,
    Generic,
    ImplRef,
    Lifetime,
    Param,
    Prim,
    RawShared,
    RawUnique,
    Root,
    SharedRef,
    Slice,
    Span,
    StructDef,
    SubjectType,
    UniqueRef,
    STATIC,
    lifetimes_in,
    map_type,
)
from .lexer import ParseError, Token, tokenize


class Unsupported(Exception):
    """A body construct outside the lowering vocabulary."""

    def __init__(self, what: str, tok: Optional[Token] = None) -> None:
        where = f" at {tok.line}:{tok.col}" if tok is not None else ""
        super().__init__(f"unsupported {what}{where}")
        self.what = what
        self.tok = tok


# ---------------------------------------------------------------------------
# Body AST
# ---------------------------------------------------------------------------


@dataclass
class Name:
    name: str


@dataclass
class Lit:
    text: str


@dataclass
class FieldE:
    base: object
    name: str


@dataclass
class DerefE:
    base: object


@dataclass
class RefE:
    base: object
    mutable: bool


@dataclass
class IndexE:
    base: object
    index: object


@dataclass
class CallE:
    func: str
    args: list


@dataclass
class MethodE:
    recv: object
    name: str
    args: list


@dataclass
class StructLit:
    name: str
    fields: list  # (name, expr)


@dataclass
class TupleE:
    items: list


@dataclass
class BinE:
    op: str
    left: object
    right: object


@dataclass
class UnE:
    op: str
    operand: object


@dataclass
class CastE:
    expr: object


@dataclass
class BlockE:
    stmts: list
    tail: object = None


@dataclass
class IfE:
    cond: object
    then: BlockE
    orelse: object = None


@dataclass
class WhileE:
    cond: object
    body: BlockE


@dataclass
class LoopE:
    body: BlockE


@dataclass
class BreakE:
    pass


@dataclass
class ContinueE:
    pass


@dataclass
class ReturnE:
    value: object = None


@dataclass
class LetS:
    name: str
    type: Optional[SubjectType]
    init: object


@dataclass
class AssignS:
    target: object
    value: object
    op: str = "="


@dataclass
class ExprS:
    expr: object


# ---------------------------------------------------------------------------
# Parsed items
# ---------------------------------------------------------------------------


@dataclass
class ParsedFn:
    name: str
    lifetime_params: Tuple[str, ...]
    params: Tuple[Param, ...]
    return_type: Optional[SubjectType]
    where_bounds: Tuple[Tuple[str, Lifetime], ...]
    lifetime_bounds: Tuple[Tuple[Lifetime, Lifetime], ...]
    impl_of: Optional[ImplRef]
    body_tokens: Optional[List[Token]]
    span: Span
    generics: Tuple[str, ...] = ()


@dataclass
class ParsedFile:
    structs: List[StructDef]
    fns: List[ParsedFn]
    diagnostics: List[str]


_OPEN = {"(": ")", "[": "]", "{": "}"}


class Parser:
    def __init__(self, tokens: Sequence[Token], file: str = "<input>") -> None:
        self.toks = list(tokens)
        self.pos = 0
        self.file = file
        # generic type parameters in scope -> lifetime bounds declared so far
        self.scope: Dict[str, List[Lifetime]] = {}

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        i = min(self.pos + k, len(self.toks) - 1)
        return self.toks[i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("punct", "ident")

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col, self.file)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def split_gt(self) -> None:
        """Turn a leading '>=' or '>>' style token into '>' + rest (generic closing)."""
        t = self.tok
        if t.kind == "punct" and t.text.startswith(">") and len(t.text) > 1:
            rest = Token("punct", t.text[1:], t.line, t.col + 1)
            self.toks[self.pos : self.pos + 1] = [Token("punct", ">", t.line, t.col), rest]

    def expect_gt(self) -> None:
        self.split_gt()
        self.expect(">")

    def skip_balanced(self) -> List[Token]:
        """Consume a bracketed group starting at the current token; return its inner tokens."""
        open_tok = self.advance()
        close = _OPEN[open_tok.text]
        stack = [close]
        start = self.pos
        while stack:
            t = self.tok
            if t.kind == "eof":
                raise self.error(f"unclosed {open_tok.text!r}", open_tok)
            if t.kind == "punct" and t.text in _OPEN:
                stack.append(_OPEN[t.text])
            elif t.kind == "punct" and t.text in (")", "]", "}"):
                if t.text != stack[-1]:
                    raise self.error(f"mismatched {t.text!r}")
                stack.pop()
            self.advance()
        return self.toks[start : self.pos - 1]

    def skip_to_semicolon(self) -> None:
        while not self.at(";"):
            if self.tok.kind == "eof":
                raise self.error("expected ';'")
            if self.tok.kind == "punct" and self.tok.text in _OPEN:
                self.skip_balanced()
            else:
                self.advance()
        self.advance()

    def skip_attributes(self) -> None:
        while self.at("#"):
            self.advance()
            self.accept("!")
            if not self.at("["):
                raise self.error("expected '[' after '#'")
            self.skip_balanced()

    def skip_visibility(self) -> None:
        if self.accept("pub") and self.at("("):
            self.skip_balanced()

    # -- lifetimes and types ----------------------------------------------

    def lifetime(self) -> Lifetime:
        t = self.tok
        if t.kind != "lifetime":
            raise self.error(f"expected lifetime, found {t.text!r}")
        self.advance()
        return lifetime_from_text(t.text)

    def parse_type(self) -> SubjectType:
        t = self.tok
        if self.at("&") or self.at("&&"):
            double = self.advance().text == "&&"
            lt = self.lifetime() if self.tok.kind == "lifetime" else None
            mutable = self.accept("mut")
            inner = self.parse_type()
            ty: SubjectType = UniqueRef(lt, inner) if mutable else SharedRef(lt, inner)
            return SharedRef(None, ty) if double else ty
        if self.at("*"):
            self.advance()
            if self.accept("mut"):
                return RawUnique(self.parse_type())
            if self.accept("const"):
                return RawShared(self.parse_type())
            raise self.error("expected 'const' or 'mut' after '*'")
        if self.at("["):
            self.advance()
            elem = self.parse_type()
            if self.accept(";"):
                depth = 0
                while not (depth == 0 and self.at("]")):
                    if self.tok.kind == "eof":
                        raise self.error("unclosed array type")
                    if self.at("["):
                        depth += 1
                    elif self.at("]"):
                        depth -= 1
                    self.advance()
            self.expect("]")
            return Slice(elem)
        if self.at("("):
            self.advance()
            items = []
            while not self.at(")"):
                items.append(self.parse_type())
                if not self.accept(","):
                    break
            self.expect(")")
            if not items:
                return Prim("()")
            if len(items) == 1 and self.toks[self.pos - 2].text != ",":
                return items[0]
            return Adt("(tuple)", (), tuple(items))
        if self.at("!"):
            self.advance()
            return Prim("!")
        if self.at("dyn") or self.at("impl"):
            kw = self.advance().text
            names, lts = self.parse_bounds()
            return Generic(f"{kw} {' + '.join(names) or '?'}", tuple(lts))
        if self.at("fn") or self.at("unsafe") or self.at("extern"):
            while not self.at("fn"):
                self.advance()
                if self.tok.kind == "str":
                    self.advance()
            self.advance()
            if not self.at("("):
                raise self.error("expected '(' in fn pointer type")
            self.skip_balanced()
            if self.accept("->"):
                self.parse_type()
            return Prim("fn")
        if self.at("_"):
            self.advance()
            return Generic("_")
        if t.kind == "ident" or self.at("::"):
            return self.parse_path_type()
        raise self.error(f"expected type, found {t.text or 'end of input'!r}")

    def parse_path_type(self) -> SubjectType:
        segs: List[str] = []
        lts: List[Lifetime] = []
        targs: List[SubjectType] = []
        self.accept("::")
        while True:
            segs.append(self.ident())
            if self.at("<") or (self.at("::") and self.peek().text == "<"):
                self.accept("::")
                l, ta = self.parse_generic_args()
                lts, targs = l, ta
            if self.at("::") and self.peek().kind == "ident":
                self.advance()
                continue
            break
        name = "::".join(segs)
        if len(segs) == 1 and not lts and not targs:
            if name in self.scope:
                return Generic(name, tuple(self.scope[name]))
            if name in PRIMITIVES:
                return Prim(name)
            if name == "Self":
                return SELF_TYPE
        return Adt(name, tuple(lts), tuple(targs))

    def parse_generic_args(self) -> Tuple[List[Lifetime], List[SubjectType]]:
        self.expect("<")
        lts: List[Lifetime] = []
        targs: List[SubjectType] = []
        while True:
            self.split_gt()
            if self.at(">"):
                break
            if self.tok.kind == "lifetime":
                lts.append(self.lifetime())
            elif self.tok.kind == "ident" and self.peek().text == "=":
                self.advance()
                self.advance()
                self.parse_type()
            elif self.tok.kind in ("int",) or self.at("{"):
                if self.at("{"):
                    self.skip_balanced()
                else:
                    self.advance()
            else:
                targs.append(self.parse_type())
            self.split_gt()
            if not self.accept(","):
                break
        self.expect_gt()
        return lts, targs

    def parse_bounds(self) -> Tuple[List[str], List[Lifetime]]:
        """Parse ``Bound + Bound + 'a``; returns trait names and lifetime bounds."""
        names: List[str] = []
        lts: List[Lifetime] = []
        while True:
            if self.tok.kind == "lifetime":
                lts.append(self.lifetime())
            elif self.at("?") or self.at("(") or self.tok.kind == "ident" or self.at("::"):
                paren = self.accept("(")
                self.accept("?")
                if self.at("for"):
                    self.advance()
                    self.parse_generic_params()
                segs = []
                self.accept("::")
                while True:
                    segs.append(self.ident())
                    if self.at("<"):
                        self.parse_generic_args()
                    elif self.at("("):
                        self.skip_balanced()
                        if self.accept("->"):
                            self.parse_type()
                    if self.at("::"):
                        self.advance()
                        continue
                    break
                names.append("::".join(segs))
                if paren:
                    self.expect(")")
            elif self.at(".."):
                # `F: .. + 'c` as written in abbreviated listings
                self.advance()
            else:
                break
            if not self.accept("+"):
                break
        return names, lts

    def parse_generic_params(self) -> Tuple[List[str], List[str], List[Tuple[Lifetime, Lifetime]]]:
        """``<'a: 'b, T: Bound + 'a, const N: usize>`` -> (lifetimes, type params, lifetime bounds)."""
        lparams: List[str] = []
        tparams: List[str] = []
        lbounds: List[Tuple[Lifetime, Lifetime]] = []
        if not self.at("<"):
            return lparams, tparams, lbounds
        self.advance()
        while True:
            self.split_gt()
            if self.at(">"):
                break
            self.skip_attributes()
            if self.tok.kind == "lifetime":
                lt = self.lifetime()
                lparams.append(lt.name)
                if self.accept(":"):
                    while self.tok.kind == "lifetime":
                        lbounds.append((lt, self.lifetime()))
                        if not self.accept("+"):
                            break
            elif self.accept("const"):
                self.ident()
                self.expect(":")
                self.parse_type()
                if self.accept("="):
                    self.advance()
            else:
                name = self.ident()
                tparams.append(name)
                self.scope.setdefault(name, [])
                if self.accept(":"):
                    _, lts = self.parse_bounds()
                    self.scope[name].extend(lts)
                if self.accept("="):
                    self.parse_type()
            self.split_gt()
            if not self.accept(","):
                break
        self.expect_gt()
        return lparams, tparams, lbounds

    def parse_where(self) -> Tuple[List[Tuple[str, Lifetime]], List[Tuple[Lifetime, Lifetime]]]:
        gbounds: List[Tuple[str, Lifetime]] = []
        lbounds: List[Tuple[Lifetime, Lifetime]] = []
        if not self.accept("where"):
            return gbounds, lbounds
        while not (self.at("{") or self.at(";") or self.tok.kind == "eof"):
            if self.tok.kind == "lifetime":
                lt = self.lifetime()
                self.expect(":")
                while self.tok.kind == "lifetime":
                    lbounds.append((lt, self.lifetime()))
                    if not self.accept("+"):
                        break
            else:
                if self.at("for"):
                    self.advance()
                    self.parse_generic_params()
                bounded = self.parse_type()
                self.expect(":")
                _, lts = self.parse_bounds()
                if isinstance(bounded, Generic):
                    self.scope.setdefault(bounded.name, []).extend(lts)
                    gbounds.extend((bounded.name, l) for l in lts)
            if not self.accept(","):
                break
        return gbounds, lbounds

    # -- items -------------------------------------------------------------

    def parse_file(self) -> ParsedFile:
        out = ParsedFile([], [], [])
        self.parse_items(out, None, top=True)
        return out

    def parse_items(self, out: ParsedFile, impl: Optional[Tuple[ImplRef, Dict]], top: bool) -> None:
        while True:
            if self.tok.kind == "eof":
                if not top:
                    raise self.error("unexpected end of input in impl block")
                return
            if not top and self.at("}"):
                self.advance()
                return
            self.skip_attributes()
            self.skip_visibility()
            t = self.tok
            if t.text == "struct" or (t.text == "union" and self.peek().kind == "ident"):
                if impl is not None:
                    raise self.error("struct inside impl")
                out.structs.append(self.parse_struct())
            elif t.text == "impl" or (t.text == "unsafe" and self.peek().text == "impl"):
                self.accept("unsafe")
                self.parse_impl(out)
            elif self._at_fn():
                out.fns.append(self.parse_fn(impl))
            elif t.text in ("use", "type", "const", "static") and not self._at_fn():
                self.skip_to_semicolon()
            elif t.text == "extern" and self.peek().text == "crate":
                self.skip_to_semicolon()
            elif t.text == "mod":
                self.advance()
                self.ident()
                if self.at("{"):
                    self.advance()
                    self.parse_items(out, None, top=False)
                else:
                    self.expect(";")
            elif t.text in ("enum", "trait", "macro_rules", "extern", "unsafe", "auto"):
                while not self.at("{") and not self.at(";"):
                    if self.tok.kind == "eof":
                        raise self.error(f"unterminated {t.text} item", t)
                    if self.tok.kind == "punct" and self.tok.text in ("(", "["):
                        self.skip_balanced()
                    else:
                        self.advance()
                if self.at("{"):
                    self.skip_balanced()
                else:
                    self.advance()
                out.diagnostics.append(f"{self.file}:{t.line}: skipped unsupported item '{t.text}'")
            elif t.text == ";":
                self.advance()
            elif t.kind == "ident" and self.peek().text == "!":
                # item-position macro invocation
                self.advance()
                self.advance()
                if self.tok.kind == "ident":
                    self.advance()
                if self.tok.kind == "punct" and self.tok.text in _OPEN:
                    self.skip_balanced()
                self.accept(";")
                out.diagnostics.append(f"{self.file}:{t.line}: skipped macro invocation")
            else:
                raise self.error(f"unexpected {t.text or 'end of input'!r} at item level")

    def _at_fn(self) -> bool:
        i = self.pos
        while self.toks[i].text in ("const", "unsafe", "async", "extern", "default") or self.toks[i].kind == "str":
            i += 1
        return self.toks[i].text == "fn"

    def parse_struct(self) -> StructDef:
        start = self.advance()
        name = self.ident()
        saved = dict(self.scope)
        self.scope = {}
        try:
            lparams, tparams, _ = self.parse_generic_params()
            self.parse_where()
            fields: List[Tuple[str, SubjectType]] = []
            if self.accept(";"):
                pass
            elif self.at("("):
                self.advance()
                i = 0
                while not self.at(")"):
                    self.skip_attributes()
                    self.skip_visibility()
                    fields.append((str(i), self.parse_type()))
                    i += 1
                    if not self.accept(","):
                        break
                self.expect(")")
                self.parse_where()
                self.expect(";")
            else:
                self.expect("{")
                while not self.at("}"):
                    self.skip_attributes()
                    self.skip_visibility()
                    fname = self.ident()
                    self.expect(":")
                    fields.append((fname, self.parse_type()))
                    if not self.accept(","):
                        break
                self.expect("}")
            bounds = {k: tuple(v) for k, v in self.scope.items()}
        finally:
            self.scope = saved
        fields = [(f, _apply_bounds(t, bounds)) for f, t in fields]
        for lt in _named_lifetimes(t for _, t in fields):
            if lt not in lparams:
                raise ParseError(f"undeclared lifetime '{lt} in struct {name}", start.line, start.col, self.file)
        return StructDef(
            name, tuple(lparams), tuple(tparams), tuple(fields), False,
            Span(self.file, start.line, self.toks[self.pos - 1].line),
        )

    def parse_impl(self, out: ParsedFile) -> None:
        start = self.expect("impl")
        saved = dict(self.scope)
        self.scope = {}
        try:
            lparams, tparams, _ = self.parse_generic_params()
            self.accept("!")
            first = self.parse_type()
            trait = None
            self_type = first
            if self.accept("for"):
                trait = first.name if isinstance(first, Adt) else str(first)
                self_type = self.parse_type()
            self.parse_where()
            if not isinstance(self_type, Adt):
                self.expect("{")
                self.pos -= 1
                self.skip_balanced()
                out.diagnostics.append(f"{self.file}:{start.line}: skipped impl for non-struct type {self_type}")
                return
            ref = ImplRef(self_type, trait, tuple(lparams), tuple(tparams))
            self.expect("{")
            self.parse_items(out, (ref, dict(self.scope)), top=False)
        finally:
            self.scope = saved

    def parse_fn(self, impl) -> ParsedFn:
        while not self.at("fn"):
            self.advance()
        start = self.expect("fn")
        name = self.ident()
        impl_ref: Optional[ImplRef] = None
        saved = dict(self.scope)
        if impl is not None:
            impl_ref, impl_scope = impl
            self.scope = {k: list(v) for k, v in impl_scope.items()}
        try:
            lparams, tparams, lbounds = self.parse_generic_params()
            params = self.parse_params(impl_ref is not None)
            ret = None
            if self.accept("->"):
                ret = self.parse_type()
            gbounds, wl = self.parse_where()
            lbounds += wl
            bounds = {k: tuple(v) for k, v in self.scope.items()}
            # generic params declared with inline bounds count as where-bounds too
            for g in tparams:
                for l in bounds.get(g, ()):
                    if (g, l) not in gbounds:
                        gbounds.append((g, l))
        finally:
            self.scope = saved
        body_tokens = None
        if self.at("{"):
            body_tokens = self.skip_balanced()
        else:
            self.expect(";")
        end_line = self.toks[self.pos - 1].line
        params = tuple(replace(p, type=_apply_bounds(p.type, bounds)) for p in params)
        if ret is not None:
            ret = _apply_bounds(ret, bounds)
        return ParsedFn(
            name=name,
            lifetime_params=tuple(lparams),
            params=params,
            return_type=ret,
            where_bounds=tuple(gbounds),
            lifetime_bounds=tuple(lbounds),
            impl_of=impl_ref,
            body_tokens=body_tokens,
            span=Span(self.file, start.line, end_line),
            generics=tuple(tparams),
        )

    def parse_params(self, in_impl: bool) -> Tuple[Param, ...]:
        self.expect("(")
        params: List[Param] = []
        index = 0
        while not self.at(")"):
            self.skip_attributes()
            p = self._param(index, in_impl)
            params.append(p)
            index += 1
            if not self.accept(","):
                break
        self.expect(")")
        return tuple(params)

    def _param(self, index: int, in_impl: bool) -> Param:
        start = self.tok
        # self forms
        i = self.pos
        if self.at("&") or self.at("&&"):
            j = i + 1
            if self.toks[j].kind == "lifetime":
                j += 1
            if self.toks[j].text == "mut":
                j += 1
            if self.toks[j].text == "self":
                self.advance()
                lt = self.lifetime() if self.tok.kind == "lifetime" else None
                mutable = self.accept("mut")
                self.expect("self")
                self._check_self(index, in_impl, start)
                t = UniqueRef(lt, SELF_TYPE) if mutable else SharedRef(lt, SELF_TYPE)
                return Param("self", t, SELF_ROOT)
        if self.at("self") or (self.at("mut") and self.peek().text == "self"):
            self.accept("mut")
            self.expect("self")
            self._check_self(index, in_impl, start)
            t: SubjectType = SELF_TYPE
            if self.accept(":"):
                t = self.parse_type()
            return Param("self", t, SELF_ROOT)
        self.accept("mut")
        if self.tok.kind == "ident" and self.peek().text == ":":
            name = self.advance().text
        elif self.at("_"):
            self.advance()
            name = f"_arg{index}"
        elif self.tok.kind == "punct" and self.tok.text in ("(", "["):
            self.skip_balanced()
            name = f"_arg{index}"
        else:
            raise self.error(f"expected parameter, found {self.tok.text or 'end of input'!r}")
        self.expect(":")
        return Param(name, self.parse_type(), Root("arg", name, index))

    def _check_self(self, index: int, in_impl: bool, tok: Token) -> None:
        if index != 0 or not in_impl:
            raise self.error("`self` parameter outside an impl method or not first", tok)

    # -- bodies ------------------------------------------------------------

    def parse_block_contents(self) -> BlockE:
        """Statements up to end of input (the caller passes a pre-sliced token list)."""
        stmts: list = []
        tail = None
        while self.tok.kind != "eof" and not self.at("}"):
            if self.accept(";"):
                continue
            if self.at("#"):
                raise Unsupported("attribute in body", self.tok)
            if self.at("let"):
                stmts.append(self.parse_let())
                continue
            if self._at_fn() or self.at("struct") or self.at("impl") or self.at("use") or self.at("const") and self.peek().kind == "ident" and self.peek(2).text == ":":
                raise Unsupported("nested item", self.tok)
            e = self.parse_expr()
            if self.at("=") or self.tok.text in ("+=", "-=", "*=", "/="):
                op = self.advance().text
                rhs = self.parse_expr()
                stmts.append(AssignS(e, rhs, op))
                self.expect(";")
                continue
            if self.accept(";"):
                stmts.append(ExprS(e))
                continue
            if self.tok.kind == "eof" or self.at("}"):
                tail = e
                break
            if isinstance(e, (BlockE, IfE, WhileE, LoopE)):
                stmts.append(ExprS(e))
                continue
            raise self.error(f"expected ';' after expression, found {self.tok.text!r}")
        return BlockE(stmts, tail)

    def parse_block(self) -> BlockE:
        self.expect("{")
        block = self.parse_block_contents()
        self.expect("}")
        return block

    def parse_let(self) -> LetS:
        self.expect("let")
        self.accept("mut")
        if self.tok.kind != "ident":
            raise Unsupported("destructuring let", self.tok)
        name = self.advance().text
        ty = None
        if self.accept(":"):
            ty = self.parse_type()
        init = None
        if self.accept("="):
            init = self.parse_expr()
        if self.at("else"):
            raise Unsupported("let-else", self.tok)
        self.expect(";")
        return LetS(name, ty, init)

    _BINARY = [
        ("||",), ("&&",), ("==", "!=", "<", ">", "<=", ">="), ("|",), ("^",), ("&",),
        ("+", "-"), ("*", "/", "%"),
    ]

    def parse_expr(self, no_struct: bool = False):
        if self.at("|") or self.at("||") or self.at("move"):
            raise Unsupported("closure", self.tok)
        if self.at("..") or self.at("..="):
            raise Unsupported("range", self.tok)
        return self._binary(0, no_struct)

    def _binary(self, level: int, no_struct: bool):
        if level == len(self._BINARY):
            return self._cast(no_struct)
        left = self._binary(level + 1, no_struct)
        while self.tok.kind == "punct" and self.tok.text in self._BINARY[level]:
            op = self.advance().text
            right = self._binary(level + 1, no_struct)
            left = BinE(op, left, right)
        if level == 0 and (self.at("..") or self.at("..=")):
            raise Unsupported("range", self.tok)
        return left

    def _cast(self, no_struct: bool):
        e = self._unary(no_struct)
        while self.at("as"):
            self.advance()
            self.parse_type()
            e = CastE(e)
        return e

    def _unary(self, no_struct: bool):
        if self.at("*"):
            self.advance()
            return DerefE(self._unary(no_struct))
        if self.at("&") or self.at("&&"):
            double = self.advance().text == "&&"
            if self.at("raw"):
                raise Unsupported("raw borrow", self.tok)
            mutable = self.accept("mut")
            inner = RefE(self._unary(no_struct), mutable)
            return RefE(inner, False) if double else inner
        if self.at("-") or self.at("!"):
            op = self.advance().text
            return UnE(op, self._unary(no_struct))
        return self._postfix(no_struct)

    def _postfix(self, no_struct: bool):
        e = self._primary(no_struct)
        while True:
            if self.at("."):
                self.advance()
                t = self.tok
                if t.kind == "int":
                    self.advance()
                    e = FieldE(e, t.text)
                    continue
                if t.kind == "float":
                    # `x.0.1` lexes as a float
                    self.advance()
                    for part in t.text.split("."):
                        e = FieldE(e, part)
                    continue
                if t.text == "await":
                    raise Unsupported("await", t)
                name = self.ident()
                if self.at("::"):
                    raise Unsupported("turbofish method call", self.tok)
                if self.at("("):
                    e = MethodE(e, name, self.parse_args())
                else:
                    e = FieldE(e, name)
            elif self.at("("):
                if not isinstance(e, Name):
                    raise Unsupported("call of a computed callee", self.tok)
                e = CallE(e.name, self.parse_args())
            elif self.at("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                e = IndexE(e, idx)
            elif self.at("?"):
                raise Unsupported("'?' operator", self.tok)
            else:
                return e

    def parse_args(self) -> list:
        self.expect("(")
        args = []
        while not self.at(")"):
            args.append(self.parse_expr())
            if not self.accept(","):
                break
        self.expect(")")
        return args

    def _primary(self, no_struct: bool):
        t = self.tok
        if t.kind in ("int", "float", "str", "char"):
            self.advance()
            return Lit(t.text)
        if t.text in ("true", "false") and t.kind == "ident":
            self.advance()
            return Lit(t.text)
        if self.at("("):
            self.advance()
            items = []
            trailing = False
            while not self.at(")"):
                items.append(self.parse_expr())
                trailing = False
                if not self.accept(","):
                    break
                trailing = True
            self.expect(")")
            if len(items) == 1 and not trailing:
                return items[0]
            return TupleE(items)
        if self.at("{"):
            return self.parse_block()
        if self.at("unsafe") and self.peek().text == "{":
            self.advance()
            return self.parse_block()
        if self.at("if"):
            return self.parse_if()
        if self.at("while"):
            self.advance()
            if self.at("let"):
                raise Unsupported("while-let", self.tok)
            cond = self.parse_expr(no_struct=True)
            return WhileE(cond, self.parse_block())
        if self.at("loop"):
            self.advance()
            return LoopE(self.parse_block())
        if self.at("break"):
            self.advance()
            if self.tok.kind == "lifetime":
                raise Unsupported("labeled break", self.tok)
            if not (self.at(";") or self.at("}")):
                raise Unsupported("break with value", self.tok)
            return BreakE()
        if self.at("continue"):
            self.advance()
            return ContinueE()
        if self.at("return"):
            self.advance()
            if self.at(";") or self.at("}") or self.tok.kind == "eof":
                return ReturnE(None)
            return ReturnE(self.parse_expr())
        if t.text in ("match", "for", "async", "move", "yield") and t.kind == "ident":
            raise Unsupported(f"'{t.text}' expression", t)
        if self.at("["):
            raise Unsupported("array literal", t)
        if t.kind == "ident" or self.at("::") or self.at("<"):
            if self.at("<"):
                raise Unsupported("qualified path", t)
            segs = []
            self.accept("::")
            while True:
                segs.append(self.ident())
                if self.at("::") and self.peek().text == "<":
                    self.advance()
                    self.parse_generic_args()
                if self.at("::") and self.peek().kind == "ident":
                    self.advance()
                    continue
                break
            path = "::".join(segs)
            if self.at("!"):
                raise Unsupported(f"macro {path}!", t)
            if self.at("{") and not no_struct and (segs[-1][:1].isupper() or len(segs) > 1):
                return self.parse_struct_lit(path)
            return Name(path)
        raise Unsupported(f"token {t.text!r}", t)

    def parse_struct_lit(self, path: str) -> StructLit:
        self.expect("{")
        fields = []
        while not self.at("}"):
            if self.at(".."):
                raise Unsupported("struct update syntax", self.tok)
            t = self.tok
            if t.kind == "int":
                fname = self.advance().text
            else:
                fname = self.ident()
            if self.accept(":"):
                fields.append((fname, self.parse_expr()))
            else:
                fields.append((fname, Name(fname)))
            if not self.accept(","):
                break
        self.expect("}")
        return StructLit(path, fields)

    def parse_if(self) -> IfE:
        self.expect("if")
        if self.at("let"):
            raise Unsupported("if-let", self.tok)
        cond = self.parse_expr(no_struct=True)
        then = self.parse_block()
        orelse = None
        if self.accept("else"):
            orelse = self.parse_if() if self.at("if") else self.parse_block()
        return IfE(cond, then, orelse)


def lifetime_from_text(text: str) -> Lifetime:
    name = text[1:]
    if name == "static":
        return STATIC
    if name == "_":
        return Lifetime.anon(0)
    if name.startswith("_") and name[1:].isdigit():
        # printer convention for numbered anonymous lifetimes
        return Lifetime.anon(int(name[1:]))
    return Lifetime.named(name)


def _apply_bounds(t: SubjectType, bounds: Dict[str, Tuple[Lifetime, ...]]) -> SubjectType:
    def fill(node):
        if isinstance(node, Generic) and node.name in bounds:
            merged = tuple(dict.fromkeys(node.lifetime_bounds + tuple(bounds[node.name])))
            return Generic(node.name, merged)
        return node

    return map_type(t, fill)


def _named_lifetimes(types) -> List[str]:
    out: List[str] = []
    for t in types:
        for l in lifetimes_in(t):
            if l.kind == "named" and l.name not in out:
                out.append(l.name)
    return out


def parse_body(tokens: List[Token], file: str = "<input>") -> BlockE:
    """Parse a function body (the tokens between its braces)."""
    eof = Token("eof", "", tokens[-1].line if tokens else 0, 0)
    p = Parser(list(tokens) + [eof], file)
    block = p.parse_block_contents()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} in body")
    return block


def parse_source(source: str, file: str = "<input>") -> ParsedFile:
    return Parser(tokenize(source, file), file).parse_file()
