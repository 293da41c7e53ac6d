"""Lowering of parsed function bodies to the basic-block IR."""

from __future__ import annotations

from typing import Dict, List, Optional

from ..model import (
    REFERENCES,
    SELF_ROOT,
    Adt,
    Assign,
    BasicBlock,
    Body,
    Call,
    FunctionModel,
    LifecheckError,
    PathTypeError,
    Place,
    RefTo,
    ReturnStmt,
    Root,
    SharedRef,
    StructTable,
    SubjectType,
    UniqueRef,
    Use,
    ValuePath,
    Lifetime,
    local,
    type_of_path,
)
from . import parser as ast


class LoweringError(LifecheckError):
    pass


_PLACE_EXPRS = (ast.Name, ast.FieldE, ast.DerefE, ast.IndexE)


class _Lowerer:
    def __init__(self, fn: FunctionModel, structs: StructTable) -> None:
        self.fn = fn
        self.structs = structs
        self.blocks: List[BasicBlock] = [BasicBlock()]
        self.cur = 0
        self.vars: Dict[str, Root] = {}
        self.types: Dict[Root, Optional[SubjectType]] = {}
        for p in fn.params:
            self.vars[p.name] = p.root
            self.types[p.root] = p.type
        self.ntemp = 0
        self.loops: List[tuple] = []

    # -- blocks --------------------------------------------------------------

    def new_block(self) -> int:
        self.blocks.append(BasicBlock())
        return len(self.blocks) - 1

    def emit(self, stmt) -> None:
        self.blocks[self.cur].statements.append(stmt)

    def goto(self, target: int) -> None:
        self.blocks[self.cur].successors.append(target)

    def terminate(self) -> None:
        # code after a jump or return lands in a block with no predecessors
        self.cur = self.new_block()

    # -- places and types ------------------------------------------------------

    def temp(self, ty: Optional[SubjectType] = None) -> Place:
        root = local(f"_t{self.ntemp}")
        self.ntemp += 1
        self.types[root] = ty
        return ValuePath(root)

    def type_of(self, place: Place) -> Optional[SubjectType]:
        root_ty = self.types.get(place.root)
        if root_ty is None:
            return None
        try:
            return type_of_path(place, root_ty, self.structs)
        except PathTypeError:
            return None

    def name_place(self, name: str) -> Place:
        if name == "self":
            if "self" not in self.vars:
                raise LoweringError("`self` used outside a method")
            return ValuePath(SELF_ROOT)
        root = self.vars.get(name)
        if root is None:
            # constants, unit structs and enum variants: a local nothing points into
            return ValuePath(local(name))
        return ValuePath(root)

    def place_of(self, e) -> Place:
        if isinstance(e, ast.Name):
            return self.name_place(e.name)
        if isinstance(e, ast.FieldE):
            base = self.place_of(e.base)
            ty = self.type_of(base)
            while isinstance(ty, REFERENCES):
                base = base.deref()
                ty = ty.inner
            return base.field(e.name)
        if isinstance(e, ast.DerefE):
            return self.place_of(e.base).deref()
        if isinstance(e, ast.IndexE):
            base = self.place_of(e.base)
            self.operand(e.index)
            ty = self.type_of(base)
            while isinstance(ty, REFERENCES):
                base = base.deref()
                ty = ty.inner
            return base.index()
        if isinstance(e, ast.Lit):
            return self.temp()
        if isinstance(e, ast.StructLit):
            return self.struct_value(e.name, e.fields)
        t = self.temp()
        self.lower_into(t, e)
        return t

    def operand(self, e) -> Place:
        return self.place_of(e)

    def rvalue(self, e):
        if isinstance(e, ast.RefE):
            return RefTo(self.place_of(e.base), e.mutable)
        if isinstance(e, ast.CastE):
            return self.rvalue(e.expr)
        return Use(self.place_of(e))

    def rvalue_type(self, rv) -> Optional[SubjectType]:
        if isinstance(rv, Use):
            return self.type_of(rv.place)
        inner = self.type_of(rv.place)
        if inner is None:
            return None
        anon = Lifetime.anon(0)
        return UniqueRef(anon, inner) if rv.mutable else SharedRef(anon, inner)

    def struct_value(self, name: str, fields) -> Place:
        d = self.structs.get(name)
        ty = None
        if d is not None and not d.opaque:
            ty = Adt(name, tuple(Lifetime.anon(0) for _ in d.lifetime_params), ())
        tmp = self.temp(ty)
        for fname, fexpr in fields:
            self.emit(Assign(tmp.field(fname), self.rvalue(fexpr)))
        return tmp

    # -- expressions ------------------------------------------------------------

    def lower_into(self, dst: Optional[Place], e) -> None:
        """Emit statements evaluating ``e``; store its value into ``dst`` when given."""
        if isinstance(e, ast.CastE):
            e = e.expr
        if isinstance(e, ast.Lit):
            if dst is not None:
                self.emit(Assign(dst, Use(self.temp())))
        elif isinstance(e, _PLACE_EXPRS):
            p = self.place_of(e)
            if dst is not None:
                self.emit(Assign(dst, Use(p)))
        elif isinstance(e, ast.RefE):
            p = self.place_of(e.base)
            if dst is not None:
                self.emit(Assign(dst, RefTo(p, e.mutable)))
        elif isinstance(e, ast.StructLit):
            tmp = self.struct_value(e.name, e.fields)
            if dst is not None:
                self.emit(Assign(dst, Use(tmp)))
        elif isinstance(e, ast.TupleE):
            if not e.items:
                return
            tmp = self.struct_value("(tuple)", [(str(i), x) for i, x in enumerate(e.items)])
            if dst is not None:
                self.emit(Assign(dst, Use(tmp)))
        elif isinstance(e, ast.CallE):
            args = tuple(self.operand(a) for a in e.args)
            self.emit(Call(dst if dst is not None else self.temp(), e.func, args))
        elif isinstance(e, ast.MethodE):
            recv = self.place_of(e.recv)
            # receivers are auto-referenced
            r = self.temp()
            self.emit(Assign(r, RefTo(recv, False)))
            args = (r,) + tuple(self.operand(a) for a in e.args)
            self.emit(Call(dst if dst is not None else self.temp(), e.name, args))
        elif isinstance(e, ast.BinE):
            args = (self.operand(e.left), self.operand(e.right))
            self.emit(Call(dst if dst is not None else self.temp(), f"op{e.op}", args))
        elif isinstance(e, ast.UnE):
            self.emit(Call(dst if dst is not None else self.temp(), f"op{e.op}", (self.operand(e.operand),)))
        elif isinstance(e, ast.BlockE):
            self.lower_block(e, dst)
        elif isinstance(e, ast.IfE):
            self.lower_if(e, dst)
        elif isinstance(e, ast.WhileE):
            self.lower_while(e)
        elif isinstance(e, ast.LoopE):
            self.lower_loop(e)
        elif isinstance(e, ast.ReturnE):
            self.lower_return(e.value)
        elif isinstance(e, ast.BreakE):
            if not self.loops:
                raise LoweringError("break outside loop")
            self.goto(self.loops[-1][1])
            self.terminate()
        elif isinstance(e, ast.ContinueE):
            if not self.loops:
                raise LoweringError("continue outside loop")
            self.goto(self.loops[-1][0])
            self.terminate()
        else:
            raise LoweringError(f"cannot lower {type(e).__name__}")

    def lower_return(self, value) -> None:
        if value is None:
            self.emit(ReturnStmt(None))
        elif isinstance(value, ast.StructLit):
            self.emit(ReturnStmt(self.struct_value(value.name, value.fields)))
        elif isinstance(value, _PLACE_EXPRS):
            self.emit(ReturnStmt(self.place_of(value)))
        else:
            t = self.temp()
            self.lower_into(t, value)
            self.emit(ReturnStmt(t))
        self.terminate()

    def lower_block(self, block: ast.BlockE, dst: Optional[Place]) -> None:
        for s in block.stmts:
            self.lower_stmt(s)
        if block.tail is not None:
            self.lower_into(dst, block.tail)

    def lower_stmt(self, s) -> None:
        if isinstance(s, ast.LetS):
            root = local(s.name)
            self.vars[s.name] = root
            if s.init is None:
                self.types[root] = s.type
                return
            if isinstance(s.init, ast.StructLit):
                self.types[root] = s.type
                tmp = self.struct_value(s.init.name, s.init.fields)
                if s.type is None:
                    self.types[root] = self.types.get(tmp.root)
                self.emit(Assign(ValuePath(root), Use(tmp)))
                return
            if isinstance(s.init, (ast.RefE, ast.CastE, ast.Name, ast.FieldE, ast.DerefE, ast.IndexE)):
                rv = self.rvalue(s.init)
                self.types[root] = s.type if s.type is not None else self.rvalue_type(rv)
                self.emit(Assign(ValuePath(root), rv))
                return
            self.types[root] = s.type
            self.lower_into(ValuePath(root), s.init)
        elif isinstance(s, ast.AssignS):
            if not isinstance(s.target, _PLACE_EXPRS):
                raise LoweringError("assignment to a non-place expression")
            if isinstance(s.target, ast.Name) and s.target.name not in self.vars and s.target.name != "self":
                # assignment to an undeclared name introduces it (printer round-trips)
                self.vars[s.target.name] = local(s.target.name)
            dst = self.place_of(s.target)
            if s.op != "=":
                self.emit(Call(dst, f"op{s.op}", (dst, self.operand(s.value))))
            elif isinstance(s.value, (ast.RefE, ast.CastE) + _PLACE_EXPRS):
                self.emit(Assign(dst, self.rvalue(s.value)))
            else:
                self.lower_into(dst, s.value)
        elif isinstance(s, ast.ExprS):
            self.lower_into(None, s.expr)
        else:
            raise LoweringError(f"cannot lower statement {type(s).__name__}")

    def lower_if(self, e: ast.IfE, dst: Optional[Place]) -> None:
        self.operand(e.cond)
        then_b = self.new_block()
        else_b = self.new_block() if e.orelse is not None else None
        join = self.new_block()
        self.goto(then_b)
        self.goto(else_b if else_b is not None else join)
        self.cur = then_b
        self.lower_block(e.then, dst)
        self.goto(join)
        if else_b is not None:
            self.cur = else_b
            self.lower_into(dst, e.orelse)
            self.goto(join)
        self.cur = join

    def lower_while(self, e: ast.WhileE) -> None:
        header = self.new_block()
        self.goto(header)
        self.cur = header
        self.operand(e.cond)
        body = self.new_block()
        exit_b = self.new_block()
        self.goto(body)
        self.goto(exit_b)
        self.loops.append((header, exit_b))
        self.cur = body
        self.lower_block(e.body, None)
        self.goto(header)
        self.loops.pop()
        self.cur = exit_b

    def lower_loop(self, e: ast.LoopE) -> None:
        body = self.new_block()
        exit_b = self.new_block()
        self.goto(body)
        self.loops.append((body, exit_b))
        self.cur = body
        self.lower_block(e.body, None)
        self.goto(body)
        self.loops.pop()
        self.cur = exit_b

    # -- entry -------------------------------------------------------------------

    def run(self, block: ast.BlockE) -> Body:
        for s in block.stmts:
            self.lower_stmt(s)
        if block.tail is not None:
            self.lower_return(block.tail)
        elif not self._dead(self.cur):
            self.emit(ReturnStmt(None))
            self.terminate()
        body = self._compact()
        body.validate()
        return body

    def _dead(self, i: int) -> bool:
        b = self.blocks[i]
        if i == 0 or b.statements:
            return False
        return not any(i in other.successors for other in self.blocks)

    def _compact(self) -> Body:
        # drop trailing empty blocks nothing jumps to
        blocks = self.blocks
        referenced = {s for b in blocks for s in b.successors}
        keep = [i for i, b in enumerate(blocks) if i == 0 or b.statements or b.successors or i in referenced]
        remap = {old: new for new, old in enumerate(keep)}
        out = []
        for i in keep:
            b = blocks[i]
            out.append(BasicBlock(list(b.statements), [remap[s] for s in b.successors if s in remap]))
        return Body(out)


def lower_body(block: ast.BlockE, fn: FunctionModel, structs: StructTable) -> Body:
    """Lower a parsed body; raises LoweringError for constructs outside the IR."""
    return _Lowerer(fn, structs).run(block)
