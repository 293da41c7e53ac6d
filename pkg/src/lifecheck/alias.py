"""
Flow- and field-sensitive intra-procedural points-to analysis.

Blocks are visited once each in reverse postorder and sets only grow. An
abstract location is a Key: a base (variable root, the seeded source value,
or the unknown initial contents of another key) plus a field path. Every key
starts out holding its own initial-contents location, which stands for
whatever the key held on entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .extract import DEFAULT_MAX_DEPTH
from .model import (
    DEREF,
    INDEX,
    RET_ROOT,
    Aggregate,
    Assign,
    Body,
    Call,
    LifecheckError,
    RefTo,
    ReturnStmt,
    Use,
    ValuePath,
)


class BodyUnavailable(LifecheckError):
    pass


@dataclass(frozen=True, order=True)
class Key:
    base: tuple  # ("var", Root) | ("src",) | ("init", Key)
    fields: Tuple[str, ...] = ()

    def sub(self, name: str, cap: int) -> "Key":
        if len(self.fields) >= cap:
            return self
        return Key(self.base, self.fields + (name,))

    def __str__(self) -> str:
        kind = self.base[0]
        if kind == "var":
            head = str(self.base[1])
        elif kind == "src":
            head = "<source>"
        else:
            head = f"<init {self.base[1]}>"
        return ".".join((head,) + self.fields)


SOURCE = Key(("src",))


def var_key(root) -> Key:
    return Key(("var", root))


def init_loc(key: Key) -> Key:
    return Key(("init", key))


@dataclass
class PointsToState:
    env: Dict[Key, Set[Key]] = field(default_factory=dict)
    # keys a call may have written through: unknown sub-keys read their sets too
    smashed: Set[Key] = field(default_factory=set)
    max_depth: int = DEFAULT_MAX_DEPTH

    def get(self, key: Key) -> Set[Key]:
        s = self.env.get(key)
        if s is None:
            s = {init_loc(key)}
            for i in range(len(key.fields)):
                prefix = Key(key.base, key.fields[:i])
                if prefix in self.smashed:
                    s |= self.get(prefix)
            self.env[key] = s
        return s

    def add(self, key: Key, values: Iterable[Key]) -> None:
        self.get(key).update(values)

    def snapshot(self) -> Dict[Key, FrozenSet[Key]]:
        return {k: frozenset(v) for k, v in self.env.items()}

    # -- places ------------------------------------------------------------

    def cells(self, place: ValuePath) -> Set[Key]:
        """Keys a place may denote."""
        cur = {var_key(place.root)}
        for p in place.projections:
            if p == DEREF:
                nxt: Set[Key] = set()
                for k in cur:
                    nxt |= self.get(k)
                cur = nxt
            elif p == INDEX:
                continue
            else:
                cur = {k.sub(p, self.max_depth) for k in cur}
        return cur

    def known_subkeys(self, key: Key) -> List[Key]:
        n = len(key.fields)
        return [k for k in list(self.env) if k.base == key.base and len(k.fields) > n and k.fields[:n] == key.fields]


class Analysis:
    """One run of the single-pass analysis over a body."""

    def __init__(self, body: Body, extra_paths: Iterable[ValuePath] = (), max_depth: int = DEFAULT_MAX_DEPTH,
                 unknown_fields: bool = False) -> None:
        self.body = body
        self.state = PointsToState(max_depth=max_depth)
        self.unknown_fields = unknown_fields
        self.suffixes = _suffix_universe(body, extra_paths, max_depth)

    # -- transfer ------------------------------------------------------------

    def copy(self, dst_cells: Set[Key], src_cells: Set[Key]) -> None:
        # whole-value copy: the value and every tracked field below it
        st = self.state
        for suffix in self.suffixes:
            vals: Set[Key] = set()
            for c in src_cells:
                k = c
                for f in suffix:
                    k = k.sub(f, st.max_depth)
                vals |= st.get(k)
            for d in dst_cells:
                k = d
                for f in suffix:
                    k = k.sub(f, st.max_depth)
                st.add(k, vals)

    def reach(self, start: Set[Key], own_smash: bool) -> Set[Key]:
        """Keys reachable from ``start`` through known fields and up to max_depth derefs."""
        st = self.state
        seen: Set[Key] = set()
        level = set(start)
        for depth in range(st.max_depth + 1):
            nxt: Set[Key] = set()
            todo = list(level)
            while todo:
                k = todo.pop()
                if k in seen:
                    continue
                seen.add(k)
                if depth > 0 or own_smash:
                    st.smashed.add(k)
                todo.extend(st.known_subkeys(k))
                if depth < st.max_depth:
                    nxt |= st.get(k)
            level = nxt - seen
            if not level:
                break
        return seen

    def transfer(self, stmt) -> None:
        st = self.state
        if isinstance(stmt, Assign):
            dst = st.cells(stmt.dst)
            rv = stmt.rv
            if isinstance(rv, Use):
                self.copy(dst, st.cells(rv.place))
            elif isinstance(rv, RefTo):
                target = st.cells(rv.place)
                for d in dst:
                    st.add(d, target)
            elif isinstance(rv, Aggregate):
                for fname, place in rv.fields:
                    if place is not None:
                        self.copy({d.sub(fname, st.max_depth) for d in dst}, st.cells(place))
        elif isinstance(stmt, Call):
            reached = [self.reach(st.cells(a), self.unknown_fields) for a in stmt.args]
            union: Set[Key] = set()
            for r in reached:
                for k in r:
                    union |= st.get(k)
            if len(reached) > 1:
                for r in reached:
                    for k in r:
                        st.add(k, union)
            for d in st.cells(stmt.dst):
                st.smashed.add(d)
                st.add(d, union)
        elif isinstance(stmt, ReturnStmt):
            if stmt.place is not None:
                self.copy({var_key(RET_ROOT)}, st.cells(stmt.place))

    def run(self) -> PointsToState:
        for b in reverse_postorder(self.body):
            for stmt in self.body.blocks[b].statements:
                self.transfer(stmt)
        return self.state


def _suffix_universe(body: Body, extra: Iterable[ValuePath], cap: int) -> List[Tuple[str, ...]]:
    runs: Set[Tuple[str, ...]] = {()}

    def add_place(p: Optional[ValuePath]) -> None:
        if p is None:
            return
        run: List[str] = []
        for proj in p.projections + (DEREF,):
            if proj == DEREF:
                for i in range(len(run)):
                    for j in range(i + 1, min(len(run), i + cap) + 1):
                        runs.add(tuple(run[i:j]))
                run = []
            elif proj != INDEX:
                run.append(proj)

    for stmt in body.statements():
        if isinstance(stmt, Assign):
            add_place(stmt.dst)
            rv = stmt.rv
            if isinstance(rv, (Use, RefTo)):
                add_place(rv.place)
            elif isinstance(rv, Aggregate):
                runs.update((f,) for f, _ in rv.fields)
                for _, p in rv.fields:
                    add_place(p)
        elif isinstance(stmt, Call):
            add_place(stmt.dst)
            for a in stmt.args:
                add_place(a)
        elif isinstance(stmt, ReturnStmt):
            add_place(stmt.place)
    for p in extra:
        add_place(p)
    return sorted(runs, key=lambda s: (len(s), s))


def reverse_postorder(body: Body) -> List[int]:
    """Blocks reachable from the entry, in reverse postorder."""
    if not body.blocks:
        return []
    order: List[int] = []
    seen = {0}
    stack = [(0, iter(body.blocks[0].successors))]
    while stack:
        node, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            order.append(node)
        elif nxt not in seen:
            seen.add(nxt)
            stack.append((nxt, iter(body.blocks[nxt].successors)))
    order.reverse()
    return order


def may_flow(
    body: Optional[Body],
    source: ValuePath,
    target: ValuePath,
    max_depth: int = DEFAULT_MAX_DEPTH,
    unknown_fields: bool = False,
) -> bool:
    """Whether the value at ``source`` on entry may be the value at ``target`` on exit."""
    if body is None:
        raise BodyUnavailable("function body was not lowered")
    a = Analysis(body, (source, target), max_depth, unknown_fields)
    for c in a.state.cells(source):
        a.state.add(c, {SOURCE})
    state = a.run()
    for c in state.cells(target):
        if SOURCE in state.get(c):
            return True
    return False


def analyze(body: Body, seeds: Iterable[ValuePath] = (), max_depth: int = DEFAULT_MAX_DEPTH,
            unknown_fields: bool = False) -> PointsToState:
    """Run the pass with each seed path holding the source location; returns the final state."""
    seeds = list(seeds)
    a = Analysis(body, seeds, max_depth, unknown_fields)
    for s in seeds:
        for c in a.state.cells(s):
            a.state.add(c, {SOURCE})
    return a.run()
