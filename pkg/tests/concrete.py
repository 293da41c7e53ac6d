"""A concrete interpreter for call-free straight-line bodies, used as the alias oracle.

Memory is a map from slots to values. A slot is (object, field) with field
None for the whole value; every slot not yet written holds a pointer to a
fresh object of its own, standing for whatever it pointed to on entry.
"""

import random

from lifecheck.model import DEREF, Aggregate, Assign, BasicBlock, Body, RefTo, Use, ValuePath, local

FIELDS = ("f", "g")
SRC = ("src",)


class Memory:
    def __init__(self):
        self.slots = {}

    def read(self, slot):
        if slot not in self.slots:
            self.slots[slot] = ("ptr", ("init", slot), None)
        return self.slots[slot]

    def resolve(self, place):
        """Slot denoted by ``place``, or None when it is undefined."""
        cur = (("var", place.root.name), None)
        for p in place.projections:
            if p == DEREF:
                v = self.read(cur)
                if v[0] != "ptr":
                    return None
                cur = (v[1], v[2])
            elif cur[1] is not None:
                return None  # only one field level
            else:
                cur = (cur[0], p)
        return cur

    def copy(self, dst, src):
        if dst[1] is None and src[1] is None:
            for f in (None,) + FIELDS:
                self.slots[(dst[0], f)] = self.read((src[0], f))
        else:
            self.slots[dst] = self.read(src)

    def execute(self, stmt):
        dst = self.resolve(stmt.dst)
        if dst is None:
            return
        rv = stmt.rv
        if isinstance(rv, Use):
            src = self.resolve(rv.place)
            if src is not None:
                self.copy(dst, src)
        elif isinstance(rv, RefTo):
            src = self.resolve(rv.place)
            if src is not None:
                self.slots[dst] = ("ptr", src[0], src[1])
        elif isinstance(rv, Aggregate):
            if dst[1] is not None:
                return
            for fname, place in rv.fields:
                src = self.resolve(place)
                if src is not None:
                    self.slots[(dst[0], fname)] = self.read(src)


def flows(stmts, source, target):
    """True/False for whether the entry value at ``source`` ends up at ``target``; None if source is undefined."""
    mem = Memory()
    s = mem.resolve(source)
    if s is None:
        return None
    mem.slots[s] = SRC
    for stmt in stmts:
        mem.execute(stmt)
    t = mem.resolve(target)
    return t is not None and mem.read(t) == SRC


def random_place(rng, names):
    p = ValuePath(local(rng.choice(names)))
    shape = rng.randrange(4)
    if shape in (2, 3):
        p = p.deref()
    if shape in (1, 3):
        p = p.field(rng.choice(FIELDS))
    return p


def random_program(rng, max_stmts=12, max_vars=6):
    names = [f"v{i}" for i in range(rng.randint(2, max_vars))]
    stmts = []
    for _ in range(rng.randint(1, max_stmts)):
        dst = random_place(rng, names)
        r = rng.random()
        if r < 0.5:
            rv = Use(random_place(rng, names))
        elif r < 0.85:
            rv = RefTo(random_place(rng, names), rng.random() < 0.5)
        else:
            rv = Aggregate("S", tuple((f, random_place(rng, names)) for f in FIELDS))
        stmts.append(Assign(dst, rv))
    return stmts, _pick_source(rng, stmts, names), _pick_target(rng, stmts, names)


def _pick_source(rng, stmts, names):
    # mostly a place some statement reads, so flows actually happen
    if rng.random() < 0.3:
        return random_place(rng, names)
    rv = rng.choice(stmts).rv
    if isinstance(rv, Aggregate):
        return rng.choice(rv.fields)[1]
    return rv.place


def _pick_target(rng, stmts, names):
    if rng.random() < 0.3:
        return random_place(rng, names)
    dst = rng.choice(stmts).dst
    if rng.random() < 0.5:
        return dst
    return dst.deref() if DEREF not in dst.projections and dst.depth == 0 else dst


def as_body(stmts):
    return Body([BasicBlock(list(stmts), [])])


def programs(n, seed=0):
    rng = random.Random(seed)
    while n:
        stmts, src, tgt = random_program(rng)
        verdict = flows(stmts, src, tgt)
        if verdict is None:
            continue
        n -= 1
        yield stmts, src, tgt, verdict
