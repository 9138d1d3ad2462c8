"""Symbolic derivations.

Generators cannot know constraint ids in advance because every proof block
numbers its own database.  They emit steps whose references are symbolic:
R(head, IMP/REV) names one direction of a reification, S(k) the k-th step of
the enclosing step list and NEG the negated claim of a RED step.  resolve()
turns such a list into concrete integer ids for one scope."""
from __future__ import annotations

from typing import Dict, NamedTuple

from .pb_core import Axiom, Div, Lin, Red, Rup, Sat

IMP, REV = 0, 1


class R(NamedTuple):
    head: str
    dir: int


class S(NamedTuple):
    k: int


class _Neg:
    def __repr__(self):
        return "NEG"


NEG = _Neg()


class ResolveError(Exception):
    pass


def _ref(x, scope, base, neg_id):
    if isinstance(x, R):
        try:
            return scope[x]
        except KeyError:
            raise ResolveError("reification %s (%s) not in scope"
                               % (x.head, "=>" if x.dir == IMP else "<=")) from None
    if isinstance(x, S):
        return base + 1 + x.k
    if x is NEG:
        if neg_id is None:
            raise ResolveError("NEG outside of a RED step")
        return neg_id
    if isinstance(x, int):
        return x
    raise ResolveError("bad reference %r" % (x,))


def resolve_steps(steps, scope, base, neg_id=None):
    """Concrete steps for a list whose first step gets id base+1."""
    out = []
    for i, st in enumerate(steps):
        if isinstance(st, Lin):
            st = Lin(_ref(st.id1, scope, base, neg_id), st.c1, _ref(st.id2, scope, base, neg_id), st.c2)
        elif isinstance(st, Div):
            st = Div(_ref(st.id, scope, base, neg_id), st.c)
        elif isinstance(st, Sat):
            st = Sat(_ref(st.id, scope, base, neg_id))
        elif isinstance(st, Red):
            nid = base + 1 + i
            sub = resolve_steps(st.steps, scope, nid, nid)
            kind, ref = st.end
            st = Red(st.claim, tuple(sub), (kind, _ref(ref, scope, nid, nid)))
        out.append(st)
    return out


def step_constraints(steps):
    """Claims of RUP/RED steps, including nested ones (for variable collection)."""
    for st in steps:
        if isinstance(st, (Rup, Red)):
            yield st.claim
        if isinstance(st, Red):
            yield from step_constraints(st.steps)
        if isinstance(st, Axiom):
            yield None


def step_refs(steps):
    for st in steps:
        if isinstance(st, Lin):
            yield st.id1
            yield st.id2
        elif isinstance(st, (Div, Sat)):
            yield st.id
        elif isinstance(st, Red):
            yield from step_refs(st.steps)
            yield st.end[1]
