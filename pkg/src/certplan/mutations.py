"""Adversarial certificate mutations for soundness testing.

Every mutant is checked with verify_lower_bound at the bound it claims.  A
mutant that is still accepted is harmless as long as that bound does not
exceed the true optimum; the battery reports any case where it does."""
from __future__ import annotations

import copy
import random
from dataclasses import dataclass
from typing import List, Optional

from .certificate import KINDS, CertSyntaxError, Certificate, parse, serialize
from .pb_core import Lit, PBConstraint, Red, Reification, ReificationError, Rup, normalize
from .task_model import optimal_cost_oracle
from .verifier import verify_lower_bound

MUTATIONS = ("bound", "coef", "polarity", "degree", "delete_step", "delete_reif",
             "rewire", "qed", "byteflip")


def _tweak(c: PBConstraint, rng, how):
    terms = list(c.terms)
    if how == "degree":
        return normalize(terms, c.degree + rng.choice((-1, 1)))
    if not terms:
        return normalize(terms, c.degree - 1)
    i = rng.randrange(len(terms))
    a, l = terms[i]
    if how == "coef":
        terms[i] = (max(0, a + rng.choice((-1, 1, a))), l)
    else:
        terms[i] = (a, -l)
    return normalize(terms, c.degree)


def _steps_with_claims(steps):
    return [i for i, st in enumerate(steps) if isinstance(st, (Rup, Red))]


def mutate(cert: Certificate, rng: random.Random, kind: str):
    """A mutated copy of cert (or its text, for byteflip)."""
    c = copy.deepcopy(cert)
    if kind == "bound":
        c.bound += 1
        return c
    if kind == "byteflip":
        text = bytearray(serialize(cert).encode())
        for _ in range(rng.randint(1, 3)):
            i = rng.randrange(len(text))
            text[i] = rng.choice(b"0123456789~x -_>=\n" + bytes([text[i] ^ 1]))
        return text.decode("utf-8", "replace")
    if kind in ("coef", "polarity", "degree"):
        if rng.random() < 0.5 and c.circuit:
            i = rng.randrange(len(c.circuit))
            r = c.circuit[i]
            try:
                c.circuit[i] = Reification(r.var, _tweak(r.body, rng, kind), r.direction)
            except ReificationError:
                return None
            return c
        block = c.proofs[rng.choice(KINDS)]
        idx = _steps_with_claims(block.steps)
        if not idx:
            return None
        i = rng.choice(idx)
        st = block.steps[i]
        new = _tweak(st.claim, rng, kind)
        block.steps[i] = Rup(new) if isinstance(st, Rup) else Red(new, st.steps, st.end)
        return c
    if kind == "delete_step":
        block = c.proofs[rng.choice(KINDS)]
        if not block.steps:
            return None
        del block.steps[rng.randrange(len(block.steps))]
        if rng.random() < 0.5:
            block.qed -= 1
        return c
    if kind == "delete_reif":
        if not c.circuit:
            return None
        del c.circuit[rng.randrange(len(c.circuit))]
        return c
    if kind == "rewire":
        if not c.circuit:
            return None
        i = rng.randrange(len(c.circuit))
        r = c.circuit[i]
        if not r.body.terms:
            return None
        pool = sorted({q.var for q in c.circuit[:i]} | {v for q in c.circuit for v in q.body.vars()})
        terms = list(r.body.terms)
        j = rng.randrange(len(terms))
        a, l = terms[j]
        terms[j] = (a, Lit(rng.choice(pool), l.positive))
        try:
            c.circuit[i] = Reification(r.var, normalize(terms, r.body.degree), r.direction)
        except ReificationError:
            return None
        return c
    if kind == "qed":
        block = c.proofs[rng.choice(KINDS)]
        block.qed += rng.choice((-2, -1, 1))
        return c
    raise ValueError("unknown mutation %r" % kind)


@dataclass
class MutantOutcome:
    kind: str
    accepted: bool
    bound: Optional[int]
    unsound: bool


def run_battery(task, cert: Certificate, rng: random.Random, count: int, optimum=None) -> List[MutantOutcome]:
    if optimum is None:
        optimum = optimal_cost_oracle(task)
    out = []
    while len(out) < count:
        kind = rng.choice(MUTATIONS)
        m = mutate(cert, rng, kind)
        if m is None:
            continue
        if isinstance(m, str):
            try:
                m = parse(m)
            except CertSyntaxError:
                out.append(MutantOutcome(kind, False, None, False))
                continue
        accepted = bool(verify_lower_bound(task, m.bound, m))
        unsound = accepted and optimum is not None and m.bound > optimum
        out.append(MutantOutcome(kind, accepted, m.bound, unsound))
    return out
