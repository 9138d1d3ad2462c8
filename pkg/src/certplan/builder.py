"""Accumulates a certificate: circuit reifications plus symbolic derivations
for the three proof blocks.  Ids are assigned only in finish(), once every
touched cost threshold is known."""
from __future__ import annotations

from typing import Dict, List

from .certificate import KINDS, Certificate
from .derivation import resolve_steps, step_constraints
from .pb_core import Axiom, ProofScript, Reification, Red, Rup, clause, neg, pos
from .task_encoding import (CIRCUIT_PREFIXES, RG, RI, RT, build_encoding, decls_for,
                            expand_numbered, gen_cost_monotone, gen_cost_step,
                            prime_var, resolve_placeholders, scope_reifs, xge, xmm, xmmp, xv, xvp)


class BuilderError(Exception):
    pass


def goal_constraint(kind, out, B):
    if kind == "init":
        return clause([neg(RI), pos(xge(1)), pos(out)])
    if kind == "goal":
        return clause([neg(RG), neg(out), pos(xge(B))])
    return clause([neg(out), neg(RT), pos(prime_var(out))])


class CertBuilder:
    def __init__(self, task, B):
        self.task = task
        self.B = B
        self.circuit: List[Reification] = []
        self._heads = set()
        self.blocks: Dict[str, List[list]] = {k: [] for k in KINDS}
        self._claims = {k: set() for k in KINDS}

    # -- circuit
    def reif(self, var, body):
        if not var.startswith(CIRCUIT_PREFIXES) or var.endswith("_p"):
            raise BuilderError("circuit head %s outside the circuit namespace" % var)
        if var in self._heads:
            raise BuilderError("circuit head %s reused" % var)
        self._heads.add(var)
        self.circuit.append(Reification(var, body))
        return var

    # -- derivations
    def derive(self, kind, steps):
        """Append a derivation whose last step is the lemma; identical lemmas
        are kept once per block."""
        steps = list(steps)
        claim = steps[-1].claim
        if claim in self._claims[kind]:
            return claim
        self._claims[kind].add(claim)
        self.blocks[kind].append(steps)
        return claim

    def rup(self, kind, c):
        return self.derive(kind, [Rup(c)])

    def cost_step(self, l, m):
        return self.derive("ind", gen_cost_step(l, m, self.B))

    def monotone(self, kind, j, k, primed=False):
        if k < 0:
            raise BuilderError("monotone lemma with negative gap %d" % k)
        return self.derive(kind, gen_cost_monotone(j, k, self.B, primed))

    # -- finishing
    def touched_vars(self):
        vs = set()
        for r in self.circuit:
            vs.update(r.body.vars())
        for kind in KINDS:
            for d in self.blocks[kind]:
                for c in step_constraints(d):
                    if c is not None:
                        vs.update(c.vars())
                for st in _walk(d):
                    if isinstance(st, Axiom):
                        vs.add(st.lit.var)
        return vs

    def finish(self, output):
        decls = decls_for(self.task, self.B, self.touched_vars())
        enc = build_encoding(self.task, self.B, decls)
        ck = resolve_placeholders(self.B, decls)
        proofs = {}
        for kind in KINDS:
            goal = goal_constraint(kind, output, self.B)
            self.rup(kind, goal)
            cons, keys = expand_numbered(scope_reifs(enc, ck, self.circuit, kind))
            n = len(cons)
            steps, qed = [], None
            for d in self.blocks[kind]:
                steps += resolve_steps(d, keys, n + len(steps))
                if d[-1].claim == goal:
                    qed = n + len(steps)
            proofs[kind] = ProofScript(steps, qed)
        return Certificate(self.B, decls, list(self.circuit), output, proofs)


def state_lits(task, s, primed=False):
    """Literals fixing every task variable to its value in s."""
    name = xvp if primed else xv
    return [pos(name(v)) if v in s else neg(name(v)) for v in task.variables]


def state_lemma_claim(task, s, threshold, head, primed=False):
    """(state literals and mmge_threshold) -> head, as one clause."""
    mm = xmmp if primed else xmm
    lits = [-l for l in state_lits(task, s, primed)]
    lits += [neg(mm(threshold)), pos(prime_var(head) if primed else head)]
    return clause(lits)


def _walk(steps):
    for st in steps:
        yield st
        if isinstance(st, Red):
            yield from _walk(st.steps)
