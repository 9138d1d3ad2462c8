"""Pattern database heuristic with certificate emission.

Two circuit variants are offered.  The naive one has an indicator for every
abstract state; the efficient one only for abstract states with a finite goal
distance, plus a single indicator r_inf saying "no finite abstract state
matches"."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .pb_core import clause, conj, gen_state_set_extension, neg, normalize, pos
from .search import Heuristic
from .builder import state_lemma_claim
from .task_encoding import RG, RT, prime_var, xa, xge, xmm, xv

MAX_PATTERN = 20
VARIANTS = ("naive", "efficient")


class PatternError(Exception):
    pass


@dataclass(frozen=True)
class Pattern:
    vars: Tuple[str, ...]

    @staticmethod
    def make(task, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PatternError("pattern lists a variable twice")
        for v in names:
            if v not in task.variables:
                raise PatternError("pattern variable %s is not a task variable" % v)
        if len(names) > MAX_PATTERN:
            raise PatternError("pattern has %d variables, limit is %d" % (len(names), MAX_PATTERN))
        return Pattern(names)


@dataclass
class PdbTable:
    pattern: Pattern
    dist: List[Optional[int]]          # indexed by abstract-state bitset; None = infinite
    actions: List[Tuple[object, int, int, int]]   # (action, pre, add, del) masks

    def mask(self, vs):
        idx = {v: i for i, v in enumerate(self.pattern.vars)}
        m = 0
        for v in vs:
            if v in idx:
                m |= 1 << idx[v]
        return m

    def abstract(self, s):
        return self.mask(s)

    def successor(self, sa, pre, add, dele):
        if sa & pre != pre:
            return None
        return (sa & ~dele) | add

    def members(self, sa):
        return [v for i, v in enumerate(self.pattern.vars) if sa >> i & 1]


def build_pdb(task, pattern: Pattern) -> PdbTable:
    n = len(pattern.vars)
    if n > MAX_PATTERN:
        raise PatternError("pattern too large")
    table = PdbTable(pattern, [], [])
    table.actions = [(a, table.mask(a.pre), table.mask(a.add), table.mask(a.dele)) for a in task.actions]
    size = 1 << n
    preds: List[List[Tuple[int, int]]] = [[] for _ in range(size)]
    for sa in range(size):
        for a, pre, add, dele in table.actions:
            t = table.successor(sa, pre, add, dele)
            if t is not None:
                preds[t].append((sa, a.cost))
    goal = table.mask(task.goal)
    dist: List[Optional[int]] = [None] * size
    heap = [(0, sa) for sa in range(size) if sa & goal == goal]
    for _, sa in heap:
        dist[sa] = 0
    heapq.heapify(heap)
    while heap:
        d, t = heapq.heappop(heap)
        if d != dist[t]:
            continue
        for sa, c in preds[t]:
            if dist[sa] is None or d + c < dist[sa]:
                dist[sa] = d + c
                heapq.heappush(heap, (d + c, sa))
    table.dist = dist
    return table


def pdb_evaluate(table, s):
    return table.dist[table.abstract(s)]


def _dcap(d, B):
    return B if d is None else min(d, B)


class PDBHeuristic(Heuristic):
    name = "pdb"

    def __init__(self, task, pattern, variant="naive"):
        if variant not in VARIANTS:
            raise ValueError("unknown PDB certificate variant %r" % variant)
        if not isinstance(pattern, Pattern):
            pattern = Pattern.make(task, pattern)
        self.task = task
        self.variant = variant
        self.table = build_pdb(task, pattern)

    def evaluate(self, s):
        return pdb_evaluate(self.table, s)

    # -- names
    @staticmethod
    def r_state(sa):
        return "xh_pdb_s%d" % sa

    @staticmethod
    def r_ge(sa):
        return "xh_pdb_g%d" % sa

    R_PDB = "xh_pdb"
    R_INF = "xh_pdb_inf"
    R_GOAL = "xh_pdb_goal"

    def _state_body(self, sa):
        P = self.table.pattern.vars
        return normalize([(1, pos(xv(v)) if sa >> i & 1 else neg(xv(v))) for i, v in enumerate(P)], len(P))

    def threshold(self, sa, B):
        return B - _dcap(self.table.dist[sa], B)

    def certify(self, cb, B, states):
        if not states:
            return {}
        efficient = self.variant == "efficient"
        self._circuit(cb, B, efficient)
        out = {}
        for s in states:
            thr = self.threshold(self.table.abstract(s), B)
            cb.rup("init", state_lemma_claim(self.task, s, thr, self.R_PDB))
            cb.rup("ind", state_lemma_claim(self.task, s, thr, self.R_PDB, primed=True))
            out[s] = (self.R_PDB, thr)
        if efficient:
            self._goal_efficient(cb, B)
        cb.rup("goal", clause([neg(RG), neg(self.R_PDB), pos(xge(B))]))
        self._transitions(cb, B, efficient)
        if efficient:
            self._inf_preservation(cb)
        cb.rup("ind", clause([neg(self.R_PDB), neg(RT), pos(prime_var(self.R_PDB))]))
        return out

    def _finite(self):
        return [sa for sa, d in enumerate(self.table.dist) if d is not None]

    def _circuit(self, cb, B, efficient):
        states = self._finite() if efficient else list(range(len(self.table.dist)))
        for sa in states:
            cb.reif(self.r_state(sa), self._state_body(sa))
            cb.reif(self.r_ge(sa), normalize([(1, pos(self.r_state(sa))), (1, pos(xmm(self.threshold(sa, B))))], 2))
        disj = [pos(self.r_ge(sa)) for sa in states]
        if efficient:
            cb.reif(self.R_INF, conj(neg(self.r_state(sa)) for sa in states))
            disj.insert(0, pos(self.R_INF))
        cb.reif(self.R_PDB, clause(disj))

    def _transitions(self, cb, B, efficient):
        states = self._finite() if efficient else list(range(len(self.table.dist)))
        dist = self.table.dist
        r_pdb_p = pos(prime_var(self.R_PDB))
        for sa in states:
            for a, pre, add, dele in self.table.actions:
                t = self.table.successor(sa, pre, add, dele)
                if t is None:
                    continue
                lemma = clause([neg(self.r_ge(sa)), neg(xa(a.name)), r_pdb_p])
                if efficient and dist[t] is None:
                    cb.rup("ind", lemma)
                    continue
                cb.rup("ind", clause([neg(self.r_state(sa)), neg(xa(a.name)), pos(prime_var(self.r_state(t)))]))
                l = self.threshold(sa, B)
                j = self.threshold(t, B)
                cb.cost_step(l, a.cost)
                cb.monotone("ind", j, l + a.cost - j, primed=True)
                cb.rup("ind", lemma)
            cb.rup("ind", clause([neg(self.r_ge(sa)), neg(RT), r_pdb_p]))

    # -- efficient variant only
    def _sse(self, cb, kind, Y, alpha, r_alpha):
        """Derive ~r_alpha + sum of r^{s} over abstract states s agreeing with alpha."""
        P = self.table.pattern.vars
        Z = [xv(v) for v in P]
        betas = {}
        for sa in range(len(self.table.dist)):
            key = frozenset((xv(v), sa >> i & 1) for i, v in enumerate(P))
            if all(dict(key)[y] == alpha[y] for y in Y):
                if self.table.dist[sa] is None:
                    raise AssertionError("state set extension over an infinite abstract state")
                betas[key] = self.r_state(sa)
        steps, final = gen_state_set_extension(Y, Z, alpha, r_alpha, betas)
        cb.derive(kind, steps)

    def _goal_efficient(self, cb, B):
        P = self.table.pattern.vars
        Y = [xv(v) for v in P if v in self.task.goal]
        cb.reif(self.R_GOAL, conj(pos(y) for y in Y))
        self._sse(cb, "goal", Y, {y: 1 for y in Y}, self.R_GOAL)
        cb.rup("goal", clause([neg(RG), neg(self.R_INF)]))

    def _inf_preservation(self, cb):
        P = self.table.pattern.vars
        r_inf = neg(self.R_INF)
        lvars = {}
        for sa in self._finite():
            for a, pre, add, dele in self.table.actions:
                ev = add | dele
                lemma = clause([r_inf, neg(xa(a.name)), neg(prime_var(self.r_state(sa)))])
                consistent = (add & ~sa == 0 and dele & sa == 0 and (pre & ~ev) & ~sa == 0)
                if consistent:
                    alpha = {}
                    for i, v in enumerate(P):
                        bit = 1 << i
                        if pre & bit:
                            alpha[xv(v)] = 1
                        elif not ev & bit:
                            alpha[xv(v)] = 1 if sa & bit else 0
                    Y = [xv(v) for v in P if xv(v) in alpha]
                    key = tuple((y, alpha[y]) for y in Y)
                    if key not in lvars:
                        lvars[key] = cb.reif("xh_pdb_L%d" % len(lvars),
                                             conj(pos(y) if alpha[y] else neg(y) for y in Y))
                    self._sse(cb, "ind", Y, alpha, lvars[key])
                cb.rup("ind", lemma)
            cb.rup("ind", clause([r_inf, neg(RT), neg(prime_var(self.r_state(sa)))]))
        cb.rup("ind", clause([r_inf, neg(RT), pos(prime_var(self.R_PDB))]))
