"""A* search that, once an optimal plan is found, logs a lower-bound
certificate for its cost."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .builder import BuilderError, CertBuilder, state_lemma_claim, state_lits
from .certificate import Certificate
from .pb_core import clause, neg, normalize, pos
from .task_encoding import RG, RT, prime_var, xa, xge
from .task_model import SearchLimit, apply_action

State = FrozenSet[str]
INF = None  # heuristic value of a dead end


class SearchError(Exception):
    pass


class ReopeningError(SearchError):
    pass


class Heuristic:
    """Interface for heuristics that can justify their estimates.

    evaluate(s) returns a non-negative integer or None for a dead end.
    certify(cb, B, states) is called after the search with the states left
    open; it adds its circuit and lemmas to cb and returns, per state, the
    pair (r^h_s variable, threshold t) such that the block scopes contain
        init:  (state literals and mmge_t) -> r^h_s
        ind:   the same lemma over primed variables, and (r^h_s and rT) -> r^h_s'
        goal:  (rG and r^h_s) -> ge_B
    """

    name = "heuristic"

    def evaluate(self, s: State) -> Optional[int]:
        raise NotImplementedError

    def certify(self, cb: CertBuilder, B: int, states: List[State]) -> Dict[State, Tuple[str, int]]:
        raise NotImplementedError


class BlindHeuristic(Heuristic):
    """h = 0 everywhere; certified by the single reification r <=> ge_0."""

    name = "blind"

    def evaluate(self, s):
        return 0

    def certify(self, cb, B, states):
        if not states:
            return {}
        return certify_constant(cb, B, states, "xh_blind")


def certify_constant(cb, B, states, head):
    """Certificate for h = 0: r is simply 'cost >= B'."""
    cb.reif(head, clause([pos(xge(B))]))
    out = {}
    for s in states:
        cb.rup("init", state_lemma_claim(cb.task, s, B, head))
        cb.rup("ind", state_lemma_claim(cb.task, s, B, head, primed=True))
        out[s] = (head, B)
    cb.rup("goal", clause([neg(RG), neg(head), pos(xge(B))]))
    for c in sorted({a.cost for a in cb.task.actions}):
        cb.cost_step(B, c)
    cb.rup("ind", clause([neg(head), neg(RT), pos(prime_var(head))]))
    return out


@dataclass
class SearchStats:
    expansions: int = 0
    generated: int = 0
    evaluations: int = 0
    dead_ends: int = 0


@dataclass
class SearchResult:
    solvable: bool
    plan: Optional[List[str]] = None
    cost: Optional[int] = None
    certificate: Optional[Certificate] = None
    stats: SearchStats = field(default_factory=SearchStats)
    closed: List[Tuple[State, int]] = field(default_factory=list)
    open_states: List[State] = field(default_factory=list)


def astar_plan(task, heuristic: Heuristic, certify=True, limit=1 << 20) -> SearchResult:
    stats = SearchStats()
    h_cache: Dict[State, Optional[int]] = {}

    def h_of(s):
        if s not in h_cache:
            stats.evaluations += 1
            h_cache[s] = heuristic.evaluate(s)
        return h_cache[s]

    tick = itertools.count()
    best_g: Dict[State, int] = {}
    parent: Dict[State, Tuple[Optional[State], Optional[str]]] = {}
    order: Dict[State, int] = {}        # first-generation order, for determinism
    closed: Dict[State, int] = {}
    closed_list: List[Tuple[State, int]] = []
    heap = []

    def generate(s, g, par, act):
        order.setdefault(s, len(order))
        h = h_of(s)
        best_g[s] = g
        parent[s] = (par, act)
        if h is INF:
            stats.dead_ends += 1
            return
        heapq.heappush(heap, (g + h, h, next(tick), s, g))

    generate(task.init, 0, None, None)
    goal_state = None
    while heap:
        f, h, _, s, g = heapq.heappop(heap)
        if s in closed or best_g.get(s) != g:
            continue
        closed[s] = g
        closed_list.append((s, g))
        if task.is_goal(s):
            goal_state = s
            break
        stats.expansions += 1
        if len(closed) > limit:
            raise SearchLimit("more than %d expansions" % limit)
        for a in task.actions:
            t = apply_action(s, a)
            if t is None:
                continue
            stats.generated += 1
            g2 = g + a.cost
            if t in closed:
                if g2 < closed[t]:
                    raise ReopeningError("state reached again with lower cost %d < %d; heuristic is inconsistent"
                                         % (g2, closed[t]))
                continue
            if t in best_g and best_g[t] <= g2:
                continue
            generate(t, g2, s, a.name)

    open_states = sorted((s for s in best_g if s not in closed), key=order.__getitem__)
    res = SearchResult(goal_state is not None, stats=stats, closed=closed_list, open_states=open_states)
    if goal_state is None:
        return res
    plan = []
    s = goal_state
    while parent[s][0] is not None:
        s, act = parent[s]
        plan.append(act)
    plan.reverse()
    res.plan, res.cost = plan, closed[goal_state]
    if certify:
        res.certificate = build_certificate(task, heuristic, res.cost, closed_list, open_states)
    return res


def closed_var(i):
    return "xs_%d" % i


OUTPUT = "xs_astar"


def build_certificate(task, heuristic, B, closed_list, open_states):
    cb = CertBuilder(task, B)
    hinfo = heuristic.certify(cb, B, open_states)
    nv = len(task.variables)
    closed_g = {}
    cvar = {}
    for i, (s, g) in enumerate(closed_list):
        if g > B:
            raise BuilderError("closed state with g=%d above the bound %d" % (g, B))
        cvar[s] = cb.reif(closed_var(i), normalize([(1, l) for l in state_lits(task, s)] + [(1, pos(xge(g)))], nv + 1))
        closed_g[s] = g
    disj = list(dict.fromkeys([cvar[s] for s, _ in closed_list] + [hinfo[s][0] for s in open_states]))
    out = cb.reif(OUTPUT, clause([pos(v) for v in disj]))
    out_p = prime_var(out)

    for s, g in closed_list:
        r = cvar[s]
        for a in task.actions:
            t = apply_action(s, a)
            if t is None:
                continue
            g2 = g + a.cost
            cb.cost_step(g, a.cost)
            if g2 < B:
                if t in closed_g:
                    if closed_g[t] > g2:
                        raise BuilderError("successor closed with larger cost")
                    cb.monotone("ind", closed_g[t], g2 - closed_g[t], primed=True)
                elif t in hinfo:
                    thr = hinfo[t][1]
                    if thr > g2:
                        raise BuilderError("open successor with f below the bound")
                    cb.monotone("ind", thr, g2 - thr, primed=True)
                else:
                    raise BuilderError("successor neither closed nor open")
            cb.rup("ind", clause([neg(r), neg(xa(a.name)), pos(out_p)]))
        cb.rup("ind", clause([neg(r), neg(RT), pos(out_p)]))
    for s in open_states:
        cb.rup("ind", clause([neg(hinfo[s][0]), neg(RT), pos(out_p)]))
    return cb.finish(out)
