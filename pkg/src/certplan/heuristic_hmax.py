"""The h^max heuristic with per-state certificate emission."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional

from .builder import state_lemma_claim
from .pb_core import clause, neg, normalize, pos
from .search import Heuristic
from .task_encoding import RG, RT, prime_var, xa, xge, xmm, xmmp, xv, xvp


@dataclass
class HmaxEval:
    state: FrozenSet[str]
    hmax: Optional[int]              # None = infinite (uncapped evaluation only)
    vmax: Dict[str, Optional[int]]
    wmax: Dict[str, Optional[int]]


def _fixpoint(task, s):
    """Relaxed achievement costs by a generalized Dijkstra; None = unreachable."""
    V = {v: None for v in task.variables}
    heap = []
    for v in s:
        V[v] = 0
        heap.append((0, v))
    missing = {}
    by_pre = {v: [] for v in task.variables}
    for a in task.actions:
        missing[a.name] = len(a.pre)
        for p in a.pre:
            by_pre[p].append(a)
        if not a.pre:
            for v in a.add:
                if V[v] is None or a.cost < V[v]:
                    V[v] = a.cost
                    heap.append((a.cost, v))
    heapq.heapify(heap)
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done or d != V[v]:
            continue
        done.add(v)
        for a in by_pre[v]:
            missing[a.name] -= 1
            if missing[a.name] == 0:
                c = d + a.cost        # d is the largest precondition value
                for w in a.add:
                    if V[w] is None or c < V[w]:
                        V[w] = c
                        heapq.heappush(heap, (c, w))
    return V


def compute_hmax(task, s, B=None) -> HmaxEval:
    """h^max of s.  With a bound B every value is capped at B (unreachable
    values become B); without one, unreachable values are None."""
    s = frozenset(s)
    V = _fixpoint(task, s)
    goal = [V[g] for g in task.goal]
    h = None if any(x is None for x in goal) else max(goal, default=0)
    if B is not None:
        V = {v: B if x is None else min(x, B) for v, x in V.items()}
        h = B if h is None else min(h, B)
    if h is None:
        W = {v: x for v, x in V.items()}
    else:
        W = {v: h if x is None else min(x, h) for v, x in V.items()}
    return HmaxEval(s, h, V, W)


class HmaxHeuristic(Heuristic):
    name = "hmax"

    def __init__(self, task):
        self.task = task

    def evaluate(self, s):
        return compute_hmax(self.task, s).hmax

    def certify(self, cb, B, states):
        out = {}
        for idx, s in enumerate(states):
            out[s] = self.certify_state(cb, B, s, idx)
        return out

    def certify_state(self, cb, B, s, idx):
        task = self.task
        e = compute_hmax(task, s, B)
        names = {v: "xh_%d_v%d" % (idx, i) for i, v in enumerate(task.variables)}
        rmax = "xh_%d_max" % idx
        base = B - e.hmax
        W = e.wmax
        for v in task.variables:
            cb.reif(names[v], clause([neg(xv(v)), pos(xmm(base + W[v]))]))
        cb.reif(rmax, normalize([(1, pos(xmm(base)))] + [(1, pos(names[v])) for v in task.variables],
                                len(task.variables) + 1))
        cb.rup("init", state_lemma_claim(task, s, base, rmax))
        cb.rup("ind", state_lemma_claim(task, s, base, rmax, primed=True))
        cb.rup("goal", clause([neg(RG), neg(rmax), pos(xge(B))]))
        rmax_p = pos(prime_var(rmax))
        for a in task.actions:
            self._action_lemma(cb, B, e, a, names, rmax)
        cb.rup("ind", clause([neg(rmax), neg(RT), rmax_p]))
        return rmax, base

    def _action_lemma(self, cb, B, e, a, names, rmax):
        h, W = e.hmax, e.wmax
        base = B - h
        head = [neg(rmax), neg(xa(a.name))]
        if a.pre:
            wp = max(W[p] for p in a.pre)
            short = wp == h
        else:
            wp = 0
            short = h == 0
        if short:
            cb.cost_step(B, a.cost)
            cb.rup("ind", clause(head + [pos(prime_var(rmax))]))
            return
        lp = base + wp
        for v in self.task.variables:
            lv = base + W[v]
            if v in a.add:
                cb.cost_step(lp, a.cost)
                cb.monotone("ind", lv, lp + a.cost - lv, primed=True)
            elif v not in a.dele:
                cb.cost_step(lv, a.cost)
                cb.monotone("ind", lv, a.cost, primed=True)
            cb.rup("ind", clause(head + [pos(prime_var(names[v]))]))
        cb.cost_step(lp, a.cost)
        cb.monotone("ind", base, wp + a.cost, primed=True)
        cb.rup("ind", clause(head + [pos(xmmp(base))]))
        cb.rup("ind", clause(head + [pos(prime_var(rmax))]))
