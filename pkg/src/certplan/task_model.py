"""Grounded STRIPS tasks: data model, parser, plan validation and an
exhaustive optimal-cost oracle used as ground truth in tests."""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")

State = FrozenSet[str]


class TaskError(Exception):
    """Malformed task text or inconsistent task data."""

    def __init__(self, msg, line=None):
        self.line = line
        if line is not None:
            msg = "line %d: %s" % (line, msg)
        super().__init__(msg)


class PlanError(Exception):
    """A plan that does not solve its task."""

    def __init__(self, msg, index=None):
        self.index = index
        super().__init__(msg)


class SearchLimit(Exception):
    pass


@dataclass(frozen=True)
class Action:
    name: str
    pre: FrozenSet[str]
    add: FrozenSet[str]
    dele: FrozenSet[str]
    cost: int

    def __post_init__(self):
        if self.cost < 0:
            raise TaskError("action %s has negative cost" % self.name)
        both = self.add & self.dele
        if both:
            raise TaskError("action %s adds and deletes %s" % (self.name, ",".join(sorted(both))))

    @property
    def evars(self):
        return self.add | self.dele


@dataclass(frozen=True)
class Task:
    variables: Tuple[str, ...]
    actions: Tuple[Action, ...]
    init: FrozenSet[str]
    goal: FrozenSet[str]
    _index: Dict[str, Action] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        vs = set(self.variables)
        if len(vs) != len(self.variables):
            raise TaskError("duplicate variable name")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise TaskError("duplicate action name")
        for what, group in (("init", self.init), ("goal", self.goal)):
            bad = group - vs
            if bad:
                raise TaskError("%s uses undeclared variable %s" % (what, sorted(bad)[0]))
        for a in self.actions:
            bad = (a.pre | a.add | a.dele) - vs
            if bad:
                raise TaskError("action %s uses undeclared variable %s" % (a.name, sorted(bad)[0]))
        object.__setattr__(self, "_index", {a.name: a for a in self.actions})

    def action(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise PlanError("unknown action %s" % name) from None

    def is_goal(self, s):
        return self.goal <= s


def make_task(variables, actions, init=(), goal=()):
    """Convenience constructor; actions are (name, pre, add, del, cost) tuples."""
    acts = tuple(
        a if isinstance(a, Action) else
        Action(a[0], frozenset(a[1]), frozenset(a[2]), frozenset(a[3]), int(a[4]))
        for a in actions)
    return Task(tuple(variables), acts, frozenset(init), frozenset(goal))


def applicable(s, a):
    return a.pre <= s


def apply_action(s, a):
    """Successor of s under a, or None when a is not applicable."""
    if not a.pre <= s:
        return None
    return (s - a.dele) | a.add


def parse_task(text):
    variables = None
    init = goal = None
    actions = []
    cur = None

    def names(toks, lineno):
        for t in toks:
            if not NAME_RE.match(t):
                raise TaskError("bad name %r" % t, lineno)
        return toks

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw, rest = toks[0], toks[1:]
        if cur is not None:
            if kw in ("pre", "add", "del"):
                if kw in cur:
                    raise TaskError("repeated %s section" % kw, lineno)
                cur[kw] = (names(rest, lineno), lineno)
            elif kw == "end":
                if rest:
                    raise TaskError("junk after end", lineno)
                actions.append(cur)
                cur = None
            else:
                raise TaskError("unexpected %r inside action" % kw, lineno)
            continue
        if kw == "vars":
            if variables is not None:
                raise TaskError("repeated vars line", lineno)
            variables = (names(rest, lineno), lineno)
        elif kw in ("init", "goal"):
            if (init if kw == "init" else goal) is not None:
                raise TaskError("repeated %s line" % kw, lineno)
            val = (names(rest, lineno), lineno)
            if kw == "init":
                init = val
            else:
                goal = val
        elif kw == "action":
            if len(rest) != 3 or rest[1] != "cost":
                raise TaskError("expected: action <name> cost <n>", lineno)
            names(rest[:1], lineno)
            if not rest[2].isdigit():
                raise TaskError("cost must be a non-negative integer", lineno)
            cur = {"name": rest[0], "cost": int(rest[2]), "line": lineno}
        else:
            raise TaskError("unknown keyword %r" % kw, lineno)
    if cur is not None:
        raise TaskError("action %s lacks end" % cur["name"], cur["line"])
    if variables is None:
        raise TaskError("missing vars line")
    declared = set(variables[0])
    if len(declared) != len(variables[0]):
        raise TaskError("duplicate variable name", variables[1])

    def checked(entry, lineno_default):
        if entry is None:
            return frozenset()
        toks, lineno = entry
        for t in toks:
            if t not in declared:
                raise TaskError("undeclared variable %s" % t, lineno)
        return frozenset(toks)

    acts = []
    seen = set()
    for a in actions:
        if a["name"] in seen:
            raise TaskError("duplicate action %s" % a["name"], a["line"])
        seen.add(a["name"])
        pre = checked(a.get("pre"), a["line"])
        add = checked(a.get("add"), a["line"])
        dele = checked(a.get("del"), a["line"])
        if add & dele:
            raise TaskError("action %s adds and deletes %s"
                            % (a["name"], sorted(add & dele)[0]), a["line"])
        acts.append(Action(a["name"], pre, add, dele, a["cost"]))
    return Task(tuple(variables[0]), tuple(acts), checked(init, 0), checked(goal, 0))


def format_task(t):
    out = ["vars " + " ".join(t.variables)]
    order = {v: i for i, v in enumerate(t.variables)}

    def ls(group):
        return " ".join(sorted(group, key=order.__getitem__))

    out.append(("init " + ls(t.init)).rstrip())
    out.append(("goal " + ls(t.goal)).rstrip())
    for a in t.actions:
        out.append("action %s cost %d" % (a.name, a.cost))
        for kw, group in (("pre", a.pre), ("add", a.add), ("del", a.dele)):
            if group:
                out.append("  %s %s" % (kw, ls(group)))
        out.append("end")
    return "\n".join(out) + "\n"


def parse_plan(text):
    steps = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("(") and line.endswith(")"):
            line = line[1:-1].strip()
        if not NAME_RE.match(line):
            raise PlanError("bad plan line %r" % raw)
        steps.append(line)
    return steps


def format_plan(steps):
    return "".join(s + "\n" for s in steps)


def validate_plan(t, steps):
    """Replay the plan from the initial state; return its cost or raise PlanError."""
    s = t.init
    total = 0
    for i, name in enumerate(steps):
        a = t.action(name)
        nxt = apply_action(s, a)
        if nxt is None:
            raise PlanError("step %d (%s) not applicable" % (i, name), i)
        s = nxt
        total += a.cost
    if not t.is_goal(s):
        raise PlanError("goal not reached")
    return total


def optimal_plan_oracle(t, limit=1 << 20):
    """Uniform-cost search over explicit states.  Returns (cost, plan) or None."""
    start = t.init
    best = {start: 0}
    parent = {start: None}
    heap = [(0, 0, start)]
    tick = 1
    done = set()
    while heap:
        g, _, s = heapq.heappop(heap)
        if s in done:
            continue
        done.add(s)
        if t.is_goal(s):
            plan = []
            while parent[s] is not None:
                s, name = parent[s]
                plan.append(name)
            return g, plan[::-1]
        for a in t.actions:
            n = apply_action(s, a)
            if n is None:
                continue
            ng = g + a.cost
            old = best.get(n)
            if old is None or ng < old:
                if old is None and len(best) >= limit:
                    raise SearchLimit("more than %d states" % limit)
                best[n] = ng
                parent[n] = (s, a.name)
                heapq.heappush(heap, (ng, tick, n))
                tick += 1
    return None


def optimal_cost_oracle(t, limit=1 << 20):
    r = optimal_plan_oracle(t, limit)
    return None if r is None else r[0]


def goal_distances(t, limit=1 << 20):
    """Exact goal distance for every reachable state (backward Dijkstra over the
    explicit reachable graph).  Unreachable-goal states map to None."""
    reach = [t.init]
    seen = {t.init}
    preds: Dict[State, List[Tuple[State, int]]] = {}
    i = 0
    while i < len(reach):
        s = reach[i]
        i += 1
        for a in t.actions:
            n = apply_action(s, a)
            if n is None:
                continue
            preds.setdefault(n, []).append((s, a.cost))
            if n not in seen:
                if len(seen) >= limit:
                    raise SearchLimit("more than %d states" % limit)
                seen.add(n)
                reach.append(n)
    dist = {}
    heap = [(0, k, s) for k, s in enumerate(reach) if t.is_goal(s)]
    heapq.heapify(heap)
    tick = len(reach)
    while heap:
        d, _, s = heapq.heappop(heap)
        if s in dist:
            continue
        dist[s] = d
        for p, c in preds.get(s, ()):
            if p not in dist:
                heapq.heappush(heap, (d + c, tick, p))
                tick += 1
    return {s: dist.get(s) for s in reach}


EXAMPLE_TASK = """\
vars p q
init
goal q
action a1 cost 1
  add p
end
action a2 cost 2
  pre p
  add q
end
"""
