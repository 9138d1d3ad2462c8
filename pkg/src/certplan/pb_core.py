"""Pseudo-Boolean constraints and the cutting-planes-with-reification proof
system: normalization, negation, reification expansion, the derivation rules,
reverse unit propagation, empty-witness redundance steps, a script checker and
brute-force semantic oracles."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np


class Lit(NamedTuple):
    var: str
    positive: bool = True

    def __neg__(self):
        return Lit(self.var, not self.positive)

    def __str__(self):
        return self.var if self.positive else "~" + self.var


def pos(v):
    return Lit(v, True)


def neg(v):
    return Lit(v, False)


def lit_of(v, value):
    """The literal over v that is true exactly when v has the given value."""
    return Lit(v, bool(value))


class PBConstraint:
    """Normalized constraint sum(a_i * l_i) >= A with a_i >= 1, A >= 0 and at
    most one literal per variable.  Terms are kept sorted by variable name so
    that structural equality is syntactic equality."""

    __slots__ = ("terms", "degree", "_hash")

    def __init__(self, terms, degree):
        self.terms = tuple(terms)
        self.degree = degree
        self._hash = None

    def __eq__(self, other):
        return (isinstance(other, PBConstraint) and self.degree == other.degree
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.terms, self.degree))
        return self._hash

    def __repr__(self):
        return "PBConstraint(%s)" % self

    def __str__(self):
        return format_constraint(self)

    def vars(self):
        return [l.var for _, l in self.terms]

    def coef_sum(self):
        return sum(a for a, _ in self.terms)

    def coef(self, lit):
        for a, l in self.terms:
            if l.var == lit.var:
                return a if l.positive == lit.positive else 0
        return 0

    def is_contradiction(self):
        # no assignment can reach the degree
        return self.coef_sum() < self.degree

    def satisfied_by(self, rho):
        """rho maps variable -> bool (missing variables count as False)."""
        return sum(a for a, l in self.terms if bool(rho.get(l.var, False)) == l.positive) >= self.degree


def normalize(terms, degree):
    """Normalize a signed-coefficient inequality sum(b_i * l_i) >= degree.

    terms is an iterable of (b, lit); lit may be a Lit or a variable name
    (positive).  x-bar is rewritten as 1 - x, opposing literals cancel against
    the degree and negative coefficients are flipped onto the complementary
    literal.  A negative degree clamps to 0."""
    lin: Dict[str, int] = {}
    for b, l in terms:
        if b == 0:
            continue
        if isinstance(l, str):
            l = Lit(l, True)
        if l.positive:
            lin[l.var] = lin.get(l.var, 0) + b
        else:
            degree -= b
            lin[l.var] = lin.get(l.var, 0) - b
    out = []
    for v in sorted(lin):
        b = lin[v]
        if b > 0:
            out.append((b, Lit(v, True)))
        elif b < 0:
            degree -= b
            out.append((-b, Lit(v, False)))
    return PBConstraint(out, max(0, degree))


def constraint(terms, degree):
    """Build from already non-negative terms (still normalized for safety)."""
    return normalize(terms, degree)


def clause(lits):
    return normalize([(1, l) for l in lits], 1)


def conj(lits):
    lits = list(lits)
    return normalize([(1, l) for l in lits], len(lits))


def negate(c):
    return PBConstraint([(a, -l) for a, l in c.terms], c.coef_sum() - c.degree + 1)


TRIVIAL = PBConstraint((), 0)
FALSUM = PBConstraint((), 1)


# ---------------------------------------------------------------- text syntax

_TOKEN_RE = re.compile(r"~?x[A-Za-z0-9_\-]*\Z")


class SyntaxErr(Exception):
    pass


def format_lit(l):
    return str(l)


def format_constraint(c):
    parts = ["%d %s" % (a, l) for a, l in c.terms]
    parts.append(">= %d" % c.degree)
    return " ".join(parts)


def parse_lit(tok):
    if not _TOKEN_RE.match(tok):
        raise SyntaxErr("bad literal %r" % tok)
    if tok.startswith("~"):
        return Lit(tok[1:], False)
    return Lit(tok, True)


def _int(tok):
    if not re.match(r"-?[0-9]+\Z", tok):
        raise SyntaxErr("bad integer %r" % tok)
    return int(tok)


def parse_constraint(text):
    toks = text.split()
    if len(toks) < 2 or toks[-2] != ">=":
        raise SyntaxErr("constraint must end with '>= <deg>'")
    body = toks[:-2]
    if len(body) % 2:
        raise SyntaxErr("odd number of term tokens")
    terms = [(_int(body[i]), parse_lit(body[i + 1])) for i in range(0, len(body), 2)]
    return normalize(terms, _int(toks[-1]))


# ---------------------------------------------------------------- reification

IFF, IMPLIES, IMPLIED_BY = "iff", "implies", "implied-by"


class ReificationError(Exception):
    pass


@dataclass(frozen=True)
class Reification:
    var: str
    body: PBConstraint
    direction: str = IFF

    def __post_init__(self):
        if self.var in self.body.vars():
            raise ReificationError("head %s occurs in its own body" % self.var)


def reif_implies(r, body):
    """r => C as A*~r + C >= A."""
    return normalize([(body.degree, Lit(r, False))] + list(body.terms), body.degree)


def reif_implied_by(r, body):
    """r <= C as (M-A+1)*r + sum(a*~l) >= M-A+1."""
    k = body.coef_sum() - body.degree + 1
    return normalize([(k, Lit(r, True))] + [(a, -l) for a, l in body.terms], k)


def expand_reification(reif):
    if reif.var in reif.body.vars():
        raise ReificationError("head %s occurs in its own body" % reif.var)
    if reif.direction == IMPLIES:
        return [reif_implies(reif.var, reif.body)]
    if reif.direction == IMPLIED_BY:
        return [reif_implied_by(reif.var, reif.body)]
    return [reif_implies(reif.var, reif.body), reif_implied_by(reif.var, reif.body)]


# ---------------------------------------------------------------- proof steps

@dataclass(frozen=True)
class Axiom:
    lit: Lit


@dataclass(frozen=True)
class Lin:
    id1: object
    c1: int
    id2: object
    c2: int


@dataclass(frozen=True)
class Div:
    id: object
    c: int


@dataclass(frozen=True)
class Sat:
    id: object


@dataclass(frozen=True)
class Rup:
    claim: PBConstraint


@dataclass(frozen=True)
class Red:
    """Redundance step with empty witness.  end is ("contradiction", id) or
    ("derived", id), where id refers to the subproof's database."""
    claim: PBConstraint
    steps: tuple
    end: tuple


Step = Union[Axiom, Lin, Div, Sat, Rup, Red]


@dataclass
class ProofScript:
    steps: list
    qed: object = None


class StepError(Exception):
    def __init__(self, index, rule, reason):
        self.index = index
        self.rule = rule
        self.reason = reason
        super().__init__("step %s (%s): %s" % (index, rule, reason))


# ---------------------------------------------------------------- propagation

class Propagator:
    """Constraint store with slack-based unit propagation.

    Literals are encoded as signed integers.  Root-level consequences of the
    stored constraints are kept on the trail, so a RUP check only propagates
    what follows from the negated claim.  Frames allow temporarily extending
    the store (RED subproofs) and rolling it back."""

    def __init__(self):
        self.var_ids: Dict[str, int] = {}
        self.val = [0]
        self.occ: Dict[int, List[Tuple[int, int]]] = {}
        self.lits: List[list] = []
        self.coefs: List[list] = []
        self.slack: List[int] = []
        self.maxc: List[int] = []
        self.trail: List[int] = []
        self.conflict = False
        self.frames = []

    def _lit(self, l):
        vid = self.var_ids.get(l.var)
        if vid is None:
            vid = len(self.val)
            self.var_ids[l.var] = vid
            self.val.append(0)
        return vid if l.positive else -vid

    def _is_false(self, x):
        v = self.val[x if x > 0 else -x]
        return v != 0 and (v > 0) != (x > 0)

    def _is_true(self, x):
        v = self.val[x if x > 0 else -x]
        return v != 0 and (v > 0) == (x > 0)

    def _assign(self, x):
        self.val[x if x > 0 else -x] = 1 if x > 0 else -1
        self.trail.append(x)
        occ = self.occ.get(-x)
        if occ:
            slack = self.slack
            for cid, a in occ:
                slack[cid] -= a

    def _undo(self, upto):
        trail = self.trail
        slack = self.slack
        while len(trail) > upto:
            x = trail.pop()
            self.val[x if x > 0 else -x] = 0
            occ = self.occ.get(-x)
            if occ:
                for cid, a in occ:
                    slack[cid] += a

    def _insert(self, c):
        lits = []
        coefs = []
        for a, l in sorted(c.terms, key=lambda t: -t[0]):
            lits.append(self._lit(l))
            coefs.append(a)
        cid = len(self.lits)
        self.lits.append(lits)
        self.coefs.append(coefs)
        self.maxc.append(coefs[0] if coefs else 0)
        s = -c.degree
        for x, a in zip(lits, coefs):
            if not self._is_false(x):
                s += a
        self.slack.append(s)
        if c.degree > 0:
            for x, a in zip(lits, coefs):
                self.occ.setdefault(x, []).append((cid, a))
        return cid

    def _remove_last(self):
        cid = len(self.lits) - 1
        lits = self.lits.pop()
        self.coefs.pop()
        self.maxc.pop()
        self.slack.pop()
        for x in lits:
            lst = self.occ.get(x)
            if lst and lst[-1][0] == cid:
                lst.pop()

    def _scan(self, cid, queue):
        s = self.slack[cid]
        if s < 0:
            return False
        if s < self.maxc[cid]:
            for x, a in zip(self.lits[cid], self.coefs[cid]):
                if a <= s:
                    break
                if self.val[x if x > 0 else -x] == 0:
                    self._assign(x)
                    queue.append(x)
        return True

    def _propagate(self, cid):
        """Propagate from a freshly inserted constraint; False on conflict."""
        queue = []
        if not self._scan(cid, queue):
            return False
        slack, maxc, occs = self.slack, self.maxc, self.occ
        i = 0
        while i < len(queue):
            x = queue[i]
            i += 1
            occ = occs.get(-x)
            if not occ:
                continue
            for c2, _ in occ:
                s = slack[c2]
                if s < 0:
                    return False
                if s < maxc[c2] and not self._scan(c2, queue):
                    return False
        return True

    def add(self, c):
        cid = self._insert(c)
        if not self.conflict and not self._propagate(cid):
            self.conflict = True
        return cid

    def rup(self, claim):
        """True iff adding the negation of claim propagates to a conflict."""
        if self.conflict:
            return True
        mark = len(self.trail)
        cid = self._insert(negate(claim))
        ok = not self._propagate(cid)
        self._undo(mark)
        self._remove_last()
        return ok

    def push(self):
        self.frames.append((len(self.trail), len(self.lits), self.conflict))

    def pop(self):
        mark, n, conflict = self.frames.pop()
        self._undo(mark)
        while len(self.lits) > n:
            self._remove_last()
        self.conflict = conflict

    def root_value(self, l):
        vid = self.var_ids.get(l.var)
        if vid is None or self.val[vid] == 0:
            return None
        return (self.val[vid] > 0) == l.positive


# ---------------------------------------------------------------- checking

class ConstraintDB:
    """Append-only constraint list with ids starting at 1."""

    def __init__(self, constraints=()):
        self.items: List[PBConstraint] = []
        for c in constraints:
            self.add(c)

    def add(self, c):
        self.items.append(c)
        return len(self.items)

    def get(self, i):
        if not isinstance(i, int) or i < 1 or i > len(self.items):
            raise KeyError(i)
        return self.items[i - 1]

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def _as_int(x, what):
    if not isinstance(x, int) or isinstance(x, bool):
        raise ValueError("%s must be an integer" % what)
    return x


def linear_combination(c1, k1, c2, k2):
    return normalize([(k1 * a, l) for a, l in c1.terms] + [(k2 * a, l) for a, l in c2.terms],
                     k1 * c1.degree + k2 * c2.degree)


def divide(c, d):
    return PBConstraint([(-(-a // d), l) for a, l in c.terms], -(-c.degree // d))


def saturate(c):
    return PBConstraint([(min(a, c.degree), l) for a, l in c.terms if min(a, c.degree) > 0],
                        c.degree)


def cutting_plane_step(db, step):
    """Result of a literal axiom, linear combination, division or saturation
    step over db (a ConstraintDB or any object with get(id))."""
    if isinstance(step, Axiom):
        return PBConstraint([(1, step.lit)], 0)
    if isinstance(step, Lin):
        k1 = _as_int(step.c1, "multiplier")
        k2 = _as_int(step.c2, "multiplier")
        if k1 < 0 or k2 < 0:
            raise ValueError("negative multiplier")
        return linear_combination(db.get(step.id1), k1, db.get(step.id2), k2)
    if isinstance(step, Div):
        d = _as_int(step.c, "divisor")
        if d < 1:
            raise ValueError("divisor must be positive")
        return divide(db.get(step.id), d)
    if isinstance(step, Sat):
        return saturate(db.get(step.id))
    raise TypeError("not a cutting planes step: %r" % (step,))


class Checker:
    """Runs proof steps over a growing database."""

    def __init__(self, constraints=()):
        self.db = ConstraintDB()
        self.prop = Propagator()
        for c in constraints:
            self.add(c)

    def add(self, c):
        self.prop.add(c)
        return self.db.add(c)

    def get(self, i):
        return self.db.get(i)

    def __len__(self):
        return len(self.db)

    def step(self, st, index=None):
        """Validate st and append its result; return the new id."""
        rule = type(st).__name__.lower()
        if isinstance(st, Rup):
            if not self.prop.rup(st.claim):
                raise StepError(index, rule, "no conflict by unit propagation")
            return self.add(st.claim)
        if isinstance(st, Red):
            self._check_red(st, index)
            return self.add(st.claim)
        try:
            c = cutting_plane_step(self.db, st)
        except KeyError as e:
            raise StepError(index, rule, "unknown id %s" % e.args[0]) from None
        except (ValueError, TypeError) as e:
            raise StepError(index, rule, str(e)) from None
        return self.add(c)

    def _check_red(self, st, index):
        n = len(self.db)
        self.prop.push()
        try:
            self.add(negate(st.claim))
            for k, sub in enumerate(st.steps):
                self.step(sub, "%s.%d" % (index, k))
            kind, ref = st.end
            try:
                c = self.db.get(ref)
            except KeyError:
                raise StepError(index, "red", "unknown id %s" % ref) from None
            if kind == "contradiction":
                if not c.is_contradiction():
                    raise StepError(index, "red", "constraint %s is not a contradiction" % ref)
            elif kind == "derived":
                if c != st.claim:
                    raise StepError(index, "red", "constraint %s differs from the claim" % ref)
            else:
                raise StepError(index, "red", "bad terminator %r" % kind)
        finally:
            del self.db.items[n:]
            self.prop.pop()

    def run(self, steps):
        for i, st in enumerate(steps):
            self.step(st, i)


def check_rup(db, claim):
    p = Propagator()
    for c in db:
        p.add(c)
    return p.rup(claim)


def check_red(db, claim, sub_steps, end):
    ch = Checker(db)
    try:
        ch.step(Red(claim, tuple(sub_steps), tuple(end)), 0)
    except StepError:
        return False
    return True


@dataclass
class ScriptReport:
    accepted: bool
    index: object = None
    rule: str = ""
    reason: str = ""

    def __bool__(self):
        return self.accepted


def check_script(db, script, goal):
    ch = Checker(db)
    try:
        ch.run(script.steps)
    except StepError as e:
        return ScriptReport(False, e.index, e.rule, e.reason)
    try:
        c = ch.get(script.qed)
    except KeyError:
        return ScriptReport(False, "qed", "qed", "unknown id %s" % (script.qed,))
    if c != goal:
        return ScriptReport(False, "qed", "qed", "constraint %s is %s, expected %s" % (script.qed, c, goal))
    return ScriptReport(True)


# ---------------------------------------------------------------- semantics

ENUM_LIMIT = 20


def models(constraints, variables):
    """Boolean matrix of all assignments over variables (rows) and a mask of
    those that satisfy every constraint."""
    variables = list(variables)
    n = len(variables)
    if n > ENUM_LIMIT:
        raise ValueError("too many variables to enumerate (%d)" % n)
    idx = {v: i for i, v in enumerate(variables)}
    rows = np.arange(1 << n, dtype=np.int64)
    table = ((rows[:, None] >> np.arange(n)) & 1).astype(np.int64)
    mask = np.ones(1 << n, dtype=bool)
    for c in constraints:
        mask &= _holds(c, table, idx)
    return table, mask


def _holds(c, table, idx):
    total = np.zeros(table.shape[0], dtype=np.int64)
    for a, l in c.terms:
        col = table[:, idx[l.var]]
        total += a * (col if l.positive else 1 - col)
    return total >= c.degree


def implied_by_enumeration(db, c, variables=None):
    db = list(db)
    if variables is None:
        vs = set(c.vars())
        for d in db:
            vs.update(d.vars())
        variables = sorted(vs)
    else:
        variables = list(variables)
        known = set(variables)
        for d in db + [c]:
            for v in d.vars():
                if v not in known:
                    known.add(v)
                    variables.append(v)
    table, mask = models(db, variables)
    idx = {v: i for i, v in enumerate(variables)}
    return bool(np.all(_holds(c, table, idx)[mask]))


def model_set(constraints, variables):
    table, mask = models(constraints, variables)
    return {tuple(int(x) for x in row) for row in table[mask]}


# ---------------------------------------------------------------- state sets

def gen_state_set_extension(Y, Z, alpha, r_alpha, r_betas):
    """RUP steps deriving ~r_alpha + sum(r_beta) >= 1.

    Y, Z: ordered variable lists with Y a subset of Z; alpha maps each y to
    0/1; r_betas maps a frozenset of (z, value) pairs (one per z in Z,
    extending alpha) to the variable defined by r_beta <= (literals of beta).
    Requires r_alpha => (literals of alpha) in the database."""
    Y = list(Y)
    rest = [z for z in Z if z not in set(Y)]
    n = len(rest)
    base = tuple((y, alpha[y]) for y in Y)

    def heads(partial):
        out = []
        for ext in itertools.product((0, 1), repeat=n - len(partial)):
            full = frozenset(base + partial + tuple(zip(rest[len(partial):], ext)))
            try:
                out.append(r_betas[full])
            except KeyError:
                raise KeyError("missing reification for extension %s" % sorted(full)) from None
        return out

    steps = []
    for k in range(1, n + 1):
        m = n - k
        for bits in itertools.product((0, 1), repeat=m):
            partial = tuple(zip(rest[:m], bits))
            lits = [pos(r) for r in heads(partial)]
            lits += [lit_of(z, 1 - b) for z, b in base + partial]
            steps.append(Rup(clause(lits)))
    final = clause([neg(r_alpha)] + [pos(r) for r in heads(())])
    steps.append(Rup(final))
    return steps, final
