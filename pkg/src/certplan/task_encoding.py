"""Canonical PB encoding of a planning task under a cost bound, the lazily
declared cost variables, priming, and the two cost-lemma generators."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Tuple

from .derivation import IMP, NEG, REV, R, S
from .pb_core import (Axiom, Lin, Lit, PBConstraint, Red, Reification, Rup, Sat,
                      clause, conj, expand_reification, neg, normalize, pos)


class EncodingError(Exception):
    pass


class PrimeError(EncodingError):
    pass


# ---------------------------------------------------------------- catalog

def num(l):
    return "m%d" % -l if l < 0 else "%d" % l


def unnum(tok):
    if tok.startswith("m") and tok[1:].isdigit():
        return -int(tok[1:])
    if tok.isdigit():
        return int(tok)
    raise ValueError("bad number token %r" % tok)


def xv(v):
    return "xv_" + v


def xvp(v):
    return "xvp_" + v


def xc(i):
    return "xc_%d" % i


def xcp(i):
    return "xcp_%d" % i


def xge(k):
    return "xge_%d" % k


def xgep(k):
    return "xgep_%d" % k


def xmm(l):
    return "xmmge_" + num(l)


def xmmp(l):
    return "xmmgep_" + num(l)


def xdelta(k):
    return "xdelta_%d" % k


def xdge(k):
    return "xdeltage_%d" % k


def xdle(k):
    return "xdeltale_%d" % k


def xeq(v):
    return "xeq_" + v


def xgeq(v):
    return "xgeq_" + v


def xleq(v):
    return "xleq_" + v


def xa(name):
    return "xa_" + name


RI, RG, RT = "xrI", "xrG", "xrT"

_PRIME_MAP = (("xv_", "xvp_"), ("xc_", "xcp_"), ("xge_", "xgep_"), ("xmmge_", "xmmgep_"))
PRIMED_PREFIXES = ("xvp_", "xcp_", "xgep_", "xmmgep_")
CIRCUIT_PREFIXES = ("xh_", "xs_")


def is_primed(var):
    return var.startswith(PRIMED_PREFIXES) or (var.startswith(CIRCUIT_PREFIXES) and var.endswith("_p"))


def prime_var(var):
    for a, b in _PRIME_MAP:
        if var.startswith(a):
            return b + var[len(a):]
    if var.startswith(CIRCUIT_PREFIXES) and not var.endswith("_p"):
        return var + "_p"
    raise PrimeError("variable %s has no primed twin" % var)


def prime_lit(l):
    return Lit(prime_var(l.var), l.positive)


def prime(x):
    """Primed copy of a constraint, reification or literal."""
    if isinstance(x, Lit):
        return prime_lit(x)
    if isinstance(x, PBConstraint):
        return normalize([(a, prime_lit(l)) for a, l in x.terms], x.degree)
    if isinstance(x, Reification):
        return Reification(prime_var(x.var), prime(x.body), x.direction)
    if isinstance(x, str):
        return prime_var(x)
    raise TypeError("cannot prime %r" % (x,))


def nbits(B):
    """Cost bits c_0..c_w with w = ceil(log2(max(B,1)))."""
    return (max(B, 1) - 1).bit_length() + 1


def clip(l, B):
    return min(B, max(0, l))


# ---------------------------------------------------------------- declarations

@dataclass(frozen=True)
class LazyCostDecls:
    ge: Tuple[int, ...] = ()
    delta: Tuple[int, ...] = ()
    mm: Tuple[int, ...] = ()

    @staticmethod
    def make(ge=(), delta=(), mm=()):
        return LazyCostDecls(tuple(sorted(set(ge))), tuple(sorted(set(delta))), tuple(sorted(set(mm))))


def collect_cost_vars(variables):
    """Split variable names into the ge / mm threshold sets they mention."""
    ge, mm = set(), set()
    for v in variables:
        if v.startswith("xge_"):
            ge.add(int(v[4:]))
        elif v.startswith("xgep_"):
            ge.add(int(v[5:]))
        elif v.startswith("xmmge_"):
            mm.add(unnum(v[6:]))
        elif v.startswith("xmmgep_"):
            mm.add(unnum(v[7:]))
    return ge, mm


def decls_for(task, B, variables):
    ge, mm = collect_cost_vars(variables)
    ge |= {clip(l, B) for l in mm}
    ge |= {0, 1, B}
    return LazyCostDecls.make(ge, {a.cost for a in task.actions}, mm)


# ---------------------------------------------------------------- encoding

GE_TAGS = ("delta", "ge", "gep")
TRANS_TAGS = ("delta", "ge", "gep", "frame", "action", "trans")


@dataclass
class TaskEncoding:
    B: int
    width: int
    reifs: List[Tuple[str, Reification]]   # (block tag, reification) in canonical order
    rI: str = RI
    rG: str = RG
    rT: str = RT

    def block(self, *tags):
        return [r for n, r in self.reifs if n in tags]

    @property
    def C_init(self):
        return self.block("init", "ge")

    @property
    def C_goal(self):
        return self.block("goal", "ge")

    @property
    def C_trans(self):
        return self.block(*TRANS_TAGS)

    @property
    def C_ge(self):
        return self.block(*GE_TAGS)

    def scope(self, kind):
        """Reifications in scope for one lemma, in canonical order."""
        tags = {"init": ("init",) + GE_TAGS, "goal": ("goal",) + GE_TAGS, "ind": TRANS_TAGS}[kind]
        return self.block(*tags)


def _cost_sum(width, bitvar, sign=1):
    return [(sign * (1 << i), pos(bitvar(i))) for i in range(width)]


def build_encoding(task, B, decls):
    if B < 0:
        raise EncodingError("negative bound")
    width = nbits(B)
    top = max(B, 1)
    ge = sorted(set(decls.ge) | {B})
    for k in ge:
        if k < 0 or k > top:
            raise EncodingError("ge threshold %d outside 0..%d" % (k, top))
    deltas = sorted(set(decls.delta))
    for a in task.actions:
        if a.cost not in deltas:
            raise EncodingError("cost %d of action %s has no declared delta" % (a.cost, a.name))
    V = task.variables
    out: List[Tuple[str, Reification]] = []

    body = [(1, pos(xv(v)) if v in task.init else neg(xv(v))) for v in V]
    out.append(("init", Reification(RI, normalize(body, len(V)))))
    out.append(("goal", Reification(RG, conj(pos(xv(v)) for v in V if v in task.goal))))
    for k in deltas:
        up = normalize(_cost_sum(width, xcp) + _cost_sum(width, xc, -1), k)
        down = normalize(_cost_sum(width, xc) + _cost_sum(width, xcp, -1), -k)
        out.append(("delta", Reification(xdelta(k), conj([pos(xdge(k)), pos(xdle(k))]))))
        out.append(("delta", Reification(xdge(k), up)))
        out.append(("delta", Reification(xdle(k), down)))
    for k in ge:
        out.append(("ge", Reification(xge(k), normalize(_cost_sum(width, xc), k))))
    for k in ge:
        out.append(("gep", Reification(xgep(k), normalize(_cost_sum(width, xcp), k))))
    for v in V:
        out.append(("frame", Reification(xeq(v), conj([pos(xleq(v)), pos(xgeq(v))]))))
        out.append(("frame", Reification(xgeq(v), clause([pos(xv(v)), neg(xvp(v))]))))
        out.append(("frame", Reification(xleq(v), clause([neg(xv(v)), pos(xvp(v))]))))
    for a in task.actions:
        lits = [pos(xdelta(a.cost))]
        lits += [pos(xv(v)) for v in V if v in a.pre]
        lits += [pos(xvp(v)) for v in V if v in a.add]
        lits += [neg(xvp(v)) for v in V if v in a.dele]
        lits += [pos(xeq(v)) for v in V if v not in a.evars]
        lits.append(neg(xgep(B)))
        assert len(lits) == 2 + len(a.pre) + len(V)
        out.append(("action", Reification(xa(a.name), conj(lits), "implies")))
    out.append(("trans", Reification(RT, clause(pos(xa(a.name)) for a in task.actions))))
    return TaskEncoding(B, width, out)


def resolve_placeholders(B, decls):
    """Resolutions mmge_l <=> ge_clip(l).  The primed resolutions
    mmgep_l <=> gep_clip(l) are their mechanical primes."""
    ge = set(decls.ge) | {B}
    out = []
    for l in decls.mm:
        c = clip(l, B)
        if c not in ge:
            raise EncodingError("threshold %d (for mmge %d) not declared" % (c, l))
        out.append(Reification(xmm(l), clause([pos(xge(c))])))
    return out


def resolve_placeholders_primed(B, decls):
    return [prime(r) for r in resolve_placeholders(B, decls)]


def format_encoding(enc):
    from .pb_core import format_constraint
    lines = []
    for n, r in enc.reifs:
        arrow = "=>" if r.direction == "implies" else "<=>"
        lines.append("%s %s %s %s" % (n, r.var, arrow, format_constraint(r.body)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- scopes

def expand_numbered(reifs, start=0):
    """Constraints of the reification list with their symbolic keys; ids start
    at start+1."""
    keys = {}
    cons = []
    for r in reifs:
        exps = expand_reification(r)
        if r.direction == "implies":
            dirs = [IMP]
        elif r.direction == "implied-by":
            dirs = [REV]
        else:
            dirs = [IMP, REV]
        for d, c in zip(dirs, exps):
            cons.append(c)
            keys[R(r.var, d)] = start + len(cons)
    return cons, keys


def scope_reifs(enc, ck, circuit, kind):
    """Ordered reifications of a lemma scope: encoding partitions, then the
    placeholder resolutions and the circuit, then (ind only) their primes."""
    out = list(enc.scope(kind)) + list(ck) + list(circuit)
    if kind == "ind":
        out += [prime(r) for r in ck] + [prime(r) for r in circuit]
    return out


# ---------------------------------------------------------------- cost lemmas

def monotone_claim(j, k, primed=False):
    mm = xmmp if primed else xmm
    return clause([neg(mm(j + k)), pos(mm(j))])


def gen_cost_monotone(j, k, B, primed=False):
    """Derivation (one step) of mmge_{j+k} -> mmge_j, or the primed variant."""
    if k < 0:
        raise ValueError("k must be non-negative")
    mm, gev, bit = (xmmp, xgep, xcp) if primed else (xmm, xge, xc)
    claim = monotone_claim(j, k, primed)
    hi, lo = clip(j + k, B), clip(j, B)
    if hi == lo:
        return [Rup(claim)]
    delta = hi - lo
    width = nbits(B)
    sub = [Rup(clause([pos(gev(hi))])),
           Lin(R(gev(hi), IMP), 1, S(0), hi)]
    moved = [i for i in range(width) if delta >> i & 1]
    for i in moved:
        sub.append(Axiom(neg(bit(i))))
        sub.append(Lin(S(len(sub) - 2), 1, S(len(sub) - 1), 1 << i))
    for i in moved:
        sub.append(Axiom(pos(bit(i))))
        sub.append(Lin(S(len(sub) - 2), 1, S(len(sub) - 1), 1 << i))
    sub.append(Lin(S(len(sub) - 1), 1, R(gev(lo), REV), 1))
    sub.append(Sat(S(len(sub) - 1)))
    sub.append(Rup(PBConstraint((), 1)))
    return [Red(claim, tuple(sub), ("contradiction", S(len(sub) - 1)))]


def step_claim(l, m):
    return clause([neg(xmm(l)), neg(xdelta(m)), pos(xmmp(l + m))])


def gen_cost_step(l, m, B):
    """Derivation (one RED step) of (mmge_l and delta_m) -> mmgep_{l+m}."""
    if m < 0:
        raise ValueError("m must be non-negative")
    lo, hi = clip(l, B), clip(l + m, B)
    width = nbits(B)
    M = (1 << width) - 1
    claim = step_claim(l, m)
    sub = [
        Rup(clause([pos(xge(lo))])),
        Rup(clause([pos(xdge(m))])),
        Lin(R(xge(lo), IMP), 1, S(0), lo),
        Lin(R(xdge(m), IMP), 1, S(1), m + M),
        Lin(S(3), 1, S(2), 1),
        Rup(clause([neg(xgep(hi))])),
        Lin(R(xgep(hi), REV), 1, S(5), M - hi + 1),
        Lin(S(4), 1, S(6), 1),
    ]
    return [Red(claim, tuple(sub), ("contradiction", S(7)))]
