"""Certificate data model with a line-oriented text format."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List

from .pb_core import (Axiom, Div, Lin, ProofScript, Red, Reification, ReificationError, Rup, Sat,
                      SyntaxErr, format_constraint, parse_constraint, parse_lit)
from .task_encoding import LazyCostDecls, num, unnum

VERSION = 1
KINDS = ("init", "goal", "ind")


class CertSyntaxError(Exception):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__("line %s: %s" % (line, msg) if line is not None else msg)


@dataclass
class Certificate:
    bound: int
    decls: LazyCostDecls
    circuit: List[Reification]
    output: str
    proofs: Dict[str, ProofScript] = field(default_factory=dict)
    version: int = VERSION

    def line_count(self):
        return serialize(self).count("\n")


# ---------------------------------------------------------------- writing

def _format_steps(steps, indent, out):
    pad = "  " * indent
    for st in steps:
        if isinstance(st, Axiom):
            out.append("%sa %s" % (pad, st.lit))
        elif isinstance(st, Lin):
            out.append("%slin %d %d %d %d" % (pad, st.c1, st.id1, st.c2, st.id2))
        elif isinstance(st, Div):
            out.append("%sdiv %d %d" % (pad, st.id, st.c))
        elif isinstance(st, Sat):
            out.append("%ssat %d" % (pad, st.id))
        elif isinstance(st, Rup):
            out.append("%srup %s" % (pad, format_constraint(st.claim)))
        elif isinstance(st, Red):
            out.append("%sred %s" % (pad, format_constraint(st.claim)))
            _format_steps(st.steps, indent + 1, out)
            out.append("%s  %s %d" % (pad, st.end[0], st.end[1]))
            out.append("%send" % pad)
        else:
            raise TypeError("unknown step %r" % (st,))


def serialize(c: Certificate) -> str:
    out = ["pbcert %d" % c.version, "bound %d" % c.bound]
    out.append(" ".join(["declare ge"] + [str(k) for k in c.decls.ge]))
    out.append(" ".join(["declare delta"] + [str(k) for k in c.decls.delta]))
    out.append(" ".join(["declare mmge"] + [num(l) for l in c.decls.mm]))
    out.append("circuit")
    for r in c.circuit:
        if r.direction != "iff":
            raise ValueError("circuit reifications must be two-sided")
        out.append("  reif %s : %s" % (r.var, format_constraint(r.body)))
    out.append("  output %s" % c.output)
    for kind in KINDS:
        if kind not in c.proofs:
            continue
        script = c.proofs[kind]
        out.append("proof %s" % kind)
        _format_steps(script.steps, 1, out)
        out.append("  qed %d" % script.qed)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- reading

_INT = re.compile(r"-?[0-9]+\Z")
_VAR = re.compile(r"x[A-Za-z0-9_\-]*\Z")


def _int(tok, lineno, positive=False):
    if not _INT.match(tok):
        raise CertSyntaxError("bad integer %r" % tok, lineno)
    v = int(tok)
    if positive and v < 1:
        raise CertSyntaxError("id must be positive", lineno)
    return v


class _Lines:
    def __init__(self, text):
        self.items = []
        for i, raw in enumerate(text.split("\n"), 1):
            s = raw.split("#", 1)[0].strip()
            if s:
                self.items.append((i, s.split()))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self):
        item = self.peek()
        if item[0] is None:
            last = self.items[-1][0] if self.items else None
            raise CertSyntaxError("unexpected end of file", last)
        self.pos += 1
        return item


def _constraint(toks, lineno):
    try:
        return parse_constraint(" ".join(toks))
    except SyntaxErr as e:
        raise CertSyntaxError(str(e), lineno) from None


def _parse_steps(lines, closers):
    steps = []
    while True:
        lineno, toks = lines.peek()
        if lineno is None:
            raise CertSyntaxError("unexpected end of file", lines.items[-1][0] if lines.items else None)
        op = toks[0]
        if op in closers:
            return steps
        lines.next()
        args = toks[1:]
        if op == "a":
            if len(args) != 1:
                raise CertSyntaxError("'a' takes one literal", lineno)
            try:
                steps.append(Axiom(parse_lit(args[0])))
            except SyntaxErr as e:
                raise CertSyntaxError(str(e), lineno) from None
        elif op == "lin":
            if len(args) != 4:
                raise CertSyntaxError("'lin' takes four arguments", lineno)
            c1, i1, c2, i2 = args
            steps.append(Lin(_int(i1, lineno, True), _int(c1, lineno),
                             _int(i2, lineno, True), _int(c2, lineno)))
        elif op == "div":
            if len(args) != 2:
                raise CertSyntaxError("'div' takes two arguments", lineno)
            steps.append(Div(_int(args[0], lineno, True), _int(args[1], lineno)))
        elif op == "sat":
            if len(args) != 1:
                raise CertSyntaxError("'sat' takes one argument", lineno)
            steps.append(Sat(_int(args[0], lineno, True)))
        elif op == "rup":
            steps.append(Rup(_constraint(args, lineno)))
        elif op == "red":
            claim = _constraint(args, lineno)
            sub = _parse_steps(lines, ("contradiction", "derived"))
            l2, t2 = lines.next()
            if len(t2) != 2:
                raise CertSyntaxError("'%s' takes one id" % t2[0], l2)
            end = (t2[0], _int(t2[1], l2, True))
            l3, t3 = lines.next()
            if t3 != ["end"]:
                raise CertSyntaxError("expected 'end'", l3)
            steps.append(Red(claim, tuple(sub), end))
        else:
            raise CertSyntaxError("unknown step %r" % op, lineno)


def parse(text: str) -> Certificate:
    try:
        return _parse(text)
    except CertSyntaxError:
        raise
    except (ValueError, ReificationError, IndexError) as e:
        raise CertSyntaxError(str(e)) from None


def _parse(text):
    lines = _Lines(text)
    lineno, toks = lines.next()
    if toks != ["pbcert", str(VERSION)]:
        raise CertSyntaxError("expected 'pbcert %d' header" % VERSION, lineno)
    lineno, toks = lines.next()
    if len(toks) != 2 or toks[0] != "bound":
        raise CertSyntaxError("expected 'bound <B>'", lineno)
    bound = _int(toks[1], lineno)
    if bound < 0:
        raise CertSyntaxError("negative bound", lineno)
    decl = {}
    for what in ("ge", "delta", "mmge"):
        lineno, toks = lines.next()
        if toks[:2] != ["declare", what]:
            raise CertSyntaxError("expected 'declare %s'" % what, lineno)
        try:
            vals = [unnum(t) if what == "mmge" else _int(t, lineno) for t in toks[2:]]
        except ValueError as e:
            raise CertSyntaxError(str(e), lineno) from None
        if vals != sorted(set(vals)):
            raise CertSyntaxError("declared values must be ascending and distinct", lineno)
        decl[what] = vals
    decls = LazyCostDecls.make(decl["ge"], decl["delta"], decl["mmge"])
    lineno, toks = lines.next()
    if toks != ["circuit"]:
        raise CertSyntaxError("expected 'circuit'", lineno)
    circuit, heads, output = [], set(), None
    while True:
        lineno, toks = lines.next()
        if toks[0] == "output":
            if len(toks) != 2 or not _VAR.match(toks[1]):
                raise CertSyntaxError("bad output line", lineno)
            output = toks[1]
            break
        if toks[0] != "reif" or len(toks) < 4 or toks[2] != ":" or not _VAR.match(toks[1]):
            raise CertSyntaxError("expected 'reif <var> : <constraint>'", lineno)
        head = toks[1]
        if head in heads:
            raise CertSyntaxError("head %s reused in circuit" % head, lineno)
        heads.add(head)
        try:
            circuit.append(Reification(head, _constraint(toks[3:], lineno)))
        except ReificationError as e:
            raise CertSyntaxError(str(e), lineno) from None
    proofs = {}
    while lines.peek()[0] is not None:
        lineno, toks = lines.next()
        if len(toks) != 2 or toks[0] != "proof" or toks[1] not in KINDS:
            raise CertSyntaxError("expected 'proof init|goal|ind'", lineno)
        if toks[1] in proofs:
            raise CertSyntaxError("duplicate proof block %s" % toks[1], lineno)
        steps = _parse_steps(lines, ("qed",))
        l2, t2 = lines.next()
        if len(t2) != 2:
            raise CertSyntaxError("'qed' takes one id", l2)
        proofs[toks[1]] = ProofScript(steps, _int(t2[1], l2, True))
    return Certificate(bound, decls, circuit, output, proofs)
