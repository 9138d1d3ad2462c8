"""Independent certificate checker.

The task encoding and the cost-threshold resolutions are rebuilt from the
task, the bound and the declarations; only the circuit and the proofs are
taken from the certificate."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from .certificate import KINDS, Certificate
from .builder import goal_constraint
from .pb_core import check_script
from .task_encoding import (CIRCUIT_PREFIXES, EncodingError, build_encoding, expand_numbered,
                            resolve_placeholders, scope_reifs, xc, xge, xmm, xv)
from .task_model import PlanError, validate_plan


@dataclass
class VerdictReport:
    accepted: bool
    bound: int = None
    diagnostics: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.accepted


def circuit_problems(task, B, cert, width):
    """Structural problems of the circuit: namespace, freshness, inputs."""
    problems = []
    inputs = {xv(v) for v in task.variables} | {xc(i) for i in range(width)}
    inputs |= {xge(k) for k in set(cert.decls.ge) | {B}}
    inputs |= {xmm(l) for l in cert.decls.mm}
    defined = set()
    for i, r in enumerate(cert.circuit):
        if not r.var.startswith(CIRCUIT_PREFIXES) or r.var.endswith("_p"):
            problems.append("circuit reif %d: head %s outside the xh_/xs_ namespace or ends in _p" % (i, r.var))
        if r.var in defined:
            problems.append("circuit reif %d: head %s defined twice" % (i, r.var))
        for v in r.body.vars():
            if v not in inputs and v not in defined:
                problems.append("circuit reif %d: body mentions %s, which is neither an input nor an earlier head"
                                % (i, v))
        defined.add(r.var)
    if cert.output not in defined:
        problems.append("output %s is not a circuit head" % cert.output)
    return problems


def verify_lower_bound(task, B, cert: Certificate) -> VerdictReport:
    rep = VerdictReport(False, B)
    if cert.bound != B:
        rep.diagnostics.append("certificate bound %d differs from %d" % (cert.bound, B))
        return rep
    try:
        enc = build_encoding(task, B, cert.decls)
        ck = resolve_placeholders(B, cert.decls)
    except EncodingError as e:
        rep.diagnostics.append("declarations: %s" % e)
        return rep
    problems = circuit_problems(task, B, cert, enc.width)
    if problems:
        rep.diagnostics += problems
        return rep
    ok = True
    for kind in KINDS:
        script = cert.proofs.get(kind)
        if script is None:
            rep.diagnostics.append("proof %s missing" % kind)
            ok = False
            continue
        cons, _ = expand_numbered(scope_reifs(enc, ck, cert.circuit, kind))
        goal = goal_constraint(kind, cert.output, B)
        r = check_script(cons, script, goal)
        if not r:
            rep.diagnostics.append("proof %s: step %s (%s): %s" % (kind, r.index, r.rule, r.reason))
            ok = False
    rep.accepted = ok
    return rep


def verify_optimality(task, plan, cert: Certificate) -> VerdictReport:
    try:
        cost = validate_plan(task, plan)
    except PlanError as e:
        return VerdictReport(False, None, ["plan invalid: %s" % e])
    if cert.bound != cost:
        return VerdictReport(False, cost, ["bound mismatch: plan costs %d, certificate bound is %d"
                                           % (cost, cert.bound)])
    return verify_lower_bound(task, cost, cert)
