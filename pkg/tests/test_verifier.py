import copy

from certplan.certificate import Certificate
from certplan.heuristic_hmax import HmaxHeuristic
from certplan.pb_core import ProofScript, Reification, Rup, clause, neg, parse_constraint, pos
from certplan.search import astar_plan
from certplan.task_encoding import LazyCostDecls
from certplan.task_model import EXAMPLE_TASK, parse_task
from certplan.verifier import circuit_problems, verify_lower_bound, verify_optimality

TASK = parse_task(EXAMPLE_TASK)


def pipeline():
    return astar_plan(TASK, HmaxHeuristic(TASK))


def test_pipeline_accepts():
    r = pipeline()
    rep = verify_lower_bound(TASK, 3, r.certificate)
    assert rep.accepted and rep.bound == 3 and not rep.diagnostics
    assert verify_optimality(TASK, ["a1", "a2"], r.certificate)


def test_bound_edit_rejects():
    c = copy.deepcopy(pipeline().certificate)
    c.bound = 4
    rep = verify_lower_bound(TASK, 4, c)
    assert not rep and rep.diagnostics


def test_bound_mismatch_rejects():
    c = pipeline().certificate
    assert not verify_lower_bound(TASK, 2, c)
    rep = verify_optimality(TASK, ["a1", "a2"], Certificate(2, c.decls, c.circuit, c.output, c.proofs))
    assert not rep and "mismatch" in rep.diagnostics[0]


def test_invalid_plan_rejects_before_checking():
    rep = verify_optimality(TASK, ["a2"], pipeline().certificate)
    assert not rep and rep.diagnostics[0].startswith("plan invalid")


def _trivial(head="xh_0", body=">= 0"):
    c = Certificate(0, LazyCostDecls.make([0], [1, 2]), [Reification(head, parse_constraint(body))], head, {})
    c.proofs = {"init": ProofScript([Rup(clause([neg("xrI"), pos("xge_1"), pos(head)]))], None),
                "goal": ProofScript([Rup(clause([neg("xrG"), neg(head), pos("xge_0")]))], None),
                "ind": ProofScript([Rup(clause([neg(head), neg("xrT"), pos(head + "_p")]))], None)}
    return c


def _numbered(c, task):
    """Fill in qed ids by running the verifier's own scoping."""
    from certplan.task_encoding import build_encoding, expand_numbered, resolve_placeholders, scope_reifs
    enc = build_encoding(task, c.bound, c.decls)
    ck = resolve_placeholders(c.bound, c.decls)
    for kind, p in c.proofs.items():
        n = len(expand_numbered(scope_reifs(enc, ck, c.circuit, kind))[0])
        p.qed = n + len(p.steps)
    return c


def test_vacuous_zero_bound_certificate():
    c = _numbered(_trivial(), TASK)
    assert verify_lower_bound(TASK, 0, c)


def test_circuit_structure_checks():
    c = _numbered(_trivial(), TASK)
    c.circuit = [Reification("xq_0", parse_constraint(">= 0"))]
    c.output = "xq_0"
    assert not verify_lower_bound(TASK, 0, c)
    c = _trivial(body="1 xvp_p >= 1")
    probs = circuit_problems(TASK, 0, c, 1)
    assert probs and "xvp_p" in probs[0]
    assert not verify_lower_bound(TASK, 0, c)
    c = _numbered(_trivial(body="1 xh_9 >= 1"), TASK)
    assert circuit_problems(TASK, 0, c, 1)
    c = _numbered(_trivial(), TASK)
    c.output = "xh_7"
    assert any("output" in p for p in circuit_problems(TASK, 0, c, 1))


def test_undeclared_delta_rejected():
    c = copy.deepcopy(pipeline().certificate)
    c.decls = LazyCostDecls.make(c.decls.ge, [1], c.decls.mm)
    rep = verify_lower_bound(TASK, 3, c)
    assert not rep and rep.diagnostics[0].startswith("declarations")


def test_missing_proof_block():
    c = copy.deepcopy(pipeline().certificate)
    del c.proofs["ind"]
    rep = verify_lower_bound(TASK, 3, c)
    assert not rep and "ind missing" in rep.diagnostics[0]


def test_encoding_is_rebuilt_from_the_task():
    # the same certificate checked against a cheaper variant of the task must
    # fail: the encoding comes from the task handed to the verifier
    c = pipeline().certificate
    cheaper = parse_task(EXAMPLE_TASK.replace("a2 cost 2", "a2 cost 1"))
    assert not verify_lower_bound(cheaper, 3, c)
    other_goal = parse_task(EXAMPLE_TASK.replace("goal q", "goal p"))
    assert not verify_lower_bound(other_goal, 3, c)


def test_verification_time_is_polynomial():
    # log-log slope of verification time against certificate size (bytes)
    import time

    import numpy as np

    from certplan.certificate import serialize
    from certplan.generators import chain_task
    from certplan.heuristic_pdb import PDBHeuristic
    sizes, times = [], []
    for n in range(4, 11):
        t = chain_task(n)
        r = astar_plan(t, PDBHeuristic(t, list(t.variables[-2:])))
        start = time.perf_counter()
        assert verify_lower_bound(t, r.cost, r.certificate)
        times.append(time.perf_counter() - start)
        sizes.append(len(serialize(r.certificate)))
    slope = np.polyfit(np.log(sizes), np.log(times), 1)[0]
    assert slope <= 2.5
