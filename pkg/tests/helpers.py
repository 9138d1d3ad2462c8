"""Random PB objects shared by the property tests and the acceptance suite."""
from __future__ import annotations

from hypothesis import strategies as st

from certplan.pb_core import Lit, normalize

VARS = ["x%d" % i for i in range(10)]


def random_constraint(rng, nvars=6, max_terms=4, max_coef=4):
    names = VARS[:nvars]
    k = rng.randint(0, max_terms)
    terms = [(rng.randint(-max_coef, max_coef), Lit(rng.choice(names), rng.random() < 0.5)) for _ in range(k)]
    return normalize(terms, rng.randint(-3, 6))


def random_db(rng, size, nvars=6):
    return [random_constraint(rng, nvars) for _ in range(size)]


def lits(nvars=6):
    return st.builds(Lit, st.sampled_from(VARS[:nvars]), st.booleans())


def constraints(nvars=6, max_terms=4):
    terms = st.lists(st.tuples(st.integers(-4, 4), lits(nvars)), max_size=max_terms)
    return st.builds(normalize, terms, st.integers(-3, 6))


def certify_alone(task, B, heuristic, states, tamper=None):
    """Run heuristic.certify outside a search and check every block in its
    scope.  tamper(cb) may edit the builder before checking.  Returns
    (info, builder, claims per block, failure reasons)."""
    from certplan.builder import CertBuilder
    from certplan.derivation import resolve_steps
    from certplan.pb_core import ProofScript, check_script
    from certplan.task_encoding import (build_encoding, decls_for, expand_numbered, resolve_placeholders,
                                        scope_reifs)
    cb = CertBuilder(task, B)
    info = heuristic.certify(cb, B, list(states))
    if tamper is not None:
        tamper(cb)
    decls = decls_for(task, B, cb.touched_vars())
    enc = build_encoding(task, B, decls)
    ck = resolve_placeholders(B, decls)
    claims, failures = {}, []
    for kind, blocks in cb.blocks.items():
        cons, keys = expand_numbered(scope_reifs(enc, ck, cb.circuit, kind))
        steps = []
        for d in blocks:
            steps += resolve_steps(d, keys, len(cons) + len(steps))
        claims[kind] = {d[-1].claim for d in blocks}
        if steps:
            r = check_script(cons, ProofScript(steps, len(cons) + len(steps)), steps[-1].claim)
            if not r:
                failures.append("%s: step %s: %s" % (kind, r.index, r.reason))
    return info, cb, claims, failures
