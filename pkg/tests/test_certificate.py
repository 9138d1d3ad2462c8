import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from certplan.certificate import CertSyntaxError, Certificate, parse, serialize
from certplan.heuristic_hmax import HmaxHeuristic
from certplan.heuristic_pdb import PDBHeuristic
from certplan.pb_core import ProofScript, Reification, parse_constraint
from certplan.search import astar_plan
from certplan.task_encoding import LazyCostDecls
from certplan.task_model import EXAMPLE_TASK, parse_task
from certplan.verifier import verify_lower_bound

TASK = parse_task(EXAMPLE_TASK)


def example_cert(h=None):
    return astar_plan(TASK, h or HmaxHeuristic(TASK)).certificate


CERTS = [example_cert(), example_cert(PDBHeuristic(TASK, ["q"], "efficient"))]


def test_header_and_roundtrip():
    for c in CERTS:
        text = serialize(c)
        assert text.startswith("pbcert 1\nbound 3\n")
        back = parse(text)
        assert back == c
        assert serialize(back) == text


def test_deterministic_bytes():
    assert serialize(example_cert()) == serialize(example_cert())


def test_line_count():
    c = CERTS[0]
    assert c.line_count() == len(serialize(c).splitlines())


def test_trivial_certificate_text_roundtrip():
    c = Certificate(0, LazyCostDecls.make([0], [1, 2]), [Reification("xh_0", parse_constraint(">= 0"))], "xh_0",
                    {k: ProofScript([], 1) for k in ("init", "goal", "ind")})
    assert parse(serialize(c)) == c


def _replace(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_malformed_inputs_report_lines():
    text = serialize(CERTS[0])
    cases = [
        _replace(text, "pbcert 1", "pbcert 2"),
        _replace(text, "bound 3", "bound x"),
        _replace(text, "bound 3", "bound -1"),
        _replace(text, "declare ge 0 1 2 3", "declare ge 3 1"),
        _replace(text, "circuit\n", "circuitry\n"),
        _replace(text, "  output", "  outptu"),
        "pbcert 1\n",
        "",
    ]
    lin = [ln for ln in text.splitlines() if ln.strip().startswith("lin ")]
    if lin:
        cases.append(_replace(text, lin[0], lin[0] + " 7"))
    rup = [ln for ln in text.splitlines() if ln.strip().startswith("rup ")][0]
    cases.append(_replace(text, rup, rup.replace("rup", "rupx")))
    cases.append(_replace(text, "  qed", "  qed 0\n  qed"))
    for bad in cases:
        with pytest.raises(CertSyntaxError):
            parse(bad)
    with pytest.raises(CertSyntaxError) as e:
        parse(_replace(text, "bound 3", "bound x"))
    assert e.value.line == 2


def test_lin_arity_error_has_line():
    text = serialize(CERTS[0])
    lines = text.splitlines()
    i = [k for k, ln in enumerate(lines) if ln.strip().startswith("lin ")][0]
    lines[i] = lines[i].rsplit(" ", 1)[0]
    with pytest.raises(CertSyntaxError) as e:
        parse("\n".join(lines) + "\n")
    assert e.value.line == i + 1


def test_head_reuse_rejected():
    text = serialize(CERTS[0])
    first = [ln for ln in text.splitlines() if ln.strip().startswith("reif ")][0]
    with pytest.raises(CertSyntaxError, match="reused"):
        parse(_replace(text, first, first + "\n" + first))


def test_duplicate_proof_block():
    text = serialize(CERTS[0])
    block = text[text.index("proof init"):text.index("proof goal")]
    with pytest.raises(CertSyntaxError, match="duplicate"):
        parse(text + block)


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 9))
def test_fuzzed_bytes_never_crash_or_raise_the_bound(seed):
    rng = random.Random(seed)
    c = CERTS[seed % 2]
    data = bytearray(serialize(c).encode())
    for _ in range(rng.randint(1, 4)):
        i = rng.randrange(len(data))
        data[i] = rng.randrange(256)
    try:
        m = parse(data.decode("utf-8", "replace"))
    except CertSyntaxError:
        return
    if m.bound > 3:
        assert not verify_lower_bound(TASK, m.bound, m)


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=200))
def test_parser_total_on_arbitrary_bytes(data):
    try:
        parse(data.decode("utf-8", "replace"))
    except CertSyntaxError:
        pass
