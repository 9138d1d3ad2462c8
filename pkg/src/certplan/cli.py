"""Command-line frontend: plan, verify, encode, oracle and selftest."""
from __future__ import annotations

import argparse
import random
import sys
import time

from .certificate import CertSyntaxError, parse, serialize
from .heuristic_hmax import HmaxHeuristic
from .heuristic_pdb import VARIANTS, PatternError, PDBHeuristic
from .search import BlindHeuristic, SearchError, astar_plan
from .task_encoding import EncodingError, build_encoding, decls_for, format_encoding
from .task_model import PlanError, SearchLimit, TaskError, format_plan, optimal_cost_oracle, parse_plan, parse_task
from .verifier import verify_lower_bound, verify_optimality

EXIT_OK, EXIT_REJECT, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8", errors="replace") as f:
            return f.read()
    except OSError as e:
        raise UsageError("cannot read %s: %s" % (path, e.strerror)) from None


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise UsageError("cannot write %s: %s" % (path, e.strerror)) from None


def make_heuristic(task, name, pattern=None, pdb_cert=None):
    if name != "pdb" and (pattern is not None or pdb_cert is not None):
        raise UsageError("--pattern and --pdb-cert require --heuristic pdb")
    if name == "hmax":
        return HmaxHeuristic(task)
    if name == "blind":
        return BlindHeuristic()
    names = [p for p in (pattern or "").split(",") if p]
    return PDBHeuristic(task, names, pdb_cert or "naive")


def cmd_plan(args):
    task = parse_task(_read(args.task))
    h = make_heuristic(task, args.heuristic, args.pattern, args.pdb_cert)
    res = astar_plan(task, h, certify=True, limit=args.limit)
    if not res.solvable:
        print("unsolvable (no certificate emitted)")
        return EXIT_REJECT
    print("cost %d" % res.cost)
    print("expansions %d, certificate lines %d" % (res.stats.expansions, res.certificate.line_count()))
    if args.output:
        _write(args.output, format_plan(res.plan))
    else:
        sys.stdout.write(format_plan(res.plan))
    if args.cert:
        _write(args.cert, serialize(res.certificate))
    return EXIT_OK


def cmd_verify(args):
    task = parse_task(_read(args.task))
    plan = parse_plan(_read(args.plan))
    cert = parse(_read(args.cert))
    rep = verify_optimality(task, plan, cert)
    for d in rep.diagnostics:
        print(d, file=sys.stderr)
    print("accepted: plan is optimal with cost %d" % rep.bound if rep.accepted else "rejected")
    return EXIT_OK if rep.accepted else EXIT_REJECT


def cmd_encode(args):
    task = parse_task(_read(args.task))
    if args.bound < 0:
        raise UsageError("bound must be non-negative")
    enc = build_encoding(task, args.bound, decls_for(task, args.bound, ()))
    sys.stdout.write(format_encoding(enc))
    return EXIT_OK


def cmd_oracle(args):
    task = parse_task(_read(args.task))
    c = optimal_cost_oracle(task, limit=args.limit)
    print("unsolvable" if c is None else c)
    return EXIT_OK


def selftest(seed, count, out=print):
    """Random sweep: every heuristic must find the oracle cost and produce a
    certificate that verifies.  Returns the number of failures."""
    from .generators import random_pattern, random_task
    rng = random.Random(seed)
    failures = 0
    start = time.time()
    for i in range(count):
        task = random_task(rng)
        opt = optimal_cost_oracle(task)
        pattern = random_pattern(rng, task)
        for h in (HmaxHeuristic(task), PDBHeuristic(task, pattern, "naive"), PDBHeuristic(task, pattern, "efficient")):
            label = h.name if h.name == "hmax" else "pdb-%s%s" % (h.variant, pattern)
            res = astar_plan(task, h)
            if (opt is None) != (not res.solvable) or (opt is not None and res.cost != opt):
                failures += 1
                out("task %d %s: cost %s, oracle %s" % (i, label, res.cost, opt))
                continue
            if res.solvable:
                rep = verify_lower_bound(task, res.cost, res.certificate)
                if not rep:
                    failures += 1
                    out("task %d %s: certificate rejected: %s" % (i, label, "; ".join(rep.diagnostics)))
    out("selftest: %d tasks, %d failures, %.1fs" % (count, failures, time.time() - start))
    return failures


def cmd_selftest(args):
    return EXIT_OK if selftest(args.seed, args.count) == 0 else EXIT_REJECT


def build_parser():
    p = argparse.ArgumentParser(prog="certplan", description="Optimal planning with lower-bound certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("plan", help="find an optimal plan and write its certificate")
    q.add_argument("task")
    q.add_argument("--heuristic", choices=("hmax", "pdb", "blind"), default="hmax")
    q.add_argument("--pattern", help="comma-separated PDB pattern variables")
    q.add_argument("--pdb-cert", choices=VARIANTS, help="PDB certificate variant (default naive)")
    q.add_argument("-o", "--output", help="plan output file (default stdout)")
    q.add_argument("-c", "--cert", help="certificate output file")
    q.add_argument("--limit", type=int, default=1 << 20, help="expansion limit")
    q.set_defaults(func=cmd_plan)

    q = sub.add_parser("verify", help="check that a plan is optimal using a certificate")
    q.add_argument("task")
    q.add_argument("plan")
    q.add_argument("cert")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("encode", help="print the PB encoding of a task for a bound")
    q.add_argument("task")
    q.add_argument("--bound", type=int, required=True)
    q.set_defaults(func=cmd_encode)

    q = sub.add_parser("oracle", help="print the optimal plan cost by explicit search")
    q.add_argument("task")
    q.add_argument("--limit", type=int, default=1 << 20)
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("selftest", help="randomized end-to-end sweep")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int, default=50)
    q.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, TaskError, PlanError, CertSyntaxError, PatternError, EncodingError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INPUT
    except (SearchLimit, SearchError) as e:
        print("search aborted: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
