"""Command-line interface.

Exit codes: 0 success, 1 infeasible, 2 malformed input, 3 enumeration budget
exceeded, 4 structurally invalid instance.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from . import formats, generators, reductions, report, solvers
from ._enum import BUDGET_ENV
from .errors import (
    BudgetExceededError,
    CertselError,
    InfeasibleError,
    ParseError,
    UnknownVertexError,
    ValidationError,
)

log = logging.getLogger("certsel")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_BUDGET, EXIT_INVALID = 0, 1, 2, 3, 4


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else formats.dumps(payload)
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance_or_artifact(path: str):
    doc = formats.loads(_read(path))
    if isinstance(doc, dict) and "artifact" in doc:
        artifact = formats.artifact_from_doc(doc)
        return artifact.instance, artifact
    if isinstance(doc, dict) and "report" in doc:
        return formats.instance_from_doc(doc["instance"]), None
    return formats.instance_from_doc(doc), None


def _ids(text):
    return [] if text is None or text == "" else [s for s in text.split(",") if s]


def cmd_generate(args):
    if args.family == "letters-digits":
        inst = generators.letters_digits(args.n)
    elif args.family == "random":
        params = generators.RandomCsiParams(args.n_in, args.n_out, args.m, formats.parse_ratio(args.p_in),
                                            formats.parse_ratio(args.p_out), args.seed)
        inst = generators.random_csi(params)
    else:
        zoo = generators.gadget_zoo()
        if args.name not in zoo:
            raise ParseError(f"unknown zoo entry {args.name!r}; choose from {sorted(zoo)}")
        item = zoo[args.name]
        if isinstance(item, reductions.ReductionArtifact):
            _emit(args, formats.artifact_to_doc(item))
            return EXIT_OK
        inst = item
    _emit(args, formats.instance_to_doc(inst))
    return EXIT_OK


def cmd_analyze(args):
    inst, _ = _load_instance_or_artifact(args.instance)
    accepted = _ids(args.accept) if args.accept is not None else None
    flags = {"max_certificates": args.max_certificates, "seed": args.seed}
    _emit(args, report.analysis_report(inst, accepted, args.max_certificates, args.seed, flags, args.timestamp))
    return EXIT_OK


def _solve(args, problem):
    inst, artifact = _load_instance_or_artifact(args.instance)
    eps_c = formats.parse_ratio(args.eps_c) if args.eps_c is not None else (artifact.eps_c if artifact else None)
    second_flag = args.eps_s if problem == solvers.DCS else args.q
    second = formats.parse_ratio(second_flag) if second_flag is not None else (
        artifact.eps_second if artifact else None)
    if eps_c is None or second is None:
        raise ParseError("missing constraint flags (--eps-c and --eps-s / --q)")
    if problem == solvers.DCS:
        fn = solvers.solve_dcs_greedy if args.greedy else solvers.solve_dcs_exact
        constraints = {"eps_c": eps_c, "eps_s": second}
    else:
        fn = solvers.solve_dcs2_greedy if args.greedy else solvers.solve_dcs2_exact
        constraints = {"eps_c": eps_c, "q": second}
    if args.greedy:
        sol = fn(inst, eps_c, second, seed=args.seed)
    else:
        sol = fn(inst, eps_c, second, max_certificates=args.max_certificates, workers=args.workers)
    flags = {"mode": "greedy" if args.greedy else "exact", "seed": args.seed,
             "max_certificates": args.max_certificates}
    _emit(args, report.solution_report(inst, sol, constraints, flags, args.timestamp))
    return EXIT_OK


def cmd_reduce(args):
    text = _read(args.source)
    if args.problem == "dks":
        artifact = reductions.reduce_dks(formats.parse_source_graph(text), args.k)
    else:
        artifact = reductions.reduce_mku(formats.parse_set_system(text), args.k)
    _emit(args, formats.artifact_to_doc(artifact))
    return EXIT_OK


def cmd_lift(args):
    artifact = formats.artifact_from_doc(formats.loads(_read(args.artifact)))
    doc = formats.loads(_read(args.solution))
    sol = formats.solution_from_doc(doc.get("solution", doc), artifact.instance)
    if not sol.recheck(artifact.instance):
        raise ValidationError("solution metrics do not match the artifact instance")
    if artifact.kind == reductions.DKS:
        vertices, count = reductions.lift_dks(artifact, sol)
        out = {"problem": "dks", "k": artifact.k, "vertices": list(vertices), "edge_count": count,
               "induced_edges": reductions.induced_edges(artifact.source, vertices)}
    else:
        sets, union = reductions.lift_mku(artifact, sol)
        out = {"problem": "mku", "k": artifact.k, "sets": list(sets), "union_size": union}
    _emit(args, out)
    return EXIT_OK


def cmd_oracle(args):
    text = _read(args.source)
    if args.problem == "dks":
        value = reductions.dks_brute(formats.parse_source_graph(text), args.k)
        out = {"problem": "dks", "k": args.k, "max_induced_edges": value}
    else:
        value = reductions.mku_brute(formats.parse_set_system(text), args.l)
        out = {"problem": "mku", "l": args.l, "min_union_size": value}
    _emit(args, out)
    return EXIT_OK


def cmd_export_dot(args):
    inst, _ = _load_instance_or_artifact(args.instance)
    sol = None
    if args.solution:
        doc = formats.loads(_read(args.solution))
        sol = formats.solution_from_doc(doc.get("solution", doc), inst)
    _emit(args, formats.export_dot(inst, sol))
    return EXIT_OK


def cmd_verify(args):
    problems = report.verify_report(formats.loads(_read(args.report)))
    for p in problems:
        print(f"MISMATCH {p}")
    if not problems:
        print("OK")
    return EXIT_OK if not problems else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="certsel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        if output:
            p.add_argument("-o", "--output", help="write to this file instead of stdout")
        p.add_argument("--timestamp", action="store_true", help="add a timestamp to the provenance block")
        return p

    g = common(sub.add_parser("generate", help="write a generated instance"))
    g.add_argument("family", choices=["letters-digits", "random", "zoo"])
    g.add_argument("--n", type=int, default=4, help="letters-digits size")
    g.add_argument("--n-in", type=int, default=4)
    g.add_argument("--n-out", type=int, default=4)
    g.add_argument("--m", type=int, default=6)
    g.add_argument("--p-in", default="1/2")
    g.add_argument("--p-out", default="1/2")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--name", default="T1", help="zoo entry")
    g.set_defaults(func=cmd_generate)

    a = common(sub.add_parser("analyze", help="metrics and AFC of an instance"))
    a.add_argument("instance")
    a.add_argument("--accept", help="comma-separated accepted certificates to evaluate")
    a.add_argument("--max-certificates", type=int, default=None,
                   help=f"exact enumeration budget (default 24, env {BUDGET_ENV})")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_analyze)

    for name, problem in (("solve-dcs", solvers.DCS), ("solve-dcs2", solvers.DCS2)):
        s = common(sub.add_parser(name, help=f"solve {problem.upper()}"))
        s.add_argument("instance", help="instance or reduction artifact")
        s.add_argument("--eps-c", help="completeness slack p/q (default: from artifact)")
        if problem == solvers.DCS:
            s.add_argument("--eps-s", help="soundness slack p/q (default: from artifact)")
        else:
            s.add_argument("--q", help="precision margin p/q (default: from artifact)")
        mode = s.add_mutually_exclusive_group()
        mode.add_argument("--exact", action="store_true", help="exhaustive search (default)")
        mode.add_argument("--greedy", action="store_true", help="local search")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--max-certificates", type=int, default=None)
        s.set_defaults(func=lambda args, _p=problem: _solve(args, _p))

    r = common(sub.add_parser("reduce", help="build a hardness gadget"))
    r.add_argument("problem", choices=["dks", "mku"])
    r.add_argument("source", help="source graph / set system file")
    r.add_argument("--k", type=int, required=True)
    r.set_defaults(func=cmd_reduce)

    lf = common(sub.add_parser("lift", help="map a solution back to the source problem"))
    lf.add_argument("artifact")
    lf.add_argument("solution", help="solution report")
    lf.set_defaults(func=cmd_lift)

    o = common(sub.add_parser("oracle", help="brute-force source optimum"))
    o.add_argument("problem", choices=["dks", "mku"])
    o.add_argument("source")
    o.add_argument("--k", type=int, default=None)
    o.add_argument("--l", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    d = common(sub.add_parser("export-dot", help="Graphviz export"))
    d.add_argument("instance")
    d.add_argument("--solution", help="solution report to highlight")
    d.set_defaults(func=cmd_export_dot)

    v = sub.add_parser("verify", help="recompute every value in a report")
    v.add_argument("report")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "oracle" and (args.k if args.problem == "dks" else args.l) is None:
        parser.error("oracle dks needs --k, oracle mku needs --l")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", formats.DuplicateEdgeWarning)
            code = args.func(args)
        for w in caught:
            log.warning("%s", w.message)
        return code
    except InfeasibleError as exc:
        print(json.dumps({"status": "infeasible", "message": str(exc)}))
        return EXIT_INFEASIBLE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ParseError, UnknownVertexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CertselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
