"""On-disk formats: instance and report JSON, source files, DOT export.

Every rational is written as ``"p/q"`` in lowest terms (``"4/1"``, never
``"4"``) so documents can be compared and re-verified exactly.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from fractions import Fraction
from typing import Any

from .errors import ParseError, ValidationError
from .model import (
    CsInstance,
    ProverAssignment,
    VerifierAcceptance,
    check_prover,
    check_verifier,
    require_valid,
    validate,
)
from .reductions import DKS, MKU, Gadget, ReductionArtifact, SetSystem, SourceGraph

FORMAT_VERSION = "1"


class DuplicateEdgeWarning(UserWarning):
    pass


def fmt_ratio(value) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_ratio(text) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) into an exact Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        s = str(text).strip()
        if "." in s or "e" in s.lower():
            raise ValueError
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not an exact rational 'p/q': {text!r}") from None


# --- instances --------------------------------------------------------------

def instance_to_doc(instance: CsInstance) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "in_class": list(instance.in_class),
        "out_class": list(instance.out_class),
        "certificates": list(instance.certificates),
        "edges": [list(e) for e in instance.sorted_edges()],
    }
    if instance.metadata:
        doc["metadata"] = dict(instance.metadata)
    return doc


def _str_list(doc, key) -> list[str]:
    value = doc.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"field {key!r} must be a list of id strings")
    return value


def instance_from_doc(doc: Any) -> CsInstance:
    """Build and validate an instance; duplicate edges are collapsed with a warning."""
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}")
    in_class, out_class, certs = (_str_list(doc, k) for k in ("in_class", "out_class", "certificates"))
    raw = doc.get("edges")
    if not isinstance(raw, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(v, str) for v in e) for e in raw):
        raise ParseError("field 'edges' must be a list of [datapoint, certificate] pairs")
    edges = [tuple(e) for e in raw]
    if len(set(edges)) != len(edges):
        warnings.warn(f"collapsed {len(edges) - len(set(edges))} duplicate edge(s)", DuplicateEdgeWarning,
                      stacklevel=2)
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("field 'metadata' must be an object")
    instance = CsInstance.build(in_class, out_class, certs, edges, metadata)
    report = validate(instance)
    if not report.ok:
        raise ValidationError(f"invalid instance:\n{report}", report)
    return instance


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None


def serialize_instance(instance: CsInstance) -> str:
    return dumps(instance_to_doc(instance))


def deserialize_instance(text: str) -> CsInstance:
    return instance_from_doc(loads(text))


def instance_hash(instance: CsInstance) -> str:
    canon = json.dumps(instance_to_doc(instance), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# --- source problems --------------------------------------------------------

def _content_lines(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def parse_source_graph(text: str) -> SourceGraph:
    """``graph [extra vertices...]`` header, then one ``u v`` edge per line."""
    rows = _content_lines(text)
    if not rows or rows[0][0] != "graph":
        raise ParseError("source graph must start with a 'graph' header line")
    edges = []
    for row in rows[1:]:
        if len(row) != 2:
            raise ParseError(f"expected 'u v', got {' '.join(row)!r}")
        edges.append(tuple(row))
    return SourceGraph.from_edges(edges, rows[0][1:])


def format_source_graph(graph: SourceGraph) -> str:
    isolated = sorted(set(graph.vertices) - {v for e in graph.edges for v in e})
    lines = [" ".join(["graph"] + isolated)] + [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def parse_set_system(text: str) -> SetSystem:
    """``sets [extra elements...]`` header, then one set per line."""
    rows = _content_lines(text)
    if not rows or rows[0][0] != "sets":
        raise ParseError("set system must start with a 'sets' header line")
    return SetSystem.from_sets([frozenset(r) for r in rows[1:]], rows[0][1:])


def format_set_system(system: SetSystem) -> str:
    used = set().union(*system.sets) if system.sets else set()
    lines = [" ".join(["sets"] + sorted(set(system.universe) - used))]
    lines += [" ".join(sorted(s)) for s in system.sets]
    return "\n".join(lines) + "\n"


# --- artifacts and solutions ------------------------------------------------

def artifact_to_doc(artifact: ReductionArtifact) -> dict:
    gadgets = []
    for key, g in artifact.gadget_map.items():
        gadgets.append({"source": list(key) if artifact.kind == DKS else key,
                        "phi0": g.phi0, "phi1": g.phi1, "points": list(g.points), "targets": list(g.targets)})
    if artifact.kind == DKS:
        source = {"vertices": list(artifact.source.vertices), "edges": [list(e) for e in artifact.source.edges]}
    else:
        source = {"universe": list(artifact.source.universe), "sets": [sorted(s) for s in artifact.source.sets]}
    second = "eps_s" if artifact.kind == DKS else "q"
    return {
        "format_version": FORMAT_VERSION,
        "artifact": artifact.kind,
        "k": artifact.k,
        "eps_c": fmt_ratio(artifact.eps_c),
        second: fmt_ratio(artifact.eps_second),
        "gadgets": gadgets,
        "vertex_map": dict(artifact.vertex_map),
        "source": source,
        "instance": instance_to_doc(artifact.instance),
    }


def artifact_from_doc(doc: dict) -> ReductionArtifact:
    try:
        kind = doc["artifact"]
        instance = instance_from_doc(doc["instance"])
        if kind == DKS:
            source = SourceGraph.from_edges(doc["source"]["edges"], doc["source"]["vertices"])
            second = parse_ratio(doc["eps_s"])
            keys = [tuple(g["source"]) for g in doc["gadgets"]]
        elif kind == MKU:
            source = SetSystem.from_sets(doc["source"]["sets"], doc["source"]["universe"])
            second = parse_ratio(doc["q"])
            keys = [int(g["source"]) for g in doc["gadgets"]]
        else:
            raise ParseError(f"unknown artifact kind {kind!r}")
        gadgets = {key: Gadget(g["phi0"], g["phi1"], tuple(g["points"]), tuple(g["targets"]))
                   for key, g in zip(keys, doc["gadgets"])}
        return ReductionArtifact(kind, instance, parse_ratio(doc["eps_c"]), second, int(doc["k"]),
                                 gadgets, dict(doc["vertex_map"]), source)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed artifact document: {exc!r}") from None


def solution_to_doc(solution) -> dict:
    return {
        "problem": solution.problem,
        "optimal": solution.optimal,
        "verifier_accepted": sorted(solution.verifier.accepted),
        "prover": dict(solution.prover.assignment),
        "objective": fmt_ratio(solution.objective),
        "completeness": fmt_ratio(solution.achieved_completeness),
        "soundness": fmt_ratio(solution.achieved_soundness),
        "prover_precision": fmt_ratio(solution.achieved_prover_precision),
    }


def solution_from_doc(doc: dict, instance: CsInstance):
    from .solvers import DcsSolution

    try:
        A = VerifierAcceptance(frozenset(doc["verifier_accepted"]))
        M = ProverAssignment(doc["prover"])
        stored = DcsSolution(doc["problem"], A, M, parse_ratio(doc["objective"]),
                             parse_ratio(doc["completeness"]), parse_ratio(doc["soundness"]),
                             parse_ratio(doc["prover_precision"]), bool(doc["optimal"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed solution document: {exc!r}") from None
    check_verifier(instance, stored.verifier)
    check_prover(instance, stored.prover)
    return stored


# --- DOT export -------------------------------------------------------------

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(instance: CsInstance, solution=None) -> str:
    """Graphviz description with one rank per vertex class (D1, C, D-1).

    With a solution, accepted certificates get ``class="accepted"`` and the
    edges the prover uses get ``class="prover"``.
    """
    require_valid(instance)
    accepted = solution.verifier.accepted if solution is not None else frozenset()
    chosen = set(solution.prover.items()) if solution is not None else set()
    lines = ["graph csi {", "  rankdir=LR;"]
    ranks = (("in_class", instance.in_class, "box", "lightblue"),
             ("certificates", instance.certificates, "ellipse", "white"),
             ("out_class", instance.out_class, "box", "mistyrose"))
    for name, ids, shape, color in ranks:
        lines.append(f"  subgraph {name} {{")
        lines.append("    rank=same;")
        for v in ids:
            attrs = f'shape={shape} style=filled fillcolor={color}'
            if v in accepted:
                attrs = f'shape={shape} style="filled,bold" fillcolor=palegreen class="accepted"'
            lines.append(f"    {_q(v)} [{attrs}];")
        lines.append("  }")
    for x, c in instance.sorted_edges():
        style = ' [class="prover" color=blue penwidth=2]' if (x, c) in chosen else ""
        lines.append(f"  {_q(x)} -- {_q(c)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
