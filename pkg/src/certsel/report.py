"""Self-contained JSON reports and their re-verification."""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import BudgetExceededError, CertselError, UndefinedMetricError
from .formats import (
    FORMAT_VERSION,
    fmt_ratio,
    instance_from_doc,
    instance_hash,
    instance_to_doc,
    parse_ratio,
    solution_from_doc,
    solution_to_doc,
)
from .metrics import (
    AfcWitness,
    afc_exact,
    afc_greedy,
    afc_of_set,
    best_completeness,
    certificate_precision,
    prover_precision,
    soundness,
    verifier_precision,
    verifier_precision_formula,
)
from .model import CsInstance, check_verifier, max_features_per_datapoint


def _version() -> str:
    from . import __version__
    return __version__


def provenance(instance: CsInstance, flags: dict, timestamp: bool = False) -> dict:
    prov = {"tool": "certsel", "tool_version": _version(), "input_sha256": instance_hash(instance),
            "flags": flags}
    if timestamp:
        prov["timestamp"] = datetime.now(timezone.utc).isoformat()
    return prov


def _maybe(fn, *args):
    try:
        return fmt_ratio(fn(*args))
    except UndefinedMetricError:
        return None


def afc_to_doc(w: AfcWitness) -> dict:
    return {
        "value": fmt_ratio(w.value),
        "exact": w.exact,
        "witness_set": sorted(w.witness_set),
        "terms": {y: {"certificate": c, "kappa": fmt_ratio(k)} for y, (c, k) in w.per_datapoint_terms.items()},
    }


def analysis_metrics(instance: CsInstance, accepted=None, max_certificates=None, seed: int = 0) -> dict:
    metrics = {
        "sizes": {"in_class": len(instance.in_class), "out_class": len(instance.out_class),
                  "certificates": len(instance.certificates), "edges": len(instance.edges)},
        "max_features_per_datapoint": max_features_per_datapoint(instance),
        "certificate_precision": {c: _maybe(certificate_precision, instance, c) for c in instance.certificates},
    }
    try:
        try:
            w = afc_exact(instance, max_certificates)
        except BudgetExceededError:
            w = afc_greedy(instance, seed)
        metrics["afc"] = afc_to_doc(w)
    except UndefinedMetricError as exc:
        metrics["afc"] = None
        metrics["afc_error"] = str(exc)
    if accepted is not None:
        A = check_verifier(instance, accepted)
        best, M = best_completeness(instance, A)
        metrics["verifier"] = {
            "accepted": sorted(A.accepted),
            "best_completeness": fmt_ratio(best),
            "soundness": fmt_ratio(soundness(instance, A)),
            "verifier_precision": _maybe(verifier_precision, instance, A),
            "verifier_precision_formula": _maybe(verifier_precision_formula, instance, A),
            "best_prover": dict(M.assignment),
            "best_prover_precision": fmt_ratio(prover_precision(instance, M)),
        }
    return metrics


def analysis_report(instance: CsInstance, accepted=None, max_certificates=None, seed: int = 0,
                    flags: dict | None = None, timestamp: bool = False) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "report": "analysis",
        "instance": instance_to_doc(instance),
        "metrics": analysis_metrics(instance, accepted, max_certificates, seed),
        "provenance": provenance(instance, flags or {}, timestamp),
    }


def solution_report(instance: CsInstance, solution, constraints: dict, flags: dict | None = None,
                    timestamp: bool = False) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "report": "solution",
        "instance": instance_to_doc(instance),
        "constraints": {k: fmt_ratio(v) for k, v in constraints.items()},
        "solution": solution_to_doc(solution),
        "provenance": provenance(instance, flags or {}, timestamp),
    }


def verify_report(report: dict) -> list[str]:
    """Recompute everything a report claims; returns the list of mismatches."""
    problems = []
    try:
        instance = instance_from_doc(report["instance"])
    except (KeyError, CertselError) as exc:
        return [f"embedded instance unusable: {exc}"]
    if report.get("provenance", {}).get("input_sha256") != instance_hash(instance):
        problems.append("input hash does not match the embedded instance")
    kind = report.get("report")
    if kind == "analysis":
        m = report.get("metrics", {})
        accepted = m.get("verifier", {}).get("accepted") if m.get("verifier") else None
        flags = report.get("provenance", {}).get("flags", {})
        fresh = analysis_metrics(instance, accepted, flags.get("max_certificates"), flags.get("seed", 0))
        for key in sorted(set(m) | set(fresh)):
            if m.get(key) != fresh.get(key):
                problems.append(f"metric {key!r} differs: reported {m.get(key)!r}, recomputed {fresh.get(key)!r}")
        afc = m.get("afc")
        if afc:
            w = afc_of_set(instance, afc["witness_set"])
            if fmt_ratio(w.value) != afc["value"]:
                problems.append("AFC witness does not reproduce the reported value")
    elif kind == "solution":
        try:
            stored = solution_from_doc(report["solution"], instance)
            if not stored.recheck(instance):
                problems.append("solution metrics do not match a recomputation")
            cons = {k: parse_ratio(v) for k, v in report.get("constraints", {}).items()}
            if not stored.satisfies(cons.get("eps_c", 0), cons.get("eps_s"), cons.get("q")):
                problems.append("solution violates its constraints")
        except CertselError as exc:
            problems.append(f"solution invalid: {exc}")
    else:
        problems.append(f"unknown report kind {kind!r}")
    return problems

