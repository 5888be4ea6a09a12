"""Tripartite certificate-selection instances, provers and verifiers.

An instance is a bipartite-looking graph with three vertex classes: in-class
datapoints, certificates, and out-class datapoints.  Edges always join a
datapoint to a certificate and mean "this certificate can be produced from
this datapoint".  Ids are opaque strings; every ordered view of a vertex set is
sorted lexicographically so tie-breaking is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import NoProverError, UnknownVertexError, ValidationError

IN_CLASS = "in_class"
OUT_CLASS = "out_class"
CERTIFICATE = "certificate"


@dataclass(frozen=True)
class CsInstance:
    """Immutable certificate-selection instance.

    ``edges`` holds ``(datapoint, certificate)`` pairs.  The constructor only
    normalises containers; structural problems are reported by :func:`validate`
    so that broken instances can still be inspected.
    """

    in_class: tuple[str, ...]
    out_class: tuple[str, ...]
    certificates: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    metadata: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "in_class", tuple(sorted(self.in_class)))
        object.__setattr__(self, "out_class", tuple(sorted(self.out_class)))
        object.__setattr__(self, "certificates", tuple(sorted(self.certificates)))
        object.__setattr__(self, "edges", frozenset((str(u), str(v)) for u, v in self.edges))
        object.__setattr__(self, "metadata", dict(self.metadata or {}))

    @classmethod
    def build(cls, in_class, out_class, certificates, edges, metadata=None) -> "CsInstance":
        return cls(tuple(in_class), tuple(out_class), tuple(certificates), frozenset(map(tuple, edges)),
                   metadata or {})

    @cached_property
    def kind(self) -> dict[str, str]:
        """Vertex id -> class label.  On overlapping ids the first class wins."""
        kinds: dict[str, str] = {}
        for label, ids in ((IN_CLASS, self.in_class), (OUT_CLASS, self.out_class),
                           (CERTIFICATE, self.certificates)):
            for v in ids:
                kinds.setdefault(v, label)
        return kinds

    @cached_property
    def adjacency(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.kind}
        for u, v in self.edges:
            if u in adj and v in adj:
                adj[u].add(v)
                adj[v].add(u)
        return {v: frozenset(ns) for v, ns in adj.items()}

    @cached_property
    def in_set(self) -> frozenset[str]:
        return frozenset(self.in_class)

    @cached_property
    def out_set(self) -> frozenset[str]:
        return frozenset(self.out_class)

    @cached_property
    def certificate_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.certificates)}

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)

    def __repr__(self):
        return (f"CsInstance(|D1|={len(self.in_class)}, |D-1|={len(self.out_class)}, "
                f"|C|={len(self.certificates)}, |E|={len(self.edges)})")


@dataclass(frozen=True)
class VerifierAcceptance:
    """The set of accepted certificates; everything else is rejected."""

    accepted: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "accepted", frozenset(self.accepted))

    def __contains__(self, cert):
        return cert in self.accepted

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.accepted))

    def __len__(self):
        return len(self.accepted)


@dataclass(frozen=True)
class ProverAssignment:
    """Total map from in-class datapoints to adjacent certificates."""

    assignment: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(sorted(dict(self.assignment).items())))

    def __getitem__(self, x):
        return self.assignment[x]

    def items(self):
        return self.assignment.items()

    def __eq__(self, other):
        if isinstance(other, ProverAssignment):
            return self.assignment == other.assignment
        if isinstance(other, Mapping):
            return self.assignment == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.assignment.items()))


def as_verifier(A) -> VerifierAcceptance:
    if isinstance(A, VerifierAcceptance):
        return A
    if isinstance(A, str):
        raise TypeError("pass an iterable of certificate ids, not a single string")
    return VerifierAcceptance(frozenset(A))


def as_prover(M) -> ProverAssignment:
    return M if isinstance(M, ProverAssignment) else ProverAssignment(dict(M))


# --- validation -------------------------------------------------------------

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    ids: tuple[str, ...] = ()
    severity: str = ERROR

    def __str__(self):
        suffix = f" [{', '.join(self.ids)}]" if self.ids else ""
        return f"{self.severity}: {self.message}{suffix}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == ERROR]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == WARNING]

    @property
    def ok(self) -> bool:
        """True when there are no errors (warnings allowed)."""
        return not self.errors

    def __bool__(self):
        return bool(self.violations)

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def __str__(self):
        return "\n".join(map(str, self.violations)) or "valid"


def validate(instance: CsInstance) -> ValidationReport:
    """Collect every invariant violation of ``instance``.

    Errors make the instance unusable; the only warning is an in-class
    datapoint without neighbours (legal, but no prover can exist).
    """
    out: list[Violation] = []
    groups = {IN_CLASS: instance.in_class, OUT_CLASS: instance.out_class,
              CERTIFICATE: instance.certificates}
    for label, ids in groups.items():
        dup = sorted({v for v in ids if ids.count(v) > 1})
        if dup:
            out.append(Violation("duplicate_id", f"duplicate ids in {label}", tuple(dup)))

    seen: dict[str, str] = {}
    overlap = set()
    for label, ids in groups.items():
        for v in ids:
            if v in seen and seen[v] != label:
                overlap.add(v)
            seen.setdefault(v, label)
    if overlap:
        out.append(Violation("overlapping_sets", "vertex sets are not disjoint", tuple(sorted(overlap))))

    if not instance.in_class:
        out.append(Violation("empty_in_class", "empty in-class set"))
    if not instance.out_class:
        out.append(Violation("empty_out_class", "empty out-class set"))
    if not instance.certificates:
        out.append(Violation("empty_certificates", "empty certificate set"))

    kind = instance.kind
    for u, v in instance.sorted_edges():
        ku, kv = kind.get(u), kind.get(v)
        missing = tuple(w for w, k in ((u, ku), (v, kv)) if k is None)
        if missing:
            out.append(Violation("unknown_endpoint", f"edge ({u}, {v}) references unknown id", missing))
        elif ku == CERTIFICATE and kv == CERTIFICATE:
            out.append(Violation("cert_cert_edge", "edge joins two certificates", (u, v)))
        elif ku != CERTIFICATE and kv != CERTIFICATE:
            out.append(Violation("datapoint_datapoint_edge", "edge joins two datapoints", (u, v)))
        elif ku == CERTIFICATE:
            out.append(Violation("reversed_edge", "edge must be (datapoint, certificate)", (u, v)))

    if not out:
        isolated = tuple(x for x in instance.in_class if not instance.adjacency[x])
        if isolated:
            out.append(Violation("isolated_in_class",
                                 "in-class datapoint has no certificate; no prover exists",
                                 isolated, WARNING))
    return ValidationReport(tuple(out))


def require_valid(instance: CsInstance) -> CsInstance:
    report = validate(instance)
    if not report.ok:
        raise ValidationError(f"invalid instance:\n{report}", report)
    return instance


# --- graph queries ----------------------------------------------------------

def neighbors(instance: CsInstance, vertex: str) -> frozenset[str]:
    """N(v): certificates of a datapoint, or datapoints of a certificate."""
    try:
        return instance.adjacency[vertex]
    except KeyError:
        raise UnknownVertexError(f"unknown vertex id {vertex!r}") from None


def set_neighbors(instance: CsInstance, certs: Iterable[str]) -> frozenset[str]:
    """N(F), the union of the neighbourhoods of the certificates in ``certs``."""
    result: set[str] = set()
    for c in certs:
        if instance.kind.get(c) != CERTIFICATE:
            raise UnknownVertexError(f"{c!r} is not a certificate of this instance")
        result |= instance.adjacency[c]
    return frozenset(result)


def max_features_per_datapoint(instance: CsInstance) -> int:
    """Largest number of certificates adjacent to any datapoint (either class)."""
    points = instance.in_class + instance.out_class
    return max((len(instance.adjacency[x]) for x in points), default=0)


def check_verifier(instance: CsInstance, A) -> VerifierAcceptance:
    A = as_verifier(A)
    bad = sorted(c for c in A.accepted if instance.kind.get(c) != CERTIFICATE)
    if bad:
        raise ValidationError(f"accepted set contains non-certificates: {bad}")
    return A


def check_prover(instance: CsInstance, M) -> ProverAssignment:
    M = as_prover(M)
    missing = [x for x in instance.in_class if x not in M.assignment]
    if missing:
        raise ValidationError(f"prover is not total; unassigned: {missing}")
    extra = [x for x in M.assignment if x not in instance.in_set]
    if extra:
        raise ValidationError(f"prover assigns non in-class ids: {extra}")
    bad = [x for x, c in M.items() if c not in instance.adjacency[x]]
    if bad:
        raise ValidationError(f"prover uses non-adjacent certificates for: {bad}")
    return M


def require_prover_exists(instance: CsInstance) -> None:
    isolated = [x for x in instance.in_class if not instance.adjacency[x]]
    if isolated:
        raise NoProverError(f"no prover exists: in-class datapoints without certificates {isolated}")
