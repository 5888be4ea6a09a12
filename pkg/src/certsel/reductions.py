"""Hardness gadgets: Densest-k-Subgraph -> DCS and Min-k-Union -> DCS2.

Both constructions map every source vertex/element to an out-class datapoint
and every source edge/set to a pair of certificates: ``phi0`` reaches only the
gadget's own in-class datapoints (precision 1) and ``phi1`` additionally
reaches the out-class datapoints of the edge/set (precision 1/2).  Brute-force
oracles for the source problems are included so round trips can be checked.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BudgetExceededError, ValidationError
from .model import CsInstance, require_valid
from .solvers import DcsSolution

DKS = "dks"
MKU = "mku"
ORACLE_LIMIT = 20


@dataclass(frozen=True)
class SourceGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        vertices = tuple(sorted({str(v) for v in self.vertices}))
        edges = set()
        for u, v in self.edges:
            u, v = str(u), str(v)
            if u == v:
                raise ValidationError(f"self-loop on {u!r}")
            if u not in vertices or v not in vertices:
                raise ValidationError(f"edge ({u}, {v}) has an unknown endpoint")
            edges.add((min(u, v), max(u, v)))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence], vertices: Iterable = ()) -> "SourceGraph":
        edges = [tuple(e) for e in edges]
        vs = set(map(str, vertices)) | {str(v) for e in edges for v in e}
        return cls(tuple(vs), tuple(edges))


@dataclass(frozen=True)
class SetSystem:
    universe: tuple[str, ...]
    sets: tuple[frozenset[str], ...]

    def __post_init__(self):
        universe = tuple(sorted({str(u) for u in self.universe}))
        sets = tuple(frozenset(map(str, s)) for s in self.sets)
        for i, s in enumerate(sets):
            if not s <= set(universe):
                raise ValidationError(f"set {i} is not contained in the universe")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "sets", sets)

    @property
    def uniformity(self) -> int:
        sizes = {len(s) for s in self.sets}
        if len(sizes) != 1 or 0 in sizes:
            raise ValidationError(f"set system is not r-uniform with r >= 1 (sizes {sorted(sizes)})")
        return sizes.pop()

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable], universe: Iterable = ()) -> "SetSystem":
        sets = [frozenset(map(str, s)) for s in sets]
        u = set(map(str, universe)).union(*sets) if sets else set(map(str, universe))
        return cls(tuple(u), tuple(sets))


@dataclass(frozen=True)
class Gadget:
    phi0: str
    phi1: str
    points: tuple[str, ...]
    targets: tuple[str, ...]  # out-class ids reached by phi1


@dataclass(frozen=True)
class ReductionArtifact:
    """Reduced instance plus the bookkeeping needed to lift solutions back.

    ``gadget_map`` is keyed by the source edge ``(u, v)`` (DkS) or set index
    (MkU); ``vertex_map`` maps source vertices/elements to out-class ids.
    ``eps_second`` is eps_s for DkS and q for MkU.
    """

    kind: str
    instance: CsInstance
    eps_c: Fraction
    eps_second: Fraction
    k: int
    gadget_map: Mapping = field(compare=False)
    vertex_map: Mapping[str, str] = field(compare=False)
    source: object = field(compare=False, default=None)

    @property
    def eps_s(self) -> Fraction:
        if self.kind != DKS:
            raise AttributeError("eps_s only exists for DkS artifacts; use q")
        return self.eps_second

    @property
    def q(self) -> Fraction:
        if self.kind != MKU:
            raise AttributeError("q only exists for MkU artifacts; use eps_s")
        return self.eps_second

    def phi0_set(self) -> frozenset[str]:
        return frozenset(g.phi0 for g in self.gadget_map.values())

    def target_sets(self) -> int:
        """Number of phi1 gadgets the prover must use to satisfy the MkU precision ceiling."""
        return math.ceil(2 * self.eps_second * len(self.gadget_map))


def _unique(ids: list[str]) -> None:
    if len(set(ids)) != len(ids):
        seen, dup = set(), set()
        for i in ids:
            (dup if i in seen else seen).add(i)
        raise ValidationError(f"gadget id collision: {sorted(dup)}")


def reduce_dks(source: SourceGraph, k: int) -> ReductionArtifact:
    """Densest-k-Subgraph instance -> DCS instance with eps_c = 1/(2|E|+1), eps_s = k/|V|."""
    n, m = len(source.vertices), len(source.edges)
    if m < 1:
        raise ValidationError("source graph needs at least one edge")
    if not 1 <= k <= n:
        raise ValidationError(f"k must lie in [1, {n}], got {k}")
    vertex_map = {v: f"y:{v}" for v in source.vertices}
    gadgets = {}
    edges = []
    for u, v in source.edges:
        tag = f"{u}-{v}"
        g = Gadget(f"phi0:{tag}", f"phi1:{tag}", (f"x:{tag}", f"x':{tag}"), (vertex_map[u], vertex_map[v]))
        gadgets[(u, v)] = g
        for x in g.points:
            edges += [(x, g.phi0), (x, g.phi1)]
        edges += [(y, g.phi1) for y in g.targets]
    in_class = [x for g in gadgets.values() for x in g.points]
    certs = [c for g in gadgets.values() for c in (g.phi0, g.phi1)]
    _unique(in_class + certs + list(vertex_map.values()))
    inst = CsInstance.build(in_class, vertex_map.values(), certs, edges,
                            {"generator": "reduce_dks", "k": k})
    require_valid(inst)
    return ReductionArtifact(DKS, inst, Fraction(1, 2 * m + 1), Fraction(k, n), k,
                             gadgets, vertex_map, source)


def reduce_mku(source: SetSystem, k: int) -> ReductionArtifact:
    """r-uniform Min-k-Union instance -> DCS2 instance with eps_c = 1/(r|S|+1), q = k/|S|."""
    r = source.uniformity
    s = len(source.sets)
    if not 1 <= k <= s:
        raise ValidationError(f"k must lie in [1, {s}], got {k}")
    width = len(str(s - 1))
    pw = len(str(r))
    vertex_map = {e: f"y:{e}" for e in source.universe}
    gadgets = {}
    edges = []
    for i, members in enumerate(source.sets):
        tag = f"S{i:0{width}d}"
        g = Gadget(f"phi0:{tag}", f"phi1:{tag}", tuple(f"x:{tag}.{j:0{pw}d}" for j in range(r)),
                   tuple(vertex_map[e] for e in sorted(members)))
        gadgets[i] = g
        for x in g.points:
            edges += [(x, g.phi0), (x, g.phi1)]
        edges += [(y, g.phi1) for y in g.targets]
    in_class = [x for g in gadgets.values() for x in g.points]
    certs = [c for g in gadgets.values() for c in (g.phi0, g.phi1)]
    _unique(in_class + certs + list(vertex_map.values()))
    inst = CsInstance.build(in_class, vertex_map.values(), certs, edges,
                            {"generator": "reduce_mku", "k": k})
    require_valid(inst)
    return ReductionArtifact(MKU, inst, Fraction(1, r * s + 1), Fraction(k, s), k,
                             gadgets, vertex_map, source)


def _phi1_users(artifact: ReductionArtifact, solution: DcsSolution) -> dict:
    known = {c for g in artifact.gadget_map.values() for c in (g.phi0, g.phi1)}
    used = set(solution.prover.assignment.values())
    unknown = sorted(used - known)
    if unknown or set(solution.prover.assignment) != set(artifact.instance.in_class):
        raise ValidationError(f"solution does not belong to this artifact (unknown ids {unknown})")
    return {key: [x for x in g.points if solution.prover[x] == g.phi1]
            for key, g in artifact.gadget_map.items()}


def lift_dks(artifact: ReductionArtifact, solution: DcsSolution) -> tuple[tuple[str, ...], int]:
    """Vertex set of size min(k, |V|) inducing at least as many edges as the prover's phi1 uses."""
    if artifact.kind != DKS:
        raise ValidationError("lift_dks needs a DkS artifact")
    users = _phi1_users(artifact, solution)
    chosen = [e for e, xs in users.items() if xs]
    vertices = set(v for e in chosen for v in e)
    size = min(artifact.k, len(artifact.source.vertices))
    for v in artifact.source.vertices:
        if len(vertices) >= size:
            break
        vertices.add(v)
    return tuple(sorted(vertices)), len(chosen)


def lift_mku(artifact: ReductionArtifact, solution: DcsSolution) -> tuple[tuple[int, ...], int]:
    """Indices of sets whose phi1 carries all r of its datapoints, and their union size."""
    if artifact.kind != MKU:
        raise ValidationError("lift_mku needs an MkU artifact")
    users = _phi1_users(artifact, solution)
    chosen = tuple(i for i, xs in sorted(users.items()) if len(xs) == len(artifact.gadget_map[i].points))
    union = set().union(*(artifact.source.sets[i] for i in chosen)) if chosen else set()
    return chosen, len(union)


def induced_edges(source: SourceGraph, vertices: Iterable[str]) -> int:
    vs = set(vertices)
    return sum(1 for u, v in source.edges if u in vs and v in vs)


def dks_brute(source: SourceGraph, k: int) -> int:
    """Maximum number of edges induced by k vertices, by exhaustive search."""
    n = len(source.vertices)
    if n > ORACLE_LIMIT:
        raise BudgetExceededError(f"dks_brute limited to {ORACLE_LIMIT} vertices, got {n}")
    if not 0 <= k <= n:
        raise ValidationError(f"k must lie in [0, {n}], got {k}")
    return max(induced_edges(source, c) for c in itertools.combinations(source.vertices, k))


def mku_brute(source: SetSystem, l: int) -> int:
    """Minimum size of the union of l sets, by exhaustive search."""
    s = len(source.sets)
    if s > ORACLE_LIMIT:
        raise BudgetExceededError(f"mku_brute limited to {ORACLE_LIMIT} sets, got {s}")
    if not 0 <= l <= s:
        raise ValidationError(f"l must lie in [0, {s}], got {l}")
    return min(len(frozenset().union(*c)) for c in itertools.combinations(source.sets, l))
