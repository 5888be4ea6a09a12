"""Solvers for deceptive certificate selection.

DCS: choose a prover (and some verifier accepting it) that minimises the
prover's average precision, subject to completeness >= 1 - eps_c and
soundness >= 1 - eps_s.  The objective reported is ``1 - Pr(M)``.

DCS2: choose a verifier that minimises ``1 - sound(A)`` such that some prover
reaches completeness >= 1 - eps_c with ``Pr(M) <= 1 - q``.

Both exact solvers enumerate verifier sets; for a fixed verifier the best
prover is found exactly in polynomial time (see
:func:`optimal_prover_given_verifier`).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import partial

import numpy as np

from . import _enum
from .errors import InfeasibleError
from .metrics import certificate_precision, completeness, prover_precision, soundness
from .model import (
    CsInstance,
    ProverAssignment,
    VerifierAcceptance,
    as_prover,
    check_verifier,
    require_prover_exists,
    require_valid,
)

DCS = "dcs"
DCS2 = "dcs2"
GREEDY_RESTARTS = 8


@dataclass(frozen=True)
class DcsSolution:
    problem: str
    verifier: VerifierAcceptance
    prover: ProverAssignment
    objective: Fraction
    achieved_completeness: Fraction
    achieved_soundness: Fraction
    achieved_prover_precision: Fraction
    optimal: bool

    @classmethod
    def from_pair(cls, instance: CsInstance, problem: str, A, M, optimal: bool) -> "DcsSolution":
        A = check_verifier(instance, A)
        compl = completeness(instance, A, M)
        sound = soundness(instance, A)
        prec = prover_precision(instance, M)
        objective = 1 - prec if problem == DCS else 1 - sound
        return cls(problem, A, as_prover(M), objective, compl, sound, prec, optimal)

    def recheck(self, instance: CsInstance) -> bool:
        """True iff every stored metric matches a fresh recomputation."""
        fresh = DcsSolution.from_pair(instance, self.problem, self.verifier, self.prover, self.optimal)
        return fresh == self

    def satisfies(self, eps_c, eps_s=None, q=None) -> bool:
        ok = self.achieved_completeness >= 1 - Fraction(eps_c)
        if eps_s is not None:
            ok = ok and self.achieved_soundness >= 1 - Fraction(eps_s)
        if q is not None:
            ok = ok and self.achieved_prover_precision <= 1 - Fraction(q)
        return ok


def optimal_prover_given_verifier(instance: CsInstance, A, eps_c) -> tuple[ProverAssignment, Fraction]:
    """Least-precise prover that still reaches completeness >= 1 - eps_c under ``A``.

    At most ``floor(eps_c * |D1|)`` datapoints may be sent to rejected
    certificates.  Datapoints without an accepted neighbour must use that
    allowance; the rest of it goes to the datapoints that save the most
    precision by switching to a rejected certificate.
    """
    A = check_verifier(instance, A)
    require_prover_exists(instance)
    budget = _enum.miss_budget(Fraction(eps_c), len(instance.in_class))
    prec = {}

    def p(c):
        if c not in prec:
            prec[c] = certificate_precision(instance, c)
        return prec[c]

    best_acc, best_any = {}, {}
    for x in instance.in_class:
        ns = sorted(instance.adjacency[x])
        best_any[x] = min(ns, key=lambda c: (p(c), c))
        acc = [c for c in ns if c in A.accepted]
        if acc:
            best_acc[x] = min(acc, key=lambda c: (p(c), c))
    mandatory = [x for x in instance.in_class if x not in best_acc]
    if len(mandatory) > budget:
        raise InfeasibleError(
            f"{len(mandatory)} datapoints have no accepted certificate but only {budget} misses are allowed")
    gains = sorted(((p(best_acc[x]) - p(best_any[x]), x) for x in best_acc), key=lambda t: (-t[0], t[1]))
    switched = {x for gain, x in gains[:budget - len(mandatory)] if gain > 0}
    M = ProverAssignment({x: best_any[x] if (x in switched or x not in best_acc) else best_acc[x]
                          for x in instance.in_class})
    return M, prover_precision(instance, M)


# --- exact solvers ----------------------------------------------------------

def _dcs_chunk(space: _enum.ProverCostSpace, budget: int, cover: int, chunk: int):
    covered, acc_high = space.chunk_data(chunk)
    idx = np.nonzero(covered <= cover)[0]
    if idx.size == 0:
        return None
    feasible, cost = space.costs(idx, acc_high, budget)
    if not feasible.any():
        return None
    best = cost[feasible].min()
    masks = space.chunk_masks(chunk)[idx]
    return int(best), _enum.lex_min_mask(masks[feasible & (cost == best)])


def _dcs2_chunk(space: _enum.ProverCostSpace, budget: int, threshold: int, chunk: int):
    covered, acc_high = space.chunk_data(chunk)
    idx = np.arange(covered.size)
    feasible, cost = space.costs(idx, acc_high, budget)
    feasible &= cost <= threshold
    if not feasible.any():
        return None
    best = covered[feasible].min()
    masks = space.chunk_masks(chunk)
    return int(best), _enum.lex_min_mask(masks[feasible & (covered == best)])


def _smaller(a, b):
    return a[0] < b[0] or (a[0] == b[0] and _enum.lex_key(a[1]) < _enum.lex_key(b[1]))


def _prepare(instance, max_certificates):
    require_valid(instance)
    require_prover_exists(instance)
    _enum.check_budget(instance, max_certificates, "use solve_dcs_greedy for larger instances")
    return _enum.ProverCostSpace(instance)


def solve_dcs_exact(instance: CsInstance, eps_c, eps_s, max_certificates: int | None = None,
                    workers: int = 1) -> DcsSolution:
    """Exact DCS optimum by enumerating every verifier set.

    Raises InfeasibleError when the instance is not an (eps_c, eps_s)-CSI.
    """
    eps_c, eps_s = Fraction(eps_c), Fraction(eps_s)
    space = _prepare(instance, max_certificates)
    budget = _enum.miss_budget(eps_c, len(instance.in_class))
    cover = _enum.cover_budget(eps_s, len(instance.out_class))
    fn = partial(_dcs_chunk, space, budget, cover)
    best = _enum.best_of(_enum.run_chunks(fn, space.n_chunks, workers), _smaller)
    if best is None:
        raise InfeasibleError(f"not an ({eps_c}, {eps_s})-CSI: no verifier/prover pair meets both bounds")
    A = _enum.mask_to_ids(instance, best[1])
    M, prec = optimal_prover_given_verifier(instance, A, eps_c)
    assert prec * len(instance.in_class) * space.scale == best[0]
    return DcsSolution.from_pair(instance, DCS, A, M, optimal=True)


def solve_dcs2_exact(instance: CsInstance, eps_c, q, max_certificates: int | None = None,
                     workers: int = 1) -> DcsSolution:
    """Exact DCS2 optimum: the most sound verifier admitting a low-precision prover."""
    eps_c, q = Fraction(eps_c), Fraction(q)
    space = _prepare(instance, max_certificates)
    n1 = len(instance.in_class)
    budget = _enum.miss_budget(eps_c, n1)
    # Pr(M) <= 1 - q  <=>  scaled cost <= floor((1 - q) * |D1| * scale)
    limit = (1 - q) * n1 * space.scale
    threshold = limit.numerator // limit.denominator
    if threshold < 0:
        raise InfeasibleError(f"precision ceiling 1 - q = {1 - q} is negative")
    fn = partial(_dcs2_chunk, space, budget, threshold)
    best = _enum.best_of(_enum.run_chunks(fn, space.n_chunks, workers), _smaller)
    if best is None:
        raise InfeasibleError(f"no verifier admits a prover with completeness >= {1 - eps_c} "
                              f"and precision <= {1 - q}")
    A = _enum.mask_to_ids(instance, best[1])
    M, prec = optimal_prover_given_verifier(instance, A, eps_c)
    assert prec <= 1 - q
    return DcsSolution.from_pair(instance, DCS2, A, M, optimal=True)


def _csi_chunk(space: _enum.ProverCostSpace, budget: int, cover: int, chunk: int):
    covered, acc_high = space.chunk_data(chunk)
    idx = np.nonzero(covered <= cover)[0]
    if idx.size == 0:
        return False
    acc = np.minimum(space.low_acc[idx], acc_high)
    return bool(((acc >= space.inf).sum(axis=1) <= budget).any())


def is_eps_csi(instance: CsInstance, eps_c, eps_s, max_certificates: int | None = None) -> bool:
    """Whether some (A, M) reaches completeness >= 1 - eps_c and soundness >= 1 - eps_s."""
    eps_c, eps_s = Fraction(eps_c), Fraction(eps_s)
    require_valid(instance)
    require_prover_exists(instance)
    n1, n_out = len(instance.in_class), len(instance.out_class)
    # quick certificate: accept only certificates no out-class point can produce
    safe = [c for c in instance.certificates if not (instance.adjacency[c] & instance.out_set)]
    hits = sum(1 for x in instance.in_class if any(c in instance.adjacency[x] for c in safe))
    if eps_s >= 0 and Fraction(hits, n1) >= 1 - eps_c:
        return True
    _enum.check_budget(instance, max_certificates, "is_eps_csi fallback enumeration")
    space = _enum.ProverCostSpace(instance)
    fn = partial(_csi_chunk, space, _enum.miss_budget(eps_c, n1), _enum.cover_budget(eps_s, n_out))
    return any(fn(c) for c in range(space.n_chunks))


# --- local search -----------------------------------------------------------

class _Evaluator:
    """Scores verifier sets for local search; feasible sets always outrank infeasible ones."""

    def __init__(self, instance, problem, eps_c, eps_s=None, q=None):
        self.instance = instance
        self.problem = problem
        self.eps_c = Fraction(eps_c)
        self.n1 = len(instance.in_class)
        self.budget = _enum.miss_budget(self.eps_c, self.n1)
        self.cover = _enum.cover_budget(Fraction(eps_s), len(instance.out_class)) if eps_s is not None else None
        self.q = Fraction(q) if q is not None else None
        self.cache = {}

    def covered(self, A):
        inst = self.instance
        return sum(1 for y in inst.out_class if inst.adjacency[y] & A)

    def score(self, A: frozenset):
        if A in self.cache:
            return self.cache[A]
        inst = self.instance
        covered = self.covered(A)
        missing = sum(1 for x in inst.in_class if not (inst.adjacency[x] & A))
        violation = Fraction(max(0, missing - self.budget))
        if self.cover is not None:
            violation += max(0, covered - self.cover)
        prec = None
        if missing <= self.budget:
            _, prec = optimal_prover_given_verifier(inst, A, self.eps_c)
            if self.q is not None:
                violation += max(Fraction(0), prec - (1 - self.q))
        if violation > 0:
            result = (0, -violation)
        elif self.problem == DCS:
            result = (1, 1 - prec)
        else:
            result = (1, Fraction(-covered, len(inst.out_class)))
        self.cache[A] = result
        return result


def _repair_soundness(ev: _Evaluator, A: frozenset) -> frozenset:
    inst = ev.instance
    A = set(A)
    while ev.cover is not None and ev.covered(A) > ev.cover:
        hit = {y for y in inst.out_class if inst.adjacency[y] & A}
        drop = max(sorted(A), key=lambda c: len(inst.adjacency[c] & hit))
        A.discard(drop)
    return frozenset(A)


def _hill_climb(ev: _Evaluator, A: frozenset) -> frozenset:
    certs = ev.instance.certificates
    current = ev.score(A)
    while True:
        step = None
        for c in certs:
            B = A ^ {c}
            s = ev.score(B)
            if s > current and (step is None or s > step[0]):
                step = (s, B)
        if step is None:
            return A
        current, A = step


def _local_search(instance, problem, eps_c, eps_s, q, seed, restarts):
    require_valid(instance)
    require_prover_exists(instance)
    ev = _Evaluator(instance, problem, eps_c, eps_s, q)
    certs = instance.certificates
    rng = random.Random(seed)
    safe = frozenset(c for c in certs if not (instance.adjacency[c] & instance.out_set))
    starts = [frozenset(certs), safe]
    while len(starts) < restarts:
        starts.append(frozenset(c for c in certs if rng.random() < 0.5))
    best = None
    for start in starts[:restarts]:
        A = _hill_climb(ev, _repair_soundness(ev, start))
        s = ev.score(A)
        if s[0] != 1:
            continue
        if best is None or s[1] > best[0][1] or (s[1] == best[0][1] and sorted(A) < sorted(best[1])):
            best = (s, A)
    if best is None:
        raise InfeasibleError("local search found no feasible verifier")
    A = best[1]
    M, _ = optimal_prover_given_verifier(instance, A, eps_c)
    return DcsSolution.from_pair(instance, problem, A, M, optimal=False)


def solve_dcs_greedy(instance: CsInstance, eps_c, eps_s, seed: int = 0,
                     restarts: int = GREEDY_RESTARTS) -> DcsSolution:
    """Heuristic DCS: soundness repair followed by single-flip hill climbing.

    Starts from the full certificate set (repaired by dropping the certificates
    that reach the most out-class points), the set of certificates no
    out-class point can produce, and seeded random sets.
    """
    return _local_search(instance, DCS, eps_c, eps_s, None, seed, restarts)


def solve_dcs2_greedy(instance: CsInstance, eps_c, q, seed: int = 0,
                      restarts: int = GREEDY_RESTARTS) -> DcsSolution:
    return _local_search(instance, DCS2, eps_c, None, q, seed, restarts)
