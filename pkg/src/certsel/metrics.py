"""Exact metrics on certificate-selection instances.

Every value is a :class:`fractions.Fraction`; nothing here touches floats.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Iterable, Mapping

import numpy as np

from . import _enum
from .errors import UndefinedMetricError, ValidationError
from .model import (
    CsInstance,
    ProverAssignment,
    check_prover,
    check_verifier,
    neighbors,
    require_prover_exists,
    set_neighbors,
)


def completeness(instance: CsInstance, A, M) -> Fraction:
    """Fraction of in-class datapoints whose assigned certificate is accepted."""
    A = check_verifier(instance, A)
    M = check_prover(instance, M)
    hits = sum(1 for x in instance.in_class if M[x] in A.accepted)
    return Fraction(hits, len(instance.in_class))


def soundness(instance: CsInstance, A) -> Fraction:
    """Fraction of out-class datapoints with no accepted neighbour.

    The adversarial prover is implicit: an out-class point is lost as soon as
    any of its certificates is accepted.
    """
    A = check_verifier(instance, A)
    if not instance.out_class:
        raise UndefinedMetricError("soundness undefined: empty out-class set")
    safe = sum(1 for y in instance.out_class if not (instance.adjacency[y] & A.accepted))
    return Fraction(safe, len(instance.out_class))


def best_completeness(instance: CsInstance, A) -> tuple[Fraction, ProverAssignment]:
    """Maximum completeness over all provers, with a maximising prover.

    Each datapoint goes to its smallest accepted neighbour, or to its smallest
    neighbour when none is accepted.
    """
    A = check_verifier(instance, A)
    require_prover_exists(instance)
    assignment = {}
    hits = 0
    for x in instance.in_class:
        ns = sorted(instance.adjacency[x])
        acc = [c for c in ns if c in A.accepted]
        assignment[x] = acc[0] if acc else ns[0]
        hits += bool(acc)
    return Fraction(hits, len(instance.in_class)), ProverAssignment(assignment)


def certificate_precision(instance: CsInstance, cert: str) -> Fraction:
    ns = neighbors(instance, cert)
    if not ns:
        raise UndefinedMetricError(f"undefined precision: certificate {cert!r} has no neighbours")
    return Fraction(len(ns & instance.in_set), len(ns))


def set_precision(instance: CsInstance, certs: Iterable[str]) -> Fraction:
    ns = set_neighbors(instance, certs)
    if not ns:
        raise UndefinedMetricError("undefined precision: certificate set has empty neighbourhood")
    return Fraction(len(ns & instance.in_set), len(ns))


def prover_precision(instance: CsInstance, M) -> Fraction:
    """Average precision of the certificates the prover sends."""
    M = check_prover(instance, M)
    total = sum((certificate_precision(instance, M[x]) for x in instance.in_class), Fraction(0))
    return total / len(instance.in_class)


def verifier_precision(instance: CsInstance, A) -> Fraction:
    A = check_verifier(instance, A)
    try:
        return set_precision(instance, A.accepted)
    except UndefinedMetricError:
        raise UndefinedMetricError("undefined verifier precision: accepted set reaches no datapoint") from None


def verifier_precision_formula(instance: CsInstance, A) -> Fraction:
    """``1 - eps_s / (1 - eps_c + eps_s)`` from the best achievable error rates.

    Agrees with :func:`verifier_precision` when both classes have the same size.
    """
    best, _ = best_completeness(instance, A)
    eps_c = 1 - best
    eps_s = 1 - soundness(instance, A)
    denom = 1 - eps_c + eps_s
    if denom == 0:
        raise UndefinedMetricError("formula undefined: verifier accepts nothing reachable")
    return 1 - eps_s / denom


# --- asymmetric feature correlation ----------------------------------------

def afc_kappa(instance: CsInstance, cert: str, certs: Iterable[str]) -> Fraction:
    """kappa(phi, F): out/in concentration ratio of ``cert`` inside ``certs``."""
    certs = frozenset(certs)
    if cert not in certs:
        raise ValidationError(f"{cert!r} is not a member of the certificate set")
    n_phi = neighbors(instance, cert)
    n_set = set_neighbors(instance, certs)
    num = len(n_phi & instance.out_set) * len(n_set & instance.in_set)
    den = len(n_set & instance.out_set) * len(n_phi & instance.in_set)
    if den == 0:
        raise UndefinedMetricError(f"kappa undefined for ({cert!r}, {sorted(certs)})")
    return Fraction(num, den)


@dataclass(frozen=True)
class AfcWitness:
    """AFC value with the certificate set attaining it.

    ``per_datapoint_terms`` maps each in-class datapoint reached by the set to
    its worst-case certificate and that certificate's kappa.  ``exact`` is
    False for heuristic lower bounds.
    """

    value: Fraction
    witness_set: frozenset[str]
    per_datapoint_terms: Mapping[str, tuple[str, Fraction]] = field(compare=False)
    exact: bool = True

    def recompute(self) -> Fraction:
        terms = [k for _, k in self.per_datapoint_terms.values()]
        return sum(terms, Fraction(0)) / len(terms)


def afc_terms(instance: CsInstance, certs: Iterable[str]) -> dict[str, tuple[str, Fraction]]:
    """Worst-case certificate and kappa for every in-class point reached by ``certs``.

    Raises UndefinedMetricError when the set misses either class.
    """
    F = frozenset(certs)
    n_set = set_neighbors(instance, F)
    reached_in = sorted(n_set & instance.in_set)
    if not reached_in or not (n_set & instance.out_set):
        raise UndefinedMetricError(f"AFC expression undefined for {sorted(F)}")
    terms = {}
    for y in reached_in:
        best = None
        for phi in sorted(instance.adjacency[y] & F):
            k = afc_kappa(instance, phi, F)
            if best is None or k > best[1]:
                best = (phi, k)
        terms[y] = best
    return terms


def afc_of_set(instance: CsInstance, certs: Iterable[str]) -> AfcWitness:
    terms = afc_terms(instance, certs)
    value = sum((k for _, k in terms.values()), Fraction(0)) / len(terms)
    return AfcWitness(value, frozenset(certs), terms)


class _AfcSpace(_enum.SubsetSpace):
    # value(F) = sum_{y in N(F) & D1} max_{phi in N(y) & F} out(phi)/in(phi), divided by |N(F) & D-1|.
    # The common in-class factor of kappa cancels against the 1/|F1*| average.

    def __init__(self, instance: CsInstance):
        super().__init__(instance, row_width=max(1, len(instance.in_class)))
        adj = instance.adjacency
        certs = instance.certificates
        n_in = [len(adj[c] & instance.in_set) for c in certs]
        n_out = [len(adj[c] & instance.out_set) for c in certs]
        self.scale = _enum._lcm(b for b in n_in if b > 0)
        ratios = [a * self.scale // b if b else 0 for a, b in zip(n_out, n_in)]
        big = max(ratios, default=0) * max(1, len(instance.in_class)) * max(1, len(instance.out_class))
        dtype = np.int64 if big * self.scale < _enum._INT_LIMIT else object
        rows = np.zeros((self.m, len(instance.in_class)), dtype=dtype)
        for j, y in enumerate(instance.in_class):
            for c in adj[y]:
                i = instance.certificate_index[c]
                rows[i, j] = ratios[i]
        self.rows = rows
        self.low_rows = _enum.subset_table(rows[:self.low], np.maximum, 0)
        self.low_out = _enum.subset_table(self.out_words[:self.low], np.bitwise_or, 0)
        self.low_in = _enum.subset_table(self.in_words[:self.low], np.bitwise_or, 0)


def _afc_chunk(space: _AfcSpace, chunk: int):
    bits = space.high_bits(chunk)
    hi_rows = _enum._reduce(space.rows, bits, np.maximum, 0)
    n_out = _enum._popcount(space.low_out | _enum._reduce(space.out_words, bits, np.bitwise_or, 0))
    n_in = _enum._popcount(space.low_in | _enum._reduce(space.in_words, bits, np.bitwise_or, 0))
    score = np.maximum(space.low_rows, hi_rows).sum(axis=1)
    ok = (n_out > 0) & (n_in > 0)
    if not ok.any():
        return None
    best = None
    for d in np.unique(n_out[ok]):
        sel = ok & (n_out == d)
        v = Fraction(int(score[sel].max()), space.scale * int(d))
        if best is None or v > best:
            best = v
    masks = space.chunk_masks(chunk)
    tied = np.zeros_like(ok)
    for d in np.unique(n_out[ok]):
        target = best * space.scale * int(d)
        if target.denominator == 1:
            tied |= ok & (n_out == d) & (score == target.numerator)
    return best, _enum.lex_min_mask(masks[tied])


def _afc_better(a, b):
    return a[0] > b[0] or (a[0] == b[0] and _enum.lex_key(a[1]) < _enum.lex_key(b[1]))


def afc_exact(instance: CsInstance, max_certificates: int | None = None, workers: int = 1) -> AfcWitness:
    """Exact AFC by enumerating every certificate subset.

    Only sets reaching both classes are admissible.  Ties go to the
    lexicographically smallest set.
    """
    _enum.check_budget(instance, max_certificates, "instance too large for exact AFC; use afc_greedy")
    space = _AfcSpace(instance)
    best = _enum.best_of(_enum.run_chunks(partial(_afc_chunk, space), space.n_chunks, workers), _afc_better)
    if best is None:
        raise UndefinedMetricError("AFC undefined: no certificate set reaches both classes")
    witness = afc_of_set(instance, _enum.mask_to_ids(instance, best[1]))
    assert witness.value == best[0], (witness.value, best[0])
    return witness


def afc_greedy(instance: CsInstance, seed: int = 0, restarts: int = 16) -> AfcWitness:
    """Lower bound on the AFC from greedy set growth.

    Grows a set one certificate at a time from several seeded starting
    certificates, always adding the certificate with the best resulting value,
    and keeps the best admissible set seen.
    """
    certs = list(instance.certificates)
    rng = random.Random(seed)
    rng.shuffle(certs)

    def value(F):
        try:
            return afc_of_set(instance, F).value
        except UndefinedMetricError:
            return None

    def key(F):
        return tuple(sorted(F))

    best = None  # (value, key)
    for start in certs[:restarts]:
        F = frozenset([start])
        current = value(F)
        while True:
            step = None
            for c in instance.certificates:
                if c in F:
                    continue
                G = F | {c}
                v = value(G)
                if v is not None and (step is None or v > step[0]):
                    step = (v, G)
            if step is None:
                break
            if current is not None and step[0] <= current:
                break
            current, F = step
        if current is not None and (best is None or current > best[0]
                                    or (current == best[0] and key(F) < best[1])):
            best = (current, key(F))
    if best is None:
        raise UndefinedMetricError("AFC undefined: no certificate set reaches both classes")
    w = afc_of_set(instance, best[1])
    return AfcWitness(w.value, w.witness_set, w.per_datapoint_terms, exact=False)
