"""Vectorised enumeration of certificate subsets.

Certificates are indexed by their position in ``instance.certificates`` (i.e.
sorted id order), so bit ``i`` of a mask is the i-th smallest id.  The subset
space is split into chunks: the low ``L`` bits are enumerated at once with
numpy tables built by doubling, and the remaining high bits are fixed per
chunk.  Chunks are independent, which makes the search trivially parallel;
per-chunk winners are reduced with the same deterministic tie-break, so the
result does not depend on the number of workers.

Lexicographic order on subsets is the order of their sorted id sequences,
e.g. () < (0,) < (0, 1) < (0, 1, 2) < (0, 2) < (1,).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceededError
from .model import CsInstance

BUDGET_ENV = "CERTSEL_MAX_CERTIFICATES"
DEFAULT_BUDGET = 24
_MAX_TABLE_CELLS = 1 << 22
_INT_LIMIT = 1 << 60


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def check_budget(instance: CsInstance, max_certificates: int | None, hint: str = "") -> None:
    budget = default_budget() if max_certificates is None else max_certificates
    m = len(instance.certificates)
    if m > budget:
        msg = f"instance has {m} certificates, above the enumeration budget of {budget}"
        raise BudgetExceededError(f"{msg}; {hint}" if hint else msg)


def mask_to_indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_to_ids(instance: CsInstance, mask: int) -> frozenset[str]:
    certs = instance.certificates
    return frozenset(certs[i] for i in mask_to_indices(mask))


def ids_to_mask(instance: CsInstance, ids) -> int:
    idx = instance.certificate_index
    return sum(1 << idx[c] for c in ids)


def lex_min_mask(masks: np.ndarray) -> int:
    """Lexicographically smallest subset (by sorted index sequence) among ``masks``."""
    rem = np.unique(np.asarray(masks, dtype=np.int64))
    prefix = 0
    while True:
        if rem.size == 0:
            raise ValueError("no candidate masks")
        if (rem == 0).any():
            return prefix
        low = rem & -rem
        b = int(low.min())
        rem = rem[low == b] ^ b
        prefix |= b


def lex_key(mask: int) -> tuple[int, ...]:
    return mask_to_indices(mask)


def _words(ids: Sequence[str], members, n_words: int) -> np.ndarray:
    pos = {v: i for i, v in enumerate(ids)}
    w = np.zeros(n_words, dtype=np.uint64)
    for v in members:
        if v in pos:
            i = pos[v]
            w[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return w


def subset_table(values: np.ndarray, combine: Callable, identity) -> np.ndarray:
    """Table over all 2**n subsets of the first axis of ``values``.

    ``table[mask] = combine-reduction of values[i] for bits i of mask``, with
    ``identity`` for the empty set.
    """
    n = values.shape[0]
    rest = values.shape[1:]
    out = np.empty((1 << n,) + rest, dtype=values.dtype)
    out[0] = identity
    for i in range(n):
        h = 1 << i
        combine(out[:h], values[i], out=out[h:2 * h])
    return out


def _reduce(values: np.ndarray, bits: tuple[int, ...], combine: Callable, identity) -> np.ndarray:
    acc = np.full(values.shape[1:], identity, dtype=values.dtype)
    for i in bits:
        acc = combine(acc, values[i])
    return acc


def _popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, int(v))
    return out


class SubsetSpace:
    """Precomputed per-certificate data shared by every chunk evaluator."""

    def __init__(self, instance: CsInstance, row_width: int = 1):
        self.instance = instance
        certs = instance.certificates
        self.m = len(certs)
        self.n_out_words = max(1, (len(instance.out_class) + 63) // 64)
        self.n_in_words = max(1, (len(instance.in_class) + 63) // 64)
        adj = instance.adjacency
        self.out_words = np.stack([_words(instance.out_class, adj[c], self.n_out_words) for c in certs]) \
            if certs else np.zeros((0, self.n_out_words), np.uint64)
        self.in_words = np.stack([_words(instance.in_class, adj[c], self.n_in_words) for c in certs]) \
            if certs else np.zeros((0, self.n_in_words), np.uint64)
        width = max(row_width, self.n_out_words, 1)
        low = self.m
        while low > 0 and (1 << low) * width > _MAX_TABLE_CELLS:
            low -= 1
        self.low = low
        self.n_chunks = 1 << (self.m - low)

    def high_bits(self, chunk: int) -> tuple[int, ...]:
        return tuple(self.low + i for i in mask_to_indices(chunk))

    def chunk_masks(self, chunk: int) -> np.ndarray:
        return np.arange(1 << self.low, dtype=np.int64) | (np.int64(chunk) << np.int64(self.low))


def run_chunks(fn: Callable, n_chunks: int, workers: int = 1) -> list:
    """Evaluate ``fn(chunk)`` for all chunks, in chunk order."""
    if workers <= 1 or n_chunks == 1:
        return [fn(c) for c in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_chunks), chunksize=max(1, n_chunks // (4 * workers))))


def best_of(results: list, better: Callable) -> object:
    best = None
    for r in results:
        if r is None:
            continue
        if best is None or better(r, best):
            best = r
    return best


# --- prover cost tables -----------------------------------------------------

class ProverCostSpace(SubsetSpace):
    """Integer-scaled certificate precisions for the inner prover optimisation.

    Precision of certificate c is ``inc/deg``; it is scaled by ``scale`` (the
    lcm of all degrees) so every precision is an integer ``P[c]``.  A prover's
    total scaled cost is ``sum_x P[M(x)] = Pr(M) * |D1| * scale``.
    """

    def __init__(self, instance: CsInstance):
        super().__init__(instance, row_width=max(1, len(instance.in_class)))
        adj = instance.adjacency
        in_set = instance.in_set
        degs = [len(adj[c]) for c in instance.certificates]
        self.scale = _lcm(d for d in degs if d > 0)
        n1 = len(instance.in_class)
        big = self.scale * max(n1, 1) * 4
        self.dtype = np.int64 if big < _INT_LIMIT else object
        self.inf = (1 << 62) if self.dtype is np.int64 else 1 << (big.bit_length() + 8)
        P = [len(adj[c] & in_set) * self.scale // d if d else 0 for c, d in zip(instance.certificates, degs)]
        self.P = P
        rows = np.full((self.m, n1), self.inf, dtype=self.dtype)
        for j, x in enumerate(instance.in_class):
            for c in adj[x]:
                rows[instance.certificate_index[c], j] = P[instance.certificate_index[c]]
        self.rows = rows
        self.p_any = rows.min(axis=0) if self.m else np.full(n1, self.inf, dtype=self.dtype)
        self.low_out = subset_table(self.out_words[:self.low], np.bitwise_or, 0)
        self.low_acc = subset_table(rows[:self.low], np.minimum, self.inf)

    def chunk_data(self, chunk: int):
        bits = self.high_bits(chunk)
        out_high = _reduce(self.out_words, bits, np.bitwise_or, 0)
        acc_high = _reduce(self.rows, bits, np.minimum, self.inf)
        covered = _popcount(self.low_out | out_high)
        return covered, acc_high

    def costs(self, idx: np.ndarray, acc_high: np.ndarray, budget: int):
        """Minimum scaled prover cost for the low masks ``idx``.

        Returns ``(feasible, cost)``; ``cost`` is meaningful where feasible.
        """
        acc = np.minimum(self.low_acc[idx], acc_high)
        missing = acc >= self.inf
        mandatory = missing.sum(axis=1)
        feasible = mandatory <= budget
        base = np.where(missing, self.p_any, acc).sum(axis=1)
        if budget > 0 and acc.shape[0]:
            savings = np.where(missing, 0, acc - self.p_any)
            savings = -np.sort(-savings, axis=1) if self.dtype is np.int64 else \
                np.array([sorted(r, reverse=True) for r in savings], dtype=object).reshape(savings.shape)
            csum = np.concatenate([np.zeros((acc.shape[0], 1), dtype=savings.dtype),
                                   np.cumsum(savings, axis=1)], axis=1)
            extra = np.clip(budget - mandatory, 0, acc.shape[1]).astype(np.int64)
            base = base - csum[np.arange(acc.shape[0]), extra]
        return feasible, base


def miss_budget(eps_c: Fraction, n_in: int) -> int:
    """Number of in-class datapoints allowed to land on rejected certificates."""
    b = math.floor(Fraction(eps_c) * n_in)
    return max(0, min(b, n_in))


def cover_budget(eps_s: Fraction, n_out: int) -> int:
    """Number of out-class datapoints allowed to be covered by accepted certificates."""
    b = math.floor(Fraction(eps_s) * n_out)
    return max(-1, min(b, n_out))
