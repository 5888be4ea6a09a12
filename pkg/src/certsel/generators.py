"""Instance generators.

Random instances are drawn with Python's ``random.Random`` (Mersenne Twister
MT19937) using only ``Random.random()``, whose output stream for an integer
seed is guaranteed stable across Python versions and platforms.  The draw
order is fixed (stream version 1):

1. in-class datapoints in id order, each against every certificate in id
   order: edge iff ``random() < p_in``;
2. out-class datapoints likewise with ``p_out``;
3. each in-class datapoint left without a certificate, in id order, is
   attached to certificate ``int(random() * m)``.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import ValidationError
from .model import CsInstance
from .reductions import ReductionArtifact, SetSystem, SourceGraph, reduce_dks, reduce_mku

PRNG = "MT19937 python-random.random stream-v1"


@dataclass(frozen=True)
class RandomCsiParams:
    n_in: int
    n_out: int
    m: int
    p_in: Fraction = Fraction(1, 2)
    p_out: Fraction = Fraction(1, 2)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p_in", Fraction(self.p_in))
        object.__setattr__(self, "p_out", Fraction(self.p_out))
        if min(self.n_in, self.n_out, self.m) < 1:
            raise ValidationError("counts must be >= 1")
        if not (0 <= self.p_in <= 1 and 0 <= self.p_out <= 1):
            raise ValidationError("edge probabilities must lie in [0, 1]")


def _ids(prefix: str, n: int) -> list[str]:
    w = len(str(n))
    return [f"{prefix}{i:0{w}d}" for i in range(1, n + 1)]


def _letter_names(n: int) -> list[str]:
    if n <= 26:
        return [chr(ord("A") + i) for i in range(n)]
    w = len(str(n))
    return [f"L{i:0{w}d}" for i in range(1, n + 1)]


def letters_digits(n: int) -> CsInstance:
    """The letters/digits family with AFC ``n``.

    In-class: one datapoint per letter plus one datapoint showing all digits.
    Out-class: one datapoint per digit plus one showing all letters.  Every
    certificate has precision 1/2, yet accepting the letters gives
    completeness and soundness n/(n+1).
    """
    if n < 1:
        raise ValidationError(f"letters_digits needs n >= 1, got {n}")
    letters = _letter_names(n)
    w = len(str(n - 1))
    digits = [f"{j:0{w}d}" for j in range(n)]
    in_class = [f"in:{a}" for a in letters] + ["in:all-digits"]
    out_class = [f"out:{d}" for d in digits] + ["out:all-letters"]
    certs = [f"letter:{a}" for a in letters] + [f"digit:{d}" for d in digits]
    edges = []
    for a in letters:
        edges += [(f"in:{a}", f"letter:{a}"), ("out:all-letters", f"letter:{a}")]
    for d in digits:
        edges += [(f"out:{d}", f"digit:{d}"), ("in:all-digits", f"digit:{d}")]
    return CsInstance.build(in_class, out_class, certs, edges,
                            {"generator": "letters_digits", "n": n})


def letter_certificates(instance: CsInstance) -> frozenset[str]:
    return frozenset(c for c in instance.certificates if c.startswith("letter:"))


def random_csi(params: RandomCsiParams) -> CsInstance:
    """Seeded random tripartite instance; isolated in-class points get one random certificate."""
    rng = random.Random(params.seed)
    ins, outs, certs = _ids("x", params.n_in), _ids("y", params.n_out), _ids("c", params.m)
    edges = []
    for points, p in ((ins, params.p_in), (outs, params.p_out)):
        for x in points:
            edges += [(x, c) for c in certs if rng.random() < p]
    touched = {x for x, _ in edges}
    repaired = []
    for x in ins:
        if x not in touched:
            edges.append((x, certs[int(rng.random() * params.m)]))
            repaired.append(x)
    meta = {k: str(v) if isinstance(v, Fraction) else v for k, v in asdict(params).items()}
    meta.update(generator="random_csi", prng=PRNG, repaired_in_class=repaired)
    return CsInstance.build(ins, outs, certs, edges, meta)


# --- fixed examples ---------------------------------------------------------

def t1() -> CsInstance:
    return CsInstance.build(["x1", "x2"], ["y1"], ["a", "b"],
                            [("x1", "a"), ("x2", "a"), ("x2", "b"), ("y1", "b")], {"name": "T1"})


def balanced_identity() -> CsInstance:
    return CsInstance.build(["x1", "x2"], ["y1", "y2"], ["a"],
                            [("x1", "a"), ("x2", "a"), ("y1", "a")], {"name": "balanced-identity"})


def triangle() -> SourceGraph:
    return SourceGraph.from_edges([("1", "2"), ("2", "3"), ("1", "3")])


def path_sets() -> SetSystem:
    return SetSystem.from_sets([{"1", "2"}, {"2", "3"}, {"3", "4"}])


def gadget_zoo() -> dict[str, CsInstance | ReductionArtifact]:
    """Small canonical instances used throughout the docs and tests, by name."""
    return {
        "T1": t1(),
        "balanced-identity": balanced_identity(),
        "k3-dks-k2": reduce_dks(triangle(), 2),
        "mku-path": reduce_mku(path_sets(), 1),
    }
