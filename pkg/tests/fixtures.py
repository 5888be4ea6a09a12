"""Fixed fixture families shared by the unit and acceptance suites."""

import random
from fractions import Fraction

import networkx as nx

from certsel import RandomCsiParams, SetSystem, SourceGraph, random_csi


def connected_graphs(max_vertices=6, max_edges=9):
    """Every connected graph (up to isomorphism) with 2..max_vertices vertices and at most max_edges edges."""
    out = []
    for g in nx.graph_atlas_g():
        n, m = g.number_of_nodes(), g.number_of_edges()
        if 2 <= n <= max_vertices and 1 <= m <= max_edges and nx.is_connected(g):
            out.append(SourceGraph.from_edges([(str(u), str(v)) for u, v in g.edges()]))
    return out


def uniform_systems():
    """Deterministic 2- and 3-uniform set systems with |S| <= 9 and |U| <= 8."""
    systems = [
        SetSystem.from_sets([{"1", "2"}, {"2", "3"}, {"3", "4"}]),
        SetSystem.from_sets([{"1", "2"}, {"3", "4"}]),
        SetSystem.from_sets([{"1", "2"}, {"1", "2"}]),
        SetSystem.from_sets([{"1", "2", "3"}, {"2", "3", "4"}, {"4", "5", "6"}, {"1", "5", "6"}]),
    ]
    rng = random.Random(20240601)
    for r in (2, 3):
        for s in range(1, 10):
            for _ in range(3):
                u = rng.randint(max(r, 3), 8)
                universe = [str(i) for i in range(1, u + 1)]
                systems.append(SetSystem.from_sets([set(rng.sample(universe, r)) for _ in range(s)], universe))
    return systems


def random_instances(count, seed, n_in=(1, 6), n_out=(1, 6), m=(1, 12), balanced=False):
    """Seeded random instances with sizes drawn from the given inclusive ranges."""
    rng = random.Random(seed)
    probs = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]
    out = []
    for i in range(count):
        a = rng.randint(*n_in)
        b = a if balanced else rng.randint(*n_out)
        c = rng.randint(*m)
        p_in = probs[0] if c >= 9 else rng.choice(probs)
        out.append(random_csi(RandomCsiParams(a, b, c, p_in, rng.choice(probs), seed * 100003 + i)))
    return out
