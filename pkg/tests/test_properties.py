"""Property checks against the naive oracles on hypothesis-drawn instances."""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from certsel import (
    InfeasibleError,
    UndefinedMetricError,
    afc_exact,
    afc_greedy,
    afc_kappa,
    best_completeness,
    certificate_precision,
    completeness,
    max_features_per_datapoint,
    prover_precision,
    set_precision,
    solve_dcs_exact,
    solve_dcs_greedy,
    soundness,
    verifier_precision,
    verifier_precision_formula,
)

import oracles
from conftest import instances
from fixtures import random_instances

RATIOS = st.sampled_from([F(0), F(1, 5), F(1, 4), F(1, 3), F(1, 2), F(1)])
SLOW = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _subsets(certs):
    for r in range(len(certs) + 1):
        yield from map(set, itertools.combinations(certs, r))


@SLOW
@given(instances(), st.data())
def test_metrics_match_oracle(inst, data):
    P = oracles.plain(inst)
    A = data.draw(st.sets(st.sampled_from(inst.certificates)))
    M = {x: data.draw(st.sampled_from(sorted(inst.adjacency[x]))) for x in inst.in_class}
    assert completeness(inst, A, M) == oracles.compl(P, A, M)
    assert soundness(inst, A) == oracles.sound(P, A)
    assert prover_precision(inst, M) == oracles.prover_prec(P, M)
    for c in inst.certificates:
        if inst.adjacency[c]:
            assert certificate_precision(inst, c) == oracles.prec(P, c)
    if oracles.NF(P, A):
        assert set_precision(inst, A) == oracles.set_prec(P, A) == verifier_precision(inst, A)
    best, Mb = best_completeness(inst, A)
    assert best == max(oracles.compl(P, A, m) for m in oracles.provers(P))
    assert oracles.compl(P, A, Mb.assignment) == best


@SLOW
@given(instances(max_certs=6), st.data())
def test_kappa_matches_oracle(inst, data):
    P = oracles.plain(inst)
    F_ = data.draw(st.sets(st.sampled_from(inst.certificates), min_size=1))
    phi = data.draw(st.sampled_from(sorted(F_)))
    try:
        got = afc_kappa(inst, phi, F_)
    except UndefinedMetricError:
        with pytest.raises(ZeroDivisionError):
            oracles.kappa(P, phi, F_)
        return
    assert got == oracles.kappa(P, phi, F_)


@SLOW
@given(instances(max_certs=7))
def test_afc_matches_oracle_and_bounds(inst):
    P = oracles.plain(inst)
    want = oracles.afc(P)
    if want is None:
        with pytest.raises(UndefinedMetricError):
            afc_exact(inst)
        return
    w = afc_exact(inst)
    assert w.value == want
    assert w.recompute() == w.value
    assert oracles.afc_expression(P, w.witness_set) == w.value
    assert w.value <= max_features_per_datapoint(inst)
    assert afc_greedy(inst, seed=1).value <= w.value


@SLOW
@given(instances(max_certs=6))
def test_metric_ranges_and_monotonicity(inst):
    certs = inst.certificates
    prev = {}
    for A in _subsets(certs):
        best, _ = best_completeness(inst, A)
        s = soundness(inst, A)
        assert 0 <= best <= 1 and 0 <= s <= 1
        prev[frozenset(A)] = (best, s)
    for A, (best, s) in prev.items():
        for c in certs:
            if c not in A:
                best2, s2 = prev[A | {c}]
                assert best2 >= best and s2 <= s


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5), st.data())
def test_precision_identity_balanced(n, data):
    inst = data.draw(instances(max_in=n, max_out=n, max_certs=6).filter(
        lambda i: len(i.in_class) == len(i.out_class)))
    for A in _subsets(inst.certificates):
        try:
            lhs = verifier_precision(inst, A)
        except UndefinedMetricError:
            continue
        assert lhs == verifier_precision_formula(inst, A)


@SLOW
@given(instances(max_in=4, max_certs=6), RATIOS, RATIOS)
def test_dcs_matches_double_enumeration(inst, eps_c, eps_s):
    want = oracles.dcs(oracles.plain(inst), eps_c, eps_s)
    if want is None:
        with pytest.raises(InfeasibleError):
            solve_dcs_exact(inst, eps_c, eps_s)
        return
    sol = solve_dcs_exact(inst, eps_c, eps_s)
    assert sol.objective == want
    assert sol.satisfies(eps_c, eps_s)
    assert sol.recheck(inst)


def test_seeded_metric_sweep():
    rng = __import__("random").Random(1000)
    for inst in random_instances(1000, seed=1000, m=(1, 8)):
        P = oracles.plain(inst)
        A = {c for c in inst.certificates if rng.random() < 0.5}
        M = {x: rng.choice(sorted(inst.adjacency[x])) for x in inst.in_class}
        assert completeness(inst, A, M) == oracles.compl(P, A, M)
        assert soundness(inst, A) == oracles.sound(P, A)
        assert prover_precision(inst, M) == oracles.prover_prec(P, M)
        if oracles.NF(P, A):
            assert verifier_precision(inst, A) == oracles.set_prec(P, A)


def test_seeded_greedy_below_exact():
    for inst in random_instances(100, seed=77, m=(2, 10)):
        try:
            exact = afc_exact(inst)
        except UndefinedMetricError:
            continue
        g = afc_greedy(inst, seed=3)
        assert g.value <= exact.value
        assert g.recompute() == g.value


@pytest.mark.parametrize("seed", range(3))
def test_greedy_dcs_is_feasible_lower_bound(seed):
    for inst in random_instances(30, seed=seed, m=(1, 8)):
        try:
            exact = solve_dcs_exact(inst, F(1, 4), F(1, 3))
        except InfeasibleError:
            continue
        try:
            g = solve_dcs_greedy(inst, F(1, 4), F(1, 3), seed=seed)
        except InfeasibleError:
            continue
        assert g.satisfies(F(1, 4), F(1, 3)) and g.recheck(inst)
        assert g.objective <= exact.objective
