from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings

from seqauction import GreedyProfile, Instance
from seqauction.greedy import (
    baseline_price,
    duopsony_factor,
    greedy_bid,
    greedy_demand,
    greedy_payoff,
    greedy_utility,
    threshold_price,
)
from seqauction.instances import example1, example4
from seqauction.lattice import Node, all_nodes, decision_nodes
from seqauction.lemmas import LEMMAS, check_lemmas, printed_sdf_counterexamples

from conftest import instances
from oracles import brute_greedy


@settings(max_examples=80, deadline=None)
@given(instances(max_t=6))
def test_profile_matches_brute_force(inst):
    g = GreedyProfile(inst)
    for x in all_nodes(inst.T):
        for i in (1, 2):
            payoffs, mu, kappa, f = brute_greedy(inst, i, x.x1, x.x2)
            assert g.mu(i, x) == mu
            assert g.kappa(i, x) == kappa
            assert g.f(i, x) == f
            for k, p in enumerate(payoffs):
                assert g.payoff(i, k, x) == p


@settings(max_examples=50, deadline=None)
@given(instances(max_t=5))
def test_profile_agrees_with_standalone_functions(inst):
    g = GreedyProfile(inst)
    for x in decision_nodes(inst.T):
        for i in (1, 2):
            assert g.mu(i, x) == greedy_utility(inst, i, x)
            assert g.kappa(i, x) == greedy_demand(inst, i, x)
            assert g.f(i, x) == duopsony_factor(inst, i, x)
            assert g.beta(i, x) == baseline_price(inst, i, x)
            assert g.p(i, x) == threshold_price(inst, i, x)
            assert g.bid(i, x) == greedy_bid(inst, i, x) <= inst.v(i, 1, x)


def test_terminal_conventions():
    inst = example1()
    g = GreedyProfile(inst)
    leaf = Node(2, 0, 2)
    assert (g.f(1, leaf), g.mu(1, leaf), g.kappa(1, leaf)) == (0, 0, 0)
    with pytest.raises(ValueError):
        g.p(1, leaf)
    with pytest.raises(ValueError):
        baseline_price(inst, 1, leaf)
    with pytest.raises(ValueError):
        greedy_payoff(inst, 1, 3, inst.root)


def test_example1_root_quantities():
    g = GreedyProfile(example1())
    root = Node(0, 0, 2)
    # buyer 1: target 1 pays v2(2) = 5 -> 5; target 2 pays 2 * v2(1) = 16 -> 3
    assert (g.mu(1, root), g.kappa(1, root), g.f(1, root)) == (5, 1, 2)
    assert (g.mu(2, root), g.kappa(2, root), g.f(2, root)) == (0, 0, 0)


def test_example4_buyer1_is_strict_monopsonist():
    inst = example4()
    g = GreedyProfile(inst)
    assert g.is_strict_monopsonist(1, inst.root)
    assert g.is_monopsonist(1, inst.root)
    assert g.f(2, inst.root) == 0


def test_thirteen_lemmas_registered():
    assert len(LEMMAS) == 13


@settings(max_examples=60, deadline=None)
@given(instances(max_t=6))
def test_lemmas_hold(inst):
    for name, rep in check_lemmas(inst).items():
        assert rep.passed, f"{name}: {rep.violations[:3]}"


def test_literal_min_reading_fails_somewhere():
    # with min(f - 1, 0) the winning branch could never exceed 0, which is false here
    inst = Instance.of([3, 3, 3], [1, 1, 1])
    assert printed_sdf_counterexamples(inst)


def test_lemma_check_detects_corrupted_profile():
    inst = Instance.of([3, 2, 1], [2, 1, 0])
    g = GreedyProfile(inst)
    x = inst.root
    e = g._table[x][0]
    g._table[x] = (type(e)(e.f, e.mu + 1, e.kappa, e.beta, e.p, e.payoffs), g._table[x][1])
    reps = check_lemmas(inst, g)
    assert not all(r.passed for r in reps.values())
