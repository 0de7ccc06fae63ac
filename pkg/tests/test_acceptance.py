"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

from __future__ import annotations

from fractions import Fraction

import pytest

from seqauction import GreedyProfile, Mode, TieBreakRule, realized_paths, solve
from seqauction.analysis import (
    check_declining_prices,
    eql_character_check,
    greedy_outcome_check,
    monopsonist_equivalence_check,
)
from seqauction.equilibrium import DEFAULT_TIE_RULES, deviation_check, no_overbid_cap_check
from seqauction.instances import example1, example2, example3, example4, random_corpus
from seqauction.lemmas import LEMMAS, check_lemmas
from seqauction.lattice import Node
from seqauction.welfare import (
    POA_HI,
    POA_LO,
    argopt_check,
    equilibrium_efficiency,
    poa_family_check,
    worst_case_family,
)

DELTA, EPS = Fraction(1, 100), Fraction(3, 200)


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, failures: list[str], detail: str = "") -> None:
        status = "PASS" if not failures else "FAIL"
        line = f"[acceptance] {status} criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        with capsys.disabled():
            print("\n" + line)
            for f in failures[:10]:
                print(f"    {f}")
        assert not failures, f"criterion {number}: {failures[:5]}"

    return emit


@pytest.fixture(scope="module")
def corpus_t10():
    return random_corpus(1000, 10, seed=7)


@pytest.fixture(scope="module")
def corpus_t8():
    return random_corpus(500, 8, seed=8)


def test_criterion_01_example1(report):
    inst = example1()
    g = solve(inst, Mode.NO_OVERBID)
    root = g.root
    fails = []
    if (g.u(1, root), g.u(2, root)) != (5, 2):
        fails.append(f"root utilities {(g.u(1, root), g.u(2, root))}")
    if (g.bid(1, root), g.bid(2, root)) != (6, 8):
        fails.append(f"root bids {(g.bid(1, root), g.bid(2, root))}")
    paths = realized_paths(g)
    if len(paths) != 1 or paths[0].winners != (2, 1) or paths[0].prices != (6, 5):
        fails.append(f"paths {paths}")
    eff, _ = equilibrium_efficiency(inst, solved=g)
    if eff != Fraction(18, 19):
        fails.append(f"efficiency {eff}")
    report(1, "example 1 golden values", fails, f"efficiency {eff}")


def test_criterion_02_example2(report):
    inst = example2(10, Fraction(1, 1000))
    fails = []
    for tie in DEFAULT_TIE_RULES:
        over = solve(inst, Mode.OVERBID, tie)
        if not over.bid(2, over.root) > inst.v(2, 1, over.root):
            fails.append(f"{tie.name}: b2(0) = {over.bid(2, over.root)} not above v2(1)")
        for p in realized_paths(over):
            if p.winners[:9] != (2,) * 9:
                fails.append(f"{tie.name}: winners {p.winners}")
        cap = no_overbid_cap_check(solve(inst, Mode.NO_OVERBID, tie))
        fails += [str(v) for v in cap.violations]
    report(2, "example 2 overbidding", fails)


def test_criterion_03_example3(report):
    inst = example3()
    fails = []
    for q in (Fraction(0), Fraction(1, 2), Fraction(1)):
        tie = TieBreakRule.constant(q)
        u_no = solve(inst, Mode.NO_OVERBID, tie).u(1, inst.root)
        u_over = solve(inst, Mode.OVERBID, tie).u(1, inst.root)
        if u_no != 1 + q:
            fails.append(f"q={q}: no-overbid u1 = {u_no}")
        if u_over != 1:
            fails.append(f"q={q}: overbid u1 = {u_over}")
    report(3, "example 3 tie dependence", fails)


FIG2 = {
    (0, 0): (Fraction(2, 3) - DELTA + 2 * EPS, Fraction(2, 3) - DELTA + 2 * EPS),
    (1, 0): (Fraction(103, 120), Fraction(2, 3) - DELTA),
    (0, 1): (Fraction(97, 200), Fraction(1, 2) + EPS),
    (2, 0): (Fraction(1), Fraction(2, 3) - DELTA),
    (1, 1): (Fraction(1), Fraction(1, 2) + EPS),
    (0, 2): (Fraction(1), Fraction(0)),
}


def test_criterion_04_example4(report):
    inst = example4(DELTA, EPS)
    fails = []
    over = solve(inst, Mode.OVERBID, TieBreakRule.buyer2())
    for (a, b), bids in FIG2.items():
        got = (over.bid(1, Node(a, b, 3)), over.bid(2, Node(a, b, 3)))
        if got != bids:
            fails.append(f"bids at ({a},{b}): {got} vs {bids}")
    (p_over,) = realized_paths(over)
    if p_over.items_won(1) != 1 or p_over.realized_utility(inst, 1) != 1:
        fails.append(f"overbid path {p_over.winners}")
    eff, _ = equilibrium_efficiency(inst, solved=over)
    if eff != Fraction(13, 18) + EPS / 9:
        fails.append(f"overbid efficiency {eff}")
    no = solve(inst, Mode.NO_OVERBID, TieBreakRule.buyer2())
    (p_no,) = realized_paths(no)
    if p_no.winners != (1, 1, 1) or p_no.realized_utility(inst, 1) != 1 + 3 * DELTA:
        fails.append(f"no-overbid path {p_no.winners}, utility {p_no.realized_utility(inst, 1)}")
    report(4, "example 4 golden values", fails, f"overbid efficiency {eff}")


def test_criterion_05_declining_prices(report, corpus_t10):
    fails, paths = [], 0
    for inst in corpus_t10:
        for tie in DEFAULT_TIE_RULES:
            rep = check_declining_prices(solve(inst, Mode.NO_OVERBID, tie))
            paths += rep.checked
            fails += [f"{inst.name} {tie.name}: {v}" for v in rep.violations]
    report(5, "declining prices", fails, f"{len(corpus_t10)} instances, {paths} price steps")


def test_criterion_06_lemmas(report, corpus_t8):
    fails, cases = [], dict.fromkeys(LEMMAS, 0)
    for inst in corpus_t8:
        for name, rep in check_lemmas(inst, names=list(LEMMAS), include_extra=False).items():
            cases[name] += rep.checked
            fails += [f"{inst.name}: {v}" for v in rep.violations]
    idle = [n for n, c in cases.items() if c == 0]
    fails += [f"{n} never exercised" for n in idle]
    report(6, "thirteen node-level properties", fails, f"{len(corpus_t8)} instances, {sum(cases.values())} cases")


def test_criterion_07_greedy_equilibrium(report, corpus_t8):
    fails, cases = [], 0
    for inst in corpus_t8 + [example1(), example4()]:
        prof = GreedyProfile(inst)
        for tie in DEFAULT_TIE_RULES:
            g = solve(inst, Mode.NO_OVERBID, tie)
            for rep in (monopsonist_equivalence_check(inst, tie, prof, g),
                        greedy_outcome_check(inst, tie=tie, profile=prof),
                        eql_character_check(g, prof)):
                cases += rep.checked
                fails += [f"{inst.name} {tie.name}: {v}" for v in rep.violations]
    report(7, "greedy and equilibrium agreement", fails, f"{cases} cases")


def test_criterion_08_argopt(report, corpus_t8, corpus_t10):
    fails, cases = [], 0
    for inst in corpus_t8 + corpus_t10:
        rep = argopt_check(inst)
        cases += rep.checked
        fails += [f"{inst.name}: {v}" for v in rep.violations]
    report(8, "optimal allocations equal the duopsony interval", fails, f"{cases} cases")


def test_criterion_09_poa(report, corpus_t8, corpus_t10):
    fails = []
    worst = Fraction(1)
    for inst in corpus_t8 + corpus_t10:
        for tie in DEFAULT_TIE_RULES:
            eff, _ = equilibrium_efficiency(inst, Mode.NO_OVERBID, tie)
            worst = min(worst, eff)
            if eff < POA_LO:
                fails.append(f"{inst.name} {tie.name}: efficiency {eff}")
    rows = worst_case_family((3, 10, 50, 200, 500))
    fam = poa_family_check(rows, limit_tolerance=Fraction(5, 1000))
    fails += [str(v) for v in fam.violations]
    table = ", ".join(f"T={r.T}: {r.decimal(6)}" for r in rows)
    report(9, "price of anarchy floor and limit", fails,
           f"corpus min {float(worst):.6f}; {table}; gap at T=500 {fam.notes['last_gap'][:10]}")
    assert all(r.efficiency > POA_HI for r in rows)


def test_criterion_10_deviation(report):
    fails, cases = [], 0
    instances = [example1(), example2(), example3(), example4()] + random_corpus(120, 6, seed=10)
    for inst in instances:
        for mode in (Mode.NO_OVERBID, Mode.OVERBID):
            for tie in DEFAULT_TIE_RULES:
                rep = deviation_check(solve(inst, mode, tie))
                cases += rep.checked
                fails += [f"{inst.name} {mode.value} {tie.name}: {v}" for v in rep.violations]
    report(10, "no profitable unilateral deviation", fails, f"{len(instances)} instances, {cases} cases")
