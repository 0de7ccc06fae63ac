"""Social welfare, path efficiency and the 1 - 1/e price-of-anarchy checks."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .analysis import DEFAULT_PATH_CAP, PathRealization, realized_paths
from .equilibrium import Mode, SolvedGame, TieBreakRule, solve
from .greedy import GreedyProfile, duopsony_factor, greedy_demand
from .lattice import Node, decision_nodes, other
from .reports import CheckReport
from .valuations import Instance, Role, as_fraction, real_incremental, real_integral


def inverse_e_bracket(terms: int = 20) -> tuple[Fraction, Fraction]:
    """Rational bracket [lo, hi] around 1/e from two consecutive partial sums.

    The alternating series sum (-1)^k / k! brackets its limit between
    neighbouring partial sums, so the width is 1/terms!.
    """
    s = Fraction(0)
    term = Fraction(1)
    partial = []
    for k in range(terms + 1):
        if k:
            term /= k
        s += term if k % 2 == 0 else -term
        partial.append(s)
    a, b = partial[-2], partial[-1]
    return (min(a, b), max(a, b))


_INV_E_LO, _INV_E_HI = inverse_e_bracket(20)
# 1 - 1/e lies in [POA_LO, POA_HI]; width 1/20! < 1e-18
POA_LO = 1 - _INV_E_HI
POA_HI = 1 - _INV_E_LO


def floor_times_poa(T: int) -> int:
    """floor(T * (1 - 1/e)), widening the bracket until it decides the integer."""
    terms = 20
    while True:
        lo_e, hi_e = inverse_e_bracket(terms)
        lo, hi = T * (1 - hi_e), T * (1 - lo_e)
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        terms += 10


def social_welfare(inst: Instance, k: int, x: Node) -> Fraction:
    """Welfare when buyer 1 takes ``k`` of the remaining items and buyer 2 the rest."""
    t = x.t
    if not 0 <= k <= t:
        raise ValueError(f"allocation k = {k} outside 0..{t}")
    return inst.V(1, k, x) + inst.V(2, t - k, x)


def welfare_curve(inst: Instance, x: Node) -> list[Fraction]:
    return [social_welfare(inst, k, x) for k in range(x.t + 1)]


def optimal_welfare(inst: Instance, x: Node) -> tuple[Fraction, int, int]:
    """(OPT, lo, hi) with the optimal allocations being exactly lo..hi.

    The interval comes from the duopsony factors and is checked against the
    brute-force argmax set; any disagreement is an AssertionError.
    """
    curve = welfare_curve(inst, x)
    opt = max(curve)
    brute = [k for k, w in enumerate(curve) if w == opt]
    lo, hi = duopsony_factor(inst, 1, x), x.t - duopsony_factor(inst, 2, x)
    if brute != list(range(lo, hi + 1)):
        raise AssertionError(f"argopt at {x.label()}: brute force {brute} vs interval [{lo}, {hi}]")
    return opt, lo, hi


def allocation_efficiency(inst: Instance, x: Node, k: int) -> Fraction:
    opt = max(welfare_curve(inst, x))
    if opt == 0:
        return Fraction(1)
    return social_welfare(inst, k, x) / opt


def path_efficiency(inst: Instance, path: PathRealization | tuple[Node, ...]) -> Fraction:
    """Welfare of the allocation a path reaches over the optimum from its start.

    All-zero valuations make the optimum 0; such degenerate paths count as efficient.
    """
    nodes = path.nodes if isinstance(path, PathRealization) else tuple(path)
    start, end = nodes[0], nodes[-1]
    return allocation_efficiency(inst, start, end.x1 - start.x1)


@dataclass(frozen=True)
class WelfareSummary:
    sw_per_k: tuple[Fraction, ...]
    opt: Fraction
    argopt_lo: int
    argopt_hi: int
    min_efficiency: Fraction
    expected_efficiency: Fraction


def equilibrium_efficiency(
    inst: Instance, mode: Mode = Mode.NO_OVERBID, tie: TieBreakRule | None = None,
    cap: int = DEFAULT_PATH_CAP, solved: SolvedGame | None = None,
) -> tuple[Fraction, Fraction]:
    """(worst path efficiency, probability-weighted efficiency) of the equilibrium."""
    game = solved if solved is not None else solve(inst, mode, tie)
    paths = realized_paths(game, cap=cap)
    effs = [(path_efficiency(inst, p), p.probability) for p in paths]
    return min(e for e, _ in effs), sum((e * p for e, p in effs), Fraction(0))


def welfare_summary(solved: SolvedGame, cap: int = DEFAULT_PATH_CAP) -> WelfareSummary:
    inst = solved.instance
    root = inst.root
    opt, lo, hi = optimal_welfare(inst, root)
    worst, mean = equilibrium_efficiency(inst, solved=solved, cap=cap)
    return WelfareSummary(tuple(welfare_curve(inst, root)), opt, lo, hi, worst, mean)


def argopt_check(inst: Instance) -> CheckReport:
    """Brute-force argmax of welfare equals [f1, t - f2] at every decision node."""
    report = CheckReport("argopt-interval")
    for x in decision_nodes(inst.T):
        curve = welfare_curve(inst, x)
        opt = max(curve)
        brute = {k for k, w in enumerate(curve) if w == opt}
        lo, hi = duopsony_factor(inst, 1, x), x.t - duopsony_factor(inst, 2, x)
        interval = set(range(lo, hi + 1))
        report.expect(brute == interval, node=x, expected=sorted(interval), actual=sorted(brute))
        for k in range(x.t):
            step = curve[k + 1] - curve[k]
            expected = inst.v(1, k + 1, x) - inst.v(2, x.t - k, x)
            report.expect(step == expected, node=x, expected=expected, actual=step, check="welfare-telescoping",
                          detail=f"k={k}")
    return report


def random_path(rng: random.Random, start: Node) -> tuple[Node, ...]:
    nodes = [start]
    while not nodes[-1].is_terminal:
        nodes.append(nodes[-1].child(rng.choice((1, 2))))
    return tuple(nodes)


def subpath_bound_check(
    inst: Instance, paths: int = 50, seed: int = 0, profile: GreedyProfile | None = None,
) -> CheckReport:
    """Efficiency along arbitrary paths versus their subpaths.

    Where neither buyer is a strict monopsonist at a node, dropping that round
    cannot raise efficiency; without any strict monopsonist on the path the
    path is fully efficient; otherwise efficiency is at least that of the
    subpath starting at the first strict-monopsonist node.
    """
    g = profile if profile is not None else GreedyProfile(inst)
    rng = random.Random(seed)
    report = CheckReport("subpath-bound")
    for _ in range(paths):
        P = random_path(rng, inst.root)
        effs = [path_efficiency(inst, P[s:]) for s in range(len(P) - 1)]
        strict = [any(g.f(j, x) == x.t for j in (1, 2)) for x in P[:-1]]
        for s, x in enumerate(P[:-1]):
            if x.t > 1 and not strict[s]:
                report.expect(effs[s] >= effs[s + 1], node=x, expected=f">= {effs[s + 1]}", actual=effs[s],
                              check="subpath-bound/consecutive")
                if x.x1 + 1 == P[s + 1].x1:
                    opt_here = max(welfare_curve(inst, x))
                    opt_next = max(welfare_curve(inst, P[s + 1]))
                    expected = inst.v(1, 1, x) + opt_next
                    report.expect(opt_here == expected, node=x, expected=expected, actual=opt_here,
                                  check="subpath-bound/opt-recursion")
        if not any(strict):
            report.expect(effs[0] == 1, node=P[0], expected=1, actual=effs[0], check="subpath-bound/full-efficiency")
        else:
            first = strict.index(True)
            report.expect(effs[0] >= effs[first], node=P[0], expected=f">= {effs[first]}", actual=effs[0],
                          check="subpath-bound/first-strict-monopsonist", detail=f"subpath from {P[first].label()}")
    return report


def lb_v2_check(inst: Instance, x: Node | None = None, monopsonist: int = 1, step: Fraction = Fraction(1, 4)) -> CheckReport:
    """Lower bound on the opponent's extended increments when one buyer is a strict monopsonist.

    For ell on a grid of ``step`` in [0, t): (t - ell) * vbar_opp(ell) must be at
    least the integral of the monopsonist's extension over [kappa, t - ell].
    Grid points with t - ell <= kappa are skipped.
    """
    x = inst.root if x is None else x
    i = monopsonist
    j = other(i)
    t = x.t
    if duopsony_factor(inst, i, x) != t:
        raise ValueError(f"buyer {i} is not a strict monopsonist at {x.label()}")
    kappa = greedy_demand(inst, i, x)
    vi, vj = inst.valuation(i), inst.valuation(j)
    report = CheckReport("lb-v2")
    ell = Fraction(0)
    while ell < t:
        if t - ell > kappa:
            lhs = real_incremental(vj, j, Role.OPPONENT, ell, x)
            rhs = real_integral(vi, i, Role.MONOPSONIST, kappa, t - ell, x) / (t - ell)
            report.expect(lhs >= rhs, node=x, buyer=j, expected=f">= {rhs}", actual=lhs, detail=f"ell={ell}")
        ell += step
    return report


def fractional_greedy_check(inst: Instance, x: Node | None = None, monopsonist: int = 1,
                            step: Fraction = Fraction(1, 4)) -> CheckReport:
    """Greedy utility dominates fractional greedy targets under strict monopsony."""
    x = inst.root if x is None else x
    i, j = monopsonist, other(monopsonist)
    t = x.t
    if duopsony_factor(inst, i, x) != t:
        raise ValueError(f"buyer {i} is not a strict monopsonist at {x.label()}")
    from .greedy import greedy_utility

    mu = greedy_utility(inst, i, x)
    vi, vj = inst.valuation(i), inst.valuation(j)
    report = CheckReport("fractional-greedy")
    k = Fraction(0)
    while k <= t:
        value = real_integral(vi, i, Role.MONOPSONIST, 0, k, x) - k * real_incremental(vj, j, Role.OPPONENT, t - k, x)
        report.expect(mu >= value, node=x, buyer=i, expected=f">= {value}", actual=mu, detail=f"k={k}")
        k += step
    return report


def worst_case_instance(T: int) -> Instance:
    """Buyer 1 values every item at 1; buyer 2's increments decay so that
    buyer 1's greedy demand is about T/e while the optimum gives her everything."""
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    m = floor_times_poa(T)
    v2 = [max(Fraction(m - i + 1, T - i + 1), Fraction(0)) for i in range(1, T + 1)]
    return Instance.of([1] * T, v2, name=f"worst-case-T{T}")


def harmonic_upper_bound(T: int) -> tuple[Fraction, Fraction]:
    """Bracket of 1 - (1/e) * sum_{i <= floor(T(1-1/e))} 1/(T-i+1)."""
    m = floor_times_poa(T)
    h = sum((Fraction(1, T - i + 1) for i in range(1, m + 1)), Fraction(0))
    return 1 - _INV_E_HI * h, 1 - _INV_E_LO * h


DEFAULT_FAMILY_T = (3, 10, 50, 200, 500)


@dataclass(frozen=True)
class PoaRow:
    T: int
    efficiency: Fraction
    name: str = ""
    tie: str = ""

    def decimal(self, digits: int = 12) -> str:
        return _decimal(self.efficiency, digits)


def _decimal(q: Fraction, digits: int = 12) -> str:
    scaled = round(q * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    return f"{sign}{scaled // 10**digits}.{scaled % 10**digits:0{digits}d}"


def worst_case_family(t_list=DEFAULT_FAMILY_T, tie: TieBreakRule | None = None) -> list[PoaRow]:
    tie = tie if tie is not None else TieBreakRule.buyer2()
    rows = []
    for T in t_list:
        inst = worst_case_instance(T)
        worst, _ = equilibrium_efficiency(inst, Mode.NO_OVERBID, tie)
        rows.append(PoaRow(T, worst, inst.name, tie.name))
    return rows


def poa_family_check(rows: list[PoaRow], limit_tolerance: Fraction | None = Fraction(5, 1000)) -> CheckReport:
    """Family efficiencies sit strictly above 1 - 1/e, weakly fall with T, stay
    below the harmonic-sum bound, and (when ``limit_tolerance`` is given) the
    last one is within that distance of the limit."""
    report = CheckReport("poa-family")
    for r in rows:
        report.expect(r.efficiency > POA_HI, expected="> 1 - 1/e", actual=r.efficiency, detail=f"T={r.T}")
        _, hi = harmonic_upper_bound(r.T)
        report.expect(r.efficiency <= hi, expected=f"<= harmonic bound {_decimal(hi)}", actual=r.efficiency,
                      check="poa-family/harmonic-bound", detail=f"T={r.T}")
    for a, b in zip(rows, rows[1:]):
        report.expect(b.efficiency <= a.efficiency, expected=f"<= {a.efficiency} (T={a.T})", actual=b.efficiency,
                      detail=f"T={b.T}")
    if rows:
        last = rows[-1]
        report.notes["last_gap"] = _decimal(last.efficiency - POA_LO)
        if limit_tolerance is not None:
            report.expect(last.efficiency - POA_LO < limit_tolerance, expected=f"within {limit_tolerance} of 1 - 1/e",
                          actual=last.efficiency, detail=f"T={last.T}")
    return report


def poa_floor_check(inst: Instance, ties=None, cap: int = DEFAULT_PATH_CAP) -> CheckReport:
    """Every no-overbidding equilibrium path reaches at least 1 - 1/e of the optimum."""
    from .equilibrium import DEFAULT_TIE_RULES

    report = CheckReport("poa-floor")
    for tie in ties if ties is not None else DEFAULT_TIE_RULES:
        worst, _ = equilibrium_efficiency(inst, Mode.NO_OVERBID, tie, cap)
        report.expect(worst >= POA_LO, node=inst.root, expected=">= 1 - 1/e", actual=worst, detail=f"tie {tie.name}")
    return report


def poa_suite(instances: list[Instance], ties=None, t_list=DEFAULT_FAMILY_T,
              cap: int = DEFAULT_PATH_CAP) -> dict[str, CheckReport]:
    floor = CheckReport("poa-floor")
    for inst in instances:
        floor.merge(poa_floor_check(inst, ties, cap))
    family = poa_family_check(worst_case_family(t_list))
    return {"poa-floor": floor, "poa-family": family}
