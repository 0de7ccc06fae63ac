"""Realised paths and mechanical checks of the equilibrium structure."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .equilibrium import Mode, SolvedGame, TieBreakRule, play, solve
from .greedy import GreedyProfile
from .lattice import Node, decision_nodes, nodes_by_remaining, other
from .reports import CheckReport
from .valuations import Instance

DEFAULT_PATH_CAP = 2**16


class PathCapExceeded(RuntimeError):
    """More positive-probability paths than the caller allowed."""

    def __init__(self, cap: int, start: Node):
        super().__init__(f"more than {cap} realised paths from {start.label()}; raise the path cap")
        self.cap = cap
        self.start = start


@dataclass(frozen=True)
class PathRealization:
    nodes: tuple[Node, ...]
    winners: tuple[int, ...]
    prices: tuple[Fraction, ...]
    probability: Fraction

    @property
    def start(self) -> Node:
        return self.nodes[0]

    @property
    def end(self) -> Node:
        return self.nodes[-1]

    def __len__(self) -> int:
        return len(self.winners)

    def items_won(self, i: int) -> int:
        return sum(1 for w in self.winners if w == i)

    def realized_utility(self, inst: Instance, i: int) -> Fraction:
        """Value of items won by ``i`` along the path minus the prices paid."""
        total = Fraction(0)
        for x, w, p in zip(self.nodes, self.winners, self.prices):
            if w == i:
                total += inst.v(i, 1, x) - p
        return total


@dataclass(frozen=True)
class PhaseSegmentation:
    """Round indices splitting a path into competitive, reduction and monopsony phases.

    Rounds ``[0, competitive_end)`` are competitive, ``[competitive_end,
    reduction_end)`` reduce competition, and the rest form the monopsony phase.
    """

    competitive_end: int
    reduction_end: int
    monopsonist: int | None
    length: int

    def phases(self) -> tuple[range, range, range]:
        return (
            range(0, self.competitive_end),
            range(self.competitive_end, self.reduction_end),
            range(self.reduction_end, self.length),
        )


def realized_paths(solved: SolvedGame, start: Node | None = None, cap: int = DEFAULT_PATH_CAP) -> list[PathRealization]:
    """All positive-probability paths from ``start`` to a terminal node.

    Raises :class:`PathCapExceeded` rather than truncating.
    """
    start = solved.root if start is None else start
    out: list[PathRealization] = []
    stack = [((start,), (), (), Fraction(1))]
    while stack:
        nodes, winners, prices, prob = stack.pop()
        x = nodes[-1]
        if x.is_terminal:
            out.append(PathRealization(nodes, winners, prices, prob))
            if len(out) > cap:
                raise PathCapExceeded(cap, start)
            continue
        price = solved.price(x)
        for w in reversed(solved.winners(x)):
            stack.append((nodes + (x.child(w),), winners + (w,), prices + (price,), prob * solved.win_prob(w, x)))
    return out


def reachable(solved: SolvedGame, start: Node | None = None) -> list[Node]:
    """Decision nodes lying on some realised path from ``start``, in play order."""
    start = solved.root if start is None else start
    if start.is_terminal:
        return []
    seen = {start}
    order = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for w in solved.winners(x):
                c = x.child(w)
                if not c.is_terminal and c not in seen:
                    seen.add(c)
                    nxt.append(c)
        nxt.sort()
        order.extend(nxt)
        frontier = nxt
    return order


def check_declining_prices(solved: SolvedGame, start: Node | None = None) -> CheckReport:
    """Prices never rise from one round to the next on a realised path.

    Every realised edge lies on some realised path, so comparing the price at
    each reachable node with the price at each reachable child covers all paths
    without enumerating them.
    """
    report = CheckReport("declining-prices")
    for x in reachable(solved, start):
        px = solved.price(x)
        for w in solved.winners(x):
            c = x.child(w)
            if c.is_terminal:
                continue
            report.expect(solved.price(c) <= px, node=x, buyer=w, expected=f"<= {px}", actual=solved.price(c),
                          detail=f"price after buyer {w} wins")
    return report


def simulate_greedy(inst: Instance, tie: TieBreakRule, profile: GreedyProfile | None = None) -> SolvedGame:
    """Outcome when both buyers bid min(threshold price, current increment) everywhere."""
    g = profile if profile is not None else GreedyProfile(inst)
    return play(inst, Mode.GREEDY, tie, lambda _inst, x, i, _marginal: g.bid(i, x))


def greedy_outcome_check(
    inst: Instance, start: Node | None = None, tie: TieBreakRule | None = None,
    profile: GreedyProfile | None = None, cap: int = DEFAULT_PATH_CAP,
) -> CheckReport:
    """Outcome of greedy play from ``start`` on every realised path.

    Asserts that the designated buyer (a monopsonist, else some buyer with the
    lowest threshold price) realises exactly her greedy utility, that each buyer
    buys at least her greedy demand, that the price follows the designated
    buyer's threshold price and then her baseline price once she demands the
    whole remaining supply, and that prices never rise.
    """
    tie = tie if tie is not None else TieBreakRule.uniform()
    g = profile if profile is not None else GreedyProfile(inst)
    start = inst.root if start is None else start
    report = CheckReport("greedy-outcome")
    if start.is_terminal:
        return report
    sim = simulate_greedy(inst, tie, g)
    monopsonists = [i for i in (1, 2) if g.f(other(i), start) == 0]
    if monopsonists:
        candidates = monopsonists
    else:
        lowest = min(g.p(1, start), g.p(2, start))
        candidates = [i for i in (1, 2) if g.p(i, start) == lowest]
    for path in realized_paths(sim, start, cap):
        utils = {i: path.realized_utility(inst, i) for i in (1, 2)}
        if monopsonists:
            for i in monopsonists:
                report.expect(utils[i] == g.mu(i, start), node=start, buyer=i, expected=g.mu(i, start),
                              actual=utils[i], detail="monopsonist realises greedy utility")
            designated = monopsonists
        else:
            designated = [i for i in candidates if utils[i] == g.mu(i, start)]
            report.expect(bool(designated), node=start, expected="some argmin-threshold buyer at greedy utility",
                          actual={i: utils[i] for i in candidates},
                          detail=f"greedy utilities {[g.mu(i, start) for i in candidates]}")
        for j in (1, 2):
            report.expect(path.items_won(j) >= g.kappa(j, start), node=start, buyer=j,
                          expected=f">= {g.kappa(j, start)}", actual=path.items_won(j), detail="items bought")
        if designated:
            report.expect(any(_price_pattern_holds(g, path, i) for i in designated), node=start,
                          expected="threshold then baseline prices", actual=[str(p) for p in path.prices],
                          detail=f"designated buyers {designated}")
        for a, b in zip(path.prices, path.prices[1:]):
            report.expect(b <= a, node=start, expected=f"<= {a}", actual=b, detail="declining greedy prices")
    return report


def _price_pattern_holds(g: GreedyProfile, path: PathRealization, i: int) -> bool:
    binding = False
    for x, price in zip(path.nodes, path.prices):
        binding = binding or g.kappa(i, x) == x.t
        target = g.beta(i, x) if binding else g.p(i, x)
        if price != target:
            return False
    return True


def monopsonist_equivalence_check(
    inst: Instance, tie: TieBreakRule | None = None, profile: GreedyProfile | None = None,
    solved: SolvedGame | None = None,
) -> CheckReport:
    """Where some buyer is a monopsonist, equilibrium and greedy play agree.

    Compared at every such node: the price and both expected forward utilities.
    Being a monopsonist is hereditary, so this covers every subgame rooted at a
    monopsonist node.
    """
    tie = tie if tie is not None else TieBreakRule.uniform()
    g = profile if profile is not None else GreedyProfile(inst)
    eq = solved if solved is not None else solve(inst, Mode.NO_OVERBID, tie)
    sim = simulate_greedy(inst, tie, g)
    report = CheckReport("monopsonist-equivalence")
    for x in decision_nodes(inst.T):
        if not any(g.f(i, x) == 0 for i in (1, 2)):
            continue
        report.expect(eq.price(x) == sim.price(x), node=x, expected=sim.price(x), actual=eq.price(x), detail="price")
        for i in (1, 2):
            report.expect(eq.u(i, x) == sim.u(i, x), node=x, buyer=i, expected=sim.u(i, x), actual=eq.u(i, x),
                          detail="forward utility")
    return report


def quasi_monopsonist_table(solved: SolvedGame) -> dict[Node, tuple[bool, bool]]:
    """For every decision node, whether each buyer is a quasi-monopsonist there.

    Buyer i qualifies at x when some realised path from x reaches a final-round
    node y with b_i(y) >= b_{-i}(y); computed bottom-up over the lattice.
    """
    table: dict[Node, tuple[bool, bool]] = {}
    for t, group in nodes_by_remaining(solved.T):
        if t == 0:
            continue
        for x in group:
            if t == 1:
                b1, b2 = solved.bids[x]
                table[x] = (b1 >= b2, b2 >= b1)
            else:
                kids = [table[x.child(w)] for w in solved.winners(x)]
                table[x] = (any(k[0] for k in kids), any(k[1] for k in kids))
    return table


def is_quasi_monopsonist(solved: SolvedGame, i: int, x: Node, table: dict | None = None) -> bool:
    if x.is_terminal:
        raise ValueError(f"{x.label()} is terminal")
    table = table if table is not None else quasi_monopsonist_table(solved)
    return table[x][i - 1]


def eql_character_check(
    solved: SolvedGame, profile: GreedyProfile | None = None, on_path_only: bool = False,
) -> CheckReport:
    """Three structural statements about no-overbidding equilibria.

    (a) while neither buyer demands the whole remaining supply, the price is at
    least the lower threshold price; (b) some buyer is a quasi-monopsonist;
    (c) a quasi-monopsonist i at x stays one at x + e_{-i} - e_i.
    Checked at every decision node by default, since each is the root of a
    subgame; ``on_path_only`` restricts to nodes reachable from the source.
    """
    g = profile if profile is not None else GreedyProfile(solved.instance)
    qm = quasi_monopsonist_table(solved)
    report = CheckReport("eql-character")
    nodes = reachable(solved) if on_path_only else solved.decision_nodes()
    for x in nodes:
        t = x.t
        if g.kappa(1, x) < t and g.kappa(2, x) < t:
            floor = min(g.p(1, x), g.p(2, x))
            report.expect(solved.price(x) >= floor, node=x, expected=f">= {floor}", actual=solved.price(x),
                          check="eql-character/price-floor")
        report.expect(any(qm[x]), node=x, expected="a quasi-monopsonist", actual=qm[x],
                      check="eql-character/exists")
        for i in (1, 2):
            if not qm[x][i - 1]:
                continue
            d = (-1, 1) if i == 1 else (1, -1)
            y = x.shifted(*d)
            if y is None or y.is_terminal:
                continue
            report.expect(qm[y][i - 1], node=x, buyer=i, expected=f"quasi-monopsonist at {y.label()}",
                          actual=qm[y], check="eql-character/shift")
    return report


def phase_segmentation(
    solved: SolvedGame, profile: GreedyProfile, path: PathRealization, boundary: str = "quasi",
    qm_table: dict | None = None,
) -> PhaseSegmentation:
    """Split a realised path into its three phases.

    The monopsony phase starts at the first round where the final-round winner
    demands the whole remaining supply. The competitive phase ends at the first
    round from which a single buyer is the only quasi-monopsonist at every later
    round (``boundary="quasi"``), or at the first round with a monopsonist
    (``boundary="monopsonist"``).
    """
    n = len(path)
    if n == 0:
        return PhaseSegmentation(0, 0, None, 0)
    final_winner = path.winners[-1]
    reduction_end = next(
        (j for j, x in enumerate(path.nodes[:n]) if profile.kappa(final_winner, x) == x.t), n
    )
    rounds = path.nodes[:n]
    if boundary == "quasi":
        qm = qm_table if qm_table is not None else quasi_monopsonist_table(solved)
        sole = [_sole(qm[x]) for x in rounds]
        competitive_end = n
        monopsonist = None
        for j in range(n - 1, -1, -1):
            if sole[j] is None or (monopsonist is not None and sole[j] != monopsonist):
                break
            monopsonist = sole[j]
            competitive_end = j
    elif boundary == "monopsonist":
        competitive_end = n
        monopsonist = None
        for j, x in enumerate(rounds):
            mons = [i for i in (1, 2) if profile.f(other(i), x) == 0]
            if mons:
                competitive_end = j
                monopsonist = mons[0] if len(mons) == 1 else final_winner
                break
    else:
        raise ValueError(f"unknown phase boundary {boundary!r}")
    return PhaseSegmentation(competitive_end, reduction_end, monopsonist, n)


def _sole(flags: tuple[bool, bool]) -> int | None:
    if flags[0] and not flags[1]:
        return 1
    if flags[1] and not flags[0]:
        return 2
    return None


def phase_check(solved: SolvedGame, profile: GreedyProfile | None = None, cap: int = DEFAULT_PATH_CAP) -> CheckReport:
    """Phase ordering and persistence of entire-supply demand along realised paths."""
    g = profile if profile is not None else GreedyProfile(solved.instance)
    qm = quasi_monopsonist_table(solved)
    report = CheckReport("phases")
    for path in realized_paths(solved, cap=cap):
        seg = phase_segmentation(solved, g, path, qm_table=qm)
        report.expect(seg.competitive_end <= seg.reduction_end, node=path.start, expected=f"<= {seg.reduction_end}",
                      actual=seg.competitive_end, detail="competitive phase ends before monopsony phase")
        for i in (1, 2):
            binding = False
            for x in path.nodes[:-1]:
                full = g.kappa(i, x) == x.t
                if binding:
                    report.expect(full, node=x, buyer=i, expected="entire-supply demand persists", actual=False)
                binding = binding or full
    return report


def path_probability_check(solved: SolvedGame, start: Node | None = None, cap: int = DEFAULT_PATH_CAP) -> CheckReport:
    report = CheckReport("path-probabilities")
    paths = realized_paths(solved, start, cap)
    total = sum((p.probability for p in paths), Fraction(0))
    report.expect(total == 1, node=start or solved.root, expected=1, actual=total)
    for p in paths:
        report.expect(p.probability > 0, node=p.start, expected="> 0", actual=p.probability)
    return report
