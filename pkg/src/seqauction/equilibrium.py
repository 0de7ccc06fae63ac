"""Backward-induction equilibria of the two-buyer sequential second-price auction."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .lattice import Node, decision_nodes, nodes_by_remaining, other
from .reports import CheckReport
from .valuations import Instance, Rational, as_fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Mode(enum.Enum):
    """Bidding regime.

    ``GREEDY`` is not an equilibrium regime: both buyers bid the capped
    threshold price. It shares the outcome machinery so greedy and equilibrium
    play can be compared node by node.
    """

    NO_OVERBID = "no-overbid"
    OVERBID = "overbid"
    GREEDY = "greedy"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        aliases = {"no-overbid": cls.NO_OVERBID, "nooverbid": cls.NO_OVERBID, "overbid": cls.OVERBID,
                   "overbid-allowed": cls.OVERBID, "greedy": cls.GREEDY}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown mode {text!r}; use no-overbid or overbid") from None


@dataclass(frozen=True)
class TieBreakRule:
    """Probability that buyer 1 takes the item when the two bids are equal.

    ``table`` overrides ``q`` at specific nodes, keyed by ``(x1, x2)``.
    """

    q: Fraction = Fraction(1, 2)
    table: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        q = as_fraction(self.q)
        if not 0 <= q <= 1:
            raise ValueError(f"tie probability {q} outside [0, 1]")
        table = {tuple(k): as_fraction(v) for k, v in self.table.items()}
        for k, v in table.items():
            if not 0 <= v <= 1:
                raise ValueError(f"tie probability {v} at {k} outside [0, 1]")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "table", table)
        if not self.name:
            object.__setattr__(self, "name", _default_name(q) if not table else f"table(default q={q})")

    def q_at(self, x: Node) -> Fraction:
        return self.table.get((x.x1, x.x2), self.q)

    @property
    def deterministic(self) -> bool:
        return all(q in (ZERO, ONE) for q in (self.q, *self.table.values()))

    @classmethod
    def buyer1(cls) -> "TieBreakRule":
        return cls(ONE)

    @classmethod
    def buyer2(cls) -> "TieBreakRule":
        return cls(ZERO)

    @classmethod
    def uniform(cls) -> "TieBreakRule":
        return cls(Fraction(1, 2))

    @classmethod
    def constant(cls, q: Rational) -> "TieBreakRule":
        return cls(as_fraction(q))

    @classmethod
    def per_node(cls, table: Mapping[tuple[int, int], Rational], default: Rational = Fraction(1, 2)) -> "TieBreakRule":
        return cls(as_fraction(default), {k: as_fraction(v) for k, v in table.items()})

    @classmethod
    def parse(cls, text: str) -> "TieBreakRule":
        """Accepts ``buyer1``, ``buyer2``, ``uniform`` or ``q=<rational>``."""
        s = text.strip().lower()
        if s == "buyer1":
            return cls.buyer1()
        if s == "buyer2":
            return cls.buyer2()
        if s == "uniform":
            return cls.uniform()
        if s.startswith("q="):
            return cls.constant(s[2:])
        raise ValueError(f"unknown tie rule {text!r}; use buyer1, buyer2, uniform or q=<p/q>")

    def spec(self) -> str:
        if self.table:
            return f"table:{self.q}"
        return _default_name(self.q)


def _default_name(q: Fraction) -> str:
    if q == ONE:
        return "buyer1"
    if q == ZERO:
        return "buyer2"
    if q == Fraction(1, 2):
        return "uniform"
    return f"q={q}"


@dataclass
class SolvedGame:
    """Bids, tie outcomes and expected forward utilities at every node."""

    instance: Instance
    mode: Mode
    tie: TieBreakRule
    bids: dict[Node, tuple[Fraction, Fraction]]
    win_prob1: dict[Node, Fraction]
    utilities: dict[Node, tuple[Fraction, Fraction]]

    @property
    def T(self) -> int:
        return self.instance.T

    @property
    def root(self) -> Node:
        return self.instance.root

    def bid(self, i: int, x: Node) -> Fraction:
        return self.bids[x][i - 1]

    def u(self, i: int, x: Node) -> Fraction:
        return self.utilities[x][i - 1]

    def win_prob(self, i: int, x: Node) -> Fraction:
        q = self.win_prob1[x]
        return q if i == 1 else 1 - q

    def price(self, x: Node) -> Fraction:
        """Second-highest bid, paid by whoever wins at ``x``."""
        b1, b2 = self.bids[x]
        return min(b1, b2)

    def winners(self, x: Node) -> list[int]:
        """Buyers winning at ``x`` with positive probability."""
        q = self.win_prob1[x]
        return [i for i, p in ((1, q), (2, 1 - q)) if p > 0]

    def decision_nodes(self) -> list[Node]:
        return decision_nodes(self.T)


BidRule = Callable[[Instance, Node, int, Fraction], Fraction]


def _win_prob1(b1: Fraction, b2: Fraction, tie: TieBreakRule, x: Node) -> Fraction:
    if b1 > b2:
        return ONE
    if b1 < b2:
        return ZERO
    return tie.q_at(x)


def forward_utility(
    inst: Instance, x: Node, i: int, own_bid: Fraction, other_bid: Fraction, tie: TieBreakRule,
    u_win: Fraction, u_lose: Fraction,
) -> Fraction:
    """Expected forward utility of buyer ``i`` at ``x`` given both bids and continuations."""
    b1, b2 = (own_bid, other_bid) if i == 1 else (other_bid, own_bid)
    q1 = _win_prob1(b1, b2, tie, x)
    pi = q1 if i == 1 else 1 - q1
    return pi * (inst.v(i, 1, x) - other_bid + u_win) + (1 - pi) * u_lose


def play(inst: Instance, mode: Mode, tie: TieBreakRule, bid_rule: BidRule) -> SolvedGame:
    """Run the forward-utility recursion with bids supplied by ``bid_rule``.

    ``bid_rule(inst, x, i, marginal)`` receives the buyer's marginal value for
    winning, computed from the already-solved children.
    """
    T = inst.T
    bids: dict[Node, tuple[Fraction, Fraction]] = {}
    win1: dict[Node, Fraction] = {}
    util: dict[Node, tuple[Fraction, Fraction]] = {}
    for t, group in nodes_by_remaining(T):
        for x in group:
            if t == 0:
                util[x] = (ZERO, ZERO)
                continue
            c1, c2 = x.child(1), x.child(2)
            u1_win, u2_lose = util[c1]
            u1_lose, u2_win = util[c2]
            v1 = inst.v1.increments[x.x1]
            v2 = inst.v2.increments[x.x2]
            b1 = bid_rule(inst, x, 1, v1 + u1_win - u1_lose)
            b2 = bid_rule(inst, x, 2, v2 + u2_win - u2_lose)
            q = _win_prob1(b1, b2, tie, x)
            # winner pays the loser's bid
            if q == ONE:
                u1 = v1 - b2 + u1_win
                u2 = u2_lose
            elif q == ZERO:
                u1 = u1_lose
                u2 = v2 - b1 + u2_win
            else:
                u1 = q * (v1 - b2 + u1_win) + (1 - q) * u1_lose
                u2 = (1 - q) * (v2 - b1 + u2_win) + q * u2_lose
            bids[x] = (b1, b2)
            win1[x] = q
            util[x] = (u1, u2)
    return SolvedGame(inst, mode, tie, bids, win1, util)


def _no_overbid_bid(inst: Instance, x: Node, i: int, marginal: Fraction) -> Fraction:
    cap = inst.v1.increments[x.x1] if i == 1 else inst.v2.increments[x.x2]
    return marginal if marginal < cap else cap


def _overbid_bid(inst: Instance, x: Node, i: int, marginal: Fraction) -> Fraction:
    return marginal


def solve(inst: Instance, mode: Mode = Mode.NO_OVERBID, tie: TieBreakRule | None = None) -> SolvedGame:
    """Unique equilibrium under the given regime and tie-breaking rule.

    With overbidding allowed each buyer bids its marginal value for winning;
    under no-overbidding that bid is capped at the current incremental value.
    Overbid-mode bids are used as produced, negative values included.
    """
    tie = tie if tie is not None else TieBreakRule.uniform()
    if mode is Mode.NO_OVERBID:
        return play(inst, mode, tie, _no_overbid_bid)
    if mode is Mode.OVERBID:
        return play(inst, mode, tie, _overbid_bid)
    raise ValueError(f"solve() handles equilibrium regimes only, not {mode}")


def default_eta(solved: SolvedGame) -> Fraction:
    """1/1000 of the smallest nonzero gap between the two bids at any node."""
    gaps = [abs(b1 - b2) for b1, b2 in solved.bids.values() if b1 != b2]
    return (min(gaps) if gaps else ONE) / 1000


def deviation_check(solved: SolvedGame, eta: Fraction | None = None) -> CheckReport:
    """One-shot deviation oracle.

    At every decision node each buyer tries a finite set of alternative bids
    against the opponent's fixed bid, with continuation play unchanged. No
    alternative may raise the buyer's expected forward utility at that node.
    """
    inst = solved.instance
    eta = default_eta(solved) if eta is None else as_fraction(eta)
    report = CheckReport("deviation")
    report.notes["eta"] = eta
    for x in solved.decision_nodes():
        for i in (1, 2):
            j = other(i)
            opp = solved.bid(j, x)
            vi = inst.v(i, 1, x)
            u_win = solved.u(i, x.child(i))
            u_lose = solved.u(i, x.child(j))
            marginal = vi + u_win - u_lose
            candidates = {ZERO, opp - eta, opp, opp + eta, vi, marginal, min(vi, marginal)}
            if solved.mode is Mode.NO_OVERBID:
                candidates = {c for c in candidates if c <= vi}
            current = solved.u(i, x)
            for c in sorted(candidates):
                alt = forward_utility(inst, x, i, c, opp, solved.tie, u_win, u_lose)
                report.expect(
                    alt <= current, node=x, buyer=i, expected=f"<= {current}", actual=alt,
                    detail=f"deviation bid {c} against {opp}",
                )
    return report


def recursion_check(solved: SolvedGame) -> CheckReport:
    """Recompute every utility from the forward-utility recursion and compare."""
    inst = solved.instance
    report = CheckReport("utility-recursion")
    for x, (u1, u2) in solved.utilities.items():
        if x.is_terminal:
            report.expect(u1 == 0 and u2 == 0, node=x, expected=(0, 0), actual=(u1, u2))
            continue
        for i, ui in ((1, u1), (2, u2)):
            j = other(i)
            expected = forward_utility(
                inst, x, i, solved.bid(i, x), solved.bid(j, x), solved.tie,
                solved.u(i, x.child(i)), solved.u(i, x.child(j)),
            )
            report.expect(ui == expected, node=x, buyer=i, expected=expected, actual=ui)
    return report


def no_overbid_cap_check(solved: SolvedGame) -> CheckReport:
    report = CheckReport("no-overbid-cap")
    inst = solved.instance
    for x in solved.decision_nodes():
        for i in (1, 2):
            cap = inst.v(i, 1, x)
            report.expect(solved.bid(i, x) <= cap, node=x, buyer=i, expected=f"<= {cap}", actual=solved.bid(i, x))
    return report


def price_bound_check(solved: SolvedGame) -> CheckReport:
    """Price at x never exceeds v_i(1|x) + u_i(x+e_i) - u_i(x) for either buyer."""
    report = CheckReport("price-bound")
    inst = solved.instance
    for x in solved.decision_nodes():
        price = solved.price(x)
        for i in (1, 2):
            bound = inst.v(i, 1, x) + solved.u(i, x.child(i)) - solved.u(i, x)
            report.expect(price <= bound, node=x, buyer=i, expected=f"<= {bound}", actual=price)
    return report


DEFAULT_TIE_RULES = (TieBreakRule.buyer2(), TieBreakRule.uniform(), TieBreakRule.buyer1())


def utilities_tiebreak_independence_check(
    inst: Instance, rules: tuple[TieBreakRule, ...] = DEFAULT_TIE_RULES
) -> CheckReport:
    """With overbidding allowed, utilities must not depend on the tie rule.

    No-overbid utilities may legitimately vary with the rule; the spread is
    recorded in ``notes`` without being asserted.
    """
    report = CheckReport("tiebreak-independence")
    games = [solve(inst, Mode.OVERBID, r) for r in rules]
    base = games[0]
    for g in games[1:]:
        for x, u in base.utilities.items():
            report.expect(
                g.utilities[x] == u, node=x, expected=u, actual=g.utilities[x],
                detail=f"tie rule {g.tie.name} vs {base.tie.name}",
            )
    no_over = [solve(inst, Mode.NO_OVERBID, r) for r in rules]
    root = inst.root
    report.notes["no_overbid_root_utilities"] = [
        f"{g.tie.name}: ({g.u(1, root)}, {g.u(2, root)})" for g in no_over
    ]
    report.notes["no_overbid_tie_dependent"] = len({g.utilities[root] for g in no_over}) > 1
    return report
