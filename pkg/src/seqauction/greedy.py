"""Greedy bidding quantities.

A greedy buyer at node ``x`` waits ``t - k`` rounds and then outbids the
opponent for the last ``k`` items. From the payoff of that plan we derive the
greedy utility and demand, the duopsony factor, and the baseline and threshold
prices. Terminal nodes carry zero utility, demand and duopsony factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice import Node, decision_nodes, other
from .valuations import Instance

ZERO = Fraction(0)


def greedy_payoffs(inst: Instance, i: int, x: Node) -> list[Fraction]:
    """Payoffs of targeting k = 0..t items, as a list indexed by k."""
    t = x.t
    j = other(i)
    out = [ZERO]
    for k in range(1, t + 1):
        out.append(inst.V(i, k, x) - k * inst.v(j, t - k + 1, x))
    return out


def greedy_payoff(inst: Instance, i: int, k: int, x: Node) -> Fraction:
    t = x.t
    if not 0 <= k <= t:
        raise ValueError(f"target k = {k} outside 0..{t} at {x.label()}")
    if k == 0:
        return ZERO
    return inst.V(i, k, x) - k * inst.v(other(i), t - k + 1, x)


def greedy_utility(inst: Instance, i: int, x: Node) -> Fraction:
    if x.is_terminal:
        return ZERO
    return max(greedy_payoffs(inst, i, x))


def greedy_demand(inst: Instance, i: int, x: Node) -> int:
    """Smallest maximiser of the greedy payoff."""
    if x.is_terminal:
        return 0
    payoffs = greedy_payoffs(inst, i, x)
    return payoffs.index(max(payoffs))


def duopsony_factor(inst: Instance, i: int, x: Node) -> int:
    t = x.t
    j = other(i)
    best = 0
    for k in range(1, t + 1):
        if inst.v(i, k, x) > inst.v(j, t - k + 1, x):
            best = k
    return best


def baseline_price(inst: Instance, i: int, x: Node) -> Fraction:
    if x.is_terminal:
        raise ValueError(f"baseline price undefined at terminal node {x.label()}")
    if duopsony_factor(inst, i, x) == 0:
        return inst.v(i, 1, x)
    return inst.v(other(i), x.t - greedy_demand(inst, i, x) + 1, x)


def threshold_price(inst: Instance, i: int, x: Node) -> Fraction:
    if x.is_terminal:
        raise ValueError(f"threshold price undefined at terminal node {x.label()}")
    return (
        inst.v(i, 1, x)
        + greedy_utility(inst, i, x.child(i))
        - greedy_utility(inst, i, x.child(other(i)))
    )


def greedy_bid(inst: Instance, i: int, x: Node) -> Fraction:
    """Threshold price capped at the current increment."""
    return min(threshold_price(inst, i, x), inst.v(i, 1, x))


@dataclass(frozen=True)
class GreedyEntry:
    f: int
    mu: Fraction
    kappa: int
    beta: Fraction | None
    p: Fraction | None
    payoffs: tuple[Fraction, ...]


_TERMINAL = GreedyEntry(0, ZERO, 0, None, None, (ZERO,))


class GreedyProfile:
    """Greedy quantities for every node and both buyers, built in one backward pass.

    Per-node payoff vectors cost O(t) with prefix sums, so the whole table is
    O(T^3) exact operations; threshold prices read cached child utilities.
    """

    def __init__(self, inst: Instance):
        self.instance = inst
        self._table: dict[Node, tuple[GreedyEntry, GreedyEntry]] = {}
        T = inst.T
        for x in decision_nodes(T):
            pair = []
            for i in (1, 2):
                payoffs = greedy_payoffs(inst, i, x)
                mu = max(payoffs)
                kappa = payoffs.index(mu)
                f = duopsony_factor(inst, i, x)
                if f == 0:
                    beta = inst.v(i, 1, x)
                else:
                    beta = inst.v(other(i), x.t - kappa + 1, x)
                pair.append((f, mu, kappa, beta, tuple(payoffs)))
            self._table[x] = tuple(  # type: ignore[assignment]
                GreedyEntry(f, mu, kappa, beta, None, payoffs) for f, mu, kappa, beta, payoffs in pair
            )
        # threshold prices need both children, which are all in the table by now
        for x in decision_nodes(T):
            entries = []
            for i in (1, 2):
                e = self._table[x][i - 1]
                p = inst.v(i, 1, x) + self.mu(i, x.child(i)) - self.mu(i, x.child(other(i)))
                entries.append(GreedyEntry(e.f, e.mu, e.kappa, e.beta, p, e.payoffs))
            self._table[x] = (entries[0], entries[1])

    def entry(self, i: int, x: Node) -> GreedyEntry:
        if x.is_terminal:
            return _TERMINAL
        return self._table[x][i - 1]

    def f(self, i: int, x: Node) -> int:
        return self.entry(i, x).f

    def mu(self, i: int, x: Node) -> Fraction:
        return self.entry(i, x).mu

    def kappa(self, i: int, x: Node) -> int:
        return self.entry(i, x).kappa

    def beta(self, i: int, x: Node) -> Fraction:
        b = self.entry(i, x).beta
        if b is None:
            raise ValueError(f"baseline price undefined at terminal node {x.label()}")
        return b

    def p(self, i: int, x: Node) -> Fraction:
        p = self.entry(i, x).p
        if p is None:
            raise ValueError(f"threshold price undefined at terminal node {x.label()}")
        return p

    def payoff(self, i: int, k: int, x: Node) -> Fraction:
        payoffs = self.entry(i, x).payoffs
        if not 0 <= k < len(payoffs):
            raise ValueError(f"target k = {k} outside 0..{x.t} at {x.label()}")
        return payoffs[k]

    def bid(self, i: int, x: Node) -> Fraction:
        return min(self.p(i, x), self.instance.v(i, 1, x))

    def is_monopsonist(self, i: int, x: Node) -> bool:
        return self.f(other(i), x) == 0

    def is_strict_monopsonist(self, i: int, x: Node) -> bool:
        return self.f(i, x) == x.t

    def nodes(self) -> list[Node]:
        return list(self._table)
