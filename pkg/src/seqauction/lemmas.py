"""Node-level structural properties of greedy bidding, checked exhaustively.

Each check walks every decision node of an instance, for both buyers, and
compares exact rationals. Properties that relate a node to its children only
fire where the children are decision nodes too (t > 1), matching the
hypotheses under which they are stated.
"""

from __future__ import annotations

from typing import Callable

from .greedy import GreedyProfile
from .lattice import Node, decision_nodes, other
from .reports import CheckReport
from .valuations import Instance

LemmaCheck = Callable[[GreedyProfile, Node, int, CheckReport], None]


def _no_power_persists(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    if x.t > 1 and g.f(i, x) == 0:
        for w in (1, 2):
            r.expect(g.f(i, x.child(w)) == 0, node=x, buyer=i, expected=0, actual=g.f(i, x.child(w)),
                     detail=f"f after buyer {w} wins")


def _strict_monopsony_persists(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    if t > 1 and g.f(i, x) == t:
        for w in (1, 2):
            r.expect(g.f(i, x.child(w)) == t - 1, node=x, buyer=i, expected=t - 1, actual=g.f(i, x.child(w)),
                     detail=f"f after buyer {w} wins")


def _partial_power_shift(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t, f = x.t, g.f(i, x)
    if t > 1 and 0 < f < t:
        r.expect(g.f(i, x.child(i)) == f - 1, node=x, buyer=i, expected=f - 1, actual=g.f(i, x.child(i)),
                 detail="f after own win")
        j = other(i)
        r.expect(g.f(i, x.child(j)) == f, node=x, buyer=i, expected=f, actual=g.f(i, x.child(j)),
                 detail="f after opponent win")


def _duopsony_factor_evolution(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    # the aggregated statement, with max(f - 1, 0) on the winning branch
    t, f = x.t, g.f(i, x)
    if t > 1:
        r.expect(g.f(i, x.child(i)) == max(f - 1, 0), node=x, buyer=i, expected=max(f - 1, 0),
                 actual=g.f(i, x.child(i)), detail="own win")
        j = other(i)
        r.expect(g.f(i, x.child(j)) == min(f, t - 1), node=x, buyer=i, expected=min(f, t - 1),
                 actual=g.f(i, x.child(j)), detail="opponent win")


def _lose_payoff_k(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    lost = x.child(other(i))
    for k in range(x.t):
        r.expect(g.payoff(i, k, lost) == g.payoff(i, k, x), node=x, buyer=i, expected=g.payoff(i, k, x),
                 actual=g.payoff(i, k, lost), detail=f"k={k}")


def _win_payoff_k(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    if t <= 1:
        return
    inst = g.instance
    won = x.child(i)
    for k in range(1, t + 1):
        expected = g.payoff(i, k, x) - inst.v(i, 1, x) + inst.v(other(i), t - k + 1, x)
        r.expect(g.payoff(i, k - 1, won) == expected, node=x, buyer=i, expected=expected,
                 actual=g.payoff(i, k - 1, won), detail=f"k={k}")


def _utility_evolution(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    j = other(i)
    mu, mu_lost = g.mu(i, x), g.mu(i, x.child(j))
    if g.kappa(i, x) < t:
        r.expect(mu_lost == mu, node=x, buyer=i, expected=mu, actual=mu_lost, detail="mu after loss, kappa < t")
    else:
        r.expect(mu_lost < mu, node=x, buyer=i, expected=f"< {mu}", actual=mu_lost, detail="mu after loss, kappa = t")
    if g.kappa(i, x) > 0:
        bound = mu - g.instance.v(i, 1, x) + g.beta(i, x)
        mu_won = g.mu(i, x.child(i))
        r.expect(mu_won >= bound, node=x, buyer=i, expected=f">= {bound}", actual=mu_won, detail="mu after win")


def _demand_evolution(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    kappa = g.kappa(i, x)
    j = other(i)
    if kappa < t:
        r.expect(g.kappa(i, x.child(j)) == kappa, node=x, buyer=i, expected=kappa, actual=g.kappa(i, x.child(j)),
                 detail="kappa after loss")
    if t > 1:
        won = g.kappa(i, x.child(i))
        r.expect(won >= kappa - 1, node=x, buyer=i, expected=f">= {kappa - 1}", actual=won, detail="kappa after win")
        if kappa == t:
            r.expect(won == t - 1, node=x, buyer=i, expected=t - 1, actual=won, detail="entire supply after win")


def _baseline_below_threshold(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    r.expect(g.p(i, x) >= g.beta(i, x), node=x, buyer=i, expected=f">= {g.beta(i, x)}", actual=g.p(i, x))


def _strictly_greater(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    if g.kappa(i, x) == x.t:
        r.expect(g.p(i, x) > g.beta(i, x), node=x, buyer=i, expected=f"> {g.beta(i, x)}", actual=g.p(i, x))


def _threshold_after_win(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    if not (g.f(i, x) > 1 and g.kappa(i, x) < t):
        return
    won = x.child(i)
    p = g.p(i, x)
    beta_won = g.beta(i, won)
    r.expect(beta_won >= p, node=x, buyer=i, expected=f">= {p}", actual=beta_won, detail="baseline after win")
    if beta_won == p:
        k_hat = g.kappa(i, won)
        r.expect(g.payoff(i, k_hat + 1, x) == g.mu(i, x), node=x, buyer=i, expected=g.mu(i, x),
                 actual=g.payoff(i, k_hat + 1, x), detail="equality requires payoff(kappa'+1) = mu")
    r.expect(g.p(i, won) >= p, node=x, buyer=i, expected=f">= {p}", actual=g.p(i, won), detail="threshold after win")


def _threshold_after_loss(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    if not (g.f(i, x) > 1 and g.kappa(i, x) < t - 1):
        return
    p = g.p(i, x)
    p_lost = g.p(i, x.child(other(i)))
    r.expect(p_lost <= p, node=x, buyer=i, expected=f"<= {p}", actual=p_lost, detail="threshold after loss")
    strict = p_lost < p
    full_after_win = g.kappa(i, x.child(i)) == t - 1
    r.expect(strict == full_after_win, node=x, buyer=i, expected=full_after_win, actual=strict,
             detail="strict decrease iff entire-supply demand after a win")


def _top_marginal(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    t = x.t
    if not (g.kappa(i, x) < t and g.f(i, x) > 0):
        return
    k_hat = g.kappa(i, x.child(i))
    bound = g.instance.v(other(i), t - k_hat, x)
    p = g.p(i, x)
    r.expect(p <= bound, node=x, buyer=i, expected=f"<= {bound}", actual=p)
    if p == bound:
        r.expect(g.payoff(i, k_hat + 1, x) == g.mu(i, x), node=x, buyer=i, expected=g.mu(i, x),
                 actual=g.payoff(i, k_hat + 1, x), detail="tightness requires payoff(kappa'+1) = mu")


def _profile_invariants(g: GreedyProfile, x: Node, i: int, r: CheckReport) -> None:
    e = g.entry(i, x)
    r.expect(e.kappa <= e.f, node=x, buyer=i, expected=f"<= {e.f}", actual=e.kappa, detail="kappa <= f")
    if e.f == 0:
        r.expect(e.mu == 0 and e.kappa == 0, node=x, buyer=i, expected=(0, 0), actual=(e.mu, e.kappa),
                 detail="no duopsony power")
    else:
        r.expect(e.mu > 0, node=x, buyer=i, expected="> 0", actual=e.mu, detail="duopsony power gives profit")


# The thirteen properties of the acceptance suite, keyed by a stable name.
LEMMAS: dict[str, LemmaCheck] = {
    "no-power-persists": _no_power_persists,
    "strict-monopsony-persists": _strict_monopsony_persists,
    "partial-power-shift": _partial_power_shift,
    "duopsony-factor-evolution": _duopsony_factor_evolution,
    "lose-payoff-k": _lose_payoff_k,
    "win-payoff-k": _win_payoff_k,
    "greedy-utility-evolution": _utility_evolution,
    "greedy-demand-evolution": _demand_evolution,
    "baseline-below-threshold": _baseline_below_threshold,
    "threshold-strictly-above-baseline": _strictly_greater,
    "threshold-after-win": _threshold_after_win,
    "threshold-after-loss": _threshold_after_loss,
    "top-marginal": _top_marginal,
}

EXTRA_CHECKS: dict[str, LemmaCheck] = {
    "profile-invariants": _profile_invariants,
}


def check_lemmas(
    inst: Instance, profile: GreedyProfile | None = None, names: list[str] | None = None,
    include_extra: bool = True,
) -> dict[str, CheckReport]:
    """Run the selected lemma checks at every decision node; one report per lemma."""
    g = profile if profile is not None else GreedyProfile(inst)
    checks = dict(LEMMAS)
    if include_extra:
        checks.update(EXTRA_CHECKS)
    if names is not None:
        checks = {n: checks[n] for n in names}
    reports = {name: CheckReport(name) for name in checks}
    for x in decision_nodes(inst.T):
        for i in (1, 2):
            for name, fn in checks.items():
                fn(g, x, i, reports[name])
    return reports


def printed_sdf_counterexamples(inst: Instance, profile: GreedyProfile | None = None) -> list[Node]:
    """Nodes where the literal ``f(x+e_i) = min(f(x) - 1, 0)`` reading fails.

    Kept to document that the winning branch only makes sense with ``max``.
    """
    g = profile if profile is not None else GreedyProfile(inst)
    bad = []
    for x in decision_nodes(inst.T):
        if x.t <= 1:
            continue
        for i in (1, 2):
            if g.f(i, x.child(i)) != min(g.f(i, x) - 1, 0):
                bad.append(x)
    return bad
