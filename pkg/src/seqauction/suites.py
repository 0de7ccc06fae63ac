"""Named groups of checks run over one instance or a batch of instances."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable

from .analysis import (
    DEFAULT_PATH_CAP,
    check_declining_prices,
    eql_character_check,
    greedy_outcome_check,
    monopsonist_equivalence_check,
    path_probability_check,
    phase_check,
    simulate_greedy,
)
from .equilibrium import (
    DEFAULT_TIE_RULES,
    Mode,
    TieBreakRule,
    deviation_check,
    no_overbid_cap_check,
    price_bound_check,
    recursion_check,
    solve,
    utilities_tiebreak_independence_check,
)
from .greedy import GreedyProfile
from .lemmas import check_lemmas
from .reports import CheckReport
from .valuations import Instance
from .welfare import argopt_check, fractional_greedy_check, lb_v2_check, poa_floor_check, subpath_bound_check

CHECK_GROUPS = ("dpa", "lemmas", "greedy", "eql", "argopt", "poa", "deviation", "tiebreak", "subpath", "lbv2")


class _Context:
    """Lazily solved games and greedy profile shared between groups."""

    def __init__(self, inst: Instance, ties: tuple[TieBreakRule, ...], cap: int):
        self.inst = inst
        self.ties = ties
        self.cap = cap
        self._games: dict = {}
        self._profile: GreedyProfile | None = None

    @property
    def profile(self) -> GreedyProfile:
        if self._profile is None:
            self._profile = GreedyProfile(self.inst)
        return self._profile

    def game(self, mode: Mode, tie: TieBreakRule):
        key = (mode, tie.q, tuple(sorted(tie.table.items())))
        if key not in self._games:
            self._games[key] = solve(self.inst, mode, tie)
        return self._games[key]


def _dpa(c: _Context) -> list[CheckReport]:
    out = []
    for tie in c.ties:
        g = c.game(Mode.NO_OVERBID, tie)
        out += [check_declining_prices(g), path_probability_check(g, cap=c.cap), no_overbid_cap_check(g),
                recursion_check(g)]
    return out


def _lemmas(c: _Context) -> list[CheckReport]:
    return list(check_lemmas(c.inst, c.profile).values())


def _greedy(c: _Context) -> list[CheckReport]:
    out = []
    for tie in c.ties:
        g = c.game(Mode.NO_OVERBID, tie)
        out.append(greedy_outcome_check(c.inst, tie=tie, profile=c.profile, cap=c.cap))
        out.append(monopsonist_equivalence_check(c.inst, tie, c.profile, g))
        out.append(check_declining_prices(simulate_greedy(c.inst, tie, c.profile)))
    return out


def _eql(c: _Context) -> list[CheckReport]:
    out = []
    for tie in c.ties:
        g = c.game(Mode.NO_OVERBID, tie)
        out += [eql_character_check(g, c.profile), phase_check(g, c.profile, c.cap), price_bound_check(g)]
    return out


def _argopt(c: _Context) -> list[CheckReport]:
    return [argopt_check(c.inst)]


def _poa(c: _Context) -> list[CheckReport]:
    return [poa_floor_check(c.inst, c.ties, c.cap)]


def _deviation(c: _Context) -> list[CheckReport]:
    return [deviation_check(c.game(mode, tie)) for mode in (Mode.NO_OVERBID, Mode.OVERBID) for tie in c.ties]


def _tiebreak(c: _Context) -> list[CheckReport]:
    return [utilities_tiebreak_independence_check(c.inst, c.ties)]


def _subpath(c: _Context) -> list[CheckReport]:
    return [subpath_bound_check(c.inst, paths=20, seed=c.inst.T, profile=c.profile)]


def _lbv2(c: _Context) -> list[CheckReport]:
    # only meaningful where some buyer is a strict monopsonist at the root
    out = []
    root = c.inst.root
    for i in (1, 2):
        if c.profile.f(i, root) == root.t:
            out += [lb_v2_check(c.inst, root, i), fractional_greedy_check(c.inst, root, i)]
    return out


GROUPS: dict[str, Callable[[_Context], list[CheckReport]]] = {
    "dpa": _dpa, "lemmas": _lemmas, "greedy": _greedy, "eql": _eql, "argopt": _argopt, "poa": _poa,
    "deviation": _deviation, "tiebreak": _tiebreak, "subpath": _subpath, "lbv2": _lbv2,
}


def resolve_groups(selection: Iterable[str]) -> list[str]:
    names: list[str] = []
    for s in selection:
        for part in s.split(","):
            part = part.strip()
            if not part:
                continue
            if part == "all":
                return list(CHECK_GROUPS)
            if part not in GROUPS:
                raise ValueError(f"unknown check {part!r}; choose from {', '.join(CHECK_GROUPS)} or all")
            if part not in names:
                names.append(part)
    return names or list(CHECK_GROUPS)


def run_instance(
    inst: Instance, groups: Iterable[str], ties: tuple[TieBreakRule, ...] = DEFAULT_TIE_RULES,
    cap: int = DEFAULT_PATH_CAP,
) -> dict[str, CheckReport]:
    """Run the chosen groups on one instance; reports are keyed ``group/check``."""
    ctx = _Context(inst, tuple(ties), cap)
    out: dict[str, CheckReport] = {}
    for group in groups:
        for rep in GROUPS[group](ctx):
            key = f"{group}/{rep.name}"
            tagged = CheckReport(key, rep.checked, list(rep.violations), dict(rep.notes))
            if key in out:
                out[key].merge(tagged)
            else:
                out[key] = tagged
    return out


def _run_job(args) -> dict[str, CheckReport]:
    return run_instance(*args)


def run_batch(
    instances: list[Instance], groups: Iterable[str], ties: tuple[TieBreakRule, ...] = DEFAULT_TIE_RULES,
    cap: int = DEFAULT_PATH_CAP, jobs: int = 1,
) -> dict[str, CheckReport]:
    """Merge per-instance reports in input order; ``jobs > 1`` uses a process pool."""
    groups = list(groups)
    args = [(inst, groups, tuple(ties), cap) for inst in instances]
    if jobs > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        results = [_run_job(a) for a in args]
    merged: dict[str, CheckReport] = {}
    for inst, res in zip(instances, results):
        for key, rep in res.items():
            agg = merged.setdefault(key, CheckReport(key))
            agg.merge(rep)
            if rep.notes:
                agg.notes.setdefault("per_instance", {})[inst.name] = rep.notes
    return dict(sorted(merged.items()))
