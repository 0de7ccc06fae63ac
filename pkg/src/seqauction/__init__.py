"""Exact equilibria, greedy bidding and welfare bounds for two-buyer sequential second-price auctions."""

from .analysis import PathRealization, realized_paths, simulate_greedy
from .equilibrium import Mode, SolvedGame, TieBreakRule, deviation_check, solve
from .greedy import GreedyProfile
from .instances import EXAMPLES, example1, example2, example3, example4, random_corpus, random_instance
from .lattice import Node
from .reports import CheckReport, Violation
from .valuations import Instance, Valuation, as_fraction
from .welfare import (
    POA_HI,
    POA_LO,
    equilibrium_efficiency,
    optimal_welfare,
    path_efficiency,
    social_welfare,
    worst_case_instance,
)

__all__ = [
    "CheckReport", "EXAMPLES", "GreedyProfile", "Instance", "Mode", "Node", "POA_HI", "POA_LO",
    "PathRealization", "SolvedGame", "TieBreakRule", "Valuation", "Violation", "as_fraction",
    "deviation_check", "equilibrium_efficiency", "example1", "example2", "example3", "example4",
    "optimal_welfare", "path_efficiency", "random_corpus", "random_instance", "realized_paths",
    "simulate_greedy", "social_welfare", "solve", "worst_case_instance",
]
