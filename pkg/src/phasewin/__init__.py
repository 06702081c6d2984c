"""Cardinality-constrained submodular maximization with phase-window search."""
from .analysis import RunReport, ac_ratio, compare, curvature_report, insertion_auc
from .core import (ContractError, GainCache, GroundSet, OracleError, OrderedSolution, ScoreOracle,
                   full_sweep, marginal_gain, mec)
from .search import (BoundParameters, PhaseWinConfig, brute_force, greedy, lazy_greedy, phasewin,
                     theoretical_bound)

__version__ = "0.1.0"
