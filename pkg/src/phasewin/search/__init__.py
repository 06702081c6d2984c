from .baselines import brute_force, brute_force_report, greedy, greedy_order, lazy_greedy
from .bounds import (BoundParameters, bound_recurrence, classical_bound, exit_probability,
                     stop_criterion, theoretical_bound)
from .phasewin import (PhaseRecord, PhaseTrace, PhaseWinConfig, default_tau, default_window,
                       phasewin, window_selection)
from .policies import policy_ba, policy_baf, policy_lg, policy_t2

ALGORITHMS = ("greedy", "lazy_greedy", "phasewin", "brute_force")
