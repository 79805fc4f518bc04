"""Feasibility, online feasibility and schedulability of sporadic task systems.

The public surface is re-exported here; see the submodules for details.
"""

from .blindfold import (
    KnowledgeState,
    Verdict,
    initial_state,
    is_feasible,
    knowledge_walk,
    reconstruct_schedule,
    release_successor,
    savitch_feasible,
    tick_successor,
)
from .errors import (
    IllegalReleaseError,
    InvalidScheduleError,
    InvariantError,
    NotOnlineFeasibleError,
    ParseError,
    ResourceLimitError,
    SporadicError,
    StrategyIncompleteError,
)
from .flow_rounding import Job, build_network, continuous_to_discrete, has_feasible_schedule, max_flow
from .online_game import Strategy, attractor, is_online_feasible, synthesize_strategy
from .schedulability import FixedPriority, is_schedulable, policy_edf, policy_fixed_priority
from .task_model import JobSequence, Task, TaskSystem, is_failure, is_legal_sequence, simulate, step

__version__ = "0.1.0"
