"""Finite-scale chain recurrence: eps-chains, strong chains and nested chains on sampled maps."""
from .errors import ChainscopeError, ConfigError, DomainError, PreconditionError, RefinementError
from .locator import locate_all_components, locate_cr
from .nested import NestedFamily, NestedResult, Schedule, covering_walk_feasible, nested_decide, \
    nested_transitive_check, refine_chain, verify_nested
from .relations import (
    Chain,
    GapMatrix,
    build_gap_matrix,
    chain_reaches,
    chain_recurrent_set,
    internally_chain_transitive,
    reach_transitive,
    reach_transitive_all,
    relation_Ntilde,
    relation_O,
    relation_R,
    scc_terminal_components,
)
from .strong import scr_family_intersection, strong_chain_recurrent_set, strong_chain_values
from .systems import ONES, ZEROS, EvaluableSystem, Word, builtin_system, load_system_config

__version__ = "0.1.0"
