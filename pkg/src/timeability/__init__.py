"""Timeability of extensive-form games.

Decide whether a game's information structure can survive time-aware
players, construct and verify exact and approximate timings with exact
rational arithmetic, quantify what leaked timing information is worth, and
generate the families of games that make approximate timing astronomically
expensive.
"""

from .agendas import (AgendaAtom, AgendaTiming, GapVerdict,
                      SymmetricGameTiming, classify_gaps, shift_nonneg,
                      symmetric_epsilon, symmetrize, verify_agenda_timing)
from .augmented import (AugmentedGame, augment, best_response_value,
                        delay_timing, guessing_game, lift_profile,
                        timing_advantage, uniform_profile)
from .dist import (BudgetError, DEFAULT_BUDGET, DiscreteDistribution,
                   condition, expectation, mixture, pushforward, tv_distance)
from .exact import (ContractedGraph, DeterministicTiming, contract_infosets,
                    exact_deterministic_timing, find_cycle, floor_timing,
                    layout, layout_to_dot)
from .families import (Agenda, SymmetricChoicelessGame, agenda_Ar,
                       agenda_display, expand_choiceless, figure1,
                       format_agenda, gamma_r, perception_game,
                       strip_separators)
from .game import (Game, GameFormatError, Node, ValidationReport,
                   content_digest, experience, parse_game, serialize_game,
                   validate)
from .perception import (ClockBound, PerceivedTiming, construct_lu_timing,
                         gap_ratio_event_probability, powmax, scale,
                         verify_lu_timing)
from .randomized import (ChainDistribution, ExplicitChain, RandomizedTiming,
                         UniformGapChain, estimate_epsilon_timing,
                         indist_base, indist_recursive, shifted_window_timing,
                         subset_indistinguishability, timing_from_chain,
                         timing_information, verify_epsilon_timing,
                         verify_indistinguishable_subsets)

__version__ = "0.1.0"
