"""Determinization of nondeterministic Streett automata.

Three constructions are provided: H-Safra trees giving a deterministic
Rabin transition automaton, LIR-H-Safra trees giving a deterministic parity
transition automaton, and mu-Safra trees giving a state-based deterministic
Rabin automaton.  A lasso oracle, seeded generators and a differential
campaign check them against each other.
"""
from .campaign import CampaignConfig, bounds_report, run_campaign
from .determinize import (
    build_dpta,
    build_dra,
    build_drta,
    h_safra_successor,
    initial_tree,
    lir_successor,
    mu_safra_successor,
    priority_of,
    reachable_trees,
)
from .errors import (
    BasisError,
    CapacityError,
    DomainError,
    InvariantViolation,
    ParseError,
    SemanticError,
    StreettDetError,
    UnsupportedFeatureError,
)
from .formats import emit_automaton, parse_automaton
from .generators import GenSpec, enumerate_lassos, full_streett, random_nsa, sample_lassos, to_state_based
from .indices import GFamily, cover, mini
from .lasso import accepts, det_accepts, nsa_accepts, streett_good_cycle_exists
from .omega import (
    DPTA,
    DRA,
    DRTA,
    STATE,
    TRANSITION,
    Alphabet,
    CycleSummary,
    DetTransitionAutomaton,
    Lasso,
    StreettNSA,
    evaluate_parity,
    evaluate_rabin,
    evaluate_streett,
)
from .trees import CORRECTED, LITERAL, check_invariants

__all__ = [name for name in dir() if not name.startswith("_")]
