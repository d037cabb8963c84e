"""Determinizability analysis for min-plus weighted automata."""

from .tropical import INF, BoolMatrix, MinPlusMatrix
from .wfa import Configuration, Nfa, Wfa, WfaIF, evaluate, next_conf, parse_nfa, parse_wfa, serialize_wfa
from .extword import AugState, Base, Block, Cactus, Jump, Power, Rebase, format_extword, parse_extword
from .augmented import AugWfa, build_augmented
from .cactus import AugConfiguration, Calculus, StableCycleCertificate
from .cost import CostValue, cost, depth, sub_k
from .analysis import (
    check_runs_dominated,
    check_witness,
    decide,
    determinize_with_bound,
    equivalence_of_determinizer_output,
    gap_witness_search,
    nfa_to_wfa_reduction,
)

__all__ = [
    "INF", "BoolMatrix", "MinPlusMatrix",
    "Configuration", "Nfa", "Wfa", "WfaIF", "evaluate", "next_conf", "parse_nfa", "parse_wfa", "serialize_wfa",
    "AugState", "Base", "Block", "Cactus", "Jump", "Power", "Rebase", "format_extword", "parse_extword",
    "AugWfa", "build_augmented",
    "AugConfiguration", "Calculus", "StableCycleCertificate",
    "CostValue", "cost", "depth", "sub_k",
    "check_runs_dominated", "check_witness", "decide", "determinize_with_bound",
    "equivalence_of_determinizer_output", "gap_witness_search", "nfa_to_wfa_reduction",
]
