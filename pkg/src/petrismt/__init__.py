"""Petri net decomposition as SMT: encodings, solver bridge, benchmark curation."""

from .concurrency import ConcurrencyRelation, chromatic_number, explore_reachable, net_relation
from .encoder import FRAGMENTS, EncodingConfig, SmtScript, encode, formula_stats, oracle_sat, print_smtlib
from .net import PetriNet, Transition, numbering, parse_net

__all__ = [
    "ConcurrencyRelation",
    "EncodingConfig",
    "FRAGMENTS",
    "PetriNet",
    "SmtScript",
    "Transition",
    "chromatic_number",
    "encode",
    "explore_reachable",
    "formula_stats",
    "net_relation",
    "numbering",
    "oracle_sat",
    "parse_net",
    "print_smtlib",
]
