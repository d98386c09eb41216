"""OBDD refutations of CNF formulas, with checkers for the lower-bound lemmas."""

from ._core import (
    Formula,
    NodeBudgetExceeded,
    ParseError,
    base_exceeds_1025_certified,
    check_fooling,
    floor_cn,
    lemma_select,
    pigeon_map_json,
    refute,
    sweep,
    theoretical_bound,
    verify,
)

__all__ = [
    "Formula",
    "NodeBudgetExceeded",
    "ParseError",
    "base_exceeds_1025_certified",
    "check_fooling",
    "floor_cn",
    "lemma_select",
    "pigeon_map_json",
    "refute",
    "sweep",
    "theoretical_bound",
    "verify",
]
