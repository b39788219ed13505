"""Isomorph-free classification of linear codes over F2, F3 and F4."""

from .augment import AugTask, classify_col, classify_row
from .canon import SemilinearIsometry, are_equivalent, canonical_form
from .code import LinearCode
from .latext import ExtensionProblem, LatticeTask, classify_lattice
from .sieve import dedup

__all__ = [
    "AugTask",
    "ExtensionProblem",
    "LatticeTask",
    "LinearCode",
    "SemilinearIsometry",
    "are_equivalent",
    "canonical_form",
    "classify_col",
    "classify_lattice",
    "classify_row",
    "dedup",
]

__version__ = "0.1.0"
