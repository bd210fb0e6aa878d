"""Serialize models, run solver backends, parse solutions."""

from .backends import BACKENDS, BackendConfig, find_highs, solve
from .lpfile import export_lp, lp_text, read_lp
from .solution import SolveResult, parse_solution_file, write_solution_file

__all__ = [
    "BACKENDS",
    "BackendConfig",
    "SolveResult",
    "export_lp",
    "find_highs",
    "lp_text",
    "parse_solution_file",
    "read_lp",
    "solve",
    "write_solution_file",
]
