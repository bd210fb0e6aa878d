"""Solve results and solution-file dialects.

Two dialects are understood:

``highs``
    HiGHS "raw" solution file (``write_solution_style = 0``): a ``Model
    status`` block, then primal and dual blocks with ``# Columns n`` /
    ``# Rows m`` headers followed by ``name value`` lines.
``sol``
    Plain ``name value`` lines with ``#`` comments; the objective is read
    from a ``# Objective value = v`` comment.  Used to store dispatches.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from ..errors import Infeasible, ParseError, SolutionOverflow, SolveFailed, TimeLimit, Unbounded
from .lpfile import fmt, from_lp_name, to_lp_name

STATUSES = ("optimal", "infeasible", "unbounded", "limit")

HIGHS_STATUS = {
    "optimal": "optimal",
    "infeasible": "infeasible",
    "unbounded": "unbounded",
    "primal infeasible or unbounded": "infeasible_or_unbounded",
    "time limit reached": "limit",
    "iteration limit reached": "limit",
    "solution limit reached": "limit",
    "interrupted by user": "limit",
    "memory limit reached": "limit",
    "model empty": "optimal",
}


@dataclass
class SolveResult:
    status: str
    objective_value: float = math.nan  # EUR, excluding reported constants
    variable_values: dict[str, float] = field(default_factory=dict)
    duals: dict[str, float] | None = None
    solve_time: float = 0.0
    backend: str = ""
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == "optimal"

    def require_optimal(self) -> "SolveResult":
        if self.status == "optimal":
            return self
        if self.status == "infeasible":
            raise Infeasible(self.message)
        if self.status == "unbounded":
            raise Unbounded(self.message)
        if self.status == "limit":
            raise TimeLimit(self.message)
        raise SolveFailed(self.status, self.message)

    def vector(self, model) -> np.ndarray:
        """Values in model column order (missing names read as 0)."""
        x = np.zeros(model.n_vars)
        for i, v in enumerate(model.variables):
            x[i] = self.variable_values.get(v.name, 0.0)
        return x

    def value(self, name: str) -> float:
        return self.variable_values[name]


class _Lines:
    def __init__(self, path):
        self.path = Path(path)
        self.lines = self.path.read_text(encoding="utf-8").splitlines()
        self.pos = 0

    def next(self, what: str) -> str:
        if self.pos >= len(self.lines):
            raise ParseError(self.path, len(self.lines) + 1, 1, f"unexpected end of file, expected {what}")
        self.pos += 1
        return self.lines[self.pos - 1]

    @property
    def lineno(self) -> int:
        return self.pos

    def real(self, text: str, column: int) -> float:
        try:
            value = float(text)
        except ValueError:
            raise ParseError(self.path, self.lineno, column, f"expected a number, got {text!r}") from None
        if math.isinf(value) and not re.fullmatch(r"[+-]?inf(inity)?", text.strip(), re.I):
            raise SolutionOverflow(self.path, self.lineno, column, f"value {text!r} overflows a double")
        return value

    def pair(self) -> tuple[str, float]:
        line = self.next("a 'name value' line")
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(self.path, self.lineno, 1, f"expected 'name value', got {line!r}")
        return parts[0], self.real(parts[1], len(line) - len(parts[1]) + 1)

    def count(self, header: str) -> int:
        line = self.next(f"'# {header} n'")
        m = re.fullmatch(rf"#\s*{header}\s+(\d+)", line.strip())
        if not m:
            raise ParseError(self.path, self.lineno, 1, f"expected '# {header} n', got {line!r}")
        return int(m.group(1))


def _check_names(values: Mapping[str, float], known, path) -> None:
    if known is None:
        return
    for name in values:
        if name not in known:
            raise ParseError(path, 0, 1, f"unknown variable {name!r} not in the model registry")


def _parse_highs(path, known) -> SolveResult:
    r = _Lines(path)
    if r.next("'Model status'").strip() != "Model status":
        raise ParseError(r.path, r.lineno, 1, "expected 'Model status'")
    raw = r.next("a model status").strip()
    status = HIGHS_STATUS.get(raw.lower())
    if status is None:
        raise ParseError(r.path, r.lineno, 1, f"unrecognised model status {raw!r}")

    while r.next("'# Primal solution values'").strip() != "# Primal solution values":
        pass
    primal_state = r.next("primal solution status").strip()
    values: dict[str, float] = {}
    duals: dict[str, float] | None = None
    objective = math.nan
    if primal_state != "None":
        line = r.next("'Objective v'")
        if not line.startswith("Objective"):
            raise ParseError(r.path, r.lineno, 1, f"expected 'Objective', got {line!r}")
        objective = r.real(line.split(None, 1)[1], 11)
        for _ in range(r.count("Columns")):
            name, v = r.pair()
            values[from_lp_name(name)] = v
        for _ in range(r.count("Rows")):
            r.pair()
        while r.next("'# Dual solution values'").strip() != "# Dual solution values":
            pass
        dual_state = r.next("dual solution status").strip()
        if dual_state != "None":
            for _ in range(r.count("Columns")):
                r.pair()
            duals = {}
            for _ in range(r.count("Rows")):
                name, v = r.pair()
                duals[from_lp_name(name)] = v
    _check_names(values, known, r.path)
    if status != "optimal":
        values = {}
    return SolveResult(status, objective if status == "optimal" else math.nan, values, duals, backend="highs",
                       message=raw)


def _parse_sol(path, known) -> SolveResult:
    r = _Lines(path)
    values: dict[str, float] = {}
    objective = math.nan
    status = "optimal"
    if not r.lines:
        raise ParseError(r.path, 1, 1, "unexpected end of file, empty solution")
    while r.pos < len(r.lines):
        line = r.next("a line").strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*Objective value\s*=\s*(\S+)", line)
            if m:
                objective = r.real(m.group(1), m.start(1) + 1)
            m = re.match(r"#\s*Status\s*=\s*(\S+)", line)
            if m:
                status = m.group(1)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(r.path, r.lineno, 1, f"expected 'name value', got {line!r}")
        values[from_lp_name(parts[0])] = r.real(parts[1], len(line) - len(parts[1]) + 1)
    if math.isnan(objective):
        raise ParseError(r.path, len(r.lines) + 1, 1, "unexpected end of file, no objective value")
    _check_names(values, known, r.path)
    return SolveResult(status, objective, values, backend="sol")


DIALECTS = {"highs": _parse_highs, "sol": _parse_sol}


def parse_solution_file(path, dialect: str = "highs", model=None) -> SolveResult:
    """Parse a backend solution file; with ``model`` unknown names are rejected."""
    if dialect not in DIALECTS:
        raise ValueError(f"unknown solution dialect {dialect!r}; expected one of {sorted(DIALECTS)}")
    known = None if model is None else {v.name for v in model.variables}
    return DIALECTS[dialect](path, known)


def write_solution_file(result: SolveResult, path, model=None) -> Path:
    """Store a solution in the ``sol`` dialect (model column order when ``model`` is given)."""
    path = Path(path)
    names = [v.name for v in model.variables] if model is not None else sorted(result.variable_values)
    lines = [f"# Status = {result.status}", f"# Objective value = {result.objective_value!r}"]
    lines += [f"{to_lp_name(n)} {result.variable_values.get(n, 0.0)!r}" for n in names]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


__all__ = ["SolveResult", "parse_solution_file", "write_solution_file", "STATUSES", "fmt"]
