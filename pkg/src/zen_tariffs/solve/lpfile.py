"""CPLEX-LP text format: writer and a reader for the subset the writer emits.

Model names use square brackets (``pv_gen[PV.a][12]``), which the LP grammar
reserves, so they are written with parentheses instead; the mapping is
reversed on read.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

from ..errors import EmptyModel, ParseError
from ..model import Constraint, ModelInstance, Variable

TERMS_PER_LINE = 8
_NAME_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)((?:\([^()]*\))*)$")


def to_lp_name(name: str) -> str:
    return name.replace("[", "(").replace("]", ")")


def from_lp_name(name: str) -> str:
    return name.replace("(", "[").replace(")", "]")


def fmt(value: float) -> str:
    """Locale-free real with 12 significant digits."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(float(value), ".12g")
    return "0" if text == "-0" else text


def _expr_lines(terms, names, head: str) -> list[str]:
    parts = []
    for j, a in terms:
        sign = "-" if a < 0 else "+"
        parts.append(f"{sign} {fmt(abs(a))} {names[j]}")
    if not parts:
        parts = [f"+ 0 {names[0]}"]
    lines = []
    for k in range(0, len(parts), TERMS_PER_LINE):
        chunk = " ".join(parts[k:k + TERMS_PER_LINE])
        lines.append((head if k == 0 else "   ") + " " + chunk)
    return lines


def lp_text(model: ModelInstance) -> str:
    if model.n_vars == 0:
        raise EmptyModel("model has no variables")
    names = [to_lp_name(v.name) for v in model.variables]
    out = ["\\ zen_tariffs model", "Maximize" if model.sense == "max" else "Minimize"]
    out += _expr_lines(model.objective, names, " obj:")
    out.append("Subject To")
    for row in model.constraints:
        lines = _expr_lines(row.terms, names, f" {to_lp_name(row.name)}:")
        lines[-1] += f" {row.sense} {fmt(row.rhs)}"
        out += lines
    out.append("Bounds")
    binaries = []
    for v, name in zip(model.variables, names):
        if v.kind == "binary":
            binaries.append(name)
        if v.lb == -math.inf and v.ub == math.inf:
            out.append(f" {name} free")
        elif v.lb == v.ub:
            out.append(f" {name} = {fmt(v.lb)}")
        elif v.ub == math.inf:
            out.append(f" {name} >= {fmt(v.lb)}")
        else:
            out.append(f" {fmt(v.lb)} <= {name} <= {fmt(v.ub)}")
    if binaries:
        out.append("Binaries")
        out += [f" {n}" for n in binaries]
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(model: ModelInstance, path) -> Path:
    path = Path(path)
    path.write_text(lp_text(model), encoding="ascii")
    return path


# --- reader ----------------------------------------------------------------

_SECTIONS = {
    "minimize": "obj", "minimise": "obj", "min": "obj", "maximize": "obj", "maximise": "obj", "max": "obj",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "end": "end",
}
_SENSE_RE = re.compile(r"(<=|>=|=<|=>|<|>|=)")
_LABEL_RE = re.compile(r"^[A-Za-z_][^\s:]*\s*:")


def _num(tok: str, path, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(path, line, 1, f"expected a number, got {tok!r}") from None


_TOKEN_RE = re.compile(r"\s*(?:([+-])|((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|([A-Za-z_][^\s+\-<>=:]*))")


def _parse_expr(text: str, path, line: int) -> list[tuple[str, float]]:
    terms, sign, coef, pos = [], 1.0, None, 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(path, line, pos + 1, f"unexpected text {text[pos:pos + 20]!r}")
        op, num, name = m.groups()
        pos = m.end()
        if op:
            sign = -sign if op == "-" else sign
        elif num:
            coef = float(num)
        else:
            terms.append((name, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    if coef is not None:
        raise ParseError(path, line, len(text), "dangling coefficient")
    return terms


def _split_name(lp_name: str):
    m = _NAME_RE.match(lp_name)
    symbol, parts = (m.group(1), re.findall(r"\(([^()]*)\)", m.group(2))) if m else (lp_name, [])
    tech, t = None, None
    if parts and parts[-1].isdigit():
        t = int(parts.pop())
    if parts:
        tech = parts[0]
    return symbol, tech, t


def read_lp(path) -> ModelInstance:
    """Read an LP file written by :func:`export_lp` back into a model."""
    path = Path(path)
    section, sense = None, "min"
    stmts: dict[str, list[tuple[int, str]]] = {"obj": [], "st": [], "bounds": [], "bin": []}
    lineno, ended = 0, False
    for lineno, raw in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "obj":
                sense = "max" if key.startswith("max") else "min"
            if section == "end":
                ended = True
                break
            continue
        if section is None:
            raise ParseError(path, lineno, 1, "content before the objective section")
        if section in ("obj", "st") and not _LABEL_RE.match(line):
            if not stmts[section]:
                raise ParseError(path, lineno, 1, "expression without a label")
            ln, prev = stmts[section][-1]
            stmts[section][-1] = (ln, prev + " " + line)
        else:
            stmts[section].append((lineno, line))
    if not ended:
        raise ParseError(path, lineno + 1, 1, "unexpected end of file (missing End)")

    order: list[str] = []
    seen: dict[str, int] = {}

    def idx(name: str) -> int:
        if name not in seen:
            seen[name] = len(order)
            order.append(name)
        return seen[name]

    objective = {}
    for ln, text in stmts["obj"]:
        _, _, body = text.partition(":")
        for name, a in _parse_expr(body, path, ln):
            j = idx(name)
            objective[j] = objective.get(j, 0.0) + a
    rows = []
    for ln, text in stmts["st"]:
        name, _, body = text.partition(":")
        parts = _SENSE_RE.split(body)
        if len(parts) != 3:
            raise ParseError(path, ln, 1, "constraint needs exactly one sense")
        lhs, op, rhs = parts
        op = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(op, op)
        terms = [(idx(n), a) for n, a in _parse_expr(lhs, path, ln)]
        rows.append((name.strip(), terms, op, _num(rhs.strip(), path, ln)))

    bounds: dict[int, list[float]] = {}
    declared: list[int] = []
    for ln, text in stmts["bounds"]:
        toks = text.split()
        declared.append(idx(toks[2] if len(toks) == 5 else toks[0]))
        if len(toks) == 2 and toks[1].lower() == "free":
            bounds[idx(toks[0])] = [-math.inf, math.inf]
        elif len(toks) == 3:
            j = idx(toks[0])
            lo, hi = bounds.get(j, [0.0, math.inf])
            v = _num(toks[2], path, ln)
            if toks[1] in ("=",):
                lo = hi = v
            elif toks[1] in (">=", "=>"):
                lo = v
            elif toks[1] in ("<=", "=<"):
                hi = v
            else:
                raise ParseError(path, ln, 1, f"bad bound operator {toks[1]!r}")
            bounds[j] = [lo, hi]
        elif len(toks) == 5 and toks[1] in ("<=", "=<") and toks[3] in ("<=", "=<"):
            bounds[idx(toks[2])] = [_num(toks[0], path, ln), _num(toks[4], path, ln)]
        else:
            raise ParseError(path, ln, 1, f"cannot parse bound {text!r}")
    binary = set()
    for ln, text in stmts["bin"]:
        binary.update(idx(n) for n in text.split())

    # columns are ordered as declared in Bounds (the writer lists every column there)
    listed = set(declared)
    perm = list(dict.fromkeys(declared)) + [j for j in range(len(order)) if j not in listed]
    new_of = {old: new for new, old in enumerate(perm)}
    variables = []
    for j in perm:
        lp_name = order[j]
        lo, hi = bounds.get(j, [0.0, 1.0] if j in binary else [0.0, math.inf])
        symbol, tech, t = _split_name(lp_name)
        variables.append(Variable(from_lp_name(lp_name), lo, hi, "binary" if j in binary else "continuous", "",
                                  symbol, tech, t))
    constraints = []
    for name, terms, op, rhs in rows:
        merged: dict[int, float] = {}
        for j, a in terms:
            merged[j] = merged.get(j, 0.0) + a
        family, tech, t = _split_name(name)
        packed = tuple(sorted((new_of[j], a) for j, a in merged.items() if a != 0.0))
        constraints.append(Constraint(from_lp_name(name), packed, op, rhs, "", family, tech, t))
    obj = tuple(sorted((new_of[j], a) for j, a in objective.items() if a != 0.0))
    return ModelInstance(tuple(variables), tuple(constraints), obj, sense)
