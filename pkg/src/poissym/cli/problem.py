"""Sectioned text format for problem files.

Grammar (``#`` starts a comment; blank lines are ignored)::

    file      = { section } ;
    section   = "[" name "]" NEWLINE { line NEWLINE } ;
    name      = "ring" | "ideal" | "poisson" | "group" | "gram" | "base_change" | "options" ;

    [ring]        variables = IDENT { ("," | " ") IDENT }
                  weights   = INT { ("," | " ") INT }          (optional)
    [ideal]       one polynomial per line (an empty section is the zero ideal)
    [poisson]     "canonical"  |  IDENT IDENT "=" poly          (one entry per line)
    [group]       matrix     = row { ";" row }                 (repeatable; a generator)
                  cotangent  = row { ";" row }                 (repeatable; lifted to (q, p))
                  diagonal   = INT ":" INT { "," INT }          (Z_m with weights)
                  invariants = poly { "," poly }                (optional)
                  names      = IDENT { "," IDENT }              (optional, quotient variables)
    [gram]        one row per line, entries separated by ","   (candidate 2-form)
    [base_change] one row per line, rational entries
    [options]     order = grevlex | lex | elim:N ;  degree_bound = INT

Rows are whitespace-separated rationals such as ``-1`` or ``1/2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..gbengine import Ideal
from ..poissoncore import PoissonStructure, PoissonStructureError
from ..polyring import MonomialOrder, Poly, PolySyntaxError, VarRing, parse_poly

SECTIONS = ("ring", "ideal", "poisson", "group", "gram", "base_change", "options")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


class ProblemFileError(ValueError):
    """Input error with a 1-based line (and optionally column) number."""

    def __init__(self, message: str, line: int = None, column: int = None, source: str = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = source or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


@dataclass
class Line:
    number: int
    text: str
    offset: int  # column of text[0] in the raw line, 0-based


@dataclass
class ProblemFile:
    ring: VarRing
    ideal: Ideal
    poisson: Optional[PoissonStructure] = None
    group: Optional[dict] = None
    gram: Optional[list] = None  # rows of Poly
    base_change: Optional[list] = None  # list of Line, parsed once the quotient ring exists
    order: str = "grevlex"
    degree_bound: Optional[int] = None
    source: Optional[str] = None
    sections: tuple = ()

    def monomial_order(self) -> MonomialOrder:
        if self.order.startswith("elim:"):
            return MonomialOrder.elimination(int(self.order[5:]))
        return MonomialOrder.from_name(self.order)


def _split_sections(text: str, source):
    sections = {}
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        offset = len(body) - len(body.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ProblemFileError("unterminated section header", number, offset + 1, source)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise ProblemFileError(f"unknown section [{name}]", number, offset + 1, source)
            if name in sections:
                raise ProblemFileError(f"duplicate section [{name}]", number, offset + 1, source)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ProblemFileError("content before the first section header", number, offset + 1, source)
        sections[current].append(Line(number, stripped, offset))
    return sections


def _key_value(line: Line, source):
    if "=" not in line.text:
        raise ProblemFileError("expected 'key = value'", line.number, line.offset + 1, source)
    key, value = line.text.split("=", 1)
    voff = line.offset + len(key) + 1 + (len(value) - len(value.lstrip()))
    return key.strip(), value.strip(), voff


def _names(value: str, line: Line, source):
    names = [t for t in re.split(r"[,\s]+", value) if t]
    for t in names:
        if not _IDENT.match(t):
            raise ProblemFileError(f"invalid variable name {t!r}", line.number, None, source)
    return names


def _poly(text: str, ring: VarRing, line: Line, col: int, source) -> Poly:
    try:
        return parse_poly(text, ring)
    except PolySyntaxError as e:
        raise ProblemFileError(e.message, line.number, col + e.position + 1, source) from None


def _rationals(text: str, line: Line, source) -> list:
    out = []
    for tok in [t for t in re.split(r"[,\s]+", text) if t]:
        try:
            out.append(Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise ProblemFileError(f"not a rational number: {tok!r}", line.number, None, source) from None
    return out


def _matrix(text: str, line: Line, source) -> list:
    rows = [_rationals(r, line, source) for r in text.split(";")]
    if any(len(r) != len(rows) for r in rows):
        raise ProblemFileError("matrix must be square", line.number, None, source)
    return rows


def _parse_ring(lines, source) -> VarRing:
    variables, weights, wline = None, None, None
    for line in lines:
        key, value, _ = _key_value(line, source)
        if key == "variables":
            variables = _names(value, line, source)
        elif key == "weights":
            wline = line
            try:
                weights = [int(t) for t in re.split(r"[,\s]+", value) if t]
            except ValueError:
                raise ProblemFileError("weights must be integers", line.number, None, source) from None
        else:
            raise ProblemFileError(f"unknown ring key {key!r}", line.number, line.offset + 1, source)
    if not variables:
        raise ProblemFileError("[ring] needs 'variables = ...'", lines[0].number if lines else None, None, source)
    try:
        return VarRing(tuple(variables), tuple(weights) if weights else None)
    except ValueError as e:
        raise ProblemFileError(str(e), (wline or lines[0]).number, None, source) from None


def _parse_poisson(lines, ring: VarRing, source) -> PoissonStructure:
    if len(lines) == 1 and lines[0].text == "canonical":
        try:
            return PoissonStructure.canonical(ring)
        except PoissonStructureError as e:
            raise ProblemFileError(str(e), lines[0].number, None, source) from None
    entries = {}
    for line in lines:
        if "=" not in line.text:
            raise ProblemFileError("expected 'a b = expression' or 'canonical'",
                                   line.number, line.offset + 1, source)
        lhs, rhs = line.text.split("=", 1)
        pair = lhs.split()
        if len(pair) != 2:
            raise ProblemFileError("left side must name two variables", line.number, line.offset + 1, source)
        try:
            i, j = ring.index(pair[0]), ring.index(pair[1])
        except (KeyError, ValueError):
            raise ProblemFileError(f"unknown variable in {lhs.strip()!r}", line.number,
                                   line.offset + 1, source) from None
        if i == j:
            raise ProblemFileError("diagonal Poisson entries are zero", line.number, line.offset + 1, source)
        col = line.offset + len(lhs) + 1 + (len(rhs) - len(rhs.lstrip()))
        value = _poly(rhs.strip(), ring, line, col, source)
        if i > j:
            i, j, value = j, i, -value
        if (i, j) in entries:
            raise ProblemFileError("entry given twice", line.number, line.offset + 1, source)
        entries[(i, j)] = value
    return PoissonStructure.from_upper(ring, entries)


def _parse_group(lines, ring: VarRing, source) -> dict:
    group = {"matrices": [], "cotangent": [], "diagonal": None, "invariants": None, "names": None,
             "line": lines[0].number if lines else None}
    for line in lines:
        key, value, voff = _key_value(line, source)
        if key == "matrix":
            m = _matrix(value, line, source)
            if len(m) != ring.nvars:
                raise ProblemFileError(f"matrix must be {ring.nvars}x{ring.nvars}", line.number, None, source)
            group["matrices"].append(m)
        elif key == "cotangent":
            m = _matrix(value, line, source)
            if 2 * len(m) != ring.nvars:
                raise ProblemFileError(f"cotangent matrix must be {ring.nvars // 2}x{ring.nvars // 2}",
                                       line.number, None, source)
            group["cotangent"].append(m)
        elif key == "diagonal":
            if ":" not in value:
                raise ProblemFileError("expected 'order : w1, w2, ...'", line.number, voff + 1, source)
            m, ws = value.split(":", 1)
            try:
                modulus = int(m)
                weights = [int(w) for w in re.split(r"[,\s]+", ws) if w]
            except ValueError:
                raise ProblemFileError("diagonal data must be integers", line.number, voff + 1, source) from None
            if len(weights) != ring.nvars or modulus < 1:
                raise ProblemFileError("need a positive order and one weight per variable",
                                       line.number, voff + 1, source)
            group["diagonal"] = (modulus, weights)
        elif key == "invariants":
            polys = []
            col = voff
            for part in value.split(","):
                lead = len(part) - len(part.lstrip())
                polys.append(_poly(part.strip(), ring, line, col + lead, source))
                col += len(part) + 1
            group["invariants"] = polys
        elif key == "names":
            group["names"] = _names(value, line, source)
        else:
            raise ProblemFileError(f"unknown group key {key!r}", line.number, line.offset + 1, source)
    kinds = bool(group["matrices"] or group["cotangent"]) + (group["diagonal"] is not None)
    if kinds != 1:
        raise ProblemFileError("[group] needs matrix/cotangent generators or a diagonal line",
                               group["line"], None, source)
    return group


def _parse_gram(lines, ring: VarRing, source) -> list:
    rows = []
    for line in lines:
        row = []
        col = line.offset
        for part in line.text.split(","):
            lead = len(part) - len(part.lstrip())
            row.append(_poly(part.strip(), ring, line, col + lead, source))
            col += len(part) + 1
        rows.append(row)
    if any(len(r) != len(rows) for r in rows):
        raise ProblemFileError("gram matrix must be square", lines[0].number if lines else None, None, source)
    return rows


def parse_problem(text: str, source: str = None) -> ProblemFile:
    """Parse a problem file; raises :class:`ProblemFileError` with a line number."""
    sections = _split_sections(text, source)
    if "ring" not in sections:
        raise ProblemFileError("missing [ring] section", None, None, source)
    ring = _parse_ring(sections["ring"], source)
    gens = tuple(_poly(line.text, ring, line, line.offset, source) for line in sections.get("ideal", ()))
    ideal = Ideal(ring, gens)
    pf = ProblemFile(ring, ideal, source=source, sections=tuple(sections))
    if "poisson" in sections:
        pf.poisson = _parse_poisson(sections["poisson"], ring, source)
    if "group" in sections:
        pf.group = _parse_group(sections["group"], ring, source)
    if "gram" in sections:
        pf.gram = _parse_gram(sections["gram"], ring, source)
    if "base_change" in sections:
        pf.base_change = list(sections["base_change"])
    for line in sections.get("options", ()):
        key, value, voff = _key_value(line, source)
        if key == "order":
            if value not in ("grevlex", "lex") and not re.fullmatch(r"elim:\d+", value):
                raise ProblemFileError(f"unknown order {value!r}", line.number, voff + 1, source)
            pf.order = value
        elif key == "degree_bound":
            if not value.isdigit() or int(value) < 1:
                raise ProblemFileError("degree_bound must be a positive integer", line.number, voff + 1, source)
            pf.degree_bound = int(value)
        else:
            raise ProblemFileError(f"unknown option {key!r}", line.number, line.offset + 1, source)
    return pf


def parse_rows(lines, source=None) -> list:
    """Rational matrix from [base_change]-style lines."""
    rows = [_rationals(line.text, line, source) for line in lines]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ProblemFileError("ragged matrix", lines[0].number, None, source)
    return rows


def load_problem(path: str) -> ProblemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ProblemFileError(f"cannot read file: {e.strerror}", None, None, path) from None
    return parse_problem(text, path)
