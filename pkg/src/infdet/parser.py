"""Problem files.

A file is a sequence of statements, one per line (a statement continues onto
following lines while brackets are open); ``#`` starts a comment::

    vars = x y z
    psi = [x, y]
    H = [[1, 0], [0, z]]
    Y = origin
    xcharts = [(t) -> (0, 0, t)]

``Y = charts [ ... ]`` and ``syzygies = [(s1, s2), ...]`` complete the set.
Polynomials use rational literals, ``+ - * ^`` and parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .hessian import ChartMap, ProblemSpec, SpecError, make_spec
from .polycore import Polynomial

STATEMENTS = ("vars", "psi", "H", "Y", "xcharts", "syzygies")
REQUIRED = ("vars", "psi", "H")

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<arrow>->)|(?P<sym>[=\[\](),+\-*/^]))")


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, sym, end
    text: str
    line: int
    col: int


def _error(code: str, message: str, tok: Token) -> SpecError:
    return SpecError(code, message, tok.line, tok.col)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _tokenize(text: str, line: int, col0: int, out: list) -> None:
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            return
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise SpecError("syntax-error", f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token("sym" if kind == "arrow" else kind, m.group(kind), line, col0 + start + 1))
        pos = m.end()


def _statements(text: str) -> list[list[Token]]:
    """Split into statements; a statement runs on while brackets are unbalanced."""
    stmts, cur, depth = [], [], 0
    last = (1, 1)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        before = len(cur)
        _tokenize(line, lineno, 0, cur)
        for tok in cur[before:]:
            if tok.text in "[(":
                depth += 1
            elif tok.text in "])":
                depth -= 1
                if depth < 0:
                    raise _error("syntax-error", f"unmatched {tok.text!r}", tok)
        if cur:
            last = (lineno, len(raw) + 1)
        if cur and depth == 0:
            stmts.append(cur)
            cur = []
    if cur:
        raise SpecError("syntax-error", "unclosed bracket at end of file", *last)
    return stmts


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        end_line, end_col = (tokens[-1].line, tokens[-1].col + len(tokens[-1].text)) if tokens else (1, 1)
        self.end = Token("end", "", end_line, end_col)

    def peek(self) -> Token:
        return self.toks[self.i] if self.i < len(self.toks) else self.end

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind == "sym":
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind != "sym":
            shown = tok.text or "end of statement"
            raise _error("syntax-error", f"expected {text!r}, found {shown!r}", tok)
        return tok

    def done(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise _error("syntax-error", f"unexpected {tok.text!r}", tok)


# polynomials

def _poly(s: _Stream, names: Sequence[str]) -> Polynomial:
    n = len(names)
    total = Polynomial.zero(n)
    sign = 1
    if s.accept("-"):
        sign = -1
    else:
        s.accept("+")
    while True:
        total = total + sign * _term(s, names)
        if s.accept("+"):
            sign = 1
        elif s.accept("-"):
            sign = -1
        else:
            return total


def _term(s: _Stream, names: Sequence[str]) -> Polynomial:
    value = _factor(s, names)
    while s.accept("*"):
        value = value * _factor(s, names)
    return value


def _factor(s: _Stream, names: Sequence[str]) -> Polynomial:
    base = _base(s, names)
    if s.accept("^"):
        tok = s.next()
        if tok.kind != "num":
            raise _error("syntax-error", "exponent must be a non-negative integer literal", tok)
        base = base ** int(tok.text)
    return base


def _base(s: _Stream, names: Sequence[str]) -> Polynomial:
    n = len(names)
    tok = s.next()
    if tok.kind == "num":
        value = Fraction(int(tok.text))
        if s.accept("/"):
            den = s.next()
            if den.kind != "num" or int(den.text) == 0:
                raise _error("syntax-error", "denominator must be a positive integer literal", den)
            value /= int(den.text)
        return Polynomial.constant(value, n)
    if tok.kind == "ident":
        if tok.text not in names:
            raise _error("unknown-variable", f"{tok.text!r} is not one of {' '.join(names)}", tok)
        return Polynomial.variable(names.index(tok.text), n)
    if tok.text == "(":
        inner = _poly(s, names)
        s.expect(")")
        return inner
    shown = tok.text or "end of statement"
    raise _error("syntax-error", f"expected a number, variable or '(', found {shown!r}", tok)


def _list(s: _Stream, item, open_="[", close="]") -> list:
    s.expect(open_)
    items = []
    if s.accept(close):
        return items
    while True:
        items.append(item(s))
        if s.accept(close):
            return items
        s.expect(",")


def _chart(s: _Stream, label: str) -> tuple[ChartMap, Token]:
    start = s.peek()
    s.expect("(")
    params = []
    while True:
        tok = s.next()
        if tok.kind != "ident":
            raise _error("syntax-error", "chart parameters must be identifiers", tok)
        if tok.text in params:
            raise _error("syntax-error", f"repeated chart parameter {tok.text!r}", tok)
        params.append(tok.text)
        if s.accept(")"):
            break
        s.expect(",")
    s.expect("->")
    comps = _list(s, lambda st: _poly(st, params), "(", ")")
    return ChartMap(tuple(params), tuple(comps), label), start


# statements

@dataclass
class _Parsed:
    varnames: tuple = ()
    psi: list | None = None
    H: list | None = None
    ycharts: list | None = None
    xcharts: list | None = None
    syzygies: list | None = None


def parse_problem(text: str, name: str = "problem") -> ProblemSpec:
    """Parse and validate a problem file; errors are :class:`SpecError` with line and column."""
    data = _Parsed()
    where: dict[str, Token] = {}
    for toks in _statements(text):
        s = _Stream(toks)
        head = s.next()
        if head.kind != "ident" or head.text not in STATEMENTS:
            raise _error("syntax-error", f"unknown statement {head.text!r}", head)
        if head.text in where:
            raise _error("duplicate-statement", f"{head.text} given twice", head)
        where[head.text] = head
        s.expect("=")
        if head.text != "vars" and "vars" not in where:
            raise _error("missing-statement", "vars must come before other statements", head)
        names = data.varnames
        if head.text == "vars":
            found = []
            while s.peek().kind == "ident":
                tok = s.next()
                if tok.text in found:
                    raise _error("syntax-error", f"variable {tok.text!r} listed twice", tok)
                found.append(tok.text)
            if not found:
                raise _error("syntax-error", "vars needs at least one identifier", s.peek())
            data.varnames = tuple(found)
        elif head.text == "psi":
            data.psi = _list(s, lambda st: (st.peek(), _poly(st, names)))
        elif head.text == "H":
            data.H = _list(s, lambda st: _list(st, lambda s2: (s2.peek(), _poly(s2, names))))
        elif head.text == "Y":
            tok = s.next()
            if tok.text == "origin" and tok.kind == "ident":
                data.ycharts = None
            elif tok.text == "charts" and tok.kind == "ident":
                data.ycharts = _indexed_charts(s, "Y")
            else:
                raise _error("syntax-error", "Y must be 'origin' or 'charts [...]'", tok)
        elif head.text == "xcharts":
            data.xcharts = _indexed_charts(s, "xcharts")
        elif head.text == "syzygies":
            data.syzygies = _list(s, lambda st: (st.peek(), _list(st, lambda s2: _poly(s2, names), "(", ")")))
        s.done()
    for req in REQUIRED:
        if req not in where:
            raise SpecError("missing-statement", f"no {req} statement", 1, 1)
    return _build(data, where, name)


def _indexed_charts(s: _Stream, label: str) -> list:
    count = [0]

    def item(st):
        count[0] += 1
        return _chart(st, f"{label}[{count[0]}]")
    return _list(s, item)


def _build(data: _Parsed, where: dict, name: str) -> ProblemSpec:
    psi = [p for _, p in data.psi]
    for k, (tok, p) in enumerate(data.psi):
        if p.constant_term() != 0:
            raise _error("psi-constant-term", f"psi[{k + 1}] does not vanish at the origin", tok)
    rows = data.H
    if len(rows) != len(psi) or any(len(r) != len(psi) for r in rows):
        raise _error("dimension-mismatch", f"H must be {len(psi)}x{len(psi)} to match psi", where["H"])
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if rows[i][j][1] != rows[j][i][1]:
                raise _error("H-not-symmetric", f"H[{i + 1},{j + 1}] != H[{j + 1},{i + 1}]", rows[i][j][0])
    H = [[p for _, p in r] for r in rows]
    ych = data.ycharts
    xch = data.xcharts or []
    charts = {c.label: tok for c, tok in (ych or []) + xch}
    syz = data.syzygies or []
    try:
        return make_spec(data.varnames, psi, H,
                         None if ych is None else [c for c, _ in ych],
                         [c for c, _ in xch], [v for _, v in syz], name)
    except SpecError as e:
        tok = where.get("vars")
        for label, ctok in charts.items():
            if label in e.message:
                tok = ctok
                break
        else:
            m = re.search(r"syzygy (\d+)", e.message)
            if m and syz:
                tok = syz[int(m.group(1)) - 1][0]
            elif e.code == "p-exceeds-n":
                tok = where["psi"]
        raise SpecError(e.code, e.message, tok.line, tok.col) from None


def serialize(P: ProblemSpec) -> str:
    """Problem-file text that parses back to an equal spec."""
    fmt = P.fmt
    lines = [f"# {P.name}", "vars = " + " ".join(P.varnames)]
    lines.append("psi = [" + ", ".join(fmt(f) for f in P.psi) + "]")
    rows = ["[" + ", ".join(fmt(e) for e in row) + "]" for row in P.H.to_rows()]
    lines.append("H = [" + ", ".join(rows) + "]")

    def chart(c: ChartMap) -> str:
        return (f"({', '.join(c.params)}) -> ("
                + ", ".join(comp.format(c.params) for comp in c.components) + ")")

    if P.ycharts is None:
        lines.append("Y = origin")
    else:
        lines.append("Y = charts [" + ", ".join(chart(c) for c in P.ycharts) + "]")
    if P.xcharts:
        lines.append("xcharts = [" + ", ".join(chart(c) for c in P.xcharts) + "]")
    if P.extra_syzygies:
        lines.append("syzygies = [" + ", ".join(
            "(" + ", ".join(fmt(a) for a in s) + ")" for s in P.extra_syzygies) + "]")
    return "\n".join(lines) + "\n"


def load_problem(path) -> ProblemSpec:
    """Parse a file; the problem id is the file stem."""
    from pathlib import Path

    path = Path(path)
    return parse_problem(path.read_text(encoding="utf-8"), path.stem)
