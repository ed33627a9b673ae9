"""Text format for programs.

Grammar::

    file    := header program
    header  := "processes" NAT ";"
    program := "program" IDENT "{" proc* "}"
    proc    := "process" NAT "{" stmt* "}"
    stmt    := "send" NAT ";" | "recv" NAT ";" | "assign" IDENT ";"

``#`` starts a comment running to the end of the line. Whitespace is
insignificant. ``assign`` statements are accepted and discarded; they have no
communication effect. Process blocks may appear in any order; processes
without a block are empty.

:func:`parse` raises :class:`ParseError` with a source span and a kind:

* ``SYNTAX``: token-level or structural violations of the grammar.
* ``BAD_PROCESS_ID``: a process id or peer outside 1..n.
* ``SELF_CHANNEL``: a process sending to or receiving from itself.
* ``DUPLICATE_PROCESS``: two blocks for the same process id.

:func:`format_program` renders a program so that parsing the result yields an
equal program, name included.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .model import Program, Statement, StmtKind, program

__all__ = [
    "ParseError",
    "ParseErrorKind",
    "SourceSpan",
    "format_program",
    "parse",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NAT_RE = re.compile(r"[0-9]+")
_KEYWORDS = frozenset({"processes", "program", "process", "send", "recv", "assign"})


class ParseErrorKind(Enum):
    SYNTAX = "syntax"
    BAD_PROCESS_ID = "bad-process-id"
    SELF_CHANNEL = "self-channel"
    DUPLICATE_PROCESS = "duplicate-process"


@dataclass(frozen=True)
class SourceSpan:
    """1-based line and column of the offending token."""

    line: int
    column: int


class ParseError(Exception):
    def __init__(self, kind: ParseErrorKind, span: SourceSpan, message: str) -> None:
        super().__init__(f"line {span.line} col {span.column}: {message}")
        self.kind = kind
        self.span = span
        self.message = message


@dataclass(frozen=True)
class _Token:
    text: str
    span: SourceSpan


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    col = 1
    i = 0
    length = len(source)
    while i < length:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < length and source[i] != "\n":
                i += 1
            continue
        span = SourceSpan(line, col)
        if ch in "{};":
            tokens.append(_Token(ch, span))
            i += 1
            col += 1
            continue
        m = _NAT_RE.match(source, i) or _IDENT_RE.match(source, i)
        if m is None:
            raise ParseError(ParseErrorKind.SYNTAX, span, f"unexpected character {ch!r}")
        text = m.group()
        tokens.append(_Token(text, span))
        i = m.end()
        col += len(text)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], source_end: SourceSpan) -> None:
        self._tokens = tokens
        self._pos = 0
        self._end = source_end

    def _peek(self) -> _Token | None:
        if self._pos < len(self._tokens):
            return self._tokens[self._pos]
        return None

    def _fail(self, message: str, kind: ParseErrorKind = ParseErrorKind.SYNTAX) -> ParseError:
        tok = self._peek()
        span = tok.span if tok is not None else self._end
        return ParseError(kind, span, message)

    def _next(self, expected: str) -> _Token:
        tok = self._peek()
        if tok is None:
            raise self._fail(f"expected {expected}, found end of input")
        self._pos += 1
        return tok

    def _expect(self, literal: str) -> _Token:
        tok = self._next(repr(literal))
        if tok.text != literal:
            self._pos -= 1
            raise self._fail(f"expected {literal!r}, found {tok.text!r}")
        return tok

    def _nat(self, what: str) -> tuple[int, SourceSpan]:
        tok = self._next(what)
        if not _NAT_RE.fullmatch(tok.text):
            self._pos -= 1
            raise self._fail(f"expected {what}, found {tok.text!r}")
        return int(tok.text), tok.span

    def _ident(self, what: str) -> _Token:
        tok = self._next(what)
        if not _IDENT_RE.fullmatch(tok.text) or _NAT_RE.fullmatch(tok.text):
            self._pos -= 1
            raise self._fail(f"expected {what}, found {tok.text!r}")
        return tok

    def parse_file(self) -> Program:
        self._expect("processes")
        n, _ = self._nat("process count")
        self._expect(";")
        self._expect("program")
        name = self._ident("program name").text
        self._expect("{")
        seqs: dict[int, list[Statement]] = {}
        while True:
            tok = self._peek()
            if tok is None:
                raise self._fail("expected 'process' or '}', found end of input")
            if tok.text == "}":
                self._pos += 1
                break
            self._parse_proc(n, seqs)
        if self._peek() is not None:
            raise self._fail(f"trailing input after program: {self._peek().text!r}")
        return program(name, n, seqs)

    def _parse_proc(self, n: int, seqs: dict[int, list[Statement]]) -> None:
        self._expect("process")
        pid, pid_span = self._nat("process id")
        if not 1 <= pid <= n:
            raise ParseError(
                ParseErrorKind.BAD_PROCESS_ID, pid_span, f"process id {pid} outside 1..{n}"
            )
        if pid in seqs:
            raise ParseError(
                ParseErrorKind.DUPLICATE_PROCESS, pid_span, f"duplicate block for process {pid}"
            )
        seqs[pid] = []
        self._expect("{")
        while True:
            tok = self._peek()
            if tok is None:
                raise self._fail("expected statement or '}', found end of input")
            if tok.text == "}":
                self._pos += 1
                return
            self._parse_stmt(pid, n, seqs[pid])

    def _parse_stmt(self, pid: int, n: int, out: list[Statement]) -> None:
        tok = self._next("statement")
        if tok.text == "assign":
            self._ident("variable name")
            self._expect(";")
            return
        if tok.text not in ("send", "recv"):
            self._pos -= 1
            raise self._fail(f"expected 'send', 'recv' or 'assign', found {tok.text!r}")
        peer, peer_span = self._nat("peer id")
        if not 1 <= peer <= n:
            raise ParseError(
                ParseErrorKind.BAD_PROCESS_ID, peer_span, f"peer {peer} outside 1..{n}"
            )
        if peer == pid:
            raise ParseError(
                ParseErrorKind.SELF_CHANNEL, peer_span, f"process {pid} addresses itself"
            )
        self._expect(";")
        kind = StmtKind.SEND if tok.text == "send" else StmtKind.RECV
        out.append(Statement(kind, peer))


def parse(source: str) -> Program:
    """Parse DSL text into a :class:`Program`. Raises :class:`ParseError`."""
    lines = source.split("\n")
    end = SourceSpan(len(lines), len(lines[-1]) + 1)
    return _Parser(_tokenize(source), end).parse_file()


def format_program(p: Program) -> str:
    """Render ``p`` as DSL text. Empty process blocks are omitted."""
    if not _IDENT_RE.fullmatch(p.name) or _NAT_RE.fullmatch(p.name) or p.name in _KEYWORDS:
        raise ValueError(f"program name {p.name!r} is not a printable identifier")
    out = [f"processes {p.n};", f"program {p.name} {{"]
    for proc in range(1, p.n + 1):
        seq = p.statements(proc)
        if not seq:
            continue
        out.append(f"  process {proc} {{")
        for stmt in seq:
            out.append(f"    {stmt.kind.value} {stmt.peer};")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"
