"""Symbolic-expression reader with source spans and recoverable diagnostics.

The reader never raises on malformed text: every input yields a list of
forms plus a list of diagnostics. An error inside one form does not stop
the scan of its siblings. Symbols are case-insensitive and canonicalized
to lowercase; `;` starts a line comment.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    span: SourceSpan
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.message}"


@dataclass(frozen=True)
class SAtom:
    text: str
    span: SourceSpan


@dataclass(frozen=True)
class SList:
    items: tuple
    span: SourceSpan


SNode = SAtom | SList

_DELIMS = "();"


class _Scanner:
    def __init__(self, text: str, filename: str):
        self.text = text
        self.file = filename
        self.pos = 0
        self.line = 1
        self.col = 1

    def span(self, length: int = 1) -> SourceSpan:
        return SourceSpan(self.file, self.line, self.col, length)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_blank(self) -> None:
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == ";":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
            elif ch.isspace():
                self.advance()
            else:
                return


def read(text: str, filename: str = "<input>") -> tuple[list[SNode], list[Diagnostic]]:
    """Read every top-level form; diagnostics instead of exceptions.

    Iterative, so arbitrarily deep nesting degrades into diagnostics rather
    than exhausting the interpreter stack.
    """
    sc = _Scanner(text, filename)
    diags: list[Diagnostic] = []
    top: list[SNode] = []
    # Stack of (open-paren span, collected items) for every unclosed list.
    stack: list[tuple[SourceSpan, list[SNode]]] = []
    while True:
        sc.skip_blank()
        ch = sc.peek()
        if ch == "":
            break
        if ch == "(":
            stack.append((sc.span(), []))
            sc.advance()
        elif ch == ")":
            sc.advance()
            if not stack:
                diags.append(
                    Diagnostic(
                        SourceSpan(sc.file, sc.line, sc.col - 1),
                        "unbalanced closing parenthesis",
                    )
                )
                continue
            span, items = stack.pop()
            node = SList(tuple(items), span)
            (stack[-1][1] if stack else top).append(node)
        else:
            start = sc.span()
            chars = []
            while sc.peek() and not sc.peek().isspace() and sc.peek() not in _DELIMS:
                chars.append(sc.advance())
            word = "".join(chars)
            atom = SAtom(word.lower(), SourceSpan(start.file, start.line, start.column, len(word)))
            (stack[-1][1] if stack else top).append(atom)
    while stack:
        span, items = stack.pop()
        diags.append(Diagnostic(span, "unclosed parenthesis"))
        node = SList(tuple(items), span)
        (stack[-1][1] if stack else top).append(node)
    return top, diags
