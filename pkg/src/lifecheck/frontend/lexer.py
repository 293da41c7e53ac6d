"""Tokenizer for the supported source subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from ..model import LifecheckError


class ParseError(LifecheckError):
    def __init__(self, message: str, line: int = 0, col: int = 0, file: str = "<input>") -> None:
        super().__init__(f"{file}:{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.file = file


@dataclass(frozen=True)
class Token:
    kind: str  # ident | lifetime | int | float | str | char | punct | eof
    text: str
    line: int
    col: int

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


_PUNCT = [
    "::", "->", "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=",
    "..=", "...", "..",
    "{", "}", "(", ")", "[", "]", "<", ">", ",", ";", ":", ".", "&", "*", "=", "+", "-",
    "/", "%", "!", "?", "#", "|", "^", "@", "$", "~",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*)
  | (?P<lifetime>'[A-Za-z_][A-Za-z0-9_]*(?!'))
  | (?P<char>'(?:\\.|[^'\\])')
  | (?P<bstr>b?r\#*")
  | (?P<str>b?"(?:\\.|[^"\\])*")
  | (?P<float>\d[\d_]*\.\d[\d_]*(?:[eE][+-]?\d+)?(?:f32|f64)?)
  | (?P<int>(?:0x[0-9a-fA-F_]+|0o[0-7_]+|0b[01_]+|\d[\d_]*)(?:[iu](?:8|16|32|64|128|size)|f32|f64)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>"""
    + "|".join(re.escape(p) for p in sorted(_PUNCT, key=len, reverse=True))
    + r""")
    """,
    re.VERBOSE,
)


def tokenize(source: str, file: str = "<input>") -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col, file)
        kind = m.lastgroup
        text = m.group(0)
        if kind == "block_comment":
            end = _skip_block_comment(source, pos, line, col, file)
            text = source[pos:end]
        elif kind == "bstr":
            hashes = text.count("#")
            close = '"' + "#" * hashes
            end = source.find(close, m.end())
            if end < 0:
                raise ParseError("unterminated raw string", line, col, file)
            text = source[pos : end + len(close)]
            kind = "str"
        if kind not in ("ws", "line_comment", "block_comment"):
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos += len(text)
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _skip_block_comment(source: str, pos: int, line: int, col: int, file: str) -> int:
    depth = 0
    i = pos
    while i < len(source):
        if source.startswith("/*", i):
            depth += 1
            i += 2
        elif source.startswith("*/", i):
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    raise ParseError("unterminated block comment", line, col, file)
