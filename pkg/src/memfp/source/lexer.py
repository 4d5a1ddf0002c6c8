"""Tokenizer for the supported ECMAScript subset.

Comments and whitespace never reach the parser.  Regular-expression
literals are outside the subset: a ``/`` is always division.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import JsSyntaxError, UnsupportedConstruct

KEYWORDS = frozenset(
    {
        "var", "function", "return", "if", "else", "while", "do", "for",
        "break", "continue", "switch", "case", "default", "new", "delete",
        "typeof", "instanceof", "in", "void", "null", "true", "false",
        "this", "throw", "try", "catch", "finally", "class", "extends",
        "let", "const", "import", "export",
    }
)

REJECTED_KEYWORDS = frozenset(
    {"yield", "async", "await", "enum", "super", "with", "debugger"}
)

PUNCT = [
    ">>>=", "===", "!==", ">>>", "<<=", ">>=", "++", "--", "&&", "||",
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=", "<<", ">>", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">",
    "+", "-", "*", "/", "%", "&", "|", "^", "!", "~", "?", ":", "=", ".",
]

_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v",
    "0": "\0", "'": "'", '"': '"', "\\": "\\", "\n": "",
}


@dataclass
class Token:
    type: str  # "ident" | "keyword" | "num" | "str" | "punct" | "eof"
    value: str
    start: int
    end: int
    line: int
    col: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


class Lexer:
    def __init__(self, text: str, path: str = "<source>"):
        self.text = text
        self.path = path
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, exc=JsSyntaxError):
        raise exc(message, self.path, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _skip_trivia(self) -> None:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n\f\v":
                self._advance()
            elif ch == "/" and text.startswith("//", self.pos):
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
            elif ch == "/" and text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    self.error("unterminated block comment")
                self._advance(end + 2 - self.pos)
            else:
                return

    def _read_string(self) -> Token:
        start, line, col = self.pos, self.line, self.col
        quote = self.text[self.pos]
        self._advance()
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated string literal")
            ch = self.text[self.pos]
            if ch == quote:
                self._advance()
                return Token("str", "".join(out), start, self.pos, line, col)
            if ch == "\n":
                self.error("unterminated string literal")
            if ch == "\\":
                self._advance()
                esc = self.text[self.pos] if self.pos < len(self.text) else ""
                if esc == "x":
                    hexpart = self.text[self.pos + 1 : self.pos + 3]
                    if len(hexpart) != 2 or not all(c in "0123456789abcdefABCDEF" for c in hexpart):
                        self.error("invalid \\x escape")
                    out.append(chr(int(hexpart, 16)))
                    self._advance(3)
                elif esc == "u":
                    hexpart = self.text[self.pos + 1 : self.pos + 5]
                    if len(hexpart) != 4 or not all(c in "0123456789abcdefABCDEF" for c in hexpart):
                        self.error("invalid \\u escape")
                    out.append(chr(int(hexpart, 16)))
                    self._advance(5)
                elif esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                    self._advance()
                else:
                    out.append(esc)
                    self._advance()
            else:
                out.append(ch)
                self._advance()

    def _read_number(self) -> Token:
        start, line, col = self.pos, self.line, self.col
        text = self.text
        if text.startswith(("0x", "0X"), self.pos):
            self._advance(2)
            digits = self.pos
            while self.pos < len(text) and text[self.pos] in "0123456789abcdefABCDEF":
                self._advance()
            if self.pos == digits:
                self.error("invalid hex literal")
            return Token("num", text[start : self.pos], start, self.pos, line, col)
        while self.pos < len(text) and text[self.pos].isdigit():
            self._advance()
        if self.pos < len(text) and text[self.pos] == ".":
            self._advance()
            while self.pos < len(text) and text[self.pos].isdigit():
                self._advance()
        if self.pos < len(text) and text[self.pos] in "eE":
            mark = self.pos
            self._advance()
            if self.pos < len(text) and text[self.pos] in "+-":
                self._advance()
            if self.pos < len(text) and text[self.pos].isdigit():
                while self.pos < len(text) and text[self.pos].isdigit():
                    self._advance()
            else:
                self.pos = mark  # bare 'e' belongs to a following identifier
        value = text[start : self.pos]
        if self.pos < len(text) and _is_ident_start(text[self.pos]):
            self.error("identifier starts immediately after number")
        return Token("num", value, start, self.pos, line, col)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text = self.text
        while True:
            self._skip_trivia()
            if self.pos >= len(text):
                out.append(Token("eof", "", self.pos, self.pos, self.line, self.col))
                return out
            ch = text[self.pos]
            start, line, col = self.pos, self.line, self.col
            if _is_ident_start(ch):
                while self.pos < len(text) and _is_ident_part(text[self.pos]):
                    self._advance()
                word = text[start : self.pos]
                if word in REJECTED_KEYWORDS:
                    raise UnsupportedConstruct(
                        f"'{word}' is outside the supported subset", self.path, line, col
                    )
                ttype = "keyword" if word in KEYWORDS else "ident"
                out.append(Token(ttype, word, start, self.pos, line, col))
            elif ch.isdigit() or (ch == "." and self.pos + 1 < len(text) and text[self.pos + 1].isdigit()):
                out.append(self._read_number())
            elif ch in "'\"":
                out.append(self._read_string())
            elif ch == "`":
                raise UnsupportedConstruct("template literals are not supported", self.path, line, col)
            else:
                for p in PUNCT:
                    if text.startswith(p, self.pos):
                        self._advance(len(p))
                        out.append(Token("punct", p, start, self.pos, line, col))
                        break
                else:
                    self.error(f"unexpected character {ch!r}")


def tokenize(text: str, path: str = "<source>") -> list[Token]:
    return Lexer(text, path).tokens()
