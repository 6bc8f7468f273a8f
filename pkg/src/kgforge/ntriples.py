"""Lexical layer for the N-Triples subset used by the store.

Supported grammar per line: subject predicate object '.', where terms are
IRIs in angle brackets or literals (plain, @lang, or ^^<datatype>). Blank
nodes are not part of the subset. Escapes: named ECHARs plus \\uXXXX and
\\UXXXXXXXX.
"""

from __future__ import annotations

import re

from .errors import ParseError

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANG_RE = re.compile(r"^[A-Za-z]{1,8}(?:-[A-Za-z0-9]{1,8})*$")
# IRIREF forbids controls, space and these delimiters unless escaped.
_IRI_FORBIDDEN = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}

_NAMED_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_LITERAL_OUT = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def has_scheme(text: str) -> bool:
    return bool(_SCHEME_RE.match(text))


def valid_iri(text: str) -> bool:
    return has_scheme(text) and not any(ch in _IRI_FORBIDDEN for ch in text)


def valid_language_tag(tag: str) -> bool:
    return bool(_LANG_RE.match(tag))


def escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch in _LITERAL_OUT:
            out.append(_LITERAL_OUT[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append("\\u%04X" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


class _Scanner:
    """Single-line scanner producing raw term tokens."""

    def __init__(self, line: str, lineno: int):
        self.line = line
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> ParseError:
        return ParseError(f"{message} (at column {self.pos + 1})", line=self.lineno)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def _unescape(self, body: str, what: str) -> str:
        out = []
        i = 0
        while i < len(body):
            ch = body[i]
            if ch != "\\":
                out.append(ch)
                i += 1
                continue
            if i + 1 >= len(body):
                raise self.error(f"dangling escape in {what}")
            esc = body[i + 1]
            if esc in _NAMED_ESCAPES:
                out.append(_NAMED_ESCAPES[esc])
                i += 2
            elif esc == "u" or esc == "U":
                width = 4 if esc == "u" else 8
                hexpart = body[i + 2 : i + 2 + width]
                if len(hexpart) != width or not all(c in "0123456789abcdefABCDEF" for c in hexpart):
                    raise self.error(f"bad \\{esc} escape in {what}")
                code = int(hexpart, 16)
                if code > 0x10FFFF:
                    raise self.error(f"codepoint out of range in {what}")
                out.append(chr(code))
                i += 2 + width
            else:
                raise self.error(f"unknown escape '\\{esc}' in {what}")
        return "".join(out)

    def read_iri(self) -> str:
        if self.line[self.pos] != "<":
            raise self.error("expected '<'")
        end = self.pos + 1
        while end < len(self.line) and self.line[end] != ">":
            end += 1
        if end >= len(self.line):
            raise self.error("unterminated IRI")
        raw = self.line[self.pos + 1 : end]
        self.pos = end + 1
        text = self._unescape(raw, "IRI")
        if not valid_iri(text):
            raise self.error(f"malformed IRI <{text}>")
        return text

    def read_literal(self) -> tuple[str, str | None, str | None]:
        if self.line[self.pos] != '"':
            raise self.error("expected '\"'")
        i = self.pos + 1
        while i < len(self.line):
            if self.line[i] == "\\":
                i += 2
                continue
            if self.line[i] == '"':
                break
            i += 1
        if i >= len(self.line) or self.line[i] != '"':
            raise self.error("unterminated literal")
        lexical = self._unescape(self.line[self.pos + 1 : i], "literal")
        self.pos = i + 1
        datatype = None
        language = None
        if self.pos < len(self.line) and self.line[self.pos] == "@":
            start = self.pos + 1
            end = start
            while end < len(self.line) and (self.line[end].isalnum() or self.line[end] == "-"):
                end += 1
            language = self.line[start:end]
            if not valid_language_tag(language):
                raise self.error(f"bad language tag '@{language}'")
            self.pos = end
        elif self.line.startswith("^^", self.pos):
            self.pos += 2
            if self.at_end() or self.line[self.pos] != "<":
                raise self.error("expected datatype IRI after '^^'")
            datatype = self.read_iri()
        return lexical, datatype, language

    def read_term(self):
        """Return ('iri', text) or ('literal', lexical, datatype, language)."""
        self.skip_ws()
        if self.at_end():
            raise self.error("unexpected end of line")
        ch = self.line[self.pos]
        if ch == "<":
            return ("iri", self.read_iri())
        if ch == '"':
            lexical, datatype, language = self.read_literal()
            return ("literal", lexical, datatype, language)
        raise self.error(f"unexpected character {ch!r}")


def parse_line(line: str, lineno: int):
    """Parse one triple line into three raw term tokens.

    Returns None for blank and comment-only lines.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    scanner = _Scanner(line, lineno)
    subject = scanner.read_term()
    predicate = scanner.read_term()
    obj = scanner.read_term()
    scanner.skip_ws()
    if scanner.at_end() or scanner.line[scanner.pos] != ".":
        raise scanner.error("expected '.' terminator")
    scanner.pos += 1
    scanner.skip_ws()
    if not scanner.at_end():
        raise scanner.error("trailing content after '.'")
    return subject, predicate, obj
