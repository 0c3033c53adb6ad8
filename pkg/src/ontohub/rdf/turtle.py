"""Turtle and N-Triples parsing.

One recursive-descent parser serves both grammars; ``ntriples=True``
switches off everything N-Triples lacks (directives, prefixed names, ``a``,
abbreviations, collections, numeric and boolean shorthands, relative IRIs).
The first error aborts the parse with an ``RDFSyntaxError`` carrying a
1-based line and column.
"""

from __future__ import annotations

import re
from typing import Optional, Union
from urllib.parse import urljoin

from ..errors import InvalidIRI, RDFSyntaxError, UnresolvedRelativeIRI
from .model import IRI, XSD_STRING, BNode, Graph, Literal, Term, Triple, is_absolute_iri

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = IRI(RDF_NS + "type")
RDF_FIRST = IRI(RDF_NS + "first")
RDF_REST = IRI(RDF_NS + "rest")
RDF_NIL = IRI(RDF_NS + "nil")

_PN_CHARS_BASE = (
    "A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    "\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD"
    "\U00010000-\U000EFFFF"
)
_PN_CHARS_U = _PN_CHARS_BASE + "_"
_PN_CHARS = _PN_CHARS_U + "\\-0-9\u00B7\u0300-\u036F\u203F-\u2040"

_PN_PREFIX_RE = re.compile(f"[{_PN_CHARS_BASE}](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?")
_LOCAL_ESC = "_~.\\-!$&'()*+,;=/?#@%"
_PLX = f"%[0-9A-Fa-f]{{2}}|\\\\[{re.escape(_LOCAL_ESC)}]"
_PN_LOCAL_RE = re.compile(
    f"(?:[{_PN_CHARS_U}:0-9]|{_PLX})(?:(?:[{_PN_CHARS}.:]|{_PLX})*(?:[{_PN_CHARS}:]|{_PLX}))?"
)
_BLANK_LABEL_RE = re.compile(f"[{_PN_CHARS_U}0-9](?:[{_PN_CHARS}.]*[{_PN_CHARS}])?")
_LANGTAG_RE = re.compile(r"[a-zA-Z]+(?:-[a-zA-Z0-9]+)*")
_NUMBER_RE = re.compile(
    r"[+-]?(?:(?P<double>(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+)"
    r"|(?P<decimal>[0-9]*\.[0-9]+)|(?P<integer>[0-9]+))"
)
_WS = " \t\r\n"
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_NAME_CHAR_RE = re.compile(f"[{_PN_CHARS}:]")


def position_of(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of ``offset``, clamped into the text."""
    if not text:
        return 1, 1
    offset = max(0, min(offset, len(text) - 1))
    line = text.count("\n", 0, offset) + 1
    start = text.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


class _Parser:
    def __init__(self, text: str, base: Optional[str], ntriples: bool) -> None:
        self.text = text
        self.n = len(text)
        self.i = 0
        self.base = base
        self.nt = ntriples
        self.prefixes: dict[str, str] = {}
        self.triples: set[Triple] = set()
        self._doc_labels = set(re.findall(r"_:([^\s.;,()\[\]<>\"']+)", text))
        self._bnode_counter = 0

    # -- diagnostics -------------------------------------------------------

    def error(self, message: str, at: Optional[int] = None, cls=RDFSyntaxError):
        line, col = position_of(self.text, self.i if at is None else at)
        raise cls(message, line, col)

    def describe(self) -> str:
        if self.i >= self.n:
            return "end of input"
        return repr(self.text[self.i])

    # -- lexical helpers ---------------------------------------------------

    def skip_ws(self) -> None:
        text, n = self.text, self.n
        while self.i < n:
            c = text[self.i]
            if c in _WS:
                self.i += 1
            elif c == "#":
                end = text.find("\n", self.i)
                self.i = n if end < 0 else end + 1
            else:
                return

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.i] if self.i < self.n else ""

    def expect(self, char: str) -> None:
        if self.peek() != char:
            self.error(f"expected {char!r}, found {self.describe()}")
        self.i += 1

    def at_keyword(self, word: str, case_insensitive: bool = False) -> bool:
        chunk = self.text[self.i : self.i + len(word)]
        if case_insensitive:
            matched = chunk.upper() == word.upper()
        else:
            matched = chunk == word
        if not matched:
            return False
        after = self.i + len(word)
        return after >= self.n or not _NAME_CHAR_RE.match(self.text[after])

    def fresh_bnode(self) -> BNode:
        while True:
            self._bnode_counter += 1
            label = f"g{self._bnode_counter}"
            if label not in self._doc_labels:
                return BNode(label)

    def emit(self, s: Term, p: IRI, o: Term) -> None:
        self.triples.add(Triple(s, p, o))

    # -- document ----------------------------------------------------------

    def parse(self) -> Graph:
        while self.peek():
            self.statement()
        return Graph(frozenset(self.triples), self.prefixes)

    def statement(self) -> None:
        start = self.i
        c = self.text[self.i]
        if c == "@" and not self.nt:
            if self.text.startswith("@prefix", self.i):
                self.i += len("@prefix")
                self.prefix_directive()
                self.expect(".")
                return
            if self.text.startswith("@base", self.i):
                self.i += len("@base")
                self.base_directive()
                self.expect(".")
                return
            self.error("unknown directive")
        if not self.nt and self.at_keyword("PREFIX", True):
            self.i += len("PREFIX")
            self.prefix_directive()
            return
        if not self.nt and self.at_keyword("BASE", True):
            self.i += len("BASE")
            self.base_directive()
            return
        self.triples_statement()
        if self.peek() != ".":
            self.error(f"expected '.' to end the statement, found {self.describe()}")
        self.i += 1
        if self.nt:
            self.check_line_end(start)

    def check_line_end(self, start: int) -> None:
        # N-Triples: nothing but a comment may follow '.' on the same line.
        j = self.i
        while j < self.n and self.text[j] in " \t":
            j += 1
        if j < self.n and self.text[j] not in "\r\n#":
            self.error("N-Triples allows one statement per line", at=j)
        # Raw newlines cannot occur inside N-Triples terms, so any newline in
        # the span separates tokens of one statement.
        if "\n" in self.text[start : self.i]:
            self.error("statement spans multiple lines", at=start)

    def prefix_directive(self) -> None:
        self.skip_ws()
        at = self.i
        m = _PN_PREFIX_RE.match(self.text, self.i)
        name = m.group() if m else ""
        self.i += len(name)
        if self.i >= self.n or self.text[self.i] != ":":
            self.error("expected a prefix name followed by ':'", at=at)
        self.i += 1
        iri = self.iriref()
        self.prefixes[name] = iri.value

    def base_directive(self) -> None:
        iri = self.iriref()
        self.base = iri.value

    # -- triples -----------------------------------------------------------

    def triples_statement(self) -> None:
        c = self.peek()
        if c == "[" and not self.nt:
            subject = self.blank_property_list()
            if self.peek() != ".":
                self.predicate_object_list(subject)
            return
        subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self) -> Term:
        c = self.peek()
        if c == "<":
            return self.iriref()
        if c == "_":
            return self.blank_label()
        if c == "(" and not self.nt:
            return self.collection()
        if c == "[" and not self.nt:
            # '[]' used as a subject
            at = self.i
            self.i += 1
            if self.peek() != "]":
                self.error("blank node property list not allowed here", at=at)
            self.i += 1
            return self.fresh_bnode()
        if not self.nt and c and c not in '"\'+-.0123456789':
            if self.at_keyword("true") or self.at_keyword("false") or self.at_keyword("a"):
                self.error("a keyword cannot be used as subject")
            return self.prefixed_name()
        self.error(f"expected a subject, found {self.describe()}")

    def predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate)
            if self.nt:
                return
            if self.peek() != ";":
                return
            while self.peek() == ";":
                self.i += 1
            if self.peek() in (".", "]", ""):
                return

    def verb(self) -> IRI:
        c = self.peek()
        if c == "<":
            return self.iriref()
        if not self.nt and c == "a" and self.at_keyword("a"):
            self.i += 1
            return RDF_TYPE
        if not self.nt and c and c not in "_[(\"'+-.0123456789":
            return self.prefixed_name()
        self.error(f"expected a predicate, found {self.describe()}")

    def object_list(self, subject: Term, predicate: IRI) -> None:
        while True:
            self.emit(subject, predicate, self.object())
            if self.nt or self.peek() != ",":
                return
            self.i += 1

    def object(self) -> Term:
        c = self.peek()
        if c == "<":
            return self.iriref()
        if c == "_":
            return self.blank_label()
        if c and c in "\"'":
            if self.nt and c == "'":
                self.error("N-Triples strings use double quotes")
            return self.rdf_literal()
        if self.nt:
            self.error(f"expected an object, found {self.describe()}")
        if c == "[":
            return self.blank_property_list()
        if c == "(":
            return self.collection()
        if c and c in "+-.0123456789":
            return self.numeric()
        if self.at_keyword("true"):
            self.i += 4
            return Literal("true", XSD_NS + "boolean")
        if self.at_keyword("false"):
            self.i += 5
            return Literal("false", XSD_NS + "boolean")
        if c:
            return self.prefixed_name()
        self.error("expected an object, found end of input")

    def blank_property_list(self) -> BNode:
        self.expect("[")
        node = self.fresh_bnode()
        if self.peek() != "]":
            self.predicate_object_list(node)
        self.expect("]")
        return node

    def collection(self) -> Term:
        self.expect("(")
        items = []
        while self.peek() != ")":
            if not self.peek():
                self.error("unterminated collection")
            items.append(self.object())
        self.i += 1
        if not items:
            return RDF_NIL
        head = node = self.fresh_bnode()
        for k, item in enumerate(items):
            self.emit(node, RDF_FIRST, item)
            nxt = RDF_NIL if k == len(items) - 1 else self.fresh_bnode()
            self.emit(node, RDF_REST, nxt)
            node = nxt
        return head

    # -- terminals ---------------------------------------------------------

    def iriref(self) -> IRI:
        self.skip_ws()
        start = self.i
        if self.i >= self.n or self.text[self.i] != "<":
            self.error(f"expected an IRI, found {self.describe()}")
        self.i += 1
        chars = []
        text = self.text
        while True:
            if self.i >= self.n:
                self.error("unterminated IRI", at=start)
            c = text[self.i]
            if c == ">":
                self.i += 1
                break
            if c == "\\":
                chars.append(self.uchar())
                continue
            if c <= " " or c in '<"{}|^`':
                self.error(f"illegal character {c!r} in IRI")
            chars.append(c)
            self.i += 1
        value = "".join(chars)
        return self.resolve(value, start)

    def resolve(self, value: str, at: int) -> IRI:
        if not is_absolute_iri(value):
            if self.nt:
                self.error(f"relative IRI <{value}> not allowed in N-Triples", at=at)
            if self.base is None:
                self.error(
                    f"relative IRI <{value}> and no base IRI", at=at, cls=UnresolvedRelativeIRI
                )
            value = urljoin(self.base, value)
        try:
            return IRI(value)
        except InvalidIRI as exc:
            self.error(str(exc), at=at, cls=UnresolvedRelativeIRI)

    def uchar(self) -> str:
        at = self.i
        kind = self.text[self.i + 1 : self.i + 2]
        width = {"u": 4, "U": 8}.get(kind)
        if width is None:
            self.error("illegal escape sequence", at=at)
        digits = self.text[self.i + 2 : self.i + 2 + width]
        if len(digits) != width or not all(d in "0123456789abcdefABCDEF" for d in digits):
            self.error("malformed unicode escape", at=at)
        code = int(digits, 16)
        if 0xD800 <= code <= 0xDFFF or code > 0x10FFFF:
            self.error("unicode escape is not a scalar value", at=at)
        self.i += 2 + width
        return chr(code)

    def prefixed_name(self) -> IRI:
        self.skip_ws()
        start = self.i
        m = _PN_PREFIX_RE.match(self.text, self.i)
        prefix = m.group() if m else ""
        j = self.i + len(prefix)
        if j >= self.n or self.text[j] != ":":
            self.error(f"expected a prefixed name, found {self.describe()}")
        if prefix not in self.prefixes:
            self.error(f"undeclared prefix {prefix!r}", at=start)
        j += 1
        m = _PN_LOCAL_RE.match(self.text, j)
        raw_local = m.group() if m else ""
        self.i = j + len(raw_local)
        local = re.sub(r"\\(.)", r"\1", raw_local)
        return self.resolve(self.prefixes[prefix] + local, start)

    def blank_label(self) -> BNode:
        start = self.i
        if not self.text.startswith("_:", self.i):
            self.error(f"expected a blank node label, found {self.describe()}")
        m = _BLANK_LABEL_RE.match(self.text, self.i + 2)
        if not m:
            self.error("malformed blank node label", at=start)
        self.i = m.end()
        return BNode(m.group())

    def numeric(self) -> Literal:
        m = _NUMBER_RE.match(self.text, self.i)
        if not m:
            self.error(f"expected an object, found {self.describe()}")
        self.i = m.end()
        if m.group("double"):
            kind = "double"
        elif m.group("decimal"):
            kind = "decimal"
        else:
            kind = "integer"
        return Literal(m.group(), XSD_NS + kind)

    def rdf_literal(self) -> Literal:
        lexical = self.string()
        if self.i < self.n and self.text[self.i] == "@":
            self.i += 1
            m = _LANGTAG_RE.match(self.text, self.i)
            if not m:
                self.error("malformed language tag")
            self.i = m.end()
            return Literal(lexical, language=m.group())
        if self.text.startswith("^^", self.i):
            self.i += 2
            if self.nt or self.text[self.i : self.i + 1] == "<":
                datatype = self.iriref()
            else:
                datatype = self.prefixed_name()
            return Literal(lexical, datatype.value)
        return Literal(lexical, XSD_STRING)

    def string(self) -> str:
        text = self.text
        start = self.i
        quote = text[self.i]
        long = not self.nt and text.startswith(quote * 3, self.i)
        self.i += 3 if long else 1
        chars = []
        while True:
            if self.i >= self.n:
                self.error("unterminated string literal", at=start)
            c = text[self.i]
            if long:
                if text.startswith(quote * 3, self.i):
                    # A long string may end with up to two extra quotes.
                    extra = 0
                    while text.startswith(quote, self.i + 3 + extra) and extra < 2:
                        extra += 1
                    chars.append(quote * extra)
                    self.i += 3 + extra
                    return "".join(chars)
            elif c == quote:
                self.i += 1
                return "".join(chars)
            elif c in "\r\n":
                self.error("newline in string literal; use a long string or \\n")
            if c == "\\":
                nxt = text[self.i + 1 : self.i + 2]
                if nxt in ("u", "U"):
                    chars.append(self.uchar())
                    continue
                if nxt in _ECHAR:
                    chars.append(_ECHAR[nxt])
                    self.i += 2
                    continue
                self.error("illegal escape sequence")
            chars.append(c)
            self.i += 1


def decode(doc: Union[bytes, str]) -> str:
    if isinstance(doc, str):
        return doc
    try:
        text = doc.decode("utf-8")
    except UnicodeDecodeError as exc:
        head = doc[: exc.start].decode("utf-8", errors="replace")
        line, col = position_of(head + "?", len(head))
        raise RDFSyntaxError("invalid UTF-8 byte sequence", line, col) from None
    return text[1:] if text.startswith("\ufeff") else text


def parse_turtle(doc: Union[bytes, str], base: Optional[str] = None) -> Graph:
    return _Parser(decode(doc), base, ntriples=False).parse()


def parse_ntriples(doc: Union[bytes, str]) -> Graph:
    return _Parser(decode(doc), None, ntriples=True).parse()
