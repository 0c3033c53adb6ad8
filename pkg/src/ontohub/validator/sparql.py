"""A small SPARQL SELECT evaluator over the embedded quad store.

It understands the subset the validator emits and nothing more: PREFIX,
SELECT [DISTINCT] with plain variables and ``(COUNT([DISTINCT] ?v|*) AS ?n)``,
a WHERE group made of VALUES blocks, GRAPH blocks and triple patterns
(``;``, ``,`` and ``a`` included), GROUP BY, ORDER BY, LIMIT and OFFSET.
The default graph is the union of all named graphs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from ..rdf import IRI, RDF, XSD, BNode, Literal, Term
from ..store import QuadStore

Solution = dict[str, Term]


class SparqlQueryError(ValueError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<lang>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?\d+)
  | (?P<pname>(?:[A-Za-z][\w\-.]*)?:[\w\-.:%]*)
  | (?P<word>[A-Za-z]+)
  | (?P<punct>[{}().;,*])
    """,
    re.VERBOSE,
)

_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SparqlQueryError(f"unexpected character {text[pos]!r} at offset {pos}")
        pos = m.end()
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group()))
    return tokens


@dataclass
class Aggregate:
    var: Optional[str]  # None means COUNT(*)
    distinct: bool
    alias: str


@dataclass
class TriplePattern:
    s: Union[str, Term]
    p: Union[str, Term]
    o: Union[str, Term]


@dataclass
class GraphBlock:
    graph: Union[str, Term]
    patterns: list[TriplePattern]


@dataclass
class ValuesBlock:
    var: str
    terms: list[Term]


@dataclass
class Query:
    distinct: bool = False
    projection: list[Union[str, Aggregate]] = field(default_factory=list)
    star: bool = False
    where: list = field(default_factory=list)
    group_by: list[str] = field(default_factory=list)
    order_by: list[tuple[str, bool]] = field(default_factory=list)
    limit: Optional[int] = None
    offset: int = 0

    @property
    def variables(self) -> list[str]:
        if not self.star:
            return [p if isinstance(p, str) else p.alias for p in self.projection]
        seen: list[str] = []
        for block in self.where:
            items = [block.var] if isinstance(block, ValuesBlock) else []
            if isinstance(block, GraphBlock):
                items.append(block.graph)
                patterns = block.patterns
            elif isinstance(block, TriplePattern):
                patterns = [block]
            else:
                patterns = []
            for pat in patterns:
                items += [pat.s, pat.p, pat.o]
            seen += [v for v in items if isinstance(v, str) and v not in seen]
        return seen


class _QueryParser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    def peek(self, offset: int = 0) -> tuple[str, str]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else ("eof", "")

    def next(self) -> tuple[str, str]:
        tok = self.peek()
        if tok[0] == "eof":
            raise SparqlQueryError("unexpected end of query")
        self.pos += 1
        return tok

    def keyword(self, *words: str) -> bool:
        kind, text = self.peek()
        if kind == "word" and text.upper() in words:
            self.pos += 1
            return True
        return False

    def expect(self, value: str) -> None:
        kind, text = self.next()
        if text.upper() != value:
            raise SparqlQueryError(f"expected {value!r}, found {text!r}")

    def parse(self) -> Query:
        while self.keyword("PREFIX"):
            kind, name = self.next()
            if kind != "pname" or not name.endswith(":"):
                raise SparqlQueryError(f"bad prefix name {name!r}")
            kind, iri = self.next()
            if kind != "iri":
                raise SparqlQueryError("PREFIX needs an IRI")
            self.prefixes[name[:-1]] = iri[1:-1]
        q = Query()
        self.expect("SELECT")
        q.distinct = self.keyword("DISTINCT")
        if self.peek() == ("punct", "*"):
            self.next()
            q.star = True
        while not q.star:
            kind, text = self.peek()
            if kind == "var":
                self.next()
                q.projection.append(text[1:])
            elif text == "(":
                q.projection.append(self.aggregate())
            else:
                break
        if not q.star and not q.projection:
            raise SparqlQueryError("SELECT needs at least one variable")
        self.keyword("WHERE")
        q.where = self.group()
        if self.keyword("GROUP"):
            self.expect("BY")
            while self.peek()[0] == "var":
                q.group_by.append(self.next()[1][1:])
        if self.keyword("ORDER"):
            self.expect("BY")
            while True:
                if self.keyword("ASC", "DESC"):
                    descending = self.tokens[self.pos - 1][1].upper() == "DESC"
                    self.expect("(")
                    q.order_by.append((self.variable(), descending))
                    self.expect(")")
                elif self.peek()[0] == "var":
                    q.order_by.append((self.variable(), False))
                else:
                    break
        while True:
            if self.keyword("LIMIT"):
                q.limit = self.integer()
            elif self.keyword("OFFSET"):
                q.offset = self.integer()
            else:
                break
        if self.peek()[0] != "eof":
            raise SparqlQueryError(f"unexpected {self.peek()[1]!r}")
        aggregates = [p for p in q.projection if isinstance(p, Aggregate)]
        plain = [p for p in q.projection if isinstance(p, str)]
        if aggregates and set(plain) - set(q.group_by):
            raise SparqlQueryError("non-grouped variable in an aggregate query")
        return q

    def integer(self) -> int:
        kind, text = self.next()
        if kind != "number" or int(text) < 0:
            raise SparqlQueryError(f"expected a non-negative integer, found {text!r}")
        return int(text)

    def variable(self) -> str:
        kind, text = self.next()
        if kind != "var":
            raise SparqlQueryError(f"expected a variable, found {text!r}")
        return text[1:]

    def aggregate(self) -> Aggregate:
        self.expect("(")
        self.expect("COUNT")
        self.expect("(")
        distinct = self.keyword("DISTINCT")
        if self.peek() == ("punct", "*"):
            self.next()
            var = None
        else:
            var = self.variable()
        self.expect(")")
        self.expect("AS")
        alias = self.variable()
        self.expect(")")
        return Aggregate(var, distinct, alias)

    def term(self) -> Union[str, Term]:
        kind, text = self.next()
        if kind == "var":
            return text[1:]
        if kind == "iri":
            return IRI(text[1:-1])
        if kind == "pname":
            prefix, _, local = text.partition(":")
            if prefix not in self.prefixes:
                raise SparqlQueryError(f"undeclared prefix {prefix!r}")
            return IRI(self.prefixes[prefix] + local)
        if kind == "word" and text == "a":
            return RDF.type
        if kind == "number":
            return Literal(text, XSD.integer.value)
        if kind == "string":
            lexical = _unescape(text[1:-1])
            if self.peek()[0] == "lang":
                return Literal(lexical, language=self.next()[1][1:])
            if self.peek()[0] == "dtype":
                self.next()
                dt = self.term()
                if not isinstance(dt, IRI):
                    raise SparqlQueryError("datatype must be an IRI")
                return Literal(lexical, dt.value)
            return Literal(lexical)
        raise SparqlQueryError(f"expected a term, found {text!r}")

    def group(self) -> list:
        self.expect("{")
        items: list = []
        while True:
            kind, text = self.peek()
            if text == "}":
                self.next()
                return items
            if self.keyword("VALUES"):
                var = self.variable()
                self.expect("{")
                terms = []
                while self.peek()[1] != "}":
                    value = self.term()
                    if isinstance(value, str):
                        raise SparqlQueryError("VALUES holds terms, not variables")
                    terms.append(value)
                self.next()
                items.append(ValuesBlock(var, terms))
            elif self.keyword("GRAPH"):
                graph = self.term()
                inner = self.group()
                if not all(isinstance(i, TriplePattern) for i in inner):
                    raise SparqlQueryError("only triple patterns are allowed inside GRAPH")
                items.append(GraphBlock(graph, inner))
            else:
                items.extend(self.triples())
            if self.peek()[1] == ".":
                self.next()

    def triples(self) -> list[TriplePattern]:
        subject = self.term()
        out = []
        while True:
            predicate = self.term()
            while True:
                out.append(TriplePattern(subject, predicate, self.term()))
                if self.peek()[1] != ",":
                    break
                self.next()
            if self.peek()[1] != ";":
                return out
            while self.peek()[1] == ";":
                self.next()
            if self.peek()[1] in (".", "}"):
                return out


def parse_query(text: str) -> Query:
    return _QueryParser(text).parse()


# -- evaluation -------------------------------------------------------------------


def _resolve(slot: Union[str, Term], row: Solution) -> Optional[Term]:
    if isinstance(slot, str):
        return row.get(slot)
    return slot


def _bind(row: Solution, slots, values) -> Optional[Solution]:
    out = dict(row)
    for slot, value in zip(slots, values):
        if isinstance(slot, str):
            if slot in out and out[slot] != value:
                return None
            out[slot] = value
    return out


def _match_patterns(store: QuadStore, graph: Union[str, Term, None], patterns: list[TriplePattern], rows: list[Solution]) -> list[Solution]:
    for pat in patterns:
        produced: list[Solution] = []
        for row in rows:
            g = _resolve(graph, row) if graph is not None else None
            s, p, o = (_resolve(x, row) for x in (pat.s, pat.p, pat.o))
            for qg, qs, qp, qo in store.match_terms(g, s, p, o):
                slots = (pat.s, pat.p, pat.o) if graph is None else (graph, pat.s, pat.p, pat.o)
                values = (qs, qp, qo) if graph is None else (qg, qs, qp, qo)
                bound = _bind(row, slots, values)
                if bound is not None:
                    produced.append(bound)
        rows = produced
    if not patterns and graph is not None:
        names = sorted(store.list_graphs(), key=lambda t: t.value)
        rows = [b for row in rows for b in (_bind(row, (graph,), (name,)) for name in names) if b is not None]
    return rows


def _order_key(term: Optional[Term]):
    # unbound < blank < IRI < literal, matching SPARQL's ordering of kinds
    if term is None:
        return (0,)
    if isinstance(term, BNode):
        return (1, term.label)
    if isinstance(term, IRI):
        return (2, term.value)
    if term.datatype == XSD.integer.value:
        try:
            return (3, 0, int(term.lexical), "")
        except ValueError:
            pass
    return (3, 1, 0, term.lexical)


def evaluate(store: QuadStore, query: Union[str, Query]) -> tuple[list[str], list[Solution]]:
    """Run ``query`` against ``store``; returns (variables, rows)."""
    q = parse_query(query) if isinstance(query, str) else query
    rows: list[Solution] = [{}]
    for block in q.where:
        if isinstance(block, ValuesBlock):
            rows = [b for row in rows for b in (_bind(row, (block.var,), (t,)) for t in block.terms) if b is not None]
        elif isinstance(block, GraphBlock):
            rows = _match_patterns(store, block.graph, block.patterns, rows)
        else:
            rows = _match_patterns(store, None, [block], rows)

    aggregates = [p for p in q.projection if isinstance(p, Aggregate)]
    if aggregates or q.group_by:
        groups: dict[tuple, list[Solution]] = {}
        for row in rows:
            groups.setdefault(tuple(row.get(v) for v in q.group_by), []).append(row)
        if not q.group_by and not groups:
            groups[()] = []
        rows = []
        for key, members in groups.items():
            out: Solution = {v: t for v, t in zip(q.group_by, key) if t is not None}
            for agg in aggregates:
                if agg.var is None:
                    values = [tuple(sorted(m.items(), key=lambda kv: kv[0])) for m in members]
                else:
                    values = [m[agg.var] for m in members if agg.var in m]
                n = len(set(values)) if agg.distinct else len(values)
                out[agg.alias] = Literal(str(n), XSD.integer.value)
            rows.append(out)

    variables = q.variables
    if not q.star:
        rows = [{v: row[v] for v in variables if v in row} for row in rows]
    if q.distinct:
        seen = set()
        unique = []
        for row in rows:
            key = tuple(row.get(v) for v in variables)
            if key not in seen:
                seen.add(key)
                unique.append(row)
        rows = unique
    for var, descending in reversed(q.order_by):
        rows.sort(key=lambda row: _order_key(row.get(var)), reverse=descending)
    rows = rows[q.offset :]
    if q.limit is not None:
        rows = rows[: q.limit]
    return variables, rows


# -- SPARQL JSON results ------------------------------------------------------------


def term_to_json(term: Term) -> dict:
    if isinstance(term, IRI):
        return {"type": "uri", "value": term.value}
    if isinstance(term, BNode):
        return {"type": "bnode", "value": term.label}
    out = {"type": "literal", "value": term.lexical}
    if term.language:
        out["xml:lang"] = term.language
    elif term.datatype != XSD.string.value:
        out["datatype"] = term.datatype
    return out


def term_from_json(data: dict) -> Term:
    kind = data.get("type")
    value = data.get("value")
    if not isinstance(value, str):
        raise ValueError("binding without a string value")
    if kind == "uri":
        return IRI(value)
    if kind == "bnode":
        return BNode(value)
    if kind in ("literal", "typed-literal"):
        if data.get("xml:lang"):
            return Literal(value, language=data["xml:lang"])
        return Literal(value, data.get("datatype") or XSD.string.value)
    raise ValueError(f"unknown binding type {kind!r}")


def results_to_json(variables: Iterable[str], rows: Iterable[Solution]) -> dict:
    return {
        "head": {"vars": list(variables)},
        "results": {"bindings": [{v: term_to_json(t) for v, t in row.items()} for row in rows]},
    }
