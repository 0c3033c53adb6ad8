"""RDF terms, triples, quads and immutable graphs."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Union

from ..errors import InvalidIRI

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_FORBIDDEN_IRI_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_LANG_RE = re.compile(r"^[A-Za-z]+(?:-[A-Za-z0-9]+)*$")


def is_absolute_iri(text: str) -> bool:
    return bool(_SCHEME_RE.match(text)) and not _FORBIDDEN_IRI_CHARS.search(text)


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME_RE.match(self.value):
            raise InvalidIRI(f"not an absolute IRI: {self.value!r}")
        bad = _FORBIDDEN_IRI_CHARS.search(self.value)
        if bad:
            raise InvalidIRI(f"illegal character {bad.group()!r} in IRI {self.value!r}")

    kind = "iri"

    def sort_key(self) -> tuple:
        return (0, self.value, "", "")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BNode:
    label: str

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("blank node label must be non-empty")

    kind = "blank"

    def sort_key(self) -> tuple:
        return (1, self.label, "", "")

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if not _LANG_RE.match(self.language):
                raise ValueError(f"malformed language tag {self.language!r}")
            if self.datatype == XSD_STRING:
                object.__setattr__(self, "datatype", RDF_LANGSTRING)
            elif self.datatype != RDF_LANGSTRING:
                raise ValueError("a language-tagged literal must use rdf:langString")
        elif self.datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal without a language tag")
        elif not is_absolute_iri(self.datatype):
            raise InvalidIRI(f"literal datatype is not an absolute IRI: {self.datatype!r}")

    kind = "literal"

    def sort_key(self) -> tuple:
        return (2, self.lexical, self.datatype, self.language or "")

    def n3(self) -> str:
        from .ntriples import escape_string

        text = f'"{escape_string(self.lexical)}"'
        if self.language:
            return f"{text}@{self.language}"
        if self.datatype != XSD_STRING:
            return f"{text}^^<{self.datatype}>"
        return text

    def __str__(self) -> str:
        return self.lexical


Term = Union[IRI, BNode, Literal]
Subject = Union[IRI, BNode]


def make_iri(text: str) -> IRI:
    """Build an IRI term from user text, trimming surrounding whitespace only."""
    if not isinstance(text, str):
        raise InvalidIRI(f"IRI must be a string, got {type(text).__name__}")
    text = text.strip()
    if not text:
        raise InvalidIRI("empty IRI")
    return IRI(text)


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: IRI
    object: Term

    def __post_init__(self) -> None:
        if not isinstance(self.subject, (IRI, BNode)):
            raise TypeError(f"triple subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise TypeError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (IRI, BNode, Literal)):
            raise TypeError(f"triple object must be an RDF term, got {self.object!r}")

    def __iter__(self) -> Iterator[Term]:
        yield self.subject
        yield self.predicate
        yield self.object

    def has_blank(self) -> bool:
        return isinstance(self.subject, BNode) or isinstance(self.object, BNode)

    def sort_key(self) -> tuple:
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


@dataclass(frozen=True, slots=True)
class Quad:
    triple: Triple
    graph: Optional[IRI] = None

    def __post_init__(self) -> None:
        if self.graph is not None and not isinstance(self.graph, IRI):
            raise TypeError("quad graph name must be an IRI")


def _freeze_prefixes(prefixes: Optional[Mapping[str, str]]) -> Mapping[str, str]:
    return MappingProxyType(dict(prefixes or {}))


@dataclass(frozen=True, eq=False)
class Graph:
    """An immutable set of triples plus the prefix map it was written with.

    Equality compares triples only; prefix maps are presentation.
    """

    triples: frozenset = frozenset()
    prefixes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.triples, frozenset):
            object.__setattr__(self, "triples", frozenset(self.triples))
        object.__setattr__(self, "prefixes", _freeze_prefixes(self.prefixes))
        object.__setattr__(self, "_index", None)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self.triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.triples == other.triples

    def __hash__(self) -> int:
        return hash(self.triples)

    def __or__(self, other: "Graph") -> "Graph":
        return self.union(other)

    def __sub__(self, other: "Graph") -> "Graph":
        return self.difference(other)

    def __repr__(self) -> str:
        return f"<Graph {len(self.triples)} triples, {len(self.prefixes)} prefixes>"

    def union(self, other: "Graph | Iterable[Triple]") -> "Graph":
        prefixes = dict(self.prefixes)
        if isinstance(other, Graph):
            for k, v in other.prefixes.items():
                prefixes.setdefault(k, v)
            other = other.triples
        return Graph(self.triples | frozenset(other), prefixes)

    def difference(self, other: "Graph | Iterable[Triple]") -> "Graph":
        if isinstance(other, Graph):
            other = other.triples
        return Graph(self.triples - frozenset(other), self.prefixes)

    def with_prefixes(self, prefixes: Mapping[str, str]) -> "Graph":
        return Graph(self.triples, prefixes)

    def sorted_triples(self) -> list[Triple]:
        return sorted(self.triples, key=Triple.sort_key)

    def _indexes(self) -> tuple[dict, dict, dict]:
        index = self._index
        if index is None:
            by_s: dict = {}
            by_p: dict = {}
            by_o: dict = {}
            for t in self.triples:
                by_s.setdefault(t.subject, []).append(t)
                by_p.setdefault(t.predicate, []).append(t)
                by_o.setdefault(t.object, []).append(t)
            index = (by_s, by_p, by_o)
            object.__setattr__(self, "_index", index)
        return index

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        obj: Optional[Term] = None,
    ) -> list[Triple]:
        """Triples unifying with the pattern; ``None`` is a wildcard."""
        by_s, by_p, by_o = self._indexes()
        if subject is not None:
            candidates = by_s.get(subject, ())
        elif obj is not None:
            candidates = by_o.get(obj, ())
        elif predicate is not None:
            candidates = by_p.get(predicate, ())
        else:
            return list(self.triples)
        return [
            t
            for t in candidates
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (obj is None or t.object == obj)
        ]

    def objects(self, subject: Term, predicate: Term) -> list[Term]:
        return [t.object for t in self.match(subject, predicate, None)]

    def subjects(self, predicate: Term, obj: Term) -> list[Subject]:
        return [t.subject for t in self.match(None, predicate, obj)]

    def subjects_of(self) -> set[Subject]:
        return set(self._indexes()[0])


def term_sort_key(term: Term) -> tuple:
    return term.sort_key()
