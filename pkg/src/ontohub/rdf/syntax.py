"""Format registry: parse/serialize entry points and media types."""

from __future__ import annotations

from enum import Enum
from typing import Optional, Union

from ..errors import UnsupportedFormat
from .model import Graph
from .ntriples import serialize_ntriples
from .turtle import parse_ntriples, parse_turtle
from .writers import serialize_rdfjson, serialize_rdfxml, serialize_turtle


class SyntaxFormat(str, Enum):
    TURTLE = "turtle"
    NTRIPLES = "ntriples"
    RDFXML = "rdfxml"
    RDFJSON = "rdfjson"

    @classmethod
    def from_name(cls, name: Union[str, "SyntaxFormat"]) -> "SyntaxFormat":
        if isinstance(name, SyntaxFormat):
            return name
        key = name.strip().lower()
        try:
            return cls(_ALIASES.get(key, key))
        except ValueError:
            raise UnsupportedFormat(f"unknown format {name!r}") from None

    @property
    def media_type(self) -> str:
        return MEDIA_TYPES[self]

    @property
    def extension(self) -> str:
        return {"turtle": "ttl", "ntriples": "nt", "rdfxml": "rdf", "rdfjson": "rj"}[self.value]


_ALIASES = {
    "ttl": "turtle",
    "nt": "ntriples",
    "n-triples": "ntriples",
    "xml": "rdfxml",
    "rdf/xml": "rdfxml",
    "rdf": "rdfxml",
    "json": "rdfjson",
    "rdf/json": "rdfjson",
    "rj": "rdfjson",
}

MEDIA_TYPES = {
    SyntaxFormat.TURTLE: "text/turtle",
    SyntaxFormat.NTRIPLES: "application/n-triples",
    SyntaxFormat.RDFXML: "application/rdf+xml",
    SyntaxFormat.RDFJSON: "application/rdf+json",
}
FORMAT_FOR_MEDIA_TYPE = {v: k for k, v in MEDIA_TYPES.items()}

PARSEABLE = (SyntaxFormat.TURTLE, SyntaxFormat.NTRIPLES)


def parse(doc: Union[bytes, str], format: Union[str, SyntaxFormat] = SyntaxFormat.TURTLE, base: Optional[str] = None) -> Graph:
    """Parse a Turtle or N-Triples document into a Graph.

    Relative IRIs resolve against ``base`` (or an in-document base); with no
    base they raise ``UnresolvedRelativeIRI``. RDF/XML and RDF/JSON are
    output-only and raise ``UnsupportedFormat``.
    """
    fmt = SyntaxFormat.from_name(format)
    if fmt is SyntaxFormat.TURTLE:
        return parse_turtle(doc, base)
    if fmt is SyntaxFormat.NTRIPLES:
        return parse_ntriples(doc)
    raise UnsupportedFormat(f"{fmt.value} is an output-only format")


def serialize(g: Graph, format: Union[str, SyntaxFormat] = SyntaxFormat.TURTLE) -> bytes:
    fmt = SyntaxFormat.from_name(format)
    if fmt is SyntaxFormat.TURTLE:
        return serialize_turtle(g)
    if fmt is SyntaxFormat.NTRIPLES:
        return serialize_ntriples(g)
    if fmt is SyntaxFormat.RDFXML:
        return serialize_rdfxml(g)
    return serialize_rdfjson(g)
