"""Namespace helpers and the vocabularies ontohub relies on."""

from __future__ import annotations

from .model import IRI


class Namespace:
    """``RDF.type`` / ``RDF["type"]`` style IRI minting."""

    __slots__ = ("base",)

    def __init__(self, base: str) -> None:
        self.base = base

    def __getattr__(self, name: str) -> IRI:
        if name.startswith("__"):
            raise AttributeError(name)
        return IRI(self.base + name)

    def __getitem__(self, name: str) -> IRI:
        return IRI(self.base + name)

    def __contains__(self, term: object) -> bool:
        return isinstance(term, IRI) and term.value.startswith(self.base)

    def __str__(self) -> str:
        return self.base

    def __repr__(self) -> str:
        return f"Namespace({self.base!r})"


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
OWL = Namespace("http://www.w3.org/2002/07/owl#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")
DC = Namespace("http://purl.org/dc/terms/")
CC = Namespace("http://creativecommons.org/ns#")
VANN = Namespace("http://purl.org/vocab/vann/")
DCAT = Namespace("http://www.w3.org/ns/dcat#")
SKOS = Namespace("http://www.w3.org/2004/02/skos/core#")
FOAF = Namespace("http://xmlns.com/foaf/0.1/")

# Prefixes every dump and table may fall back on when the graph has none.
WELL_KNOWN_PREFIXES = {
    "rdf": RDF.base,
    "rdfs": RDFS.base,
    "owl": OWL.base,
    "xsd": XSD.base,
    "dc": DC.base,
    "cc": CC.base,
    "vann": VANN.base,
    "dcat": DCAT.base,
    "skos": SKOS.base,
    "foaf": FOAF.base,
}


def compact(iri: str, prefixes: dict[str, str]) -> str:
    """Shorten ``iri`` to ``prefix:local`` using the longest matching namespace."""
    best = None
    for prefix, ns in prefixes.items():
        if ns and iri.startswith(ns) and len(iri) > len(ns):
            if best is None or len(ns) > len(prefixes[best]):
                best = prefix
    if best is None:
        return iri
    return f"{best}:{iri[len(prefixes[best]):]}"


def local_name(iri: str) -> str:
    for sep in ("#", "/", ":"):
        head, found, tail = iri.rpartition(sep)
        if found and tail:
            return tail
    return iri
