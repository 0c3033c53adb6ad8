"""RDF data model, comparison and syntaxes."""

from .compare import canonical_blank_labels, graph_equal_ground
from .model import IRI, BNode, Graph, Literal, Quad, Term, Triple, is_absolute_iri, make_iri
from .namespaces import CC, DC, DCAT, OWL, RDF, RDFS, SKOS, VANN, XSD, Namespace
from .syntax import MEDIA_TYPES, SyntaxFormat, parse, serialize

__all__ = [
    "IRI",
    "BNode",
    "Literal",
    "Term",
    "Triple",
    "Quad",
    "Graph",
    "make_iri",
    "is_absolute_iri",
    "graph_equal_ground",
    "canonical_blank_labels",
    "Namespace",
    "RDF",
    "RDFS",
    "OWL",
    "XSD",
    "DC",
    "CC",
    "VANN",
    "DCAT",
    "SKOS",
    "SyntaxFormat",
    "MEDIA_TYPES",
    "parse",
    "serialize",
]
