"""Class and property extraction shared by the views and the validator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .rdf import IRI, OWL, RDF, RDFS, XSD, Graph, Literal, Term

CLASS_TYPES = (OWL.Class, RDFS.Class)
PROPERTY_TYPES = (OWL.ObjectProperty, OWL.DatatypeProperty, OWL.AnnotationProperty, RDF.Property)

# Terms in these namespaces always count as defined during validation.
CORE_NAMESPACES = (RDF.base, RDFS.base, OWL.base, XSD.base)


def is_core_term(iri: str) -> bool:
    return iri.startswith(CORE_NAMESPACES)


@dataclass(frozen=True)
class SchemaTerms:
    classes: frozenset = frozenset()
    properties: frozenset = frozenset()

    def to_dict(self) -> dict:
        return {"classes": sorted(self.classes), "properties": sorted(self.properties)}


def _typed(g: Graph, types) -> set[str]:
    return {t.subject.value for ty in types for t in g.match(None, RDF.type, ty) if isinstance(t.subject, IRI)}


def _one_step_up(g: Graph, declared: set[str], predicate: IRI) -> set[str]:
    out = set()
    for name in declared:
        for o in g.objects(IRI(name), predicate):
            if isinstance(o, IRI):
                out.add(o.value)
    return out


def extract_schema_terms(g: Graph) -> SchemaTerms:
    """Declared classes/properties plus their direct named super-terms."""
    classes = _typed(g, CLASS_TYPES)
    properties = _typed(g, PROPERTY_TYPES)
    classes |= _one_step_up(g, classes, RDFS.subClassOf)
    properties |= _one_step_up(g, properties, RDFS.subPropertyOf)
    return SchemaTerms(frozenset(classes), frozenset(properties))


def best_label(g: Graph, term: Term) -> Optional[str]:
    """One rdfs:label, preferring untagged, then English, then the rest sorted."""
    labels = [o for o in g.objects(term, RDFS.label) if isinstance(o, Literal)]
    if not labels:
        return None
    labels.sort(key=lambda lit: (lit.language not in (None, "en"), lit.language is not None, lit.language or "", lit.lexical))
    return labels[0].lexical


def first_literal(g: Graph, term: Term, predicate: IRI) -> Optional[str]:
    values = sorted(o.lexical for o in g.objects(term, predicate) if isinstance(o, Literal))
    return values[0] if values else None


def iri_objects(g: Graph, term: Term, predicate: IRI) -> list[str]:
    return sorted({o.value for o in g.objects(term, predicate) if isinstance(o, IRI)})
