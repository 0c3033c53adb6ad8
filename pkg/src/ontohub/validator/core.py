"""Graph enumeration, usage statistics and term validation against an endpoint."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..errors import InvalidArgument
from ..rdf import IRI, Graph, Literal
from ..rdf.namespaces import WELL_KNOWN_PREFIXES, compact
from ..store import QuadStore
from ..vocab import SchemaTerms, extract_schema_terms, is_core_term
from .endpoint import Endpoint, connect, select_paged

GRAPHS_QUERY = "SELECT DISTINCT ?g WHERE { GRAPH ?g { ?s ?p ?o } } ORDER BY ?g"

CLASS_USAGE_QUERY = """PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
SELECT ?class (COUNT(DISTINCT ?s) AS ?n)
WHERE {{ VALUES ?g {{ {graphs} }} GRAPH ?g {{ ?s rdf:type ?class }} }}
GROUP BY ?class ORDER BY ?class"""

PROPERTY_USAGE_QUERY = """SELECT ?p (COUNT(*) AS ?n)
WHERE {{ VALUES ?g {{ {graphs} }} GRAPH ?g {{ ?s ?p ?o }} }}
GROUP BY ?p ORDER BY ?p"""


@dataclass
class EndpointSession:
    """An endpoint address plus the target graphs one job runs over.

    ``local:`` endpoints evaluate against ``store`` instead of the network.
    """

    endpoint_url: str
    target_graphs: frozenset = frozenset()
    timeout: float = 30.0
    page_size: int = 1000
    store: Optional[QuadStore] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.target_graphs = frozenset(IRI(g).value if isinstance(g, str) else g.value for g in self.target_graphs)
        if self.page_size < 1:
            raise InvalidArgument("page size must be positive")
        if self.timeout <= 0:
            raise InvalidArgument("timeout must be positive")

    def endpoint(self) -> Endpoint:
        return connect(self.endpoint_url, self.timeout, self.store)

    def require_targets(self) -> None:
        if not self.target_graphs:
            raise InvalidArgument("select at least one target graph first")


def _table(headers: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        cells = [c.rjust(w) if c.isdigit() else c.ljust(w) for c, w in zip(row, widths)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


@dataclass(frozen=True)
class StatsReport:
    class_usage: tuple[tuple[str, int], ...] = ()
    property_usage: tuple[tuple[str, int], ...] = ()
    graphs_covered: frozenset = frozenset()

    def to_dict(self) -> dict:
        return {
            "kind": "stats",
            "graphs": sorted(self.graphs_covered),
            "classes": [{"iri": iri, "count": n} for iri, n in self.class_usage],
            "properties": [{"iri": iri, "count": n} for iri, n in self.property_usage],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self, prefixes: Optional[dict] = None) -> str:
        names = {**WELL_KNOWN_PREFIXES, **(prefixes or {})}
        classes = [(compact(i, names), str(n)) for i, n in self.class_usage]
        props = [(compact(i, names), str(n)) for i, n in self.property_usage]
        return (
            f"Classes ({len(classes)})\n{_table(('class', 'instances'), classes)}\n\n"
            f"Properties ({len(props)})\n{_table(('property', 'statements'), props)}\n"
        )


@dataclass(frozen=True)
class Verdict:
    iri: str
    count: int
    defined: bool


@dataclass(frozen=True)
class ValidationReport:
    ontology_iri: str
    class_verdicts: tuple[Verdict, ...] = ()
    property_verdicts: tuple[Verdict, ...] = ()
    graphs_covered: frozenset = frozenset()

    @property
    def undefined(self) -> set[str]:
        return {v.iri for v in self.class_verdicts + self.property_verdicts if not v.defined}

    @property
    def ok(self) -> bool:
        return not self.undefined

    def to_dict(self) -> dict:
        def rows(verdicts):
            return [{"iri": v.iri, "count": v.count, "defined": v.defined} for v in verdicts]

        return {
            "kind": "validation",
            "ontology": self.ontology_iri,
            "graphs": sorted(self.graphs_covered),
            "classes": rows(self.class_verdicts),
            "properties": rows(self.property_verdicts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self, prefixes: Optional[dict] = None) -> str:
        names = {**WELL_KNOWN_PREFIXES, **(prefixes or {})}

        def rows(verdicts):
            return [(compact(v.iri, names), str(v.count), "ok" if v.defined else "FAIL") for v in verdicts]

        return (
            f"Ontology {self.ontology_iri}\n\n"
            f"Classes ({len(self.class_verdicts)})\n{_table(('class', 'instances', 'result'), rows(self.class_verdicts))}\n\n"
            f"Properties ({len(self.property_verdicts)})\n"
            f"{_table(('property', 'statements', 'result'), rows(self.property_verdicts))}\n"
        )


def enumerate_graphs(session: EndpointSession) -> set[str]:
    rows = select_paged(session.endpoint(), GRAPHS_QUERY, session.page_size)
    return {row["g"].value for row in rows if isinstance(row.get("g"), IRI)}


def _values(graphs) -> str:
    return " ".join(f"<{g}>" for g in sorted(graphs))


def _counts(session: EndpointSession, template: str, var: str) -> dict[str, int]:
    session.require_targets()
    query = template.format(graphs=_values(session.target_graphs))
    out: dict[str, int] = {}
    for row in select_paged(session.endpoint(), query, session.page_size):
        term, n = row.get(var), row.get("n")
        if isinstance(term, IRI) and isinstance(n, Literal):
            count = int(n.lexical)
            if count > 0:
                out[term.value] = out.get(term.value, 0) + count
    return out


def _ranked(counts: dict[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def used_terms(session: EndpointSession) -> SchemaTerms:
    return SchemaTerms(
        frozenset(_counts(session, CLASS_USAGE_QUERY, "class")),
        frozenset(_counts(session, PROPERTY_USAGE_QUERY, "p")),
    )


def stats(session: EndpointSession) -> StatsReport:
    """Per-class distinct typed subjects and per-property statement counts."""
    return StatsReport(
        class_usage=_ranked(_counts(session, CLASS_USAGE_QUERY, "class")),
        property_usage=_ranked(_counts(session, PROPERTY_USAGE_QUERY, "p")),
        graphs_covered=session.target_graphs,
    )


def validate_against(session: EndpointSession, ontology: Graph, ontology_iri: str) -> ValidationReport:
    """Check every term used in the target graphs against ``ontology``."""
    schema = extract_schema_terms(ontology)
    report = stats(session)

    def verdicts(usage, declared) -> tuple[Verdict, ...]:
        return tuple(Verdict(iri, n, iri in declared or is_core_term(iri)) for iri, n in usage)

    return ValidationReport(
        ontology_iri=ontology_iri,
        class_verdicts=verdicts(report.class_usage, schema.classes),
        property_verdicts=verdicts(report.property_usage, schema.properties),
        graphs_covered=report.graphs_covered,
    )


def validate(session: EndpointSession, ontology_ref: str, registry) -> ValidationReport:
    """Validate against the latest version of a registered ontology.

    ``ontology_ref`` is a prefix, a version record IRI or a named-graph IRI.
    """
    record = registry.resolve(ontology_ref)
    return validate_against(session, registry.graph(record.prefix), record.source_graph)
