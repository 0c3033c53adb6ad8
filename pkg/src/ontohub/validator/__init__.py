"""Ontology statistics and validation over SPARQL endpoints."""

from .core import (
    EndpointSession,
    StatsReport,
    ValidationReport,
    Verdict,
    enumerate_graphs,
    stats,
    used_terms,
    validate,
    validate_against,
)
from .endpoint import HttpEndpoint, LocalEndpoint, connect, select_paged
from .mock import MockSparqlEndpoint
from ..vocab import SchemaTerms, extract_schema_terms

__all__ = [
    "EndpointSession",
    "StatsReport",
    "ValidationReport",
    "Verdict",
    "SchemaTerms",
    "enumerate_graphs",
    "extract_schema_terms",
    "used_terms",
    "stats",
    "validate",
    "validate_against",
    "HttpEndpoint",
    "LocalEndpoint",
    "MockSparqlEndpoint",
    "connect",
    "select_paged",
]
