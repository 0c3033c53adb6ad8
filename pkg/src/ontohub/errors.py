"""Exception hierarchy shared by every ontohub module.

Each error carries a stable ``code`` string. The CLI prints it and maps it to
an exit status; the HTTP service puts it in the JSON error body and maps it to
an HTTP status.
"""

from __future__ import annotations


class OntohubError(Exception):
    code = "error"
    exit_status = 1
    http_status = 500

    def __init__(self, message: str = "") -> None:
        super().__init__(message or self.code)
        self.message = message or self.code

    def to_dict(self) -> dict:
        return {"error": self.code, "message": self.message}


class InvalidArgument(OntohubError):
    code = "invalid-argument"
    exit_status = 2
    http_status = 400


class InvalidIRI(OntohubError):
    code = "invalid-iri"
    exit_status = 3
    http_status = 400


class RDFSyntaxError(OntohubError):
    """A document failed to parse. ``line``/``column`` are 1-based."""

    code = "syntax-error"
    exit_status = 4
    http_status = 422

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.diagnostic_message = message
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        return {
            "error": self.code,
            "message": self.message,
            "line": self.line,
            "column": self.column,
        }


class UnresolvedRelativeIRI(RDFSyntaxError):
    code = "unresolved-relative-iri"


class UnsupportedFormat(OntohubError):
    code = "unsupported-format"
    exit_status = 5
    http_status = 406


class RdfXmlUnencodable(OntohubError):
    code = "rdfxml-unencodable"
    exit_status = 6
    http_status = 406


class StoreError(OntohubError):
    code = "io-error"
    exit_status = 7
    http_status = 500


class LockHeld(StoreError):
    code = "lock-held"
    exit_status = 8
    http_status = 503


class UnknownPrefix(OntohubError):
    code = "unknown-prefix"
    exit_status = 10
    http_status = 404


class UnknownVersion(OntohubError):
    code = "unknown-version"
    exit_status = 11
    http_status = 404


class DuplicateVersion(OntohubError):
    code = "duplicate-version"
    exit_status = 12
    http_status = 409


class VersionAlreadyLatest(OntohubError):
    code = "version-already-latest"
    exit_status = 13
    http_status = 409


class StaleVersion(OntohubError):
    code = "stale-version"
    exit_status = 14
    http_status = 409


class EmptyQuery(OntohubError):
    code = "empty-query"
    exit_status = 15
    http_status = 400


class UnknownOntology(OntohubError):
    code = "unknown-ontology"
    exit_status = 16
    http_status = 404


class NetworkError(OntohubError):
    code = "network-error"
    exit_status = 20
    http_status = 502


class EndpointError(OntohubError):
    code = "endpoint-error"
    exit_status = 21
    http_status = 502


class EndpointTimeout(NetworkError):
    code = "timeout"
    exit_status = 22
    http_status = 502
