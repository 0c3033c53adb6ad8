"""SPARQL endpoint access: the HTTP protocol client and the in-process adapter."""

from __future__ import annotations

import logging
from typing import Optional, Protocol

import requests

from ..errors import EndpointError, EndpointTimeout, InvalidArgument, NetworkError
from ..store import QuadStore
from .sparql import Solution, SparqlQueryError, evaluate, term_from_json

log = logging.getLogger(__name__)

RESULTS_MEDIA_TYPE = "application/sparql-results+json"
LOCAL_SCHEME = "local:"


class Endpoint(Protocol):
    url: str

    def select(self, query: str) -> list[Solution]: ...


class HttpEndpoint:
    """SPARQL 1.1 Protocol client: form-encoded POST, GET when POST is refused."""

    def __init__(self, url: str, timeout: float = 30.0, session: Optional[requests.Session] = None) -> None:
        if not url.startswith(("http://", "https://")):
            raise InvalidArgument(f"endpoint must be an http(s) URL: {url!r}")
        self.url = url
        self.timeout = timeout
        self.http = session or requests.Session()

    def _send(self, query: str) -> requests.Response:
        headers = {"Accept": RESULTS_MEDIA_TYPE}
        try:
            resp = self.http.post(self.url, data={"query": query}, headers=headers, timeout=self.timeout)
            if resp.status_code in (405, 415, 501):
                log.debug("%s refused POST (%s); retrying with GET", self.url, resp.status_code)
                resp = self.http.get(self.url, params={"query": query}, headers=headers, timeout=self.timeout)
        except requests.Timeout as exc:
            raise EndpointTimeout(f"{self.url} did not answer within {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise NetworkError(f"cannot reach {self.url}: {exc}") from exc
        return resp

    def select(self, query: str) -> list[Solution]:
        resp = self._send(query)
        if resp.status_code != 200:
            raise EndpointError(f"{self.url} answered HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            body = resp.json()
            return [{var: term_from_json(value) for var, value in b.items()} for b in body["results"]["bindings"]]
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise EndpointError(f"{self.url} returned malformed SPARQL results: {exc}") from exc


class LocalEndpoint:
    """Runs the same queries directly against an embedded store."""

    def __init__(self, store: QuadStore, url: str = LOCAL_SCHEME) -> None:
        self.store = store
        self.url = url

    def select(self, query: str) -> list[Solution]:
        try:
            _, rows = evaluate(self.store, query)
        except SparqlQueryError as exc:
            raise EndpointError(f"local endpoint rejected the query: {exc}") from exc
        return rows


def connect(url: str, timeout: float = 30.0, store: Optional[QuadStore] = None) -> Endpoint:
    """An endpoint for ``url``; ``local:`` addresses need the embedded ``store``."""
    if url.startswith(LOCAL_SCHEME):
        if store is None:
            raise InvalidArgument("a local: endpoint needs an open store")
        return LocalEndpoint(store, url)
    return HttpEndpoint(url, timeout)


def select_paged(endpoint: Endpoint, query: str, page_size: int) -> list[Solution]:
    """Fetch every row of ``query`` (which must carry ORDER BY) page by page."""
    if page_size < 1:
        raise InvalidArgument("page size must be positive")
    rows: list[Solution] = []
    offset = 0
    while True:
        page = endpoint.select(f"{query}\nLIMIT {page_size} OFFSET {offset}")
        rows.extend(page)
        if len(page) < page_size:
            return rows
        offset += page_size
