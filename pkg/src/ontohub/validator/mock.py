"""A throwaway SPARQL endpoint over an embedded store, for tests and demos.

It speaks just enough of the SPARQL protocol for the validator's client:
``query`` as a form field (POST) or URL parameter (GET), answered with
SPARQL JSON results.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlsplit

from ..store import QuadStore
from .endpoint import RESULTS_MEDIA_TYPE
from .sparql import SparqlQueryError, evaluate, results_to_json


class _Handler(BaseHTTPRequestHandler):
    server: "_Server"
    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args) -> None:
        pass

    def _reply(self, status: int, body: bytes, media_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", media_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _answer(self, query: Optional[str]) -> None:
        self.server.requests.append(self.command)
        if urlsplit(self.path).path != self.server.path:
            self._reply(404, b"not found\n", "text/plain")
            return
        if self.command in self.server.refuse:
            self._reply(405, b"method not allowed\n", "text/plain")
            return
        if not query:
            self._reply(400, b"missing query parameter\n", "text/plain")
            return
        try:
            variables, rows = evaluate(self.server.store, query)
        except SparqlQueryError as exc:
            self._reply(400, f"{exc}\n".encode(), "text/plain")
            return
        body = json.dumps(results_to_json(variables, rows)).encode("utf-8")
        self._reply(200, body, RESULTS_MEDIA_TYPE)

    def do_GET(self) -> None:
        params = parse_qs(urlsplit(self.path).query)
        self._answer(params.get("query", [None])[0])

    def do_POST(self) -> None:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length).decode("utf-8", "replace")
        if self.headers.get("Content-Type", "").startswith("application/sparql-query"):
            query = raw
        else:
            query = parse_qs(raw).get("query", [None])[0]
        self._answer(query)


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    store: QuadStore
    path: str
    refuse: frozenset
    requests: list


class MockSparqlEndpoint:
    """Serve ``store`` at ``http://127.0.0.1:<port>/sparql`` from a background thread.

    ``refuse`` lists HTTP methods answered with 405, to exercise client fallback.
    """

    def __init__(self, store: QuadStore, host: str = "127.0.0.1", port: int = 0, refuse=()) -> None:
        self._server = _Server((host, port), _Handler)
        self._server.store = store
        self._server.path = "/sparql"
        self._server.refuse = frozenset(m.upper() for m in refuse)
        self._server.requests = []
        self._thread: Optional[threading.Thread] = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}{self._server.path}"

    @property
    def methods_seen(self) -> list[str]:
        return list(self._server.requests)

    def start(self) -> "MockSparqlEndpoint":
        self._thread = threading.Thread(target=self._server.serve_forever, name="mock-sparql", daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "MockSparqlEndpoint":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
