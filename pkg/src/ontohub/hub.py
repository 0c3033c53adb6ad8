"""Wiring shared by the CLI and the HTTP service."""

from __future__ import annotations

from typing import Iterable, Optional

from .config import ServiceConfig
from .registry import Registry
from .store import QuadStore
from .validator import EndpointSession


class Hub:
    """An open store, the registry over it, and the job defaults from config."""

    def __init__(self, config: ServiceConfig, readonly: bool = False) -> None:
        self.config = config
        self.store = QuadStore(config.store_root, readonly=readonly)
        self.registry = Registry(self.store, config.archive_root, config.base_iri)

    def session(self, endpoint: str, graphs: Iterable[str] = (), timeout: Optional[float] = None) -> EndpointSession:
        return EndpointSession(
            endpoint_url=endpoint,
            target_graphs=frozenset(graphs),
            timeout=timeout or self.config.default_timeout,
            page_size=self.config.page_size,
            store=self.store,
        )

    def close(self) -> None:
        self.store.close()

    def __enter__(self) -> "Hub":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
