"""Service configuration: a flat ``key = value`` file plus ``ONTOHUB_*`` overrides.

Example::

    # ontohub.conf
    store_root = /var/lib/ontohub/store
    archive_root = /var/lib/ontohub/archive
    base_iri = http://ont.example.org
    listen_address = 127.0.0.1:8080
    default_timeout = 30
    page_size = 1000

Each key can be overridden by an environment variable named after it in upper
case with the ``ONTOHUB_`` prefix, e.g. ``ONTOHUB_BASE_IRI``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping, Optional, Union

from .errors import InvalidArgument, InvalidIRI
from .rdf import make_iri

ENV_PREFIX = "ONTOHUB_"


@dataclass(frozen=True)
class ServiceConfig:
    store_root: Path = Path("ontohub-data/store")
    archive_root: Path = Path("ontohub-data/archive")
    base_iri: str = "http://localhost:8080"
    listen_address: str = "127.0.0.1:8080"
    default_timeout: float = 30.0
    page_size: int = 1000

    @property
    def host(self) -> str:
        return self.listen_address.rpartition(":")[0] or "127.0.0.1"

    @property
    def port(self) -> int:
        return int(self.listen_address.rpartition(":")[2])


def _coerce(values: Mapping[str, str]) -> ServiceConfig:
    known = {f.name for f in fields(ServiceConfig)}
    unknown = set(values) - known
    if unknown:
        raise InvalidArgument(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
    kwargs: dict = {}
    try:
        for key, raw in values.items():
            if key in ("store_root", "archive_root"):
                kwargs[key] = Path(raw).expanduser()
            elif key == "default_timeout":
                kwargs[key] = float(raw)
            elif key == "page_size":
                kwargs[key] = int(raw)
            else:
                kwargs[key] = raw
    except ValueError as exc:
        raise InvalidArgument(f"bad configuration value: {exc}") from None
    config = ServiceConfig(**kwargs)
    try:
        base = make_iri(config.base_iri).value.rstrip("/")
    except InvalidIRI as exc:
        raise InvalidArgument(f"base_iri: {exc.message}") from None
    config = ServiceConfig(**{**config.__dict__, "base_iri": base})
    if config.default_timeout <= 0 or config.page_size < 1:
        raise InvalidArgument("default_timeout and page_size must be positive")
    host, sep, port = config.listen_address.rpartition(":")
    if not sep or not port.isdigit():
        raise InvalidArgument(f"listen_address must be host:port, got {config.listen_address!r}")
    return config


def read_config_file(path: Union[str, Path]) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidArgument(f"cannot read configuration {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidArgument(f"{path}:{lineno}: expected key = value")
        values[key.strip()] = value.strip()
    return values


def load_config(path: Optional[Union[str, Path]] = None, environ: Optional[Mapping[str, str]] = None) -> ServiceConfig:
    """File values first, then environment overrides on top."""
    values = read_config_file(path) if path else {}
    env = os.environ if environ is None else environ
    for f in fields(ServiceConfig):
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            values[f.name] = env[key]
    return _coerce(values)
