"""Ontology registry: registration, the datasets graph, archives, versions and search.

Every ontology's latest version lives in its own named graph. One reserved
datasets graph holds a metadata record per registered version; only the
latest version's record carries ``dc:source`` pointing at that named graph.
Older versions leave the store and are kept as Turtle files named
``{prefix}_{version}.ttl`` in the archive directory.
"""

from __future__ import annotations

import logging
import os
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from .errors import (
    DuplicateVersion,
    EmptyQuery,
    InvalidArgument,
    OntohubError,
    StaleVersion,
    StoreError,
    UnknownOntology,
    UnknownPrefix,
    UnknownVersion,
    VersionAlreadyLatest,
)
from .rdf import (
    CC,
    DC,
    DCAT,
    IRI,
    OWL,
    RDF,
    RDFS,
    VANN,
    Graph,
    Literal,
    SyntaxFormat,
    Triple,
    canonical_blank_labels,
    make_iri,
    parse,
    serialize,
)
from .rdf.namespaces import local_name
from .store import QuadStore

log = logging.getLogger(__name__)

ISSUED_FORMAT = "%Y-%m-%d %H:%M:%S"
_PREFIX_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_\-]*$")
_VERSION_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._\-]*$")

SEARCH_FIELDS = ("local-name", "label", "comment", "catalogue", "prefix", "contributor")
TERM_KINDS = ("ontology", "class", "object-property", "datatype-property")
_KIND_TYPES = (
    ("class", (OWL.Class, RDFS.Class)),
    ("object-property", (OWL.ObjectProperty,)),
    ("datatype-property", (OWL.DatatypeProperty,)),
)


def parse_issued(value: Union[str, date, datetime]) -> datetime:
    if isinstance(value, datetime):
        return value.replace(tzinfo=None, microsecond=0)
    if isinstance(value, date):
        return datetime(value.year, value.month, value.day)
    try:
        return datetime.fromisoformat(str(value).strip()).replace(tzinfo=None, microsecond=0)
    except ValueError:
        raise InvalidArgument(f"cannot read issued timestamp {value!r}; use YYYY-MM-DD[ HH:MM:SS]") from None


@dataclass(frozen=True)
class OntologyVersionRecord:
    record_iri: str
    prefix: str
    version_info: str
    issued: datetime
    title: str = ""
    description: str = ""
    rights: str = ""
    license: Optional[str] = None
    source_graph: Optional[str] = None
    contributor: Optional[str] = None
    catalogue: tuple[str, ...] = ()
    namespace: Optional[str] = None

    @property
    def is_latest(self) -> bool:
        return self.source_graph is not None

    def triples(self) -> list[Triple]:
        s = IRI(self.record_iri)
        out = [
            Triple(s, RDF.type, OWL.Ontology),
            Triple(s, VANN.preferredNamespacePrefix, Literal(self.prefix)),
            Triple(s, OWL.versionInfo, Literal(self.version_info)),
            Triple(s, DC.issued, Literal(self.issued.strftime(ISSUED_FORMAT))),
        ]
        for predicate, text in ((DC.title, self.title), (DC.description, self.description), (DC.rights, self.rights)):
            if text:
                out.append(Triple(s, predicate, Literal(text)))
        if self.license:
            out.append(Triple(s, CC.license, IRI(self.license)))
        if self.source_graph:
            out.append(Triple(s, DC.source, IRI(self.source_graph)))
        if self.contributor:
            out.append(Triple(s, DC.contributor, Literal(self.contributor)))
        for keyword in self.catalogue:
            out.append(Triple(s, DCAT.keyword, Literal(keyword)))
        if self.namespace:
            out.append(Triple(s, VANN.preferredNamespaceUri, Literal(self.namespace)))
        return out

    @classmethod
    def from_graph(cls, g: Graph, subject: IRI) -> "OntologyVersionRecord":
        def one(p: IRI) -> Optional[str]:
            values = sorted(str(o) for o in g.objects(subject, p))
            return values[0] if values else None

        return cls(
            record_iri=subject.value,
            prefix=one(VANN.preferredNamespacePrefix) or "",
            version_info=one(OWL.versionInfo) or "",
            issued=parse_issued(one(DC.issued) or "1970-01-01"),
            title=one(DC.title) or "",
            description=one(DC.description) or "",
            rights=one(DC.rights) or "",
            license=one(CC.license),
            source_graph=one(DC.source),
            contributor=one(DC.contributor),
            catalogue=tuple(sorted(str(o) for o in g.objects(subject, DCAT.keyword))),
            namespace=one(VANN.preferredNamespaceUri),
        )

    def to_dict(self) -> dict:
        return {
            "record": self.record_iri,
            "prefix": self.prefix,
            "versionInfo": self.version_info,
            "issued": self.issued.strftime(ISSUED_FORMAT),
            "title": self.title,
            "description": self.description,
            "rights": self.rights,
            "license": self.license,
            "source": self.source_graph,
            "contributor": self.contributor,
            "catalogue": list(self.catalogue),
            "namespace": self.namespace,
            "latest": self.is_latest,
        }


@dataclass(frozen=True)
class ArchiveEntry:
    prefix: str
    version_info: str
    path: Path
    format: SyntaxFormat = SyntaxFormat.TURTLE


@dataclass(frozen=True)
class GraphDiff:
    added: frozenset = frozenset()
    removed: frozenset = frozenset()

    def is_empty(self) -> bool:
        return not self.added and not self.removed

    def to_dict(self) -> dict:
        return {
            "added": sorted(t.n3() for t in self.added),
            "removed": sorted(t.n3() for t in self.removed),
        }


@dataclass(frozen=True)
class SearchHit:
    ontology_prefix: str
    term_iri: str
    term_kind: str
    matched_field: str
    snippet: str
    label: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "ontology": self.ontology_prefix,
            "term": self.term_iri,
            "kind": self.term_kind,
            "field": self.matched_field,
            "snippet": self.snippet,
            "label": self.label,
        }


class _RWLock:
    """Many readers or one writer."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writing = False

    @contextmanager
    def read(self) -> Iterator[None]:
        with self._cond:
            while self._writing:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                self._cond.notify_all()

    @contextmanager
    def write(self) -> Iterator[None]:
        with self._cond:
            while self._writing or self._readers:
                self._cond.wait()
            self._writing = True
        try:
            yield
        finally:
            with self._cond:
                self._writing = False
                self._cond.notify_all()


def _snippet(text: str, start: int, length: int, width: int = 40) -> str:
    lo = max(0, start - width)
    hi = min(len(text), start + length + width)
    out = " ".join(text[lo:hi].split())
    return ("..." if lo else "") + out + ("..." if hi < len(text) else "")


class Registry:
    def __init__(self, store: QuadStore, archive_root: Union[str, Path], base_iri: str) -> None:
        self.store = store
        self.archive_root = Path(archive_root)
        self.base_iri = make_iri(base_iri).value.rstrip("/")
        self.datasets_graph = IRI(f"{self.base_iri}/graph/__datasets__")
        self._prefix_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._commit_lock = threading.Lock()
        self._rw = _RWLock()

    # -- naming ------------------------------------------------------------

    def record_iri(self, prefix: str, version_info: str) -> str:
        return f"{self.base_iri}/ontology/{prefix}_{version_info}"

    def graph_iri(self, prefix: str) -> str:
        return f"{self.base_iri}/graph/{prefix}"

    def archive_path(self, prefix: str, version_info: str) -> Path:
        return self.archive_root / f"{prefix}_{version_info}.ttl"

    @contextmanager
    def _prefix_lock(self, prefix: str) -> Iterator[None]:
        with self._locks_guard:
            lock = self._prefix_locks.setdefault(prefix, threading.Lock())
        with lock:
            yield

    # -- record access -----------------------------------------------------

    def _datasets(self) -> Graph:
        return self.store.get_graph(self.datasets_graph)

    def _all_records(self, datasets: Optional[Graph] = None) -> list[OntologyVersionRecord]:
        g = self._datasets() if datasets is None else datasets
        subjects = {t.subject for t in g.match(None, RDF.type, OWL.Ontology) if isinstance(t.subject, IRI)}
        return [OntologyVersionRecord.from_graph(g, s) for s in subjects]

    @staticmethod
    def _order(records: Iterable[OntologyVersionRecord]) -> list[OntologyVersionRecord]:
        # issued descending, then version-info descending (lexicographic)
        return sorted(records, key=lambda r: (r.issued, r.version_info), reverse=True)

    def _records_for(self, prefix: str, datasets: Optional[Graph] = None) -> list[OntologyVersionRecord]:
        return self._order(r for r in self._all_records(datasets) if r.prefix == prefix)

    def prefixes(self) -> list[str]:
        with self._rw.read():
            return sorted({r.prefix for r in self._all_records()})

    def list_latest(self) -> list[OntologyVersionRecord]:
        with self._rw.read():
            return sorted((r for r in self._all_records() if r.is_latest), key=lambda r: r.prefix)

    def versions(self, prefix: str) -> list[OntologyVersionRecord]:
        with self._rw.read():
            records = self._records_for(prefix)
        if not records:
            raise UnknownPrefix(f"unknown prefix {prefix!r}")
        return records

    def latest(self, prefix: str) -> OntologyVersionRecord:
        for record in self.versions(prefix):
            if record.is_latest:
                return record
        raise StoreError(f"no latest version recorded for {prefix!r}")

    def _find(self, prefix: str, version_info: Optional[str]) -> OntologyVersionRecord:
        records = self.versions(prefix)
        if version_info is None:
            return next(r for r in records if r.is_latest)
        for record in records:
            if record.version_info == version_info:
                return record
        raise UnknownVersion(f"{prefix} has no version {version_info!r}")

    def resolve(self, ref: str) -> OntologyVersionRecord:
        """Latest record for a prefix, a record IRI, or a named-graph IRI."""
        ref = ref.strip()
        with self._rw.read():
            records = self._all_records()
        for record in records:
            if ref in (record.record_iri, record.source_graph):
                ref = record.prefix
                break
        for record in records:
            if record.prefix == ref and record.is_latest:
                return record
        raise UnknownOntology(f"no registered ontology matches {ref!r}")

    # -- graphs and dumps --------------------------------------------------

    def archive_entry(self, prefix: str, version_info: str) -> ArchiveEntry:
        return ArchiveEntry(prefix, version_info, self.archive_path(prefix, version_info))

    def _read_archive(self, prefix: str, version_info: str) -> Graph:
        path = self.archive_path(prefix, version_info)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise StoreError(f"archive file {path} unreadable: {exc}") from exc
        return parse(data, SyntaxFormat.TURTLE)

    def graph(self, prefix: str, version_info: Optional[str] = None) -> Graph:
        """The ontology graph of a version (default: latest)."""
        with self._rw.read():
            record = self._find(prefix, version_info)
            if record.is_latest:
                return self.store.get_graph(IRI(record.source_graph))
        return self._read_archive(prefix, record.version_info)

    def dump(self, prefix: str, version_info: Optional[str] = None, format: Union[str, SyntaxFormat] = SyntaxFormat.TURTLE) -> bytes:
        fmt = SyntaxFormat.from_name(format)
        return serialize(self.graph(prefix, version_info), fmt)

    def datasets_dump(self, format: Union[str, SyntaxFormat] = SyntaxFormat.TURTLE) -> bytes:
        with self._rw.read():
            return serialize(self._datasets(), format)

    # -- mutation ----------------------------------------------------------

    def register(
        self,
        doc: Union[bytes, str],
        format: Union[str, SyntaxFormat] = SyntaxFormat.TURTLE,
        *,
        prefix: str,
        version_info: str,
        issued: Union[str, date, datetime],
        title: str = "",
        description: str = "",
        rights: str = "",
        license: Optional[str] = None,
        contributor: Optional[str] = None,
        catalogue: Iterable[str] = (),
        source_graph: Optional[str] = None,
        base: Optional[str] = None,
    ) -> OntologyVersionRecord:
        """Register a new version of ``prefix``; the previous latest is archived.

        Nothing is stored when the document fails to parse or any later step
        fails; see ``_commit`` for the undo path.
        """
        if not _PREFIX_RE.match(prefix or ""):
            raise InvalidArgument(f"prefix {prefix!r} must match {_PREFIX_RE.pattern}")
        if not _VERSION_RE.match(version_info or ""):
            raise InvalidArgument(f"version {version_info!r} must match {_VERSION_RE.pattern}")
        issued_at = parse_issued(issued)
        source = make_iri(source_graph).value if source_graph else self.graph_iri(prefix)
        if license:
            license = make_iri(license).value
        graph = parse(doc, format, base=base)

        with self._prefix_lock(prefix), self._commit_lock:
            datasets = self._datasets()
            records = self._records_for(prefix, datasets)
            if any(r.version_info == version_info for r in records):
                raise DuplicateVersion(f"{prefix} {version_info} is already registered")
            prior = next((r for r in records if r.is_latest), None)
            if prior is not None and issued_at < prior.issued:
                raise StaleVersion(
                    f"{prefix} {version_info} issued {issued_at} predates the latest version {prior.version_info}"
                )
            for other in self._all_records(datasets):
                if other.prefix != prefix and other.source_graph == source:
                    raise InvalidArgument(f"graph {source} already holds ontology {other.prefix!r}")
            record = OntologyVersionRecord(
                record_iri=self.record_iri(prefix, version_info),
                prefix=prefix,
                version_info=version_info,
                issued=issued_at,
                title=title,
                description=description,
                rights=rights,
                license=license,
                source_graph=source,
                contributor=contributor,
                catalogue=tuple(sorted(set(catalogue))),
                namespace=graph.prefixes.get(prefix),
            )
            self._commit(datasets, prior, record, graph, new_record=True)
            log.info("registered %s %s into %s", prefix, version_info, source)
            return record

    def rollback(self, prefix: str, version_info: str) -> OntologyVersionRecord:
        """Make an archived version the latest again, archiving the current one."""
        with self._prefix_lock(prefix), self._commit_lock:
            datasets = self._datasets()
            records = self._records_for(prefix, datasets)
            target = next((r for r in records if r.version_info == version_info), None)
            if target is None:
                raise UnknownVersion(f"{prefix!r} has no version {version_info!r}")
            if target.is_latest:
                raise VersionAlreadyLatest(f"{prefix} {version_info} is already the latest version")
            prior = next(r for r in records if r.is_latest)
            graph = self._read_archive(prefix, version_info)
            record = replace(target, source_graph=prior.source_graph)
            self._commit(datasets, prior, record, graph, new_record=False)
            log.info("rolled %s back to %s", prefix, version_info)
            return record

    def _write_archive(self, prior: OntologyVersionRecord) -> tuple[Path, Optional[bytes]]:
        """Write the prior latest graph to its archive file; returns (path, old bytes)."""
        path = self.archive_path(prior.prefix, prior.version_info)
        previous = path.read_bytes() if path.exists() else None
        data = serialize(self.store.get_graph(IRI(prior.source_graph)), SyntaxFormat.TURTLE)
        self.archive_root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        return path, previous

    def _commit(
        self,
        datasets: Graph,
        prior: Optional[OntologyVersionRecord],
        record: OntologyVersionRecord,
        graph: Graph,
        new_record: bool,
    ) -> None:
        target = IRI(record.source_graph)
        prior_graph_name = IRI(prior.source_graph) if prior else None

        new_datasets = set(datasets.triples)
        if prior is not None:
            new_datasets.discard(Triple(IRI(prior.record_iri), DC.source, prior_graph_name))
        if new_record:
            new_datasets.update(record.triples())
        else:
            new_datasets.add(Triple(IRI(record.record_iri), DC.source, target))
        prefixes = dict(datasets.prefixes) or {
            "owl": OWL.base,
            "dc": DC.base,
            "cc": CC.base,
            "vann": VANN.base,
            "dcat": DCAT.base,
            "rdf": RDF.base,
        }

        # Each completed step pushes its inverse; a failure replays them newest first.
        undo: list = []
        try:
            if prior is not None:
                path, previous = self._write_archive(prior)
                undo.append(lambda: self._restore_file(path, previous))
            with self._rw.write():
                writes = [(target, graph)]
                if prior_graph_name is not None and prior_graph_name != target:
                    writes.append((prior_graph_name, Graph()))
                writes.append((self.datasets_graph, Graph(frozenset(new_datasets), prefixes)))
                for name, g in writes:
                    old = self.store.get_graph(name)
                    self.store.put_graph(name, g)
                    undo.append(lambda name=name, old=old: self.store.put_graph(name, old))
        except BaseException as exc:
            self._undo(undo)
            if isinstance(exc, OSError):
                raise StoreError(str(exc)) from exc
            raise

    @staticmethod
    def _restore_file(path: Path, previous: Optional[bytes]) -> None:
        if previous is None:
            path.unlink(missing_ok=True)
        else:
            path.write_bytes(previous)

    def _undo(self, steps: list) -> None:
        with self._rw.write():
            for step in reversed(steps):
                try:
                    step()
                except (OSError, OntohubError):
                    log.exception("could not undo a failed registry update; store may need repair")

    # -- diff and search ---------------------------------------------------

    def diff(self, prefix: str, version_a: str, version_b: str) -> GraphDiff:
        a = canonical_blank_labels(self.graph(prefix, version_a))
        b = canonical_blank_labels(self.graph(prefix, version_b))
        return GraphDiff(added=b.triples - a.triples, removed=a.triples - b.triples)

    def search(self, query: str, facets: Optional[Iterable[str]] = None) -> list[SearchHit]:
        needle = (query or "").strip().lower()
        if not needle:
            raise EmptyQuery("search query is empty")
        wanted = set(facets) if facets else set(SEARCH_FIELDS)
        unknown = wanted - set(SEARCH_FIELDS)
        if unknown:
            raise InvalidArgument(f"unknown search facet(s): {', '.join(sorted(unknown))}")

        hits: list[SearchHit] = []

        def check(record, term_iri, kind, fld, text, label=None):
            if fld not in wanted or not text:
                return
            pos = text.lower().find(needle)
            if pos >= 0:
                hits.append(SearchHit(record.prefix, term_iri, kind, fld, _snippet(text, pos, len(needle)), label))

        for record in self.list_latest():
            check(record, record.record_iri, "ontology", "prefix", record.prefix, record.title)
            check(record, record.record_iri, "ontology", "contributor", record.contributor, record.title)
            for keyword in record.catalogue:
                check(record, record.record_iri, "ontology", "catalogue", keyword, record.title)
            g = self.store.get_graph(IRI(record.source_graph))
            for kind, types in _KIND_TYPES:
                terms = {t.subject for ty in types for t in g.match(None, RDF.type, ty) if isinstance(t.subject, IRI)}
                for term in terms:
                    labels = sorted(str(o) for o in g.objects(term, RDFS.label) if isinstance(o, Literal))
                    label = labels[0] if labels else None
                    check(record, term.value, kind, "local-name", local_name(term.value), label)
                    for text in labels:
                        check(record, term.value, kind, "label", text, label)
                    for o in sorted(str(o) for o in g.objects(term, RDFS.comment) if isinstance(o, Literal)):
                        check(record, term.value, kind, "comment", o, label)

        field_rank = {f: i for i, f in enumerate(SEARCH_FIELDS)}
        kind_rank = {k: i for i, k in enumerate(TERM_KINDS)}
        hits = sorted(
            set(hits),
            key=lambda h: (h.ontology_prefix, h.term_iri, kind_rank[h.term_kind], field_rank[h.matched_field], h.snippet),
        )
        return hits
