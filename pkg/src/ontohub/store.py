"""Embedded named-graph quad store.

Layout under the store root::

    LOCK         advisory lock file; one writer per root
    quads.log    magic header line, then one checksummed JSON record per line

Every record is one whole ``put`` or ``del`` of a named graph and carries the
term-dictionary entries it introduces, so a torn final line (crash during
append) is simply dropped on the next open. The log is compacted into one
``put`` per live graph once superseded records dominate it.

In memory each graph keeps three integer-id permutations (SPO, POS, OSP).
Writers build a complete new index for the graph and then swap it in, so a
concurrent reader sees either the old or the new graph, never a mix.
"""

from __future__ import annotations

import fcntl
import json
import logging
import os
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Union

from .errors import LockHeld, StoreError
from .rdf.model import IRI, BNode, Graph, Literal, Quad, Term, Triple

log = logging.getLogger(__name__)

MAGIC = "ONTOHUB-QUADSTORE 1"
LOG_NAME = "quads.log"
LOCK_NAME = "LOCK"


@dataclass(frozen=True)
class QuadPattern:
    """``None`` in any position is a wildcard."""

    graph: Optional[IRI] = None
    subject: Optional[Term] = None
    predicate: Optional[Term] = None
    object: Optional[Term] = None


def _encode_term(term: Term) -> list:
    if isinstance(term, IRI):
        return ["i", term.value]
    if isinstance(term, BNode):
        return ["b", term.label]
    return ["l", term.lexical, term.datatype, term.language]


def _decode_term(data: list) -> Term:
    kind = data[0]
    if kind == "i":
        return IRI(data[1])
    if kind == "b":
        return BNode(data[1])
    if kind == "l":
        return Literal(data[1], data[2], data[3])
    raise StoreError(f"unknown term kind {kind!r} in store log")


class _GraphIndex:
    __slots__ = ("spo", "pos", "osp", "size", "prefixes")

    def __init__(self, triples: list[tuple[int, int, int]], prefixes: dict[str, str]) -> None:
        spo: dict = {}
        pos: dict = {}
        osp: dict = {}
        for s, p, o in triples:
            spo.setdefault(s, {}).setdefault(p, set()).add(o)
            pos.setdefault(p, {}).setdefault(o, set()).add(s)
            osp.setdefault(o, {}).setdefault(s, set()).add(p)
        self.spo, self.pos, self.osp = spo, pos, osp
        self.size = sum(len(os_) for ps in spo.values() for os_ in ps.values())
        self.prefixes = dict(prefixes)

    def triples(self) -> Iterator[tuple[int, int, int]]:
        for s, ps in self.spo.items():
            for p, os_ in ps.items():
                for o in os_:
                    yield s, p, o

    def match(self, s: Optional[int], p: Optional[int], o: Optional[int]) -> Iterator[tuple[int, int, int]]:
        if s is not None:
            ps = self.spo.get(s)
            if not ps:
                return
            if p is not None:
                os_ = ps.get(p, ())
                if o is not None:
                    if o in os_:
                        yield s, p, o
                    return
                for o2 in os_:
                    yield s, p, o2
                return
            for p2, os_ in ps.items():
                if o is not None:
                    if o in os_:
                        yield s, p2, o
                else:
                    for o2 in os_:
                        yield s, p2, o2
            return
        if p is not None:
            os_ = self.pos.get(p)
            if not os_:
                return
            if o is not None:
                for s2 in os_.get(o, ()):
                    yield s2, p, o
                return
            for o2, ss in os_.items():
                for s2 in ss:
                    yield s2, p, o2
            return
        if o is not None:
            for s2, ps in self.osp.get(o, {}).items():
                for p2 in ps:
                    yield s2, p2, o
            return
        yield from self.triples()


class QuadStore:
    """Durable named-graph store; see the module docstring for the layout.

    ``readonly=True`` loads a snapshot without taking the writer lock, for
    tools that inspect a store another process is serving.
    """

    def __init__(self, root: Union[str, Path], readonly: bool = False) -> None:
        self.root = Path(root)
        self.readonly = readonly
        self._write_lock = threading.RLock()
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._graphs: dict[int, _GraphIndex] = {}
        self._records = 0
        self._lock_fd: Optional[int] = None
        self._log = None
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            if not readonly:
                self._acquire_lock()
            self._load()
            if not readonly:
                self._log = open(self.root / LOG_NAME, "a", encoding="utf-8")
        except OSError as exc:
            self.close()
            raise StoreError(f"cannot open store at {self.root}: {exc}") from exc
        except Exception:
            self.close()
            raise

    # -- lifecycle ---------------------------------------------------------

    def _acquire_lock(self) -> None:
        fd = os.open(self.root / LOCK_NAME, os.O_RDWR | os.O_CREAT, 0o644)
        try:
            fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            os.close(fd)
            raise LockHeld(f"store at {self.root} is already open for writing") from None
        self._lock_fd = fd

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None
        if self._lock_fd is not None:
            fcntl.flock(self._lock_fd, fcntl.LOCK_UN)
            os.close(self._lock_fd)
            self._lock_fd = None

    def __enter__(self) -> "QuadStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _load(self) -> None:
        path = self.root / LOG_NAME
        if not path.exists():
            if not self.readonly:
                self._write_fresh_log(path, [])
            return
        good_end = 0
        with open(path, "rb") as fh:
            header = fh.readline()
            if header.rstrip(b"\n").decode("utf-8", "replace") != MAGIC:
                raise StoreError(f"{path} is not an ontohub store (bad header)")
            good_end = fh.tell()
            for raw in fh:
                if not raw.endswith(b"\n"):
                    log.warning("dropping torn record at end of %s", path)
                    break
                record = self._decode_line(raw, path)
                self._apply(record)
                self._records += 1
                good_end += len(raw)
        if not self.readonly and good_end != path.stat().st_size:
            with open(path, "r+b") as fh:
                fh.truncate(good_end)

    @staticmethod
    def _decode_line(raw: bytes, path: Path) -> dict:
        try:
            crc_text, payload = raw.rstrip(b"\n").split(b" ", 1)
            if int(crc_text, 16) != zlib.crc32(payload):
                raise ValueError("checksum mismatch")
            return json.loads(payload)
        except ValueError as exc:
            raise StoreError(f"corrupt record in {path}: {exc}") from None

    def _apply(self, record: dict) -> None:
        for tid, enc in record.get("terms", ()):
            term = _decode_term(enc)
            while len(self._terms) <= tid:
                self._terms.append(None)  # type: ignore[arg-type]
            self._terms[tid] = term
            self._ids[term] = tid
        gid = record["g"]
        graphs = dict(self._graphs)
        if record["op"] == "put" and record["t"]:
            graphs[gid] = _GraphIndex([tuple(t) for t in record["t"]], record.get("prefixes", {}))
        else:
            graphs.pop(gid, None)
        self._graphs = graphs

    # -- log writing -------------------------------------------------------

    @staticmethod
    def _line(record: dict) -> str:
        payload = json.dumps(record, ensure_ascii=False, separators=(",", ":"))
        return f"{zlib.crc32(payload.encode('utf-8')):08x} {payload}\n"

    def _append(self, record: dict) -> None:
        if self._log is None:
            raise StoreError("store is read-only or closed")
        try:
            self._log.write(self._line(record))
            self._log.flush()
            os.fsync(self._log.fileno())
        except OSError as exc:
            raise StoreError(f"write to {self.root / LOG_NAME} failed: {exc}") from exc
        self._records += 1

    def _write_fresh_log(self, path: Path, records: list[dict]) -> None:
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(MAGIC + "\n")
            for record in records:
                fh.write(self._line(record))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def _intern(self, term: Term, new_terms: list) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._terms.append(term)
            self._ids[term] = tid
            new_terms.append([tid, _encode_term(term)])
        return tid

    def compact(self) -> None:
        """Rewrite the log as one record per live graph."""
        with self._write_lock:
            if self._log is None:
                raise StoreError("store is read-only or closed")
            records = []
            live: set[int] = set()
            for gid, index in sorted(self._graphs.items()):
                used = {gid}
                triples = sorted(index.triples())
                for t in triples:
                    used.update(t)
                records.append(
                    {
                        "op": "put",
                        "g": gid,
                        "terms": [[tid, _encode_term(self._terms[tid])] for tid in sorted(used)],
                        "prefixes": index.prefixes,
                        "t": [list(t) for t in triples],
                    }
                )
                live |= used
            # Terms referenced by several graphs are repeated; loading is idempotent.
            path = self.root / LOG_NAME
            self._log.close()
            self._log = None
            try:
                self._write_fresh_log(path, records)
            except OSError as exc:
                raise StoreError(f"compaction of {path} failed: {exc}") from exc
            finally:
                self._log = open(path, "a", encoding="utf-8")
            self._records = len(records)
            # Forget terms the new log no longer defines so a later put re-emits them.
            for term, tid in list(self._ids.items()):
                if tid not in live:
                    del self._ids[term]
                    self._terms[tid] = None  # type: ignore[call-overload]

    def _maybe_compact(self) -> None:
        if self._records > 2 * len(self._graphs) + 32:
            self.compact()

    # -- public API --------------------------------------------------------

    def put_graph(self, name: IRI, g: Graph) -> None:
        """Replace the contents of graph ``name`` with ``g`` (and its prefixes)."""
        if not isinstance(name, IRI):
            raise TypeError("graph name must be an IRI")
        with self._write_lock:
            new_terms: list = []
            gid = self._intern(name, new_terms)
            ids = [
                (self._intern(t.subject, new_terms), self._intern(t.predicate, new_terms), self._intern(t.object, new_terms))
                for t in g.triples
            ]
            ids.sort()
            prefixes = dict(g.prefixes)
            record = {"op": "put", "g": gid, "terms": new_terms, "prefixes": prefixes, "t": [list(t) for t in ids]}
            try:
                self._append(record)
            except BaseException:
                # the log never saw these definitions, so later records must not use them
                for tid, _ in new_terms:
                    del self._ids[self._terms[tid]]
                    self._terms[tid] = None  # type: ignore[call-overload]
                raise
            graphs = dict(self._graphs)
            if ids:
                graphs[gid] = _GraphIndex(ids, prefixes)
            else:
                graphs.pop(gid, None)
            self._graphs = graphs
            self._maybe_compact()

    def delete_graph(self, name: IRI) -> None:
        with self._write_lock:
            gid = self._ids.get(name)
            if gid is None or gid not in self._graphs:
                return
            self._append({"op": "del", "g": gid})
            graphs = dict(self._graphs)
            graphs.pop(gid, None)
            self._graphs = graphs
            self._maybe_compact()

    def list_graphs(self) -> set[IRI]:
        return {self._terms[gid] for gid in self._graphs}  # type: ignore[misc]

    def has_graph(self, name: IRI) -> bool:
        gid = self._ids.get(name)
        return gid is not None and gid in self._graphs

    def prefixes(self, name: IRI) -> dict[str, str]:
        gid = self._ids.get(name)
        index = self._graphs.get(gid) if gid is not None else None
        return dict(index.prefixes) if index else {}

    def get_graph(self, name: IRI) -> Graph:
        """The stored triples of ``name`` with its prefix map; empty if absent."""
        gid = self._ids.get(name)
        index = self._graphs.get(gid) if gid is not None else None
        if index is None:
            return Graph()
        terms = self._terms
        return Graph(
            frozenset(Triple(terms[s], terms[p], terms[o]) for s, p, o in index.triples()),  # type: ignore[arg-type]
            index.prefixes,
        )

    def match(self, pattern: Optional[QuadPattern] = None, **kwargs) -> list[Quad]:
        """All stored quads unifying with the pattern (keyword form accepted)."""
        if pattern is None:
            pattern = QuadPattern(**kwargs)
        return [
            Quad(Triple(s, p, o), g)  # type: ignore[arg-type]
            for g, s, p, o in self.match_terms(pattern.graph, pattern.subject, pattern.predicate, pattern.object)
        ]

    def match_terms(
        self,
        graph: Optional[Term] = None,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        obj: Optional[Term] = None,
    ) -> Iterator[tuple[Term, Term, Term, Term]]:
        """Like :meth:`match` but yields plain ``(g, s, p, o)`` tuples."""
        ids = self._ids
        bound = []
        for term in (subject, predicate, obj):
            if term is None:
                bound.append(None)
                continue
            tid = ids.get(term)
            if tid is None:
                return
            bound.append(tid)
        graphs = self._graphs
        if graph is not None:
            gid = ids.get(graph)
            if gid is None or gid not in graphs:
                return
            candidates = [(gid, graphs[gid])]
        else:
            candidates = list(graphs.items())
        terms = self._terms
        s, p, o = bound
        for gid, index in candidates:
            gterm = terms[gid]
            for si, pi, oi in index.match(s, p, o):
                yield gterm, terms[si], terms[pi], terms[oi]

    def count(self, pattern: Optional[QuadPattern] = None, **kwargs) -> int:
        if pattern is None:
            pattern = QuadPattern(**kwargs)
        if pattern.subject is None and pattern.predicate is None and pattern.object is None:
            if pattern.graph is None:
                return sum(index.size for index in self._graphs.values())
            gid = self._ids.get(pattern.graph)
            index = self._graphs.get(gid) if gid is not None else None
            return index.size if index else 0
        return sum(1 for _ in self.match_terms(pattern.graph, pattern.subject, pattern.predicate, pattern.object))

    def __len__(self) -> int:
        return self.count()


def open_store(root: Union[str, Path], readonly: bool = False) -> QuadStore:
    return QuadStore(root, readonly=readonly)
