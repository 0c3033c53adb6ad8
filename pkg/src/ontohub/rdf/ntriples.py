"""N-Triples term escaping and output."""

from __future__ import annotations

import hashlib
import re
from typing import Iterable

from .model import XSD_STRING, BNode, Graph, Literal, Term, Triple

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}
_NEEDS_ESCAPE = re.compile(r'[\\"\x00-\x1f\x7f]')
_SAFE_LABEL = re.compile(r"^[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")


def escape_string(value: str) -> str:
    def sub(m: re.Match) -> str:
        c = m.group()
        return _ESCAPES.get(c) or f"\\u{ord(c):04X}"

    return _NEEDS_ESCAPE.sub(sub, value)


def blank_labels(nodes: Iterable[BNode]) -> dict[BNode, str]:
    """Output labels for blank nodes: kept when already safe, hashed otherwise."""
    out: dict[BNode, str] = {}
    taken: set[str] = set()
    pending = []
    for node in sorted(set(nodes), key=lambda n: n.label):
        if _SAFE_LABEL.match(node.label) and node.label not in taken:
            out[node] = node.label
            taken.add(node.label)
        else:
            pending.append(node)
    for node in pending:
        label = "x" + hashlib.sha1(node.label.encode("utf-8")).hexdigest()[:12]
        while label in taken:
            label += "x"
        out[node] = label
        taken.add(label)
    return out


def term_to_nt(term: Term, labels: dict[BNode, str]) -> str:
    if isinstance(term, BNode):
        return "_:" + labels[term]
    if isinstance(term, Literal):
        text = f'"{escape_string(term.lexical)}"'
        if term.language:
            return f"{text}@{term.language}"
        if term.datatype != XSD_STRING:
            return f"{text}^^<{term.datatype}>"
        return text
    return f"<{term.value}>"


def triple_to_nt(t: Triple, labels: dict[BNode, str]) -> str:
    return f"{term_to_nt(t.subject, labels)} {term_to_nt(t.predicate, labels)} {term_to_nt(t.object, labels)} ."


def serialize_ntriples(g: Graph) -> bytes:
    blanks = [x for t in g.triples for x in (t.subject, t.object) if isinstance(x, BNode)]
    labels = blank_labels(blanks)
    lines = sorted(triple_to_nt(t, labels) for t in g.triples)
    if not lines:
        return b""
    return ("\n".join(lines) + "\n").encode("utf-8")
