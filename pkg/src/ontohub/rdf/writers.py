"""Turtle, RDF/XML and RDF/JSON writers.

All writers are deterministic: subjects, predicates and objects are emitted in
sorted order, so identical graphs produce identical bytes.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from xml.sax.saxutils import escape as xml_escape
from xml.sax.saxutils import quoteattr

from ..errors import RdfXmlUnencodable
from .model import IRI, XSD_STRING, BNode, Graph, Literal, Term, Triple, is_absolute_iri
from .ntriples import blank_labels, escape_string
from .turtle import _PN_LOCAL_RE, _PN_PREFIX_RE, RDF_FIRST, RDF_NIL, RDF_NS, RDF_REST, RDF_TYPE, XSD_NS

_INTEGER_RE = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_RE = re.compile(r"^[+-]?[0-9]*\.[0-9]+$")
_DOUBLE_RE = re.compile(r"^[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+$")


def _blank_nodes(g: Graph) -> list[BNode]:
    return [x for t in g.triples for x in (t.subject, t.object) if isinstance(x, BNode)]


def _usable_prefixes(prefixes) -> dict[str, str]:
    out = {}
    for name, ns in sorted(prefixes.items()):
        if (name == "" or _PN_PREFIX_RE.fullmatch(name)) and is_absolute_iri(ns):
            out[name] = ns
    return out


# -- Turtle -------------------------------------------------------------------


class _TurtleWriter:
    def __init__(self, g: Graph) -> None:
        self.g = g
        self.prefixes = _usable_prefixes(g.prefixes)
        # Longest namespace first so the most specific prefix wins.
        self._ns_order = sorted(self.prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))
        self.labels = blank_labels(_blank_nodes(g))
        self.by_subject: dict = defaultdict(list)
        for t in g.triples:
            self.by_subject[t.subject].append(t)
        refs = Counter(t.object for t in g.triples if isinstance(t.object, BNode))
        inline = {node for node, n in refs.items() if n == 1}
        self.inline = self._break_cycles(inline)
        self.lists = self._find_lists()

    def _break_cycles(self, inline: set[BNode]) -> set[BNode]:
        # An inline node must hang off some top-level subject, else it would
        # never be written. Promote unreachable ones until all are reachable.
        while True:
            roots = [s for s in self.by_subject if s not in inline]
            seen: set = set()
            stack = list(roots)
            while stack:
                s = stack.pop()
                for t in self.by_subject.get(s, ()):
                    o = t.object
                    if o in inline and o not in seen:
                        seen.add(o)
                        stack.append(o)
            stranded = [n for n in inline if n in self.by_subject and n not in seen]
            if not stranded:
                return inline
            inline = inline - {min(stranded, key=lambda n: self.labels[n])}

    def _list_items(self, head: BNode) -> list[Term] | None:
        items: list[Term] = []
        node: Term = head
        visited: set = set()
        while node != RDF_NIL:
            if not isinstance(node, BNode) or node not in self.inline or node in visited:
                return None
            visited.add(node)
            triples = self.by_subject.get(node, [])
            firsts = [t.object for t in triples if t.predicate == RDF_FIRST]
            rests = [t.object for t in triples if t.predicate == RDF_REST]
            if len(triples) != 2 or len(firsts) != 1 or len(rests) != 1:
                return None
            items.append(firsts[0])
            node = rests[0]
        return items

    def _find_lists(self) -> dict[BNode, list[Term]]:
        lists = {}
        for head in self.inline:
            items = self._list_items(head)
            if items:
                lists[head] = items
        # A node further down some chain is written as part of that chain.
        tails = set()
        for head in lists:
            node = head
            while node != RDF_NIL:
                node = next(t.object for t in self.by_subject[node] if t.predicate == RDF_REST)
                tails.add(node)
        return {h: items for h, items in lists.items() if h not in tails}

    def iri(self, term: IRI) -> str:
        value = term.value
        for name, ns in self._ns_order:
            if value.startswith(ns):
                local = value[len(ns):]
                if local == "" or _PN_LOCAL_RE.fullmatch(local):
                    return f"{name}:{local}"
        return f"<{value}>"

    def literal(self, term: Literal) -> str:
        lex, dt = term.lexical, term.datatype
        if term.language:
            return f'"{escape_string(lex)}"@{term.language}'
        if dt == XSD_STRING:
            return f'"{escape_string(lex)}"'
        if dt == XSD_NS + "integer" and _INTEGER_RE.match(lex):
            return lex
        if dt == XSD_NS + "decimal" and _DECIMAL_RE.match(lex):
            return lex
        if dt == XSD_NS + "double" and _DOUBLE_RE.match(lex):
            return lex
        if dt == XSD_NS + "boolean" and lex in ("true", "false"):
            return lex
        return f'"{escape_string(lex)}"^^{self.iri(IRI(dt))}'

    def obj(self, term: Term, depth: int) -> str:
        if isinstance(term, Literal):
            return self.literal(term)
        if isinstance(term, IRI):
            return self.iri(term)
        if term in self.lists:
            return "( " + " ".join(self.obj(x, depth) for x in self.lists[term]) + " )"
        if term in self.inline:
            if term not in self.by_subject:
                return "[]"
            pad = "    "
            return "[\n" + pad * (depth + 1) + self.block(term, depth + 1) + "\n" + pad * depth + "]"
        return "_:" + self.labels[term]

    def block(self, subject: Term, depth: int) -> str:
        groups: dict = defaultdict(list)
        for t in self.by_subject[subject]:
            groups[t.predicate].append(t.object)
        parts = []
        for p in sorted(groups, key=lambda p: (p != RDF_TYPE, p.value)):
            verb = "a" if p == RDF_TYPE else self.iri(p)
            objs = sorted(groups[p], key=lambda o: o.sort_key())
            parts.append(verb + " " + ", ".join(self.obj(o, depth) for o in objs))
        return (" ;\n" + "    " * depth).join(parts)

    def write(self) -> str:
        out = [f"@prefix {name}: <{ns}> ." for name, ns in self.prefixes.items()]
        if out:
            out.append("")
        top = [s for s in self.by_subject if s not in self.inline]
        top.sort(key=lambda s: (0, s.value) if isinstance(s, IRI) else (1, self.labels[s]))
        for s in top:
            head = self.iri(s) if isinstance(s, IRI) else "_:" + self.labels[s]
            out.append(f"{head} {self.block(s, 1)} .")
            out.append("")
        return "\n".join(out).rstrip("\n") + "\n" if out else ""


def serialize_turtle(g: Graph) -> bytes:
    return _TurtleWriter(g).write().encode("utf-8")


# -- RDF/XML -----------------------------------------------------------------

_NC_START = (
    "A-Z_a-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    "\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD"
    "\U00010000-\U000EFFFF"
)
_NC_CHAR = _NC_START + "\\-.0-9\u00B7\u0300-\u036F\u203F-\u2040"
_NCNAME_TAIL_RE = re.compile(f"[{_NC_START}][{_NC_CHAR}]*$")
_NCNAME_RE = re.compile(f"[{_NC_START}][{_NC_CHAR}]*")
_XML_ILLEGAL_RE = re.compile("[^\t\n\r\u0020-\uD7FF\uE000-\uFFFD\U00010000-\U0010FFFF]")


def split_qname(iri: str) -> tuple[str, str]:
    """Split an IRI into (namespace, XML local name) or raise RdfXmlUnencodable."""
    m = None
    for start in range(len(iri)):
        m = _NCNAME_TAIL_RE.match(iri, start)
        if m:
            break
    if not m or m.start() == 0:
        raise RdfXmlUnencodable(f"cannot split {iri!r} into namespace and XML name")
    return iri[: m.start()], iri[m.start():]


def _xml_text(value: str) -> str:
    bad = _XML_ILLEGAL_RE.search(value)
    if bad:
        raise RdfXmlUnencodable(f"character {bad.group()!r} cannot appear in XML")
    return xml_escape(value).replace("\r", "&#13;")


def _xml_attr(value: str) -> str:
    bad = _XML_ILLEGAL_RE.search(value)
    if bad:
        raise RdfXmlUnencodable(f"character {bad.group()!r} cannot appear in XML")
    return quoteattr(value)


def serialize_rdfxml(g: Graph) -> bytes:
    labels = blank_labels(_blank_nodes(g))
    node_ids = {node: "b" + label for node, label in labels.items()}
    ns_prefix = {RDF_NS: "rdf"}
    for name, ns in _usable_prefixes(g.prefixes).items():
        if ns not in ns_prefix and name and _NCNAME_RE.fullmatch(name) and ":" not in name:
            if not name.lower().startswith("xml") and name not in ns_prefix.values():
                ns_prefix[ns] = name
    qnames = {}
    for p in sorted({t.predicate for t in g.triples}, key=lambda p: p.value):
        ns, local = split_qname(p.value)
        if ns not in ns_prefix:
            k = 0
            while f"ns{k}" in ns_prefix.values():
                k += 1
            ns_prefix[ns] = f"ns{k}"
        qnames[p] = f"{ns_prefix[ns]}:{local}"

    by_subject: dict = defaultdict(list)
    for t in g.triples:
        by_subject[t.subject].append(t)

    used = {RDF_NS} | {split_qname(p.value)[0] for p in qnames}
    decls = sorted((prefix, ns) for ns, prefix in ns_prefix.items() if ns in used)
    lines = ['<?xml version="1.0" encoding="utf-8"?>']
    lines.append("<rdf:RDF" + "".join(f"\n    xmlns:{p}={_xml_attr(ns)}" for p, ns in decls) + ">")
    subjects = sorted(by_subject, key=lambda s: (0, s.value) if isinstance(s, IRI) else (1, node_ids[s]))
    for s in subjects:
        if isinstance(s, IRI):
            lines.append(f"  <rdf:Description rdf:about={_xml_attr(s.value)}>")
        else:
            lines.append(f'  <rdf:Description rdf:nodeID="{node_ids[s]}">')
        for t in sorted(by_subject[s], key=Triple.sort_key):
            q = qnames[t.predicate]
            o = t.object
            if isinstance(o, IRI):
                lines.append(f"    <{q} rdf:resource={_xml_attr(o.value)}/>")
            elif isinstance(o, BNode):
                lines.append(f'    <{q} rdf:nodeID="{node_ids[o]}"/>')
            elif o.language:
                lines.append(f"    <{q} xml:lang={_xml_attr(o.language)}>{_xml_text(o.lexical)}</{q}>")
            elif o.datatype != XSD_STRING:
                lines.append(f"    <{q} rdf:datatype={_xml_attr(o.datatype)}>{_xml_text(o.lexical)}</{q}>")
            else:
                lines.append(f"    <{q}>{_xml_text(o.lexical)}</{q}>")
        lines.append("  </rdf:Description>")
    lines.append("</rdf:RDF>")
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- RDF/JSON ----------------------------------------------------------------


def _json_term(term: Term, labels: dict[BNode, str]) -> dict:
    if isinstance(term, IRI):
        return {"type": "uri", "value": term.value}
    if isinstance(term, BNode):
        return {"type": "bnode", "value": "_:" + labels[term]}
    out = {"type": "literal", "value": term.lexical}
    if term.language:
        out["lang"] = term.language
    elif term.datatype != XSD_STRING:
        out["datatype"] = term.datatype
    return out


def serialize_rdfjson(g: Graph) -> bytes:
    labels = blank_labels(_blank_nodes(g))
    doc: dict = {}
    for t in sorted(g.triples, key=Triple.sort_key):
        key = t.subject.value if isinstance(t.subject, IRI) else "_:" + labels[t.subject]
        doc.setdefault(key, {}).setdefault(t.predicate.value, []).append(_json_term(t.object, labels))
    return (json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
