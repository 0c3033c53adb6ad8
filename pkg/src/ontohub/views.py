"""Class hierarchy, property inheritance and the list/graph view exports.

All functions are pure over an immutable Graph. IRIs in results are plain
strings so the exports serialize without further conversion.
"""

from __future__ import annotations

import html
import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .rdf import IRI, OWL, RDF, RDFS, Graph, Literal
from .rdf.namespaces import WELL_KNOWN_PREFIXES, compact, local_name
from .vocab import CLASS_TYPES, best_label, extract_schema_terms, first_literal, iri_objects

ClassRef = Union[str, IRI]

KIND_BY_TYPE = (
    (OWL.ObjectProperty, "object-property"),
    (OWL.DatatypeProperty, "datatype-property"),
    (OWL.AnnotationProperty, "annotation-property"),
)


def _iri(ref: ClassRef) -> IRI:
    return ref if isinstance(ref, IRI) else IRI(ref)


@dataclass(frozen=True)
class ClassTreeNode:
    iri: str
    label: Optional[str] = None
    children: tuple["ClassTreeNode", ...] = ()
    cycle_backedge: bool = False

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def to_dict(self) -> dict:
        out = {"iri": self.iri, "label": self.label, "children": [c.to_dict() for c in self.children]}
        if self.cycle_backedge:
            out["cycle"] = True
        return out


@dataclass(frozen=True)
class PropertyEntry:
    iri: str
    kind: str
    sub_property_of: Optional[str] = None
    label: Optional[str] = None
    domain: Optional[str] = None
    range: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "iri": self.iri,
            "kind": self.kind,
            "subPropertyOf": self.sub_property_of,
            "label": self.label,
            "domain": self.domain,
            "range": self.range,
        }


@dataclass(frozen=True)
class InheritanceLevel:
    ancestor: str
    distance: int
    properties: tuple[PropertyEntry, ...]

    def to_dict(self) -> dict:
        return {
            "ancestor": self.ancestor,
            "distance": self.distance,
            "properties": [p.to_dict() for p in self.properties],
        }


# -- class hierarchy ------------------------------------------------------------


def top_level_classes(g: Graph) -> list[tuple[str, Optional[str]]]:
    """Roots of the class forest, ascending by IRI.

    Candidates are IRIs typed owl:Class/rdfs:Class plus every IRI reachable
    from such a class over zero or more rdfs:subClassOf steps; a candidate is
    top-level when it has no outgoing rdfs:subClassOf edge at all.
    """
    declared = {t.subject for ty in CLASS_TYPES for t in g.match(None, RDF.type, ty) if isinstance(t.subject, IRI)}
    seen = set(declared)
    queue = deque(declared)
    while queue:
        node = queue.popleft()
        for parent in g.objects(node, RDFS.subClassOf):
            if isinstance(parent, Literal):
                continue
            if parent not in seen:
                seen.add(parent)
                queue.append(parent)
    roots = [c for c in seen if isinstance(c, IRI) and not g.match(c, RDFS.subClassOf, None)]
    roots.sort(key=lambda c: c.value)
    return [(c.value, best_label(g, c)) for c in roots]


def _children_map(g: Graph) -> dict[IRI, list[IRI]]:
    children: dict[IRI, set[IRI]] = defaultdict(set)
    for t in g.match(None, RDFS.subClassOf, None):
        if isinstance(t.subject, IRI):
            children[t.object].add(t.subject)
    return {parent: sorted(kids, key=lambda c: c.value) for parent, kids in children.items()}


def subclass_children(g: Graph, class_iri: ClassRef) -> list[tuple[str, Optional[str]]]:
    """Direct named subclasses of ``class_iri``, ascending by IRI."""
    kids = _children_map(g).get(_iri(class_iri), [])
    return [(c.value, best_label(g, c)) for c in kids]


def class_tree(g: Graph) -> list[ClassTreeNode]:
    """Expand every top-level class recursively into a forest.

    A class with several parents is repeated under each. A child that is
    already on the path from the root is emitted as a flagged leaf instead of
    being expanded again, which makes the expansion finite on cyclic input.
    """
    children = _children_map(g)
    labels: dict[IRI, Optional[str]] = {}

    def label(c: IRI) -> Optional[str]:
        if c not in labels:
            labels[c] = best_label(g, c)
        return labels[c]

    def expand(node: IRI, path: frozenset) -> ClassTreeNode:
        kids = []
        for child in children.get(node, ()):
            if child in path or child == node:
                kids.append(ClassTreeNode(child.value, label(child), (), True))
            else:
                kids.append(expand(child, path | {node}))
        return ClassTreeNode(node.value, label(node), tuple(kids))

    return [expand(IRI(iri), frozenset()) for iri, _ in top_level_classes(g)]


def tree_text(forest: list[ClassTreeNode], prefixes: Optional[dict[str, str]] = None) -> str:
    """Indented text rendering, one class per line."""
    names = {**WELL_KNOWN_PREFIXES, **(prefixes or {})}
    lines: list[str] = []

    def emit(node: ClassTreeNode, depth: int) -> None:
        text = "  " * depth + "- " + compact(node.iri, names)
        if node.label:
            text += f" ({node.label})"
        if node.cycle_backedge:
            text += " [cycle]"
        lines.append(text)
        for child in node.children:
            emit(child, depth + 1)

    for root in forest:
        emit(root, 0)
    return "\n".join(lines) + ("\n" if lines else "")


# -- properties -------------------------------------------------------------------


def property_kind(g: Graph, prop: IRI) -> str:
    types = set(g.objects(prop, RDF.type))
    for ty, kind in KIND_BY_TYPE:
        if ty in types:
            return kind
    return "plain-property"


def _property_entry(g: Graph, prop: IRI, domain: Optional[str]) -> PropertyEntry:
    supers = iri_objects(g, prop, RDFS.subPropertyOf)
    ranges = iri_objects(g, prop, RDFS.range)
    return PropertyEntry(
        iri=prop.value,
        kind=property_kind(g, prop),
        sub_property_of=supers[0] if supers else None,
        label=best_label(g, prop),
        domain=domain,
        range=ranges[0] if ranges else None,
    )


def declared_properties(g: Graph, class_iri: ClassRef) -> list[PropertyEntry]:
    """Properties whose rdfs:domain names ``class_iri``, sorted by IRI."""
    cls = _iri(class_iri)
    props = {t.subject for t in g.match(None, RDFS.domain, cls) if isinstance(t.subject, IRI)}
    return [_property_entry(g, p, cls.value) for p in sorted(props, key=lambda p: p.value)]


def inherited_properties(g: Graph, class_iri: ClassRef) -> list[InheritanceLevel]:
    """Properties of each named ancestor, grouped by minimal superclass distance.

    Ancestors without rdfs:domain-attached properties are left out.
    """
    start = _iri(class_iri)
    distance = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for parent in g.objects(node, RDFS.subClassOf):
            if isinstance(parent, IRI) and parent not in distance:
                distance[parent] = distance[node] + 1
                queue.append(parent)
    levels = []
    for ancestor, d in sorted(distance.items(), key=lambda kv: (kv[1], kv[0].value)):
        if d == 0:
            continue
        props = declared_properties(g, ancestor)
        if props:
            levels.append(InheritanceLevel(ancestor.value, d, tuple(props)))
    return levels


# -- list view --------------------------------------------------------------------


@dataclass(frozen=True)
class TermPanel:
    iri: str
    kind: str
    label: Optional[str] = None
    comment: Optional[str] = None
    types: tuple[str, ...] = ()
    domain: tuple[str, ...] = ()
    range: tuple[str, ...] = ()
    parents: tuple[str, ...] = ()
    properties: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {
            "iri": self.iri,
            "kind": self.kind,
            "label": self.label,
            "comment": self.comment,
            "types": list(self.types),
        }
        if self.kind == "class":
            out["subClassOf"] = list(self.parents)
            out["properties"] = list(self.properties)
        else:
            out["subPropertyOf"] = list(self.parents)
            out["domain"] = list(self.domain)
            out["range"] = list(self.range)
        return out


NO_DOMAIN = "(no domain)"


@dataclass(frozen=True)
class ListViewDocument:
    classes: tuple[tuple[str, Optional[str]], ...] = ()
    properties: tuple[tuple[str, Optional[str]], ...] = ()
    panels: tuple[TermPanel, ...] = ()
    without_domain: tuple[str, ...] = ()
    prefixes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "classes": [{"iri": i, "label": l} for i, l in self.classes],
            "properties": [{"iri": i, "label": l} for i, l in self.properties],
            "panels": [p.to_dict() for p in self.panels],
            NO_DOMAIN: list(self.without_domain),
        }

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")

    def to_html(self, title: str = "Vocabulary") -> bytes:
        names = {**WELL_KNOWN_PREFIXES, **self.prefixes}

        def name(iri: str) -> str:
            return html.escape(compact(iri, names))

        def link(iri: str) -> str:
            return f'<a href="#{html.escape(iri, quote=True)}">{name(iri)}</a>'

        def links(iris) -> str:
            return ", ".join(link(i) for i in iris) or "&ndash;"

        out = [
            "<!DOCTYPE html>",
            '<html><head><meta charset="utf-8">',
            f"<title>{html.escape(title)}</title></head><body>",
            f"<h1>{html.escape(title)}</h1>",
            "<h2>Classes</h2><ol>",
        ]
        out += [f"<li>{link(i)}</li>" for i, _ in self.classes]
        out += ["</ol>", "<h2>Properties</h2><ol>"]
        out += [f"<li>{link(i)}</li>" for i, _ in self.properties]
        out.append("</ol>")
        if self.without_domain:
            out.append(f"<h3>{html.escape(NO_DOMAIN)}</h3><ul>")
            out += [f"<li>{link(i)}</li>" for i in self.without_domain]
            out.append("</ul>")
        out.append("<h2>Details</h2>")
        for panel in self.panels:
            out.append(f'<section id="{html.escape(panel.iri, quote=True)}">')
            out.append(f"<h3>{name(panel.iri)} <small>{html.escape(panel.kind)}</small></h3><dl>")
            out.append(f"<dt>IRI</dt><dd>{html.escape(panel.iri)}</dd>")
            if panel.label:
                out.append(f"<dt>Label</dt><dd>{html.escape(panel.label)}</dd>")
            if panel.comment:
                out.append(f"<dt>Comment</dt><dd>{html.escape(panel.comment)}</dd>")
            out.append(f"<dt>Type</dt><dd>{links(panel.types)}</dd>")
            if panel.kind == "class":
                out.append(f"<dt>Subclass of</dt><dd>{links(panel.parents)}</dd>")
                out.append(f"<dt>Properties</dt><dd>{links(panel.properties)}</dd>")
            else:
                out.append(f"<dt>Subproperty of</dt><dd>{links(panel.parents)}</dd>")
                out.append(f"<dt>Domain</dt><dd>{links(panel.domain)}</dd>")
                out.append(f"<dt>Range</dt><dd>{links(panel.range)}</dd>")
            out.append("</dl></section>")
        out.append("</body></html>")
        return ("\n".join(out) + "\n").encode("utf-8")


def list_view(g: Graph) -> ListViewDocument:
    """Index of all classes and properties plus a detail panel per term.

    An IRI extracted as both class and property is indexed as a class.
    """
    terms = extract_schema_terms(g)
    classes = sorted(terms.classes)
    properties = sorted(terms.properties - terms.classes)
    panels = []
    for iri in classes:
        term = IRI(iri)
        panels.append(
            TermPanel(
                iri=iri,
                kind="class",
                label=best_label(g, term),
                comment=first_literal(g, term, RDFS.comment),
                types=tuple(iri_objects(g, term, RDF.type)),
                parents=tuple(iri_objects(g, term, RDFS.subClassOf)),
                properties=tuple(p.iri for p in declared_properties(g, term)),
            )
        )
    without_domain = []
    for iri in properties:
        term = IRI(iri)
        domains = iri_objects(g, term, RDFS.domain)
        if not g.objects(term, RDFS.domain):
            without_domain.append(iri)
        panels.append(
            TermPanel(
                iri=iri,
                kind=property_kind(g, term),
                label=best_label(g, term),
                comment=first_literal(g, term, RDFS.comment),
                types=tuple(iri_objects(g, term, RDF.type)),
                domain=tuple(domains),
                range=tuple(iri_objects(g, term, RDFS.range)),
                parents=tuple(iri_objects(g, term, RDFS.subPropertyOf)),
            )
        )
    return ListViewDocument(
        classes=tuple((i, best_label(g, IRI(i))) for i in classes),
        properties=tuple((i, best_label(g, IRI(i))) for i in properties),
        panels=tuple(panels),
        without_domain=tuple(without_domain),
        prefixes=dict(g.prefixes),
    )


# -- graph view data ----------------------------------------------------------------


def vowl_export(g: Graph) -> dict:
    """Node/edge document for a WebVOWL-style renderer.

    ``class`` holds one node per extracted class. Object properties become
    edges between the indices of their domain and range classes; each
    datatype property gets its own leaf in ``datatype`` and an edge to it.
    """
    terms = extract_schema_terms(g)
    classes = sorted(terms.classes)
    index = {iri: i for i, iri in enumerate(classes)}
    class_nodes = []
    for iri in classes:
        types = set(iri_objects(g, IRI(iri), RDF.type))
        kind = "rdfs:Class" if RDFS.Class.value in types and OWL.Class.value not in types else "owl:Class"
        class_nodes.append({"id": index[iri], "iri": iri, "label": best_label(g, IRI(iri)) or local_name(iri), "type": kind})

    datatypes: list[dict] = []
    properties: list[dict] = []
    props = sorted(
        {t.subject for ty in (OWL.ObjectProperty, OWL.DatatypeProperty) for t in g.match(None, RDF.type, ty) if isinstance(t.subject, IRI)},
        key=lambda p: p.value,
    )
    for prop in props:
        kind = property_kind(g, prop)
        label = best_label(g, prop) or local_name(prop.value)
        domains = [d for d in iri_objects(g, prop, RDFS.domain) if d in index]
        ranges = iri_objects(g, prop, RDFS.range)
        for d in domains:
            if kind == "object-property":
                for r in ranges:
                    if r in index:
                        properties.append(
                            {"iri": prop.value, "label": label, "type": "owl:objectProperty", "domain": index[d], "range": index[r]}
                        )
            else:
                target = ranges[0] if ranges else RDFS.Literal.value
                datatypes.append({"id": len(datatypes), "iri": target, "label": local_name(target), "type": "rdfs:Datatype"})
                properties.append(
                    {"iri": prop.value, "label": label, "type": "owl:datatypeProperty", "domain": index[d], "range": len(datatypes) - 1}
                )
    for i, prop in enumerate(properties):
        prop["id"] = i
    return {"class": class_nodes, "datatype": datatypes, "property": properties}


def vowl_json(g: Graph) -> bytes:
    return (json.dumps(vowl_export(g), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")
