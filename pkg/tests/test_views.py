import json
import random

from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from corpus import fixture_graph, random_hierarchy
from ontohub import views
from ontohub.rdf import IRI, OWL, RDF, RDFS, BNode, Graph, Literal, Triple
from ontohub.vocab import extract_schema_terms

EX = "http://example.org/"
SHL = "http://www.library.sh.cn/ontology/"
FOAF = "http://xmlns.com/foaf/0.1/"
RDFS_NS = str(RDFS)


def C(name: str) -> IRI:
    return IRI(EX + name)


def sub(a: str, b: str) -> Triple:
    return Triple(C(a), RDFS.subClassOf, C(b))


def decl(*names: str) -> list:
    return [Triple(C(n), RDF.type, OWL.Class) for n in names]


def node_iris(forest) -> set:
    return {n.iri for root in forest for n in root.walk()}


def test_figure_hierarchy_roots():
    roots = [iri for iri, _ in views.top_level_classes(fixture_graph("shlnames.ttl"))]
    assert roots == sorted(roots)
    assert set(roots) == {
        "http://www.geonames.org/ontology#Feature",
        "http://www.w3.org/2003/01/geo/wgs84_pos#SpatialThing",
        "http://www.w3.org/ns/prov#Activity",
        "http://www.w3.org/ns/prov#Location",
        RDFS_NS + "Resource",
        SHL + "Agent",
    }


def test_figure_resource_children():
    kids = {iri for iri, _ in views.subclass_children(fixture_graph("shlnames.ttl"), RDFS.Resource)}
    assert kids >= {FOAF + "Person", FOAF + "Agent", FOAF + "Document", SHL + "Resource", "http://www.w3.org/2006/time#ProperInterval"}


def test_figure_person_under_both_parents():
    forest = views.class_tree(fixture_graph("shlnames.ttl"))
    parents = {n.iri for root in forest for n in root.walk() if any(c.iri == SHL + "Person" for c in n.children)}
    assert parents == {SHL + "Agent", FOAF + "Person"}


def test_figure_declared_properties():
    rows = views.declared_properties(fixture_graph("shlnames.ttl"), SHL + "Person")
    rel = "http://purl.org/vocab/relationship/"
    assert [r.iri for r in rows] == [rel + "childOf", rel + "friendOf", rel + "influenceBy"]
    assert {(r.kind, r.domain, r.range) for r in rows} == {("object-property", SHL + "Person", SHL + "Person")}
    assert [r.label for r in rows] == ["父母", "朋友", "受...影响"]


def test_figure_inheritance_levels():
    levels = views.inherited_properties(fixture_graph("shlnames.ttl"), SHL + "Person")
    assert [(l.ancestor, l.distance) for l in levels] == [(SHL + "Agent", 1), (RDFS_NS + "Resource", 2)]
    assert [p.iri for p in levels[0].properties] == [SHL + "name"]
    assert levels[0].properties[0].range == SHL + "Name"
    assert FOAF + "Person" not in {l.ancestor for l in levels}


def test_single_class():
    g = Graph(decl("A"))
    assert views.top_level_classes(g) == [(EX + "A", None)]
    assert views.subclass_children(g, C("A")) == []
    assert views.inherited_properties(g, C("A")) == []


def test_labels_prefer_untagged_then_english():
    g = Graph(decl("A") + [
        Triple(C("A"), RDFS.label, Literal("甲", language="zh")),
        Triple(C("A"), RDFS.label, Literal("Ay", language="en")),
    ])
    assert views.top_level_classes(g) == [(EX + "A", "Ay")]
    g2 = g | Graph([Triple(C("A"), RDFS.label, Literal("plain"))])
    assert views.top_level_classes(g2) == [(EX + "A", "plain")]


def test_blank_superclass_disqualifies_and_blank_subclass_hidden():
    restriction = BNode("r")
    g = Graph(decl("A", "B") + [Triple(C("A"), RDFS.subClassOf, restriction), Triple(restriction, RDFS.subClassOf, C("B"))])
    assert views.top_level_classes(g) == [(EX + "B", None)]
    assert views.subclass_children(g, C("B")) == []


def test_undeclared_superclass_is_a_root():
    g = Graph(decl("A") + [sub("A", "Undeclared")])
    assert [iri for iri, _ in views.top_level_classes(g)] == [EX + "Undeclared"]


def test_multiple_parents_duplicate_the_child():
    g = Graph(decl("A", "B", "C") + [sub("A", "B"), sub("A", "C")])
    forest = views.class_tree(g)
    assert [(r.iri, [c.iri for c in r.children]) for r in forest] == [(EX + "B", [EX + "A"]), (EX + "C", [EX + "A"])]


def test_two_cycle_terminates_with_flag():
    g = Graph(decl("A", "B", "R") + [sub("A", "B"), sub("B", "A"), sub("A", "R")])
    forest = views.class_tree(g)
    flagged = [n for root in forest for n in root.walk() if n.cycle_backedge]
    assert len(flagged) == 1 and flagged[0].iri == EX + "A"
    assert "[cycle]" in views.tree_text(forest)


def test_self_loop():
    g = Graph(decl("A", "R") + [sub("A", "A"), sub("A", "R")])
    forest = views.class_tree(g)
    assert forest[0].children[0].children[0].cycle_backedge


def test_diamond_distance():
    g = Graph(decl("A", "B", "C", "D") + [sub("D", "B"), sub("D", "C"), sub("B", "A"), sub("C", "A")] + [
        Triple(IRI(EX + "p"), RDFS.domain, C("A")),
        Triple(IRI(EX + "q"), RDFS.domain, C("B")),
    ])
    levels = views.inherited_properties(g, C("D"))
    assert [(l.ancestor, l.distance) for l in levels] == [(EX + "B", 1), (EX + "A", 2)]


def test_property_with_two_domains_and_kinds():
    p = IRI(EX + "p")
    g = Graph([
        Triple(p, RDFS.domain, C("A")),
        Triple(p, RDFS.domain, C("B")),
        Triple(p, RDF.type, OWL.AnnotationProperty),
        Triple(p, RDFS.subPropertyOf, RDFS.label),
    ])
    for cls in ("A", "B"):
        (row,) = views.declared_properties(g, C(cls))
        assert row.kind == "annotation-property" and row.domain == EX + cls
        assert row.sub_property_of == str(RDFS.label)
    assert views.property_kind(g, IRI(EX + "other")) == "plain-property"
    assert views.declared_properties(g, C("Z")) == []


def test_list_view_contents():
    g = fixture_graph("shlnames.ttl")
    doc = views.list_view(g)
    classes = [iri for iri, _ in doc.classes]
    assert SHL + "Person" in classes and classes == sorted(classes)
    panel = next(p for p in doc.panels if p.iri == SHL + "Person")
    assert set(panel.parents) == {SHL + "Agent", FOAF + "Person"}
    assert "http://purl.org/vocab/relationship/childOf" in panel.properties
    html = doc.to_html("names").decode()
    assert html.startswith("<!DOCTYPE html>") and "shl:Person" in html


def test_list_view_empty_and_no_domain_bucket():
    empty = views.list_view(Graph()).to_dict()
    assert empty["classes"] == [] and empty["properties"] == []
    g = Graph([Triple(IRI(EX + "free"), RDF.type, OWL.DatatypeProperty)])
    assert views.list_view(g).to_dict()[views.NO_DOMAIN] == [EX + "free"]


def test_vowl_export_shape():
    g = fixture_graph("shlnames.ttl")
    doc = views.vowl_export(g)
    person = next(n["id"] for n in doc["class"] if n["iri"] == SHL + "Person")
    child_of = next(e for e in doc["property"] if e["iri"] == "http://purl.org/vocab/relationship/childOf")
    assert child_of["domain"] == child_of["range"] == person
    assert len(doc["class"]) == len(extract_schema_terms(g).classes)
    for edge in doc["property"]:
        target = doc["class"] if edge["type"] == "owl:objectProperty" else doc["datatype"]
        assert 0 <= edge["range"] < len(target) and 0 <= edge["domain"] < len(doc["class"])
    assert views.vowl_export(Graph()) == {"class": [], "datatype": [], "property": []}


def test_exports_are_deterministic():
    g = fixture_graph("shlnames.ttl")
    shuffled = Graph(sorted(g.triples, key=lambda t: t.n3(), reverse=True), dict(g.prefixes))
    assert views.vowl_json(g) == views.vowl_json(shuffled)
    assert views.list_view(g).to_json() == views.list_view(shuffled).to_json()
    assert views.list_view(g).to_html() == views.list_view(shuffled).to_html()
    assert json.dumps([n.to_dict() for n in views.class_tree(g)]) == json.dumps([n.to_dict() for n in views.class_tree(shuffled)])
    assert views.tree_text(views.class_tree(g)) == views.tree_text(views.class_tree(shuffled))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_hierarchy_matches_oracles(seed):
    g = random_hierarchy(random.Random(seed), 18)
    roots = [iri for iri, _ in views.top_level_classes(g)]
    assert roots == oracles.top_level(g)
    outgoing = {t.subject.value for t in g.triples if t.predicate == RDFS.subClassOf}
    assert not set(roots) & outgoing
    forest = views.class_tree(g)
    assert node_iris(forest) == oracles.reachable_from_roots(g)
    for root in forest:
        _check_paths(g, root, ())


def _check_paths(g, node, path):
    expected = [iri for iri, _ in views.subclass_children(g, node.iri)]
    if node.cycle_backedge:
        assert node.iri in path and not node.children
        return
    assert node.iri not in path
    assert [c.iri for c in node.children] == expected
    for child in node.children:
        _check_paths(g, child, path + (node.iri,))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_inheritance_matches_shortest_paths(seed):
    g = random_hierarchy(random.Random(seed), 18)
    domains = oracles.domain_map(g)
    for cls in sorted(oracles.declared_classes(g), key=lambda c: c.value):
        dist = oracles.superclass_distances(g, cls)
        expected = sorted(((d, a) for a, d in dist.items() if domains.get(a)), key=lambda x: (x[0], x[1]))
        levels = views.inherited_properties(g, cls)
        assert [(l.distance, l.ancestor) for l in levels] == expected
        for level in levels:
            assert {p.iri for p in level.properties} == domains[level.ancestor]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_domain_union_covers_every_property(seed):
    g = random_hierarchy(random.Random(seed), 18)
    covered = set()
    for cls in {t.object for t in g.triples if t.predicate == RDFS.domain}:
        covered |= {p.iri for p in views.declared_properties(g, cls)}
    assert covered == {t.subject.value for t in g.triples if t.predicate == RDFS.domain}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_list_view_indexes_each_term_once(seed):
    g = random_hierarchy(random.Random(seed), 12)
    doc = views.list_view(g)
    classes, props = oracles.schema_scan(g)
    class_index = [iri for iri, _ in doc.classes]
    prop_index = [iri for iri, _ in doc.properties]
    assert set(class_index) == classes and set(prop_index) == props - classes
    assert not set(class_index) & set(prop_index)
    assert len(views.vowl_export(g)["class"]) == len(classes)
