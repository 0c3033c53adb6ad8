"""Fixture loaders and generators shared by the test modules."""

from __future__ import annotations

import random
from pathlib import Path

from ontohub.rdf import IRI, OWL, RDF, RDFS, XSD, BNode, Graph, Literal, Triple, parse
from ontohub.rdf.namespaces import Namespace
from ontohub.registry import Registry
from ontohub.store import QuadStore

FIXTURES = Path(__file__).parent / "fixtures"
BASE = "http://ont.library.sh.cn"

SHL = Namespace("http://www.library.sh.cn/ontology/")
CBDB_DATA = "http://lod.library.sh.cn/data/cbdb/"
CBDB_GRAPH = "http://lod.library.sh.cn/graph/cbdb"

# prefix -> (file, version, issued, title)
CORPUS = {
    "skos": ("skos.ttl", "1.2", "2009-08-18", "Simple Knowledge Organization System"),
    "foaf": ("foaf.ttl", "0.99", "2014-01-14", "Friend of a Friend vocabulary"),
    "shlnames": ("shlnames.ttl", "1.0", "2018-05-01", "Shanghai Library Names Authority Ontology"),
    "cbdb": ("cbdb.ttl", "1.0", "2019-03-01", "CBDB linked data ontology"),
}


def fixture_bytes(name: str) -> bytes:
    return (FIXTURES / name).read_bytes()


def fixture_graph(name: str) -> Graph:
    return parse(fixture_bytes(name))


def register_schema(registry: Registry, version: str) -> None:
    issued = {"3.1": "2016-08-09", "12.0": "2021-03-08"}[version]
    year = issued[:4]
    registry.register(
        fixture_bytes(f"schema_{version}.ttl"),
        prefix="schema",
        version_info=version,
        issued=issued,
        title="Schema.org vocabulary (schema)",
        description=(
            "Search engines including Bing, Google, Yahoo! and Yandex rely on schema.org markup "
            "to improve the display of search results, making it easier for people to find the right web pages."
        ),
        rights=f"© {year} Schema",
        license="https://creativecommons.org/licenses/by/3.0/",
        catalogue=["general", "web"],
    )


def load_corpus(registry: Registry) -> None:
    """Schema.org 3.1 then 12.0, plus every other fixture ontology."""
    register_schema(registry, "3.1")
    register_schema(registry, "12.0")
    for prefix, (name, version, issued, title) in CORPUS.items():
        registry.register(
            fixture_bytes(name),
            prefix=prefix,
            version_info=version,
            issued=issued,
            title=title,
            contributor="Shanghai Library" if prefix in ("shlnames", "cbdb") else None,
            catalogue=["library"] if prefix in ("shlnames", "cbdb") else [],
        )


def cbdb_graphs() -> dict[str, Graph]:
    """Seventeen graphs; the CBDB one uses nine classes and two undeclared properties."""
    rng = random.Random(1990)
    data = Namespace(CBDB_DATA)
    triples: list[Triple] = []

    def node(kind: str, i: int) -> IRI:
        return data[f"{kind}/{i}"]

    def add(s, p, o) -> None:
        triples.append(Triple(s, p, o))

    def typed(kind: str, cls: IRI, n: int, label: bool) -> list[IRI]:
        out = []
        for i in range(n):
            s = node(kind, i)
            add(s, RDF.type, cls)
            if label:
                add(s, RDFS.label, Literal(f"{kind} {i}", language="zh"))
            out.append(s)
        return out

    temporals = typed("temporal", SHL.Temporal, 30, True)
    places = typed("place", SHL.Place, 20, True)
    offices = typed("office", SHL.Office, 10, True)
    addresses = typed("address", SHL.Address, 20, True)
    events = typed("event", SHL.Event, 15, True)
    persons = typed("person", SHL.Person, 60, True)
    names = typed("name", SHL.Name, 60, True)
    relations = typed("relationship", SHL.Relationship, 40, False)
    kinships = typed("kinship", SHL.Kinship, 10, False)

    for i, t in enumerate(temporals):
        add(t, SHL.year, Literal(str(700 + 10 * i), XSD.gYear.value))
    for a in addresses:
        add(a, SHL.place, rng.choice(places))
    for e in events:
        add(e, SHL.temporal, rng.choice(temporals))
        add(e, SHL.place, rng.choice(places))
    for p, n in zip(persons, names):
        add(p, SHL.name, n)
        add(p, SHL.temporal, rng.choice(temporals))
        add(p, SHL.address, rng.choice(addresses))
        if rng.random() < 0.5:
            add(p, SHL.office, rng.choice(offices))
        add(n, SHL.nameValue, Literal(f"name-{n.value[-3:]}"))
        add(n, SHL.nameType, Literal(rng.choice(["字", "號", "本名"])))
        add(n, SHL.temporal, rng.choice(temporals))
    for r in relations + kinships:
        a, b = rng.sample(persons, 2)
        add(r, SHL.relationSubject, a)
        add(r, SHL.relationObject, b)
        if r in relations:
            add(r, SHL.relationType, Literal(rng.choice(["父", "子", "友"])))
            add(r, SHL.temporal, rng.choice(temporals))

    graphs = {CBDB_GRAPH: Graph(frozenset(triples))}
    for name in (
        "names", "places", "offices", "kinship", "entry", "status", "texts", "postings",
        "events", "associations", "addresses", "dynasties", "nianhao", "biog", "sources", "datasets",
    ):
        subject = IRI(f"http://lod.library.sh.cn/data/{name}/1")
        graphs[f"http://lod.library.sh.cn/graph/{name}"] = Graph(
            frozenset({Triple(subject, RDFS.label, Literal(name)), Triple(subject, RDF.type, SHL.Place)})
        )
    return graphs


def seed_store(store: QuadStore, graphs: dict[str, Graph]) -> None:
    for name, g in graphs.items():
        store.put_graph(IRI(name), g)


def random_dataset(rng: random.Random, graphs: int = 3) -> dict[str, Graph]:
    """Small random instance data with repeated subjects across graphs."""
    classes = [IRI(f"http://example.org/C{i}") for i in range(rng.randint(1, 6))]
    props = [IRI(f"http://example.org/p{i}") for i in range(rng.randint(1, 6))] + [RDF.type, RDFS.label]
    subjects = [IRI(f"http://example.org/s{i}") for i in range(rng.randint(1, 12))]
    out = {}
    for gi in range(rng.randint(1, graphs)):
        triples = set()
        for _ in range(rng.randint(0, 40)):
            s = rng.choice(subjects)
            p = rng.choice(props)
            if p == RDF.type:
                o = rng.choice(classes)
            elif rng.random() < 0.5:
                o = rng.choice(subjects)
            else:
                o = Literal(str(rng.randint(0, 5)))
            triples.add(Triple(s, p, o))
        out[f"http://example.org/graph/{gi}"] = Graph(frozenset(triples))
    return out


def brute_force_stats(graphs: dict[str, Graph], targets) -> tuple[dict[str, int], dict[str, int]]:
    typed: dict[str, set] = {}
    props: dict[str, int] = {}
    for name in targets:
        for t in graphs.get(name, Graph()).triples:
            props[t.predicate.value] = props.get(t.predicate.value, 0) + 1
            if t.predicate == RDF.type and isinstance(t.object, IRI):
                typed.setdefault(t.object.value, set()).add(t.subject)
    return {c: len(s) for c, s in typed.items()}, props


_NAMESPACES = ["http://example.org/", "http://example.org/ns#", "urn:x:", "https://a.example/b/c/"]
_LEXICALS = [
    "plain", "", "with \"quotes\"", "line\nbreak", "tab\tand\\backslash", "汉字", "emoji 😀",
    "trailing space ", "'single'", "a\r\nb", "1", "01", "-5", "3.14", "true", "1e10", "#hash", "@at",
]
_DATATYPES = [
    XSD.string.value, XSD.integer.value, XSD.decimal.value, XSD.double.value, XSD.boolean.value,
    XSD.date.value, "http://example.org/dt",
]


def random_term(rng: random.Random, position: str, blanks: list):
    roll = rng.random()
    if position != "predicate" and roll < 0.25 and blanks:
        return rng.choice(blanks)
    if position == "object" and roll > 0.55:
        lexical = rng.choice(_LEXICALS)
        choice = rng.random()
        if choice < 0.3:
            return Literal(lexical, language=rng.choice(["en", "zh", "en-GB", "zh-Hant"]))
        if choice < 0.6:
            dt = rng.choice(_DATATYPES)
            if dt == XSD.integer.value:
                lexical = str(rng.randint(-1000, 1000))
            elif dt == XSD.boolean.value:
                lexical = rng.choice(["true", "false"])
            elif dt == XSD.decimal.value:
                lexical = f"{rng.randint(-99, 99)}.{rng.randint(0, 99)}"
            return Literal(lexical, dt)
        return Literal(lexical)
    ns = rng.choice(_NAMESPACES)
    local = rng.choice(["a", "b", "c", "Thing", "p1", "x-y", "with.dot", "_u", "é", "123", "q%20r"])
    return IRI(ns + local)


def random_graph(rng: random.Random, max_triples: int = 25, with_lists: bool = True) -> Graph:
    """Mixed graph: IRIs, blank nodes, every literal flavour, sometimes an RDF list."""
    blanks = [BNode(f"b{i}") for i in range(rng.randint(0, 5))]
    triples = set()
    for _ in range(rng.randint(0, max_triples)):
        s = random_term(rng, "subject", blanks)
        if isinstance(s, Literal):
            continue
        triples.add(Triple(s, random_term(rng, "predicate", []), random_term(rng, "object", blanks)))
    if with_lists and rng.random() < 0.3:
        items = [random_term(rng, "object", []) for _ in range(rng.randint(1, 4))]
        cells = [BNode(f"list{i}") for i in range(len(items))]
        for i, (cell, item) in enumerate(zip(cells, items)):
            triples.add(Triple(cell, RDF.first, item))
            triples.add(Triple(cell, RDF.rest, cells[i + 1] if i + 1 < len(cells) else RDF.nil))
        triples.add(Triple(IRI("http://example.org/owner"), IRI("http://example.org/items"), cells[0]))
    return Graph(frozenset(triples))


def random_hierarchy(rng: random.Random, max_classes: int = 30) -> Graph:
    """Random subclass graph over <= max_classes classes; cycles allowed.

    Classes get at most two parents so tree expansion stays small. Some
    classes carry rdfs:domain properties, some superclasses stay undeclared.
    """
    n = rng.randint(1, max_classes)
    classes = [IRI(f"http://example.org/C{i}") for i in range(n)]
    triples = set()
    for c in classes:
        if rng.random() < 0.8:
            triples.add(Triple(c, RDF.type, rng.choice([OWL.Class, RDFS.Class])))
    for i, c in enumerate(classes):
        for _ in range(rng.choice([0, 1, 1, 2])):
            if rng.random() < 0.85 and i > 0:
                parent = classes[rng.randrange(0, i)]
            else:
                parent = rng.choice(classes)
            if parent != c or rng.random() < 0.05:
                triples.add(Triple(c, RDFS.subClassOf, parent))
    for j in range(rng.randint(0, n)):
        prop = IRI(f"http://example.org/p{j}")
        triples.add(Triple(prop, RDF.type, rng.choice([OWL.ObjectProperty, OWL.DatatypeProperty])))
        triples.add(Triple(prop, RDFS.domain, rng.choice(classes)))
    return Graph(frozenset(triples))
