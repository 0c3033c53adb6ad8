import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_graph
from ontohub.errors import InvalidIRI
from ontohub.rdf import IRI, RDF, XSD, BNode, Graph, Literal, Quad, Triple, make_iri
from ontohub.rdf.model import RDF_LANGSTRING, XSD_STRING

EX = "http://example.org/"


def test_make_iri_accepts_absolute():
    term = make_iri("http://ont.library.sh.cn/graph/schema")
    assert term == IRI("http://ont.library.sh.cn/graph/schema")
    assert term.kind == "iri"


def test_make_iri_trims_whitespace_only():
    assert make_iri("  urn:x:Ab  ").value == "urn:x:Ab"


@pytest.mark.parametrize("text", ["", "   ", "relative/path", "#frag", "http://a b", "http://x/<y>", 'urn:"q"'])
def test_make_iri_rejects(text):
    with pytest.raises(InvalidIRI):
        make_iri(text)


def test_literal_defaults_to_string():
    lit = Literal("x")
    assert lit.datatype == XSD_STRING and lit.language is None


def test_language_literal_uses_langstring():
    lit = Literal("chat", language="fr")
    assert lit.datatype == RDF_LANGSTRING


def test_literal_cannot_mix_language_and_datatype():
    with pytest.raises(ValueError):
        Literal("1", XSD.integer.value, "en")
    with pytest.raises(ValueError):
        Literal("x", RDF_LANGSTRING)


def test_literals_compare_lexically():
    assert Literal("1", XSD.integer.value) != Literal("01", XSD.integer.value)
    assert Literal("1", XSD.integer.value) != Literal("1")
    assert Literal("a", language="en") != Literal("a", language="de")


def test_triple_positions_are_checked():
    s, p = IRI(EX + "s"), IRI(EX + "p")
    with pytest.raises(TypeError):
        Triple(Literal("x"), p, s)
    with pytest.raises(TypeError):
        Triple(s, BNode("b"), s)
    assert Triple(BNode("b"), p, Literal("o")).has_blank()


def test_quad_graph_must_be_iri():
    t = Triple(IRI(EX + "s"), IRI(EX + "p"), IRI(EX + "o"))
    assert Quad(t).graph is None
    with pytest.raises(TypeError):
        Quad(t, BNode("g"))


def test_graph_set_semantics_and_prefixes_ignored_for_equality():
    t = Triple(IRI(EX + "s"), IRI(EX + "p"), IRI(EX + "o"))
    g = Graph([t, t], {"ex": EX})
    assert len(g) == 1
    assert g == Graph([t])
    assert g.prefixes["ex"] == EX


def test_graph_match_and_objects():
    s, p, q = IRI(EX + "s"), IRI(EX + "p"), IRI(EX + "q")
    g = Graph([Triple(s, p, Literal("1")), Triple(s, q, Literal("2")), Triple(s, RDF.type, IRI(EX + "C"))])
    assert len(g.match(s, None, None)) == 3
    assert g.objects(s, p) == [Literal("1")]
    assert g.subjects(RDF.type, IRI(EX + "C")) == [s]
    assert g.match(None, IRI(EX + "missing"), None) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_union_and_difference_follow_set_algebra(seed_a, seed_b):
    a = random_graph(random.Random(seed_a), 12, with_lists=False)
    b = random_graph(random.Random(seed_b), 12, with_lists=False)
    assert (a | b).triples == set(a.triples) | set(b.triples)
    assert (a - b).triples == set(a.triples) - set(b.triples)
    assert ((a - b) | b) == (a | b)
