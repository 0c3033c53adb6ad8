import random
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_graph
from ontohub.errors import LockHeld, StoreError
from ontohub.rdf import IRI, Graph, Literal, Triple
from ontohub.store import LOG_NAME, MAGIC, QuadPattern, QuadStore

EX = "http://example.org/"
G1, G2 = IRI(EX + "g1"), IRI(EX + "g2")
S, P = IRI(EX + "s"), IRI(EX + "p")


def sample(n: int, tag: str = "") -> Graph:
    return Graph([Triple(S, P, Literal(f"{tag}{i}")) for i in range(n)], {"ex": EX})


def test_put_get_list(store):
    store.put_graph(G1, sample(3))
    assert store.list_graphs() == {G1}
    assert store.get_graph(G1) == sample(3)
    assert store.get_graph(G1).prefixes == {"ex": EX}
    assert store.get_graph(G2) == Graph()


def test_put_replaces_whole_graph(store):
    store.put_graph(G1, sample(3))
    store.put_graph(G1, sample(1, "x"))
    assert store.get_graph(G1) == sample(1, "x")


def test_empty_put_and_delete_remove_the_graph(store):
    store.put_graph(G1, sample(2))
    store.put_graph(G1, Graph())
    assert not store.has_graph(G1)
    store.put_graph(G2, sample(2))
    store.delete_graph(G2)
    store.delete_graph(G2)
    assert store.list_graphs() == set()


def test_match_and_count(store):
    store.put_graph(G1, sample(3))
    store.put_graph(G2, sample(2))
    assert store.count() == 5 == len(store)
    assert store.count(graph=G2) == 2
    assert len(store.match(QuadPattern(object=Literal("0")))) == 2
    quads = store.match(graph=G1, object=Literal("2"))
    assert [q.graph for q in quads] == [G1]
    assert store.match(predicate=IRI(EX + "unknown")) == []


def test_reopen_restores_state(tmp_path):
    root = tmp_path / "s"
    with QuadStore(root) as s:
        s.put_graph(G1, sample(3))
        s.put_graph(G2, sample(2))
        s.delete_graph(G1)
    with QuadStore(root) as s:
        assert s.list_graphs() == {G2}
        assert s.get_graph(G2) == sample(2)


def test_second_writer_is_refused(tmp_path):
    root = tmp_path / "s"
    with QuadStore(root):
        with pytest.raises(LockHeld):
            QuadStore(root)
        QuadStore(root, readonly=True).close()
    QuadStore(root).close()


def test_readonly_store_refuses_writes(tmp_path):
    root = tmp_path / "s"
    QuadStore(root).close()
    ro = QuadStore(root, readonly=True)
    with pytest.raises(StoreError):
        ro.put_graph(G1, sample(1))


def test_torn_tail_is_dropped(tmp_path):
    root = tmp_path / "s"
    with QuadStore(root) as s:
        s.put_graph(G1, sample(2))
    with open(root / LOG_NAME, "ab") as fh:
        fh.write(b'deadbeef {"op":"put","g":')
    with QuadStore(root) as s:
        assert s.get_graph(G1) == sample(2)
        s.put_graph(G2, sample(1))
    with QuadStore(root) as s:
        assert s.list_graphs() == {G1, G2}


def test_corrupt_record_is_reported(tmp_path):
    root = tmp_path / "s"
    with QuadStore(root) as s:
        s.put_graph(G1, sample(2))
    lines = (root / LOG_NAME).read_bytes().split(b"\n")
    lines[1] = lines[1].replace(b"ex", b"xx", 1)
    (root / LOG_NAME).write_bytes(b"\n".join(lines))
    with pytest.raises(StoreError):
        QuadStore(root)


def test_bad_header(tmp_path):
    root = tmp_path / "s"
    root.mkdir()
    (root / LOG_NAME).write_text("something else\n")
    with pytest.raises(StoreError):
        QuadStore(root)


def test_compaction_keeps_content_and_shrinks_log(tmp_path):
    root = tmp_path / "s"
    with QuadStore(root) as s:
        for i in range(60):
            s.put_graph(G1, sample(5, f"v{i}-"))
        s.put_graph(G2, sample(1))
        lines = (root / LOG_NAME).read_text(encoding="utf-8").splitlines()
        assert lines[0] == MAGIC
        assert len(lines) < 40
        s.compact()
        s.put_graph(IRI(EX + "g3"), sample(2, "v3-"))
    with QuadStore(root) as s:
        assert s.get_graph(G1) == sample(5, "v59-")
        assert s.get_graph(IRI(EX + "g3")) == sample(2, "v3-")


def test_failed_append_does_not_leak_term_ids(store, monkeypatch):
    store.put_graph(G1, sample(1))
    real = store._append

    def broken(record):
        raise StoreError("disk full")

    monkeypatch.setattr(store, "_append", broken)
    with pytest.raises(StoreError):
        store.put_graph(G2, sample(3, "new"))
    monkeypatch.setattr(store, "_append", real)
    store.put_graph(G2, sample(3, "new"))
    root = store.root
    store.close()
    with QuadStore(root) as again:
        assert again.get_graph(G2) == sample(3, "new")


def test_readers_see_whole_graphs_during_writes(store):
    store.put_graph(G1, sample(10, "a"))
    seen = []
    stop = threading.Event()

    def reader():
        while not stop.is_set():
            seen.append(store.get_graph(G1))

    t = threading.Thread(target=reader)
    t.start()
    for i in range(30):
        store.put_graph(G1, sample(10, "ab"[i % 2]))
    stop.set()
    t.join()
    assert all(g in (sample(10, "a"), sample(10, "b")) for g in seen)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 10_000), st.booleans()), max_size=12))
def test_store_matches_dictionary_model(tmp_path_factory, ops):
    root = tmp_path_factory.mktemp("model")
    model: dict[IRI, Graph] = {}
    with QuadStore(root) as s:
        for gi, seed, delete in ops:
            name = IRI(f"{EX}graph{gi}")
            if delete:
                s.delete_graph(name)
                model.pop(name, None)
            else:
                g = random_graph(random.Random(seed), 8)
                s.put_graph(name, g)
                if len(g):
                    model[name] = g
                else:
                    model.pop(name, None)
        assert s.list_graphs() == set(model)
    with QuadStore(root) as s:
        for name, g in model.items():
            assert s.get_graph(name) == g
        assert s.count() == sum(len(g) for g in model.values())
