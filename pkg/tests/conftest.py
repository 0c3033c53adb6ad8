import pytest

from corpus import BASE, cbdb_graphs, load_corpus, seed_store
from ontohub.registry import Registry
from ontohub.store import QuadStore
from ontohub.validator import MockSparqlEndpoint


@pytest.fixture
def store(tmp_path):
    s = QuadStore(tmp_path / "store")
    yield s
    s.close()


@pytest.fixture
def registry(tmp_path, store):
    return Registry(store, tmp_path / "archive", BASE)


@pytest.fixture
def loaded(registry):
    load_corpus(registry)
    return registry


@pytest.fixture(scope="session")
def cbdb_store(tmp_path_factory):
    s = QuadStore(tmp_path_factory.mktemp("cbdb") / "store")
    seed_store(s, cbdb_graphs())
    yield s
    s.close()


@pytest.fixture(scope="session")
def cbdb_endpoint(cbdb_store):
    with MockSparqlEndpoint(cbdb_store) as mock:
        yield mock


_CRITERIA: dict[int, str] = {}


class _Criterion:
    def __init__(self, number: int, text: str) -> None:
        self.number, self.text = number, text

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        verdict = "PASS" if exc_type is None else "FAIL"
        detail = "" if exc is None else f" ({exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        _CRITERIA[self.number] = f"{verdict} criterion {self.number}: {self.text}{detail}"
        print(_CRITERIA[self.number])
        return False


@pytest.fixture
def criterion():
    """``with criterion(n, text):`` records a PASS/FAIL line for acceptance criterion n."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
