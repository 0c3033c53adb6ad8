from pathlib import Path

import pytest

from ontohub.config import ServiceConfig, load_config
from ontohub.errors import InvalidArgument


def test_defaults_without_file_or_env():
    assert load_config(environ={}) == ServiceConfig()


def test_file_then_env_override(tmp_path):
    conf = tmp_path / "ontohub.conf"
    conf.write_text("# comment\nstore_root = /data/store\nbase_iri = http://ont.example.org/\npage_size = 50\n")
    config = load_config(conf, environ={"ONTOHUB_PAGE_SIZE": "7", "ONTOHUB_LISTEN_ADDRESS": "0.0.0.0:9000"})
    assert config.store_root == Path("/data/store")
    assert config.base_iri == "http://ont.example.org"
    assert config.page_size == 7
    assert (config.host, config.port) == ("0.0.0.0", 9000)


@pytest.mark.parametrize("text", [
    "colour = blue\n",
    "page_size = many\n",
    "page_size = 0\n",
    "default_timeout = -1\n",
    "listen_address = nohost\n",
    "base_iri = not an iri\n",
    "just a line\n",
])
def test_rejects_bad_files(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    with pytest.raises(InvalidArgument):
        load_config(conf, environ={})


def test_missing_file(tmp_path):
    with pytest.raises(InvalidArgument):
        load_config(tmp_path / "absent.conf", environ={})
