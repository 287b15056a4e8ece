import io
import json

import pytest

from ibasis.core import config
from ibasis.core.errors import UsageError


def test_env_int_reads_environment(monkeypatch):
    monkeypatch.setenv("IBASIS_TEST_LIMIT", " 42 ")
    assert config._env_int("IBASIS_TEST_LIMIT", 7) == 42


def test_env_int_falls_back(monkeypatch, capsys):
    monkeypatch.delenv("IBASIS_TEST_LIMIT", raising=False)
    assert config._env_int("IBASIS_TEST_LIMIT", 7) == 7
    monkeypatch.setenv("IBASIS_TEST_LIMIT", "lots")
    assert config._env_int("IBASIS_TEST_LIMIT", 7) == 7
    assert "ignoring non-integer IBASIS_TEST_LIMIT" in capsys.readouterr().out


def test_schema_file_is_shipped():
    with open(config.OUTPUT_SCHEMA_FILE, encoding="utf-8") as f:
        schema = json.load(f)
    assert schema["properties"]["schema"]["const"] == config.SCHEMA_VERSION


def test_json_round_trip(tmp_path):
    path = tmp_path / "nested" / "doc.json"
    config.save_json_file(str(path), {"basis": ["1", "x*D"]})
    assert config.load_json_file(str(path)) == {"basis": ["1", "x*D"]}


def test_load_from_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"m": 2}'))
    assert config.load_json_file("-") == {"m": 2}


def test_missing_file(tmp_path):
    with pytest.raises(UsageError, match="file not found"):
        config.load_json_file(str(tmp_path / "absent.json"))


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(UsageError, match="invalid JSON"):
        config.load_json_file(str(path))
