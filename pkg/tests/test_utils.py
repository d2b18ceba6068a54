import json
from datetime import datetime, timedelta

import pytest

from ontoprobe.utils import append_line, drop_torn_tail, format_elapsed, iter_json_lines, write_json


def test_write_json_is_stable(tmp_path):
    write_json(tmp_path / "a" / "x.json", {"b": 1, "a": [1, 2]})
    write_json(tmp_path / "y.json", {"a": [1, 2], "b": 1})
    assert (tmp_path / "a" / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()
    assert (tmp_path / "y.json").read_text(encoding="utf-8").endswith("}\n")


def test_json_lines(tmp_path):
    path = tmp_path / "runs.jsonl"
    with open(path, "w", encoding="utf-8") as f:
        append_line(f, json.dumps({"n": 1}))
        append_line(f, json.dumps({"n": 2}) + "\n")
        f.write('{"n": ')
    assert [r["n"] for r in iter_json_lines(path)] == [1, 2]

    path.write_text('{"n": \n{"n": 2}\n', encoding="utf-8")
    with pytest.raises(json.JSONDecodeError):
        list(iter_json_lines(path))


def test_format_elapsed():
    now = datetime.now()
    assert format_elapsed(now - timedelta(seconds=75)) == "1m 15s"
    assert format_elapsed(now - timedelta(hours=2, minutes=3, seconds=4)) == "2h 3m 4s"


def test_drop_torn_tail(tmp_path):
    path = tmp_path / "runs.jsonl"
    assert drop_torn_tail(path) == 0

    path.write_text('{"n": 1}\n{"n": ', encoding="utf-8")
    assert drop_torn_tail(path) == 6
    assert path.read_text(encoding="utf-8") == '{"n": 1}\n'
    assert drop_torn_tail(path) == 0

    path.write_text('{"n": 1}\n{"n": 2}', encoding="utf-8")
    assert drop_torn_tail(path) == 0
    with open(path, "a", encoding="utf-8") as f:
        append_line(f, json.dumps({"n": 3}))
    assert [r["n"] for r in iter_json_lines(path)] == [1, 2, 3]
