import json

import pytest
from django.core.management.base import CommandError

from satoCertify.utils.reports import (
    check_run_config,
    flatten_record,
    format_value,
    render_blocks,
    render_json,
    write_report,
)


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(None) == ""
    assert format_value("two\nlines") == "two lines"


def test_flatten_record_uses_dotted_keys():
    record = {"id": "t2_n3", "detail": {"kappa": "1e-60", "node": False}, "passed": True}
    assert flatten_record(record) == [
        ("id", "t2_n3"),
        ("detail.kappa", "1e-60"),
        ("detail.node", "false"),
        ("passed", "true"),
    ]


def test_render_blocks():
    text = render_blocks({"command": "certify", "exit_code": 0}, [{"id": "a"}, {"id": "b", "passed": False}])
    assert text == "command=certify\nexit_code=0\n\nid=a\n\nid=b\npassed=false\n"


def test_render_json():
    data = json.loads(render_json({"command": "tables"}, [{"id": "jvals:j(i)", "passed": True}]))
    assert data == {"command": "tables", "records": [{"id": "jvals:j(i)", "passed": True}]}


def test_write_report_creates_parents(tmp_path):
    destination = write_report("x=1\n", tmp_path / "nested" / "report.txt")
    assert destination.read_text(encoding="utf-8") == "x=1\n"


@pytest.mark.parametrize("kwargs", [{"digits": 10}, {"order": 20}, {"jobs": 0}])
def test_check_run_config_rejects(kwargs):
    with pytest.raises(CommandError) as exc:
        check_run_config(**kwargs)
    assert exc.value.returncode == 2


def test_check_run_config_accepts_defaults():
    check_run_config(digits=50, order=100, jobs=1)
