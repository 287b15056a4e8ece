import io
import re

from ibasis.core import logger
from ibasis.core.logger import (
    add_progress_detail,
    clear_logs,
    get_logs,
    get_progress,
    log,
    set_echo,
    set_progress,
)


def test_lines_get_a_timestamp():
    log("STAGE 1")
    log("[already stamped]")
    assert re.fullmatch(r"\[\d\d:\d\d:\d\d\] STAGE 1", get_logs()[0])
    assert get_logs()[1] == "[already stamped]"


def test_none_is_ignored():
    log(None)
    assert get_logs() == []


def test_log_is_capped(monkeypatch):
    monkeypatch.setattr(logger, "MAX_LOG_LINES", 3)
    for i in range(5):
        log(f"[{i}]")
    assert get_logs() == ["[2]", "[3]", "[4]"]
    clear_logs()
    assert get_logs() == []


def test_echo_mirrors_lines():
    stream = io.StringIO()
    set_echo(stream)
    log("[hello]")
    set_echo(None)
    log("[quiet]")
    assert stream.getvalue() == "[hello]\n"


def test_progress_updates():
    set_progress(status="running", percent=140, current_step="stage 2", details={"points": 2})
    set_progress(percent="oops")
    add_progress_detail("refinements")
    add_progress_detail("refinements", 2)
    add_progress_detail("")
    progress = get_progress()
    assert progress["status"] == "RUNNING"
    assert progress["percent"] == 0
    assert progress["current_step"] == "stage 2"
    assert progress["details"] == {"points": 2, "refinements": 3}


def test_percent_is_clamped():
    set_progress(percent=-5)
    assert get_progress()["percent"] == 0
    set_progress(percent=55.9)
    assert get_progress()["percent"] == 55
    set_progress(percent=400)
    assert get_progress()["percent"] == 100


def test_stage_counters_set_percent():
    set_progress(stage=1, stages=3)
    assert get_progress()["percent"] == 33
    set_progress(stage=2, stages=3, percent=90)
    assert get_progress()["percent"] == 90
    set_progress(stage=1, stages=0)
    assert get_progress()["percent"] == 90


def test_reset_returns_to_idle():
    set_progress(status="done", percent=100, details={"splits": 1})
    logger.reset_progress()
    progress = get_progress()
    assert progress["status"] == "IDLE"
    assert progress["percent"] == 0
    assert progress["details"] == {}
