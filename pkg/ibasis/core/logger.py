import threading
from datetime import datetime

# ---------------------------------------------------------
# In-memory run log + progress of the current computation.
# Shared by the worker threads of one run; one lock guards both.
# ---------------------------------------------------------

_LOCK = threading.Lock()
_LOGS = []  # list[str]
_ECHO = None  # text stream mirroring every line, or None

_IDLE = {
    "status": "IDLE",
    "percent": 0,
    "current_step": "",
    "details": {},
}
_PROGRESS = {**_IDLE, "details": {}}

MAX_LOG_LINES = 2000


def _ts() -> str:
    return datetime.now().strftime("%H:%M:%S")


def _clamp_percent(value) -> int:
    try:
        pct = int(value)
    except (TypeError, ValueError):
        return 0
    return max(0, min(100, pct))


def log(message: str) -> None:
    """Append a log line with a timestamp."""
    if message is None:
        return
    line = str(message)
    if not line.startswith("["):
        line = f"[{_ts()}] {line}"
    with _LOCK:
        _LOGS.append(line)
        overflow = len(_LOGS) - MAX_LOG_LINES
        if overflow > 0:
            del _LOGS[:overflow]
        if _ECHO is not None:
            _ECHO.write(line + "\n")
            _ECHO.flush()


def set_echo(stream) -> None:
    """Mirror every new log line to `stream` (None turns mirroring off)."""
    global _ECHO
    with _LOCK:
        _ECHO = stream


def clear_logs() -> None:
    with _LOCK:
        _LOGS.clear()


def get_logs() -> list[str]:
    with _LOCK:
        return list(_LOGS)


def reset_progress() -> None:
    with _LOCK:
        _PROGRESS.update(_IDLE)
        _PROGRESS["details"] = {}


def set_progress(*, status=None, percent=None, current_step=None, details=None,
                 stage=None, stages=None) -> None:
    """
    Update the run state. `details` is merged into the counters.
    Without an explicit percent, stage/stages (both given, stages > 0) sets it.
    """
    if percent is None and stage is not None and stages:
        percent = 100 * stage // stages
    with _LOCK:
        if status is not None:
            _PROGRESS["status"] = str(status).upper()
        if current_step is not None:
            _PROGRESS["current_step"] = str(current_step)
        if isinstance(details, dict):
            _PROGRESS["details"].update(details)
        if percent is not None:
            _PROGRESS["percent"] = _clamp_percent(percent)


def add_progress_detail(key: str, amount: int = 1) -> None:
    """Increment a counter such as refinements, discards or splits."""
    if not key:
        return
    with _LOCK:
        counters = _PROGRESS["details"]
        counters[key] = int(counters.get(key, 0) or 0) + int(amount)


def get_progress() -> dict:
    """Snapshot of the run state plus the log so far."""
    with _LOCK:
        return {
            "status": _PROGRESS["status"],
            "percent": _PROGRESS["percent"],
            "current_step": _PROGRESS["current_step"],
            "details": dict(_PROGRESS["details"]),
            "log": list(_LOGS),
        }
