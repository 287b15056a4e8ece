import os
import json

from ibasis.core.errors import UsageError

# -----------------------------------
# DIRECTORY ROOTS
# -----------------------------------

BASE_DIR = os.path.dirname(os.path.abspath(__file__))                # ibasis/core
PROJECT_ROOT = os.path.abspath(os.path.join(BASE_DIR, "..", ".."))  # repo root

SCHEMA_DIR = os.path.join(PROJECT_ROOT, "schema")
OUTPUT_SCHEMA_FILE = os.path.join(SCHEMA_DIR, "output.v1.json")
SCHEMA_VERSION = "ibasis.output.v1"


def _env_int(name, default):
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        print(f"Warning: ignoring non-integer {name}={raw!r}")
        return default


# -----------------------------------
# RUNTIME LIMITS
# -----------------------------------

MAX_WRONSKIAN_TERMS = _env_int("IBASIS_MAX_WRONSKIAN_TERMS", 512)
DEFAULT_JOBS = _env_int("IBASIS_JOBS", 1)
DISPLAY_TERMS = _env_int("IBASIS_DISPLAY_TERMS", 6)
MAX_SCALING_DEGREE = _env_int("IBASIS_MAX_SCALING_DEGREE", 10000)

# -----------------------------------
# IOTA POLICY
# -----------------------------------

DEFAULT_JMAX = 16
POLICY_DENOMINATOR_CAP = 64
POLICY_CHECK_DENOMINATOR = 6
POLICY_REP_BOUND = 1

# -----------------------------------
# JSON FILE HELPERS
# -----------------------------------

def load_json_file(path):
    """
    Read a UTF-8 JSON document. "-" reads stdin.
    A missing or malformed file raises UsageError.
    """
    try:
        if path == "-":
            import sys
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}")
    except json.JSONDecodeError as e:
        raise UsageError(f"invalid JSON in {path}: {e}")


def save_json_file(path, data):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
