"""Python access to the flexsim simulation core."""

import json
from pathlib import Path

from ._flexsim import ConfigError, log_columns, preset_names, preset_text, validate
from ._flexsim import run as _run

__all__ = ["ConfigError", "load_text", "log_columns", "preset_names", "preset_text", "run", "run_preset", "validate"]


def run(yaml_text, out_dir=None, t_f=None, seed=None, keep_trace=False):
    """Run one scenario. Returns (summary dict, trace dict)."""
    summary, trace = _run(yaml_text, str(out_dir) if out_dir else "", t_f, seed, keep_trace)
    return json.loads(summary), trace


def run_preset(name, **kwargs):
    return run(preset_text(name), **kwargs)


def load_text(path):
    return Path(path).read_text()
