"""Agreement, consensus and survey metrics for elicitation studies."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, report as _report


def report(path, **kwargs):
    """Run every applicable analysis on a study bundle and return the parsed report."""
    return json.loads(_report(str(path), **kwargs))
