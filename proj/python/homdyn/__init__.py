"""Random walks on homogeneous bundles over SL2 boundaries."""

import json

from . import _homdyn
from ._homdyn import HomdynError, __version__, classify_example, examples, iwasawa

__all__ = [
    "HomdynError",
    "__version__",
    "classify_example",
    "examples",
    "iwasawa",
    "resolve",
    "run",
    "versions",
]


def run(config):
    """Run the experiment described by ``config`` (a dict) and return a dict.

    The result holds ``pass``, ``exit_code``, the resolved ``config``, the
    ``report`` and the ``series`` table with its ``series_columns``.
    """
    return json.loads(_homdyn.run_json(json.dumps(config)))


def resolve(config):
    """Return ``config`` with every default filled in."""
    return json.loads(_homdyn.resolve_json(json.dumps(config)))


def versions():
    return json.loads(_homdyn.versions_json())

