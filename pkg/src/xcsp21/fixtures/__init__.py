"""Reference instances shipped with the package.

The corrected files carry an XML comment describing each correction.
"""

from __future__ import annotations

from importlib import resources

NAMES = (
    "queens-extension",
    "queens-intension",
    "test-extension",
    "test-intension",
    "magic-square",
    "qcsp-example",
    "qcsp-plus-example",
    "wcsp-example",
)


def path(name: str):
    """Filesystem path of the named fixture (with or without ``.xml``)."""
    if not name.endswith(".xml"):
        name += ".xml"
    return resources.files(__name__) / name


def read(name: str) -> bytes:
    return path(name).read_bytes()
