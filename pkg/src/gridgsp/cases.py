"""Loader for bundled IEEE test cases and external case files.

Bundled cases: case14, case30, case57, case118 (MATPOWER format, solved
voltages embedded).  `load_case` accepts either a bundled name or a path to
a .m / .json case file.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path

from .exceptions import MalformedCase
from .netcase import parse_case

BUNDLED = ("case14", "case30", "case57", "case118")


def case_text(name):
    """Raw text of a bundled case."""
    if name not in BUNDLED:
        raise MalformedCase(f"unknown bundled case {name!r}; have {BUNDLED}")
    ref = importlib.resources.files("gridgsp") / "data" / f"{name}.m"
    return ref.read_text()


def load_case(name_or_path):
    """Parse a bundled case by name, or any case file by path."""
    name = str(name_or_path)
    if name in BUNDLED:
        return parse_case(case_text(name), name=name)
    path = Path(name)
    if not path.exists():
        raise MalformedCase(f"case file not found: {name}")
    return parse_case(path.read_text(), name=path.stem)
