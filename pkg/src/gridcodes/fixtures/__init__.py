"""Bundled test-system fixtures in the native grid format.

Fixture files are hand-transcribed topologies of the standard transmission
test systems (see ``tools/build_fixtures.py`` for provenance and for the
transcription choices, including branch ordering and transformer identity).
``load`` accepts either a bundled name or a filesystem path.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..errors import ConfigError
from ..graphs import GridGraph
from ..ingest import read_grid


def available() -> tuple[str, ...]:
    """Names of the bundled grid fixtures, sorted."""
    root = resources.files(__package__)
    return tuple(sorted(
        p.name[:-len(".grid")] for p in root.iterdir() if p.name.endswith(".grid")))


def load(name_or_path: str) -> GridGraph:
    """Load a bundled fixture by name, or any grid file by path."""
    root = resources.files(__package__)
    candidate = root / f"{name_or_path}.grid"
    if candidate.is_file():
        return read_grid(candidate.read_text(encoding="utf-8"))
    path = Path(name_or_path)
    if path.is_file():
        return read_grid(path.read_text(encoding="utf-8"))
    raise ConfigError(
        f"{name_or_path!r} is neither a bundled fixture ({', '.join(available()) or 'none'}) "
        "nor an existing grid file")


def fixture_text(name: str) -> str:
    root = resources.files(__package__)
    candidate = root / f"{name}.grid"
    if not candidate.is_file():
        raise ConfigError(f"no bundled fixture named {name!r}")
    return candidate.read_text(encoding="utf-8")
