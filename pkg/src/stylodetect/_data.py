"""Access to wordlists and corpora bundled with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    path = Path(str(resources.files("stylodetect").joinpath("data", name)))
    if not path.exists():
        raise FileNotFoundError(f"bundled data file not found: {name}")
    return path


def read_wordlist(source: str | Path) -> list[str]:
    """Read a plain-text wordlist: one entry per line, '#' comments allowed.

    Entries are lowercased and whitespace-normalized; order preserved,
    duplicates kept (callers dedupe when they need sets).
    """
    path = Path(source)
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        entries.append(" ".join(line.lower().split()))
    return entries
