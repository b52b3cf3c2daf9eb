"""Location of shipped fixture files."""

from __future__ import annotations

import os
from pathlib import Path

FIXTURE_ENV = "QBW_FIXTURES"


def fixtures_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "fixtures"


def fixture_path(name: str) -> Path:
    path = fixtures_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"fixture {name!r} not found in {fixtures_dir()}")
    return path
