# packages/conftest.py

# =============================================================================
# Copyright © {2025} The parab2 authors
# SPDX-License-Identifier: AGPL-3.0-or-later
# =============================================================================

"""Shared fixtures for the parab2 package tests."""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Iterator

import numpy as np
import pytest

# ----------------------------------------------
# FUNCTION IMPORTS
# ----------------------------------------------

from parab2_common.paths import repo_root
from second_order_regularity.analysis.pencil import PencilSymbol
from second_order_regularity.operators.core import Operator

# ----------------------------------------------
# FIXTURES
# ----------------------------------------------


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Iterator[Path]:
    """Point every PARAB2_* directory at the test's tmp folder and drop the thread cap."""
    root = tmp_path / "parab2_home"
    monkeypatch.setenv("PARAB2_DATA_DIR", str(root / "data"))
    monkeypatch.setenv("PARAB2_LOG_DIR", str(root / "logs"))
    monkeypatch.setenv("PARAB2_CACHE_DIR", str(root / ".cache"))
    monkeypatch.delenv("PARAB2_THREADS", raising=False)
    monkeypatch.delenv("PARAB2_CONFIG_DIR", raising=False)
    monkeypatch.delenv("PARAB2_REPO_ROOT", raising=False)
    repo_root.cache_clear()
    yield root
    repo_root.cache_clear()


@pytest.fixture
def scalar_pencil() -> PencilSymbol:
    """``λ² + 2λ + 1``: double pole at −1."""
    return PencilSymbol(Operator(np.array([[1.0]]), "a"), Operator(np.array([[2.0]]), "b"))


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[dict, str], Path]:
    """Write a config mapping as JSON under tmp_path and return its path."""

    def _write(data: dict, name: str = "config.json") -> Path:
        p = tmp_path / "cfg" / name
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(data), encoding="utf-8")
        return p

    return _write


@pytest.fixture(scope="session")
def bundled_config_dir() -> Path:
    return Path(__file__).resolve().parents[1] / "configs"
