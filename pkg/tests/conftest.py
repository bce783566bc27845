from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from synth import write_fixture_tree


@pytest.fixture(scope="session")
def fixture_tree_master(tmp_path_factory) -> dict:
    """Full-size fixture tree, generated once per session (read-only)."""
    base = tmp_path_factory.mktemp("fixture") / "tree"
    return write_fixture_tree(base)


@pytest.fixture(scope="session")
def small_tree_master(tmp_path_factory) -> dict:
    """Scaled-down tree for CLI tests that need several pipeline runs."""
    base = tmp_path_factory.mktemp("fixture_small") / "tree"
    return write_fixture_tree(base, n_people=80, n_docs=160, sample_count=2, sample_size=40)


def clone_tree(master: dict, dest: Path) -> dict:
    shutil.copytree(master["base"], dest)
    clone = dict(master)
    clone["base"] = dest
    clone["config"] = dest / "config.ini"
    clone["out"] = dest / "out"
    return clone


@pytest.fixture
def small_tree(small_tree_master, tmp_path) -> dict:
    return clone_tree(small_tree_master, tmp_path / "tree")
