# packages/parab2_common/tests/test_pc.py

"""Directory resolution and version lookup."""

from pathlib import Path

import pytest

from parab2_common import paths
from parab2_common.version_utils import UNKNOWN_VERSION, get_repo_version


class TestRepoRoot:
    def test_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PARAB2_REPO_ROOT", str(tmp_path))
        paths.repo_root.cache_clear()
        assert paths.repo_root() == tmp_path.resolve()

    def test_found_from_the_package(self):
        root = paths.repo_root()
        assert (root / "packages").is_dir()
        assert (root / "pyproject.toml").is_file()

    def test_heuristic(self, tmp_path):
        assert not paths._looks_like_repo_root(tmp_path)
        (tmp_path / "packages").mkdir()
        (tmp_path / ".git").mkdir()
        assert paths._looks_like_repo_root(tmp_path)


class TestDirectories:
    def test_env_variables_win(self, isolated_dirs):
        assert paths.data_dir() == (isolated_dirs / "data").resolve()
        assert paths.log_dir() == (isolated_dirs / "logs").resolve()
        assert paths.cache_dir() == (isolated_dirs / ".cache").resolve()

    def test_defaults_under_the_repo_root(self, tmp_path, monkeypatch):
        monkeypatch.delenv("PARAB2_DATA_DIR")
        monkeypatch.setenv("PARAB2_REPO_ROOT", str(tmp_path))
        paths.repo_root.cache_clear()
        assert paths.data_dir() == (tmp_path / "data").resolve()
        assert paths.config_dir() == (tmp_path / "configs").resolve()

    def test_create_flag(self, isolated_dirs):
        assert not (isolated_dirs / "logs").exists()
        assert paths.log_dir(create=True).is_dir()

    def test_ensure_dirs(self, isolated_dirs):
        paths.ensure_dirs()
        for name in ("data", "logs", ".cache"):
            assert (isolated_dirs / name).is_dir()

    def test_resolve_under(self, tmp_path):
        assert paths.resolve_under(tmp_path, "a/b.json") == (tmp_path / "a" / "b.json").resolve()
        absolute = (tmp_path / "x.json").resolve()
        assert paths.resolve_under(Path("/elsewhere"), absolute) == absolute


class TestFindConfig:
    def test_subdir_first(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PARAB2_CONFIG_DIR", str(tmp_path))
        (tmp_path / "solve").mkdir()
        (tmp_path / "solve" / "c.json").write_text("{}", encoding="utf-8")
        (tmp_path / "c.json").write_text("{}", encoding="utf-8")
        assert paths.find_config("c.json", subdir="solve") == (tmp_path / "solve" / "c.json").resolve()
        assert paths.find_config("c.json") == (tmp_path / "c.json").resolve()

    def test_not_found(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PARAB2_CONFIG_DIR", str(tmp_path))
        with pytest.raises(FileNotFoundError, match="Tried"):
            paths.find_config("absent_config_for_tests.json", subdir="check")


class TestVersion:
    def test_unknown_distribution(self):
        assert get_repo_version("parab2-no-such-distribution") == UNKNOWN_VERSION

    def test_installed_distribution(self, mocker):
        mocker.patch("parab2_common.version_utils.version", return_value="1.2.3")
        assert get_repo_version() == "1.2.3"
