# packages/parab2_common/src/parab2_common/__init__.py

from .paths import (
    repo_root,
    data_dir,
    config_dir,
    cache_dir,
    log_dir,
    ensure_dirs,
    resolve_under,
    find_config,
)
from .version_utils import get_repo_version

__version__ = get_repo_version("parab2-common")

__all__ = [
    "repo_root",
    "data_dir",
    "config_dir",
    "cache_dir",
    "log_dir",
    "ensure_dirs",
    "resolve_under",
    "find_config",
    "get_repo_version",
    "__version__",
]
