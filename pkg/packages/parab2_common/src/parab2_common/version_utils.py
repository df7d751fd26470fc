# packages/parab2_common/src/parab2_common/version_utils.py

# =============================================================================
# Copyright © {2025} The parab2 authors
# SPDX-License-Identifier: AGPL-3.0-or-later
# =============================================================================
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# If you did not receive a copy of the GNU Affero General Public License
# along with this program, see <https://www.gnu.org/licenses/>.
# =============================================================================

"""
Installed-version lookup shared by the parab2 packages.
"""

# ----------------------------------------------
# LIBRARY IMPORTS
# ----------------------------------------------

from importlib.metadata import PackageNotFoundError, version

# ----------------------------------------------
# CONSTANTS AND SHARED VARIABLES
# ----------------------------------------------

UNKNOWN_VERSION = "0+unknown"

# ----------------------------------------------
# FUNCTION DEFINITIONS
# ----------------------------------------------


def get_repo_version(package_name: str = "parab2") -> str:
    """
    Return the installed version of ``package_name``.

    Parameters
    ----------
    package_name : str, optional
        Distribution name, the root ``parab2`` distribution by default.

    Returns
    -------
    str
        Version string, or ``"0+unknown"`` when the distribution is not installed.
    """
    try:
        return version(package_name)
    except PackageNotFoundError:
        return UNKNOWN_VERSION
