# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

This script contains helper functions for the options file.

Functions:
- parse_caps: Reads a METAGRAMME_CAPS value ("descriptions=100,variables=8").
- effective_caps: Merges the default caps, the manifest caps and the environment override.
- check_manifest_path: Verifies that a manifest file exists, or returns the default one.
"""
"""
Copyright (C) 2024  4wardEnergy Research GmbH

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

import os

from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.fcns_read import ManifestError

CAPS_VARIABLE = 'METAGRAMME_CAPS'
CAP_KEYS = ('descriptions', 'variables', 'derivations')


class CapsError(DiagnosticError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"Malformed caps value '{value}'; expected e.g. "
                         f"'descriptions=10000,variables=12,derivations=512'.")


def parse_caps(value):
    """Reads a comma separated list of key=value pairs.

    :param value: Raw value, usually the content of METAGRAMME_CAPS
    :type value: str
    :return: Positive integer caps by key
    :rtype: dict
    """
    caps = {}
    for item in value.split(','):
        item = item.strip()
        if not item:
            continue
        key, sep, number = item.partition('=')
        key = key.strip()
        if not sep or key not in CAP_KEYS:
            raise CapsError(value)
        try:
            caps[key] = int(number)
        except ValueError:
            raise CapsError(value) from None
        if caps[key] <= 0:
            raise CapsError(value)
    return caps


def effective_caps(var_caps, manifest_caps=None, environ=None):
    """Default caps, overridden by the manifest, overridden by the environment.

    :param var_caps: Configuration class holding the defaults
    :type var_caps: var_caps obj.
    :param manifest_caps: 'caps' object of the project manifest
    :type manifest_caps: dict
    :param environ: Environment, os.environ if omitted
    :type environ: dict
    :return: Caps by key ('descriptions', 'variables', 'derivations')
    :rtype: dict
    """
    environ = os.environ if environ is None else environ
    caps = {'descriptions': var_caps.description_cap,
            'variables': var_caps.variable_cap,
            'derivations': var_caps.derivation_cap}
    for key, number in (manifest_caps or {}).items():
        if key not in CAP_KEYS or not isinstance(number, int) or number <= 0:
            raise CapsError(f"{key}={number}")
        caps[key] = number
    if environ.get(CAPS_VARIABLE):
        caps.update(parse_caps(environ[CAPS_VARIABLE]))
    return caps


def check_manifest_path(path, default):
    """Returns path, or default if path is empty; the file must exist."""
    path = path or default
    if not os.path.isfile(path):
        raise ManifestError(path, "file not found")
    return path
