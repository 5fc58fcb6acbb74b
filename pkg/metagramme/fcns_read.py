# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

This script reads project manifests and the files they list, and links the
result into one project: grammar classes, lexicon and family table.

Classes:
- ManifestError: Raised for a malformed manifest or a missing file.
- Manifest: Paths, start category, caps and explicit families of a project.
- Project: The parsed and linked project.

Functions:
- read_manifest: Reads and validates a manifest (JSON).
- read_text: Reads a UTF-8 source file.
- load_project: Parses every listed file and links the project.
- count_classes / count_mwe_lemmas: Project size figures used by the stats command.
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

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.dsl import DuplicateClass, check_declarations, parse_lexicon, parse_metagrammar
from metagramme.anchoring import Lexicon
from metagramme.resolver import build_family_table

logger = logging.getLogger(__name__)

GRAMMAR_SUFFIXES = ('.mg',)
LEXICON_SUFFIXES = ('.lex', '.morph')


class ManifestError(DiagnosticError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(f"Manifest {path}: {reason}.")


@dataclass(frozen=True)
class Manifest:
    path: str
    grammar: Tuple[str, ...]
    lexicon: Tuple[str, ...]
    start_cat: str = 's'
    caps: Dict[str, int] = field(default_factory=dict)
    families: Tuple[str, ...] = ()


@dataclass
class Project:
    manifest: Manifest
    grammar: list
    lemmas: list
    morphs: list
    lexicon: Lexicon
    families: Dict[str, str]
    sources: List[str] = field(default_factory=list)


def read_text(path):
    with open(path, encoding='utf-8') as file:
        return file.read()


def _file_list(path, data, key, suffixes):
    entries = data.get(key, [])
    if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
        raise ManifestError(path, f"'{key}' must be a list of file names")
    directory = os.path.dirname(os.path.abspath(path))
    files = []
    for entry in entries:
        full = os.path.normpath(os.path.join(directory, entry))
        if not entry.endswith(suffixes):
            raise ManifestError(path, f"'{entry}' is not a {'/'.join(suffixes)} file")
        if not os.path.isfile(full):
            raise ManifestError(path, f"referenced file '{entry}' does not exist")
        files.append(full)
    return tuple(files)


def read_manifest(path):
    """Reads a project manifest.

    :param path: Path of the manifest (JSON)
    :type path: str
    :return: The manifest, file paths made absolute relative to the manifest directory
    :rtype: Manifest
    """
    if not os.path.isfile(path):
        raise ManifestError(path, "file not found")
    try:
        data = json.loads(read_text(path))
    except json.JSONDecodeError as error:
        raise ManifestError(path, f"invalid JSON ({error.msg}, line {error.lineno})") from None
    if not isinstance(data, dict):
        raise ManifestError(path, "top level must be an object")
    unknown = set(data) - {'grammar', 'lexicon', 'start_cat', 'caps', 'families'}
    if unknown:
        raise ManifestError(path, f"unknown key(s) {', '.join(sorted(unknown))}")
    if not data.get('grammar'):
        raise ManifestError(path, "no grammar file listed")
    caps = data.get('caps', {})
    if not isinstance(caps, dict):
        raise ManifestError(path, "'caps' must be an object")
    families = data.get('families', [])
    if not isinstance(families, list):
        raise ManifestError(path, "'families' must be a list")
    return Manifest(os.path.abspath(path),
                    _file_list(path, data, 'grammar', GRAMMAR_SUFFIXES),
                    _file_list(path, data, 'lexicon', LEXICON_SUFFIXES),
                    str(data.get('start_cat', 's')), dict(caps), tuple(families))


def load_project(manifest):
    """Parses the grammar and lexicon files of a manifest, in listed order, and links them.

    :param manifest: Manifest or path of a manifest
    :type manifest: Manifest or str
    :return: The linked project
    :rtype: Project
    """
    if isinstance(manifest, str):
        manifest = read_manifest(manifest)

    # GRAMMAR #################################################################
    grammar, seen = [], set()
    for path in manifest.grammar:
        decls = parse_metagrammar(read_text(path), path)
        for decl in decls:
            if decl.name in seen:
                raise DuplicateClass(decl.name)
            seen.add(decl.name)
        grammar += decls
        logger.info("%s: %d class(es)", path, len(decls))
    # Imports may cross file boundaries, so the strict check runs on the whole grammar
    check_declarations(grammar, strict=True)

    # LEXICON #################################################################
    lemmas, morphs = [], []
    for path in manifest.lexicon:
        file_lemmas, file_morphs = parse_lexicon(read_text(path), path)
        lemmas += file_lemmas
        morphs += file_morphs
    lexicon = Lexicon.from_decls(lemmas, morphs)

    families = build_family_table(grammar, lemmas, manifest.families)
    return Project(manifest, grammar, lemmas, morphs, lexicon, families,
                   list(manifest.grammar + manifest.lexicon))


def count_classes(project):
    return len(project.grammar)


def count_mwe_lemmas(project):
    return sum(1 for lemma in project.lemmas if lemma.is_mwe)
