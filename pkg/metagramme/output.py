# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Saves and reloads compiled grammars. A compiled grammar file is a single JSON
document holding the templates of every family together with the linked
lexicon, so that anchoring and parsing need no other input. Also writes the
JSON-lines stream of the command line and the golden files.

Classes:
- CompiledGrammar: Templates per family, lexicon, start category and caps.

Functions:
- save_compiled_grammar / load_compiled_grammar: File round trip of a CompiledGrammar.
- write_json_line: Writes one JSON record on stdout.
- write_golden_file: Writes a golden text file, one entry per line.
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
import os
import sys
from dataclasses import dataclass, field
from typing import Dict

from metagramme.anchoring import Lexicon
from metagramme.dsl import LemmaEntryDecl, MorphEntryDecl
from metagramme.featstruct import FeatureStructure
from metagramme.fcns_read import ManifestError
from metagramme.treesolver import TreeTemplate

FORMAT = 'metagramme-grammar/1'


@dataclass
class CompiledGrammar:
    compiled: Dict[str, list]
    lexicon: Lexicon
    start_cat: str = 's'
    caps: Dict[str, int] = field(default_factory=dict)

    def template_count(self):
        return sum(len(templates) for templates in self.compiled.values())


###############################################################################
# LEXICON RECORDS #############################################################
###############################################################################

def lemma_to_json(lemma):
    return {'name': lemma.name, 'entry': lemma.entry, 'cat': lemma.cat, 'fam': lemma.fam,
            'id': lemma.ident, 'filters': lemma.filters.to_json(),
            'coanchors': [list(coanchor) for coanchor in lemma.coanchors],
            'equations': [[node, fs.to_json()] for node, fs in lemma.equations]}


def lemma_from_json(data):
    return LemmaEntryDecl(data['name'], data['entry'], data['cat'], data['fam'],
                          FeatureStructure.from_json(data.get('filters')),
                          tuple(tuple(c) for c in data.get('coanchors', ())),
                          tuple((node, FeatureStructure.from_json(fs))
                                for node, fs in data.get('equations', ())),
                          data.get('id'))


def morph_to_json(morph):
    return {'name': morph.name, 'morph': morph.morph, 'lemma': morph.lemma, 'cat': morph.cat,
            'feats': morph.feats.to_json()}


def morph_from_json(data):
    return MorphEntryDecl(data['name'], data['morph'], data['lemma'], data['cat'],
                          FeatureStructure.from_json(data.get('feats')))


###############################################################################
# COMPILED GRAMMAR ############################################################
###############################################################################

def compiled_grammar_to_json(grammar):
    morphs = [morph for entries in grammar.lexicon.morphs.values() for morph in entries]
    return {'format': FORMAT,
            'start_cat': grammar.start_cat,
            'caps': dict(sorted(grammar.caps.items())),
            'families': {family: [template.to_json() for template in templates]
                         for family, templates in sorted(grammar.compiled.items())},
            'lexicon': {'lemmas': [lemma_to_json(lemma) for lemma in grammar.lexicon.lemmas],
                        'morphs': [morph_to_json(morph) for morph in morphs]}}


def save_compiled_grammar(grammar, path):
    """Writes the compiled grammar; re-running on the same project gives an identical file.

    :param grammar: Compiled grammar
    :type grammar: CompiledGrammar
    :param path: Output file
    :type path: str
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        json.dump(compiled_grammar_to_json(grammar), file, ensure_ascii=False, indent=1,
                  sort_keys=True)
        file.write('\n')


def load_compiled_grammar(path):
    """Reads a file written by save_compiled_grammar.

    :raises ManifestError: if the file is missing or is not a compiled grammar
    """
    if not os.path.isfile(path):
        raise ManifestError(path, "compiled grammar not found")
    with open(path, encoding='utf-8') as file:
        try:
            data = json.load(file)
        except json.JSONDecodeError as error:
            raise ManifestError(path, f"invalid JSON ({error.msg})") from None
    if not isinstance(data, dict) or data.get('format') != FORMAT:
        raise ManifestError(path, f"not a {FORMAT} file")
    compiled = {family: [TreeTemplate.from_json(t) for t in templates]
                for family, templates in data['families'].items()}
    lexicon = Lexicon.from_decls([lemma_from_json(l) for l in data['lexicon']['lemmas']],
                                 [morph_from_json(m) for m in data['lexicon']['morphs']])
    return CompiledGrammar(compiled, lexicon, data.get('start_cat', 's'), data.get('caps', {}))


###############################################################################
# STREAMS AND GOLDEN FILES ####################################################
###############################################################################

def write_json_line(record, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + '\n')
    stream.flush()


def write_golden_file(path, lines):
    """Writes one entry per line, UTF-8, trailing newline."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        for line in lines:
            file.write(line + '\n')
