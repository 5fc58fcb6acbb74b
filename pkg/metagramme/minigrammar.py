# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Access to the bundled mini grammar: a small French grammar of transitive and
inherently reflexive verbs, made MWE-aware, with its lexicon, a regression
corpus of idiomatic and literal sentences, and golden files.

Functions:
- load_assets: Parses and links the bundled project and reads the corpus.
- read_corpus: Reads a corpus file (tab separated) into a DataFrame.
- read_skipped: Reads the sentences left out of the corpus and their reasons.
- meets_expectation: Checks a parse report against an expectation tag.
- compile_project: Compiles every family of a linked project.
- template_record / anchored_record / report_record: Records of the JSON golden files.
- write_golden: Regenerates the golden files.
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

import csv
import json
import os

import pandas as pd

from options import var_caps, var_parse, var_paths
from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.anchoring import anchor_lemma, anchor_sentence
from metagramme.fcns_read import load_project
from metagramme.output import write_golden_file
from metagramme.tagparser import parse
from metagramme.treesolver import ModelStatistics, compile_grammar, shape

CORPUS_COLUMNS = ['sentence', 'expectation', 'case', 'start_cat']

# Golden selections: family whose shapes are listed, MWE lemma whose
# template subset is listed, sentence whose derived brackets are listed
GOLDEN_FAMILY = 'n0ClV'
GOLDEN_LEMMA = 'prendre-la-porte'
GOLDEN_SENTENCE = 'Jean prend la porte'



class CorpusError(DiagnosticError):
    def __init__(self, path, row, reason):
        self.path = path
        self.row = row
        self.reason = reason
        super().__init__(f"Corpus {path}, row {row}: {reason}.")


def read_corpus(path, start_cat=None):
    """Reads a corpus file.

    Columns are sentence, expectation tag, case name and an optional start
    category; lines starting with '#' are comments.

    :param path: Corpus file (tab separated, UTF-8)
    :type path: str
    :param start_cat: Start category of rows without one
    :type start_cat: str
    :return: One row per sentence, columns sentence/expectation/case/start_cat
    :rtype: pandas.DataFrame
    """
    start_cat = start_cat or var_parse.start_cat
    try:
        corpus = pd.read_csv(path, sep='\t', header=None, names=CORPUS_COLUMNS, comment='#',
                             dtype=str, quoting=csv.QUOTE_NONE, keep_default_na=False,
                             skip_blank_lines=True, encoding='utf-8')
    except pd.errors.EmptyDataError:
        return pd.DataFrame(columns=CORPUS_COLUMNS)
    corpus = corpus.fillna('')
    for column in CORPUS_COLUMNS:
        corpus[column] = corpus[column].astype(str).str.strip()
    corpus['start_cat'] = corpus['start_cat'].replace('', start_cat)
    for row, (sentence, expectation) in enumerate(zip(corpus['sentence'],
                                                      corpus['expectation']), start=1):
        if not sentence:
            raise CorpusError(path, row, "empty sentence")
        if expectation and expectation not in var_parse.expectations:
            raise CorpusError(path, row, f"unknown expectation '{expectation}'")
    return corpus.reset_index(drop=True)


def read_skipped(path=None):
    """Reads the list of sentences left out of the corpus.

    An entry is an id and a sentence separated by a tab, followed by indented
    lines holding the quoted reason. Lines starting with '%' are comments.

    :return: One row per entry, columns id/sentence/reason
    :rtype: pandas.DataFrame
    """
    path = path or var_paths.skipped_file
    entries = []
    with open(path, encoding='utf-8') as file:
        for number, line in enumerate(file, start=1):
            if not line.strip() or line.startswith('%'):
                continue
            if line[0].isspace():
                if not entries:
                    raise CorpusError(path, number, "reason without a sentence")
                entries[-1]['reason'].append(line.strip())
                continue
            ident, _, sentence = line.rstrip('\n').partition('\t')
            if not sentence.strip():
                raise CorpusError(path, number, "entry without a sentence")
            entries.append({'id': ident.strip(), 'sentence': sentence.strip(), 'reason': []})
    for entry in entries:
        entry['reason'] = ' '.join(entry['reason']).strip('"')
    return pd.DataFrame(entries, columns=['id', 'sentence', 'reason'])


def meets_expectation(report, expectation):
    if expectation == var_parse.expect_idiomatic:
        return report.idiomatic
    if expectation == var_parse.expect_literal_only:
        return report.literal_only
    if expectation == var_parse.expect_no_parse:
        return not report.derivations
    return True


def load_assets(manifest=None, corpus=None):
    """Parses and links the bundled MWE-aware project and reads its corpus.

    :param manifest: Manifest path, the MWE-aware mini grammar by default
    :type manifest: str
    :param corpus: Corpus path, the bundled regression corpus by default
    :type corpus: str
    :return: Grammar classes, linked lexicon and corpus
    :rtype: tuple
    """
    project = load_project(manifest or var_paths.default_manifest)
    corpus = read_corpus(corpus or var_paths.corpus_file, project.manifest.start_cat)
    return project.grammar, project.lexicon, corpus


def compile_project(project, caps=None, stats=None):
    """Compiles every family of the project's family table.

    :return: Templates per family
    :rtype: dict
    """
    caps = caps or {}
    return compile_grammar(project.families, project.grammar,
                           caps.get('descriptions', var_caps.description_cap),
                           caps.get('variables', var_caps.variable_cap), stats)


def template_record(template, index=0):
    """Nested record of a template. Member ids and provenance are left out;
    variables keep the canonical names given by the solver."""
    node = template.nodes[index]
    record = {'cat': node.cat, 'mark': node.mark, 'name': node.name, 'lex': node.lex,
              'top': node.top.to_json(), 'bot': node.bot.to_json(),
              'children': [template_record(template, child) for child in template.children[index]]}
    if index:
        return record
    return {'kind': template.kind, 'iface': template.iface.to_json(), 'tree': record}


def anchored_record(tree):
    return {'lemma': tree.lemma_id, 'is_mwe': tree.is_mwe, 'tree': template_record(tree.template)}


def report_record(report):
    """Parse report without derivation strings, which number the anchored
    trees of each token."""
    data = report.to_json()
    data['derivations'] = [{'derived': d['derived'], 'mwe_readings': d['mwe_readings']}
                           for d in data['derivations']]
    return data


def _json_line(record):
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def golden_lines(project, compiled):
    """Contents of every golden file, by file name."""
    lemma = next(entry for entry in project.lemmas if entry.lemma_id == GOLDEN_LEMMA)
    selected = anchor_lemma(lemma, compiled[lemma.fam])
    tokens = GOLDEN_SENTENCE.split()
    report = parse(tokens, anchor_sentence(tokens, project.lexicon, compiled),
                   project.manifest.start_cat)
    return {
        f'{GOLDEN_FAMILY}.shapes': sorted({shape(t) for t in compiled[GOLDEN_FAMILY]}),
        f'{GOLDEN_LEMMA}.shapes': sorted({shape(tree.template) for tree in selected}),
        'headline.brackets': sorted({derivation.bracket for derivation in report.derivations}),
        f'{GOLDEN_FAMILY}.templates.jsonl': sorted(_json_line(template_record(t))
                                                  for t in compiled[GOLDEN_FAMILY]),
        f'{GOLDEN_LEMMA}.anchored.jsonl': sorted(_json_line(anchored_record(tree))
                                                 for tree in selected),
        'headline.report.json': [_json_line(report_record(report))],
    }


def write_golden(directory=None, manifest=None):
    """Regenerates the golden files from the bundled project.

    :return: Paths of the written files
    :rtype: list of str
    """
    directory = directory or var_paths.golden_dir
    project = load_project(manifest or var_paths.default_manifest)
    compiled = compile_project(project, stats=ModelStatistics())
    written = []
    for name, lines in sorted(golden_lines(project, compiled).items()):
        path = os.path.join(directory, name)
        write_golden_file(path, lines)
        written.append(path)
    return written
