# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

This script runs the pipelines behind the command line: compiling a project
(parse the metagrammar and lexicon, expand the families, solve the tree
descriptions, check the lexicon against the templates), anchoring single
forms, parsing sentences or corpora and comparing the size of two project
versions. Every command writes JSON lines on stdout; progress and
diagnostics go to stderr.

Classes:
- GrowthStats: Class and MWE lemma counts of two project versions with their deltas.
- LexiconDiagnostics: Aggregates the anchoring diagnostics found while compiling.

Functions:
- cmd_compile: Compiles a project and optionally saves the compiled grammar.
- cmd_parse: Parses a sentence or a corpus.
- cmd_anchor: Lists the anchored trees of one form.
- cmd_stats: Compares two project versions.
- growth_stats: Delta computation behind cmd_stats.
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

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from pandas import DataFrame

from options import var_caps, var_parse, var_paths
from metagramme import fcns_options
from metagramme import fcns_read
from metagramme import minigrammar
from metagramme import output
from metagramme.Auxiliary_functions import (DiagnosticError, format_percent, percent_change,
                                            print_green, print_magenta, print_red)
from metagramme.anchoring import UnknownForm, anchor_lemma, anchor_sentence, anchor_token
from metagramme.tagparser import detect_mwe, parse
from metagramme.treesolver import ModelStatistics

logger = logging.getLogger(__name__)


class LexiconDiagnostics(DiagnosticError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__(f"{len(self.diagnostics)} lexicon diagnostic(s).")


@dataclass(frozen=True)
class GrowthStats:
    classes_old: int
    classes_new: int
    mwe_lemmas_old: int
    mwe_lemmas_new: int
    classes_delta: Optional[Decimal]
    mwe_lemmas_delta: Optional[Decimal]

    def to_json(self):
        def delta(value):
            return None if value is None else format_percent(value)
        return {'classes': [self.classes_old, self.classes_new],
                'classes_delta': delta(self.classes_delta),
                'mwe_lemmas': [self.mwe_lemmas_old, self.mwe_lemmas_new],
                'mwe_lemmas_delta': delta(self.mwe_lemmas_delta)}

    def table(self):
        record = self.to_json()
        return DataFrame({'old': [self.classes_old, self.mwe_lemmas_old],
                          'new': [self.classes_new, self.mwe_lemmas_new],
                          'delta': [record['classes_delta'], record['mwe_lemmas_delta']]},
                         index=['classes', 'MWE lemmas'])


def growth_stats(classes_old, classes_new, mwe_old, mwe_new):
    """Counts and percentage deltas (one decimal, rounded half-up).

    A delta from a count of zero is undefined and reported as None.
    """
    def delta(old, new):
        return percent_change(old, new) if old else None
    return GrowthStats(classes_old, classes_new, mwe_old, mwe_new,
                       delta(classes_old, classes_new), delta(mwe_old, mwe_new))


###############################################################################
# COMPILE #####################################################################
###############################################################################

def check_lexicon(project, compiled):
    """Anchors every lemma on its family; returns the diagnostics found."""
    diagnostics = []
    for lemma in project.lemmas:
        anchored = anchor_lemma(lemma, compiled.get(lemma.fam, []), diagnostics)
        if not anchored:
            print_magenta(f"{lemma.source}:{lemma.line}: lemma {lemma.lemma_id} anchors "
                          f"no template of family {lemma.fam}")
    return diagnostics


def cmd_compile(manifest=None, output_file=None, stream=None):
    """Compiles a project.

    :param manifest: Manifest path, the bundled MWE-aware project by default
    :type manifest: str
    :param output_file: Where to save the compiled grammar, not saved if None
    :type output_file: str
    :param stream: Receives the JSON line of ModelStatistics, stdout by default
    :type stream: file obj.
    :return: The compiled grammar and its model statistics
    :rtype: tuple
    """
    path = fcns_options.check_manifest_path(manifest, var_paths.default_manifest)
    project = fcns_read.load_project(path)
    caps = fcns_options.effective_caps(var_caps, project.manifest.caps)
    stats = ModelStatistics()
    compiled = minigrammar.compile_project(project, caps, stats)

    diagnostics = check_lexicon(project, compiled)
    if diagnostics:
        for diagnostic in diagnostics:
            print_red(str(diagnostic))
        raise LexiconDiagnostics(diagnostics)

    grammar = output.CompiledGrammar(compiled, project.lexicon, project.manifest.start_cat, caps)
    if output_file:
        output.save_compiled_grammar(grammar, output_file)
        print_green(f"Compiled grammar saved to {output_file} "
                    f"({grammar.template_count()} templates).")
    output.write_json_line(stats.to_json(), stream)
    return grammar, stats


def _grammar(grammar_file, manifest):
    if grammar_file:
        return output.load_compiled_grammar(grammar_file)
    path = fcns_options.check_manifest_path(manifest, var_paths.default_manifest)
    project = fcns_read.load_project(path)
    caps = fcns_options.effective_caps(var_caps, project.manifest.caps)
    compiled = minigrammar.compile_project(project, caps, ModelStatistics())
    return output.CompiledGrammar(compiled, project.lexicon, project.manifest.start_cat, caps)


###############################################################################
# PARSE #######################################################################
###############################################################################

def parse_sentence(sentence, grammar, start_cat=None, cap=None):
    """Anchors and parses one sentence.

    :return: The report and the diagnostics of unknown forms
    :rtype: tuple
    """
    tokens = sentence.split()
    diagnostics = []
    anchored = anchor_sentence(tokens, grammar.lexicon, grammar.compiled, diagnostics)
    report = parse(tokens, anchored, start_cat or grammar.start_cat or var_parse.start_cat, cap)
    return report, diagnostics


def _record(report, diagnostics, row=None):
    record = report.to_json()
    record['mwe'] = [{'lemma': lemma, 'positions': sorted(positions)}
                     for lemma, positions in detect_mwe(report)]
    record['unknown_forms'] = [d.surface for d in diagnostics if isinstance(d, UnknownForm)]
    if row is not None:
        record['case'] = row['case']
        record['expectation'] = row['expectation']
        record['meets_expectation'] = minigrammar.meets_expectation(report, row['expectation'])
    return record


def cmd_parse(grammar_file=None, manifest=None, sentence=None, corpus=None, stream=None,
              workers=None):
    """Parses one sentence or every sentence of a corpus.

    One JSON report per sentence is written in input order, followed by a
    summary line unless there was no sentence at all.

    :param grammar_file: Compiled grammar, compiled on the fly from manifest if None
    :type grammar_file: str
    :param sentence: Sentence, tokens separated by blanks
    :type sentence: str
    :param corpus: Corpus file (see minigrammar.read_corpus)
    :type corpus: str
    :return: The parse reports
    :rtype: list of ParseReport
    """
    grammar = _grammar(grammar_file, manifest)
    cap = fcns_options.effective_caps(var_caps, grammar.caps)['derivations']
    if corpus is not None:
        rows = minigrammar.read_corpus(corpus, grammar.start_cat).to_dict('records')
    else:
        rows = [None]

    def run(row):
        if row is None:
            return parse_sentence(sentence, grammar, None, cap)
        return parse_sentence(row['sentence'], grammar, row['start_cat'], cap)

    # map keeps input order whatever the completion order
    with ThreadPoolExecutor(max_workers=workers or var_parse.corpus_workers) as pool:
        results = list(pool.map(run, rows))

    reports, unmet = [], 0
    for row, (report, diagnostics) in zip(rows, results):
        for diagnostic in diagnostics:
            print_red(f"{' '.join(report.sentence)}: {diagnostic}")
        record = _record(report, diagnostics, row)
        if record.get('meets_expectation') is False:
            unmet += 1
            print_magenta(f"{row['case']}: '{row['sentence']}' does not meet {row['expectation']}")
        output.write_json_line(record, stream)
        reports.append(report)
    if reports:
        output.write_json_line({'summary': {
            'sentences': len(reports),
            'idiomatic': sum(r.idiomatic for r in reports),
            'literal_only': sum(r.literal_only for r in reports),
            'no_parse': sum(not r.derivations for r in reports),
            'unmet_expectations': unmet}}, stream)
    return reports


###############################################################################
# ANCHOR ######################################################################
###############################################################################

def cmd_anchor(grammar_file=None, form=None, manifest=None, stream=None):
    """Writes one JSON line per tree anchored by the form."""
    grammar = _grammar(grammar_file, manifest)
    diagnostics = []
    trees = anchor_token(form, grammar.lexicon, grammar.compiled, diagnostics)
    for diagnostic in diagnostics:
        print_red(str(diagnostic))
    for tree in trees:
        output.write_json_line(tree.to_json(), stream)
    if not trees:
        print_magenta(f"No tree anchored by '{form}'.")
    return trees


###############################################################################
# STATS #######################################################################
###############################################################################

def cmd_stats(manifest_old, manifest_new, stream=None):
    """Compares the class and MWE lemma counts of two project versions.

    :return: Counts and deltas
    :rtype: GrowthStats
    """
    old = fcns_read.load_project(manifest_old)
    new = fcns_read.load_project(manifest_new)
    stats = growth_stats(fcns_read.count_classes(old), fcns_read.count_classes(new),
                         fcns_read.count_mwe_lemmas(old), fcns_read.count_mwe_lemmas(new))
    print_green(stats.table().to_string())
    output.write_json_line(stats.to_json(), stream)
    return stats
