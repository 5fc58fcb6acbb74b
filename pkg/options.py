# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

This configuration file contains the settings of the metagrammar compiler and
the parser: paths to the bundled assets, the caps bounding the search spaces,
parser defaults and logging.

Classes:
- var_paths: Contains the project, asset and golden file paths.
- var_caps: Contains the caps on descriptions, node variables and derivations.
- var_parse: Contains parser defaults and the corpus expectation tags.
- var_log: Contains the logging settings.
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

###############################################################################
# PATHS #######################################################################
###############################################################################
class var_paths:
    # Project directory
    project_dir = os.path.dirname(os.path.abspath(__file__))

    # Directory of the bundled grammar, lexicon, corpus and golden files
    assets_dir = os.path.join(project_dir, 'assets')
    # Directory of the project manifests
    manifest_dir = os.path.join(assets_dir, 'manifests')
    # Manifest used when a command gets none (MWE-aware mini grammar)
    default_manifest = os.path.join(manifest_dir, 'minigrammar.manifest')
    # Manifest of the grammar before MWEs were encoded
    base_manifest = os.path.join(manifest_dir, 'frenchtag.manifest')
    # Manifest with the three MWEs of the mini grammar, before the corpus MWEs
    core_manifest = os.path.join(manifest_dir, 'minigrammar_core.manifest')
    # Regression corpus (sentence, expectation, case, optional start category)
    corpus_file = os.path.join(assets_dir, 'corpus', 'regression.tsv')
    # Sentences left out of the corpus, with the reason they are left out
    skipped_file = os.path.join(assets_dir, 'corpus', 'skipped.txt')
    # Golden files written by minigrammar.write_golden
    golden_dir = os.path.join(assets_dir, 'golden')

###############################################################################
# CAPS ########################################################################
###############################################################################
class var_caps:
    # Maximum number of flat descriptions a single class may expand into
    description_cap = 10000
    # Maximum number of node variables of a description handed to the solver
    variable_cap = 12
    # Maximum number of derivations reported per sentence
    derivation_cap = 512

###############################################################################
# PARSER ######################################################################
###############################################################################
class var_parse:
    # Category of the derived root when neither manifest nor corpus give one
    start_cat = 's'
    # Corpus expectation tags
    expect_idiomatic = 'expect-idiomatic'
    expect_literal_only = 'expect-literal-only'
    expect_no_parse = 'expect-no-parse'
    expectations = (expect_idiomatic, expect_literal_only, expect_no_parse)
    # Number of worker threads for corpus parsing (1 = sequential)
    corpus_workers = 4

###############################################################################
# LOGGING #####################################################################
###############################################################################
class var_log:
    # Level of the module loggers (DEBUG shows eliminated disjuncts and rejected derivations)
    level = 'WARNING'
    # Format of log records on stderr
    format = '%(levelname)s %(name)s: %(message)s'
