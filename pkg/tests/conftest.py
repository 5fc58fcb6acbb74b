# -*- coding: utf-8 -*-
"""
Shared fixtures: the bundled MWE-aware project, its compiled templates and a
compiled grammar ready for anchoring and parsing. Loading and compiling
happen once per test session.
"""

import os, sys
project_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
# Add the project directory to the system path
sys.path.insert(0, project_dir)

import pytest

from options import var_paths
from metagramme.fcns_read import load_project
from metagramme.minigrammar import compile_project
from metagramme.output import CompiledGrammar
from metagramme.treesolver import ModelStatistics


def manifest_path(name):
    return os.path.join(var_paths.manifest_dir, name)


@pytest.fixture(scope='session')
def project():
    return load_project(var_paths.default_manifest)


@pytest.fixture(scope='session')
def compile_stats():
    return ModelStatistics()


@pytest.fixture(scope='session')
def compiled(project, compile_stats):
    return compile_project(project, stats=compile_stats)


@pytest.fixture(scope='session')
def grammar(project, compiled):
    return CompiledGrammar(compiled, project.lexicon, project.manifest.start_cat)


@pytest.fixture(scope='session')
def lemmas(project):
    return {lemma.lemma_id: lemma for lemma in project.lemmas}
