# -*- coding: utf-8 -*-
import json
from decimal import Decimal

import pytest

from conftest import manifest_path
from main import main
from options import var_caps
from metagramme.Auxiliary_functions import format_percent, percent_change
from metagramme.fcns_options import CapsError, effective_caps, parse_caps
from metagramme.fcns_read import ManifestError, read_manifest
from metagramme.main_program import growth_stats
from metagramme.output import CompiledGrammar, load_compiled_grammar, save_compiled_grammar


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@pytest.fixture(autouse=True)
def no_caps_override(monkeypatch):
    monkeypatch.delenv('METAGRAMME_CAPS', raising=False)


@pytest.fixture(scope='module')
def grammar_file(tmp_path_factory):
    path = tmp_path_factory.mktemp('compiled') / 'minigrammar.json'
    assert main(['compile', '-o', str(path)]) == 0
    return str(path)


class TestCompile:

    def test_output_is_deterministic(self, grammar_file, project, compiled, tmp_path):
        again = tmp_path / 'again.json'
        caps = effective_caps(var_caps, project.manifest.caps, environ={})
        save_compiled_grammar(CompiledGrammar(compiled, project.lexicon,
                                              project.manifest.start_cat, caps), str(again))
        with open(grammar_file, 'rb') as first, open(again, 'rb') as second:
            assert first.read() == second.read()

    def test_saved_grammar_reloads(self, grammar_file, tmp_path):
        grammar = load_compiled_grammar(grammar_file)
        copy = tmp_path / 'copy.json'
        save_compiled_grammar(grammar, str(copy))
        with open(grammar_file, 'rb') as first, open(copy, 'rb') as second:
            assert first.read() == second.read()

    def test_cyclic_import_exits_with_diagnostic(self, tmp_path, capsys):
        (tmp_path / 'cycle.mg').write_text("class A { B[] }\nclass B { A[] }\n", encoding='utf-8')
        manifest = tmp_path / 'cycle.manifest'
        manifest.write_text(json.dumps({'grammar': ['cycle.mg'], 'families': ['A']}),
                            encoding='utf-8')
        assert main(['compile', '-m', str(manifest)]) == 1
        assert 'A' in capsys.readouterr().err

    def test_missing_manifest(self, tmp_path):
        assert main(['compile', '-m', str(tmp_path / 'none.manifest')]) == 1

    def test_manifest_with_unknown_key(self, tmp_path):
        manifest = tmp_path / 'bad.manifest'
        manifest.write_text(json.dumps({'grammar': [], 'lexicons': []}), encoding='utf-8')
        with pytest.raises(ManifestError):
            read_manifest(str(manifest))


class TestParse:

    def test_sentence(self, grammar_file, capsys):
        assert main(['parse', '-g', grammar_file, '-s', 'Jean prend la porte']) == 0
        report, summary = json_lines(capsys.readouterr().out)
        assert report['idiomatic']
        assert report['mwe'] == [{'lemma': 'prendre-la-porte', 'positions': [2, 3, 4]}]
        assert summary['summary']['sentences'] == 1

    def test_precompiled_grammar_matches_manifest(self, grammar_file, capsys):
        assert main(['parse', '-g', grammar_file, '-s', 'Jean se tait']) == 0
        precompiled = json_lines(capsys.readouterr().out)
        assert main(['parse', '-m', manifest_path('minigrammar.manifest'),
                     '-s', 'Jean se tait']) == 0
        assert json_lines(capsys.readouterr().out) == precompiled

    def test_unknown_form_is_reported(self, grammar_file, capsys):
        assert main(['parse', '-g', grammar_file, '-s', 'Jean prend la sortie']) == 0
        report = json_lines(capsys.readouterr().out)[0]
        assert report['unknown_forms'] == ['sortie']
        assert report['derivations'] == []

    def test_corpus_keeps_input_order(self, grammar_file, tmp_path, capsys):
        corpus = tmp_path / 'corpus.tsv'
        corpus.write_text('Jean prend la porte\texpect-idiomatic\tfirst\n'
                          'Jean ouvre la porte\texpect-literal-only\tsecond\n'
                          'Jean prennent la porte\texpect-no-parse\tthird\n', encoding='utf-8')
        assert main(['parse', '-g', grammar_file, '-c', str(corpus), '-j', '3']) == 0
        *records, summary = json_lines(capsys.readouterr().out)
        assert [r['case'] for r in records] == ['first', 'second', 'third']
        assert all(r['meets_expectation'] for r in records)
        assert summary['summary']['unmet_expectations'] == 0

    def test_empty_corpus(self, grammar_file, tmp_path, capsys):
        corpus = tmp_path / 'empty.tsv'
        corpus.write_text('', encoding='utf-8')
        assert main(['parse', '-g', grammar_file, '-c', str(corpus)]) == 0
        assert capsys.readouterr().out == ''

    def test_malformed_caps(self, grammar_file, monkeypatch):
        monkeypatch.setenv('METAGRAMME_CAPS', 'derivations=many')
        assert main(['parse', '-g', grammar_file, '-s', 'Jean prend la porte']) == 1

    def test_missing_grammar_file(self, tmp_path):
        assert main(['parse', '-g', str(tmp_path / 'none.json'), '-s', 'Jean dort']) == 1


class TestAnchor:

    def test_anchor_form(self, grammar_file, capsys):
        assert main(['anchor', '-g', grammar_file, '-w', 'tait']) == 0
        records = json_lines(capsys.readouterr().out)
        assert records
        assert {r['lemma'] for r in records} == {'se-taire'}
        assert all(r['is_mwe'] for r in records)


class TestCaps:

    def test_parse_caps(self):
        assert parse_caps('descriptions=5, derivations=7') == {'descriptions': 5,
                                                               'derivations': 7}

    @pytest.mark.parametrize('value', ['derivations', 'size=3', 'variables=0', 'variables=-2'])
    def test_malformed(self, value):
        with pytest.raises(CapsError):
            parse_caps(value)

    def test_precedence(self):
        caps = effective_caps(var_caps, {'variables': 8, 'derivations': 64},
                              environ={'METAGRAMME_CAPS': 'derivations=16'})
        assert caps == {'descriptions': var_caps.description_cap, 'variables': 8,
                        'derivations': 16}


class TestStats:

    @pytest.mark.parametrize('old, new, expected', [(285, 337, '+18.2%'), (5, 31, '+520.0%'),
                                                    (337, 341, '+1.2%'), (337, 337, '+0.0%'),
                                                    (26, 41, '+57.7%'), (29, 44, '+51.7%'),
                                                    (1, 4, '+300.0%'), (4, 11, '+175.0%')])
    def test_percent_change(self, old, new, expected):
        assert format_percent(percent_change(old, new)) == expected

    def test_rounding_is_half_up(self):
        assert percent_change(2000, 2001) == Decimal('0.1')

    def test_growth_from_zero(self):
        stats = growth_stats(10, 12, 0, 3)
        assert stats.mwe_lemmas_delta is None
        assert stats.to_json()['mwe_lemmas_delta'] is None
        assert stats.to_json()['classes_delta'] == '+20.0%'

    def test_stats_command(self, capsys):
        assert main(['stats', '-a', manifest_path('frenchtag.manifest'),
                     '-b', manifest_path('minigrammar_core.manifest')]) == 0
        record = json_lines(capsys.readouterr().out)[0]
        assert record == {'classes': [29, 44], 'classes_delta': '+51.7%',
                          'mwe_lemmas': [1, 4], 'mwe_lemmas_delta': '+300.0%'}

    def test_plateau(self, capsys):
        assert main(['stats', '-a', manifest_path('minigrammar_core.manifest'),
                     '-b', manifest_path('minigrammar.manifest')]) == 0
        record = json_lines(capsys.readouterr().out)[0]
        assert record['classes_delta'] == '+0.0%'
        assert record['mwe_lemmas'] == [4, 11]
