# -*- coding: utf-8 -*-
import itertools
import os
from dataclasses import replace

import pytest

from options import var_paths
from metagramme.anchoring import (AnchorCatMismatch, CoanchorCatMismatch, CoanchorNodeMissing,
                                  Lexicon, UnknownForm, anchor_lemma, anchor_sentence,
                                  anchor_token)
from metagramme.dsl import DuplicateMorph, parse_lexicon, parse_metagrammar
from metagramme.featstruct import FeatureStructure, Var
from metagramme.fcns_read import read_text
from metagramme.treesolver import compile_family, shape

TOY_GRAMMAR = """
class T export ?O {
  <syn>{ node [cat=s] { node [cat=v, mark=anchor] node ?O (ObjNode) [cat=n, mark=coanchor] } }
}
class F { T[] *= [dia=active] }
"""

LEMMA = 'class L {{ <lemma> {{ entry <- "ouvrir"; cat <- v; fam <- F; {extra} }}}}'


def toy_lemma(extra):
    lemmas, _ = parse_lexicon(LEMMA.format(extra=extra))
    return lemmas[0]


def golden(name):
    return [line for line in read_text(os.path.join(var_paths.golden_dir, name)).split('\n')
            if line]


@pytest.fixture(scope='module')
def toy_templates():
    return compile_family('F', parse_metagrammar(TOY_GRAMMAR))


class TestToyAnchoring:

    def test_coanchor_is_attached(self, toy_templates):
        anchored = anchor_lemma(toy_lemma('coanchor ObjNode -> "porte"/n'), toy_templates)
        # the object follows the verb, so one linearization
        assert len(anchored) == len(toy_templates) == 1
        for tree in anchored:
            assert tree.template.named('ObjNode')[0].lex == 'porte'
            assert tree.template.anchor.lex == 'ouvrir'
            assert tree.is_mwe

    def test_filters_select_templates(self, toy_templates):
        assert anchor_lemma(toy_lemma('filter dia = passive; coanchor ObjNode -> "porte"/n'),
                            toy_templates) == []

    def test_missing_coanchor_node(self, toy_templates):
        diagnostics = []
        lemma = toy_lemma('coanchor ObjNode -> "porte"/n; coanchor DetNode -> "la"/d')
        assert anchor_lemma(lemma, toy_templates, diagnostics) == []
        assert diagnostics
        assert all(isinstance(d, CoanchorNodeMissing) for d in diagnostics)
        assert diagnostics[0].node_name == 'DetNode'

    def test_coanchor_category_mismatch(self, toy_templates):
        diagnostics = []
        assert anchor_lemma(toy_lemma('coanchor ObjNode -> "la"/d'), toy_templates,
                            diagnostics) == []
        assert isinstance(diagnostics[0], CoanchorCatMismatch)
        assert (diagnostics[0].expected, diagnostics[0].got) == ('d', 'n')

    def test_anchor_category_mismatch_is_reported(self, toy_templates):
        lemmas, _ = parse_lexicon('class L { <lemma> { entry <- "porte"; cat <- n; fam <- F; '
                                  'coanchor ObjNode -> "porte"/n }}')
        diagnostics = []
        assert anchor_lemma(lemmas[0], toy_templates, diagnostics) == []
        assert len(diagnostics) == 1
        assert isinstance(diagnostics[0], AnchorCatMismatch)
        mismatch = diagnostics[0]
        assert (mismatch.expected, mismatch.got, mismatch.family) == ('n', 'v', 'F')

    def test_unbound_coanchor_drops_template(self, toy_templates):
        # a simple lemma cannot leave the ObjNode coanchor without a form
        assert anchor_lemma(toy_lemma('id <- "ouvrir"'), toy_templates) == []

    def test_equation_on_coanchor(self, toy_templates):
        lemma = toy_lemma('coanchor ObjNode -> "porte"/n; equation ObjNode -> gen=f')
        for tree in anchor_lemma(lemma, toy_templates):
            assert tree.template.named('ObjNode')[0].top['gen'] == 'f'

    def test_duplicate_morph_in_lexicon(self):
        _, morphs = parse_lexicon(
            'class a1 { <morpho> { morph <- "a"; lemma <- "avoir"; cat <- v }}\n'
            'class a2 { <morpho> { morph <- "a"; lemma <- "avoir"; cat <- v; feats <- [num=sg] }}')
        with pytest.raises(DuplicateMorph):
            Lexicon.from_decls([], morphs)


class TestBundledAnchoring:

    def test_prendre_la_porte(self, compiled, lemmas):
        anchored = anchor_lemma(lemmas['prendre-la-porte'], compiled['mwen0Vn1'])
        assert sorted({shape(t.template) for t in anchored}) == golden('prendre-la-porte.shapes')
        for tree in anchored:
            assert tree.is_mwe
            assert tree.template.named('ObjDetNode')[0].lex == 'la'
            porte = tree.template.named('ObjNode')[0]
            assert porte.lex == 'porte'
            assert (porte.top['gen'], porte.top['num']) == ('f', 'sg')

    def test_se_taire(self, compiled, lemmas):
        anchored = anchor_lemma(lemmas['se-taire'], compiled['n0ClV'])
        assert sorted({shape(t.template) for t in anchored}) == golden('n0ClV.shapes')
        assert all(t.template.named('ReflNode')[0].lex == 'se' for t in anchored)

    def test_every_mwe_lemma_anchors(self, compiled, project):
        for lemma in project.lemmas:
            if lemma.is_mwe:
                assert anchor_lemma(lemma, compiled[lemma.fam]), lemma.lemma_id

    def test_morph_features_select_diathesis(self, grammar):
        active = anchor_token('prend', grammar.lexicon, grammar.compiled)
        passive = anchor_token('prise', grammar.lexicon, grammar.compiled)
        assert active and passive
        assert all(t.template.anchor.top.get('mode') != 'ppart' for t in active)
        assert all(t.template.anchor.top['mode'] == 'ppart' for t in passive)
        assert not any(t.is_mwe for t in passive)
        assert any(t.lemma_id == 'prendre-la-porte' for t in active)
        assert all(t.surface == 'prend' and t.template.anchor.lex == 'prend' for t in active)

    def test_unknown_form(self, grammar):
        diagnostics = []
        assert anchor_token('sortie', grammar.lexicon, grammar.compiled, diagnostics) == []
        assert isinstance(diagnostics[0], UnknownForm)
        assert diagnostics[0].surface == 'sortie'

    def test_anchor_sentence_keeps_positions(self, grammar):
        diagnostics = []
        anchored = anchor_sentence(['Jean', 'sortie', 'porte'], grammar.lexicon,
                                   grammar.compiled, diagnostics)
        assert len(anchored) == 3
        assert anchored[0] and anchored[2]
        assert anchored[1] == []
        assert len(diagnostics) == 1


def selected_by_hand(lemma, template):
    """Whether a template should anchor the lemma, checked attribute by attribute."""
    for attribute, value in lemma.filters.items():
        have = template.iface.get(attribute)
        if have is not None and not isinstance(have, Var) and have != value:
            return False
    bound = {name for name, _, _ in lemma.coanchors}
    for name, _, cat in lemma.coanchors:
        nodes = [node for node in template.named(name) if node.mark == 'coanchor']
        if not nodes or nodes[0].cat != cat:
            return False
    if any(node.mark == 'coanchor' and node.name not in bound for node in template.nodes):
        return False
    return template.anchor.cat == lemma.cat


def survivors(lemma, templates):
    return {index for index, template in enumerate(templates)
            if anchor_lemma(lemma, [template], diagnostics=[])}


class TestAnchoringProperties:

    def test_selection_matches_attribute_check(self, compiled, project):
        for lemma in project.lemmas:
            templates = compiled[lemma.fam]
            expected = {index for index, template in enumerate(templates)
                        if selected_by_hand(lemma, template)}
            assert survivors(lemma, templates) == expected, lemma.lemma_id

    def test_filters_are_unified_into_the_iface(self, compiled, project):
        for lemma in project.lemmas:
            for tree in anchor_lemma(lemma, compiled[lemma.fam]):
                for attribute, value in lemma.filters.items():
                    assert tree.template.iface[attribute] == value, lemma.lemma_id

    @pytest.mark.parametrize('lemma_id', ['prendre-la-porte', 'faire-face', 'avoir-lieu'])
    def test_more_filters_select_fewer_templates(self, compiled, lemmas, lemma_id):
        lemma = lemmas[lemma_id]
        templates = compiled[lemma.fam]
        items = sorted(lemma.filters.items())
        for size in range(len(items)):
            for kept in itertools.combinations(items, size):
                looser = replace(lemma, filters=FeatureStructure(dict(kept)))
                assert survivors(lemma, templates) <= survivors(looser, templates)

    def test_coanchors_are_conserved(self, compiled, project):
        for lemma in project.lemmas:
            if not lemma.is_mwe:
                continue
            forms = sorted(form for _, form, _ in lemma.coanchors)
            for tree in anchor_lemma(lemma, compiled[lemma.fam]):
                lexical = [node for node in tree.template.nodes
                           if node.mark in ('anchor', 'coanchor')]
                assert len(lexical) == 1 + len(lemma.coanchors), lemma.lemma_id
                assert sorted(node.lex for node in lexical if node.mark == 'coanchor') == forms
