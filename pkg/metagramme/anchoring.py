# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Grammar/lexicon interface. A lemma selects the templates of its family whose
iface unifies with its filters, fixes its coanchors and equations on named
nodes and anchors the tree; an inflected form then adds its morphological
features to the anchor.

Functions:
- anchor_lemma: Anchors one lemma on the templates of its family.
- anchor_token: Anchors every lemma reachable from a surface form.
- anchor_sentence: Anchors every token of a sentence.
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
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.dsl import DuplicateMorph, LemmaEntryDecl, MorphEntryDecl
from metagramme.featstruct import BindingEnv, UnificationFailure, resolve, unify

logger = logging.getLogger(__name__)


class CoanchorNodeMissing(DiagnosticError):
    def __init__(self, lemma, node_name):
        self.lemma = lemma
        self.node_name = node_name
        super().__init__(f"Lemma {lemma}: the selected template has no coanchor node {node_name}.")


class CoanchorCatMismatch(DiagnosticError):
    def __init__(self, node, expected, got):
        self.node = node
        self.expected = expected
        self.got = got
        super().__init__(f"Coanchor node {node} has category {got}, the lexicon expects {expected}.")


class AnchorCatMismatch(DiagnosticError):
    def __init__(self, lemma, family, expected, got):
        self.lemma = lemma
        self.family = family
        self.expected = expected
        self.got = got
        super().__init__(f"Lemma {lemma} has category {expected} but family {family} anchors {got}.")


class UnknownForm(DiagnosticError):
    def __init__(self, surface):
        self.surface = surface
        super().__init__(f"Unknown form '{surface}'.")


@dataclass
class Lexicon:
    lemmas: List[LemmaEntryDecl] = field(default_factory=list)
    morphs: Dict[str, List[MorphEntryDecl]] = field(default_factory=dict)

    @classmethod
    def from_decls(cls, lemmas, morphs):
        """Indexes morph entries by surface form.

        :raises DuplicateMorph: when a (morph, lemma, cat) triple occurs twice
        """
        index, seen = {}, set()
        for morph in morphs:
            key = (morph.morph, morph.lemma, morph.cat)
            if key in seen:
                raise DuplicateMorph(*key)
            seen.add(key)
            index.setdefault(morph.morph, []).append(morph)
        return cls(list(lemmas), index)

    def lemmas_for(self, lemma, cat):
        return [entry for entry in self.lemmas if entry.entry == lemma and entry.cat == cat]

    def families(self):
        return sorted({entry.fam for entry in self.lemmas})


@dataclass(frozen=True)
class AnchoredTree:
    template: object
    lemma: LemmaEntryDecl
    is_mwe: bool
    env: BindingEnv = field(compare=False, repr=False)
    surface: Optional[str] = None

    @property
    def lemma_id(self):
        return self.lemma.lemma_id

    def to_json(self):
        return {'lemma': self.lemma_id, 'is_mwe': self.is_mwe, 'surface': self.surface,
                'tree': self.template.to_json()}


def _resolved(template, env):
    nodes = tuple(replace(node, top=resolve(node.top, env), bot=resolve(node.bot, env))
                  for node in template.nodes)
    return replace(template, nodes=nodes, iface=resolve(template.iface, env))


def _report(diagnostics, diagnostic):
    if diagnostics is not None:
        diagnostics.append(diagnostic)
    else:
        logger.warning("%s", diagnostic)


def anchor_lemma(lemma, templates, diagnostics=None):
    """Anchors a lemma on the templates of its family.

    :param lemma: Lemma declaration
    :type lemma: LemmaEntryDecl
    :param templates: Templates of lemma.fam
    :type templates: list of TreeTemplate
    :param diagnostics: Receives CoanchorNodeMissing, CoanchorCatMismatch and
        AnchorCatMismatch; logged if None
    :type diagnostics: list
    :return: One anchored tree per surviving template
    :rtype: list of AnchoredTree
    """
    anchored = []
    for template in templates:
        env = BindingEnv()
        try:
            iface, env = unify(template.iface, lemma.filters, env)
        except UnificationFailure as failure:
            logger.debug("%s: template filtered out (%s)", lemma.lemma_id, failure)
            continue
        tree = replace(template, iface=iface)
        try:
            tree = _attach_coanchors(lemma, tree)
        except (CoanchorNodeMissing, CoanchorCatMismatch) as diagnostic:
            _report(diagnostics, diagnostic)
            continue
        if tree is None:
            continue
        try:
            for node_name, fs in lemma.equations:
                targets = tree.named(node_name)
                if not targets:
                    raise CoanchorNodeMissing(lemma.lemma_id, node_name)
                for node in targets:
                    top, env = unify(node.top, fs, env)
                    tree = tree.replace_node(replace(node, top=top))
        except CoanchorNodeMissing as diagnostic:
            _report(diagnostics, diagnostic)
            continue
        except UnificationFailure as failure:
            logger.debug("%s: equation fails (%s)", lemma.lemma_id, failure)
            continue
        anchor = tree.anchor
        if anchor.cat != lemma.cat:
            _report(diagnostics, AnchorCatMismatch(lemma.lemma_id, lemma.fam, lemma.cat, anchor.cat))
            continue
        tree = tree.replace_node(replace(anchor, lex=lemma.entry))
        anchored.append(AnchoredTree(_resolved(tree, env), lemma, lemma.is_mwe, env))
    return anchored


def _attach_coanchors(lemma, tree):
    consumed = set()
    for node_name, form, cat in lemma.coanchors:
        matches = [n for n in tree.named(node_name) if n.mark == 'coanchor']
        if not matches:
            raise CoanchorNodeMissing(lemma.lemma_id, node_name)
        node = matches[0]
        if node.cat != cat:
            raise CoanchorCatMismatch(node_name, cat, node.cat)
        tree = tree.replace_node(replace(node, lex=form))
        consumed.add(node.id)
    leftover = [n.id for n in tree.nodes if n.mark == 'coanchor' and n.id not in consumed]
    if leftover:
        logger.debug("%s: template keeps unbound coanchor nodes %s", lemma.lemma_id, leftover)
        return None
    return tree


def anchor_token(surface, lexicon, compiled, diagnostics=None):
    """Anchors a surface form with every lemma its morph entries lead to.

    :param surface: Token
    :type surface: str
    :param lexicon: Linked lexicon
    :type lexicon: Lexicon
    :param compiled: Templates per family
    :type compiled: dict
    :param diagnostics: Receives UnknownForm and coanchor diagnostics
    :type diagnostics: list
    :rtype: list of AnchoredTree
    """
    morphs = lexicon.morphs.get(surface)
    if not morphs:
        _report(diagnostics, UnknownForm(surface))
        return []
    anchored = []
    for morph in morphs:
        for lemma in lexicon.lemmas_for(morph.lemma, morph.cat):
            for tree in anchor_lemma(lemma, compiled.get(lemma.fam, []), diagnostics):
                anchor = tree.template.anchor
                try:
                    top, env = unify(anchor.top, morph.feats, tree.env)
                except UnificationFailure as failure:
                    logger.debug("%s: morph features of '%s' rejected (%s)", lemma.lemma_id,
                                 surface, failure)
                    continue
                template = tree.template.replace_node(replace(anchor, top=top, lex=surface))
                anchored.append(replace(tree, template=_resolved(template, env), env=env,
                                        surface=surface))
    return anchored


def anchor_sentence(tokens, lexicon, compiled, diagnostics=None):
    """Anchors each token; unknown forms give an empty list at their position."""
    return [anchor_token(token, lexicon, compiled, diagnostics) for token in tokens]
