# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Exhaustive parser for lexicalized TAG. Every anchored tree is instantiated
at the position of its anchor token; a memoized top-down recognizer computes
the analyses of each (instance, node, span, foot gap) and records them as
derivation fragments. Complete derivations are then rebuilt as derived trees
with one binding environment, where the feature checks happen.

Classes:
- DerivationTree: Which instance substituted/adjoined at which node.
- Derivation / ParseReport: Parser output.

Functions:
- parse: Parses one sentence.
- detect_mwe: Lists the token positions covered by each idiomatic reading.
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

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from nltk import Tree

from metagramme.featstruct import BindingEnv, UnificationFailure, Var, unify

logger = logging.getLogger(__name__)

DEFAULT_DERIVATION_CAP = 512
ADJUNCTION_SITES = ('none', 'anchor', 'coanchor')


@dataclass(frozen=True)
class DerivationTree:
    """inst indexes the parser's instances; ops are (node id, kind, payload)
    with kind 'lex' (payload: token position), 'subst' or 'adj' (payload:
    the DerivationTree of the attached instance)."""
    inst: int
    ops: Tuple[tuple, ...] = ()


@dataclass(frozen=True)
class _Instance:
    position: int
    rank: int
    tree: object

    @property
    def template(self):
        return self.tree.template

    def label(self):
        return f"{self.tree.lemma_id}:{self.template.family}#{self.rank}@{self.position + 1}"


@dataclass(frozen=True)
class Derivation:
    derived: Tree
    derivation: DerivationTree
    derivation_string: str
    mwe_readings: Tuple[str, ...] = ()
    mwe_spans: Tuple[Tuple[str, frozenset], ...] = ()

    @property
    def bracket(self):
        return self.derived.pformat(margin=10 ** 6)

    def to_json(self):
        return {'derived': self.bracket, 'derivation': self.derivation_string,
                'mwe_readings': list(self.mwe_readings)}


@dataclass(frozen=True)
class ParseReport:
    sentence: Tuple[str, ...]
    derivations: Tuple[Derivation, ...] = ()
    start_cat: str = 's'
    truncated: bool = False

    @property
    def idiomatic(self):
        return any(derivation.mwe_readings for derivation in self.derivations)

    @property
    def literal_only(self):
        return bool(self.derivations) and not self.idiomatic

    def to_json(self):
        return {'sentence': ' '.join(self.sentence), 'start_cat': self.start_cat,
                'derivations': [d.to_json() for d in self.derivations],
                'idiomatic': self.idiomatic, 'literal_only': self.literal_only,
                'truncated': self.truncated}


class _Truncated(Exception):
    pass


###############################################################################
# RECOGNITION #################################################################
###############################################################################

class _Chart:

    def __init__(self, tokens, anchored, cap):
        self.tokens = tuple(tokens)
        self.cap = cap
        self.truncated = False
        self.instances = [_Instance(k, rank, tree) for k, trees in enumerate(anchored)
                          for rank, tree in enumerate(trees)]
        self.initial, self.auxiliary = {}, {}
        for index, instance in enumerate(self.instances):
            table = self.auxiliary if instance.template.kind == 'auxiliary' else self.initial
            table.setdefault(instance.template.root.cat, []).append(index)
        self.memo = {}
        self.active = set()
        self.info = [self._node_info(instance.template) for instance in self.instances]

    @staticmethod
    def _node_info(template):
        """Per node: (minimum number of tokens, dominates anchor, dominates foot)."""
        info = [None] * len(template.nodes)
        for node in reversed(template.nodes):
            kids = template.children[node.id]
            if kids:
                info[node.id] = (sum(info[k][0] for k in kids), any(info[k][1] for k in kids),
                                 any(info[k][2] for k in kids))
            else:
                lexical = node.mark in ('anchor', 'coanchor', 'subst')
                info[node.id] = (1 if lexical else 0, node.mark == 'anchor', node.mark == 'foot')
        return info

    def _limit(self, results):
        if len(results) > self.cap:
            self.truncated = True
            del results[self.cap:]
        return results

    def full(self, inst, node_id, i, j, gap):
        key = ('full', inst, node_id, i, j, gap)
        if key in self.memo:
            return self.memo[key]
        if key in self.active:
            return []
        self.active.add(key)
        results = list(self.lower(inst, node_id, i, j, gap))
        node = self.instances[inst].template.nodes[node_id]
        if node.mark in ADJUNCTION_SITES:
            for aux in self.auxiliary.get(node.cat, ()):
                for start in range(i, j + 1):
                    for end in range(start, j + 1):
                        if (start, end) == (i, j):
                            continue
                        lowers = self.lower(inst, node_id, start, end, gap)
                        if not lowers:
                            continue
                        root = self.instances[aux].template.root.id
                        for adjoined in self.full(aux, root, i, j, (start, end)):
                            for ops in lowers:
                                results.append(ops + ((node_id, 'adj',
                                                       DerivationTree(aux, adjoined)),))
                        self._limit(results)
        self.active.discard(key)
        self.memo[key] = self._limit(results)
        return self.memo[key]

    def lower(self, inst, node_id, i, j, gap):
        key = ('lower', inst, node_id, i, j, gap)
        if key in self.memo:
            return self.memo[key]
        instance = self.instances[inst]
        template = instance.template
        node = template.nodes[node_id]
        minimum, has_anchor, has_foot = self.info[inst][node_id]
        results = []
        if j - i < minimum or has_foot != (gap is not None) or (
                has_anchor and not i <= instance.position < j):
            self.memo[key] = results
            return results
        if gap is not None and not (i <= gap[0] <= gap[1] <= j):
            self.memo[key] = results
            return results
        kids = template.children[node_id]
        if not kids:
            results = self._leaf(instance, node, i, j, gap)
        else:
            results = [ops for ops in self._split(inst, kids, i, j, gap)]
        self.memo[key] = self._limit(results)
        return self.memo[key]

    def _leaf(self, instance, node, i, j, gap):
        if node.mark == 'anchor':
            return [((node.id, 'lex', i),)] if (i, j) == (instance.position, instance.position + 1) else []
        if node.mark == 'coanchor':
            return [((node.id, 'lex', i),)] if j == i + 1 and self.tokens[i] == node.lex else []
        if node.mark == 'foot':
            return [()] if gap == (i, j) else []
        if node.mark == 'subst':
            results = []
            for other in self.initial.get(node.cat, ()):
                root = self.instances[other].template.root.id
                for ops in self.full(other, root, i, j, None):
                    results.append(((node.id, 'subst', DerivationTree(other, ops)),))
            return results
        return [()] if i == j else []

    def _split(self, inst, kids, i, j, gap):
        """Yields the ops of every assignment of consecutive subspans of (i, j) to kids."""
        info = self.info[inst]
        child = kids[0]
        rest_minimum = sum(info[k][0] for k in kids[1:])
        for end in range(i + info[child][0], j - rest_minimum + 1):
            child_gap = gap if info[child][2] else None
            heads = self.full(inst, child, i, end, child_gap)
            if not heads:
                continue
            if len(kids) == 1:
                if end == j:
                    yield from heads
                continue
            tails = list(self._split(inst, kids[1:], end, j, gap))
            for head, tail in itertools.product(heads, tails):
                yield head + tail


###############################################################################
# DERIVED TREES ###############################################################
###############################################################################

@dataclass
class _Derived:
    cat: str
    top: object
    bot: object
    children: list
    word: Optional[str] = None


class _Builder:
    """Rebuilds the derived tree of one derivation, unifying features in a
    single environment. Raises UnificationFailure when a check fails."""

    def __init__(self, chart):
        self.chart = chart
        self.env = BindingEnv()
        self.counter = itertools.count(1)

    def unify(self, left, right):
        fs, self.env = unify(left, right, self.env)
        return fs

    def build(self, dtree, plug=None):
        occurrence = next(self.counter)
        template = self.chart.instances[dtree.inst].template
        ops = {}
        for node_id, kind, payload in dtree.ops:
            ops.setdefault(node_id, {})[kind] = payload

        def rename(fs):
            return fs.map_vars(lambda var: Var(f"{occurrence}.{var.name}"))

        def visit(node_id):
            node = template.nodes[node_id]
            local = ops.get(node_id, {})
            top, bot = rename(node.top), rename(node.bot)
            if node.mark == 'foot':
                derived = _Derived(node.cat, top, self.unify(bot, plug.bot), plug.children,
                                   plug.word)
            elif node.mark == 'subst':
                root = self.build(local['subst'])
                derived = _Derived(root.cat, self.unify(top, root.top), root.bot, root.children,
                                   root.word)
            elif 'lex' in local:
                derived = _Derived(node.cat, top, bot, [], self.chart.tokens[local['lex']])
            else:
                derived = _Derived(node.cat, top, bot,
                                   [visit(child) for child in template.children[node_id]])
            if 'adj' in local:
                root = self.build(local['adj'], plug=derived)
                derived = _Derived(root.cat, self.unify(derived.top, root.top), root.bot,
                                   root.children, root.word)
            return derived

        return visit(template.root.id)

    def finish(self, derived):
        """Checks top/bot at every node and converts to an nltk Tree."""
        self.unify(derived.top, derived.bot)
        if derived.word is not None:
            return Tree(derived.cat.upper(), [derived.word])
        return Tree(derived.cat.upper(), [self.finish(child) for child in derived.children])


def _derivation_string(chart, dtree):
    parts = []
    for node_id, kind, payload in dtree.ops:
        if kind in ('subst', 'adj'):
            parts.append(f"{kind}@{node_id}:{_derivation_string(chart, payload)}")
    label = chart.instances[dtree.inst].label()
    return label + ('(' + ' '.join(sorted(parts)) + ')' if parts else '')


def _mwe_spans(chart, dtree):
    spans = []
    instance = chart.instances[dtree.inst]
    if instance.tree.is_mwe:
        positions = frozenset(payload + 1 for _, kind, payload in dtree.ops if kind == 'lex')
        spans.append((instance.tree.lemma_id, positions))
    for _, kind, payload in dtree.ops:
        if kind in ('subst', 'adj'):
            spans += _mwe_spans(chart, payload)
    return spans


###############################################################################
# OPERATIONS ##################################################################
###############################################################################

def parse(tokens, anchored, start_cat='s', cap=None):
    """Parses a sentence over its anchored trees.

    :param tokens: Surface forms
    :type tokens: list of str
    :param anchored: Anchored trees per token position, as returned by anchor_sentence
    :type anchored: list of list of AnchoredTree
    :param start_cat: Category of the derived root
    :type start_cat: str
    :param cap: Maximum number of derivations, default 512
    :type cap: int
    :return: Every complete derivation, ordered by bracket and derivation tree
    :rtype: ParseReport
    """
    cap = cap or DEFAULT_DERIVATION_CAP
    chart = _Chart(tokens, anchored, cap)
    found = {}
    for inst in chart.initial.get(start_cat, ()):
        root = chart.instances[inst].template.root.id
        for ops in chart.full(inst, root, 0, len(chart.tokens), None):
            dtree = DerivationTree(inst, ops)
            builder = _Builder(chart)
            try:
                derived = builder.finish(builder.build(dtree))
            except UnificationFailure as failure:
                logger.debug("derivation rejected by features (%s)", failure)
                continue
            key = _derivation_string(chart, dtree)
            if key in found:
                continue
            spans = tuple(sorted(_mwe_spans(chart, dtree), key=lambda s: (s[0], sorted(s[1]))))
            found[key] = Derivation(derived, dtree, key, tuple(sorted({s[0] for s in spans})),
                                    spans)
    derivations = sorted(found.values(), key=lambda d: (d.bracket, d.derivation_string))
    truncated = chart.truncated or len(derivations) > cap
    return ParseReport(tuple(tokens), tuple(derivations[:cap]), start_cat, truncated)


def detect_mwe(report):
    """Returns (lemma id, 1-based token positions of anchor and coanchors)
    for every idiomatic reading of the report, without repetitions."""
    readings = {span for derivation in report.derivations for span in derivation.mwe_spans}
    return sorted(readings, key=lambda reading: (reading[0], sorted(reading[1])))
