# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Minimal tree models of flat descriptions. Node variables are first grouped
into cells (a partition whose blocks can be unified), then every rooted
ordered tree over the cells is checked against the dominance and precedence
constraints. Only models with the smallest number of cells are kept; each
consistent sibling order gives its own template.

Classes:
- TemplateNode / TreeTemplate: Elementary tree templates, nodes in preorder.
- ModelStatistics: Counters collected while solving.

Functions:
- solve: Computes every minimal model of one description.
- compile_family: Expands and solves one family.
- compile_grammar: Compiles every family of a family table.
- canonical_string: Total order and identity of templates.
- shape: Category/mark rendering of a template.
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
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import networkx as nx

from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.dsl import LEAF_MARKS
from metagramme.featstruct import EMPTY, FeatureStructure, UnificationFailure, Var
from metagramme.resolver import DescNode, NodeClash, expand, merge_nodes

logger = logging.getLogger(__name__)

DEFAULT_VARIABLE_CAP = 12
MARK_SYMBOLS = {'anchor': '◇', 'coanchor': '◆', 'subst': '↓', 'foot': '*', 'none': ''}
STRICT_OPS = ('idom', 'dom', 'iprec', 'prec')


class IllFormedDescription(DiagnosticError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"Ill-formed description: {reason}.")


class VariableCapExceeded(DiagnosticError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"Description has {count} node variables, the cap is {cap}.")


###############################################################################
# TEMPLATES ###################################################################
###############################################################################

@dataclass(frozen=True)
class TemplateNode:
    id: int
    cat: str
    mark: str = 'none'
    top: FeatureStructure = EMPTY
    bot: FeatureStructure = EMPTY
    name: Optional[str] = None
    members: Tuple[str, ...] = ()
    lex: Optional[str] = None

    def to_json(self):
        return {'id': self.id, 'cat': self.cat, 'mark': self.mark, 'top': self.top.to_json(),
                'bot': self.bot.to_json(), 'name': self.name, 'members': list(self.members),
                'lex': self.lex}

    @classmethod
    def from_json(cls, data):
        return cls(data['id'], data['cat'], data.get('mark', 'none'),
                   FeatureStructure.from_json(data.get('top')),
                   FeatureStructure.from_json(data.get('bot')), data.get('name'),
                   tuple(data.get('members', ())), data.get('lex'))


@dataclass(frozen=True)
class TreeTemplate:
    """Elementary tree. nodes are in preorder, so nodes[0] is the root and a
    node's id is its position."""
    nodes: Tuple[TemplateNode, ...]
    parent: Tuple[Optional[int], ...]
    children: Tuple[Tuple[int, ...], ...]
    iface: FeatureStructure = EMPTY
    kind: str = 'initial'
    family: Optional[str] = None
    provenance: Tuple[str, ...] = ()

    @property
    def root(self):
        return self.nodes[0]

    @property
    def anchor(self):
        return next(node for node in self.nodes if node.mark == 'anchor')

    @property
    def foot(self):
        return next((node for node in self.nodes if node.mark == 'foot'), None)

    def named(self, name):
        return [node for node in self.nodes if node.name == name]

    def replace_node(self, node):
        nodes = list(self.nodes)
        nodes[node.id] = node
        return replace(self, nodes=tuple(nodes))

    def to_json(self):
        return {'nodes': [node.to_json() for node in self.nodes],
                'parent': list(self.parent), 'children': [list(c) for c in self.children],
                'iface': self.iface.to_json(), 'kind': self.kind, 'family': self.family,
                'provenance': list(self.provenance)}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(TemplateNode.from_json(n) for n in data['nodes']),
                   tuple(data['parent']), tuple(tuple(c) for c in data['children']),
                   FeatureStructure.from_json(data.get('iface')), data.get('kind', 'initial'),
                   data.get('family'), tuple(data.get('provenance', ())))


@dataclass
class ModelStatistics:
    descriptions_in: int = 0
    models_out: int = 0
    identifications_tried: int = 0
    eliminated_by: Counter = field(default_factory=Counter)

    def to_json(self):
        return {'descriptions_in': self.descriptions_in, 'models_out': self.models_out,
                'identifications_tried': self.identifications_tried,
                'eliminated_by': dict(sorted(self.eliminated_by.items()))}


def _node_string(template, index):
    node = template.nodes[index]
    parts = [node.cat, node.mark]
    if node.name:
        parts.append(f"name={node.name}")
    if len(node.top):
        parts.append(f"top={node.top}")
    if len(node.bot):
        parts.append(f"bot={node.bot}")
    if node.lex is not None:
        parts.append(f'"{node.lex}"')
    parts += [_node_string(template, child) for child in template.children[index]]
    return '(' + ' '.join(parts) + ')'


def canonical_string(template):
    """Serialization used to order and deduplicate templates. The family and
    provenance are not part of it."""
    return f"{template.kind} {_node_string(template, 0)} {template.iface}"


def shape(template, index=0):
    """Renders categories and marks only, e.g. (S (N↓) (VN (V◇)) (N↓))."""
    node = template.nodes[index]
    label = node.cat.upper() + MARK_SYMBOLS[node.mark]
    children = template.children[index]
    if not children:
        return f"({label})"
    return f"({label} " + ' '.join(shape(template, child) for child in children) + ')'


###############################################################################
# SOLVING #####################################################################
###############################################################################

@dataclass(frozen=True)
class _Cell:
    members: Tuple[int, ...]
    node: DescNode


def _units(description):
    """Groups node variables related by eq constraints; each group is merged
    into one node record."""
    graph = nx.Graph()
    graph.add_nodes_from(node.id for node in description.nodes)
    graph.add_edges_from((r.lhs, r.rhs) for r in description.constraints if r.op == 'eq')
    env = description.env
    units = []
    for component in sorted(sorted(c) for c in nx.connected_components(graph)):
        node = description.node(component[0])
        for other in component[1:]:
            node, env = merge_nodes(node, description.node(other), env)
        units.append((tuple(component), node))
    return units, env


def _partitions(units, strict, env):
    """Yields (cells, env) for every partition of units into blocks whose
    nodes unify and that contain no strictly related pair."""

    def place(position, cells, env):
        if position == len(units):
            yield cells, env
            return
        node = units[position][1]
        for index, cell in enumerate(cells):
            if any((member, position) in strict for member in cell.members):
                continue
            try:
                merged, extended = merge_nodes(cell.node, node, env)
            except (UnificationFailure, NodeClash):
                continue
            yield from place(position + 1,
                             cells[:index] + [_Cell(cell.members + (position,), merged)]
                             + cells[index + 1:], extended)
        yield from place(position + 1, cells + [_Cell((position,), node)], env)

    yield from place(0, [], env)


def _ancestors(parents, cell):
    seen = []
    current = parents[cell]
    while current is not None:
        if current in seen or current == cell:
            return None
        seen.append(current)
        current = parents[current]
    return seen


def _trees(cells, relations, stats):
    """Yields (parents, ordered children) for every tree over cells that
    satisfies relations (given over cell indices)."""
    size = len(cells)
    leafy = {i for i, cell in enumerate(cells) if cell.node.mark in LEAF_MARKS}
    forced = {}
    for lhs, op, rhs in relations:
        if op == 'idom':
            if forced.get(rhs, lhs) != lhs or lhs in leafy:
                stats.eliminated_by['structure'] += 1
                return
            forced[rhs] = lhs
    options = [[forced[c]] if c in forced else [None] + [p for p in range(size)
                                                          if p != c and p not in leafy]
               for c in range(size)]
    for parents in itertools.product(*options):
        if parents.count(None) != 1:
            continue
        ancestors = [_ancestors(parents, c) for c in range(size)]
        if any(chain is None for chain in ancestors):
            continue
        if any(op == 'dom' and lhs not in ancestors[rhs] for lhs, op, rhs in relations):
            stats.identifications_tried += 1
            stats.eliminated_by['dominance'] += 1
            continue
        kids = {p: [c for c in range(size) if parents[c] == p] for p in range(size)}
        busy = [p for p in range(size) if len(kids[p]) > 1]
        for orders in itertools.product(*(itertools.permutations(kids[p]) for p in busy)):
            stats.identifications_tried += 1
            children = dict(kids)
            children.update(zip(busy, (list(order) for order in orders)))
            if _precedence_holds(parents, children, ancestors, relations):
                yield parents, children
            else:
                stats.eliminated_by['precedence'] += 1


def _preorder(parents, children):
    root = parents.index(None)
    order, stack = [], [root]
    while stack:
        cell = stack.pop()
        order.append(cell)
        stack.extend(reversed(children[cell]))
    return order


def _precedence_holds(parents, children, ancestors, relations):
    position = {cell: i for i, cell in enumerate(_preorder(parents, children))}
    for lhs, op, rhs in relations:
        if op == 'prec':
            if lhs in ancestors[rhs] or rhs in ancestors[lhs] or position[lhs] > position[rhs]:
                return False
        elif op == 'iprec':
            if parents[lhs] is None or parents[lhs] != parents[rhs]:
                return False
            siblings = children[parents[lhs]]
            if siblings.index(rhs) != siblings.index(lhs) + 1:
                return False
    return True


def _lexical_check(cells, env):
    """Order-independent conditions on a partition; returns a rejection reason or None."""
    marks = [cell.node.mark for cell in cells]
    if marks.count('anchor') != 1:
        return 'anchor'
    if marks.count('foot') > 1:
        return 'foot'
    for cell in cells:
        if cell.node.cat is None or isinstance(env.walk(cell.node.cat), Var):
            return 'untyped'
    return None


def _build(cells, parents, children, env, description):
    order = _preorder(parents, children)
    position = {cell: i for i, cell in enumerate(order)}
    names = {}

    def canonical(value):
        value = env.walk(value)
        if isinstance(value, Var):
            names.setdefault(value, Var(str(len(names) + 1)))
            return names[value]
        return value

    nodes = []
    for cell_index in order:
        cell = cells[cell_index]
        top = FeatureStructure({a: canonical(v) for a, v in cell.node.top.items()})
        bot = FeatureStructure({a: canonical(v) for a, v in cell.node.bot.items()})
        nodes.append(TemplateNode(position[cell_index], env.walk(cell.node.cat), cell.node.mark,
                                  top, bot, cell.node.name, cell.members))
    parent = tuple(position[parents[c]] if parents[c] is not None else None for c in order)
    kids = tuple(tuple(position[k] for k in children[c]) for c in order)
    iface = FeatureStructure({a: canonical(v) for a, v in description.iface.items()})
    kind = 'auxiliary' if any(node.mark == 'foot' for node in nodes) else 'initial'
    return TreeTemplate(tuple(nodes), parent, kids, iface, kind,
                        provenance=description.provenance)


def solve(description, variable_cap=None, stats=None):
    """Computes every minimal tree model of a flat description.

    :param description: Output of resolver.expand
    :type description: FlatDescription
    :param variable_cap: Maximum number of node variables, default 12
    :type variable_cap: int
    :param stats: Counters updated in place
    :type stats: ModelStatistics
    :return: Templates ordered by canonical_string
    :rtype: list of TreeTemplate
    """
    stats = stats if stats is not None else ModelStatistics()
    cap = variable_cap or DEFAULT_VARIABLE_CAP
    stats.descriptions_in += 1
    try:
        units, env = _units(description)
    except (UnificationFailure, NodeClash) as failure:
        logger.debug("eq constraints cannot be satisfied (%s)", failure)
        stats.eliminated_by['eq-clash'] += 1
        return []
    unit_of = {var: i for i, (members, _) in enumerate(units) for var in members}
    relations = sorted({(unit_of[r.lhs], r.op, unit_of[r.rhs])
                        for r in description.constraints if r.op != 'eq'})
    dominance = nx.DiGraph()
    dominance.add_nodes_from(range(len(units)))
    dominance.add_edges_from((lhs, rhs) for lhs, op, rhs in relations if op in ('idom', 'dom'))
    if not nx.is_directed_acyclic_graph(dominance):
        cycle = nx.find_cycle(dominance)
        raise IllFormedDescription('dominance cycle through ' + ', '.join(
            units[edge[0]][0][0] for edge in cycle))
    if len(units) > cap:
        raise VariableCapExceeded(len(units), cap)
    strict = set()
    for lhs, op, rhs in relations:
        strict.update({(lhs, rhs), (rhs, lhs)})

    by_size = {}
    for cells, cell_env in _partitions([(i, node) for i, (_, node) in enumerate(units)],
                                       strict, env):
        by_size.setdefault(len(cells), []).append((cells, cell_env))

    for size in sorted(by_size):
        templates = {}
        for cells, cell_env in by_size[size]:
            cell_of = {unit: index for index, cell in enumerate(cells) for unit in cell.members}
            cell_relations = sorted({(cell_of[lhs], op, cell_of[rhs]) for lhs, op, rhs in relations})
            if any(lhs == rhs for lhs, _, rhs in cell_relations):
                stats.eliminated_by['self-relation'] += 1
                continue
            reason = _lexical_check(cells, cell_env)
            if reason is not None:
                stats.identifications_tried += 1
                stats.eliminated_by[reason] += 1
                continue
            cells = [_Cell(tuple(sorted(v for unit in cell.members for v in units[unit][0])), cell.node)
                     for cell in cells]
            for parents, children in _trees(cells, cell_relations, stats):
                root = parents.index(None)
                feet = [c for c, cell in enumerate(cells) if cell.node.mark == 'foot']
                if feet and cell_env.walk(cells[feet[0]].node.cat) != cell_env.walk(cells[root].node.cat):
                    stats.eliminated_by['foot'] += 1
                    continue
                template = _build(cells, parents, children, cell_env, description)
                templates.setdefault(canonical_string(template), template)
        if templates:
            stats.models_out += len(templates)
            return [templates[key] for key in sorted(templates)]
    stats.eliminated_by['unsatisfiable'] += 1
    return []


def compile_family(family, grammar, cap=None, variable_cap=None, stats=None):
    """Solves every description of a family.

    :return: Templates deduplicated by canonical_string, each with its iface
    :rtype: list of TreeTemplate
    """
    templates = {}
    for description in expand(family, grammar, cap):
        for template in solve(description, variable_cap, stats):
            key = canonical_string(template)
            if key not in templates:
                templates[key] = replace(template, family=family)
    return [templates[key] for key in sorted(templates)]


def compile_grammar(table, grammar, cap=None, variable_cap=None, stats=None):
    """Compiles every family of a family table into {family: templates}."""
    stats = stats if stats is not None else ModelStatistics()
    compiled = {}
    for family, class_name in table.items():
        templates = compile_family(class_name, grammar, cap, variable_cap, stats)
        compiled[family] = [replace(t, family=family) for t in templates]
        logger.info("family %s: %d template(s)", family, len(templates))
    return compiled
