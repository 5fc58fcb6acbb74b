# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Expansion of metagrammar classes into flat tree descriptions. Every
invocation creates a fresh class instance with its own variable names;
exported variables are shared with the invoker when the invoker names them
too. Disjunctions are distributed and conjunctions multiplied out, iface
structures being unified along each path.

Functions:
- invocation_graph: Builds the class invocation graph of a grammar.
- expand: Expands a class into its list of flat descriptions.
- build_family_table: Maps family names to the classes that root them.
- describe: Renders one description as a debug dump record.
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
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple, Union

import networkx as nx

from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.dsl import (Conjunction, Disjunction, IfaceBlock, Invocation, NodeDecl,
                            NodeEquation, Relation, SynBlock)
from metagramme.featstruct import (EMPTY, BindingEnv, FeatureStructure, UnificationFailure,
                                   Var, resolve, unify, unify_value)

logger = logging.getLogger(__name__)

DEFAULT_DESCRIPTION_CAP = 10000


###############################################################################
# DIAGNOSTICS #################################################################
###############################################################################

class UnknownClass(DiagnosticError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Class {name} is invoked but never defined.")


class CyclicImport(DiagnosticError):
    def __init__(self, path):
        self.path = tuple(path)
        super().__init__(f"Cyclic invocation: {' -> '.join(self.path)}.")


class ArityMismatch(DiagnosticError):
    def __init__(self, class_name, expected, got):
        self.class_name = class_name
        self.expected = expected
        self.got = got
        super().__init__(f"Class {class_name} exports {expected} node(s) but is invoked with {got}.")


class UnknownExport(DiagnosticError):
    def __init__(self, class_name, var):
        self.class_name = class_name
        self.var = var
        super().__init__(f"Class {class_name} refers to ?{var}, which is not exported there.")


class ExportCollision(DiagnosticError):
    def __init__(self, class_name, var):
        self.class_name = class_name
        self.var = var
        super().__init__(f"In class {class_name}, two conjuncts export ?{var} without sharing it; "
                         f"declare ?{var} to equate them.")


class DescriptionCapExceeded(DiagnosticError):
    def __init__(self, class_name, cap):
        self.class_name = class_name
        self.cap = cap
        super().__init__(f"Expansion of class {class_name} exceeds {cap} descriptions.")


class UnknownFamily(DiagnosticError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Family {name} does not name a class of the grammar.")


###############################################################################
# DESCRIPTIONS ################################################################
###############################################################################

@dataclass(frozen=True)
class DescNode:
    id: str
    cat: Union[str, Var, None] = None
    mark: str = 'none'
    top: FeatureStructure = EMPTY
    bot: FeatureStructure = EMPTY
    name: Optional[str] = None


@dataclass(frozen=True)
class FlatDescription:
    nodes: Tuple[DescNode, ...]
    constraints: Tuple[Relation, ...]
    iface: FeatureStructure
    env: BindingEnv = field(compare=False)
    provenance: Tuple[str, ...] = ()

    def node(self, node_id):
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)


class NodeClash(Exception):
    """Two node records cannot denote the same node (mark or public name differ)."""


@dataclass
class _Partial:
    """One disjunct path while a class instance is being expanded."""
    nodes: Dict[str, DescNode] = field(default_factory=dict)
    constraints: frozenset = frozenset()
    iface: FeatureStructure = EMPTY
    env: BindingEnv = field(default_factory=BindingEnv)
    provenance: Tuple[str, ...] = ()
    loose: Dict[str, str] = field(default_factory=dict)
    bound: Dict[str, Dict[str, str]] = field(default_factory=dict)
    pending: Tuple[NodeEquation, ...] = ()
    exports: Dict[str, str] = field(default_factory=dict)


def _merge_envs(left, right):
    env = left.register(*right.bindings())
    for var, value in right.bindings().items():
        if isinstance(value, Var):
            env = env.merge(var, value)
        else:
            env = env.bind(var, value)
    return env


def merge_nodes(old, new, env):
    """Merges two records of one node; raises UnificationFailure or NodeClash."""
    cat = old.cat
    if old.cat is None:
        cat = new.cat
    elif new.cat is not None:
        cat, env = unify_value(old.cat, new.cat, env, 'cat')
    if old.mark != 'none' and new.mark != 'none' and old.mark != new.mark:
        raise NodeClash(f"marks {old.mark}/{new.mark} on {old.id}")
    if old.name and new.name and old.name != new.name:
        raise NodeClash(f"names {old.name}/{new.name} on {old.id}")
    top, env = unify(old.top, new.top, env)
    bot, env = unify(old.bot, new.bot, env)
    mark = old.mark if old.mark != 'none' else new.mark
    return DescNode(old.id, cat, mark, top, bot, old.name or new.name), env


def _add_node(nodes, node, env):
    if node.id in nodes:
        nodes[node.id], env = merge_nodes(nodes[node.id], node, env)
    else:
        nodes[node.id] = node
    return env


def _combine(left, right, class_name):
    for name in left.loose.keys() & right.loose.keys():
        if left.loose[name] != right.loose[name]:
            raise ExportCollision(class_name, name)
    env = _merge_envs(left.env, right.env)
    nodes = dict(left.nodes)
    for node in right.nodes.values():
        env = _add_node(nodes, node, env)
    iface, env = unify(left.iface, right.iface, env)
    provenance = left.provenance + tuple(c for c in right.provenance if c not in left.provenance)
    return _Partial(nodes, left.constraints | right.constraints, iface, env, provenance,
                    {**left.loose, **right.loose}, {**left.bound, **right.bound},
                    left.pending + right.pending)


###############################################################################
# EXPANSION ###################################################################
###############################################################################

def _invocations(statement):
    if isinstance(statement, (Conjunction, Disjunction)):
        for item in statement.items:
            yield from _invocations(item)
    elif isinstance(statement, Invocation):
        yield statement


def _body_variables(statement):
    if isinstance(statement, (Conjunction, Disjunction, SynBlock)):
        for item in statement.items:
            yield from _body_variables(item)
    elif isinstance(statement, NodeDecl):
        if statement.var is not None:
            yield statement.var
        for child in statement.children:
            yield from _body_variables(child)
    elif isinstance(statement, Relation):
        yield statement.lhs
        yield statement.rhs
    elif isinstance(statement, NodeEquation):
        for ref in (statement.lhs, statement.rhs):
            if ref.field is None:
                yield ref.var
    elif isinstance(statement, Invocation):
        for arg in statement.args:
            if arg.startswith('?'):
                yield arg[1:]


def invocation_graph(grammar):
    """Returns a networkx DiGraph with one node per class and an edge C1 -> C2
    whenever C1 imports or invokes C2.

    :param grammar: Class declarations of the project
    :type grammar: list of MgClassDecl
    :rtype: networkx.DiGraph
    """
    graph = nx.DiGraph()
    for decl in grammar:
        graph.add_node(decl.name)
    for decl in grammar:
        for invocation in itertools.chain(decl.imports, _invocations(decl.body)):
            graph.add_edge(decl.name, invocation.cls)
    return graph


def _check_graph(class_name, grammar):
    index = {decl.name for decl in grammar}
    if class_name not in index:
        raise UnknownClass(class_name)
    graph = invocation_graph(grammar)
    reachable = nx.descendants(graph, class_name) | {class_name}
    for name in sorted(reachable):
        if name not in index:
            raise UnknownClass(name)
    try:
        cycle = nx.find_cycle(graph.subgraph(reachable), source=class_name)
    except nx.NetworkXNoCycle:
        return
    raise CyclicImport([edge[0] for edge in cycle] + [cycle[-1][1]])


class _Instance:
    """Scope of one class instance: its variable map and fresh-name counter."""

    def __init__(self, decl, number, scope):
        self.decl = decl
        self.prefix = f"{decl.name}.{number}"
        self.scope = scope
        self.anonymous = 0

    def ident(self, var):
        if var not in self.scope:
            self.scope[var] = f"{self.prefix}.{var}"
        return self.scope[var]

    def fresh(self):
        self.anonymous += 1
        return f"{self.prefix}.#{self.anonymous}"

    def rename(self, value):
        if isinstance(value, Var):
            return Var(f"{self.prefix}.{value.name}")
        return value

    def rename_fs(self, fs):
        return fs.map_vars(self.rename)


class _Expander:

    def __init__(self, grammar, cap):
        self.index = {decl.name: decl for decl in grammar}
        self.cap = cap
        self.counter = itertools.count(1)

    def expand_class(self, name, passed, provenance):
        decl = self.index[name]
        instance = _Instance(decl, next(self.counter), dict(passed))
        for var in decl.exports + decl.declares:
            instance.ident(var)
        for invocation in decl.imports:
            for var in self.index[invocation.cls].exports:
                instance.ident(var)
        # every variable of the body is scoped before any conjunct is expanded
        if decl.body is not None:
            for var in _body_variables(decl.body):
                instance.ident(var)
        provenance = provenance + (name,)
        statements = list(decl.imports)
        if decl.body is not None:
            statements.append(decl.body)
        partials = [_Partial(provenance=provenance)]
        for statement in statements:
            partials = self._product(partials, self.statement(statement, instance, provenance),
                                     decl.name)
        finished = []
        for partial in partials:
            finished.append(self._close(partial, instance))
        return finished

    def _product(self, lefts, rights, class_name):
        result = []
        for left, right in itertools.product(lefts, rights):
            try:
                result.append(_combine(left, right, class_name))
            except (UnificationFailure, NodeClash) as failure:
                logger.debug("%s: conjunction eliminated (%s)", class_name, failure)
                continue
            if len(result) > self.cap:
                raise DescriptionCapExceeded(class_name, self.cap)
        return result

    def _close(self, partial, instance):
        constraints = set(partial.constraints)
        for equation in partial.pending:
            lhs = self._deref(equation.lhs, partial, instance)
            rhs = self._deref(equation.rhs, partial, instance)
            constraints.add(Relation(lhs, 'eq', rhs))
        exports = {var: instance.scope[var] for var in instance.decl.exports}
        return replace(partial, constraints=frozenset(constraints), loose={}, bound={},
                       pending=(), exports=exports)

    def _deref(self, ref, partial, instance):
        if ref.field is None:
            return instance.ident(ref.var)
        bound = partial.bound.get(ref.var)
        if bound is None or ref.field not in bound:
            raise UnknownExport(instance.decl.name, ref.field)
        return bound[ref.field]

    def statement(self, statement, instance, provenance):
        if isinstance(statement, Disjunction):
            result = []
            for item in statement.items:
                result += self.statement(item, instance, provenance)
                if len(result) > self.cap:
                    raise DescriptionCapExceeded(instance.decl.name, self.cap)
            return result
        if isinstance(statement, Conjunction):
            partials = [_Partial(provenance=provenance)]
            for item in statement.items:
                partials = self._product(partials, self.statement(item, instance, provenance),
                                         instance.decl.name)
            return partials
        if isinstance(statement, SynBlock):
            return self._syn_block(statement, instance, provenance)
        if isinstance(statement, IfaceBlock):
            return [_Partial(iface=instance.rename_fs(statement.fs),
                             env=BindingEnv().register(*instance.rename_fs(statement.fs).variables()),
                             provenance=provenance)]
        if isinstance(statement, Invocation):
            return self._invoke(statement, instance, provenance)
        if isinstance(statement, NodeEquation):
            return [_Partial(provenance=provenance, pending=(statement,))]
        raise TypeError(f"Unknown statement {statement!r}.")

    def _syn_block(self, block, instance, provenance):
        nodes, constraints, env = {}, set(), BindingEnv()

        def visit(decl, parent):
            nonlocal env
            node_id = instance.ident(decl.var) if decl.var is not None else instance.fresh()
            node = DescNode(node_id, instance.rename(decl.cat), decl.mark,
                            instance.rename_fs(decl.top), instance.rename_fs(decl.bot), decl.name)
            env = env.register(*node.top.variables(), *node.bot.variables())
            if isinstance(node.cat, Var):
                env = env.register(node.cat)
            env = _add_node(nodes, node, env)
            if parent is not None:
                constraints.add(Relation(parent, 'idom', node_id))
            previous = None
            for child in decl.children:
                child_id = visit(child, node_id)
                if previous is not None:
                    constraints.add(Relation(previous, 'prec', child_id))
                previous = child_id
            return node_id

        try:
            for item in block.items:
                if isinstance(item, NodeDecl):
                    visit(item, None)
                else:
                    constraints.add(Relation(instance.ident(item.lhs), item.op,
                                             instance.ident(item.rhs)))
        except (UnificationFailure, NodeClash) as failure:
            logger.debug("%s: tree block is inconsistent (%s)", instance.decl.name, failure)
            return []
        return [_Partial(nodes, frozenset(constraints), EMPTY, env, provenance)]

    def _invoke(self, invocation, instance, provenance):
        callee = self.index[invocation.cls]
        if len(invocation.args) > len(callee.exports):
            raise ArityMismatch(callee.name, len(callee.exports), len(invocation.args))
        passed = {var: instance.scope[var] for var in callee.exports if var in instance.scope}
        public_names, positional = {}, set()
        for var, arg in zip(callee.exports, invocation.args):
            positional.add(var)
            if arg.startswith('?'):
                passed[var] = instance.ident(arg[1:])
            else:
                passed.pop(var, None)
                public_names[var] = arg
        decoration = None
        if invocation.decoration is not None:
            decoration = instance.rename_fs(invocation.decoration)
        result = []
        for partial in self.expand_class(callee.name, passed, provenance):
            try:
                for var, name in public_names.items():
                    node_id = partial.exports[var]
                    partial.env = _add_node(partial.nodes, DescNode(node_id, name=name),
                                            partial.env)
                if decoration is not None:
                    partial.iface, partial.env = unify(partial.iface, decoration, partial.env)
            except (UnificationFailure, NodeClash) as failure:
                logger.debug("%s: invocation of %s eliminated (%s)", instance.decl.name,
                             callee.name, failure)
                continue
            partial.loose = {var: node_id for var, node_id in partial.exports.items()
                             if var not in instance.scope and var not in positional}
            if invocation.bind_to is not None:
                partial.bound = {invocation.bind_to: dict(partial.exports)}
            partial.provenance = provenance + tuple(c for c in partial.provenance
                                                    if c not in provenance)
            result.append(partial)
        return result


def _finish(partial):
    nodes = dict(partial.nodes)
    for relation in partial.constraints:
        for node_id in (relation.lhs, relation.rhs):
            nodes.setdefault(node_id, DescNode(node_id))
    constraints = tuple(sorted(partial.constraints, key=lambda r: (r.lhs, r.op, r.rhs)))
    return FlatDescription(tuple(nodes[key] for key in sorted(nodes)), constraints,
                           partial.iface, partial.env, partial.provenance)


def expand(class_name, grammar, cap=None):
    """Expands a class into flat tree descriptions, one per disjunct path.

    :param class_name: Name of the class to expand
    :type class_name: str
    :param grammar: All class declarations of the project
    :type grammar: list of MgClassDecl
    :param cap: Maximum number of descriptions, default 10000
    :type cap: int
    :return: The flat descriptions, in expansion order
    :rtype: list of FlatDescription
    """
    _check_graph(class_name, grammar)
    expander = _Expander(grammar, cap or DEFAULT_DESCRIPTION_CAP)
    return [_finish(partial) for partial in expander.expand_class(class_name, {}, ())]


def build_family_table(grammar, lemmas=(), declared=()):
    """Registers every family named by a lemma or listed in the manifest.

    :param grammar: All class declarations of the project
    :type grammar: list of MgClassDecl
    :param lemmas: Lemma declarations whose 'fam' fields are linked
    :type lemmas: list of LemmaEntryDecl
    :param declared: Family names listed explicitly
    :type declared: list of str
    :return: Mapping family name -> class name
    :rtype: dict
    """
    index = {decl.name for decl in grammar}
    table = {}
    for name in list(declared) + [lemma.fam for lemma in lemmas]:
        if name not in index:
            raise UnknownFamily(name)
        table[name] = name
    return dict(sorted(table.items()))


def describe(description):
    lines = ['description ' + ' > '.join(description.provenance)]
    env = description.env
    for node in description.nodes:
        cat = env.walk(node.cat) if node.cat is not None else '_'
        text = f"  node {node.id} cat={cat} mark={node.mark}"
        if node.name:
            text += f" name={node.name}"
        text += f" top={resolve(node.top, env)} bot={resolve(node.bot, env)}"
        lines.append(text)
    for relation in description.constraints:
        lines.append(f"  {relation.lhs} {relation.op} {relation.rhs}")
    lines.append(f"  iface {resolve(description.iface, env)}")
    return '\n'.join(lines)
