# -*- coding: utf-8 -*-
import functools
import itertools
import os

import numpy as np
import pytest

from options import var_paths
from metagramme.dsl import Relation, parse_metagrammar
from metagramme.featstruct import BindingEnv, EMPTY, UnificationFailure, Var
from metagramme.fcns_read import read_text
from metagramme.resolver import DescNode, FlatDescription, NodeClash, expand, merge_nodes
from metagramme.treesolver import (IllFormedDescription, ModelStatistics, TreeTemplate,
                                   VariableCapExceeded, canonical_string, compile_family, shape,
                                   solve)

LEAF_MARKS = ('anchor', 'subst', 'foot', 'coanchor')


def description(nodes, relations):
    return FlatDescription(tuple(DescNode(*node) for node in nodes),
                           tuple(Relation(*relation) for relation in relations), EMPTY,
                           BindingEnv(), ('test',))


def render(template, index=0):
    node = template.nodes[index]
    kids = ''.join(' ' + render(template, child) for child in template.children[index])
    return f"({node.cat} {node.mark}{kids})"


###############################################################################
# BRUTE-FORCE ORACLE ##########################################################
###############################################################################

def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        for index in range(len(partition)):
            yield partition[:index] + [[first] + partition[index]] + partition[index + 1:]
        yield [[first]] + partition


@functools.lru_cache(maxsize=None)
def parent_vectors(size):
    """Parent vectors (-1 for the root) of every rooted tree over 0..size-1."""
    vectors = []
    for parents in itertools.product(range(-1, size), repeat=size):
        if parents.count(-1) != 1 or any(parents[c] == c for c in range(size)):
            continue
        acyclic = True
        for cell in range(size):
            current, steps = parents[cell], 0
            while current != -1 and steps <= size:
                current, steps = parents[current], steps + 1
            acyclic = acyclic and current == -1
        if acyclic:
            vectors.append(parents)
    return tuple(vectors)


def ordered_trees(size, cells, rels):
    """(parents, children) of every ordered tree whose parent vector already
    satisfies the dominance constraints."""
    for parents in parent_vectors(size):
        if any(cells[parents[c]][1] in LEAF_MARKS for c in range(size) if parents[c] != -1):
            continue
        if any(op == 'idom' and parents[r] != l for l, op, r in rels):
            continue
        if any(op == 'dom' and l not in ancestors(parents, r) for l, op, r in rels):
            continue
        kids = [[c for c in range(size) if parents[c] == p] for p in range(size)]
        for orders in itertools.product(*(itertools.permutations(k) for k in kids)):
            yield parents, [list(order) for order in orders]


def oracle(nodes, relations):
    """Renders of all minimal models, computed without the solver."""
    ids = [node[0] for node in nodes]
    for size in range(1, len(nodes) + 1):
        found = set()
        for partition in set_partitions(list(range(len(nodes)))):
            if len(partition) != size:
                continue
            block = {ids[m]: b for b, members in enumerate(partition) for m in members}
            if any((op == 'eq') != (block[l] == block[r]) and (op == 'eq' or block[l] == block[r])
                   for l, op, r in relations):
                continue
            cells = []
            for members in partition:
                cat, mark = None, 'none'
                for m in members:
                    _, node_cat, node_mark = nodes[m]
                    if node_cat is not None:
                        cat = node_cat if cat in (None, node_cat) else False
                    if node_mark != 'none':
                        mark = node_mark if mark in ('none', node_mark) else False
                cells.append((cat, mark))
            if any(cat in (None, False) or mark is False for cat, mark in cells):
                continue
            marks = [mark for _, mark in cells]
            if marks.count('anchor') != 1 or marks.count('foot') > 1:
                continue
            rels = [(block[l], op, block[r]) for l, op, r in relations if op != 'eq']
            for parents, children in ordered_trees(size, cells, rels):
                if model_holds(parents, children, rels, cells):
                    found.add(render_cells(cells, parents, children))
        if found:
            return found
    return set()


def ancestors(parents, cell):
    chain, current = [], parents[cell]
    while current != -1:
        chain.append(current)
        current = parents[current]
    return chain


def preorder(parents, children):
    order, stack = [], [parents.index(-1)]
    while stack:
        cell = stack.pop()
        order.append(cell)
        stack.extend(reversed(children[cell]))
    return order


def model_holds(parents, children, rels, cells):
    position = {c: i for i, c in enumerate(preorder(parents, children))}
    for l, op, r in rels:
        if op == 'idom' and parents[r] != l:
            return False
        if op == 'dom' and l not in ancestors(parents, r):
            return False
        if op == 'prec' and (l in ancestors(parents, r) or r in ancestors(parents, l)
                             or position[l] > position[r]):
            return False
        if op == 'iprec':
            if parents[l] == -1 or parents[l] != parents[r]:
                return False
            siblings = children[parents[l]]
            if siblings.index(r) != siblings.index(l) + 1:
                return False
    root = parents.index(-1)
    for c, (cat, mark) in enumerate(cells):
        if mark == 'foot' and cat != cells[root][0]:
            return False
    return True


def render_cells(cells, parents, children):
    def visit(c):
        kids = ''.join(' ' + visit(k) for k in children[c])
        return f"({cells[c][0]} {cells[c][1]}{kids})"
    return visit(parents.index(-1))


def random_description(rng):
    size = int(rng.integers(2, 7))
    anchor = int(rng.integers(size))
    nodes = []
    for index in range(size):
        cat = [None, 'a', 'b', 'b'][int(rng.integers(4))]
        if index == anchor:
            mark = 'anchor'
        else:
            mark = ['none', 'none', 'none', 'subst', 'foot'][int(rng.integers(5))]
        nodes.append((f"x{index}", cat, mark))
    relations = set()
    for _ in range(int(rng.integers(1, size + 2))):
        lhs, rhs = rng.choice(size, 2, replace=False)
        op = ['idom', 'idom', 'dom', 'prec', 'iprec', 'eq'][int(rng.integers(6))]
        if op in ('idom', 'dom') and lhs > rhs:
            lhs, rhs = rhs, lhs
        relations.add((f"x{lhs}", op, f"x{rhs}"))
    return nodes, sorted(relations)


def feature_text(fs, env):
    values = {attribute: env.walk(fs[attribute]) for attribute in fs}
    return ','.join(f"{a}={'?' if isinstance(v, Var) else v}" for a, v in values.items())


def keyed_render(cells, parents, children, iface):
    def visit(c):
        cat, mark, name, top, bot = cells[c]
        kids = ''.join(' ' + visit(k) for k in children[c])
        return f"({cat} {mark} {name} [{top}] [{bot}]{kids})"
    kind = 'auxiliary' if any(cell[1] == 'foot' for cell in cells) else 'initial'
    return f"{kind} {visit(parents.index(-1))} [{iface}]"


def template_key(template):
    env = BindingEnv()
    cells = [(n.cat, n.mark, n.name, feature_text(n.top, env), feature_text(n.bot, env))
             for n in template.nodes]
    parents = [-1 if p is None else p for p in template.parent]
    return keyed_render(cells, parents, [list(c) for c in template.children],
                        feature_text(template.iface, env))


def is_tree(parents):
    if parents.count(-1) != 1:
        return False
    for cell in range(len(parents)):
        current, steps = parents[cell], 0
        while current != -1 and steps <= len(parents):
            current, steps = parents[current], steps + 1
        if current != -1:
            return False
    return True


def grown_partitions(nodes, apart, env):
    """Every partition of nodes into blocks that unify, grown one node at a time."""
    found = []

    def grow(index, blocks, env):
        if index == len(nodes):
            found.append((blocks, env))
            return
        for b, (members, node) in enumerate(blocks):
            if any(frozenset((m, index)) in apart for m in members):
                continue
            try:
                merged, extended = merge_nodes(node, nodes[index], env)
            except (UnificationFailure, NodeClash):
                continue
            grow(index + 1, blocks[:b] + [(members + (index,), merged)] + blocks[b + 1:],
                 extended)
        grow(index + 1, blocks + [((index,), nodes[index])], env)

    grow(0, [], env)
    return found


def full_oracle(d):
    """Keys of every minimal model of a description with features. Cells without
    an idom parent try every parent; all sibling orders are tried."""
    nodes = list(d.nodes)
    position = {node.id: i for i, node in enumerate(nodes)}
    rels = [(position[r.lhs], r.op, position[r.rhs]) for r in d.constraints]
    apart = {frozenset((l, r)) for l, op, r in rels if op != 'eq'}
    by_size = {}
    for blocks, env in grown_partitions(nodes, apart, d.env):
        block = {m: b for b, (members, _) in enumerate(blocks) for m in members}
        if any(block[l] != block[r] for l, op, r in rels if op == 'eq'):
            continue
        cats = [env.walk(node.cat) for _, node in blocks]
        marks = [node.mark for _, node in blocks]
        if any(cat is None or isinstance(cat, Var) for cat in cats):
            continue
        if marks.count('anchor') != 1 or marks.count('foot') > 1:
            continue
        by_size.setdefault(len(blocks), []).append((blocks, env, block))
    for size in sorted(by_size):
        keys = set()
        for blocks, env, block in by_size[size]:
            cells = [(env.walk(node.cat), node.mark, node.name, feature_text(node.top, env),
                      feature_text(node.bot, env)) for _, node in blocks]
            cell_rels = [(block[l], op, block[r]) for l, op, r in rels if op != 'eq']
            forced = {}
            for l, op, r in cell_rels:
                if op == 'idom':
                    forced.setdefault(r, set()).add(l)
            if any(len(p) > 1 or cells[next(iter(p))][1] in LEAF_MARKS for p in forced.values()):
                continue
            options = [list(forced[c]) if c in forced else
                       [-1] + [p for p in range(size) if p != c and cells[p][1] not in LEAF_MARKS]
                       for c in range(size)]
            for parents in itertools.product(*options):
                if not is_tree(list(parents)):
                    continue
                kids = [[c for c in range(size) if parents[c] == p] for p in range(size)]
                for orders in itertools.product(*(itertools.permutations(k) for k in kids)):
                    children = [list(order) for order in orders]
                    if model_holds(list(parents), children, cell_rels,
                                   [cell[:2] for cell in cells]):
                        keys.add(keyed_render(cells, list(parents), children,
                                              feature_text(d.iface, env)))
        if keys:
            return keys
    return set()


###############################################################################
# TESTS #######################################################################
###############################################################################

class TestSolve:

    def test_single_model(self):
        d = description([('s', 's'), ('n', 'n', 'subst'), ('v', 'v', 'anchor')],
                        [('s', 'idom', 'n'), ('s', 'idom', 'v'), ('n', 'prec', 'v')])
        templates = solve(d)
        assert [shape(t) for t in templates] == ['(S (N↓) (V◇))']
        assert templates[0].kind == 'initial'

    def test_unordered_siblings_give_every_linearization(self):
        d = description([('s', 's'), ('n', 'n', 'subst'), ('v', 'v', 'anchor')],
                        [('s', 'idom', 'n'), ('s', 'idom', 'v')])
        assert sorted(shape(t) for t in solve(d)) == ['(S (N↓) (V◇))', '(S (V◇) (N↓))']

    def test_shared_parent_is_identified(self):
        d = description([('s1', 's'), ('s2', 's'), ('v', 'v', 'anchor')],
                        [('s1', 'idom', 'v'), ('s2', 'idom', 'v')])
        templates = solve(d)
        assert len(templates) == 1
        assert templates[0].root.members == ('s1', 's2')

    def test_minimality(self):
        # the two s nodes could stay apart, the minimal model merges them
        d = description([('s1', 's'), ('s2', 's'), ('v', 'v', 'anchor')],
                        [('s1', 'dom', 'v'), ('s2', 'dom', 'v')])
        assert [len(t.nodes) for t in solve(d)] == [2]

    def test_auxiliary_tree(self):
        d = description([('r', 'n'), ('a', 'a', 'anchor'), ('f', 'n', 'foot')],
                        [('r', 'idom', 'a'), ('r', 'idom', 'f'), ('a', 'iprec', 'f')])
        templates = solve(d)
        assert [shape(t) for t in templates] == ['(N (A◇) (N*))']
        assert templates[0].kind == 'auxiliary'

    def test_foot_category_must_match_root(self):
        d = description([('r', 's'), ('a', 'a', 'anchor'), ('f', 'n', 'foot')],
                        [('r', 'idom', 'a'), ('r', 'idom', 'f')])
        assert solve(d) == []

    def test_leaves_take_no_children(self):
        d = description([('n', 'n', 'subst'), ('v', 'v', 'anchor')], [('n', 'idom', 'v')])
        assert solve(d) == []

    def test_equality_clash_is_unsatisfiable(self):
        d = description([('n', 'n'), ('v', 'v', 'anchor')], [('n', 'eq', 'v')])
        assert solve(d) == []

    def test_dominance_cycle(self):
        d = description([('a', 'a'), ('b', 'b', 'anchor')], [('a', 'dom', 'b'), ('b', 'idom', 'a')])
        with pytest.raises(IllFormedDescription):
            solve(d)

    def test_variable_cap(self):
        d = description([('s', 's'), ('n', 'n', 'subst'), ('v', 'v', 'anchor')], [])
        with pytest.raises(VariableCapExceeded) as error:
            solve(d, variable_cap=2)
        assert (error.value.count, error.value.cap) == (3, 2)

    def test_statistics(self):
        stats = ModelStatistics()
        d = description([('s', 's'), ('n', 'n', 'subst'), ('v', 'v', 'anchor')],
                        [('s', 'idom', 'n'), ('s', 'idom', 'v'), ('n', 'prec', 'v')])
        solve(d, stats=stats)
        assert stats.descriptions_in == 1
        assert stats.models_out == 1
        assert stats.eliminated_by['precedence'] >= 1

    def test_features_use_canonical_variables(self):
        grammar = parse_metagrammar("""
        class T { <syn>{ node [cat=s] { node [cat=n, mark=subst, top:[num=?Agr]]
                                        node [cat=v, mark=anchor, top:[num=?Agr]] } } }
        """)
        template = solve(expand('T', grammar)[0])[0]
        assert template.nodes[1].top['num'] == Var('1')
        assert template.nodes[2].top['num'] == Var('1')

    def test_json_round_trip(self):
        d = description([('r', 'n'), ('a', 'a', 'anchor'), ('f', 'n', 'foot')],
                        [('r', 'idom', 'a'), ('r', 'idom', 'f'), ('a', 'prec', 'f')])
        template = solve(d)[0]
        assert TreeTemplate.from_json(template.to_json()) == template


class TestOracle:

    def test_random_descriptions_match_brute_force(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            nodes, relations = random_description(rng)
            expected = oracle(nodes, relations)
            try:
                found = {render(t) for t in solve(description(nodes, relations))}
            except IllFormedDescription:
                found = set()
            assert found == expected, (nodes, relations)


class TestBundledGrammar:

    EXPECTED_SHAPES = {
        'n0Vn1': ['(S (N↓) (VN (V◇)) (N↓))', '(S (VN (CL↓) (V◇)) (N↓))',
                  '(S (N↓) (VN (CL↓) (V◇)))'],
        'mwen0Vn1': ['(S (N↓) (VN (V◇)) (N (D◆) (N◆)))'],
    }

    @pytest.mark.parametrize('family', sorted(EXPECTED_SHAPES))
    def test_expected_shapes(self, compiled, family):
        shapes = {shape(t) for t in compiled[family]}
        for expected in self.EXPECTED_SHAPES[family]:
            assert expected in shapes

    def test_golden_family_shapes(self, compiled):
        golden = read_text(os.path.join(var_paths.golden_dir, 'n0ClV.shapes')).split('\n')
        assert sorted({shape(t) for t in compiled['n0ClV']}) == [g for g in golden if g]

    def test_templates_are_ordered_and_unique(self, compiled):
        for family, templates in compiled.items():
            keys = [canonical_string(t) for t in templates]
            assert keys == sorted(set(keys)), family
            assert all(t.family == family for t in templates)

    def test_compile_family_is_deterministic(self, project, compiled):
        again = compile_family('n0ClV', project.grammar)
        assert [t.to_json() for t in again] == [t.to_json() for t in compiled['n0ClV']]

    def test_statistics_are_collected(self, compiled, compile_stats):
        assert compile_stats.descriptions_in > 0
        assert compile_stats.models_out >= sum(len(t) for t in compiled.values())

    def test_mwe_family_matches_oracle(self, project, compiled):
        expected = set()
        for d in expand('mwen0Vn1', project.grammar):
            expected |= full_oracle(d)
        assert {template_key(t) for t in compiled['mwen0Vn1']} == expected
        assert len(compiled['mwen0Vn1']) == len(expected)
