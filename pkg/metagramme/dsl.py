# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Front-end for the three source kinds of a grammar project: metagrammar
classes (.mg), lemma lexicons (.lex) and morphological lexicons (.morph).
One lark grammar with two start symbols covers all of them; a transformer
turns the parse tree into the immutable syntax tree defined here.

Functions:
- parse_metagrammar: Parses the classes of one .mg source.
- parse_lexicon: Parses the <lemma> and <morpho> blocks of one .lex/.morph source.
- check_declarations: Checks that every variable used in a class body is visible.
- pretty_print: Renders class declarations back to source text.
- pretty_print_lexicon: Renders lexicon declarations back to source text.
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

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import (UnexpectedCharacters, UnexpectedEOF,
                             UnexpectedInput, UnexpectedToken, VisitError)

from metagramme.Auxiliary_functions import DiagnosticError
from metagramme.featstruct import EMPTY, FeatureStructure, Var, parse_value, unify

MARKS = ('none', 'anchor', 'subst', 'foot', 'coanchor')
LEAF_MARKS = ('anchor', 'subst', 'foot', 'coanchor')
RELATION_OPS = {'IDOM': 'idom', 'DOM': 'dom', 'IPREC': 'iprec', 'PREC': 'prec'}
OP_SYMBOLS = {'idom': '->', 'dom': '->*', 'iprec': '>>', 'prec': '>>*', 'eq': '='}
LEMMA_FIELDS = ('cat', 'entry', 'fam', 'id')
MORPH_FIELDS = ('cat', 'feats', 'lemma', 'morph')

GRAMMAR = r'''
mg_file: class_decl*
lex_file: lex_class*

class_decl: "class" NAME [imports] [exports] [declares] body
imports: "import" invocation+
exports: "export" VAR+
declares: "declare" VAR+
body: "{" [statement] "}"

statement: conjunction ("|" conjunction)*
conjunction: item (";" item)* ";"?

?item: "{" statement "}"
     | syn_block
     | iface_block
     | invocation
     | ref "=" invocation     -> bound_invocation
     | ref "=" ref            -> node_equation

syn_block: "<syn>" "{" (tree_item ";"?)* "}"
?tree_item: node_decl
          | relation
relation: VAR relop VAR
        | VAR "=" VAR         -> eq_relation
relop: IDOM | DOM | IPREC | PREC

node_decl: "node" [VAR] [node_name] [node_features] [node_children]
node_name: "(" NAME ")"
node_features: "[" (node_feature ("," node_feature)*)? "]"
?node_feature: NAME "=" value -> plain_feature
             | NAME ":" fs    -> block_feature
node_children: "{" (node_decl ";"?)* "}"

iface_block: "<iface>" "{" (feature ("," feature)*)? "}"
fs: "[" (feature ("," feature)*)? "]"
feature: NAME "=" value
value: NAME | VAR | SIGN

invocation: NAME "[" (arg ("," arg)*)? "]" [decoration]
arg: NAME | VAR
decoration: "*=" fs
ref: VAR ["." NAME]

lex_class: "class" NAME "{" lex_block "}"
lex_block: LEX_KIND "{" (lex_item ";"?)* "}"
?lex_item: NAME "<-" lex_value              -> lex_field
         | NAME NAME "=" value              -> lex_filter
         | NAME NAME IDOM STRING "/" NAME   -> lex_coanchor
         | NAME NAME IDOM NAME "=" value    -> lex_equation
lex_value: STRING | NAME | fs

LEX_KIND: "<lemma>" | "<morpho>"
DOM: "->*"
IDOM: "->"
PREC: ">>*"
IPREC: ">>"
SIGN: /[+-]/
VAR: /\?[A-Za-z_][A-Za-z0-9_]*/
NAME: /[A-Za-z0-9_](?:[A-Za-z0-9_+]|-(?!>))*/
STRING: /"[^"\n]*"/
COMMENT: /%[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
'''

_PARSER = Lark(GRAMMAR, start=['mg_file', 'lex_file'], parser='lalr',
               propagate_positions=True, maybe_placeholders=True)


###############################################################################
# DIAGNOSTICS #################################################################
###############################################################################

class GrammarSyntaxError(DiagnosticError):
    def __init__(self, line, col, expected, source='<string>'):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        self.source = source
        super().__init__(f"{source}:{line}:{col}: syntax error, expected one of: "
                         f"{', '.join(self.expected) or '?'}.")


class UndeclaredVariable(DiagnosticError):
    def __init__(self, class_name, var):
        self.class_name = class_name
        self.var = var
        super().__init__(f"Variable ?{var} is used in class {class_name} but never declared.")


class DuplicateClass(DiagnosticError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"Class {name} is defined twice.")


class MissingField(DiagnosticError):
    def __init__(self, block, field_name):
        self.block = block
        self.field = field_name
        super().__init__(f"Block {block} lacks the mandatory field '{field_name}'.")


class DuplicateMorph(DiagnosticError):
    def __init__(self, morph, lemma, cat):
        self.key = (morph, lemma, cat)
        super().__init__(f"Morphological entry ({morph}, {lemma}, {cat}) is defined twice.")


###############################################################################
# SYNTAX TREE #################################################################
###############################################################################

@dataclass(frozen=True)
class NodeRef:
    var: str
    field: Optional[str] = None


@dataclass(frozen=True)
class Invocation:
    cls: str
    args: Tuple[str, ...] = ()
    decoration: Optional[FeatureStructure] = None
    bind_to: Optional[str] = None


@dataclass(frozen=True)
class NodeEquation:
    lhs: NodeRef
    rhs: NodeRef


@dataclass(frozen=True)
class NodeDecl:
    var: Optional[str]
    name: Optional[str]
    cat: Union[str, Var, None]
    mark: str = 'none'
    top: FeatureStructure = EMPTY
    bot: FeatureStructure = EMPTY
    children: Tuple['NodeDecl', ...] = ()


@dataclass(frozen=True)
class Relation:
    lhs: str
    op: str
    rhs: str


@dataclass(frozen=True)
class SynBlock:
    items: Tuple[Union[NodeDecl, Relation], ...]


@dataclass(frozen=True)
class IfaceBlock:
    fs: FeatureStructure


@dataclass(frozen=True)
class Conjunction:
    items: tuple


@dataclass(frozen=True)
class Disjunction:
    items: tuple


@dataclass(frozen=True)
class MgClassDecl:
    name: str
    imports: Tuple[Invocation, ...] = ()
    exports: Tuple[str, ...] = ()
    declares: Tuple[str, ...] = ()
    body: object = None
    line: int = field(default=0, compare=False)
    source: str = field(default='<string>', compare=False)


@dataclass(frozen=True)
class LemmaEntryDecl:
    name: str
    entry: str
    cat: str
    fam: str
    filters: FeatureStructure = EMPTY
    coanchors: Tuple[Tuple[str, str, str], ...] = ()
    equations: Tuple[Tuple[str, FeatureStructure], ...] = ()
    ident: Optional[str] = None
    line: int = field(default=0, compare=False)
    source: str = field(default='<string>', compare=False)

    @property
    def lemma_id(self):
        return self.ident or self.entry

    @property
    def is_mwe(self):
        return bool(self.coanchors)


@dataclass(frozen=True)
class MorphEntryDecl:
    name: str
    morph: str
    lemma: str
    cat: str
    feats: FeatureStructure = EMPTY
    line: int = field(default=0, compare=False)
    source: str = field(default='<string>', compare=False)


###############################################################################
# TRANSFORMER #################################################################
###############################################################################

def _var(token):
    return str(token)[1:]


def _unquote(token):
    text = str(token)
    return text[1:-1] if text.startswith('"') else text


class _ToSyntaxTree(Transformer):

    def __init__(self, source):
        super().__init__()
        self.source = source

    # Metagrammar #############################################################
    def mg_file(self, children):
        return list(children)

    @v_args(meta=True)
    def class_decl(self, meta, children):
        name, imports, exports, declares, body = children
        return MgClassDecl(str(name), imports or (), exports or (), declares or (), body,
                           line=getattr(meta, 'line', 0), source=self.source)

    def imports(self, children):
        return tuple(children)

    def exports(self, children):
        return tuple(_var(token) for token in children)

    declares = exports

    def body(self, children):
        return children[0]

    def statement(self, children):
        return children[0] if len(children) == 1 else Disjunction(tuple(children))

    def conjunction(self, children):
        return children[0] if len(children) == 1 else Conjunction(tuple(children))

    @v_args(meta=True)
    def bound_invocation(self, meta, children):
        ref, invocation = children
        if ref.field is not None:
            raise GrammarSyntaxError(getattr(meta, 'line', 0), getattr(meta, 'column', 0),
                                     ['?Var'], self.source)
        return Invocation(invocation.cls, invocation.args, invocation.decoration, ref.var)

    def node_equation(self, children):
        return NodeEquation(children[0], children[1])

    def syn_block(self, children):
        return SynBlock(tuple(children))

    def relation(self, children):
        lhs, op, rhs = children
        return Relation(_var(lhs), op, _var(rhs))

    def eq_relation(self, children):
        return Relation(_var(children[0]), 'eq', _var(children[1]))

    def relop(self, children):
        return RELATION_OPS[children[0].type]

    def node_decl(self, children):
        var, name, features, kids = children
        cat, mark, top, bot = None, 'none', EMPTY, EMPTY
        extra = {}
        for kind, key, value, token in features or ():
            if kind == 'block':
                if key not in ('top', 'bot'):
                    raise GrammarSyntaxError(token.line, token.column, ['top', 'bot'], self.source)
                if key == 'top':
                    top, _ = unify(top, value)
                else:
                    bot, _ = unify(bot, value)
            elif key == 'cat':
                cat = value
            elif key == 'mark':
                if value not in MARKS:
                    raise GrammarSyntaxError(token.line, token.column, MARKS, self.source)
                mark = value
            elif key == 'name':
                name = name or str(value)
            else:
                extra[key] = value
        if extra:
            top, _ = unify(top, FeatureStructure(extra))
        return NodeDecl(_var(var) if var is not None else None, name, cat, mark, top, bot,
                        kids or ())

    def node_name(self, children):
        return str(children[0])

    def node_features(self, children):
        return list(children)

    def plain_feature(self, children):
        return ('plain', str(children[0]), children[1], children[0])

    def block_feature(self, children):
        return ('block', str(children[0]), children[1], children[0])

    def node_children(self, children):
        return tuple(children)

    def iface_block(self, children):
        return IfaceBlock(FeatureStructure(dict(children)))

    def fs(self, children):
        return FeatureStructure(dict(children))

    def feature(self, children):
        return (str(children[0]), children[1])

    def value(self, children):
        return parse_value(str(children[0]))

    def invocation(self, children):
        name, *args, decoration = children
        return Invocation(str(name), tuple(args), decoration)

    def arg(self, children):
        return str(children[0])

    def decoration(self, children):
        return children[0]

    def ref(self, children):
        var, field_name = children
        return NodeRef(_var(var), str(field_name) if field_name is not None else None)

    # Lexicon #################################################################
    def lex_file(self, children):
        return list(children)

    @v_args(meta=True)
    def lex_class(self, meta, children):
        name, (kind, items) = children
        line = getattr(meta, 'line', 0)
        if kind == '<lemma>':
            return self._lemma(str(name), items, line)
        return self._morph(str(name), items, line)

    def lex_block(self, children):
        return (str(children[0]), list(children[1:]))

    def _keyword(self, token, expected):
        if str(token) != expected:
            raise GrammarSyntaxError(token.line, token.column, [expected], self.source)

    def lex_field(self, children):
        return ('field', children[0], children[1])

    def _fields(self, items, allowed):
        fields = {}
        for kind, key, value in items:
            if kind != 'field':
                continue
            if str(key) not in allowed:
                raise GrammarSyntaxError(key.line, key.column, allowed, self.source)
            fields[str(key)] = value
        return fields

    def lex_value(self, children):
        child = children[0]
        if isinstance(child, FeatureStructure):
            return child
        return _unquote(child)

    def lex_filter(self, children):
        self._keyword(children[0], 'filter')
        return ('filter', str(children[1]), children[2])

    def lex_coanchor(self, children):
        self._keyword(children[0], 'coanchor')
        return ('coanchor', str(children[1]), (_unquote(children[3]), str(children[4])))

    def lex_equation(self, children):
        self._keyword(children[0], 'equation')
        return ('equation', str(children[1]), FeatureStructure({str(children[3]): children[4]}))

    def _lemma(self, name, items, line):
        fields = self._fields(items, LEMMA_FIELDS)
        filters, coanchors, equations = EMPTY, [], []
        for kind, key, value in items:
            if kind == 'field':
                continue
            if kind == 'filter':
                filters, _ = unify(filters, FeatureStructure({key: value}))
            elif kind == 'coanchor':
                coanchors.append((key, value[0], value[1]))
            else:
                equations.append((key, value))
        for required in ('entry', 'cat', 'fam'):
            if required not in fields:
                raise MissingField(name, required)
        return LemmaEntryDecl(name, fields['entry'], fields['cat'], fields['fam'], filters,
                              tuple(coanchors), tuple(equations), fields.get('id'),
                              line=line, source=self.source)

    def _morph(self, name, items, line):
        fields = self._fields(items, MORPH_FIELDS)
        for required in ('morph', 'lemma', 'cat'):
            if required not in fields:
                raise MissingField(name, required)
        feats = fields.get('feats', EMPTY)
        if not isinstance(feats, FeatureStructure):
            raise MissingField(name, 'feats')
        return MorphEntryDecl(name, fields['morph'], fields['lemma'], fields['cat'], feats,
                              line=line, source=self.source)


def _syntax_error(error, text, source):
    line, col = getattr(error, 'line', -1), getattr(error, 'column', -1)
    if line in (None, -1) or col in (None, -1):
        lines = text.split('\n')
        line, col = len(lines), len(lines[-1]) + 1
    if isinstance(error, UnexpectedToken):
        expected = sorted(error.expected)
    elif isinstance(error, UnexpectedCharacters):
        expected = sorted(error.allowed or ())
    elif isinstance(error, UnexpectedEOF):
        expected = sorted(error.expected or ())
    else:
        expected = []
    return GrammarSyntaxError(line, col, expected, source)


def _parse(text, start, source):
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedInput as error:
        raise _syntax_error(error, text, source) from None
    try:
        return _ToSyntaxTree(source).transform(tree)
    except VisitError as error:
        raise error.orig_exc from None


###############################################################################
# OPERATIONS ##################################################################
###############################################################################

def parse_metagrammar(text, source='<string>'):
    """Parses the metagrammar classes of one source text.

    :param text: UTF-8 source text
    :type text: str
    :param source: File name used in diagnostics
    :type source: str
    :return: One declaration per class block, in source order
    :rtype: list of MgClassDecl
    """
    decls = _parse(text, 'mg_file', source)
    seen = set()
    for decl in decls:
        if decl.name in seen:
            raise DuplicateClass(decl.name)
        seen.add(decl.name)
    check_declarations(decls, strict=False)
    return decls


def parse_lexicon(text, source='<string>'):
    """Parses <lemma> and <morpho> blocks, which may be interleaved.

    :return: Lemma declarations and morph declarations, in source order
    :rtype: tuple
    """
    decls = _parse(text, 'lex_file', source)
    lemmas = [decl for decl in decls if isinstance(decl, LemmaEntryDecl)]
    morphs = [decl for decl in decls if isinstance(decl, MorphEntryDecl)]
    return lemmas, morphs


def _walk_statement(statement):
    if isinstance(statement, (Conjunction, Disjunction)):
        for item in statement.items:
            yield from _walk_statement(item)
    elif statement is not None:
        yield statement


def _walk_nodes(items):
    for item in items:
        if isinstance(item, NodeDecl):
            yield item
            yield from _walk_nodes(item.children)


def check_declarations(decls, strict=True):
    """Raises UndeclaredVariable for a variable that is neither declared,
    exported, introduced by a node literal, bound to an invocation, nor
    exported by an imported class. With strict=False, classes importing a
    class outside decls are skipped.
    """
    index = {decl.name: decl for decl in decls}
    for decl in decls:
        visible = set(decl.exports) | set(decl.declares)
        complete = True
        for invocation in decl.imports:
            if invocation.cls in index:
                visible |= set(index[invocation.cls].exports)
            else:
                complete = False
        if not complete and not strict:
            continue
        used = []
        for statement in _walk_statement(decl.body):
            if isinstance(statement, SynBlock):
                for node in _walk_nodes(statement.items):
                    if node.var is not None:
                        visible.add(node.var)
                used += [v for item in statement.items if isinstance(item, Relation)
                         for v in (item.lhs, item.rhs)]
            elif isinstance(statement, Invocation):
                if statement.bind_to is not None:
                    visible.add(statement.bind_to)
                used += [arg[1:] for arg in statement.args if arg.startswith('?')]
            elif isinstance(statement, NodeEquation):
                used += [statement.lhs.var, statement.rhs.var]
        used += [arg[1:] for inv in decl.imports for arg in inv.args if arg.startswith('?')]
        for var in used:
            if var not in visible:
                raise UndeclaredVariable(decl.name, var)


###############################################################################
# PRETTY PRINTING #############################################################
###############################################################################

def _value(value):
    return str(value)


def _fs(fs):
    return '[' + ', '.join(f"{a}={_value(v)}" for a, v in fs.items()) + ']'


def _invocation(invocation):
    text = f"{invocation.cls}[{','.join(invocation.args)}]"
    if invocation.decoration is not None:
        text += f" *= {_fs(invocation.decoration)}"
    if invocation.bind_to is not None:
        text = f"?{invocation.bind_to} = {text}"
    return text


def _ref(ref):
    return f"?{ref.var}" + (f".{ref.field}" if ref.field else '')


def _node(node, indent):
    parts = ['node']
    if node.var is not None:
        parts.append(f"?{node.var}")
    if node.name is not None:
        parts.append(f"({node.name})")
    features = []
    if node.cat is not None:
        features.append(f"cat={_value(node.cat)}")
    if node.mark != 'none':
        features.append(f"mark={node.mark}")
    if len(node.top):
        features.append(f"top:{_fs(node.top)}")
    if len(node.bot):
        features.append(f"bot:{_fs(node.bot)}")
    if features:
        parts.append('[' + ', '.join(features) + ']')
    text = ' ' * indent + ' '.join(parts)
    if node.children:
        inner = '\n'.join(_node(child, indent + 2) for child in node.children)
        text += ' {\n' + inner + '\n' + ' ' * indent + '}'
    return text


def _statement(statement, indent=2):
    pad = ' ' * indent
    if isinstance(statement, (Conjunction, Disjunction)):
        separator = ' ;\n' if isinstance(statement, Conjunction) else '\n' + pad + '| '
        parts = []
        for item in statement.items:
            text = _statement(item, indent + 2)
            if isinstance(item, (Conjunction, Disjunction)):
                text = '{ ' + text.strip() + ' }'
            parts.append(text.strip())
        return pad + separator.join(parts)
    if isinstance(statement, SynBlock):
        lines = []
        for item in statement.items:
            if isinstance(item, NodeDecl):
                lines.append(_node(item, indent + 2))
            else:
                lines.append(' ' * (indent + 2) + f"?{item.lhs} {OP_SYMBOLS[item.op]} ?{item.rhs}")
        return pad + '<syn>{\n' + '\n'.join(lines) + '\n' + pad + '}'
    if isinstance(statement, IfaceBlock):
        return pad + '<iface>{' + _fs(statement.fs)[1:-1] + '}'
    if isinstance(statement, Invocation):
        return pad + _invocation(statement)
    if isinstance(statement, NodeEquation):
        return pad + f"{_ref(statement.lhs)} = {_ref(statement.rhs)}"
    raise TypeError(f"Unknown statement {statement!r}.")


def pretty_print(decls):
    """Renders class declarations as source text that parses back to an
    equal syntax tree."""
    blocks = []
    for decl in decls:
        lines = [f"class {decl.name}"]
        if decl.imports:
            lines.append('import ' + ' '.join(_invocation(i) for i in decl.imports))
        if decl.exports:
            lines.append('export ' + ' '.join(f"?{v}" for v in decl.exports))
        if decl.declares:
            lines.append('declare ' + ' '.join(f"?{v}" for v in decl.declares))
        if decl.body is None:
            lines.append('{ }')
        else:
            lines.append('{\n' + _statement(decl.body) + '\n}')
        blocks.append('\n'.join(lines))
    return '\n\n'.join(blocks) + ('\n' if blocks else '')


def pretty_print_lexicon(lemmas, morphs):
    blocks = []
    for lemma in lemmas:
        items = [f'entry <- "{lemma.entry}"', f"cat <- {lemma.cat}", f"fam <- {lemma.fam}"]
        if lemma.ident is not None:
            items.append(f'id <- "{lemma.ident}"')
        items += [f"filter {a} = {_value(v)}" for a, v in lemma.filters.items()]
        items += [f'coanchor {node} -> "{form}"/{cat}' for node, form, cat in lemma.coanchors]
        items += [f"equation {node} -> {a}={_value(v)}"
                  for node, fs in lemma.equations for a, v in fs.items()]
        blocks.append(f"class {lemma.name} {{\n<lemma> {{\n " + ';\n '.join(items) + ' }}')
    for morph in morphs:
        items = [f'morph <- "{morph.morph}"', f'lemma <- "{morph.lemma}"', f"cat <- {morph.cat}"]
        if len(morph.feats):
            items.append(f"feats <- {_fs(morph.feats)}")
        blocks.append(f"class {morph.name} {{\n<morpho> {{\n " + ';\n '.join(items) + ' }}')
    return '\n'.join(blocks) + ('\n' if blocks else '')
