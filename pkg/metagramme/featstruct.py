# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Flat feature structures with shared variables and non-destructive unification.
Every other module of the toolkit (node features, interface filters, lexical
equations, morphological features) works on top of these types.

Classes:
- Var: A feature variable, written ?Name.
- FeatureStructure: Immutable flat map from attribute names to atoms or variables.
- BindingEnv: Persistent union-find over variables, each partition optionally bound to one atom.
- UnificationFailure: Raised when two distinct atoms collide.

Functions:
- unify: Unifies two feature structures under an environment and returns the extended environment.
- unify_value: Unifies two single feature values.
- resolve: Replaces bound variables by their atoms.
- parse_value: Converts the textual form of a value ("sg", "?X") into a value.
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

import re
from collections.abc import Mapping
from dataclasses import dataclass

from metagramme.Auxiliary_functions import DiagnosticError

ATOM_PATTERN = re.compile(r'^[A-Za-z0-9_+\-]+$')


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return f"?{self.name}"


class UnificationFailure(DiagnosticError):
    def __init__(self, attribute, left, right):
        self.attribute = attribute
        self.left = left
        self.right = right
        super().__init__(f"Unification failure on '{attribute}': {left} vs. {right}.")


def check_atom(value):
    """Validates an atom.

    :param value: Candidate atom
    :type value: str
    :return: The atom itself
    :rtype: str
    """
    if not isinstance(value, str) or not ATOM_PATTERN.match(value):
        raise ValueError(f"Invalid atom {value!r}.")
    return value


def parse_value(text):
    """Converts '?X' into Var('X') and anything else into a checked atom."""
    if isinstance(text, Var):
        return text
    if text.startswith('?'):
        return Var(text[1:])
    return check_atom(text)


def format_value(value):
    return str(value)


class FeatureStructure(Mapping):
    """Immutable flat attribute/value map. The empty structure is the unification identity."""

    __slots__ = ('_entries',)

    def __init__(self, entries=None):
        entries = dict(entries or {})
        for attribute, value in entries.items():
            if not isinstance(value, Var):
                check_atom(value)
        self._entries = tuple(sorted(entries.items()))

    def __getitem__(self, key):
        for attribute, value in self._entries:
            if attribute == key:
                return value
        raise KeyError(key)

    def __iter__(self):
        return (attribute for attribute, _ in self._entries)

    def __len__(self):
        return len(self._entries)

    def __hash__(self):
        return hash(self._entries)

    def __eq__(self, other):
        if isinstance(other, FeatureStructure):
            return self._entries == other._entries
        return NotImplemented

    def __repr__(self):
        return f"FeatureStructure({str(self)})"

    def __str__(self):
        return '[' + ', '.join(f"{a}={format_value(v)}" for a, v in self._entries) + ']'

    def variables(self):
        return {v for _, v in self._entries if isinstance(v, Var)}

    def map_vars(self, function):
        """Returns a copy in which every variable v is replaced by function(v)."""
        return FeatureStructure({a: function(v) if isinstance(v, Var) else v
                                 for a, v in self._entries})

    def with_value(self, attribute, value):
        entries = dict(self._entries)
        entries[attribute] = value
        return FeatureStructure(entries)

    def to_json(self):
        return {a: format_value(v) for a, v in self._entries}

    @classmethod
    def from_json(cls, data):
        return cls({a: parse_value(v) for a, v in (data or {}).items()})


EMPTY = FeatureStructure()


class BindingEnv:
    """Persistent union-find over variables. Every operation returns a new
    environment; the receiver is never modified.
    """

    __slots__ = ('_parent', '_value')

    def __init__(self, parent=None, value=None):
        self._parent = parent or {}
        self._value = value or {}

    def register(self, *variables):
        parent = dict(self._parent)
        for var in variables:
            parent.setdefault(var, var)
        return BindingEnv(parent, self._value)

    def find(self, var):
        parent = self._parent
        while parent.get(var, var) != var:
            var = parent[var]
        return var

    def walk(self, value):
        """Follows a value to its atom, or to the representative variable if unbound."""
        if not isinstance(value, Var):
            return value
        root = self.find(value)
        return self._value.get(root, root)

    def is_bound(self, var):
        return self.find(var) in self._value

    def bind(self, var, atom):
        root = self.find(var)
        current = self._value.get(root)
        if current is not None and current != atom:
            raise UnificationFailure(str(var), current, atom)
        value = dict(self._value)
        value[root] = atom
        return BindingEnv(self._parent, value)

    def merge(self, left, right):
        root_left, root_right = self.find(left), self.find(right)
        if root_left == root_right:
            return self
        atom_left = self._value.get(root_left)
        atom_right = self._value.get(root_right)
        if atom_left is not None and atom_right is not None and atom_left != atom_right:
            raise UnificationFailure(str(left), atom_left, atom_right)
        # Smallest name stays representative so resolution is order independent
        new_root, old_root = sorted((root_left, root_right))
        parent = dict(self._parent)
        parent[old_root] = new_root
        parent.setdefault(new_root, new_root)
        value = dict(self._value)
        value.pop(old_root, None)
        bound = atom_left if atom_left is not None else atom_right
        if bound is not None:
            value[new_root] = bound
        return BindingEnv(parent, value)

    def bindings(self):
        """Resolved view {var: atom or representative var} of every registered variable."""
        return {var: self.walk(var) for var in self._parent}


def unify_value(left, right, env, attribute='?'):
    """Unifies two values.

    :return: The unified value (walked) and the extended environment
    :rtype: tuple
    """
    left, right = env.walk(left), env.walk(right)
    if isinstance(left, Var) and isinstance(right, Var):
        env = env.merge(left, right)
        return env.walk(left), env
    if isinstance(left, Var):
        return right, env.bind(left, right)
    if isinstance(right, Var):
        return left, env.bind(right, left)
    if left != right:
        raise UnificationFailure(attribute, left, right)
    return left, env


def unify(a, b, env=None):
    """Unifies two feature structures.

    :param a: Left structure
    :type a: FeatureStructure
    :param b: Right structure
    :type b: FeatureStructure
    :param env: Binding environment, a fresh one if omitted
    :type env: BindingEnv
    :return: The union of attributes with shared values unified, and the extended environment
    :rtype: tuple
    """
    env = env if env is not None else BindingEnv()
    env = env.register(*a.variables(), *b.variables())
    entries = dict(a.items())
    for attribute, value in b.items():
        if attribute in entries:
            try:
                entries[attribute], env = unify_value(entries[attribute], value, env, attribute)
            except UnificationFailure as failure:
                raise UnificationFailure(attribute, failure.left, failure.right) from None
        else:
            entries[attribute] = value
    return FeatureStructure(entries), env


def resolve(fs, env):
    """Replaces every bound variable of fs by its atom; unbound variables are
    replaced by the representative of their partition."""
    return FeatureStructure({a: env.walk(v) for a, v in fs.items()})
