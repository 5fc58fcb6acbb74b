# -*- coding: utf-8 -*-
"""
Author: 4wardEnergy Research GmbH
Date: 2024-05-14
Version: 1.0

Command-line entry of the metagrammar compiler and MWE-aware parser.

Commands:
- compile -m MANIFEST [-o GRAMMAR.json]: Compiles a project; writes the model statistics.
- parse (-g GRAMMAR.json | -m MANIFEST) (-s SENTENCE | -c CORPUS.tsv): Parses sentences.
- anchor (-g GRAMMAR.json | -m MANIFEST) -w FORM: Lists the trees anchored by a form.
- stats -a OLD.manifest -b NEW.manifest: Compares the size of two project versions.
- golden [-d DIRECTORY]: Regenerates the golden files of the bundled project.

Exit codes: 0 success, 1 input diagnostics, 2 internal error.

Functions:
- build_parser: Defines the command-line interface.
- main: Runs one command and returns its exit code.
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

import os, sys
project_dir = os.path.dirname(os.path.abspath(__file__))
# Add the project directory to the system path
sys.path.append(project_dir)

import argparse
import logging
import traceback

from options import var_log, var_paths
from metagramme import main_program
from metagramme import minigrammar
from metagramme.Auxiliary_functions import DiagnosticError, print_green, print_red


def build_parser():
    parser = argparse.ArgumentParser(
        prog='metagramme',
        description="Compiles metagrammars into tree templates and parses sentences "
                    "with the anchored grammar, identifying multiword expressions.")
    parser.add_argument('-v', '--verbose', action='store_true',
                        help="log eliminated disjuncts, filtered templates and rejected derivations")
    commands = parser.add_subparsers(dest='command', required=True)

    compile_cmd = commands.add_parser('compile', help="compile a project")
    compile_cmd.add_argument('-m', '--manifest', default=var_paths.default_manifest)
    compile_cmd.add_argument('-o', '--output', help="compiled grammar file (JSON)")

    parse_cmd = commands.add_parser('parse', help="parse a sentence or a corpus")
    source = parse_cmd.add_mutually_exclusive_group()
    source.add_argument('-g', '--grammar', help="compiled grammar file")
    source.add_argument('-m', '--manifest', help="project manifest, compiled on the fly")
    text = parse_cmd.add_mutually_exclusive_group(required=True)
    text.add_argument('-s', '--sentence')
    text.add_argument('-c', '--corpus', help="corpus file (tab separated)")
    parse_cmd.add_argument('-j', '--workers', type=int, help="parallel sentences")

    anchor_cmd = commands.add_parser('anchor', help="list the trees anchored by a form")
    lexicon = anchor_cmd.add_mutually_exclusive_group()
    lexicon.add_argument('-g', '--grammar', help="compiled grammar file")
    lexicon.add_argument('-m', '--manifest', help="project manifest, compiled on the fly")
    anchor_cmd.add_argument('-w', '--word', required=True)

    stats_cmd = commands.add_parser('stats', help="compare two project versions")
    stats_cmd.add_argument('-a', '--old', required=True, help="manifest of the older version")
    stats_cmd.add_argument('-b', '--new', required=True, help="manifest of the newer version")

    golden_cmd = commands.add_parser('golden', help="regenerate the golden files")
    golden_cmd.add_argument('-d', '--directory', default=var_paths.golden_dir)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level='DEBUG' if args.verbose else var_log.level, format=var_log.format,
                        stream=sys.stderr)
    try:
        if args.command == 'compile':
            main_program.cmd_compile(args.manifest, args.output)
        elif args.command == 'parse':
            main_program.cmd_parse(args.grammar, args.manifest, args.sentence, args.corpus,
                                   workers=args.workers)
        elif args.command == 'anchor':
            main_program.cmd_anchor(args.grammar, args.word, args.manifest)
        elif args.command == 'stats':
            main_program.cmd_stats(args.old, args.new)
        elif args.command == 'golden':
            for path in minigrammar.write_golden(args.directory):
                print_green(f"Written {path}")
    except DiagnosticError as diagnostic:
        print_red(str(diagnostic))
        return 1
    except Exception:
        print_red("internal error")
        traceback.print_exc(file=sys.stderr)
        return 2
    return 0


if __name__ == '__main__':
    sys.exit(main())
