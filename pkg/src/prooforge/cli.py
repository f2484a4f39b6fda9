# Copyright 2026 prooforge contributors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Command line entry point.

Exit codes: 0 success, 1 invalid input or failure, 2 partial proof,
3 fuel exhausted, 4 equivalence violated.
"""
import argparse
import json
import logging
import sys

from jsonschema.exceptions import ValidationError as SchemaError

from prooforge import __version__
from prooforge.bench import BenchRunner, corpus_seed
from prooforge.compiler.emitter import emit_rules, integrate
from prooforge.compiler.transforms import normalize
from prooforge.examples import SEMANTICS, builtin, gen_programs
from prooforge.exceptions import (EquivalenceError, FuelExhaustedError, ProoforgeError,
                                  ValidationError)
from prooforge.proofs.aprp import AprpGraph, check_graph
from prooforge.proofs.construction import ProofConfig, construct_aprp
from prooforge.proofs.dot import write_dot
from prooforge.semantics.executor import run_concrete
from prooforge.semantics.parser import (load_program, load_semantics, load_spec, read_program,
                                        write_config, write_semantics)

_LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_FUEL = 3
EXIT_EQUIVALENCE = 4


def _semantics(name):
    if name in SEMANTICS:
        return builtin(name)
    return load_semantics(name)


def _output(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as output_file:
            output_file.write(text)


def _program(path, semantics):
    """Start configuration from a .pgm file or from the ground init of a .spec file."""
    if not path.endswith(".spec"):
        return load_program(path, semantics)
    spec = load_spec(path, semantics)
    if spec.init.config.vars:
        raise ValidationError("%s: init of spec %s is not ground" % (path, spec.name))
    return spec.init.config


def _read_graph(path, semantics):
    with open(path, encoding="utf-8") as proof_file:
        return AprpGraph.rebuild(json.load(proof_file), semantics)


def cmd_prove(args):
    """Build a proof and write it as json."""
    semantics = _semantics(args.semantics)
    spec = load_spec(args.spec, semantics)
    config = ProofConfig(n=args.max_depth, i_max=args.max_iterations, precise=args.precise)
    graph = construct_aprp(semantics, spec, config)
    graph.validate()
    _output(graph.pretty + "\n", args.output)
    if args.emit_dot:
        write_dot(graph, args.emit_dot)
    if graph.partial:
        _LOG.warning("proof of %s is partial", spec.name)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_compile(args):
    """Compile proofs into a semantics with additional rules."""
    semantics = _semantics(args.semantics)
    compiled = []
    for path in args.proofs:
        graph = _read_graph(path, semantics)
        violations = check_graph(graph, semantics)
        if violations:
            for violation in violations:
                _LOG.error("%s: %s", path, violation)
            return EXIT_ERROR
        if graph.partial:
            _LOG.warning("%s: compiling the proved part of a partial proof", path)
        graph = normalize(graph, args.budget, semantics.normalize)
        compiled += emit_rules(graph, semantics)
    result = integrate(semantics, compiled, args.name)
    _output(write_semantics(result), args.output)
    return EXIT_OK


def cmd_run(args):
    """Run a program to completion."""
    semantics = _semantics(args.semantics)
    config = _program(args.program, semantics)
    try:
        run = run_concrete(semantics, config, args.fuel, args.trace)
    except FuelExhaustedError as exception:
        _LOG.error("%s", exception)
        return EXIT_FUEL
    for line in run.trace:
        sys.stdout.write(line + "\n")
    sys.stdout.write(write_config(run.config, semantics.signature) + "\n")
    sys.stdout.write("steps: %d\n" % run.steps)
    return EXIT_OK


def cmd_bench(args):
    """Compare two semantics on a corpus."""
    original = _semantics(args.original)
    compiled = _semantics(args.compiled)
    if args.programs:
        corpus = [(path, _program(path, original)) for path in args.programs]
    else:
        seed = corpus_seed() if args.seed is None else args.seed
        corpus = [(name, read_program(text, original))
                  for name, text in gen_programs(seed, args.count)]
    runner = BenchRunner(original, compiled, args.repetitions, args.workers, args.tie_band,
                         args.fuel)
    try:
        report = runner.run(corpus)
    except EquivalenceError as exception:
        for failure in exception.failures:
            _LOG.error("%s", failure)
        return EXIT_EQUIVALENCE
    if args.output:
        report.write(args.output)
    sys.stdout.write(report.summary())
    return EXIT_OK


def cmd_check(args):
    """Validate a proof against a semantics."""
    semantics = _semantics(args.semantics)
    graph = _read_graph(args.proof, semantics)
    violations = check_graph(graph, semantics)
    for violation in violations:
        sys.stdout.write(violation + "\n")
    if violations:
        return EXIT_ERROR
    sys.stdout.write("%r is valid\n" % graph)
    return EXIT_PARTIAL if graph.partial else EXIT_OK


def parser():
    """Argument parser of the ``prooforge`` command."""
    main_parser = argparse.ArgumentParser(
        prog="prooforge", description="Prove, compile and benchmark rewrite semantics.")
    main_parser.add_argument("--version", action="version", version=__version__)
    main_parser.add_argument("-v", "--verbose", action="count", default=0,
                             help="More logging, repeat for debug output.")
    commands = main_parser.add_subparsers(dest="command", required=True)

    prove = commands.add_parser("prove", help="Build an all-path reachability proof.")
    prove.add_argument("semantics", help="A .sem file or a bundled name (%s)."
                       % ", ".join(sorted(SEMANTICS)))
    prove.add_argument("spec", help="The .spec file to prove.")
    prove.add_argument("--max-depth", type=int, default=1, help="Rewrites per execute call.")
    prove.add_argument("--max-iterations", type=int, default=1000, help="Worklist iterations.")
    prove.add_argument("--precise", action="store_true", help="Check subsumption exhaustively.")
    prove.add_argument("--emit-dot", metavar="PATH", help="Also write the graph as DOT.")
    prove.add_argument("-o", "--output", help="Proof file, stdout by default.")
    prove.set_defaults(func=cmd_prove)

    compile_ = commands.add_parser("compile", help="Compile proofs into rules.")
    compile_.add_argument("semantics")
    compile_.add_argument("proofs", nargs="*", help="Proof files from 'prove'.")
    compile_.add_argument("--name", help="Module name of the compiled semantics.")
    compile_.add_argument("--budget", type=int, default=100, help="Graph rewrite budget.")
    compile_.add_argument("-o", "--output", help="Compiled .sem file, stdout by default.")
    compile_.set_defaults(func=cmd_compile)

    run = commands.add_parser("run", help="Run a program.")
    run.add_argument("semantics")
    run.add_argument("program", help="A .pgm file, or a .spec file with a ground init.")
    run.add_argument("--trace", action="store_true", help="Print every applied rule.")
    run.add_argument("--fuel", type=int, default=None, help="Maximum number of rewrites.")
    run.set_defaults(func=cmd_run)

    bench = commands.add_parser("bench", help="Compare two semantics.")
    bench.add_argument("original")
    bench.add_argument("compiled")
    bench.add_argument("programs", nargs="*",
                       help="Programs to run, a generated mini-evm corpus by default.")
    bench.add_argument("--count", type=int, default=100, help="Size of a generated corpus.")
    bench.add_argument("--seed", type=int, default=None,
                       help="Corpus seed, PROOFORGE_SEED or 42 by default.")
    bench.add_argument("--repetitions", type=int, default=5)
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--tie-band", type=float, default=0.01)
    bench.add_argument("--fuel", type=int, default=10**6)
    bench.add_argument("-o", "--output", help="Write json lines records here.")
    bench.set_defaults(func=cmd_bench)

    check = commands.add_parser("check", help="Validate a proof file.")
    check.add_argument("semantics")
    check.add_argument("proof")
    check.set_defaults(func=cmd_check)
    return main_parser


def main(argv=None):
    """Run the command line and return its exit code."""
    args = parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ProoforgeError, SchemaError, OSError, ValueError) as exception:
        _LOG.error("%s", exception)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
