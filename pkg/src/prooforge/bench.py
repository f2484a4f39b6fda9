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
"""Compare an original and a compiled semantics on a corpus of programs."""
import json
import logging
import math
import os
import statistics
import threading
import time
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import List

from jsonschema import validate

from prooforge import BASE_PATH
from prooforge.compiler.emitter import delta_steps
from prooforge.exceptions import EquivalenceError, FuelExhaustedError
from prooforge.lib.syntax import unparse
from prooforge.semantics.executor import run_concrete

_LOG = logging.getLogger(__name__)

DEFAULT_SEED = 42
SEED_VARIABLE = "PROOFORGE_SEED"
RECORD_VERSION = "1.0.0"


def corpus_seed():
    """Corpus seed, taken from ``PROOFORGE_SEED`` when set."""
    return int(os.getenv(SEED_VARIABLE, str(DEFAULT_SEED)))


def geomean(values):
    """Geometric mean of positive numbers, 1.0 for no numbers."""
    values = list(values)
    if not values:
        return 1.0
    return math.exp(sum(math.log(value) for value in values) / len(values))


def percentile(values, fraction):
    """Nearest rank percentile, ``fraction`` between 0 and 1."""
    ordered = sorted(values)
    if not ordered:
        raise ValueError("percentile of no values")
    rank = max(1, math.ceil(fraction * len(ordered)))
    return ordered[rank - 1]


def outcome(speedup, tie_band=0.01):
    """``win``, ``tie`` or ``loss`` for a speedup, ties within ``tie_band`` of 1."""
    if abs(speedup - 1.0) <= tie_band:
        return "tie"
    return "win" if speedup > 1.0 else "loss"


@dataclass
class BenchRecord:
    """Measurements of one program."""

    name: str
    steps_original: int
    steps_compiled: int
    wall_original: float
    wall_compiled: float
    tie_band: float = 0.01

    @property
    def speedup(self):
        """Median original time over median compiled time."""
        if self.wall_compiled == 0:
            return 1.0
        return self.wall_original / self.wall_compiled

    @property
    def delta_steps(self):
        """Fraction of rewrites saved, None for a program that takes no step."""
        if self.steps_original == 0:
            return None
        return delta_steps(self.steps_original, self.steps_compiled)

    @property
    def outcome(self):
        """Win, tie or loss of the compiled semantics."""
        return outcome(self.speedup, self.tie_band)

    @property
    def json(self):
        """Record as a json document with a fixed field order."""
        delta = self.delta_steps
        return {
            "type": "BenchRecord",
            "version": RECORD_VERSION,
            "name": self.name,
            "steps_original": self.steps_original,
            "steps_compiled": self.steps_compiled,
            "wall_original": self.wall_original,
            "wall_compiled": self.wall_compiled,
            "speedup": self.speedup,
            "delta_steps": None if delta is None else float(delta),
            "outcome": self.outcome,
        }


@dataclass
class BenchReport:
    """Records of a benchmark run and their aggregates."""

    records: List[BenchRecord] = field(default_factory=list)
    __schema = None

    @property
    def schema(self):
        """Json schema of one record."""
        if not BenchReport.__schema:
            path = os.path.join(BASE_PATH, "schemas", "BenchRecord",
                                "{}.json".format(RECORD_VERSION))
            with open(path, encoding="utf-8") as schema_file:
                BenchReport.__schema = json.load(schema_file)
        return BenchReport.__schema

    @property
    def speedups(self):
        """Speedup of every record."""
        return [record.speedup for record in self.records]

    @property
    def geomean(self):
        """Geometric mean speedup."""
        return geomean(self.speedups)

    @property
    def median(self):
        """Median speedup."""
        return statistics.median(self.speedups) if self.records else 1.0

    @property
    def p90(self):
        """90th percentile speedup."""
        return percentile(self.speedups, 0.9) if self.records else 1.0

    @property
    def counts(self):
        """Number of wins, ties and losses."""
        outcomes = [record.outcome for record in self.records]
        return {name: outcomes.count(name) for name in ("win", "tie", "loss")}

    @property
    def steps_original(self):
        """Total rewrites under the original semantics."""
        return sum(record.steps_original for record in self.records)

    @property
    def steps_compiled(self):
        """Total rewrites under the compiled semantics."""
        return sum(record.steps_compiled for record in self.records)

    @property
    def delta_steps(self):
        """Fraction of rewrites saved over the whole corpus."""
        if self.steps_original == 0:
            return None
        return delta_steps(self.steps_original, self.steps_compiled)

    def validate(self):
        """Validate every record against its schema.

        :raises: ValidationError.
        """
        for record in self.records:
            validate(record.json, self.schema)

    def lines(self):
        """Records as json lines, in corpus order."""
        return "".join(json.dumps(record.json) + "\n" for record in self.records)

    def summary(self):
        """Human readable aggregate table."""
        counts = self.counts
        delta = self.delta_steps
        rows = [
            ("tests", str(len(self.records))),
            ("steps original", str(self.steps_original)),
            ("steps compiled", str(self.steps_compiled)),
            ("delta steps", "n/a" if delta is None else "%.1f%%" % (100 * float(delta))),
            ("geomean speedup", "%.3f" % self.geomean),
            ("median speedup", "%.3f" % self.median),
            ("p90 speedup", "%.3f" % self.p90),
            ("wins/ties/losses", "%d/%d/%d" % (counts["win"], counts["tie"], counts["loss"])),
        ]
        width = max(len(name) for name, _ in rows)
        return "\n".join("%s  %s" % (name.ljust(width), value) for name, value in rows) + "\n"

    def write(self, path):
        """Write the json lines to ``path``."""
        self.validate()
        with open(path, "w", encoding="utf-8") as report_file:
            report_file.write(self.lines())


class BenchRunner:  # pylint:disable=too-few-public-methods
    """Runs every program of a corpus under both semantics.

    Programs are spread over ``max_workers`` threads. The repetitions of one
    program run one after the other in the same thread.
    """

    def __init__(self, original, compiled, repetitions=5, max_workers=1, tie_band=0.01,
                 fuel=10**6):  # pylint:disable=too-many-arguments
        """Initialize the runner.

        :param original: Semantics the proofs were built against.
        :type original: :obj:`prooforge.semantics.definition.Semantics`
        :param compiled: The same semantics with compiled rules.
        :type compiled: :obj:`prooforge.semantics.definition.Semantics`
        :param repetitions: Timed runs per program and semantics.
        :type repetitions: int
        :param max_workers: Number of worker threads.
        :type max_workers: int
        :param tie_band: Relative distance from 1 within which a speedup is a tie.
        :type tie_band: float
        :param fuel: Rewrite limit of a single run.
        :type fuel: int
        """
        if repetitions < 1:
            raise ValueError("repetitions must be positive, got %d" % repetitions)
        self.original = original
        self.compiled = compiled
        self.repetitions = repetitions
        self.max_workers = max(1, max_workers)
        self.tie_band = tie_band
        self.fuel = fuel
        self.__lock = threading.Lock()
        self.__failures = []

    def _timed(self, semantics, config):
        times = []
        run = None
        for _ in range(self.repetitions):
            start = time.perf_counter()
            run = run_concrete(semantics, config, self.fuel)
            times.append(time.perf_counter() - start)
        return run, statistics.median(times)

    def measure(self, name, config):
        """Measure one program.

        :return: The record, or None if the two semantics disagree.
        :rtype: :obj:`BenchRecord`
        """
        try:
            original, wall_original = self._timed(self.original, config)
            compiled, wall_compiled = self._timed(self.compiled, config)
        except FuelExhaustedError as exception:
            self._fail(name, "fuel exhausted after %d steps" % exception.steps)
            return None
        if original.config != compiled.config:
            self._fail(name, "final configurations differ: %s versus %s"
                       % (unparse(original.config), unparse(compiled.config)))
            return None
        _LOG.debug("%s: %d -> %d steps", name, original.steps, compiled.steps)
        return BenchRecord(name, original.steps, compiled.steps, wall_original, wall_compiled,
                           self.tie_band)

    def _fail(self, name, reason):
        _LOG.error("%s: %s", name, reason)
        with self.__lock:
            self.__failures.append("%s: %s" % (name, reason))

    def _error(self, name, exception):
        self._fail(name, repr(exception))

    def run(self, corpus):
        """Benchmark a corpus.

        :param corpus: Pairs of program name and ground start configuration.
        :type corpus: list
        :rtype: :obj:`BenchReport`
        :raises EquivalenceError: If any program ends differently under the two
                                  semantics.
        """
        if not corpus:
            raise ValueError("empty corpus")
        self.__failures = []
        results = [None] * len(corpus)

        def store(index):
            def callback(record):
                results[index] = record
            return callback

        _LOG.info("benchmarking %d programs, %d repetitions, %d workers", len(corpus),
                  self.repetitions, self.max_workers)
        with ThreadPool(self.max_workers) as pool:
            for index, (name, config) in enumerate(corpus):
                pool.apply_async(self.measure, args=(name, config), callback=store(index),
                                 error_callback=lambda exception, name=name:
                                 self._error(name, exception))
            pool.close()
            pool.join()
        if self.__failures:
            raise EquivalenceError(sorted(self.__failures))
        report = BenchReport([record for record in results if record is not None])
        _LOG.info("geomean speedup %.3f over %d programs", report.geomean, len(report.records))
        return report
