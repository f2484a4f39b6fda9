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
"""Exceptions raised by prooforge."""


class ProoforgeError(Exception):
    """Base exception for prooforge."""


class MalformedTermError(ProoforgeError):
    """A term is ill-sorted or otherwise malformed."""


class ParseError(ProoforgeError):
    """Syntax error in a semantics, specification or configuration text."""

    def __init__(self, message, line=0, column=0):
        """Initialize with a message and a source position.

        :param message: What went wrong.
        :type message: str
        :param line: 1-based line number, 0 if unknown.
        :type line: int
        :param column: 1-based column number, 0 if unknown.
        :type column: int
        """
        super().__init__("%d:%d: %s" % (line, column, message))
        self.line = line
        self.column = column


class ValidationError(ProoforgeError):
    """A semantics, rule or specification failed validation."""


class SemanticsBugError(ProoforgeError):
    """A rule condition could not be decided during concrete execution."""


class FuelExhaustedError(ProoforgeError):
    """Concrete execution ran out of fuel before getting stuck."""

    def __init__(self, config, steps):
        """Initialize with the last configuration reached.

        :param config: Configuration when fuel ran out.
        :type config: :obj:`prooforge.lib.term.Term`
        :param steps: Number of rewrites applied.
        :type steps: int
        """
        super().__init__("fuel exhausted after %d steps" % steps)
        self.config = config
        self.steps = steps


class ProofError(ProoforgeError):
    """Proof construction or graph transformation failed."""


class CompilationError(ProoforgeError):
    """Rule emission or proof compilation failed."""


class EquivalenceError(ProoforgeError):
    """Original and compiled semantics disagree on a final configuration."""

    def __init__(self, failures):
        """Initialize with the names of the failing tests.

        :param failures: Names of programs whose final configurations differ.
        :type failures: list
        """
        super().__init__("equivalence violated on %d test(s): %s"
                         % (len(failures), ", ".join(failures)))
        self.failures = failures
