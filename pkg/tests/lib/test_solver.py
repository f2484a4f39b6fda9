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
"""Tests for the bundled decision procedure."""
import itertools
import logging
import random
import unittest

from prooforge.lib.constraint import (BOTTOM, TOP, BoolAtom, compare, conj, disj, linear,
                                      substitute)
from prooforge.lib.solver import Status, Verdict, entails, is_sat, satisfiable
from prooforge.lib.term import BOOL, INT, App, IntLit, Subst, Var

X = Var("X", INT)
Y = Var("Y", INT)
RANGE = range(-8, 9)


def _random_atom(rng):
    coeffs = {X: rng.randint(-3, 3), Y: rng.randint(-3, 3)}
    return linear(coeffs, rng.randint(-10, 10), rng.choice(("<=", "<=", "==", "!=")))


def _holds(constraint, x_value, y_value):
    return substitute(constraint, Subst({"X": IntLit(x_value), "Y": IntLit(y_value)})) is TOP


class TestIsSat(unittest.TestCase):
    """Test satisfiability checks."""

    logger = logging.getLogger(__name__)

    def test_simple_answers(self):
        """Test satisfiability of small constraints."""
        self.assertIs(is_sat(TOP).status, Status.SAT)
        self.assertIs(is_sat(BOTTOM).status, Status.UNSAT)
        self.assertIs(is_sat(conj(compare("_<Int_", X, IntLit(3)),
                                  compare("_>Int_", X, IntLit(2)))).status, Status.UNSAT)
        result = is_sat(conj(compare("_<Int_", X, IntLit(1000)),
                             compare("_>=Int_", X, IntLit(999))))
        self.assertIs(result.status, Status.SAT)
        self.assertEqual(result.witness, {"X": 999})

    def test_integer_gaps(self):
        """Test that rationally feasible but integer infeasible constraints are refuted.

        Approval criteria:
            - ``2X == 2Y + 1`` shall be unsatisfiable.
            - ``1 <= 2X <= 1`` shall be unsatisfiable.

        Test steps:
            1. Decide an odd equality.
            2. Decide a bound pair without integer between them.
        """
        self.logger.info("STEP: Decide an odd equality.")
        self.assertIs(is_sat(linear({X: 2, Y: -2}, -1, "==")).status, Status.UNSAT)
        self.logger.info("STEP: Decide a bound pair without integer between them.")
        self.assertIs(is_sat(conj(linear({X: 2}, -1, "<="),
                                  linear({X: -2}, 1, "<="))).status, Status.UNSAT)

    def test_disequalities(self):
        """Test that a witness avoids excluded values."""
        constraint = conj(compare("_>=Int_", X, IntLit(0)), compare("_<=Int_", X, IntLit(2)),
                          compare("_=/=Int_", X, IntLit(0)), compare("_=/=Int_", X, IntLit(1)))
        result = is_sat(constraint)
        self.assertIs(result.status, Status.SAT)
        self.assertEqual(result.witness["X"], 2)

    def test_disjunction(self):
        """Test that a disjunction is satisfiable when one of its cases is."""
        impossible = conj(compare("_<Int_", X, IntLit(0)), compare("_>Int_", X, IntLit(0)))
        self.assertTrue(satisfiable(disj(impossible, compare("_==Int_", X, IntLit(5)))))

    def test_boolean_atoms(self):
        """Test clashing boolean atoms and opaque ones."""
        flag = Var("B", BOOL)
        self.assertIs(is_sat(conj(BoolAtom(flag), BoolAtom(flag, False))).status, Status.UNSAT)
        opaque = BoolAtom(App("isPrime", (X,), BOOL))
        self.assertIs(is_sat(opaque).status, Status.UNKNOWN)

    def test_against_brute_force(self):
        """Test the decision procedure against enumeration of a bounded box.

        Approval criteria:
            - Over ``-8 <= X, Y <= 8`` the answer shall agree with enumeration.
            - Every witness shall satisfy the constraint.

        Test steps:
            1. For 300 random conjunctions of up to three atoms within the box:
                1.1: Enumerate all points of the box.
                1.2: Compare with the decision procedure.
                1.3: Check the witness.
        """
        rng = random.Random(7)
        box = conj(compare("_>=Int_", X, IntLit(-8)), compare("_<=Int_", X, IntLit(8)),
                   compare("_>=Int_", Y, IntLit(-8)), compare("_<=Int_", Y, IntLit(8)))
        self.logger.info("STEP: For 300 random conjunctions within the box:")
        for _ in range(300):
            constraint = conj(box, *(_random_atom(rng) for _ in range(rng.randint(1, 3))))
            expected = any(_holds(constraint, x, y) for x, y in itertools.product(RANGE, RANGE))
            result = is_sat(constraint)
            self.assertIs(result.status, Status.SAT if expected else Status.UNSAT,
                          "wrong answer for %s" % constraint)
            if expected:
                self.assertTrue(_holds(constraint, result.witness.get("X", 0),
                                       result.witness.get("Y", 0)),
                                "bad witness %r for %s" % (result.witness, constraint))


class TestEntails(unittest.TestCase):
    """Test entailment checks."""

    logger = logging.getLogger(__name__)

    def test_entailment(self):
        """Test entailment between bounds.

        Approval criteria:
            - A tighter bound shall entail a weaker one.
            - A weaker bound shall not entail a tighter one, with a counterexample.

        Test steps:
            1. Check that ``X < 3`` entails ``X < 10``.
            2. Check that ``X < 10`` does not entail ``X < 3``.
        """
        tight = compare("_<Int_", X, IntLit(3))
        loose = compare("_<Int_", X, IntLit(10))
        self.logger.info("STEP: Check that X < 3 entails X < 10.")
        self.assertIs(entails(tight, loose).verdict, Verdict.YES)
        self.logger.info("STEP: Check that X < 10 does not entail X < 3.")
        answer = entails(loose, tight)
        self.assertIs(answer.verdict, Verdict.NO)
        self.assertTrue(3 <= answer.counterexample["X"] < 10)

    def test_trivial_entailment(self):
        """Test that everything entails true and false entails everything."""
        atom = compare("_<Int_", X, IntLit(3))
        self.assertTrue(entails(atom, TOP))
        self.assertTrue(entails(BOTTOM, atom))
        self.assertTrue(entails(conj(atom, compare("_>Int_", Y, IntLit(0))), atom))

    def test_against_brute_force(self):
        """Test entailment against enumeration of a bounded box.

        Approval criteria:
            - Every decided answer shall agree with enumeration over ``-8 <= X, Y <= 8``.
            - Every counterexample shall satisfy the premise and violate the conclusion.

        Test steps:
            1. For 1000 random premise and conclusion pairs:
                1.1: Enumerate the models of the premise in the box.
                1.2: Compare with the entailment verdict.
                1.3: Check the counterexample.
        """
        rng = random.Random(13)
        box = conj(compare("_>=Int_", X, IntLit(-8)), compare("_<=Int_", X, IntLit(8)),
                   compare("_>=Int_", Y, IntLit(-8)), compare("_<=Int_", Y, IntLit(8)))
        self.logger.info("STEP: For 1000 random premise and conclusion pairs:")
        decided = 0
        for _ in range(1000):
            premise = conj(box, *(_random_atom(rng) for _ in range(rng.randint(0, 2))))
            conclusion = conj(*(_random_atom(rng) for _ in range(rng.randint(1, 2))))
            models = [(x, y) for x, y in itertools.product(RANGE, RANGE)
                      if _holds(premise, x, y)]
            expected = all(_holds(conclusion, x, y) for x, y in models)
            answer = entails(premise, conclusion)
            if answer.verdict is Verdict.UNKNOWN:
                continue
            decided += 1
            self.assertIs(answer.verdict, Verdict.YES if expected else Verdict.NO,
                          "wrong verdict for %s entails %s" % (premise, conclusion))
            if answer.verdict is Verdict.NO:
                point = (answer.counterexample.get("X", 0), answer.counterexample.get("Y", 0))
                self.assertTrue(_holds(premise, *point))
                self.assertFalse(_holds(conclusion, *point))
        self.assertGreater(decided, 900)
