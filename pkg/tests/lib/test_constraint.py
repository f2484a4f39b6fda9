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
"""Tests for path constraints."""
import logging
import unittest

from prooforge.exceptions import MalformedTermError
from prooforge.lib.constraint import (BOTTOM, TOP, And, CSubst, CTerm, Linear, Or, TermEq,
                                      common_constraints, compare, conj, conjuncts,
                                      csubst_apply, disj, from_term, linear, negate,
                                      simplify, substitute, term_eq, to_term)
from prooforge.lib.term import BOOL, INT, App, IntLit, Subst, Var, cells

X = Var("X", INT)
Y = Var("Y", INT)


def less(left, right):
    """Integer comparison term."""
    return App("_<Int_", (left, right), BOOL)


class TestLinear(unittest.TestCase):
    """Test normalization of linear atoms."""

    logger = logging.getLogger(__name__)

    def test_normal_form(self):
        """Test that equivalent comparisons normalize to the same atom.

        Approval criteria:
            - ``X < 1000`` and ``999 >= X`` shall give the same atom.
            - Coefficients shall be divided by their gcd.

        Test steps:
            1. Compare two spellings of the same bound.
            2. Normalize an atom with a common factor.
        """
        self.logger.info("STEP: Compare two spellings of the same bound.")
        first = compare("_<Int_", X, IntLit(1000))
        second = compare("_>=Int_", IntLit(999), X)
        self.assertEqual(first, second)
        self.assertEqual(first, Linear(((X, 1),), -999, "<="))

        self.logger.info("STEP: Normalize an atom with a common factor.")
        self.assertEqual(linear({X: 2}, -3, "<="), Linear(((X, 1),), -1, "<="))
        self.assertIs(linear({X: 2}, -3, "=="), BOTTOM)
        self.assertIs(linear({X: 2}, -3, "!="), TOP)

    def test_ground_atoms(self):
        """Test that atoms without unknowns decide to true or false."""
        self.assertIs(compare("_<Int_", IntLit(1), IntLit(2)), TOP)
        self.assertIs(compare("_==Int_", IntLit(1), IntLit(2)), BOTTOM)
        self.assertIs(compare("_<=Int_", X, X), TOP)

    def test_negation_is_exact(self):
        """Test that negating a bound flips it over the integers."""
        atom = compare("_<Int_", X, IntLit(1000))
        self.assertEqual(negate(atom), compare("_>=Int_", X, IntLit(1000)))
        self.assertEqual(negate(negate(atom)), atom)

    def test_opaque_unknowns(self):
        """Test that non-linear subterms are kept as unknowns."""
        product = App("_*Int_", (X, Y), INT)
        atom = compare("_==Int_", product, IntLit(4))
        self.assertEqual(atom.keys, (product,))


class TestConnectives(unittest.TestCase):
    """Test conjunction, disjunction and conversion to terms."""

    logger = logging.getLogger(__name__)

    def test_conj_flattens_and_sorts(self):
        """Test that conjunction is order independent.

        Approval criteria:
            - Conjunctions shall not depend on argument order or duplicates.
            - A conjunct with its negation shall collapse to false.

        Test steps:
            1. Conjoin atoms in two orders.
            2. Conjoin an atom with its negation.
        """
        first = compare("_<Int_", X, IntLit(10))
        second = compare("_<Int_", Y, IntLit(3))
        self.logger.info("STEP: Conjoin atoms in two orders.")
        self.assertEqual(conj(first, second), conj(second, TOP, first, first))
        self.assertIsInstance(conj(first, second), And)
        self.assertEqual(len(conjuncts(conj(first, conj(second, TOP)))), 2)

        self.logger.info("STEP: Conjoin an atom with its negation.")
        self.assertIs(conj(first, negate(first)), BOTTOM)

    def test_disj(self):
        """Test disjunction units."""
        atom = compare("_<Int_", X, IntLit(10))
        self.assertIs(disj(atom, TOP), TOP)
        self.assertEqual(disj(atom, BOTTOM), atom)
        self.assertIsInstance(disj(atom, compare("_>Int_", Y, IntLit(0))), Or)

    def test_term_round_trip(self):
        """Test that a constraint read from a boolean term converts back equivalently."""
        term = App("_andBool_", (less(X, IntLit(1000)),
                                 App("notBool_", (less(Y, X),), BOOL)), BOOL)
        constraint = from_term(term)
        self.assertEqual(from_term(to_term(constraint)), constraint)

    def test_non_boolean_rejected(self):
        """Test that an integer term is not a constraint."""
        with self.assertRaises(MalformedTermError):
            from_term(App("_+Int_", (X, IntLit(1)), INT))

    def test_term_eq_decomposes(self):
        """Test that equality of constructor terms decomposes by argument.

        Approval criteria:
            - Different constructors shall be unequal.
            - Equal constructors shall compare argument wise.
            - Equality involving a variable shall stay symbolic.

        Test steps:
            1. Compare different constructors.
            2. Compare equal constructors with integer arguments.
            3. Compare a variable with a constructor.
        """
        self.logger.info("STEP: Compare different constructors.")
        self.assertIs(term_eq(App("a"), App("b")), BOTTOM)
        self.logger.info("STEP: Compare equal constructors with integer arguments.")
        self.assertEqual(term_eq(App("f", (X,)), App("f", (IntLit(3),))),
                         compare("_==Int_", X, IntLit(3)))
        self.logger.info("STEP: Compare a variable with a constructor.")
        self.assertIsInstance(term_eq(Var("S"), App("a")), TermEq)


class TestConstrainedTerms(unittest.TestCase):
    """Test substitution into constraints and constrained terms."""

    logger = logging.getLogger(__name__)

    def test_substitute_folds(self):
        """Test that substituting a value decides the atom."""
        atom = compare("_<Int_", X, IntLit(1000))
        self.assertIs(substitute(atom, Subst({"X": IntLit(3)})), TOP)
        self.assertIs(substitute(atom, Subst({"X": IntLit(1000)})), BOTTOM)
        self.assertEqual(substitute(atom, Subst({"Y": IntLit(1)})), atom)

    def test_simplify(self):
        """Test that simplify folds ground parts."""
        constraint = conj(compare("_<Int_", X, IntLit(3)),
                          from_term(less(App("_+Int_", (IntLit(1), IntLit(1)), INT),
                                         IntLit(5))))
        self.assertEqual(simplify(constraint), compare("_<Int_", X, IntLit(3)))

    def test_contradictions_collapse(self):
        """Test that conjunctions with no common integer value become false.

        Approval criteria:
            - Two different equalities on the same unknowns shall give false.
            - Bounds with an empty integer interval shall give false.
            - An equality outside the bounds, or excluded by a disequality, shall give false.
            - Satisfiable combinations shall stay a conjunction.

        Test steps:
            1. Simplify and conjoin contradictory atoms.
            2. Conjoin satisfiable atoms.
        """
        one = compare("_==Int_", X, IntLit(1))
        two = compare("_==Int_", X, IntLit(2))
        self.logger.info("STEP: Simplify and conjoin contradictory atoms.")
        self.assertIs(simplify(And((one, two))), BOTTOM)
        self.assertIs(conj(one, two), BOTTOM)
        self.assertIs(conj(compare("_>Int_", X, IntLit(2)), compare("_<Int_", X, IntLit(2))),
                      BOTTOM)
        self.assertIs(conj(compare("_>=Int_", X, IntLit(2)), compare("_<=Int_", X, IntLit(2)),
                           compare("_=/=Int_", X, IntLit(2))), BOTTOM)
        self.assertIs(conj(one, compare("_>Int_", X, IntLit(4))), BOTTOM)
        sum_ = App("_+Int_", (X, Y), INT)
        self.assertIs(conj(compare("_<=Int_", sum_, IntLit(0)),
                           compare("_>=Int_", App("_*Int_", (IntLit(2), sum_), INT), IntLit(1))),
                      BOTTOM)

        self.logger.info("STEP: Conjoin satisfiable atoms.")
        between = conj(compare("_>=Int_", X, IntLit(2)), compare("_<=Int_", X, IntLit(3)),
                       compare("_=/=Int_", X, IntLit(2)))
        self.assertIs(type(between), And)
        self.assertIs(type(conj(one, compare("_==Int_", Y, IntLit(2)))), And)

    def test_common_constraints(self):
        """Test that only shared conjuncts are kept."""
        shared = compare("_<Int_", X, IntLit(3))
        left = conj(shared, compare("_>Int_", Y, IntLit(0)))
        right = conj(shared, compare("_>Int_", Y, IntLit(7)))
        self.assertEqual(common_constraints(left, right), shared)
        self.assertIs(common_constraints(left, TOP), TOP)

    def test_csubst_apply(self):
        """Test specialization of a constrained term.

        Approval criteria:
            - The substitution shall be applied to the configuration and constraint.
            - The constraint of the substitution shall be conjoined.

        Test steps:
            1. Specialize a constrained term.
            2. Verify its configuration and constraint.
        """
        cterm = CTerm(cells(pc=App("_+Int_", (X, IntLit(1)), INT)),
                      compare("_<Int_", X, IntLit(10)))
        guard = compare("_>Int_", Y, IntLit(0))
        self.logger.info("STEP: Specialize a constrained term.")
        result = csubst_apply(CSubst({"X": IntLit(4)}, guard), cterm)

        self.logger.info("STEP: Verify its configuration and constraint.")
        self.assertEqual(result.config, cells(pc=IntLit(5)))
        self.assertEqual(result.constraint, guard)
