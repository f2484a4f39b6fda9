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
"""Tests for building proofs by symbolic execution."""
import logging
import unittest

from prooforge.examples import builtin, loop_spec, opcode_spec
from prooforge.exceptions import ProofError
from prooforge.lib.constraint import CTerm, compare, conj
from prooforge.lib.term import INT, App, IntLit, Var, VariableSupply, cells, kseq
from prooforge.proofs.aprp import STUCK, check_graph
from prooforge.proofs.construction import (ProofConfig, abstract, construct_aprp, heads_in,
                                           is_variant, same_head_and_pc, stepped_ancestors)
from prooforge.semantics.parser import read_spec


class TestConstructAprp(unittest.TestCase):
    """Test the worklist algorithm on the bundled examples."""

    logger = logging.getLogger(__name__)

    def test_straight_line(self):
        """Test the proof of a single ADD instruction.

        Approval criteria:
            - The proof shall be a chain of single rewrites from the root.
            - The last vertex shall be covered by the final state.
            - The proof shall be complete and valid.

        Test steps:
            1. Build the proof.
            2. Walk the chain of step edges.
            3. Check the graph.
        """
        semantics = builtin("mini-evm")
        self.logger.info("STEP: Build the proof.")
        graph = construct_aprp(semantics, opcode_spec("ADD"))
        self.assertFalse(graph.partial)
        self.assertEqual(graph.root, 1)
        self.assertEqual(graph.final, 0)

        self.logger.info("STEP: Walk the chain of step edges.")
        path = []
        vertex_id = graph.root
        while graph.out_step(vertex_id) is not None:
            edge = graph.out_step(vertex_id)
            self.assertEqual(edge.depth, 1)
            path.extend(edge.rules)
            vertex_id = edge.target
        self.assertEqual(path, ["next", "exec-add", "add", "push", "pc"])
        self.assertEqual(graph.out_cover(vertex_id).target, graph.final)
        self.assertEqual(graph.branches, [])

        self.logger.info("STEP: Check the graph.")
        self.assertEqual(check_graph(graph, semantics), [])

    def test_loop(self):
        """Test that the summation loop is closed by abstraction.

        Approval criteria:
            - The proof shall be complete with a small number of vertices.
            - Some vertex shall cover back into an ancestor.

        Test steps:
            1. Build the proof of the summation program.
            2. Verify its size and its back edges.
        """
        semantics = builtin("loop-lang")
        self.logger.info("STEP: Build the proof of the summation program.")
        graph = construct_aprp(semantics, loop_spec())

        self.logger.info("STEP: Verify its size and its back edges.")
        self.assertFalse(graph.partial)
        self.assertLess(len(graph.vertices), 50)
        self.assertTrue(any(cover.target != graph.final for cover in graph.covers))
        self.assertEqual(check_graph(graph, semantics), [])

    def test_iteration_bound(self):
        """Test that running out of iterations leaves a partial proof."""
        graph = construct_aprp(builtin("loop-lang"), loop_spec(), ProofConfig(i_max=3))
        self.assertTrue(graph.partial)
        self.assertTrue(graph.pending)

    def test_branch_arms_make_progress(self):
        """Test that branch arms are executed rather than looped back onto their source.

        Approval criteria:
            - Both arms of LT shall continue with a step edge applying their guarded rule.
            - No cover edge shall target a vertex its source is reached from without a step.
            - The proof shall be complete and valid.

        Test steps:
            1. Build the LT proof with head and program counter loop detection.
            2. Check the edges out of each branch arm.
            3. Check the cover edges and the graph.
        """
        semantics = builtin("mini-evm")
        self.logger.info("STEP: Build the LT proof with head and program counter loop detection.")
        by_head = ProofConfig(sameloop=same_head_and_pc)
        graph = construct_aprp(semantics, opcode_spec("LT"), by_head)
        self.assertFalse(graph.partial)

        self.logger.info("STEP: Check the edges out of each branch arm.")
        self.assertEqual(len(graph.branches), 1)
        first_rules = set()
        for target in graph.branches[0].targets:
            edge = graph.out_step(target)
            self.assertIsNotNone(edge, "arm %d is not executed" % target)
            first_rules.add(edge.rules[0])
        self.assertEqual(first_rules, {"lt-true", "lt-false"})

        self.logger.info("STEP: Check the cover edges and the graph.")
        for edge in graph.covers:
            if edge.target != graph.final:
                self.assertIn(edge.target, stepped_ancestors(graph, edge.source))
        self.assertEqual(check_graph(graph, semantics), [])

    def test_stuck_abstraction_is_partial(self):
        """Test that a loop abstraction no rule applies to is never a terminal state.

        Approval criteria:
            - STOP with head and program counter loop detection shall give a partial proof.
            - The stuck vertex shall not be covered by the final state.
            - STOP with loop detection switched off shall apply the halt rule and complete.

        Test steps:
            1. Build the STOP proof with head and program counter loop detection.
            2. Build the STOP proof of the bundled spec.
        """
        semantics = builtin("mini-evm")
        self.logger.info("STEP: Build the STOP proof with head and program counter loop detection.")
        by_head = ProofConfig(sameloop=same_head_and_pc)
        graph = construct_aprp(semantics, opcode_spec("STOP"), by_head)
        self.assertTrue(graph.partial)
        stuck = [vertex for vertex in graph.vertices.values() if vertex.status == STUCK]
        self.assertTrue(stuck)
        for vertex in stuck:
            self.assertIsNone(graph.out_cover(vertex.id))

        self.logger.info("STEP: Build the STOP proof of the bundled spec.")
        graph = construct_aprp(semantics, opcode_spec("STOP"))
        self.assertFalse(graph.partial)
        rules = [rule for edge in graph.steps for rule in edge.rules]
        self.assertEqual(rules, ["next", "exec-stop", "halt-pc", "halt"])
        self.assertEqual(check_graph(graph, semantics), [])

    def test_one_log_record_per_iteration(self):
        """Test that the construction log never outgrows the iteration bound."""
        semantics = builtin("mini-evm")
        for i_max in (1, 2, 3, 5, 1000):
            config = ProofConfig(n=5, i_max=i_max)
            graph = construct_aprp(semantics, opcode_spec("JUMPI"), config)
            self.assertLessEqual(len(graph.log), i_max)
            self.assertTrue(graph.log)

    def test_bad_input(self):
        """Test that bad settings, loop heads and initial states are rejected."""
        with self.assertRaises(ValueError):
            ProofConfig(n=0)
        with self.assertRaises(ValueError):
            ProofConfig(i_max=0)
        semantics = builtin("loop-lang")
        unknown = read_spec("spec bogus\ninit <k> K </k>\nfinal <k> .K </k>\nsameloop frob\n",
                            semantics)
        with self.assertRaises(ProofError):
            construct_aprp(semantics, unknown)
        impossible = read_spec("spec never\ninit <k> K </k> <store> S </store>\n"
                               "    requires 1 >Int 2\nfinal <k> .K </k>\n", semantics)
        with self.assertRaises(ProofError):
            construct_aprp(semantics, impossible)


class TestAbstraction(unittest.TestCase):
    """Test generalization and loop detection helpers."""

    def test_abstract(self):
        """Test that differing cells become variables and only shared conjuncts stay."""
        counter = Var("N", INT)
        shared = compare("_>Int_", counter, IntLit(0))
        extra = compare("_<Int_", counter, IntLit(5))
        first = CTerm(cells(k=App(".K"), n=IntLit(1), m=counter), conj(shared, extra))
        second = CTerm(cells(k=App(".K"), n=IntLit(2), m=counter), shared)
        general = abstract(first, second, VariableSupply(3))
        self.assertEqual(general.config, cells(k=App(".K"), n=Var("V#3", INT), m=counter))
        self.assertEqual(general.constraint, conj(shared))
        self.assertIs(abstract(first, first, VariableSupply()), first)

    def test_is_variant(self):
        """Test equality up to renaming of variables."""
        one, two = Var("A", INT), Var("B", INT)
        first = CTerm(cells(n=one), compare("_>Int_", one, IntLit(0)))
        self.assertTrue(is_variant(first, CTerm(cells(n=two), compare("_>Int_", two, IntLit(0)))))
        self.assertFalse(is_variant(first, CTerm(cells(n=two), compare("_>Int_", two, IntLit(1)))))
        self.assertFalse(is_variant(first, CTerm(cells(n=IntLit(0)))))

    def test_heads_in(self):
        """Test loop detection by the head of the main cell."""
        sameloop = heads_in(["while"])
        looping = CTerm(cells(k=kseq(App("while"), App(".K"))))
        other = CTerm(cells(k=kseq(App("skip"), App(".K"))))
        self.assertTrue(sameloop(looping, looping))
        self.assertFalse(sameloop(looping, other))
        self.assertFalse(sameloop(other, other))
