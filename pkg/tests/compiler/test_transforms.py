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
"""Tests for proof graph transformations."""
import logging
import random
import unittest
from collections import Counter

from prooforge.compiler.transforms import (compress_steps, lift_branch_branch, lift_step_branch,
                                           normalize)
from prooforge.lib.constraint import CSubst, CTerm, compare, conj
from prooforge.lib.solver import Status, is_sat
from prooforge.lib.term import INT, App, IntLit, Subst, Var, apply_subst, cells
from prooforge.proofs.aprp import REACHED, AprpGraph, check_graph
from prooforge.proofs.construction import construct_aprp
from prooforge.semantics.executor import run_concrete
from prooforge.semantics.parser import read_semantics, read_spec

from ..semantics.test_executor import WALK, random_walks

X = Var("X", INT)
Y = Var("Y", INT)


def walk_spec(semantics, program):
    """Claim that a WALK program runs to completion from any counter."""
    return read_spec("spec walk\ninit <k> %s ~> .K </k> <n> N </n>\nfinal <k> .K </k>\n"
                     "sameloop none\n" % " ~> ".join(program), semantics)


def negative(var):
    """Arm taken when ``var`` is below zero."""
    return CSubst({}, compare("_<Int_", var, IntLit(0)))


def non_negative(var):
    """Arm taken when ``var`` is zero or above."""
    return CSubst({}, compare("_>=Int_", var, IntLit(0)))


def new_vertex(graph, constraint=None):
    """Add a vertex told apart by its main cell."""
    name = "s%d" % len(graph.vertices)
    cterm = CTerm(cells(k=App(name))) if constraint is None else \
        CTerm(cells(k=App(name)), constraint)
    return graph.add_vertex(cterm, REACHED)


def leaf_depths(graph):
    """Leaves reachable from the root with the rewrites on their path."""
    found = Counter()
    stack = [(graph.root, 0)]
    while stack:
        vertex_id, depth = stack.pop()
        step = graph.out_step(vertex_id)
        branch = graph.out_branch(vertex_id)
        if step is not None:
            stack.append((step.target, depth + step.depth))
        elif branch is not None:
            stack.extend((target, depth) for target in branch.targets)
        else:
            found[(vertex_id, depth)] += 1
    return found


def random_tree(rnd):
    """A tree shaped proof with random steps, branches and back covers."""
    graph = AprpGraph("random")
    graph.root = new_vertex(graph)
    frontier = [(graph.root, 0)]
    while frontier:
        vertex_id, level = frontier.pop()
        if level >= 3:
            if rnd.random() < 0.3:
                graph.add_cover(vertex_id, graph.root, CSubst({}))
            continue
        choice = rnd.random()
        if choice < 0.5:
            target = new_vertex(graph)
            graph.add_step(vertex_id, target, rnd.randint(1, 3), ("r%d" % target,))
            frontier.append((target, level + 1))
        elif choice < 0.85:
            var = Var("X_%d" % vertex_id, INT)
            guards = [negative(var), non_negative(var)]
            if rnd.random() < 0.5:
                guards = [CSubst({}, compare("_<Int_", var, IntLit(0))),
                          CSubst({}, compare("_==Int_", var, IntLit(0))),
                          CSubst({}, compare("_>Int_", var, IntLit(0)))]
            arms = [(guard, new_vertex(graph)) for guard in guards]
            graph.add_branch(vertex_id, arms)
            frontier.extend((target, level + 1) for _, target in arms)
    return graph


class TestCompressSteps(unittest.TestCase):
    """Test merging of consecutive step edges."""

    logger = logging.getLogger(__name__)

    def test_chain(self):
        """Test that ``A -> B -> C`` becomes one edge.

        Approval criteria:
            - The merged edge shall add up depths and rules.
            - The inner vertex shall be removed.
            - The input graph shall be left as it is.

        Test steps:
            1. Build a chain of two step edges.
            2. Compress it.
            3. Verify the result and the input.
        """
        self.logger.info("STEP: Build a chain of two step edges.")
        graph = AprpGraph("chain")
        first, middle, last = (new_vertex(graph) for _ in range(3))
        graph.root = first
        graph.add_step(first, middle, 1, ("a",))
        graph.add_step(middle, last, 2, ("b", "c"))

        self.logger.info("STEP: Compress it.")
        compressed = compress_steps(graph)

        self.logger.info("STEP: Verify the result and the input.")
        self.assertEqual(len(compressed.steps), 1)
        edge = compressed.steps[0]
        self.assertEqual((edge.source, edge.target, edge.depth), (first, last, 3))
        self.assertEqual(edge.rules, ("a", "b", "c"))
        self.assertNotIn(middle, compressed.vertices)
        self.assertEqual(len(graph.steps), 2)

    def test_cover_target_is_kept(self):
        """Test that a vertex entered by a cover is not compressed away."""
        graph = AprpGraph("loop")
        first, middle, last = (new_vertex(graph) for _ in range(3))
        graph.root = first
        graph.add_step(first, middle, 1)
        graph.add_step(middle, last, 1)
        graph.add_cover(last, middle, CSubst({}))
        self.assertEqual(len(compress_steps(graph).steps), 2)


class TestLift(unittest.TestCase):
    """Test moving branches towards the root."""

    logger = logging.getLogger(__name__)

    def test_step_branch(self):
        """Test that a branch after a step moves in front of it.

        Approval criteria:
            - The source shall branch into specialized copies of itself.
            - Each copy shall take the original step to the original target.

        Test steps:
            1. Build ``A -2-> B`` with B branching on the sign of X.
            2. Lift the branch.
            3. Verify the new shape.
        """
        self.logger.info("STEP: Build A -2-> B with B branching on the sign of X.")
        graph = AprpGraph("lift")
        source, middle, below, above = (new_vertex(graph) for _ in range(4))
        graph.root = source
        graph.add_step(source, middle, 2, ("a", "b"))
        graph.add_branch(middle, [(negative(X), below), (non_negative(X), above)])

        self.logger.info("STEP: Lift the branch.")
        lifted = lift_step_branch(graph)

        self.logger.info("STEP: Verify the new shape.")
        self.assertNotIn(middle, lifted.vertices)
        branch = lifted.out_branch(source)
        self.assertEqual(len(branch.arms), 2)
        for (csubst, copy), target in zip(branch.arms, (below, above)):
            vertex = lifted.vertex(copy)
            self.assertEqual(vertex.cterm.config, graph.vertex(source).cterm.config)
            self.assertEqual(vertex.cterm.constraint, csubst.constraint)
            step = lifted.out_step(copy)
            self.assertEqual((step.target, step.depth, step.rules), (target, 2, ("a", "b")))

    def test_infeasible_arm_is_dropped(self):
        """Test that an arm contradicting the source constraint is dropped and logged."""
        graph = AprpGraph("lift")
        source = new_vertex(graph, compare("_>=Int_", X, IntLit(0)))
        middle, below, above = (new_vertex(graph) for _ in range(3))
        graph.root = source
        graph.add_step(source, middle, 1)
        graph.add_branch(middle, [(negative(X), below), (non_negative(X), above)])
        lifted = lift_step_branch(graph)
        self.assertEqual(len(lifted.out_branch(source).arms), 1)
        self.assertNotIn(below, lifted.vertices)
        self.assertTrue(any("dropped" in line for line in lifted.log))

    def test_branch_branch(self):
        """Test that a branch under a branch arm is flattened into it."""
        graph = AprpGraph("nested")
        source, middle, left, right, other = (new_vertex(graph) for _ in range(5))
        graph.root = source
        graph.add_branch(source, [(negative(X), middle), (non_negative(X), other)])
        graph.add_branch(middle, [(negative(Y), left), (non_negative(Y), right)])
        flat = lift_branch_branch(graph)
        self.assertNotIn(middle, flat.vertices)
        self.assertEqual(len(flat.branches), 1)
        branch = flat.out_branch(source)
        self.assertEqual(branch.targets, (left, right, other))
        self.assertEqual(branch.arms[0][0].constraint,
                         conj(negative(X).constraint, negative(Y).constraint))


class TestNormalize(unittest.TestCase):
    """Test the combined transformation."""

    logger = logging.getLogger(__name__)

    def test_random_trees(self):
        """Test that normalizing keeps every path and its rewrite count.

        Approval criteria:
            - Each leaf shall be reached with the same number of rewrites.
            - Normalizing shall reach a fixpoint.
            - No step edge shall lead into a vertex that only forwards it.

        Test steps:
            1. Build 100 random tree shaped proofs.
            2. Normalize each one and compare leaves and depths.
        """
        rnd = random.Random(11)
        self.logger.info("STEP: Build 100 random tree shaped proofs.")
        graphs = [random_tree(rnd) for _ in range(100)]

        self.logger.info("STEP: Normalize each one and compare leaves and depths.")
        for graph in graphs:
            result = normalize(graph, budget=1000)
            self.assertTrue(result.normalized)
            self.assertEqual(leaf_depths(result), leaf_depths(graph))
            for edge in result.steps:
                self.assertIsNone(result.out_step(edge.target))

    def test_budget(self):
        """Test that running out of budget keeps a valid but unnormalized graph."""
        graph = AprpGraph("long")
        ids = [new_vertex(graph) for _ in range(5)]
        graph.root = ids[0]
        for source, target in zip(ids, ids[1:]):
            graph.add_step(source, target, 1)
        result = normalize(graph, budget=1)
        self.assertFalse(result.normalized)
        self.assertEqual(leaf_depths(result), leaf_depths(graph))
        self.assertEqual(len(result.steps), 3)
        done = normalize(graph)
        self.assertTrue(done.normalized)
        self.assertEqual(len(done.steps), 1)


class TestTransformsAgainstSemantics(unittest.TestCase):
    """Test transformations of proofs built from a semantics."""

    logger = logging.getLogger(__name__)

    def setUp(self):
        self.semantics = read_semantics(WALK)

    def check_endpoints(self, graph, spec):
        """Compare every leaf with a concrete run from a witness of its constraint."""
        leaves = 0
        for edge in graph.covers:
            if edge.target != graph.final:
                continue
            leaf = graph.vertex(edge.source).cterm
            result = is_sat(leaf.constraint)
            if result.status is not Status.SAT:
                continue
            subst = Subst({"N": IntLit(result.witness.get("N", 0))})
            start = self.semantics.normalize(apply_subst(subst, spec.init.config))
            run = run_concrete(self.semantics, start)
            self.assertEqual(run.config, self.semantics.normalize(apply_subst(subst, leaf.config)),
                             "leaf %d of %s" % (edge.source, spec.init))
            leaves += 1
        self.assertTrue(leaves)

    def test_transforms_keep_proofs_valid(self):
        """Test that every transformation keeps a checked proof and its end states.

        Approval criteria:
            - Each proof and each transformed proof shall pass the graph check.
            - Each leaf shall end where a concrete run from a witness of it ends.
            - Normalizing shall reach a fixpoint.

        Test steps:
            1. Prove 30 random WALK programs.
            2. For every proof:
                2.1: Check the proof and its leaves.
                2.2: Compress, lift and flatten in turn, checking after each.
                2.3: Normalize and check.
        """
        normalize_term = self.semantics.normalize
        self.logger.info("STEP: Prove 30 random WALK programs.")
        proofs = []
        for program in random_walks(11, 30):
            spec = walk_spec(self.semantics, program)
            proofs.append((spec, construct_aprp(self.semantics, spec)))

        self.logger.info("STEP: For every proof:")
        for spec, graph in proofs:
            self.assertFalse(graph.partial)
            self.assertEqual(check_graph(graph, self.semantics), [])
            self.check_endpoints(graph, spec)

            current = graph
            for transform in (compress_steps,
                              lambda g: lift_step_branch(g, normalize_term),
                              lambda g: lift_branch_branch(g, normalize_term)):
                current = transform(current)
                self.assertEqual(check_graph(current, self.semantics), [])
                self.check_endpoints(current, spec)

            result = normalize(graph, budget=1000, term_normalize=normalize_term)
            self.assertTrue(result.normalized)
            self.assertEqual(check_graph(result, self.semantics), [])
            self.check_endpoints(result, spec)
