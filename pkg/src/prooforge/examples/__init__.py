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
"""Bundled semantics, proof specs and programs."""
import glob
import os
import random

from prooforge import BASE_PATH
from prooforge.semantics.parser import load_program, load_semantics, load_spec

DATA_PATH = os.path.join(BASE_PATH, "examples", "data")
SEMANTICS = {"mini-evm": "mini-evm.sem", "loop-lang": "loop-lang.sem"}
OPCODES = ("ADD", "SUB", "LT", "ISZERO", "POP", "PUSH", "DUP1", "SWAP1", "JUMP", "JUMPI",
           "STOP")
_LOADED = {}


def semantics_path(name):
    """Path of a bundled ``.sem`` file.

    :raises KeyError: On an unknown name.
    """
    try:
        return os.path.join(DATA_PATH, SEMANTICS[name])
    except KeyError:
        raise KeyError("unknown semantics %r, expected one of %s"
                       % (name, ", ".join(sorted(SEMANTICS)))) from None


def builtin(name):
    """Load a bundled semantics, ``mini-evm`` or ``loop-lang``.

    Loaded semantics are cached and shared, they must not be modified.

    :param name: Name of the semantics.
    :type name: str
    :rtype: :obj:`prooforge.semantics.definition.Semantics`
    :raises KeyError: On an unknown name.
    """
    path = semantics_path(name)
    if name not in _LOADED:
        _LOADED[name] = load_semantics(path)
    return _LOADED[name]


def spec_paths(name="mini-evm"):
    """Paths of the bundled proof specs for a semantics, sorted by opcode."""
    if name == "loop-lang":
        return [os.path.join(DATA_PATH, "loop-sum.spec")]
    semantics_path(name)
    return sorted(glob.glob(os.path.join(DATA_PATH, "specs", name, "*.spec")))


def opcode_spec(opcode):
    """Proof spec of one mini-EVM opcode."""
    path = os.path.join(DATA_PATH, "specs", "mini-evm", "%s.spec" % opcode.lower())
    return load_spec(path, builtin("mini-evm"))


def loop_spec():
    """Proof spec of the summation loop."""
    return load_spec(os.path.join(DATA_PATH, "loop-sum.spec"), builtin("loop-lang"))


def loop_program():
    """Ground start configuration of the summation loop."""
    return load_program(os.path.join(DATA_PATH, "loop-sum.pgm"), builtin("loop-lang"))


class _ProgramBuilder:
    """Straight-line code with forward jumps over stack neutral blocks."""

    def __init__(self, rng):
        self.rng = rng
        self.ops = []
        self.depth = 0
        self.dests = []

    def emit(self, op, depth_change):
        self.ops.append(op)
        self.depth += depth_change

    def push(self, value=None):
        self.emit("PUSH(%d)" % (self.rng.randint(0, 20) if value is None else value), 1)

    def straight(self):
        choices = ["PUSH"]
        if self.depth >= 1:
            choices += ["ISZERO", "POP", "DUP1"]
        if self.depth >= 2:
            choices += ["ADD", "SUB", "LT", "SWAP1"]
        op = self.rng.choice(choices)
        if op == "PUSH":
            self.push()
        else:
            self.emit(op, {"ISZERO": 0, "POP": -1, "DUP1": 1, "ADD": -1, "SUB": -1,
                           "LT": -1, "SWAP1": 0}[op])

    def neutral_block(self):
        self.push()
        for _ in range(self.rng.randint(0, 2)):
            self.push()
            self.emit(self.rng.choice(("ADD", "SUB", "LT")), -1)
        self.emit("POP", -1)

    def jump(self, conditional):
        if conditional:
            if self.depth >= 2 and self.rng.random() < 0.5:
                self.emit("LT", -1)
            else:
                self.push(self.rng.choice((0, 0, 1, 2)))
        marker = len(self.ops)
        self.push(0)
        self.emit("JUMPI" if conditional else "JUMP", -2 if conditional else -1)
        self.neutral_block()
        target = len(self.ops)
        self.ops[marker] = "PUSH(%d)" % target
        self.dests.append(target)

    def build(self, length):
        while len(self.ops) < length:
            roll = self.rng.random()
            if roll < 0.15:
                self.jump(conditional=True)
            elif roll < 0.2:
                self.jump(conditional=False)
            else:
                self.straight()
        self.ops.append("STOP")
        return self.ops


def _program_text(ops, dests, gas):
    program = " ; ".join(ops + [".Ops"])
    jump_dests = ".Dests"
    for dest in reversed(dests):
        jump_dests = "dest(%d, %s)" % (dest, jump_dests)
    return ("<k> #execute ~> .K </k> <wordStack> .WordStack </wordStack> <pc> 0 </pc> "
            "<gas> %d </gas>\n<program> %s </program>\n<jumpDests> %s </jumpDests>\n"
            % (gas, program, jump_dests))


def gen_programs(seed, count, min_length=5, max_length=40):
    """Deterministic corpus of mini-EVM programs.

    Programs never underflow the word stack. Jumps only go forward to
    registered destinations, skipping blocks that leave the stack as it was,
    so every program ends in STOP or in a state stuck on a guard such as
    running out of gas.

    :param seed: Seed of the generator.
    :type seed: int
    :param count: Number of programs.
    :type count: int
    :return: Pairs of program name and ``.pgm`` text.
    :rtype: list
    :raises ValueError: If ``count`` is not positive.
    """
    if count < 1:
        raise ValueError("count must be positive, got %d" % count)
    rng = random.Random(seed)
    programs = []
    for index in range(count):
        builder = _ProgramBuilder(rng)
        ops = builder.build(rng.randint(min_length, max_length))
        gas = rng.choice((100000, 100000, 100000, 3 * len(ops) // 2))
        programs.append(("prog-%d-%04d" % (seed, index), _program_text(ops, builder.dests, gas)))
    return programs
