"""Bit-level netlist IR, builder and cycle-accurate simulator.

A :class:`Circuit` is a flat node list. Node ``i`` has an opcode and up to
two operand ids; combinational operands always precede their users, while a
register's next-value operand may point anywhere. Ports map names to lists
of node ids (bit 0 first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Mapping, Sequence


class Op(IntEnum):
    INPUT = 0
    CONST0 = 1
    CONST1 = 2
    NOT = 3
    AND = 4
    XOR = 5
    REG = 6


OP_NAMES = {op: op.name for op in Op}
_NAME_OPS = {name: op for op, name in OP_NAMES.items()}


@dataclass
class Circuit:
    ops: list[int] = field(default_factory=list)
    # For NOT/AND/XOR: operand ids. For REG: a = next-value node, b = init bit.
    a: list[int] = field(default_factory=list)
    b: list[int] = field(default_factory=list)
    inputs: dict[str, list[int]] = field(default_factory=dict)
    outputs: dict[str, list[int]] = field(default_factory=dict)
    name: str = ""

    def __len__(self):
        return len(self.ops)

    @property
    def registers(self) -> list[int]:
        return [i for i, op in enumerate(self.ops) if op == Op.REG]

    @property
    def is_combinational(self) -> bool:
        return Op.REG not in self.ops

    def width(self, port: str) -> int:
        if port in self.inputs:
            return len(self.inputs[port])
        return len(self.outputs[port])

    def gate_count(self, op: Op | None = None) -> int:
        if op is None:
            return sum(1 for o in self.ops if o in (Op.NOT, Op.AND, Op.XOR))
        return sum(1 for o in self.ops if o == op)

    def signal(self, name: str) -> list[int]:
        if name in self.outputs:
            return self.outputs[name]
        if name in self.inputs:
            return self.inputs[name]
        raise KeyError(f"no signal named {name!r} in {self.name or 'circuit'}")

    def has_signal(self, name: str) -> bool:
        return name in self.outputs or name in self.inputs

    def validate(self) -> None:
        """Check operand ordering, register targets and port-name uniqueness."""
        n = len(self.ops)
        for i, op in enumerate(self.ops):
            if op in (Op.NOT, Op.AND, Op.XOR):
                for x in (self.a[i],) if op == Op.NOT else (self.a[i], self.b[i]):
                    if not 0 <= x < i:
                        raise ValueError(f"node {i} ({Op(op).name}) references {x}, not an earlier node")
            elif op == Op.REG:
                if not 0 <= self.a[i] < n:
                    raise ValueError(f"register {i} has undefined next-value {self.a[i]}")
        clash = set(self.inputs) & set(self.outputs)
        if clash:
            raise ValueError(f"port names used as both input and output: {sorted(clash)}")
        seen: set[int] = set()
        for name, bits in self.inputs.items():
            for x in bits:
                if self.ops[x] != Op.INPUT:
                    raise ValueError(f"input port {name} bound to non-input node {x}")
                if x in seen:
                    raise ValueError(f"input node {x} bound twice")
                seen.add(x)

    def cone(self, roots: Iterable[int]) -> list[bool]:
        """Nodes in the transitive fan-in of ``roots``, following register next-values."""
        mark = [False] * len(self.ops)
        stack = list(roots)
        while stack:
            x = stack.pop()
            if mark[x]:
                continue
            mark[x] = True
            op = self.ops[x]
            if op in (Op.AND, Op.XOR):
                stack.append(self.a[x])
                stack.append(self.b[x])
            elif op in (Op.NOT, Op.REG):
                stack.append(self.a[x])
        return mark

    def depths(self) -> list[int]:
        """Combinational depth of every node (sources are depth 0)."""
        d = [0] * len(self.ops)
        for i, op in enumerate(self.ops):
            if op == Op.NOT:
                d[i] = d[self.a[i]] + 1
            elif op in (Op.AND, Op.XOR):
                d[i] = max(d[self.a[i]], d[self.b[i]]) + 1
        return d

    # -- text netlist ------------------------------------------------------
    def to_netlist(self) -> str:
        lines = [f"circuit {self.name or 'top'} nodes {len(self.ops)}"]
        for name, bits in self.inputs.items():
            lines.append(f"input {name} " + " ".join(map(str, bits)))
        for name, bits in self.outputs.items():
            lines.append(f"output {name} " + " ".join(map(str, bits)))
        for i, op in enumerate(self.ops):
            if op in (Op.INPUT, Op.CONST0, Op.CONST1):
                lines.append(f"{i} {OP_NAMES[Op(op)]}")
            elif op == Op.NOT:
                lines.append(f"{i} NOT {self.a[i]}")
            elif op == Op.REG:
                lines.append(f"{i} REG {self.a[i]} init={self.b[i]}")
            else:
                lines.append(f"{i} {OP_NAMES[Op(op)]} {self.a[i]} {self.b[i]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_netlist(cls, text: str) -> "Circuit":
        c = cls()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            parts = raw.split()
            if not parts:
                continue
            head = parts[0]
            try:
                if head == "circuit":
                    c.name = parts[1] if parts[1] != "top" else ""
                elif head == "input":
                    c.inputs[parts[1]] = [int(x) for x in parts[2:]]
                elif head == "output":
                    c.outputs[parts[1]] = [int(x) for x in parts[2:]]
                else:
                    idx = int(head)
                    if idx != len(c.ops):
                        raise ValueError(f"node id {idx} out of sequence")
                    op = _NAME_OPS[parts[1]]
                    a = b = -1
                    if op == Op.NOT:
                        a = int(parts[2])
                    elif op in (Op.AND, Op.XOR):
                        a, b = int(parts[2]), int(parts[3])
                    elif op == Op.REG:
                        a = int(parts[2])
                        b = int(parts[3].split("=")[1])
                    c.ops.append(int(op))
                    c.a.append(a)
                    c.b.append(b)
            except (IndexError, KeyError, ValueError) as exc:
                raise ValueError(f"netlist line {lineno}: {exc}") from None
        c.validate()
        return c

    def to_aiger(self) -> str:
        """AIGER ASCII (``aag``) export; XOR is lowered to three ANDs."""
        lit = [0] * len(self.ops)
        next_var = 1
        input_nodes = [x for bits in self.inputs.values() for x in bits]
        latch_nodes = self.registers
        for x in input_nodes:
            lit[x] = 2 * next_var
            next_var += 1
        for x in latch_nodes:
            lit[x] = 2 * next_var
            next_var += 1
        ands: list[tuple[int, int, int]] = []

        def new_and(l0: int, l1: int) -> int:
            nonlocal next_var
            out = 2 * next_var
            next_var += 1
            ands.append((out, l0, l1))
            return out

        for i, op in enumerate(self.ops):
            if op == Op.CONST0:
                lit[i] = 0
            elif op == Op.CONST1:
                lit[i] = 1
            elif op == Op.NOT:
                lit[i] = lit[self.a[i]] ^ 1
            elif op == Op.AND:
                lit[i] = new_and(lit[self.a[i]], lit[self.b[i]])
            elif op == Op.XOR:
                x, y = lit[self.a[i]], lit[self.b[i]]
                both = new_and(x, y)
                neither = new_and(x ^ 1, y ^ 1)
                lit[i] = new_and(both ^ 1, neither ^ 1)
        out_lits = [lit[x] for bits in self.outputs.values() for x in bits]
        max_var = next_var - 1
        lines = [f"aag {max_var} {len(input_nodes)} {len(latch_nodes)} {len(out_lits)} {len(ands)}"]
        lines += [str(lit[x]) for x in input_nodes]
        lines += [f"{lit[x]} {lit[self.a[x]]} {self.b[x]}" for x in latch_nodes]
        lines += [str(x) for x in out_lits]
        lines += [f"{o} {l0} {l1}" for o, l0, l1 in ands]
        k = 0
        for name, bits in self.inputs.items():
            for j in range(len(bits)):
                lines.append(f"i{k} {name}[{j}]")
                k += 1
        k = 0
        for name, bits in self.outputs.items():
            for j in range(len(bits)):
                lines.append(f"o{k} {name}[{j}]")
                k += 1
        return "\n".join(lines) + "\n"


class Builder:
    """Incremental circuit construction with constant folding and structural hashing."""

    def __init__(self, name: str = ""):
        self.c = Circuit(name=name)
        self._strash: dict[tuple[int, int, int], int] = {}
        self._const = [-1, -1]

    def _node(self, op: int, a: int = -1, b: int = -1) -> int:
        self.c.ops.append(op)
        self.c.a.append(a)
        self.c.b.append(b)
        return len(self.c.ops) - 1

    def const(self, bit: int) -> int:
        bit = 1 if bit else 0
        if self._const[bit] < 0:
            self._const[bit] = self._node(Op.CONST1 if bit else Op.CONST0)
        return self._const[bit]

    def _is_const(self, x: int) -> int | None:
        op = self.c.ops[x]
        if op == Op.CONST0:
            return 0
        if op == Op.CONST1:
            return 1
        return None

    def input(self, name: str, width: int) -> list[int]:
        if name in self.c.inputs or name in self.c.outputs:
            raise ValueError(f"duplicate port name {name!r}")
        bits = [self._node(Op.INPUT) for _ in range(width)]
        self.c.inputs[name] = bits
        return bits

    def output(self, name: str, bits: Sequence[int]) -> None:
        if name in self.c.inputs or name in self.c.outputs:
            raise ValueError(f"duplicate port name {name!r}")
        self.c.outputs[name] = list(bits)

    def not_(self, x: int) -> int:
        k = self._is_const(x)
        if k is not None:
            return self.const(1 - k)
        if self.c.ops[x] == Op.NOT:
            return self.c.a[x]
        key = (Op.NOT, x, -1)
        if key not in self._strash:
            self._strash[key] = self._node(Op.NOT, x)
        return self._strash[key]

    def and_(self, x: int, y: int) -> int:
        kx, ky = self._is_const(x), self._is_const(y)
        if kx == 0 or ky == 0:
            return self.const(0)
        if kx == 1:
            return y
        if ky == 1:
            return x
        if x == y:
            return x
        if x > y:
            x, y = y, x
        if self.c.ops[y] == Op.NOT and self.c.a[y] == x:
            return self.const(0)
        key = (Op.AND, x, y)
        if key not in self._strash:
            self._strash[key] = self._node(Op.AND, x, y)
        return self._strash[key]

    def xor(self, x: int, y: int) -> int:
        kx, ky = self._is_const(x), self._is_const(y)
        if kx is not None and ky is not None:
            return self.const(kx ^ ky)
        if kx is not None:
            return self.not_(y) if kx else y
        if ky is not None:
            return self.not_(x) if ky else x
        if x == y:
            return self.const(0)
        if x > y:
            x, y = y, x
        key = (Op.XOR, x, y)
        if key not in self._strash:
            self._strash[key] = self._node(Op.XOR, x, y)
        return self._strash[key]

    def or_(self, x: int, y: int) -> int:
        return self.not_(self.and_(self.not_(x), self.not_(y)))

    def xnor(self, x: int, y: int) -> int:
        return self.not_(self.xor(x, y))

    def mux(self, sel: int, then: int, other: int) -> int:
        if then == other:
            return then
        return self.or_(self.and_(sel, then), self.and_(self.not_(sel), other))

    def xor_chain(self, bits: Sequence[int]) -> int:
        """Left-to-right XOR chain; the order fixes the gate structure."""
        acc = self.const(0)
        for x in bits:
            acc = self.xor(acc, x)
        return acc

    def and_chain(self, bits: Sequence[int]) -> int:
        acc = self.const(1)
        for x in bits:
            acc = self.and_(acc, x)
        return acc

    def _tree(self, bits: Sequence[int], fn, unit: int) -> int:
        level = list(bits)
        if not level:
            return self.const(unit)
        while len(level) > 1:
            nxt = [fn(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    def or_tree(self, bits: Sequence[int]) -> int:
        return self._tree(bits, self.or_, 0)

    def and_tree(self, bits: Sequence[int]) -> int:
        return self._tree(bits, self.and_, 1)

    def eq_vec(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        if len(xs) != len(ys):
            raise ValueError(f"width mismatch {len(xs)} vs {len(ys)}")
        return self.and_tree([self.xnor(x, y) for x, y in zip(xs, ys)])

    def register(self, init: int = 0) -> int:
        """New register; its next-value must be set with :meth:`set_next`."""
        return self._node(Op.REG, -1, 1 if init else 0)

    def set_next(self, reg: int, nxt: int) -> None:
        if self.c.ops[reg] != Op.REG:
            raise ValueError(f"node {reg} is not a register")
        self.c.a[reg] = nxt

    def instantiate(self, sub: Circuit, bindings: Mapping[str, Sequence[int]]) -> dict[str, list[int]]:
        """Copy ``sub`` into this circuit with its inputs driven by ``bindings``."""
        m = [-1] * len(sub.ops)
        for name, bits in sub.inputs.items():
            if name not in bindings:
                raise KeyError(f"unbound input {name!r} of {sub.name or 'sub-circuit'}")
            src = list(bindings[name])
            if len(src) != len(bits):
                raise ValueError(f"width mismatch binding {name}: {len(src)} vs {len(bits)}")
            for x, s in zip(bits, src):
                m[x] = s
        regs = []
        for i, op in enumerate(sub.ops):
            if op == Op.INPUT:
                if m[i] < 0:
                    raise ValueError(f"input node {i} of sub-circuit is not bound to a port")
            elif op == Op.CONST0:
                m[i] = self.const(0)
            elif op == Op.CONST1:
                m[i] = self.const(1)
            elif op == Op.NOT:
                m[i] = self.not_(m[sub.a[i]])
            elif op == Op.AND:
                m[i] = self.and_(m[sub.a[i]], m[sub.b[i]])
            elif op == Op.XOR:
                m[i] = self.xor(m[sub.a[i]], m[sub.b[i]])
            elif op == Op.REG:
                m[i] = self.register(sub.b[i])
                regs.append(i)
        for i in regs:
            self.set_next(m[i], m[sub.a[i]])
        return {name: [m[x] for x in bits] for name, bits in sub.outputs.items()}

    def build(self) -> Circuit:
        for i, op in enumerate(self.c.ops):
            if op == Op.REG and self.c.a[i] < 0:
                raise ValueError(f"register {i} has no next-value")
        self.c.validate()
        return self.c


def copy_into_builder(c: Circuit) -> tuple[Builder, dict[str, list[int]]]:
    """Start a new builder holding a copy of ``c`` (ports preserved)."""
    b = Builder(c.name)
    bindings = {name: b.input(name, len(bits)) for name, bits in c.inputs.items()}
    outs = b.instantiate(c, bindings)
    for name, bits in outs.items():
        b.output(name, bits)
    return b, outs


# -- simulation ---------------------------------------------------------------

def _mask(width: int) -> int:
    return (1 << width) - 1


def evaluate(c: Circuit, inputs: Mapping[int, int], state: Mapping[int, int], lanes: int = 1) -> list[int]:
    """Evaluate every node for one cycle.

    Values are bit-parallel: bit ``l`` of each integer is lane ``l``.
    ``inputs`` and ``state`` map input / register node ids to lane words.
    """
    full = _mask(lanes)
    val = [0] * len(c.ops)
    ops, A, B = c.ops, c.a, c.b
    for i, op in enumerate(ops):
        if op == Op.AND:
            val[i] = val[A[i]] & val[B[i]]
        elif op == Op.XOR:
            val[i] = val[A[i]] ^ val[B[i]]
        elif op == Op.NOT:
            val[i] = full ^ val[A[i]]
        elif op == Op.INPUT:
            val[i] = inputs.get(i, 0)
        elif op == Op.REG:
            val[i] = state[i]
        elif op == Op.CONST1:
            val[i] = full
    return val


def initial_state(c: Circuit, lanes: int = 1) -> dict[int, int]:
    full = _mask(lanes)
    return {r: (full if c.b[r] else 0) for r in c.registers}


def pack_port(c: Circuit, name: str, value: int) -> dict[int, int]:
    return {x: (value >> j) & 1 for j, x in enumerate(c.inputs[name])}


def read_port(bits: Sequence[int], val: Sequence[int]) -> int:
    out = 0
    for j, x in enumerate(bits):
        if val[x] & 1:
            out |= 1 << j
    return out


def simulate(
    c: Circuit,
    stimulus: Sequence[Mapping[str, int]],
    init: Mapping[int, int] | None = None,
    signals: Iterable[str] | None = None,
) -> list[dict[str, int]]:
    """Cycle-accurate simulation.

    ``stimulus[t]`` assigns an integer value to every input port at cycle ``t``.
    Returns per-cycle values of the outputs (or of ``signals``, which may name
    inputs too). ``init`` overrides register start values (node id -> bit).
    """
    state = initial_state(c)
    if init:
        for r, v in init.items():
            if c.ops[r] != Op.REG:
                raise ValueError(f"node {r} is not a register")
            state[r] = 1 if v else 0
    names = list(signals) if signals is not None else list(c.outputs)
    regs = c.registers
    out = []
    for t, assign in enumerate(stimulus):
        missing = set(c.inputs) - set(assign)
        if missing:
            raise ValueError(f"cycle {t}: missing input assignment for {sorted(missing)}")
        inputs: dict[int, int] = {}
        for name, bits in c.inputs.items():
            v = assign[name]
            for j, x in enumerate(bits):
                inputs[x] = (v >> j) & 1
        val = evaluate(c, inputs, state)
        out.append({name: read_port(c.signal(name), val) for name in names})
        state = {r: val[c.a[r]] for r in regs}
    return out


def run_states(c: Circuit, stimulus: Sequence[Mapping[str, int]], init: Mapping[int, int] | None = None):
    """Like :func:`simulate` but yields ``(node values, register state)`` per cycle."""
    state = initial_state(c)
    if init:
        state.update({r: 1 if v else 0 for r, v in init.items()})
    regs = c.registers
    for assign in stimulus:
        inputs: dict[int, int] = {}
        for name, bits in c.inputs.items():
            v = assign.get(name, 0)
            for j, x in enumerate(bits):
                inputs[x] = (v >> j) & 1
        val = evaluate(c, inputs, state)
        yield val, state
        state = {r: val[c.a[r]] for r in regs}


def evaluate_lanes(c: Circuit, port_lanes: Mapping[str, Sequence[int]]) -> dict[str, list[int]]:
    """Evaluate a combinational circuit on many input vectors at once.

    ``port_lanes[name][l]`` is the value of port ``name`` in lane ``l``.
    Returns output values per lane.
    """
    if not c.is_combinational:
        raise ValueError("evaluate_lanes needs a combinational circuit")
    lanes = None
    inputs: dict[int, int] = {}
    for name, bits in c.inputs.items():
        vals = list(port_lanes[name])
        if lanes is None:
            lanes = len(vals)
        elif len(vals) != lanes:
            raise ValueError("ragged lane counts")
        for j, x in enumerate(bits):
            w = 0
            for l, v in enumerate(vals):
                if (v >> j) & 1:
                    w |= 1 << l
            inputs[x] = w
    lanes = lanes or 1
    val = evaluate(c, inputs, {}, lanes)
    out: dict[str, list[int]] = {}
    for name, bits in c.outputs.items():
        words = [val[x] for x in bits]
        out[name] = [sum(((w >> l) & 1) << j for j, w in enumerate(words)) for l in range(lanes)]
    return out
