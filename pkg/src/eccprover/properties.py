"""Property expressions, verification plans, and their lowering into monitor logic.

Expressions are small immutable trees. Vector-valued nodes (signals, free
symbols, constants, XOR, function application) produce integers; boolean
nodes produce 0/1. A width-1 vector is accepted wherever a boolean is.

The same tree has two semantics: :func:`eval_expr` evaluates it on concrete
per-cycle values, and :class:`Lowerer` turns it into gates so the model
checker sees every property as a single monitor bit.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .circuit import Builder, Circuit, copy_into_builder, evaluate_lanes
from .codes import CodeSpec
from .gf2 import BitVec
from .synth import flag_names, state_names  # noqa: F401  (state_names re-exported for traces)

KINDS = ("assert", "assume")
ROLES = ("target", "lemma", "constraint")
SYM_PREFIX = "sym."
WEIGHT_OPS = ("==", "<=", ">=")


class Expr:
    """Base class for expression nodes."""

    def children(self) -> tuple["Expr", ...]:
        return ()


@dataclass(frozen=True)
class Sig(Expr):
    name: str
    offset: int = 0

    def __post_init__(self):
        if self.offset > 0:
            raise ValueError("signal offsets refer to the past and must be <= 0")


@dataclass(frozen=True)
class Sym(Expr):
    name: str
    width: int


@dataclass(frozen=True)
class Const(Expr):
    value: int
    width: int

    def __post_init__(self):
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"constant {self.value} does not fit in {self.width} bits")


@dataclass(frozen=True)
class Xor(Expr):
    a: Expr
    b: Expr

    def children(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Apply(Expr):
    """Output ``output`` of registered function ``func`` with inputs bound to expressions."""

    func: str
    args: tuple[tuple[str, Expr], ...]
    output: str

    def children(self):
        return tuple(e for _, e in self.args)


@dataclass(frozen=True)
class Bit(Expr):
    """Single bit ``index`` of a vector expression."""

    a: Expr
    index: int

    def children(self):
        return (self.a,)


@dataclass(frozen=True)
class BoolConst(Expr):
    value: bool


@dataclass(frozen=True)
class Eq(Expr):
    a: Expr
    b: Expr

    def children(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Not(Expr):
    a: Expr

    def children(self):
        return (self.a,)


@dataclass(frozen=True)
class And(Expr):
    args: tuple[Expr, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(Expr):
    args: tuple[Expr, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Implies(Expr):
    a: Expr
    b: Expr

    def children(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class OneHot(Expr):
    """Exactly one of the (single-bit) arguments is set."""

    args: tuple[Expr, ...]

    def children(self):
        return self.args


@dataclass(frozen=True)
class Weight(Expr):
    """Relation between the number of set bits of ``a`` and ``bound``."""

    a: Expr
    op: str
    bound: int

    def __post_init__(self):
        if self.op not in WEIGHT_OPS:
            raise ValueError(f"weight relation must be one of {WEIGHT_OPS}")
        if self.bound < 0:
            raise ValueError("weight bound must be non-negative")

    def children(self):
        return (self.a,)


def apply(func: str, output: str, **args: Expr) -> Apply:
    return Apply(func, tuple(sorted(args.items())), output)


def conj(*args: Expr) -> Expr:
    return args[0] if len(args) == 1 else And(tuple(args))


def walk(e: Expr):
    yield e
    for c in e.children():
        yield from walk(c)


# -- prefix-form JSON ------------------------------------------------------------

def expr_to_json(e: Expr):
    if isinstance(e, Sig):
        return ["sig", e.name, e.offset]
    if isinstance(e, Sym):
        return ["sym", e.name, e.width]
    if isinstance(e, Const):
        return ["const", e.value, e.width]
    if isinstance(e, BoolConst):
        return ["bool", int(e.value)]
    if isinstance(e, Apply):
        return ["apply", e.func, e.output, {k: expr_to_json(v) for k, v in e.args}]
    if isinstance(e, Weight):
        return ["weight", e.op, e.bound, expr_to_json(e.a)]
    if isinstance(e, Bit):
        return ["bit", e.index, expr_to_json(e.a)]
    tag = {Xor: "xor", Eq: "eq", Not: "not", And: "and", Or: "or", Implies: "implies", OneHot: "onehot"}[type(e)]
    return [tag] + [expr_to_json(c) for c in e.children()]


def expr_from_json(j) -> Expr:
    tag, rest = j[0], j[1:]
    if tag == "sig":
        return Sig(rest[0], rest[1])
    if tag == "sym":
        return Sym(rest[0], rest[1])
    if tag == "const":
        return Const(rest[0], rest[1])
    if tag == "bool":
        return BoolConst(bool(rest[0]))
    if tag == "apply":
        return Apply(rest[0], tuple(sorted((k, expr_from_json(v)) for k, v in rest[2].items())), rest[1])
    if tag == "weight":
        return Weight(expr_from_json(rest[2]), rest[0], rest[1])
    if tag == "bit":
        return Bit(expr_from_json(rest[1]), rest[0])
    kids = [expr_from_json(x) for x in rest]
    if tag in ("xor", "eq", "implies"):
        return {"xor": Xor, "eq": Eq, "implies": Implies}[tag](*kids)
    if tag == "not":
        return Not(kids[0])
    if tag in ("and", "or", "onehot"):
        return {"and": And, "or": Or, "onehot": OneHot}[tag](tuple(kids))
    raise ValueError(f"unknown expression tag {tag!r}")


# -- properties and plans --------------------------------------------------------

@dataclass(frozen=True)
class Property:
    name: str
    kind: str
    role: str
    expr: Expr
    max_weight: int | None = None
    doc: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}")
        if (self.role == "constraint") != (self.kind == "assume"):
            raise ValueError("constraints are exactly the assume-kind properties")

    def to_json(self) -> dict:
        d = {"name": self.name, "kind": self.kind, "role": self.role, "expr": expr_to_json(self.expr)}
        if self.max_weight is not None:
            d["max_weight"] = self.max_weight
        if self.doc:
            d["doc"] = self.doc
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Property":
        return cls(d["name"], d["kind"], d["role"], expr_from_json(d["expr"]), d.get("max_weight"), d.get("doc", ""))


def target(name: str, expr: Expr, doc: str = "", max_weight: int | None = None) -> Property:
    return Property(name, "assert", "target", expr, max_weight, doc)


def lemma(name: str, expr: Expr, doc: str = "") -> Property:
    return Property(name, "assert", "lemma", expr, None, doc)


def constraint(name: str, expr: Expr, doc: str = "") -> Property:
    return Property(name, "assume", "constraint", expr, None, doc)


@dataclass
class VerificationPlan:
    """Properties over one system circuit plus lemma -> dependent edges."""

    system: Circuit
    properties: list[Property] = field(default_factory=list)
    depends: dict[str, list[str]] = field(default_factory=dict)  # target -> lemmas it assumes
    functions: dict[str, Circuit] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def by_name(self, name: str) -> Property:
        for p in self.properties:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def constraints(self) -> list[Property]:
        return [p for p in self.properties if p.role == "constraint"]

    @property
    def asserts(self) -> list[Property]:
        return [p for p in self.properties if p.kind == "assert"]

    def validate(self) -> None:
        names = [p.name for p in self.properties]
        if len(set(names)) != len(names):
            raise ValueError("duplicate property names in plan")
        index = {n: i for i, n in enumerate(names)}
        for dep, lemmas in self.depends.items():
            if dep not in index:
                raise ValueError(f"dependency on unknown property {dep!r}")
            for lem in lemmas:
                if lem not in index:
                    raise ValueError(f"{dep!r} depends on unknown lemma {lem!r}")
                if self.by_name(lem).kind != "assert":
                    raise ValueError(f"{dep!r} depends on {lem!r}, which is not provable")
                if index[lem] >= index[dep]:
                    raise ValueError(f"lemma {lem!r} must precede its dependent {dep!r}")
        # Ordering already implies acyclicity; check explicitly for hand-built plans.
        state: dict[str, int] = {}

        def visit(n: str) -> None:
            if state.get(n) == 1:
                raise ValueError(f"dependency cycle through {n!r}")
            if state.get(n) == 2:
                return
            state[n] = 1
            for m in self.depends.get(n, []):
                visit(m)
            state[n] = 2

        for n in names:
            visit(n)
        for p in self.properties:
            check_expr(p.expr, self.system, self.functions)

    def to_json(self) -> str:
        return json.dumps(
            {
                "meta": self.meta,
                "properties": [p.to_json() for p in self.properties],
                "depends": self.depends,
                "functions": sorted(self.functions),
            },
            indent=2,
        )


# -- width checking and concrete semantics ---------------------------------------

def width_of(e: Expr, system: Circuit, functions: Mapping[str, Circuit]) -> int:
    """Bit width of a vector expression (1 for booleans)."""
    if isinstance(e, Sig):
        if not system.has_signal(e.name):
            raise ValueError(f"unknown signal {e.name!r}")
        return len(system.signal(e.name))
    if isinstance(e, (Sym, Const)):
        return e.width
    if isinstance(e, Xor):
        wa, wb = width_of(e.a, system, functions), width_of(e.b, system, functions)
        if wa != wb:
            raise ValueError(f"xor width mismatch {wa} vs {wb}")
        return wa
    if isinstance(e, Apply):
        if e.func not in functions:
            raise ValueError(f"unknown function {e.func!r}")
        f = functions[e.func]
        if e.output not in f.outputs:
            raise ValueError(f"function {e.func!r} has no output {e.output!r}")
        bound = dict(e.args)
        if set(bound) != set(f.inputs):
            raise ValueError(f"function {e.func!r} needs inputs {sorted(f.inputs)}")
        for name, arg in bound.items():
            if width_of(arg, system, functions) != len(f.inputs[name]):
                raise ValueError(f"argument {name!r} of {e.func!r} has the wrong width")
        return len(f.outputs[e.output])
    return 1


def check_expr(e: Expr, system: Circuit, functions: Mapping[str, Circuit]) -> None:
    for node in walk(e):
        width_of(node, system, functions)
        if isinstance(node, Eq):
            if width_of(node.a, system, functions) != width_of(node.b, system, functions):
                raise ValueError("equality width mismatch")
        elif isinstance(node, Bit):
            if not 0 <= node.index < width_of(node.a, system, functions):
                raise ValueError("bit index out of range")
        elif isinstance(node, Weight):
            if node.bound > width_of(node.a, system, functions):
                raise ValueError("weight bound exceeds vector length")
        elif isinstance(node, (Not, And, Or, Implies, OneHot)):
            for c in node.children():
                if width_of(c, system, functions) != 1:
                    raise ValueError(f"boolean operand of width {width_of(c, system, functions)}")


Lookup = Callable[[str, int], int]


def eval_expr(e: Expr, lookup: Lookup, functions: Mapping[str, Circuit]) -> int:
    """Concrete value of ``e``; ``lookup(name, offset)`` supplies signal values.

    Free symbols are looked up as ``sym.<name>`` at offset 0.
    """
    if isinstance(e, Sig):
        return lookup(e.name, e.offset)
    if isinstance(e, Sym):
        return lookup(SYM_PREFIX + e.name, 0)
    if isinstance(e, Const):
        return e.value
    if isinstance(e, BoolConst):
        return int(e.value)
    if isinstance(e, Xor):
        return eval_expr(e.a, lookup, functions) ^ eval_expr(e.b, lookup, functions)
    if isinstance(e, Apply):
        f = functions[e.func]
        vals = {name: [eval_expr(arg, lookup, functions)] for name, arg in e.args}
        return evaluate_lanes(f, vals)[e.output][0]
    if isinstance(e, Bit):
        return (eval_expr(e.a, lookup, functions) >> e.index) & 1
    if isinstance(e, Eq):
        return int(eval_expr(e.a, lookup, functions) == eval_expr(e.b, lookup, functions))
    if isinstance(e, Not):
        return 1 - eval_expr(e.a, lookup, functions)
    if isinstance(e, And):
        return int(all(eval_expr(c, lookup, functions) for c in e.args))
    if isinstance(e, Or):
        return int(any(eval_expr(c, lookup, functions) for c in e.args))
    if isinstance(e, Implies):
        return int(not eval_expr(e.a, lookup, functions) or bool(eval_expr(e.b, lookup, functions)))
    if isinstance(e, OneHot):
        return int(sum(eval_expr(c, lookup, functions) for c in e.args) == 1)
    if isinstance(e, Weight):
        w = bin(eval_expr(e.a, lookup, functions)).count("1")
        return int({"==": w == e.bound, "<=": w <= e.bound, ">=": w >= e.bound}[e.op])
    raise TypeError(f"cannot evaluate {type(e).__name__}")


def history_lookup(history: Sequence[Mapping[str, int]], t: int) -> Lookup:
    """Lookup over per-cycle values; cycles before 0 read as 0 (register init)."""

    def look(name: str, offset: int) -> int:
        c = t + offset
        return history[c][name] if c >= 0 else 0

    return look


# -- lowering into gates ---------------------------------------------------------

class Lowerer:
    """Adds monitor logic for expressions to a builder holding the system."""

    def __init__(self, b: Builder, ports: Mapping[str, list[int]], functions: Mapping[str, Circuit]):
        self.b = b
        self.ports = ports
        self.functions = functions
        self._delay: dict[tuple[int, int], int] = {}
        self._syms: dict[str, list[int]] = {}
        self._memo: dict[Expr, list[int]] = {}

    def delayed(self, x: int, d: int) -> int:
        if d == 0:
            return x
        key = (x, d)
        if key not in self._delay:
            prev = self.delayed(x, d - 1)
            r = self.b.register(0)
            self.b.set_next(r, prev)
            self._delay[key] = r
        return self._delay[key]

    def vec(self, e: Expr) -> list[int]:
        if e not in self._memo:
            self._memo[e] = self._vec(e)
        return self._memo[e]

    def _vec(self, e: Expr) -> list[int]:
        b = self.b
        if isinstance(e, Sig):
            return [self.delayed(x, -e.offset) for x in self.ports[e.name]]
        if isinstance(e, Sym):
            if e.name not in self._syms:
                self._syms[e.name] = b.input(SYM_PREFIX + e.name, e.width)
            bits = self._syms[e.name]
            if len(bits) != e.width:
                raise ValueError(f"symbol {e.name!r} used with widths {len(bits)} and {e.width}")
            return bits
        if isinstance(e, Const):
            return [b.const((e.value >> j) & 1) for j in range(e.width)]
        if isinstance(e, Xor):
            xs, ys = self.vec(e.a), self.vec(e.b)
            if len(xs) != len(ys):
                raise ValueError("xor width mismatch")
            return [b.xor(x, y) for x, y in zip(xs, ys)]
        if isinstance(e, Apply):
            outs = b.instantiate(self.functions[e.func], {name: self.vec(arg) for name, arg in e.args})
            return outs[e.output]
        return [self.bool(e)]

    def _counter(self, bits: Sequence[int], upto: int) -> list[int]:
        """Sequential counter: result[j] is 1 iff at least j of ``bits`` are set (j <= upto)."""
        b = self.b
        cur = [b.const(1)] + [b.const(0)] * upto
        for x in bits:
            nxt = [cur[0]]
            for j in range(1, upto + 1):
                nxt.append(b.or_(cur[j], b.and_(x, cur[j - 1])))
            cur = nxt
        return cur

    def bool(self, e: Expr) -> int:
        b = self.b
        if isinstance(e, BoolConst):
            return b.const(int(e.value))
        if isinstance(e, Bit):
            return self.vec(e.a)[e.index]
        if isinstance(e, Eq):
            return b.eq_vec(self.vec(e.a), self.vec(e.b))
        if isinstance(e, Not):
            return b.not_(self.bool(e.a))
        if isinstance(e, And):
            return b.and_tree([self.bool(c) for c in e.args])
        if isinstance(e, Or):
            return b.or_tree([self.bool(c) for c in e.args])
        if isinstance(e, Implies):
            return b.or_(b.not_(self.bool(e.a)), self.bool(e.b))
        if isinstance(e, OneHot):
            cnt = self._counter([self.bool(c) for c in e.args], 2)
            return b.and_(cnt[1], b.not_(cnt[2]))
        if isinstance(e, Weight):
            bits = self.vec(e.a)
            if e.bound > len(bits):
                raise ValueError("weight bound exceeds vector length")
            cnt = self._counter(bits, e.bound + 1)
            if e.op == ">=":
                return cnt[e.bound]
            if e.op == "<=":
                return b.not_(cnt[e.bound + 1])
            return b.and_(cnt[e.bound], b.not_(cnt[e.bound + 1]))
        bits = self.vec(e)
        if len(bits) != 1:
            raise ValueError(f"expected a single bit, got width {len(bits)}")
        return bits[0]


MONITOR_PREFIX = "prop."


def conjuncts(e: Expr, system: Circuit, functions: Mapping[str, Circuit]) -> list[Expr]:
    """Split ``e`` into boolean parts whose conjunction is equivalent to ``e``.

    Conjunctions are flattened, implications distribute over a conjunctive
    consequent, and vector equalities split into one equality per bit.
    """
    if isinstance(e, And):
        return [c for arg in e.args for c in conjuncts(arg, system, functions)]
    if isinstance(e, Implies):
        return [Implies(e.a, c) for c in conjuncts(e.b, system, functions)]
    if isinstance(e, Eq):
        w = width_of(e.a, system, functions)
        if w > 1:
            return [Eq(Bit(e.a, i), Bit(e.b, i)) for i in range(w)]
    return [e]


def compile_monitors(
    system: Circuit, props: Sequence[Property], functions: Mapping[str, Circuit]
) -> Circuit:
    """Copy of ``system`` with monitor outputs for every property.

    ``prop.<name>`` is the property bit; ``prop.<name>.parts`` holds one bit
    per conjunct (see :func:`conjuncts`), whose AND is the property bit.
    Free symbols become extra inputs named ``sym.<name>``; past-offset
    signals become delay registers with init 0.
    """
    b, _ = copy_into_builder(system)
    ports = {**b.c.inputs, **b.c.outputs}
    low = Lowerer(b, ports, functions)
    for p in props:
        parts = [low.bool(c) for c in conjuncts(p.expr, system, functions)]
        b.output(MONITOR_PREFIX + p.name, [b.and_tree(parts)])
        b.output(MONITOR_PREFIX + p.name + ".parts", parts)
    return b.build()


# -- plan construction -----------------------------------------------------------

def _require_ports(c: Circuit, names: Sequence[str]) -> None:
    missing = [n for n in names if not c.has_signal(n)]
    if missing:
        raise ValueError(f"circuit lacks required ports: {missing}")


def _error_model(spec: CodeSpec) -> Expr:
    return Eq(Sig("cw_i"), Xor(Sig("cw_o"), Sym("mask", spec.n)))


def build_core_properties(w: Circuit, spec: CodeSpec) -> list[Property]:
    """One-hot flags, per-weight detection, and the all-flags-low converse."""
    flags = flag_names(spec)
    _require_ports(w, ["data_i", "cw_o", "cw_i"] + flags)
    mask = Sym("mask", spec.n)
    props = [target("flags_one_hot", OneHot(tuple(Sig(f) for f in flags)), "exactly one decoder flag is raised")]
    for wt in range(spec.t_detect + 1):
        props.append(
            target(
                f"detect_w{wt}",
                Implies(And((_error_model(spec), Weight(mask, "==", wt))), Sig(flags[wt])),
                f"an error of weight {wt} raises {flags[wt]}",
                max_weight=wt,
            )
        )
    props.append(
        target(
            "flags_low_no_error",
            Implies(And((_error_model(spec), Weight(mask, "<=", spec.t_detect), Sig("no_err"))), Weight(mask, "==", 0)),
            "all error flags low implies the codeword was received intact",
            max_weight=spec.t_detect,
        )
    )
    return props


def build_correction_properties(spec: CodeSpec, data: Expr | None = None) -> list[Property]:
    """For each weight up to t_correct, the decoder returns the sent data."""
    data = data if data is not None else Sig("data_i")
    mask = Sym("mask", spec.n)
    return [
        target(
            f"correct_w{wt}",
            Implies(And((_error_model(spec), Weight(mask, "==", wt))), Eq(Sig("data_o"), data)),
            f"errors of weight {wt} are corrected",
            max_weight=wt,
        )
        for wt in range(spec.t_correct + 1)
    ]


SYNDROME_FN = "syndrome"


def build_linearity_lemmas(syn: Circuit, spec: CodeSpec) -> list[Property]:
    """Null syndrome on codewords, additivity, and data-independence of the syndrome.

    ``syn`` is registered as the function ``syndrome``; codewords come from
    the wrapper's encoder output ``cw_o``.
    """
    if len(syn.inputs.get("cw_i", [])) != spec.n or len(syn.outputs.get("s", [])) != spec.r:
        raise ValueError("syndrome circuit must map cw_i[n] to s[r]")
    zero = Const(0, spec.r)
    x, y, mask = Sym("x", spec.n), Sym("y", spec.n), Sym("mask", spec.n)
    f = lambda v: apply(SYNDROME_FN, "s", cw_i=v)  # noqa: E731
    cw = Sig("cw_o")
    return [
        lemma("L1_null_syndrome", Eq(f(cw), zero), "a codeword produced by the encoder has a zero syndrome"),
        lemma("L2_linearity", Eq(Xor(f(x), f(y)), f(Xor(x, y))), "the syndrome of a sum is the sum of syndromes"),
        lemma("L3_position_only", Eq(f(Xor(cw, mask)), f(mask)),
              "the syndrome of a corrupted codeword depends only on the error mask"),
    ]


def random_fixed_data(spec: CodeSpec, seed: int) -> BitVec:
    rng = random.Random(seed)
    return BitVec(spec.k, rng.getrandbits(spec.k))


def build_reduced_targets(
    w: Circuit, spec: CodeSpec, fixed_data: BitVec, correction: bool = True
) -> tuple[list[Property], list[str]]:
    """Detection and correction targets with the data input pinned.

    The pin is part of each target's antecedent rather than a plan-wide
    constraint, so the lemmas that justify it are still proven for all data.
    Returns the targets and the names of the lemmas they depend on.
    """
    if fixed_data.len != spec.k:
        raise ValueError(f"fixed data has {fixed_data.len} bits, code has k={spec.k}")
    pinned = Const(fixed_data.bits, spec.k)
    pin = Eq(Sig("data_i"), pinned)
    props = []
    base = build_core_properties(w, spec)
    if correction:
        base += build_correction_properties(spec, pinned)
    for p in base:
        props.append(Property(p.name, p.kind, p.role, Implies(pin, p.expr), p.max_weight,
                              p.doc + f" (data pinned to {fixed_data.bits:#x})"))
    return props, ["L1_null_syndrome", "L2_linearity", "L3_position_only"]


def build_full_plan(
    spec: CodeSpec,
    wrapper: Circuit,
    lemmas: bool = True,
    fixed_data: BitVec | None = None,
    targets: bool = True,
    correction: bool = True,
) -> VerificationPlan:
    """Combinational plan over the wrapper: lemmas, then detection/correction targets.

    ``correction=False`` keeps only the flag properties (one-hot, detection
    and the all-low converse).
    """
    from .synth import synth_syndrome

    syn = synth_syndrome(spec)
    plan = VerificationPlan(system=wrapper, functions={SYNDROME_FN: syn})
    lem = build_linearity_lemmas(syn, spec) if lemmas else []
    plan.properties += lem
    if targets:
        if fixed_data is not None:
            props, deps = build_reduced_targets(wrapper, spec, fixed_data, correction)
            plan.meta["fixed_data"] = fixed_data.bits
        else:
            props = build_core_properties(wrapper, spec)
            if correction:
                props += build_correction_properties(spec)
            deps = [p.name for p in lem]
        plan.properties += props
        if lemmas:
            for p in props:
                if p.role == "target":
                    plan.depends[p.name] = list(deps)
    plan.meta["code"] = spec.name
    plan.validate()
    return plan


def build_sequential_assumptions(seq: Circuit) -> list[Property]:
    """Starts only from an idle lane, and no start while the other lane is busy."""
    _require_ports(seq, ["enc_start_i", "dec_start_i", "rst_n_i", "enc_state", "dec_state"])
    enc_idle = Eq(Sig("enc_state"), Const(1, len(seq.signal("enc_state"))))
    dec_idle = Eq(Sig("dec_state"), Const(1, len(seq.signal("dec_state"))))
    return [
        constraint("C1_start_from_idle", Implies(Sig("dec_start_i"), dec_idle),
                   "the decoder is only started from its IDLE state"),
        constraint("C2_no_overlap",
                   And((Implies(Sig("dec_start_i"), enc_idle),
                        Implies(Sig("enc_start_i"), And((enc_idle, dec_idle))))),
                   "no transaction starts while another is in flight"),
    ]


ENC_MODEL_FN = "model_enc"
DEC_MODEL_FN = "model_dec"


def build_equivalence_property(
    seq: Circuit, model: Circuit, latency: int, lane: str = "enc", func: str = ENC_MODEL_FN
) -> Property:
    """At the lane's valid cycle, its outputs equal the model on the inputs from ``latency`` cycles before."""
    valid = f"{lane}_valid_o"
    _require_ports(seq, [valid])
    for name, bits in model.inputs.items():
        if not seq.has_signal(name) or len(seq.signal(name)) != len(bits):
            raise ValueError(f"model input {name!r} has no same-width counterpart in the sequential circuit")
    outs = [o for o in model.outputs if seq.has_signal(o)]
    if not outs:
        raise ValueError("model and sequential circuit share no outputs")
    for o in outs:
        if len(seq.signal(o)) != len(model.outputs[o]):
            raise ValueError(f"output {o!r} width mismatch")
    args = {name: Sig(name, -latency) for name in model.inputs}
    eqs = tuple(Eq(Sig(o), apply(func, o, **args)) for o in outs)
    return target(
        f"{lane}_equivalence",
        Implies(Sig(valid), conj(*eqs)),
        f"{lane} pipeline output matches the combinational model {latency} cycles after start",
    )


def build_sequential_plan(
    spec: CodeSpec,
    core: Circuit,
    enc_model: Circuit,
    dec_model: Circuit,
    encode_cycles: int,
    decode_cycles: int,
    constraints: bool = True,
) -> VerificationPlan:
    plan = VerificationPlan(system=core, functions={ENC_MODEL_FN: enc_model, DEC_MODEL_FN: dec_model})
    if constraints:
        plan.properties += build_sequential_assumptions(core)
    plan.properties.append(build_equivalence_property(core, enc_model, encode_cycles, "enc", ENC_MODEL_FN))
    dec_props = build_equivalence_property(core, dec_model, decode_cycles, "dec", DEC_MODEL_FN)
    plan.properties.append(dec_props)
    plan.meta["code"] = spec.name
    plan.validate()
    return plan
