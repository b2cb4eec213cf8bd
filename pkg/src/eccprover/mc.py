"""SAT-based bounded model checking and k-induction over circuits.

A :class:`TransitionSystem` is a circuit whose properties have been lowered
to monitor outputs. Each check unrolls only the cone of influence of the
monitors it needs, one Tseitin frame at a time, into an incremental solver;
the negated target is passed as an assumption so later frames reuse all
learnt clauses.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

from .circuit import Circuit, Op, run_states
from .properties import MONITOR_PREFIX, SYM_PREFIX, Property, VerificationPlan, compile_monitors
from .sat import Cnf, Solver, Status
from .synth import state_names

log = logging.getLogger(__name__)

PROVEN = "proven"
BOUNDED = "bounded"
CEX = "cex"
INDUCTION_CEX = "induction_cex"
UNKNOWN = "unknown"


class TransitionSystem:
    """Circuit plus monitor outputs for a set of properties."""

    def __init__(self, system: Circuit, props: Sequence[Property], functions: Mapping[str, Circuit] | None = None):
        self.system = system
        self.props = {p.name: p for p in props}
        self.functions = dict(functions or {})
        self.circuit = compile_monitors(system, props, self.functions)

    def monitor(self, name: str) -> int:
        return self.circuit.outputs[MONITOR_PREFIX + name][0]

    def parts(self, name: str) -> list[int]:
        """Monitor bits of the conjuncts of property ``name``."""
        return self.circuit.outputs[MONITOR_PREFIX + name + ".parts"]

    @property
    def constraints(self) -> list[Property]:
        return [p for p in self.props.values() if p.role == "constraint"]


# -- Tseitin encoding -------------------------------------------------------------

class _Sink:
    """Minimal solver stand-in that records clauses for DIMACS export."""

    def __init__(self):
        self.num_vars = 0
        self.clauses: list[list[int]] = []

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits) -> bool:
        self.clauses.append(list(lits))
        return True

    def add_flat(self, flat: Sequence[int], count: int) -> bool:
        cur: list[int] = []
        for x in flat:
            if x == 0:
                self.clauses.append(cur)
                cur = []
            else:
                cur.append(x)
        return True


def _encode_nodes(
    c: Circuit,
    nodes: Sequence[int],
    lit: list[int],
    solver,
    true_lit: int,
    fold_not: bool = False,
    affine: dict | None = None,
) -> int:
    """Assign literals to ``nodes`` (in index order) and add their defining clauses.

    Inputs and registers that have no literal yet get fresh variables. With
    ``fold_not`` a NOT gate takes the negated literal of its operand instead
    of a fresh variable. When ``affine`` is a dict, XOR/NOT cones are
    normalised to affine forms over their non-linear leaves and nodes with the
    same form share a literal (see :class:`_Affine`). Returns the number of
    clauses added.
    """
    ops, A, B = c.ops, c.a, c.b
    flat: list[int] = []
    count = 0
    new_var = solver.new_var
    lin = _Affine(lit, true_lit) if affine is not None else None
    for i in nodes:
        op = ops[i]
        if op == Op.XOR:
            x, y = lit[A[i]], lit[B[i]]
            if lin is not None:
                form = lin.xor(A[i], B[i])
                known = lin.lookup(form)
                if known is not None:
                    lit[i] = known
                    lin.forms[i] = form
                    continue
            v = new_var()
            flat += (-v, x, y, 0, -v, -x, -y, 0, v, -x, y, 0, v, x, -y, 0)
            count += 4
            if lin is not None:
                lin.forms[i] = form
                lin.table[form[0]] = (v, form[1])
        elif op == Op.AND:
            v = new_var()
            x, y = lit[A[i]], lit[B[i]]
            flat += (-v, x, 0, -v, y, 0, v, -x, -y, 0)
            count += 3
        elif op == Op.NOT:
            if lin is not None and A[i] in lin.forms:
                m, k = lin.forms[A[i]]
                lin.forms[i] = (m, k ^ 1)
            if fold_not:
                v = -lit[A[i]]
            else:
                v = new_var()
                x = lit[A[i]]
                flat += (v, x, 0, -v, -x, 0)
                count += 2
        elif op == Op.INPUT or op == Op.REG:
            if lit[i] == 0:
                v = new_var()
            else:
                continue
        elif op == Op.CONST1:
            v = true_lit
        else:
            v = -true_lit
        lit[i] = v
    solver.add_flat(flat, count)
    return count


class _Affine:
    """Affine forms over GF(2) for the XOR/NOT part of one frame.

    A form is ``(mask, const)``: the XOR of the leaves selected by ``mask``
    plus ``const``. Leaves are the non-XOR nodes feeding XOR gates, numbered
    on first use. Two nodes with equal masks compute the same function up to
    the constant, so they can share a literal (negated if the constants
    differ). This is a sound, purely structural rewrite.
    """

    def __init__(self, lit: list[int], true_lit: int):
        self.lit = lit
        self.true_lit = true_lit
        self.forms: dict[int, tuple[int, int]] = {}
        self.leaf: dict[int, int] = {}
        self.table: dict[int, tuple[int, int]] = {0: (true_lit, 1)}

    def form(self, node: int) -> tuple[int, int]:
        f = self.forms.get(node)
        if f is not None:
            return f
        lit = self.lit[node]
        if lit == self.true_lit:
            return (0, 1)
        if lit == -self.true_lit:
            return (0, 0)
        if node not in self.leaf:
            self.leaf[node] = len(self.leaf)
            m = 1 << self.leaf[node]
            self.table.setdefault(m, (lit, 0))
        return (1 << self.leaf[node], 0)

    def xor(self, a: int, b: int) -> tuple[int, int]:
        fa, fb = self.form(a), self.form(b)
        return (fa[0] ^ fb[0], fa[1] ^ fb[1])

    def lookup(self, form: tuple[int, int]) -> int | None:
        hit = self.table.get(form[0])
        if hit is None:
            return None
        lit, k = hit
        return lit if k == form[1] else -lit


def tseitin_encode(c: Circuit, solver, state: Mapping[int, int] | None = None) -> list[int]:
    """Encode one combinational frame of ``c``; returns node -> literal.

    Register outputs take literals from ``state`` when given, otherwise fresh
    variables. Constants use one shared variable forced true.
    """
    t = solver.new_var()
    solver.add_clause([t])
    lit = [0] * len(c.ops)
    for r, v in (state or {}).items():
        lit[r] = v
    _encode_nodes(c, range(len(c.ops)), lit, solver, t)
    return lit


class Unroller:
    """Frame-by-frame unrolling of the cone of influence of some monitor nodes."""

    def __init__(self, ts: TransitionSystem, solver, roots: Sequence[int], init: bool, always: Sequence[int] = ()):
        self.ts = ts
        self.c = ts.circuit
        self.solver = solver
        self.always = list(always)
        mark = self.c.cone(list(roots) + self.always)
        self.nodes = [i for i, m in enumerate(mark) if m]
        self.regs = [i for i in self.nodes if self.c.ops[i] == Op.REG]
        self.inputs = [i for i in self.nodes if self.c.ops[i] == Op.INPUT]
        self.init = init
        self.frames: list[list[int]] = []
        self.true_lit = solver.new_var()
        solver.add_clause([self.true_lit])
        self.clauses = 1
        self.distinct_upto = 0

    @property
    def stateless(self) -> bool:
        return not self.regs

    def lit(self, frame: int, node: int) -> int:
        return self.frames[frame][node]

    def add_frame(self) -> None:
        c = self.c
        lit = [0] * len(c.ops)
        if self.frames:
            prev = self.frames[-1]
            for r in self.regs:
                lit[r] = prev[c.a[r]]
        self.clauses += _encode_nodes(c, self.nodes, lit, self.solver, self.true_lit, fold_not=True, affine={})
        if not self.frames and self.init:
            for r in self.regs:
                self.solver.add_clause([lit[r] if c.b[r] else -lit[r]])
                self.clauses += 1
        for node in self.always:
            self.solver.add_clause([lit[node]])
            self.clauses += 1
        self.frames.append(lit)

    def ensure(self, last: int) -> None:
        while len(self.frames) <= last:
            self.add_frame()

    def add_distinct(self, upto: int) -> None:
        """Pairwise distinct register states among frames 0..upto."""
        s = self.solver
        for j in range(self.distinct_upto + 1, upto + 1):
            for i in range(j):
                diff = []
                for r in self.regs:
                    a, b = self.frames[i][r], self.frames[j][r]
                    if a == b:
                        continue
                    if a == -b:
                        diff = None
                        break
                    d = s.new_var()
                    s.add_flat([-d, a, b, 0, -d, -a, -b, 0], 2)
                    self.clauses += 2
                    diff.append(d)
                if diff is not None:
                    s.add_clause(diff)
                    self.clauses += 1
        self.distinct_upto = max(self.distinct_upto, upto)


# -- traces -----------------------------------------------------------------------

@dataclass
class Trace:
    """Inputs per cycle plus the register state at cycle 0.

    ``registers`` and ``signals`` hold the full per-cycle replay (register
    bits by node id and named port values).
    """

    property: str
    rooted_at_reset: bool
    init_state: dict[int, int]
    inputs: list[dict[str, int]]
    registers: list[dict[int, int]] = field(default_factory=list)
    signals: list[dict[str, int]] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.inputs)

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "rooted_at_reset": self.rooted_at_reset,
            "length": self.length,
            "init_state": {str(k): v for k, v in sorted(self.init_state.items())},
            "inputs": self.inputs,
            "signals": self.signals,
            "stages": self.stage_names(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trace":
        return cls(
            property=d["property"],
            rooted_at_reset=d["rooted_at_reset"],
            init_state={int(k): v for k, v in d["init_state"].items()},
            inputs=[dict(x) for x in d["inputs"]],
            signals=[dict(x) for x in d.get("signals", [])],
        )

    def stage_names(self) -> list[dict[str, str]]:
        out = []
        for sig in self.signals:
            row = {}
            for name in ("enc_state", "dec_state"):
                if name in sig:
                    row[name] = state_names(sig[name], sig.get(name + "_width", 0) or sig[name].bit_length())
            out.append(row)
        return out if any(out) else []

    def to_vcd_text(self) -> str:
        """Per-cycle waveform-style dump: one line per cycle and signal."""
        lines = [f"# property {self.property} rooted_at_reset={int(self.rooted_at_reset)} length={self.length}"]
        stages = self.stage_names()
        for t, sig in enumerate(self.signals):
            lines.append(f"#{t}")
            for name in sorted(sig):
                if name.endswith("_width"):
                    continue
                lines.append(f"  {name} = {sig[name]:#x}")
            if stages:
                for name, label in stages[t].items():
                    lines.append(f"  {name}.stage = {label}")
        return "\n".join(lines) + "\n"


def _trace_from_model(u: Unroller, model, last: int, prop: str, rooted: bool) -> Trace:
    c = u.c
    val = lambda l: (model[l - 1] if l > 0 else 1 - model[-l - 1])  # noqa: E731
    init_state = {r: c.b[r] for r in c.registers}
    for r in u.regs:
        init_state[r] = val(u.frames[0][r])
    inputs = []
    for f in range(last + 1):
        row = {}
        for name, bits in c.inputs.items():
            v = 0
            for j, x in enumerate(bits):
                l = u.frames[f][x]
                if l and val(l):
                    v |= 1 << j
            row[name] = v
        inputs.append(row)
    tr = Trace(prop, rooted, init_state, inputs)
    fill_trace(c, tr)
    # Consistency check between the SAT model and the simulator on the cone.
    for f, (vals, _) in enumerate(run_states(c, tr.inputs, tr.init_state)):
        for i in u.nodes:
            l = u.frames[f][i]
            if l and (vals[i] & 1) != val(l):
                raise AssertionError(f"trace replay diverges from the SAT model at cycle {f}, node {i}")
    return tr


def fill_trace(c: Circuit, tr: Trace) -> None:
    tr.registers, tr.signals = [], []
    regs = c.registers
    for vals, state in run_states(c, tr.inputs, tr.init_state):
        tr.registers.append({r: state[r] & 1 for r in regs})
        row = {}
        for name, bits in list(c.inputs.items()) + list(c.outputs.items()):
            v = 0
            for j, x in enumerate(bits):
                if vals[x] & 1:
                    v |= 1 << j
            row[name] = v
            if name in ("enc_state", "dec_state"):
                row[name + "_width"] = len(bits)
        tr.signals.append(row)


def replay(ts: TransitionSystem, tr: Trace) -> dict:
    """Re-simulate a trace; report whether it violates its property at the last cycle.

    Constraints must hold on every cycle; for reset-rooted traces the initial
    state must match the register init values.
    """
    c = ts.circuit
    fresh = Trace(tr.property, tr.rooted_at_reset, dict(tr.init_state), [dict(x) for x in tr.inputs])
    fill_trace(c, fresh)
    mon = MONITOR_PREFIX + tr.property
    cons = [MONITOR_PREFIX + p.name for p in ts.constraints]
    final = fresh.signals[-1][mon]
    constraints_ok = all(all(sig[m] == 1 for m in cons) for sig in fresh.signals)
    init_ok = all(fresh.init_state[r] == c.b[r] for r in c.registers)
    earlier_ok = all(sig[mon] == 1 for sig in fresh.signals[:-1])
    return {
        "violated_at_end": final == 0,
        "holds_before_end": earlier_ok,
        "constraints_hold": constraints_ok,
        "starts_at_reset": init_ok,
        "reproduces": final == 0 and constraints_ok and (init_ok or not tr.rooted_at_reset),
    }


# -- checks -----------------------------------------------------------------------

@dataclass
class CheckResult:
    property: str
    status: str
    bound: int
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    wall_ms: float = 0.0
    trace: Trace | None = None
    assumed_lemmas: list[str] = field(default_factory=list)
    missing_lemmas: list[str] = field(default_factory=list)

    @property
    def degraded(self) -> bool:
        return bool(self.missing_lemmas)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "property": self.property,
            "status": self.status,
            "bound": self.bound,
            "conflicts": self.conflicts,
            "decisions": self.decisions,
        }
        if timing:
            d["wall_ms"] = round(self.wall_ms, 3)
        if self.assumed_lemmas:
            d["assumed_lemmas"] = self.assumed_lemmas
        if self.missing_lemmas:
            d["degraded"] = True
            d["missing_lemmas"] = self.missing_lemmas
        if self.trace is not None:
            d["trace"] = self.trace.to_dict()
        return d


class _Budget:
    def __init__(self, total: int | None):
        self.total = total
        self.used = 0
        self.decisions = 0
        self.propagations = 0

    def remaining(self) -> int | None:
        return None if self.total is None or self.total < 0 else max(0, self.total - self.used)

    def solve(self, solver: Solver, assumptions):
        res = solver.solve(assumptions, self.remaining())
        self.used += res.conflicts
        self.decisions += res.decisions
        self.propagations += res.propagations
        return res


def _violate(budget: "_Budget", u: "Unroller", frame: int, parts: Sequence[int]):
    """Look for a model falsifying some conjunct at ``frame``.

    Returns the first SAT or UNKNOWN result, or the last UNSAT one. Each
    conjunct is tried in turn as a single negated assumption, which lets the
    solver reuse what it learnt while refuting the earlier ones.
    """
    res = None
    for x in dict.fromkeys(parts):
        res = budget.solve(u.solver, [-u.lit(frame, x)])
        if res.status is not Status.UNSAT:
            return res
    return res


def _finish(res: CheckResult, budget: _Budget, t0: float) -> CheckResult:
    res.conflicts = budget.used
    res.decisions = budget.decisions
    res.propagations = budget.propagations
    res.wall_ms = (time.perf_counter() - t0) * 1000.0
    return res


def _always_nodes(ts: TransitionSystem, lemmas: Sequence[Property]) -> list[int]:
    return [ts.monitor(p.name) for p in ts.constraints] + [ts.monitor(p.name) for p in lemmas]


def bmc(
    ts: TransitionSystem,
    target: str,
    k_max: int,
    conflict_budget: int | None = 10**7,
    seed: int = 0,
    backend: str | None = None,
    lemmas: Sequence[Property] = (),
) -> CheckResult:
    """Search for a reset-rooted violation of ``target`` within ``k_max`` steps."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    t0 = time.perf_counter()
    budget = _Budget(conflict_budget)
    p = ts.monitor(target)
    parts = ts.parts(target)
    u = Unroller(ts, Solver(seed=seed, backend=backend), [p], init=True, always=_always_nodes(ts, lemmas))
    for k in range(k_max + 1):
        u.ensure(k)
        r = _violate(budget, u, k, parts)
        if r.status is Status.SAT:
            return _finish(CheckResult(target, CEX, k, trace=_trace_from_model(u, r.model, k, target, True)), budget, t0)
        if r.status is Status.UNKNOWN:
            return _finish(CheckResult(target, UNKNOWN, k), budget, t0)
        u.solver.add_clause([u.lit(k, p)])
    return _finish(CheckResult(target, BOUNDED, k_max), budget, t0)


def k_induction(
    ts: TransitionSystem,
    target: str,
    lemmas: Sequence[Property] = (),
    k_max: int = 32,
    unique_states: bool = True,
    conflict_budget: int | None = 10**7,
    seed: int = 0,
    backend: str | None = None,
) -> CheckResult:
    """k-induction with lemmas and constraints assumed at every frame.

    For n = 0..k_max: a satisfiable base case gives a reset-rooted
    counterexample; an unsatisfiable step case proves the target. A step case
    that is still satisfiable at ``k_max`` yields an induction trace that
    need not start from a reachable state.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    t0 = time.perf_counter()
    budget = _Budget(conflict_budget)
    p = ts.monitor(target)
    parts = ts.parts(target)
    always = _always_nodes(ts, lemmas)
    base = Unroller(ts, Solver(seed=seed, backend=backend), [p], init=True, always=always)
    step: Unroller | None = None
    names = [x.name for x in lemmas]
    for n in range(k_max + 1):
        base.ensure(n)
        r = _violate(budget, base, n, parts)
        if r.status is Status.SAT:
            tr = _trace_from_model(base, r.model, n, target, True)
            return _finish(CheckResult(target, CEX, n, trace=tr, assumed_lemmas=names), budget, t0)
        if r.status is Status.UNKNOWN:
            return _finish(CheckResult(target, UNKNOWN, n, assumed_lemmas=names), budget, t0)
        base.solver.add_clause([base.lit(n, p)])
        if base.stateless:
            # No state: the base case already covers every input valuation.
            return _finish(CheckResult(target, PROVEN, n, assumed_lemmas=names), budget, t0)
        if step is None:
            step = Unroller(ts, Solver(seed=seed, backend=backend), [p], init=False, always=always)
        step.ensure(n + 1)
        step.solver.add_clause([step.lit(n, p)])
        if unique_states:
            step.add_distinct(n + 1)
        r = _violate(budget, step, n + 1, parts)
        if r.status is Status.UNSAT:
            return _finish(CheckResult(target, PROVEN, n, assumed_lemmas=names), budget, t0)
        if r.status is Status.UNKNOWN:
            return _finish(CheckResult(target, UNKNOWN, n, assumed_lemmas=names), budget, t0)
        if n == k_max:
            tr = _trace_from_model(step, r.model, n + 1, target, False)
            return _finish(CheckResult(target, INDUCTION_CEX, n, trace=tr, assumed_lemmas=names), budget, t0)
    raise AssertionError("unreachable")


def check_cnf(ts: TransitionSystem, target: str, n: int, step: bool, lemmas: Sequence[Property] = (),
              unique_states: bool = True) -> Cnf:
    """Stand-alone CNF of the base (``step=False``) or step formula at depth ``n``."""
    sink = _Sink()
    p = ts.monitor(target)
    u = Unroller(ts, sink, [p], init=not step, always=_always_nodes(ts, lemmas))
    last = n + 1 if step else n
    u.ensure(last)
    for f in range(last):
        sink.add_clause([u.lit(f, p)])
    if step and unique_states:
        u.add_distinct(last)
    sink.add_clause([-u.lit(last, p)])
    return Cnf(sink.num_vars, sink.clauses)


# -- plans ------------------------------------------------------------------------

@dataclass
class EngineConfig:
    k_max: int = 32
    conflict_budget: int = 10**7
    unique_states: bool = True
    seed: int = 0
    jobs: int = 1
    backend: str | None = None
    mode: str = "induction"  # or "bmc"


@dataclass
class Report:
    results: list[CheckResult]
    config: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def result(self, name: str) -> CheckResult:
        for r in self.results:
            if r.property == name:
                return r
        raise KeyError(name)

    @property
    def all_proven(self) -> bool:
        return all(r.status == PROVEN for r in self.results)

    def exit_code(self) -> int:
        statuses = {r.status for r in self.results}
        if CEX in statuses:
            return 2
        if statuses - {PROVEN}:
            return 3
        return 0

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "config": self.config,
            "meta": self.meta,
            "results": [r.to_dict(timing) for r in self.results],
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _run_one(ts: TransitionSystem, name: str, lemmas: list[Property], cfg: EngineConfig) -> CheckResult:
    if cfg.mode == "bmc":
        return bmc(ts, name, cfg.k_max, cfg.conflict_budget, cfg.seed, cfg.backend, lemmas)
    return k_induction(ts, name, lemmas, cfg.k_max, cfg.unique_states, cfg.conflict_budget, cfg.seed, cfg.backend)


def _run_batch(ts: TransitionSystem, jobs: list[tuple[str, list[Property]]], cfg: EngineConfig) -> list[CheckResult]:
    if cfg.jobs <= 1 or len(jobs) <= 1:
        out = []
        for name, lem in jobs:
            log.info("checking %s", name)
            out.append(_run_one(ts, name, lem, cfg))
            log.info("%s: %s at %d", name, out[-1].status, out[-1].bound)
        return out
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        futures = [pool.submit(_run_one, ts, name, lem, cfg) for name, lem in jobs]
        return [f.result() for f in futures]


def prove_plan(plan: VerificationPlan, cfg: EngineConfig | None = None) -> Report:
    """Prove lemmas first, then targets assuming whichever of their lemmas were proven.

    Constraints apply to every run. A target whose lemma failed is still
    checked, without that lemma, and flagged as degraded.
    """
    cfg = cfg or EngineConfig()
    plan.validate()
    ts = TransitionSystem(plan.system, plan.properties, plan.functions)
    results: dict[str, CheckResult] = {}
    asserts = plan.asserts
    lemma_names = {lem for deps in plan.depends.values() for lem in deps}
    first = [p for p in asserts if p.role == "lemma" or p.name in lemma_names]
    rest = [p for p in asserts if p not in first]
    for batch in (first, rest):
        jobs = []
        missing: dict[str, list[str]] = {}
        for p in batch:
            deps = plan.depends.get(p.name, [])
            ok = [plan.by_name(d) for d in deps if d in results and results[d].status == PROVEN]
            missing[p.name] = [d for d in deps if d not in results or results[d].status != PROVEN]
            jobs.append((p.name, ok))
        for res in _run_batch(ts, jobs, cfg):
            res.missing_lemmas = missing[res.property]
            results[res.property] = res
    ordered = [results[p.name] for p in asserts]
    return Report(ordered, config=asdict(cfg), meta=dict(plan.meta))
