"""End-to-end acceptance checks, one test per criterion.

Each test records a single ``PASS``/``FAIL`` line (printed immediately and
repeated in the terminal summary) together with its wall time, and fails if
either the check or the time limit is missed.
"""

import random
import time
from contextlib import contextmanager
from functools import lru_cache
from itertools import combinations

import pytest

from conftest import ACCEPTANCE_VERDICTS, brute_force_sat, model_satisfies, pigeonhole
from eccprover.circuit import evaluate_lanes
from eccprover.cli import RunConfig, build_plan
from eccprover.codes import build_code, min_distance
from eccprover.gf2 import BitVec
from eccprover.mc import (
    CEX,
    INDUCTION_CEX,
    PROVEN,
    EngineConfig,
    TransitionSystem,
    k_induction,
    prove_plan,
    replay,
)
from eccprover.oracle import count_patterns, decode_ref, encode_ref, exhaustive_check, expected_outcome
from eccprover.properties import (
    Const,
    Eq,
    Implies,
    Not,
    Sig,
    build_full_plan,
    build_sequential_assumptions,
    constraint,
    eval_expr,
    history_lookup,
    random_fixed_data,
    target,
)
from eccprover.sat import Solver
from eccprover.synth import build_wrapper, flag_names, synth_decoder, synth_encoder, synth_syndrome
from test_mc import fsm

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(num: int, title: str, limit_s: float):
    t0 = time.perf_counter()
    detail = ""
    try:
        yield
        elapsed = time.perf_counter() - t0
        if elapsed >= limit_s:
            detail = f"too slow: {elapsed:.3f}s >= {limit_s}s"
            raise AssertionError(detail)
        verdict = "PASS"
    except BaseException as exc:
        verdict = "FAIL"
        detail = detail or f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        raise
    finally:
        elapsed = time.perf_counter() - t0
        line = f"[{verdict}] criterion {num}: {title} ({elapsed:.2f}s, limit {limit_s:g}s){' - ' + detail if detail else ''}"
        ACCEPTANCE_VERDICTS.append(line)
        print(line)


def _statuses(report):
    return {r.property: r.status for r in report.results}


def _decoder_lanes(spec, dec, words):
    """Run the decoder on received words; return (flag, data) per word."""
    out = evaluate_lanes(dec, {"cw_i": words})
    flags = flag_names(spec)
    res = []
    for i in range(len(words)):
        raised = [f for f in flags if out[f][i]]
        res.append((raised[0] if len(raised) == 1 else tuple(raised), out["data_o"][i]))
    return res


def _expected(spec, data, mask):
    flag, d = expected_outcome(spec, BitVec(spec.k, data), mask)
    return flag, d.bits


# -- 1 -----------------------------------------------------------------------------

def test_criterion_1_pattern_count():
    with criterion(1, "count_patterns(128, 4) == 11,017,632", 0.001):
        t0 = time.perf_counter()
        value = count_patterns(128, 4)
        assert time.perf_counter() - t0 < 0.001
        assert value == 11_017_632
        assert f"{value:.1e}" == "1.1e+07"


# -- 2 -----------------------------------------------------------------------------

def test_criterion_2_extended_bch16_guarantee():
    with criterion(2, "ext-BCH(16,5): d = 8 and 2,516 masks all correct", 10):
        spec = build_code("extended-bch", m=4, t=3)
        assert (spec.n, spec.k) == (16, 5)
        assert min_distance(spec) == 8
        rep = exhaustive_check(spec, max_weight=4, data_mode="fixed", seed=0)
        assert rep.total_patterns == 2516
        assert rep.ok and sum(rep.passed.values()) == 2516


# -- 3 -----------------------------------------------------------------------------

def test_criterion_3_linearity_lemmas():
    with criterion(3, "L1/L2/L3 proven on (16,5) and (32,16); 1e5 random pairs", 300):
        rng = random.Random(3)
        for m in (4, 5):
            spec = build_code("extended-bch", m=m, t=3)
            wrapper = build_wrapper(synth_encoder(spec), synth_decoder(spec))
            plan = build_full_plan(spec, wrapper, targets=False)
            rep = prove_plan(plan, EngineConfig(k_max=32))
            assert _statuses(rep) == {n: PROVEN for n in ("L1_null_syndrome", "L2_linearity", "L3_position_only")}

            syn = synth_syndrome(spec)
            pairs = 50_000
            xs = [rng.getrandbits(spec.n) for _ in range(pairs)]
            ys = [rng.getrandbits(spec.n) for _ in range(pairs)]
            sx = evaluate_lanes(syn, {"cw_i": xs})["s"]
            sy = evaluate_lanes(syn, {"cw_i": ys})["s"]
            sxy = evaluate_lanes(syn, {"cw_i": [x ^ y for x, y in zip(xs, ys)]})["s"]
            assert all(a ^ b == c for a, b, c in zip(sx, sy, sxy))


# -- 4 -----------------------------------------------------------------------------

def test_criterion_4_fixed_data_reduction():
    with criterion(4, "fixed-data plan proven on (32,16); 100 data words per weight agree", 900):
        spec = build_code("extended-bch", m=5, t=3)
        dec = synth_decoder(spec)
        wrapper = build_wrapper(synth_encoder(spec), dec)
        fixed = random_fixed_data(spec, 0)
        plan = build_full_plan(spec, wrapper, fixed_data=fixed)
        rep = prove_plan(plan, EngineConfig(k_max=32))
        assert rep.all_proven, _statuses(rep)
        assert rep.result("L3_position_only").status == PROVEN
        assert not any(r.degraded for r in rep.results)

        rng = random.Random(4)
        fixed_cw = encode_ref(spec, fixed).bits
        for w in range(spec.t_detect + 1):
            datas = [rng.getrandbits(spec.k) for _ in range(100)]
            masks = [sum(1 << p for p in rng.sample(range(spec.n), w)) for _ in range(100)]
            words = [encode_ref(spec, BitVec(spec.k, d)).bits ^ e for d, e in zip(datas, masks)]
            got = _decoder_lanes(spec, dec, words)
            pinned = _decoder_lanes(spec, dec, [fixed_cw ^ e for e in masks])
            for d, e, g, p in zip(datas, masks, got, pinned):
                assert g == _expected(spec, d, e)
                # Flags depend only on the mask; so does the correction.
                assert g[0] == p[0]
                assert g[1] ^ d == p[1] ^ fixed.bits


# -- 5 -----------------------------------------------------------------------------

def test_criterion_5_one_hot_mutation():
    with criterion(5, "one-hot mutation gives a replayable CEX; original decoder proven", 120):
        for mutate, expected in (("one-hot", CEX), (None, PROVEN)):
            cfg = RunConfig(family="ext-bch", m=4, t=3, plan="core", fixed_data=True, mutate=mutate)
            plan = build_plan(cfg)
            ts = TransitionSystem(plan.system, plan.properties, plan.functions)
            res = k_induction(ts, "flags_one_hot", k_max=32)
            assert res.status == expected
            if expected == CEX:
                info = replay(ts, res.trace)
                assert info["reproduces"] and info["starts_at_reset"]


# -- 6 -----------------------------------------------------------------------------

def test_criterion_6_sequential_constraints():
    with criterion(6, "pipelined (2,1,1) on (16,5): unconstrained InductionCEX, constrained proven", 1800):
        loose = build_plan(RunConfig(family="ext-bch", m=4, t=3, pipeline="2,1,1", seq_constraints=False))
        ts = TransitionSystem(loose.system, loose.properties, loose.functions)
        res = k_induction(ts, "enc_equivalence", k_max=32)
        assert res.status == INDUCTION_CEX
        assert not res.trace.rooted_at_reset
        # The step trace starts somewhere the constraints rule out.
        assumptions = build_sequential_assumptions(loose.system)
        look = history_lookup(res.trace.signals, 0)
        broken = [c.name for c in assumptions if not eval_expr(c.expr, look, loose.functions)]
        assert broken, "initial state of the induction trace satisfies both constraints"

        tight = build_plan(RunConfig(family="ext-bch", m=4, t=3, pipeline="2,1,1"))
        rep = prove_plan(tight, EngineConfig(k_max=32))
        assert rep.all_proven, _statuses(rep)
        assert all(r.bound <= 32 for r in rep.results)


# -- 7 -----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _columns(num_vars):
    """Truth-table columns of each variable and its negation, as 2^n-bit ints."""
    size = 1 << num_vars
    full = (1 << size) - 1
    pos, neg = [], []
    for v in range(num_vars):
        period = 1 << (v + 1)
        block = ((1 << (1 << v)) - 1) << (1 << v)  # 2^v zeros then 2^v ones
        col = block * (full // ((1 << period) - 1))  # repeated at every multiple of the period
        pos.append(col)
        neg.append(full ^ col)
    return full, pos, neg


def truth_table_sat(num_vars, clauses):
    """Satisfiability by evaluating every assignment at once as a 2^n-bit set."""
    alive, pos, neg = _columns(num_vars)
    for clause in clauses:
        sat = 0
        for lit in clause:
            sat |= pos[lit - 1] if lit > 0 else neg[-lit - 1]
        alive &= sat
        if not alive:
            return False
    return True


def test_truth_table_oracle_matches_enumeration():
    rng = random.Random(70)
    for _ in range(200):
        n = rng.randint(1, 8)
        clauses = [[v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), min(3, n))]
                   for _ in range(rng.randint(1, 5 * n))]
        assert truth_table_sat(n, clauses) == brute_force_sat(n, clauses)


def test_criterion_7_solver_vs_truth_table():
    with criterion(7, "1,000 random 3-CNFs agree with brute force; PHP(4,3), PHP(5,4) unsat", 300):
        rng = random.Random(7)
        for _ in range(1000):
            n = rng.randint(3, 20)
            m = rng.randint(1, int(5 * n))
            clauses = [[v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)] for _ in range(m)]
            s = Solver(seed=rng.randrange(1 << 16))
            s.new_vars(n)
            s.add_clauses(clauses)
            r = s.solve()
            assert r.sat == truth_table_sat(n, clauses)
            if r.sat:
                assert model_satisfies(r.model, clauses)
        for p, h in ((4, 3), (5, 4)):
            n, clauses = pigeonhole(p, h)
            s = Solver()
            s.new_vars(n)
            s.add_clauses(clauses)
            assert s.solve().unsat


# -- 8 -----------------------------------------------------------------------------

CODES_K16 = [
    ("hamming", {"m": 3}),
    ("hamming", {"m": 4}),
    ("hsiao", {"k": 16}),
    ("bch", {"m": 4, "t": 2}),
    ("extended-bch", {"m": 4, "t": 3}),
    ("extended-bch", {"m": 5, "t": 3}),
]


def test_criterion_8_circuit_matches_oracle():
    with criterion(8, "encoder/decoder circuits match the oracle on sweeps and 1e4 random cases", 300):
        rng = random.Random(8)
        for family, params in CODES_K16:
            spec = build_code(family, **params)
            assert spec.k <= 16
            enc, dec = synth_encoder(spec), synth_decoder(spec)

            datas = list(range(1 << spec.k))
            cws = evaluate_lanes(enc, {"data_i": datas})["cw_o"]
            assert cws == [encode_ref(spec, BitVec(spec.k, d)).bits for d in datas]

            fixed = random_fixed_data(spec, 0)
            cw = encode_ref(spec, fixed).bits
            masks = [0] + [sum(1 << p for p in pos) for w in range(1, spec.t_detect + 1)
                           for pos in combinations(range(spec.n), w)]
            got = _decoder_lanes(spec, dec, [cw ^ e for e in masks])
            for e, g in zip(masks, got):
                assert g == _expected(spec, fixed.bits, e)
                ref = decode_ref(spec, BitVec(spec.n, cw ^ e))
                assert g == (ref[0], ref[1].bits)

            datas = [rng.getrandbits(spec.k) for _ in range(10_000)]
            masks = [sum(1 << p for p in rng.sample(range(spec.n), rng.randint(0, spec.t_detect)))
                     for _ in range(10_000)]
            words = [encode_ref(spec, BitVec(spec.k, d)).bits ^ e for d, e in zip(datas, masks)]
            got = _decoder_lanes(spec, dec, words)
            for d, e, g in zip(datas, masks, got):
                assert g == _expected(spec, d, e)


# -- 9 -----------------------------------------------------------------------------

def _regression_pairs():
    """20 (label, system, functions, property, constraints) cases: random FSMs plus pipelined codecs."""
    rng = random.Random(9)
    pairs = []
    while len(pairs) < 16:
        bits = 3 if len(pairs) % 2 else 4
        init = rng.randrange(1 << bits)
        table = {(s, x): rng.randrange(1 << bits) for s in range(1 << bits) for x in range(2)}
        c = fsm(bits, table, name=f"fsm{len(pairs)}", init=init)
        bad = rng.randrange(1 << bits)
        if bad == init:
            continue
        gate = rng.randrange(1 << bits)
        prop = target("never_bad", Not(Eq(Sig("s"), Const(bad, bits))))
        cons = [constraint("gate_input", Implies(Eq(Sig("s"), Const(gate, bits)), Eq(Sig("i"), Const(0, 1))))]
        pairs.append((c.name, c, {}, prop, cons))
    for m, pipe in ((3, "1,1,1"), (4, "2,1,1")):
        loose = build_plan(RunConfig(family="hamming", m=m, pipeline=pipe, seq_constraints=False))
        cons = build_sequential_assumptions(loose.system)
        for name in ("enc_equivalence", "dec_equivalence"):
            prop = loose.by_name(name)
            pairs.append((f"{loose.system.name}:{name}", loose.system, loose.functions, prop, cons))
    return pairs


def test_criterion_9_constraint_and_uniqueness_monotonicity():
    with criterion(9, "constraints never turn Proven into CEX; unique_states never weakens", 600):
        pairs = _regression_pairs()
        assert len(pairs) == 20
        proven_plain = proven_strict = 0
        for label, system, functions, prop, cons in pairs:
            results = {}
            for constrained in (False, True):
                for unique in (False, True):
                    props = [prop] + (cons if constrained else [])
                    ts = TransitionSystem(system, props, functions)
                    results[constrained, unique] = k_induction(
                        ts, prop.name, k_max=20, unique_states=unique, conflict_budget=10**5)
            for unique in (False, True):
                if results[False, unique].status == PROVEN:
                    proven_plain += 1
                    assert results[True, unique].status != CEX, label
                    assert results[True, unique].status == PROVEN, label
            for constrained in (False, True):
                if results[constrained, False].status == PROVEN:
                    proven_strict += 1
                    assert results[constrained, True].status == PROVEN, label
                    assert results[constrained, True].bound <= results[constrained, False].bound, label
            # Base-case verdicts do not depend on the strengthening.
            for constrained in (False, True):
                a, b = results[constrained, False], results[constrained, True]
                assert (a.status == CEX) == (b.status == CEX), label
        # The invariants must be exercised, not satisfied vacuously.
        assert proven_plain >= 5 and proven_strict >= 5
