"""Compare the compiled and pure-Python SAT cores on the same instances.

    python benchmarks/bench_sat.py [--repeat 3] [--quick]

Both cores run the same search, so conflict and decision counts must match;
the script checks that and reports the wall-time ratio.
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from eccprover.codes import build_code
from eccprover.mc import TransitionSystem, check_cnf
from eccprover.properties import build_full_plan
from eccprover.sat import BACKENDS, Cnf, Solver
from eccprover.synth import build_wrapper, synth_decoder, synth_encoder


def random_3cnf(nvars: int, ratio: float, seed: int) -> Cnf:
    rng = random.Random(seed)
    clauses = []
    for _ in range(int(nvars * ratio)):
        vs = rng.sample(range(1, nvars + 1), 3)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return Cnf(nvars, clauses)


def pigeonhole(pigeons: int, holes: int) -> Cnf:
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p in range(pigeons):
            for q in range(p + 1, pigeons):
                clauses.append([-var(p, h), -var(q, h)])
    return Cnf(pigeons * holes, clauses)


def ecc_check(m: int, t: int, prop: str) -> Cnf:
    spec = build_code("extended-bch", m=m, t=t)
    plan = build_full_plan(spec, build_wrapper(synth_encoder(spec), synth_decoder(spec)), lemmas=False)
    ts = TransitionSystem(plan.system, plan.properties, plan.functions)
    return check_cnf(ts, prop, 0, step=False)


def run(cnf: Cnf, backend: str) -> tuple[float, str, dict]:
    s = Solver(seed=0, backend=backend)
    s.new_vars(cnf.num_vars)
    s.add_clauses(cnf.clauses)
    t0 = time.perf_counter()
    res = s.solve()
    return time.perf_counter() - t0, res.status.value, s.stats()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small instances only")
    args = ap.parse_args(argv)
    if "cython" not in BACKENDS:
        print("compiled core not built; only the Python core is available", file=sys.stderr)
        return 1

    instances = [
        ("3cnf-60v-r4.26", random_3cnf(60, 4.26, 1)),
        ("php-6-5", pigeonhole(6, 5)),
        ("ecc16-detect_w2", ecc_check(4, 3, "detect_w2")),
    ]
    if not args.quick:
        instances += [
            ("3cnf-120v-r4.26", random_3cnf(120, 4.26, 2)),
            ("php-7-6", pigeonhole(7, 6)),
            ("ecc16-detect_w3", ecc_check(4, 3, "detect_w3")),
        ]

    print(f"{'instance':<20} {'status':<7} {'conflicts':>9} {'python s':>9} {'cython s':>9} {'speedup':>8}")
    for name, cnf in instances:
        times = {}
        stats = {}
        for backend in ("python", "cython"):
            samples = []
            for _ in range(args.repeat):
                dt, status, st = run(cnf, backend)
                samples.append(dt)
            times[backend] = statistics.median(samples)
            stats[backend] = (status, st["conflicts"], st["decisions"])
        if stats["python"] != stats["cython"]:
            print(f"{name}: backends disagree {stats}", file=sys.stderr)
            return 1
        status, conflicts, _ = stats["cython"]
        ratio = times["python"] / max(times["cython"], 1e-9)
        print(f"{name:<20} {status:<7} {conflicts:>9} {times['python']:>9.3f} {times['cython']:>9.3f} {ratio:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
