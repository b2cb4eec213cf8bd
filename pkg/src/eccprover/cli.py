"""Command-line entry point.

Three modes share one set of code-selection flags::

    eccprover [verify] --family ext-bch --m 4 --t 3 --plan full --fixed-data
    eccprover oracle --family hamming --m 3 --max-weight 1 --data-mode all
    eccprover --replay out/flags_one_hot.trace

``verify`` is the default when no mode is named.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .codes import FAMILIES, CodeSpec, build_code, check_spec
from .mc import CEX, INDUCTION_CEX, EngineConfig, Report, Trace, TransitionSystem, check_cnf, prove_plan, replay
from .oracle import BudgetError, exhaustive_check
from .properties import (
    VerificationPlan,
    build_full_plan,
    build_sequential_plan,
    random_fixed_data,
)
from .sat import BACKENDS, export_dimacs
from .synth import (
    MUTATIONS,
    PipelineSchedule,
    build_sequential_core,
    build_wrapper,
    synth_decoder,
    synth_encoder,
    synth_model_encoder,
)

log = logging.getLogger("eccprover")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CEX = 2
EXIT_UNKNOWN = 3
EXIT_USAGE = 64
EXIT_BUDGET = 65

SEED_ENV = "ECC_PROVER_SEED"
PLANS = ("lemmas", "core", "full")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str | None = None
    m: int | None = None
    t: int | None = None
    k: int | None = None
    plan: str = "full"
    fixed_data: bool = False
    pipeline: str | None = None
    seq_constraints: bool = True
    mutate: str | None = None
    k_max: int = 32
    conflict_budget: int = 10**7
    unique_states: bool = True
    seed: int = 0
    jobs: int = 1
    backend: str | None = None
    mode: str = "induction"
    dimacs: bool = False
    out: str = "eccprover-out"
    max_weight: int | None = None
    data_mode: str = "fixed"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def schedule(self) -> PipelineSchedule | None:
        return PipelineSchedule.parse(self.pipeline) if self.pipeline else None

    def engine(self) -> EngineConfig:
        return EngineConfig(
            k_max=self.k_max,
            conflict_budget=self.conflict_budget,
            unique_states=self.unique_states,
            seed=self.seed,
            jobs=self.jobs,
            backend=self.backend,
            mode=self.mode,
        )

    def validate(self, command: str = "verify") -> None:
        """Reject inconsistent flag combinations before any work is done."""
        if self.family is None:
            raise UsageError("--family is required")
        family = {"ext-bch": "extended-bch"}.get(self.family, self.family)
        if family not in FAMILIES:
            raise UsageError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)} or ext-bch")
        need = {"hamming": ["m"], "hsiao": ["k"], "bch": ["m", "t"], "extended-bch": ["m", "t"]}[family]
        for name in need:
            if getattr(self, name) is None:
                raise UsageError(f"family {family} needs --{name}")
        if self.plan not in PLANS:
            raise UsageError(f"--plan must be one of {', '.join(PLANS)}")
        if self.mode not in ("induction", "bmc"):
            raise UsageError("--mode must be 'induction' or 'bmc'")
        if self.k_max < 1:
            raise UsageError("--k-max must be at least 1")
        if self.conflict_budget < 1:
            raise UsageError("--conflict-budget must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.backend is not None and self.backend not in BACKENDS:
            raise UsageError(f"backend {self.backend!r} unavailable; have {', '.join(sorted(BACKENDS))}")
        if self.mutate is not None and self.mutate not in MUTATIONS:
            raise UsageError(f"--mutate must be one of {', '.join(MUTATIONS)}")
        if self.pipeline is not None:
            try:
                self.schedule()
            except ValueError as e:
                raise UsageError(str(e)) from None
            if self.fixed_data:
                raise UsageError("--fixed-data applies to the combinational plan, not to --pipeline")
            if self.plan != "full":
                raise UsageError("--plan selects combinational plans; drop it when using --pipeline")
        else:
            if not self.seq_constraints:
                raise UsageError("--no-seq-constraints needs a --pipeline schedule")
            if self.mutate == "h-entry":
                raise UsageError("--mutate h-entry perturbs the reference encoder and needs --pipeline")
        if self.plan == "lemmas" and self.fixed_data:
            raise UsageError("--fixed-data pins targets, and --plan lemmas has none")
        if command == "oracle":
            if self.data_mode not in ("all", "fixed"):
                raise UsageError("--data-mode must be 'all' or 'fixed'")

    def build_spec(self) -> CodeSpec:
        params = {name: getattr(self, name) for name in ("m", "t", "k") if getattr(self, name) is not None}
        spec = build_code(self.family, **params)
        check_spec(spec)
        return spec


def build_plan(cfg: RunConfig, spec: CodeSpec | None = None) -> VerificationPlan:
    """Synthesize the circuits and assemble the plan a config describes."""
    spec = spec or cfg.build_spec()
    decoder = synth_decoder(spec, mutate="one-hot" if cfg.mutate == "one-hot" else None)
    sched = cfg.schedule()
    if sched is None:
        wrapper = build_wrapper(synth_encoder(spec), decoder)
        fixed = random_fixed_data(spec, cfg.seed) if cfg.fixed_data else None
        plan = build_full_plan(
            spec,
            wrapper,
            lemmas=True,
            fixed_data=fixed,
            targets=cfg.plan != "lemmas",
            correction=cfg.plan == "full",
        )
    else:
        core = build_sequential_core(spec, sched, decoder=decoder)
        enc_model = synth_model_encoder(spec, mutate="h-entry" if cfg.mutate == "h-entry" else None)
        plan = build_sequential_plan(
            spec,
            core,
            enc_model,
            synth_decoder(spec),
            sched.encode_cycles,
            sched.decode_cycles,
            constraints=cfg.seq_constraints,
        )
        plan.meta["schedule"] = [sched.encode_cycles, sched.detect_cycles, sched.correct_cycles]
    plan.meta["plan"] = cfg.plan if sched is None else "sequential"
    if cfg.mutate:
        plan.meta["mutation"] = cfg.mutate
    return plan


# -- argument handling -----------------------------------------------------------

def _code_flags(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", metavar="JSON", help="JSON file of settings; explicit flags take precedence")
    p.add_argument("--family", default=S, help="hamming, hsiao, bch, extended-bch (alias ext-bch)")
    p.add_argument("--m", type=int, default=S, help="field degree for Hamming/BCH families")
    p.add_argument("--t", type=int, default=S, help="designed error-correcting capability for BCH")
    p.add_argument("--k", type=int, default=S, help="data width for Hsiao codes")
    p.add_argument("--seed", type=int, default=S, help=f"PRNG seed (env {SEED_ENV} also sets it)")
    p.add_argument("--jobs", type=int, default=S, help="worker processes")
    p.add_argument("--out", default=S, help="output directory (default eccprover-out)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def make_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="eccprover",
        description="Build ECC circuits, prove their properties with BMC/k-induction, and cross-check with an oracle.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    v = sub.add_parser("verify", help="run the prover on a verification plan")
    _code_flags(v)
    v.add_argument("--plan", choices=PLANS, default=S, help="lemmas only, flag properties, or flags plus correction")
    v.add_argument("--fixed-data", action="store_true", default=S, help="pin the data word in every target")
    v.add_argument("--pipeline", metavar="E,D,C", default=S, help="verify the pipelined core with this schedule")
    v.add_argument("--no-seq-constraints", dest="seq_constraints", action="store_false", default=S,
                   help="omit the start-from-idle and no-overlap assumptions")
    v.add_argument("--mutate", choices=MUTATIONS, default=S, help="inject a known bug")
    v.add_argument("--k-max", type=int, default=S, help="largest induction depth or BMC bound")
    v.add_argument("--conflict-budget", type=int, default=S, help="SAT conflicts allowed per property")
    v.add_argument("--unique-states", dest="unique_states", action="store_true", default=S)
    v.add_argument("--no-unique-states", dest="unique_states", action="store_false", default=S)
    v.add_argument("--backend", choices=sorted(BACKENDS), default=S, help="SAT core implementation")
    v.add_argument("--mode", choices=("induction", "bmc"), default=S)
    v.add_argument("--dimacs", action="store_true", default=S, help="also write the CNF of each check")

    o = sub.add_parser("oracle", help="exhaustive brute-force decode of every low-weight error pattern")
    _code_flags(o)
    o.add_argument("--max-weight", type=int, default=S, help="largest error weight (default t_detect)")
    o.add_argument("--data-mode", choices=("all", "fixed"), default=S)

    r = sub.add_parser("replay", help="re-simulate a trace file and check it reproduces its violation")
    r.add_argument("trace", help="path to a .trace file written by verify")
    r.add_argument("-v", "--verbose", action="store_true")
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    if "--replay" in argv:
        i = argv.index("--replay")
        if i + 1 >= len(argv):
            return ["replay"]
        return ["replay", argv[i + 1]] + argv[:i] + argv[i + 2 :]
    if not argv or argv[0] in ("verify", "oracle", "replay", "-h", "--help", "--version"):
        return argv
    return ["verify"] + argv


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Defaults, then the JSON config file, then the seed variable, then flags."""
    merged: dict = {}
    if getattr(ns, "config", None):
        try:
            merged.update(json.loads(Path(ns.config).read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {ns.config}: {e}") from None
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            merged["seed"] = int(env_seed)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env_seed!r}") from None
    for f in fields(RunConfig):
        if hasattr(ns, f.name):
            merged[f.name] = getattr(ns, f.name)
    return RunConfig.from_dict(merged)


# -- commands ----------------------------------------------------------------------

def _write(path: Path, text: str) -> None:
    path.write_text(text)
    log.info("wrote %s", path)


def run_verify(cfg: RunConfig) -> int:
    cfg.validate("verify")
    try:
        spec = cfg.build_spec()
        plan = build_plan(cfg, spec)
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / f"{plan.system.name}.netlist", plan.system.to_netlist())
    for name, fn in sorted(plan.functions.items()):
        _write(out / f"fn_{name}.netlist", fn.to_netlist())

    report = prove_plan(plan, cfg.engine())
    report.config = cfg.to_dict()
    report.meta["code_spec"] = spec.to_dict()
    code = report.exit_code()
    report.meta["exit_code"] = code

    ts = None
    for res in report.results:
        if res.trace is not None:
            doc = {
                "run_config": cfg.to_dict(),
                "status": res.status,
                "bound": res.bound,
                "assumed_lemmas": res.assumed_lemmas,
                "trace": res.trace.to_dict(),
            }
            _write(out / f"{res.property}.trace", json.dumps(doc, indent=2, sort_keys=True) + "\n")
            _write(out / f"{res.property}.trace.txt", res.trace.to_vcd_text())
        if cfg.dimacs:
            if ts is None:
                ts = TransitionSystem(plan.system, plan.properties, plan.functions)
            lemmas = [plan.by_name(n) for n in res.assumed_lemmas]
            depth = max(res.bound, 0)
            base = check_cnf(ts, res.property, depth, step=False, lemmas=lemmas)
            _write(out / f"{res.property}.base{depth}.cnf", export_dimacs(base))
            if cfg.mode == "induction":
                step = check_cnf(ts, res.property, depth, step=True, lemmas=lemmas, unique_states=cfg.unique_states)
                _write(out / f"{res.property}.step{depth}.cnf", export_dimacs(step))

    _write(out / "report.json", report.to_json(timing=True) + "\n")
    _print_summary(report)
    return code


def _print_summary(report: Report) -> None:
    width = max((len(r.property) for r in report.results), default=8)
    for r in report.results:
        extra = " (degraded: missing " + ",".join(r.missing_lemmas) + ")" if r.missing_lemmas else ""
        print(f"{r.property:<{width}}  {r.status:<13}  n={r.bound:<3} conflicts={r.conflicts}{extra}")
    cex = [r.property for r in report.results if r.status in (CEX, INDUCTION_CEX)]
    if cex:
        print("traces written for: " + ", ".join(cex))


def run_oracle(cfg: RunConfig) -> int:
    cfg.validate("oracle")
    try:
        spec = cfg.build_spec()
    except ValueError as e:
        raise UsageError(str(e)) from None
    max_weight = cfg.max_weight if cfg.max_weight is not None else spec.t_detect
    fixed = random_fixed_data(spec, cfg.seed) if cfg.data_mode == "fixed" else None
    rep = exhaustive_check(spec, max_weight, cfg.data_mode, seed=cfg.seed, fixed_data=fixed, jobs=cfg.jobs)
    doc = rep.to_dict()
    doc["config"] = cfg.to_dict()
    if fixed is not None:
        doc["fixed_data"] = f"{fixed.bits:#x}"
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "oracle.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    for w in sorted(rep.pattern_counts):
        print(f"weight {w}: {rep.pattern_counts[w]} cases, {rep.passed[w]} pass, {rep.failed[w]} fail")
    print(f"total {rep.total_patterns} cases: {'all pass' if rep.ok else 'FAILURES'}")
    return EXIT_OK if rep.ok else EXIT_CEX


def run_replay(path: str) -> int:
    try:
        doc = json.loads(Path(path).read_text())
        cfg = RunConfig.from_dict(doc["run_config"])
        tr = Trace.from_dict(doc["trace"])
    except (OSError, KeyError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read trace {path}: {e}") from None
    plan = build_plan(cfg)
    ts = TransitionSystem(plan.system, plan.properties, plan.functions)
    outcome = replay(ts, tr)
    outcome["property"] = tr.property
    outcome["status"] = doc.get("status")
    print(json.dumps(outcome, indent=2, sort_keys=True))
    return EXIT_OK if outcome["reproduces"] else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    argv = _normalize_argv(list(sys.argv[1:] if argv is None else argv))
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:  # argparse exits 2 on usage errors, which clashes with the CEX code
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if getattr(ns, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if ns.command == "replay":
            return run_replay(ns.trace)
        cfg = resolve_config(ns)
        if ns.command == "oracle":
            return run_oracle(cfg)
        return run_verify(cfg)
    except UsageError as e:
        print(f"eccprover: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as e:
        print(f"eccprover: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
