"""CDCL SAT solving with assumption-based incremental use.

The search core is compiled from ``_core.pyx`` when the extension is
available and falls back to the pure-Python ``_core_py`` otherwise. Set
``ECCPROVER_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from . import _core_py
from .dimacs import Cnf, DimacsError, export_dimacs, import_dimacs

if os.environ.get("ECCPROVER_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _core as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKENDS = {"python": _core_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled
DEFAULT_BACKEND = "cython" if _compiled is not None else "python"

__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "Cnf",
    "DimacsError",
    "SolveResult",
    "Solver",
    "Status",
    "export_dimacs",
    "import_dimacs",
    "solve_cnf",
]


class Status(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


_STATUS = {_core_py.SAT: Status.SAT, _core_py.UNSAT: Status.UNSAT, _core_py.UNKNOWN: Status.UNKNOWN}


@dataclass
class SolveResult:
    status: Status
    model: list[int] | None = None  # model[v - 1] is the value of DIMACS variable v
    core: list[int] = field(default_factory=list)
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    wall_ms: float = 0.0

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    @property
    def unsat(self) -> bool:
        return self.status is Status.UNSAT

    def value(self, lit: int) -> bool:
        if self.model is None:
            raise ValueError("no model")
        bit = self.model[abs(lit) - 1]
        return bool(bit) if lit > 0 else not bit


def _to_internal(lit: int) -> int:
    return 2 * (lit - 1) if lit > 0 else 2 * (-lit - 1) + 1


def _to_dimacs(p: int) -> int:
    v = (p >> 1) + 1
    return -v if p & 1 else v


class Solver:
    """Incremental CDCL solver over DIMACS-style signed integer literals."""

    def __init__(self, seed: int = 0, backend: str | None = None):
        backend = backend or DEFAULT_BACKEND
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}; available: {sorted(BACKENDS)}")
        self.backend = backend
        self.seed = seed
        self._core = BACKENDS[backend].Core(seed)
        self._nvars = 0
        self._nclauses = 0

    @property
    def num_vars(self) -> int:
        return self._nvars

    @property
    def num_clauses(self) -> int:
        return self._nclauses

    def new_var(self) -> int:
        self._core.new_var()
        self._nvars += 1
        return self._nvars

    def new_vars(self, count: int) -> list[int]:
        return [self.new_var() for _ in range(count)]

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause; returns False once the clause set is known UNSAT."""
        internal = []
        for lit in lits:
            if lit == 0 or abs(lit) > self._nvars:
                raise ValueError(f"literal {lit} references an unallocated variable")
            internal.append(_to_internal(lit))
        self._nclauses += 1
        return self._core.add_clause(internal)

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> bool:
        ok = True
        for c in clauses:
            ok = self.add_clause(c)
        return ok

    def add_flat(self, flat: Sequence[int], count: int) -> bool:
        """Bulk-add ``count`` zero-terminated clauses without per-literal checks.

        Meant for encoders that only emit literals of variables they allocated.
        """
        self._nclauses += count
        return self._core.add_dimacs(list(flat))

    def solve(self, assumptions: Sequence[int] = (), conflict_budget: int | None = None) -> SolveResult:
        for lit in assumptions:
            if lit == 0 or abs(lit) > self._nvars:
                raise ValueError(f"assumption {lit} references an unallocated variable")
        before = self._core.stats()
        t0 = time.perf_counter()
        code = self._core.solve(
            [_to_internal(a) for a in assumptions], -1 if conflict_budget is None else int(conflict_budget)
        )
        wall = (time.perf_counter() - t0) * 1000.0
        after = self._core.stats()
        res = SolveResult(
            status=_STATUS[code],
            conflicts=after[0] - before[0],
            decisions=after[1] - before[1],
            propagations=after[2] - before[2],
            wall_ms=wall,
        )
        if code == _core_py.SAT:
            res.model = list(self._core.model)
        elif code == _core_py.UNSAT:
            res.core = sorted({_to_dimacs(p ^ 1) for p in self._core.conflict}, key=lambda x: (abs(x), x))
        return res

    def stats(self) -> dict:
        c, d, p, r, learnt = self._core.stats()
        return {"conflicts": c, "decisions": d, "propagations": p, "restarts": r, "learnts": learnt}


def solve_cnf(cnf: Cnf, assumptions: Sequence[int] = (), **kwargs) -> SolveResult:
    s = Solver(**kwargs)
    s.new_vars(cnf.num_vars)
    s.add_clauses(cnf.clauses)
    return s.solve(assumptions)
