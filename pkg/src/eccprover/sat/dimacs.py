"""DIMACS CNF reading and writing."""

from __future__ import annotations

from dataclasses import dataclass, field


class DimacsError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Cnf:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)

    def normalized(self) -> "Cnf":
        """Drop duplicate literals and tautologies."""
        out = []
        for c in self.clauses:
            lits = sorted(set(c), key=lambda x: (abs(x), x))
            if any(-x in lits for x in lits):
                continue
            out.append(lits)
        return Cnf(self.num_vars, out)


def export_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    lines += [" ".join(str(x) for x in c) + " 0" if c else "0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def import_dimacs(text: str) -> Cnf:
    num_vars = num_clauses = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise DimacsError(lineno, "duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(lineno, f"malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(lineno, f"malformed header {line!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsError(lineno, "negative counts in header")
            continue
        if num_vars is None:
            raise DimacsError(lineno, "clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(lineno, f"bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > num_vars:
                raise DimacsError(lineno, f"literal {lit} exceeds declared {num_vars} variables")
            else:
                current.append(lit)
    if num_vars is None:
        raise DimacsError(0, "missing header")
    if current:
        clauses.append(current)
    if len(clauses) != num_clauses:
        raise DimacsError(0, f"header declares {num_clauses} clauses, found {len(clauses)}")
    return Cnf(num_vars, clauses)
