"""Packed linear algebra over GF(2).

Vectors and matrix rows are stored as Python integers; bit ``i`` of the
integer is element ``i`` (index 0 is the least-significant / first bit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class BitVec:
    """Fixed-length bit vector over GF(2)."""

    len: int
    bits: int = 0

    def __post_init__(self):
        if self.len < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.len:
            raise ValueError(f"bits do not fit in {self.len} positions")

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(n, 1 << i)

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVec":
        bits = 0
        for i, v in enumerate(values):
            if v:
                bits |= 1 << i
        return cls(len(values), bits)

    @classmethod
    def from_str(cls, text: str) -> "BitVec":
        """Parse a 0/1 string; character ``i`` is bit ``i``."""
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_list([ch == "1" for ch in text])

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.len:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self):
        for i in range(self.len):
            yield (self.bits >> i) & 1

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.len != other.len:
            raise ValueError(f"length mismatch: {self.len} vs {other.len}")
        return BitVec(self.len, self.bits ^ other.bits)

    def __and__(self, other: "BitVec") -> "BitVec":
        if self.len != other.len:
            raise ValueError(f"length mismatch: {self.len} vs {other.len}")
        return BitVec(self.len, self.bits & other.bits)

    def weight(self) -> int:
        return bin(self.bits).count("1")

    def to_list(self) -> list[int]:
        return list(self)

    def to_str(self) -> str:
        return "".join(str(b) for b in self)

    def flip(self, *positions: int) -> "BitVec":
        bits = self.bits
        for p in positions:
            if not 0 <= p < self.len:
                raise IndexError(p)
            bits ^= 1 << p
        return BitVec(self.len, bits)

    def __repr__(self):
        return f"BitVec({self.len}, 0x{self.bits:x})"


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix; each row is an int with ``cols`` significant bits."""

    rows: tuple[int, ...]
    cols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        limit = 1 << self.cols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row does not fit in {self.cols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.cols

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls((0,) * rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        if not rows:
            return cls((), 0)
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(tuple(BitVec.from_list(r).bits for r in rows), cols)

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "BitMatrix":
        """Build from column values, where bit ``i`` of a column is row ``i``."""
        rows = [0] * nrows
        for j, col in enumerate(columns):
            for i in range(nrows):
                if (col >> i) & 1:
                    rows[i] |= 1 << j
        return cls(tuple(rows), len(columns))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not 0 <= j < self.cols:
            raise IndexError(j)
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> BitVec:
        return BitVec(self.cols, self.rows[i])

    def column(self, j: int) -> int:
        """Column ``j`` as an int (bit ``i`` = row ``i``)."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                out |= 1 << i
        return out

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "BitMatrix":
        return BitMatrix(tuple(self.columns()), len(self.rows))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def to_lists(self) -> list[list[int]]:
        return [BitVec(self.cols, r).to_list() for r in self.rows]

    def to_text(self) -> str:
        lines = [f"{len(self.rows)} {self.cols}"]
        lines += [BitVec(self.cols, r).to_str() for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix text")
        try:
            nrows, ncols = (int(x) for x in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad header: {lines[0]!r}") from exc
        body = lines[1:]
        if len(body) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(body)}")
        rows = []
        for ln in body:
            if len(ln) != ncols:
                raise ValueError(f"row {ln!r} is not {ncols} wide")
            rows.append(BitVec.from_str(ln).bits)
        return cls(tuple(rows), ncols)

    def __repr__(self):
        return f"BitMatrix({len(self.rows)}x{self.cols})"


def mat_vec_mul(M: BitMatrix, v: BitVec) -> BitVec:
    if v.len != M.cols:
        raise ValueError(f"dimension mismatch: {M.shape} * {v.len}")
    out = 0
    for i, r in enumerate(M.rows):
        if _popcount(r & v.bits) & 1:
            out |= 1 << i
    return BitVec(len(M.rows), out)


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.cols != len(B.rows):
        raise ValueError(f"dimension mismatch: {A.shape} * {B.shape}")
    rows = []
    for r in A.rows:
        acc = 0
        j = 0
        while r:
            if r & 1:
                acc ^= B.rows[j]
            r >>= 1
            j += 1
        rows.append(acc)
    return BitMatrix(tuple(rows), B.cols)


def _echelon(rows: Iterable[int], cols: int) -> tuple[list[int], list[int]]:
    """Forward elimination; pivots take the lowest available column."""
    work = [r for r in rows]
    pivots: list[int] = []
    prow = 0
    for c in range(cols):
        bit = 1 << c
        found = next((i for i in range(prow, len(work)) if work[i] & bit), None)
        if found is None:
            continue
        work[prow], work[found] = work[found], work[prow]
        for i in range(prow + 1, len(work)):
            if work[i] & bit:
                work[i] ^= work[prow]
        pivots.append(c)
        prow += 1
        if prow == len(work):
            break
    return work[:prow], pivots


def rank(M: BitMatrix) -> int:
    return len(_echelon(M.rows, M.cols)[1])


def in_row_space(M: BitMatrix, v: int) -> bool:
    basis, pivots = _echelon(M.rows, M.cols)
    for row, p in zip(basis, pivots):
        if (v >> p) & 1:
            v ^= row
    return v == 0


def independent_rows(M: BitMatrix) -> BitMatrix:
    """Greedy subset of the rows of ``M`` forming a basis of its row space."""
    kept: list[int] = []
    reduced: dict[int, int] = {}  # pivot bit -> reduced row
    for r in M.rows:
        x = r
        while x:
            top = x.bit_length() - 1
            if top not in reduced:
                break
            x ^= reduced[top]
        if x:
            reduced[x.bit_length() - 1] = x
            kept.append(r)
    return BitMatrix(tuple(kept), M.cols)


def systematic_form(H: BitMatrix) -> tuple[BitMatrix, tuple[int, ...]]:
    """Row-reduce ``H`` into ``[P | I_r]`` up to a column permutation.

    Returns ``(S, perm)`` where column ``j`` of ``S`` is column ``perm[j]`` of
    the row-reduced ``H``. Row ``i`` keeps its position and takes as pivot
    its first set column, searching the trailing ``r`` columns before the
    leading ones, so a matrix that is already ``[P | I]`` maps to itself.
    """
    r, n = len(H.rows), H.cols
    if rank(H) != r:
        raise ValueError("parity-check matrix is rank deficient")
    order = list(range(n - r, n)) + list(range(n - r))
    work = list(H.rows)
    pivots: list[int] = []
    for i in range(r):
        p = next(c for c in order if (work[i] >> c) & 1)
        for j in range(r):
            if j != i and (work[j] >> p) & 1:
                work[j] ^= work[i]
        pivots.append(p)
    pivot_set = set(pivots)
    perm = tuple([c for c in range(n) if c not in pivot_set] + pivots)
    rows = []
    for w in work:
        out = 0
        for j, c in enumerate(perm):
            if (w >> c) & 1:
                out |= 1 << j
        rows.append(out)
    return BitMatrix(tuple(rows), n), perm


def generator_from_parity_check(H: BitMatrix) -> BitMatrix:
    """Systematic generator ``G`` (k x n) with ``G * H^T == 0``."""
    S, perm = systematic_form(H)
    r, n = len(H.rows), H.cols
    k = n - r
    rows = []
    for j in range(k):
        g = 1 << perm[j]
        for i in range(r):
            if (S.rows[i] >> j) & 1:
                g |= 1 << perm[k + i]
        rows.append(g)
    return BitMatrix(tuple(rows), n)
