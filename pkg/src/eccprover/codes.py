"""Parity-check constructions for Hamming, Hsiao and (extended) BCH codes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

from .gf2 import (
    BitMatrix,
    BitVec,
    generator_from_parity_check,
    independent_rows,
    rank,
    systematic_form,
)

FAMILIES = ("hamming", "hsiao", "bch", "extended-bch")

# Fixed primitive polynomials, bit-encoded (bit i = coefficient of x^i).
PRIMITIVE_POLYS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
}

HSIAO_CHECK_BITS = {4: 4, 8: 5, 16: 6, 32: 7}

MIN_DISTANCE_MAX_K = 20


class Gf2mField:
    """GF(2^m) with log/antilog tables over a fixed primitive polynomial."""

    def __init__(self, m: int, primitive_poly: int | None = None):
        if primitive_poly is None:
            if m not in PRIMITIVE_POLYS:
                raise ValueError(f"no default primitive polynomial for m={m}")
            primitive_poly = PRIMITIVE_POLYS[m]
        if primitive_poly.bit_length() != m + 1:
            raise ValueError("polynomial degree does not match m")
        self.m = m
        self.primitive_poly = primitive_poly
        self.order = (1 << m) - 1
        self.antilog = [0] * self.order
        self.log = [0] * (1 << m)
        x = 1
        for i in range(self.order):
            if i and x == 1:
                raise ValueError("polynomial is not primitive")
            self.antilog[i] = x
            self.log[x] = i
            x <<= 1
            if x >> m:
                x ^= primitive_poly
        if x != 1:
            raise ValueError("polynomial is not primitive")

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.antilog[(self.log[a] + self.log[b]) % self.order]

    def pow_alpha(self, e: int) -> int:
        return self.antilog[e % self.order]


def gf_mul(F: Gf2mField, a: int, b: int) -> int:
    return F.mul(a, b)


@dataclass(frozen=True)
class CodeSpec:
    family: str
    n: int
    k: int
    r: int
    t_correct: int
    t_detect: int
    H: BitMatrix = field(repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n != self.k + self.r:
            raise ValueError("n != k + r")
        if self.H.shape != (self.r, self.n):
            raise ValueError(f"H is {self.H.shape}, expected {(self.r, self.n)}")
        if self.t_detect < self.t_correct:
            raise ValueError("t_detect < t_correct")

    @property
    def name(self) -> str:
        return f"{self.family}({self.n},{self.k})"

    @cached_property
    def G(self) -> BitMatrix:
        return generator_from_parity_check(self.H)

    @cached_property
    def systematic(self) -> tuple[BitMatrix, tuple[int, ...]]:
        return systematic_form(self.H)

    @property
    def data_positions(self) -> tuple[int, ...]:
        """Codeword positions carrying data bit 0..k-1."""
        return self.systematic[1][: self.k]

    @property
    def check_positions(self) -> tuple[int, ...]:
        return self.systematic[1][self.k :]

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "t_correct": self.t_correct,
            "t_detect": self.t_detect,
            "H": [BitVec(self.n, row).to_str() for row in self.H.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        H = BitMatrix(tuple(BitVec.from_str(s).bits for s in d["H"]), d["n"])
        return cls(d["family"], d["n"], d["k"], d["r"], d["t_correct"], d["t_detect"], H)

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        return cls.from_dict(json.loads(text))


def build_hamming(m: int) -> CodeSpec:
    """Hamming code whose column ``j`` (1-indexed) is the binary encoding of ``j``.

    A flip of codeword bit index ``j - 1`` therefore yields syndrome value ``j``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    n = (1 << m) - 1
    H = BitMatrix.from_columns([j for j in range(1, n + 1)], m)
    return CodeSpec("hamming", n, n - m, m, 1, 1, H)


def build_hsiao(k: int) -> CodeSpec:
    """Hsiao SEC-DED code: distinct odd-weight columns, check bits last."""
    if k not in HSIAO_CHECK_BITS:
        raise ValueError(f"unsupported Hsiao data width {k}; choose from {sorted(HSIAO_CHECK_BITS)}")
    r = HSIAO_CHECK_BITS[k]
    candidates = sorted(
        (v for v in range(1, 1 << r) if bin(v).count("1") % 2 == 1 and bin(v).count("1") >= 3),
        key=lambda v: (bin(v).count("1"), v),
    )
    data_cols = candidates[:k]
    H = BitMatrix.from_columns(data_cols + [1 << i for i in range(r)], r)
    return CodeSpec("hsiao", k + r, k, r, 1, 2, H)


def build_bch(m: int, t: int) -> CodeSpec:
    """Narrow-sense primitive binary BCH code of length 2^m - 1.

    Rows are the bit expansions of alpha^(i*j) for odd i < 2t; rows that are
    linearly dependent on earlier ones (short conjugacy classes) are dropped
    so H has full row rank.
    """
    if not 3 <= m <= 6:
        raise ValueError("m must be in [3, 6]")
    if t < 1:
        raise ValueError("t must be >= 1")
    F = Gf2mField(m)
    n = F.order
    rows = []
    for i in range(1, 2 * t, 2):
        for b in range(m):
            row = 0
            for j in range(n):
                if (F.pow_alpha(i * j) >> b) & 1:
                    row |= 1 << j
            rows.append(row)
    H = independent_rows(BitMatrix(tuple(rows), n))
    r = len(H.rows)
    k = n - r
    if k <= 0:
        raise ValueError(f"BCH(m={m}, t={t}) is degenerate (k={k})")
    return CodeSpec("bch", n, k, r, t, t, H)


def extend_overall_parity(spec: CodeSpec) -> CodeSpec:
    """Append an overall-parity bit: distance d -> d + 1 for odd d."""
    n = spec.n + 1
    rows = tuple(spec.H.rows) + ((1 << n) - 1,)
    H = BitMatrix(rows, n)
    family = "extended-bch" if spec.family == "bch" else spec.family
    return CodeSpec(family, n, spec.k, spec.r + 1, spec.t_correct, spec.t_correct + 1, H)


def min_distance(spec: CodeSpec) -> int:
    """Minimum weight over all nonzero codewords, by Gray-code enumeration."""
    if spec.k > MIN_DISTANCE_MAX_K:
        raise ValueError(f"k={spec.k} exceeds exhaustive budget (k <= {MIN_DISTANCE_MAX_K})")
    G = spec.G.rows
    best = spec.n
    cw = 0
    for i in range(1, 1 << spec.k):
        # Gray code: flip generator row at the lowest set bit of i
        cw ^= G[(i & -i).bit_length() - 1]
        w = bin(cw).count("1")
        if w < best:
            best = w
    return best


def build_code(family: str, **params) -> CodeSpec:
    """Dispatch by family name; accepts ``ext-bch`` as an alias."""
    family = {"ext-bch": "extended-bch"}.get(family, family)
    if family == "hamming":
        return build_hamming(params["m"])
    if family == "hsiao":
        return build_hsiao(params["k"])
    if family == "bch":
        return build_bch(params["m"], params["t"])
    if family == "extended-bch":
        return extend_overall_parity(build_bch(params["m"], params["t"]))
    raise ValueError(f"unknown family {family!r}")


def check_spec(spec: CodeSpec) -> None:
    """Raise if the rank or (when enumerable) distance claims do not hold."""
    if rank(spec.H) != spec.r:
        raise ValueError("rank(H) != r")
    if spec.k <= MIN_DISTANCE_MAX_K:
        d = min_distance(spec)
        if d < spec.t_correct + spec.t_detect + 1:
            raise ValueError(f"distance {d} too small for t_correct={spec.t_correct}, t_detect={spec.t_detect}")
