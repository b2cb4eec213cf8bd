"""Brute-force reference encoder/decoder and exhaustive error-pattern sweeps.

Nothing here touches the circuit or SAT layers: the syndrome table is rebuilt
from the parity-check columns and codewords come from the generator matrix, so
the oracle can be used to check both.
"""

from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .codes import CodeSpec
from .gf2 import BitVec, mat_vec_mul
from .properties import random_fixed_data

ALL_DATA_MAX_K = 12
PATTERN_BUDGET = 10**7


class BudgetError(ValueError):
    """The requested sweep is larger than the exhaustive budget allows."""


def count_patterns(n: int, max_weight: int) -> int:
    """Number of error masks of weight 1..max_weight over n bits."""
    return sum(math.comb(n, w) for w in range(1, min(max_weight, n) + 1))


def encode_ref(spec: CodeSpec, data: BitVec) -> BitVec:
    if data.len != spec.k:
        raise ValueError(f"data has {data.len} bits, code has k={spec.k}")
    cw = 0
    for j, row in enumerate(spec.G.rows):
        if (data.bits >> j) & 1:
            cw ^= row
    return BitVec(spec.n, cw)


def _syndrome(spec: CodeSpec, word: int) -> int:
    return mat_vec_mul(spec.H, BitVec(spec.n, word)).bits


@lru_cache(maxsize=32)
def _table(spec: CodeSpec) -> dict[int, int]:
    """Syndrome -> error mask for every pattern of weight 1..t_correct."""
    table: dict[int, int] = {}
    for w in range(1, spec.t_correct + 1):
        for pos in combinations(range(spec.n), w):
            mask = sum(1 << p for p in pos)
            s = _syndrome(spec, mask)
            if s == 0 or s in table:
                raise ValueError(f"{spec.name}: syndrome collision at positions {pos}")
            table[s] = mask
    return table


def _extract_data(spec: CodeSpec, word: int) -> BitVec:
    bits = 0
    for j, p in enumerate(spec.data_positions):
        bits |= ((word >> p) & 1) << j
    return BitVec(spec.k, bits)


def decode_ref(spec: CodeSpec, received: BitVec) -> tuple[str, BitVec]:
    """Return ``(flag, data)``.

    A zero syndrome gives ``no_err``. A syndrome found in the table of
    correctable patterns gives ``err_<weight>`` and the corrected data.
    Anything else is detected but uncorrectable: the flag is the top class
    ``err_<t_detect>`` and the data bits are passed through unchanged.
    """
    if received.len != spec.n:
        raise ValueError(f"received word has {received.len} bits, code has n={spec.n}")
    s = _syndrome(spec, received.bits)
    if s == 0:
        return "no_err", _extract_data(spec, received.bits)
    mask = _table(spec).get(s)
    if mask is None:
        return f"err_{spec.t_detect}", _extract_data(spec, received.bits)
    return f"err_{bin(mask).count('1')}", _extract_data(spec, received.bits ^ mask)


def expected_outcome(spec: CodeSpec, data: BitVec, mask: int) -> tuple[str, BitVec]:
    """What a correct decoder must report for ``encode(data) ^ mask``."""
    w = bin(mask).count("1")
    if w == 0:
        return "no_err", data
    if w <= spec.t_correct:
        return f"err_{w}", data
    if w <= spec.t_detect:
        cw = encode_ref(spec, data).bits ^ mask
        return f"err_{spec.t_detect}", _extract_data(spec, cw)
    raise ValueError(f"weight {w} is beyond the detection guarantee t_detect={spec.t_detect}")


@dataclass
class ExhaustiveReport:
    code: str
    data_mode: str
    seed: int | None
    max_weight: int
    pattern_counts: dict[int, int] = field(default_factory=dict)
    passed: dict[int, int] = field(default_factory=dict)
    failed: dict[int, int] = field(default_factory=dict)
    first_failure: tuple[int, int] | None = None
    data_words: int = 1

    @property
    def total_patterns(self) -> int:
        return sum(self.pattern_counts.values())

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())

    def to_dict(self) -> dict:
        d = {
            "code": self.code,
            "data_mode": self.data_mode,
            "seed": self.seed,
            "max_weight": self.max_weight,
            "data_words": self.data_words,
            "total_patterns": self.total_patterns,
            "per_weight": {
                str(w): {"patterns": self.pattern_counts[w], "pass": self.passed[w], "fail": self.failed[w]}
                for w in sorted(self.pattern_counts)
            },
            "ok": self.ok,
            "first_failure": None,
        }
        if self.first_failure is not None:
            data, mask = self.first_failure
            d["first_failure"] = {"data": f"{data:#x}", "mask": f"{mask:#x}"}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _sweep_weight(spec: CodeSpec, w: int, data_words: list[int]) -> tuple[int, int, tuple[int, int] | None]:
    passed = failed = 0
    first = None
    for d in data_words:
        data = BitVec(spec.k, d)
        cw = encode_ref(spec, data).bits
        for pos in combinations(range(spec.n), w):
            mask = sum(1 << p for p in pos)
            if decode_ref(spec, BitVec(spec.n, cw ^ mask)) == expected_outcome(spec, data, mask):
                passed += 1
            else:
                failed += 1
                if first is None:
                    first = (d, mask)
    return passed, failed, first


def check_budget(spec: CodeSpec, max_weight: int, data_mode: str) -> None:
    if data_mode not in ("all", "fixed"):
        raise ValueError(f"data mode must be 'all' or 'fixed', got {data_mode!r}")
    if max_weight > spec.t_detect:
        raise BudgetError(
            f"max weight {max_weight} exceeds t_detect={spec.t_detect}; "
            "the decoder makes no promise beyond that"
        )
    patterns = count_patterns(spec.n, max_weight)
    if data_mode == "all" and spec.k > ALL_DATA_MAX_K:
        raise BudgetError(
            f"all-data sweep needs 2^{spec.k} data words; budget allows k <= {ALL_DATA_MAX_K}"
        )
    if patterns > PATTERN_BUDGET:
        raise BudgetError(
            f"{patterns} masks of weight <= {max_weight} over {spec.n} bits; budget is {PATTERN_BUDGET}"
        )


def exhaustive_check(
    spec: CodeSpec,
    max_weight: int,
    data_mode: str = "fixed",
    seed: int = 0,
    fixed_data: BitVec | None = None,
    jobs: int = 1,
) -> ExhaustiveReport:
    """Decode every mask of weight 1..max_weight on top of the chosen data.

    ``data_mode="fixed"`` uses a single data word (``fixed_data`` or one drawn
    from ``seed`` the same way the reduced proof plan draws it);
    ``data_mode="all"`` sweeps every data word.
    """
    check_budget(spec, max_weight, data_mode)
    if data_mode == "all":
        words = list(range(1 << spec.k))
        rep_seed = None
    else:
        if fixed_data is None:
            fixed_data = random_fixed_data(spec, seed)
        words = [fixed_data.bits]
        rep_seed = seed
    rep = ExhaustiveReport(spec.name, data_mode, rep_seed, max_weight, data_words=len(words))
    weights = list(range(1, max_weight + 1))
    if jobs > 1 and len(weights) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_weight, [spec] * len(weights), weights, [words] * len(weights)))
    else:
        results = [_sweep_weight(spec, w, words) for w in weights]
    for w, (p, f, first) in zip(weights, results):
        rep.pattern_counts[w] = math.comb(spec.n, w) * len(words)
        rep.passed[w] = p
        rep.failed[w] = f
        if first is not None and rep.first_failure is None:
            rep.first_failure = first
    return rep


def random_masks(spec: CodeSpec, weight: int, count: int, rng: random.Random) -> list[int]:
    return [sum(1 << p for p in rng.sample(range(spec.n), weight)) for _ in range(count)]
