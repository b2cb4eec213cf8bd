import json
import math
import random
from itertools import combinations

import pytest

from eccprover.codes import build_code
from eccprover.gf2 import BitVec, mat_vec_mul
from eccprover.oracle import (
    BudgetError,
    count_patterns,
    decode_ref,
    encode_ref,
    exhaustive_check,
)


def binomial_sum(n, w):
    # multiplicative formula, independent of math.comb
    total = 0
    for k in range(1, w + 1):
        c = 1
        for i in range(k):
            c = c * (n - i) // (i + 1)
        total += c
    return total


def test_count_patterns():
    assert count_patterns(128, 4) == 11_017_632 == binomial_sum(128, 4)
    assert count_patterns(31, 4) == 36_456
    assert count_patterns(16, 4) == 2_516
    assert count_patterns(32, 4) == 41_448
    assert count_patterns(77, 0) == 0


def test_128_bit_weight_4_count_is_about_eleven_million():
    # the pattern space for a 128-bit word and up to four errors is about 1.1e7
    assert round(count_patterns(128, 4) / 1e7, 1) == 1.1


def test_encode_basics(hamming7, ebch16):
    assert encode_ref(ebch16, BitVec.zeros(5)) == BitVec.zeros(16)
    for d in range(16):
        assert mat_vec_mul(hamming7.H, encode_ref(hamming7, BitVec(4, d))).bits == 0
    rng = random.Random(0)
    for _ in range(100):
        a, b = BitVec(5, rng.getrandbits(5)), BitVec(5, rng.getrandbits(5))
        assert encode_ref(ebch16, a) ^ encode_ref(ebch16, b) == encode_ref(ebch16, a ^ b)
    with pytest.raises(ValueError):
        encode_ref(ebch16, BitVec(4, 0))


def test_round_trip_without_errors(ebch16, hamming7, hsiao22):
    for spec in (ebch16, hamming7):
        for d in range(1 << spec.k):
            flag, data = decode_ref(spec, encode_ref(spec, BitVec(spec.k, d)))
            assert flag == "no_err" and data.bits == d
    rng = random.Random(1)
    for _ in range(300):
        d = rng.getrandbits(16)
        assert decode_ref(hsiao22, encode_ref(hsiao22, BitVec(16, d))) == ("no_err", BitVec(16, d))


def test_hamming_flip_position_six(hamming7):
    for d in range(16):
        cw = encode_ref(hamming7, BitVec(4, d))
        bad = cw.flip(5)  # 1-indexed position 6
        assert mat_vec_mul(hamming7.H, bad).bits == 6
        assert decode_ref(hamming7, bad) == ("err_1", BitVec(4, d))


def test_weight_four_is_detected_never_miscorrected(ebch16):
    data = BitVec(5, 0b11010)
    cw = encode_ref(ebch16, data).bits
    codewords = {encode_ref(ebch16, BitVec(5, d)).bits for d in range(32)}
    for pos in combinations(range(16), 4):
        word = cw ^ sum(1 << p for p in pos)
        flag, out = decode_ref(ebch16, BitVec(16, word))
        assert flag == "err_4"
        assert word not in codewords


def test_exhaustive_reports(ebch16, ebch32, hamming7):
    r = exhaustive_check(ebch16, 4, "fixed")
    assert r.total_patterns == 2516 and r.ok
    assert r.pattern_counts == {w: math.comb(16, w) for w in range(1, 5)}
    for w in r.pattern_counts:
        assert r.passed[w] + r.failed[w] == r.pattern_counts[w]
    r = exhaustive_check(ebch32, 4, "fixed", seed=5)
    assert r.total_patterns == 41_448 and r.ok
    r = exhaustive_check(hamming7, 1, "all")
    assert r.total_patterns == 112 and r.ok and r.data_words == 16


def test_exhaustive_parallel_matches_serial(ebch16):
    a = exhaustive_check(ebch16, 4, "fixed", seed=2)
    b = exhaustive_check(ebch16, 4, "fixed", seed=2, jobs=2)
    assert a.to_dict() == b.to_dict()


def test_exhaustive_report_dumps_first_failure(ebch16, monkeypatch):
    import eccprover.oracle as oracle

    real = oracle.decode_ref
    bad_mask = 0b1001

    def broken(spec, received):
        flag, data = real(spec, received)
        cw = encode_ref(spec, oracle.random_fixed_data(spec, 0)).bits
        if received.bits == cw ^ bad_mask:
            return "err_1", data
        return flag, data

    monkeypatch.setattr(oracle, "decode_ref", broken)
    rep = exhaustive_check(ebch16, 4, "fixed", seed=0)
    assert not rep.ok
    assert rep.failed == {1: 0, 2: 1, 3: 0, 4: 0}
    doc = json.loads(rep.to_json())
    assert doc["first_failure"]["mask"] == "0x9"
    assert doc["first_failure"]["data"] == hex(oracle.random_fixed_data(ebch16, 0).bits)


def test_budget_guards(ebch32):
    with pytest.raises(BudgetError, match="k <= 12"):
        exhaustive_check(ebch32, 1, "all")
    with pytest.raises(BudgetError):
        exhaustive_check(ebch32, 5, "fixed")
    big = build_code("bch", m=6, t=2)
    with pytest.raises(BudgetError, match="budget"):
        exhaustive_check(big, 2, "all")
    with pytest.raises(ValueError):
        exhaustive_check(ebch32, 1, "sometimes")
