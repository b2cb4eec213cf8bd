import random

import pytest

from eccprover.codes import (
    CodeSpec,
    Gf2mField,
    build_bch,
    build_code,
    build_hamming,
    build_hsiao,
    check_spec,
    extend_overall_parity,
    gf_mul,
    min_distance,
)
from eccprover.gf2 import BitMatrix, BitVec, mat_vec_mul, rank


def distance_by_nullspace(spec):
    """Minimum weight over all nonzero n-bit words with zero syndrome (2^n scan)."""
    best = None
    rows = spec.H.rows
    for x in range(1, 1 << spec.n):
        if all(bin(row & x).count("1") % 2 == 0 for row in rows):
            w = bin(x).count("1")
            if best is None or w < best:
                best = w
    return best


def poly_mulmod(a, b, poly, m):
    """Schoolbook carry-less multiply then reduce, written independently of the field class."""
    prod = 0
    for i in range(m):
        if (b >> i) & 1:
            prod ^= a << i
    for deg in range(2 * m - 2, m - 1, -1):
        if (prod >> deg) & 1:
            prod ^= poly << (deg - m)
    return prod


def test_gf16_examples():
    F = Gf2mField(4)
    for a in range(16):
        assert gf_mul(F, a, 1) == a
    assert gf_mul(F, 0b0010, 0b0010) == 0b0100
    assert gf_mul(F, 0b1000, 0b0010) == 0b0011


@pytest.mark.parametrize("m", [3, 4, 5, 6])
def test_field_multiplication_matches_polynomial_arithmetic(m):
    F = Gf2mField(m)
    rng = random.Random(m)
    for _ in range(300):
        a, b = rng.randrange(1 << m), rng.randrange(1 << m)
        assert F.mul(a, b) == poly_mulmod(a, b, F.primitive_poly, m)
    # alpha generates the multiplicative group
    assert len({F.pow_alpha(e) for e in range(F.order)}) == F.order


def test_hamming_columns_are_binary_indices(hamming7):
    assert (hamming7.n, hamming7.k, hamming7.r) == (7, 4, 3)
    for j in range(7):
        assert hamming7.H.column(j) == j + 1
    # an error at (1-indexed) position 5 gives syndrome 0b101
    assert mat_vec_mul(hamming7.H, BitVec.unit(7, 4)).bits == 0b101


def test_hamming_syndrome_independent_of_data(hamming7):
    from eccprover.oracle import encode_ref

    e = BitVec.unit(7, 2)
    s = {mat_vec_mul(hamming7.H, encode_ref(hamming7, BitVec(4, d)) ^ e).bits for d in (0b0011, 0b1010)}
    assert s == {3}


def test_hamming_15_11():
    spec = build_hamming(4)
    assert (spec.n, spec.k) == (15, 11)
    assert rank(spec.H) == 4


def test_hsiao_22_16(hsiao22):
    assert (hsiao22.n, hsiao22.r) == (22, 6)
    cols = hsiao22.H.columns()
    assert len(set(cols)) == 22
    assert all(bin(c).count("1") % 2 == 1 for c in cols)
    assert min_distance(hsiao22) == 4


def test_hsiao_single_and_double_error_syndromes(hsiao22):
    cols = hsiao22.H.columns()
    for i in range(22):
        assert bin(cols[i]).count("1") % 2 == 1
        for j in range(i + 1, 22):
            s = cols[i] ^ cols[j]
            assert s != 0 and bin(s).count("1") % 2 == 0


@pytest.mark.parametrize("t,nk,d", [(2, (15, 7), 5), (3, (15, 5), 7)])
def test_bch_15(t, nk, d):
    spec = build_bch(4, t)
    assert (spec.n, spec.k) == nk
    assert min_distance(spec) == d
    assert distance_by_nullspace(spec) == d


def test_bch_31_16():
    spec = build_bch(5, 3)
    assert (spec.n, spec.k) == (31, 16)
    assert min_distance(spec) >= 7


def test_extended_bch_16_5(ebch16):
    assert (ebch16.n, ebch16.k, ebch16.t_correct, ebch16.t_detect) == (16, 5, 3, 4)
    assert min_distance(ebch16) == 8
    assert distance_by_nullspace(ebch16) == 8
    # the appended row is the overall-parity indicator
    assert ebch16.H.rows[-1] == (1 << 16) - 1


def test_extended_hamming_is_secded():
    spec = extend_overall_parity(build_hamming(3))
    assert (spec.n, spec.k) == (8, 4)
    assert min_distance(spec) == 4
    assert distance_by_nullspace(spec) == 4


def test_repetition_code_distance():
    H = BitMatrix.from_lists([[1, 1, 0], [1, 0, 1]])
    spec = CodeSpec("hamming", 3, 1, 2, 1, 1, H)
    assert min_distance(spec) == 3


@pytest.mark.parametrize("family,params", [
    ("hamming", {"m": 3}), ("hamming", {"m": 5}), ("hsiao", {"k": 8}), ("hsiao", {"k": 32}),
    ("bch", {"m": 5, "t": 2}), ("extended-bch", {"m": 4, "t": 3}), ("ext-bch", {"m": 5, "t": 3}),
])
def test_constructed_codes_meet_their_claims(family, params):
    spec = build_code(family, **params)
    check_spec(spec)
    assert rank(spec.H) == spec.r


def test_bad_parameters():
    with pytest.raises(ValueError):
        build_hamming(1)
    with pytest.raises(ValueError):
        build_hsiao(12)
    with pytest.raises(ValueError):
        build_bch(7, 2)
    with pytest.raises(ValueError):
        build_code("reed-solomon", m=4)
    with pytest.raises(ValueError):
        min_distance(build_bch(6, 2))  # k = 51 is beyond exhaustive enumeration


def test_spec_json_round_trip(ebch32):
    again = CodeSpec.from_json(ebch32.to_json())
    assert again == ebch32
    assert again.data_positions == ebch32.data_positions
