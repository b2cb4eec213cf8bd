import random
from itertools import combinations

import pytest

from eccprover.circuit import Op, evaluate_lanes, simulate
from eccprover.codes import build_code
from eccprover.gf2 import BitVec, mat_vec_mul
from eccprover.oracle import decode_ref, encode_ref
from eccprover.synth import (
    PipelineSchedule,
    build_sequential_core,
    build_wrapper,
    flag_names,
    pipeline,
    state_names,
    synth_decoder,
    synth_encoder,
    synth_model_encoder,
    synth_syndrome,
)


def decoder_view(spec, out, lane):
    flags = [f for f in flag_names(spec) if out[f][lane]]
    return flags, out["data_o"][lane]


def test_encoder_matches_oracle_exhaustively(hamming7, ebch16):
    for spec in (hamming7, ebch16):
        enc = synth_encoder(spec)
        words = list(range(1 << spec.k))
        got = evaluate_lanes(enc, {"data_i": words})["cw_o"]
        assert got == [encode_ref(spec, BitVec(spec.k, d)).bits for d in words]


def test_encoder_1011(hamming7):
    out = simulate(synth_encoder(hamming7), [{"data_i": 0b1011}])[0]["cw_o"]
    assert out == encode_ref(hamming7, BitVec(4, 0b1011)).bits
    assert mat_vec_mul(hamming7.H, BitVec(7, out)).bits == 0


def test_encoder_xor_budget(ebch32):
    S, _ = ebch32.systematic
    bound = sum(max(0, bin(row).count("1") - 1) for row in S.rows)
    assert synth_encoder(ebch32).gate_count(Op.XOR) <= bound


def test_zero_data_zero_codeword(ebch32):
    assert simulate(synth_encoder(ebch32), [{"data_i": 0}])[0]["cw_o"] == 0


def test_syndrome_circuit(hamming7, ebch32):
    syn = synth_syndrome(hamming7)
    assert simulate(syn, [{"cw_i": 1 << 4}])[0]["s"] == 0b101
    rng = random.Random(0)
    syn = synth_syndrome(ebch32)
    words = [rng.getrandbits(32) for _ in range(500)]
    got = evaluate_lanes(syn, {"cw_i": words})["s"]
    assert got == [mat_vec_mul(ebch32.H, BitVec(32, w)).bits for w in words]
    cws = [encode_ref(ebch32, BitVec(16, rng.getrandbits(16))).bits for _ in range(100)]
    assert set(evaluate_lanes(syn, {"cw_i": cws})["s"]) == {0}


def test_decoder_valid_codeword(ebch16):
    dec = synth_decoder(ebch16)
    cw = encode_ref(ebch16, BitVec(5, 0b10110)).bits
    out = simulate(dec, [{"cw_i": cw}])[0]
    assert out["no_err"] == 1
    assert all(out[f] == 0 for f in flag_names(ebch16)[1:])
    assert out["data_o"] == 0b10110


@pytest.mark.parametrize("w", [3, 4])
def test_decoder_all_masks_of_weight(ebch16, w):
    dec = synth_decoder(ebch16)
    data = BitVec(5, 0b01101)
    cw = encode_ref(ebch16, data).bits
    masks = [sum(1 << p for p in pos) for pos in combinations(range(16), w)]
    out = evaluate_lanes(dec, {"cw_i": [cw ^ m for m in masks]})
    for lane, m in enumerate(masks):
        flags, data_o = decoder_view(ebch16, out, lane)
        assert flags == [f"err_{w}"]
        ref_flag, ref_data = decode_ref(ebch16, BitVec(16, cw ^ m))
        assert ref_flag == f"err_{w}" and data_o == ref_data.bits
        if w == 3:
            assert data_o == data.bits


@pytest.mark.parametrize("family,params", [("hamming", {"m": 3}), ("hsiao", {"k": 16}), ("extended-bch", {"m": 5, "t": 3})])
def test_decoder_matches_oracle_on_random_words(family, params):
    spec = build_code(family, **params)
    dec = synth_decoder(spec)
    rng = random.Random(1)
    words = []
    for _ in range(400):
        cw = encode_ref(spec, BitVec(spec.k, rng.getrandbits(spec.k))).bits
        w = rng.randint(0, spec.t_detect)
        words.append(cw ^ sum(1 << p for p in rng.sample(range(spec.n), w)))
    out = evaluate_lanes(dec, {"cw_i": words})
    for lane, word in enumerate(words):
        flags, data_o = decoder_view(spec, out, lane)
        ref_flag, ref_data = decode_ref(spec, BitVec(spec.n, word))
        assert flags == [ref_flag] and data_o == ref_data.bits


def test_one_hot_mutation_breaks_one_hot(ebch16):
    dec = synth_decoder(ebch16, mutate="one-hot")
    cw = encode_ref(ebch16, BitVec(5, 0)).bits
    masks = [sum(1 << p for p in pos) for pos in combinations(range(16), 2)]
    out = evaluate_lanes(dec, {"cw_i": [cw ^ m for m in masks]})
    raised = [sum(out[f][lane] for f in flag_names(ebch16)) for lane in range(len(masks))]
    assert max(raised) == 2 and raised.count(2) == 1


def test_one_hot_mutation_needs_double_error_correction(hamming7):
    with pytest.raises(ValueError):
        synth_decoder(hamming7, mutate="one-hot")


def test_decoder_budget():
    with pytest.raises(ValueError, match="budget"):
        synth_decoder(build_code("hamming", m=6))


def test_h_entry_mutation_changes_the_encoder(ebch16):
    good, bad = synth_encoder(ebch16), synth_model_encoder(ebch16, mutate="h-entry")
    words = list(range(32))
    assert evaluate_lanes(good, {"data_i": words}) != evaluate_lanes(bad, {"data_i": words})


def test_wrapper_ports(ebch16):
    enc, dec = synth_encoder(ebch16), synth_decoder(ebch16)
    w = build_wrapper(enc, dec)
    assert len(w.inputs) == len(enc.inputs) + len(dec.inputs)
    assert set(w.outputs) == set(enc.outputs) | set(dec.outputs)
    cw = encode_ref(ebch16, BitVec(5, 9)).bits
    out = simulate(w, [{"data_i": 9, "cw_i": cw}])[0]
    assert out["cw_o"] == cw and out["no_err"] == 1


def test_wrapper_width_mismatch(ebch16, hamming7):
    with pytest.raises(ValueError):
        build_wrapper(synth_encoder(ebch16), synth_decoder(hamming7))


# -- pipelines -------------------------------------------------------------------

def run_transaction(c, prefix, ins, latency, idle=None):
    """Start at cycle 0, then hold inputs idle; return outputs per cycle."""
    idle = idle or {k: 0 for k in ins}
    stim = [{**ins, f"{prefix}_start_i": 1, "rst_n_i": 1}]
    stim += [{**idle, f"{prefix}_start_i": 0, "rst_n_i": 1} for _ in range(latency + 1)]
    return simulate(c, stim)


def test_decoder_schedule_111_valid_at_cycle_3(ebch16):
    dec = synth_decoder(ebch16)
    seq = pipeline(dec, PipelineSchedule(1, 1, 1))
    cw = encode_ref(ebch16, BitVec(5, 21)).bits ^ 0b101
    out = run_transaction(seq, "dec", {"cw_i": cw}, 3)
    assert [o["dec_valid_o"] for o in out] == [0, 0, 0, 1, 0]
    comb = simulate(dec, [{"cw_i": cw}])[0]
    assert out[3]["data_o"] == comb["data_o"] == 21 and out[3]["err_2"] == 1


def test_encoder_six_cycles(ebch32):
    enc = synth_encoder(ebch32)
    seq = pipeline(enc, 6)
    data = 0xBEEF
    out = run_transaction(seq, "enc", {"data_i": data}, 6, idle={"data_i": 0x1234})
    assert [o["enc_valid_o"] for o in out].index(1) == 6
    assert out[6]["cw_o"] == encode_ref(ebch32, BitVec(16, data)).bits


def test_pipelined_encoder_random_transactions(ebch16):
    enc = synth_encoder(ebch16)
    seq = pipeline(enc, 4)
    rng = random.Random(2)
    stim, expect = [], []
    for _ in range(1000):
        d = rng.getrandbits(5)
        stim.append({"data_i": d, "enc_start_i": 1, "rst_n_i": 1})
        # starts while the lane is busy (cycles 1..4) must be ignored
        stim += [{"data_i": rng.getrandbits(5), "enc_start_i": rng.randint(0, 1), "rst_n_i": 1} for _ in range(4)]
        stim += [{"data_i": rng.getrandbits(5), "enc_start_i": 0, "rst_n_i": 1} for _ in range(rng.randint(0, 2))]
        expect.append(encode_ref(ebch16, BitVec(5, d)).bits)
    out = simulate(seq, stim)
    valid = [o["cw_o"] for o in out if o["enc_valid_o"]]
    assert valid == expect


def test_reset_forces_idle(ebch16):
    seq = pipeline(synth_encoder(ebch16), 3)
    stim = [{"data_i": 3, "enc_start_i": 1, "rst_n_i": 1}, {"data_i": 0, "enc_start_i": 0, "rst_n_i": 0}]
    stim += [{"data_i": 0, "enc_start_i": 0, "rst_n_i": 1}] * 4
    out = simulate(seq, stim)
    assert [o["enc_state"] for o in out[:3]] == [1, 2, 1]
    assert not any(o["enc_valid_o"] for o in out)


def test_sequential_core_back_to_back(ebch16):
    sched = PipelineSchedule(2, 1, 1)
    core = build_sequential_core(ebch16, sched)
    data = 0b10011
    cw = encode_ref(ebch16, BitVec(5, data)).bits
    bad = cw ^ 0b1000000001000001
    idle = {"data_i": 0, "cw_i": 0, "enc_start_i": 0, "dec_start_i": 0, "rst_n_i": 1}
    stim = [{**idle, "data_i": data, "enc_start_i": 1}] + [idle] * 2
    stim += [{**idle, "cw_i": bad, "dec_start_i": 1}] + [idle] * 3
    out = simulate(core, stim)
    assert out[2]["enc_valid_o"] == 1 and out[2]["cw_o"] == cw
    assert out[5]["dec_valid_o"] == 1
    assert out[5]["data_o"] == data and out[5]["err_3"] == 1


def test_sequential_core_encoder_wins_simultaneous_start(ebch16):
    core = build_sequential_core(ebch16, PipelineSchedule(1, 1, 1))
    stim = [{"data_i": 1, "cw_i": 0, "enc_start_i": 1, "dec_start_i": 1, "rst_n_i": 1}]
    stim += [{"data_i": 0, "cw_i": 0, "enc_start_i": 0, "dec_start_i": 0, "rst_n_i": 1}] * 3
    out = simulate(core, stim)
    assert out[1]["enc_state"] == 2 and out[1]["dec_state"] == 1


def test_state_names():
    assert state_names(1, 3) == "IDLE"
    assert state_names(4, 3) == "S2"
    assert state_names(0b101, 3) == "ILLEGAL{IDLE,S2}"
    assert state_names(0, 3) == "ILLEGAL{}"
