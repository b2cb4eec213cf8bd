"""Synthesis of encoder, syndrome and decoder circuits, pipelining and harnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .circuit import Builder, Circuit, Op
from .codes import CodeSpec

DECODER_MAX_N = 32
DECODER_MAX_TABLE = 1 << 16
PREDECODE_BITS = 6
MUTATIONS = ("one-hot", "h-entry")


@dataclass(frozen=True)
class PipelineSchedule:
    encode_cycles: int = 1
    detect_cycles: int = 1
    correct_cycles: int = 1

    def __post_init__(self):
        for v in (self.encode_cycles, self.detect_cycles, self.correct_cycles):
            if v < 1:
                raise ValueError("every pipeline stage count must be at least 1")

    @property
    def decode_cycles(self) -> int:
        return self.detect_cycles + self.correct_cycles

    @property
    def total(self) -> int:
        return self.encode_cycles + self.detect_cycles + self.correct_cycles

    @classmethod
    def parse(cls, text: str) -> "PipelineSchedule":
        parts = [int(x) for x in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"pipeline schedule needs three comma-separated counts, got {text!r}")
        return cls(*parts)


def flag_names(spec: CodeSpec) -> list[str]:
    return ["no_err"] + [f"err_{w}" for w in range(1, spec.t_detect + 1)]


def table_size(spec: CodeSpec) -> int:
    return sum(math.comb(spec.n, w) for w in range(spec.t_correct + 1))


# -- combinational units ---------------------------------------------------------

def _encode_into(b: Builder, spec: CodeSpec, data: Sequence[int]) -> list[int]:
    S, perm = spec.systematic
    k = spec.k
    cw = [b.const(0)] * spec.n
    for j in range(k):
        cw[perm[j]] = data[j]
    for i, row in enumerate(S.rows):
        cw[perm[k + i]] = b.xor_chain([data[j] for j in range(k) if (row >> j) & 1])
    return cw


def _syndrome_into(b: Builder, H_rows: Sequence[int], n: int, cw: Sequence[int]) -> list[int]:
    return [b.xor_chain([cw[j] for j in range(n) if (row >> j) & 1]) for row in H_rows]


def synth_encoder(spec: CodeSpec) -> Circuit:
    """Systematic encoder: data bits pass through, check bits are XOR chains."""
    b = Builder(f"enc_{spec.family}_{spec.n}_{spec.k}")
    data = b.input("data_i", spec.k)
    b.output("cw_o", _encode_into(b, spec, data))
    return b.build()


def synth_syndrome(spec: CodeSpec, H_rows: Sequence[int] | None = None) -> Circuit:
    b = Builder(f"syn_{spec.family}_{spec.n}_{spec.k}")
    cw = b.input("cw_i", spec.n)
    b.output("s", _syndrome_into(b, H_rows if H_rows is not None else spec.H.rows, spec.n, cw))
    return b.build()


def syndrome_table(spec: CodeSpec) -> list[tuple[int, tuple[int, ...]]]:
    """All (syndrome, error positions) pairs for patterns of weight 1..t_correct."""
    cols = spec.H.columns()
    table = []
    seen: dict[int, tuple[int, ...]] = {0: ()}
    for w in range(1, spec.t_correct + 1):
        for pos in combinations(range(spec.n), w):
            s = 0
            for p in pos:
                s ^= cols[p]
            if s in seen:
                raise ValueError(f"patterns {seen[s]} and {pos} share syndrome {s:#x}; distance too small")
            seen[s] = pos
            table.append((s, pos))
    return table


def _mutated_h_rows(spec: CodeSpec) -> list[int]:
    """H with one entry flipped: the last check row loses or gains data position 0."""
    rows = list(spec.H.rows)
    rows[-1] ^= 1 << spec.data_positions[0]
    return rows


def synth_decoder(spec: CodeSpec, mutate: str | None = None) -> Circuit:
    """Syndrome-table decoder with one flag per error weight class.

    Outputs ``no_err``, ``err_1`` .. ``err_<t_detect>``, ``data_o``, ``ecc_o``
    and the internal syndrome as ``syndrome``. ``mutate="one-hot"`` makes one
    weight-2 table row also raise ``err_1``, so the flags stop being one-hot.
    """
    if spec.n > DECODER_MAX_N or table_size(spec) > DECODER_MAX_TABLE:
        raise ValueError(
            f"decoder table for {spec.name} exceeds the synthesis budget "
            f"(n <= {DECODER_MAX_N}, table <= {DECODER_MAX_TABLE}; table would be {table_size(spec)})"
        )
    if mutate not in (None, "one-hot"):
        raise ValueError(f"unknown decoder mutation {mutate!r}")
    b = Builder(f"dec_{spec.family}_{spec.n}_{spec.k}")
    cw = b.input("cw_i", spec.n)
    s = _syndrome_into(b, spec.H.rows, spec.n, cw)
    ns = [b.not_(x) for x in s]
    nonzero = b.or_tree(s)

    # Two-level matching: the syndrome is cut into chunks of at most
    # PREDECODE_BITS bits, each chunk value is decoded once, and a table row
    # is the AND of one decoded term per chunk.
    nchunks = -(-spec.r // PREDECODE_BITS)
    bounds = [round(i * spec.r / nchunks) for i in range(nchunks + 1)]
    chunks = [range(bounds[i], bounds[i + 1]) for i in range(nchunks)]
    decoded: dict[tuple[int, int], int] = {}

    def term(ci: int, value: int) -> int:
        key = (ci, value)
        if key not in decoded:
            decoded[key] = b.and_chain([s[i] if (value >> i) & 1 else ns[i] for i in chunks[ci]])
        return decoded[key]

    by_weight: dict[int, list[int]] = {w: [] for w in range(1, spec.t_correct + 1)}
    per_pos: list[list[int]] = [[] for _ in range(spec.n)]
    odd_one = None
    for value, pos in syndrome_table(spec):
        match = b.and_chain([term(ci, value & sum(1 << i for i in chunk)) for ci, chunk in enumerate(chunks)])
        by_weight[len(pos)].append(match)
        for p in pos:
            per_pos[p].append(match)
        if len(pos) == 2 and odd_one is None:
            odd_one = match
    if mutate == "one-hot":
        if odd_one is None:
            raise ValueError("one-hot mutation needs a code correcting two-bit errors")
        by_weight[1].append(odd_one)

    flags = {w: b.or_tree(by_weight[w]) for w in by_weight}
    matched = b.or_tree([flags[w] for w in flags])
    uncorrectable = b.and_(nonzero, b.not_(matched))
    outputs: dict[str, int] = {"no_err": b.not_(nonzero)}
    for w in range(1, spec.t_detect + 1):
        if w < spec.t_detect:
            outputs[f"err_{w}"] = flags.get(w, b.const(0))
        elif w in flags:
            outputs[f"err_{w}"] = b.or_(flags[w], uncorrectable)
        else:
            outputs[f"err_{w}"] = uncorrectable

    corrected = [b.xor(cw[j], b.or_tree(per_pos[j])) for j in range(spec.n)]
    for name, bit in outputs.items():
        b.output(name, [bit])
    b.output("data_o", [corrected[p] for p in spec.data_positions])
    b.output("ecc_o", [corrected[p] for p in spec.check_positions])
    b.output("syndrome", s)
    return b.build()


def synth_model_encoder(spec: CodeSpec, mutate: str | None = None) -> Circuit:
    """Combinational reference encoder, optionally with one flipped H entry."""
    if mutate is None:
        return synth_encoder(spec)
    if mutate != "h-entry":
        raise ValueError(f"unknown model mutation {mutate!r}")
    from .gf2 import BitMatrix

    H = BitMatrix(tuple(_mutated_h_rows(spec)), spec.n)
    broken = CodeSpec(spec.family, spec.n, spec.k, spec.r, spec.t_correct, spec.t_detect, H)
    if broken.data_positions != spec.data_positions:
        raise ValueError("h-entry mutation moved the data positions")
    return synth_encoder(broken)


# -- pipelining ------------------------------------------------------------------

def _segments(c: Circuit, stages: int) -> list[int]:
    """Stage (1..stages) for each gate, cutting the depth range into equal slices."""
    depth = c.depths()
    dmax = max(depth) if depth else 0
    seg = [0] * len(c.ops)
    for i, op in enumerate(c.ops):
        if op in (Op.NOT, Op.AND, Op.XOR):
            seg[i] = 1 if dmax == 0 else max(1, min(stages, math.ceil(depth[i] * stages / dmax)))
    return seg


def _fsm_registers(b: Builder, stages: int) -> list[int]:
    """One-hot stage counter [IDLE, S1..Sn]; IDLE starts set."""
    return [b.register(1)] + [b.register(0) for _ in range(stages)]


def _fsm_connect(b: Builder, state: list[int], accept: int, rst_n: int) -> None:
    idle, st = state[0], state[1:]
    b.set_next(idle, b.or_(b.not_(rst_n), b.or_(b.and_(idle, b.not_(accept)), st[-1])))
    b.set_next(st[0], b.and_(rst_n, accept))
    for j in range(1, len(st)):
        b.set_next(st[j], b.and_(rst_n, st[j - 1]))


def _pipeline_body(
    b: Builder, c: Circuit, bindings: dict[str, list[int]], stages: int, state: list[int]
) -> dict[str, list[int]]:
    """Copy combinational ``c`` into ``b`` with cut registers between depth slices.

    Inputs come from ``bindings`` (already-captured registers). A value produced
    in stage ``j`` and consumed later is registered once, loading while the
    counter is in ``S_j``.
    """
    if not c.is_combinational:
        raise ValueError("pipeline needs a combinational circuit")
    seg = _segments(c, stages)
    m = [-1] * len(c.ops)
    for name, bits in c.inputs.items():
        for x, s in zip(bits, bindings[name]):
            m[x] = s
    cut: dict[int, int] = {}

    def read(x: int, at: int) -> int:
        if seg[x] == 0 or seg[x] >= at:
            return m[x]
        if x not in cut:
            r = b.register(0)
            b.set_next(r, b.mux(state[seg[x]], m[x], r))
            cut[x] = r
        return cut[x]

    for i, op in enumerate(c.ops):
        if op == Op.CONST0:
            m[i] = b.const(0)
        elif op == Op.CONST1:
            m[i] = b.const(1)
        elif op == Op.NOT:
            m[i] = b.not_(read(c.a[i], seg[i]))
        elif op == Op.AND:
            m[i] = b.and_(read(c.a[i], seg[i]), read(c.b[i], seg[i]))
        elif op == Op.XOR:
            m[i] = b.xor(read(c.a[i], seg[i]), read(c.b[i], seg[i]))
    return {name: [read(x, stages) for x in bits] for name, bits in c.outputs.items()}


def _capture(b: Builder, accept: int, values: Sequence[int]) -> list[int]:
    regs = []
    for v in values:
        r = b.register(0)
        b.set_next(r, b.mux(accept, v, r))
        regs.append(r)
    return regs


def pipeline(c: Circuit, sched: PipelineSchedule | int, prefix: str | None = None) -> Circuit:
    """Sequential version of combinational ``c`` with a start/valid handshake.

    Inputs are captured on an accepted start; the result is valid exactly
    ``latency`` cycles later and holds until the next transaction. The
    latency is the schedule total (or the integer given). Extra stages beyond
    the available gate depth are pass-through.
    """
    stages = sched.total if isinstance(sched, PipelineSchedule) else int(sched)
    if stages < 1:
        raise ValueError("latency must be at least 1")
    if prefix is None:
        prefix = "enc" if "data_i" in c.inputs else "dec"
    b = Builder(f"{c.name}_seq{stages}")
    ins = {name: b.input(name, len(bits)) for name, bits in c.inputs.items()}
    start = b.input(f"{prefix}_start_i", 1)[0]
    rst_n = b.input("rst_n_i", 1)[0]
    state = _fsm_registers(b, stages)
    accept = b.and_(state[0], start)
    _fsm_connect(b, state, accept, rst_n)
    captured = {name: _capture(b, accept, bits) for name, bits in ins.items()}
    outs = _pipeline_body(b, c, captured, stages, state)
    for name, bits in outs.items():
        b.output(name, bits)
    b.output(f"{prefix}_valid_o", [state[-1]])
    b.output(f"{prefix}_state", state)
    return b.build()


def build_sequential_core(
    spec: CodeSpec, sched: PipelineSchedule, decoder: Circuit | None = None
) -> Circuit:
    """Encoder and decoder pipelines sharing one captured-codeword register.

    The encoder captures data into the data positions of the shared register,
    the decoder captures the received codeword. Each lane only accepts a
    start while its own counter and the other lane's counter read IDLE, and a
    simultaneous encoder start wins.
    """
    enc = synth_encoder(spec)
    dec = decoder if decoder is not None else synth_decoder(spec)
    b = Builder(f"core_{spec.family}_{spec.n}_{spec.k}")
    data = b.input("data_i", spec.k)
    cw_in = b.input("cw_i", spec.n)
    enc_start = b.input("enc_start_i", 1)[0]
    dec_start = b.input("dec_start_i", 1)[0]
    rst_n = b.input("rst_n_i", 1)[0]

    enc_state = _fsm_registers(b, sched.encode_cycles)
    dec_state = _fsm_registers(b, sched.decode_cycles)
    enc_accept = b.and_tree([enc_state[0], enc_start, dec_state[0]])
    dec_accept = b.and_tree([dec_state[0], dec_start, enc_state[0], b.not_(enc_start)])
    _fsm_connect(b, enc_state, enc_accept, rst_n)
    _fsm_connect(b, dec_state, dec_accept, rst_n)

    by_pos = [b.const(0)] * spec.n
    for j, p in enumerate(spec.data_positions):
        by_pos[p] = data[j]
    shared = []
    for p in range(spec.n):
        r = b.register(0)
        b.set_next(r, b.mux(enc_accept, by_pos[p], b.mux(dec_accept, cw_in[p], r)))
        shared.append(r)

    enc_out = _pipeline_body(
        b, enc, {"data_i": [shared[p] for p in spec.data_positions]}, sched.encode_cycles, enc_state
    )
    dec_out = _pipeline_body(b, dec, {"cw_i": shared}, sched.decode_cycles, dec_state)
    b.output("cw_o", enc_out["cw_o"])
    for name in flag_names(spec) + ["data_o", "ecc_o"]:
        b.output(name, dec_out[name])
    b.output("enc_valid_o", [enc_state[-1]])
    b.output("dec_valid_o", [dec_state[-1]])
    b.output("enc_state", enc_state)
    b.output("dec_state", dec_state)
    return b.build()


# -- formal harnesses ------------------------------------------------------------

def build_wrapper(enc: Circuit, dec: Circuit) -> Circuit:
    """Side-by-side encoder and decoder with the storage between them removed.

    The decoder's codeword input is a free primary input; any relation to the
    encoder output is stated by properties.
    """
    if len(enc.inputs.get("data_i", [])) == 0 or "cw_o" not in enc.outputs or "cw_i" not in dec.inputs:
        raise ValueError("wrapper needs an encoder (data_i -> cw_o) and a decoder (cw_i -> ...)")
    if len(enc.outputs["cw_o"]) != len(dec.inputs["cw_i"]):
        raise ValueError(
            f"codeword width mismatch: encoder {len(enc.outputs['cw_o'])}, decoder {len(dec.inputs['cw_i'])}"
        )
    if "data_o" in dec.outputs and len(dec.outputs["data_o"]) != len(enc.inputs["data_i"]):
        raise ValueError("data width mismatch between encoder and decoder")
    b = Builder("wrapper")
    bindings = {}
    for c in (enc, dec):
        for name, bits in c.inputs.items():
            bindings.setdefault(name, b.input(name, len(bits)))
    for c in (enc, dec):
        outs = b.instantiate(c, {name: bindings[name] for name in c.inputs})
        for name, bits in outs.items():
            b.output(name, bits)
    return b.build()


def state_names(stage_bits: int, width: int) -> str:
    """Human-readable name of a one-hot stage counter value."""
    if stage_bits == 1:
        return "IDLE"
    set_bits = [i for i in range(width) if (stage_bits >> i) & 1]
    if len(set_bits) == 1:
        return f"S{set_bits[0]}"
    labels = ["IDLE" if i == 0 else f"S{i}" for i in set_bits]
    return "ILLEGAL{" + ",".join(labels) + "}" if labels else "ILLEGAL{}"
