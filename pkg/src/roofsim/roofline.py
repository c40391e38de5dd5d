"""Per-phase roofline timing: step latency, TTFT, completion, throughput.

A phase estimate decomposes one step into compute, memory, and network
components. Compute and memory overlap (the step takes their max);
network is additive on top unless an overlap factor claims part of it
back. Decode timing sums the per-token step time over the growing
context exactly; there is no endpoint approximation anywhere.

All byte and FLOP quantities are per chip of a tp x pp x ep replica;
data-parallel replicas are identical, so one replica's timing is the
system's timing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

from . import kernels, workload
from .catalog import MemoryDeviceSpec, NodeSpec
from .topology import CollectiveKind, Topology, collective_time, message_time
from .workload import DataClass, ModelSpec, Phase, RequestSpec


class PlacementError(ValueError):
    """Placement map is missing a required data class or names no tier."""


class Bottleneck(enum.Enum):
    COMPUTE = "Compute"
    MEMORY_BANDWIDTH = "MemoryBandwidth"
    INTERCONNECT = "Interconnect"


@dataclass(frozen=True)
class Utilization:
    """Achieved fractions of peak, exposed per scenario.

    Defaults follow the usual serving experience: prefill compute runs
    at MFU-ish 0.6, decode memory streams near 0.8 of peak bandwidth.
    ``network_overlap`` is the fraction of network time hidden behind
    compute/memory; 0 means fully exposed.
    """
    prefill_compute: float = 0.6
    decode_compute: float = 0.6
    memory: float = 0.8
    network_overlap: float = 0.0

    def __post_init__(self):
        for name in ("prefill_compute", "decode_compute", "memory"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if not 0.0 <= self.network_overlap <= 1.0:
            raise ValueError("network_overlap must be in [0, 1]")


@dataclass(frozen=True)
class PhaseEstimate:
    """Roofline decomposition of one step (a decode token or the whole
    prefill pass), per chip."""
    phase: Phase
    context_len: int
    compute_time: float
    memory_time: float
    network_time: float          # post-overlap, additive
    step_time: float             # max(compute, memory) + network
    flops: float                 # per chip, at raw counts (no utilization)
    memory_bytes: float          # per chip, reads + writes across tiers
    arithmetic_intensity: float  # FLOP / byte
    bottleneck: Bottleneck
    tier_bytes: Mapping[str, float]


@dataclass(frozen=True)
class ScenarioTiming:
    """End-to-end timing of one serving scenario on one replica."""
    ttft: float
    time_to_completion: float
    decode_tokens_per_second: float   # per replica; 0 when nothing decodes
    energy_per_token: float           # joules per generated token; 0 idem
    prefill: PhaseEstimate
    last_decode: PhaseEstimate | None
    decode_time: float
    generated_tokens: int


@dataclass(frozen=True)
class BottleneckRow:
    """Hardware-pressure summary row: cells are "✓", "?", or ""."""
    label: Bottleneck
    compute: str
    memory_capacity: str
    memory_bandwidth: str
    interconnect: str


def attainable_flops(ai: float, peak_flops: float, bw: float) -> float:
    """Roofline ceiling at arithmetic intensity ``ai``: bandwidth-bound
    below the ridge point, flat at peak above it."""
    if ai < 0:
        raise ValueError("arithmetic intensity must be >= 0")
    return min(peak_flops, ai * bw)


def effective_read_bw(dev: MemoryDeviceSpec, avg_request_bytes: float) -> float:
    """Read bandwidth after the small-read penalty: a request occupies the
    device for its size rounded up to the read granularity."""
    if avg_request_bytes <= 0:
        raise ValueError("avg_request_bytes must be positive")
    g = dev.read_granularity_bytes
    occupied = math.ceil(avg_request_bytes / g) * g
    # ratio first: ratio <= 1.0 exactly, so the product never rounds
    # above read_bw
    return dev.read_bw * (avg_request_bytes / occupied)


def _bottleneck(compute: float, mem: float, net: float) -> Bottleneck:
    # network is a bottleneck only when it beats both others; at the
    # compute/memory tie, memory is the conservative call
    if net > max(compute, mem):
        return Bottleneck.INTERCONNECT
    if compute > mem:
        return Bottleneck.COMPUTE
    return Bottleneck.MEMORY_BANDWIDTH


def _required_tier(node: NodeSpec, placement: Mapping[DataClass, str],
                   cls: DataClass) -> tuple[MemoryDeviceSpec, int]:
    if cls not in placement:
        raise PlacementError(f"placement missing {cls.value}")
    try:
        return node.tier(placement[cls])
    except KeyError as e:
        raise PlacementError(str(e)) from e


def _check_shard(m: ModelSpec, tp: int, pp: int, ep: int, dp: int,
                 topo: Topology | None) -> int:
    for name, v in (("tp", tp), ("pp", pp), ("ep", ep), ("dp", dp)):
        if v < 1:
            raise ValueError(f"{name} must be >= 1")
    if ep > 1 and m.moe is None:
        raise ValueError("ep > 1 requires an MoE model")
    width = tp * pp * ep
    if width > 1 and topo is None:
        raise ValueError("a topology is required when tp*pp*ep > 1")
    return width


def _kv_record_bytes(m: ModelSpec, tp: int) -> int:
    # one read request fetches one token's K (or V) slice for the local
    # heads of one layer
    local_heads = math.ceil(m.n_kv_heads / min(tp, m.n_kv_heads))
    return local_heads * m.d_head * m.dtype_bytes


def _weight_read_bytes(m: ModelSpec, tokens: int, tp: int, pp: int,
                       ep: int) -> float:
    """Weights streamed once per step, per chip. Routed experts count
    only the distinct experts the step's tokens touch."""
    dense = workload.dense_active_weight_bytes(m) / (tp * pp)
    experts = (m.layers * workload.active_expert_count(m, tokens)
               * workload.expert_weight_bytes(m)) / (tp * pp * ep)
    return dense + experts


def _network_time(m: ModelSpec, tokens_per_seq: int, batch_r: int,
                  tp: int, pp: int, ep: int, topo: Topology | None,
                  width: int, moe_skew: float, overlap: float) -> float:
    if topo is None or width == 1:
        return 0.0
    act = batch_r * tokens_per_seq * m.d_model * m.dtype_bytes
    t = 0.0
    if tp > 1:
        # one reduction after attention and one after the FFN, per layer
        t += 2 * m.layers * collective_time(
            topo, CollectiveKind.ALL_REDUCE, act, tp, system_n=width)
    if ep > 1 and m.moe is not None:
        routed = act * m.moe.top_k
        t += collective_time(topo, CollectiveKind.MOE_DISPATCH, routed, ep,
                             moe_skew=moe_skew, system_n=width)
        t += collective_time(topo, CollectiveKind.MOE_COLLECT, routed, ep,
                             moe_skew=moe_skew, system_n=width)
    if pp > 1:
        t += (pp - 1) * message_time(topo, act, width)
    return t * (1.0 - overlap)


@dataclass(frozen=True)
class _DecodeAffine:
    """Per-chip decode step model, affine in the context length.

    compute_time(ctx) = comp_a + comp_b*ctx, memory_time(ctx) = mem_a +
    mem_b*ctx, network constant. The same coefficients drive both the
    single-step estimate and the exact multi-step summation, so the two
    agree bit for bit.
    """
    comp_a: float
    comp_b: float
    mem_a: float
    mem_b: float
    net: float
    flops_a: float    # raw FLOP at ctx = 0, per chip
    flops_b: float    # raw FLOP per unit context
    weight_bytes: float
    kv_bytes_per_ctx: float
    weights_tier: str
    kv_tier: str


def _decode_affine(m: ModelSpec, r: RequestSpec, node: NodeSpec,
                   placement: Mapping[DataClass, str], *,
                   tp: int, pp: int, ep: int, dp: int,
                   topology: Topology | None, util: Utilization,
                   moe_skew: float) -> _DecodeAffine:
    width = _check_shard(m, tp, pp, ep, dp, topology)
    batch_r = math.ceil(r.batch / dp)

    w_dev, w_count = _required_tier(node, placement, DataClass.WEIGHTS)
    kv_dev, kv_count = _required_tier(node, placement, DataClass.KV_CACHE)

    peak = node.peak_flops * util.decode_compute
    mult = r.modality_flops_multiplier
    active = workload.active_params_per_token(m)
    flops_a = 2.0 * active * batch_r * mult / width
    flops_b = 0.0 if r.compute_only else (
        4.0 * m.layers * m.n_kv_heads * m.d_head * batch_r * mult / width)

    w_bytes = _weight_read_bytes(m, batch_r, tp, pp, ep)
    w_bw = w_dev.read_bw * w_count * util.memory
    mem_a = w_bytes / w_bw

    if r.compute_only:
        kv_coef, mem_b = 0.0, 0.0
    else:
        kv_shard = min(tp, m.n_kv_heads) * pp * ep
        kv_coef = batch_r * workload.kv_bytes_per_token(m) / kv_shard
        kv_bw = (effective_read_bw(kv_dev, _kv_record_bytes(m, tp))
                 * kv_count * util.memory)
        mem_b = kv_coef / kv_bw

    net = _network_time(m, 1, batch_r, tp, pp, ep, topology, width,
                        moe_skew, util.network_overlap)
    return _DecodeAffine(flops_a / peak, flops_b / peak, mem_a, mem_b, net,
                         flops_a, flops_b, w_bytes, kv_coef,
                         w_dev.name, kv_dev.name)


def _estimate_from_affine(a: _DecodeAffine, context_len: int) -> PhaseEstimate:
    ctx = float(context_len)
    compute = a.comp_a + a.comp_b * ctx
    mem = a.mem_a + a.mem_b * ctx
    step = max(compute, mem) + a.net
    flops = a.flops_a + a.flops_b * ctx
    kv_bytes = a.kv_bytes_per_ctx * ctx
    total_bytes = a.weight_bytes + kv_bytes
    tiers: dict[str, float] = {a.weights_tier: a.weight_bytes}
    tiers[a.kv_tier] = tiers.get(a.kv_tier, 0.0) + kv_bytes
    return PhaseEstimate(
        phase=Phase.DECODE_STEP, context_len=context_len,
        compute_time=compute, memory_time=mem, network_time=a.net,
        step_time=step, flops=flops, memory_bytes=total_bytes,
        arithmetic_intensity=flops / total_bytes,
        bottleneck=_bottleneck(compute, mem, a.net), tier_bytes=tiers)


def decode_step(m: ModelSpec, r: RequestSpec, node: NodeSpec,
                placement: Mapping[DataClass, str], context_len: int, *,
                tp: int = 1, pp: int = 1, ep: int = 1, dp: int = 1,
                topology: Topology | None = None,
                util: Utilization = Utilization(),
                moe_skew: float = 1.0) -> PhaseEstimate:
    """One autoregressive step at a given context length.

    Weights stream once and amortize over the batch; the KV cache is
    re-read in full for every sequence (no attention sparsity), at the
    per-token record size, which is what makes small-granularity tiers
    honest about small reads.
    """
    if context_len < 1:
        raise ValueError("context_len must be >= 1")
    a = _decode_affine(m, r, node, placement, tp=tp, pp=pp, ep=ep, dp=dp,
                       topology=topology, util=util, moe_skew=moe_skew)
    return _estimate_from_affine(a, context_len)


def prefill(m: ModelSpec, r: RequestSpec, node: NodeSpec,
            placement: Mapping[DataClass, str], *,
            tp: int = 1, pp: int = 1, ep: int = 1, dp: int = 1,
            topology: Topology | None = None,
            util: Utilization = Utilization(),
            moe_skew: float = 1.0) -> PhaseEstimate:
    """The parallel prompt pass: all input tokens at once.

    KV is written, not read; retrieved context (if any) is read once
    from its tier. Weights stream once for the whole pass, which is why
    prefill is usually compute bound at long inputs.
    """
    width = _check_shard(m, tp, pp, ep, dp, topology)
    batch_r = math.ceil(r.batch / dp)
    tokens = r.input_len

    w_dev, w_count = _required_tier(node, placement, DataClass.WEIGHTS)
    kv_dev, kv_count = _required_tier(node, placement, DataClass.KV_CACHE)

    flops_chip = workload.flops(
        m, Phase.PREFILL, tokens, tokens, batch_r,
        r.modality_flops_multiplier, r.compute_only) / width
    compute = flops_chip / (node.peak_flops * util.prefill_compute)

    tiers: dict[str, float] = {}
    w_bytes = _weight_read_bytes(m, batch_r * tokens, tp, pp, ep)
    tiers[w_dev.name] = w_bytes
    mem = w_bytes / (w_dev.read_bw * w_count * util.memory)

    kv_write = 0.0
    if not r.compute_only:
        kv_shard = min(tp, m.n_kv_heads) * pp * ep
        kv_write = (batch_r * tokens * workload.kv_bytes_per_token(m)
                    / kv_shard)
        if kv_write > 0 and kv_dev.write_bw <= 0:
            raise PlacementError(
                f"tier {kv_dev.name!r} cannot accept kv_cache writes")
        mem += kv_write / (kv_dev.write_bw * kv_count * util.memory)
        tiers[kv_dev.name] = tiers.get(kv_dev.name, 0.0) + kv_write

    rag_bytes = 0.0
    if r.rag_corpus_bytes:
        sc_dev, sc_count = _required_tier(node, placement,
                                          DataClass.SLOW_CONTEXT)
        rag_bytes = batch_r * r.rag_corpus_bytes / width
        mem += rag_bytes / (sc_dev.read_bw * sc_count * util.memory)
        tiers[sc_dev.name] = tiers.get(sc_dev.name, 0.0) + rag_bytes

    net = _network_time(m, tokens, batch_r, tp, pp, ep, topology, width,
                        moe_skew, util.network_overlap)
    step = max(compute, mem) + net
    total_bytes = w_bytes + kv_write + rag_bytes
    return PhaseEstimate(
        phase=Phase.PREFILL, context_len=tokens, compute_time=compute,
        memory_time=mem, network_time=net, step_time=step,
        flops=flops_chip, memory_bytes=total_bytes,
        arithmetic_intensity=flops_chip / total_bytes,
        bottleneck=_bottleneck(compute, mem, net), tier_bytes=tiers)


def scenario_timing(m: ModelSpec, r: RequestSpec, node: NodeSpec,
                    placement: Mapping[DataClass, str], *,
                    tp: int = 1, pp: int = 1, ep: int = 1, dp: int = 1,
                    topology: Topology | None = None,
                    util: Utilization = Utilization(),
                    moe_skew: float = 1.0) -> ScenarioTiming:
    """TTFT and time-to-completion by exact per-token summation.

    Thought tokens are generated before the first visible token, so they
    land in TTFT; each generated token (thought or output) advances the
    context by one and makes the next step a little slower.
    """
    pre = prefill(m, r, node, placement, tp=tp, pp=pp, ep=ep, dp=dp,
                  topology=topology, util=util, moe_skew=moe_skew)
    gen = r.generated_len
    if gen == 0:
        return ScenarioTiming(
            ttft=pre.step_time, time_to_completion=pre.step_time,
            decode_tokens_per_second=0.0, energy_per_token=0.0,
            prefill=pre, last_decode=None, decode_time=0.0,
            generated_tokens=0)

    a = _decode_affine(m, r, node, placement, tp=tp, pp=pp, ep=ep, dp=dp,
                       topology=topology, util=util, moe_skew=moe_skew)
    args = (a.comp_a, a.comp_b, a.mem_a, a.mem_b, a.net)
    thought_time = kernels.decode_time_sum(r.input_len, r.thought_len, *args)
    decode_total = kernels.decode_time_sum(r.input_len, gen, *args)

    ttft = pre.step_time + thought_time
    ttc = pre.step_time + decode_total
    batch_r = math.ceil(r.batch / dp)
    rate = batch_r * gen / decode_total if decode_total > 0 else 0.0
    width = tp * pp * ep
    energy = (width * node.total_power_watts / rate) if rate > 0 else 0.0
    return ScenarioTiming(
        ttft=ttft, time_to_completion=ttc,
        decode_tokens_per_second=rate, energy_per_token=energy,
        prefill=pre, last_decode=_estimate_from_affine(a, r.total_len - 1),
        decode_time=decode_total, generated_tokens=gen)


def classify(est: PhaseEstimate, *, capacity_pressure: bool = False,
             soft_interconnect: bool = False) -> BottleneckRow:
    """Pressure-summary row for one estimate.

    Interconnect gets a hard "✓" only when it is the bottleneck; network
    above 10% of the step, or a workload kind whose interconnect story
    is plausible but unproven, earns a derived "?". Capacity pressure is
    a placement/feasibility fact supplied by the caller.
    """
    label = est.bottleneck
    if label is Bottleneck.INTERCONNECT:
        inter = "✓"
    elif (est.step_time > 0 and est.network_time > 0.1 * est.step_time) \
            or soft_interconnect:
        inter = "?"
    else:
        inter = ""
    return BottleneckRow(
        label=label,
        compute="✓" if label is Bottleneck.COMPUTE else "",
        memory_capacity="✓" if capacity_pressure else "",
        memory_bandwidth="✓" if label is Bottleneck.MEMORY_BANDWIDTH else "",
        interconnect=inter)
