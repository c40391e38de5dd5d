"""Transformer workload accounting: weights, KV cache, FLOPs, memory demand.

Counting conventions:
  - Parameters are matrix entries; embeddings are vocab x d_model and are
    excluded from active (per-token) parameters.
  - Attention projections use grouped-query shapes: Q and O carry
    n_heads x d_head, K and V carry n_kv_heads x d_head.
  - A gated FFN holds 3 d_model x ffn_dim matrices, a plain one holds 2.
  - FLOPs are 2 per parameter per token plus attention score/value math at
    4 x layers x n_kv_heads x d_head per token of context.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

MAX_BYTES = 2**63

# Working-set multiplier for resident activations (estimate, not measured):
# a handful of d_model-wide buffers per in-flight token.
ACTIVATION_MULTIPLIER = 8


class ModelTooLargeError(ValueError):
    """Byte counts would exceed 2^63; almost certainly a misconfiguration."""


class DataClass(enum.Enum):
    """What a byte in memory is for. Placement maps key on this."""
    WEIGHTS = "weights"
    KV_CACHE = "kv_cache"
    SLOW_CONTEXT = "slow_context"
    ACTIVATIONS = "activations"


class Phase(enum.Enum):
    PREFILL = "prefill"
    DECODE_STEP = "decode_step"


@dataclass(frozen=True)
class MoeSpec:
    """Mixture-of-experts FFN: routed experts plus an always-on shared FFN.

    ``shared_ffn_dim`` may be zero for models without a shared expert.
    """
    n_experts: int
    top_k: int
    shared_ffn_dim: int = 0

    def __post_init__(self):
        if self.n_experts < 1:
            raise ValueError("n_experts must be >= 1")
        if not 1 <= self.top_k <= self.n_experts:
            raise ValueError(
                f"top_k must be in [1, n_experts], got {self.top_k}")
        if self.shared_ffn_dim < 0:
            raise ValueError("shared_ffn_dim must be >= 0")


@dataclass(frozen=True)
class ModelSpec:
    layers: int
    d_model: int
    n_heads: int
    d_head: int
    ffn_dim: int
    vocab: int
    n_kv_heads: int = 0           # 0 means n_heads (no grouping)
    dtype_bytes: int = 2
    gated_ffn: bool = True
    moe: MoeSpec | None = None

    def __post_init__(self):
        if self.n_kv_heads == 0:
            object.__setattr__(self, "n_kv_heads", self.n_heads)
        for name in ("layers", "d_model", "n_heads", "d_head", "ffn_dim",
                     "vocab", "n_kv_heads", "dtype_bytes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_heads % self.n_kv_heads != 0:
            raise ValueError("n_kv_heads must divide n_heads")


@dataclass(frozen=True)
class RequestSpec:
    """One serving scenario: sequence shape, batch, and workload flavor.

    ``thought_len`` tokens are generated before the first visible output
    token, so they count toward time-to-first-token. ``compute_only``
    marks non-attention workloads that keep no KV state.
    """
    input_len: int
    output_len: int
    thought_len: int = 0
    batch: int = 1
    rag_corpus_bytes: int = 0
    modality_flops_multiplier: float = 1.0
    compute_only: bool = False

    def __post_init__(self):
        if self.input_len < 1:
            raise ValueError("input_len must be >= 1")
        if self.output_len < 0 or self.thought_len < 0:
            raise ValueError("output_len and thought_len must be >= 0")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")
        if self.rag_corpus_bytes < 0:
            raise ValueError("rag_corpus_bytes must be >= 0")
        if self.modality_flops_multiplier < 1.0:
            raise ValueError("modality_flops_multiplier must be >= 1")

    @property
    def generated_len(self) -> int:
        return self.thought_len + self.output_len

    @property
    def total_len(self) -> int:
        return self.input_len + self.generated_len


def _ffn_params(m: ModelSpec, dim: int) -> int:
    return (3 if m.gated_ffn else 2) * m.d_model * dim


def _attn_params_per_layer(m: ModelSpec) -> int:
    q_and_o = 2 * m.d_model * m.n_heads * m.d_head
    k_and_v = 2 * m.d_model * m.n_kv_heads * m.d_head
    return q_and_o + k_and_v


def _ffn_params_per_layer(m: ModelSpec) -> int:
    if m.moe is None:
        return _ffn_params(m, m.ffn_dim)
    total = m.moe.n_experts * _ffn_params(m, m.ffn_dim)
    if m.moe.shared_ffn_dim:
        total += _ffn_params(m, m.moe.shared_ffn_dim)
    return total


def expert_params(m: ModelSpec) -> int:
    """Parameters of one routed expert (0 for dense models)."""
    return _ffn_params(m, m.ffn_dim) if m.moe is not None else 0


def total_params(m: ModelSpec) -> int:
    """All stored parameters, embeddings included."""
    return m.vocab * m.d_model + m.layers * (
        _attn_params_per_layer(m) + _ffn_params_per_layer(m))


def weight_bytes(m: ModelSpec) -> int:
    """Bytes of stored weights at the model dtype."""
    b = total_params(m) * m.dtype_bytes
    if b > MAX_BYTES:
        raise ModelTooLargeError(f"weights need {b} bytes, over 2^63")
    return b


def active_params_per_token(m: ModelSpec) -> int:
    """Non-embedding parameters touched by one token: attention plus the
    dense FFN, or for MoE the shared FFN plus top_k routed experts."""
    if m.moe is None:
        ffn = _ffn_params(m, m.ffn_dim)
    else:
        ffn = m.moe.top_k * _ffn_params(m, m.ffn_dim)
        if m.moe.shared_ffn_dim:
            ffn += _ffn_params(m, m.moe.shared_ffn_dim)
    return m.layers * (_attn_params_per_layer(m) + ffn)


def kv_bytes_per_token(m: ModelSpec) -> int:
    """KV cache bytes appended per token: K and V per layer per KV head."""
    return 2 * m.layers * m.n_kv_heads * m.d_head * m.dtype_bytes


def dense_active_weight_bytes(m: ModelSpec) -> int:
    """Bytes of always-streamed weights per step: attention projections
    plus the dense FFN (or the shared FFN for MoE). Routed experts are
    accounted separately because batching changes how many are touched."""
    if m.moe is None:
        ffn = _ffn_params(m, m.ffn_dim)
    else:
        ffn = _ffn_params(m, m.moe.shared_ffn_dim) if m.moe.shared_ffn_dim \
            else 0
    return m.layers * (_attn_params_per_layer(m) + ffn) * m.dtype_bytes


def expert_weight_bytes(m: ModelSpec) -> int:
    """Bytes of one routed expert in one layer (0 for dense models)."""
    return expert_params(m) * m.dtype_bytes


def active_expert_count(m: ModelSpec, tokens: int) -> int:
    """Distinct routed experts read per layer when ``tokens`` route
    independently: capped by the expert count, so large batches touch
    every expert while batch 1 touches top_k."""
    if m.moe is None:
        return 0
    if tokens < 1:
        raise ValueError("tokens must be >= 1")
    return min(m.moe.n_experts, tokens * m.moe.top_k)


def flops(m: ModelSpec, phase: Phase, context_len: int, tokens: int,
          batch: int = 1, modality_flops_multiplier: float = 1.0,
          compute_only: bool = False) -> float:
    """FLOPs to process ``tokens`` per sequence at a given context length.

    A decode step processes exactly one token per sequence; prefill
    processes the whole prompt, whose tokens are part of the context.
    ``compute_only`` drops the context-dependent attention term (the
    stand-in for stateless feed-forward workloads).
    """
    if tokens < 1 or context_len < 1 or batch < 1:
        raise ValueError("tokens, context_len, and batch must be >= 1")
    if phase is Phase.DECODE_STEP and tokens != 1:
        raise ValueError("a decode step processes one token per sequence")
    if phase is Phase.PREFILL and context_len < tokens:
        raise ValueError("prefill context must include the processed tokens")
    projection = 2 * active_params_per_token(m) * tokens
    attention = 0 if compute_only else (
        4 * m.layers * m.n_kv_heads * m.d_head * context_len * tokens)
    return float((projection + attention) * batch) * modality_flops_multiplier


def memory_demand(m: ModelSpec, r: RequestSpec) -> dict[DataClass, int]:
    """Peak resident bytes per data class for a request, unsharded.

    KV cache is sized for the full sequence (input, thought, and output
    tokens all stay resident until completion). Compute-only workloads
    keep no KV state.
    """
    kv = 0 if r.compute_only else (
        kv_bytes_per_token(m) * r.total_len * r.batch)
    demand = {
        DataClass.WEIGHTS: weight_bytes(m),
        DataClass.KV_CACHE: kv,
        DataClass.SLOW_CONTEXT: r.rag_corpus_bytes,
        DataClass.ACTIVATIONS:
            r.batch * m.d_model * m.dtype_bytes * ACTIVATION_MULTIPLIER,
    }
    for k, v in demand.items():
        if v > MAX_BYTES:
            raise ModelTooLargeError(f"{k.value} needs {v} bytes, over 2^63")
    return demand
