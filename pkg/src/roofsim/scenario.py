"""Scenario configs in, deterministic reports out.

A scenario is one JSON document naming the model, the request shape, a
node (by catalog name or inline), an optional interconnect, and either
an explicit sharding plan or an explore block. The report is a pure
function of (config, catalog, version): floats are rounded to 6
significant digits and byte/count fields stay integers, so identical
inputs render byte-identical JSON.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping, Sequence

from . import __version__, sharding, workload
from .catalog import (Catalog, CatalogError, NodeSpec, builtin_catalog,
                      load_catalog, _parse_node)
from .costs import CostModel, CostReport, SystemSpec, ratio_metrics
from .roofline import (Bottleneck, BottleneckRow, PhaseEstimate,
                       ScenarioTiming, Utilization, classify,
                       scenario_timing)
from .sharding import (DEFAULT_OBJECTIVES, FeasibilityReport, PlanEvaluation,
                       ShardingPlan, Unsatisfiable, ViolationKind,
                       check_feasible, comm_volume_per_step, explore,
                       per_chip_demand)
from .topology import Topology, TopologyKind
from .workload import DataClass, ModelSpec, MoeSpec, RequestSpec

GB = 10**9

# a prompt this long is its own workload class for bottleneck flagging
LONG_CONTEXT_TOKENS = 32768

# fraction of a tier that counts as capacity pressure even when feasible
CAPACITY_PRESSURE_FRACTION = 0.9


class ConfigError(ValueError):
    """Bad scenario config; message starts with the offending field path."""

    def __init__(self, path: str, msg: str):
        self.path = path
        super().__init__(f"{path}: {msg}")


@dataclass(frozen=True)
class ExploreSpec:
    budget: int
    objectives: tuple[str, ...] = DEFAULT_OBJECTIVES
    placement: Mapping[DataClass, str] | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    model: ModelSpec
    request: RequestSpec
    node: NodeSpec
    plan: ShardingPlan | None
    explore: ExploreSpec | None
    topology: Topology | None = None
    cost_model: CostModel = CostModel()
    utilization: Utilization = Utilization()
    moe_skew: float = 1.0
    shared_context: bool = False
    catalog: Catalog = field(default_factory=builtin_catalog)


# ---------------------------------------------------------------- parsing

_TOP_KEYS = {"model", "request", "node", "topology", "sharding",
             "cost_model", "utilization", "moe_skew", "shared_context",
             "catalog"}


def _obj(doc: Mapping, key: str, path: str, required: bool = True):
    if key not in doc:
        if required:
            raise ConfigError(f"{path}{key}", "missing required block")
        return None
    v = doc[key]
    if not isinstance(v, dict):
        raise ConfigError(f"{path}{key}", "expected an object")
    return v


def _num(doc: Mapping, key: str, path: str, default=None, required=False):
    if key not in doc:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", "expected a number")
    return v


def _int(doc: Mapping, key: str, path: str, default=None, required=False):
    v = _num(doc, key, path, default, required)
    if v is None:
        return None
    if v != int(v):
        raise ConfigError(f"{path}.{key}", "expected an integer")
    return int(v)


def _bool(doc: Mapping, key: str, path: str, default=False):
    v = doc.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError(f"{path}.{key}", "expected a boolean")
    return v


def _check_keys(doc: Mapping, allowed: set, path: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(path, f"unknown keys {sorted(unknown)}")


def _parse_model(doc: Mapping) -> ModelSpec:
    _check_keys(doc, {"layers", "d_model", "n_heads", "d_head", "ffn_dim",
                      "vocab", "n_kv_heads", "dtype_bytes", "gated_ffn",
                      "moe"}, "model")
    moe = None
    if doc.get("moe") is not None:
        mdoc = _obj(doc, "moe", "model.")
        _check_keys(mdoc, {"n_experts", "top_k", "shared_ffn_dim"},
                    "model.moe")
        try:
            moe = MoeSpec(
                n_experts=_int(mdoc, "n_experts", "model.moe", required=True),
                top_k=_int(mdoc, "top_k", "model.moe", required=True),
                shared_ffn_dim=_int(mdoc, "shared_ffn_dim", "model.moe", 0))
        except ValueError as e:
            raise ConfigError("model.moe", str(e)) from None
    try:
        return ModelSpec(
            layers=_int(doc, "layers", "model", required=True),
            d_model=_int(doc, "d_model", "model", required=True),
            n_heads=_int(doc, "n_heads", "model", required=True),
            d_head=_int(doc, "d_head", "model", required=True),
            ffn_dim=_int(doc, "ffn_dim", "model", required=True),
            vocab=_int(doc, "vocab", "model", required=True),
            n_kv_heads=_int(doc, "n_kv_heads", "model", 0),
            dtype_bytes=_int(doc, "dtype_bytes", "model", 2),
            gated_ffn=_bool(doc, "gated_ffn", "model", True),
            moe=moe)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("model", str(e)) from None


def _parse_request(doc: Mapping) -> RequestSpec:
    _check_keys(doc, {"input_len", "output_len", "thought_len", "batch",
                      "rag_corpus_bytes", "modality_flops_multiplier",
                      "compute_only"}, "request")
    try:
        return RequestSpec(
            input_len=_int(doc, "input_len", "request", required=True),
            output_len=_int(doc, "output_len", "request", required=True),
            thought_len=_int(doc, "thought_len", "request", 0),
            batch=_int(doc, "batch", "request", 1),
            rag_corpus_bytes=_int(doc, "rag_corpus_bytes", "request", 0),
            modality_flops_multiplier=_num(
                doc, "modality_flops_multiplier", "request", 1.0),
            compute_only=_bool(doc, "compute_only", "request"))
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("request", str(e)) from None


def _parse_topology(doc: Mapping) -> Topology:
    _check_keys(doc, {"kind", "link_bw_gbps", "per_hop_latency_ns",
                      "per_message_overhead_us", "in_network",
                      "dims", "fanout", "groups", "per_group",
                      "overhead_scale"}, "topology")
    kind_raw = doc.get("kind")
    try:
        kind = TopologyKind(kind_raw)
    except ValueError:
        raise ConfigError("topology.kind", f"expected one of "
                          f"{[k.value for k in TopologyKind]}, "
                          f"got {kind_raw!r}") from None
    dims = doc.get("dims", [])
    if not isinstance(dims, list) or any(
            isinstance(d, bool) or not isinstance(d, int) for d in dims):
        raise ConfigError("topology.dims", "expected an array of integers")
    kwargs: dict[str, Any] = dict(
        kind=kind,
        link_bw=_num(doc, "link_bw_gbps", "topology", required=True) * GB,
        in_network_collectives=_bool(doc, "in_network", "topology"),
        dims=tuple(dims),
        fanout=_int(doc, "fanout", "topology", 0),
        groups=_int(doc, "groups", "topology", 0),
        per_group=_int(doc, "per_group", "topology", 0),
        overhead_scale=_num(doc, "overhead_scale", "topology", 1.0))
    if "per_hop_latency_ns" in doc:
        kwargs["per_hop_latency"] = _num(
            doc, "per_hop_latency_ns", "topology") * 1e-9
    if "per_message_overhead_us" in doc:
        kwargs["per_message_overhead"] = _num(
            doc, "per_message_overhead_us", "topology") * 1e-6
    try:
        return Topology(**kwargs)
    except ValueError as e:
        raise ConfigError("topology", str(e)) from None


def _parse_placement(doc: Mapping, path: str) -> dict[DataClass, str]:
    placeable = {c.value: c for c in DataClass if c is not DataClass.ACTIVATIONS}
    _check_keys(doc, set(placeable), path)
    out = {}
    for key, cls in placeable.items():
        if key in doc:
            if not isinstance(doc[key], str):
                raise ConfigError(f"{path}.{key}", "expected a tier name")
            out[cls] = doc[key]
    if DataClass.WEIGHTS not in out or DataClass.KV_CACHE not in out:
        raise ConfigError(path, "placement needs weights and kv_cache tiers")
    return out


def _parse_sharding(doc: Mapping) -> tuple[ShardingPlan | None,
                                           ExploreSpec | None]:
    _check_keys(doc, {"plan", "explore"}, "sharding")
    if ("plan" in doc) == ("explore" in doc):
        raise ConfigError(
            "sharding", "exactly one of 'plan' or 'explore' is required")
    if "plan" in doc:
        p = _obj(doc, "plan", "sharding.")
        _check_keys(p, {"tp", "pp", "ep", "dp", "placement"}, "sharding.plan")
        placement = _parse_placement(
            _obj(p, "placement", "sharding.plan."), "sharding.plan.placement")
        try:
            return ShardingPlan(
                tp=_int(p, "tp", "sharding.plan", 1),
                pp=_int(p, "pp", "sharding.plan", 1),
                ep=_int(p, "ep", "sharding.plan", 1),
                dp=_int(p, "dp", "sharding.plan", 1),
                placement=placement), None
        except ValueError as e:
            raise ConfigError("sharding.plan", str(e)) from None
    e = _obj(doc, "explore", "sharding.")
    _check_keys(e, {"budget", "objectives", "placement"}, "sharding.explore")
    objectives = e.get("objectives", list(DEFAULT_OBJECTIVES))
    if not isinstance(objectives, list) or not objectives or any(
            not isinstance(o, str) for o in objectives):
        raise ConfigError("sharding.explore.objectives",
                          "expected a non-empty array of names")
    for o in objectives:
        if o not in sharding.OBJECTIVES:
            raise ConfigError("sharding.explore.objectives",
                              f"unknown objective {o!r}; pick from "
                              f"{sorted(sharding.OBJECTIVES)}")
    placement = None
    if e.get("placement") is not None:
        placement = _parse_placement(
            _obj(e, "placement", "sharding.explore."),
            "sharding.explore.placement")
    budget = _int(e, "budget", "sharding.explore", required=True)
    if budget < 1:
        raise ConfigError("sharding.explore.budget", "must be >= 1")
    return None, ExploreSpec(budget, tuple(objectives), placement)


def _parse_cost_model(doc: Mapping) -> CostModel:
    _check_keys(doc, {"electricity_usd_per_kwh", "pue",
                      "grid_intensity_g_per_kwh", "lifetime_hours",
                      "embodied_kg_per_chip", "embodied_kg_per_memory_gb"},
                "cost_model")
    base = CostModel()
    try:
        return CostModel(*(
            _num(doc, name, "cost_model", getattr(base, name))
            for name in ("electricity_usd_per_kwh", "pue",
                         "grid_intensity_g_per_kwh", "lifetime_hours",
                         "embodied_kg_per_chip", "embodied_kg_per_memory_gb")))
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("cost_model", str(e)) from None


def _parse_utilization(doc: Mapping) -> Utilization:
    _check_keys(doc, {"prefill_compute", "decode_compute", "memory",
                      "network_overlap"}, "utilization")
    base = Utilization()
    try:
        return Utilization(*(
            _num(doc, name, "utilization", getattr(base, name))
            for name in ("prefill_compute", "decode_compute", "memory",
                         "network_overlap")))
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("utilization", str(e)) from None


def parse_config(doc: Mapping | str,
                 catalog: Catalog | None = None) -> ScenarioConfig:
    """Validate a scenario document against the catalog.

    ``catalog`` (or the built-ins) resolves node references; an inline
    ``catalog`` block in the document shadows both.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise ConfigError("$", f"config parse error at line {e.lineno}, "
                              f"column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "config root must be an object")
    _check_keys(doc, _TOP_KEYS, "$")

    if doc.get("catalog") is not None:
        cat_doc = _obj(doc, "catalog", "")
        try:
            catalog = load_catalog(json.dumps(cat_doc))
        except CatalogError as e:
            raise ConfigError("catalog", str(e)) from None
    elif catalog is None:
        catalog = builtin_catalog()

    model = _parse_model(_obj(doc, "model", ""))
    request = _parse_request(_obj(doc, "request", ""))

    node_ref = doc.get("node")
    if isinstance(node_ref, str):
        try:
            node = catalog.node(node_ref)
        except CatalogError as e:
            raise ConfigError("node", str(e)) from None
    elif isinstance(node_ref, dict):
        try:
            node = _parse_node(node_ref, "node", catalog.devices)
        except CatalogError as e:
            raise ConfigError("node", str(e)) from None
    else:
        raise ConfigError("node", "expected a catalog name or an inline "
                          "node object")

    topology = None
    if doc.get("topology") is not None:
        topology = _parse_topology(_obj(doc, "topology", ""))

    plan, explore_spec = _parse_sharding(_obj(doc, "sharding", ""))

    cost_model = CostModel()
    if doc.get("cost_model") is not None:
        cost_model = _parse_cost_model(_obj(doc, "cost_model", ""))
    util = Utilization()
    if doc.get("utilization") is not None:
        util = _parse_utilization(_obj(doc, "utilization", ""))

    moe_skew = _num(doc, "moe_skew", "$", 1.0)
    if moe_skew < 1:
        raise ConfigError("$.moe_skew", "must be >= 1")

    cfg = ScenarioConfig(
        model=model, request=request, node=node,
        plan=plan, explore=explore_spec, topology=topology,
        cost_model=cost_model, utilization=util, moe_skew=moe_skew,
        shared_context=_bool(doc, "shared_context", "$"),
        catalog=catalog)

    if plan is not None and plan.width > 1 and topology is None:
        raise ConfigError("topology",
                          "required when the plan shards across chips")
    for cls, tier in (plan.placement.items() if plan else
                      (explore_spec.placement or {}).items()):
        try:
            node.tier(tier)
        except KeyError:
            raise ConfigError(
                f"sharding placement.{cls.value}",
                f"node {node.name!r} has no tier {tier!r}") from None
    return cfg


# ------------------------------------------------------------- formatting

def _sig(x: float) -> float:
    """6 significant digits; keeps golden output stable across platforms."""
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.6g}")


def _opt_sig(x: float | None) -> float | None:
    return None if x is None else _sig(x)


def config_sha256(doc: Mapping | str) -> str:
    """Hash of the canonicalized config document (whitespace-insensitive)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _estimate_dict(e: PhaseEstimate) -> dict:
    return {
        "phase": e.phase.value,
        "context_len": e.context_len,
        "compute_time_s": _sig(e.compute_time),
        "memory_time_s": _sig(e.memory_time),
        "network_time_s": _sig(e.network_time),
        "step_time_s": _sig(e.step_time),
        "flops": int(round(e.flops)),
        "memory_bytes": int(round(e.memory_bytes)),
        "arithmetic_intensity": _sig(e.arithmetic_intensity),
        "bottleneck": e.bottleneck.value,
        "tier_bytes": {t: int(round(b)) for t, b in sorted(e.tier_bytes.items())},
    }


def _timing_dict(t: ScenarioTiming) -> dict:
    return {
        "ttft_s": _sig(t.ttft),
        "time_to_completion_s": _sig(t.time_to_completion),
        "decode_time_s": _sig(t.decode_time),
        "decode_tokens_per_second": _sig(t.decode_tokens_per_second),
        "energy_per_token_j": _sig(t.energy_per_token),
        "generated_tokens": t.generated_tokens,
    }


def _cost_dict(c: CostReport) -> dict:
    return {
        "system_power_w": _sig(c.system_power_watts),
        "tco_rate_usd_per_hour": _sig(c.tco_rate),
        "tokens_per_usd": _opt_sig(c.tokens_per_usd),
        "tokens_per_joule": _opt_sig(c.tokens_per_joule),
        "co2e_per_token_g": _opt_sig(c.co2e_per_token),
    }


def _plan_dict(p: ShardingPlan) -> dict:
    return {
        "tp": p.tp, "pp": p.pp, "ep": p.ep, "dp": p.dp, "chips": p.chips,
        "placement": {c.value: t for c, t in sorted(
            p.placement.items(), key=lambda kv: kv[0].value)},
    }


def _feasibility_dict(rep: FeasibilityReport) -> dict:
    return {
        "feasible": rep.feasible,
        "violations": [
            {"kind": v.kind.value, "detail": v.detail, "tier": v.tier}
            for v in rep.violations],
    }


def _row_dict(row: BottleneckRow) -> dict:
    return {
        "label": row.label.value,
        "compute": row.compute,
        "memory_capacity": row.memory_capacity,
        "memory_bandwidth": row.memory_bandwidth,
        "interconnect": row.interconnect,
    }


# ------------------------------------------------------------- evaluation

def workload_kinds(r: RequestSpec) -> list[str]:
    """Workload classes with an unresolved interconnect story; they set
    the derived "?" flag, never a hard bottleneck."""
    kinds = []
    if r.thought_len > 0:
        kinds.append("reasoning")
    if r.modality_flops_multiplier > 1:
        kinds.append("multimodal")
    if r.input_len >= LONG_CONTEXT_TOKENS:
        kinds.append("long_context")
    if r.rag_corpus_bytes > 0:
        kinds.append("rag")
    return kinds


def _capacity_pressure(plan: ShardingPlan, m: ModelSpec, r: RequestSpec,
                       node: NodeSpec, shared_context: bool) -> bool:
    demand = per_chip_demand(plan, m, r, node, shared_context=shared_context)
    for tier, need in demand.items():
        if need >= CAPACITY_PRESSURE_FRACTION * node.tier_capacity(tier):
            return True
    if plan.chips > 1:
        single = ShardingPlan(placement=plan.placement)
        rep = check_feasible(single, m, r, node,
                             shared_context=shared_context)
        if any(v.kind is ViolationKind.CAPACITY for v in rep.violations):
            return True
    return False


def _evaluate_plan(cfg: ScenarioConfig, plan: ShardingPlan) -> dict:
    m, r, node = cfg.model, cfg.request, cfg.node
    rep = check_feasible(plan, m, r, node,
                         shared_context=cfg.shared_context)
    if not rep.feasible:
        raise Unsatisfiable(_feasibility_dict(rep))

    timing = scenario_timing(
        m, r, node, plan.placement, tp=plan.tp, pp=plan.pp, ep=plan.ep,
        dp=plan.dp, topology=cfg.topology, util=cfg.utilization,
        moe_skew=cfg.moe_skew)
    system = SystemSpec(node, plan.chips, pue=cfg.cost_model.pue)
    cost = ratio_metrics(timing.decode_tokens_per_second * plan.dp,
                         system, cfg.cost_model)

    rep_est = timing.last_decode or timing.prefill
    row = classify(
        rep_est,
        capacity_pressure=_capacity_pressure(plan, m, r, node,
                                             cfg.shared_context),
        soft_interconnect=bool(workload_kinds(r)))
    return {
        "plan": _plan_dict(plan),
        "feasibility": _feasibility_dict(rep),
        "prefill": _estimate_dict(timing.prefill),
        "last_decode": (None if timing.last_decode is None
                        else _estimate_dict(timing.last_decode)),
        "timing": _timing_dict(timing),
        "cost": _cost_dict(cost),
        "bottleneck": _row_dict(row),
        "workload_kinds": workload_kinds(r),
        "comm_volume_bytes": {
            k.value: v for k, v in sorted(
                comm_volume_per_step(plan, m, r).items(),
                key=lambda kv: kv[0].value)},
    }


def _evaluate_explore(cfg: ScenarioConfig) -> dict:
    spec = cfg.explore
    assert spec is not None
    placements = [spec.placement] if spec.placement is not None else None
    front = explore(
        cfg.model, cfg.request, cfg.node, cfg.topology, spec.budget,
        spec.objectives, cost_model=cfg.cost_model, placements=placements,
        util=cfg.utilization, moe_skew=cfg.moe_skew,
        shared_context=cfg.shared_context)
    return {
        "objectives": list(spec.objectives),
        "budget": spec.budget,
        "pareto": [{
            "plan": _plan_dict(e.plan),
            "timing": _timing_dict(e.timing),
            "cost": _cost_dict(e.cost),
            "objective_values": [_sig(v) if math.isfinite(v) else None
                                 for v in e.objectives],
        } for e in front],
    }


def run_config(doc: Mapping | str,
               catalog: Catalog | None = None) -> dict:
    """Parse, evaluate, and assemble the full report dict.

    Raises ConfigError for malformed input and Unsatisfiable (carrying a
    feasibility dict) when no plan works.
    """
    cfg = parse_config(doc, catalog)
    body = (_evaluate_plan(cfg, cfg.plan) if cfg.plan is not None
            else _evaluate_explore(cfg))
    return {
        "version": __version__,
        "config_sha256": config_sha256(doc),
        **body,
    }


PRESETS = ("dense-on-hbm", "moe-256-on-hbm", "moe-256-with-hbf",
           "reasoning-long-context")


def list_presets() -> tuple[str, ...]:
    """Names of the bundled scenario configs."""
    return PRESETS


def load_preset(name: str) -> dict:
    """One bundled scenario config as a plain config dict."""
    if name not in PRESETS:
        raise ConfigError(
            "preset", f"unknown preset {name!r}; pick from {list(PRESETS)}")
    text = (resources.files("roofsim.data") / "presets" / f"{name}.json"
            ).read_text()
    return json.loads(text)


# -------------------------------------------------------------- rendering

def render_json(report: Mapping) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


ESTIMATE_COLUMNS = (
    "ttft_s", "time_to_completion_s", "decode_tokens_per_second",
    "energy_per_token_j", "prefill_step_time_s", "prefill_bottleneck",
    "prefill_arithmetic_intensity", "decode_step_time_s",
    "decode_bottleneck", "decode_arithmetic_intensity", "chips",
    "system_power_w", "tco_rate_usd_per_hour", "tokens_per_usd",
    "tokens_per_joule", "co2e_per_token_g", "label")


def report_csv_row(report: Mapping) -> dict[str, Any]:
    """Flatten an estimate report onto the stable CSV columns."""
    t, c, p = report["timing"], report["cost"], report["prefill"]
    d = report.get("last_decode")
    return {
        "ttft_s": t["ttft_s"],
        "time_to_completion_s": t["time_to_completion_s"],
        "decode_tokens_per_second": t["decode_tokens_per_second"],
        "energy_per_token_j": t["energy_per_token_j"],
        "prefill_step_time_s": p["step_time_s"],
        "prefill_bottleneck": p["bottleneck"],
        "prefill_arithmetic_intensity": p["arithmetic_intensity"],
        "decode_step_time_s": d["step_time_s"] if d else "",
        "decode_bottleneck": d["bottleneck"] if d else "",
        "decode_arithmetic_intensity": d["arithmetic_intensity"] if d else "",
        "chips": report["plan"]["chips"],
        "system_power_w": c["system_power_w"],
        "tco_rate_usd_per_hour": c["tco_rate_usd_per_hour"],
        "tokens_per_usd": c["tokens_per_usd"] if c["tokens_per_usd"]
        is not None else "",
        "tokens_per_joule": c["tokens_per_joule"]
        if c["tokens_per_joule"] is not None else "",
        "co2e_per_token_g": c["co2e_per_token_g"]
        if c["co2e_per_token_g"] is not None else "",
        "label": report["bottleneck"]["label"],
    }


def render_csv(report: Mapping) -> str:
    row = report_csv_row(report)
    head = ",".join(ESTIMATE_COLUMNS)
    vals = ",".join(str(row[c]) for c in ESTIMATE_COLUMNS)
    return f"{head}\n{vals}\n"


def render_markdown(report: Mapping) -> str:
    if "pareto" in report:
        return _render_markdown_pareto(report)
    t, c, pl = report["timing"], report["cost"], report["plan"]
    row = report["bottleneck"]
    kinds = ", ".join(report["workload_kinds"]) or "chat"
    lines = [
        "# Scenario estimate",
        "",
        f"Plan: tp={pl['tp']} pp={pl['pp']} ep={pl['ep']} dp={pl['dp']} "
        f"({pl['chips']} chips); workload: {kinds}",
        "",
        "| Metric | Value |",
        "| --- | --- |",
        f"| TTFT | {t['ttft_s']} s |",
        f"| Time to completion | {t['time_to_completion_s']} s |",
        f"| Decode throughput | {t['decode_tokens_per_second']} tok/s |",
        f"| Energy per token | {t['energy_per_token_j']} J |",
        f"| System power | {c['system_power_w']} W |",
        f"| TCO rate | {c['tco_rate_usd_per_hour']} USD/h |",
        "",
        "| Scenario | Compute | Memory capacity | Memory bandwidth "
        "| Interconnect |",
        "| --- | --- | --- | --- | --- |",
        f"| {kinds} | {row['compute']} | {row['memory_capacity']} "
        f"| {row['memory_bandwidth']} | {row['interconnect']} |",
        "",
        f"Bottleneck: {row['label']}",
        "",
    ]
    return "\n".join(lines)


def _render_markdown_pareto(report: Mapping) -> str:
    objs = report["objectives"]
    head = "| tp | pp | ep | dp | chips | " + " | ".join(objs) + " |"
    sep = "| --- " * (5 + len(objs)) + "|"
    lines = ["# Pareto front", "",
             f"Budget: {report['budget']} chips", "", head, sep]
    for e in report["pareto"]:
        p = e["plan"]
        vals = " | ".join(str(v) for v in e["objective_values"])
        lines.append(f"| {p['tp']} | {p['pp']} | {p['ep']} | {p['dp']} "
                     f"| {p['chips']} | {vals} |")
    lines.append("")
    return "\n".join(lines)
