"""Config parsing, report assembly, rendering, and the bundled presets.

Determinism tests render the same config repeatedly and compare bytes;
the JSON path is the same one the CLI and HTTP service serve.
"""
import copy
import json
import math

import pytest

from roofsim.scenario import (ESTIMATE_COLUMNS, PRESETS, ConfigError,
                              config_sha256, list_presets, load_preset,
                              parse_config, render_csv, render_json,
                              render_markdown, run_config, workload_kinds,
                              _sig)
from roofsim.sharding import Unsatisfiable
from roofsim.topology import TopologyKind
from roofsim.workload import RequestSpec

from conftest import TOY_DENSE


def toy_model_doc():
    d = dict(TOY_DENSE)
    d.pop("dtype_bytes")
    d["dtype_bytes"] = 2
    return d


def tiny_catalog_doc(capacity_gib=1):
    return {
        "memory_devices": [{
            "name": "kv-slab", "capacity_gib": capacity_gib,
            "read_bw_gbps": 1000, "power_w": 10, "read_latency_ns": 100,
            "read_granularity_bytes": 64}],
        "nodes": [{
            "name": "kv-node", "peak_tflops": 100,
            "tiers": [{"device": "kv-slab", "stacks": 1}],
            "network_ports": 4, "chip_power_w": 100, "capex_usd": 1000}],
    }


def tiny_doc(batch, tp=1, input_len=65536):
    doc = {
        "catalog": tiny_catalog_doc(),
        "model": toy_model_doc(),
        "request": {"input_len": input_len, "output_len": 4, "batch": batch},
        "node": "kv-node",
        "sharding": {"plan": {"tp": tp, "placement": {
            "weights": "kv-slab", "kv_cache": "kv-slab"}}},
    }
    if tp > 1:
        doc["topology"] = {"kind": "fully_connected", "link_bw_gbps": 100}
    return doc


# ---------------------------------------------------------------- parsing

def test_parse_golden_doc(golden_doc):
    cfg = parse_config(golden_doc)
    assert cfg.model.layers == 80
    assert cfg.request.batch == 4
    assert cfg.node.name == "hbm-node"
    assert cfg.plan.tp == 2 and cfg.plan.dp == 2 and cfg.plan.chips == 4
    assert cfg.explore is None
    assert cfg.topology.kind is TopologyKind.FULLY_CONNECTED
    assert cfg.topology.link_bw == 100e9


def test_parse_accepts_json_text(golden_doc):
    cfg = parse_config(json.dumps(golden_doc, indent=4))
    assert cfg.plan.chips == 4
    with pytest.raises(ConfigError, match=r"\$: config parse error at line"):
        parse_config("{not json")
    with pytest.raises(ConfigError, match="config root must be an object"):
        parse_config("[1, 2]")


def test_unknown_top_level_key(golden_doc):
    golden_doc["frobnicate"] = 1
    with pytest.raises(ConfigError, match=r"\$: unknown keys \['frobnicate'\]"):
        parse_config(golden_doc)


@pytest.mark.parametrize("block", ["model", "request", "sharding"])
def test_missing_required_block(golden_doc, block):
    del golden_doc[block]
    with pytest.raises(ConfigError, match=f"{block}: missing required block"):
        parse_config(golden_doc)


def test_missing_node(golden_doc):
    del golden_doc["node"]
    with pytest.raises(ConfigError,
                       match="node: expected a catalog name or an inline"):
        parse_config(golden_doc)


def test_model_field_errors(golden_doc):
    del golden_doc["model"]["layers"]
    with pytest.raises(ConfigError, match="model.layers: missing required"):
        parse_config(golden_doc)

    golden_doc["model"]["layers"] = 2.5
    with pytest.raises(ConfigError, match="model.layers: expected an integer"):
        parse_config(golden_doc)

    golden_doc["model"]["layers"] = 0
    with pytest.raises(ConfigError, match="model:"):
        parse_config(golden_doc)

    golden_doc["model"]["layers"] = 80
    golden_doc["model"]["head_count"] = 4
    with pytest.raises(ConfigError, match=r"model: unknown keys \['head_count'\]"):
        parse_config(golden_doc)


def test_moe_block_errors(golden_doc):
    golden_doc["model"]["moe"] = {"n_experts": 8}
    with pytest.raises(ConfigError, match="model.moe.top_k: missing required"):
        parse_config(golden_doc)
    golden_doc["model"]["moe"] = {"n_experts": 8, "top_k": 2, "router": 1}
    with pytest.raises(ConfigError, match=r"model.moe: unknown keys \['router'\]"):
        parse_config(golden_doc)


def test_request_field_errors(golden_doc):
    golden_doc["request"]["batch"] = True
    with pytest.raises(ConfigError, match="request.batch: expected a number"):
        parse_config(golden_doc)
    del golden_doc["request"]["batch"]
    del golden_doc["request"]["input_len"]
    with pytest.raises(ConfigError, match="request.input_len: missing"):
        parse_config(golden_doc)


def test_sharding_exactly_one(golden_doc):
    golden_doc["sharding"]["explore"] = {"budget": 4}
    with pytest.raises(ConfigError,
                       match="exactly one of 'plan' or 'explore'"):
        parse_config(golden_doc)
    golden_doc["sharding"] = {}
    with pytest.raises(ConfigError,
                       match="exactly one of 'plan' or 'explore'"):
        parse_config(golden_doc)


def test_placement_errors(golden_doc):
    del golden_doc["sharding"]["plan"]["placement"]["kv_cache"]
    with pytest.raises(ConfigError,
                       match="placement needs weights and kv_cache"):
        parse_config(golden_doc)

    golden_doc["sharding"]["plan"]["placement"]["kv_cache"] = 7
    with pytest.raises(ConfigError,
                       match="placement.kv_cache: expected a tier name"):
        parse_config(golden_doc)

    # activations are routed automatically, never placed by hand
    golden_doc["sharding"]["plan"]["placement"]["kv_cache"] = "hbm4-6400-stack"
    golden_doc["sharding"]["plan"]["placement"]["activations"] = "hbm4-6400-stack"
    with pytest.raises(ConfigError, match=r"unknown keys \['activations'\]"):
        parse_config(golden_doc)


def test_plan_validation_propagates(golden_doc):
    golden_doc["sharding"]["plan"]["tp"] = 0
    with pytest.raises(ConfigError, match="sharding.plan:"):
        parse_config(golden_doc)


def test_explore_parsing(golden_doc):
    golden_doc["sharding"] = {"explore": {"budget": 4}}
    cfg = parse_config(golden_doc)
    assert cfg.plan is None
    assert cfg.explore.budget == 4
    assert cfg.explore.placement is None
    assert all(isinstance(o, str) for o in cfg.explore.objectives)

    golden_doc["sharding"] = {"explore": {"budget": 0}}
    with pytest.raises(ConfigError, match="sharding.explore.budget: must be"):
        parse_config(golden_doc)

    golden_doc["sharding"] = {"explore": {"budget": 4, "objectives": []}}
    with pytest.raises(ConfigError, match="non-empty array of names"):
        parse_config(golden_doc)

    golden_doc["sharding"] = {"explore": {
        "budget": 4, "objectives": ["speed"]}}
    with pytest.raises(ConfigError, match="unknown objective 'speed'"):
        parse_config(golden_doc)


def test_topology_parsing(golden_doc):
    golden_doc["topology"] = {"kind": "hypercube", "link_bw_gbps": 100}
    with pytest.raises(ConfigError, match="topology.kind: expected one of"):
        parse_config(golden_doc)

    golden_doc["topology"] = {"kind": "fully_connected"}
    with pytest.raises(ConfigError, match="topology.link_bw_gbps: missing"):
        parse_config(golden_doc)

    golden_doc["topology"] = {"kind": "torus", "link_bw_gbps": 100,
                              "dims": [4, "x"]}
    with pytest.raises(ConfigError, match="topology.dims: expected an array"):
        parse_config(golden_doc)

    golden_doc["topology"] = {
        "kind": "tree", "link_bw_gbps": 50, "fanout": 4, "in_network": True,
        "per_hop_latency_ns": 250, "per_message_overhead_us": 2,
        "overhead_scale": 0.5}
    cfg = parse_config(golden_doc)
    t = cfg.topology
    assert t.kind is TopologyKind.TREE
    assert t.link_bw == 50e9
    assert t.in_network_collectives
    assert t.per_hop_latency == 250 * 1e-9
    assert t.per_message_overhead == 2 * 1e-6
    assert t.message_overhead == 1e-6  # overhead_scale applied

    # unit suffixes are part of the key names; the bare names are typos
    golden_doc["topology"] = {"kind": "fully_connected", "link_bw_gbps": 100,
                              "per_hop_latency": 1}
    with pytest.raises(ConfigError, match=r"unknown keys \['per_hop_latency'\]"):
        parse_config(golden_doc)


def test_topology_defaults(golden_doc):
    cfg = parse_config(golden_doc)
    assert cfg.topology.per_hop_latency == 100e-9
    assert cfg.topology.per_message_overhead == 1e-6


def test_topology_required_when_sharded(golden_doc):
    del golden_doc["topology"]
    with pytest.raises(ConfigError,
                       match="topology: required when the plan shards"):
        parse_config(golden_doc)


def test_placement_tier_missing_on_node(golden_doc):
    golden_doc["sharding"]["plan"]["placement"]["weights"] = "hbf-stack"
    with pytest.raises(ConfigError, match="sharding placement.weights: node "
                       "'hbm-node' has no tier 'hbf-stack'"):
        parse_config(golden_doc)


def test_node_reference_forms(golden_doc):
    golden_doc["node"] = "no-such-node"
    with pytest.raises(ConfigError, match="node:"):
        parse_config(golden_doc)

    golden_doc["node"] = {
        "name": "inline-node", "peak_tflops": 500,
        "tiers": [{"device": "hbm4-6400-stack", "stacks": 8}],
        "chip_power_w": 500, "capex_usd": 10000}
    cfg = parse_config(golden_doc)
    assert cfg.node.name == "inline-node"
    assert cfg.node.peak_flops == 500e12

    golden_doc["node"]["tiers"] = [{"device": "no-such-device", "stacks": 1}]
    with pytest.raises(ConfigError, match="node.tiers"):
        parse_config(golden_doc)


def test_inline_catalog_shadows_builtins():
    doc = tiny_doc(batch=1)
    cfg = parse_config(doc)
    assert cfg.node.name == "kv-node"
    assert cfg.node.tier_capacity("kv-slab") == 2**30
    # built-ins stay visible through the merged catalog
    assert cfg.catalog.node("hbm-node").name == "hbm-node"

    doc["catalog"] = {"memory_devices": [{"name": "broken"}]}
    with pytest.raises(ConfigError, match="catalog:"):
        parse_config(doc)


def test_cost_model_and_utilization_overrides(golden_doc):
    golden_doc["cost_model"] = {"electricity_usd_per_kwh": 0.12, "pue": 1.4}
    golden_doc["utilization"] = {"decode_compute": 0.5}
    cfg = parse_config(golden_doc)
    assert cfg.cost_model.electricity_usd_per_kwh == 0.12
    assert cfg.cost_model.pue == 1.4
    assert cfg.cost_model.grid_intensity_g_per_kwh == 200.0  # default kept
    assert cfg.utilization.decode_compute == 0.5
    assert cfg.utilization.prefill_compute == 0.6

    golden_doc["cost_model"] = {"pue": 0.5}
    with pytest.raises(ConfigError, match="cost_model:"):
        parse_config(golden_doc)
    del golden_doc["cost_model"]
    golden_doc["utilization"] = {"memory": 0}
    with pytest.raises(ConfigError, match="utilization:"):
        parse_config(golden_doc)


def test_moe_skew(golden_doc):
    golden_doc["moe_skew"] = 0.5
    with pytest.raises(ConfigError, match=r"\$.moe_skew: must be >= 1"):
        parse_config(golden_doc)
    golden_doc["moe_skew"] = 2.0
    assert parse_config(golden_doc).moe_skew == 2.0


# ------------------------------------------------------- derived workload

def test_workload_kinds():
    assert workload_kinds(RequestSpec(input_len=8, output_len=4)) == []
    assert workload_kinds(RequestSpec(
        input_len=8, output_len=4, thought_len=1)) == ["reasoning"]
    assert workload_kinds(RequestSpec(
        input_len=32767, output_len=4)) == []
    assert workload_kinds(RequestSpec(
        input_len=32768, output_len=4)) == ["long_context"]
    assert workload_kinds(RequestSpec(
        input_len=8, output_len=4, rag_corpus_bytes=10**9)) == ["rag"]
    assert workload_kinds(RequestSpec(
        input_len=8, output_len=4, modality_flops_multiplier=2.0)) \
        == ["multimodal"]
    assert workload_kinds(RequestSpec(
        input_len=32768, output_len=4, thought_len=64,
        rag_corpus_bytes=1, modality_flops_multiplier=1.5)) \
        == ["reasoning", "multimodal", "long_context", "rag"]


# ----------------------------------------------------------- run + render

def test_report_shape(golden_doc):
    rep = run_config(golden_doc)
    assert set(rep) == {"version", "config_sha256", "plan", "feasibility",
                        "prefill", "last_decode", "timing", "cost",
                        "bottleneck", "workload_kinds", "comm_volume_bytes"}
    assert rep["feasibility"]["feasible"] is True
    assert rep["plan"] == {"tp": 2, "pp": 1, "ep": 1, "dp": 2, "chips": 4,
                           "placement": {"kv_cache": "hbm4-6400-stack",
                                         "weights": "hbm4-6400-stack"}}
    assert rep["prefill"]["phase"] == "prefill"
    assert rep["last_decode"]["phase"] == "decode_step"
    assert isinstance(rep["prefill"]["flops"], int)
    assert isinstance(rep["prefill"]["tier_bytes"], dict)
    assert rep["timing"]["generated_tokens"] == 128


def test_run_config_deterministic_bytes(golden_doc):
    blobs = {render_json(run_config(golden_doc)) for _ in range(10)}
    assert len(blobs) == 1
    text = blobs.pop()
    assert text.endswith("\n")
    assert json.loads(text)["version"] == run_config(golden_doc)["version"]


def test_config_sha256_canonical(golden_doc):
    h = config_sha256(golden_doc)
    assert h == config_sha256(json.dumps(golden_doc, indent=7))
    reordered = dict(reversed(list(golden_doc.items())))
    assert h == config_sha256(reordered)
    assert h == run_config(golden_doc)["config_sha256"]
    golden_doc["request"]["batch"] = 5
    assert config_sha256(golden_doc) != h


def test_sig_rendering(rng):
    assert _sig(0.0) == 0.0
    assert _sig(math.inf) == math.inf
    assert _sig(123456789.0) == 123457000.0
    assert _sig(-0.0001234567) == -0.000123457
    for _ in range(200):
        x = rng.uniform(-40, 40)
        v = math.copysign(10 ** x, rng.random() - 0.5)
        assert _sig(_sig(v)) == _sig(v)


def test_zero_output_report(golden_doc):
    golden_doc["request"]["output_len"] = 0
    rep = run_config(golden_doc)
    assert rep["last_decode"] is None
    assert rep["timing"]["generated_tokens"] == 0
    assert rep["timing"]["decode_time_s"] == 0
    assert rep["timing"]["ttft_s"] == rep["timing"]["time_to_completion_s"]

    text = render_csv(rep)
    head, vals, tail = text.split("\n")
    assert head == ",".join(ESTIMATE_COLUMNS)
    assert tail == ""
    cells = dict(zip(ESTIMATE_COLUMNS, vals.split(",")))
    assert cells["decode_step_time_s"] == ""
    assert cells["decode_bottleneck"] == ""
    assert cells["prefill_bottleneck"] == "Compute"


def test_csv_row_matches_report(golden_doc):
    rep = run_config(golden_doc)
    vals = render_csv(rep).split("\n")[1].split(",")
    cells = dict(zip(ESTIMATE_COLUMNS, vals))
    assert float(cells["ttft_s"]) == rep["timing"]["ttft_s"]
    assert cells["chips"] == "4"
    assert cells["label"] == rep["bottleneck"]["label"]
    assert float(cells["tokens_per_joule"]) == rep["cost"]["tokens_per_joule"]


def test_unsatisfiable_carries_feasibility():
    doc = load_preset("moe-256-on-hbm")
    doc["sharding"]["plan"].update(tp=1, ep=1)
    with pytest.raises(Unsatisfiable) as exc:
        run_config(doc)
    fdict = exc.value.args[0]
    assert fdict["feasible"] is False
    assert any(v["kind"] == "Capacity" and v["tier"] == "hbm4-6400-stack"
               for v in fdict["violations"])


def test_capacity_pressure_near_full_tier():
    # 462 * 65540 tokens * 32 B of KV sits above 90% of the 1 GiB tier
    hot = run_config(tiny_doc(batch=462))
    cool = run_config(tiny_doc(batch=400))
    assert hot["bottleneck"]["memory_capacity"] == "✓"
    assert cool["bottleneck"]["memory_capacity"] == ""


def test_capacity_pressure_when_sharding_is_forced():
    # batch 1000 never fits one chip, so tp=2 counts as capacity bound
    rep = run_config(tiny_doc(batch=1000, tp=2))
    assert rep["plan"]["chips"] == 2
    assert rep["bottleneck"]["memory_capacity"] == "✓"


def test_markdown_estimate(golden_doc):
    text = render_markdown(run_config(golden_doc))
    assert text.startswith("# Scenario estimate")
    assert "Plan: tp=2 pp=1 ep=1 dp=2 (4 chips); workload: chat" in text
    assert ("| Scenario | Compute | Memory capacity | Memory bandwidth "
            "| Interconnect |") in text
    assert "| TTFT |" in text and "| TCO rate |" in text
    assert "Bottleneck: " in text


def test_markdown_workload_labels():
    text = render_markdown(run_config(load_preset("reasoning-long-context")))
    assert "workload: reasoning, long_context" in text
    assert "| reasoning, long_context |" in text


def test_explore_report(golden_doc):
    golden_doc["sharding"] = {"explore": {"budget": 4}}
    rep = run_config(golden_doc)
    assert rep["budget"] == 4
    assert rep["pareto"], "front must not be empty"
    for e in rep["pareto"]:
        assert e["plan"]["chips"] <= 4
        assert len(e["objective_values"]) == len(rep["objectives"])
    assert render_json(rep) == render_json(run_config(golden_doc))

    text = render_markdown(rep)
    assert text.startswith("# Pareto front")
    assert "Budget: 4 chips" in text
    assert text.count("\n| ") == len(rep["pareto"]) + 2  # head + sep + rows


# ----------------------------------------------------------------- presets

def test_preset_listing():
    assert list_presets() == PRESETS
    assert len(PRESETS) == 4
    with pytest.raises(ConfigError, match="preset: unknown preset 'nope'"):
        load_preset("nope")


def test_preset_docs_are_fresh_copies():
    doc = load_preset("dense-on-hbm")
    doc["request"]["batch"] = 99
    assert load_preset("dense-on-hbm")["request"]["batch"] == 1


def test_preset_dense_on_hbm():
    rep = run_config(load_preset("dense-on-hbm"))
    assert rep["plan"]["chips"] == 2
    assert rep["prefill"]["bottleneck"] == "Compute"
    assert rep["last_decode"]["bottleneck"] == "MemoryBandwidth"
    assert rep["bottleneck"] == {
        "label": "MemoryBandwidth", "compute": "", "memory_capacity": "",
        "memory_bandwidth": "✓", "interconnect": ""}
    assert rep["workload_kinds"] == []


def test_preset_moe_256_on_hbm():
    rep = run_config(load_preset("moe-256-on-hbm"))
    assert rep["plan"]["chips"] == 16
    row = rep["bottleneck"]
    assert row["memory_capacity"] == "✓"
    assert row["memory_bandwidth"] == "✓"
    assert row["interconnect"] == "?"   # net above 10% of the decode step
    d = rep["last_decode"]
    assert d["network_time_s"] > 0.1 * d["step_time_s"]


def test_preset_moe_256_with_hbf():
    rep = run_config(load_preset("moe-256-with-hbf"))
    assert rep["plan"]["chips"] == 1
    assert rep["plan"]["placement"]["weights"] == "hbf-stack"
    row = rep["bottleneck"]
    assert row["memory_capacity"] == "✓"
    assert row["interconnect"] == ""    # single chip, nothing on the wire
    assert rep["last_decode"]["network_time_s"] == 0


def test_preset_reasoning_long_context():
    rep = run_config(load_preset("reasoning-long-context"))
    assert rep["plan"]["chips"] == 4
    assert rep["workload_kinds"] == ["reasoning", "long_context"]
    assert rep["bottleneck"]["interconnect"] == "?"
    assert rep["prefill"]["bottleneck"] == "Compute"
    assert rep["last_decode"]["bottleneck"] == "MemoryBandwidth"
