"""Release gate: one test per acceptance criterion.

Each function below is a self-contained check of one shipped capability,
with its tolerance and runtime budget stated inline, so `pytest -v` on
this file reads as the acceptance checklist. Module-level suites cover
the same ground in finer grain; this file is deliberately redundant
with them and must stay green on exactly these thresholds.
"""
import json
import math
import subprocess
import sys
import threading
import time
import urllib.request

import pytest

import oracles
from roofsim.catalog import builtin_catalog, derive_efficiency
from roofsim.pricing import fit_trend, hbm_trend_check, load_bundled_history
from roofsim.roofline import decode_step, effective_read_bw
from roofsim.scenario import load_preset, run_config
from roofsim.sharding import (ViolationKind, check_feasible, min_system_size,
                              pareto_front, PlanEvaluation, ShardingPlan,
                              Unsatisfiable)
from roofsim.topology import (CollectiveKind, Topology, TopologyKind,
                              avg_hops, collective_time)
from roofsim.workload import (DataClass, ModelSpec, Phase, RequestSpec,
                              active_params_per_token, flops, total_params,
                              weight_bytes)

from conftest import HBM_PLACEMENT, as_oracle_args, random_model, \
    simple_request
from test_roofline import ram
from test_sharding import MOE_256, augmented_node, best_size, oracle_min_size
from test_topology import all_torus_dims, dragonfly, fc, torus, tree

from roofsim.catalog import NodeSpec


def node_of(dev, peak_flops=1e15):
    return NodeSpec(name="acc", peak_flops=peak_flops, sram_bytes=0,
                    tiers=((dev, 1),), network_ports=8,
                    chip_power_watts=500.0, capex_usd=10000.0)


PLACE = {DataClass.WEIGHTS: "ram", DataClass.KV_CACHE: "ram"}


# built-in HBM generation table -------------------------------------------

def test_hbm_generation_table():
    t0 = time.perf_counter()
    cat = builtin_catalog()
    want = {"hbm": (128, 4), "hbm2": (307, 8), "hbm2e": (461, 24),
            "hbm3": (819, 24), "hbm3e": (1254, 48), "hbm4": (2048, 64)}
    assert set(cat.generations) == set(want)
    for name, (bw_gbps, cap_gib) in want.items():
        g = cat.generations[name]
        assert abs(g.stack_bandwidth() / 1e9 - bw_gbps) <= 1.0, name
        assert g.stack_capacity() == cap_gib * 2**30, name
    assert time.perf_counter() - t0 < 1.0


# per-watt efficiency table -----------------------------------------------

def test_memory_efficiency_table():
    eff = {name: derive_efficiency(dev)
           for name, dev in builtin_catalog().devices.items()}
    assert round(eff["hbm4-6400-stack"].gbps_per_watt) == 41
    assert round(eff["ddr5-6400-64gb"].gbps_per_watt) == 4
    assert round(eff["lpddr5-6400-16gb"].gbps_per_watt) == 17
    assert eff["hbf-stack"].gbps_per_watt > 20.5
    assert eff["hbf-stack"].gb_per_watt > 6.4
    assert 0.08 <= eff["flash-card"].gbps_per_watt <= 0.1


# price trend windows -----------------------------------------------------

def test_price_trend_window_and_hbm_index():
    fit = fit_trend(load_bundled_history(), (2022.0, 2025.0))
    three_year = fit.annual_factor ** 3
    assert 0.45 <= three_year <= 0.65
    assert hbm_trend_check() == pytest.approx(1.35, abs=0.05)


# bottleneck matrix rows --------------------------------------------------

def test_bottleneck_matrix():
    dense = run_config(load_preset("dense-on-hbm"))
    assert dense["plan"]["chips"] == 2  # batch-1 decode on the dense preset
    assert dense["last_decode"]["bottleneck"] == "MemoryBandwidth"
    assert dense["prefill"]["context_len"] >= 2048
    assert dense["prefill"]["bottleneck"] == "Compute"

    moe = run_config(load_preset("moe-256-on-hbm"))
    row = moe["bottleneck"]
    assert row["memory_capacity"] != ""
    assert row["memory_bandwidth"] != ""
    assert row["interconnect"] != ""


# enumeration-oracle equivalence, < 60 s ----------------------------------

def test_oracle_equivalence(rng):
    t0 = time.perf_counter()

    # model sizes and flops vs the per-matrix walk, 25 random specs
    for _ in range(25):
        m = random_model(rng)
        args = as_oracle_args(m)
        assert total_params(m) == oracles.total_params(**args)
        assert weight_bytes(m) == oracles.total_params(**args) * m.dtype_bytes
        assert active_params_per_token(m) == oracles.active_params(**args)
        ctx = rng.randint(1, 4096)
        assert flops(m, Phase.DECODE_STEP, ctx, 1) == \
            oracles.decode_flops(context_len=ctx, **args)
        assert flops(m, Phase.DECODE_STEP, ctx, 1, compute_only=True) == \
            oracles.decode_flops(context_len=ctx, compute_only=True, **args)

    # avg_hops vs all-pairs BFS on every supported shape up to 64 nodes
    for n in range(1, 65):
        adj, members = oracles.fully_connected_graph(n)
        assert avg_hops(fc(), n) == oracles.bfs_avg_hops(adj, members)
    for dims in all_torus_dims(64):
        adj, members = oracles.torus_graph(dims)
        assert avg_hops(torus(dims), math.prod(dims)) == \
            oracles.bfs_avg_hops(adj, members), dims
    for fanout in range(2, 9):
        for n in range(1, 65):
            adj, members = oracles.tree_graph(fanout, n)
            assert avg_hops(tree(fanout), n) == \
                oracles.bfs_avg_hops(adj, members), (fanout, n)
    for groups in range(1, 65):
        for per in range(1, 64 // groups + 1):
            adj, members = oracles.dragonfly_graph(groups, per)
            assert avg_hops(dragonfly(groups, per), groups * per) == \
                oracles.bfs_avg_hops(adj, members), (groups, per)

    # pareto_front vs the quadratic dominance filter, 60 random clouds
    for _ in range(60):
        evals = [PlanEvaluation(
            ShardingPlan(1, 1, 1, i + 1, dict(HBM_PLACEMENT)), None, None,
            tuple(rng.choice((0.0, 0.5, 1.0, 2.0)) for _ in range(3)))
            for i in range(rng.randint(1, 24))]
        keep = {e.objectives for e in pareto_front(evals)}
        want = {evals[i].objectives
                for i in oracles.pareto_filter([e.objectives for e in evals])}
        assert keep == want

    # min_system_size vs exhaustive plan enumeration up to 16 chips
    node = builtin_catalog().node("hbm-node")
    checked = 0
    for _ in range(25):
        m = random_model(rng)
        r = simple_request(input_len=rng.choice((64, 8192)),
                           output_len=rng.randint(0, 64),
                           batch=rng.choice((1, 16, 256)))
        want = oracle_min_size(m, r, node, HBM_PLACEMENT, 16)
        if want is None:
            with pytest.raises(Unsatisfiable):
                min_system_size(m, r, node, HBM_PLACEMENT, budget=16)
        else:
            got = min_system_size(m, r, node, HBM_PLACEMENT, budget=16)
            assert got == want
            checked += 1
    assert checked >= 10

    assert time.perf_counter() - t0 < 60.0


# monotonicity and invariants, >= 1000 random cases -----------------------

def test_monotonicity_invariants(rng):
    cases = 0

    # step time identity: step = max(compute, memory) + network
    for _ in range(300):
        m = random_model(rng)
        r = simple_request(batch=rng.choice((1, 4, 32)))
        dev = ram(read_bw=rng.uniform(1e11, 1e13),
                  granularity=rng.choice((1, 64, 4096)))
        est = decode_step(m, r, node_of(dev), PLACE,
                          rng.randint(1, 2000))
        assert est.step_time == max(est.compute_time, est.memory_time) \
            + est.network_time
        cases += 1

    # more read bandwidth never slows a step down
    for _ in range(200):
        m = random_model(rng)
        r = simple_request(batch=rng.choice((1, 8)))
        bw = rng.uniform(1e11, 1e13)
        ctx = rng.randint(1, 2000)
        slow = decode_step(m, r, node_of(ram(read_bw=bw)), PLACE, ctx)
        fast = decode_step(m, r, node_of(ram(read_bw=bw * rng.uniform(
            1.0, 16.0))), PLACE, ctx)
        assert fast.step_time <= slow.step_time
        cases += 1

    # more peak FLOPS never slows a step down
    for _ in range(200):
        m = random_model(rng)
        r = simple_request(batch=rng.choice((1, 8)))
        peak = rng.uniform(1e12, 1e15)
        ctx = rng.randint(1, 2000)
        dev = ram()
        slow = decode_step(m, r, node_of(dev, peak), PLACE, ctx)
        fast = decode_step(m, r, node_of(
            dev, peak * rng.uniform(1.0, 16.0)), PLACE, ctx)
        assert fast.step_time <= slow.step_time
        cases += 1

    # granularity padding can only lower effective bandwidth
    for _ in range(200):
        dev = ram(read_bw=rng.uniform(1e9, 1e13),
                  granularity=rng.choice((1, 64, 256, 4096)))
        req = rng.uniform(1, 1e7)
        eff = effective_read_bw(dev, req)
        assert eff <= dev.read_bw
        cases += 1

    # in-network reduction on a tree never loses to software ring
    for _ in range(200):
        fanout = rng.randint(2, 8)
        n = rng.randint(2, 96)
        kw = dict(link_bw=rng.uniform(1e9, 1e12),
                  per_hop_latency=rng.uniform(1e-9, 1e-6),
                  per_message_overhead=rng.uniform(0, 1e-5))
        sw = tree(fanout, **kw)
        hw = tree(fanout, in_network_collectives=True, **kw)
        b = rng.uniform(1, 1e9)
        assert collective_time(hw, CollectiveKind.ALL_REDUCE, b, n) <= \
            collective_time(sw, CollectiveKind.ALL_REDUCE, b, n)
        cases += 1

    # an added HBF tier never increases the minimum system size
    hbm_node = builtin_catalog().node("hbm-node")
    aug = augmented_node()
    for _ in range(100):
        m = random_model(rng)
        r = simple_request(input_len=rng.choice((64, 65536)),
                           output_len=rng.randint(0, 64),
                           batch=rng.choice((1, 64, 512)))
        plain = best_size(m, r, hbm_node, [HBM_PLACEMENT], 8)
        relaxed = best_size(m, r, aug, [
            HBM_PLACEMENT,
            {DataClass.WEIGHTS: "hbf-stack",
             DataClass.KV_CACHE: "hbm4-6400-stack"}], 8)
        assert relaxed <= plain
        cases += 1

    assert cases >= 1000


# HBF capability demo -----------------------------------------------------

def test_hbf_capability_demo():
    cat = builtin_catalog()
    hbm_node, hbf_node = cat.node("hbm-node"), cat.node("hbf-node")
    r = simple_request(input_len=2048, output_len=512, batch=32)

    # the MoE's weights overflow one node's HBM but fit one HBF stack
    assert weight_bytes(MOE_256) > hbm_node.tier_capacity("hbm4-6400-stack")
    assert weight_bytes(MOE_256) <= hbf_node.tier_capacity("hbf-stack")
    without = min_system_size(MOE_256, r, hbm_node, HBM_PLACEMENT, budget=64)
    with_hbf = min_system_size(
        MOE_256, r, hbf_node,
        {DataClass.WEIGHTS: "hbf-stack",
         DataClass.KV_CACHE: "hbm4-6400-stack"}, budget=64)
    assert with_hbf < without
    assert with_hbf == 1

    # KV on flash is rejected outright, not merely slow
    rep = check_feasible(
        ShardingPlan(placement={DataClass.WEIGHTS: "hbf-stack",
                                DataClass.KV_CACHE: "hbf-stack"}),
        MOE_256, r, hbf_node)
    assert not rep.feasible
    assert any(v.kind is ViolationKind.ENDURANCE for v in rep.violations)


# byte determinism, CLI and HTTP agree -------------------------------------

def test_output_determinism(golden_doc, tmp_path):
    p = tmp_path / "golden.json"
    p.write_text(json.dumps(golden_doc))
    outs = set()
    for _ in range(10):
        proc = subprocess.run(
            [sys.executable, "-m", "roofsim.cli", "estimate", str(p)],
            capture_output=True)
        assert proc.returncode == 0
        outs.add(proc.stdout)
    assert len(outs) == 1

    from roofsim.service import run_server
    server = run_server(0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        host, port = server.server_address[:2]
        req = urllib.request.Request(
            f"http://{host}:{port}/estimate", method="POST",
            data=json.dumps(golden_doc).encode(),
            headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req, timeout=10) as resp:
            body = resp.read()
    finally:
        server.shutdown()
        thread.join(timeout=5)
    assert body == outs.pop()
