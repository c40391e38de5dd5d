import copy
import random

import pytest

from roofsim.catalog import builtin_catalog
from roofsim.workload import DataClass, ModelSpec, MoeSpec, RequestSpec

SEED = 20240811

# frozen toy shapes; oracle values for these are asserted in test_workload
TOY_DENSE = dict(layers=2, d_model=8, n_heads=4, d_head=2, ffn_dim=16,
                 vocab=32, n_kv_heads=2, dtype_bytes=2)
TOY_MOE = dict(TOY_DENSE, moe=MoeSpec(n_experts=4, top_k=2, shared_ffn_dim=8))

GOLDEN_DOC = {
    "model": {"layers": 80, "d_model": 8192, "n_heads": 64, "d_head": 128,
              "ffn_dim": 28672, "vocab": 128256, "n_kv_heads": 8},
    "request": {"input_len": 512, "output_len": 128, "batch": 4},
    "node": "hbm-node",
    "topology": {"kind": "fully_connected", "link_bw_gbps": 100},
    "sharding": {"plan": {"tp": 2, "dp": 2, "placement": {
        "weights": "hbm4-6400-stack", "kv_cache": "hbm4-6400-stack"}}},
}


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture(scope="session")
def hbm_node():
    return builtin_catalog().node("hbm-node")


@pytest.fixture(scope="session")
def hbf_node():
    return builtin_catalog().node("hbf-node")


@pytest.fixture
def toy_dense():
    return ModelSpec(**TOY_DENSE)


@pytest.fixture
def toy_moe():
    return ModelSpec(**TOY_MOE)


@pytest.fixture
def golden_doc():
    return copy.deepcopy(GOLDEN_DOC)


HBM_PLACEMENT = {DataClass.WEIGHTS: "hbm4-6400-stack",
                 DataClass.KV_CACHE: "hbm4-6400-stack"}


@pytest.fixture
def hbm_placement():
    return dict(HBM_PLACEMENT)


def random_model(rng, moe_allowed=True):
    """Small random ModelSpec for oracle sweeps."""
    n_heads = rng.choice([2, 4, 6, 8, 12])
    kv_choices = [k for k in (1, 2, 3, 4, 6) if n_heads % k == 0]
    moe = None
    if moe_allowed and rng.random() < 0.5:
        n_experts = rng.choice([2, 4, 8, 16])
        moe = MoeSpec(n_experts=n_experts,
                      top_k=rng.randint(1, n_experts),
                      shared_ffn_dim=rng.choice([0, 8, 32]))
    return ModelSpec(
        layers=rng.randint(1, 6),
        d_model=rng.choice([8, 16, 64, 128]),
        n_heads=n_heads,
        d_head=rng.choice([2, 4, 8, 16]),
        ffn_dim=rng.choice([16, 32, 96]),
        vocab=rng.choice([32, 1000, 50000]),
        n_kv_heads=rng.choice(kv_choices),
        dtype_bytes=rng.choice([1, 2, 4]),
        gated_ffn=rng.random() < 0.7,
        moe=moe)


def as_oracle_args(m):
    """ModelSpec fields in the positional layout tests/oracles.py uses."""
    moe = None
    if m.moe is not None:
        moe = (m.moe.n_experts, m.moe.top_k, m.moe.shared_ffn_dim)
    return dict(layers=m.layers, d_model=m.d_model, n_heads=m.n_heads,
                d_head=m.d_head, ffn_dim=m.ffn_dim, vocab=m.vocab,
                n_kv_heads=m.n_kv_heads, gated=m.gated_ffn, moe=moe)


def simple_request(**kw):
    base = dict(input_len=8, output_len=4)
    base.update(kw)
    return RequestSpec(**base)
