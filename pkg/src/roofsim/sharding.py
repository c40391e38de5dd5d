"""Sharding plans: feasibility, minimum system size, comm volume, Pareto.

Parallelism degrees come from divisor lattices (tp over attention heads,
pp over layers, ep over experts, dp fills the rest), so every enumerated
plan splits work evenly. Feasibility is a closed inequality per tier;
endurance rules keep write-hot data off low-endurance media.

Capacity sharding follows the conservative first-order rules: KV cache
splits by batch across dp and by heads across tp; weights split across
tp*pp (experts additionally across ep); retrieved context is replicated
per replica unless marked shared. Activations always land on the
fastest high-endurance tier and never appear in the placement map.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import workload
from .catalog import Endurance, NodeSpec
from .costs import CostModel, CostReport, SystemSpec, ratio_metrics
from .roofline import (PlacementError, ScenarioTiming, Utilization,
                       scenario_timing)
from .topology import CollectiveKind, Topology
from .workload import DataClass, ModelSpec, RequestSpec

MAX_BUDGET = 4096

DEFAULT_OBJECTIVES = ("time_to_completion", "tco_per_token")


class Unsatisfiable(Exception):
    """No feasible plan exists within the chip budget."""


class ViolationKind(enum.Enum):
    CAPACITY = "Capacity"
    ENDURANCE = "Endurance"
    DIVISIBILITY = "Divisibility"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    tier: str = ""


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ShardingPlan:
    """Parallelism degrees plus where each data class lives.

    ``placement`` maps Weights/KvCache/SlowContext to tier names;
    activations are auto-placed and may not appear here.
    """
    tp: int = 1
    pp: int = 1
    ep: int = 1
    dp: int = 1
    placement: Mapping[DataClass, str] = None  # type: ignore[assignment]

    def __post_init__(self):
        for name in ("tp", "pp", "ep", "dp"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.placement is None:
            raise ValueError("placement is required")
        if DataClass.ACTIVATIONS in self.placement:
            raise ValueError("activations are placed automatically; "
                             "remove them from the placement map")

    @property
    def width(self) -> int:
        return self.tp * self.pp * self.ep

    @property
    def chips(self) -> int:
        return self.width * self.dp

    @property
    def key(self) -> tuple:
        """Deterministic ordering key."""
        pl = tuple(sorted((c.value, t) for c, t in self.placement.items()))
        return (self.chips, self.tp, self.pp, self.ep, self.dp, pl)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _activation_tier(node: NodeSpec) -> str | None:
    best = None
    for dev, count in node.tiers:
        if dev.write_endurance is Endurance.HIGH:
            if best is None or dev.read_bw * count > best[1]:
                best = (dev.name, dev.read_bw * count)
    return best[0] if best else None


def per_chip_demand(plan: ShardingPlan, m: ModelSpec, r: RequestSpec,
                    node: NodeSpec, *,
                    shared_context: bool = False) -> dict[str, float]:
    """Resident bytes per chip, per tier name, activations included."""
    batch_r = math.ceil(r.batch / plan.dp)
    tp, pp, ep = plan.tp, plan.pp, plan.ep

    expert_total = (m.layers * (m.moe.n_experts if m.moe else 0)
                    * workload.expert_weight_bytes(m))
    dense_total = workload.weight_bytes(m) - expert_total
    weights = dense_total / (tp * pp) + expert_total / (tp * pp * ep)

    kv = 0.0 if r.compute_only else (
        workload.kv_bytes_per_token(m) * r.total_len * batch_r
        / min(tp, m.n_kv_heads))

    demand: dict[str, float] = {}

    def put(tier: str, b: float):
        if b > 0:
            demand[tier] = demand.get(tier, 0.0) + b

    put(plan.placement[DataClass.WEIGHTS], weights)
    put(plan.placement[DataClass.KV_CACHE], kv)
    if r.rag_corpus_bytes:
        shard = plan.width * (plan.dp if shared_context else 1)
        put(plan.placement[DataClass.SLOW_CONTEXT],
            r.rag_corpus_bytes / shard)
    act_tier = _activation_tier(node)
    if act_tier is not None:
        put(act_tier, batch_r * m.d_model * m.dtype_bytes
            * workload.ACTIVATION_MULTIPLIER / (tp * pp))
    return demand


def _placement_tiers(plan: ShardingPlan, r: RequestSpec,
                     node: NodeSpec) -> None:
    required = [DataClass.WEIGHTS, DataClass.KV_CACHE]
    if r.rag_corpus_bytes:
        required.append(DataClass.SLOW_CONTEXT)
    for cls in required:
        if cls not in plan.placement:
            raise PlacementError(f"placement missing {cls.value}")
    for cls, tier in plan.placement.items():
        try:
            node.tier(tier)
        except KeyError as e:
            raise PlacementError(str(e)) from e


def check_feasible(plan: ShardingPlan, m: ModelSpec, r: RequestSpec,
                   node: NodeSpec, *,
                   shared_context: bool = False) -> FeasibilityReport:
    """Divisibility, endurance, and closed-inequality capacity checks."""
    _placement_tiers(plan, r, node)
    v: list[Violation] = []

    if m.n_heads % plan.tp:
        v.append(Violation(ViolationKind.DIVISIBILITY,
                           f"tp={plan.tp} does not divide {m.n_heads} heads"))
    if m.layers % plan.pp:
        v.append(Violation(ViolationKind.DIVISIBILITY,
                           f"pp={plan.pp} does not divide {m.layers} layers"))
    if m.moe is None:
        if plan.ep != 1:
            v.append(Violation(ViolationKind.DIVISIBILITY,
                               "ep > 1 on a dense model"))
    elif m.moe.n_experts % plan.ep:
        v.append(Violation(
            ViolationKind.DIVISIBILITY,
            f"ep={plan.ep} does not divide {m.moe.n_experts} experts"))

    kv_tier = plan.placement[DataClass.KV_CACHE]
    kv_dev, _ = node.tier(kv_tier)
    if not r.compute_only and kv_dev.write_endurance is Endurance.LOW:
        v.append(Violation(
            ViolationKind.ENDURANCE,
            "kv_cache is rewritten every step and cannot live on a "
            "low-endurance tier", tier=kv_tier))
    if _activation_tier(node) is None:
        v.append(Violation(ViolationKind.ENDURANCE,
                           "node has no high-endurance tier for activations"))

    for tier, need in per_chip_demand(plan, m, r, node,
                                      shared_context=shared_context).items():
        have = node.tier_capacity(tier)
        if need > have:
            v.append(Violation(
                ViolationKind.CAPACITY,
                f"needs {need:.0f} B of {have} B per chip", tier=tier))
    return FeasibilityReport(tuple(v))


def _shard_combos(m: ModelSpec, budget: int) -> list[tuple[int, int, int]]:
    eps = _divisors(m.moe.n_experts) if m.moe else [1]
    combos = [(tp, pp, ep)
              for tp in _divisors(m.n_heads)
              for pp in _divisors(m.layers)
              for ep in eps
              if tp * pp * ep <= budget]
    combos.sort(key=lambda c: (c[0] * c[1] * c[2], c))
    return combos


def min_system_size(m: ModelSpec, r: RequestSpec, node: NodeSpec,
                    placement: Mapping[DataClass, str], *,
                    budget: int = MAX_BUDGET,
                    shared_context: bool = False) -> int:
    """Smallest chip count with any feasible (tp, pp, ep, dp) split."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    budget = min(budget, MAX_BUDGET)
    combos = _shard_combos(m, budget)
    tightest: Violation | None = None
    for chips in range(1, budget + 1):
        for tp, pp, ep in combos:
            width = tp * pp * ep
            if width > chips or chips % width:
                continue
            plan = ShardingPlan(tp, pp, ep, chips // width, placement)
            rep = check_feasible(plan, m, r, node,
                                 shared_context=shared_context)
            if rep.feasible:
                return chips
            # the most-sharded failing plan names the binding constraint
            tightest = rep.violations[0]
    detail = tightest.detail if tightest else "no shard combination fits"
    raise Unsatisfiable(
        f"no feasible plan within {budget} chips; tightest constraint: "
        f"{detail}")


def comm_volume_per_step(plan: ShardingPlan, m: ModelSpec,
                         r: RequestSpec) -> dict[CollectiveKind, int]:
    """Bytes moved per decode step by each traffic category, for the
    whole dp group (the idealized even batch split keeps this linear in
    batch)."""
    act = r.batch * m.d_model * m.dtype_bytes
    routed = act * (m.moe.top_k if m.moe else 0)
    return {
        CollectiveKind.ALL_REDUCE:
            2 * m.layers * act if plan.tp > 1 else 0,
        CollectiveKind.MOE_DISPATCH: routed if plan.ep > 1 else 0,
        CollectiveKind.MOE_COLLECT: routed if plan.ep > 1 else 0,
        CollectiveKind.BROADCAST: 0,
        CollectiveKind.POINT_TO_POINT:
            (plan.pp - 1) * act if plan.pp > 1 else 0,
    }


@dataclass(frozen=True)
class PlanEvaluation:
    plan: ShardingPlan
    timing: ScenarioTiming
    cost: CostReport
    objectives: tuple[float, ...]


OBJECTIVES = frozenset({
    "time_to_completion", "ttft", "tco_per_token", "energy_per_token",
    "co2e_per_token", "chips", "system_power"})


def _objective_value(name: str, plan: ShardingPlan, t: ScenarioTiming,
                     c: CostReport) -> float:
    if name == "time_to_completion":
        return t.time_to_completion
    if name == "ttft":
        return t.ttft
    if name == "tco_per_token":
        return (1.0 / c.tokens_per_usd) if c.tokens_per_usd else math.inf
    if name == "energy_per_token":
        return t.energy_per_token if t.energy_per_token > 0 else math.inf
    if name == "co2e_per_token":
        return c.co2e_per_token if c.co2e_per_token is not None else math.inf
    if name == "chips":
        return float(plan.chips)
    if name == "system_power":
        return c.system_power_watts
    raise ValueError(f"unknown objective {name!r}")


def _dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(
        x < y for x, y in zip(a, b))


def pareto_front(evals: Iterable[PlanEvaluation]) -> list[PlanEvaluation]:
    """Non-dominated subset (minimization); equal objective vectors keep
    the plan with fewest chips, then lowest tp. Output sorted by plan
    key so concurrent evaluation order can never show through."""
    best_for_vector: dict[tuple, PlanEvaluation] = {}
    for e in evals:
        cur = best_for_vector.get(e.objectives)
        if cur is None or (e.plan.chips, e.plan.tp, e.plan.key) < (
                cur.plan.chips, cur.plan.tp, cur.plan.key):
            best_for_vector[e.objectives] = e
    unique = list(best_for_vector.values())
    front = [e for e in unique
             if not any(_dominates(o.objectives, e.objectives)
                        for o in unique if o is not e)]
    front.sort(key=lambda e: e.plan.key)
    return front


def _candidate_placements(m: ModelSpec, r: RequestSpec,
                          node: NodeSpec) -> list[dict[DataClass, str]]:
    tiers = [dev.name for dev, _ in node.tiers]
    out = []
    for wt in tiers:
        for kt in tiers:
            if r.rag_corpus_bytes:
                out.extend({DataClass.WEIGHTS: wt, DataClass.KV_CACHE: kt,
                            DataClass.SLOW_CONTEXT: st} for st in tiers)
            else:
                out.append({DataClass.WEIGHTS: wt, DataClass.KV_CACHE: kt})
    return out


def explore(m: ModelSpec, r: RequestSpec, node: NodeSpec,
            topology: Topology | None, budget: int,
            objectives: Sequence[str] = DEFAULT_OBJECTIVES, *,
            cost_model: CostModel = CostModel(),
            placements: Sequence[Mapping[DataClass, str]] | None = None,
            util: Utilization = Utilization(),
            moe_skew: float = 1.0,
            shared_context: bool = False) -> list[PlanEvaluation]:
    """Evaluate every feasible plan within the chip budget and return
    the Pareto front under the chosen objectives (all minimized)."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    budget = min(budget, MAX_BUDGET)
    if not objectives:
        raise ValueError("at least one objective is required")
    for name in objectives:
        if name not in OBJECTIVES:
            raise ValueError(f"unknown objective {name!r}; pick from "
                             f"{sorted(OBJECTIVES)}")

    panes = list(placements) if placements is not None else \
        _candidate_placements(m, r, node)
    combos = _shard_combos(m, budget)
    evals: list[PlanEvaluation] = []
    tightest: tuple[float, str] | None = None

    for pl in panes:
        for tp, pp, ep in combos:
            width = tp * pp * ep
            if width > 1 and topology is None:
                continue
            for dp in range(1, budget // width + 1):
                plan = ShardingPlan(tp, pp, ep, dp, pl)
                rep = check_feasible(plan, m, r, node,
                                     shared_context=shared_context)
                if not rep.feasible:
                    worst = rep.violations[0]
                    score = (0.0 if worst.kind is ViolationKind.CAPACITY
                             else 1.0)
                    if tightest is None or score < tightest[0]:
                        tightest = (score, f"{worst.kind.value}: "
                                    f"{worst.detail}")
                    continue
                timing = scenario_timing(
                    m, r, node, pl, tp=tp, pp=pp, ep=ep, dp=dp,
                    topology=topology, util=util, moe_skew=moe_skew)
                system = SystemSpec(node, plan.chips, pue=cost_model.pue)
                cost = ratio_metrics(
                    timing.decode_tokens_per_second * dp, system, cost_model)
                vec = tuple(_objective_value(n, plan, timing, cost)
                            for n in objectives)
                evals.append(PlanEvaluation(plan, timing, cost, vec))

    if not evals:
        detail = tightest[1] if tightest else "no plan fits the budget"
        raise Unsatisfiable(
            f"no feasible plan within {budget} chips; tightest violated "
            f"constraint: {detail}")
    return pareto_front(evals)
