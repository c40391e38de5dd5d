"""System power, TCO rate, CO2e, and throughput-normalized ratio metrics.

Cost-model defaults here are operating assumptions, not measurements:
0.08 USD/kWh industrial power, PUE 1.1, a 200 gCO2e/kWh grid, 4-year
amortization, and embodied carbon of 150 kg per accelerator plus 0.3 kg
per decimal GB of attached memory. All are exposed in the config.
"""
from __future__ import annotations

from dataclasses import dataclass

from .catalog import NodeSpec

GB = 10**9
HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class CostModel:
    electricity_usd_per_kwh: float = 0.08
    pue: float = 1.1
    grid_intensity_g_per_kwh: float = 200.0
    lifetime_hours: float = 4 * HOURS_PER_YEAR
    embodied_kg_per_chip: float = 150.0
    embodied_kg_per_memory_gb: float = 0.3

    def __post_init__(self):
        for name in ("electricity_usd_per_kwh", "grid_intensity_g_per_kwh",
                     "lifetime_hours", "embodied_kg_per_chip",
                     "embodied_kg_per_memory_gb"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.pue < 1:
            raise ValueError("pue must be >= 1")


@dataclass(frozen=True)
class SystemSpec:
    """A deployed fleet: identical nodes, counted, behind one facility
    overhead factor. ``pue`` normally comes from the cost model."""
    node: NodeSpec
    chips: int
    pue: float = 1.0

    def __post_init__(self):
        if self.chips < 1:
            raise ValueError("chips must be >= 1")
        if self.pue < 1:
            raise ValueError("pue must be >= 1")


@dataclass(frozen=True)
class CostReport:
    """Ratio metrics are None (absent) when throughput is zero or a
    denominator vanishes; never infinite."""
    system_power_watts: float
    tco_rate: float                    # USD/hour
    tokens_per_usd: float | None
    tokens_per_joule: float | None
    co2e_per_token: float | None       # grams


def system_power(system: SystemSpec) -> float:
    """Facility watts: chip plus attached-memory power, times PUE."""
    return system.chips * system.node.total_power_watts * system.pue


def tco_rate(system: SystemSpec, cost: CostModel) -> float:
    """USD per hour: amortized capex plus electricity."""
    if cost.lifetime_hours <= 0:
        raise ValueError("lifetime_hours must be positive")
    capex = system.chips * system.node.capex_usd / cost.lifetime_hours
    energy = system_power(system) / 1000.0 * cost.electricity_usd_per_kwh
    return capex + energy


def _embodied_grams(system: SystemSpec, cost: CostModel) -> float:
    mem_gb = system.chips * system.node.total_memory_bytes / GB
    kg = (system.chips * cost.embodied_kg_per_chip
          + mem_gb * cost.embodied_kg_per_memory_gb)
    return kg * 1000.0


def ratio_metrics(throughput: float, system: SystemSpec,
                  cost: CostModel) -> CostReport:
    """Tokens per dollar/joule and grams CO2e per token at a sustained
    token rate. CO2e charges both the grid (operational) and the
    hardware's embodied carbon amortized over lifetime tokens."""
    if throughput < 0:
        raise ValueError("throughput must be >= 0")
    power = system_power(system)
    rate = tco_rate(system, cost)
    if throughput == 0:
        return CostReport(power, rate, None, None, None)

    per_usd = throughput * 3600.0 / rate if rate > 0 else None
    per_joule = throughput / power if power > 0 else None
    operational = (power / 1000.0) * cost.grid_intensity_g_per_kwh \
        / 3600.0 / throughput
    embodied = _embodied_grams(system, cost) \
        / (cost.lifetime_hours * 3600.0 * throughput)
    return CostReport(power, rate, per_usd, per_joule,
                      operational + embodied)
