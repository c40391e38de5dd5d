"""Hardware catalog: memory device specs, HBM stack generations, node specs.

All quantities are stored in SI base units: bytes, bytes/second, seconds,
watts, USD. Catalog files use human-scale units in their key names
(``capacity_gib``, ``read_bw_gbps``, ``power_w``, ``read_latency_ns``) and
are converted once at load time. Bandwidths are decimal (1 GB/s = 1e9 B/s);
capacities suffixed ``_gib`` are binary (1 GiB = 2^30 bytes).
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

GIB = 2**30
MIB = 2**20
GB = 10**9


class CatalogError(ValueError):
    """Malformed catalog document or entry."""


class ZeroPowerError(ValueError):
    """Efficiency ratios are undefined for a zero-power device."""


class VariantRangeError(ValueError):
    """Variant parameter outside its modeled range."""


class Endurance(enum.Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class MemoryDeviceSpec:
    """One memory device (a stack, module, or card) attachable to a node.

    ``write_bw`` may be zero only for low-endurance devices, which model
    read-mostly media. ``read_granularity_bytes`` is the minimum transfer
    unit; reads smaller than it still move a full unit.
    """
    name: str
    capacity_bytes: int
    read_bw: float              # bytes/s
    write_bw: float             # bytes/s
    power_watts: float
    read_latency: float         # seconds
    read_granularity_bytes: int
    write_endurance: Endurance
    cost_per_byte: float = 0.0  # USD
    cost_per_bw: float = 0.0    # USD per (byte/s) of read bandwidth

    def __post_init__(self):
        if self.capacity_bytes <= 0:
            raise ValueError(f"{self.name}: capacity_bytes must be positive")
        if self.read_bw <= 0:
            raise ValueError(f"{self.name}: read_bw must be positive")
        if self.write_bw < 0:
            raise ValueError(f"{self.name}: write_bw must be >= 0")
        if self.write_bw == 0 and self.write_endurance is not Endurance.LOW:
            raise ValueError(
                f"{self.name}: zero write_bw is only meaningful for "
                "low-endurance devices")
        if self.power_watts < 0:
            raise ValueError(f"{self.name}: power_watts must be >= 0")
        if self.read_latency < 0:
            raise ValueError(f"{self.name}: read_latency must be >= 0")
        g = self.read_granularity_bytes
        if g < 1 or (g & (g - 1)) != 0:
            raise ValueError(
                f"{self.name}: read_granularity_bytes must be a power of two")
        if self.cost_per_byte < 0 or self.cost_per_bw < 0:
            raise ValueError(f"{self.name}: costs must be >= 0")


@dataclass(frozen=True)
class MemoryEfficiency:
    """Efficiency ratios in decimal-GB terms, as commonly quoted."""
    gbps_per_watt: float
    gb_per_watt: float


def derive_efficiency(dev: MemoryDeviceSpec) -> MemoryEfficiency:
    """Bandwidth and capacity per watt for a device."""
    if dev.power_watts == 0:
        raise ZeroPowerError(f"{dev.name}: power is zero")
    return MemoryEfficiency(
        gbps_per_watt=dev.read_bw / GB / dev.power_watts,
        gb_per_watt=dev.capacity_bytes / GB / dev.power_watts,
    )


@dataclass(frozen=True)
class HbmGeneration:
    """One HBM generation: per-pin signaling rate and stack geometry."""
    name: str
    pin_rate_gbps: float        # Gbit/s per pin
    pins: int
    dies: int
    die_capacity_bytes: int
    year: int = 0

    def __post_init__(self):
        if self.pins not in (1024, 2048):
            raise ValueError(f"{self.name}: pins must be 1024 or 2048")
        if self.pin_rate_gbps <= 0:
            raise ValueError(f"{self.name}: pin_rate_gbps must be positive")
        if self.dies < 1 or self.die_capacity_bytes < 1:
            raise ValueError(f"{self.name}: dies and die capacity must be >= 1")

    def stack_bandwidth(self) -> float:
        """Peak stack bandwidth in bytes/s: pins x pin rate / 8."""
        return self.pins * self.pin_rate_gbps * 1e9 / 8

    def stack_capacity(self) -> int:
        """Stack capacity in bytes: dies x capacity per die."""
        return self.dies * self.die_capacity_bytes


class VariantKind(enum.Enum):
    PNM = "pnm"
    STACKED3D = "stacked3d"
    HBF = "hbf"


@dataclass(frozen=True)
class Variant:
    """A what-if transformation applied to a memory device.

    PNM multiplies read/write bandwidth by ``bw_multiplier`` (2..5x).
    STACKED3D divides device power by ``power_divisor`` (2..3x).
    HBF swaps DRAM dies for flash at equal read bandwidth: larger and
    read-mostly, with page-granular microsecond reads.
    """
    kind: VariantKind
    bw_multiplier: float | None = None
    power_divisor: float | None = None

    def __post_init__(self):
        if self.kind is VariantKind.PNM:
            m = self.bw_multiplier
            if m is None or not 2.0 <= m <= 5.0:
                raise VariantRangeError(
                    f"pnm bw_multiplier must be in [2, 5], got {m}")
        elif self.kind is VariantKind.STACKED3D:
            d = self.power_divisor
            if d is None or not 2.0 <= d <= 3.0:
                raise VariantRangeError(
                    f"stacked3d power_divisor must be in [2, 3], got {d}")


# HBF vs HBM4-6400 stack ratios: 512 GB vs 48 GB capacity at equal read
# bandwidth, at most 2x the power, 1/4 the write bandwidth.
_HBF_CAPACITY_RATIO = 512 / 48
_HBF_POWER_RATIO = 2.0
_HBF_READ_LATENCY = 2e-6
_HBF_GRANULARITY = 4096


def apply_variant(dev: MemoryDeviceSpec, variant: Variant) -> MemoryDeviceSpec:
    """Return a new device spec with the variant applied; input unchanged."""
    if variant.kind is VariantKind.PNM:
        m = variant.bw_multiplier
        return replace(dev, read_bw=dev.read_bw * m, write_bw=dev.write_bw * m)
    if variant.kind is VariantKind.STACKED3D:
        return replace(dev, power_watts=dev.power_watts / variant.power_divisor)
    if variant.kind is VariantKind.HBF:
        return replace(
            dev,
            capacity_bytes=round(dev.capacity_bytes * _HBF_CAPACITY_RATIO),
            write_bw=dev.read_bw / 4,
            power_watts=dev.power_watts * _HBF_POWER_RATIO,
            read_latency=max(dev.read_latency, _HBF_READ_LATENCY),
            read_granularity_bytes=max(dev.read_granularity_bytes,
                                       _HBF_GRANULARITY),
            write_endurance=Endurance.LOW,
        )
    raise VariantRangeError(f"unknown variant kind {variant.kind}")


@dataclass(frozen=True)
class NodeSpec:
    """One accelerator chip plus its attached memory tiers.

    Tiers are ordered; each is a device spec with a stack count. Tier names
    (used by placement maps) are the device names, so a node cannot attach
    the same device spec twice.
    """
    name: str
    peak_flops: float           # FLOP/s at the matmul dtype
    sram_bytes: int
    tiers: tuple[tuple[MemoryDeviceSpec, int], ...]
    network_ports: int
    chip_power_watts: float
    capex_usd: float

    def __post_init__(self):
        if self.peak_flops <= 0:
            raise ValueError(f"{self.name}: peak_flops must be positive")
        if self.sram_bytes < 0:
            raise ValueError(f"{self.name}: sram_bytes must be >= 0")
        if not self.tiers:
            raise ValueError(f"{self.name}: node needs at least one tier")
        names = [d.name for d, _ in self.tiers]
        if len(set(names)) != len(names):
            raise ValueError(f"{self.name}: duplicate tier device names")
        if any(n < 1 for _, n in self.tiers):
            raise ValueError(f"{self.name}: stack counts must be >= 1")
        if self.network_ports < 1:
            raise ValueError(f"{self.name}: network_ports must be >= 1")
        if self.chip_power_watts < 0 or self.capex_usd < 0:
            raise ValueError(f"{self.name}: power and capex must be >= 0")

    def tier(self, name: str) -> tuple[MemoryDeviceSpec, int]:
        for dev, count in self.tiers:
            if dev.name == name:
                return dev, count
        raise KeyError(f"{self.name}: no tier named {name!r}")

    def tier_capacity(self, name: str) -> int:
        dev, count = self.tier(name)
        return dev.capacity_bytes * count

    def tier_read_bw(self, name: str) -> float:
        dev, count = self.tier(name)
        return dev.read_bw * count

    @property
    def total_power_watts(self) -> float:
        return self.chip_power_watts + sum(
            count * dev.power_watts for dev, count in self.tiers)

    @property
    def total_memory_bytes(self) -> int:
        return sum(dev.capacity_bytes * count for dev, count in self.tiers)


def _builtin_generations() -> list[HbmGeneration]:
    gib = GIB
    return [
        HbmGeneration("hbm", 1.0, 1024, 4, 1 * gib, 2013),
        HbmGeneration("hbm2", 2.4, 1024, 8, 1 * gib, 2016),
        HbmGeneration("hbm2e", 3.6, 1024, 12, 2 * gib, 2019),
        HbmGeneration("hbm3", 6.4, 1024, 12, 2 * gib, 2022),
        HbmGeneration("hbm3e", 9.8, 1024, 16, 3 * gib, 2023),
        HbmGeneration("hbm4", 8.0, 2048, 16, 4 * gib, 2026),
    ]


def _builtin_devices() -> list[MemoryDeviceSpec]:
    # Reported-ratio devices. Capacities follow the quoted decimal-GB
    # figures. DRAM-class read latency uses 100 ns (top of the quoted
    # 10-100 ns band); costs are placeholder estimates, not measurements.
    return [
        MemoryDeviceSpec(
            name="hbf-stack",
            capacity_bytes=512 * GB,
            read_bw=1638 * GB,
            write_bw=1638 * GB / 4,
            # quoted bound is "under 80 W"; 79 keeps the derived ratios
            # strictly above 20.5 GBps/W and 6.4 GB/W
            power_watts=79.0,
            read_latency=2e-6,
            read_granularity_bytes=4096,
            write_endurance=Endurance.LOW,
            cost_per_byte=1.0 / GB,
            cost_per_bw=1.0 / GB,
        ),
        MemoryDeviceSpec(
            name="hbm4-6400-stack",
            capacity_bytes=48 * GB,
            read_bw=1638 * GB,
            write_bw=1638 * GB,
            power_watts=40.0,
            read_latency=100e-9,
            read_granularity_bytes=32,
            write_endurance=Endurance.HIGH,
            cost_per_byte=10.0 / GB,
            cost_per_bw=10.0 / GB,
        ),
        MemoryDeviceSpec(
            name="ddr5-6400-64gb",
            capacity_bytes=64 * GB,
            read_bw=51 * GB,
            write_bw=51 * GB,
            power_watts=12.0,
            read_latency=100e-9,
            read_granularity_bytes=64,
            write_endurance=Endurance.HIGH,
            cost_per_byte=3.0 / GB,
            cost_per_bw=4.0 / GB,
        ),
        MemoryDeviceSpec(
            name="lpddr5-6400-16gb",
            capacity_bytes=16 * GB,
            read_bw=51 * GB,
            write_bw=51 * GB,
            power_watts=3.0,
            read_latency=100e-9,
            read_granularity_bytes=64,
            write_endurance=Endurance.HIGH,
            cost_per_byte=3.5 / GB,
            cost_per_bw=1.5 / GB,
        ),
        MemoryDeviceSpec(
            name="flash-card",
            capacity_bytes=4096 * GB,
            read_bw=4 * GB,
            write_bw=1 * GB,
            power_watts=50.0,
            read_latency=20e-6,
            read_granularity_bytes=4096,
            write_endurance=Endurance.LOW,
            cost_per_byte=0.05 / GB,
            cost_per_bw=100.0 / GB,
        ),
    ]


def _builtin_nodes(devices: dict[str, MemoryDeviceSpec]) -> list[NodeSpec]:
    # Illustrative serving nodes for demos and presets, not measured parts.
    hbm = devices["hbm4-6400-stack"]
    hbf = devices["hbf-stack"]
    return [
        NodeSpec(
            name="hbm-node",
            peak_flops=1000e12,
            sram_bytes=256 * MIB,
            tiers=((hbm, 8),),
            network_ports=8,
            chip_power_watts=700.0,
            capex_usd=30000.0,
        ),
        NodeSpec(
            name="hbf-node",
            peak_flops=1000e12,
            sram_bytes=256 * MIB,
            tiers=((hbm, 4), (hbf, 1)),
            network_ports=8,
            chip_power_watts=700.0,
            capex_usd=28000.0,
        ),
    ]


@dataclass
class Catalog:
    """Named devices, HBM generations, and nodes; built-ins plus user entries."""
    devices: dict[str, MemoryDeviceSpec] = field(default_factory=dict)
    generations: dict[str, HbmGeneration] = field(default_factory=dict)
    nodes: dict[str, NodeSpec] = field(default_factory=dict)

    def device(self, name: str) -> MemoryDeviceSpec:
        try:
            return self.devices[name]
        except KeyError:
            raise CatalogError(f"unknown memory device {name!r}") from None

    def generation(self, name: str) -> HbmGeneration:
        try:
            return self.generations[name]
        except KeyError:
            raise CatalogError(f"unknown HBM generation {name!r}") from None

    def node(self, name: str) -> NodeSpec:
        try:
            return self.nodes[name]
        except KeyError:
            raise CatalogError(f"unknown node {name!r}") from None


def builtin_catalog() -> Catalog:
    devices = {d.name: d for d in _builtin_devices()}
    return Catalog(
        devices=devices,
        generations={g.name: g for g in _builtin_generations()},
        nodes={n.name: n for n in _builtin_nodes(devices)},
    )


def _exact_unit(si_value: float, scale: float, op: str = "mul") -> float:
    """A file-unit value v that reloads to si_value bit-exactly.

    ``op`` names how the loader converts back: "mul" for v * scale,
    "div" for v / scale. Conversion by a non-power-of-two scale can drift
    by an ulp; nudge the emitted value until the loader's conversion
    reproduces the stored float, so load(serialize(cat)) round-trips.
    """
    v = si_value / scale if op == "mul" else si_value * scale
    for _ in range(4):
        got = v * scale if op == "mul" else v / scale
        if got == si_value:
            return v
        v = math.nextafter(v, math.inf if got < si_value else -math.inf)
    raise CatalogError(
        f"cannot represent {si_value!r} in units of {scale!r}")


def _opt_num(entry: dict, key: str, path: str, default):
    v = entry.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise CatalogError(f"{path}.{key}: expected number")
    return v


def _need(entry: dict, key: str, path: str, types=(int, float)):
    if key not in entry:
        raise CatalogError(f"{path}: missing field {key!r}")
    v = entry[key]
    if types is str:
        if not isinstance(v, str):
            raise CatalogError(f"{path}.{key}: expected string")
        return v
    if isinstance(v, bool) or not isinstance(v, types):
        raise CatalogError(f"{path}.{key}: expected number")
    return v


def _parse_device(entry: dict, path: str) -> MemoryDeviceSpec:
    name = _need(entry, "name", path, str)
    endurance_raw = entry.get("write_endurance", "high")
    try:
        endurance = Endurance(endurance_raw)
    except ValueError:
        raise CatalogError(
            f"{path}.write_endurance: expected 'high' or 'low', "
            f"got {endurance_raw!r}") from None
    read_bw = _need(entry, "read_bw_gbps", path) * GB
    if "write_bw_gbps" in entry:
        write_bw = _need(entry, "write_bw_gbps", path) * GB
    else:
        # default: symmetric for DRAM-class, quarter-rate for low endurance
        write_bw = read_bw / 4 if endurance is Endurance.LOW else read_bw
    try:
        return MemoryDeviceSpec(
            name=name,
            capacity_bytes=round(_need(entry, "capacity_gib", path) * GIB),
            read_bw=read_bw,
            write_bw=write_bw,
            power_watts=_need(entry, "power_w", path),
            read_latency=_need(entry, "read_latency_ns", path) * 1e-9,
            read_granularity_bytes=int(
                _need(entry, "read_granularity_bytes", path)),
            write_endurance=endurance,
            cost_per_byte=_opt_num(entry, "cost_per_gb_usd", path, 0.0) / GB,
            cost_per_bw=_opt_num(entry, "cost_per_gbps_usd", path, 0.0) / GB,
        )
    except ValueError as e:
        raise CatalogError(f"{path}: {e}") from None


def _parse_generation(entry: dict, path: str) -> HbmGeneration:
    try:
        return HbmGeneration(
            name=_need(entry, "name", path, str),
            pin_rate_gbps=_need(entry, "pin_rate_gbps", path),
            pins=int(_need(entry, "pins", path)),
            dies=int(_need(entry, "dies", path)),
            die_capacity_bytes=round(
                _need(entry, "die_capacity_gib", path) * GIB),
            year=int(entry.get("year", 0)),
        )
    except ValueError as e:
        raise CatalogError(f"{path}: {e}") from None


def _parse_node(entry: dict, path: str,
                devices: dict[str, MemoryDeviceSpec]) -> NodeSpec:
    tiers_raw = entry.get("tiers")
    if not isinstance(tiers_raw, list) or not tiers_raw:
        raise CatalogError(f"{path}.tiers: expected a non-empty array")
    tiers = []
    for i, t in enumerate(tiers_raw):
        tpath = f"{path}.tiers[{i}]"
        if not isinstance(t, dict):
            raise CatalogError(f"{tpath}: expected an object")
        dev_name = _need(t, "device", tpath, str)
        if dev_name not in devices:
            raise CatalogError(f"{tpath}.device: unknown device {dev_name!r}")
        tiers.append((devices[dev_name], int(_need(t, "stacks", tpath))))
    try:
        return NodeSpec(
            name=_need(entry, "name", path, str),
            peak_flops=_need(entry, "peak_tflops", path) * 1e12,
            sram_bytes=round(_opt_num(entry, "sram_mib", path, 0) * MIB),
            tiers=tuple(tiers),
            network_ports=int(_opt_num(entry, "network_ports", path, 1)),
            chip_power_watts=_need(entry, "chip_power_w", path),
            capex_usd=_need(entry, "capex_usd", path),
        )
    except ValueError as e:
        raise CatalogError(f"{path}: {e}") from None


def load_catalog(text: str) -> Catalog:
    """Parse a catalog document and merge it over the built-ins.

    The document is a JSON object with optional top-level arrays
    ``memory_devices``, ``hbm_generations``, and ``nodes``. User entries
    shadow built-ins of the same name. Node tiers may reference both
    built-in and same-document device names.
    """
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as e:
        raise CatalogError(
            f"catalog parse error at line {e.lineno}, column {e.colno}: "
            f"{e.msg}") from None
    if not isinstance(doc, dict):
        raise CatalogError("catalog root must be an object")
    unknown = set(doc) - {"memory_devices", "hbm_generations", "variants",
                          "nodes"}
    if unknown:
        raise CatalogError(f"unknown top-level keys: {sorted(unknown)}")

    cat = builtin_catalog()
    for section, parser, target in [
        ("memory_devices", _parse_device, cat.devices),
        ("hbm_generations", _parse_generation, cat.generations),
    ]:
        seen = set()
        for i, entry in enumerate(doc.get(section, [])):
            path = f"{section}[{i}]"
            if not isinstance(entry, dict):
                raise CatalogError(f"{path}: expected an object")
            parsed = parser(entry, path)
            if parsed.name in seen:
                raise CatalogError(
                    f"{path}: duplicate name {parsed.name!r} in document")
            seen.add(parsed.name)
            target[parsed.name] = parsed

    for i, entry in enumerate(doc.get("variants", [])):
        path = f"variants[{i}]"
        if not isinstance(entry, dict):
            raise CatalogError(f"{path}: expected an object")
        name = _need(entry, "name", path, str)
        base = _need(entry, "base", path, str)
        if base not in cat.devices:
            raise CatalogError(f"{path}.base: unknown device {base!r}")
        try:
            kind = VariantKind(_need(entry, "kind", path, str))
        except ValueError:
            raise CatalogError(
                f"{path}.kind: expected one of "
                f"{[k.value for k in VariantKind]}") from None
        knobs = {}
        for key in ("bw_multiplier", "power_divisor"):
            if entry.get(key) is not None:
                knobs[key] = _need(entry, key, path)
        try:
            variant = Variant(kind, **knobs)
        except VariantRangeError as e:
            raise CatalogError(f"{path}: {e}") from None
        cat.devices[name] = replace(apply_variant(cat.devices[base], variant),
                                    name=name)

    # builtin nodes resolve tier devices by name against the merged set,
    # so a shadowed device flows into them (what-if overrides)
    cat.nodes = {n.name: n for n in _builtin_nodes(cat.devices)}

    seen = set()
    for i, entry in enumerate(doc.get("nodes", [])):
        path = f"nodes[{i}]"
        if not isinstance(entry, dict):
            raise CatalogError(f"{path}: expected an object")
        node = _parse_node(entry, path, cat.devices)
        if node.name in seen:
            raise CatalogError(f"{path}: duplicate name {node.name!r} in document")
        seen.add(node.name)
        cat.nodes[node.name] = node
    return cat


def load_catalog_file(path: str) -> Catalog:
    with open(path) as f:
        return load_catalog(f.read())


def serialize_catalog(cat: Catalog) -> str:
    """Render a catalog back to document form. load(serialize(c)) == c."""
    def dev_entry(d: MemoryDeviceSpec) -> dict:
        return {
            "name": d.name,
            "capacity_gib": d.capacity_bytes / GIB,
            "read_bw_gbps": _exact_unit(d.read_bw, GB),
            "write_bw_gbps": _exact_unit(d.write_bw, GB) if d.write_bw else 0.0,
            "power_w": d.power_watts,
            "read_latency_ns": _exact_unit(d.read_latency, 1e-9)
            if d.read_latency else 0.0,
            "read_granularity_bytes": d.read_granularity_bytes,
            "write_endurance": d.write_endurance.value,
            "cost_per_gb_usd": _exact_unit(d.cost_per_byte, GB, "div")
            if d.cost_per_byte else 0.0,
            "cost_per_gbps_usd": _exact_unit(d.cost_per_bw, GB, "div")
            if d.cost_per_bw else 0.0,
        }

    doc = {
        "memory_devices": [dev_entry(d) for d in cat.devices.values()],
        "hbm_generations": [
            {
                "name": g.name,
                "pin_rate_gbps": g.pin_rate_gbps,
                "pins": g.pins,
                "dies": g.dies,
                "die_capacity_gib": g.die_capacity_bytes / GIB,
                "year": g.year,
            }
            for g in cat.generations.values()
        ],
        "nodes": [
            {
                "name": n.name,
                "peak_tflops": _exact_unit(n.peak_flops, 1e12),
                "sram_mib": n.sram_bytes / MIB,
                "tiers": [
                    {"device": d.name, "stacks": count}
                    for d, count in n.tiers
                ],
                "network_ports": n.network_ports,
                "chip_power_w": n.chip_power_watts,
                "capex_usd": n.capex_usd,
            }
            for n in cat.nodes.values()
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=False)
