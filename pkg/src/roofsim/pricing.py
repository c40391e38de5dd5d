"""Memory price history ingestion and log-linear trend fitting.

Price points carry (fractional year, USD per decimal GB) plus optional raw
size/cost columns and the listing description. Trends are ordinary least
squares on (year, ln price): the fitted annual factor is exp(slope), so a
factor of 0.77 means prices fall to 77% per year.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from importlib import resources

DDR_PRICE_HISTORY_RESOURCE = "ddr_price_history.csv"


class PriceDataError(ValueError):
    """Malformed price history input."""


class InsufficientDataError(ValueError):
    """Fewer than two points in the fit window."""


class DegenerateWindowError(ValueError):
    """All points in the window share one year; slope is undefined."""


class MissingEndpointError(ValueError):
    """A ratio check needs a point at each endpoint year."""


@dataclass(frozen=True)
class PricePoint:
    year: float                   # fractional year, e.g. 2023.25
    usd_per_gb: float
    size_kb: float | None = None
    cost_usd: float | None = None
    description: str = ""

    def __post_init__(self):
        if self.usd_per_gb <= 0:
            raise ValueError(f"usd_per_gb must be positive, got {self.usd_per_gb}")


@dataclass(frozen=True)
class TrendFit:
    """Log-linear price trend over a closed [start, end] year window."""
    annual_factor: float          # price multiplier per year
    intercept_usd_per_gb: float   # fitted price at window start
    r_squared: float
    window: tuple[float, float]
    n_points: int

    def to_dict(self) -> dict:
        return {
            "annual_factor": self.annual_factor,
            "intercept_usd_per_gb": self.intercept_usd_per_gb,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "n_points": self.n_points,
        }

    @staticmethod
    def from_dict(d: dict) -> "TrendFit":
        return TrendFit(
            annual_factor=float(d["annual_factor"]),
            intercept_usd_per_gb=float(d["intercept_usd_per_gb"]),
            r_squared=float(d["r_squared"]),
            window=(float(d["window"][0]), float(d["window"][1])),
            n_points=int(d["n_points"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(text: str) -> "TrendFit":
        return TrendFit.from_dict(json.loads(text))


_REQUIRED_COLUMNS = ("year", "usd_per_gb")
_OPTIONAL_COLUMNS = ("size_kb", "cost_usd", "description")


def ingest_price_history(text: str, lenient: bool = False) -> list[PricePoint]:
    """Parse price history CSV into points sorted by year.

    The header must contain ``year`` and ``usd_per_gb``; ``size_kb``,
    ``cost_usd`` and ``description`` are optional. Malformed data rows
    raise PriceDataError listing 1-based row numbers, unless ``lenient``
    is set, in which case they are skipped.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise PriceDataError("empty price history input")
    missing = [c for c in _REQUIRED_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise PriceDataError(f"missing required columns: {missing}")
    unknown = [c for c in reader.fieldnames
               if c not in _REQUIRED_COLUMNS + _OPTIONAL_COLUMNS]
    if unknown:
        raise PriceDataError(f"unknown columns: {unknown}")

    points = []
    bad_rows = []
    for i, row in enumerate(reader, start=2):  # row 1 is the header
        try:
            year = float(row["year"])
            size_kb = float(row["size_kb"]) if row.get("size_kb") else None
            cost = float(row["cost_usd"]) if row.get("cost_usd") else None
            points.append(PricePoint(
                year=year,
                usd_per_gb=float(row["usd_per_gb"]),
                size_kb=size_kb,
                cost_usd=cost,
                description=(row.get("description") or "").strip(),
            ))
        except (TypeError, ValueError):
            bad_rows.append(i)
    if bad_rows and not lenient:
        raise PriceDataError(f"malformed rows: {bad_rows}")
    points.sort(key=lambda p: p.year)
    return points


def load_bundled_history() -> list[PricePoint]:
    """The DDR price history shipped with the package."""
    text = (resources.files("roofsim.data") / DDR_PRICE_HISTORY_RESOURCE
            ).read_text()
    return ingest_price_history(text)


def fit_trend(points: list[PricePoint],
              window: tuple[float, float]) -> TrendFit:
    """OLS fit of ln(usd_per_gb) against year over a closed window.

    The intercept is the fitted price at the window start, so
    projected price(y) = intercept * annual_factor ** (y - start).
    """
    start, end = window
    if end < start:
        raise ValueError(f"window end {end} before start {start}")
    sel = [p for p in points if start <= p.year <= end]
    if len(sel) < 2:
        raise InsufficientDataError(
            f"need at least 2 points in [{start}, {end}], got {len(sel)}")
    xs = [p.year - start for p in sel]
    ys = [math.log(p.usd_per_gb) for p in sel]
    n = len(sel)
    x_mean = sum(xs) / n
    y_mean = sum(ys) / n
    sxx = sum((x - x_mean) ** 2 for x in xs)
    if sxx == 0:
        raise DegenerateWindowError(
            f"all {n} points in [{start}, {end}] share year {sel[0].year}")
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept_log = y_mean - slope * x_mean
    ss_res = sum((y - (slope * x + intercept_log)) ** 2
                 for x, y in zip(xs, ys))
    ss_tot = sum((y - y_mean) ** 2 for y in ys)
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return TrendFit(
        annual_factor=math.exp(slope),
        intercept_usd_per_gb=math.exp(intercept_log),
        r_squared=r_squared,
        window=(float(start), float(end)),
        n_points=n,
    )


def project_cost(fit: TrendFit, year: float) -> float:
    """Projected USD/GB at a year, extrapolating the fitted trend."""
    return fit.intercept_usd_per_gb * fit.annual_factor ** (year - fit.window[0])


# HBM price index, normalized to 1.0 at 2023. HBM pricing bucks the DDR
# decline: the 2025 level is 1.35x the 2023 level.
HBM_PRICE_INDEX = (
    PricePoint(year=2023.0, usd_per_gb=1.00, description="HBM index"),
    PricePoint(year=2025.0, usd_per_gb=1.35, description="HBM index"),
)


def hbm_trend_check(points=HBM_PRICE_INDEX, start: float = 2023.0,
                    end: float = 2025.0) -> float:
    """Ratio of index value at the end year over the start year."""
    def at(year: float) -> float:
        for p in points:
            if abs(p.year - year) < 1e-9:
                return p.usd_per_gb
        raise MissingEndpointError(f"no index point at year {year}")
    return at(end) / at(start)


# Speed grades parsed from listing descriptions, in module GB/s:
# DDR generations transfer 8 bytes per MT; PC-xxx SDR DIMMs run at the
# stated MHz x 8 bytes; PCxxxx ratings are already MB/s.
_DDR_RE = re.compile(r"\bDDR(\d)?L?[ -](\d{3,5})(?:MHz)?\b", re.IGNORECASE)
_PC_RATED_RE = re.compile(r"\bPC(\d)?-?(\d{4,5})", re.IGNORECASE)
_PC_SDR_RE = re.compile(r"\bPC-?(\d{2,3})\b", re.IGNORECASE)
_COUNT_RE = re.compile(r"\b(\d+)\s*x\s*\d+(?:\.\d+)?\s*[MG]B", re.IGNORECASE)


def module_bandwidth_gbps(description: str) -> float | None:
    """Per-module bandwidth implied by a listing's speed grade, or None."""
    m = _DDR_RE.search(description)
    if m and int(m.group(2)) >= 200:
        return int(m.group(2)) * 8 / 1000  # MT/s x 8 B
    m = _PC_RATED_RE.search(description)
    if m:
        return int(m.group(2)) / 1000      # MB/s rating
    m = _PC_SDR_RE.search(description)
    if m and int(m.group(1)) <= 200:
        return int(m.group(1)) * 8 / 1000  # MHz x 8 B
    return None


def bandwidth_cost_points(points: list[PricePoint]) -> list[PricePoint]:
    """Derive $/GBps points from listings with a parseable speed grade.

    The listing cost is divided by total module bandwidth (module count
    times per-module GB/s). Points without a cost or a recognizable grade
    are excluded. The returned points carry USD per GB/s in the
    ``usd_per_gb`` slot; everything downstream is unit-agnostic.
    """
    out = []
    for p in points:
        if p.cost_usd is None or p.cost_usd <= 0:
            continue
        per_module = module_bandwidth_gbps(p.description)
        if per_module is None:
            continue
        count_m = _COUNT_RE.search(p.description)
        count = int(count_m.group(1)) if count_m else 1
        out.append(PricePoint(
            year=p.year,
            usd_per_gb=p.cost_usd / (count * per_module),
            size_kb=p.size_kb,
            cost_usd=p.cost_usd,
            description=p.description,
        ))
    return out
