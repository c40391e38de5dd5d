"""Command-line entry points.

Exit codes: 0 success, 2 malformed config or data (message names the
field path), 3 no feasible plan. The same evaluation path backs both
the CLI and the HTTP service, so their outputs are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import __version__, pricing, scenario
from .catalog import Catalog, CatalogError, builtin_catalog, \
    load_catalog_file
from .pricing import PriceDataError
from .scenario import ConfigError
from .sharding import Unsatisfiable

CATALOG_ENV = "ROOFSIM_CATALOG"

EXIT_CONFIG = 2
EXIT_UNSAT = 3


def _load_catalog_arg(path: str | None) -> Catalog:
    path = path or os.environ.get(CATALOG_ENV)
    if not path:
        return builtin_catalog()
    return load_catalog_file(path)


def _read_config(path: str) -> dict:
    with open(path) as f:
        raw = f.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError("$", f"config parse error at line {e.lineno}, "
                          f"column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("$", "config root must be an object")
    return doc


# sweep axis grammar: dotted keys with optional [i] list indexes
_AXIS_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)((?:\[\d+\])*)$")


def _set_path(doc: dict, axis: str, value) -> None:
    parts = axis.split(".")
    cur = doc
    for n, part in enumerate(parts):
        m = _AXIS_TOKEN.match(part)
        if not m:
            raise ConfigError(axis, f"bad axis segment {part!r}")
        key, idx_raw = m.group(1), m.group(2)
        idxs = [int(i) for i in re.findall(r"\[(\d+)\]", idx_raw)]
        last = n == len(parts) - 1
        if not isinstance(cur, dict):
            raise ConfigError(axis, f"{key!r} is not reachable")
        if key not in cur:
            if last and not idxs:
                cur[key] = value
                return
            raise ConfigError(axis, f"unknown field {key!r}")
        target = cur[key]
        for j, i in enumerate(idxs):
            if not isinstance(target, list) or i >= len(target):
                raise ConfigError(axis, f"index [{i}] out of range")
            if last and j == len(idxs) - 1:
                target[i] = value
                return
            target = target[i]
        if last:
            if not idxs:
                cur[key] = value
            return
        cur = target


def _cmd_estimate(args) -> int:
    catalog = _load_catalog_arg(args.catalog)
    doc = _read_config(args.config)
    report = scenario.run_config(doc, catalog)
    if args.format == "json":
        sys.stdout.write(scenario.render_json(report))
    elif args.format == "md":
        sys.stdout.write(scenario.render_markdown(report))
    else:
        sys.stdout.write(scenario.render_csv(report))
    return 0


def _cmd_sweep(args) -> int:
    catalog = _load_catalog_arg(args.catalog)
    doc = _read_config(args.config)
    if "explore" in doc.get("sharding", {}):
        raise ConfigError("sharding", "sweep needs an explicit plan config")
    try:
        values = [json.loads(v) for v in args.values]
    except json.JSONDecodeError:
        raise ConfigError(args.axis, "values must be JSON scalars") from None

    cols = ("axis_value",) + scenario.ESTIMATE_COLUMNS
    out = [",".join(cols)]
    for v in values:
        point = json.loads(json.dumps(doc))  # deep copy, JSON-clean
        _set_path(point, args.axis, v)
        report = scenario.run_config(point, catalog)
        row = scenario.report_csv_row(report)
        row["axis_value"] = v
        out.append(",".join(str(row[c]) for c in cols))
    sys.stdout.write("\n".join(out) + "\n")
    return 0


def _cmd_fit_trend(args) -> int:
    with open(args.csv) as f:
        points = pricing.ingest_price_history(f.read(), lenient=args.lenient)
    start, end = args.window
    fit = pricing.fit_trend(points, (start, end))
    span = end - start
    out = {
        "annual_factor": scenario._sig(fit.annual_factor),
        "window_factor": scenario._sig(fit.annual_factor ** span),
        "window_years": span,
        "r_squared": scenario._sig(fit.r_squared),
        "window": [start, end],
        "n_points": fit.n_points,
    }
    sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    return 0


def catalog_summary(catalog: Catalog) -> dict:
    """Deterministic device/node listing used by both CLI and service."""
    return {
        "memory_devices": [{
            "name": d.name,
            "capacity_gb": scenario._sig(d.capacity_bytes / 1e9),
            "read_bw_gbps": scenario._sig(d.read_bw / 1e9),
            "write_bw_gbps": scenario._sig(d.write_bw / 1e9),
            "power_w": scenario._sig(d.power_watts),
            "read_granularity_bytes": d.read_granularity_bytes,
            "write_endurance": d.write_endurance.value,
        } for _, d in sorted(catalog.devices.items())],
        "hbm_generations": [{
            "name": g.name,
            "pins": g.pins,
            "pin_rate_gbps": scenario._sig(g.pin_rate_gbps),
            "stack_bandwidth_gbps": scenario._sig(g.stack_bandwidth() / 1e9),
            "stack_capacity_gib": scenario._sig(g.stack_capacity() / 2**30),
            "year": g.year,
        } for _, g in sorted(catalog.generations.items())],
        "nodes": [{
            "name": n.name,
            "peak_tflops": scenario._sig(n.peak_flops / 1e12),
            "tiers": [{"device": d.name, "stacks": c} for d, c in n.tiers],
            "total_power_w": scenario._sig(n.total_power_watts),
            "capex_usd": scenario._sig(n.capex_usd),
        } for _, n in sorted(catalog.nodes.items())],
    }


def _cmd_catalog(args) -> int:
    catalog = _load_catalog_arg(args.catalog)
    summary = catalog_summary(catalog)
    if args.format == "json":
        sys.stdout.write(json.dumps(summary, sort_keys=True, indent=2) + "\n")
        return 0
    lines = ["# Memory devices", ""]
    lines.append("| name | GB | read GB/s | W | endurance |")
    lines.append("| --- | --- | --- | --- | --- |")
    for d in summary["memory_devices"]:
        lines.append(f"| {d['name']} | {d['capacity_gb']} "
                     f"| {d['read_bw_gbps']} | {d['power_w']} "
                     f"| {d['write_endurance']} |")
    lines += ["", "# Nodes", "", "| name | TFLOPS | tiers | W |",
              "| --- | --- | --- | --- |"]
    for n in summary["nodes"]:
        tiers = " + ".join(f"{t['stacks']}x{t['device']}"
                           for t in n["tiers"])
        lines.append(f"| {n['name']} | {n['peak_tflops']} | {tiers} "
                     f"| {n['total_power_w']} |")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_serve(args) -> int:
    from .service import run_server
    catalog = _load_catalog_arg(args.catalog)
    server = run_server(args.port, catalog, host=args.host)
    host, port = server.server_address[:2]
    print(f"listening on http://{host}:{port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="roofsim",
        description="analytical roofline estimates for LLM inference")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="evaluate one scenario config")
    est.add_argument("config")
    est.add_argument("--format", choices=("json", "md", "csv"),
                     default="json")
    est.add_argument("--catalog")
    est.set_defaults(func=_cmd_estimate)

    sw = sub.add_parser("sweep", help="re-evaluate across one config axis")
    sw.add_argument("config")
    sw.add_argument("--axis", required=True,
                    help="config field path, e.g. request.batch")
    sw.add_argument("--values", required=True, nargs="*",
                    help="JSON scalars, in output order")
    sw.add_argument("--catalog")
    sw.set_defaults(func=_cmd_sweep)

    ft = sub.add_parser("fit-trend", help="fit a price trend over a window")
    ft.add_argument("csv")
    ft.add_argument("--window", required=True, nargs=2, type=float,
                    metavar=("START", "END"))
    ft.add_argument("--lenient", action="store_true",
                    help="skip malformed rows instead of failing")
    ft.set_defaults(func=_cmd_fit_trend)

    cat = sub.add_parser("catalog", help="list devices and nodes")
    cat.add_argument("action", choices=("list",))
    cat.add_argument("--format", choices=("json", "md"), default="json")
    cat.add_argument("--catalog")
    cat.set_defaults(func=_cmd_catalog)

    sv = sub.add_parser("serve", help="run the local JSON-over-HTTP service")
    sv.add_argument("--port", type=int, default=8734)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--catalog")
    sv.set_defaults(func=_cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CatalogError, PriceDataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Unsatisfiable as e:
        detail = e.args[0] if e.args else "no feasible plan"
        if isinstance(detail, dict):
            print("error: no feasible plan", file=sys.stderr)
            print(json.dumps(detail, sort_keys=True, indent=2),
                  file=sys.stderr)
        else:
            print(f"error: {detail}", file=sys.stderr)
        return EXIT_UNSAT


if __name__ == "__main__":
    sys.exit(main())
