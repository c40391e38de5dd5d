"""Local JSON-over-HTTP service for the explorer UI.

Stateless: the catalog is loaded once and shared read-only; every
request carries its full scenario. Estimate responses reuse the CLI's
rendering path byte for byte. CORS is open so a locally served UI can
talk to it from any origin.
"""
from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import __version__, scenario
from .catalog import Catalog, CatalogError, builtin_catalog
from .scenario import ConfigError
from .sharding import Unsatisfiable

MAX_BODY_BYTES = 8 * 2**20


class _Handler(BaseHTTPRequestHandler):
    server_version = "roofsim/" + __version__
    protocol_version = "HTTP/1.1"

    # ------------------------------------------------------------- plumbing
    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, body: bytes):
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods",
                         "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload) -> None:
        body = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        self._send(status, body.encode())

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length <= 0:
            raise ConfigError("$", "request body required")
        if length > MAX_BODY_BYTES:
            raise ConfigError("$", "request body too large")
        raw = self.rfile.read(length)
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ConfigError("$", f"body parse error at line {e.lineno}, "
                              f"column {e.colno}: {e.msg}") from None
        if not isinstance(doc, dict):
            raise ConfigError("$", "config root must be an object")
        return doc

    # ------------------------------------------------------------ handlers
    def do_OPTIONS(self):
        self._send(204, b"")

    def do_GET(self):
        if self.path == "/health":
            self._send_json(200, {"status": "ok", "version": __version__})
        elif self.path == "/catalog":
            from .cli import catalog_summary
            self._send_json(200, catalog_summary(self.server.catalog))
        else:
            self._send_json(404, {"error": f"no route {self.path!r}"})

    def do_POST(self):
        if self.path not in ("/estimate", "/explore"):
            self._send_json(404, {"error": f"no route {self.path!r}"})
            return
        try:
            doc = self._read_body()
            if self.path == "/explore":
                sh = doc.get("sharding")
                if not isinstance(sh, dict) or "explore" not in sh:
                    raise ConfigError("sharding.explore",
                                      "this endpoint needs an explore block")
            report = scenario.run_config(doc, self.server.catalog)
        except (ConfigError, CatalogError) as e:
            path = getattr(e, "path", "$")
            self._send_json(400, {"error": str(e), "path": path})
            return
        except Unsatisfiable as e:
            detail = e.args[0] if e.args else "no feasible plan"
            if isinstance(detail, dict):
                payload = {"error": "no feasible plan", "feasibility": detail}
            else:
                payload = {"error": str(detail), "feasibility": None}
            self._send_json(422, payload)
            return
        except ValueError as e:
            self._send_json(400, {"error": str(e), "path": "$"})
            return
        # exact bytes of the CLI's json rendering
        self._send(200, scenario.render_json(report).encode())


class RoofsimServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, catalog: Catalog):
        self.catalog = catalog
        super().__init__(address, _Handler)


def run_server(port: int, catalog: Catalog | None = None,
               host: str = "127.0.0.1") -> RoofsimServer:
    """Bind and return the server; the caller drives serve_forever()."""
    return RoofsimServer((host, port), catalog or builtin_catalog())
