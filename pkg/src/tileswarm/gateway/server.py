"""HTTP gateway: idea submission, snapshots, and a server-sent event stream.

    POST /ideas            {"tile": optional int, "text": str} -> {"tile", "tick"}
    GET  /snapshot         latest completed tick, all tiles, markers, metrics
    GET  /events?since=T   text/event-stream of log records with tick >= T
    GET  /log              the raw event log accumulated so far

Responses are JSON (UTF-8); stream payloads are exactly the log's record
lines.  Errors carry {"error": {"code", "message"}} with HTTP 400/404.
Read endpoints never touch simulation state; writes go through the
LiveRunner's command queue.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..core import IdeaError
from ..harness.scenario import Scenario
from .live import GatewayError, InvalidSince, LiveRunner

STREAM_POLL_SECONDS = 0.02


class GatewayHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    runner: LiveRunner  # set on the server class

    # quiet: the default handler logs every request to stderr
    def log_message(self, format, *args):
        pass

    def _json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, code: str, message: str) -> None:
        self._json(status, {"error": {"code": code, "message": message}})

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self):
        runner = self.server.runner  # type: ignore[attr-defined]
        if urlparse(self.path).path != "/ideas":
            self._error(404, "NotFound", f"no such endpoint {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            tile = payload.get("tile")
            text = payload.get("text", "")
            if tile is not None and not isinstance(tile, int):
                raise GatewayError("tile must be an integer")
            accepted, tick = runner.submit_idea(tile, text)
        except json.JSONDecodeError:
            self._error(400, "BadRequest", "body must be JSON")
        except (IdeaError, GatewayError) as exc:
            self._error(400, type(exc).__name__, str(exc))
        else:
            self._json(200, {"tile": accepted, "tick": tick})

    def do_GET(self):
        runner = self.server.runner  # type: ignore[attr-defined]
        url = urlparse(self.path)
        if url.path == "/snapshot":
            self._json(200, runner.get_snapshot())
        elif url.path == "/log":
            body = runner.log_text().encode("utf-8")
            self.send_response(200)
            self._cors()
            self.send_header("Content-Type", "text/plain; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        elif url.path == "/events":
            self._stream_events(runner, url)
        elif url.path == "/":
            self._json(
                200,
                {
                    "name": "tileswarm gateway",
                    "scenario": runner.scenario.name,
                    "endpoints": ["POST /ideas", "GET /snapshot", "GET /events?since=", "GET /log"],
                },
            )
        else:
            self._error(404, "NotFound", f"no such endpoint {url.path}")

    def _stream_events(self, runner: LiveRunner, url) -> None:
        params = parse_qs(url.query)
        try:
            since = int(params.get("since", ["0"])[0])
        except ValueError:
            self._error(400, "BadRequest", "since must be an integer tick")
            return
        try:
            runner.check_since(since)
        except InvalidSince as exc:
            self._error(400, "InvalidSince", str(exc))
            return

        self.send_response(200)
        self._cors()
        self.send_header("Content-Type", "text/event-stream; charset=utf-8")
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        index = 0
        try:
            while True:
                batch = runner.records_from(index)
                index += len(batch)
                for record in batch:
                    if record.kind == "event" and record.data["tick"] < since:
                        continue
                    self.wfile.write(
                        f"data: {record.line()}\n\n".encode("utf-8")
                    )
                self.wfile.flush()
                if not batch:
                    if runner.done:
                        self.wfile.write(b"event: end\ndata: {}\n\n")
                        self.wfile.flush()
                        return
                    time.sleep(STREAM_POLL_SECONDS)
        except (BrokenPipeError, ConnectionResetError):
            return


class GatewayServer(ThreadingHTTPServer):
    daemon_threads = True
    runner: LiveRunner


def make_server(
    scenario: Scenario, seed: int, host: str = "127.0.0.1", port: int = 0,
    tick_hz: float = 10.0,
) -> tuple[GatewayServer, LiveRunner]:
    runner = LiveRunner(scenario, seed, tick_hz=tick_hz)
    server = GatewayServer((host, port), GatewayHandler)
    server.runner = runner
    return server, runner


def serve(
    scenario: Scenario,
    seed: int,
    host: str = "127.0.0.1",
    port: int = 8642,
    tick_hz: float = 10.0,
    out: str | None = None,
) -> None:
    """Run the gateway until interrupted; write the log when the run ends."""
    server, runner = make_server(scenario, seed, host=host, port=port, tick_hz=tick_hz)
    runner.start()
    print(
        json.dumps(
            {
                "listening": f"http://{host}:{server.server_address[1]}",
                "scenario": scenario.name,
                "seed": seed,
                "duration_ticks": scenario.duration_ticks,
            }
        ),
        flush=True,
    )

    writer_done = threading.Event()

    def write_when_done():
        runner.wait_done()
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(runner.log_text())
            print(json.dumps({"log_written": out}), flush=True)
        writer_done.set()

    threading.Thread(target=write_when_done, daemon=True).start()
    try:
        server.serve_forever(poll_interval=0.1)
    except KeyboardInterrupt:
        pass
    finally:
        runner.stop()
        server.shutdown()
