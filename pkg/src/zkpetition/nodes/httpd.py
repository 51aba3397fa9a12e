"""Threaded HTTP front end for both node kinds.

Plain stdlib server: requests are small, handlers are short, and the
protocol layer does its own locking, so one thread per request is
plenty at petition scale.  Admin routes answer only on loopback.
"""

import json
import os
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import unquote

from .authority import AuthorityNode
from .common import NodeError

_VOTE = re.compile(r"^/petitions/([^/]+)/vote$")
_RESULT = re.compile(r"^/petitions/([^/]+)/result$")
_ADMIN_CLOSE = re.compile(r"^/admin/petitions/([^/]+)/close$")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    # one buffered write per response and no Nagle delay; without these,
    # the header-per-packet writes stall keep-alive round-trips
    wbufsize = -1
    disable_nagle_algorithm = True

    def log_message(self, fmt, *args):
        if os.environ.get("PETITION_HTTP_LOG"):
            super().log_message(fmt, *args)

    def _is_admin_path(self):
        return self.path.split("?", 1)[0].startswith("/admin/")

    def _reply(self, status, body):
        data = json.dumps(body).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        # Voter-facing routes are served to browser pages on other
        # origins; admin routes never get CORS clearance, so a web page
        # cannot reach an operator's loopback-only admin API.
        if not self._is_admin_path():
            self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _read_json(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        self._body_read = True
        if not raw:
            raise NodeError("malformed")
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise NodeError("malformed") from exc
        if not isinstance(body, dict):
            raise NodeError("malformed")
        return body

    def _require_loopback(self):
        if self.client_address[0] not in ("127.0.0.1", "::1"):
            raise NodeError("forbidden", status=403)

    def _dispatch(self, method):
        node = self.server.node
        path = self.path.split("?", 1)[0]
        if method == "GET" and path == "/healthz":
            return 200, {"status": "ok"}
        if isinstance(node, AuthorityNode):
            if method == "GET" and path == "/keys":
                return 200, node.get_keys()
            if method == "POST" and path == "/sign":
                return 200, node.sign_credential(self._read_json())
            if method == "POST" and path == "/decrypt":
                return 200, node.partial_decrypt(self._read_json())
        else:
            match = _VOTE.match(path)
            if method == "POST" and match:
                return 200, node.submit_vote(unquote(match.group(1)), self._read_json())
            match = _RESULT.match(path)
            if method == "GET" and match:
                return 200, node.get_result(unquote(match.group(1)))
            if method == "POST" and path == "/admin/petitions":
                self._require_loopback()
                body = self._read_json()
                if "petitionID" not in body:
                    raise NodeError("malformed")
                return 200, node.create_petition(body["petitionID"])
            match = _ADMIN_CLOSE.match(path)
            if method == "POST" and match:
                self._require_loopback()
                return 200, node.close_petition(unquote(match.group(1)))
        raise NodeError("not_found", status=404)

    def _drain_body(self):
        """Consume any unread request body so the keep-alive connection
        stays framed correctly for the next request."""
        length = int(self.headers.get("Content-Length") or 0)
        if length and not getattr(self, "_body_read", False):
            self.rfile.read(length)
            self._body_read = True

    def _handle(self, method):
        self._body_read = False
        try:
            status, body = self._dispatch(method)
        except NodeError as err:
            status, body = err.status, err.body()
        except Exception:  # no stack traces across the wire
            status, body = 500, {"error": "internal"}
        self._drain_body()
        self._reply(status, body)

    def do_GET(self):
        self._handle("GET")

    def do_POST(self):
        self._handle("POST")

    def do_OPTIONS(self):
        """CORS preflight for browser clients posting JSON bodies."""
        if self._is_admin_path():
            self._reply(403, {"error": "forbidden"})
            return
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Max-Age", "600")
        self.send_header("Content-Length", "0")
        self.end_headers()


def make_server(node, host, port):
    server = ThreadingHTTPServer((host, port), _Handler)
    server.daemon_threads = True
    server.node = node
    return server


def serve_in_thread(node, host="127.0.0.1", port=0):
    """Starts a server on a background thread; returns (server, base_url)."""
    server = make_server(node, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, f"http://{server.server_address[0]}:{server.server_address[1]}"
