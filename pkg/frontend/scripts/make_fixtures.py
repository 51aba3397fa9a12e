#!/usr/bin/env python3
"""Regenerates tests/fixtures/flow.json: the issuance and vote messages
the reference CLI actually sends under a pinned deterministic seed.

A real 2-of-3 deployment is started from `petition` subprocesses;
recording HTTP proxies sit between the CLI voter and the nodes and
capture the raw request bytes.  The browser client's wire-compatibility
test replays the same seed and must reproduce these bytes.

The file is deterministic; re-running this script must not change it.

Usage: python3 frontend/scripts/make_fixtures.py
"""

import base64
import json
import os
import shutil
import socket
import subprocess
import sys
import tempfile
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

SEED = "wire-fixture-seed"
PETITION = "fixture-petition"
OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures",
                   "flow.json")
CLI = [sys.executable, "-m", "zkpetition.cli"]


def free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class RecordingProxy:
    """Forwards every request to one backend and keeps the raw bytes."""

    def __init__(self, target):
        self.target = target
        self.records = []
        proxy = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"
            wbufsize = -1
            disable_nagle_algorithm = True

            def log_message(self, fmt, *args):
                pass

            def _forward(self, method):
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                if method == "GET":
                    resp = requests.get(proxy.target + self.path, timeout=30)
                else:
                    resp = requests.post(proxy.target + self.path, data=body,
                                         headers={"Content-Type": "application/json"},
                                         timeout=30)
                proxy.records.append({
                    "method": method,
                    "path": self.path,
                    "body": body,
                    "status": resp.status_code,
                    "response": resp.content,
                })
                self.send_response(resp.status_code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(resp.content)))
                self.end_headers()
                self.wfile.write(resp.content)

            def do_GET(self):
                self._forward("GET")

            def do_POST(self):
                self._forward("POST")

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.server.daemon_threads = True
        threading.Thread(target=self.server.serve_forever, daemon=True).start()
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}"

    def shutdown(self):
        self.server.shutdown()


def wait_healthy(url, timeout=30):
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            if requests.get(f"{url}/healthz", timeout=2).status_code == 200:
                return
        except requests.RequestException:
            pass
        time.sleep(0.2)
    raise RuntimeError(f"{url} never became healthy")


def run_cli(args, env, check=True):
    proc = subprocess.run(CLI + args, env=env, capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise RuntimeError(f"cli {args} failed rc={proc.returncode}: {proc.stderr}")
    return proc


def main():
    workdir = tempfile.mkdtemp(prefix="fixture-gen-")
    env = {**os.environ, "PETITION_TEST_SEED": SEED}
    procs = []
    proxies = []
    try:
        keys_dir = os.path.join(workdir, "keys")
        run_cli(["dealer", "--threshold", "2", "--authorities", "3",
                 "--out", keys_dir], env)

        auth_urls = []
        for i in (1, 2, 3):
            port = free_port()
            config = {
                "listen": f"127.0.0.1:{port}",
                "signing_key": os.path.join(keys_dir, f"authority-{i}.key.json"),
                "data_dir": os.path.join(workdir, f"auth{i}"),
            }
            path = os.path.join(workdir, f"auth{i}.json")
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(config, fh)
            procs.append(subprocess.Popen(CLI + ["authority", "serve",
                                                 "--config", path], env=env))
            auth_urls.append(f"http://127.0.0.1:{port}")
        for url in auth_urls:
            wait_healthy(url)

        owner_port = free_port()
        owner_config = {
            "listen": f"127.0.0.1:{owner_port}",
            "authorities": auth_urls,
            "threshold": 2,
            "data_dir": os.path.join(workdir, "owner"),
        }
        path = os.path.join(workdir, "owner.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(owner_config, fh)
        procs.append(subprocess.Popen(CLI + ["owner", "serve",
                                             "--config", path], env=env))
        owner_url = f"http://127.0.0.1:{owner_port}"
        wait_healthy(owner_url)

        run_cli(["create-petition", "--owner", owner_url,
                 "--petition", PETITION], env)

        directory = [requests.get(f"{u}/keys", timeout=10).json()
                     for u in auth_urls]

        sign_proxies = [RecordingProxy(u) for u in auth_urls]
        owner_proxy = RecordingProxy(owner_url)
        proxies = sign_proxies + [owner_proxy]

        state_path = os.path.join(workdir, "voter.json")
        run_cli(["keygen", "--state", state_path], env)
        with open(state_path, encoding="utf-8") as fh:
            state_after_keygen = json.load(fh)

        run_cli(["request-cred", "--state", state_path,
                 "--authorities", ",".join(p.url for p in sign_proxies),
                 "--threshold", "2"], env)
        with open(state_path, encoding="utf-8") as fh:
            state_after_cred = json.load(fh)

        sign_bodies, sign_responses = [], []
        for proxy in sign_proxies:
            posts = [r for r in proxy.records
                     if r["method"] == "POST" and r["path"] == "/sign"]
            assert len(posts) == 1 and posts[0]["status"] == 200
            sign_bodies.append(posts[0]["body"])
            sign_responses.append(json.loads(posts[0]["response"]))
        assert sign_bodies[0] == sign_bodies[1] == sign_bodies[2], \
            "one issuance request is broadcast verbatim"

        run_cli(["vote", "--state", state_path, "--owner", owner_proxy.url,
                 "--petition", PETITION, "--choice", "yes"], env)
        votes = [r for r in owner_proxy.records if r["method"] == "POST"
                 and r["path"] == f"/petitions/{PETITION}/vote"]
        assert len(votes) == 1 and votes[0]["status"] == 200
        assert json.loads(votes[0]["response"])["status"] == "accepted"

        # the proxy URLs are ephemeral; the wire tests never consult them
        state_after_cred["authorities"] = []

        fixture = {
            "seed": SEED,
            "securityTag": "v1",
            "threshold": 2,
            "petitionId": PETITION,
            "voteChoice": "yes",
            "directory": directory,
            "stateAfterKeygen": state_after_keygen,
            "stateAfterCred": state_after_cred,
            "signRequestBody": base64.b64encode(sign_bodies[0]).decode(),
            "signResponses": sign_responses,
            "voteRequestBody": base64.b64encode(votes[0]["body"]).decode(),
            "voteResponse": json.loads(votes[0]["response"]),
        }
        os.makedirs(os.path.dirname(OUT), exist_ok=True)
        with open(OUT, "w", encoding="utf-8") as fh:
            json.dump(fixture, fh, indent=1)
            fh.write("\n")
        print(f"wrote {os.path.normpath(OUT)}")
    finally:
        for proxy in proxies:
            proxy.shutdown()
        for proc in procs:
            proc.terminate()
        for proc in procs:
            proc.wait(timeout=10)
        shutil.rmtree(workdir, ignore_errors=True)


if __name__ == "__main__":
    main()
