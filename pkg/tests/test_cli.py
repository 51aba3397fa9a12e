"""The `petition` command line exercised as real subprocesses: dealer,
node servers, the voter round-trip, exit codes, and seeded determinism."""

import json
import os
import random
import socket
import subprocess
import sys
import time

import pytest
import requests

from oracles import plaintext_tally

CLI = [sys.executable, "-m", "zkpetition.cli"]


def run_cli(*args, env=None, timeout=120):
    merged = dict(os.environ, **(env or {}))
    return subprocess.run(CLI + list(args), capture_output=True, text=True,
                          timeout=timeout, env=merged)


def free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def wait_healthy(url, deadline=15):
    stop = time.monotonic() + deadline
    while time.monotonic() < stop:
        try:
            if requests.get(f"{url}/healthz", timeout=2).status_code == 200:
                return
        except requests.RequestException:
            time.sleep(0.1)
    raise RuntimeError(f"{url} never became healthy")


@pytest.fixture(scope="module")
def cluster(tmp_path_factory):
    """Dealer output plus three authority processes and one owner process."""
    root = tmp_path_factory.mktemp("cli")
    out = run_cli("dealer", "--threshold", "2", "--authorities", "3",
                  "--out", str(root / "keys"))
    assert out.returncode == 0, out.stderr

    procs = []
    auth_urls = []
    for i in (1, 2, 3):
        port = free_port()
        config = root / f"auth{i}.json"
        config.write_text(json.dumps({
            "listen": f"127.0.0.1:{port}",
            "signing_key": str(root / "keys" / f"authority-{i}.key.json"),
            "data_dir": str(root / f"auth{i}-data"),
        }))
        procs.append(subprocess.Popen(
            CLI + ["authority", "serve", "--config", str(config)],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL))
        auth_urls.append(f"http://127.0.0.1:{port}")

    owner_port = free_port()
    owner_config = root / "owner.json"
    owner_config.write_text(json.dumps({
        "listen": f"127.0.0.1:{owner_port}",
        "authorities": auth_urls,
        "threshold": 2,
        "data_dir": str(root / "owner-data"),
    }))
    procs.append(subprocess.Popen(
        CLI + ["owner", "serve", "--config", str(owner_config)],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL))
    owner_url = f"http://127.0.0.1:{owner_port}"

    for url in auth_urls + [owner_url]:
        wait_healthy(url)
    yield {
        "root": root,
        "auth_urls": auth_urls,
        "owner_url": owner_url,
        "authorities_arg": ",".join(auth_urls),
    }
    for proc in procs:
        proc.kill()
    for proc in procs:
        proc.wait()


def _enroll(cluster, path):
    out = run_cli("keygen", "--state", path)
    assert out.returncode == 0, out.stderr
    out = run_cli("request-cred", "--state", path,
                  "--authorities", cluster["authorities_arg"],
                  "--threshold", "2")
    assert out.returncode == 0, out.stderr


def test_dealer_writes_keys(cluster):
    keys = cluster["root"] / "keys"
    bundle = json.loads((keys / "public-keys.json").read_text())
    assert bundle["threshold"] == 2
    assert [k["index"] for k in bundle["keys"]] == [1, 2, 3]
    for i in (1, 2, 3):
        key_file = keys / f"authority-{i}.key.json"
        assert json.loads(key_file.read_text())["index"] == i
        assert oct(key_file.stat().st_mode & 0o777) == "0o600"


def test_dealer_rejects_bad_threshold(tmp_path):
    out = run_cli("dealer", "--threshold", "5", "--authorities", "3",
                  "--out", str(tmp_path / "k"))
    assert out.returncode == 64


def test_keygen_refuses_overwrite(cluster):
    path = str(cluster["root"] / "overwrite.json")
    assert run_cli("keygen", "--state", path).returncode == 0
    out = run_cli("keygen", "--state", path)
    assert out.returncode == 1
    assert "exists" in out.stderr
    assert run_cli("keygen", "--state", path, "--force").returncode == 0


def test_keygen_deterministic_under_test_seed(cluster):
    a = str(cluster["root"] / "seed-a.json")
    b = str(cluster["root"] / "seed-b.json")
    env = {"PETITION_TEST_SEED": "determinism-check"}
    assert run_cli("keygen", "--state", a, env=env).returncode == 0
    assert run_cli("keygen", "--state", b, env=env).returncode == 0
    assert json.loads(open(a).read()) == json.loads(open(b).read())


def test_voter_round_trip(cluster):
    owner = cluster["owner_url"]
    state = str(cluster["root"] / "alice.json")
    _enroll(cluster, state)

    out = run_cli("create-petition", "--owner", owner, "--petition", "cli-p1")
    assert out.returncode == 0, out.stderr

    out = run_cli("result", "--owner", owner, "--petition", "cli-p1")
    assert out.returncode == 2
    assert out.stdout.strip() == "pending"

    out = run_cli("vote", "--state", state, "--owner", owner,
                  "--petition", "cli-p1", "--choice", "yes")
    assert out.returncode == 0, out.stderr

    out = run_cli("vote", "--state", state, "--owner", owner,
                  "--petition", "cli-p1", "--choice", "no")
    assert out.returncode == 1
    assert "already voted" in out.stdout

    out = run_cli("close-petition", "--owner", owner, "--petition", "cli-p1")
    assert out.returncode == 0
    assert "yes 1 – no 0" in out.stdout

    out = run_cli("result", "--owner", owner, "--petition", "cli-p1", "--json")
    assert out.returncode == 0
    assert json.loads(out.stdout) == {"status": "finished", "yes": 1, "no": 0}


def test_result_unknown_petition(cluster):
    out = run_cli("result", "--owner", cluster["owner_url"],
                  "--petition", "no-such")
    assert out.returncode == 1
    assert "unknown_petition" in out.stdout


def test_vote_without_credential(cluster):
    path = str(cluster["root"] / "nocred.json")
    assert run_cli("keygen", "--state", path).returncode == 0
    out = run_cli("vote", "--state", path, "--owner", cluster["owner_url"],
                  "--petition", "cli-p1", "--choice", "yes")
    assert out.returncode == 1
    assert "request-cred" in out.stderr


def test_usage_errors_exit_64():
    assert run_cli().returncode == 64
    assert run_cli("no-such-command").returncode == 64
    assert run_cli("vote", "--badflag").returncode == 64
    assert run_cli("result", "--owner", "http://x").returncode == 64  # missing arg
    out = run_cli("vote", "--state", "s", "--owner", "o", "--petition", "p",
                  "--choice", "maybe")
    assert out.returncode == 64


def test_unreachable_owner_is_protocol_error():
    out = run_cli("result", "--owner", "http://127.0.0.1:1", "--petition", "x")
    assert out.returncode == 1
    assert out.stderr.startswith("error:")


def test_multi_voter_tally_matches_oracle(cluster):
    owner = cluster["owner_url"]
    votes = random.Random(20260815).choices([0, 1], k=4)
    run_cli("create-petition", "--owner", owner, "--petition", "cli-p2")
    for i, v in enumerate(votes):
        state = str(cluster["root"] / f"voter{i}.json")
        _enroll(cluster, state)
        out = run_cli("vote", "--state", state, "--owner", owner,
                      "--petition", "cli-p2",
                      "--choice", "yes" if v else "no")
        assert out.returncode == 0, out.stderr
    out = run_cli("close-petition", "--owner", owner, "--petition", "cli-p2",
                  "--json")
    assert out.returncode == 0, out.stderr
    body = json.loads(out.stdout)
    assert (body["yes"], body["no"]) == plaintext_tally(votes)
