"""Voter-side protocol client: state file handling, credential issuance
against the authorities, vote construction, and result queries.  The
command-line tool and the end-to-end tests both drive this module."""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import requests

from . import credentials, devicesig, tally
from .groups import (
    G1Point,
    G2Point,
    hash_to_g1,
    random_scalar,
    scalar_from_bytes,
    scalar_to_bytes,
)
from .nizk import KeyProof
from .wire import b64, unb64


class ClientError(Exception):
    """Local protocol failure with a human-readable message."""


@dataclass
class ClientState:
    m: int
    d: int
    device_priv: int
    device_pub: bytes
    credential: Optional[credentials.Credential]
    authorities: list
    threshold: Optional[int]
    security_tag: str = "v1"


def new_state(rng, security_tag="v1"):
    device_priv, device_pub = devicesig.keygen(rng)
    return ClientState(
        m=random_scalar(rng),
        d=random_scalar(rng),
        device_priv=device_priv,
        device_pub=device_pub,
        credential=None,
        authorities=[],
        threshold=None,
        security_tag=security_tag,
    )


def save_state(path, state):
    data = {
        "m": b64(scalar_to_bytes(state.m)),
        "d": b64(scalar_to_bytes(state.d)),
        "device_priv": b64(scalar_to_bytes(state.device_priv)),
        "device_pub": b64(state.device_pub),
        "credential": None if state.credential is None
            else b64(state.credential.to_bytes()),
        "authorities": state.authorities,
        "threshold": state.threshold,
        "security_tag": state.security_tag,
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return ClientState(
        m=scalar_from_bytes(unb64(data["m"])),
        d=scalar_from_bytes(unb64(data["d"])),
        device_priv=scalar_from_bytes(unb64(data["device_priv"])),
        device_pub=unb64(data["device_pub"]),
        credential=None if data["credential"] is None
            else credentials.Credential.from_bytes(unb64(data["credential"])),
        authorities=data["authorities"],
        threshold=data["threshold"],
        security_tag=data.get("security_tag", "v1"),
    )


# -- authority directory -----------------------------------------------------


def fetch_authority_directory(urls, session=None, retries=40, delay=0.25):
    """GET /keys from every authority, waiting for slow starters."""
    import time

    session = session or requests.Session()
    directory = []
    for url in urls:
        record = None
        for _ in range(retries):
            try:
                resp = session.get(f"{url}/keys", timeout=5)
                if resp.status_code == 200:
                    record = resp.json()
                    break
            except requests.RequestException:
                pass
            time.sleep(delay)
        if record is None:
            raise ClientError(f"authority at {url} unreachable")
        record["url"] = url
        directory.append(record)
    return directory


def directory_verify_keys(directory):
    return [
        credentials.AuthorityVerifyKey(
            record["index"],
            G2Point.from_bytes(unb64(record["g2"])),
            G2Point.from_bytes(unb64(record["alpha"])),
            G2Point.from_bytes(unb64(record["beta"])),
        )
        for record in directory
    ]


def aggregate_directory(params, directory, threshold):
    """Aggregated credential key (lowest threshold indices) and n-of-n
    ElGamal key; every key-possession proof is verified on the way."""
    verify_keys = sorted(directory_verify_keys(directory), key=lambda vk: vk.index)
    elgamal_keys = [
        (
            G1Point.from_bytes(unb64(record["gamma"])),
            KeyProof.from_bytes(unb64(record["gamma_proof"])),
            record["identity"],
        )
        for record in directory
    ]
    agg_vk = credentials.agg_key(params, verify_keys[:threshold], t=threshold)
    gamma_agg = tally.aggregate_keys(params, elgamal_keys)
    return agg_vk, gamma_agg


# -- issuance -----------------------------------------------------------------


def credential_request_json(request):
    """The issuance message: commitment, device key, encrypted attribute,
    user ElGamal key, device signature, and the issuance proof."""
    a, b = request.cipher
    return {
        "pk_cred_bytes": b64(request.c_m.to_bytes()),
        "pk_client_bytes": b64(request.pk_client),
        "enc_sk_bytes": b64(a.to_bytes() + b.to_bytes()),
        "gamma_bytes": b64(request.gamma.to_bytes()),
        "requestSig": b64(request.request_sig),
        "proof": b64(request.proof.to_bytes()),
    }


def request_credential(params, state, rng, session=None):
    """Blind issuance against every reachable authority; aggregates the
    first `threshold` partials by index and self-verifies the result."""
    session = session or requests.Session()
    threshold = state.threshold
    if not state.authorities or threshold is None:
        raise ClientError("no authority directory configured")
    directory = fetch_authority_directory(state.authorities, session=session,
                                          retries=1, delay=0)
    vk_by_index = {vk.index: vk for vk in directory_verify_keys(directory)}

    d, request = credentials.prepare_blind_sign(
        params, state.m, state.device_priv, state.device_pub, rng, d=state.d
    )
    payload = credential_request_json(request)

    def ask(record):
        # sessions are not safely shareable across threads; one per worker
        resp = requests.post(f"{record['url']}/sign", json=payload, timeout=15)
        body = resp.json()
        if resp.status_code != 200:
            raise ClientError(
                f"{record['url']} refused: {body.get('error', resp.status_code)}"
            )
        return body

    indexed = []
    failures = []
    with ThreadPoolExecutor(max_workers=max(len(directory), 1)) as pool:
        for record, future in [(r, pool.submit(ask, r)) for r in directory]:
            try:
                body = future.result()
                partial = credentials.BlindedPartial.from_bytes(unb64(body["partial"]))
                share = credentials.unblind(partial, d)
                vk = vk_by_index[body["index"]]
                if not credentials.verify_partial(params, vk, state.m, share):
                    raise ClientError(f"{record['url']} returned an invalid share")
                indexed.append((body["index"], share))
            except (ClientError, requests.RequestException, KeyError, ValueError) as exc:
                failures.append(str(exc))

    if len(indexed) < threshold:
        raise ClientError(
            f"only {len(indexed)} of {threshold} required shares issued: "
            + "; ".join(failures)
        )
    indexed.sort(key=lambda pair: pair[0])
    credential = credentials.agg_cred(indexed[:threshold])

    agg_vk, _ = aggregate_directory(params, directory, threshold)
    probe = credentials.prove_cred(params, agg_vk, state.m, credential,
                                   "credential-self-check", rng)
    if not credentials.verify_cred(params, agg_vk, probe, "credential-self-check"):
        raise ClientError("aggregated credential failed self-verification")
    return replace(state, credential=credential)


# -- voting -------------------------------------------------------------------


def build_vote_submission(params, state, agg_vk, gamma_agg, petition_id, vote,
                          rng):
    """Assembles the five-field vote message for one petition."""
    if state.credential is None:
        raise ClientError("no credential in state; run issuance first")
    bundle = credentials.prove_cred(params, agg_vk, state.m, state.credential,
                                    petition_id, rng)
    basis = hash_to_g1(petition_id.encode())
    enc, enc_not, proof = tally.encrypt_vote(params, gamma_agg.gamma_agg,
                                             basis, vote, rng)
    return {
        "MPCP": b64(bundle.to_bytes()),
        "MPVP": b64(proof.to_bytes()),
        "petitionID": petition_id,
        "signature": b64(bundle.sigma_prime.to_bytes()),
        "votes": b64(enc.a.to_bytes() + enc.b.to_bytes()
                     + enc_not.a.to_bytes() + enc_not.b.to_bytes()),
    }


def cast_vote(params, state, owner_url, petition_id, vote, rng, session=None):
    """Builds and submits a vote; returns the server's JSON verdict."""
    session = session or requests.Session()
    directory = fetch_authority_directory(state.authorities, session=session,
                                          retries=1, delay=0)
    agg_vk, gamma_agg = aggregate_directory(params, directory, state.threshold)
    submission = build_vote_submission(params, state, agg_vk, gamma_agg,
                                       petition_id, vote, rng)
    resp = session.post(f"{owner_url}/petitions/{petition_id}/vote",
                        json=submission, timeout=15)
    return resp.status_code, resp.json()


def get_result(owner_url, petition_id, session=None):
    session = session or requests.Session()
    resp = session.get(f"{owner_url}/petitions/{petition_id}/result", timeout=15)
    return resp.status_code, resp.json()


def admin_create_petition(owner_url, petition_id, session=None):
    session = session or requests.Session()
    resp = session.post(f"{owner_url}/admin/petitions",
                        json={"petitionID": petition_id}, timeout=15)
    return resp.status_code, resp.json()


def admin_close_petition(owner_url, petition_id, session=None):
    session = session or requests.Session()
    resp = session.post(f"{owner_url}/admin/petitions/{petition_id}/close",
                        json={}, timeout=120)
    return resp.status_code, resp.json()
