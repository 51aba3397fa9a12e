"""Petition-owner node: petition registry, vote acceptance with the
double-vote ledger, homomorphic accumulation, and orchestration of the
chained decryption across all authorities.

Durability: every accepted mutation is journaled (fsync) before the
in-memory record changes; a snapshot is written every SNAPSHOT_EVERY
events and restart replays the journal suffix over the last snapshot.
"""

import json
import os
import threading
import time

import requests

from .. import credentials, nizk, tally
from ..client import aggregate_directory, fetch_authority_directory
from ..groups import G1Point, hash_to_g1
from ..nizk import BallotProof
from .common import EventLog, NodeError, b64, unb64, write_atomic

SNAPSHOT_EVERY = 64
DECRYPT_RETRIES = 5
RETRY_BASE_DELAY = 0.2


class PetitionRecord:
    """Mutable server-side state of one petition."""

    def __init__(self, petition_id):
        self.petition_id = petition_id
        self.state = "open"  # open -> closed -> decrypting -> finished
        self.total = tally.EncryptedTotal.empty()
        self.spent_zetas = set()
        self.result = None
        self.close_time = None
        self.next_stage = 0
        self.chain_yes = None
        self.chain_no = None
        self.corrupt = False

    def basis(self):
        return hash_to_g1(self.petition_id.encode())

    def to_json(self):
        return {
            "petition_id": self.petition_id,
            "state": self.state,
            "total": {
                "yes": _encode_pair(self.total.yes),
                "no": _encode_pair(self.total.no),
                "n": self.total.n,
            },
            "spent_zetas": sorted(b64(z) for z in self.spent_zetas),
            "result": None if self.result is None else
                {"yes": self.result.yes_count, "no": self.result.no_count},
            "close_time": self.close_time,
            "next_stage": self.next_stage,
            "chain_yes": None if self.chain_yes is None else _encode_pair(self.chain_yes),
            "chain_no": None if self.chain_no is None else _encode_pair(self.chain_no),
            "corrupt": self.corrupt,
        }

    @classmethod
    def from_json(cls, data):
        rec = cls(data["petition_id"])
        rec.state = data["state"]
        rec.total = tally.EncryptedTotal(
            _decode_pair(data["total"]["yes"]),
            _decode_pair(data["total"]["no"]),
            data["total"]["n"],
        )
        rec.spent_zetas = {unb64(z) for z in data["spent_zetas"]}
        if data["result"] is not None:
            rec.result = tally.TallyResult(data["result"]["yes"], data["result"]["no"])
        rec.close_time = data["close_time"]
        rec.next_stage = data["next_stage"]
        if data["chain_yes"] is not None:
            rec.chain_yes = _decode_pair(data["chain_yes"])
            rec.chain_no = _decode_pair(data["chain_no"])
        rec.corrupt = data["corrupt"]
        return rec


class OwnerNode:
    """The petition owner; one per deployment."""

    def __init__(self, params, authority_urls, threshold, data_dir,
                 directory=None, http_session=None):
        self.params = params
        self.authority_urls = list(authority_urls)
        self.threshold = threshold
        os.makedirs(data_dir, exist_ok=True)
        self._snapshot_path = os.path.join(data_dir, "owner-snapshot.json")
        self._log = EventLog(os.path.join(data_dir, "owner-journal.jsonl"))
        self._http = http_session or requests.Session()

        self.petitions = {}
        self._registry_lock = threading.Lock()
        self._petition_locks = {}
        self._restore()

        if directory is None:
            directory = fetch_authority_directory(self.authority_urls,
                                                  session=self._http)
        self.directory = directory
        self.agg_vk, self.gamma_agg = aggregate_directory(params, directory, threshold)

    # -- persistence ---------------------------------------------------------

    def _restore(self):
        snap_seq = 0
        if os.path.exists(self._snapshot_path):
            with open(self._snapshot_path, encoding="utf-8") as fh:
                snap = json.load(fh)
            snap_seq = snap["seq"]
            for data in snap["petitions"]:
                rec = PetitionRecord.from_json(data)
                self.petitions[rec.petition_id] = rec
        for seq, event in self._log.replay():
            if seq > snap_seq:
                self._apply(event)

    def _apply(self, event):
        kind = event["event"]
        if kind == "create":
            self.petitions[event["petitionID"]] = PetitionRecord(event["petitionID"])
            return
        rec = self.petitions[event["petitionID"]]
        if kind == "vote":
            zeta = unb64(event["zeta"])
            enc = tally.VoteCiphertext(
                G1Point.from_bytes(unb64(event["a"])),
                G1Point.from_bytes(unb64(event["b"])),
                rec.basis(),
            )
            rec.spent_zetas.add(zeta)
            rec.total = tally.homomorphic_add(rec.total, enc, tally.derive_inverse(enc))
        elif kind == "close":
            rec.state = "closed"
            rec.close_time = event["time"]
        elif kind == "decrypt_start":
            rec.state = "decrypting"
            rec.chain_yes = rec.total.yes
            rec.chain_no = rec.total.no
            rec.next_stage = 0
        elif kind == "stage_done":
            rec.chain_yes = _decode_pair(event["yes"])
            rec.chain_no = _decode_pair(event["no"])
            rec.next_stage = event["stage"] + 1
        elif kind == "finish":
            rec.state = "finished"
            rec.result = tally.TallyResult(event["yes"], event["no"])
        elif kind == "corrupt":
            rec.corrupt = True

    def _record(self, event):
        """Journal first, then mutate memory; snapshot periodically."""
        seq = self._log.append(event)
        self._apply(event)
        if seq % SNAPSHOT_EVERY == 0:
            self._write_snapshot(seq)

    def _write_snapshot(self, seq):
        snap = {
            "seq": seq,
            "petitions": [rec.to_json() for rec in self.petitions.values()],
        }
        write_atomic(self._snapshot_path, json.dumps(snap).encode())

    def _lock_for(self, petition_id):
        with self._registry_lock:
            return self._petition_locks.setdefault(petition_id, threading.Lock())

    # -- admin -----------------------------------------------------------

    def create_petition(self, petition_id):
        if not petition_id or not isinstance(petition_id, str):
            raise NodeError("malformed")
        with self._lock_for(petition_id):
            if petition_id in self.petitions:
                raise NodeError("petition_exists", status=409)
            self._record({"event": "create", "petitionID": petition_id})
        return {"status": "created", "petitionID": petition_id}

    # -- POST /petitions/{id}/vote ----------------------------------------

    def submit_vote(self, petition_id, body):
        rec = self.petitions.get(petition_id)
        if rec is None:
            raise NodeError("unknown_petition", status=404)
        try:
            bundle = credentials.ShowBundle.from_bytes(unb64(body["MPCP"]))
            ballot_proof = BallotProof.from_bytes(unb64(body["MPVP"]))
            if body["petitionID"] != petition_id:
                raise ValueError("petition id mismatch")
            sig_field = unb64(body["signature"])
            votes = unb64(body["votes"])
            if len(votes) != 4 * 65:
                raise ValueError("bad votes length")
            points = [G1Point.from_bytes(votes[65 * i : 65 * (i + 1)]) for i in range(4)]
        except (KeyError, TypeError, ValueError) as exc:
            raise NodeError("malformed") from exc
        # the standalone signature field must be the bundle's sigma-prime
        if sig_field != bundle.sigma_prime.to_bytes():
            raise NodeError("malformed")

        basis = rec.basis()
        if not credentials.verify_cred(self.params, self.agg_vk, bundle, petition_id):
            raise NodeError("bad_credential_proof")
        enc = tally.VoteCiphertext(points[0], points[1], basis)
        enc_not = tally.VoteCiphertext(points[2], points[3], basis)
        if tally.derive_inverse(enc) != enc_not:
            raise NodeError("bad_vote_proof")
        if not nizk.verify_ballot(
            self.params, self.gamma_agg.gamma_agg, basis, (enc.a, enc.b), ballot_proof
        ):
            raise NodeError("bad_vote_proof")

        zeta = bundle.zeta.to_bytes()
        with self._lock_for(petition_id):
            if rec.state != "open":
                raise NodeError("petition_closed", status=409)
            if zeta in rec.spent_zetas:
                raise NodeError("double_vote", status=409)
            self._record({
                "event": "vote",
                "petitionID": petition_id,
                "zeta": b64(zeta),
                "a": b64(enc.a.to_bytes()),
                "b": b64(enc.b.to_bytes()),
            })
            count = rec.total.n
        return {"status": "accepted", "votes": count}

    # -- GET /petitions/{id}/result -----------------------------------------

    def get_result(self, petition_id):
        rec = self.petitions.get(petition_id)
        if rec is None:
            raise NodeError("unknown_petition", status=404)
        if rec.state != "finished":
            return {"status": "pending", "state": rec.state}
        return {
            "status": "finished",
            "yes": rec.result.yes_count,
            "no": rec.result.no_count,
        }

    # -- POST /admin/petitions/{id}/close -------------------------------------

    def close_petition(self, petition_id):
        rec = self.petitions.get(petition_id)
        if rec is None:
            raise NodeError("unknown_petition", status=404)
        with self._lock_for(petition_id):
            if rec.state == "finished":
                return self.get_result(petition_id)
            if rec.corrupt:
                raise NodeError("tally_corrupt", status=500)
            if rec.state == "open":
                self._record({"event": "close", "petitionID": petition_id,
                              "time": time.time()})
            if rec.state == "closed":
                self._record({"event": "decrypt_start", "petitionID": petition_id})
            self._run_decryption_chain(rec)
            return self.get_result(petition_id)

    def _run_decryption_chain(self, rec):
        for stage in range(rec.next_stage, len(self.authority_urls)):
            url = self.authority_urls[stage]
            response = self._decrypt_stage(url, rec, stage)
            self._record({
                "event": "stage_done",
                "petitionID": rec.petition_id,
                "stage": stage,
                "yes": response["yes"],
                "no": response["no"],
            })
        basis = rec.basis()
        try:
            yes = tally.recover_discrete_log(rec.chain_yes[1], basis, rec.total.n)
            no = tally.recover_discrete_log(rec.chain_no[1], basis, rec.total.n)
        except tally.TallyOutOfRange as exc:
            self._record({"event": "corrupt", "petitionID": rec.petition_id})
            raise NodeError("tally_corrupt", status=500) from exc
        if yes + no != rec.total.n:
            self._record({"event": "corrupt", "petitionID": rec.petition_id})
            raise NodeError("tally_corrupt", status=500)
        self._record({
            "event": "finish",
            "petitionID": rec.petition_id,
            "yes": yes,
            "no": no,
        })

    def _decrypt_stage(self, url, rec, stage):
        payload = {
            "petitionID": rec.petition_id,
            "stage": stage,
            "yes": _encode_pair(rec.chain_yes),
            "no": _encode_pair(rec.chain_no),
        }
        last_error = None
        for attempt in range(DECRYPT_RETRIES):
            try:
                resp = self._http.post(f"{url}/decrypt", json=payload, timeout=10)
            except requests.RequestException as exc:
                last_error = str(exc)
                time.sleep(RETRY_BASE_DELAY * 2**attempt)
                continue
            if resp.status_code == 200:
                return resp.json()
            data = resp.json()
            if data.get("error") == "already_processed" and "yes" in data:
                # this authority served the stage before we crashed; its
                # cached transform lets the chain resume
                return {"yes": data["yes"], "no": data["no"]}
            last_error = data.get("error", f"http {resp.status_code}")
            time.sleep(RETRY_BASE_DELAY * 2**attempt)
        raise NodeError("decrypt_pending", status=503,
                        extra={"stage": stage, "detail": last_error})


def _encode_pair(pair):
    return [b64(pair[0].to_bytes()), b64(pair[1].to_bytes())]


def _decode_pair(value):
    return (G1Point.from_bytes(unb64(value[0])), G1Point.from_bytes(unb64(value[1])))
