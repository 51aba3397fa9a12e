"""Authority node: publishes its keys, blind-signs credential requests,
and applies one partial-decryption step per (petition, stage) at most
once."""

import json
import os
import threading

from .. import credentials, tally
from ..groups import G1Point, default_rng, scalar_from_bytes, scalar_to_bytes
from ..nizk import IssuanceProof, KeyProof
from .common import EventLog, NodeError, b64, unb64, write_atomic


class AuthorityNode:
    """One credential-issuing / tally-decrypting authority."""

    def __init__(self, params, signing_key, data_dir, rng=None):
        self.params = params
        self.sk = signing_key
        self.identity = f"authority-{signing_key.index}"
        self.vk = credentials.AuthorityVerifyKey(
            signing_key.index,
            params.g2,
            signing_key.x * params.g2,
            signing_key.y * params.g2,
        )
        os.makedirs(data_dir, exist_ok=True)
        self.elgamal = self._load_or_create_elgamal(
            os.path.join(data_dir, "elgamal-key.json"), rng or default_rng()
        )
        self._lock = threading.Lock()
        self._stage_log = EventLog(os.path.join(data_dir, "decrypt-stages.jsonl"))
        self._processed = {}
        for _, event in self._stage_log.replay():
            key = (event["petitionID"], event["stage"])
            self._processed[key] = {"yes": event["yes"], "no": event["no"]}

    def _load_or_create_elgamal(self, path, rng):
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                stored = json.load(fh)
            return tally.DecryptKeyPair(
                scalar_from_bytes(unb64(stored["d"])),
                G1Point.from_bytes(unb64(stored["gamma"])),
                KeyProof.from_bytes(unb64(stored["pok"])),
            )
        pair = tally.elgamal_keygen(self.params, self.identity, rng)
        write_atomic(path, json.dumps({
            "d": b64(scalar_to_bytes(pair.d)),
            "gamma": b64(pair.gamma.to_bytes()),
            "pok": b64(pair.pok.to_bytes()),
        }).encode())
        return pair

    # -- GET /keys ---------------------------------------------------------

    def get_keys(self):
        return {
            "index": self.sk.index,
            "identity": self.identity,
            "g2": b64(self.vk.g2.to_bytes()),
            "alpha": b64(self.vk.alpha.to_bytes()),
            "beta": b64(self.vk.beta.to_bytes()),
            "gamma": b64(self.elgamal.gamma.to_bytes()),
            "gamma_proof": b64(self.elgamal.pok.to_bytes()),
        }

    # -- POST /sign --------------------------------------------------------

    def sign_credential(self, body):
        try:
            cipher_bytes = unb64(body["enc_sk_bytes"])
            if len(cipher_bytes) != 130:
                raise ValueError("bad cipher length")
            request = credentials.CredentialRequest(
                gamma=G1Point.from_bytes(unb64(body["gamma_bytes"])),
                c_m=G1Point.from_bytes(unb64(body["pk_cred_bytes"])),
                cipher=(
                    G1Point.from_bytes(cipher_bytes[:65]),
                    G1Point.from_bytes(cipher_bytes[65:]),
                ),
                proof=IssuanceProof.from_bytes(unb64(body["proof"])),
                pk_client=unb64(body["pk_client_bytes"]),
                request_sig=unb64(body["requestSig"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise NodeError("malformed") from exc
        try:
            partial = credentials.blind_sign(self.params, self.sk, request)
        except credentials.IssuanceRejected as exc:
            raise NodeError(exc.code) from exc
        return {"index": self.sk.index, "partial": b64(partial.to_bytes())}

    # -- POST /decrypt -----------------------------------------------------

    def partial_decrypt(self, body):
        try:
            petition_id = body["petitionID"]
            stage = body["stage"]
            if not isinstance(petition_id, str) or not isinstance(stage, int):
                raise ValueError("bad chain header")
            yes_pair = _decode_pair(body["yes"])
            no_pair = _decode_pair(body["no"])
        except (KeyError, TypeError, ValueError) as exc:
            raise NodeError("malformed") from exc
        key = (petition_id, stage)
        with self._lock:
            if key in self._processed:
                # Refuse to apply the key twice; hand back the cached
                # transform so a caller that lost the response can resume.
                raise NodeError("already_processed", status=409,
                                extra=self._processed[key])
            response = {
                "yes": _encode_pair(tally.partial_decrypt(yes_pair, self.elgamal.d)),
                "no": _encode_pair(tally.partial_decrypt(no_pair, self.elgamal.d)),
            }
            self._stage_log.append({
                "petitionID": petition_id,
                "stage": stage,
                **response,
            })
            self._processed[key] = response
        return response


def _decode_pair(value):
    if not (isinstance(value, list) and len(value) == 2):
        raise ValueError("bad pair")
    return (G1Point.from_bytes(unb64(value[0])), G1Point.from_bytes(unb64(value[1])))


def _encode_pair(pair):
    return [b64(pair[0].to_bytes()), b64(pair[1].to_bytes())]
