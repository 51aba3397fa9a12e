"""Fiat-Shamir sigma proofs for the four statements the system needs:
credential issuance, credential show, binary ballot, and knowledge of a
decryption key.

Every challenge is SHA-256 over a per-proof-kind ASCII tag, the group
parameter digest, and the length-prefixed serialization of the full
statement plus all commitments, reduced mod the group order.  Verifiers
recompute commitments from the responses, so proofs carry only scalars
— except the ballot proof, whose disjunctive transcript keeps both
branches' commitments.
"""

import hashlib
from dataclasses import dataclass

from .groups import (
    ORDER,
    G1Point,
    G2Point,
    random_scalar,
    scalar_from_bytes,
    scalar_to_bytes,
)
from .wire import pack_fields, unpack_fields

TAG_ISSUE = b"zkpetition/proof/issue/v1"
TAG_SHOW = b"zkpetition/proof/show/v1"
TAG_BALLOT = b"zkpetition/proof/ballot/v1"
TAG_KEY = b"zkpetition/proof/key/v1"


def _challenge(tag, params, *parts):
    digest = hashlib.sha256(tag)
    digest.update(params.digest())
    for part in parts:
        digest.update(len(part).to_bytes(4, "big"))
        digest.update(part)
    return int.from_bytes(digest.digest(), "big") % ORDER


# ---------------------------------------------------------------------------
# Issuance proof: knowledge of (d, m, o, k) with
#   gamma = d*g1,  c_m = m*g1 + o*h1,  cipher = (k*g1, k*gamma + m*h)
# bound to the requesting device key.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IssuanceProof:
    challenge: int
    r_d: int
    r_m: int
    r_o: int
    r_k: int

    def to_bytes(self):
        return pack_fields(*(scalar_to_bytes(x) for x in
                             (self.challenge, self.r_d, self.r_m, self.r_o, self.r_k)))

    @classmethod
    def from_bytes(cls, data):
        return cls(*(scalar_from_bytes(f) for f in unpack_fields(data, 5)))


def prove_issuance(params, d, m, o, k, gamma, c_m, cipher, h, pk_client, rng):
    a, b = cipher
    wd, wm, wo, wk = (random_scalar(rng) for _ in range(4))
    cg = wd * params.g1
    cc = wm * params.g1 + wo * params.h1
    ca = wk * params.g1
    cb = wk * gamma + wm * h
    chal = _challenge(
        TAG_ISSUE, params,
        gamma.to_bytes(), c_m.to_bytes(), a.to_bytes(), b.to_bytes(),
        h.to_bytes(), pk_client,
        cg.to_bytes(), cc.to_bytes(), ca.to_bytes(), cb.to_bytes(),
    )
    return IssuanceProof(
        chal,
        (wd - chal * d) % ORDER,
        (wm - chal * m) % ORDER,
        (wo - chal * o) % ORDER,
        (wk - chal * k) % ORDER,
    )


def verify_issuance(params, gamma, c_m, cipher, h, pk_client, proof):
    a, b = cipher
    chal = proof.challenge
    cg = proof.r_d * params.g1 + chal * gamma
    cc = proof.r_m * params.g1 + proof.r_o * params.h1 + chal * c_m
    ca = proof.r_k * params.g1 + chal * a
    cb = proof.r_k * gamma + proof.r_m * h + chal * b
    expected = _challenge(
        TAG_ISSUE, params,
        gamma.to_bytes(), c_m.to_bytes(), a.to_bytes(), b.to_bytes(),
        h.to_bytes(), pk_client,
        cg.to_bytes(), cc.to_bytes(), ca.to_bytes(), cb.to_bytes(),
    )
    return expected == chal


# ---------------------------------------------------------------------------
# Show proof: knowledge of (m, r) with
#   kappa = alpha + m*beta + r*g2,  nu = r*h',  zeta = m*basis
# bound to sigma' and the petition id.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShowProof:
    challenge: int
    r_m: int
    r_r: int

    def to_bytes(self):
        return pack_fields(*(scalar_to_bytes(x) for x in
                             (self.challenge, self.r_m, self.r_r)))

    @classmethod
    def from_bytes(cls, data):
        return cls(*(scalar_from_bytes(f) for f in unpack_fields(data, 3)))


def _show_challenge(params, vk, kappa, nu, zeta, h_prime, s_prime,
                    petition_id, basis, commitments):
    return _challenge(
        TAG_SHOW, params,
        vk.alpha.to_bytes(), vk.beta.to_bytes(),
        kappa.to_bytes(), nu.to_bytes(), zeta.to_bytes(),
        h_prime.to_bytes(), s_prime.to_bytes(),
        petition_id.encode(), basis.to_bytes(),
        *(c.to_bytes() for c in commitments),
    )


def prove_show(params, vk, m, r, kappa, nu, zeta, h_prime, s_prime,
               petition_id, basis, rng):
    wm, wr = random_scalar(rng), random_scalar(rng)
    ck = wm * vk.beta + wr * params.g2
    cn = wr * h_prime
    cz = wm * basis
    chal = _show_challenge(params, vk, kappa, nu, zeta, h_prime, s_prime,
                           petition_id, basis, (ck, cn, cz))
    return ShowProof(chal, (wm - chal * m) % ORDER, (wr - chal * r) % ORDER)


def verify_show(params, vk, kappa, nu, zeta, h_prime, s_prime,
                petition_id, basis, proof):
    chal = proof.challenge
    ck = proof.r_m * vk.beta + proof.r_r * params.g2 + chal * (kappa - vk.alpha)
    cn = proof.r_r * h_prime + chal * nu
    cz = proof.r_m * basis + chal * zeta
    expected = _show_challenge(params, vk, kappa, nu, zeta, h_prime, s_prime,
                               petition_id, basis, (ck, cn, cz))
    return expected == chal


# ---------------------------------------------------------------------------
# Ballot proof: disjunctive Chaum-Pedersen transcript showing the
# ciphertext (a, b) = (k*g1, k*gamma_agg + v*h) encrypts v = 0 or v = 1,
# without revealing which.  One branch is honest, the other simulated;
# the challenge shares must sum to the Fiat-Shamir challenge.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BallotProof:
    A0: G1Point
    B0: G1Point
    c0: int
    r0: int
    A1: G1Point
    B1: G1Point
    c1: int
    r1: int

    def to_bytes(self):
        return pack_fields(
            self.A0.to_bytes(), self.B0.to_bytes(),
            scalar_to_bytes(self.c0), scalar_to_bytes(self.r0),
            self.A1.to_bytes(), self.B1.to_bytes(),
            scalar_to_bytes(self.c1), scalar_to_bytes(self.r1),
        )

    @classmethod
    def from_bytes(cls, data):
        f = unpack_fields(data, 8)
        return cls(
            G1Point.from_bytes(f[0]), G1Point.from_bytes(f[1]),
            scalar_from_bytes(f[2]), scalar_from_bytes(f[3]),
            G1Point.from_bytes(f[4]), G1Point.from_bytes(f[5]),
            scalar_from_bytes(f[6]), scalar_from_bytes(f[7]),
        )


def _ballot_challenge(params, gamma_agg, h, a, b, commitments):
    return _challenge(
        TAG_BALLOT, params,
        gamma_agg.to_bytes(), h.to_bytes(), a.to_bytes(), b.to_bytes(),
        *(c.to_bytes() for c in commitments),
    )


def prove_ballot(params, gamma_agg, h, v, k, cipher, rng):
    if v not in (0, 1):
        raise ValueError("vote must be 0 or 1")
    a, b = cipher
    other = 1 - v
    # simulate the branch we cannot prove
    c_other = random_scalar(rng)
    r_other = random_scalar(rng)
    sim_a = r_other * params.g1 + c_other * a
    sim_b = r_other * gamma_agg + c_other * (b - other * h)
    # honest commitment for the real branch
    w = random_scalar(rng)
    own_a = w * params.g1
    own_b = w * gamma_agg
    if v == 0:
        comms = (own_a, own_b, sim_a, sim_b)
    else:
        comms = (sim_a, sim_b, own_a, own_b)
    chal = _ballot_challenge(params, gamma_agg, h, a, b, comms)
    c_own = (chal - c_other) % ORDER
    r_own = (w - c_own * k) % ORDER
    if v == 0:
        return BallotProof(comms[0], comms[1], c_own, r_own,
                           comms[2], comms[3], c_other, r_other)
    return BallotProof(comms[0], comms[1], c_other, r_other,
                       comms[2], comms[3], c_own, r_own)


def verify_ballot(params, gamma_agg, h, cipher, proof):
    a, b = cipher
    comms = (proof.A0, proof.B0, proof.A1, proof.B1)
    chal = _ballot_challenge(params, gamma_agg, h, a, b, comms)
    if (proof.c0 + proof.c1) % ORDER != chal:
        return False
    if proof.r0 * params.g1 + proof.c0 * a != proof.A0:
        return False
    if proof.r0 * gamma_agg + proof.c0 * b != proof.B0:
        return False
    if proof.r1 * params.g1 + proof.c1 * a != proof.A1:
        return False
    if proof.r1 * gamma_agg + proof.c1 * (b - h) != proof.B1:
        return False
    return True


# ---------------------------------------------------------------------------
# Key-possession proof: Schnorr proof of d with gamma = d*g1, domain
# separated by the signer identity so proofs cannot be replayed.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KeyProof:
    challenge: int
    r_d: int

    def to_bytes(self):
        return pack_fields(scalar_to_bytes(self.challenge), scalar_to_bytes(self.r_d))

    @classmethod
    def from_bytes(cls, data):
        return cls(*(scalar_from_bytes(f) for f in unpack_fields(data, 2)))


def prove_key(params, d, gamma, signer_id, rng):
    w = random_scalar(rng)
    commitment = w * params.g1
    chal = _challenge(TAG_KEY, params, gamma.to_bytes(), signer_id.encode(),
                      commitment.to_bytes())
    return KeyProof(chal, (w - chal * d) % ORDER)


def verify_key(params, gamma, signer_id, proof):
    commitment = proof.r_d * params.g1 + proof.challenge * gamma
    expected = _challenge(TAG_KEY, params, gamma.to_bytes(), signer_id.encode(),
                          commitment.to_bytes())
    return expected == proof.challenge
