"""Homomorphic vote tallying: ElGamal key aggregation with rogue-key
defense, exponential ElGamal vote encryption, multiplicative folding of
ciphertexts, chained partial decryption, and small-range discrete-log
recovery.

A vote v is encrypted as (k*g1, k*gamma_agg + v*h) where h is the
petition's base point; multiplying (adding) ciphertexts sums the votes
in the exponent.  Decryption is n-of-n: each authority strips its key
share once, in any order.
"""

from dataclasses import dataclass

from . import nizk
from .groups import G1Point, random_scalar


class RogueKey(Exception):
    """Key aggregation refused; .identity names the offending key."""

    def __init__(self, identity):
        super().__init__(f"invalid key-possession proof for {identity!r}")
        self.identity = identity


class InconsistentBallot(Exception):
    """enc_not does not match the deterministic inverse of enc."""


class TallyOutOfRange(Exception):
    """No exponent up to the cap matches; the tally is corrupt."""


@dataclass(frozen=True)
class DecryptKeyPair:
    d: int
    gamma: G1Point
    pok: nizk.KeyProof


@dataclass(frozen=True)
class AggregatedElGamalKey:
    gamma_agg: G1Point
    contributors: tuple


@dataclass(frozen=True)
class VoteCiphertext:
    a: G1Point
    b: G1Point
    h: G1Point  # petition base point the plaintext exponent lives over

    def to_bytes(self):
        return self.a.to_bytes() + self.b.to_bytes()


@dataclass(frozen=True)
class EncryptedTotal:
    yes: tuple  # (a, b) running products
    no: tuple
    n: int

    @classmethod
    def empty(cls):
        ident = G1Point.identity()
        return cls((ident, ident), (ident, ident), 0)


@dataclass(frozen=True)
class TallyResult:
    yes_count: int
    no_count: int


def elgamal_keygen(params, identity, rng):
    d = random_scalar(rng)
    gamma = d * params.g1
    return DecryptKeyPair(d, gamma, nizk.prove_key(params, d, gamma, identity, rng))


def aggregate_keys(params, keys):
    """keys: [(gamma, pok, identity)]; every proof must verify, which is
    what stops a rogue gamma_fake = gamma_eve - sum(gamma_i) from being
    slipped into the product."""
    gamma_agg = G1Point.identity()
    contributors = []
    for gamma, pok, identity in keys:
        if not nizk.verify_key(params, gamma, identity, pok):
            raise RogueKey(identity)
        gamma_agg = gamma_agg + gamma
        contributors.append(identity)
    return AggregatedElGamalKey(gamma_agg, tuple(contributors))


def derive_inverse(cipher):
    """The vote-inverse ciphertext is a deterministic function of the
    vote ciphertext: (-a, h - b) encrypts 1 - v.  Verifiers recompute it
    rather than trusting (or proof-checking) a second ciphertext."""
    return VoteCiphertext(-cipher.a, cipher.h - cipher.b, cipher.h)


def encrypt_vote(params, gamma_agg, h, v, rng):
    """Returns (enc, enc_not, ballot proof) for v in {0, 1}."""
    if v not in (0, 1):
        raise ValueError("vote must be 0 or 1")
    k = random_scalar(rng)
    a = k * params.g1
    b = k * gamma_agg + v * h
    enc = VoteCiphertext(a, b, h)
    proof = nizk.prove_ballot(params, gamma_agg, h, v, k, (a, b), rng)
    return enc, derive_inverse(enc), proof


def homomorphic_add(total, enc, enc_not):
    """Folds one accepted vote into the running totals."""
    if derive_inverse(enc) != enc_not:
        raise InconsistentBallot()
    yes = (total.yes[0] + enc.a, total.yes[1] + enc.b)
    no = (total.no[0] + enc_not.a, total.no[1] + enc_not.b)
    return EncryptedTotal(yes, no, total.n + 1)


def partial_decrypt(pair, d):
    """One authority's share removal: (a, b) -> (a, b - d*a).

    Not idempotent — applying the same key twice corrupts the result,
    which is why the chain protocol visits each authority exactly once.
    """
    a, b = pair
    return (a, b - d * a)


def recover_discrete_log(target, h, cap):
    """Linear scan for i <= cap with i*h = target; petition tallies are
    small enough that nothing smarter is warranted."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    acc = G1Point.identity()
    for i in range(cap + 1):
        if acc == target:
            return i
        acc = acc + h
    raise TallyOutOfRange(f"no exponent <= {cap} matches")
