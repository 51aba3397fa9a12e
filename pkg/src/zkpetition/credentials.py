"""Threshold blind credentials: dealer key generation, blind issuance,
unblinding, share aggregation, randomized show, and verification.

The credential on a private attribute m is the pair (h, h^(x+y*m))
written additively as (h, (x + y*m)*h).  Authorities hold Shamir shares
(x_i, y_i); any t partial credentials recombine via Lagrange weights in
the exponent.  A show randomizes the credential and binds it to one
petition through the tag zeta = m*hash_to_g1(petition_id), which is
stable per (credential, petition) and unlinkable across petitions.
"""

from dataclasses import dataclass

from . import devicesig, nizk
from .groups import (
    ORDER,
    G1Point,
    G2Point,
    hash_to_g1,
    pairing,
    random_scalar,
)
from .wire import pack_fields, unpack_fields


class IssuanceRejected(Exception):
    """Blind-sign refusal; .code is 'bad_signature' or 'bad_proof'."""

    def __init__(self, code):
        super().__init__(code)
        self.code = code


@dataclass(frozen=True)
class AuthoritySigningKey:
    index: int
    x: int
    y: int


@dataclass(frozen=True)
class AuthorityVerifyKey:
    index: int
    g2: G2Point
    alpha: G2Point
    beta: G2Point


@dataclass(frozen=True)
class AggregatedVerifyKey:
    g2: G2Point
    alpha: G2Point
    beta: G2Point
    subset: tuple


@dataclass(frozen=True)
class Credential:
    h: G1Point
    s: G1Point

    def to_bytes(self):
        return self.h.to_bytes() + self.s.to_bytes()

    @classmethod
    def from_bytes(cls, data):
        if len(data) != 130:
            raise ValueError("bad credential length")
        return cls(G1Point.from_bytes(data[:65]), G1Point.from_bytes(data[65:]))


@dataclass(frozen=True)
class CredentialRequest:
    gamma: G1Point
    c_m: G1Point
    cipher: tuple  # (a, b) ElGamal encryption of m*h under gamma
    proof: nizk.IssuanceProof
    pk_client: bytes
    request_sig: bytes

    def signed_body(self):
        """The bytes the device key signs: everything except the signature."""
        return pack_fields(
            self.gamma.to_bytes(),
            self.c_m.to_bytes(),
            self.cipher[0].to_bytes(),
            self.cipher[1].to_bytes(),
            self.pk_client,
            self.proof.to_bytes(),
        )


@dataclass(frozen=True)
class BlindedPartial:
    h: G1Point
    a_tilde: G1Point
    b_tilde: G1Point

    def to_bytes(self):
        return self.h.to_bytes() + self.a_tilde.to_bytes() + self.b_tilde.to_bytes()

    @classmethod
    def from_bytes(cls, data):
        if len(data) != 195:
            raise ValueError("bad partial length")
        return cls(
            G1Point.from_bytes(data[:65]),
            G1Point.from_bytes(data[65:130]),
            G1Point.from_bytes(data[130:]),
        )


@dataclass(frozen=True)
class ShowBundle:
    kappa: G2Point
    nu: G1Point
    sigma_prime: Credential
    proof: nizk.ShowProof
    zeta: G1Point

    def to_bytes(self):
        return pack_fields(
            self.kappa.to_bytes(),
            self.nu.to_bytes(),
            self.sigma_prime.to_bytes(),
            self.proof.to_bytes(),
            self.zeta.to_bytes(),
        )

    @classmethod
    def from_bytes(cls, data):
        f = unpack_fields(data, 5)
        return cls(
            G2Point.from_bytes(f[0]),
            G1Point.from_bytes(f[1]),
            Credential.from_bytes(f[2]),
            nizk.ShowProof.from_bytes(f[3]),
            G1Point.from_bytes(f[4]),
        )


def _poly_eval(coeffs, at):
    acc = 0
    for power, coeff in enumerate(coeffs):
        acc = (acc + coeff * pow(at, power, ORDER)) % ORDER
    return acc


def ttp_keygen(params, t, n, rng):
    """Dealer: two random degree t-1 polynomials, shares at 1..n.

    The polynomials go out of scope on return; only the shares survive.
    """
    if not 1 <= t <= n:
        raise ValueError("need 1 <= t <= n")
    v = [random_scalar(rng) for _ in range(t)]
    w = [random_scalar(rng) for _ in range(t)]
    signing, verify = [], []
    for i in range(1, n + 1):
        x_i, y_i = _poly_eval(v, i), _poly_eval(w, i)
        signing.append(AuthoritySigningKey(i, x_i, y_i))
        verify.append(AuthorityVerifyKey(i, params.g2, x_i * params.g2, y_i * params.g2))
    return signing, verify


def lagrange_coefficients(indices):
    """Interpolation weights at zero for the given share indices."""
    if len(set(indices)) != len(indices):
        raise ValueError("duplicate indices")
    if any(i < 1 for i in indices):
        raise ValueError("indices must be >= 1")
    coeffs = []
    for i in indices:
        num, den = 1, 1
        for j in indices:
            if j != i:
                num = num * (0 - j) % ORDER
                den = den * (i - j) % ORDER
        coeffs.append(num * pow(den, -1, ORDER) % ORDER)
    return coeffs


def agg_key(params, verify_keys, t=None):
    """Lagrange-weighted product of a t-subset of verification keys."""
    indices = [vk.index for vk in verify_keys]
    if t is not None and len(verify_keys) != t:
        raise ValueError(f"need exactly {t} keys, got {len(verify_keys)}")
    coeffs = lagrange_coefficients(indices)
    alpha = G2Point.identity()
    beta = G2Point.identity()
    for coeff, vk in zip(coeffs, verify_keys):
        alpha = alpha + coeff * vk.alpha
        beta = beta + coeff * vk.beta
    return AggregatedVerifyKey(params.g2, alpha, beta, tuple(indices))


def request_hash_point(c_m, pk_client):
    """The base point h every party derives from the request alone.

    Hashing the device key in alongside the commitment ties the issued
    credential to the requesting device.
    """
    return hash_to_g1(c_m.to_bytes() + pk_client)


def prepare_blind_sign(params, m, device_priv, device_pub, rng, d=None):
    """Client side of issuance: returns (user decryption key d, request).

    d may be supplied by callers that keep a long-lived user key;
    otherwise a fresh one is drawn.
    """
    if d is None:
        d = random_scalar(rng)
    gamma = d * params.g1
    o = random_scalar(rng)
    c_m = m * params.g1 + o * params.h1
    h = request_hash_point(c_m, device_pub)
    k = random_scalar(rng)
    cipher = (k * params.g1, k * gamma + m * h)
    proof = nizk.prove_issuance(params, d, m, o, k, gamma, c_m, cipher, h,
                                device_pub, rng)
    request = CredentialRequest(gamma, c_m, cipher, proof, device_pub, b"")
    sig = devicesig.sign(device_priv, request.signed_body())
    return d, CredentialRequest(gamma, c_m, cipher, proof, device_pub, sig)


def blind_sign(params, sk, request):
    """Authority side: checks the device signature, then the proof, then
    signs the encrypted attribute without seeing it."""
    h = request_hash_point(request.c_m, request.pk_client)
    if not devicesig.verify(request.pk_client, request.signed_body(),
                            request.request_sig):
        raise IssuanceRejected("bad_signature")
    if not nizk.verify_issuance(params, request.gamma, request.c_m,
                                request.cipher, h, request.pk_client,
                                request.proof):
        raise IssuanceRejected("bad_proof")
    a, b = request.cipher
    return BlindedPartial(h, sk.y * a, sk.x * h + sk.y * b)


def unblind(partial, d):
    """Strips the ElGamal layer: s_i = b_tilde - d*a_tilde."""
    return Credential(partial.h, partial.b_tilde - d * partial.a_tilde)


def agg_cred(indexed_partials):
    """Combines t unblinded shares [(index, Credential)] into one credential."""
    indices = [i for i, _ in indexed_partials]
    creds = [c for _, c in indexed_partials]
    if any(c.h != creds[0].h for c in creds):
        raise ValueError("mismatched base points")
    coeffs = lagrange_coefficients(indices)
    s = G1Point.identity()
    for coeff, cred in zip(coeffs, creds):
        s = s + coeff * cred.s
    return Credential(creds[0].h, s)


def verify_partial(params, vk, m, credential):
    """Pairing identity for one authority's share; used by clients to
    spot a corrupt partial before aggregation."""
    return (
        not credential.h.is_identity()
        and pairing(credential.h, vk.alpha + m * vk.beta)
        == pairing(credential.s, params.g2)
    )


def prove_cred(params, agg_vk, m, credential, petition_id, rng):
    """Randomized show of the credential bound to one petition."""
    r_prime = random_scalar(rng)
    h_prime = r_prime * credential.h
    s_prime = r_prime * credential.s
    r = random_scalar(rng)
    kappa = agg_vk.alpha + m * agg_vk.beta + r * params.g2
    nu = r * h_prime
    basis = hash_to_g1(petition_id.encode())
    zeta = m * basis
    proof = nizk.prove_show(params, agg_vk, m, r, kappa, nu, zeta,
                            h_prime, s_prime, petition_id, basis, rng)
    return ShowBundle(kappa, nu, Credential(h_prime, s_prime), proof, zeta)


def verify_cred(params, agg_vk, bundle, petition_id):
    """Proof check, non-degeneracy check, then the pairing equation
    e(h', kappa) = e(s' + nu, g2)."""
    h_prime = bundle.sigma_prime.h
    s_prime = bundle.sigma_prime.s
    if h_prime.is_identity():
        return False
    basis = hash_to_g1(petition_id.encode())
    if not nizk.verify_show(params, agg_vk, bundle.kappa, bundle.nu,
                            bundle.zeta, h_prime, s_prime, petition_id,
                            basis, bundle.proof):
        return False
    return pairing(h_prime, bundle.kappa) == pairing(s_prime + bundle.nu, params.g2)
