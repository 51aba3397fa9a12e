"""Device signatures: ECDSA over the same pairing curve's G1 group.

The curve has prime order and cofactor 1, so textbook ECDSA applies
directly.  Nonces are derived deterministically (HMAC-SHA256 chain in
the RFC 6979 construction) so a device never risks nonce reuse and the
browser client can reproduce signatures bit-for-bit in tests.
"""

import hashlib
import hmac

from . import bn254
from .groups import G1Point, random_scalar

N = int(bn254.R)
_NBYTES = 32


def _bits2int(data):
    """Leftmost min(8*len, 254) bits of data as an integer."""
    x = int.from_bytes(data, "big")
    excess = 8 * len(data) - N.bit_length()
    if excess > 0:
        x >>= excess
    return x


def _hash_to_int(message):
    return _bits2int(hashlib.sha256(message).digest())


def keygen(rng):
    """Returns (private scalar, public key bytes)."""
    priv = random_scalar(rng)
    pub = (priv * G1Point.generator()).to_bytes()
    return priv, pub


def _nonce_stream(priv, z):
    """Deterministic nonce candidates for key priv and digest value z."""
    holder = z % N
    vee = b"\x01" * 32
    kay = b"\x00" * 32
    seed = priv.to_bytes(_NBYTES, "big") + holder.to_bytes(_NBYTES, "big")
    kay = hmac.new(kay, vee + b"\x00" + seed, hashlib.sha256).digest()
    vee = hmac.new(kay, vee, hashlib.sha256).digest()
    kay = hmac.new(kay, vee + b"\x01" + seed, hashlib.sha256).digest()
    vee = hmac.new(kay, vee, hashlib.sha256).digest()
    while True:
        vee = hmac.new(kay, vee, hashlib.sha256).digest()
        yield _bits2int(vee)
        kay = hmac.new(kay, vee + b"\x00", hashlib.sha256).digest()
        vee = hmac.new(kay, vee, hashlib.sha256).digest()


def sign(priv, message):
    """ECDSA signature r ‖ s (64 bytes) over SHA-256 of the message."""
    z = _hash_to_int(message)
    g = G1Point.generator()
    for k in _nonce_stream(priv, z):
        if not 1 <= k < N:
            continue
        point = k * g
        r = int(point.pt[0]) % N
        if r == 0:
            continue
        s = pow(k, -1, N) * (z + r * priv) % N
        if s == 0:
            continue
        return r.to_bytes(_NBYTES, "big") + s.to_bytes(_NBYTES, "big")


def verify(pub_bytes, message, signature):
    """True iff signature is valid for message under the public key."""
    try:
        pub = G1Point.from_bytes(pub_bytes)
    except ValueError:
        return False
    if pub.is_identity() or len(signature) != 2 * _NBYTES:
        return False
    r = int.from_bytes(signature[:_NBYTES], "big")
    s = int.from_bytes(signature[_NBYTES:], "big")
    if not (1 <= r < N and 1 <= s < N):
        return False
    z = _hash_to_int(message)
    w = pow(s, -1, N)
    point = (z * w % N) * G1Point.generator() + (r * w % N) * pub
    if point.is_identity():
        return False
    return int(point.pt[0]) % N == r
