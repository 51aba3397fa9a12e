"""Typed layer over the pairing curve: scalars, G1/G2/GT elements, the
pairing, hash-to-point, randomness, and the canonical wire encodings
every other module serializes with.

Scalars are plain Python ints kept reduced mod ORDER by the functions
that produce them; points use additive notation (k * P, P + Q).
"""

import hashlib
import os
import secrets

from . import bn254

# Order of G1, G2 and GT (the "p" of PublicParams).
ORDER = int(bn254.R)

G1_LEN = 65
G2_LEN = 129
GT_LEN = 384
SCALAR_LEN = 32


def _fp(x):
    return int(x).to_bytes(32, "big")


def scalar_to_bytes(x):
    if not 0 <= x < ORDER:
        raise ValueError("scalar out of range")
    return int(x).to_bytes(SCALAR_LEN, "big")


def scalar_from_bytes(data):
    if len(data) != SCALAR_LEN:
        raise ValueError("bad scalar length")
    x = int.from_bytes(data, "big")
    if x >= ORDER:
        raise ValueError("scalar out of range")
    return x


class G1Point:
    """Element of G1 (prime order; cofactor 1)."""

    __slots__ = ("pt",)

    def __init__(self, pt):
        self.pt = pt

    @classmethod
    def generator(cls):
        return cls(bn254.G1_GEN)

    @classmethod
    def identity(cls):
        return cls(None)

    def is_identity(self):
        return self.pt is None

    def __add__(self, other):
        return G1Point(bn254.g1_add(self.pt, other.pt))

    def __sub__(self, other):
        return G1Point(bn254.g1_add(self.pt, bn254.g1_neg(other.pt)))

    def __neg__(self):
        return G1Point(bn254.g1_neg(self.pt))

    def __mul__(self, k):
        return G1Point(bn254.g1_mul(self.pt, k))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, G1Point) and self.pt == other.pt

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"G1Point({self.to_bytes().hex()[:16]}…)"

    def to_bytes(self):
        if self.pt is None:
            return b"\x00" * G1_LEN
        x, y = self.pt
        return b"\x04" + _fp(x) + _fp(y)

    @classmethod
    def from_bytes(cls, data):
        if len(data) != G1_LEN:
            raise ValueError("bad G1 length")
        if data == b"\x00" * G1_LEN:
            return cls(None)
        if data[0] != 0x04:
            raise ValueError("bad G1 prefix")
        x = int.from_bytes(data[1:33], "big")
        y = int.from_bytes(data[33:], "big")
        if x >= bn254.P or y >= bn254.P:
            raise ValueError("G1 coordinate out of range")
        pt = (x, y)
        if not bn254.g1_is_on_curve(pt):
            raise ValueError("point not on curve")
        return cls(pt)


class G2Point:
    """Element of the order-ORDER subgroup of the twist."""

    __slots__ = ("pt",)

    def __init__(self, pt):
        self.pt = pt

    @classmethod
    def generator(cls):
        return cls(bn254.G2_GEN)

    @classmethod
    def identity(cls):
        return cls(None)

    def is_identity(self):
        return self.pt is None

    def __add__(self, other):
        return G2Point(bn254.g2_add(self.pt, other.pt))

    def __sub__(self, other):
        return G2Point(bn254.g2_add(self.pt, bn254.g2_neg(other.pt)))

    def __neg__(self):
        return G2Point(bn254.g2_neg(self.pt))

    def __mul__(self, k):
        return G2Point(bn254.g2_mul(self.pt, k))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, G2Point) and self.pt == other.pt

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"G2Point({self.to_bytes().hex()[:16]}…)"

    def to_bytes(self):
        if self.pt is None:
            return b"\x00" * G2_LEN
        (x0, x1), (y0, y1) = self.pt
        return b"\x04" + _fp(x0) + _fp(x1) + _fp(y0) + _fp(y1)

    @classmethod
    def from_bytes(cls, data):
        if len(data) != G2_LEN:
            raise ValueError("bad G2 length")
        if data == b"\x00" * G2_LEN:
            return cls(None)
        if data[0] != 0x04:
            raise ValueError("bad G2 prefix")
        coords = [int.from_bytes(data[1 + 32 * i : 33 + 32 * i], "big") for i in range(4)]
        if any(c >= bn254.P for c in coords):
            raise ValueError("G2 coordinate out of range")
        pt = ((coords[0], coords[1]), (coords[2], coords[3]))
        if not bn254.g2_in_subgroup(pt):
            raise ValueError("point not in G2 subgroup")
        return cls(pt)


class GTElement:
    """Element of GT, written multiplicatively."""

    __slots__ = ("val",)

    def __init__(self, val):
        self.val = val

    @classmethod
    def one(cls):
        return cls(bn254.FP12_ONE)

    def __mul__(self, other):
        return GTElement(bn254.fp12_mul(self.val, other.val))

    def __pow__(self, e):
        return GTElement(bn254.fp12_pow(self.val, e % ORDER))

    def inverse(self):
        return GTElement(bn254.fp12_inv(self.val))

    def __eq__(self, other):
        return isinstance(other, GTElement) and self.val == other.val

    def __repr__(self):
        return f"GTElement({self.to_bytes().hex()[:16]}…)"

    def to_bytes(self):
        out = []
        for c6 in self.val:
            for c2 in c6:
                out.append(_fp(c2[0]))
                out.append(_fp(c2[1]))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data):
        if len(data) != GT_LEN:
            raise ValueError("bad GT length")
        coords = [int.from_bytes(data[32 * i : 32 * i + 32], "big") for i in range(12)]
        if any(c >= bn254.P for c in coords):
            raise ValueError("GT coordinate out of range")
        val = tuple(
            tuple((coords[6 * h + 2 * j], coords[6 * h + 2 * j + 1]) for j in range(3))
            for h in range(2)
        )
        elem = cls(val)
        if bn254.fp12_pow(val, ORDER) != bn254.FP12_ONE:
            raise ValueError("element not in GT subgroup")
        return elem


class PublicParams:
    """Bilinear-group context (p, g1, h1, g2) threaded through everything."""

    __slots__ = ("p", "g1", "h1", "g2")

    def __init__(self, p, g1, h1, g2):
        self.p = p
        self.g1 = g1
        self.h1 = h1
        self.g2 = g2

    def digest(self):
        """Hash binding the parameters into every Fiat-Shamir challenge."""
        return hashlib.sha256(
            b"params"
            + self.p.to_bytes(32, "big")
            + self.g1.to_bytes()
            + self.h1.to_bytes()
            + self.g2.to_bytes()
        ).digest()


def setup(security_tag="v1"):
    """Fixed-curve parameters; h1 is hashed from the tag so its discrete
    log relative to g1 is unknown to everyone."""
    h1 = hash_to_g1(b"h1-gen" + security_tag.encode())
    return PublicParams(ORDER, G1Point.generator(), h1, G2Point.generator())


def hash_to_g1(data):
    """Deterministic try-and-increment hashing onto G1.

    The candidate x is hash(data ‖ counter); the principal square root
    (exponent (P+1)/4) fixes y deterministically.  G1 has cofactor 1,
    so no clearing step is needed.
    """
    if not data:
        raise ValueError("empty input")
    for counter in range(2**16):
        candidate = hashlib.sha256(data + counter.to_bytes(4, "big")).digest()
        x = int.from_bytes(candidate, "big") % bn254.P
        y = bn254.fp_sqrt((x * x * x + 3) % bn254.P)
        if y is not None:
            return G1Point((x, y))
    raise RuntimeError("try-and-increment exhausted")  # pragma: no cover


def pairing(a, b):
    """e(a, b) for a in G1, b in G2."""
    return GTElement(bn254.pairing(a.pt, b.pt))


class SystemRng:
    """Operating-system entropy."""

    def read(self, n):
        return secrets.token_bytes(n)


class SeededRng:
    """SHA-256 counter stream; reproducible across implementations."""

    def __init__(self, seed):
        if isinstance(seed, str):
            seed = seed.encode()
        self._key = hashlib.sha256(seed).digest()
        self._counter = 0
        self._buf = b""

    def read(self, n):
        while len(self._buf) < n:
            block = hashlib.sha256(self._key + self._counter.to_bytes(8, "big")).digest()
            self._counter += 1
            self._buf += block
        out, self._buf = self._buf[:n], self._buf[n:]
        return out


def random_scalar(rng):
    """Uniform in [1, ORDER-1]; zero is excluded (degenerate keys/blinders)."""
    return int.from_bytes(rng.read(64), "big") % (ORDER - 1) + 1


def default_rng():
    """System entropy, unless PETITION_TEST_SEED pins a deterministic stream."""
    seed = os.environ.get("PETITION_TEST_SEED")
    if seed:
        return SeededRng(seed)
    return SystemRng()
